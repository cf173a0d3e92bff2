use ndarray::Array2;
use serde::Serialize;

use super::{BoostError, BoostModel, Dataset};
use crate::loss::{
    accuracy, coarsened_accuracy, log_loss, softmax, structured_log_loss, LabelBatch,
};
use crate::partition::RandomPartition;

/// Test-set metrics for a fitted model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub num_rows: usize,
    pub log_loss: f64,
    pub accuracy: f64,
    /// Present when a random partition was supplied.
    pub structured_log_loss: Option<f64>,
    /// One entry per partition of the supplied random partition.
    pub coarsened_accuracy: Vec<f64>,
}

pub fn evaluate(
    model: &BoostModel,
    data: &Dataset,
    structure: Option<&RandomPartition>,
) -> Result<EvalReport, BoostError> {
    if data.num_classes() != model.num_classes {
        return Err(BoostError::DimensionMismatch {
            expected: model.num_classes,
            actual: data.num_classes(),
        });
    }
    let probs = model.predict_proba(data.features())?;
    let labels = LabelBatch::new(data.labels().to_vec(), data.num_classes())?;
    let mut report = EvalReport {
        num_rows: data.num_rows(),
        log_loss: log_loss(probs.view(), &labels)?,
        accuracy: accuracy(probs.view(), &labels)?,
        structured_log_loss: None,
        coarsened_accuracy: Vec::new(),
    };
    if let Some(rp) = structure {
        report.structured_log_loss = Some(structured_log_loss(probs.view(), &labels, rp)?);
        report.coarsened_accuracy = rp
            .partitions()
            .iter()
            .map(|p| coarsened_accuracy(probs.view(), &labels, p))
            .collect::<Result<_, _>>()?;
    }
    Ok(report)
}

/// Log loss on `data` of the model truncated after each round, accumulated in
/// the same order as [`BoostModel::predict_logits`].
pub fn staged_log_loss(model: &BoostModel, data: &Dataset) -> Result<Vec<f64>, BoostError> {
    if data.num_classes() != model.num_classes {
        return Err(BoostError::DimensionMismatch {
            expected: model.num_classes,
            actual: data.num_classes(),
        });
    }
    if data.num_features() != model.num_features {
        return Err(BoostError::DimensionMismatch {
            expected: model.num_features,
            actual: data.num_features(),
        });
    }
    let labels = LabelBatch::new(data.labels().to_vec(), data.num_classes())?;
    let k = model.num_classes;
    let mut logits = Array2::from_shape_fn((data.num_rows(), k), |(_, c)| model.base_logits[c]);
    let mut out = Vec::with_capacity(model.trees.len());
    for tree in &model.trees {
        for (x, mut z) in data.features().outer_iter().zip(logits.outer_iter_mut()) {
            let leaf = tree.leaf_values(x);
            for c in 0..k {
                z[c] += model.learning_rate * leaf[c];
            }
        }
        out.push(log_loss(softmax(logits.view())?.view(), &labels)?);
    }
    Ok(out)
}
