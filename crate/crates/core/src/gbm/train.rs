use ndarray::Array2;

use super::tree::{grow, GrowParams, Targets};
use super::{BoostConfig, BoostError, BoostModel, Dataset, HessianKind};
use crate::loss::{
    accumulate_fisher_diag, accumulate_grad_hess, log_loss, softmax_row, LabelBatch, PROB_FLOOR,
};
use crate::structure::RngState;

/// Log of the empirical class priors, floored at [`PROB_FLOOR`].
pub fn base_logits(labels: &[usize], num_classes: usize) -> Vec<f64> {
    let mut counts = vec![0usize; num_classes];
    for &y in labels {
        counts[y] += 1;
    }
    let n = labels.len() as f64;
    counts
        .into_iter()
        .map(|c| (c as f64 / n).max(PROB_FLOOR).ln())
        .collect()
}

/// Trains a booster. Each round draws the round's random partition (a fresh
/// one in variable mode), computes per-observation gradients and diagonal
/// curvatures of the structured loss at the current logits, grows one tree
/// on the Newton gain and adds `learning_rate` times its leaf vectors.
pub fn fit(data: &Dataset, config: &BoostConfig, rng: &mut RngState) -> Result<BoostModel, BoostError> {
    let k = data.num_classes();
    config.validate(k)?;
    let n = data.num_rows();
    if n < 2 {
        return Err(BoostError::DegenerateDataset(format!("{n} observations")));
    }
    if data.distinct_labels() < 2 && !config.allow_single_class {
        return Err(BoostError::DegenerateDataset("only one distinct label".into()));
    }
    let x = data.features();
    let labels = LabelBatch::new(data.labels().to_vec(), k)?;
    let base = base_logits(data.labels(), k);
    let mut logits = Array2::from_shape_fn((n, k), |(_, c)| base[c]);
    let mut probs = Array2::<f64>::zeros((n, k));
    let mut grad = vec![0.0; n * k];
    let mut hess = vec![0.0; n * k];
    let params = GrowParams {
        max_depth: config.max_depth,
        min_samples_leaf: config.min_samples_leaf,
        lambda: config.lambda,
    };

    let mut trees = Vec::with_capacity(config.num_rounds);
    let mut history = Vec::with_capacity(config.num_rounds);
    for _ in 0..config.num_rounds {
        let rp = config.loss.draw(k, rng)?;
        grad.fill(0.0);
        hess.fill(0.0);
        for i in 0..n {
            let z = logits.row(i);
            let mut q = probs.row_mut(i);
            let q = q.as_slice_mut().expect("standard layout");
            softmax_row(z, q);
            let (g, h) = (&mut grad[i * k..(i + 1) * k], &mut hess[i * k..(i + 1) * k]);
            accumulate_grad_hess(z, q, data.labels()[i], &rp, g, h);
            match config.hessian {
                HessianKind::Fisher => {
                    h.fill(0.0);
                    accumulate_fisher_diag(q, &rp, h);
                }
                HessianKind::ClampedExact => h.iter_mut().for_each(|v| *v = v.max(0.0)),
            }
        }
        let tree = grow(
            x,
            &Targets {
                grad: &grad,
                hess: &hess,
                k,
            },
            &params,
        );
        for (i, xi) in x.outer_iter().enumerate() {
            let leaf = tree.leaf_values(xi);
            for c in 0..k {
                logits[[i, c]] += config.learning_rate * leaf[c];
            }
        }
        for (z, mut q) in logits.outer_iter().zip(probs.outer_iter_mut()) {
            softmax_row(z, q.as_slice_mut().expect("standard layout"));
        }
        history.push(log_loss(probs.view(), &labels)?);
        trees.push(tree);
    }

    Ok(BoostModel {
        num_classes: k,
        num_features: data.num_features(),
        base_logits: base,
        learning_rate: config.learning_rate,
        trees,
        config: config.clone(),
        train_log_loss: history,
        feature_names: data.feature_names.clone(),
        class_names: data.class_names.clone(),
    })
}
