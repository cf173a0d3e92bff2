use ndarray::{Array2, ArrayView2};

use super::BoostError;

/// Feature matrix plus class labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Vec<usize>,
    num_classes: usize,
    pub feature_names: Option<Vec<String>>,
    pub class_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(
        features: Array2<f64>,
        labels: Vec<usize>,
        num_classes: usize,
    ) -> Result<Self, BoostError> {
        if features.nrows() != labels.len() {
            return Err(BoostError::DimensionMismatch {
                expected: features.nrows(),
                actual: labels.len(),
            });
        }
        if num_classes == 0 {
            return Err(BoostError::DegenerateDataset("no classes".into()));
        }
        if let Some(((row, col), _)) = features.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(BoostError::NonFiniteFeature { row, col });
        }
        if let Some(&label) = labels.iter().find(|&&y| y >= num_classes) {
            return Err(BoostError::LabelOutOfRange { label, num_classes });
        }
        Ok(Dataset {
            features: features.as_standard_layout().into_owned(),
            labels,
            num_classes,
            feature_names: None,
            class_names: None,
        })
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self, BoostError> {
        if names.len() != self.num_features() {
            return Err(BoostError::DimensionMismatch {
                expected: self.num_features(),
                actual: names.len(),
            });
        }
        self.feature_names = Some(names);
        Ok(self)
    }

    pub fn with_class_names(mut self, names: Vec<String>) -> Result<Self, BoostError> {
        if names.len() != self.num_classes {
            return Err(BoostError::DimensionMismatch {
                expected: self.num_classes,
                actual: names.len(),
            });
        }
        self.class_names = Some(names);
        Ok(self)
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn num_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn num_features(&self) -> usize {
        self.features.ncols()
    }

    /// Rows at the given indices, in order.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select(ndarray::Axis(0), rows),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            num_classes: self.num_classes,
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    pub fn distinct_labels(&self) -> usize {
        let mut seen = vec![false; self.num_classes];
        for &y in &self.labels {
            seen[y] = true;
        }
        seen.into_iter().filter(|s| *s).count()
    }
}
