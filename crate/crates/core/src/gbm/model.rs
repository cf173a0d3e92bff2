use std::io::{Read, Write};

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::tree::Tree;
use super::{BoostConfig, BoostError};
use crate::loss::softmax;

pub const MODEL_FORMAT: &str = "strent-boost-model";
pub const MODEL_VERSION: u32 = 1;

/// A fitted booster: base logits plus a sequence of vector-leaf trees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostModel {
    pub num_classes: usize,
    pub num_features: usize,
    pub base_logits: Vec<f64>,
    pub learning_rate: f64,
    pub trees: Vec<Tree>,
    pub config: BoostConfig,
    /// Training log loss after each round.
    pub train_log_loss: Vec<f64>,
    #[serde(default)]
    pub feature_names: Option<Vec<String>>,
    #[serde(default)]
    pub class_names: Option<Vec<String>>,
}

#[derive(Serialize)]
struct EnvelopeOut<'a> {
    format: &'a str,
    version: u32,
    model: &'a BoostModel,
}

#[derive(Deserialize)]
struct EnvelopeIn {
    format: String,
    version: u32,
    model: BoostModel,
}

impl BoostModel {
    /// `base_logits + learning_rate * sum of leaf vectors` for every row.
    pub fn predict_logits(&self, features: ArrayView2<f64>) -> Result<Array2<f64>, BoostError> {
        if features.ncols() != self.num_features {
            return Err(BoostError::DimensionMismatch {
                expected: self.num_features,
                actual: features.ncols(),
            });
        }
        let k = self.num_classes;
        let mut out = Array2::zeros((features.nrows(), k));
        for (x, mut z) in features.outer_iter().zip(out.outer_iter_mut()) {
            for c in 0..k {
                z[c] = self.base_logits[c];
            }
            for tree in &self.trees {
                let leaf = tree.leaf_values(x);
                for c in 0..k {
                    z[c] += self.learning_rate * leaf[c];
                }
            }
        }
        Ok(out)
    }

    pub fn predict_proba(&self, features: ArrayView2<f64>) -> Result<Array2<f64>, BoostError> {
        Ok(softmax(self.predict_logits(features)?.view())?)
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<(), BoostError> {
        let env = EnvelopeOut {
            format: MODEL_FORMAT,
            version: MODEL_VERSION,
            model: self,
        };
        serde_json::to_writer_pretty(writer, &env).map_err(|e| BoostError::Serialization(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String, BoostError> {
        let mut buf = Vec::new();
        self.write_json(&mut buf)?;
        Ok(String::from_utf8(buf).expect("serde_json emits utf-8"))
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Self, BoostError> {
        let env: EnvelopeIn =
            serde_json::from_reader(reader).map_err(|e| BoostError::Serialization(e.to_string()))?;
        if env.format != MODEL_FORMAT {
            return Err(BoostError::Serialization(format!(
                "unexpected format {:?}",
                env.format
            )));
        }
        if env.version != MODEL_VERSION {
            return Err(BoostError::Serialization(format!(
                "unsupported model version {}",
                env.version
            )));
        }
        let m = env.model;
        if m.base_logits.len() != m.num_classes {
            return Err(BoostError::Serialization("base logits length mismatch".into()));
        }
        Ok(m)
    }

    pub fn from_json(text: &str) -> Result<Self, BoostError> {
        Self::read_json(text.as_bytes())
    }
}
