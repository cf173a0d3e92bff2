//! Multiclass gradient boosting with vector-valued leaves and diagonal
//! Hessians, driven by a standard, fixed structured, or per-round resampled
//! structured cross-entropy loss.

mod config;
mod dataset;
mod eval;
mod model;
mod train;
mod tree;

use thiserror::Error;

pub use config::{BoostConfig, HessianKind, LossSpec};
pub use dataset::Dataset;
pub use eval::{evaluate, staged_log_loss, EvalReport};
pub use model::{BoostModel, MODEL_FORMAT, MODEL_VERSION};
pub use train::{base_logits, fit};
pub use tree::{Node, Tree};

use crate::loss::LossError;
use crate::partition::PartitionError;
use crate::structure::StructureError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoostError {
    #[error("degenerate dataset: {0}")]
    DegenerateDataset(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("non-finite feature at row {row}, column {col}")]
    NonFiniteFeature { row: usize, col: usize },
    #[error("label {label} out of range for {num_classes} classes")]
    LabelOutOfRange { label: usize, num_classes: usize },
    #[error("model serialization: {0}")]
    Serialization(String),
    #[error(transparent)]
    Loss(#[from] LossError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}
