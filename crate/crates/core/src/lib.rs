//! Structured entropy over random partitions of a label set, the structured
//! cross-entropy loss derived from it, and a multiclass gradient-boosting
//! trainer that optimises that loss with vector-valued leaves.
//!
//! Module map:
//!
//! - [`partition`]: partitions, random partitions, random-block distributions
//! - [`entropy`]: structured entropy and its conditional, relative, mutual and joint forms
//! - [`loss`]: structured log loss, gradients and diagonal Hessians, accuracies
//! - [`structure`]: hierarchical, circular and graph-derived random partitions
//! - [`gbm`]: boosting with vector-valued leaves
//! - [`synthetic`]: synthetic circular and grid benchmarks

pub mod entropy;
pub mod gbm;
pub mod loss;
pub mod partition;
pub mod structure;
pub mod synthetic;

pub use entropy::{JointTable, LogBase, ProbDist};
pub use loss::{GradHess, LabelBatch};
pub use partition::{BlockUnionDist, Partition, RandomPartition};
pub use structure::{Graph, HierarchySpec, RngState};
