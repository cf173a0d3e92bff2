use serde::{Deserialize, Serialize};

use super::BoostError;
use crate::partition::RandomPartition;
use crate::structure::{Graph, RngState};

/// Which loss the booster optimises.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossSpec {
    /// Ordinary softmax cross-entropy.
    Standard,
    /// Structured cross-entropy under a fixed random partition.
    Fixed { structure: RandomPartition },
    /// Structured cross-entropy whose block partition is redrawn from the
    /// graph every round.
    Variable {
        graph: Graph,
        partition_size: usize,
        p0: f64,
    },
}

impl LossSpec {
    pub fn label(&self) -> String {
        match self {
            LossSpec::Standard => "standard".into(),
            LossSpec::Fixed { .. } => "fixed".into(),
            LossSpec::Variable {
                partition_size, p0, ..
            } => format!("variable(m={partition_size},p0={p0})"),
        }
    }

    /// The random partition for the next round.
    pub(crate) fn draw(
        &self,
        num_classes: usize,
        rng: &mut RngState,
    ) -> Result<RandomPartition, BoostError> {
        Ok(match self {
            LossSpec::Standard => RandomPartition::trivial(num_classes)?,
            LossSpec::Fixed { structure } => structure.clone(),
            LossSpec::Variable {
                graph,
                partition_size,
                p0,
            } => crate::structure::variable_random_partition(graph, *partition_size, *p0, rng)?,
        })
    }
}

/// Curvature used in leaf values and split gains.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HessianKind {
    /// Weight-averaged Fisher diagonal of the coarse log losses. Never
    /// negative; equals the exact diagonal for the standard loss.
    #[default]
    Fisher,
    /// Exact diagonal of the structured loss with negative entries set to zero.
    ClampedExact,
}

/// Hyperparameters of [`fit`](super::fit).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostConfig {
    pub num_rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    /// L2 penalty added to every leaf Hessian sum.
    pub lambda: f64,
    pub seed: u64,
    pub loss: LossSpec,
    #[serde(default)]
    pub hessian: HessianKind,
    /// Accept datasets with a single observed class. Debug only.
    #[serde(default)]
    pub allow_single_class: bool,
}

impl Default for BoostConfig {
    fn default() -> Self {
        BoostConfig {
            num_rounds: 100,
            learning_rate: 0.1,
            max_depth: 3,
            min_samples_leaf: 5,
            lambda: 1.0,
            seed: 0,
            loss: LossSpec::Standard,
            hessian: HessianKind::Fisher,
            allow_single_class: false,
        }
    }
}

impl BoostConfig {
    pub fn validate(&self, num_classes: usize) -> Result<(), BoostError> {
        let bad = |m: &str| Err(BoostError::InvalidConfig(m.to_owned()));
        if self.num_rounds == 0 {
            return bad("num_rounds must be at least 1");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        if self.max_depth == 0 {
            return bad("max_depth must be at least 1");
        }
        if self.min_samples_leaf == 0 {
            return bad("min_samples_leaf must be at least 1");
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return bad("lambda must be non-negative");
        }
        match &self.loss {
            LossSpec::Standard => {}
            LossSpec::Fixed { structure } => {
                if structure.num_classes() != num_classes {
                    return Err(BoostError::InvalidConfig(format!(
                        "structure covers {} classes, data has {num_classes}",
                        structure.num_classes()
                    )));
                }
            }
            LossSpec::Variable {
                graph,
                partition_size,
                p0,
            } => {
                if graph.num_vertices() != num_classes {
                    return Err(BoostError::InvalidConfig(format!(
                        "graph has {} vertices, data has {num_classes} classes",
                        graph.num_vertices()
                    )));
                }
                if *partition_size == 0 || *partition_size > num_classes {
                    return bad("partition size must lie in 1..=k");
                }
                if !(0.0..=1.0).contains(p0) {
                    return bad("p0 must lie in [0, 1]");
                }
                if !graph.is_connected() {
                    return bad("structure graph is not connected");
                }
            }
        }
        Ok(())
    }
}
