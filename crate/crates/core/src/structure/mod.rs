//! Builders for random partitions that encode hierarchical, circular and
//! graph-shaped label structure.

mod graph;
mod hierarchy;
mod rng;

use thiserror::Error;

use crate::partition::{Partition, PartitionError, RandomPartition};

pub use graph::{random_connected_partition, variable_random_partition, wilson_spanning_tree, Graph};
pub use hierarchy::{hierarchy_structure, HierarchySpec};
pub use rng::RngState;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error("graph must have at least one vertex")]
    EmptyGraph,
    #[error("vertex {vertex} out of range for {num_vertices} vertices")]
    VertexOutOfRange { vertex: usize, num_vertices: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("partition size {m} must lie in 1..={num_vertices}")]
    PartitionSize { m: usize, num_vertices: usize },
    #[error("window {window} does not divide {k}")]
    NonDivisibleWindow { k: usize, window: usize },
    #[error("value {0} out of range [0, 1]")]
    OutOfRange(f64),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("level {level} has no group for class {class}")]
    IncompleteLevelMap { level: usize, class: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Singleton partition with weight `p0` plus the `window` rotations of the
/// contiguous-run partition (runs of length `window`, wrapping modulo `k`),
/// each with weight `(1 - p0) / window`. Zero-weight members are omitted.
pub fn circular_structure(k: usize, window: usize, p0: f64) -> Result<RandomPartition, StructureError> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(StructureError::OutOfRange(p0));
    }
    if k == 0 || window == 0 || !k.is_multiple_of(window) {
        return Err(StructureError::NonDivisibleWindow { k, window });
    }
    let mut partitions = Vec::with_capacity(window + 1);
    let mut weights = Vec::with_capacity(window + 1);
    if p0 > 0.0 {
        partitions.push(Partition::singleton(k)?);
        weights.push(p0);
    }
    if p0 < 1.0 {
        let w = (1.0 - p0) / window as f64;
        for offset in 0..window {
            let blocks = (0..k / window)
                .map(|b| (0..window).map(move |t| (offset + b * window + t) % k));
            partitions.push(Partition::new(blocks, k)?);
            weights.push(w);
        }
    }
    Ok(RandomPartition::new(partitions, weights)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn months() {
        let rp = circular_structure(12, 3, 0.4).unwrap();
        assert_eq!(rp.len(), 4);
        assert!(rp.partitions()[0].is_singleton());
        let expect = [
            vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8], vec![9, 10, 11]],
            vec![vec![0, 10, 11], vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]],
            vec![vec![0, 1, 11], vec![2, 3, 4], vec![5, 6, 7], vec![8, 9, 10]],
        ];
        for (p, e) in rp.partitions()[1..].iter().zip(expect) {
            assert_eq!(p.blocks(), e.as_slice());
        }
        assert_eq!(rp.weights()[0], 0.4);
        for w in &rp.weights()[1..] {
            assert!((w - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn small_circle() {
        let rp = circular_structure(4, 2, 0.5).unwrap();
        assert_eq!(rp.weights(), &[0.5, 0.25, 0.25]);
        assert_eq!(rp.partitions()[1].blocks(), &[vec![0, 1], vec![2, 3]]);
        assert_eq!(rp.partitions()[2].blocks(), &[vec![0, 3], vec![1, 2]]);
    }

    #[test]
    fn degenerate_weights_and_errors() {
        assert_eq!(
            circular_structure(12, 3, 1.0).unwrap(),
            RandomPartition::trivial(12).unwrap()
        );
        assert_eq!(circular_structure(12, 4, 0.0).unwrap().len(), 4);
        assert!(matches!(
            circular_structure(12, 5, 0.3),
            Err(StructureError::NonDivisibleWindow { .. })
        ));
        assert!(matches!(
            circular_structure(12, 3, -0.1),
            Err(StructureError::OutOfRange(_))
        ));
    }
}
