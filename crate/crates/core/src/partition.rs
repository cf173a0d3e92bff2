//! Partitions of a finite label set, random partitions over them, and the
//! random-block distribution they induce.
//!
//! Labels are dense indices `0..k`. Every [`Partition`] is kept in canonical
//! form (blocks sorted by smallest member, members ascending) so that two
//! partitions built from the same family of blocks compare equal.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entropy::ProbDist;

/// Absolute tolerance applied to every "sums to one" check.
pub const WEIGHT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartitionError {
    #[error("partition must cover at least one class")]
    NoClasses,
    #[error("block {0} is empty")]
    EmptyBlock(usize),
    #[error("class {0} appears in more than one block")]
    Overlap(usize),
    #[error("class {0} is not covered by any block")]
    Missing(usize),
    #[error("class {index} is out of range for {num_classes} classes")]
    OutOfRange { index: usize, num_classes: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("random partition has no partitions")]
    EmptyStructure,
    #[error("{partitions} partitions but {weights} weights")]
    WeightCount { partitions: usize, weights: usize },
    #[error("invalid weight {0}: weights must be finite and non-negative")]
    NegativeWeight(f64),
    #[error("weights sum to {0}, expected 1")]
    WeightSum(f64),
}

/// A set of disjoint non-empty blocks covering `0..num_classes`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    // class -> index of its block
    block_of: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    num_classes: usize,
    blocks: Vec<Vec<usize>>,
}

impl TryFrom<PartitionRepr> for Partition {
    type Error = PartitionError;

    fn try_from(repr: PartitionRepr) -> Result<Self, Self::Error> {
        Partition::new(repr.blocks, repr.num_classes)
    }
}

impl From<Partition> for PartitionRepr {
    fn from(p: Partition) -> Self {
        PartitionRepr {
            num_classes: p.num_classes(),
            blocks: p.blocks,
        }
    }
}

impl Partition {
    /// Validates a block family and returns it in canonical order.
    pub fn new<B, I>(blocks: B, num_classes: usize) -> Result<Self, PartitionError>
    where
        B: IntoIterator<Item = I>,
        I: IntoIterator<Item = usize>,
    {
        if num_classes == 0 {
            return Err(PartitionError::NoClasses);
        }
        let mut owner: Vec<Option<usize>> = vec![None; num_classes];
        let mut canon: Vec<Vec<usize>> = Vec::new();
        for (b, block) in blocks.into_iter().enumerate() {
            let mut members: Vec<usize> = block.into_iter().collect();
            if members.is_empty() {
                return Err(PartitionError::EmptyBlock(b));
            }
            members.sort_unstable();
            for w in members.windows(2) {
                if w[0] == w[1] {
                    return Err(PartitionError::Overlap(w[0]));
                }
            }
            for &m in &members {
                if m >= num_classes {
                    return Err(PartitionError::OutOfRange {
                        index: m,
                        num_classes,
                    });
                }
                if owner[m].is_some() {
                    return Err(PartitionError::Overlap(m));
                }
                owner[m] = Some(b);
            }
            canon.push(members);
        }
        if let Some(missing) = owner.iter().position(Option::is_none) {
            return Err(PartitionError::Missing(missing));
        }
        canon.sort_unstable_by_key(|b| b[0]);
        Ok(Self::from_canonical(canon, num_classes))
    }

    fn from_canonical(blocks: Vec<Vec<usize>>, num_classes: usize) -> Self {
        let mut block_of = vec![0; num_classes];
        for (b, block) in blocks.iter().enumerate() {
            for &m in block {
                block_of[m] = b;
            }
        }
        Partition { blocks, block_of }
    }

    /// Builds a partition from a class -> group assignment. Classes sharing a
    /// group id end up in the same block.
    pub fn from_assignment<T: Ord>(groups: &[T]) -> Result<Self, PartitionError> {
        let mut by_group: BTreeMap<&T, Vec<usize>> = BTreeMap::new();
        for (class, g) in groups.iter().enumerate() {
            by_group.entry(g).or_default().push(class);
        }
        Partition::new(by_group.into_values(), groups.len())
    }

    /// `{{0}, {1}, ..., {k-1}}`
    pub fn singleton(num_classes: usize) -> Result<Self, PartitionError> {
        if num_classes == 0 {
            return Err(PartitionError::NoClasses);
        }
        Ok(Self::from_canonical(
            (0..num_classes).map(|i| vec![i]).collect(),
            num_classes,
        ))
    }

    /// The partition with a single block holding every class.
    pub fn one_block(num_classes: usize) -> Result<Self, PartitionError> {
        if num_classes == 0 {
            return Err(PartitionError::NoClasses);
        }
        Ok(Self::from_canonical(
            vec![(0..num_classes).collect()],
            num_classes,
        ))
    }

    pub fn num_classes(&self) -> usize {
        self.block_of.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    pub fn is_singleton(&self) -> bool {
        self.blocks.len() == self.block_of.len()
    }

    /// Index of the block containing `label`.
    pub fn coarsen_label(&self, label: usize) -> Result<usize, PartitionError> {
        self.block_of
            .get(label)
            .copied()
            .ok_or(PartitionError::OutOfRange {
                index: label,
                num_classes: self.num_classes(),
            })
    }

    /// Class -> block lookup table.
    pub fn block_assignment(&self) -> &[usize] {
        &self.block_of
    }

    /// Probability mass of each block under `dist`.
    pub fn coarsen_dist(&self, dist: &ProbDist) -> Result<ProbDist, PartitionError> {
        check_dim(self.num_classes(), dist.len())?;
        Ok(ProbDist::from_unchecked(self.block_masses(dist.probs())))
    }

    /// Block masses of an arbitrary non-negative vector (no normalisation check).
    pub(crate) fn block_masses(&self, probs: &[f64]) -> Vec<f64> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&j| probs[j]).sum())
            .collect()
    }

    /// Applies a relabelling `perm[old] = new` to every member.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self, PartitionError> {
        check_dim(self.num_classes(), perm.len())?;
        Partition::new(
            self.blocks
                .iter()
                .map(|b| b.iter().map(|&m| perm[m]).collect::<Vec<_>>()),
            self.num_classes(),
        )
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{{")?;
            for (j, m) in b.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{m}")?;
            }
            write!(f, "}}")?;
        }
        f.write_str("}")
    }
}

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<(), PartitionError> {
    if expected != actual {
        return Err(PartitionError::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// A probability distribution over a set of partitions sharing the same label set.
///
/// Duplicate partitions are kept as separate entries; weights are never merged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RandomPartitionRepr", into = "RandomPartitionRepr")]
pub struct RandomPartition {
    partitions: Vec<Partition>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RandomPartitionRepr {
    partitions: Vec<Partition>,
    weights: Vec<f64>,
}

impl TryFrom<RandomPartitionRepr> for RandomPartition {
    type Error = PartitionError;

    fn try_from(r: RandomPartitionRepr) -> Result<Self, Self::Error> {
        RandomPartition::new(r.partitions, r.weights)
    }
}

impl From<RandomPartition> for RandomPartitionRepr {
    fn from(r: RandomPartition) -> Self {
        RandomPartitionRepr {
            partitions: r.partitions,
            weights: r.weights,
        }
    }
}

impl RandomPartition {
    pub fn new(partitions: Vec<Partition>, weights: Vec<f64>) -> Result<Self, PartitionError> {
        if partitions.is_empty() {
            return Err(PartitionError::EmptyStructure);
        }
        if partitions.len() != weights.len() {
            return Err(PartitionError::WeightCount {
                partitions: partitions.len(),
                weights: weights.len(),
            });
        }
        let k = partitions[0].num_classes();
        for p in &partitions[1..] {
            check_dim(k, p.num_classes())?;
        }
        if let Some(&w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(PartitionError::NegativeWeight(w));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(PartitionError::WeightSum(total));
        }
        Ok(RandomPartition {
            partitions,
            weights,
        })
    }

    /// The singleton partition with probability one.
    pub fn trivial(num_classes: usize) -> Result<Self, PartitionError> {
        Ok(RandomPartition {
            partitions: vec![Partition::singleton(num_classes)?],
            weights: vec![1.0],
        })
    }

    pub fn num_classes(&self) -> usize {
        self.partitions[0].num_classes()
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Partition, f64)> {
        self.partitions.iter().zip(self.weights.iter().copied())
    }

    /// True when every partition with positive weight is the singleton partition.
    pub fn is_trivial(&self) -> bool {
        self.iter().all(|(p, w)| w == 0.0 || p.is_singleton())
    }

    /// Applies a class relabelling `perm[old] = new` to every partition.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self, PartitionError> {
        let partitions = self
            .partitions
            .iter()
            .map(|p| p.relabel(perm))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RandomPartition {
            partitions,
            weights: self.weights.clone(),
        })
    }

    /// Distribution of the random block: the block of the sampled partition
    /// that contains the sampled label. Identical blocks contributed by
    /// different partitions are merged.
    pub fn random_block_dist(&self, dist: &ProbDist) -> Result<BlockUnionDist, PartitionError> {
        check_dim(self.num_classes(), dist.len())?;
        let mut merged: BTreeMap<&[usize], f64> = BTreeMap::new();
        for (p, w) in self.iter() {
            for (block, mass) in p.blocks().iter().zip(p.block_masses(dist.probs())) {
                *merged.entry(block.as_slice()).or_insert(0.0) += w * mass;
            }
        }
        let mut entries: Vec<(Vec<usize>, f64)> =
            merged.into_iter().map(|(b, p)| (b.to_vec(), p)).collect();
        // smallest member first, then shorter blocks first
        entries.sort_by(|a, b| a.0[0].cmp(&b.0[0]).then(a.0.len().cmp(&b.0.len())));
        let (blocks, probs) = entries.into_iter().unzip();
        Ok(BlockUnionDist { blocks, probs })
    }
}

/// Distribution over the union of blocks used by a random partition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockUnionDist {
    pub blocks: Vec<Vec<usize>>,
    pub probs: Vec<f64>,
}

impl BlockUnionDist {
    pub fn prob_of(&self, block: &[usize]) -> Option<f64> {
        let mut sorted = block.to_vec();
        sorted.sort_unstable();
        self.blocks
            .iter()
            .position(|b| *b == sorted)
            .map(|i| self.probs[i])
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}
