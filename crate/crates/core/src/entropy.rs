//! Shannon and structured entropy, together with the conditional, relative,
//! mutual and joint variants defined over random partitions.
//!
//! All quantities use the convention `0 * log 0 = 0`. The natural logarithm is
//! the default; [`LogBase::Two`] reports in bits.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partition::{Partition, PartitionError, RandomPartition, WEIGHT_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntropyError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("value {0} out of range")]
    OutOfRange(f64),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

impl LogBase {
    #[inline]
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
        }
    }
}

fn check_dim(expected: usize, actual: usize) -> Result<(), EntropyError> {
    if expected != actual {
        return Err(EntropyError::DimensionMismatch { expected, actual });
    }
    Ok(())
}

fn validate_probs(probs: &[f64]) -> Result<(), EntropyError> {
    if probs.is_empty() {
        return Err(EntropyError::InvalidDistribution("empty".into()));
    }
    if let Some(p) = probs
        .iter()
        .find(|p| !p.is_finite() || **p < 0.0 || **p > 1.0 + WEIGHT_TOLERANCE)
    {
        return Err(EntropyError::InvalidDistribution(format!(
            "entry {p} outside [0, 1]"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOLERANCE {
        return Err(EntropyError::InvalidDistribution(format!(
            "entries sum to {total}"
        )));
    }
    Ok(())
}

/// A probability vector over `k` classes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbDist(Vec<f64>);

impl ProbDist {
    pub fn new(probs: Vec<f64>) -> Result<Self, EntropyError> {
        validate_probs(&probs)?;
        Ok(ProbDist(probs))
    }

    pub fn uniform(k: usize) -> Result<Self, EntropyError> {
        if k == 0 {
            return Err(EntropyError::InvalidDistribution("empty".into()));
        }
        Ok(ProbDist(vec![1.0 / k as f64; k]))
    }

    pub fn one_hot(k: usize, index: usize) -> Result<Self, EntropyError> {
        if index >= k {
            return Err(EntropyError::OutOfRange(index as f64));
        }
        let mut p = vec![0.0; k];
        p[index] = 1.0;
        Ok(ProbDist(p))
    }

    /// Empirical distribution of `labels` over `k` classes.
    pub fn from_counts(labels: &[usize], k: usize) -> Result<Self, EntropyError> {
        if labels.is_empty() {
            return Err(EntropyError::InvalidDistribution("no observations".into()));
        }
        let mut counts = vec![0.0; k];
        for &y in labels {
            if y >= k {
                return Err(EntropyError::OutOfRange(y as f64));
            }
            counts[y] += 1.0;
        }
        let n = labels.len() as f64;
        Ok(ProbDist(counts.into_iter().map(|c| c / n).collect()))
    }

    pub(crate) fn from_unchecked(probs: Vec<f64>) -> Self {
        ProbDist(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Joint distribution of `(X, Y)` with rows indexed by `X` and columns by `Y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointTable {
    rows: usize,
    cols: usize,
    cells: Vec<f64>,
}

impl JointTable {
    pub fn new(table: Vec<Vec<f64>>) -> Result<Self, EntropyError> {
        let rows = table.len();
        let cols = table.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(EntropyError::InvalidDistribution("empty joint table".into()));
        }
        if let Some(bad) = table.iter().find(|r| r.len() != cols) {
            return Err(EntropyError::DimensionMismatch {
                expected: cols,
                actual: bad.len(),
            });
        }
        let cells: Vec<f64> = table.into_iter().flatten().collect();
        validate_probs(&cells)?;
        Ok(JointTable { rows, cols, cells })
    }

    /// Independent joint `P(x, y) = px(x) py(y)`.
    pub fn product(px: &ProbDist, py: &ProbDist) -> Self {
        let cells = px
            .probs()
            .iter()
            .flat_map(|a| py.probs().iter().map(move |b| a * b))
            .collect();
        JointTable {
            rows: px.len(),
            cols: py.len(),
            cells,
        }
    }

    pub fn x_size(&self) -> usize {
        self.rows
    }

    pub fn y_size(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.cells[x * self.cols + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.cells[x * self.cols..(x + 1) * self.cols]
    }

    /// Marginal of `X` (row sums).
    pub fn x_marginal(&self) -> ProbDist {
        ProbDist((0..self.rows).map(|x| self.row(x).iter().sum()).collect())
    }

    /// Marginal of `Y` (column sums).
    pub fn y_marginal(&self) -> ProbDist {
        let mut m = vec![0.0; self.cols];
        for x in 0..self.rows {
            for (acc, v) in m.iter_mut().zip(self.row(x)) {
                *acc += v;
            }
        }
        ProbDist(m)
    }

    /// Swaps the roles of `X` and `Y`.
    pub fn transpose(&self) -> Self {
        let mut cells = Vec::with_capacity(self.cells.len());
        for y in 0..self.cols {
            for x in 0..self.rows {
                cells.push(self.get(x, y));
            }
        }
        JointTable {
            rows: self.cols,
            cols: self.rows,
            cells,
        }
    }

    /// Row-major flattening onto the product space, index `x * |S_Y| + y`.
    pub fn flatten(&self) -> ProbDist {
        ProbDist(self.cells.clone())
    }

    /// Sums cells within the blocks of `rows_by` (on X) and `cols_by` (on Y).
    fn coarsen(&self, rows_by: &Partition, cols_by: &Partition) -> Vec<Vec<f64>> {
        let rb = rows_by.block_assignment();
        let cb = cols_by.block_assignment();
        let mut out = vec![vec![0.0; cols_by.num_blocks()]; rows_by.num_blocks()];
        for x in 0..self.rows {
            for (y, v) in self.row(x).iter().enumerate() {
                out[rb[x]][cb[y]] += v;
            }
        }
        out
    }
}

/// `-sum p log p` over a non-negative vector.
fn entropy_of(probs: &[f64], base: LogBase) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .fold(0.0, |h, &p| h - p * base.log(p))
}

/// `H(B | A)` for a (possibly coarsened) joint table, skipping rows of zero mass.
fn conditional_entropy_of(table: &[Vec<f64>], base: LogBase) -> f64 {
    table
        .iter()
        .map(|row| {
            let mass: f64 = row.iter().sum();
            if mass <= 0.0 {
                return 0.0;
            }
            row.iter()
                .filter(|&&p| p > 0.0)
                .map(|&p| -p * base.log(p / mass))
                .sum::<f64>()
        })
        .sum()
}

pub fn shannon_entropy(dist: &ProbDist, base: LogBase) -> f64 {
    entropy_of(dist.probs(), base)
}

/// Weighted average over the random partition of the Shannon entropy of the
/// coarsened variable.
pub fn structured_entropy(
    dist: &ProbDist,
    rp: &RandomPartition,
    base: LogBase,
) -> Result<f64, EntropyError> {
    check_dim(rp.num_classes(), dist.len())?;
    Ok(rp
        .iter()
        .map(|(p, w)| w * entropy_of(&p.block_masses(dist.probs()), base))
        .sum())
}

/// Conditional entropy of the random block given the partition drawn,
/// computed as `H(Z, Z(Y)) - H(Z)` from the joint law of (partition, block).
pub fn random_block_conditional_entropy(
    dist: &ProbDist,
    rp: &RandomPartition,
    base: LogBase,
) -> Result<f64, EntropyError> {
    check_dim(rp.num_classes(), dist.len())?;
    let mut joint = Vec::new();
    for (p, w) in rp.iter() {
        joint.extend(p.block_masses(dist.probs()).into_iter().map(|m| w * m));
    }
    Ok(entropy_of(&joint, base) - entropy_of(rp.weights(), base))
}

/// `H(Y_Z | X_W)` where the joint table has rows indexed by `X`.
pub fn conditional_structured_entropy(
    joint: &JointTable,
    w_on_x: &RandomPartition,
    z_on_y: &RandomPartition,
    base: LogBase,
) -> Result<f64, EntropyError> {
    check_dim(joint.x_size(), w_on_x.num_classes())?;
    check_dim(joint.y_size(), z_on_y.num_classes())?;
    let mut total = 0.0;
    for (sy, q) in z_on_y.iter() {
        for (rx, r) in w_on_x.iter() {
            total += q * r * conditional_entropy_of(&joint.coarsen(rx, sy), base);
        }
    }
    Ok(total)
}

/// Structured KL divergence `sum_i q_i D(S_i(P) || S_i(Q))`.
///
/// Returns `f64::INFINITY` when some block has positive mass under `p` and
/// zero mass under `q`.
pub fn structured_relative_entropy(
    p: &ProbDist,
    q: &ProbDist,
    rp: &RandomPartition,
    base: LogBase,
) -> Result<f64, EntropyError> {
    check_dim(p.len(), q.len())?;
    check_dim(rp.num_classes(), p.len())?;
    let mut total = 0.0;
    for (part, w) in rp.iter() {
        let pm = part.block_masses(p.probs());
        let qm = part.block_masses(q.probs());
        let mut d = 0.0;
        for (a, b) in pm.into_iter().zip(qm) {
            if a > 0.0 {
                if b <= 0.0 {
                    if w > 0.0 {
                        return Ok(f64::INFINITY);
                    }
                    continue;
                }
                d += a * base.log(a / b);
            }
        }
        total += w * d;
    }
    Ok(total)
}

/// Structured cross-entropy `-sum_i q_i sum_B P(B) log Q(B)`.
pub fn structured_cross_entropy(
    p: &ProbDist,
    q: &ProbDist,
    rp: &RandomPartition,
    base: LogBase,
) -> Result<f64, EntropyError> {
    check_dim(p.len(), q.len())?;
    check_dim(rp.num_classes(), p.len())?;
    let mut total = 0.0;
    for (part, w) in rp.iter() {
        let pm = part.block_masses(p.probs());
        let qm = part.block_masses(q.probs());
        for (a, b) in pm.into_iter().zip(qm) {
            if a > 0.0 && w > 0.0 {
                if b <= 0.0 {
                    return Ok(f64::INFINITY);
                }
                total -= w * a * base.log(b);
            }
        }
    }
    Ok(total)
}

fn check_model_rows(joint: &JointTable, model: &[ProbDist]) -> Result<(), EntropyError> {
    check_dim(joint.x_size(), model.len())?;
    for row in model {
        check_dim(joint.y_size(), row.len())?;
    }
    Ok(())
}

fn conditional_rows(joint: &JointTable) -> impl Iterator<Item = (f64, ProbDist)> + '_ {
    (0..joint.x_size()).filter_map(|x| {
        let row = joint.row(x);
        let mass: f64 = row.iter().sum();
        (mass > 0.0).then(|| (mass, ProbDist(row.iter().map(|v| v / mass).collect())))
    })
}

/// Structured relative entropy between a true conditional law `P(Y|X)` (taken
/// from `joint`) and a model `Q(Y|X)`, averaged over the marginal of `X`.
pub fn structured_conditional_relative_entropy(
    joint: &JointTable,
    model: &[ProbDist],
    rp: &RandomPartition,
    base: LogBase,
) -> Result<f64, EntropyError> {
    check_model_rows(joint, model)?;
    let mut total = 0.0;
    for (x, q) in model.iter().enumerate() {
        let row = joint.row(x);
        let mass: f64 = row.iter().sum();
        if mass <= 0.0 {
            continue;
        }
        let cond = ProbDist(row.iter().map(|v| v / mass).collect());
        total += mass * structured_relative_entropy(&cond, q, rp, base)?;
    }
    Ok(total)
}

/// Structured cross-entropy of a model `Q(Y|X)` against `P(Y|X)` from `joint`.
pub fn structured_conditional_cross_entropy(
    joint: &JointTable,
    model: &[ProbDist],
    rp: &RandomPartition,
    base: LogBase,
) -> Result<f64, EntropyError> {
    check_model_rows(joint, model)?;
    let mut total = 0.0;
    for (x, q) in model.iter().enumerate() {
        let row = joint.row(x);
        let mass: f64 = row.iter().sum();
        if mass <= 0.0 {
            continue;
        }
        let cond = ProbDist(row.iter().map(|v| v / mass).collect());
        total += mass * structured_cross_entropy(&cond, q, rp, base)?;
    }
    Ok(total)
}

/// `H(Y_Z | X)` with the trivial random partition on `X`: the expected
/// structured entropy of the conditional rows.
pub fn structured_entropy_given_x(
    joint: &JointTable,
    rp: &RandomPartition,
    base: LogBase,
) -> Result<f64, EntropyError> {
    check_dim(rp.num_classes(), joint.y_size())?;
    conditional_rows(joint)
        .map(|(mass, cond)| Ok(mass * structured_entropy(&cond, rp, base)?))
        .sum()
}

/// `I(Y_Z; X_W) = H(Y_Z) - H(Y_Z | X_W)`.
pub fn structured_mutual_information(
    joint: &JointTable,
    w_on_x: &RandomPartition,
    z_on_y: &RandomPartition,
    base: LogBase,
) -> Result<f64, EntropyError> {
    let h = structured_entropy(&joint.y_marginal(), z_on_y, base)?;
    Ok(h - conditional_structured_entropy(joint, w_on_x, z_on_y, base)?)
}

/// Random partition on `S_X x S_Y` built from one on each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct JointRandomPartition {
    pub x_size: usize,
    pub y_size: usize,
    pub structure: RandomPartition,
}

/// Product block `(A, B)` as flattened indices `a * y_size + b`.
fn product_block(a: &[usize], b: &[usize], y_size: usize) -> Vec<usize> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y_size + y))
        .collect()
}

/// Every pair `(R_i, S_j)` becomes the product partition with weight `r_i q_j`.
pub fn joint_structure(
    w_on_x: &RandomPartition,
    z_on_y: &RandomPartition,
) -> Result<JointRandomPartition, EntropyError> {
    let (nx, ny) = (w_on_x.num_classes(), z_on_y.num_classes());
    let mut partitions = Vec::with_capacity(w_on_x.len() * z_on_y.len());
    let mut weights = Vec::with_capacity(partitions.capacity());
    for (rx, r) in w_on_x.iter() {
        for (sy, q) in z_on_y.iter() {
            let blocks = rx
                .blocks()
                .iter()
                .flat_map(|a| sy.blocks().iter().map(move |b| product_block(a, b, ny)));
            partitions.push(Partition::new(blocks, nx * ny)?);
            weights.push(r * q);
        }
    }
    // products of weights summing to one can drift by a few ulps
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(JointRandomPartition {
        x_size: nx,
        y_size: ny,
        structure: RandomPartition::new(partitions, weights)?,
    })
}

/// `H(X_W, Y_Z)`: structured entropy of the pair under the joint structure.
pub fn joint_structured_entropy(
    joint: &JointTable,
    w_on_x: &RandomPartition,
    z_on_y: &RandomPartition,
    base: LogBase,
) -> Result<f64, EntropyError> {
    check_dim(joint.x_size(), w_on_x.num_classes())?;
    check_dim(joint.y_size(), z_on_y.num_classes())?;
    let js = joint_structure(w_on_x, z_on_y)?;
    structured_entropy(&joint.flatten(), &js.structure, base)
}

/// Maximiser of the structured entropy of a three-state variable under
/// `{singleton: q1, {{0,1},{2}}: 1 - q1}`: `p1 = p2 = 1 / (2 (1 + 2^-q1))`.
pub fn max_entropy_three_state(q1: f64) -> Result<ProbDist, EntropyError> {
    if !(0.0..=1.0).contains(&q1) {
        return Err(EntropyError::OutOfRange(q1));
    }
    let p = 1.0 / (2.0 * (1.0 + (-q1).exp2()));
    Ok(ProbDist(vec![p, p, 1.0 - 2.0 * p]))
}

/// The three-state structure `{singleton: q1, {{0,1},{2}}: 1 - q1}`.
pub fn three_state_structure(q1: f64) -> Result<RandomPartition, EntropyError> {
    if !(0.0..=1.0).contains(&q1) {
        return Err(EntropyError::OutOfRange(q1));
    }
    Ok(RandomPartition::new(
        vec![
            Partition::singleton(3)?,
            Partition::new(vec![vec![0, 1], vec![2]], 3)?,
        ],
        vec![q1, 1.0 - q1],
    )?)
}
