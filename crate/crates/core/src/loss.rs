//! Empirical cross-entropy losses over softmax predictions.
//!
//! The structured log loss averages the ordinary log loss over the coarsenings
//! of a [`RandomPartition`]: for an observation with label `y` and partition
//! `S_t` of weight `w_t`, the loss is `-sum_t w_t log Q(B_t(y))`, where
//! `Q(B)` is the predicted mass of the block of `S_t` containing `y`.
//!
//! Gradients and diagonal Hessians are taken with respect to the logits and
//! are summed per observation, never averaged.

use ndarray::{Array2, ArrayView1, ArrayView2};
use thiserror::Error;

use crate::partition::{Partition, RandomPartition};

/// Floor applied to every probability before taking a logarithm.
pub const PROB_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LossError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteInput { row: usize, col: usize },
    #[error("label {label} out of range for {num_classes} classes")]
    LabelOutOfRange { label: usize, num_classes: usize },
    #[error("empty batch")]
    EmptyBatch,
}

fn check_dim(expected: usize, actual: usize) -> Result<(), LossError> {
    if expected != actual {
        return Err(LossError::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// Class labels for a batch of observations.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelBatch {
    labels: Vec<usize>,
    num_classes: usize,
}

impl LabelBatch {
    pub fn new(labels: Vec<usize>, num_classes: usize) -> Result<Self, LossError> {
        if let Some(&label) = labels.iter().find(|&&y| y >= num_classes) {
            return Err(LossError::LabelOutOfRange { label, num_classes });
        }
        Ok(LabelBatch {
            labels,
            num_classes,
        })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Per-observation gradient and diagonal Hessian with respect to the logits.
#[derive(Debug, Clone, PartialEq)]
pub struct GradHess {
    pub grad: Array2<f64>,
    pub hess_diag: Array2<f64>,
}

fn check_finite(m: &ArrayView2<f64>) -> Result<(), LossError> {
    for ((row, col), v) in m.indexed_iter() {
        if !v.is_finite() {
            return Err(LossError::NonFiniteInput { row, col });
        }
    }
    Ok(())
}

fn check_batch(
    probs: &ArrayView2<f64>,
    labels: &LabelBatch,
) -> Result<(), LossError> {
    check_dim(labels.num_classes(), probs.ncols())?;
    check_dim(probs.nrows(), labels.len())?;
    if labels.is_empty() {
        return Err(LossError::EmptyBatch);
    }
    Ok(())
}

/// Writes the softmax of `logits` into `out`, subtracting the row maximum.
pub(crate) fn softmax_row(logits: ArrayView1<f64>, out: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (o, z) in out.iter_mut().zip(logits.iter()) {
        *o = (z - max).exp();
        total += *o;
    }
    for o in out.iter_mut() {
        *o /= total;
    }
}

/// Row-wise softmax.
pub fn softmax(logits: ArrayView2<f64>) -> Result<Array2<f64>, LossError> {
    check_finite(&logits)?;
    let mut out = Array2::zeros(logits.raw_dim());
    for (row, mut dst) in logits.outer_iter().zip(out.outer_iter_mut()) {
        softmax_row(row, dst.as_slice_mut().expect("standard layout"));
    }
    Ok(out)
}

#[inline]
fn neg_log(p: f64) -> f64 {
    -p.max(PROB_FLOOR).ln()
}

/// Structured loss of a single observation. With a single singleton
/// partition of weight one this reduces bit-for-bit to `-ln(max(q_y, floor))`.
fn row_structured_loss(probs: ArrayView1<f64>, label: usize, rp: &RandomPartition) -> f64 {
    let mut loss = 0.0;
    for (p, w) in rp.iter() {
        let block = p.block(p.block_assignment()[label]);
        let mass: f64 = block.iter().map(|&j| probs[j]).sum();
        loss += w * neg_log(mass);
    }
    loss
}

/// Mean negative log probability assigned to the true labels.
pub fn log_loss(probs: ArrayView2<f64>, labels: &LabelBatch) -> Result<f64, LossError> {
    check_batch(&probs, labels)?;
    let total: f64 = probs
        .outer_iter()
        .zip(labels.labels())
        .map(|(row, &y)| neg_log(row[y]))
        .sum();
    Ok(total / labels.len() as f64)
}

/// Structured empirical cross-entropy.
pub fn structured_log_loss(
    probs: ArrayView2<f64>,
    labels: &LabelBatch,
    rp: &RandomPartition,
) -> Result<f64, LossError> {
    check_batch(&probs, labels)?;
    check_dim(labels.num_classes(), rp.num_classes())?;
    let total: f64 = probs
        .outer_iter()
        .zip(labels.labels())
        .map(|(row, &y)| row_structured_loss(row, y, rp))
        .sum();
    Ok(total / labels.len() as f64)
}

/// Accumulates the gradient and diagonal Hessian of one observation's
/// structured loss into `grad` / `hess`. `probs` must be the softmax of
/// `logits`.
///
/// For a partition of weight `w` whose block `B` holds the label, with
/// `r_k = exp(z_k) / sum_{j in B} exp(z_j)`:
///
/// ```text
/// d/dz_k   = w (q_k - [k in B] r_k)
/// d2/dz_k2 = w (q_k (1 - q_k) - [k in B] r_k (1 - r_k))
/// ```
///
/// The diagonal Hessian is exact and can be negative for coarse blocks.
pub(crate) fn accumulate_grad_hess(
    logits: ArrayView1<f64>,
    probs: &[f64],
    label: usize,
    rp: &RandomPartition,
    grad: &mut [f64],
    hess: &mut [f64],
) {
    for (p, w) in rp.iter() {
        if w == 0.0 {
            continue;
        }
        for (k, &q) in probs.iter().enumerate() {
            grad[k] += w * q;
            hess[k] += w * q * (1.0 - q);
        }
        let block = p.block(p.block_assignment()[label]);
        let max = block
            .iter()
            .map(|&j| logits[j])
            .fold(f64::NEG_INFINITY, f64::max);
        let total: f64 = block.iter().map(|&j| (logits[j] - max).exp()).sum();
        for &j in block {
            let r = (logits[j] - max).exp() / total;
            grad[j] -= w * r;
            hess[j] -= w * r * (1.0 - r);
        }
    }
}

/// Gradient and diagonal Hessian of the summed structured loss
/// `n * structured_log_loss(softmax(logits))` with respect to the logits.
pub fn structured_grad_hess(
    logits: ArrayView2<f64>,
    labels: &LabelBatch,
    rp: &RandomPartition,
) -> Result<GradHess, LossError> {
    check_finite(&logits)?;
    check_batch(&logits, labels)?;
    check_dim(labels.num_classes(), rp.num_classes())?;
    let k = logits.ncols();
    let mut grad = Array2::zeros(logits.raw_dim());
    let mut hess = Array2::zeros(logits.raw_dim());
    let mut probs = vec![0.0; k];
    for (i, row) in logits.outer_iter().enumerate() {
        softmax_row(row, &mut probs);
        let mut g = grad.row_mut(i);
        let mut h = hess.row_mut(i);
        accumulate_grad_hess(
            row,
            &probs,
            labels.labels()[i],
            rp,
            g.as_slice_mut().expect("standard layout"),
            h.as_slice_mut().expect("standard layout"),
        );
    }
    Ok(GradHess {
        grad,
        hess_diag: hess,
    })
}

/// Index of the largest entry; ties go to the lowest index.
/// Adds the weight-averaged diagonal of each partition's expected (Fisher)
/// Hessian, `sum_t w_t q_k^2 (1 - Q_t(k)) / Q_t(k)` where `Q_t(k)` is
/// the predicted mass of the block of `S_t` holding `k`. It does not depend
/// on the label, is never negative, and equals `q_k (1 - q_k)` under the
/// trivial structure.
pub(crate) fn accumulate_fisher_diag(probs: &[f64], rp: &RandomPartition, hess: &mut [f64]) {
    for (p, w) in rp.iter() {
        if w == 0.0 {
            continue;
        }
        let masses = p.block_masses(probs);
        for (k, &b) in p.block_assignment().iter().enumerate() {
            let q = probs[k];
            let mass = masses[b];
            if mass > 0.0 {
                hess[k] += w * q * (q / mass) * (1.0 - mass).max(0.0);
            }
        }
    }
}

/// Per-row weight-averaged Fisher diagonal of the coarse log losses at the
/// given logits.
pub fn structured_fisher_diag(
    logits: ArrayView2<f64>,
    rp: &RandomPartition,
) -> Result<Array2<f64>, LossError> {
    check_finite(&logits)?;
    check_dim(logits.ncols(), rp.num_classes())?;
    let mut hess = Array2::zeros(logits.raw_dim());
    let mut probs = vec![0.0; logits.ncols()];
    for (row, mut h) in logits.outer_iter().zip(hess.outer_iter_mut()) {
        softmax_row(row, &mut probs);
        accumulate_fisher_diag(&probs, rp, h.as_slice_mut().expect("standard layout"));
    }
    Ok(hess)
}

pub fn argmax(row: ArrayView1<f64>) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = j;
        }
    }
    best
}

/// Top-1 accuracy.
pub fn accuracy(probs: ArrayView2<f64>, labels: &LabelBatch) -> Result<f64, LossError> {
    check_batch(&probs, labels)?;
    let hits = probs
        .outer_iter()
        .zip(labels.labels())
        .filter(|(row, &y)| argmax(row.view()) == y)
        .count();
    Ok(hits as f64 / labels.len() as f64)
}

/// Fraction of rows whose fine argmax falls in the same block as the label.
pub fn coarsened_accuracy(
    probs: ArrayView2<f64>,
    labels: &LabelBatch,
    partition: &Partition,
) -> Result<f64, LossError> {
    check_batch(&probs, labels)?;
    check_dim(labels.num_classes(), partition.num_classes())?;
    let block_of = partition.block_assignment();
    let hits = probs
        .outer_iter()
        .zip(labels.labels())
        .filter(|(row, &y)| block_of[argmax(row.view())] == block_of[y])
        .count();
    Ok(hits as f64 / labels.len() as f64)
}

/// Sums columns of `probs` within the blocks of `partition`.
pub fn block_probs(probs: ArrayView2<f64>, partition: &Partition) -> Array2<f64> {
    let mut out = Array2::zeros((probs.nrows(), partition.num_blocks()));
    let block_of = partition.block_assignment();
    for (src, mut dst) in probs.outer_iter().zip(out.outer_iter_mut()) {
        for (j, v) in src.iter().enumerate() {
            dst[block_of[j]] += v;
        }
    }
    out
}

impl GradHess {
    pub fn nrows(&self) -> usize {
        self.grad.nrows()
    }

    /// Column sums of the gradient and Hessian over the given rows.
    pub fn sums(&self, rows: &[usize]) -> (Vec<f64>, Vec<f64>) {
        let k = self.grad.ncols();
        let mut g = vec![0.0; k];
        let mut h = vec![0.0; k];
        for &i in rows {
            for c in 0..k {
                g[c] += self.grad[[i, c]];
                h[c] += self.hess_diag[[i, c]];
            }
        }
        (g, h)
    }
}

#[cfg(test)]
pub(crate) fn rows_sum_to_one(m: &Array2<f64>, tol: f64) -> bool {
    m.sum_axis(ndarray::Axis(1)).iter().all(|s| (s - 1.0).abs() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Partition;
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array2};
    use proptest::prelude::*;

    fn labels(y: &[usize], k: usize) -> LabelBatch {
        LabelBatch::new(y.to_vec(), k).unwrap()
    }

    fn pair_structure(q1: f64) -> RandomPartition {
        RandomPartition::new(
            vec![
                Partition::singleton(3).unwrap(),
                Partition::new(vec![vec![0, 1], vec![2]], 3).unwrap(),
            ],
            vec![q1, 1.0 - q1],
        )
        .unwrap()
    }

    #[test]
    fn softmax_cases() {
        let s = softmax(array![[0.0, 0.0, 0.0]].view()).unwrap();
        for v in s.iter() {
            assert_abs_diff_eq!(*v, 1.0 / 3.0, epsilon = 1e-16);
        }
        let s = softmax(array![[1000.0, 0.0, 0.0]].view()).unwrap();
        assert!(s.iter().all(|v| v.is_finite()));
        assert_abs_diff_eq!(s[[0, 0]], 1.0, epsilon = 1e-300);
        let s = softmax(array![[1f64.ln(), 2f64.ln(), 3f64.ln()]].view()).unwrap();
        for (j, e) in [1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0].iter().enumerate() {
            assert_abs_diff_eq!(s[[0, j]], *e, epsilon = 1e-15);
        }
        assert!(matches!(
            softmax(array![[0.0, f64::NAN]].view()),
            Err(LossError::NonFiniteInput { row: 0, col: 1 })
        ));
        assert!(rows_sum_to_one(&s, 1e-12));
    }

    #[test]
    fn log_loss_cases() {
        let near_perfect = array![[1.0 - 1e-12, 1e-12], [1e-12, 1.0 - 1e-12]];
        assert!(log_loss(near_perfect.view(), &labels(&[0, 1], 2)).unwrap() < 1e-11);

        let uniform = Array2::from_elem((5, 4), 0.25);
        assert_abs_diff_eq!(
            log_loss(uniform.view(), &labels(&[0, 1, 2, 3, 1], 4)).unwrap(),
            4f64.ln(),
            epsilon = 1e-15
        );

        let p = array![[0.7, 0.2, 0.1], [0.1, 0.1, 0.8]];
        assert_abs_diff_eq!(
            log_loss(p.view(), &labels(&[0, 2], 3)).unwrap(),
            -(0.7f64.ln() + 0.8f64.ln()) / 2.0,
            epsilon = 1e-15
        );
        assert!(matches!(
            log_loss(p.view(), &labels(&[0], 3)),
            Err(LossError::DimensionMismatch { .. })
        ));
        assert!(LabelBatch::new(vec![3], 3).is_err());
    }

    #[test]
    fn structured_log_loss_cases() {
        let p = array![[0.7, 0.2, 0.1], [0.1, 0.1, 0.8], [0.0, 0.5, 0.5]];
        let y = labels(&[0, 2, 0], 3);
        let t = RandomPartition::trivial(3).unwrap();
        assert_eq!(
            structured_log_loss(p.view(), &y, &t).unwrap().to_bits(),
            log_loss(p.view(), &y).unwrap().to_bits()
        );

        let one = RandomPartition::new(vec![Partition::one_block(3).unwrap()], vec![1.0]).unwrap();
        assert_abs_diff_eq!(structured_log_loss(p.view(), &y, &one).unwrap(), 0.0, epsilon = 1e-15);

        let single = array![[0.2, 0.3, 0.5]];
        assert_abs_diff_eq!(
            structured_log_loss(single.view(), &labels(&[0], 3), &pair_structure(0.5)).unwrap(),
            -(0.5 * 0.2f64.ln() + 0.5 * 0.5f64.ln()),
            epsilon = 1e-15
        );
    }

    #[test]
    fn trivial_gradient_is_softmax_minus_onehot() {
        let z = array![[0.3, -1.2, 2.0], [0.0, 0.5, -0.5]];
        let y = labels(&[2, 0], 3);
        let gh = structured_grad_hess(z.view(), &y, &RandomPartition::trivial(3).unwrap()).unwrap();
        let q = softmax(z.view()).unwrap();
        for i in 0..2 {
            for k in 0..3 {
                let onehot = if y.labels()[i] == k { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(gh.grad[[i, k]], q[[i, k]] - onehot, epsilon = 1e-15);
                assert_abs_diff_eq!(
                    gh.hess_diag[[i, k]],
                    q[[i, k]] * (1.0 - q[[i, k]]),
                    epsilon = 1e-15
                );
            }
        }
    }

    #[test]
    fn coarse_hessian_can_be_negative() {
        // label block {0,1} with almost no mass on the block members
        let z = array![[-3.0, -3.0, 3.0]];
        let rp = RandomPartition::new(
            vec![Partition::new(vec![vec![0, 1], vec![2]], 3).unwrap()],
            vec![1.0],
        )
        .unwrap();
        let gh = structured_grad_hess(z.view(), &labels(&[0], 3), &rp).unwrap();
        assert!(gh.hess_diag[[0, 0]] < 0.0);
        assert_abs_diff_eq!(gh.grad.row(0).sum(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn accuracy_cases() {
        let p = array![[0.4, 0.35, 0.25], [0.1, 0.2, 0.7], [0.5, 0.3, 0.2]];
        let y = labels(&[1, 2, 2], 3);
        let pair = Partition::new(vec![vec![0, 1], vec![2]], 3).unwrap();
        assert_abs_diff_eq!(accuracy(p.view(), &y).unwrap(), 1.0 / 3.0);
        assert_abs_diff_eq!(
            coarsened_accuracy(p.view(), &y, &Partition::singleton(3).unwrap()).unwrap(),
            1.0 / 3.0
        );
        assert_abs_diff_eq!(coarsened_accuracy(p.view(), &y, &pair).unwrap(), 2.0 / 3.0);
        assert_eq!(
            coarsened_accuracy(p.view(), &y, &Partition::one_block(3).unwrap()).unwrap(),
            1.0
        );
        let single = array![[0.4, 0.35, 0.25]];
        assert_eq!(coarsened_accuracy(single.view(), &labels(&[1], 3), &pair).unwrap(), 1.0);
    }

    fn arb_instance() -> impl Strategy<Value = (Array2<f64>, Vec<usize>, Vec<usize>, f64)> {
        (1usize..=6, 2usize..=6).prop_flat_map(|(n, k)| {
            (
                proptest::collection::vec(-4.0f64..4.0, n * k)
                    .prop_map(move |v| Array2::from_shape_vec((n, k), v).unwrap()),
                proptest::collection::vec(0..k, n),
                proptest::collection::vec(0..k, k),
                0.0f64..=1.0,
            )
        })
    }

    proptest! {
        #[test]
        fn loss_is_weighted_average_of_coarse_log_losses((z, y, groups, w) in arb_instance()) {
            let k = z.ncols();
            let rp = RandomPartition::new(
                vec![Partition::singleton(k).unwrap(), Partition::from_assignment(&groups).unwrap()],
                vec![w, 1.0 - w],
            ).unwrap();
            let q = softmax(z.view()).unwrap();
            let y = LabelBatch::new(y, k).unwrap();
            let mut expect = 0.0;
            for (p, wt) in rp.iter() {
                let bp = block_probs(q.view(), p);
                let by: Vec<usize> = y.labels().iter().map(|&l| p.coarsen_label(l).unwrap()).collect();
                expect += wt * log_loss(bp.view(), &LabelBatch::new(by, p.num_blocks()).unwrap()).unwrap();
            }
            let got = structured_log_loss(q.view(), &y, &rp).unwrap();
            prop_assert!((got - expect).abs() < 1e-12, "{} vs {}", got, expect);
        }

        #[test]
        fn permutation_equivariance((z, y, groups, w) in arb_instance(), seed in any::<u64>()) {
            let (n, k) = z.dim();
            // perm[old] = new
            let mut perm: Vec<usize> = (0..k).collect();
            let mut s = seed;
            for i in (1..k).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let rp = RandomPartition::new(
                vec![Partition::singleton(k).unwrap(), Partition::from_assignment(&groups).unwrap()],
                vec![w, 1.0 - w],
            ).unwrap();
            let q = softmax(z.view()).unwrap();
            let mut qp = Array2::zeros((n, k));
            for i in 0..n {
                for j in 0..k {
                    qp[[i, perm[j]]] = q[[i, j]];
                }
            }
            let yb = LabelBatch::new(y.clone(), k).unwrap();
            let yp = LabelBatch::new(y.iter().map(|&l| perm[l]).collect(), k).unwrap();
            let a = structured_log_loss(q.view(), &yb, &rp).unwrap();
            let b = structured_log_loss(qp.view(), &yp, &rp.relabel(&perm).unwrap()).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn gradient_rows_sum_to_zero((z, y, groups, w) in arb_instance()) {
            let k = z.ncols();
            let rp = RandomPartition::new(
                vec![Partition::singleton(k).unwrap(), Partition::from_assignment(&groups).unwrap()],
                vec![w, 1.0 - w],
            ).unwrap();
            let gh = structured_grad_hess(z.view(), &LabelBatch::new(y, k).unwrap(), &rp).unwrap();
            for row in gh.grad.outer_iter() {
                prop_assert!(row.sum().abs() < 1e-8);
            }
        }

        #[test]
        fn fisher_diag_is_expected_squared_coarse_gradient((z, _y, groups, w) in arb_instance()) {
            let k = z.ncols();
            let rp = RandomPartition::new(
                vec![Partition::singleton(k).unwrap(), Partition::from_assignment(&groups).unwrap()],
                vec![w, 1.0 - w],
            ).unwrap();
            let got = structured_fisher_diag(z.view(), &rp).unwrap();
            let q = softmax(z.view()).unwrap();
            for (i, qi) in q.outer_iter().enumerate() {
                for c in 0..k {
                    // sum over partitions and outcomes of w P(y) (d/dz_c -log Q_B(y))^2
                    let mut expect = 0.0;
                    for (p, wt) in rp.iter() {
                        for y in 0..k {
                            let block = p.block(p.coarsen_label(y).unwrap());
                            let mass: f64 = block.iter().map(|&j| qi[j]).sum();
                            let inside = if block.contains(&c) { qi[c] / mass } else { 0.0 };
                            let g = qi[c] - inside;
                            expect += wt * qi[y] * g * g;
                        }
                    }
                    prop_assert!(got[[i, c]] >= 0.0);
                    prop_assert!((got[[i, c]] - expect).abs() < 1e-12, "{} vs {}", got[[i, c]], expect);
                }
            }
        }
    }

    #[test]
    fn fisher_diag_matches_exact_hessian_for_singletons() {
        let z = array![[0.3, -1.2, 2.0, 0.0], [5.0, -5.0, 0.1, 0.2]];
        let t = RandomPartition::trivial(4).unwrap();
        let exact = structured_grad_hess(z.view(), &labels(&[2, 1], 4), &t).unwrap();
        let fisher = structured_fisher_diag(z.view(), &t).unwrap();
        assert_eq!(exact.hess_diag, fisher);
        let z = array![[-3.0, -3.0, 3.0]];
        let coarse = RandomPartition::new(
            vec![Partition::new(vec![vec![0, 1], vec![2]], 3).unwrap()],
            vec![1.0],
        )
        .unwrap();
        assert!(structured_fisher_diag(z.view(), &coarse).unwrap().iter().all(|&h| h >= 0.0));
    }
}
