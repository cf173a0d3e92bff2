//! Synthetic benchmarks whose classes have a known geometric arrangement.

use std::f64::consts::TAU;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::gbm::{BoostError, Dataset};

/// Noise levels for [`circular_benchmark`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircularNoise {
    /// Standard deviation of the angular jitter, in radians.
    pub angle: f64,
    /// Standard deviation of the radial jitter around the unit circle.
    pub radius: f64,
}

impl Default for CircularNoise {
    fn default() -> Self {
        CircularNoise {
            angle: 0.35,
            radius: 0.15,
        }
    }
}

/// `n` points with uniformly drawn labels. Class `c` sits at angle
/// `2 pi c / k` on the unit circle and each point is the class direction
/// rotated by wrapped Gaussian jitter and scaled by a jittered radius.
/// Features are the two Cartesian coordinates.
pub fn circular_benchmark<R: Rng + ?Sized>(
    n: usize,
    num_classes: usize,
    noise: CircularNoise,
    rng: &mut R,
) -> Result<Dataset, BoostError> {
    let angle = normal(noise.angle)?;
    let radius = normal(noise.radius)?;
    let mut features = Array2::zeros((n, 2));
    let mut labels = Vec::with_capacity(n);
    for mut row in features.outer_iter_mut() {
        let c = rng.random_range(0..num_classes);
        let theta = TAU * c as f64 / num_classes as f64 + angle.sample(rng);
        let r = 1.0 + radius.sample(rng);
        row[0] = r * theta.cos();
        row[1] = r * theta.sin();
        labels.push(c);
    }
    Dataset::new(features, labels, num_classes)?.with_feature_names(vec!["x".into(), "y".into()])
}

/// `n` points on a `rows x cols` lattice of classes. Class `r * cols + c`
/// is centred at `(r, c)`; features are that centre plus isotropic Gaussian
/// noise of standard deviation `noise`.
pub fn grid_benchmark<R: Rng + ?Sized>(
    n: usize,
    rows: usize,
    cols: usize,
    noise: f64,
    rng: &mut R,
) -> Result<Dataset, BoostError> {
    let jitter = normal(noise)?;
    let k = rows * cols;
    let mut features = Array2::zeros((n, 2));
    let mut labels = Vec::with_capacity(n);
    for mut row in features.outer_iter_mut() {
        let y = rng.random_range(0..k);
        row[0] = (y / cols) as f64 + jitter.sample(rng);
        row[1] = (y % cols) as f64 + jitter.sample(rng);
        labels.push(y);
    }
    Dataset::new(features, labels, k)?.with_feature_names(vec!["row".into(), "col".into()])
}

/// A uniformly random permutation of `0..k`.
pub fn random_permutation<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..k).collect();
    perm.shuffle(rng);
    perm
}

fn normal(sd: f64) -> Result<Normal<f64>, BoostError> {
    if !(sd.is_finite() && sd >= 0.0) {
        return Err(BoostError::InvalidConfig(format!("noise level {sd} must be non-negative")));
    }
    Normal::new(0.0, sd).map_err(|e| BoostError::InvalidConfig(format!("noise level {sd}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::RngState;

    #[test]
    fn circular_points_cluster_by_angle() {
        let mut rng = RngState::from_seed(3);
        let d = circular_benchmark(
            2000,
            12,
            CircularNoise {
                angle: 0.05,
                radius: 0.01,
            },
            &mut rng,
        )
        .unwrap();
        assert_eq!(d.num_classes(), 12);
        for (x, &y) in d.features().outer_iter().zip(d.labels()) {
            let theta = x[1].atan2(x[0]).rem_euclid(TAU);
            let centre = TAU * y as f64 / 12.0;
            let diff = (theta - centre + TAU / 2.0).rem_euclid(TAU) - TAU / 2.0;
            assert!(diff.abs() < 0.3);
        }
    }

    #[test]
    fn grid_labels_cover_lattice() {
        let mut rng = RngState::from_seed(5);
        let d = grid_benchmark(5000, 6, 8, 0.1, &mut rng).unwrap();
        assert_eq!(d.num_classes(), 48);
        assert_eq!(d.distinct_labels(), 48);
        let x = d.features();
        for (i, &y) in d.labels().iter().enumerate() {
            assert!((x[[i, 0]] - (y / 8) as f64).abs() < 1.0);
            assert!((x[[i, 1]] - (y % 8) as f64).abs() < 1.0);
        }
    }

    #[test]
    fn permutation_is_bijective_and_seeded() {
        let p = random_permutation(20, &mut RngState::from_seed(1));
        let mut s = p.clone();
        s.sort_unstable();
        assert_eq!(s, (0..20).collect::<Vec<_>>());
        assert_eq!(p, random_permutation(20, &mut RngState::from_seed(1)));
    }

    #[test]
    fn rejects_invalid_noise() {
        assert!(grid_benchmark(10, 2, 2, -1.0, &mut RngState::from_seed(0)).is_err());
    }
}
