//! Random symmetric matrices with prescribed spectral windows.

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcs::Interval;
use crate::linalg::{symmetrize, Matrix};
use crate::rng::Rng;

/// How unbounded intervals are truncated and how close samples may get to finite ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    /// A half-line `(lo, ∞)` is sampled as `lo + 10^U(min_exp, max_exp)`.
    pub min_exp: f64,
    pub max_exp: f64,
    /// The whole line is sampled uniformly in `(-line_half_width, line_half_width)`.
    pub line_half_width: f64,
    /// Finite intervals lose this fraction of their width at each end.
    pub edge_fraction: f64,
    pub max_rejections: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            min_exp: -3.0,
            max_exp: 3.0,
            line_half_width: 1e3,
            edge_fraction: 1e-3,
            max_rejections: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum SamplingWindow {
    /// Uniform on `(lo, hi)`.
    Uniform { lo: f64, hi: f64 },
    /// `anchor + 10^U(min_exp, max_exp)`.
    AboveAnchor { anchor: f64, min_exp: f64, max_exp: f64 },
    /// `anchor - 10^U(min_exp, max_exp)`.
    BelowAnchor { anchor: f64, min_exp: f64, max_exp: f64 },
}

impl SamplingWindow {
    pub fn for_interval(j: &Interval, cfg: &SamplingConfig) -> Result<Self> {
        if cfg.min_exp.partial_cmp(&cfg.max_exp) != Some(std::cmp::Ordering::Less) || !(0.0..0.5).contains(&cfg.edge_fraction) {
            return Err(Error::config("invalid sampling configuration"));
        }
        Ok(match (j.lo.is_finite(), j.hi.is_finite()) {
            (true, true) => {
                let m = cfg.edge_fraction * j.width();
                SamplingWindow::Uniform {
                    lo: j.lo + m,
                    hi: j.hi - m,
                }
            }
            (true, false) => SamplingWindow::AboveAnchor {
                anchor: j.lo,
                min_exp: cfg.min_exp,
                max_exp: cfg.max_exp,
            },
            (false, true) => SamplingWindow::BelowAnchor {
                anchor: j.hi,
                min_exp: cfg.min_exp,
                max_exp: cfg.max_exp,
            },
            (false, false) => SamplingWindow::Uniform {
                lo: -cfg.line_half_width,
                hi: cfg.line_half_width,
            },
        })
    }

    /// Smallest and largest value the window can produce.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            SamplingWindow::Uniform { lo, hi } => (lo, hi),
            SamplingWindow::AboveAnchor {
                anchor,
                min_exp,
                max_exp,
            } => (anchor + 10f64.powf(min_exp), anchor + 10f64.powf(max_exp)),
            SamplingWindow::BelowAnchor {
                anchor,
                min_exp,
                max_exp,
            } => (anchor - 10f64.powf(max_exp), anchor - 10f64.powf(min_exp)),
        }
    }

    pub fn sample(&self, rng: &mut Rng) -> f64 {
        match *self {
            SamplingWindow::Uniform { lo, hi } => rng.random_range(lo..hi),
            SamplingWindow::AboveAnchor {
                anchor,
                min_exp,
                max_exp,
            } => anchor + 10f64.powf(rng.random_range(min_exp..max_exp)),
            SamplingWindow::BelowAnchor {
                anchor,
                min_exp,
                max_exp,
            } => anchor - 10f64.powf(rng.random_range(min_exp..max_exp)),
        }
    }

    pub fn sample_points(&self, n: usize, rng: &mut Rng) -> Vec<f64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `R`'s diagonal moved into `Q`.
pub fn random_orthogonal(n: usize, rng: &mut Rng) -> Matrix {
    let qr = gaussian_matrix(n, n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `Q diag(u) Qᵀ` with `u` drawn from `window` and `Q` random orthogonal.
pub fn sample_symmetric(window: &SamplingWindow, n: usize, rng: &mut Rng) -> (Matrix, Vec<f64>) {
    let q = random_orthogonal(n, rng);
    let u = window.sample_points(n, rng);
    let mut scaled = q.clone();
    for (j, &l) in u.iter().enumerate() {
        scaled.column_mut(j).scale_mut(l);
    }
    (symmetrize(&(scaled * q.transpose())), u)
}

/// A pair `A ≥ B` with both spectra inside the window of `j`.
///
/// `B = Q diag(u) Qᵀ` and `A = B + s W Wᵀ` with `W` Gaussian `n × k`, `k` uniform
/// in `1..=n`. The step `s` starts at `(max u - window lo) 10^U(-3,0) / ‖W‖²_F`
/// and is halved until the largest eigenvalue of `A` fits in the window.
pub fn sample_ordered_pair(j: &Interval, n: usize, rng: &mut Rng, cfg: &SamplingConfig) -> Result<(Matrix, Matrix)> {
    if n == 0 {
        return Err(Error::config("matrix order must be at least 1"));
    }
    let window = SamplingWindow::for_interval(j, cfg)?;
    let (wlo, whi) = window.bounds();
    let (b, u) = sample_symmetric(&window, n, rng);
    let k = rng.random_range(1..=n);
    let w = gaussian_matrix(n, k, rng);
    let wwt = &w * w.transpose();
    let u_max = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = (u_max - wlo) * 10f64.powf(rng.random_range(-3.0..0.0)) / w.norm_squared();
    for _ in 0..cfg.max_rejections {
        let a = symmetrize(&(&b + &wwt * s));
        let top = super::eigen::sym_eigen(&a)?.max();
        if top < whi {
            return Ok((a, b));
        }
        s *= 0.5;
    }
    Err(Error::Sampling {
        rejections: cfg.max_rejections,
        reason: format!("could not fit A = B + sWWᵀ inside ({wlo}, {whi})"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matorder::eigen::sym_eigen;
    use crate::rng;

    #[test]
    fn windows_follow_interval_shape() {
        let cfg = SamplingConfig::default();
        let w = SamplingWindow::for_interval(&Interval::positive(), &cfg).unwrap();
        let (lo, hi) = w.bounds();
        assert!((lo - 1e-3).abs() < 1e-18 && (hi - 1e3).abs() < 1e-9);
        let w = SamplingWindow::for_interval(&Interval::new(-1.0, 1.0).unwrap(), &cfg).unwrap();
        assert_eq!(w.bounds(), (-0.998, 0.998));
        let w = SamplingWindow::for_interval(&Interval::new(f64::NEG_INFINITY, 2.0).unwrap(), &cfg).unwrap();
        assert!(w.bounds().1 < 2.0);
    }

    #[test]
    fn positive_pair_seed_42() {
        let mut r = rng::stream(42, 0);
        let (a, b) = sample_ordered_pair(&Interval::positive(), 2, &mut r, &SamplingConfig::default()).unwrap();
        assert!(sym_eigen(&a).unwrap().min() > 0.0);
        assert!(sym_eigen(&b).unwrap().min() > 0.0);
    }

    #[test]
    fn orthogonal_is_orthogonal() {
        let mut r = rng::stream(1, 0);
        for n in 1..8 {
            let q = random_orthogonal(n, &mut r);
            assert!((q.transpose() * &q - Matrix::identity(n, n)).norm() < 1e-13);
        }
    }

    #[test]
    fn tight_window_gives_up() {
        let cfg = SamplingConfig {
            max_rejections: 0,
            ..SamplingConfig::default()
        };
        let mut r = rng::stream(3, 0);
        assert!(matches!(
            sample_ordered_pair(&Interval::positive(), 3, &mut r, &cfg),
            Err(Error::Sampling { .. })
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn pairs_are_ordered_and_inside(seed in any::<u64>(), n in 1usize..6, finite in any::<bool>()) {
                let j = if finite { Interval::new(-1.0, 1.0).unwrap() } else { Interval::positive() };
                let mut r = rng::stream(seed, 0);
                let (a, b) = sample_ordered_pair(&j, n, &mut r, &SamplingConfig::default()).unwrap();
                let gap = sym_eigen(&(&a - &b)).unwrap();
                prop_assert!(gap.min() >= -1e-12 * a.norm().max(1.0));
                for m in [&a, &b] {
                    let d = sym_eigen(m).unwrap();
                    prop_assert!(j.contains(d.min()) && j.contains(d.max()));
                }
            }
        }
    }
}
