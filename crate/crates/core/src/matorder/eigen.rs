//! Cyclic Jacobi eigensolver for small dense symmetric matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ensure_symmetric, serde_rows, symmetrize, Matrix};

pub const MAX_ORDER: usize = 64;
pub const MAX_SWEEPS: usize = 100;
/// Convergence target for the off-diagonal Frobenius norm, relative to `‖M‖_F`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// `M = Q diag(eigenvalues) Qᵀ` with eigenvalues ascending and `Q` orthogonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns.
    #[serde(with = "serde_rows")]
    pub eigenvectors: Matrix,
}

impl SpectralDecomposition {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn spectral_radius(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    pub fn reconstruct(&self) -> Matrix {
        self.map_eigenvalues(|x| x)
    }

    /// `Q diag(g(λ_i)) Qᵀ`, symmetrized.
    pub fn map_eigenvalues(&self, g: impl Fn(f64) -> f64) -> Matrix {
        let values: Vec<f64> = self.eigenvalues.iter().map(|&l| g(l)).collect();
        self.with_eigenvalues(&values)
    }

    /// `Q diag(values) Qᵀ`, symmetrized.
    pub fn with_eigenvalues(&self, values: &[f64]) -> Matrix {
        let q = &self.eigenvectors;
        let mut scaled = q.clone();
        for (j, &v) in values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(v);
        }
        symmetrize(&(scaled * q.transpose()))
    }
}

fn off_norm(a: &Matrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Eigen-decomposition of a symmetric matrix of order at most 64.
pub fn sym_eigen(m: &Matrix) -> Result<SpectralDecomposition> {
    let n = ensure_symmetric(m)?;
    if n == 0 {
        return Err(Error::shape("empty matrix"));
    }
    if n > MAX_ORDER {
        return Err(Error::shape(format!("order {n} exceeds the Jacobi limit {MAX_ORDER}")));
    }
    let mut a = symmetrize(m);
    let mut v = Matrix::identity(n, n);
    let target = OFF_DIAGONAL_TOL * a.norm();

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::Convergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                let g = 100.0 * apq.abs();
                if sweeps > 4 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    let new_kp = c * akp - s * akq;
                    let new_kq = s * akp + c * akq;
                    a[(k, p)] = new_kp;
                    a[(p, k)] = new_kp;
                    a[(k, q)] = new_kq;
                    a[(q, k)] = new_kq;
                }
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let eigenvectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{all_ones, from_rows};

    #[test]
    fn small_examples() {
        let d = sym_eigen(&Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 2.0]))).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0, 2.0, 3.0]);

        let swap = from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let d = sym_eigen(&swap).unwrap();
        assert!((d.eigenvalues[0] + 1.0).abs() < 1e-15 && (d.eigenvalues[1] - 1.0).abs() < 1e-15);

        let d = sym_eigen(&all_ones(3)).unwrap();
        assert!(d.eigenvalues[0].abs() < 1e-15 && d.eigenvalues[1].abs() < 1e-15);
        assert!((d.eigenvalues[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn zero_matrix_and_errors() {
        let d = sym_eigen(&Matrix::zeros(3, 3)).unwrap();
        assert_eq!(d.eigenvalues, vec![0.0; 3]);
        assert!(sym_eigen(&Matrix::zeros(2, 3)).is_err());
        assert!(sym_eigen(&from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap()).is_err());
        assert!(sym_eigen(&Matrix::identity(65, 65)).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn symmetric(max_n: usize) -> impl Strategy<Value = Matrix> {
            (1..=max_n).prop_flat_map(|n| {
                proptest::collection::vec(-1e3f64..1e3, n * n).prop_map(move |v| {
                    let m = Matrix::from_vec(n, n, v);
                    (&m + m.transpose()) * 0.5
                })
            })
        }

        proptest! {
            #[test]
            fn reconstructs_and_is_orthogonal(m in symmetric(12)) {
                let d = sym_eigen(&m).unwrap();
                let n = m.nrows();
                let scale = m.norm().max(1.0);
                prop_assert!((d.reconstruct() - &m).norm() <= 1e-12 * scale);
                let qtq = d.eigenvectors.transpose() * &d.eigenvectors;
                prop_assert!((qtq - Matrix::identity(n, n)).norm() <= 1e-12);
                prop_assert!(d.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            }

            #[test]
            fn agrees_with_nalgebra(m in symmetric(8)) {
                // independent reference: nalgebra's implicit QR
                let mut reference: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
                reference.sort_by(f64::total_cmp);
                let ours = sym_eigen(&m).unwrap().eigenvalues;
                for (a, b) in ours.iter().zip(&reference) {
                    prop_assert!((a - b).abs() <= 1e-11 * m.norm().max(1.0));
                }
            }
        }
    }
}
