//! Positive semidefiniteness and conditional (sum-zero) definiteness.
//!
//! A symmetric `M` is conditionally positive definite (c.p.d.) when
//! `⟨x, Mx⟩ ≥ 0` for every `x` with `Σ x_i = 0`, and conditionally negative
//! definite (c.n.d.) when `-M` is c.p.d. The sum-zero restriction is realised
//! by compressing with the difference basis `(e_k - e_{k+1})/√2`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ensure_symmetric, Matrix};
use crate::matorder::eigen::sym_eigen;

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Definiteness {
    Psd,
    Cpd,
    Cnd,
}

impl fmt::Display for Definiteness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Definiteness::Psd => "psd",
            Definiteness::Cpd => "cpd",
            Definiteness::Cnd => "cnd",
        })
    }
}

impl FromStr for Definiteness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psd" => Ok(Definiteness::Psd),
            "cpd" => Ok(Definiteness::Cpd),
            "cnd" => Ok(Definiteness::Cnd),
            other => Err(Error::UnknownProperty(other.to_string())),
        }
    }
}

/// Outcome of a definiteness test.
///
/// `extremal_eigenvalue` is the smallest eigenvalue of the tested form: of `M`
/// for PSD, of the sum-zero compression of `M` for CPD, and of the compression
/// of `-M` for CND. So in every mode the property fails exactly when it is
/// below `-tolerance_used * scale`, and `⟨w, M w⟩` (or `-⟨w, M w⟩` for CND)
/// equals it for the reported witness `w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefinitenessVerdict {
    pub property: Definiteness,
    pub holds: bool,
    /// Holds only within tolerance: `|extremal_eigenvalue| ≤ tolerance_used * scale`.
    pub marginal: bool,
    pub extremal_eigenvalue: f64,
    pub witness: Vec<f64>,
    /// Relative tolerance.
    pub tolerance_used: f64,
    /// `max(1, spectral radius of M)`.
    pub scale: f64,
}

impl DefinitenessVerdict {
    pub fn threshold(&self) -> f64 {
        self.tolerance_used * self.scale
    }

    fn from_eigenvalue(property: Definiteness, value: f64, witness: Vec<f64>, tol: f64, scale: f64) -> Self {
        let threshold = tol * scale;
        let holds = value >= -threshold;
        Self {
            property,
            holds,
            marginal: holds && value.abs() <= threshold,
            extremal_eigenvalue: value,
            witness,
            tolerance_used: tol,
            scale,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(Error::config(format!("tolerance {tol} must be non-negative")))
    }
}

/// PSD test via the smallest Jacobi eigenvalue.
pub fn is_psd(m: &Matrix, tol: f64) -> Result<DefinitenessVerdict> {
    check_tol(tol)?;
    let d = sym_eigen(m)?;
    let witness = d.eigenvectors.column(0).iter().copied().collect();
    Ok(DefinitenessVerdict::from_eigenvalue(
        Definiteness::Psd,
        d.min(),
        witness,
        tol,
        d.spectral_radius().max(1.0),
    ))
}

/// `Vᵀ M V` with `V[:, k] = (e_k - e_{k+1})/√2`.
pub fn compress_sumzero(m: &Matrix) -> Result<Matrix> {
    let n = ensure_symmetric(m)?;
    if n < 2 {
        return Err(Error::shape("sum-zero compression needs order at least 2"));
    }
    Ok(Matrix::from_fn(n - 1, n - 1, |k, l| {
        0.5 * (m[(k, l)] - m[(k, l + 1)] - m[(k + 1, l)] + m[(k + 1, l + 1)])
    }))
}

/// Maps a coordinate vector `y` of the difference basis to `V y` in `ℝⁿ`.
pub fn lift_sumzero(y: &[f64]) -> Vec<f64> {
    let n = y.len() + 1;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    (0..n)
        .map(|i| {
            let up = if i < n - 1 { y[i] } else { 0.0 };
            let down = if i > 0 { y[i - 1] } else { 0.0 };
            h * (up - down)
        })
        .collect()
}

fn conditional(m: &Matrix, property: Definiteness, tol: f64) -> Result<DefinitenessVerdict> {
    check_tol(tol)?;
    let n = ensure_symmetric(m)?;
    let sign = if property == Definiteness::Cnd { -1.0 } else { 1.0 };
    if n == 1 {
        // the sum-zero subspace of ℝ¹ is trivial
        return Ok(DefinitenessVerdict::from_eigenvalue(property, 0.0, vec![0.0], tol, m[(0, 0)].abs().max(1.0)));
    }
    let scale = sym_eigen(m)?.spectral_radius().max(1.0);
    let c = compress_sumzero(&(m * sign))?;
    let d = sym_eigen(&c)?;
    let y: Vec<f64> = d.eigenvectors.column(0).iter().copied().collect();
    Ok(DefinitenessVerdict::from_eigenvalue(property, d.min(), lift_sumzero(&y), tol, scale))
}

pub fn is_cpd(m: &Matrix, tol: f64) -> Result<DefinitenessVerdict> {
    conditional(m, Definiteness::Cpd, tol)
}

/// Same as `is_cpd(-M)`, reported as CND.
pub fn is_cnd(m: &Matrix, tol: f64) -> Result<DefinitenessVerdict> {
    conditional(m, Definiteness::Cnd, tol)
}

pub fn check(m: &Matrix, property: Definiteness, tol: f64) -> Result<DefinitenessVerdict> {
    match property {
        Definiteness::Psd => is_psd(m, tol),
        Definiteness::Cpd => is_cpd(m, tol),
        Definiteness::Cnd => is_cnd(m, tol),
    }
}

/// `[a_ij - a_{i,n+1} - a_{n+1,j} + a_{n+1,n+1}]`: the form `⟨x, M x⟩` on vectors
/// `(x, -Σx)`, written in the first `n` coordinates. PSD whenever `M` is c.p.d.
pub fn border_compress(m: &Matrix) -> Result<Matrix> {
    let np1 = ensure_symmetric(m)?;
    if np1 < 2 {
        return Err(Error::shape("border compression needs order at least 2"));
    }
    let n = np1 - 1;
    Ok(Matrix::from_fn(n, n, |i, j| m[(i, j)] - m[(i, n)] - m[(n, j)] + m[(n, n)]))
}

/// Closed-form c.p.d./c.n.d. test for orders 2 and 3, with the default tolerance.
pub fn cpd_closed_form_small(m: &Matrix, mode: Definiteness) -> Result<DefinitenessVerdict> {
    cpd_closed_form_small_with_tol(m, mode, DEFAULT_TOL)
}

/// For `[a d; d b]` the test is `a + b - 2d ≥ 0`. For
/// `[[a,d,e],[d,b,f],[e,f,c]]` it is `p ≥ 0, q ≥ 0, r² ≤ pq` with
/// `p = a+c-2e`, `q = b+c-2f`, `r = c+d-e-f`, i.e. PSD of the border
/// compression `G = [[p, r], [r, q]]`. CND applies the same test to `-M`.
///
/// The tolerance matches the projection test exactly. With `C = VᵀMV` the
/// orthonormal compression, `G = Tᵀ C T` for `T = √2 [[1,0],[1,1]]`, so
/// `λ_min(C) ≥ -θ` is the same inequality system on `G + θ TᵀT`, that is on
/// `p + 4θ, q + 2θ, r + 2θ` (and on `p + 2θ` at order 2). Here
/// `θ = tol * max(1, ρ(M))` with the spectral radius from the closed-form
/// eigenvalues of a 2×2 or 3×3 symmetric matrix.
pub fn cpd_closed_form_small_with_tol(m: &Matrix, mode: Definiteness, tol: f64) -> Result<DefinitenessVerdict> {
    check_tol(tol)?;
    let n = ensure_symmetric(m)?;
    let sign = match mode {
        Definiteness::Cpd => 1.0,
        Definiteness::Cnd => -1.0,
        Definiteness::Psd => return Err(Error::config("closed form covers cpd and cnd only")),
    };
    let m = m * sign;
    let scale = small_spectral_radius(&m)?.max(1.0);
    let theta = tol * scale;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (holds, strict, eigenvalue, witness) = match n {
        2 => {
            let p = m[(0, 0)] + m[(1, 1)] - 2.0 * m[(0, 1)];
            (p + 2.0 * theta >= 0.0, p - 2.0 * theta >= 0.0, 0.5 * p, vec![h, -h])
        }
        3 => {
            let (a, b, c) = (m[(0, 0)], m[(1, 1)], m[(2, 2)]);
            let (d, e, f) = (m[(0, 1)], m[(0, 2)], m[(1, 2)]);
            let p = a + c - 2.0 * e;
            let q = b + c - 2.0 * f;
            let r = c + d - e - f;
            let psd = |t: f64| {
                let (p, q, r) = (p + 4.0 * t, q + 2.0 * t, r + 2.0 * t);
                p >= 0.0 && q >= 0.0 && p * q >= r * r
            };
            let (eigenvalue, y) = min_eig_2x2(&compress_sumzero(&m)?);
            (psd(theta), psd(-theta), eigenvalue, lift_sumzero(&y))
        }
        _ => return Err(Error::shape(format!("closed form needs order 2 or 3, got {n}"))),
    };
    Ok(DefinitenessVerdict {
        property: mode,
        holds,
        marginal: holds && !strict,
        extremal_eigenvalue: eigenvalue,
        witness,
        tolerance_used: tol,
        scale,
    })
}

/// Spectral radius of a symmetric 2×2 or 3×3 matrix from its characteristic
/// polynomial (quadratic formula, or the trigonometric solution of the cubic).
pub fn small_spectral_radius(m: &Matrix) -> Result<f64> {
    let n = ensure_symmetric(m)?;
    match n {
        1 => Ok(m[(0, 0)].abs()),
        2 => {
            let (x, y, z) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
            let half_gap = (0.5 * (x - z)).hypot(y);
            let mid = 0.5 * (x + z);
            Ok((mid - half_gap).abs().max((mid + half_gap).abs()))
        }
        3 => {
            let off = m[(0, 1)].powi(2) + m[(0, 2)].powi(2) + m[(1, 2)].powi(2);
            let q = m.trace() / 3.0;
            let p2 = (m[(0, 0)] - q).powi(2) + (m[(1, 1)] - q).powi(2) + (m[(2, 2)] - q).powi(2) + 2.0 * off;
            let p = (p2 / 6.0).sqrt();
            if p == 0.0 {
                return Ok(q.abs());
            }
            let b = (m - Matrix::identity(3, 3) * q) / p;
            let r = (0.5 * b.determinant()).clamp(-1.0, 1.0);
            let phi = r.acos() / 3.0;
            let top = q + 2.0 * p * phi.cos();
            let bottom = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
            Ok(top.abs().max(bottom.abs()))
        }
        _ => Err(Error::shape(format!("closed-form spectral radius needs order at most 3, got {n}"))),
    }
}

/// Smallest eigenpair of a symmetric 2×2 matrix by the quadratic formula.
fn min_eig_2x2(c: &Matrix) -> (f64, Vec<f64>) {
    let (x, y, z) = (c[(0, 0)], c[(0, 1)], c[(1, 1)]);
    let half_gap = (0.5 * (x - z)).hypot(y);
    let mid = 0.5 * (x + z);
    let lambda = mid - half_gap;
    // (y, λ - x) and (λ - z, y) are both eigenvectors; take the better conditioned one
    let v = if (lambda - x).abs().max(y.abs()) >= (lambda - z).abs().max(y.abs()) {
        [y, lambda - x]
    } else {
        [lambda - z, y]
    };
    let norm = v[0].hypot(v[1]);
    if norm == 0.0 {
        (lambda, vec![1.0, 0.0])
    } else {
        (lambda, vec![v[0] / norm, v[1] / norm])
    }
}
