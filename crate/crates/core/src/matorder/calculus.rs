//! Functional calculus `f(M) = Q diag(f(λ_i)) Qᵀ`.

use crate::error::{Error, Result};
use crate::funcs::FunctionDescriptor;
use crate::linalg::Matrix;

use super::eigen::{sym_eigen, SpectralDecomposition};

/// Relative margin keeping eigenvalues away from the domain ends.
pub const SPECTRUM_MARGIN: f64 = 1e-10;

pub fn apply_function(f: &FunctionDescriptor, m: &Matrix) -> Result<Matrix> {
    apply_to_decomposition(f, &sym_eigen(m)?)
}

pub fn apply_to_decomposition(f: &FunctionDescriptor, d: &SpectralDecomposition) -> Result<Matrix> {
    let domain = f.domain();
    let mut values = Vec::with_capacity(d.eigenvalues.len());
    for &l in &d.eigenvalues {
        if !domain.contains_with_margin(l, SPECTRUM_MARGIN) {
            return Err(Error::Spectrum { eigenvalue: l, domain });
        }
        values.push(f.eval(l)?);
    }
    Ok(d.with_eigenvalues(&values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcs::FunctionDescriptor as F;
    use crate::linalg::from_rows;
    use crate::matorder::sampling::random_orthogonal;
    use nalgebra::DVector;

    #[test]
    fn examples() {
        let swap = from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        // t^α lives on (0, ∞) in the catalog, so the spectrum {-1, 1} is rejected;
        // the square on the whole line is the product of two identities
        assert!(matches!(apply_function(&F::power(2.0), &swap), Err(Error::Spectrum { .. })));
        let square = F::affine(0.0, 1.0).times(F::affine(0.0, 1.0));
        let r = apply_function(&square, &swap).unwrap();
        assert!((r - Matrix::identity(2, 2)).norm() < 1e-15);

        let d = Matrix::from_diagonal(&DVector::from_vec(vec![4.0, 9.0]));
        let r = apply_function(&F::power(0.5), &d).unwrap();
        assert!((r - Matrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0]))).norm() < 1e-15);
    }

    #[test]
    fn square_of_shifted_swap() {
        // [[2,1],[1,2]]² = [[5,4],[4,5]]
        let m = from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let r = apply_function(&F::power(2.0), &m).unwrap();
        let expect = from_rows(&[vec![5.0, 4.0], vec![4.0, 5.0]]).unwrap();
        assert!((r - expect).norm() < 1e-13);
    }

    mod props {
        use super::*;
        use crate::rng;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn affine_calculus(c0 in -3.0f64..3.0, c1 in -3.0f64..3.0, seed in any::<u64>(), n in 1usize..6) {
                let mut r = rng::stream(seed, 0);
                let q = random_orthogonal(n, &mut r);
                let m = &q * Matrix::from_fn(n, n, |i, j| if i == j { (i as f64) - 2.5 } else { 0.0 }) * q.transpose();
                let got = apply_function(&F::affine(c0, c1), &m).unwrap();
                let expect = Matrix::identity(n, n) * c0 + &m * c1;
                prop_assert!((got - expect).norm() <= 1e-12 * (1.0 + m.norm()));
            }

            #[test]
            fn orthogonal_covariance(alpha in -2.0f64..3.0, seed in any::<u64>(), n in 1usize..6) {
                let mut r = rng::stream(seed, 0);
                let q = random_orthogonal(n, &mut r);
                let u = random_orthogonal(n, &mut r);
                let m = &u * Matrix::from_fn(n, n, |i, j| if i == j { 0.5 + i as f64 } else { 0.0 }) * u.transpose();
                let f = F::power(alpha);
                let lhs = apply_function(&f, &(&q * &m * q.transpose())).unwrap();
                let rhs = &q * apply_function(&f, &m).unwrap() * q.transpose();
                prop_assert!((&lhs - &rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
            }
        }
    }
}
