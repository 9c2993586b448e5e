//! Loewner matrices `L_f(t_1, ..., t_n) = [f^[1](t_i, t_j)]` and the weighted
//! transforms `t f`, `t² f`, `(b-t)² f`, `(t-a)(b-t) f`, `(t-a)² f`.

pub mod identities;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::divdiff::{fdd, ConfluencePolicy};
use crate::error::{Error, Result};
use crate::funcs::{FunctionDescriptor, Weight, WeightTag};
use crate::linalg::{serde_rows, Matrix};

/// Evaluation points `t_1, ..., t_n`; repeats are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PointTuple(Vec<f64>);

impl PointTuple {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::config("a point tuple needs at least one point"));
        }
        if let Some(x) = points.iter().find(|x| !x.is_finite()) {
            return Err(Error::config(format!("point {x} is not finite")));
        }
        Ok(Self(points))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn shifted(&self, eps: f64) -> PointTuple {
        PointTuple(self.0.iter().map(|t| t + eps).collect())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> PointTuple {
        PointTuple(self.0.iter().map(|&t| f(t)).collect())
    }
}

impl TryFrom<Vec<f64>> for PointTuple {
    type Error = Error;

    fn try_from(points: Vec<f64>) -> Result<Self> {
        PointTuple::new(points)
    }
}

impl From<PointTuple> for Vec<f64> {
    fn from(p: PointTuple) -> Self {
        p.0
    }
}

impl FromStr for PointTuple {
    type Err = Error;

    /// Comma-separated reals, e.g. `2,5,7`.
    fn from_str(s: &str) -> Result<Self> {
        let pts = s
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::config(format!("bad point `{x}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        PointTuple::new(pts)
    }
}

impl fmt::Display for PointTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A Loewner matrix together with the points and function that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoewnerMatrix {
    #[serde(with = "serde_rows")]
    pub entries: Matrix,
    pub points: PointTuple,
    pub source: FunctionDescriptor,
}

impl LoewnerMatrix {
    pub fn order(&self) -> usize {
        self.points.len()
    }
}

/// Builds `L_f` at `pts` with the default confluence policy.
pub fn build(f: &FunctionDescriptor, pts: &PointTuple) -> Result<LoewnerMatrix> {
    build_with_policy(f, pts, ConfluencePolicy::default())
}

pub fn build_with_policy(
    f: &FunctionDescriptor,
    pts: &PointTuple,
    policy: ConfluencePolicy,
) -> Result<LoewnerMatrix> {
    Ok(LoewnerMatrix {
        entries: loewner_entries(f, pts.as_slice(), policy)?,
        points: pts.clone(),
        source: f.clone(),
    })
}

/// Bare entry matrix, for hot loops that do not need the metadata.
pub fn loewner_entries(f: &FunctionDescriptor, pts: &[f64], policy: ConfluencePolicy) -> Result<Matrix> {
    let n = pts.len();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = fdd(f, pts[i], pts[j], policy)?;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// `w(t) f(t)` for the weight selected by `tag`.
///
/// Powers absorb the monomial weights (`t · t^α = t^(α+1)`), so the result of
/// weighting a power stays a closed-form power.
pub fn weighted(
    f: &FunctionDescriptor,
    tag: WeightTag,
    a: Option<f64>,
    b: Option<f64>,
) -> Result<FunctionDescriptor> {
    match tag.with_endpoints(a, b)? {
        None => Ok(f.clone()),
        Some(w) => Ok(apply_weight(f, w)),
    }
}

fn apply_weight(f: &FunctionDescriptor, w: Weight) -> FunctionDescriptor {
    let k = match w {
        Weight::T => 1.0,
        Weight::TSquared => 2.0,
        _ => return f.clone().weighted_by(w),
    };
    match f {
        FunctionDescriptor::Power { alpha } => FunctionDescriptor::power(alpha + k),
        FunctionDescriptor::Negated { inner } => apply_weight(inner, w).negated(),
        FunctionDescriptor::Scaled { inner, factor } => apply_weight(inner, w).scaled(*factor),
        _ => f.clone().weighted_by(w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcs::FunctionDescriptor as F;
    use crate::linalg::{all_ones, from_rows};

    fn pts(v: &[f64]) -> PointTuple {
        PointTuple::new(v.to_vec()).unwrap()
    }

    #[test]
    fn identity_gives_all_ones() {
        let l = build(&F::power(1.0), &pts(&[2.0, 5.0, 7.0])).unwrap();
        assert_eq!(l.entries, all_ones(3));
    }

    #[test]
    fn square_and_root() {
        let l = build(&F::power(2.0), &pts(&[1.0, 3.0])).unwrap();
        assert_eq!(l.entries, from_rows(&[vec![2.0, 4.0], vec![4.0, 6.0]]).unwrap());
        let r = build(&F::power(0.5), &pts(&[1.0, 4.0])).unwrap();
        // diagonal t^(-1/2)/2, off-diagonal 1/(√t_i + √t_j)
        let expect = [[0.5, 1.0 / 3.0], [1.0 / 3.0, 0.25]];
        for (i, row) in expect.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                assert!((r.entries[(i, j)] - e).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn repeated_points_use_derivative() {
        let l = build(&F::power(3.0), &pts(&[2.0, 2.0])).unwrap();
        assert_eq!(l.entries, Matrix::from_element(2, 2, 12.0));
    }

    #[test]
    fn out_of_domain_point_fails() {
        assert!(matches!(
            build(&F::power(0.5), &pts(&[1.0, -1.0])),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn weighted_transforms() {
        let tf = weighted(&F::power(0.5), WeightTag::T, None, None).unwrap();
        assert_eq!(tf, F::power(1.5));
        assert!((tf.eval(4.0).unwrap() - 8.0).abs() < 1e-14);
        assert_eq!(weighted(&F::power(-1.0), WeightTag::T2, None, None).unwrap(), F::power(1.0));

        let g = weighted(&F::moebius_monotone(0.5), WeightTag::Bilateral, Some(-1.0), Some(1.0)).unwrap();
        assert_eq!(g.eval(0.0).unwrap(), 0.0);
        assert_eq!(g.deriv(0.0).unwrap(), 1.0);

        assert!(weighted(&F::power(1.0), WeightTag::Right2, None, None).is_err());
    }

    #[test]
    fn json_round_trip() {
        let l = build(&F::moebius_convex(0.25), &pts(&[-0.5, 0.1, 0.7])).unwrap();
        let text = serde_json::to_string(&l).unwrap();
        let back: LoewnerMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, l);
        assert!(serde_json::from_str::<PointTuple>("[]").is_err());
    }

    #[test]
    fn parse_points() {
        assert_eq!("2, 5,7".parse::<PointTuple>().unwrap(), pts(&[2.0, 5.0, 7.0]));
        assert!("2,x".parse::<PointTuple>().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn scale_covariance(alpha in -2.0f64..3.0, c in -5.0f64..5.0,
                                k in proptest::collection::vec(1u32..200, 1..6)) {
                // grid points a quarter apart keep the difference quotients well conditioned
                let p = PointTuple::new(k.iter().map(|&k| k as f64 / 4.0).collect()).unwrap();
                let f = F::power(alpha);
                let base = build(&f, &p).unwrap().entries;
                let scaled = build(&f.clone().scaled(c), &p).unwrap().entries;
                let expect = base * c;
                let bound = 1e-12 * crate::linalg::max_abs(&expect).max(1.0);
                prop_assert!(crate::linalg::max_abs(&(scaled - expect)) <= bound);
            }

            #[test]
            fn symmetric_with_derivative_diagonal(lambda in -1.0f64..1.0,
                                                 t in proptest::collection::vec(-0.99f64..0.99, 1..6)) {
                let p = PointTuple::new(t.clone()).unwrap();
                let f = F::moebius_convex(lambda);
                let m = build(&f, &p).unwrap().entries;
                prop_assert_eq!(m.transpose(), m.clone());
                for (i, ti) in t.iter().enumerate() {
                    prop_assert_eq!(m[(i, i)], f.deriv(*ti).unwrap());
                }
            }
        }
    }
}
