//! First and second divided differences with a relative confluence rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcs::FunctionDescriptor;

/// Points closer than `delta * max(1, |s|, |t|)` are treated as coincident.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfluencePolicy {
    pub delta: f64,
}

impl Default for ConfluencePolicy {
    fn default() -> Self {
        Self { delta: 1e-7 }
    }
}

impl ConfluencePolicy {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::config(format!("confluence threshold {delta} must be positive")));
        }
        Ok(Self { delta })
    }

    pub fn confluent(&self, s: f64, t: f64) -> bool {
        (s - t).abs() <= self.delta * s.abs().max(t.abs()).max(1.0)
    }
}

/// `f^[1](s, t)`: the difference quotient, or `f'` at the midpoint for confluent points.
pub fn fdd(f: &FunctionDescriptor, s: f64, t: f64, policy: ConfluencePolicy) -> Result<f64> {
    if policy.confluent(s, t) {
        // keep the original points' domain errors even when the midpoint is fine
        f.eval(s)?;
        f.eval(t)?;
        f.deriv(0.5 * (s + t))
    } else {
        Ok((f.eval(s)? - f.eval(t)?) / (s - t))
    }
}

/// `f^[2](u, v, w)`, symmetric in its arguments.
///
/// The points are sorted first so every permutation runs the same arithmetic.
/// When all three are confluent the value is `f''/2` at their centre, taken
/// as a central difference of the analytic first derivative.
pub fn sdd(f: &FunctionDescriptor, u: f64, v: f64, w: f64, policy: ConfluencePolicy) -> Result<f64> {
    let mut p = [u, v, w];
    p.sort_by(f64::total_cmp);
    let [lo, mid, hi] = p;
    for &x in &p {
        f.eval(x)?;
    }
    if policy.confluent(lo, hi) {
        let c = mid;
        let domain = f.domain();
        let mut h = f64::EPSILON.cbrt() * c.abs().max(1.0);
        let room = (c - domain.lo).min(domain.hi - c);
        if room.is_finite() {
            h = h.min(0.5 * room);
        }
        return Ok((f.deriv(c + h)? - f.deriv(c - h)?) / (4.0 * h));
    }
    Ok((fdd(f, lo, mid, policy)? - fdd(f, mid, hi, policy)?) / (lo - hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcs::{FunctionDescriptor as F, Weight};

    const P: ConfluencePolicy = ConfluencePolicy { delta: 1e-7 };

    #[test]
    fn first_differences() {
        assert_eq!(fdd(&F::power(2.0), 1.0, 3.0, P).unwrap(), 4.0);
        assert_eq!(fdd(&F::power(3.0), 2.0, 2.0, P).unwrap(), 12.0);
        let v = fdd(&F::power(0.5), 1.0, 4.0, P).unwrap();
        // 1/(√1 + √4), and the raw quotient (1 - 2)/(1 - 4)
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        assert!((v - (1.0 - 2.0) / (1.0 - 4.0)).abs() < 1e-15);
    }

    #[test]
    fn second_differences() {
        assert!((sdd(&F::power(2.0), 0.5, 1.0, 2.0, P).unwrap() - 1.0).abs() < 1e-14);
        for (u, v, w) in [(0.1, 2.0, -3.0), (5.0, 7.0, 11.0)] {
            assert!(sdd(&F::affine(1.0, 5.0), u, v, w, P).unwrap().abs() < 1e-14);
        }
        assert!((sdd(&F::power(3.0), 2.0, 2.0, 2.0, P).unwrap() - 6.0).abs() < 1e-8);
    }

    #[test]
    fn second_difference_recovers_inner_function() {
        let eps = 0.3;
        let g = F::power(0.5).weighted_by(Weight::LeftSquared { a: eps });
        let exact = sdd(&g, 2.0, eps, eps, P).unwrap();
        assert!((exact - 2f64.sqrt()).abs() < 1e-12);
        // plain recursive formula with nearly-coincident points
        let eta = 1e-5;
        let q = |s: f64, t: f64| (g.eval(s).unwrap() - g.eval(t).unwrap()) / (s - t);
        let near = (q(2.0, eps + eta) - q(eps + eta, eps + 2.0 * eta)) / (2.0 - (eps + 2.0 * eta));
        assert!((near - exact).abs() < 1e-4);
    }

    #[test]
    fn confluence_is_continuous() {
        let fs = [
            F::power(0.5),
            F::power(-1.5),
            F::moebius_monotone(0.9),
            F::moebius_convex(-0.6),
            F::PiecewiseQuadLinear,
        ];
        for f in &fs {
            let t = 0.4;
            let d = f.deriv(t).unwrap();
            let errs: Vec<f64> = [1e-4, 1e-5, 1e-6]
                .iter()
                .map(|eta| (fdd(f, t, t + eta, P).unwrap() - d).abs())
                .collect();
            assert!(errs[0] > errs[1] && errs[1] > errs[2], "{}: {errs:?}", f.label());
        }
    }

    #[test]
    fn domain_errors_propagate() {
        assert!(fdd(&F::power(0.5), -1.0, 2.0, P).is_err());
        assert!(fdd(&F::power(0.5), 0.0, 1e-9, P).is_err());
        assert!(sdd(&F::moebius_monotone(0.5), 0.0, 0.5, 1.5, P).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn fdd_is_exactly_symmetric(alpha in -3.0f64..4.0, s in 1e-3f64..1e3, t in 1e-3f64..1e3) {
                let f = F::power(alpha);
                prop_assert_eq!(fdd(&f, s, t, P).unwrap(), fdd(&f, t, s, P).unwrap());
            }

            #[test]
            fn sdd_is_permutation_invariant(lambda in -0.95f64..0.95, u in -0.9f64..0.9, v in -0.9f64..0.9, w in -0.9f64..0.9) {
                let f = F::moebius_convex(lambda);
                let base = sdd(&f, u, v, w, P).unwrap();
                for (a, b, c) in [(u, w, v), (v, u, w), (v, w, u), (w, u, v), (w, v, u)] {
                    let x = sdd(&f, a, b, c, P).unwrap();
                    prop_assert!((x - base).abs() <= 1e-10 * base.abs().max(1.0));
                }
            }
        }
    }
}
