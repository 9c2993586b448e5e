//! Catalog of real test functions with exact values and analytic derivatives.
//!
//! A [`FunctionDescriptor`] is a small expression tree: closed-form leaves
//! (powers, affine maps, the Möbius kernels `t/(1-λt)` and `t²/(1-λt)`, a
//! piecewise quadratic/linear example) combined with negation, scaling,
//! translation, restriction, polynomial weights, sums, products, reciprocals
//! and interval conjugation. Every node carries its derivative by the usual
//! rules, so nothing downstream depends on numerical differentiation except
//! the `Tabulated` leaf.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::ConjugationMap;
use crate::linalg::ext_real;

/// An open interval `(lo, hi)` of the extended real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "ext_real")]
    pub lo: f64,
    #[serde(with = "ext_real")]
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::config(format!("invalid interval ({lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub const fn positive() -> Self {
        Self {
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    pub const fn real_line() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        t.is_finite() && self.lo < t && t < self.hi
    }

    /// Membership after pulling both finite ends inward by `margin * max(1, |end|)`.
    pub fn contains_with_margin(&self, t: f64, margin: f64) -> bool {
        let lo = if self.lo.is_finite() {
            self.lo + margin * self.lo.abs().max(1.0)
        } else {
            self.lo
        };
        let hi = if self.hi.is_finite() {
            self.hi - margin * self.hi.abs().max(1.0)
        } else {
            self.hi
        };
        t.is_finite() && lo < t && t < hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(Interval { lo, hi })
    }

    /// The interval `{t : t + eps ∈ self}`.
    pub fn translate_back(&self, eps: f64) -> Interval {
        Interval {
            lo: self.lo - eps,
            hi: self.hi - eps,
        }
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

impl FromStr for Interval {
    type Err = Error;

    /// Accepts `lo:hi` or `(lo,hi)`, with `inf` / `-inf` for unbounded ends.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (lo, hi) = body
            .split_once(':')
            .or_else(|| body.split_once(','))
            .ok_or_else(|| Error::config(format!("interval `{s}` must look like lo:hi")))?;
        let parse = |x: &str| {
            ext_real::parse(x).ok_or_else(|| Error::config(format!("bad interval endpoint `{x}`")))
        };
        Interval::new(parse(lo)?, parse(hi)?)
    }
}

/// Polynomial weight `w(t)` multiplying a function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "kebab-case")]
pub enum Weight {
    /// `t`
    T,
    /// `t²`
    TSquared,
    /// `(b - t)²`
    RightSquared { b: f64 },
    /// `(t - a)(b - t)`
    Bilateral { a: f64, b: f64 },
    /// `(t - a)²`
    LeftSquared { a: f64 },
}

/// Parameter-free weight selector used on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightTag {
    None,
    T,
    T2,
    Right2,
    Bilateral,
    Left2,
}

impl FromStr for WeightTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "none" => WeightTag::None,
            "t" => WeightTag::T,
            "t2" => WeightTag::T2,
            "right2" => WeightTag::Right2,
            "bilateral" => WeightTag::Bilateral,
            "left2" => WeightTag::Left2,
            other => {
                return Err(Error::config(format!(
                    "unknown weight `{other}` (expected none, t, t2, right2, bilateral, left2)"
                )))
            }
        })
    }
}

impl WeightTag {
    /// Attaches endpoints; interval weights require the matching finite ends.
    pub fn with_endpoints(self, a: Option<f64>, b: Option<f64>) -> Result<Option<Weight>> {
        let finite = |name: &str, v: Option<f64>| match v {
            Some(x) if x.is_finite() => Ok(x),
            Some(x) => Err(Error::config(format!("endpoint {name} = {x} must be finite"))),
            None => Err(Error::config(format!(
                "weight {self:?} needs the interval endpoint {name}"
            ))),
        };
        Ok(match self {
            WeightTag::None => None,
            WeightTag::T => Some(Weight::T),
            WeightTag::T2 => Some(Weight::TSquared),
            WeightTag::Right2 => Some(Weight::RightSquared { b: finite("b", b)? }),
            WeightTag::Left2 => Some(Weight::LeftSquared { a: finite("a", a)? }),
            WeightTag::Bilateral => {
                let (a, b) = (finite("a", a)?, finite("b", b)?);
                if a >= b {
                    return Err(Error::config(format!("bilateral weight needs a < b, got a={a}, b={b}")));
                }
                Some(Weight::Bilateral { a, b })
            }
        })
    }
}

impl Weight {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Weight::T => t,
            Weight::TSquared => t * t,
            Weight::RightSquared { b } => (b - t) * (b - t),
            Weight::Bilateral { a, b } => (t - a) * (b - t),
            Weight::LeftSquared { a } => (t - a) * (t - a),
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match *self {
            Weight::T => 1.0,
            Weight::TSquared => 2.0 * t,
            Weight::RightSquared { b } => -2.0 * (b - t),
            Weight::Bilateral { a, b } => a + b - 2.0 * t,
            Weight::LeftSquared { a } => 2.0 * (t - a),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Weight::T | Weight::TSquared => true,
            Weight::RightSquared { b } => b.is_finite(),
            Weight::LeftSquared { a } => a.is_finite(),
            Weight::Bilateral { a, b } => a.is_finite() && b.is_finite() && a < b,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid weight {self:?}")))
        }
    }
}

/// Which way a [`ConjugationMap`] is applied to the inner function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConjugationDirection {
    /// Inner lives on `(a, b)`; the result is `x ↦ inner(ψ⁻¹(x))` on `(0, ∞)`.
    ToHalfLine,
    /// Inner lives on `(0, ∞)`; the result is `t ↦ inner(ψ(t))` on `(a, b)`.
    FromHalfLine,
}

/// Sample points, values and optional derivative values of a user-supplied function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub points: Vec<f64>,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivatives: Option<Vec<f64>>,
}

impl Table {
    fn validate(&self) -> Result<()> {
        let n = self.points.len();
        if n < 2 {
            return Err(Error::config("a tabulated function needs at least two points"));
        }
        if self.values.len() != n || self.derivatives.as_ref().is_some_and(|d| d.len() != n) {
            return Err(Error::config("tabulated points, values and derivatives differ in length"));
        }
        if self.points.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
            return Err(Error::config("tabulated points must be strictly increasing"));
        }
        if self.points.iter().chain(&self.values).any(|x| !x.is_finite()) {
            return Err(Error::config("tabulated data must be finite"));
        }
        Ok(())
    }

    /// Piecewise-linear interpolation of `ys`, extrapolating the end segments.
    fn interpolate(&self, ys: &[f64], t: f64) -> f64 {
        let xs = &self.points;
        let k = xs.partition_point(|&x| x <= t).clamp(1, xs.len() - 1);
        let (x0, x1) = (xs[k - 1], xs[k]);
        let w = (t - x0) / (x1 - x0);
        ys[k - 1] + w * (ys[k] - ys[k - 1])
    }

    fn value(&self, t: f64) -> f64 {
        self.interpolate(&self.values, t)
    }

    fn deriv(&self, t: f64) -> f64 {
        match &self.derivatives {
            Some(d) => self.interpolate(d, t),
            None => {
                let h = f64::EPSILON.cbrt() * t.abs().max(1.0);
                (self.value(t + h) - self.value(t - h)) / (2.0 * h)
            }
        }
    }
}

/// A real C¹ function on an open interval, described symbolically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FunctionDescriptor {
    /// `t^α` on `(0, ∞)`.
    Power { alpha: f64 },
    /// `c0 + c1 t` on ℝ.
    Affine { c0: f64, c1: f64 },
    /// `t / (1 - λt)` on `(-1, 1)`.
    MoebiusMonotone { lambda: f64 },
    /// `t² / (1 - λt)` on `(-1, 1)`.
    MoebiusConvex { lambda: f64 },
    /// `t²` on `(0, 1]`, `2t - 1` on `[1, ∞)`.
    PiecewiseQuadLinear,
    Negated { inner: Box<FunctionDescriptor> },
    Scaled { inner: Box<FunctionDescriptor>, factor: f64 },
    /// `t ↦ inner(t + eps)`.
    Shifted { inner: Box<FunctionDescriptor>, eps: f64 },
    Restricted { inner: Box<FunctionDescriptor>, interval: Interval },
    /// `t ↦ w(t) · inner(t)`.
    Weighted { inner: Box<FunctionDescriptor>, weight: Weight },
    Sum { left: Box<FunctionDescriptor>, right: Box<FunctionDescriptor> },
    Product { left: Box<FunctionDescriptor>, right: Box<FunctionDescriptor> },
    Reciprocal { inner: Box<FunctionDescriptor> },
    Conjugated {
        inner: Box<FunctionDescriptor>,
        map: ConjugationMap,
        direction: ConjugationDirection,
    },
    Tabulated(Table),
}

use FunctionDescriptor as F;

const MOEBIUS_DOMAIN: Interval = Interval { lo: -1.0, hi: 1.0 };

impl FunctionDescriptor {
    pub fn power(alpha: f64) -> Self {
        F::Power { alpha }
    }

    pub fn affine(c0: f64, c1: f64) -> Self {
        F::Affine { c0, c1 }
    }

    pub fn constant(c: f64) -> Self {
        F::Affine { c0: c, c1: 0.0 }
    }

    pub fn moebius_monotone(lambda: f64) -> Self {
        F::MoebiusMonotone { lambda }
    }

    pub fn moebius_convex(lambda: f64) -> Self {
        F::MoebiusConvex { lambda }
    }

    pub fn negated(self) -> Self {
        F::Negated { inner: Box::new(self) }
    }

    pub fn scaled(self, factor: f64) -> Self {
        F::Scaled {
            inner: Box::new(self),
            factor,
        }
    }

    pub fn shifted(self, eps: f64) -> Self {
        F::Shifted {
            inner: Box::new(self),
            eps,
        }
    }

    pub fn restricted(self, interval: Interval) -> Self {
        F::Restricted {
            inner: Box::new(self),
            interval,
        }
    }

    /// Raw weighted product, without the power-law simplification of
    /// [`crate::loewner::weighted`].
    pub fn weighted_by(self, weight: Weight) -> Self {
        F::Weighted {
            inner: Box::new(self),
            weight,
        }
    }

    pub fn plus(self, other: FunctionDescriptor) -> Self {
        F::Sum {
            left: Box::new(self),
            right: Box::new(other),
        }
    }

    pub fn times(self, other: FunctionDescriptor) -> Self {
        F::Product {
            left: Box::new(self),
            right: Box::new(other),
        }
    }

    pub fn reciprocal(self) -> Self {
        F::Reciprocal { inner: Box::new(self) }
    }

    pub fn tabulated(table: Table) -> Result<Self> {
        table.validate()?;
        Ok(F::Tabulated(table))
    }

    /// Checks parameter constraints throughout the tree.
    pub fn validate(&self) -> Result<()> {
        match self {
            F::Power { alpha } => finite_param("alpha", *alpha),
            F::Affine { c0, c1 } => finite_param("c0", *c0).and(finite_param("c1", *c1)),
            F::MoebiusMonotone { lambda } | F::MoebiusConvex { lambda } => {
                if (-1.0..=1.0).contains(lambda) {
                    Ok(())
                } else {
                    Err(Error::config(format!("lambda = {lambda} must lie in [-1, 1]")))
                }
            }
            F::PiecewiseQuadLinear => Ok(()),
            F::Negated { inner } | F::Reciprocal { inner } => inner.validate(),
            F::Scaled { inner, factor } => {
                finite_param("factor", *factor)?;
                inner.validate()
            }
            F::Shifted { inner, eps } => {
                if !(eps.is_finite() && *eps > 0.0) {
                    return Err(Error::config(format!("shift eps = {eps} must be positive")));
                }
                inner.validate()
            }
            F::Restricted { inner, interval } => {
                inner.validate()?;
                if inner.domain().intersect(interval).is_none() {
                    return Err(Error::config(format!(
                        "restriction {interval} misses the domain {}",
                        inner.domain()
                    )));
                }
                Ok(())
            }
            F::Weighted { inner, weight } => {
                weight.validate()?;
                inner.validate()
            }
            F::Sum { left, right } | F::Product { left, right } => {
                left.validate()?;
                right.validate()?;
                if left.domain().intersect(&right.domain()).is_none() {
                    return Err(Error::config("operands have disjoint domains"));
                }
                Ok(())
            }
            F::Conjugated { inner, map, direction } => {
                inner.validate()?;
                let needed = match direction {
                    ConjugationDirection::ToHalfLine => map.interval(),
                    ConjugationDirection::FromHalfLine => Interval::positive(),
                };
                if !inner.domain().contains_interval(&needed) {
                    return Err(Error::config(format!(
                        "conjugation needs the inner domain to cover {needed}, got {}",
                        inner.domain()
                    )));
                }
                Ok(())
            }
            F::Tabulated(table) => table.validate(),
        }
    }

    /// The maximal open interval on which the descriptor is defined.
    pub fn domain(&self) -> Interval {
        match self {
            F::Power { .. } | F::PiecewiseQuadLinear => Interval::positive(),
            F::Affine { .. } => Interval::real_line(),
            F::MoebiusMonotone { .. } | F::MoebiusConvex { .. } => MOEBIUS_DOMAIN,
            F::Negated { inner }
            | F::Scaled { inner, .. }
            | F::Weighted { inner, .. }
            | F::Reciprocal { inner } => inner.domain(),
            F::Shifted { inner, eps } => inner.domain().translate_back(*eps),
            F::Restricted { inner, interval } => inner
                .domain()
                .intersect(interval)
                .unwrap_or(*interval),
            F::Sum { left, right } | F::Product { left, right } => left
                .domain()
                .intersect(&right.domain())
                .unwrap_or_else(|| left.domain()),
            F::Conjugated { map, direction, .. } => match direction {
                ConjugationDirection::ToHalfLine => Interval::positive(),
                ConjugationDirection::FromHalfLine => map.interval(),
            },
            F::Tabulated(table) => Interval {
                lo: table.points[0],
                hi: table.points[table.points.len() - 1],
            },
        }
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let domain = self.domain();
        if domain.contains(t) {
            Ok(())
        } else {
            Err(Error::Domain {
                t,
                domain,
                reason: "outside the open domain",
            })
        }
    }

    /// Function value at `t`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        self.value(t)
    }

    /// First derivative at `t`.
    pub fn deriv(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        self.slope(t)
    }

    /// Value and derivative together.
    pub fn eval_with_deriv(&self, t: f64) -> Result<(f64, f64)> {
        self.check_domain(t)?;
        Ok((self.value(t)?, self.slope(t)?))
    }

    /// Every leaf is closed-form (no tabulated data anywhere in the tree).
    pub fn is_exact(&self) -> bool {
        match self {
            F::Tabulated(_) => false,
            F::Power { .. }
            | F::Affine { .. }
            | F::MoebiusMonotone { .. }
            | F::MoebiusConvex { .. }
            | F::PiecewiseQuadLinear => true,
            F::Negated { inner }
            | F::Scaled { inner, .. }
            | F::Shifted { inner, .. }
            | F::Restricted { inner, .. }
            | F::Weighted { inner, .. }
            | F::Reciprocal { inner }
            | F::Conjugated { inner, .. } => inner.is_exact(),
            F::Sum { left, right } | F::Product { left, right } => left.is_exact() && right.is_exact(),
        }
    }

    /// Positively homogeneous on `(0, ∞)`: `f(ct) = c^k f(t)` for some `k`.
    /// Loewner matrices of such functions only depend on point ratios.
    pub fn is_homogeneous(&self) -> bool {
        match self {
            F::Power { .. } => true,
            F::Negated { inner } | F::Scaled { inner, .. } => inner.is_homogeneous(),
            F::Weighted {
                inner,
                weight: Weight::T | Weight::TSquared,
            } => inner.is_homogeneous(),
            F::Restricted { inner, interval } => {
                *interval == Interval::positive() && inner.is_homogeneous()
            }
            _ => false,
        }
    }

    fn value(&self, t: f64) -> Result<f64> {
        Ok(match self {
            F::Power { alpha } => power(t, *alpha),
            F::Affine { c0, c1 } => c0 + c1 * t,
            F::MoebiusMonotone { lambda } => t / moebius_denominator(self, *lambda, t)?,
            F::MoebiusConvex { lambda } => t * t / moebius_denominator(self, *lambda, t)?,
            F::PiecewiseQuadLinear => {
                if t <= 1.0 {
                    t * t
                } else {
                    2.0 * t - 1.0
                }
            }
            F::Negated { inner } => -inner.value(t)?,
            F::Scaled { inner, factor } => factor * inner.value(t)?,
            F::Shifted { inner, eps } => inner.value(t + eps)?,
            F::Restricted { inner, .. } => inner.value(t)?,
            F::Weighted { inner, weight } => weight.value(t) * inner.value(t)?,
            F::Sum { left, right } => left.value(t)? + right.value(t)?,
            F::Product { left, right } => left.value(t)? * right.value(t)?,
            F::Reciprocal { inner } => 1.0 / nonzero(self, inner.value(t)?, t)?,
            F::Conjugated { inner, map, direction } => match direction {
                ConjugationDirection::ToHalfLine => inner.eval(map.psi_inv_unchecked(t))?,
                ConjugationDirection::FromHalfLine => inner.eval(map.psi_unchecked(t))?,
            },
            F::Tabulated(table) => table.value(t),
        })
    }

    fn slope(&self, t: f64) -> Result<f64> {
        Ok(match self {
            F::Power { alpha } => {
                if *alpha == 0.0 {
                    0.0
                } else {
                    alpha * power(t, alpha - 1.0)
                }
            }
            F::Affine { c1, .. } => *c1,
            F::MoebiusMonotone { lambda } => {
                let d = moebius_denominator(self, *lambda, t)?;
                1.0 / (d * d)
            }
            F::MoebiusConvex { lambda } => {
                let d = moebius_denominator(self, *lambda, t)?;
                (2.0 * t - lambda * t * t) / (d * d)
            }
            F::PiecewiseQuadLinear => {
                if t <= 1.0 {
                    2.0 * t
                } else {
                    2.0
                }
            }
            F::Negated { inner } => -inner.slope(t)?,
            F::Scaled { inner, factor } => factor * inner.slope(t)?,
            F::Shifted { inner, eps } => inner.slope(t + eps)?,
            F::Restricted { inner, .. } => inner.slope(t)?,
            F::Weighted { inner, weight } => {
                weight.deriv(t) * inner.value(t)? + weight.value(t) * inner.slope(t)?
            }
            F::Sum { left, right } => left.slope(t)? + right.slope(t)?,
            F::Product { left, right } => {
                left.slope(t)? * right.value(t)? + left.value(t)? * right.slope(t)?
            }
            F::Reciprocal { inner } => {
                let v = nonzero(self, inner.value(t)?, t)?;
                -inner.slope(t)? / (v * v)
            }
            F::Conjugated { inner, map, direction } => match direction {
                ConjugationDirection::ToHalfLine => {
                    inner.deriv(map.psi_inv_unchecked(t))? * map.psi_inv_deriv(t)
                }
                ConjugationDirection::FromHalfLine => {
                    inner.deriv(map.psi_unchecked(t))? * map.psi_deriv(t)
                }
            },
            F::Tabulated(table) => table.deriv(t),
        })
    }

    /// Short human-readable label, e.g. `t^1.5` or `-(t/(1-0.5t))`.
    pub fn label(&self) -> String {
        match self {
            F::Power { alpha } => format!("t^{alpha}"),
            F::Affine { c0, c1 } => format!("{c0}+{c1}t"),
            F::MoebiusMonotone { lambda } => format!("t/(1-{lambda}t)"),
            F::MoebiusConvex { lambda } => format!("t^2/(1-{lambda}t)"),
            F::PiecewiseQuadLinear => "piecewise(t^2|2t-1)".to_string(),
            F::Negated { inner } => format!("-({})", inner.label()),
            F::Scaled { inner, factor } => format!("{factor}*({})", inner.label()),
            F::Shifted { inner, eps } => format!("({})(t+{eps})", inner.label()),
            F::Restricted { inner, interval } => format!("{}|{interval}", inner.label()),
            F::Weighted { inner, weight } => {
                let w = match weight {
                    Weight::T => "t".to_string(),
                    Weight::TSquared => "t^2".to_string(),
                    Weight::RightSquared { b } => format!("({b}-t)^2"),
                    Weight::Bilateral { a, b } => format!("(t-{a})({b}-t)"),
                    Weight::LeftSquared { a } => format!("(t-{a})^2"),
                };
                format!("{w}*({})", inner.label())
            }
            F::Sum { left, right } => format!("({})+({})", left.label(), right.label()),
            F::Product { left, right } => format!("({})*({})", left.label(), right.label()),
            F::Reciprocal { inner } => format!("1/({})", inner.label()),
            F::Conjugated { inner, map, direction } => match direction {
                ConjugationDirection::ToHalfLine => {
                    format!("({})∘psi_inv[{},{}]", inner.label(), map.a(), map.b())
                }
                ConjugationDirection::FromHalfLine => {
                    format!("({})∘psi[{},{}]", inner.label(), map.a(), map.b())
                }
            },
            F::Tabulated(t) => format!("tabulated[{}]", t.points.len()),
        }
    }
}

fn power(t: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else if alpha == 1.0 {
        t
    } else {
        t.powf(alpha)
    }
}

fn moebius_denominator(f: &FunctionDescriptor, lambda: f64, t: f64) -> Result<f64> {
    let d = 1.0 - lambda * t;
    if d == 0.0 {
        Err(Error::Domain {
            t,
            domain: f.domain(),
            reason: "pole at t = 1/lambda",
        })
    } else {
        Ok(d)
    }
}

fn nonzero(f: &FunctionDescriptor, v: f64, t: f64) -> Result<f64> {
    if v == 0.0 {
        Err(Error::Domain {
            t,
            domain: f.domain(),
            reason: "reciprocal of zero",
        })
    } else {
        Ok(v)
    }
}

fn finite_param(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(format!("parameter {name} = {v} must be finite")))
    }
}

impl FromStr for FunctionDescriptor {
    type Err = Error;

    /// Parses a named preset (`power:0.5`, `affine:1:2`, `moebius-monotone:0.5`,
    /// `moebius-convex:0.5`, `piecewise-quad-linear`, optionally prefixed by
    /// `neg:`) or an inline JSON descriptor.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let f = if s.starts_with('{') {
            serde_json::from_str(s).map_err(|e| Error::config(format!("bad function JSON: {e}")))?
        } else if let Some(rest) = s.strip_prefix("neg:") {
            rest.parse::<FunctionDescriptor>()?.negated()
        } else {
            let (name, args) = s.split_once(':').unwrap_or((s, ""));
            let nums = || -> Result<Vec<f64>> {
                args.split(':')
                    .filter(|a| !a.is_empty())
                    .map(|a| {
                        a.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::config(format!("bad number `{a}` in `{s}`")))
                    })
                    .collect()
            };
            let one = || -> Result<f64> {
                match nums()?.as_slice() {
                    [x] => Ok(*x),
                    _ => Err(Error::config(format!("`{name}` takes exactly one parameter"))),
                }
            };
            match name {
                "power" => F::power(one()?),
                "moebius-monotone" => F::moebius_monotone(one()?),
                "moebius-convex" => F::moebius_convex(one()?),
                "piecewise-quad-linear" => F::PiecewiseQuadLinear,
                "affine" => match nums()?.as_slice() {
                    [c0, c1] => F::affine(*c0, *c1),
                    _ => return Err(Error::config("`affine` takes c0:c1")),
                },
                other => {
                    return Err(Error::config(format!(
                        "unknown function preset `{other}` (expected power, affine, moebius-monotone, \
                         moebius-convex, piecewise-quad-linear, neg:<preset> or JSON)"
                    )))
                }
            }
        };
        f.validate()?;
        Ok(f)
    }
}
