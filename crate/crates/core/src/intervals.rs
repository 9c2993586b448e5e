//! Möbius conjugation `ψ(t) = (t-a)/(b-t)` between a finite interval `(a, b)`
//! and `(0, ∞)`, the divided-difference identities it induces, and heuristic
//! estimates of boundary behaviour.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::definiteness::{is_psd, DefinitenessVerdict};
use crate::divdiff::{fdd, ConfluencePolicy};
use crate::error::{Error, Result};
use crate::funcs::{ConjugationDirection, FunctionDescriptor, Interval, Weight};
use crate::loewner::identities::IdentityCheck;
use crate::loewner::loewner_entries;

/// The map `ψ: (a, b) → (0, ∞)` with inverse `ψ⁻¹(x) = (bx + a)/(x + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMap", into = "RawMap")]
pub struct ConjugationMap {
    a: f64,
    b: f64,
}

#[derive(Serialize, Deserialize)]
struct RawMap {
    a: f64,
    b: f64,
}

impl TryFrom<RawMap> for ConjugationMap {
    type Error = Error;

    fn try_from(r: RawMap) -> Result<Self> {
        ConjugationMap::new(r.a, r.b)
    }
}

impl From<ConjugationMap> for RawMap {
    fn from(m: ConjugationMap) -> Self {
        RawMap { a: m.a, b: m.b }
    }
}

impl ConjugationMap {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::config(format!("conjugation needs finite a < b, got ({a}, {b})")));
        }
        Ok(Self { a, b })
    }

    pub fn for_interval(j: &Interval) -> Result<Self> {
        Self::new(j.lo, j.hi)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn interval(&self) -> Interval {
        Interval { lo: self.a, hi: self.b }
    }

    pub fn psi(&self, t: f64) -> Result<f64> {
        if !self.interval().contains(t) {
            return Err(Error::Domain {
                t,
                domain: self.interval(),
                reason: "psi is defined on the open interval (a, b)",
            });
        }
        Ok(self.psi_unchecked(t))
    }

    pub fn psi_inv(&self, x: f64) -> Result<f64> {
        if !Interval::positive().contains(x) {
            return Err(Error::Domain {
                t: x,
                domain: Interval::positive(),
                reason: "psi inverse is defined on (0, inf)",
            });
        }
        Ok(self.psi_inv_unchecked(x))
    }

    pub fn psi_unchecked(&self, t: f64) -> f64 {
        (t - self.a) / (self.b - t)
    }

    pub fn psi_inv_unchecked(&self, x: f64) -> f64 {
        (self.b * x + self.a) / (x + 1.0)
    }

    pub fn psi_deriv(&self, t: f64) -> f64 {
        let d = self.b - t;
        (self.b - self.a) / (d * d)
    }

    pub fn psi_inv_deriv(&self, x: f64) -> f64 {
        let d = x + 1.0;
        (self.b - self.a) / (d * d)
    }
}

/// `f̃ = f ∘ ψ⁻¹` on `(0, ∞)` for `f` on a finite interval `(a, b)`.
pub fn conjugate(f: &FunctionDescriptor) -> Result<FunctionDescriptor> {
    let domain = f.domain();
    if !domain.is_bounded() {
        return Err(Error::config(format!(
            "conjugation needs a finite interval, {} lives on {domain}",
            f.label()
        )));
    }
    Ok(FunctionDescriptor::Conjugated {
        inner: Box::new(f.clone()),
        map: ConjugationMap::for_interval(&domain)?,
        direction: ConjugationDirection::ToHalfLine,
    })
}

/// `g ∘ ψ` on `(a, b)` for `g` defined on `(0, ∞)`.
pub fn deconjugate(g: &FunctionDescriptor, map: ConjugationMap) -> Result<FunctionDescriptor> {
    if !g.domain().contains_interval(&Interval::positive()) {
        return Err(Error::config(format!("{} is not defined on all of (0, inf)", g.label())));
    }
    Ok(FunctionDescriptor::Conjugated {
        inner: Box::new(g.clone()),
        map,
        direction: ConjugationDirection::FromHalfLine,
    })
}

/// Which weighted divided difference on `(a, b)` a conjugated one corresponds to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransferKind {
    /// `f̃^[1]` against `((b-t)² f)^[1]`.
    RightSquared,
    /// `(x f̃)^[1]` against `((t-a)(b-t) f)^[1]`.
    Bilateral,
    /// `(x² f̃)^[1]` against `((t-a)² f)^[1]`.
    LeftSquared,
}

impl TransferKind {
    pub const ALL: [TransferKind; 3] = [TransferKind::RightSquared, TransferKind::Bilateral, TransferKind::LeftSquared];
}

impl FromStr for TransferKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "right2" | "right-squared" => Ok(TransferKind::RightSquared),
            "bilateral" => Ok(TransferKind::Bilateral),
            "left2" | "left-squared" => Ok(TransferKind::LeftSquared),
            other => Err(Error::config(format!("unknown transfer kind `{other}` (right2, bilateral, left2)"))),
        }
    }
}

/// Checks, at `x_i = ψ(t_i)`, one of
///
/// - `f̃^[1](x_i,x_j) = {((b-t)²f)^[1](t_i,t_j) + (b-t_i)f(t_i) + (b-t_j)f(t_j)} / (b-a)`
/// - `(x f̃)^[1](x_i,x_j) = {((t-a)(b-t)f)^[1](t_i,t_j) + (t_i-a)f(t_i) + (t_j-a)f(t_j)} / (b-a)`
/// - `(x² f̃)^[1](x_i,x_j) = {((t-a)²f)^[1](t_i,t_j) + (t_i-a)²f(t_i)/(b-t_i) + (t_j-a)²f(t_j)/(b-t_j)} / (b-a)`
///
/// The left side is computed from the conjugated descriptor in `x`
/// coordinates, the right side from weighted descriptors in `t` coordinates.
pub fn verify_conjugation_dd(
    f: &FunctionDescriptor,
    map: ConjugationMap,
    kind: TransferKind,
    ti: f64,
    tj: f64,
) -> Result<IdentityCheck> {
    let p = ConfluencePolicy::default();
    let (a, b) = (map.a, map.b);
    let (xi, xj) = (map.psi(ti)?, map.psi(tj)?);
    let tilde = FunctionDescriptor::Conjugated {
        inner: Box::new(f.clone()),
        map,
        direction: ConjugationDirection::ToHalfLine,
    };
    let (fi, fj) = (f.eval(ti)?, f.eval(tj)?);
    let (lhs_fn, weight, ei, ej) = match kind {
        TransferKind::RightSquared => (tilde, Weight::RightSquared { b }, (b - ti) * fi, (b - tj) * fj),
        TransferKind::Bilateral => (
            tilde.weighted_by(Weight::T),
            Weight::Bilateral { a, b },
            (ti - a) * fi,
            (tj - a) * fj,
        ),
        TransferKind::LeftSquared => (
            tilde.weighted_by(Weight::TSquared),
            Weight::LeftSquared { a },
            (ti - a) * (ti - a) / (b - ti) * fi,
            (tj - a) * (tj - a) / (b - tj) * fj,
        ),
    };
    let lhs = fdd(&lhs_fn, xi, xj, p)?;
    let core = fdd(&f.clone().weighted_by(weight), ti, tj, p)?;
    let rhs = (core + ei + ej) / (b - a);
    let scale = core.abs().max(ei.abs()).max(ej.abs()) / (b - a);
    Ok(IdentityCheck::new(lhs, rhs, scale))
}

/// PSD verdicts of `L_f(t)` and `L_f̃(ψ(t))`, which must agree because
/// `L_f̃(ψ(t)) = D L_f(t) D / (b-a)` with `D = diag(b - t_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferComparison {
    pub points: Vec<f64>,
    pub mapped: Vec<f64>,
    pub direct: DefinitenessVerdict,
    pub conjugated: DefinitenessVerdict,
    pub agree: bool,
}

pub fn transfer_psd(f: &FunctionDescriptor, map: ConjugationMap, points: &[f64], tol: f64) -> Result<TransferComparison> {
    let p = ConfluencePolicy::default();
    let mapped = points.iter().map(|&t| map.psi(t)).collect::<Result<Vec<_>>>()?;
    let tilde = FunctionDescriptor::Conjugated {
        inner: Box::new(f.clone()),
        map,
        direction: ConjugationDirection::ToHalfLine,
    };
    let direct = is_psd(&loewner_entries(f, points, p)?, tol)?;
    let conjugated = is_psd(&loewner_entries(&tilde, &mapped, p)?, tol)?;
    Ok(TransferComparison {
        points: points.to_vec(),
        agree: direct.holds == conjugated.holds,
        mapped,
        direct,
        conjugated,
    })
}

/// The four boundary correspondences under `x = ψ(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitKind {
    /// `f̃(x)/x` as `x → ∞` against `(b-t)f(t)/(b-a)` as `t → b`.
    FOverXAtInfinity,
    /// `f̃(x)` as `x → ∞` against `f(t)` as `t → b`.
    FAtInfinity,
    /// `x f̃(x)` as `x → 0` against `(t-a)f(t)/(b-a)` as `t → a`.
    XFAtZero,
    /// `x² f̃(x)` as `x → 0` against `(t-a)²f(t)/(b-a)²` as `t → a`.
    X2FAtZero,
}

impl LimitKind {
    pub const ALL: [LimitKind; 4] = [
        LimitKind::FOverXAtInfinity,
        LimitKind::FAtInfinity,
        LimitKind::XFAtZero,
        LimitKind::X2FAtZero,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub t: f64,
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / max(1, |lhs|, |rhs|)`.
    pub discrepancy: f64,
}

/// Both sides of a boundary correspondence along a geometric grid approaching the boundary.
///
/// The two expressions share their limits but are not equal pointwise: their
/// ratio is `(b-a)/(t-a)`, `(b-a)/(b-t)` or its square. The discrepancy
/// therefore shrinks in proportion to the distance from the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitGrid {
    pub kind: LimitKind,
    pub rows: Vec<LimitRow>,
}

pub fn limit_identity_grid(f: &FunctionDescriptor, map: ConjugationMap, kind: LimitKind, grid: GridSpec) -> Result<LimitGrid> {
    let (a, b) = (map.a, map.b);
    let w = b - a;
    let tilde = conjugate(&f.clone().restricted(map.interval()))?;
    let mut rows = Vec::with_capacity(grid.points);
    for k in 0..grid.points {
        let d = w * grid.ratio.powi(-(k as i32 + 1));
        let t = match kind {
            LimitKind::FOverXAtInfinity | LimitKind::FAtInfinity => b - d,
            LimitKind::XFAtZero | LimitKind::X2FAtZero => a + d,
        };
        let x = map.psi(t)?;
        let ft = f.eval(t)?;
        let fx = tilde.eval(x)?;
        let (lhs, rhs) = match kind {
            LimitKind::FOverXAtInfinity => (fx / x, (b - t) * ft / w),
            LimitKind::FAtInfinity => (fx, ft),
            LimitKind::XFAtZero => (x * fx, (t - a) * ft / w),
            LimitKind::X2FAtZero => (x * x * fx, (t - a) * (t - a) * ft / (w * w)),
        };
        rows.push(LimitRow {
            t,
            x,
            lhs,
            rhs,
            discrepancy: (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0),
        });
    }
    Ok(LimitGrid { kind, rows })
}

/// Geometric grid toward a boundary: `points` values whose distance to the
/// boundary (or magnitude, toward ∞) changes by `ratio` per step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub ratio: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { ratio: 10.0, points: 12 }
    }
}

/// Weighted expression whose boundary behaviour a condition constrains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundaryKind {
    /// `limsup f(t)/t` as `t → ∞`.
    LimsupFOverT,
    /// `liminf f(t)/t` as `t → ∞`.
    LiminfFOverT,
    /// `limsup f(t)` as `t → ∞`.
    LimsupFAtInfinity,
    /// `limsup f(t)` as `t → 0`.
    LimsupFAtZero,
    /// `limsup t f(t)` as `t → 0`.
    LimsupTF,
    /// `liminf t f(t)` as `t → 0`.
    LiminfTF,
    /// `limsup t² f(t)` as `t → 0`.
    LimsupT2F,
    /// `limsup f(t)` as `t → b`.
    LimsupFAtRight { b: f64 },
    /// `limsup (b-t) f(t)` as `t → b`.
    LimsupRightWeighted { b: f64 },
    /// `liminf (t-a) f(t)` as `t → a`.
    LiminfLeftWeighted { a: f64 },
    /// `limsup (t-a)² f(t)` as `t → a`.
    LimsupLeftSquared { a: f64 },
}

impl BoundaryKind {
    fn is_sup(&self) -> bool {
        !matches!(
            self,
            BoundaryKind::LiminfFOverT | BoundaryKind::LiminfTF | BoundaryKind::LiminfLeftWeighted { .. }
        )
    }

    /// Grid point `k` (0-based), moving toward the boundary; `scale` is the
    /// distance of the first point for finite boundaries.
    fn grid_point(&self, k: usize, g: &GridSpec, scale: f64) -> f64 {
        let step = g.ratio.powi(k as i32 + 1);
        match *self {
            BoundaryKind::LimsupFOverT | BoundaryKind::LiminfFOverT | BoundaryKind::LimsupFAtInfinity => step,
            BoundaryKind::LimsupFAtZero | BoundaryKind::LimsupTF | BoundaryKind::LiminfTF | BoundaryKind::LimsupT2F => {
                1.0 / step
            }
            BoundaryKind::LimsupFAtRight { b } | BoundaryKind::LimsupRightWeighted { b } => b - scale / step,
            BoundaryKind::LiminfLeftWeighted { a } | BoundaryKind::LimsupLeftSquared { a } => a + scale / step,
        }
    }

    fn weighted_value(&self, f: &FunctionDescriptor, t: f64) -> Result<f64> {
        let v = f.eval(t)?;
        Ok(match *self {
            BoundaryKind::LimsupFOverT | BoundaryKind::LiminfFOverT => v / t,
            BoundaryKind::LimsupFAtInfinity | BoundaryKind::LimsupFAtZero | BoundaryKind::LimsupFAtRight { .. } => v,
            BoundaryKind::LimsupTF | BoundaryKind::LiminfTF => t * v,
            BoundaryKind::LimsupT2F => t * t * v,
            BoundaryKind::LimsupRightWeighted { b } => (b - t) * v,
            BoundaryKind::LiminfLeftWeighted { a } => (t - a) * v,
            BoundaryKind::LimsupLeftSquared { a } => (t - a) * (t - a) * v,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "trend", rename_all = "kebab-case")]
pub enum Trend {
    /// Not diverging; for a `limsup` kind this bounds the expression from above.
    BoundedAbove { limit: f64 },
    /// Not diverging; for a `liminf` kind this bounds the expression from below.
    BoundedBelow { limit: f64 },
    /// Successive magnitudes grow by more than the divergence ratio.
    Diverging { sign: f64 },
    Inconclusive,
}

/// Successive-magnitude ratio above which values are called diverging.
pub const DIVERGENCE_RATIO: f64 = 1.5;
/// Relative change below which values are called settled.
pub const SETTLED_VARIATION: f64 = 1e-3;

/// Sampled boundary behaviour. Always heuristic: finitely many samples never decide a limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEstimate {
    pub kind: BoundaryKind,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub trend: Trend,
    pub heuristic: bool,
}

/// Looks at the last three values: magnitudes growing by more than
/// [`DIVERGENCE_RATIO`] each step mean divergence, shrinking by the same
/// factor mean a zero limit, and a relative change below
/// [`SETTLED_VARIATION`] means the last value is taken as the limit.
pub fn classify(kind: &BoundaryKind, values: &[f64]) -> Trend {
    let n = values.len();
    if n < 3 || values.iter().any(|v| !v.is_finite()) {
        return match values.last() {
            Some(v) if v.is_infinite() => Trend::Diverging { sign: v.signum() },
            _ => Trend::Inconclusive,
        };
    }
    let [v1, v2, v3] = [values[n - 3], values[n - 2], values[n - 1]];
    let (m1, m2, m3) = (v1.abs(), v2.abs(), v3.abs());
    let same_sign = v1.signum() == v2.signum() && v2.signum() == v3.signum();
    let settled = |limit: f64| {
        if kind.is_sup() {
            Trend::BoundedAbove { limit }
        } else {
            Trend::BoundedBelow { limit }
        }
    };
    if same_sign && m2 > DIVERGENCE_RATIO * m1 && m3 > DIVERGENCE_RATIO * m2 {
        Trend::Diverging { sign: v3.signum() }
    } else if m2 * DIVERGENCE_RATIO < m1 && m3 * DIVERGENCE_RATIO < m2 {
        settled(0.0)
    } else if (v3 - v2).abs() <= SETTLED_VARIATION * m3.max(1.0) {
        settled(v3)
    } else {
        Trend::Inconclusive
    }
}

pub fn boundary_estimate(f: &FunctionDescriptor, kind: BoundaryKind, grid: GridSpec) -> Result<BoundaryEstimate> {
    if grid.points < 3 || grid.ratio.is_nan() || grid.ratio <= 1.0 {
        return Err(Error::config("boundary grids need at least 3 points and ratio > 1"));
    }
    let domain = f.domain();
    let scale = match kind {
        BoundaryKind::LimsupFAtRight { b } | BoundaryKind::LimsupRightWeighted { b } => (b - domain.lo).min(1.0),
        BoundaryKind::LiminfLeftWeighted { a } | BoundaryKind::LimsupLeftSquared { a } => (domain.hi - a).min(1.0),
        _ => 1.0,
    };
    let mut ts = Vec::with_capacity(grid.points);
    let mut values = Vec::with_capacity(grid.points);
    for k in 0..grid.points {
        let t = kind.grid_point(k, &grid, scale);
        values.push(kind.weighted_value(f, t)?);
        ts.push(t);
    }
    Ok(BoundaryEstimate {
        trend: classify(&kind, &values),
        kind,
        grid: ts,
        values,
        heuristic: true,
    })
}

/// Inequality a boundary condition imposes on the limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Requirement {
    /// `< +∞`
    FiniteAbove,
    /// `> -∞`
    FiniteBelow,
    /// `≤ 0`
    NonPositive,
    /// `≥ 0`
    NonNegative,
}

impl fmt::Display for Requirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Requirement::FiniteAbove => "< +inf",
            Requirement::FiniteBelow => "> -inf",
            Requirement::NonPositive => "<= 0",
            Requirement::NonNegative => ">= 0",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RequirementStatus {
    Corroborated,
    Refuted,
    Unknown,
}

/// Compares an estimate with a requirement. `tol` is the slack allowed on the
/// sign conditions for a settled limit.
pub fn assess(estimate: &BoundaryEstimate, req: Requirement, tol: f64) -> RequirementStatus {
    use RequirementStatus::*;
    match (estimate.trend, req) {
        (Trend::Inconclusive, _) => Unknown,
        (Trend::Diverging { sign }, Requirement::FiniteAbove) => if sign > 0.0 { Refuted } else { Corroborated },
        (Trend::Diverging { sign }, Requirement::FiniteBelow) => if sign < 0.0 { Refuted } else { Corroborated },
        (Trend::Diverging { sign }, Requirement::NonPositive) => if sign < 0.0 { Corroborated } else { Refuted },
        (Trend::Diverging { sign }, Requirement::NonNegative) => if sign > 0.0 { Corroborated } else { Refuted },
        (Trend::BoundedAbove { .. } | Trend::BoundedBelow { .. }, Requirement::FiniteAbove | Requirement::FiniteBelow) => {
            Corroborated
        }
        (Trend::BoundedAbove { limit } | Trend::BoundedBelow { limit }, Requirement::NonPositive) => {
            if limit <= tol { Corroborated } else { Refuted }
        }
        (Trend::BoundedAbove { limit } | Trend::BoundedBelow { limit }, Requirement::NonNegative) => {
            if limit >= -tol { Corroborated } else { Refuted }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcs::FunctionDescriptor as F;

    fn unit() -> ConjugationMap {
        ConjugationMap::new(-1.0, 1.0).unwrap()
    }

    #[test]
    fn psi_examples() {
        assert_eq!(unit().psi(0.0).unwrap(), 1.0);
        assert_eq!(ConjugationMap::new(0.0, 1.0).unwrap().psi(0.5).unwrap(), 1.0);
        assert_eq!(ConjugationMap::new(0.0, 2.0).unwrap().psi_inv(1.0).unwrap(), 1.0);
        assert!(unit().psi(1.0).is_err());
        assert!(unit().psi_inv(0.0).is_err());
        assert!(ConjugationMap::new(1.0, 1.0).is_err());
        assert!(serde_json::from_str::<ConjugationMap>(r#"{"a":2,"b":1}"#).is_err());
    }

    #[test]
    fn psi_round_trip() {
        let m = ConjugationMap::new(0.1, 5.0).unwrap();
        for k in 1..100 {
            let t = 0.1 + 4.9 * k as f64 / 100.0;
            let back = m.psi_inv(m.psi(t).unwrap()).unwrap();
            assert!((back - t).abs() <= 1e-12 * t.abs());
        }
    }

    #[test]
    fn conjugate_examples() {
        let one = F::constant(1.0).restricted(Interval::new(0.0, 1.0).unwrap());
        let c = conjugate(&one).unwrap();
        assert_eq!(c.domain(), Interval::positive());
        assert_eq!(c.eval(123.0).unwrap(), 1.0);
        let id = F::affine(0.0, 1.0).restricted(Interval::new(0.0, 1.0).unwrap());
        assert_eq!(conjugate(&id).unwrap().eval(1.0).unwrap(), 0.5);
        assert_eq!(conjugate(&F::moebius_monotone(0.5)).unwrap().eval(1.0).unwrap(), 0.0);
        assert!(matches!(conjugate(&F::power(0.5)), Err(Error::Config(_))));
    }

    #[test]
    fn conjugation_round_trip() {
        let f = F::moebius_convex(0.4);
        let m = unit();
        let back = deconjugate(&conjugate(&f).unwrap(), m).unwrap();
        for k in 1..50 {
            let t = -1.0 + 2.0 * k as f64 / 50.0;
            let (x, y) = (f.eval(t).unwrap(), back.eval(t).unwrap());
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn conjugated_derivative_is_chain_rule() {
        let c = conjugate(&F::moebius_monotone(0.3)).unwrap();
        for x in [0.01, 0.5, 1.0, 7.0, 300.0] {
            let h = 1e-6 * x;
            let numeric = (c.eval(x + h).unwrap() - c.eval(x - h).unwrap()) / (2.0 * h);
            let d = c.deriv(x).unwrap();
            assert!((d - numeric).abs() <= 1e-6 * d.abs().max(1.0));
        }
    }

    #[test]
    fn transfer_identities() {
        let m = ConjugationMap::new(0.1, 5.0).unwrap();
        let f = F::power(0.5).restricted(m.interval());
        for kind in TransferKind::ALL {
            for (ti, tj) in [(0.2, 4.5), (1.0, 1.3), (2.0, 2.0), (4.99, 0.11)] {
                let c = verify_conjugation_dd(&f, m, kind, ti, tj).unwrap();
                assert!(c.holds(1e-9), "{kind:?} ({ti},{tj}): {c:?}");
            }
        }
        let constant = F::constant(2.5);
        let c = verify_conjugation_dd(&constant, unit(), TransferKind::Bilateral, -0.3, 0.6).unwrap();
        assert!(c.residual <= 1e-15 * c.scale);
    }

    #[test]
    fn limit_grids_tighten_toward_boundary() {
        let m = ConjugationMap::new(0.1, 5.0).unwrap();
        for alpha in [0.5, 1.5] {
            for kind in LimitKind::ALL {
                let g = limit_identity_grid(&F::power(alpha), m, kind, GridSpec::default()).unwrap();
                let d: Vec<f64> = g.rows.iter().map(|r| r.discrepancy).collect();
                assert!(d.windows(2).all(|w| w[1] <= w[0] * 1.0001 + 1e-15), "{kind:?}: {d:?}");
                assert!(*d.last().unwrap() <= 1e-9, "{kind:?}: {d:?}");
            }
        }
    }

    #[test]
    fn boundary_examples() {
        let e = boundary_estimate(&F::power(0.5), BoundaryKind::LimsupFOverT, GridSpec::default()).unwrap();
        assert_eq!(e.trend, Trend::BoundedAbove { limit: 0.0 });
        assert!(e.heuristic);
        assert_eq!(assess(&e, Requirement::FiniteAbove, 1e-9), RequirementStatus::Corroborated);

        let e = boundary_estimate(&F::power(3.0), BoundaryKind::LimsupFOverT, GridSpec::default()).unwrap();
        assert_eq!(e.trend, Trend::Diverging { sign: 1.0 });
        assert_eq!(assess(&e, Requirement::FiniteAbove, 1e-9), RequirementStatus::Refuted);

        let e = boundary_estimate(&F::power(-1.0), BoundaryKind::LiminfTF, GridSpec::default()).unwrap();
        assert!(e.values.iter().all(|v| (v - 1.0).abs() < 1e-15));
        assert_eq!(e.trend, Trend::BoundedBelow { limit: 1.0 });
        assert_eq!(assess(&e, Requirement::NonPositive, 1e-9), RequirementStatus::Refuted);

        // (b - t) f(t) for f = t/(1 - t) on (-1, 1): tends to 1
        let e = boundary_estimate(&F::moebius_monotone(1.0), BoundaryKind::LimsupRightWeighted { b: 1.0 }, GridSpec::default())
            .unwrap();
        assert!(matches!(e.trend, Trend::BoundedAbove { limit } if (limit - 1.0).abs() < 1e-9));
    }

    #[test]
    fn slow_growth_is_inconclusive() {
        let e = boundary_estimate(&F::power(1.05), BoundaryKind::LimsupFOverT, GridSpec::default()).unwrap();
        assert_eq!(e.trend, Trend::Inconclusive);
        assert_eq!(assess(&e, Requirement::FiniteAbove, 1e-9), RequirementStatus::Unknown);
    }
}
