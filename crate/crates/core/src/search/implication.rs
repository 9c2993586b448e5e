//! Empirical probing of implications between matrix-order and Loewner-matrix
//! conditions, and of the examples showing certain converses fail.
//!
//! A condition combines a randomized matrix test on a transform of `f` with
//! heuristic boundary estimates. A condition *holds* when the matrix test finds
//! no counterexample and every boundary requirement is corroborated, *fails*
//! when a counterexample is found or a boundary requirement is refuted, and is
//! *undecided* otherwise.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::definiteness::DEFAULT_TOL;
use crate::error::{Error, Result};
use crate::funcs::{FunctionDescriptor, Interval, Weight};
use crate::intervals::{assess, boundary_estimate, conjugate, BoundaryKind, GridSpec, Requirement, RequirementStatus, Trend};
use crate::matorder::{run_check, OrderCheckConfig};
use crate::property::{Property, PropertyRegistry};
use crate::rng;
use crate::witness::Witness;

use super::hunt::{hunt, HuntConfig};

/// Which function of `f` the matrix test is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transform {
    Identity,
    /// `t f(t)`
    TimesT,
    /// `t² f(t)`
    TimesT2,
    /// `f(t)/t`
    OverT,
    /// `t/f(t)`
    TOverF,
    /// `t²/f(t)`
    T2OverF,
    /// `(b-t)² f(t)` on `(a, b)`
    RightSquared,
    /// `(t-a)(b-t) f(t)` on `(a, b)`
    Bilateral,
    /// `(t-a)² f(t)` on `(a, b)`
    LeftSquared,
}

impl Transform {
    pub fn apply(self, f: &FunctionDescriptor) -> Result<FunctionDescriptor> {
        let d = f.domain();
        let finite = || {
            if d.is_bounded() {
                Ok(())
            } else {
                Err(Error::config(format!("{self:?} needs a function on a finite interval, got {d}")))
            }
        };
        Ok(match self {
            Transform::Identity => f.clone(),
            Transform::TimesT => f.clone().weighted_by(Weight::T),
            Transform::TimesT2 => f.clone().weighted_by(Weight::TSquared),
            Transform::OverT => f.clone().times(FunctionDescriptor::power(-1.0)),
            Transform::TOverF => f.clone().reciprocal().weighted_by(Weight::T),
            Transform::T2OverF => f.clone().reciprocal().weighted_by(Weight::TSquared),
            Transform::RightSquared => {
                finite()?;
                f.clone().weighted_by(Weight::RightSquared { b: d.hi })
            }
            Transform::Bilateral => {
                finite()?;
                f.clone().weighted_by(Weight::Bilateral { a: d.lo, b: d.hi })
            }
            Transform::LeftSquared => {
                finite()?;
                f.clone().weighted_by(Weight::LeftSquared { a: d.lo })
            }
        })
    }
}

/// Boundary expression, with finite endpoints taken from the function's domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryTemplate {
    LimsupFOverT,
    LiminfFOverT,
    LimsupFAtInfinity,
    LimsupFAtZero,
    LimsupTF,
    LiminfTF,
    LimsupT2F,
    LimsupFAtRight,
    LimsupRightWeighted,
    LiminfLeftWeighted,
    LimsupLeftSquared,
}

impl BoundaryTemplate {
    pub fn resolve(self, domain: &Interval) -> BoundaryKind {
        let (a, b) = (domain.lo, domain.hi);
        match self {
            BoundaryTemplate::LimsupFOverT => BoundaryKind::LimsupFOverT,
            BoundaryTemplate::LiminfFOverT => BoundaryKind::LiminfFOverT,
            BoundaryTemplate::LimsupFAtInfinity => BoundaryKind::LimsupFAtInfinity,
            BoundaryTemplate::LimsupFAtZero => BoundaryKind::LimsupFAtZero,
            BoundaryTemplate::LimsupTF => BoundaryKind::LimsupTF,
            BoundaryTemplate::LiminfTF => BoundaryKind::LiminfTF,
            BoundaryTemplate::LimsupT2F => BoundaryKind::LimsupT2F,
            BoundaryTemplate::LimsupFAtRight => BoundaryKind::LimsupFAtRight { b },
            BoundaryTemplate::LimsupRightWeighted => BoundaryKind::LimsupRightWeighted { b },
            BoundaryTemplate::LiminfLeftWeighted => BoundaryKind::LiminfLeftWeighted { a },
            BoundaryTemplate::LimsupLeftSquared => BoundaryKind::LimsupLeftSquared { a },
        }
    }
}

/// A named condition: a matrix test on a transform of `f` plus boundary requirements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub name: &'static str,
    pub description: &'static str,
    pub property: Property,
    pub transform: Transform,
    pub boundary: Vec<(BoundaryTemplate, Requirement)>,
}

fn cond(
    name: &'static str,
    description: &'static str,
    property: Property,
    transform: Transform,
    boundary: &[(BoundaryTemplate, Requirement)],
) -> Condition {
    Condition {
        name,
        description,
        property,
        transform,
        boundary: boundary.to_vec(),
    }
}

/// Every condition the catalog refers to, keyed by name.
pub fn conditions() -> BTreeMap<&'static str, Condition> {
    use BoundaryTemplate as B;
    use Property as P;
    use Requirement as R;
    use Transform as T;
    [
        cond("monotone", "f is n-monotone", P::Monotone, T::Identity, &[]),
        cond("concave", "f is n-concave", P::Concave, T::Identity, &[]),
        cond("convex", "f is n-convex", P::Convex, T::Identity, &[]),
        cond("convex0", "f is n-convex and f(0) <= 0", P::Convex, T::Identity, &[(B::LimsupFAtZero, R::NonPositive)]),
        cond("contraction", "f(X*AX) <= X* f(A) X for A >= 0, |X| <= 1", P::Contraction, T::Identity, &[]),
        cond("monotone-f/t", "f(t)/t is n-monotone", P::Monotone, T::OverT, &[]),
        cond("monotone-t/f", "t/f(t) is n-monotone", P::Monotone, T::TOverF, &[]),
        cond("monotone-t2/f", "t^2/f(t) is n-monotone", P::Monotone, T::T2OverF, &[]),
        cond("cpd", "L_f is c.p.d.", P::Cpd, T::Identity, &[]),
        cond("cnd", "L_f is c.n.d.", P::Cnd, T::Identity, &[]),
        cond("tf-cpd", "L_{tf} is c.p.d.", P::Cpd, T::TimesT, &[]),
        cond("tf-cnd", "L_{tf} is c.n.d.", P::Cnd, T::TimesT, &[]),
        cond(
            "cnd+bound",
            "liminf_{t->inf} f/t > -inf and L_f is c.n.d.",
            P::Cnd,
            T::Identity,
            &[(B::LiminfFOverT, R::FiniteBelow)],
        ),
        cond(
            "tf-cpd+bound",
            "limsup_{t->0} t f >= 0 and L_{tf} is c.p.d.",
            P::Cpd,
            T::TimesT,
            &[(B::LimsupTF, R::NonNegative)],
        ),
        cond(
            "cpd+bounds",
            "limsup_{t->inf} f/t < inf, limsup_{t->inf} f > -inf and L_f is c.p.d.",
            P::Cpd,
            T::Identity,
            &[(B::LimsupFOverT, R::FiniteAbove), (B::LimsupFAtInfinity, R::FiniteBelow)],
        ),
        cond(
            "tf-cnd+bounds",
            "liminf_{t->0} t f <= 0, limsup_{t->inf} f > -inf and L_{tf} is c.n.d.",
            P::Cnd,
            T::TimesT,
            &[(B::LiminfTF, R::NonPositive), (B::LimsupFAtInfinity, R::FiniteBelow)],
        ),
        cond(
            "t2f-cpd+bounds",
            "liminf_{t->0} t f <= 0, limsup_{t->0} t^2 f >= 0 and L_{t^2 f} is c.p.d.",
            P::Cpd,
            T::TimesT2,
            &[(B::LiminfTF, R::NonPositive), (B::LimsupT2F, R::NonNegative)],
        ),
        cond("interval-monotone", "f is n-monotone on (a, b)", P::Monotone, T::Identity, &[]),
        cond(
            "right2-cpd+bounds",
            "limsup_{t->b} (b-t) f < inf, limsup_{t->b} f > -inf and L_{(b-t)^2 f} is c.p.d.",
            P::Cpd,
            T::RightSquared,
            &[(B::LimsupRightWeighted, R::FiniteAbove), (B::LimsupFAtRight, R::FiniteBelow)],
        ),
        cond(
            "bilateral-cnd+bounds",
            "liminf_{t->a} (t-a) f <= 0, limsup_{t->b} f > -inf and L_{(t-a)(b-t) f} is c.n.d.",
            P::Cnd,
            T::Bilateral,
            &[(B::LiminfLeftWeighted, R::NonPositive), (B::LimsupFAtRight, R::FiniteBelow)],
        ),
        cond(
            "left2-cpd+bounds",
            "liminf_{t->a} (t-a) f <= 0, limsup_{t->a} (t-a)^2 f >= 0 and L_{(t-a)^2 f} is c.p.d.",
            P::Cpd,
            T::LeftSquared,
            &[(B::LiminfLeftWeighted, R::NonPositive), (B::LimsupLeftSquared, R::NonNegative)],
        ),
    ]
    .into_iter()
    .map(|c| (c.name, c))
    .collect()
}

/// Matrix order `mul * n + add`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderExpr {
    pub mul: usize,
    pub add: usize,
}

impl OrderExpr {
    pub const fn new(mul: usize, add: usize) -> Self {
        Self { mul, add }
    }

    pub fn at(self, n: usize) -> usize {
        self.mul * n + self.add
    }
}

impl fmt::Display for OrderExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.mul, self.add) {
            (0, a) => write!(f, "{a}"),
            (1, 0) => write!(f, "n"),
            (m, 0) => write!(f, "{m}n"),
            (1, a) => write!(f, "n+{a}"),
            (m, a) => write!(f, "{m}n+{a}"),
        }
    }
}

/// Side conditions an implication assumes of `f`; checked on sample grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Hypothesis {
    /// `f` extends continuously to `0`.
    ContinuousAtZero,
    /// `f(t) > 0` for `t > 0`.
    Positive,
    /// `f(0) = 0` and `f'(0) ≥ 0`.
    ZeroAtZero,
    /// `f(0) = 0` and `t f'(t) → 0` as `t → 0`.
    FlatAtZero,
}

impl Hypothesis {
    /// Grid-based check; `false` also when the grid leaves the domain.
    pub fn check(self, f: &FunctionDescriptor) -> bool {
        let tends_to_zero = |g: &dyn Fn(f64) -> Result<f64>| -> bool {
            let vals: Result<Vec<f64>> = (1..=12).map(|k| g(10f64.powi(-k))).collect();
            match vals {
                Ok(v) => v.last().is_some_and(|x| x.abs() <= 1e-4) && v.iter().all(|x| x.is_finite()),
                Err(_) => false,
            }
        };
        match self {
            Hypothesis::ContinuousAtZero => boundary_estimate(f, BoundaryKind::LimsupFAtZero, GridSpec::default())
                .is_ok_and(|e| matches!(e.trend, Trend::BoundedAbove { .. })),
            Hypothesis::Positive => (-6..=6).all(|k| f.eval(10f64.powi(k)).is_ok_and(|v| v > 0.0)),
            Hypothesis::ZeroAtZero => tends_to_zero(&|t| f.eval(t)) && f.deriv(1e-9).is_ok_and(|d| d >= 0.0),
            Hypothesis::FlatAtZero => tends_to_zero(&|t| f.eval(t)) && tends_to_zero(&|t| Ok(t * f.deriv(t)?)),
        }
    }
}

/// Whether the catalog entry asserts an implication or exhibits a failing converse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Claim {
    /// For every `f` meeting the hypotheses, antecedent at order `lhs(n)`
    /// implies consequent at order `rhs(n)`, for `n ≥ min_n`.
    Implies { min_n: usize },
    /// `function` satisfies the antecedent but not the consequent.
    Fails { function: FunctionDescriptor },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Implication {
    pub id: String,
    pub antecedent: String,
    pub lhs: OrderExpr,
    pub consequent: String,
    pub rhs: OrderExpr,
    pub hypotheses: Vec<Hypothesis>,
    /// Functions live on a finite interval rather than `(0, ∞)`.
    pub finite_interval: bool,
    pub claim: Claim,
}

fn on_finite_interval(name: &str) -> bool {
    ["interval-", "right2-", "bilateral-", "left2-"].iter().any(|p| name.starts_with(p))
}

fn arrow(ante: &'static str, lhs: OrderExpr, cons: &'static str, rhs: OrderExpr, hyp: &[Hypothesis], min_n: usize) -> Implication {
    Implication {
        id: format!("{ante}[{lhs}]=>{cons}[{rhs}]"),
        antecedent: ante.to_string(),
        lhs,
        consequent: cons.to_string(),
        rhs,
        hypotheses: hyp.to_vec(),
        finite_interval: on_finite_interval(ante) || on_finite_interval(cons),
        claim: Claim::Implies { min_n },
    }
}

fn counter(ante: &'static str, lhs: usize, cons: &'static str, rhs: usize, function: FunctionDescriptor) -> Implication {
    Implication {
        id: format!("{ante}[{lhs}]=/=>{cons}[{rhs}]"),
        antecedent: ante.to_string(),
        lhs: OrderExpr::new(0, lhs),
        consequent: cons.to_string(),
        rhs: OrderExpr::new(0, rhs),
        hypotheses: Vec::new(),
        finite_interval: function.domain().is_bounded(),
        claim: Claim::Fails { function },
    }
}

/// All implications and counterexample entries, keyed by id.
pub fn catalog() -> BTreeMap<String, Implication> {
    use Hypothesis::*;
    let n = OrderExpr::new(1, 0);
    let n1 = OrderExpr::new(1, 1);
    let n2 = OrderExpr::new(2, 0);
    let n21 = OrderExpr::new(2, 1);
    let n22 = OrderExpr::new(2, 2);
    let n41 = OrderExpr::new(4, 1);
    let fixed = OrderExpr::new;
    let unit = Interval { lo: 0.0, hi: 1.0 };
    let list = vec![
        arrow("convex0", n1, "contraction", n, &[ContinuousAtZero], 1),
        arrow("contraction", n, "monotone-f/t", n, &[ContinuousAtZero], 1),
        arrow("monotone-f/t", n, "contraction", n, &[ContinuousAtZero], 1),
        arrow("monotone-f/t", n2, "convex0", n, &[ContinuousAtZero], 1),
        arrow("monotone", n2, "concave", n, &[ContinuousAtZero], 1),
        arrow("concave", n, "monotone", n, &[ContinuousAtZero, Positive], 1),
        arrow("monotone", n2, "monotone-t/f", n, &[ContinuousAtZero, Positive], 1),
        arrow("monotone-t/f", n2, "concave", n, &[ContinuousAtZero, Positive], 1),
        arrow("concave", n1, "monotone-t/f", n, &[ContinuousAtZero, Positive], 1),
        arrow("monotone-f/t", n2, "monotone-t2/f", n, &[ContinuousAtZero, Positive], 1),
        arrow("monotone-t2/f", n2, "monotone-f/t", n, &[ContinuousAtZero, Positive], 1),
        arrow("cnd", n1, "monotone-t2/f", n, &[Positive, ZeroAtZero], 1),
        arrow("monotone-t2/f", n, "cnd", n, &[Positive, ZeroAtZero], 1),
        arrow("tf-cpd", n1, "monotone-f/t", n, &[FlatAtZero], 1),
        arrow("monotone-f/t", n, "tf-cpd", n, &[FlatAtZero], 1),
        arrow("convex", n21, "cnd+bound", n, &[], 1),
        arrow("cnd+bound", n41, "convex", n, &[], 1),
        arrow("convex", n1, "tf-cpd+bound", n, &[], 1),
        arrow("tf-cpd+bound", n21, "convex", n, &[], 1),
        arrow("cnd+bound", fixed(0, 2), "convex", fixed(0, 1), &[], 1),
        arrow("tf-cpd+bound", fixed(0, 2), "convex", fixed(0, 1), &[], 1),
        arrow("monotone", n, "cpd+bounds", n, &[], 2),
        arrow("cpd+bounds", n41, "monotone", n, &[], 1),
        arrow("monotone", n22, "tf-cnd+bounds", n, &[], 1),
        arrow("tf-cnd+bounds", n21, "monotone", n, &[], 1),
        arrow("monotone", n, "t2f-cpd+bounds", n, &[], 2),
        arrow("tf-cnd+bounds", n21, "t2f-cpd+bounds", n, &[], 1),
        arrow("t2f-cpd+bounds", n21, "tf-cnd+bounds", n, &[], 1),
        arrow("interval-monotone", n, "right2-cpd+bounds", n, &[], 2),
        arrow("right2-cpd+bounds", n41, "interval-monotone", n, &[], 1),
        arrow("interval-monotone", n22, "bilateral-cnd+bounds", n, &[], 1),
        arrow("bilateral-cnd+bounds", n21, "interval-monotone", n, &[], 1),
        arrow("interval-monotone", n, "left2-cpd+bounds", n, &[], 2),
        arrow("bilateral-cnd+bounds", n21, "left2-cpd+bounds", n, &[], 1),
        arrow("left2-cpd+bounds", n21, "bilateral-cnd+bounds", n, &[], 1),
        counter("convex", 1, "cnd+bound", 2, FunctionDescriptor::power(3.0)),
        counter("convex", 1, "tf-cpd+bound", 2, FunctionDescriptor::PiecewiseQuadLinear),
        counter("cnd+bound", 2, "convex", 2, FunctionDescriptor::power(-2.0)),
        counter("tf-cpd+bound", 2, "convex", 2, FunctionDescriptor::power(3.0)),
        counter("cpd", 5, "monotone", 2, FunctionDescriptor::power(3.0)),
        counter("convex", 2, "cnd", 2, FunctionDescriptor::moebius_convex(0.5).restricted(unit)),
        counter("cnd", 4, "convex", 1, FunctionDescriptor::moebius_convex(0.5).negated().restricted(unit)),
        counter("monotone", 2, "tf-cnd", 2, FunctionDescriptor::moebius_monotone(0.5).restricted(unit)),
        counter("tf-cnd", 2, "monotone", 1, FunctionDescriptor::moebius_monotone(0.5).negated().restricted(unit)),
    ];
    list.into_iter().map(|i| (i.id.clone(), i)).collect()
}

pub fn lookup(id: &str) -> Result<Implication> {
    catalog()
        .remove(id)
        .ok_or_else(|| Error::UnknownImplication(id.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Holds,
    Fails,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryOutcome {
    pub kind: BoundaryKind,
    pub requirement: Requirement,
    pub trend: Trend,
    pub status: RequirementStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionOutcome {
    pub condition: String,
    pub order: usize,
    pub status: Status,
    /// The randomized matrix test found no counterexample.
    pub matrix_holds: bool,
    pub witness: Option<Witness>,
    pub boundary: Vec<BoundaryOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// Values of `n` for implications; ignored by counterexample entries.
    pub sizes: Vec<usize>,
    pub trials: usize,
    /// Extra targeted-search evaluations when the random trials find nothing.
    pub hunt_budget: usize,
    pub seed: u64,
    pub tol: f64,
    /// Functions to test; `None` uses the default family for the setting.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Vec<FunctionDescriptor>>,
}

impl ProbeConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            sizes: vec![1],
            trials,
            hunt_budget: 0,
            seed,
            tol: DEFAULT_TOL,
            family: None,
        }
    }
}

/// `t^α` for `α ∈ {-2, -1.5, ..., 4}`, `-t^α` for the same grid, and the
/// kernels `t/(1-λt)`, `t²/(1-λt)` for `λ = ±0.5` carried to `(0, ∞)` by conjugation.
pub fn default_half_line_family() -> Vec<FunctionDescriptor> {
    let alphas: Vec<f64> = (0..=12).map(|k| -2.0 + 0.5 * k as f64).collect();
    let mut out: Vec<FunctionDescriptor> = alphas.iter().map(|&a| FunctionDescriptor::power(a)).collect();
    out.extend(alphas.iter().map(|&a| FunctionDescriptor::power(a).negated()));
    for lambda in [-0.5, 0.5] {
        for f in [FunctionDescriptor::moebius_monotone(lambda), FunctionDescriptor::moebius_convex(lambda)] {
            out.push(conjugate(&f).expect("kernels live on a finite interval"));
        }
    }
    out
}

/// `t^α` on `(0.1, 5)` for integer `α ∈ [-2, 4]` and half-integers in
/// between, plus `±t/(1-λt)` and `±t²/(1-λt)` on `(-1, 1)` for `λ = ±0.5`.
pub fn default_finite_family() -> Vec<FunctionDescriptor> {
    let j = Interval { lo: 0.1, hi: 5.0 };
    let mut out: Vec<FunctionDescriptor> = (0..=12)
        .map(|k| FunctionDescriptor::power(-2.0 + 0.5 * k as f64).restricted(j))
        .collect();
    for lambda in [-0.5, 0.5] {
        for f in [FunctionDescriptor::moebius_monotone(lambda), FunctionDescriptor::moebius_convex(lambda)] {
            out.push(f.clone());
            out.push(f.negated());
        }
    }
    out
}

/// Evaluates a named condition for `f` at matrix order `order`.
pub fn evaluate_condition(
    name: &str,
    f: &FunctionDescriptor,
    order: usize,
    cfg: &ProbeConfig,
    seed: u64,
    registry: &PropertyRegistry,
) -> Result<ConditionOutcome> {
    let c = conditions()
        .remove(name)
        .ok_or_else(|| Error::config(format!("unknown condition `{name}`")))?;
    let g = c.transform.apply(f)?;
    let check = registry.get(c.property.name())?;
    let report = run_check(check, &g, order, &OrderCheckConfig::new(cfg.trials, seed).with_tol(cfg.tol))?;
    let mut witness = report.witness;
    if witness.is_none() && cfg.hunt_budget > 0 && c.property != Property::Contraction {
        let mut h = HuntConfig::new(cfg.hunt_budget, rng::child_seed(seed, 1));
        h.tol = cfg.tol;
        witness = hunt(check, &g, order, &h)?.witness;
    }
    let domain = f.domain();
    let mut boundary = Vec::new();
    for &(template, requirement) in &c.boundary {
        let kind = template.resolve(&domain);
        let (trend, status) = match boundary_estimate(f, kind, GridSpec::default()) {
            Ok(e) => (e.trend, assess(&e, requirement, cfg.tol)),
            Err(_) => (Trend::Inconclusive, RequirementStatus::Unknown),
        };
        boundary.push(BoundaryOutcome {
            kind,
            requirement,
            trend,
            status,
        });
    }
    let matrix_holds = witness.is_none();
    let status = if !matrix_holds || boundary.iter().any(|b| b.status == RequirementStatus::Refuted) {
        Status::Fails
    } else if boundary.iter().all(|b| b.status == RequirementStatus::Corroborated) {
        Status::Holds
    } else {
        Status::Undecided
    };
    Ok(ConditionOutcome {
        condition: name.to_string(),
        order,
        status,
        matrix_holds,
        witness,
        boundary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub function: String,
    pub n: usize,
    pub hypotheses_met: bool,
    pub antecedent: Option<ConditionOutcome>,
    pub consequent: Option<ConditionOutcome>,
}

impl ProbeRow {
    /// Antecedent holds while the consequent fails.
    pub fn separates(&self) -> bool {
        self.antecedent.as_ref().is_some_and(|a| a.status == Status::Holds)
            && self.consequent.as_ref().is_some_and(|c| c.status == Status::Fails)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeOutcome {
    /// No sampled function satisfied the antecedent while failing the consequent.
    Consistent,
    /// Some sampled function separates the two conditions.
    Inconsistent,
    /// The counterexample entry's function separates the conditions, as claimed.
    Demonstrated,
    NotDemonstrated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub implication: Implication,
    pub config: ProbeConfig,
    pub rows: Vec<ProbeRow>,
    pub outcome: ProbeOutcome,
    /// Rows whose antecedent held, i.e. that actually tested the implication.
    pub tested: usize,
}

/// Evaluates an implication over a function family, or a counterexample entry on its function.
pub fn probe_implication(id: &str, cfg: &ProbeConfig, registry: &PropertyRegistry) -> Result<ProbeReport> {
    let imp = lookup(id)?;
    if cfg.trials == 0 {
        return Err(Error::config("trials must be at least 1"));
    }
    let mut jobs = Vec::new();
    match &imp.claim {
        Claim::Implies { min_n } => {
            let family = cfg.family.clone().unwrap_or_else(|| {
                if imp.finite_interval {
                    default_finite_family()
                } else {
                    default_half_line_family()
                }
            });
            let sizes: Vec<usize> = if imp.lhs.mul == 0 && imp.rhs.mul == 0 {
                vec![1]
            } else {
                cfg.sizes.iter().copied().filter(|n| n >= min_n && *n >= 1).collect()
            };
            if sizes.is_empty() {
                return Err(Error::config(format!("`{id}` needs n >= {min_n}")));
            }
            for &n in &sizes {
                for f in &family {
                    jobs.push((n, f.clone()));
                }
            }
        }
        Claim::Fails { function } => jobs.push((0, function.clone())),
    }
    let rows = jobs
        .par_iter()
        .enumerate()
        .map(|(k, (n, f))| probe_one(&imp, f, *n, cfg, rng::child_seed(cfg.seed, k as u64), registry))
        .collect::<Result<Vec<_>>>()?;
    let separated = rows.iter().any(ProbeRow::separates);
    let outcome = match imp.claim {
        Claim::Implies { .. } if separated => ProbeOutcome::Inconsistent,
        Claim::Implies { .. } => ProbeOutcome::Consistent,
        Claim::Fails { .. } if separated => ProbeOutcome::Demonstrated,
        Claim::Fails { .. } => ProbeOutcome::NotDemonstrated,
    };
    let tested = rows
        .iter()
        .filter(|r| r.antecedent.as_ref().is_some_and(|a| a.status == Status::Holds))
        .count();
    Ok(ProbeReport {
        implication: imp,
        config: cfg.clone(),
        rows,
        outcome,
        tested,
    })
}

fn probe_one(
    imp: &Implication,
    f: &FunctionDescriptor,
    n: usize,
    cfg: &ProbeConfig,
    seed: u64,
    registry: &PropertyRegistry,
) -> Result<ProbeRow> {
    let mut row = ProbeRow {
        function: f.label(),
        n,
        hypotheses_met: imp.hypotheses.iter().all(|h| h.check(f)),
        antecedent: None,
        consequent: None,
    };
    if !row.hypotheses_met {
        return Ok(row);
    }
    let ante = evaluate_condition(&imp.antecedent, f, imp.lhs.at(n), cfg, rng::child_seed(seed, 0), registry)?;
    let go_on = ante.status == Status::Holds;
    row.antecedent = Some(ante);
    if go_on {
        row.consequent = Some(evaluate_condition(
            &imp.consequent,
            f,
            imp.rhs.at(n),
            cfg,
            rng::child_seed(seed, 1),
            registry,
        )?);
    }
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_ids_resolve() {
        let cat = catalog();
        let names = conditions();
        for imp in cat.values() {
            assert!(names.contains_key(imp.antecedent.as_str()), "{}", imp.id);
            assert!(names.contains_key(imp.consequent.as_str()), "{}", imp.id);
        }
        assert!(cat.contains_key("convex[2n+1]=>cnd+bound[n]"));
        assert!(cat.contains_key("cpd+bounds[4n+1]=>monotone[n]"));
        assert!(cat.contains_key("cnd+bound[2]=/=>convex[2]"));
        assert!(matches!(lookup("nope"), Err(Error::UnknownImplication(_))));
    }

    #[test]
    fn order_expressions() {
        assert_eq!(OrderExpr::new(4, 1).to_string(), "4n+1");
        assert_eq!(OrderExpr::new(4, 1).at(2), 9);
        assert_eq!(OrderExpr::new(0, 2).to_string(), "2");
        assert_eq!(OrderExpr::new(1, 0).to_string(), "n");
    }

    #[test]
    fn hypotheses_on_powers() {
        let f = FunctionDescriptor::power;
        assert!(Hypothesis::ContinuousAtZero.check(&f(0.5)));
        assert!(!Hypothesis::ContinuousAtZero.check(&f(-1.0)));
        assert!(Hypothesis::Positive.check(&f(-1.0)));
        assert!(!Hypothesis::Positive.check(&f(1.0).negated()));
        assert!(Hypothesis::ZeroAtZero.check(&f(1.5)));
        assert!(!Hypothesis::ZeroAtZero.check(&f(0.0)));
        assert!(Hypothesis::FlatAtZero.check(&f(2.0)));
    }

    #[test]
    fn transforms_need_the_right_setting() {
        assert!(Transform::RightSquared.apply(&FunctionDescriptor::power(1.0)).is_err());
        let g = Transform::OverT.apply(&FunctionDescriptor::power(2.0)).unwrap();
        assert!((g.eval(3.0).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn converse_failures_are_demonstrated() {
        let reg = PropertyRegistry::with_defaults();
        let mut cfg = ProbeConfig::new(500, 7);
        cfg.hunt_budget = 1000;
        for id in ["convex[1]=/=>cnd+bound[2]", "cnd+bound[2]=/=>convex[2]", "convex[1]=/=>tf-cpd+bound[2]"] {
            let r = probe_implication(id, &cfg, &reg).unwrap();
            assert_eq!(r.outcome, ProbeOutcome::Demonstrated, "{id}: {:#?}", r.rows);
        }
    }

    #[test]
    fn convex_to_cnd_is_consistent_on_powers() {
        let reg = PropertyRegistry::with_defaults();
        let r = probe_implication("convex[2n+1]=>cnd+bound[n]", &ProbeConfig::new(200, 3), &reg).unwrap();
        assert_eq!(r.outcome, ProbeOutcome::Consistent);
        assert!(r.tested > 0);
    }
}
