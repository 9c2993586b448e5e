//! Pointwise algebraic identities between divided differences of related
//! functions. Each check evaluates both sides independently through the
//! descriptor machinery and reports the residual.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::divdiff::{fdd, ConfluencePolicy};
use crate::error::{Error, Result};
use crate::funcs::{FunctionDescriptor, Interval, Weight};
use crate::intervals::{verify_conjugation_dd, ConjugationMap, TransferKind};
use crate::rng;

/// Both sides of one identity evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// Magnitude the residual is measured against (at least 1).
    pub scale: f64,
}

impl IdentityCheck {
    /// `scale` should be the largest magnitude among the summands, so that
    /// cancellation between large terms is not mistaken for a failure.
    pub fn new(lhs: f64, rhs: f64, scale: f64) -> Self {
        Self {
            lhs,
            rhs,
            residual: (lhs - rhs).abs(),
            scale: scale.abs().max(lhs.abs()).max(rhs.abs()).max(1.0),
        }
    }

    pub fn relative(&self) -> f64 {
        self.residual / self.scale
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.relative() <= tol
    }
}

/// `f^[1](s,t) - f(s)/s - f(t)/t = -(f(s)/s) (t²/f)^[1](s,t) (f(t)/t)` for `f ≠ 0` on `(0, ∞)`.
///
/// This is the entrywise form of the border compression of `L_f(t_1,...,t_n, ε)`
/// as `ε → 0`.
pub fn border(f: &FunctionDescriptor, s: f64, t: f64) -> Result<IdentityCheck> {
    let p = ConfluencePolicy::default();
    let (fs, ft) = (f.eval(s)? / s, f.eval(t)? / t);
    let g = f.clone().reciprocal().weighted_by(Weight::TSquared);
    let d = fdd(f, s, t, p)?;
    let lhs = d - fs - ft;
    let rhs = -fs * fdd(&g, s, t, p)? * ft;
    Ok(IdentityCheck::new(lhs, rhs, d.abs().max(fs.abs()).max(ft.abs())))
}

/// `g^[1](s,t) - g(s)/s - g(t)/t = s (g/t²)^[1](s,t) t` for `g = t f`.
pub fn border_weighted(f: &FunctionDescriptor, s: f64, t: f64) -> Result<IdentityCheck> {
    let p = ConfluencePolicy::default();
    let g = f.clone().weighted_by(Weight::T);
    let (gs, gt) = (g.eval(s)? / s, g.eval(t)? / t);
    let d = fdd(&g, s, t, p)?;
    let lhs = d - gs - gt;
    let inner = fdd(&g.clone().times(FunctionDescriptor::power(-2.0)), s, t, p)?;
    let rhs = s * inner * t;
    Ok(IdentityCheck::new(lhs, rhs, d.abs().max(gs.abs()).max(gt.abs())))
}

/// `f_ε = f(· + ε) - f(ε) - γ t` satisfies `f_ε^[1](s,t) = f^[1](s+ε, t+ε) - γ`.
pub fn shift(f: &FunctionDescriptor, eps: f64, gamma: f64, s: f64, t: f64) -> Result<IdentityCheck> {
    let p = ConfluencePolicy::default();
    let f_eps = shifted_normalized(f, eps, gamma)?;
    let lhs = fdd(&f_eps, s, t, p)?;
    let base = fdd(f, s + eps, t + eps, p)?;
    Ok(IdentityCheck::new(lhs, base - gamma, base.abs().max(gamma.abs())))
}

/// `t ↦ f(t + ε) - f(ε) - γ t`.
pub fn shifted_normalized(f: &FunctionDescriptor, eps: f64, gamma: f64) -> Result<FunctionDescriptor> {
    let f0 = f.eval(eps)?;
    Ok(f.clone().shifted(eps).plus(FunctionDescriptor::affine(-f0, -gamma)))
}

/// Which polynomial weight multiplies `f_λ(t) = t/(1-λt)` on `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoebiusWeight {
    /// `(1-t)²`
    RightSquared,
    /// `(t+1)²`
    LeftSquared,
    /// `1-t²`
    Bilateral,
}

impl MoebiusWeight {
    pub fn weight(self) -> Weight {
        match self {
            MoebiusWeight::RightSquared => Weight::RightSquared { b: 1.0 },
            MoebiusWeight::LeftSquared => Weight::LeftSquared { a: -1.0 },
            MoebiusWeight::Bilateral => Weight::Bilateral { a: -1.0, b: 1.0 },
        }
    }

    /// Closed-form divided difference of `w f_λ` at `(s, t)`, `λ ≠ 0`.
    /// Returns the value and the largest summand magnitude.
    pub fn closed_form(self, lambda: f64, s: f64, t: f64) -> (f64, f64) {
        let l = lambda;
        let pole = (1.0 - l * s) * (1.0 - l * t);
        let terms = match self {
            MoebiusWeight::RightSquared => [
                -(s + t) / l,
                (2.0 * l - 1.0) / (l * l),
                (1.0 / l - 1.0).powi(2) / pole,
            ],
            MoebiusWeight::LeftSquared => [
                -(s + t) / l,
                -(2.0 * l + 1.0) / (l * l),
                (1.0 / l + 1.0).powi(2) / pole,
            ],
            MoebiusWeight::Bilateral => [
                (s + t) / l,
                1.0 / (l * l),
                -(1.0 / (l * l) - 1.0) / pole,
            ],
        };
        let scale = terms.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        (terms.iter().sum(), scale)
    }
}

/// Divided difference of `w f_λ` against its closed form.
pub fn moebius_weighted(kind: MoebiusWeight, lambda: f64, s: f64, t: f64) -> Result<IdentityCheck> {
    let g = FunctionDescriptor::moebius_monotone(lambda).weighted_by(kind.weight());
    let lhs = fdd(&g, s, t, ConfluencePolicy::default())?;
    let (rhs, scale) = kind.closed_form(lambda, s, t);
    Ok(IdentityCheck::new(lhs, rhs, scale))
}

/// Finite interval used by the transfer identities in the suite.
pub const TRANSFER_INTERVAL: Interval = Interval { lo: 0.1, hi: 5.0 };

/// Named identity families for the randomized suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityName {
    Border,
    BorderWeighted,
    Shift,
    MoebiusRight2,
    MoebiusLeft2,
    MoebiusBilateral,
    TransferRight2,
    TransferBilateral,
    TransferLeft2,
}

impl IdentityName {
    pub const ALL: [IdentityName; 9] = [
        IdentityName::Border,
        IdentityName::BorderWeighted,
        IdentityName::Shift,
        IdentityName::MoebiusRight2,
        IdentityName::MoebiusLeft2,
        IdentityName::MoebiusBilateral,
        IdentityName::TransferRight2,
        IdentityName::TransferBilateral,
        IdentityName::TransferLeft2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityName::Border => "border",
            IdentityName::BorderWeighted => "border-weighted",
            IdentityName::Shift => "shift",
            IdentityName::MoebiusRight2 => "moebius-right2",
            IdentityName::MoebiusLeft2 => "moebius-left2",
            IdentityName::MoebiusBilateral => "moebius-bilateral",
            IdentityName::TransferRight2 => "transfer-right2",
            IdentityName::TransferBilateral => "transfer-bilateral",
            IdentityName::TransferLeft2 => "transfer-left2",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            IdentityName::Border => "f[1](s,t) - f(s)/s - f(t)/t = -(f(s)/s) (t^2/f)[1](s,t) (f(t)/t), f = t^a",
            IdentityName::BorderWeighted => "g[1](s,t) - g(s)/s - g(t)/t = s (g/t^2)[1](s,t) t, g = t^(1+a)",
            IdentityName::Shift => "(f(.+e) - f(e) - c t)[1](s,t) = f[1](s+e,t+e) - c",
            IdentityName::MoebiusRight2 => "((1-t)^2 f_l)[1] closed form",
            IdentityName::MoebiusLeft2 => "((t+1)^2 f_l)[1] closed form",
            IdentityName::MoebiusBilateral => "((1-t^2) f_l)[1] closed form",
            IdentityName::TransferRight2 => "conjugated f[1] against ((b-t)^2 f)[1] plus endpoint terms",
            IdentityName::TransferBilateral => "(x conjugated f)[1] against ((t-a)(b-t) f)[1] plus endpoint terms",
            IdentityName::TransferLeft2 => "(x^2 conjugated f)[1] against ((t-a)^2 f)[1] plus endpoint terms",
        }
    }

    /// One evaluation at random arguments drawn from `rng`. Returns the
    /// arguments (parameter first, then points) and the check.
    fn evaluate_random(self, rng: &mut rng::Rng) -> Result<(Vec<f64>, IdentityCheck)> {
        let alpha = if rng.random::<bool>() { 0.5 } else { 1.5 };
        match self {
            IdentityName::Border | IdentityName::BorderWeighted => {
                let (s, t) = (rng.random_range(1e-3..10.0), rng.random_range(1e-3..10.0));
                let f = FunctionDescriptor::power(alpha);
                let c = if self == IdentityName::Border { border(&f, s, t)? } else { border_weighted(&f, s, t)? };
                Ok((vec![alpha, s, t], c))
            }
            IdentityName::Shift => {
                let eps = rng.random_range(0.01..1.0);
                let (s, t) = (rng.random_range(1e-3..10.0), rng.random_range(1e-3..10.0));
                let f = FunctionDescriptor::power(alpha);
                let gamma = f.deriv(eps)?;
                Ok((vec![alpha, eps, s, t], shift(&f, eps, gamma, s, t)?))
            }
            IdentityName::MoebiusRight2 | IdentityName::MoebiusLeft2 | IdentityName::MoebiusBilateral => {
                // the closed forms divide by λ
                let magnitude = rng.random_range(0.05..0.95);
                let lambda = if rng.random::<bool>() { magnitude } else { -magnitude };
                let (s, t) = (rng.random_range(-0.99..0.99), rng.random_range(-0.99..0.99));
                let kind = match self {
                    IdentityName::MoebiusRight2 => MoebiusWeight::RightSquared,
                    IdentityName::MoebiusLeft2 => MoebiusWeight::LeftSquared,
                    _ => MoebiusWeight::Bilateral,
                };
                Ok((vec![lambda, s, t], moebius_weighted(kind, lambda, s, t)?))
            }
            IdentityName::TransferRight2 | IdentityName::TransferBilateral | IdentityName::TransferLeft2 => {
                let map = ConjugationMap::for_interval(&TRANSFER_INTERVAL)?;
                let f = FunctionDescriptor::power(alpha).restricted(map.interval());
                let (ti, tj) = (rng.random_range(0.101..4.999), rng.random_range(0.101..4.999));
                let kind = match self {
                    IdentityName::TransferRight2 => TransferKind::RightSquared,
                    IdentityName::TransferBilateral => TransferKind::Bilateral,
                    _ => TransferKind::LeftSquared,
                };
                Ok((vec![alpha, ti, tj], verify_conjugation_dd(&f, map, kind, ti, tj)?))
            }
        }
    }
}

impl fmt::Display for IdentityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IdentityName::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| Error::config(format!("unknown identity `{s}`")))
    }
}

/// Outcome of `evaluations` random evaluations of one identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: IdentityName,
    pub evaluations: usize,
    pub tolerance: f64,
    pub failures: usize,
    pub max_relative: f64,
    /// Arguments and check at the largest relative residual.
    pub worst_args: Vec<f64>,
    pub worst: Option<IdentityCheck>,
    pub seed: u64,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Evaluates `identity` at `evaluations` random arguments; evaluation `k`
/// draws from stream `k` of `seed`.
pub fn run_identity(identity: IdentityName, evaluations: usize, tol: f64, seed: u64) -> Result<IdentityReport> {
    let mut report = IdentityReport {
        identity,
        evaluations,
        tolerance: tol,
        failures: 0,
        max_relative: 0.0,
        worst_args: Vec::new(),
        worst: None,
        seed,
    };
    for k in 0..evaluations {
        let (args, check) = identity.evaluate_random(&mut rng::stream(seed, k as u64))?;
        let rel = check.relative();
        if !check.holds(tol) {
            report.failures += 1;
        }
        if report.worst.is_none() || rel > report.max_relative {
            report.max_relative = rel;
            report.worst_args = args;
            report.worst = Some(check);
        }
    }
    Ok(report)
}

pub fn run_suite(evaluations: usize, tol: f64, seed: u64) -> Result<Vec<IdentityReport>> {
    IdentityName::ALL
        .iter()
        .enumerate()
        .map(|(i, &id)| run_identity(id, evaluations, tol, rng::child_seed(seed, i as u64)))
        .collect()
}
