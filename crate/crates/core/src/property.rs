//! Property checkers behind a common trait, registered by name.
//!
//! Each checker knows how to draw one random candidate (a point tuple or a
//! matrix pair) and how to evaluate it. The randomized driver in
//! [`crate::matorder::run_check`] and witness replay both go through
//! [`PropertyCheck::evaluate`], so a stored witness is re-scored by exactly
//! the code that found it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::definiteness::{self, Definiteness};
use crate::divdiff::ConfluencePolicy;
use crate::error::{Error, Result};
use crate::funcs::{FunctionDescriptor, Interval};
use crate::linalg::Matrix;
use crate::loewner::loewner_entries;
use crate::matorder::checks::{contraction_gap, convex_gap, monotone_gap};
use crate::matorder::sampling::{random_orthogonal, sample_ordered_pair, sample_symmetric, SamplingConfig, SamplingWindow};
use crate::rng::Rng;
use crate::witness::WitnessPayload;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    /// `L_f` positive semidefinite.
    Psd,
    /// `L_f` conditionally positive definite.
    Cpd,
    /// `L_f` conditionally negative definite.
    Cnd,
    Monotone,
    Convex,
    Concave,
    /// `f(XᵀAX) ≤ Xᵀ f(A) X` for `A > 0`, `‖X‖ ≤ 1`.
    Contraction,
}

impl Property {
    pub const ALL: [Property; 7] = [
        Property::Psd,
        Property::Cpd,
        Property::Cnd,
        Property::Monotone,
        Property::Convex,
        Property::Concave,
        Property::Contraction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Psd => "psd",
            Property::Cpd => "cpd",
            Property::Cnd => "cnd",
            Property::Monotone => "monotone",
            Property::Convex => "convex",
            Property::Concave => "concave",
            Property::Contraction => "contraction",
        }
    }

    /// The definiteness test behind a Loewner-matrix property.
    pub fn definiteness(self) -> Option<Definiteness> {
        match self {
            Property::Psd => Some(Definiteness::Psd),
            Property::Cpd => Some(Definiteness::Cpd),
            Property::Cnd => Some(Definiteness::Cnd),
            _ => None,
        }
    }
}

impl From<Definiteness> for Property {
    fn from(d: Definiteness) -> Self {
        match d {
            Definiteness::Psd => Property::Psd,
            Definiteness::Cpd => Property::Cpd,
            Definiteness::Cnd => Property::Cnd,
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownProperty(s.to_string()))
    }
}

/// Extremal eigenvalue of the form that must be nonnegative, and the scale
/// the tolerance is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub value: f64,
    pub scale: f64,
}

impl Gap {
    pub fn holds(&self, tol: f64) -> bool {
        self.value >= -tol * self.scale
    }
}

/// What a checker needs to draw a candidate.
#[derive(Debug, Clone, Copy)]
pub struct TrialContext {
    pub interval: Interval,
    pub window: SamplingWindow,
    pub sampling: SamplingConfig,
}

pub trait PropertyCheck: Send + Sync {
    fn name(&self) -> &'static str;
    fn property(&self) -> Property;
    fn description(&self) -> &'static str;

    fn min_order(&self) -> usize {
        1
    }

    /// Draws one random candidate of order `n`.
    fn sample(&self, f: &FunctionDescriptor, n: usize, ctx: &TrialContext, rng: &mut Rng) -> Result<WitnessPayload>;

    /// Scores a candidate; the property fails when `gap.value < -tol * gap.scale`.
    fn evaluate(&self, f: &FunctionDescriptor, payload: &WitnessPayload) -> Result<Gap>;
}

fn wrong_payload(name: &str) -> Error {
    Error::config(format!("witness payload does not fit the `{name}` checker"))
}

/// PSD / c.p.d. / c.n.d. of `L_f` at random point tuples.
pub struct LoewnerCheck(pub Definiteness);

impl PropertyCheck for LoewnerCheck {
    fn name(&self) -> &'static str {
        Property::from(self.0).name()
    }

    fn property(&self) -> Property {
        self.0.into()
    }

    fn description(&self) -> &'static str {
        match self.0 {
            Definiteness::Psd => "Loewner matrix is positive semidefinite",
            Definiteness::Cpd => "Loewner matrix is conditionally positive definite",
            Definiteness::Cnd => "Loewner matrix is conditionally negative definite",
        }
    }

    fn sample(&self, _f: &FunctionDescriptor, n: usize, ctx: &TrialContext, rng: &mut Rng) -> Result<WitnessPayload> {
        Ok(WitnessPayload::Points {
            points: ctx.window.sample_points(n, rng),
        })
    }

    fn evaluate(&self, f: &FunctionDescriptor, payload: &WitnessPayload) -> Result<Gap> {
        let WitnessPayload::Points { points } = payload else {
            return Err(wrong_payload(self.name()));
        };
        loewner_gap(f, points, self.0)
    }
}

/// Extremal eigenvalue of the definiteness test applied to `L_f(points)`.
pub fn loewner_gap(f: &FunctionDescriptor, points: &[f64], d: Definiteness) -> Result<Gap> {
    let m = loewner_entries(f, points, ConfluencePolicy::default())?;
    // the tolerance is applied by the caller, so test at zero tolerance here
    let v = definiteness::check(&m, d, 0.0)?;
    Ok(Gap {
        value: v.extremal_eigenvalue,
        scale: v.scale,
    })
}

pub struct MonotoneCheck;

impl PropertyCheck for MonotoneCheck {
    fn name(&self) -> &'static str {
        "monotone"
    }

    fn property(&self) -> Property {
        Property::Monotone
    }

    fn description(&self) -> &'static str {
        "A >= B implies f(A) >= f(B)"
    }

    fn sample(&self, _f: &FunctionDescriptor, n: usize, ctx: &TrialContext, rng: &mut Rng) -> Result<WitnessPayload> {
        let (a, b) = sample_ordered_pair(&ctx.interval, n, rng, &ctx.sampling)?;
        Ok(WitnessPayload::MatrixPair { a, b, lambda: None })
    }

    fn evaluate(&self, f: &FunctionDescriptor, payload: &WitnessPayload) -> Result<Gap> {
        match payload {
            WitnessPayload::MatrixPair { a, b, lambda: None } => monotone_gap(f, a, b),
            _ => Err(wrong_payload(self.name())),
        }
    }
}

/// Convexity, or concavity via `-f`.
pub struct ConvexCheck {
    pub concave: bool,
}

impl PropertyCheck for ConvexCheck {
    fn name(&self) -> &'static str {
        if self.concave {
            "concave"
        } else {
            "convex"
        }
    }

    fn property(&self) -> Property {
        if self.concave {
            Property::Concave
        } else {
            Property::Convex
        }
    }

    fn description(&self) -> &'static str {
        if self.concave {
            "f(lA + (1-l)B) >= l f(A) + (1-l) f(B)"
        } else {
            "f(lA + (1-l)B) <= l f(A) + (1-l) f(B)"
        }
    }

    fn sample(&self, _f: &FunctionDescriptor, n: usize, ctx: &TrialContext, rng: &mut Rng) -> Result<WitnessPayload> {
        let (a, _) = sample_symmetric(&ctx.window, n, rng);
        let (b, _) = sample_symmetric(&ctx.window, n, rng);
        let lambda = rng.random_range(0.0..1.0);
        Ok(WitnessPayload::MatrixPair {
            a,
            b,
            lambda: Some(lambda),
        })
    }

    fn evaluate(&self, f: &FunctionDescriptor, payload: &WitnessPayload) -> Result<Gap> {
        let WitnessPayload::MatrixPair {
            a,
            b,
            lambda: Some(lambda),
        } = payload
        else {
            return Err(wrong_payload(self.name()));
        };
        if self.concave {
            convex_gap(&f.clone().negated(), a, b, *lambda)
        } else {
            convex_gap(f, a, b, *lambda)
        }
    }
}

pub struct ContractionCheck;

impl PropertyCheck for ContractionCheck {
    fn name(&self) -> &'static str {
        "contraction"
    }

    fn property(&self) -> Property {
        Property::Contraction
    }

    fn description(&self) -> &'static str {
        "f(X'AX) <= X' f(A) X for A > 0 and contractions X"
    }

    fn sample(&self, _f: &FunctionDescriptor, n: usize, ctx: &TrialContext, rng: &mut Rng) -> Result<WitnessPayload> {
        let (a, _) = sample_symmetric(&ctx.window, n, rng);
        let u = random_orthogonal(n, rng);
        let v = random_orthogonal(n, rng);
        let sigma = Matrix::from_fn(n, n, |i, j| if i == j { rng.random_range(0.1..1.0) } else { 0.0 });
        Ok(WitnessPayload::Contraction { a, x: u * sigma * v })
    }

    fn evaluate(&self, f: &FunctionDescriptor, payload: &WitnessPayload) -> Result<Gap> {
        match payload {
            WitnessPayload::Contraction { a, x } => contraction_gap(f, a, x),
            _ => Err(wrong_payload(self.name())),
        }
    }
}

/// The built-in checker for a property.
pub fn default_check(p: Property) -> Box<dyn PropertyCheck> {
    match p {
        Property::Psd => Box::new(LoewnerCheck(Definiteness::Psd)),
        Property::Cpd => Box::new(LoewnerCheck(Definiteness::Cpd)),
        Property::Cnd => Box::new(LoewnerCheck(Definiteness::Cnd)),
        Property::Monotone => Box::new(MonotoneCheck),
        Property::Convex => Box::new(ConvexCheck { concave: false }),
        Property::Concave => Box::new(ConvexCheck { concave: true }),
        Property::Contraction => Box::new(ContractionCheck),
    }
}

/// Name-keyed collection of checkers.
pub struct PropertyRegistry {
    checks: BTreeMap<&'static str, Box<dyn PropertyCheck>>,
}

impl PropertyRegistry {
    pub fn empty() -> Self {
        Self {
            checks: BTreeMap::new(),
        }
    }

    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        for p in Property::ALL {
            r.register(default_check(p));
        }
        r
    }

    /// Adds or replaces the checker registered under `check.name()`.
    pub fn register(&mut self, check: Box<dyn PropertyCheck>) {
        self.checks.insert(check.name(), check);
    }

    pub fn get(&self, name: &str) -> Result<&dyn PropertyCheck> {
        self.checks
            .get(name)
            .map(|c| c.as_ref())
            .ok_or_else(|| Error::UnknownProperty(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.checks.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn PropertyCheck> + '_ {
        self.checks.values().map(|c| c.as_ref())
    }
}

impl Default for PropertyRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lookup() {
        let r = PropertyRegistry::with_defaults();
        assert_eq!(r.names().count(), 7);
        assert_eq!(r.get("cnd").unwrap().property(), Property::Cnd);
        assert!(matches!(r.get("nope"), Err(Error::UnknownProperty(_))));
    }

    #[test]
    fn names_round_trip() {
        for p in Property::ALL {
            assert_eq!(p.name().parse::<Property>().unwrap(), p);
            assert_eq!(serde_json::to_string(&p).unwrap(), format!("\"{}\"", p.name()));
        }
    }

    #[test]
    fn custom_checker_replaces_default() {
        struct AlwaysFine;
        impl PropertyCheck for AlwaysFine {
            fn name(&self) -> &'static str {
                "monotone"
            }
            fn property(&self) -> Property {
                Property::Monotone
            }
            fn description(&self) -> &'static str {
                "test double"
            }
            fn sample(&self, _: &FunctionDescriptor, _: usize, _: &TrialContext, _: &mut Rng) -> Result<WitnessPayload> {
                Ok(WitnessPayload::Points { points: vec![1.0] })
            }
            fn evaluate(&self, _: &FunctionDescriptor, _: &WitnessPayload) -> Result<Gap> {
                Ok(Gap { value: 0.0, scale: 1.0 })
            }
        }
        let mut r = PropertyRegistry::with_defaults();
        r.register(Box::new(AlwaysFine));
        assert_eq!(r.get("monotone").unwrap().description(), "test double");
    }
}
