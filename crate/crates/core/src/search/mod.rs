//! Parameter sweeps, counterexample hunting and empirical probing of implications.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcs::FunctionDescriptor;

pub mod hunt;
pub mod implication;
pub mod sweep;

pub use hunt::{hunt, HuntConfig, HuntPhase, HuntResult};
pub use implication::{catalog, probe_implication, Implication, ProbeConfig, ProbeOutcome, ProbeReport};
pub use sweep::{sweep, AlphaGrid, Boundary, Cell, ClassificationTable, SweepConfig};

/// One-parameter function families a sweep can scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `t^p` on `(0, ∞)`.
    #[default]
    Power,
    /// `-t^p` on `(0, ∞)`.
    NegPower,
    /// `t/(1 - p t)` on `(-1, 1)`.
    MoebiusMonotone,
    /// `t²/(1 - p t)` on `(-1, 1)`.
    MoebiusConvex,
}

impl Family {
    pub fn member(self, p: f64) -> FunctionDescriptor {
        match self {
            Family::Power => FunctionDescriptor::power(p),
            Family::NegPower => FunctionDescriptor::power(p).negated(),
            Family::MoebiusMonotone => FunctionDescriptor::moebius_monotone(p),
            Family::MoebiusConvex => FunctionDescriptor::moebius_convex(p),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Power => "power",
            Family::NegPower => "neg-power",
            Family::MoebiusMonotone => "moebius-monotone",
            Family::MoebiusConvex => "moebius-convex",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Family::Power, Family::NegPower, Family::MoebiusMonotone, Family::MoebiusConvex]
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::config(format!("unknown family `{s}` (power, neg-power, moebius-monotone, moebius-convex)")))
    }
}
