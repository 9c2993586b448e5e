//! Replayable counterexamples.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::funcs::FunctionDescriptor;
use crate::linalg::{serde_rows, Matrix};
use crate::property::{default_check, Property};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessPayload {
    /// Points of a Loewner matrix.
    Points { points: Vec<f64> },
    /// `A ≥ B` for monotonicity (`lambda` absent) or an arbitrary pair with mixing weight.
    MatrixPair {
        #[serde(with = "serde_rows")]
        a: Matrix,
        #[serde(with = "serde_rows")]
        b: Matrix,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
    },
    /// Positive `A` and contraction `X`.
    Contraction {
        #[serde(with = "serde_rows")]
        a: Matrix,
        #[serde(with = "serde_rows")]
        x: Matrix,
    },
}

/// A concrete failure of `property` for `function`, with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub property: Property,
    pub function: FunctionDescriptor,
    pub order: usize,
    pub payload: WitnessPayload,
    /// Size of the violation: minus the extremal eigenvalue of the tested form.
    pub violation: f64,
    /// The absolute threshold the violation exceeded (`tolerance * scale`).
    pub threshold: f64,
    pub tolerance: f64,
    pub seed: u64,
    /// Trial or evaluation index within the run that produced it.
    pub trial: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replay {
    pub violation: f64,
    pub threshold: f64,
    /// The violation still exceeds its threshold and matches the recorded size.
    pub reproduces: bool,
}

impl Witness {
    /// Re-scores the payload with the built-in checker for `property`.
    pub fn replay(&self) -> Result<Replay> {
        let gap = default_check(self.property).evaluate(&self.function, &self.payload)?;
        let violation = -gap.value;
        let threshold = self.tolerance * gap.scale;
        let drift = (violation - self.violation).abs();
        Ok(Replay {
            violation,
            threshold,
            reproduces: violation > threshold && drift <= 1e-10 * self.violation.abs().max(1.0),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcs::FunctionDescriptor as F;
    use crate::matorder::{check_n_convex, check_n_monotone, loewner_psd_probe, OrderCheckConfig};

    #[test]
    fn json_round_trip_replays_identically() {
        let cfg = OrderCheckConfig::new(1000, 11);
        let found = [
            check_n_monotone(&F::power(2.0), 2, &cfg).unwrap(),
            check_n_convex(&F::power(3.0), 2, &cfg).unwrap(),
            loewner_psd_probe(&F::power(-0.5), 3, &cfg).unwrap(),
        ];
        for report in found {
            let w = report.witness.expect("counterexample expected");
            let text = serde_json::to_string(&w).unwrap();
            let back: Witness = serde_json::from_str(&text).unwrap();
            assert_eq!(back, w);
            let r = back.replay().unwrap();
            assert!(r.reproduces);
            assert_eq!(r.violation, w.violation);
        }
    }

    #[test]
    fn tampered_witness_does_not_reproduce() {
        let w = Witness {
            property: Property::Cnd,
            function: F::power(1.5),
            order: 2,
            payload: WitnessPayload::Points { points: vec![1.0, 2.0] },
            violation: 1.0,
            threshold: 1e-9,
            tolerance: 1e-9,
            seed: 0,
            trial: 0,
        };
        assert!(!w.replay().unwrap().reproduces);
    }
}
