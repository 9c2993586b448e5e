//! Randomized order checks driven by the property registry.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::definiteness::DEFAULT_TOL;
use crate::error::{Error, Result};
use crate::funcs::{FunctionDescriptor, Interval};
use crate::linalg::Matrix;
use crate::property::{self, Gap, Property, PropertyCheck};
use crate::rng;
use crate::witness::Witness;

use super::calculus::apply_to_decomposition;
use super::eigen::sym_eigen;
use super::sampling::{SamplingConfig, SamplingWindow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderCheckConfig {
    pub trials: usize,
    /// Sampling interval; defaults to the function's domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<Interval>,
    pub tol: f64,
    pub seed: u64,
    #[serde(default)]
    pub sampling: SamplingConfig,
}

impl OrderCheckConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            interval: None,
            tol: DEFAULT_TOL,
            seed,
            sampling: SamplingConfig::default(),
        }
    }

    pub fn with_interval(mut self, j: Interval) -> Self {
        self.interval = Some(j);
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// The sampling interval, checked against the function's domain.
    pub fn resolve_interval(&self, f: &FunctionDescriptor) -> Result<Interval> {
        let domain = f.domain();
        let j = self.interval.unwrap_or(domain);
        if !domain.contains_interval(&j) {
            return Err(Error::config(format!(
                "sampling interval {j} is not inside the domain {domain} of {}",
                f.label()
            )));
        }
        Ok(j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    NoCounterexample,
    Counterexample,
}

/// Outcome of a randomized check. A missing counterexample is evidence, not proof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderCheckReport {
    pub property: Property,
    pub order: usize,
    pub function: FunctionDescriptor,
    pub interval: Interval,
    pub trials: usize,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub seed: u64,
    pub tolerance: f64,
}

impl OrderCheckReport {
    pub fn found_counterexample(&self) -> bool {
        self.verdict == Verdict::Counterexample
    }
}

/// Runs `cfg.trials` independent trials of `check`; trial `i` draws from
/// stream `(seed, i)` and the lowest-index counterexample wins, so the
/// result does not depend on thread scheduling.
pub fn run_check(
    check: &dyn PropertyCheck,
    f: &FunctionDescriptor,
    n: usize,
    cfg: &OrderCheckConfig,
) -> Result<OrderCheckReport> {
    if cfg.trials == 0 {
        return Err(Error::config("trials must be at least 1"));
    }
    if n < check.min_order() {
        return Err(Error::config(format!(
            "{} needs order at least {}, got {n}",
            check.name(),
            check.min_order()
        )));
    }
    if !(cfg.tol.is_finite() && cfg.tol >= 0.0) {
        return Err(Error::config(format!("tolerance {} must be non-negative", cfg.tol)));
    }
    let ctx = trial_context(f, cfg)?;
    let interval = ctx.interval;

    let found = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| -> Result<Option<Witness>> {
            let mut r = rng::stream(cfg.seed, i);
            let payload = check.sample(f, n, &ctx, &mut r)?;
            let gap = check.evaluate(f, &payload)?;
            Ok((!gap.holds(cfg.tol)).then(|| Witness {
                property: check.property(),
                function: f.clone(),
                order: n,
                payload,
                violation: -gap.value,
                threshold: cfg.tol * gap.scale,
                tolerance: cfg.tol,
                seed: cfg.seed,
                trial: i,
            }))
        })
        .find_map_first(|r| r.transpose())
        .transpose()?;

    Ok(OrderCheckReport {
        property: check.property(),
        order: n,
        function: f.clone(),
        interval,
        trials: cfg.trials,
        verdict: if found.is_some() {
            Verdict::Counterexample
        } else {
            Verdict::NoCounterexample
        },
        witness: found,
        seed: cfg.seed,
        tolerance: cfg.tol,
    })
}

/// The sampling context `run_check` uses for every trial.
pub fn trial_context(f: &FunctionDescriptor, cfg: &OrderCheckConfig) -> Result<property::TrialContext> {
    f.validate()?;
    let interval = cfg.resolve_interval(f)?;
    Ok(property::TrialContext {
        interval,
        window: SamplingWindow::for_interval(&interval, &cfg.sampling)?,
        sampling: cfg.sampling,
    })
}

fn run_named(p: Property, f: &FunctionDescriptor, n: usize, cfg: &OrderCheckConfig) -> Result<OrderCheckReport> {
    run_check(property::default_check(p).as_ref(), f, n, cfg)
}

/// `A ≥ B ⇒ f(A) ≥ f(B)` on random ordered pairs.
pub fn check_n_monotone(f: &FunctionDescriptor, n: usize, cfg: &OrderCheckConfig) -> Result<OrderCheckReport> {
    run_named(Property::Monotone, f, n, cfg)
}

/// `f(λA + (1-λ)B) ≤ λ f(A) + (1-λ) f(B)` on random independent pairs.
pub fn check_n_convex(f: &FunctionDescriptor, n: usize, cfg: &OrderCheckConfig) -> Result<OrderCheckReport> {
    run_named(Property::Convex, f, n, cfg)
}

pub fn check_n_concave(f: &FunctionDescriptor, n: usize, cfg: &OrderCheckConfig) -> Result<OrderCheckReport> {
    run_named(Property::Concave, f, n, cfg)
}

/// Positive semidefiniteness of `L_f` at random point tuples.
pub fn loewner_psd_probe(f: &FunctionDescriptor, n: usize, cfg: &OrderCheckConfig) -> Result<OrderCheckReport> {
    run_named(Property::Psd, f, n, cfg)
}

/// `f(XᵀAX) ≤ Xᵀ f(A) X` for positive `A` and contractions `X`.
pub fn check_contraction(f: &FunctionDescriptor, n: usize, cfg: &OrderCheckConfig) -> Result<OrderCheckReport> {
    run_named(Property::Contraction, f, n, cfg)
}

/// `f(M)` together with its spectral norm `max |f(λ_i)|`.
pub(crate) fn apply_with_norm(f: &FunctionDescriptor, m: &Matrix) -> Result<(Matrix, f64)> {
    let d = sym_eigen(m)?;
    let norm = d
        .eigenvalues
        .iter()
        .map(|&l| f.eval(l).map(f64::abs))
        .try_fold(0.0_f64, |acc, v| v.map(|v| acc.max(v)))?;
    Ok((apply_to_decomposition(f, &d)?, norm))
}

/// Smallest eigenvalue of `f(A) - f(B)`.
pub fn monotone_gap(f: &FunctionDescriptor, a: &Matrix, b: &Matrix) -> Result<Gap> {
    let (fa, na) = apply_with_norm(f, a)?;
    let (fb, nb) = apply_with_norm(f, b)?;
    Ok(Gap {
        value: sym_eigen(&(fa - fb))?.min(),
        scale: na.max(nb).max(1.0),
    })
}

/// Smallest eigenvalue of `λ f(A) + (1-λ) f(B) - f(λA + (1-λ)B)`.
pub fn convex_gap(f: &FunctionDescriptor, a: &Matrix, b: &Matrix, lambda: f64) -> Result<Gap> {
    let (fa, na) = apply_with_norm(f, a)?;
    let (fb, nb) = apply_with_norm(f, b)?;
    let (fc, _) = apply_with_norm(f, &(a * lambda + b * (1.0 - lambda)))?;
    Ok(Gap {
        value: sym_eigen(&(fa * lambda + fb * (1.0 - lambda) - fc))?.min(),
        scale: na.max(nb).max(1.0),
    })
}

/// Smallest eigenvalue of `Xᵀ f(A) X - f(XᵀAX)`.
pub fn contraction_gap(f: &FunctionDescriptor, a: &Matrix, x: &Matrix) -> Result<Gap> {
    let (fa, na) = apply_with_norm(f, a)?;
    let compressed = crate::linalg::symmetrize(&(x.transpose() * a * x));
    let (fc, nc) = apply_with_norm(f, &compressed)?;
    let lhs = crate::linalg::symmetrize(&(x.transpose() * fa * x));
    Ok(Gap {
        value: sym_eigen(&(lhs - fc))?.min(),
        scale: na.max(nc).max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcs::FunctionDescriptor as F;
    use crate::witness::WitnessPayload;

    fn cfg(trials: usize, seed: u64) -> OrderCheckConfig {
        OrderCheckConfig::new(trials, seed)
    }

    #[test]
    fn monotone_examples() {
        assert!(!check_n_monotone(&F::power(0.5), 2, &cfg(500, 1)).unwrap().found_counterexample());
        let r = check_n_monotone(&F::power(1.5), 2, &cfg(1000, 1)).unwrap();
        assert!(r.found_counterexample());
        assert!(r.witness.unwrap().replay().unwrap().reproduces);
        assert!(!check_n_monotone(&F::affine(0.0, 1.0), 5, &cfg(100, 1)).unwrap().found_counterexample());
    }

    #[test]
    fn convex_examples() {
        assert!(!check_n_convex(&F::power(1.5), 2, &cfg(500, 2)).unwrap().found_counterexample());
        assert!(check_n_convex(&F::power(3.0), 2, &cfg(1000, 2)).unwrap().found_counterexample());
        assert!(check_n_convex(&F::power(-2.0), 2, &cfg(1000, 2)).unwrap().found_counterexample());
        // t^0.5 is concave, not convex
        assert!(!check_n_concave(&F::power(0.5), 3, &cfg(300, 2)).unwrap().found_counterexample());
        assert!(check_n_concave(&F::power(2.0), 1, &cfg(300, 2)).unwrap().found_counterexample());
    }

    #[test]
    fn loewner_probe_examples() {
        assert!(!loewner_psd_probe(&F::power(0.5), 4, &cfg(500, 3)).unwrap().found_counterexample());
        let r = loewner_psd_probe(&F::power(1.5), 2, &cfg(1000, 3)).unwrap();
        assert!(r.found_counterexample());
        assert!(matches!(r.witness.unwrap().payload, WitnessPayload::Points { .. }));
        let moeb = F::moebius_monotone(0.5);
        assert!(!loewner_psd_probe(&moeb, 3, &cfg(500, 3)).unwrap().found_counterexample());
    }

    #[test]
    fn contraction_examples() {
        // t^α with α ∈ [1, 2] is operator convex with f(0) = 0
        assert!(!check_contraction(&F::power(1.5), 3, &cfg(300, 4)).unwrap().found_counterexample());
        assert!(check_contraction(&F::power(3.0), 2, &cfg(1000, 4)).unwrap().found_counterexample());
    }

    #[test]
    fn equal_matrices_satisfy_monotonicity() {
        let a = Matrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 3.0]);
        let g = monotone_gap(&F::power(3.0), &a, &a).unwrap();
        assert!(g.holds(1e-12));
        assert!(g.value.abs() < 1e-12 * g.scale);
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let f = F::power(2.5);
        let a = check_n_convex(&f, 2, &cfg(400, 9)).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| check_n_convex(&f, 2, &cfg(400, 9)).unwrap());
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn config_errors() {
        assert!(check_n_monotone(&F::power(0.5), 2, &cfg(0, 1)).is_err());
        let c = cfg(10, 1).with_interval(Interval::new(-1.0, 1.0).unwrap());
        assert!(matches!(check_n_monotone(&F::power(0.5), 2, &c), Err(Error::Config(_))));
    }
}
