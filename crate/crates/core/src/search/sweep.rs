//! Grids of randomized verdicts over a one-parameter family.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::definiteness::{self, cpd_closed_form_small_with_tol, DEFAULT_TOL};
use crate::divdiff::ConfluencePolicy;
use crate::error::{Error, Result};
use crate::loewner::loewner_entries;
use crate::matorder::{run_check, trial_context, OrderCheckConfig};
use crate::property::{Property, PropertyRegistry};
use crate::rng;
use crate::witness::{Witness, WitnessPayload};

use super::Family;

/// `start:stop:step`, inclusive of both ends up to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl AlphaGrid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::config(format!("grid step must be positive, got {step}")));
        }
        if !(start.is_finite() && stop.is_finite() && start <= stop) {
            return Err(Error::config(format!("grid needs finite start <= stop, got {start}:{stop}")));
        }
        Ok(Self { start, stop, step })
    }

    /// Grid values, each rounded to 12 decimals so that `-2 + 8 * 0.25` is exactly `0`.
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|k| round12(self.start + k as f64 * self.step))
            .collect()
    }
}

fn round12(x: f64) -> f64 {
    let v: f64 = format!("{x:.12}").parse().unwrap_or(x);
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

impl FromStr for AlphaGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let parse = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::config(format!("bad number `{p}` in grid `{s}`")))
        };
        match parts.as_slice() {
            [a, b, c] => AlphaGrid::new(parse(a)?, parse(b)?, parse(c)?),
            [a] => {
                let v = parse(a)?;
                AlphaGrid::new(v, v, 1.0)
            }
            _ => Err(Error::config(format!("grid `{s}` should look like start:stop:step"))),
        }
    }
}

impl fmt::Display for AlphaGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(default)]
    pub family: Family,
    pub alpha: AlphaGrid,
    pub sizes: Vec<usize>,
    pub properties: Vec<Property>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Re-test every sampled c.p.d./c.n.d. tuple of order ≤ 3 with the closed form.
    pub closed_form_audit: bool,
}

impl SweepConfig {
    pub fn new(alpha: AlphaGrid, sizes: Vec<usize>, properties: Vec<Property>, trials: usize, seed: u64) -> Self {
        Self {
            family: Family::Power,
            alpha,
            sizes,
            properties,
            trials,
            seed,
            tol: DEFAULT_TOL,
            closed_form_audit: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.properties.is_empty() {
            return Err(Error::config("a sweep needs at least one size and one property"));
        }
        if let Some(n) = self.sizes.iter().find(|n| !(1..=5).contains(*n)) {
            return Err(Error::config(format!("sweep sizes must lie in 1..=5, got {n}")));
        }
        if self.trials == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        Ok(())
    }
}

/// Projection test against the closed form on the same sampled tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedFormAudit {
    pub tuples: usize,
    pub disagreements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub alpha: f64,
    pub order: usize,
    pub property: Property,
    /// No counterexample among the sampled candidates.
    pub holds: bool,
    pub trials: usize,
    pub seed: u64,
    pub witness: Option<Witness>,
    pub closed_form: Option<ClosedFormAudit>,
}

/// Adjacent grid values with opposite verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub order: usize,
    pub property: Property,
    pub lower: f64,
    pub upper: f64,
    pub holds_below: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationTable {
    pub config: SweepConfig,
    pub cells: Vec<Cell>,
    pub boundaries: Vec<Boundary>,
}

impl ClassificationTable {
    pub fn cell(&self, alpha: f64, order: usize, property: Property) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.alpha == alpha && c.order == order && c.property == property)
    }

    /// Grid values where the property held, in grid order.
    pub fn holding(&self, order: usize, property: Property) -> Vec<f64> {
        self.cells
            .iter()
            .filter(|c| c.order == order && c.property == property && c.holds)
            .map(|c| c.alpha)
            .collect()
    }

    pub fn closed_form_disagreements(&self) -> usize {
        self.cells
            .iter()
            .filter_map(|c| c.closed_form.map(|a| a.disagreements))
            .sum()
    }

    /// One row per cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,order,property,verdict,trials,seed,violation,closed_form_tuples,closed_form_disagreements\n");
        for c in &self.cells {
            let (tuples, dis) = c
                .closed_form
                .map(|a| (a.tuples.to_string(), a.disagreements.to_string()))
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                c.alpha,
                c.order,
                c.property,
                if c.holds { "holds" } else { "fails" },
                c.trials,
                c.seed,
                c.witness.as_ref().map(|w| w.violation.to_string()).unwrap_or_default(),
                tuples,
                dis
            ));
        }
        out
    }
}

/// Seed of one cell, derived from its coordinates so that it does not depend
/// on which other cells are in the grid.
pub fn cell_seed(seed: u64, property: Property, order: usize, alpha: f64) -> u64 {
    let p = Property::ALL.iter().position(|&q| q == property).unwrap_or(0) as u64;
    rng::child_seed(rng::child_seed(rng::child_seed(seed, p), order as u64), alpha.to_bits())
}

pub fn sweep(cfg: &SweepConfig, registry: &PropertyRegistry) -> Result<ClassificationTable> {
    cfg.validate()?;
    let alphas = cfg.alpha.values();
    let mut coords = Vec::new();
    for &property in &cfg.properties {
        registry.get(property.name())?;
        for &order in &cfg.sizes {
            for &alpha in &alphas {
                coords.push((property, order, alpha));
            }
        }
    }
    let cells = coords
        .par_iter()
        .map(|&(property, order, alpha)| run_cell(cfg, registry, property, order, alpha))
        .collect::<Result<Vec<_>>>()?;
    let boundaries = find_boundaries(&cells, cfg);
    Ok(ClassificationTable {
        config: cfg.clone(),
        cells,
        boundaries,
    })
}

fn run_cell(cfg: &SweepConfig, registry: &PropertyRegistry, property: Property, order: usize, alpha: f64) -> Result<Cell> {
    let f = cfg.family.member(alpha);
    let seed = cell_seed(cfg.seed, property, order, alpha);
    let check_cfg = OrderCheckConfig::new(cfg.trials, seed).with_tol(cfg.tol);
    let report = run_check(registry.get(property.name())?, &f, order, &check_cfg)?;
    let closed_form = match property.definiteness() {
        Some(d) if cfg.closed_form_audit && d != definiteness::Definiteness::Psd && order <= 3 => {
            Some(audit(registry, property, &f, order, &check_cfg, d)?)
        }
        _ => None,
    };
    Ok(Cell {
        alpha,
        order,
        property,
        holds: !report.found_counterexample(),
        trials: cfg.trials,
        seed,
        witness: report.witness,
        closed_form,
    })
}

/// Replays the trials of a definiteness cell and compares the projection
/// verdict with the closed form on each tuple.
fn audit(
    registry: &PropertyRegistry,
    property: Property,
    f: &crate::funcs::FunctionDescriptor,
    order: usize,
    cfg: &OrderCheckConfig,
    d: definiteness::Definiteness,
) -> Result<ClosedFormAudit> {
    let check = registry.get(property.name())?;
    let ctx = trial_context(f, cfg)?;
    let mut disagreements = 0;
    for i in 0..cfg.trials as u64 {
        let payload = check.sample(f, order, &ctx, &mut rng::stream(cfg.seed, i))?;
        let WitnessPayload::Points { points } = payload else {
            return Err(Error::config("closed-form audit needs point tuples"));
        };
        let m = loewner_entries(f, &points, ConfluencePolicy::default())?;
        let projection = definiteness::check(&m, d, cfg.tol)?;
        let closed = cpd_closed_form_small_with_tol(&m, d, cfg.tol)?;
        if projection.holds != closed.holds {
            disagreements += 1;
        }
    }
    Ok(ClosedFormAudit {
        tuples: cfg.trials,
        disagreements,
    })
}

fn find_boundaries(cells: &[Cell], cfg: &SweepConfig) -> Vec<Boundary> {
    let mut out = Vec::new();
    for &property in &cfg.properties {
        for &order in &cfg.sizes {
            let row: Vec<&Cell> = cells
                .iter()
                .filter(|c| c.property == property && c.order == order)
                .collect();
            for w in row.windows(2) {
                if w[0].holds != w[1].holds {
                    out.push(Boundary {
                        order,
                        property,
                        lower: w[0].alpha,
                        upper: w[1].alpha,
                        holds_below: w[0].holds,
                    });
                }
            }
        }
    }
    out
}
