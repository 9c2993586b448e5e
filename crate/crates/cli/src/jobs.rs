use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use loewner_core::definiteness::{self, Definiteness};
use loewner_core::funcs::{FunctionDescriptor, Interval, WeightTag};
use loewner_core::intervals::{
    assess, boundary_estimate, conjugate, limit_identity_grid, transfer_psd, verify_conjugation_dd, ConjugationMap,
    GridSpec, LimitKind, Requirement, RequirementStatus, TransferKind,
};
use loewner_core::loewner::identities::{run_identity, IdentityName};
use loewner_core::loewner::{build, weighted, PointTuple};
use loewner_core::matorder::{run_check, OrderCheckConfig, OrderCheckReport};
use loewner_core::property::{Property, PropertyRegistry};
use loewner_core::rng;
use loewner_core::search::implication::{BoundaryTemplate, Claim, Implication, ProbeConfig, ProbeOutcome, Status};
use loewner_core::search::{hunt, probe_implication, sweep, AlphaGrid, Family, HuntConfig, SweepConfig};
use loewner_core::witness::Witness;

use crate::output::{csv_table, Format};

/// Everything needed to reproduce a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub job: Job,
    pub seed: u64,
    pub tol: f64,
    pub format: Format,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Job {
    Build {
        function: FunctionDescriptor,
        points: PointTuple,
        weight: WeightTag,
        interval: Option<Interval>,
    },
    Check {
        function: FunctionDescriptor,
        weight: WeightTag,
        property: Definiteness,
        order: usize,
        trials: usize,
        points: Option<PointTuple>,
        interval: Option<Interval>,
    },
    Order {
        function: FunctionDescriptor,
        property: Property,
        order: usize,
        trials: usize,
        interval: Option<Interval>,
    },
    Sweep {
        family: Family,
        alpha: AlphaGrid,
        orders: Vec<usize>,
        properties: Vec<Property>,
        trials: usize,
        audit: bool,
    },
    Hunt {
        function: FunctionDescriptor,
        property: Property,
        order: usize,
        budget: usize,
        interval: Option<Interval>,
    },
    Probe {
        id: String,
        sizes: Vec<usize>,
        trials: usize,
        hunt_budget: usize,
    },
    Conjugate {
        function: FunctionDescriptor,
        points: Option<PointTuple>,
        limits: bool,
    },
    VerifyIdentities {
        identities: Vec<IdentityName>,
        evaluations: usize,
    },
    Boundary {
        function: FunctionDescriptor,
        template: BoundaryTemplate,
        requirement: Option<Requirement>,
        grid: GridSpec,
    },
    Replay {
        witness: Witness,
    },
}

/// A finished run in every output shape.
pub struct Report {
    pub result: Value,
    pub csv: String,
    pub human: String,
    /// A counterexample, failed identity or refuted claim was found.
    pub counterexample: bool,
}

pub fn describe(imp: &Implication) -> String {
    let hyp: Vec<String> = imp
        .hypotheses
        .iter()
        .map(|h| serde_json::to_value(h).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default())
        .collect();
    let mut s = match &imp.claim {
        Claim::Implies { min_n } if *min_n > 1 => format!("implication, n >= {min_n}"),
        Claim::Implies { .. } => "implication".to_string(),
        Claim::Fails { function } => format!("counterexample {}", function.label()),
    };
    if !hyp.is_empty() {
        s.push_str(&format!("; assumes {}", hyp.join(", ")));
    }
    if imp.finite_interval {
        s.push_str("; finite interval");
    }
    s
}

fn endpoints(f: &FunctionDescriptor, interval: Option<Interval>) -> (Option<f64>, Option<f64>) {
    let j = interval.unwrap_or_else(|| f.domain());
    (j.lo.is_finite().then_some(j.lo), j.hi.is_finite().then_some(j.hi))
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

pub fn execute(cfg: &RunConfig) -> Result<Report> {
    let registry = PropertyRegistry::with_defaults();
    let (seed, tol) = (cfg.seed, cfg.tol);
    Ok(match &cfg.job {
        Job::Build {
            function,
            points,
            weight,
            interval,
        } => {
            let (a, b) = endpoints(function, *interval);
            let g = weighted(function, *weight, a, b)?;
            let m = build(&g, points)?;
            let n = m.order();
            let mut header = vec!["t".to_string()];
            header.extend(points.as_slice().iter().map(|&t| fmt_num(t)));
            let rows: Vec<Vec<String>> = (0..n)
                .map(|i| {
                    let mut r = vec![fmt_num(points.as_slice()[i])];
                    r.extend((0..n).map(|j| fmt_num(m.entries[(i, j)])));
                    r
                })
                .collect();
            let mut human = format!("Loewner matrix of {} at {}\n", g.label(), points);
            for r in &rows {
                human.push_str(&format!("  {}\n", r[1..].join("  ")));
            }
            Report {
                result: serde_json::to_value(&m)?,
                csv: csv_table(&header, &rows)?,
                human,
                counterexample: false,
            }
        }
        Job::Check {
            function,
            weight,
            property,
            order,
            trials,
            points,
            interval,
        } => {
            let (a, b) = endpoints(function, *interval);
            let g = weighted(function, *weight, a, b)?;
            match points {
                Some(points) => {
                    let m = build(&g, points)?;
                    let v = definiteness::check(&m.entries, *property, tol)?;
                    let header = ["property", "order", "function", "points", "holds", "extremal_eigenvalue", "threshold"];
                    let row = vec![
                        property.to_string(),
                        points.len().to_string(),
                        g.label(),
                        points.to_string(),
                        v.holds.to_string(),
                        fmt_num(v.extremal_eigenvalue),
                        fmt_num(v.threshold()),
                    ];
                    let human = format!(
                        "{} of L at {} for {}: {} (extremal eigenvalue {:e}, threshold {:e})\n",
                        property,
                        points,
                        g.label(),
                        if v.holds { "holds" } else { "fails" },
                        v.extremal_eigenvalue,
                        v.threshold()
                    );
                    Report {
                        result: json!({ "function": g, "matrix": m, "verdict": v }),
                        csv: csv_table(&header, &[row])?,
                        human,
                        counterexample: !v.holds,
                    }
                }
                None => {
                    let p = match property {
                        Definiteness::Psd => Property::Psd,
                        Definiteness::Cpd => Property::Cpd,
                        Definiteness::Cnd => Property::Cnd,
                    };
                    order_report(&registry, &g, p, *order, *trials, *interval, seed, tol)?
                }
            }
        }
        Job::Order {
            function,
            property,
            order,
            trials,
            interval,
        } => order_report(&registry, function, *property, *order, *trials, *interval, seed, tol)?,
        Job::Sweep {
            family,
            alpha,
            orders,
            properties,
            trials,
            audit,
        } => {
            let mut sc = SweepConfig::new(*alpha, orders.clone(), properties.clone(), *trials, seed);
            sc.family = *family;
            sc.tol = tol;
            sc.closed_form_audit = *audit;
            let table = sweep(&sc, &registry)?;
            let values = alpha.values();
            let mut human = format!("{} family, parameter grid {}\n", family, alpha);
            for &order in orders {
                for &p in properties {
                    let holding = table.holding(order, p);
                    human.push_str(&format!(
                        "  {p} order {order}: holds on {}\n",
                        ranges(&values, &holding)
                    ));
                }
            }
            if *audit {
                human.push_str(&format!(
                    "  closed-form audit disagreements: {}\n",
                    table.closed_form_disagreements()
                ));
            }
            Report {
                counterexample: table.cells.iter().any(|c| !c.holds),
                csv: table.to_csv(),
                result: serde_json::to_value(&table)?,
                human,
            }
        }
        Job::Hunt {
            function,
            property,
            order,
            budget,
            interval,
        } => {
            let mut hc = HuntConfig::new(*budget, seed);
            hc.tol = tol;
            hc.interval = *interval;
            let r = hunt(registry.get(property.name())?, function, *order, &hc)?;
            let header = ["property", "order", "function", "budget", "evaluations", "verdict", "found_in", "best_score", "violation"];
            let row = vec![
                property.to_string(),
                order.to_string(),
                function.label(),
                budget.to_string(),
                r.evaluations.to_string(),
                verdict_word(r.witness.is_some()).to_string(),
                r.found_in.map(|p| format!("{p:?}").to_lowercase()).unwrap_or_default(),
                fmt_num(r.best_score),
                r.witness.as_ref().map(|w| fmt_num(w.violation)).unwrap_or_default(),
            ];
            let mut human = format!(
                "hunt {property} order {order} for {} ({} evaluations): {}\n",
                function.label(),
                r.evaluations,
                verdict_word(r.witness.is_some())
            );
            if let Some(w) = &r.witness {
                human.push_str(&witness_line(w));
            }
            Report {
                counterexample: r.witness.is_some(),
                result: serde_json::to_value(&r)?,
                csv: csv_table(&header, &[row])?,
                human,
            }
        }
        Job::Probe {
            id,
            sizes,
            trials,
            hunt_budget,
        } => {
            let mut pc = ProbeConfig::new(*trials, seed);
            pc.sizes = sizes.clone();
            pc.hunt_budget = *hunt_budget;
            pc.tol = tol;
            let r = probe_implication(id, &pc, &registry)?;
            let status = |s: Option<Status>| s.map(|s| format!("{s:?}").to_lowercase()).unwrap_or_default();
            let header = ["function", "n", "hypotheses_met", "antecedent_order", "antecedent", "consequent_order", "consequent", "separates"];
            let rows: Vec<Vec<String>> = r
                .rows
                .iter()
                .map(|row| {
                    vec![
                        row.function.clone(),
                        row.n.to_string(),
                        row.hypotheses_met.to_string(),
                        row.antecedent.as_ref().map(|c| c.order.to_string()).unwrap_or_default(),
                        status(row.antecedent.as_ref().map(|c| c.status)),
                        row.consequent.as_ref().map(|c| c.order.to_string()).unwrap_or_default(),
                        status(row.consequent.as_ref().map(|c| c.status)),
                        row.separates().to_string(),
                    ]
                })
                .collect();
            let mut human = format!(
                "{id}: {:?} ({} of {} rows tested the claim)\n",
                r.outcome,
                r.tested,
                r.rows.len()
            );
            for row in r.rows.iter().filter(|row| row.separates()) {
                match row.n {
                    0 => human.push_str(&format!("  separated by {}\n", row.function)),
                    n => human.push_str(&format!("  separated by {} at n = {n}\n", row.function)),
                }
            }
            Report {
                counterexample: matches!(r.outcome, ProbeOutcome::Inconsistent | ProbeOutcome::NotDemonstrated),
                result: serde_json::to_value(&r)?,
                csv: csv_table(&header, &rows)?,
                human,
            }
        }
        Job::Conjugate {
            function,
            points,
            limits,
        } => conjugate_report(function, points.as_ref(), *limits, tol)?,
        Job::VerifyIdentities {
            identities,
            evaluations,
        } => {
            let mut reports = Vec::new();
            for &id in identities {
                let index = IdentityName::ALL.iter().position(|&x| x == id).unwrap_or(0) as u64;
                reports.push(run_identity(id, *evaluations, tol, rng::child_seed(seed, index))?);
            }
            let header = ["identity", "evaluations", "failures", "max_relative", "passed"];
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.identity.name().to_string(),
                        r.evaluations.to_string(),
                        r.failures.to_string(),
                        fmt_num(r.max_relative),
                        r.passed().to_string(),
                    ]
                })
                .collect();
            let mut human = String::new();
            for r in &reports {
                human.push_str(&format!(
                    "{:<18} {} / {} within {:e} (max relative residual {:e})\n",
                    r.identity.name(),
                    r.evaluations - r.failures,
                    r.evaluations,
                    tol,
                    r.max_relative
                ));
            }
            Report {
                counterexample: reports.iter().any(|r| !r.passed()),
                result: serde_json::to_value(&reports)?,
                csv: csv_table(&header, &rows)?,
                human,
            }
        }
        Job::Boundary {
            function,
            template,
            requirement,
            grid,
        } => {
            let kind = template.resolve(&function.domain());
            let est = boundary_estimate(function, kind, *grid)?;
            let status = requirement.map(|r| assess(&est, r, tol));
            let header = ["t", "value"];
            let rows: Vec<Vec<String>> = est
                .grid
                .iter()
                .zip(&est.values)
                .map(|(t, v)| vec![fmt_num(*t), fmt_num(*v)])
                .collect();
            let mut human = format!("{:?} for {}: {:?} (heuristic)\n", kind, function.label(), est.trend);
            if let (Some(r), Some(s)) = (requirement, status) {
                human.push_str(&format!("  requirement {r}: {s:?}\n"));
            }
            Report {
                counterexample: status == Some(RequirementStatus::Refuted),
                result: json!({ "estimate": est, "requirement": requirement, "status": status }),
                csv: csv_table(&header, &rows)?,
                human,
            }
        }
        Job::Replay { witness } => {
            let r = witness.replay()?;
            let header = ["property", "order", "function", "recorded_violation", "violation", "threshold", "reproduces"];
            let row = vec![
                witness.property.to_string(),
                witness.order.to_string(),
                witness.function.label(),
                fmt_num(witness.violation),
                fmt_num(r.violation),
                fmt_num(r.threshold),
                r.reproduces.to_string(),
            ];
            let human = format!(
                "{} order {} for {}: violation {:e} against threshold {:e}, {}\n",
                witness.property,
                witness.order,
                witness.function.label(),
                r.violation,
                r.threshold,
                if r.reproduces { "reproduces" } else { "does not reproduce" }
            );
            Report {
                counterexample: r.reproduces,
                result: json!({ "witness": witness, "replay": r }),
                csv: csv_table(&header, &[row])?,
                human,
            }
        }
    })
}

fn verdict_word(found: bool) -> &'static str {
    if found {
        "counterexample"
    } else {
        "no-counterexample"
    }
}

fn witness_line(w: &Witness) -> String {
    format!(
        "  witness (trial {}): violation {:e} > threshold {:e}\n  {}\n",
        w.trial,
        w.violation,
        w.threshold,
        serde_json::to_string(&w.payload).unwrap_or_default()
    )
}

#[allow(clippy::too_many_arguments)]
fn order_report(
    registry: &PropertyRegistry,
    f: &FunctionDescriptor,
    property: Property,
    order: usize,
    trials: usize,
    interval: Option<Interval>,
    seed: u64,
    tol: f64,
) -> Result<Report> {
    let mut oc = OrderCheckConfig::new(trials, seed).with_tol(tol);
    oc.interval = interval;
    let r: OrderCheckReport = run_check(registry.get(property.name())?, f, order, &oc)?;
    let header = ["property", "order", "function", "interval", "verdict", "trials", "seed", "tolerance", "violation", "trial"];
    let row = vec![
        property.to_string(),
        order.to_string(),
        f.label(),
        r.interval.to_string(),
        verdict_word(r.found_counterexample()).to_string(),
        trials.to_string(),
        seed.to_string(),
        fmt_num(tol),
        r.witness.as_ref().map(|w| fmt_num(w.violation)).unwrap_or_default(),
        r.witness.as_ref().map(|w| w.trial.to_string()).unwrap_or_default(),
    ];
    let mut human = format!(
        "{property} order {order} for {} on {} ({trials} trials): {}\n",
        f.label(),
        r.interval,
        verdict_word(r.found_counterexample())
    );
    if let Some(w) = &r.witness {
        human.push_str(&witness_line(w));
    }
    Ok(Report {
        counterexample: r.found_counterexample(),
        result: serde_json::to_value(&r)?,
        csv: csv_table(&header, &[row])?,
        human,
    })
}

fn conjugate_report(f: &FunctionDescriptor, points: Option<&PointTuple>, limits: bool, tol: f64) -> Result<Report> {
    let domain = f.domain();
    if !domain.is_bounded() {
        bail!("conjugate needs a function on a finite interval, {} lives on {domain}", f.label());
    }
    let map = ConjugationMap::for_interval(&domain)?;
    let g = conjugate(f)?;
    let ts: Vec<f64> = match points {
        Some(p) => p.as_slice().to_vec(),
        None => (1..=5).map(|k| domain.lo + domain.width() * k as f64 / 6.0).collect(),
    };
    let header = ["t", "x", "f", "conjugate"];
    let mut rows = Vec::new();
    for &t in &ts {
        let x = map.psi(t)?;
        rows.push(vec![fmt_num(t), fmt_num(x), fmt_num(f.eval(t)?), fmt_num(g.eval(x)?)]);
    }
    let mut identities = Vec::new();
    let mut failures = 0;
    for kind in TransferKind::ALL {
        for i in 0..ts.len() {
            for j in i..ts.len() {
                let c = verify_conjugation_dd(f, map, kind, ts[i], ts[j])?;
                if !c.holds(tol) {
                    failures += 1;
                }
                identities.push(json!({ "kind": kind, "t": [ts[i], ts[j]], "check": c }));
            }
        }
    }
    let psd = transfer_psd(f, map, &ts, tol)?;
    let mut limit_grids = Vec::new();
    if limits {
        for kind in LimitKind::ALL {
            limit_grids.push(match limit_identity_grid(f, map, kind, GridSpec::default()) {
                Ok(grid) => json!({ "kind": kind, "grid": grid }),
                Err(e) => json!({ "kind": kind, "error": e.to_string() }),
            });
        }
    }
    let mut human = format!(
        "{} on {domain} -> {} on (0, inf)\n  transfer identities: {} of {} within {:e}\n  PSD verdicts agree: {}\n",
        f.label(),
        g.label(),
        identities.len() - failures,
        identities.len(),
        tol,
        psd.agree
    );
    for r in &rows {
        human.push_str(&format!("  t = {}  x = {}  f = {}  conjugate = {}\n", r[0], r[1], r[2], r[3]));
    }
    Ok(Report {
        counterexample: failures > 0 || !psd.agree,
        result: json!({
            "map": map,
            "conjugate": g,
            "identities": identities,
            "psd": psd,
            "limits": limit_grids,
        }),
        csv: csv_table(&header, &rows)?,
        human,
    })
}

/// Compresses grid values into runs such as `[0, 1] ∪ {2.5}`.
fn ranges(grid: &[f64], holding: &[f64]) -> String {
    let mut runs: Vec<(f64, f64)> = Vec::new();
    let mut prev_in = false;
    for &v in grid {
        let inside = holding.contains(&v);
        if inside {
            match runs.last_mut() {
                Some(run) if prev_in => run.1 = v,
                _ => runs.push((v, v)),
            }
        }
        prev_in = inside;
    }
    if runs.is_empty() {
        return "nothing".to_string();
    }
    runs.iter()
        .map(|&(a, b)| if a == b { format!("{{{a}}}") } else { format!("[{a}, {b}]") })
        .collect::<Vec<_>>()
        .join(" ∪ ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_compress_runs() {
        let grid = [-1.0, -0.5, 0.0, 0.5, 1.0, 1.5];
        assert_eq!(ranges(&grid, &[-1.0, -0.5, 1.0, 1.5]), "[-1, -0.5] ∪ [1, 1.5]");
        assert_eq!(ranges(&grid, &[0.5]), "{0.5}");
        assert_eq!(ranges(&grid, &[]), "nothing");
    }
}
