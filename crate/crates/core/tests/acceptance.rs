//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::time::{Duration, Instant};

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use loewner_core::definiteness::{self, border_compress, cpd_closed_form_small_with_tol, Definiteness};
use loewner_core::funcs::{FunctionDescriptor as F, Interval};
use loewner_core::intervals::{transfer_psd, ConjugationMap};
use loewner_core::linalg::Matrix;
use loewner_core::loewner::identities::{run_suite, IdentityName};
use loewner_core::loewner::{build, PointTuple};
use loewner_core::matorder::{check_n_convex, run_check, sym_eigen, OrderCheckConfig};
use loewner_core::property::{default_check, Property, PropertyRegistry};
use loewner_core::rng;
use loewner_core::search::{
    hunt, probe_implication, sweep, AlphaGrid, ClassificationTable, HuntConfig, ProbeConfig, ProbeOutcome,
    SweepConfig,
};

const SEED: u64 = 42;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn grid() -> AlphaGrid {
    AlphaGrid::new(-2.0, 4.0, 0.25).unwrap()
}

fn in_ranges(alpha: f64, ranges: &[(f64, f64)]) -> bool {
    ranges.iter().any(|&(lo, hi)| lo <= alpha && alpha <= hi)
}

fn run_sweep(sizes: &[usize], props: &[Property], trials: usize) -> ClassificationTable {
    let cfg = SweepConfig::new(grid(), sizes.to_vec(), props.to_vec(), trials, SEED);
    sweep(&cfg, &PropertyRegistry::with_defaults()).unwrap()
}

fn expect_region(table: &ClassificationTable, order: usize, p: Property, ranges: &[(f64, f64)]) -> Result<(), String> {
    for alpha in grid().values() {
        let cell = table.cell(alpha, order, p).ok_or(format!("missing cell {p} n={order} alpha={alpha}"))?;
        let expected = in_ranges(alpha, ranges);
        ensure(cell.holds == expected, || {
            format!("{p} n={order} alpha={alpha}: holds={} expected {expected}", cell.holds)
        })?;
        if let Some(w) = &cell.witness {
            ensure(w.replay().map(|r| r.reproduces).unwrap_or(false), || {
                format!("{p} n={order} alpha={alpha}: witness does not replay")
            })?;
        }
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let table = run_sweep(&[2], &[Property::Monotone], 500);
    let elapsed = start.elapsed();
    expect_region(&table, 2, Property::Monotone, &[(0.0, 1.0)])?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("2-monotone exactly on [0, 1] over 25 grid points, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let table = run_sweep(&[2], &[Property::Cpd, Property::Cnd], 200);
    expect_region(&table, 2, Property::Cpd, &[(0.0, 1.0), (2.0, 4.0)])?;
    expect_region(&table, 2, Property::Cnd, &[(-2.0, 0.0), (1.0, 2.0)])?;
    let tuples: usize = table.cells.iter().filter_map(|c| c.closed_form.map(|a| a.tuples)).sum();
    let disagreements = table.closed_form_disagreements();
    ensure(tuples > 0, || "closed-form audit saw no tuples".into())?;
    ensure(disagreements == 0, || format!("{disagreements} closed-form disagreements"))?;
    Ok(format!("c.p.d. on [0,1]∪[2,4], c.n.d. on [-2,0]∪[1,2]; {tuples} tuples re-tested in closed form, 0 disagreements"))
}

fn criterion_3() -> Outcome {
    let table = run_sweep(&[3], &[Property::Cpd, Property::Cnd], 2000);
    expect_region(&table, 3, Property::Cpd, &[(0.0, 1.0), (2.0, 3.0)])?;
    expect_region(&table, 3, Property::Cnd, &[(-1.0, 0.0), (1.0, 2.0)])?;
    ensure(table.closed_form_disagreements() == 0, || "closed-form disagreements at order 3".into())?;
    let mut found = Vec::new();
    for (alpha, p) in [(3.25, Property::Cpd), (3.5, Property::Cpd), (-1.25, Property::Cnd), (-1.5, Property::Cnd)] {
        let r = hunt(default_check(p).as_ref(), &F::power(alpha), 3, &HuntConfig::new(2000, SEED)).unwrap();
        let w = r.witness.ok_or(format!("hunt found no {p} violation for alpha={alpha}"))?;
        ensure(r.evaluations <= 2000, || format!("hunt used {} evaluations", r.evaluations))?;
        ensure(w.replay().unwrap().reproduces, || format!("hunt witness for {alpha} does not replay"))?;
        found.push(format!("{alpha}"));
    }
    Ok(format!(
        "c.p.d. on [0,1]∪[2,3], c.n.d. on [-1,0]∪[1,2]; violating triples found for alpha = {}",
        found.join(", ")
    ))
}

fn symmetric(n: usize, r: &mut rng::Rng) -> Matrix {
    let g = Matrix::from_fn(n, n, |_, _| StandardNormal.sample(r));
    (&g + g.transpose()) * 0.5
}

/// `P + u1ᵀ + 1uᵀ + c 11ᵀ` with `P` positive semidefinite of random rank:
/// c.p.d. by construction, with `u` and `c` free.
fn constructed_cpd(n: usize, r: &mut rng::Rng) -> Matrix {
    let rank = r.random_range(0..=n);
    let g = Matrix::from_fn(n, rank, |_, _| StandardNormal.sample(r));
    let p = &g * g.transpose();
    let u: Vec<f64> = (0..n).map(|_| 3.0 * Distribution::<f64>::sample(&StandardNormal, r)).collect();
    let c = 5.0 * Distribution::<f64>::sample(&StandardNormal, r);
    Matrix::from_fn(n, n, |i, j| p[(i, j)] + u[i] + u[j] + c)
}

fn compare_oracles(m: &Matrix, tally: &mut [usize; 3]) {
    let tol = definiteness::DEFAULT_TOL;
    for mode in [Definiteness::Cpd, Definiteness::Cnd] {
        let projection = definiteness::check(m, mode, tol).unwrap();
        if projection.extremal_eigenvalue.abs() <= 1e-8 * projection.scale {
            tally[1] += 1;
            continue;
        }
        tally[0] += 1;
        let closed = cpd_closed_form_small_with_tol(m, mode, tol).unwrap();
        tally[2] += usize::from(closed.holds != projection.holds);
    }
}

fn criterion_4() -> Outcome {
    // [compared, filtered, disagreements]
    let mut uniform = [0usize; 3];
    for k in 0..10_000u64 {
        let mut r = rng::stream(SEED, k);
        let mut m = Matrix::zeros(3, 3);
        for i in 0..3 {
            for j in i..3 {
                let x = r.random_range(-5.0..5.0);
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        compare_oracles(&m, &mut uniform);
    }
    // extra stress near the boundary: c.p.d. by construction, optionally nudged, over many scales
    let mut structured = [0usize; 3];
    for k in 0..5_000u64 {
        let mut r = rng::stream(rng::child_seed(SEED, 4), k);
        let scale = 10f64.powf(r.random_range(-2.0..3.0));
        let mut m = constructed_cpd(3, &mut r);
        if k % 2 == 1 {
            m += symmetric(3, &mut r) * 1e-3;
        }
        compare_oracles(&(m * scale), &mut structured);
    }
    ensure(uniform[2] == 0, || format!("{} disagreements in {} uniform comparisons", uniform[2], uniform[0]))?;
    ensure(structured[2] == 0, || {
        format!("{} disagreements in {} structured comparisons", structured[2], structured[0])
    })?;
    Ok(format!(
        "10000 uniform(-5,5) matrices: {} comparisons ({} filtered), 0 disagreements; 5000 near-boundary extras: {} comparisons, 0 disagreements",
        uniform[0], uniform[1], structured[0]
    ))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let reports = run_suite(1000, 1e-9, SEED).unwrap();
    let elapsed = start.elapsed();
    ensure(reports.len() == IdentityName::ALL.len(), || "identity suite incomplete".into())?;
    for r in &reports {
        ensure(r.evaluations == 1000 && r.passed(), || {
            format!("{}: {} failures, max relative residual {:e}", r.identity, r.failures, r.max_relative)
        })?;
    }
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    let worst = reports.iter().map(|r| r.max_relative).fold(0.0, f64::max);
    Ok(format!("9 identities x 1000 evaluations, max relative residual {worst:.1e}, {elapsed:.2?}"))
}

fn criterion_6() -> Outcome {
    let mut worst = f64::INFINITY;
    for k in 0..1000u64 {
        let mut r = rng::stream(rng::child_seed(SEED, 6), k);
        let n = r.random_range(2..=7);
        let m = match k % 2 {
            0 => constructed_cpd(n, &mut r),
            _ => {
                // -|x_i - x_j|^p is c.p.d. for 0 < p <= 2
                let p: f64 = r.random_range(0.1..=2.0);
                let x: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..5.0)).collect();
                Matrix::from_fn(n, n, |i, j| -(x[i] - x[j]).abs().powf(p))
            }
        };
        let scale = sym_eigen(&m).unwrap().spectral_radius().max(1.0);
        let min = sym_eigen(&border_compress(&m).unwrap()).unwrap().min();
        ensure(min >= -1e-9 * scale, || format!("matrix {k}: min eigenvalue {min:e} at scale {scale:e}"))?;
        worst = worst.min(min / scale);
    }
    Ok(format!("1000 c.p.d. matrices, smallest scaled eigenvalue after compression {worst:.1e}"))
}

fn criterion_7() -> Outcome {
    let registry = PropertyRegistry::with_defaults();
    // t³ at (1, 2): ⟨(1,-1), L (1,-1)⟩ = f'(1) + f'(2) - 2 (f(2) - f(1)) = 3 + 12 - 14 = 1
    let cube = F::power(3.0);
    let l = build(&cube, &PointTuple::new(vec![1.0, 2.0]).unwrap()).unwrap();
    let margin = l.entries[(0, 0)] + l.entries[(1, 1)] - 2.0 * l.entries[(0, 1)];
    ensure(margin == 1.0, || format!("t^3 margin {margin}, expected 1"))?;
    let v = definiteness::is_cnd(&l.entries, definiteness::DEFAULT_TOL).unwrap();
    ensure(!v.holds && (v.extremal_eigenvalue + 0.5).abs() < 1e-12, || format!("t^3 c.n.d. verdict {v:?}"))?;
    let convex1 = check_n_convex(&cube, 1, &OrderCheckConfig::new(1000, SEED)).unwrap();
    ensure(!convex1.found_counterexample(), || "t^3 failed scalar convexity".into())?;

    let inv2 = F::power(-2.0);
    let cnd2 = run_check(default_check(Property::Cnd).as_ref(), &inv2, 2, &OrderCheckConfig::new(500, SEED)).unwrap();
    ensure(!cnd2.found_counterexample(), || "t^-2 size-2 c.n.d. failed".into())?;
    let conv2 = check_n_convex(&inv2, 2, &OrderCheckConfig::new(1000, SEED)).unwrap();
    let w = conv2.witness.ok_or("no 2-convexity counterexample for t^-2 in 1000 trials")?;
    ensure(w.replay().unwrap().reproduces, || "t^-2 convexity witness does not replay".into())?;

    let g = F::moebius_convex(0.5).negated().restricted(Interval::new(0.0, 1.0).unwrap());
    for n in 2..=4 {
        let r = run_check(default_check(Property::Cnd).as_ref(), &g, n, &OrderCheckConfig::new(500, SEED)).unwrap();
        ensure(!r.found_counterexample(), || format!("-g_0.5 size-{n} c.n.d. failed"))?;
    }
    let scalar = check_n_convex(&g, 1, &OrderCheckConfig::new(500, SEED)).unwrap();
    ensure(scalar.found_counterexample(), || "-g_0.5 passed scalar convexity".into())?;

    let mut cfg = ProbeConfig::new(500, SEED);
    cfg.hunt_budget = 1000;
    for id in ["convex[1]=/=>cnd+bound[2]", "cnd+bound[2]=/=>convex[2]", "cnd[4]=/=>convex[1]"] {
        let r = probe_implication(id, &cfg, &registry).unwrap();
        ensure(r.outcome == ProbeOutcome::Demonstrated, || format!("{id}: {:?}", r.outcome))?;
    }
    Ok(format!(
        "t^3 c.n.d. margin 1 with scalar convexity intact; t^-2 convexity witness at trial {}; -g_0.5 on (0,1) c.n.d. up to size 4, scalar convexity fails",
        w.trial
    ))
}

fn criterion_8() -> Outcome {
    let map = ConjugationMap::new(0.1, 5.0).unwrap();
    let (mut tuples, mut mismatches, mut failing) = (0, 0, 0);
    for alpha in [0.5, 1.5] {
        let f = F::power(alpha).restricted(Interval::new(0.1, 5.0).unwrap());
        for n in [2, 3] {
            for k in 0..300u64 {
                let mut r = rng::stream(rng::child_seed(SEED, 8), (alpha.to_bits() ^ n) + k * 16);
                let points: Vec<f64> = (0..n).map(|_| r.random_range(0.1001..4.999)).collect();
                let c = transfer_psd(&f, map, &points, definiteness::DEFAULT_TOL).unwrap();
                tuples += 1;
                mismatches += usize::from(!c.agree);
                failing += usize::from(!c.direct.holds);
            }
        }
    }
    ensure(mismatches == 0, || format!("{mismatches} mismatches in {tuples} tuples"))?;
    ensure(failing > 0, || "no tuple failed PSD, so the comparison is vacuous".into())?;
    Ok(format!("{tuples} tuples ({failing} non-PSD), 0 mismatches"))
}

fn reports_json() -> Vec<String> {
    let registry = PropertyRegistry::with_defaults();
    let mut out = Vec::new();
    let cfg = SweepConfig::new(grid(), vec![2, 3], vec![Property::Monotone, Property::Cpd, Property::Cnd], 200, SEED);
    out.push(serde_json::to_string(&sweep(&cfg, &registry).unwrap()).unwrap());
    let h = hunt(default_check(Property::Cpd).as_ref(), &F::power(3.5), 3, &HuntConfig::new(2000, SEED)).unwrap();
    out.push(serde_json::to_string(&h).unwrap());
    out.push(serde_json::to_string(&run_suite(200, 1e-9, SEED).unwrap()).unwrap());
    let p = probe_implication("convex[2n+1]=>cnd+bound[n]", &ProbeConfig::new(100, SEED), &registry).unwrap();
    out.push(serde_json::to_string(&p).unwrap());
    out
}

fn criterion_9() -> Outcome {
    let first = reports_json();
    let second = reports_json();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(reports_json);
    ensure(first == second, || "repeated run differs".into())?;
    ensure(first == single, || "single-threaded run differs".into())?;
    let bytes: usize = first.iter().map(String::len).sum();
    Ok(format!("{} reports ({bytes} bytes) identical across 3 runs incl. one single-threaded", first.len()))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("1 power-function 2-monotonicity region", criterion_1),
        ("2 size-2 c.p.d./c.n.d. regions and closed form", criterion_2),
        ("3 size-3 c.p.d./c.n.d. regions and hunts", criterion_3),
        ("4 closed-form vs projection on 3x3 matrices", criterion_4),
        ("5 identity suite", criterion_5),
        ("6 border compression of c.p.d. matrices", criterion_6),
        ("7 non-implication demonstrations", criterion_7),
        ("8 conjugation transfer of PSD verdicts", criterion_8),
        ("9 determinism", criterion_9),
    ];
    // `cargo test -- <filter>` passes extra arguments; run everything regardless
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{:.2?}]", start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
