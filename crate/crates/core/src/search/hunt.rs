//! Targeted counterexample search: random sampling, structured extremes, then
//! multiplicative coordinate descent on the best candidate.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::definiteness::DEFAULT_TOL;
use crate::error::{Error, Result};
use crate::funcs::{FunctionDescriptor, Interval};
use crate::linalg::symmetrize;
use crate::matorder::sampling::{SamplingConfig, SamplingWindow};
use crate::property::{Property, PropertyCheck, TrialContext};
use crate::rng::{self, Rng};
use crate::witness::{Witness, WitnessPayload};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HuntConfig {
    /// Total number of candidate evaluations across all phases.
    pub budget: usize,
    pub seed: u64,
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<Interval>,
    /// Magnitudes the extremes phase pushes coordinates toward.
    pub extreme_high: f64,
    pub extreme_low: f64,
    /// Point tuples closer than this relative distance are not evaluated.
    pub min_separation: f64,
    /// Fix the last point at 1 for homogeneous functions on `(0, ∞)`.
    pub pin: bool,
    #[serde(default)]
    pub sampling: SamplingConfig,
}

impl HuntConfig {
    pub fn new(budget: usize, seed: u64) -> Self {
        Self {
            budget,
            seed,
            tol: DEFAULT_TOL,
            interval: None,
            extreme_high: 1e3,
            extreme_low: 1e-3,
            min_separation: 1e-4,
            pin: true,
            sampling: SamplingConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HuntPhase {
    Random,
    Extremes,
    Refine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HuntResult {
    pub property: Property,
    pub order: usize,
    pub function: FunctionDescriptor,
    pub budget: usize,
    pub evaluations: usize,
    /// Largest `violation / scale` seen; negative when every candidate satisfied the property.
    pub best_score: f64,
    pub best_phase: Option<HuntPhase>,
    /// Phase that first produced a candidate beyond tolerance.
    pub found_in: Option<HuntPhase>,
    /// Best score after each accepted refinement step.
    pub refinement: Vec<f64>,
    pub witness: Option<Witness>,
    pub seed: u64,
    pub tolerance: f64,
}

struct Best {
    payload: WitnessPayload,
    score: f64,
    violation: f64,
    scale: f64,
    index: usize,
    phase: HuntPhase,
}

struct Search<'a> {
    check: &'a dyn PropertyCheck,
    f: &'a FunctionDescriptor,
    tol: f64,
    evaluations: usize,
    best: Option<Best>,
    found_in: Option<HuntPhase>,
}

impl Search<'_> {
    /// Scores a candidate; returns true when it became the new best.
    fn consider(&mut self, payload: WitnessPayload, phase: HuntPhase) -> bool {
        let index = self.evaluations;
        self.evaluations += 1;
        let Ok(gap) = self.check.evaluate(self.f, &payload) else {
            return false;
        };
        let score = -gap.value / gap.scale;
        if !score.is_finite() {
            return false;
        }
        if score > self.tol && self.found_in.is_none() {
            self.found_in = Some(phase);
        }
        if self.best.as_ref().is_some_and(|b| score <= b.score) {
            return false;
        }
        self.best = Some(Best {
            payload,
            score,
            violation: -gap.value,
            scale: gap.scale,
            index,
            phase,
        });
        true
    }
}

/// Searches for a violation of `check`'s property by `f` at order `n`.
///
/// Half the budget goes to random candidates, a quarter to candidates with
/// coordinates pushed toward `extreme_high` / `extreme_low`, and the rest to
/// coordinate descent from the best candidate. A returned witness always
/// exceeds the tolerance; `None` is a valid outcome.
pub fn hunt(check: &dyn PropertyCheck, f: &FunctionDescriptor, n: usize, cfg: &HuntConfig) -> Result<HuntResult> {
    if cfg.budget == 0 {
        return Err(Error::config("hunt budget must be at least 1"));
    }
    if n < check.min_order() {
        return Err(Error::config(format!("{} needs order at least {}", check.name(), check.min_order())));
    }
    f.validate()?;
    let domain = f.domain();
    let interval = cfg.interval.unwrap_or(domain);
    if !domain.contains_interval(&interval) {
        return Err(Error::config(format!("hunt interval {interval} is not inside {domain}")));
    }
    let ctx = TrialContext {
        interval,
        window: SamplingWindow::for_interval(&interval, &cfg.sampling)?,
        sampling: cfg.sampling,
    };
    let mut search = Search {
        check,
        f,
        tol: cfg.tol,
        evaluations: 0,
        best: None,
        found_in: None,
    };
    let random_budget = cfg.budget.div_ceil(2);
    let extreme_budget = cfg.budget / 4;
    let mut refinement = Vec::new();

    match check.property() {
        Property::Psd | Property::Cpd | Property::Cnd => {
            let space = PointSpace::new(f, &interval, n, cfg);
            let mut r = rng::stream(cfg.seed, 0);
            while search.evaluations < random_budget {
                let p = space.random(&ctx.window, &mut r);
                search.consider(points(p), HuntPhase::Random);
            }
            let mut r = rng::stream(cfg.seed, 1);
            let mut k = 0;
            while search.evaluations < random_budget + extreme_budget {
                let p = space.extreme(&ctx.window, k, &mut r);
                k += 1;
                search.consider(points(p), HuntPhase::Extremes);
            }
            space.refine(&mut search, cfg, &mut refinement);
        }
        Property::Monotone | Property::Convex | Property::Concave => {
            let mut r = rng::stream(cfg.seed, 0);
            while search.evaluations < random_budget {
                match check.sample(f, n, &ctx, &mut r) {
                    Ok(p) => {
                        search.consider(p, HuntPhase::Random);
                    }
                    Err(_) => search.evaluations += 1,
                }
            }
            let mut r = rng::stream(cfg.seed, 1);
            let mut k = 0;
            while search.evaluations < random_budget + extreme_budget {
                let ectx = extreme_context(&ctx, k);
                k += 1;
                match check.sample(f, n, &ectx, &mut r) {
                    Ok(p) => {
                        search.consider(p, HuntPhase::Extremes);
                    }
                    Err(_) => search.evaluations += 1,
                }
            }
            refine_pair(&mut search, cfg, &mut refinement);
        }
        Property::Contraction => {
            return Err(Error::config("hunting is not supported for the contraction property"));
        }
    }

    let witness = search.best.as_ref().filter(|b| b.score > cfg.tol).map(|b| Witness {
        property: check.property(),
        function: f.clone(),
        order: n,
        payload: b.payload.clone(),
        violation: b.violation,
        threshold: cfg.tol * b.scale,
        tolerance: cfg.tol,
        seed: cfg.seed,
        trial: b.index as u64,
    });
    Ok(HuntResult {
        property: check.property(),
        order: n,
        function: f.clone(),
        budget: cfg.budget,
        evaluations: search.evaluations,
        best_score: search.best.as_ref().map_or(f64::NEG_INFINITY, |b| b.score),
        best_phase: search.best.as_ref().map(|b| b.phase),
        found_in: search.found_in,
        refinement,
        witness,
        seed: cfg.seed,
        tolerance: cfg.tol,
    })
}

fn points(points: Vec<f64>) -> WitnessPayload {
    WitnessPayload::Points { points }
}

/// Point coordinates are searched in an unbounded parameter `u`.
#[derive(Clone, Copy)]
enum Chart {
    /// `t = lo + e^u`
    Above { lo: f64 },
    /// `t = hi - e^u`
    Below { hi: f64 },
    /// `t = lo + w / (1 + e^-u)`
    Bounded { lo: f64, w: f64 },
    /// `t = u`
    Line,
}

/// Coordinates are kept within these parameter bounds during refinement.
const LOG_BOUND: f64 = 13.815510557964274; // ln 1e6
const LOGIT_BOUND: f64 = 30.0;
const LINE_BOUND: f64 = 1e6;

impl Chart {
    fn to_t(self, u: f64) -> f64 {
        match self {
            Chart::Above { lo } => lo + u.exp(),
            Chart::Below { hi } => hi - u.exp(),
            Chart::Bounded { lo, w } => lo + w / (1.0 + (-u).exp()),
            Chart::Line => u,
        }
    }

    fn to_u(self, t: f64) -> f64 {
        match self {
            Chart::Above { lo } => (t - lo).ln(),
            Chart::Below { hi } => (hi - t).ln(),
            Chart::Bounded { lo, w } => {
                let p = (t - lo) / w;
                (p / (1.0 - p)).ln()
            }
            Chart::Line => t,
        }
    }

    fn clamp(self, u: f64) -> f64 {
        match self {
            Chart::Above { .. } | Chart::Below { .. } => u.clamp(-LOG_BOUND, LOG_BOUND),
            Chart::Bounded { .. } => u.clamp(-LOGIT_BOUND, LOGIT_BOUND),
            Chart::Line => u.clamp(-LINE_BOUND, LINE_BOUND),
        }
    }

    /// Additive step in `u` for one refinement move of size `s`.
    fn step(self, s: f64, u: f64) -> f64 {
        match self {
            Chart::Line => s * u.abs().max(1.0),
            _ => s,
        }
    }
}

struct PointSpace {
    chart: Chart,
    n: usize,
    /// Number of coordinates that move; the rest are pinned at 1.
    free: usize,
    high: f64,
    low: f64,
    min_separation: f64,
}

impl PointSpace {
    fn new(f: &FunctionDescriptor, j: &Interval, n: usize, cfg: &HuntConfig) -> Self {
        let chart = match (j.lo.is_finite(), j.hi.is_finite()) {
            (true, true) => Chart::Bounded { lo: j.lo, w: j.width() },
            (true, false) => Chart::Above { lo: j.lo },
            (false, true) => Chart::Below { hi: j.hi },
            (false, false) => Chart::Line,
        };
        let pinned = cfg.pin && n >= 2 && *j == Interval::positive() && f.is_homogeneous();
        Self {
            chart,
            n,
            free: if pinned { n - 1 } else { n },
            high: cfg.extreme_high,
            low: cfg.extreme_low,
            min_separation: cfg.min_separation,
        }
    }

    fn complete(&self, mut free: Vec<f64>) -> Vec<f64> {
        free.resize(self.n, 1.0);
        free
    }

    fn separated(&self, t: &[f64]) -> bool {
        t.iter().enumerate().all(|(i, &a)| {
            t[i + 1..]
                .iter()
                .all(|&b| (a - b).abs() >= self.min_separation * a.abs().max(b.abs()).max(f64::MIN_POSITIVE))
        })
    }

    fn random(&self, window: &SamplingWindow, r: &mut Rng) -> Vec<f64> {
        let mut p = self.complete(window.sample_points(self.free, r));
        for _ in 0..100 {
            if self.separated(&p) {
                break;
            }
            p = self.complete(window.sample_points(self.free, r));
        }
        p
    }

    /// Candidate `k` of the extremes phase: cycles through one coordinate
    /// high, one low, all high and all low.
    fn extreme(&self, window: &SamplingWindow, k: usize, r: &mut Rng) -> Vec<f64> {
        let mut free = window.sample_points(self.free, r);
        let one = r.random_range(0..self.free);
        let jitter = |r: &mut Rng| 10f64.powf(r.random_range(-0.5..0.5));
        for (i, t) in free.iter_mut().enumerate() {
            let hit = k % 4 >= 2 || i == one;
            if hit {
                let target = if k.is_multiple_of(2) { self.high } else { self.low };
                *t = self.push(target * jitter(r));
            }
        }
        let p = self.complete(free);
        if self.separated(&p) {
            p
        } else {
            self.random(window, r)
        }
    }

    /// Moves to the magnitude `m` in the chart's own sense: distance from the
    /// finite end for half-lines, relative distance from an end for bounded intervals.
    fn push(&self, m: f64) -> f64 {
        match self.chart {
            Chart::Above { lo } => lo + m,
            Chart::Below { hi } => hi - m,
            Chart::Bounded { lo, w } => {
                if m >= 1.0 {
                    lo + w * (1.0 - 1.0 / m).max(0.5)
                } else {
                    lo + w * m
                }
            }
            Chart::Line => {
                if m >= 1.0 {
                    m
                } else {
                    -1.0 / m
                }
            }
        }
    }

    fn refine(&self, search: &mut Search<'_>, cfg: &HuntConfig, trace: &mut Vec<f64>) {
        let Some(WitnessPayload::Points { points: start }) = search.best.as_ref().map(|b| b.payload.clone()) else {
            return;
        };
        let mut u: Vec<f64> = start[..self.free].iter().map(|&t| self.chart.to_u(t)).collect();
        let mut s = std::f64::consts::LN_2;
        while search.evaluations < cfg.budget && s > 1e-8 {
            let mut improved = false;
            'coords: for i in 0..self.free {
                for dir in [1.0, -1.0] {
                    if search.evaluations >= cfg.budget {
                        break 'coords;
                    }
                    let mut v = u.clone();
                    v[i] = self.chart.clamp(v[i] + dir * self.chart.step(s, v[i]));
                    if v[i] == u[i] {
                        continue;
                    }
                    let p = self.complete(v.iter().map(|&x| self.chart.to_t(x)).collect());
                    if !self.separated(&p) {
                        continue;
                    }
                    if search.consider(points(p), HuntPhase::Refine) {
                        u = v;
                        improved = true;
                        trace.push(search.best.as_ref().map_or(f64::NAN, |b| b.score));
                        break;
                    }
                }
            }
            if !improved {
                s *= 0.5;
            }
        }
    }
}

/// Sampling context with eigenvalues drawn near the extreme magnitudes of a half-line.
fn extreme_context(ctx: &TrialContext, k: usize) -> TrialContext {
    let mut sampling = ctx.sampling;
    if k.is_multiple_of(2) {
        sampling.min_exp = sampling.max_exp - 0.5;
    } else {
        sampling.max_exp = sampling.min_exp + 0.5;
    }
    let window = SamplingWindow::for_interval(&ctx.interval, &sampling).unwrap_or(ctx.window);
    TrialContext { window, sampling, ..*ctx }
}

/// Coordinate descent over the pair: rescale `A - B` about `B` or about `A`,
/// and move the mixing weight.
fn refine_pair(search: &mut Search<'_>, cfg: &HuntConfig, trace: &mut Vec<f64>) {
    let mut s = std::f64::consts::LN_2;
    while search.evaluations < cfg.budget && s > 1e-8 {
        let Some(WitnessPayload::MatrixPair { a, b, lambda }) = search.best.as_ref().map(|b| b.payload.clone()) else {
            return;
        };
        let d = &a - &b;
        let mut candidates = Vec::new();
        for c in [s.exp(), (-s).exp()] {
            candidates.push(WitnessPayload::MatrixPair {
                a: symmetrize(&(&b + &d * c)),
                b: b.clone(),
                lambda,
            });
            candidates.push(WitnessPayload::MatrixPair {
                a: a.clone(),
                b: symmetrize(&(&a - &d * c)),
                lambda,
            });
        }
        if let Some(l) = lambda {
            for dl in [0.25 * s, -0.25 * s] {
                let nl = (l + dl).clamp(1e-6, 1.0 - 1e-6);
                if nl != l {
                    candidates.push(WitnessPayload::MatrixPair {
                        a: a.clone(),
                        b: b.clone(),
                        lambda: Some(nl),
                    });
                }
            }
        }
        let mut improved = false;
        for c in candidates {
            if search.evaluations >= cfg.budget {
                break;
            }
            if search.consider(c, HuntPhase::Refine) {
                improved = true;
                trace.push(search.best.as_ref().map_or(f64::NAN, |b| b.score));
                break;
            }
        }
        if !improved {
            s *= 0.5;
        }
    }
}
