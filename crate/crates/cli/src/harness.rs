//! Check suites over the zoo. Every check produces a [`CheckReport`]
//! comparing a computed value against an interval.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use ndspressure::covering::{disjoint_subfamily_5r, disjoint_subfamily_bowen_3eps, BallFamily};
use ndspressure::measures::{frostman_dual, integrated_exponents, local_exponents, MeasureRep};
use ndspressure::pressure::{CenterSource, CoverMode, EstimatorConfig, ExplicitProblem, PressureEstimate};
use ndspressure::systems::{
    bernoulli_measure, box_counting_dimension, symbol_potential, DoublingChain, DoublingChainSpec, MetricKind, NaShift, NifsRepeller, NifsSpec,
    PointCloudSystem, ShiftSpec, Word,
};
use ndspressure::{BowenBallSpec, NdSystem, PotentialSeq};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{PotentialSpec, SystemFile, TargetSpec};
use crate::instance::{estimate_quantity, potential_norm, potential_range, target_indices, Instance, QuantityKind, System};
use crate::zoo;

/// Outcome of one check: `value` must lie in `[lower, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    /// Suite that produced the check.
    pub suite: String,
    /// Check name within the suite.
    pub check: String,
    /// Instance label.
    pub instance: String,
    /// Quantity compared.
    pub quantity: String,
    /// Radius of the underlying estimate, when there is one.
    pub eps: Option<f64>,
    /// Resolved depth of the underlying estimate.
    pub n: Option<usize>,
    /// Largest depth requested.
    pub n_max: Option<usize>,
    /// Critical exponent at the smallest radius.
    pub s_star: Option<f64>,
    /// Left-hand side.
    pub value: f64,
    /// Right-hand side (reference value or bound).
    pub rhs: f64,
    /// Tolerance.
    pub tol: f64,
    /// Smallest accepted value.
    pub lower: f64,
    /// Largest accepted value.
    pub upper: f64,
    /// Whether `lower <= value <= upper`.
    pub pass: bool,
    /// Informative checks document expected behavior and never fail a run.
    pub informative: bool,
    /// Free-form details.
    pub diagnostics: String,
    /// Wall time in milliseconds (not part of the reproducible outcome).
    pub runtime_ms: u128,
}

impl CheckReport {
    /// An empty report; finish it with one of the comparison builders.
    pub fn new(suite: &str, check: &str, instance: &str, quantity: &str) -> Self {
        Self {
            suite: suite.into(),
            check: check.into(),
            instance: instance.into(),
            quantity: quantity.into(),
            eps: None,
            n: None,
            n_max: None,
            s_star: None,
            value: f64::NAN,
            rhs: f64::NAN,
            tol: 0.0,
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
            pass: false,
            informative: false,
            diagnostics: String::new(),
            runtime_ms: 0,
        }
    }

    fn range(mut self, value: f64, rhs: f64, tol: f64, lower: f64, upper: f64) -> Self {
        self.value = value;
        self.rhs = rhs;
        self.tol = tol;
        self.lower = lower;
        self.upper = upper;
        self.pass = lower <= value && value <= upper;
        self
    }

    /// `|value - target| <= tol`.
    pub fn near(self, value: f64, target: f64, tol: f64) -> Self {
        self.range(value, target, tol, target - tol, target + tol)
    }

    /// `value <= bound + tol`.
    pub fn at_most(self, value: f64, bound: f64, tol: f64) -> Self {
        self.range(value, bound, tol, f64::NEG_INFINITY, bound + tol)
    }

    /// `value >= bound - tol`.
    pub fn at_least(self, value: f64, bound: f64, tol: f64) -> Self {
        self.range(value, bound, tol, bound - tol, f64::INFINITY)
    }

    /// `lo <= value <= hi`.
    pub fn between(self, value: f64, lo: f64, hi: f64) -> Self {
        self.range(value, f64::NAN, 0.0, lo, hi)
    }

    /// `value > bound` strictly.
    pub fn above(mut self, value: f64, bound: f64) -> Self {
        self = self.range(value, bound, 0.0, bound, f64::INFINITY);
        self.pass = value > bound;
        self
    }

    /// Record the depth and radius data of an estimate.
    pub fn with_estimate(mut self, e: &PressureEstimate) -> Self {
        if let Some(last) = e.per_eps.last() {
            self.eps = Some(last.eps);
            self.n = Some(last.resolved_depth);
            self.s_star = Some(last.s_star);
        }
        self.n_max = Some(e.n_max);
        self
    }

    /// Attach diagnostics.
    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.diagnostics = text.into();
        self
    }

    /// Mark as informative.
    pub fn informative(mut self) -> Self {
        self.informative = true;
        self
    }

    /// Record the wall time since `start`.
    pub fn timed(mut self, start: Instant) -> Self {
        self.runtime_ms = start.elapsed().as_millis();
        self
    }

    /// Whether this report fails the run.
    pub fn failed(&self) -> bool {
        !self.pass && !self.informative
    }

    /// Equality of everything except the wall time.
    pub fn same_outcome(&self, other: &Self) -> bool {
        let mut a = self.clone();
        a.runtime_ms = other.runtime_ms;
        // NaN fields compare unequal; compare their bit patterns instead.
        let bits = |r: &Self| [r.value, r.rhs, r.tol, r.lower, r.upper].map(f64::to_bits);
        bits(&a) == bits(other) && CheckReport { value: 0.0, rhs: 0.0, tol: 0.0, lower: 0.0, upper: 0.0, ..a } == CheckReport { value: 0.0, rhs: 0.0, tol: 0.0, lower: 0.0, upper: 0.0, ..other.clone() }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match (self.pass, self.informative) {
            (true, _) => "pass",
            (false, true) => "info",
            (false, false) => "FAIL",
        };
        write!(
            f,
            "{status:4} {}/{} [{}] {} = {:.6} in [{:.6}, {:.6}]",
            self.suite, self.check, self.instance, self.quantity, self.value, self.lower, self.upper
        )?;
        if !self.diagnostics.is_empty() {
            write!(f, " ({})", self.diagnostics)?;
        }
        Ok(())
    }
}

/// The check suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Zoo estimates against closed-form values.
    Reference,
    /// Estimates against the range of local exponents.
    Billingsley,
    /// Pressures against suprema of integrated local pressures.
    Variational,
    /// Constant shifts, orderings, unions and bounds.
    Algebra,
    /// Conjugacy invariance of pressures and measure entropies.
    Invariance,
    /// Disjoint-subfamily selection lemmas on random families.
    Covering,
    /// Cover values against fractional covers and Frostman measures.
    Weighted,
}

impl Suite {
    /// All suites.
    pub const ALL: [Suite; 7] =
        [Suite::Reference, Suite::Billingsley, Suite::Variational, Suite::Algebra, Suite::Invariance, Suite::Covering, Suite::Weighted];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Reference => "reference",
            Suite::Billingsley => "billingsley",
            Suite::Variational => "variational",
            Suite::Algebra => "algebra",
            Suite::Invariance => "invariance",
            Suite::Covering => "covering",
            Suite::Weighted => "weighted",
        })
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL.into_iter().find(|x| x.to_string() == s).ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// Harness knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct HarnessConfig {
    /// Seed for every random choice.
    pub seed: u64,
    /// Tolerance of checks on exact symbolic computations.
    pub exact_tol: f64,
    /// Tolerance of grid-backed checks.
    pub grid_tol: f64,
    /// Monte Carlo points per product measure.
    pub samples: usize,
    /// Random families per backend in the covering suite.
    pub families: usize,
    /// Random instances in the weighted suite.
    pub weighted_instances: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self { seed: 2024, exact_tol: 1e-9, grid_tol: 0.07, samples: 500, families: 500, weighted_instances: 20 }
    }
}

/// Tolerance for the mixed-alphabet shift entropy.
pub const SHIFT_TOL: f64 = 0.02;
/// Tolerance for the singleton and null-entropy doubling chain.
pub const NULL_TOL: f64 = 0.05;
/// Tolerance for the gap endpoints.
pub const GAP_TOL: f64 = 0.02;
/// Smallest accepted gap between packing and Bowen entropy.
pub const GAP_MIN: f64 = 0.1;
/// Tolerance for the repeller entropy and dimension.
pub const CANTOR_TOL: f64 = 0.05;
/// Tolerance for checks against local exponents.
pub const MEASURE_TOL: f64 = 0.02;
/// Tolerance of the Bowen variational check.
pub const VARIATIONAL_BOWEN_TOL: f64 = 0.03;
/// Tolerance of the packing variational check.
pub const VARIATIONAL_PACKING_TOL: f64 = 0.05;
/// Duality gap allowed between a weighted cover value and its Frostman measure.
pub const DUALITY_TOL: f64 = 1e-6;
/// Exponent increment for the center-weight side of the cover sandwich.
pub const SANDWICH_ALPHA: f64 = 0.05;
/// Bernoulli tilts `t`: symbol `a` gets weight proportional to `t^a`.
/// On two symbols these are `p_0 = 0.1, ..., 0.9`.
pub const TILTS: [f64; 9] = [9.0, 4.0, 7.0 / 3.0, 1.5, 1.0, 2.0 / 3.0, 3.0 / 7.0, 0.25, 1.0 / 9.0];

/// Product measure with symbol weights proportional to `t^a` at every level.
pub fn tilted_bernoulli(sh: &NaShift, t: f64) -> ndspressure::Result<MeasureRep<Word>> {
    let rows: Vec<Vec<f64>> = (0..sh.depth())
        .map(|k| {
            let w: Vec<f64> = (0..sh.alphabet(k)).map(|a| t.powi(a as i32)).collect();
            let z: f64 = w.iter().sum();
            w.into_iter().map(|x| x / z).collect()
        })
        .collect();
    bernoulli_measure(sh.spec(), &rows)
}

/// `min` and `max` of `L(n)/n` over `n` in `[lo, hi]`, where `L(n)` is the
/// log of the number of words of length `n`, from alphabet sizes alone.
pub fn count_ratio_range(sizes: impl Fn(usize) -> usize, lo: usize, hi: usize) -> (f64, f64) {
    let mut l = 0.0;
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for n in 1..=hi {
        l += (sizes(n - 1) as f64).ln();
        if n >= lo {
            let r = l / n as f64;
            min = min.min(r);
            max = max.max(r);
        }
    }
    (min, max)
}

/// Liminf and limsup of `L(n)/n` for alphabets alternating on blocks of
/// lengths `1, 2, 4, ...`: at the end of a block two thirds of all symbols
/// came from that block's alphabet.
pub fn block_oracle(even: usize, odd: usize) -> (f64, f64) {
    let (e, o) = ((even as f64).ln(), (odd as f64).ln());
    let a = (2.0 * e + o) / 3.0;
    let b = (2.0 * o + e) / 3.0;
    (a.min(b), a.max(b))
}

fn seeded(seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn stable_tag(s: &str) -> u64 {
    // FNV-1a; std's hasher is randomly seeded.
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// The zoo with memoized estimates.
pub struct Harness {
    cfg: HarnessConfig,
    instances: Vec<Instance>,
    cache: Mutex<HashMap<String, PressureEstimate>>,
}

impl Harness {
    /// Build every zoo instance.
    pub fn new(cfg: HarnessConfig) -> anyhow::Result<Self> {
        let instances = zoo::all().into_iter().map(Instance::build).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { cfg, instances, cache: Mutex::new(HashMap::new()) })
    }

    /// Knobs in use.
    pub fn config(&self) -> &HarnessConfig {
        &self.cfg
    }

    /// Zoo instance by label.
    pub fn instance(&self, name: &str) -> anyhow::Result<&Instance> {
        self.instances.iter().find(|i| i.label() == name).ok_or_else(|| anyhow!("no zoo instance `{name}`"))
    }

    /// All zoo instances.
    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    fn tol_for(&self, inst: &Instance) -> f64 {
        if inst.symbolic() {
            self.cfg.exact_tol
        } else {
            self.cfg.grid_tol
        }
    }

    /// Memoized estimate on a zoo instance, optionally with another target
    /// and estimator configuration.
    pub fn estimate(
        &self,
        name: &str,
        kind: QuantityKind,
        potential: &PotentialSpec,
        target: Option<&TargetSpec>,
        cfg: Option<&EstimatorConfig>,
    ) -> anyhow::Result<PressureEstimate> {
        let base = self.instance(name)?;
        let cfg = cfg.cloned().unwrap_or_else(|| base.config());
        let key = format!("{name}|{kind}|{potential:?}|{target:?}|{cfg:?}");
        if let Some(e) = self.cache.lock().unwrap().get(&key) {
            return Ok(e.clone());
        }
        let e = match target {
            None => estimate_quantity(base, potential, kind, &cfg)?,
            Some(t) => {
                let mut inst = base.clone();
                inst.file.target = t.clone();
                estimate_quantity(&inst, potential, kind, &cfg)?
            }
        };
        self.cache.lock().unwrap().insert(key, e.clone());
        Ok(e)
    }

    fn entropy(&self, name: &str, kind: QuantityKind) -> anyhow::Result<PressureEstimate> {
        self.estimate(name, kind, &PotentialSpec::Zero, None, None)
    }

    /// Run one suite.
    pub fn run(&self, suite: Suite) -> anyhow::Result<Vec<CheckReport>> {
        match suite {
            Suite::Reference => self.reference_suite(),
            Suite::Billingsley => self.billingsley_suite(),
            Suite::Variational => self.variational_suite(),
            Suite::Algebra => self.algebra_suite(),
            Suite::Invariance => self.invariance_suite(),
            Suite::Covering => self.covering_suite(),
            Suite::Weighted => self.weighted_suite(),
        }
        .with_context(|| format!("suite {suite}"))
    }

    /// Run several suites in parallel, keeping their order.
    pub fn run_all(&self, suites: &[Suite]) -> anyhow::Result<Vec<(Suite, Vec<CheckReport>)>> {
        suites.par_iter().map(|&s| self.run(s).map(|r| (s, r))).collect()
    }

    fn shift(&self, name: &str) -> anyhow::Result<&NaShift> {
        match &self.instance(name)?.system {
            System::Shift(s) => Ok(s),
            _ => bail!("`{name}` is not a shift"),
        }
    }

    fn doubling(&self, name: &str) -> anyhow::Result<&DoublingChain> {
        match &self.instance(name)?.system {
            System::Doubling(s) => Ok(s),
            _ => bail!("`{name}` is not a doubling chain"),
        }
    }

    // ---------------------------------------------------------------- reference

    fn reference_suite(&self) -> anyhow::Result<Vec<CheckReport>> {
        const S: &str = "reference";
        let ln2 = std::f64::consts::LN_2;
        let mut out = Vec::new();

        let start = Instant::now();
        for (name, target, tol) in
            [("doubling_de", ln2, self.cfg.grid_tol), ("doubling_du", 0.0, NULL_TOL), ("doubling_db", ln2, self.cfg.grid_tol)]
        {
            for kind in [QuantityKind::BowenEntropy, QuantityKind::PackingEntropy] {
                let t = Instant::now();
                let e = self.entropy(name, kind)?;
                out.push(CheckReport::new(S, "closed-form", name, &kind.to_string()).near(e.value, target, tol).with_estimate(&e).timed(t));
            }
        }
        let secs = start.elapsed().as_secs_f64();
        out.push(CheckReport::new(S, "runtime", "doubling_*", "seconds").at_most(secs, 120.0, 0.0).timed(start));

        let start = Instant::now();
        for kind in [QuantityKind::BowenEntropy, QuantityKind::PackingEntropy] {
            let e = self.entropy("shift24", kind)?;
            let sh = self.shift("shift24")?;
            // Tail average of log m_k over one period.
            let period = [0, 1].iter().map(|&k| (sh.alphabet(k) as f64).ln()).sum::<f64>() / 2.0;
            out.push(CheckReport::new(S, "closed-form", "shift24", &kind.to_string()).near(e.value, period, SHIFT_TOL).with_estimate(&e));
        }
        out.push(CheckReport::new(S, "runtime", "shift24", "seconds").at_most(start.elapsed().as_secs_f64(), 10.0, 0.0).timed(start));

        for kind in [QuantityKind::BowenEntropy, QuantityKind::PackingEntropy] {
            let e = self.entropy("full2", kind)?;
            out.push(CheckReport::new(S, "closed-form", "full2", &kind.to_string()).near(e.value, ln2, self.cfg.exact_tol).with_estimate(&e));
        }

        let t = Instant::now();
        let hb = self.entropy("gapblocks", QuantityKind::BowenEntropy)?;
        let hp = self.entropy("gapblocks", QuantityKind::PackingEntropy)?;
        let sh = self.shift("gapblocks")?;
        let (lim_inf, lim_sup) = block_oracle(sh.alphabet(0), sh.alphabet(1));
        let (win_lo, win_hi) = count_ratio_range(|k| sh.alphabet(k), zoo::GAP_WINDOW, 2 * zoo::GAP_WINDOW);
        let window = format!("window oracle [{win_lo:.6}, {win_hi:.6}]");
        out.push(CheckReport::new(S, "tail-average", "gapblocks", "bowen-entropy").near(hb.value, lim_inf, GAP_TOL).with_estimate(&hb).note(&window));
        out.push(CheckReport::new(S, "tail-average", "gapblocks", "packing-entropy").near(hp.value, lim_sup, GAP_TOL).with_estimate(&hp).note(&window));
        out.push(CheckReport::new(S, "strict-gap", "gapblocks", "packing-bowen").at_least(hp.value - hb.value, GAP_MIN, 0.0).timed(t));

        let t = Instant::now();
        let hc = self.entropy("cantor", QuantityKind::BowenEntropy)?;
        out.push(CheckReport::new(S, "closed-form", "cantor", "bowen-entropy").near(hc.value, ln2, CANTOR_TOL).with_estimate(&hc));
        let System::Nifs(rep) = &self.instance("cantor")?.system else { bail!("cantor is not a repeller") };
        let (net, _) = rep.attractor_net()?;
        let ratio = rep.branches(0)[0].ratio;
        let scales: Vec<f64> = (2..=8).map(|j| ratio.powi(j)).collect();
        let dim = box_counting_dimension(&net, &scales)?.dimension;
        let log_r = ratio.ln().abs();
        out.push(CheckReport::new(S, "box-dimension", "cantor", "dimension").near(dim, 2f64.ln() / log_r, CANTOR_TOL));
        out.push(
            CheckReport::new(S, "entropy-dimension", "cantor", "bowen-entropy/|log r|")
                .near(hc.value / log_r, dim, CANTOR_TOL)
                .note(format!("|log r| = {log_r:.6}"))
                .timed(t),
        );
        Ok(out)
    }

    // -------------------------------------------------------------- billingsley

    fn local_range<S: NdSystem>(
        sys: &S,
        mu: &MeasureRep<S::Point>,
        f: &PotentialSeq<S::Point>,
        points: &[S::Point],
        eps: &[f64],
        n_max: usize,
    ) -> anyhow::Result<[(f64, f64); 2]> {
        let reps: Vec<_> = points.par_iter().map(|x| local_exponents(sys, mu, f, x, eps, n_max)).collect::<Result<_, _>>()?;
        let span = |g: &dyn Fn(&ndspressure::measures::LocalExponentReport) -> f64| {
            reps.iter().map(g).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
        };
        Ok([span(&|r| r.lower), span(&|r| r.upper)])
    }

    fn billingsley_pair(
        &self,
        name: &str,
        ranges: [(f64, f64); 2],
        target: Option<&TargetSpec>,
        cfg: Option<&EstimatorConfig>,
        what: &str,
    ) -> anyhow::Result<Vec<CheckReport>> {
        let mut out = Vec::new();
        for (kind, (lo, hi)) in [QuantityKind::BowenEntropy, QuantityKind::PackingEntropy].into_iter().zip(ranges) {
            let e = self.estimate(name, kind, &PotentialSpec::Zero, target, cfg)?;
            let side = if kind.is_packing() { "upper" } else { "lower" };
            out.push(
                CheckReport::new("billingsley", "bracket", name, &kind.to_string())
                    .between(e.value, lo - MEASURE_TOL, hi + MEASURE_TOL)
                    .with_estimate(&e)
                    .note(format!("{what}; {side} local exponents in [{lo:.6}, {hi:.6}]")),
            );
        }
        Ok(out)
    }

    /// Settings of the local exponent computations on a shift instance:
    /// radius where balls are cylinders, and the deepest usable depth.
    pub fn shift_measure_settings(&self, name: &str) -> anyhow::Result<(Vec<f64>, usize)> {
        let sh = self.shift(name)?;
        let n_max = if name == "gapblocks" { 2 * zoo::GAP_WINDOW } else { (sh.depth() / 64) * 64 };
        Ok((vec![zoo::SHIFT_EPS[0]], n_max))
    }

    fn sample_words(mu: &MeasureRep<Word>, count: usize, rng: &mut ChaCha8Rng) -> anyhow::Result<Vec<Word>> {
        match mu {
            MeasureRep::Bernoulli(b) => Ok((0..count).map(|_| Word(b.sample(rng, b.depth()))).collect()),
            MeasureRep::Atomic(a) => Ok(a.iter().map(|p| p.0.clone()).collect()),
        }
    }

    fn billingsley_suite(&self) -> anyhow::Result<Vec<CheckReport>> {
        let ln2 = std::f64::consts::LN_2;
        let mut out = Vec::new();
        for name in ["full2", "shift24", "gapblocks"] {
            let t = Instant::now();
            let sh = self.shift(name)?;
            let (eps, n_max) = self.shift_measure_settings(name)?;
            let mu = tilted_bernoulli(sh, 1.0)?;
            let mut rng = seeded(self.cfg.seed, stable_tag(name));
            let pts = Self::sample_words(&mu, self.cfg.samples, &mut rng)?;
            let ranges = Self::local_range(sh, &mu, &PotentialSeq::zero(), &pts, &eps, n_max)?;
            let mut reps = self.billingsley_pair(name, ranges, None, None, &format!("uniform product measure, {} samples, n_max {n_max}", pts.len()))?;
            if name == "full2" {
                for (kind, (lo, hi)) in [("lower-local", ranges[0]), ("upper-local", ranges[1])] {
                    reps.push(CheckReport::new("billingsley", "local-closed-form", name, kind).near(lo, ln2, MEASURE_TOL));
                    reps.push(CheckReport::new("billingsley", "local-closed-form", name, kind).near(hi, ln2, MEASURE_TOL));
                }
            }
            out.extend(reps.into_iter().map(|r| r.timed(t)));
        }
        for name in ["doubling_du", "doubling_de"] {
            let t = Instant::now();
            let sys = self.doubling(name)?;
            let x = sys.point(0.0);
            let mu = MeasureRep::atomic(vec![(x, 1.0)])?;
            let c = self.instance(name)?.config();
            let ranges = Self::local_range(sys, &mu, &PotentialSeq::zero(), &[x], &c.eps_schedule, c.n_max)?;
            let target = TargetSpec::Interval { lo: 0.0, hi: 0.0 };
            let single = EstimatorConfig { min_ball_points: 0.0, ..c.clone() };
            let reps = self.billingsley_pair(name, ranges, Some(&target), Some(&single), "Dirac measure at the fixed point 0, E = {0}")?;
            out.extend(reps.into_iter().map(|r| r.timed(t)));
        }
        Ok(out)
    }

    // -------------------------------------------------------------- variational

    #[allow(clippy::too_many_arguments)]
    fn variational_reports(
        &self,
        name: &str,
        packing: bool,
        pressure: &PressureEstimate,
        norm: f64,
        members: &[(String, f64)],
        tol: f64,
        family: &str,
    ) -> Vec<CheckReport> {
        let kind = if packing { QuantityKind::PackingEntropy } else { QuantityKind::BowenEntropy };
        let q = kind.to_string();
        let mut out: Vec<CheckReport> = members
            .iter()
            .map(|(label, v)| CheckReport::new("variational", "inequality", name, &q).at_most(*v, pressure.value, tol).with_estimate(pressure).note(label.clone()))
            .collect();
        let (arg, sup) = members.iter().fold((String::new(), f64::NEG_INFINITY), |acc, (l, v)| if *v > acc.1 { (l.clone(), *v) } else { acc });
        let mut eq = CheckReport::new("variational", "family-sup", name, &q)
            .near(sup, pressure.value, tol)
            .with_estimate(pressure)
            .note(format!("family-sup over {} {family}; attained at {arg}", members.len()));
        if packing {
            let hyp = CheckReport::new("variational", "hypothesis", name, "packing-entropy - tol > norm").above(pressure.value - tol, norm).informative();
            if !hyp.pass {
                let text = format!("{}; hypothesis fails, equality not asserted", eq.diagnostics);
                eq = eq.informative().note(text);
            }
            out.push(hyp);
        }
        out.push(eq);
        out
    }

    fn variational_suite(&self) -> anyhow::Result<Vec<CheckReport>> {
        let mut out = Vec::new();
        for name in ["full2", "shift24", "gapblocks"] {
            let t = Instant::now();
            let sh = self.shift(name)?;
            let (eps, n_max) = self.shift_measure_settings(name)?;
            let f = PotentialSeq::zero();
            let ints: Vec<(String, f64, f64)> = TILTS
                .par_iter()
                .enumerate()
                .map(|(i, &tilt)| {
                    let mu = tilted_bernoulli(sh, tilt)?;
                    let mut rng = seeded(self.cfg.seed, stable_tag(name) + i as u64);
                    let r = integrated_exponents(sh, &mu, &f, &eps, n_max, self.cfg.samples, &mut rng, &|w| Word(w))?;
                    Ok((format!("tilt {tilt:.4} (stderr {:.1e}/{:.1e})", r.lower_stderr, r.upper_stderr), r.lower, r.upper))
                })
                .collect::<anyhow::Result<_>>()?;
            for packing in [false, true] {
                let kind = if packing { QuantityKind::PackingEntropy } else { QuantityKind::BowenEntropy };
                let p = self.entropy(name, kind)?;
                let members: Vec<(String, f64)> = ints.iter().map(|(l, lo, hi)| (l.clone(), if packing { *hi } else { *lo })).collect();
                let tol = if packing { VARIATIONAL_PACKING_TOL } else { VARIATIONAL_BOWEN_TOL };
                out.extend(self.variational_reports(name, packing, &p, 0.0, &members, tol, "product measures").into_iter().map(|r| r.timed(t)));
            }
        }
        let t = Instant::now();
        let name = "doubling_du";
        let sys = self.doubling(name)?;
        let c = self.instance(name)?.config();
        let atoms: Vec<f64> = vec![0.0, 0.25, 0.5, 1.0 / 3.0, 1.0];
        let measures: Vec<(String, MeasureRep<i64>)> =
            atoms.iter().map(|&x| Ok((format!("Dirac at {x:.4}"), MeasureRep::atomic(vec![(sys.point(x), 1.0)])?))).collect::<anyhow::Result<_>>()?;
        let f = PotentialSeq::zero();
        let mut rng = seeded(self.cfg.seed, stable_tag(name));
        let ints: Vec<(String, f64, f64)> = measures
            .iter()
            .map(|(l, mu)| {
                let r = integrated_exponents(sys, mu, &f, &c.eps_schedule, c.n_max, self.cfg.samples, &mut rng, &|_| 0)?;
                Ok((l.clone(), r.lower, r.upper))
            })
            .collect::<anyhow::Result<_>>()?;
        for packing in [false, true] {
            let kind = if packing { QuantityKind::PackingEntropy } else { QuantityKind::BowenEntropy };
            let p = self.entropy(name, kind)?;
            let members: Vec<(String, f64)> = ints.iter().map(|(l, lo, hi)| (l.clone(), if packing { *hi } else { *lo })).collect();
            let tol = NULL_TOL;
            out.extend(self.variational_reports(name, packing, &p, 0.0, &members, tol, "atomic measures").into_iter().map(|r| r.timed(t)));
        }
        Ok(out)
    }

    // ------------------------------------------------------------------ algebra

    fn algebra_suite(&self) -> anyhow::Result<Vec<CheckReport>> {
        const S: &str = "algebra";
        let mut out = Vec::new();
        let pairs = [(QuantityKind::BowenEntropy, QuantityKind::BowenPressure), (QuantityKind::PackingEntropy, QuantityKind::PackingPressure)];

        for name in ["full2", "shift24"] {
            for (hk, pk) in pairs {
                let h = self.entropy(name, hk)?;
                for a in [-1.0, 0.0, 0.5, 2.0] {
                    let t = Instant::now();
                    let p = self.estimate(name, pk, &PotentialSpec::Constant { value: a }, None, None)?;
                    out.push(
                        CheckReport::new(S, "constant-shift", name, &pk.to_string())
                            .near(p.value - h.value, a, self.cfg.exact_tol)
                            .with_estimate(&p)
                            .note(format!("a = {a}"))
                            .timed(t),
                    );
                }
            }
        }

        let ordering: Vec<CheckReport> = self
            .instances
            .par_iter()
            .map(|inst| {
                let t = Instant::now();
                let hb = self.entropy(inst.label(), QuantityKind::BowenEntropy)?;
                let hp = self.entropy(inst.label(), QuantityKind::PackingEntropy)?;
                Ok(CheckReport::new(S, "ordering", inst.label(), "bowen <= packing")
                    .at_most(hb.value, hp.value, self.tol_for(inst))
                    .with_estimate(&hb)
                    .timed(t))
            })
            .collect::<anyhow::Result<_>>()?;
        out.extend(ordering);

        // Countable stability: a point and an interval on the Euclidean chain.
        let t = Instant::now();
        let name = "doubling_de";
        let sys = self.doubling(name)?;
        let carrier = sys.carrier(0)?;
        let third = sys.x(sys.point(1.0 / 3.0));
        let parts = [TargetSpec::Interval { lo: third, hi: third }, TargetSpec::Interval { lo: 0.5, hi: 0.75 }];
        // A single point is resolved at every depth.
        let single = EstimatorConfig { min_ball_points: 0.0, ..self.instance(name)?.config() };
        let part_cfg = [Some(&single), None];
        let mut union: Vec<usize> = Vec::new();
        for p in &parts {
            union.extend(target_indices(sys, &carrier, p)?);
        }
        union.sort_unstable();
        union.dedup();
        let union = TargetSpec::Indices { indices: union };
        for kind in [QuantityKind::BowenEntropy, QuantityKind::PackingEntropy] {
            let vals: Vec<f64> = parts
                .iter()
                .zip(part_cfg)
                .map(|(p, c)| self.estimate(name, kind, &PotentialSpec::Zero, Some(p), c).map(|e| e.value))
                .collect::<anyhow::Result<_>>()?;
            let u = self.estimate(name, kind, &PotentialSpec::Zero, Some(&union), None)?;
            let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            out.push(
                CheckReport::new(S, "union-max", name, &kind.to_string())
                    .near(u.value, max, self.cfg.grid_tol)
                    .with_estimate(&u)
                    .note(format!("parts {{1/3}}: {:.4}, [0.5, 0.75]: {:.4}", vals[0], vals[1]))
                    .timed(t),
            );
        }
        for name in ["shift24"] {
            for kind in [QuantityKind::BowenEntropy, QuantityKind::PackingEntropy] {
                let vals: Vec<f64> = (0..2u8)
                    .map(|a| self.estimate(name, kind, &PotentialSpec::Zero, Some(&TargetSpec::Cylinder { prefix: vec![a] }), None).map(|e| e.value))
                    .collect::<anyhow::Result<_>>()?;
                let u = self.entropy(name, kind)?;
                let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                out.push(CheckReport::new(S, "union-max", name, &kind.to_string()).near(u.value, max, self.cfg.exact_tol).note("cylinders [0] and [1]"));
            }
        }

        // Bounds by inf f and sup f, monotonicity in f, finiteness.
        let exact_cfg = EstimatorConfig { eps_schedule: vec![zoo::SHIFT_EPS[0]], ..self.instance("full2")?.config() };
        let checks: [(&str, PotentialSpec, Option<&EstimatorConfig>); 3] = [
            ("full2", PotentialSpec::Symbol { table: vec![vec![0.3, -0.2]] }, Some(&exact_cfg)),
            ("shift24", PotentialSpec::Symbol { table: vec![vec![0.1, -0.4], vec![0.2, 0.0, -0.3, 0.5]] }, Some(&exact_cfg)),
            ("doubling_de", PotentialSpec::Linear { a: 0.1, b: 0.5 }, None),
        ];
        for (name, f, cfg) in &checks {
            let tol = self.tol_for(self.instance(name)?);
            let (lo, hi) = potential_range(f);
            for (hk, pk) in pairs {
                let t = Instant::now();
                let h = self.estimate(name, hk, &PotentialSpec::Zero, None, *cfg)?;
                let p = self.estimate(name, pk, f, None, *cfg)?;
                out.push(
                    CheckReport::new(S, "inf-sup-bounds", name, &pk.to_string())
                        .between(p.value, h.value + lo - tol, h.value + hi + tol)
                        .with_estimate(&p)
                        .note(format!("entropy {:.6}, f in [{lo}, {hi}]", h.value))
                        .timed(t),
                );
                let finite = f64::from(u8::from(p.value.is_finite()));
                out.push(CheckReport::new(S, "finite", name, &pk.to_string()).near(finite, 1.0, 0.0).note(format!("bounded potential, norm {}", potential_norm(f))));
            }
        }
        let f = PotentialSpec::Symbol { table: vec![vec![0.0, 0.1]] };
        let g = PotentialSpec::Symbol { table: vec![vec![0.2, 0.3]] };
        for (_, pk) in pairs {
            let pf = self.estimate("full2", pk, &f, None, Some(&exact_cfg))?;
            let pg = self.estimate("full2", pk, &g, None, Some(&exact_cfg))?;
            out.push(CheckReport::new(S, "potential-order", "full2", &pk.to_string()).at_most(pf.value, pg.value, self.cfg.exact_tol).note("f = (0, 0.1) <= g = (0.2, 0.3)"));
        }
        Ok(out)
    }

    // --------------------------------------------------------------- invariance

    fn invariance_suite(&self) -> anyhow::Result<Vec<CheckReport>> {
        const S: &str = "invariance";
        let mut out = Vec::new();
        let kinds = [QuantityKind::BowenEntropy, QuantityKind::PackingEntropy];

        // Identity maps between metrics on the doubling chain.
        let de = self.doubling("doubling_de")?;
        for (other, equi) in [("doubling_db", true), ("doubling_du", false)] {
            let t = Instant::now();
            let target = self.doubling(other)?;
            let pi = ConjugacyMap::<DoublingChain, DoublingChain>::new(|_, x: &i64| *x, equi).with_inverse(|_, x: &i64| *x);
            let defect = pi.commutation_defect(de, target, 4, 64)?;
            out.push(CheckReport::new(S, "commutation", &format!("doubling_de->{other}"), "defect").at_most(defect, 0.0, de.step_slack(0) + target.step_slack(0)).timed(t));
            for kind in kinds {
                let a = self.entropy("doubling_de", kind)?;
                let b = self.entropy(other, kind)?;
                let label = format!("doubling_de->{other}");
                if equi {
                    out.push(CheckReport::new(S, "equiconjugacy", &label, &kind.to_string()).near(a.value - b.value, 0.0, self.cfg.grid_tol).with_estimate(&b));
                } else {
                    // Forward uniformly continuous only: source dominates target.
                    out.push(CheckReport::new(S, "semiconjugacy", &label, &kind.to_string()).at_least(a.value, b.value, self.cfg.grid_tol).with_estimate(&b));
                    out.push(
                        CheckReport::new(S, "not-equiconjugate", &label, &kind.to_string())
                            .above((a.value - b.value).abs(), self.cfg.grid_tol)
                            .informative()
                            .note("identity is a conjugacy but not uniformly equivalent; entropies differ as expected"),
                    );
                }
            }
        }

        // Level-dependent symbol permutation on the mixed-alphabet shift.
        let name = "shift24";
        let sh = self.shift(name)?;
        let sizes: Vec<usize> = (0..sh.depth()).map(|k| sh.alphabet(k)).collect();
        let perm = {
            let sizes = sizes.clone();
            move |k: usize, a: u8| ((a as usize + 1 + k % 3) % sizes[k]) as u8
        };
        let inv = {
            let sizes = sizes.clone();
            move |k: usize, b: u8| ((b as usize + sizes[k] * 3 - 1 - k % 3) % sizes[k]) as u8
        };
        let t = Instant::now();
        let pi = {
            let (sh1, sh2) = (sh.clone(), sh.clone());
            let (p, q) = (perm.clone(), inv.clone());
            ConjugacyMap::<NaShift, NaShift>::new(move |k, x: &Word| sh1.relabel(k, x, &p), true).with_inverse(move |k, x: &Word| sh2.relabel(k, x, &q))
        };
        let defect = pi.commutation_defect(sh, sh, 6, 64)?;
        out.push(CheckReport::new(S, "commutation", "shift24->shift24", "defect").at_most(defect, 0.0, 0.0).timed(t));
        let g_table: Vec<Vec<f64>> = vec![vec![0.3, -0.1], vec![0.0, 0.25, -0.5, 0.1], vec![0.2, 0.1], vec![-0.2, 0.4, 0.0, 0.3], vec![0.1, 0.0], vec![0.5, -0.5, 0.2, 0.0]];
        // The pullback of a symbol potential by a relabeling is again one.
        let pulled: Vec<Vec<f64>> = (0..6).map(|k| (0..sizes[k]).map(|a| g_table[k][perm(k, a as u8) as usize]).collect()).collect();
        let g = PotentialSpec::Symbol { table: g_table.clone() };
        let pg = PotentialSpec::Symbol { table: pulled.clone() };
        {
            let table = g_table.clone();
            let direct = symbol_potential(move |k, a| table[k % table.len()][a as usize]);
            let sh1 = sh.clone();
            let p = perm.clone();
            let via_map = direct.pullback(move |k, x: &Word| sh1.relabel(k, x, &p));
            let table = pulled.clone();
            let by_table = symbol_potential(move |k, a| table[k % table.len()][a as usize]);
            let mut rng = seeded(self.cfg.seed, stable_tag("pullback"));
            let mut worst: f64 = 0.0;
            for _ in 0..64 {
                let w = Word((0..sh.depth()).map(|k| rng.gen_range(0..sizes[k]) as u8).collect());
                for k in 0..6 {
                    let wk = Word(w.0[k..].to_vec());
                    worst = worst.max((via_map.eval(k, &wk) - by_table.eval(k, &wk)).abs());
                }
            }
            out.push(CheckReport::new(S, "pullback-table", name, "max |difference|").at_most(worst, 0.0, 0.0));
        }
        let exact_cfg = EstimatorConfig { eps_schedule: vec![zoo::SHIFT_EPS[0]], ..self.instance(name)?.config() };
        for (src, dst, cfg) in [(&pg, &g, Some(&exact_cfg)), (&PotentialSpec::Zero, &PotentialSpec::Zero, None)] {
            let kinds = if matches!(src, PotentialSpec::Zero) {
                [QuantityKind::BowenEntropy, QuantityKind::PackingEntropy]
            } else {
                [QuantityKind::BowenPressure, QuantityKind::PackingPressure]
            };
            for kind in kinds {
                let a = self.estimate(name, kind, src, None, cfg)?;
                let b = self.estimate(name, kind, dst, None, cfg)?;
                out.push(CheckReport::new(S, "equiconjugacy", "shift24->shift24", &kind.to_string()).near(a.value - b.value, 0.0, self.cfg.exact_tol).with_estimate(&a));
            }
        }

        // Measure entropies are preserved by the push-forward.
        let (eps, n_max) = self.shift_measure_settings(name)?;
        let f = PotentialSeq::zero();
        for tilt in [1.0, 2.0] {
            let t = Instant::now();
            let mu = tilted_bernoulli(sh, tilt)?;
            let MeasureRep::Bernoulli(b) = &mu else { bail!("expected a product measure") };
            let nu = MeasureRep::Bernoulli(b.permuted(&perm)?);
            let mut rng = seeded(self.cfg.seed, stable_tag("pushforward") + tilt as u64);
            let rm = integrated_exponents(sh, &mu, &f, &eps, n_max, self.cfg.samples, &mut rng, &|w| Word(w))?;
            let rn = integrated_exponents(sh, &nu, &f, &eps, n_max, self.cfg.samples, &mut rng, &|w| Word(w))?;
            out.push(
                CheckReport::new(S, "measure-entropy", name, "lower local entropy")
                    .near(rm.lower - rn.lower, 0.0, MEASURE_TOL)
                    .note(format!("tilt {tilt}: {:.6} vs push-forward {:.6}", rm.lower, rn.lower))
                    .timed(t),
            );
            out.push(CheckReport::new(S, "measure-entropy", name, "upper local entropy").near(rm.upper - rn.upper, 0.0, MEASURE_TOL));
        }
        Ok(out)
    }

    // ----------------------------------------------------------------- covering

    fn covering_suite(&self) -> anyhow::Result<Vec<CheckReport>> {
        let n = self.cfg.families;
        let seed = self.cfg.seed;
        let full2 = NaShift::new("full2", ShiftSpec::full(2), 8)?;
        let de = DoublingChain::new("doubling_de", DoublingChainSpec { metric: MetricKind::Euclidean, delta: 1.0 / 256.0 })?;
        let cantor = NifsRepeller::new("cantor", &NifsSpec::middle_third(8))?;
        let cloud = PointCloudSystem::random(&mut seeded(seed, stable_tag("cloud")), "cloud", 8, 50, 2);
        let jobs: Vec<Box<dyn Fn() -> anyhow::Result<Vec<CheckReport>> + Send + Sync + '_>> = vec![
            Box::new(|| lemma_checks(&full2, n, seed)),
            Box::new(|| lemma_checks(&de, n, seed)),
            Box::new(|| lemma_checks(&cantor, n, seed)),
            Box::new(|| lemma_checks(&cloud, n, seed)),
        ];
        let parts: Vec<Vec<CheckReport>> = jobs.par_iter().map(|j| j()).collect::<anyhow::Result<_>>()?;
        Ok(parts.into_iter().flatten().collect())
    }

    // ----------------------------------------------------------------- weighted

    fn weighted_suite(&self) -> anyhow::Result<Vec<CheckReport>> {
        let runs: Vec<Vec<CheckReport>> = (0..self.cfg.weighted_instances)
            .into_par_iter()
            .map(|i| weighted_instance(self.cfg.seed, i as u64))
            .collect::<anyhow::Result<_>>()?;
        Ok(runs.into_iter().flatten().collect())
    }
}

/// Level maps between two systems, with an optional inverse.
pub struct ConjugacyMap<'a, A: NdSystem, B: NdSystem> {
    forward: Box<dyn Fn(usize, &A::Point) -> B::Point + Send + Sync + 'a>,
    inverse: Option<Box<dyn Fn(usize, &B::Point) -> A::Point + Send + Sync + 'a>>,
    /// Whether both directions are declared uniformly equicontinuous.
    pub equi: bool,
}

impl<'a, A: NdSystem, B: NdSystem> ConjugacyMap<'a, A, B> {
    /// Forward maps only.
    pub fn new(forward: impl Fn(usize, &A::Point) -> B::Point + Send + Sync + 'a, equi: bool) -> Self {
        Self { forward: Box::new(forward), inverse: None, equi }
    }

    /// Attach inverse maps.
    pub fn with_inverse(mut self, inverse: impl Fn(usize, &B::Point) -> A::Point + Send + Sync + 'a) -> Self {
        self.inverse = Some(Box::new(inverse));
        self
    }

    /// `π_k(x)`.
    pub fn forward(&self, k: usize, x: &A::Point) -> B::Point {
        (self.forward)(k, x)
    }

    /// Largest `d_{k+1}(R_k π_k x, π_{k+1} T_k x)` over sampled points of
    /// levels `0..levels`, together with the round-trip error of the inverse.
    pub fn commutation_defect(&self, a: &A, b: &B, levels: usize, per_level: usize) -> ndspressure::Result<f64> {
        let mut worst: f64 = 0.0;
        for k in 0..levels {
            for x in a.sample_carrier(k, per_level)? {
                let y = self.forward(k, &x);
                let lhs = b.step(k, &y)?;
                let rhs = self.forward(k + 1, &a.step(k, &x)?);
                worst = worst.max(b.metric(k + 1, &lhs, &rhs));
                if let Some(inv) = &self.inverse {
                    worst = worst.max(a.metric(k, &inv(k, &y), &x));
                }
            }
        }
        Ok(worst)
    }
}

/// Exhaustive check of the two disjoint-subfamily selections on random
/// families: chosen balls are pairwise disjoint and their enlargements
/// cover every ball of the family.
pub fn lemma_checks<S: NdSystem>(sys: &S, families: usize, seed: u64) -> anyhow::Result<Vec<CheckReport>> {
    let t = Instant::now();
    let dom = sys.carrier(0)?;
    let mut rng = seeded(seed, stable_tag(sys.label()));
    let (mut bad5, mut bad3) = (0usize, 0usize);
    for _ in 0..families {
        let size = rng.gen_range(1..=12);
        let n = rng.gen_range(1..=5);
        let fam = random_family(sys, &dom, &mut rng, size, Some(n), None)?;
        let chosen = disjoint_subfamily_5r(sys, &fam, &dom)?;
        bad5 += usize::from(!selection_ok(sys, &fam, &chosen, 5.0, &dom)?);
        let eps = rng.gen_range(0.02..0.6);
        let fam = random_family(sys, &dom, &mut rng, size, None, Some(eps))?;
        let chosen = disjoint_subfamily_bowen_3eps(sys, &fam, &dom)?;
        bad3 += usize::from(!selection_ok(sys, &fam, &chosen, 3.0, &dom)?);
    }
    let note = format!("{families} random families, {} domain points", dom.len());
    Ok(vec![
        CheckReport::new("covering", "common-depth-5r", sys.label(), "violations").at_most(bad5 as f64, 0.0, 0.0).note(&note).timed(t),
        CheckReport::new("covering", "common-radius-3eps", sys.label(), "violations").at_most(bad3 as f64, 0.0, 0.0).note(&note).timed(t),
    ])
}

fn random_family<S: NdSystem>(
    sys: &S,
    dom: &[S::Point],
    rng: &mut ChaCha8Rng,
    size: usize,
    n: Option<usize>,
    eps: Option<f64>,
) -> anyhow::Result<BallFamily<S::Point>> {
    let _ = sys;
    let balls = (0..size)
        .map(|_| {
            let c = dom[rng.gen_range(0..dom.len())].clone();
            let n = n.unwrap_or_else(|| rng.gen_range(1..=5));
            let eps = eps.unwrap_or_else(|| rng.gen_range(0.02..0.6));
            BowenBallSpec::new(0, c, n, eps, rng.gen_bool(0.5))
        })
        .collect::<Result<_, _>>()?;
    Ok(BallFamily::new(balls)?)
}

fn members<S: NdSystem>(sys: &S, b: &BowenBallSpec<S::Point>, factor: f64, dom: &[S::Point]) -> ndspressure::Result<Vec<bool>> {
    dom.iter().map(|y| sys.bowen_distance(0, b.n, &b.center, y).map(|d| if b.closed { d <= b.eps * factor } else { d < b.eps * factor })).collect()
}

fn selection_ok<S: NdSystem>(sys: &S, fam: &BallFamily<S::Point>, chosen: &[usize], factor: f64, dom: &[S::Point]) -> anyhow::Result<bool> {
    let sets: Vec<Vec<bool>> = fam.balls.iter().map(|b| members(sys, b, 1.0, dom)).collect::<Result<_, _>>()?;
    for (a, &i) in chosen.iter().enumerate() {
        for &j in &chosen[a + 1..] {
            if sets[i].iter().zip(&sets[j]).any(|(x, y)| *x && *y) {
                return Ok(false);
            }
        }
    }
    let mut grown = vec![false; dom.len()];
    for &i in chosen {
        for (g, m) in grown.iter_mut().zip(members(sys, &fam.balls[i], factor, dom)?) {
            *g |= m;
        }
    }
    Ok(sets.iter().all(|s| s.iter().zip(&grown).all(|(m, g)| !m || *g)))
}

/// Smallest `log Σ w` over subfamilies covering every target point, by
/// enumerating all subsets.
pub fn exhaustive_min_cover(members: &[Vec<usize>], log_w: &[f64], targets: usize) -> f64 {
    assert!(members.len() <= 20, "exhaustive enumeration is limited to 20 balls");
    let mut best = f64::INFINITY;
    for mask in 1u32..(1u32 << members.len()) {
        let mut hit = vec![false; targets];
        let mut total = 0.0;
        for (i, m) in members.iter().enumerate() {
            if mask >> i & 1 == 1 {
                total += log_w[i].exp();
                for &p in m {
                    hit[p] = true;
                }
            }
        }
        if hit.iter().all(|&h| h) {
            best = best.min(total);
        }
    }
    best.ln()
}

/// One random small shift instance of the weighted suite.
pub fn weighted_instance(seed: u64, index: u64) -> anyhow::Result<Vec<CheckReport>> {
    let t = Instant::now();
    let mut rng = seeded(seed, stable_tag("weighted") + index);
    let sh = NaShift::new(format!("p23-{index}"), ShiftSpec::periodic(&[2, 3]), 6)?;
    let table: Vec<Vec<f64>> = (0..2).map(|k| (0..sh.alphabet(k)).map(|_| rng.gen_range(-0.5..0.5)).collect()).collect();
    let f = {
        let table = table.clone();
        symbol_potential(move |k, a| table[k % 2][a as usize])
    };
    let carrier = sh.carrier(0)?;
    let mut z: Vec<usize> = (0..rng.gen_range(2..=6)).map(|_| rng.gen_range(0..carrier.len())).collect();
    z.sort_unstable();
    z.dedup();
    let centers: Vec<Word> = z.iter().map(|&i| carrier[i].clone()).collect();
    let n_lo = rng.gen_range(1..=2);
    let eps = [0.1, 0.15][rng.gen_range(0..2)];
    let s = rng.gen_range(0.0..1.5);
    let problem = ExplicitProblem::new(&sh, &f, carrier.clone(), z.clone())?.with_centers(CenterSource::Given(centers.clone()));
    let label = sh.label().to_string();
    let note = format!("|Z| = {}, N = {n_lo}, eps = {eps}, s = {s:.4}", z.len());

    // Independent weights: sup of S_n f over the ambient ball, or S_n f at the center.
    let sum = |x: &Word, n: usize| x.0[..n].iter().enumerate().map(|(k, &a)| table[k % 2][a as usize]).sum::<f64>();
    let family = |radius: f64| -> anyhow::Result<(Vec<Vec<usize>>, Vec<(usize, Vec<usize>)>)> {
        let mut target_members = Vec::new();
        let mut ambient_members = Vec::new();
        for c in &centers {
            for n in n_lo..=n_lo + 1 {
                let inside = |y: &Word| sh.bowen_distance(0, n, c, y).map(|d| d < radius);
                let tm = z.iter().enumerate().filter_map(|(p, &i)| inside(&carrier[i]).map(|b| b.then_some(p)).transpose()).collect::<Result<Vec<_>, _>>()?;
                let am = (0..carrier.len()).filter_map(|i| inside(&carrier[i]).map(|b| b.then_some(i)).transpose()).collect::<Result<Vec<_>, _>>()?;
                target_members.push(tm);
                ambient_members.push((n, am));
            }
        }
        Ok((target_members, ambient_members))
    };
    let (m_eps, a_eps) = family(eps)?;
    let sup_w: Vec<f64> =
        a_eps.iter().map(|(n, am)| -(*n as f64) * s + am.iter().map(|&i| sum(&carrier[i], *n)).fold(f64::NEG_INFINITY, f64::max)).collect();
    let (m_big, a_big) = family(6.0 * eps)?;
    let centered: Vec<f64> = a_big
        .iter()
        .enumerate()
        .map(|(b, (n, _))| -(*n as f64) * (s + SANDWICH_ALPHA) + sum(&centers[b / 2], *n))
        .collect();
    let log_m_sup = exhaustive_min_cover(&m_eps, &sup_w, z.len());
    let log_r = exhaustive_min_cover(&m_big, &centered, z.len());
    let w = problem.cover_value(s, n_lo, n_lo + 1, eps, CoverMode::Weighted)?;
    let log_w = w.log_lower;
    let rel = 1e-9;
    let cert = frostman_dual(&problem, s, n_lo, n_lo + 1, eps)?;
    let (wv, cv) = (log_w.exp(), cert.log_c.exp());
    Ok(vec![
        CheckReport::new("weighted", "family-size", &label, "balls").at_most(m_eps.len() as f64, 12.0, 0.0).note(&note),
        CheckReport::new("weighted", "sandwich-lower", &label, "log R(s+alpha, 6eps) - log W(s, eps)").at_most(log_r - log_w, 0.0, rel).note(&note),
        CheckReport::new("weighted", "sandwich-upper", &label, "log W(s, eps) - log M(s, eps)").at_most(log_w - log_m_sup, 0.0, rel).note(&note),
        CheckReport::new("weighted", "duality-gap", &label, "|W - C|").at_most((wv - cv).abs(), 0.0, DUALITY_TOL).note(format!("{note}; W = {wv:.9}")),
        CheckReport::new("weighted", "frostman-feasible", &label, "worst mu(B) - w(B)/C").at_most(cert.worst_violation(), 0.0, 0.0).note(&note).timed(t),
    ])
}

/// Whether a system file names a symbolic instance (exact tolerances apply).
pub fn is_symbolic(file: &SystemFile) -> bool {
    matches!(file.system, crate::config::SystemSpec::Shift { .. })
}
