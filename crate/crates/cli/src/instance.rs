//! Building systems, potentials and measures from configuration, and
//! running the estimators on them.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use anyhow::{bail, Context};
use ndspressure::pressure::{
    estimate, CoverMode, CylinderProblem, Decomposition, EstimatorConfig, ExplicitProblem, PressureEstimate, Quantity,
};
use ndspressure::systems::{
    bernoulli_measure, symbol_potential, AlphabetSeq, Contraction, DoublingChain, DoublingChainSpec, MetricKind, NaShift,
    NifsRepeller, NifsSpec, PointCloudSystem, ShiftSpec, Word,
};
use ndspressure::measures::{integrated_exponents, IntegratedReport, MeasureRep};
use ndspressure::{NdSystem, NdsError, NormBound, PotentialSeq};
use rand::SeedableRng;

use crate::config::{AlphabetSpec, ConfigError, MeasureSpec, MetricSpec, PointSpec, PotentialSpec, SystemFile, SystemSpec, TargetSpec};

/// Shifts with at most this many words may fall back to explicit enumeration.
pub const EXPLICIT_WORD_LIMIT: f64 = 65536.0;

/// A built system.
#[derive(Debug, Clone)]
pub enum System {
    /// Nonautonomous full shift.
    Shift(NaShift),
    /// Doubling chain on `[0, 2^k]`.
    Doubling(DoublingChain),
    /// IFS repeller.
    Nifs(NifsRepeller),
    /// Random point clouds.
    Cloud(PointCloudSystem),
}

/// A system file together with the system it describes.
#[derive(Debug, Clone)]
pub struct Instance {
    /// The parsed file.
    pub file: SystemFile,
    /// The built system.
    pub system: System,
}

impl Instance {
    /// Validate and build.
    pub fn build(file: SystemFile) -> Result<Self, ConfigError> {
        file.validate()?;
        let label = file.label.clone();
        let bad = |e: NdsError| ConfigError(format!("{label}: {e}"));
        let system = match &file.system {
            SystemSpec::Shift { alphabet, depth } => {
                let alphabet = match alphabet {
                    AlphabetSpec::Full { size } => AlphabetSeq::Periodic(vec![*size]),
                    AlphabetSpec::Periodic { sizes } => AlphabetSeq::Periodic(sizes.clone()),
                    AlphabetSpec::GeometricBlocks { even, odd } => AlphabetSeq::GeometricBlocks { even: *even, odd: *odd },
                };
                System::Shift(NaShift::new(label.clone(), ShiftSpec { alphabet }, *depth).map_err(bad)?)
            }
            SystemSpec::Doubling { metric, delta } => {
                let metric = match metric {
                    MetricSpec::Euclidean => MetricKind::Euclidean,
                    MetricSpec::Scaled => MetricKind::Scaled,
                    MetricSpec::Bounded => MetricKind::Bounded,
                };
                System::Doubling(DoublingChain::new(label.clone(), DoublingChainSpec { metric, delta: *delta }).map_err(bad)?)
            }
            SystemSpec::Nifs { levels, depth, gap } => {
                let levels = levels.iter().map(|l| l.iter().map(|c| Contraction { ratio: c.ratio, offset: c.offset }).collect()).collect();
                System::Nifs(NifsRepeller::new(label.clone(), &NifsSpec { levels, depth: *depth, gap: *gap }).map_err(bad)?)
            }
            SystemSpec::Cloud { seed, levels, points, dim } => {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
                System::Cloud(PointCloudSystem::random(&mut rng, label.clone(), *levels, *points, *dim))
            }
        };
        Ok(Self { file, system })
    }

    /// Instance label.
    pub fn label(&self) -> &str {
        &self.file.label
    }

    /// Estimator settings from the file.
    pub fn config(&self) -> EstimatorConfig {
        self.file.estimator.to_config()
    }

    /// Whether every computation on this instance is exact combinatorics.
    pub fn symbolic(&self) -> bool {
        matches!(self.system, System::Shift(_))
    }
}

/// The quantities the command line can estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuantityKind {
    /// Bowen entropy (center weights, zero potential).
    BowenEntropy,
    /// Packing entropy.
    PackingEntropy,
    /// Bowen pressure with center weights.
    BowenPressure,
    /// Bowen pressure with sup-over-ball weights.
    SupPressure,
    /// Bowen pressure through weighted (fractional) covers.
    WeightedPressure,
    /// Packing pressure.
    PackingPressure,
}

impl QuantityKind {
    /// All kinds, in display order.
    pub const ALL: [QuantityKind; 6] = [
        QuantityKind::BowenEntropy,
        QuantityKind::PackingEntropy,
        QuantityKind::BowenPressure,
        QuantityKind::SupPressure,
        QuantityKind::WeightedPressure,
        QuantityKind::PackingPressure,
    ];

    /// The library quantity.
    pub fn quantity(self) -> Quantity {
        match self {
            QuantityKind::BowenEntropy | QuantityKind::BowenPressure => Quantity::Bowen(CoverMode::Center),
            QuantityKind::SupPressure => Quantity::Bowen(CoverMode::Sup),
            QuantityKind::WeightedPressure => Quantity::Bowen(CoverMode::Weighted),
            QuantityKind::PackingEntropy | QuantityKind::PackingPressure => Quantity::Packing(Decomposition::Best),
        }
    }

    /// Entropies ignore the potential.
    pub fn is_entropy(self) -> bool {
        matches!(self, QuantityKind::BowenEntropy | QuantityKind::PackingEntropy)
    }

    /// Whether this is a packing quantity.
    pub fn is_packing(self) -> bool {
        matches!(self, QuantityKind::PackingEntropy | QuantityKind::PackingPressure)
    }
}

impl fmt::Display for QuantityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuantityKind::BowenEntropy => "bowen-entropy",
            QuantityKind::PackingEntropy => "packing-entropy",
            QuantityKind::BowenPressure => "bowen-pressure",
            QuantityKind::SupPressure => "sup-pressure",
            QuantityKind::WeightedPressure => "weighted-pressure",
            QuantityKind::PackingPressure => "packing-pressure",
        })
    }
}

impl FromStr for QuantityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        QuantityKind::ALL.into_iter().find(|q| q.to_string() == s).ok_or_else(|| {
            let names: Vec<String> = QuantityKind::ALL.iter().map(|q| q.to_string()).collect();
            format!("unknown quantity `{s}` (expected one of {})", names.join(", "))
        })
    }
}

/// `(inf f, sup f)` over all levels and points, from the specification.
pub fn potential_range(spec: &PotentialSpec) -> (f64, f64) {
    let span = |v: &mut dyn Iterator<Item = f64>| v.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    match spec {
        PotentialSpec::Zero => (0.0, 0.0),
        PotentialSpec::Constant { value } => (*value, *value),
        PotentialSpec::Level { values } => span(&mut values.iter().copied()),
        PotentialSpec::Symbol { table } => span(&mut table.iter().flatten().copied()),
        PotentialSpec::Linear { a, b } => (a.min(a + b), a.max(a + b)),
    }
}

/// `‖f‖ = sup |f_k(x)|`.
pub fn potential_norm(spec: &PotentialSpec) -> f64 {
    let (lo, hi) = potential_range(spec);
    lo.abs().max(hi.abs())
}

fn generic_potential<P: 'static>(spec: &PotentialSpec) -> Option<PotentialSeq<P>> {
    Some(match spec {
        PotentialSpec::Zero => PotentialSeq::zero(),
        PotentialSpec::Constant { value } => PotentialSeq::constant(*value),
        PotentialSpec::Level { values } if !values.is_empty() => {
            let v = values.clone();
            PotentialSeq::level_constant(move |k| v[k % v.len()])
        }
        _ => return None,
    })
}

fn check_table(table: &[Vec<f64>], alphabet: impl Fn(usize) -> usize, depth: usize) -> Result<(), ConfigError> {
    if table.is_empty() {
        return Err(ConfigError("symbol potential table is empty".into()));
    }
    for k in 0..depth {
        if table[k % table.len()].len() < alphabet(k) {
            return Err(ConfigError(format!("symbol potential row for level {k} is shorter than the alphabet")));
        }
    }
    Ok(())
}

/// Potential on shift words.
pub fn shift_potential(sh: &NaShift, spec: &PotentialSpec) -> Result<PotentialSeq<Word>, ConfigError> {
    if let Some(f) = generic_potential(spec) {
        return Ok(f);
    }
    match spec {
        PotentialSpec::Symbol { table } => {
            check_table(table, |k| sh.alphabet(k), sh.depth())?;
            let t = table.clone();
            Ok(symbol_potential(move |k, a| t[k % t.len()][a as usize]).with_norm(NormBound::Finite(potential_norm(spec))))
        }
        PotentialSpec::Linear { .. } => Err(ConfigError("linear potentials need an interval system".into())),
        _ => Err(ConfigError("level potential needs at least one value".into())),
    }
}

fn linear<P: 'static>(a: f64, b: f64, u: impl Fn(usize, &P) -> f64 + Send + Sync + 'static) -> PotentialSeq<P> {
    let norm = a.abs().max((a + b).abs());
    PotentialSeq::new(move |k, x| a + b * u(k, x)).with_norm(NormBound::Finite(norm)).with_modulus(move |e| e / b.abs().max(1e-300))
}

/// Potential on doubling-chain grid points.
pub fn doubling_potential(sys: &DoublingChain, spec: &PotentialSpec) -> Result<PotentialSeq<i64>, ConfigError> {
    if let Some(f) = generic_potential(spec) {
        return Ok(f);
    }
    match spec {
        PotentialSpec::Linear { a, b } => {
            let g = sys.per_unit() as f64;
            Ok(linear(*a, *b, move |k, i: &i64| *i as f64 / g / (k as f64).exp2()))
        }
        _ => Err(ConfigError("doubling chains accept zero, constant, level and linear potentials".into())),
    }
}

/// Potential on repeller points.
pub fn nifs_potential(sys: &NifsRepeller, spec: &PotentialSpec) -> Result<PotentialSeq<ndspressure::systems::NifsPoint>, ConfigError> {
    if let Some(f) = generic_potential(spec) {
        return Ok(f);
    }
    match spec {
        PotentialSpec::Linear { a, b } => Ok(linear(*a, *b, |_, x: &ndspressure::systems::NifsPoint| x.x())),
        PotentialSpec::Symbol { table } => {
            check_table(table, |k| sys.branches(k).len(), sys.depth())?;
            let t = table.clone();
            Ok(PotentialSeq::new(move |k, x: &ndspressure::systems::NifsPoint| x.addr.first().map_or(0.0, |&a| t[k % t.len()][a as usize])))
        }
        _ => Err(ConfigError("level potential needs at least one value".into())),
    }
}

/// Potential on point-cloud indices (linear uses the first coordinate).
pub fn cloud_potential(sys: &PointCloudSystem, spec: &PotentialSpec) -> Result<PotentialSeq<usize>, ConfigError> {
    if let Some(f) = generic_potential(spec) {
        return Ok(f);
    }
    match spec {
        PotentialSpec::Linear { a, b } => {
            let cloud = Arc::new(sys.clone());
            Ok(linear(*a, *b, move |k, i: &usize| cloud.coords(k, *i)[0]))
        }
        _ => Err(ConfigError("point clouds accept zero, constant, level and linear potentials".into())),
    }
}

/// Carrier indices of the target set.
pub fn target_indices<S: NdSystem>(sys: &S, carrier: &[S::Point], target: &TargetSpec) -> Result<Vec<usize>, ConfigError> {
    let z: Vec<usize> = match target {
        TargetSpec::Whole => (0..carrier.len()).collect(),
        TargetSpec::Cylinder { prefix } => (0..carrier.len())
            .filter(|&i| sys.symbols(&carrier[i]).is_some_and(|s| s.starts_with(prefix)))
            .collect(),
        TargetSpec::Interval { lo, hi } => (0..carrier.len())
            .filter(|&i| sys.coordinate(0, &carrier[i]).is_some_and(|x| *lo <= x && x <= *hi))
            .collect(),
        TargetSpec::Indices { indices } => {
            if let Some(&bad) = indices.iter().find(|&&i| i >= carrier.len()) {
                return Err(ConfigError(format!("target index {bad} outside a carrier of {} points", carrier.len())));
            }
            indices.clone()
        }
    };
    if z.is_empty() {
        return Err(ConfigError("target set is empty".into()));
    }
    Ok(z)
}

fn explicit_estimate<S: NdSystem>(sys: &S, f: &PotentialSeq<S::Point>, target: &TargetSpec, q: &Quantity, cfg: &EstimatorConfig) -> anyhow::Result<PressureEstimate> {
    let carrier = sys.carrier(0)?;
    let z = target_indices(sys, &carrier, target)?;
    let p = ExplicitProblem::new(sys, f, carrier, z)?;
    Ok(estimate(&p, q, cfg)?)
}

fn shift_words(sh: &NaShift) -> f64 {
    sh.log_count(0, sh.depth()).exp()
}

/// Estimate one quantity. Shifts use the exact cylinder recursion when the
/// target is a cylinder and the potential allows it, and fall back to
/// explicit enumeration on small truncations.
pub fn estimate_quantity(inst: &Instance, potential: &PotentialSpec, kind: QuantityKind, cfg: &EstimatorConfig) -> anyhow::Result<PressureEstimate> {
    let zero = PotentialSpec::Zero;
    let spec = if kind.is_entropy() { &zero } else { potential };
    let q = kind.quantity();
    let target = &inst.file.target;
    match &inst.system {
        System::Shift(sh) => {
            let f = shift_potential(sh, spec)?;
            let prefix = match target {
                TargetSpec::Whole => Some(Vec::new()),
                TargetSpec::Cylinder { prefix } => Some(prefix.clone()),
                _ => None,
            };
            if let Some(prefix) = prefix {
                let attempt = CylinderProblem::new(sh, &f, prefix).and_then(|p| estimate(&p, &q, cfg));
                match attempt {
                    Err(NdsError::Unsupported(why)) if shift_words(sh) > EXPLICIT_WORD_LIMIT => {
                        bail!("{}: {why}, and the truncation is too deep for explicit enumeration", inst.label())
                    }
                    Err(NdsError::Unsupported(_)) => {}
                    other => return Ok(other?),
                }
            }
            if shift_words(sh) > EXPLICIT_WORD_LIMIT {
                bail!("{}: explicit targets need a truncation with at most {EXPLICIT_WORD_LIMIT} words", inst.label());
            }
            explicit_estimate(sh, &f, target, &q, cfg)
        }
        System::Doubling(sys) => explicit_estimate(sys, &doubling_potential(sys, spec)?, target, &q, cfg),
        System::Nifs(sys) => explicit_estimate(sys, &nifs_potential(sys, spec)?, target, &q, cfg),
        System::Cloud(sys) => explicit_estimate(sys, &cloud_potential(sys, spec)?, target, &q, cfg),
    }
    .with_context(|| format!("{} on {}", kind, inst.label()))
}

/// Product measure on a shift, with rows repeated up to the truncation depth.
pub fn shift_measure(sh: &NaShift, spec: &MeasureSpec) -> Result<MeasureRep<Word>, ConfigError> {
    match spec {
        MeasureSpec::Bernoulli { probs } => {
            if probs.is_empty() {
                return Err(ConfigError("bernoulli measure needs at least one row".into()));
            }
            let rows: Vec<Vec<f64>> = (0..sh.depth()).map(|k| probs[k % probs.len()].clone()).collect();
            bernoulli_measure(sh.spec(), &rows).map_err(|e| ConfigError(e.to_string()))
        }
        MeasureSpec::Atomic { atoms } => {
            let mut out = Vec::new();
            for a in atoms {
                let PointSpec::Word(w) = &a.point else {
                    return Err(ConfigError("shift atoms are words".into()));
                };
                let word = Word(w.clone());
                if !sh.contains(0, &word) {
                    return Err(ConfigError(format!("atom {w:?} is not a level-0 word")));
                }
                out.push((word, a.weight));
            }
            MeasureRep::atomic(out).map_err(|e| ConfigError(e.to_string()))
        }
    }
}

/// Atomic measure on a doubling chain (coordinates are snapped to the grid).
pub fn doubling_measure(sys: &DoublingChain, spec: &MeasureSpec) -> Result<MeasureRep<i64>, ConfigError> {
    let MeasureSpec::Atomic { atoms } = spec else {
        return Err(ConfigError("doubling chains take atomic measures".into()));
    };
    let mut out = Vec::new();
    for a in atoms {
        let i = match a.point {
            PointSpec::X(x) => sys.point(x),
            PointSpec::Index(i) => i as i64,
            PointSpec::Word(_) => return Err(ConfigError("doubling atoms are coordinates or indices".into())),
        };
        if !sys.contains(0, &i) {
            return Err(ConfigError(format!("atom {i} is outside the level-0 grid")));
        }
        out.push((i, a.weight));
    }
    MeasureRep::atomic(out).map_err(|e| ConfigError(e.to_string()))
}

fn indexed_measure<S: NdSystem>(sys: &S, spec: &MeasureSpec, lookup: &dyn Fn(&PointSpec) -> Option<S::Point>) -> Result<MeasureRep<S::Point>, ConfigError> {
    let MeasureSpec::Atomic { atoms } = spec else {
        return Err(ConfigError(format!("{} takes atomic measures", sys.label())));
    };
    let mut out = Vec::new();
    for a in atoms {
        let p = lookup(&a.point).ok_or_else(|| ConfigError(format!("atom {:?} is not a level-0 point of {}", a.point, sys.label())))?;
        out.push((p, a.weight));
    }
    MeasureRep::atomic(out).map_err(|e| ConfigError(e.to_string()))
}

fn integrate<S: NdSystem>(
    sys: &S,
    mu: &MeasureRep<S::Point>,
    f: &PotentialSeq<S::Point>,
    cfg: &EstimatorConfig,
    samples: usize,
    seed: u64,
    make_point: &dyn Fn(Vec<u8>) -> S::Point,
) -> anyhow::Result<IntegratedReport> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    Ok(integrated_exponents(sys, mu, f, &cfg.eps_schedule, cfg.n_max, samples, &mut rng, make_point)?)
}

/// Integrated lower and upper local pressures of a measure, with the
/// radius schedule and `n_max` of `cfg`.
pub fn integrated_measure(
    inst: &Instance,
    potential: &PotentialSpec,
    measure: &MeasureSpec,
    cfg: &EstimatorConfig,
    samples: usize,
    seed: u64,
) -> anyhow::Result<IntegratedReport> {
    match &inst.system {
        System::Shift(sh) => integrate(sh, &shift_measure(sh, measure)?, &shift_potential(sh, potential)?, cfg, samples, seed, &|w| Word(w)),
        System::Doubling(sys) => integrate(sys, &doubling_measure(sys, measure)?, &doubling_potential(sys, potential)?, cfg, samples, seed, &|_| 0),
        System::Nifs(sys) => {
            let carrier = sys.carrier(0)?;
            let mu = indexed_measure(sys, measure, &|p| match p {
                PointSpec::Index(i) => carrier.get(*i).cloned(),
                PointSpec::Word(addr) => sys.point(0, addr).ok(),
                PointSpec::X(_) => None,
            })?;
            let first = carrier[0].clone();
            integrate(sys, &mu, &nifs_potential(sys, potential)?, cfg, samples, seed, &|_| first.clone())
        }
        System::Cloud(sys) => {
            let n = sys.carrier(0)?.len();
            let mu = indexed_measure(sys, measure, &|p| match p {
                PointSpec::Index(i) if *i < n => Some(*i),
                _ => None,
            })?;
            integrate(sys, &mu, &cloud_potential(sys, potential)?, cfg, samples, seed, &|_| 0)
        }
    }
    .with_context(|| format!("measure on {}", inst.label()))
}
