//! Nonautonomous systems, Bowen metrics and balls, Birkhoff sums.
//!
//! A system is a sequence of finite metric carriers `X_k` with maps
//! `T_k: X_k -> X_{k+1}`. Everything downstream works through [`NdSystem`].

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt::Debug;

use crate::math::abs;
use crate::{NdsError, Result};

/// Which kind of finite carrier backs a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BackendKind {
    /// Words over a level-dependent alphabet, truncated at a fixed depth.
    SymbolicLevel,
    /// Equally spaced points on an interval.
    IntervalGrid,
    /// An explicit finite list of points.
    FinitePointCloud,
}

/// Summary of one level carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelInfo {
    /// Carrier kind.
    pub kind: BackendKind,
    /// Number of carrier points (saturating).
    pub len: usize,
    /// Diameter of the carrier in the level metric.
    pub diameter: f64,
    /// Smallest positive distance the carrier can resolve.
    pub resolution: f64,
}

/// A nonautonomous dynamical system on finite carriers.
///
/// Implementations must keep `step(k, ·)` inside the level `k + 1` carrier.
/// The provided methods are correct for every backend; backends override
/// them only to go faster.
pub trait NdSystem: Send + Sync {
    /// A point of some level carrier.
    type Point: Clone + PartialEq + Debug + Send + Sync + 'static;

    /// Human-readable instance name.
    fn label(&self) -> &str;

    /// Carrier kind.
    fn backend(&self) -> BackendKind;

    /// Highest level the generator produces, or `None` when unbounded.
    fn max_level(&self) -> Option<usize>;

    /// Size, diameter and resolution of level `k`.
    fn level_info(&self, k: usize) -> Result<LevelInfo>;

    /// The full carrier of level `k`, in the backend's natural order.
    fn carrier(&self, k: usize) -> Result<Vec<Self::Point>>;

    /// Whether `x` is a point of the level `k` carrier.
    fn contains(&self, k: usize, x: &Self::Point) -> bool;

    /// The level metric `d_k`.
    fn metric(&self, k: usize, x: &Self::Point, y: &Self::Point) -> f64;

    /// The map `T_k`.
    fn step(&self, k: usize, x: &Self::Point) -> Result<Self::Point>;

    /// Metric error introduced by one application of `T_k` (grid snapping).
    fn step_slack(&self, _k: usize) -> f64 {
        0.0
    }

    /// Up to `max` carrier points of level `k`, spread over the carrier.
    fn sample_carrier(&self, k: usize, max: usize) -> Result<Vec<Self::Point>> {
        let all = self.carrier(k)?;
        Ok(spread(all, max))
    }

    /// Pairs of level `k` points at many mutual distances, for modulus
    /// estimation. The default takes all pairs of a carrier sample.
    fn sample_pairs(&self, k: usize, max: usize) -> Result<Vec<(Self::Point, Self::Point)>> {
        let pts = self.sample_carrier(k, max)?;
        let mut out = Vec::new();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                out.push((pts[i].clone(), pts[j].clone()));
            }
        }
        Ok(out)
    }

    /// The Bowen metric `d_{k,n}`.
    fn bowen_distance(&self, k: usize, n: usize, x: &Self::Point, y: &Self::Point) -> Result<f64> {
        bowen_distance_iterated(self, k, n, x, y)
    }

    /// Indices of the `domain` points inside the Bowen ball `spec`.
    fn ball_members(&self, spec: &BowenBallSpec<Self::Point>, domain: &[Self::Point]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, y) in domain.iter().enumerate() {
            let d = self.bowen_distance(spec.k, spec.n, &spec.center, y)?;
            if spec.admits(d) {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// For symbolic backends: the cylinder depth equal to the Bowen ball of
    /// depth `n` and radius `eps` (`Some(0)` is the whole space).
    fn cylinder_depth(&self, _n: usize, _eps: f64, _closed: bool) -> Option<usize> {
        None
    }

    /// For symbolic backends: the symbols of a word.
    fn symbols<'a>(&self, _x: &'a Self::Point) -> Option<&'a [u8]> {
        None
    }

    /// For interval backends: the real coordinate of a point.
    fn coordinate(&self, _k: usize, _x: &Self::Point) -> Option<f64> {
        None
    }
}

/// At most `max` evenly strided items of `all`, always keeping the first and last.
pub(crate) fn spread<T: Clone>(all: Vec<T>, max: usize) -> Vec<T> {
    if all.len() <= max || max == 0 {
        return all;
    }
    if max == 1 {
        return alloc::vec![all[0].clone()];
    }
    let last = all.len() - 1;
    (0..max).map(|i| all[i * last / (max - 1)].clone()).collect()
}

fn check_levels<S: NdSystem + ?Sized>(sys: &S, top: usize) -> Result<()> {
    match sys.max_level() {
        Some(max) if top > max => Err(NdsError::LevelOutOfRange { level: top, max }),
        _ => Ok(()),
    }
}

/// `T_k^j x`; `j = 0` returns `x`.
pub fn compose<S: NdSystem + ?Sized>(sys: &S, k: usize, j: usize, x: &S::Point) -> Result<S::Point> {
    check_levels(sys, k + j)?;
    let mut y = x.clone();
    for i in 0..j {
        y = sys.step(k + i, &y)?;
    }
    Ok(y)
}

/// The orbit `x, T x, ..., T^{n-1} x` starting at level `k`.
pub fn orbit<S: NdSystem + ?Sized>(sys: &S, k: usize, n: usize, x: &S::Point) -> Result<Vec<S::Point>> {
    check_levels(sys, k + n.saturating_sub(1))?;
    let mut out = Vec::with_capacity(n);
    let mut y = x.clone();
    for j in 0..n {
        if j > 0 {
            y = sys.step(k + j - 1, &y)?;
        }
        out.push(y.clone());
    }
    Ok(out)
}

fn bowen_distance_iterated<S: NdSystem + ?Sized>(
    sys: &S,
    k: usize,
    n: usize,
    x: &S::Point,
    y: &S::Point,
) -> Result<f64> {
    check_levels(sys, k + n.saturating_sub(1))?;
    let mut a = x.clone();
    let mut b = y.clone();
    let mut d = 0.0f64;
    for j in 0..n.max(1) {
        if j > 0 {
            a = sys.step(k + j - 1, &a)?;
            b = sys.step(k + j - 1, &b)?;
        }
        d = d.max(sys.metric(k + j, &a, &b));
    }
    Ok(d)
}

/// `d_{k,n}(x, y) = max_{j<n} d_{k+j}(T^j x, T^j y)`.
pub fn bowen_distance<S: NdSystem + ?Sized>(sys: &S, k: usize, n: usize, x: &S::Point, y: &S::Point) -> Result<f64> {
    sys.bowen_distance(k, n, x, y)
}

/// A Bowen ball `B_{k,n}(center, eps)`, open or closed.
#[derive(Debug, Clone, PartialEq)]
pub struct BowenBallSpec<P> {
    /// Level of the center.
    pub k: usize,
    /// Center point.
    pub center: P,
    /// Depth, at least 1.
    pub n: usize,
    /// Radius, positive.
    pub eps: f64,
    /// Closed (`<=`) rather than open (`<`).
    pub closed: bool,
}

impl<P> BowenBallSpec<P> {
    /// Validated constructor.
    pub fn new(k: usize, center: P, n: usize, eps: f64, closed: bool) -> Result<Self> {
        if n == 0 {
            return Err(NdsError::InvalidSpec("Bowen ball depth must be at least 1".into()));
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(NdsError::InvalidSpec("Bowen ball radius must be positive and finite".into()));
        }
        Ok(Self { k, center, n, eps, closed })
    }

    /// Open ball at level 0.
    pub fn open(center: P, n: usize, eps: f64) -> Result<Self> {
        Self::new(0, center, n, eps, false)
    }

    /// Closed ball at level 0.
    pub fn closed(center: P, n: usize, eps: f64) -> Result<Self> {
        Self::new(0, center, n, eps, true)
    }

    /// Whether a point at Bowen distance `d` from the center belongs.
    #[inline]
    pub fn admits(&self, d: f64) -> bool {
        if self.closed {
            d <= self.eps
        } else {
            d < self.eps
        }
    }
}

/// Points of `domain` in the ball, via the Bowen metric (max form).
pub fn bowen_ball_points<S: NdSystem + ?Sized>(
    sys: &S,
    spec: &BowenBallSpec<S::Point>,
    domain: &[S::Point],
) -> Result<Vec<S::Point>> {
    Ok(sys.ball_members(spec, domain)?.into_iter().map(|i| domain[i].clone()).collect())
}

/// Points of `domain` in `∩_{j<n} T^{-j} B(T^j x, eps)`, filtering one
/// level at a time with the level metrics only.
pub fn bowen_ball_points_intersection<S: NdSystem + ?Sized>(
    sys: &S,
    spec: &BowenBallSpec<S::Point>,
    domain: &[S::Point],
) -> Result<Vec<S::Point>> {
    let centers = orbit(sys, spec.k, spec.n, &spec.center)?;
    let mut alive: Vec<(usize, S::Point)> = domain.iter().cloned().enumerate().collect();
    for (j, c) in centers.iter().enumerate() {
        let level = spec.k + j;
        let mut next = Vec::with_capacity(alive.len());
        for (i, y) in alive {
            if spec.admits(sys.metric(level, c, &y)) {
                let y = if j + 1 < spec.n { sys.step(level, &y)? } else { y };
                next.push((i, y));
            }
        }
        alive = next;
    }
    Ok(alive.into_iter().map(|(i, _)| domain[i].clone()).collect())
}

/// A declared sup-norm bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormBound {
    /// `‖f‖ <= value`.
    Finite(f64),
    /// No uniform bound.
    Unbounded,
}

impl NormBound {
    /// The finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            NormBound::Finite(v) => Some(v),
            NormBound::Unbounded => None,
        }
    }
}

type LevelFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;
type SymbolFn = Arc<dyn Fn(usize, u8) -> f64 + Send + Sync>;

/// Structural knowledge about a potential that exact solvers can exploit.
#[derive(Clone)]
pub enum PotentialShape {
    /// `f = 0`.
    Zero,
    /// `f_k ≡ a`.
    Constant(f64),
    /// `f_k ≡ c(k)`.
    LevelConstant(LevelFn),
    /// `f_k(x) = φ(k, x_0)` on a symbolic backend.
    Symbolwise(SymbolFn),
    /// No exploitable structure.
    General,
}

impl Debug for PotentialShape {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PotentialShape::Zero => f.write_str("Zero"),
            PotentialShape::Constant(a) => write!(f, "Constant({a})"),
            PotentialShape::LevelConstant(_) => f.write_str("LevelConstant"),
            PotentialShape::Symbolwise(_) => f.write_str("Symbolwise"),
            PotentialShape::General => f.write_str("General"),
        }
    }
}

impl PotentialShape {
    /// Value of the potential on symbol `a` at level `k`, when the shape
    /// depends on at most the first symbol.
    pub fn symbol_value(&self, k: usize, a: u8) -> Option<f64> {
        match self {
            PotentialShape::Zero => Some(0.0),
            PotentialShape::Constant(c) => Some(*c),
            PotentialShape::LevelConstant(g) => Some(g(k)),
            PotentialShape::Symbolwise(g) => Some(g(k, a)),
            PotentialShape::General => None,
        }
    }
}

/// A sequence of potentials `f_k: X_k -> R`.
#[derive(Clone)]
pub struct PotentialSeq<P> {
    func: Arc<dyn Fn(usize, &P) -> f64 + Send + Sync>,
    declared_norm: Option<NormBound>,
    modulus: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    shape: PotentialShape,
}

impl<P> Debug for PotentialSeq<P> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("PotentialSeq")
            .field("declared_norm", &self.declared_norm)
            .field("has_modulus", &self.modulus.is_some())
            .field("shape", &self.shape)
            .finish()
    }
}

impl<P: 'static> PotentialSeq<P> {
    /// An arbitrary potential with no declared metadata.
    pub fn new(func: impl Fn(usize, &P) -> f64 + Send + Sync + 'static) -> Self {
        Self { func: Arc::new(func), declared_norm: None, modulus: None, shape: PotentialShape::General }
    }

    /// The zero potential.
    pub fn zero() -> Self {
        Self {
            func: Arc::new(|_, _| 0.0),
            declared_norm: Some(NormBound::Finite(0.0)),
            modulus: Some(Arc::new(|e| e)),
            shape: PotentialShape::Zero,
        }
    }

    /// `f_k ≡ a`.
    pub fn constant(a: f64) -> Self {
        Self {
            func: Arc::new(move |_, _| a),
            declared_norm: Some(NormBound::Finite(abs(a))),
            modulus: Some(Arc::new(|e| e)),
            shape: PotentialShape::Constant(a),
        }
    }

    /// `f_k ≡ c(k)`; the norm is left undeclared.
    pub fn level_constant(c: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        let c: LevelFn = Arc::new(c);
        let g = c.clone();
        Self {
            func: Arc::new(move |k, _| g(k)),
            declared_norm: None,
            modulus: Some(Arc::new(|e| e)),
            shape: PotentialShape::LevelConstant(c),
        }
    }

    /// Attach a declared norm bound.
    pub fn with_norm(mut self, norm: NormBound) -> Self {
        self.declared_norm = Some(norm);
        self
    }

    /// Attach an equicontinuity modulus `eps -> delta`.
    pub fn with_modulus(mut self, m: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.modulus = Some(Arc::new(m));
        self
    }

    pub(crate) fn with_shape(mut self, shape: PotentialShape) -> Self {
        self.shape = shape;
        self
    }

    /// `f_k(x)`.
    #[inline]
    pub fn eval(&self, k: usize, x: &P) -> f64 {
        (self.func)(k, x)
    }

    /// Declared norm, if any.
    pub fn declared_norm(&self) -> Option<NormBound> {
        self.declared_norm
    }

    /// Declared modulus `delta(eps)`, if any.
    pub fn modulus(&self, eps: f64) -> Option<f64> {
        self.modulus.as_ref().map(|m| m(eps))
    }

    /// Structural shape.
    pub fn shape(&self) -> &PotentialShape {
        &self.shape
    }

    /// `f + a·1`.
    pub fn shifted(&self, a: f64) -> Self {
        let f = self.func.clone();
        let shape = match &self.shape {
            PotentialShape::Zero => PotentialShape::Constant(a),
            PotentialShape::Constant(c) => PotentialShape::Constant(c + a),
            PotentialShape::LevelConstant(g) => {
                let g = g.clone();
                PotentialShape::LevelConstant(Arc::new(move |k| g(k) + a))
            }
            PotentialShape::Symbolwise(g) => {
                let g = g.clone();
                PotentialShape::Symbolwise(Arc::new(move |k, s| g(k, s) + a))
            }
            PotentialShape::General => PotentialShape::General,
        };
        Self {
            func: Arc::new(move |k, x| f(k, x) + a),
            declared_norm: self.declared_norm.map(|n| match n {
                NormBound::Finite(v) => NormBound::Finite(v + abs(a)),
                NormBound::Unbounded => NormBound::Unbounded,
            }),
            modulus: self.modulus.clone(),
            shape,
        }
    }

    /// `f ∘ π_k`, for a level-wise map `π` from another system.
    pub fn pullback<Q: 'static>(&self, pi: impl Fn(usize, &Q) -> P + Send + Sync + 'static) -> PotentialSeq<Q> {
        let f = self.func.clone();
        let shape = match &self.shape {
            PotentialShape::Symbolwise(_) | PotentialShape::General => PotentialShape::General,
            other => other.clone(),
        };
        PotentialSeq {
            func: Arc::new(move |k, x| f(k, &pi(k, x))),
            declared_norm: self.declared_norm,
            modulus: None,
            shape,
        }
    }
}

/// `S_{k,n} f(x) = Σ_{j<n} f_{k+j}(T^j x)`.
pub fn birkhoff_sum<S: NdSystem + ?Sized>(
    sys: &S,
    f: &PotentialSeq<S::Point>,
    k: usize,
    n: usize,
    x: &S::Point,
) -> Result<f64> {
    match f.shape() {
        PotentialShape::Zero => return Ok(0.0),
        PotentialShape::Constant(a) => return Ok(*a * n as f64),
        _ => {}
    }
    let mut y = x.clone();
    let mut s = 0.0;
    for j in 0..n {
        if j > 0 {
            y = sys.step(k + j - 1, &y)?;
        }
        s += f.eval(k + j, &y);
    }
    Ok(s)
}

/// `max_{k ∈ levels} max_x |f_k(x)|` over carrier samples, or
/// [`NormBound::Unbounded`] when declared so or when the sampled maxima keep
/// growing without deceleration along `levels` (intended as a doubling
/// schedule such as `1, 2, 4, 8, ...`).
pub fn potential_norm<S: NdSystem + ?Sized>(
    sys: &S,
    f: &PotentialSeq<S::Point>,
    levels: &[usize],
    samples_per_level: usize,
) -> Result<NormBound> {
    if let Some(NormBound::Unbounded) = f.declared_norm() {
        return Ok(NormBound::Unbounded);
    }
    let mut maxima = Vec::with_capacity(levels.len());
    for &k in levels {
        let pts = sys.sample_carrier(k, samples_per_level)?;
        let m = pts.iter().map(|x| abs(f.eval(k, x))).fold(0.0f64, f64::max);
        maxima.push(m);
    }
    let sup = maxima.iter().copied().fold(0.0f64, f64::max);
    if maxima.len() >= 3 {
        let t = &maxima[maxima.len() - 3..];
        let (d1, d2) = (t[1] - t[0], t[2] - t[1]);
        if d1 > 0.0 && d2 > 0.0 && d2 >= d1 {
            return Ok(NormBound::Unbounded);
        }
    }
    if !sup.is_finite() {
        return Ok(NormBound::Unbounded);
    }
    Ok(NormBound::Finite(sup))
}

/// Outcome of an equicontinuity probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Modulus {
    /// Every sampled pair closer than `delta` maps closer than `eps`.
    Delta(f64),
    /// No `delta` above the resolution floor works.
    Fails,
}

impl Modulus {
    /// The certified `delta`, if any.
    pub fn delta(self) -> Option<f64> {
        match self {
            Modulus::Delta(d) => Some(d),
            Modulus::Fails => None,
        }
    }
}

/// Largest `delta` from the dyadic ladder `top·2^{-j}` such that every
/// `(source distance, image distance)` pair with source distance below it
/// has image distance below `eps`. Fails when that `delta` is under `floor`.
pub fn modulus_from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>, eps: f64, floor: f64) -> Modulus {
    let mut top = 0.0f64;
    let mut worst = f64::INFINITY;
    for (d, e) in pairs {
        top = top.max(d);
        if e >= eps {
            worst = worst.min(d);
        }
    }
    if worst == f64::INFINITY {
        return Modulus::Delta(top.max(eps));
    }
    if !(top > 0.0) {
        return Modulus::Fails;
    }
    let mut delta = top;
    while delta > worst {
        delta *= 0.5;
        if delta < floor {
            return Modulus::Fails;
        }
    }
    if delta < floor || delta == 0.0 {
        Modulus::Fails
    } else {
        Modulus::Delta(delta)
    }
}

/// Equicontinuity probe for a potential sequence over the sampled levels.
/// The floor is the level-0 resolution.
pub fn equicontinuity_modulus<S: NdSystem + ?Sized>(
    sys: &S,
    f: &PotentialSeq<S::Point>,
    eps: f64,
    levels: &[usize],
    samples_per_level: usize,
) -> Result<Modulus> {
    let floor = sys.level_info(0)?.resolution;
    let mut pairs = Vec::new();
    for &k in levels {
        for (x, y) in sys.sample_pairs(k, samples_per_level)? {
            pairs.push((sys.metric(k, &x, &y), abs(f.eval(k, &x) - f.eval(k, &y))));
        }
    }
    Ok(modulus_from_pairs(pairs, eps, floor))
}

/// Equicontinuity probe for a level-wise map family `π_k` from `src` to
/// `dst`. The floor is the level-0 resolution of `src`.
pub fn map_equicontinuity_modulus<S, D, F>(
    src: &S,
    dst: &D,
    pi: F,
    eps: f64,
    levels: &[usize],
    samples_per_level: usize,
) -> Result<Modulus>
where
    S: NdSystem + ?Sized,
    D: NdSystem + ?Sized,
    F: Fn(usize, &S::Point) -> D::Point,
{
    let floor = src.level_info(0)?.resolution;
    let mut pairs = Vec::new();
    for &k in levels {
        for (x, y) in src.sample_pairs(k, samples_per_level)? {
            pairs.push((src.metric(k, &x, &y), dst.metric(k, &pi(k, &x), &pi(k, &y))));
        }
    }
    Ok(modulus_from_pairs(pairs, eps, floor))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_ladder_stops_below_worst_pair() {
        let pairs = [(1.0, 0.0), (0.3, 0.5), (0.1, 0.01)];
        assert_eq!(modulus_from_pairs(pairs, 0.2, 1e-3), Modulus::Delta(0.25));
    }

    #[test]
    fn modulus_fails_under_floor() {
        let pairs = [(1.0, 0.0), (1e-5, 1.0)];
        assert_eq!(modulus_from_pairs(pairs, 0.5, 1e-4), Modulus::Fails);
    }

    #[test]
    fn modulus_without_violation_is_generous() {
        let pairs = [(0.5, 0.1), (0.2, 0.05)];
        assert_eq!(modulus_from_pairs(pairs, 0.3, 1e-4), Modulus::Delta(0.5));
    }

    #[test]
    fn spread_keeps_endpoints() {
        let v: Vec<u32> = (0..100).collect();
        let s = spread(v, 5);
        assert_eq!(s.first(), Some(&0));
        assert_eq!(s.last(), Some(&99));
        assert_eq!(s.len(), 5);
    }

    #[test]
    fn ball_spec_rejects_bad_parameters() {
        assert!(BowenBallSpec::open(0u8, 0, 0.5).is_err());
        assert!(BowenBallSpec::open(0u8, 1, 0.0).is_err());
        assert!(BowenBallSpec::open(0u8, 1, f64::NAN).is_err());
        let b = BowenBallSpec::closed(0u8, 2, 0.5).unwrap();
        assert!(b.admits(0.5));
        let o = BowenBallSpec::open(0u8, 2, 0.5).unwrap();
        assert!(!o.admits(0.5));
    }
}
