//! Carathéodory cover and packing values, critical exponents, and the
//! Bowen and packing pressure estimators.
//!
//! Two problem kinds implement [`PressureProblem`]:
//!
//! - [`ExplicitProblem`]: a finite target set inside a finite level-0
//!   carrier, with ball families enumerated and solved by [`crate::setcover`];
//! - [`CylinderProblem`]: a cylinder of a nonautonomous full shift, where
//!   the optimal cover and packing are computed exactly by a depth recursion.
//!
//! All values are carried as natural logarithms.

mod cylinder;
mod explicit;

use alloc::boxed::Box;
use alloc::vec::Vec;

pub use cylinder::CylinderProblem;
pub use explicit::{CenterSource, CoverFamily, ExplicitProblem};

use crate::nds::BowenBallSpec;
use crate::setcover::Method;
use crate::{NdsError, Result};

/// Which Carathéodory cover value to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoverMode {
    /// Weights `exp(-n s + S_n f(center))`.
    Center,
    /// Weights `exp(-n s + sup_{ball} S_n f)`.
    Sup,
    /// Fractional covers with sup weights (the linear relaxation).
    Weighted,
}

/// Finite decompositions of the target set for the modified packing value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decomposition {
    /// The single part `{Z}`.
    Trivial,
    /// One refinement level: sub-cylinders for shifts, halves in carrier
    /// order for explicit sets.
    Dyadic,
    /// The smaller of [`Decomposition::Trivial`] and [`Decomposition::Dyadic`].
    Best,
    /// Explicit parts, as positions into the target set.
    Parts(Vec<Vec<usize>>),
}

/// The quantity whose critical exponent is sought.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Quantity {
    /// Bowen pressure through a cover value.
    Bowen(CoverMode),
    /// Packing pressure through the modified packing value.
    Packing(Decomposition),
}

/// Result of a cover-value evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverValueReport<P> {
    /// Exponent `s`.
    pub s: f64,
    /// Smallest admitted depth `N`.
    pub n_lo: usize,
    /// Largest admitted depth.
    pub n_hi: usize,
    /// Radius.
    pub eps: f64,
    /// Value kind.
    pub mode: CoverMode,
    /// Log of a lower bound (the fractional optimum when available).
    pub log_lower: f64,
    /// Log of the best cover found.
    pub log_upper: f64,
    /// Solver that produced the upper bound.
    pub method: Method,
    /// The balls of the best cover, when enumerable.
    pub witness: Option<Vec<BowenBallSpec<P>>>,
    /// Fractional coefficients aligned with `witness` (weighted mode).
    pub coefficients: Option<Vec<f64>>,
}

/// Result of a packing-value evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct PackingValueReport<P> {
    /// Exponent `s`.
    pub s: f64,
    /// Smallest admitted depth `N`.
    pub n_lo: usize,
    /// Largest admitted depth.
    pub n_hi: usize,
    /// Radius.
    pub eps: f64,
    /// Log of the summed per-part packing values.
    pub log_value: f64,
    /// Whether every per-part value is provably optimal.
    pub exact: bool,
    /// Disjoint closed balls, when enumerable.
    pub witness: Option<Vec<BowenBallSpec<P>>>,
    /// Decomposition that produced the value.
    pub decomposition: Decomposition,
}

/// A problem whose Carathéodory values can be evaluated as functions of `s`.
pub trait PressureProblem: Sync {
    /// Instance label.
    fn label(&self) -> &str;

    /// `s ↦ log value` for depths in `[lo, hi]` at radius `eps`. Expensive
    /// preparation (ball enumeration) happens once, before the closure is
    /// returned.
    fn log_value_fn<'a>(&'a self, q: &Quantity, lo: usize, hi: usize, eps: f64) -> Result<Box<dyn Fn(f64) -> Result<f64> + 'a>>;

    /// Largest depth at which Bowen balls of radius `eps` still contain
    /// `min_points` target points on average (capped at `n_max`).
    fn resolved_depth(&self, _eps: f64, _min_points: f64, n_max: usize) -> Result<usize> {
        Ok(n_max)
    }

    /// Accumulated map slack along an orbit segment of length `depth`.
    fn slack(&self, _depth: usize) -> f64 {
        0.0
    }
}

/// Bisection for the `s` where `log value(s)` crosses 0, i.e. where the
/// finite-depth value crosses 1.
///
/// The bracket is widened (doubling its width, up to `|s| <= 1e6`) until
/// the value is `>= 1` at the left end and `<= 1` at the right end. The
/// value function is sampled on the bracket and must be non-increasing.
pub fn critical_exponent(log_value: &dyn Fn(f64) -> Result<f64>, bracket: (f64, f64), tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(NdsError::InvalidSpec("bracket must satisfy lo < hi".into()));
    }
    let mut at_lo = log_value(lo)?;
    let mut at_hi = log_value(hi)?;
    let mut width = hi - lo;
    while at_lo < 0.0 || at_hi > 0.0 {
        if width > 1e6 || at_lo.is_nan() || at_hi.is_nan() {
            return Err(NdsError::BracketFailure { lo, hi, at_lo, at_hi });
        }
        if at_lo < 0.0 {
            lo -= width;
            at_lo = log_value(lo)?;
        }
        if at_hi > 0.0 {
            hi += width;
            at_hi = log_value(hi)?;
        }
        width *= 2.0;
    }
    let samples = 8;
    let mut prev = at_lo;
    for i in 1..=samples {
        let s = lo + (hi - lo) * i as f64 / samples as f64;
        let v = log_value(s)?;
        if v > prev + 1e-9 * (1.0 + prev.abs()) {
            return Err(NdsError::NonMonotone { s_lo: lo + (hi - lo) * (i - 1) as f64 / samples as f64, s_hi: s });
        }
        prev = v;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if log_value(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// How depths are chosen for one radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthScheme {
    /// Fixed-depth crossings `s_n` at `n_1 = n/2` and `n_2 = n`, where `n`
    /// is the resolved depth, combined as `(n_2 s_{n_2} - n_1 s_{n_1}) / (n_2 - n_1)`.
    /// This cancels the `O(1/n)` bias of a single finite-depth crossing.
    Extrapolated,
    /// Crossing of the value with depths in `[n, n_max]`, where `n` is
    /// the resolved depth (the plain largest-`N` truncation).
    Truncated,
    /// Crossing of the value with depths in `[lo, hi]`.
    Window {
        /// Smallest depth.
        lo: usize,
        /// Largest depth.
        hi: usize,
    },
}

/// Knobs of the pressure estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    /// Radii, largest first.
    pub eps_schedule: Vec<f64>,
    /// Largest depth.
    pub n_max: usize,
    /// Depth selection.
    pub scheme: DepthScheme,
    /// Initial bisection bracket (widened automatically).
    pub s_bracket: (f64, f64),
    /// Bisection tolerance.
    pub bisection_tol: f64,
    /// Two consecutive radii whose estimates differ by less than this
    /// count as a plateau.
    pub plateau_tol: f64,
    /// Minimum average number of target points per Bowen ball; deeper
    /// balls are not resolved by the carrier.
    pub min_ball_points: f64,
    /// Radii above this threshold are skipped.
    pub eps0: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            eps_schedule: alloc::vec![0.1, 0.05, 0.025],
            n_max: 14,
            scheme: DepthScheme::Extrapolated,
            s_bracket: (-1.0, 3.0),
            bisection_tol: 1e-12,
            plateau_tol: 0.02,
            min_ball_points: 32.0,
            eps0: f64::INFINITY,
        }
    }
}

impl EstimatorConfig {
    /// Geometric schedule `eps0 · 2^{-i}` for `i < count`.
    pub fn geometric_schedule(eps0: f64, count: usize) -> Vec<f64> {
        (0..count).map(|i| eps0 * crate::math::pow2_neg(i)).collect()
    }
}

/// Estimate at one radius.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsEstimate {
    /// Radius.
    pub eps: f64,
    /// Critical exponent estimate.
    pub s_star: f64,
    /// Depth windows evaluated with their crossings.
    pub crossings: Vec<((usize, usize), f64)>,
    /// Depth actually reachable at this radius.
    pub resolved_depth: usize,
}

/// A pressure (or, at `f = 0`, entropy) estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureEstimate {
    /// Estimate at the smallest radius.
    pub value: f64,
    /// Per-radius estimates, in schedule order.
    pub per_eps: Vec<EpsEstimate>,
    /// Largest requested depth.
    pub n_max: usize,
    /// Scheme used.
    pub scheme: DepthScheme,
    /// Whether the last two radii agree within the plateau tolerance.
    pub plateau: bool,
    /// Whether the carrier resolution capped the depth below `n_max`.
    pub truncated: bool,
    /// Accumulated map slack at the deepest depth used.
    pub grid_slack: f64,
}

fn crossing<P: PressureProblem + ?Sized>(p: &P, q: &Quantity, lo: usize, hi: usize, eps: f64, cfg: &EstimatorConfig) -> Result<f64> {
    let f = p.log_value_fn(q, lo, hi, eps)?;
    critical_exponent(&*f, cfg.s_bracket, cfg.bisection_tol)
}

/// Run the estimator for one quantity over the radius schedule.
pub fn estimate<P: PressureProblem + ?Sized>(problem: &P, q: &Quantity, cfg: &EstimatorConfig) -> Result<PressureEstimate> {
    let mut per_eps = Vec::new();
    let mut truncated = false;
    let mut deepest = 0usize;
    for &eps in cfg.eps_schedule.iter().filter(|&&e| e <= cfg.eps0) {
        let n_eff = problem.resolved_depth(eps, cfg.min_ball_points, cfg.n_max)?.min(cfg.n_max);
        truncated |= n_eff < cfg.n_max;
        let (s_star, crossings) = match cfg.scheme {
            DepthScheme::Extrapolated => {
                if n_eff < 2 {
                    return Err(NdsError::Infeasible { eps, n_lo: 1, n_hi: n_eff });
                }
                let (n1, n2) = (n_eff / 2, n_eff);
                let s1 = crossing(problem, q, n1, n1, eps, cfg)?;
                let s2 = crossing(problem, q, n2, n2, eps, cfg)?;
                deepest = deepest.max(n2);
                let s = (n2 as f64 * s2 - n1 as f64 * s1) / (n2 - n1) as f64;
                (s, alloc::vec![((n1, n1), s1), ((n2, n2), s2)])
            }
            DepthScheme::Truncated => {
                let n = n_eff.max(1);
                let s = crossing(problem, q, n, cfg.n_max.max(n), eps, cfg)?;
                deepest = deepest.max(cfg.n_max);
                (s, alloc::vec![((n, cfg.n_max.max(n)), s)])
            }
            DepthScheme::Window { lo, hi } => {
                let s = crossing(problem, q, lo, hi, eps, cfg)?;
                deepest = deepest.max(hi);
                (s, alloc::vec![((lo, hi), s)])
            }
        };
        per_eps.push(EpsEstimate { eps, s_star, crossings, resolved_depth: n_eff });
    }
    let Some(last) = per_eps.last() else {
        return Err(NdsError::Empty("radius schedule (after applying eps0)"));
    };
    let value = last.s_star;
    let plateau = per_eps.len() >= 2 && (per_eps[per_eps.len() - 2].s_star - value).abs() < cfg.plateau_tol;
    Ok(PressureEstimate {
        value,
        per_eps,
        n_max: cfg.n_max,
        scheme: cfg.scheme,
        plateau,
        truncated,
        grid_slack: problem.slack(deepest),
    })
}

/// Bowen pressure; the entropy when the problem's potential is zero.
pub fn bowen_pressure<P: PressureProblem + ?Sized>(problem: &P, mode: CoverMode, cfg: &EstimatorConfig) -> Result<PressureEstimate> {
    estimate(problem, &Quantity::Bowen(mode), cfg)
}

/// Packing pressure; the entropy when the problem's potential is zero.
pub fn packing_pressure<P: PressureProblem + ?Sized>(problem: &P, decomposition: Decomposition, cfg: &EstimatorConfig) -> Result<PressureEstimate> {
    estimate(problem, &Quantity::Packing(decomposition), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{ln, pow2_neg};

    #[test]
    fn crossing_of_linear_log_value() {
        let f = |s: f64| Ok(10.0 * (ln(2.0) - s));
        let s = critical_exponent(&f, (0.0, 1.0), 1e-12).unwrap();
        assert!((s - ln(2.0)).abs() < 1e-11);
    }

    #[test]
    fn bracket_widens_automatically() {
        let f = |s: f64| Ok(5.0 - s);
        let s = critical_exponent(&f, (0.0, 1.0), 1e-10).unwrap();
        assert!((s - 5.0).abs() < 1e-9);
    }

    #[test]
    fn zero_value_is_a_bracket_failure() {
        let f = |_s: f64| Ok(f64::NEG_INFINITY);
        assert!(matches!(critical_exponent(&f, (0.0, 1.0), 1e-10), Err(NdsError::BracketFailure { .. })));
    }

    #[test]
    fn increasing_value_is_rejected() {
        // Crosses 0 at both ends of the bracket in the wrong direction after widening.
        let f = |s: f64| Ok(if s < 0.5 { 1.0 } else if s < 0.7 { 2.0 } else { -1.0 });
        assert!(matches!(critical_exponent(&f, (0.0, 1.0), 1e-10), Err(NdsError::NonMonotone { .. })));
    }

    #[test]
    fn geometric_schedule_halves() {
        assert_eq!(EstimatorConfig::geometric_schedule(0.4, 3), alloc::vec![0.4, 0.2, 0.1]);
        assert_eq!(pow2_neg(1), 0.5);
    }
}
