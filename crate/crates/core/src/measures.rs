//! Measures on level 0, Bowen-ball masses, local and integrated
//! measure-theoretic pressures, push-forwards, and the finite Frostman dual.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::lp;
use crate::math::{exp, ln, sqrt};
use crate::nds::{birkhoff_sum, BowenBallSpec, NdSystem, PotentialSeq};
use crate::pressure::{CoverMode, ExplicitProblem};
use crate::setcover::fractional_cover;
use crate::{NdsError, Result};

/// Product measure on a nonautonomous shift: symbol `a` at position `k`
/// has probability `probs[k][a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliSeq {
    probs: Vec<Vec<f64>>,
}

impl BernoulliSeq {
    /// Caller guarantees each row is a probability vector.
    pub(crate) fn new_unchecked(probs: Vec<Vec<f64>>) -> Self {
        Self { probs }
    }

    /// Uniform marginals on alphabets of the given sizes.
    pub fn uniform(sizes: &[usize]) -> Self {
        Self { probs: sizes.iter().map(|&m| vec![1.0 / m as f64; m]).collect() }
    }

    /// Number of positions with a marginal.
    pub fn depth(&self) -> usize {
        self.probs.len()
    }

    /// Marginal at position `k`.
    pub fn marginal(&self, k: usize) -> &[f64] {
        &self.probs[k]
    }

    /// `log μ([prefix])`; `-inf` when some symbol has probability zero.
    pub fn log_cylinder_mass(&self, prefix: &[u8]) -> Result<f64> {
        if prefix.len() > self.probs.len() {
            return Err(NdsError::InvalidSpec("cylinder deeper than the measure".into()));
        }
        let mut s = 0.0;
        for (k, &a) in prefix.iter().enumerate() {
            let p = *self.probs[k].get(a as usize).ok_or(NdsError::InvalidSpec("symbol outside the alphabet".into()))?;
            s += ln(p);
        }
        Ok(s)
    }

    /// `μ([prefix])` as a plain product.
    pub fn cylinder_mass(&self, prefix: &[u8]) -> Result<f64> {
        if prefix.len() > self.probs.len() {
            return Err(NdsError::InvalidSpec("cylinder deeper than the measure".into()));
        }
        prefix.iter().enumerate().try_fold(1.0, |m, (k, &a)| {
            self.probs[k].get(a as usize).map(|p| m * p).ok_or(NdsError::InvalidSpec("symbol outside the alphabet".into()))
        })
    }

    /// Shannon entropy of the marginal at position `k`.
    pub fn entropy(&self, k: usize) -> f64 {
        -self.probs[k].iter().filter(|&&p| p > 0.0).map(|&p| p * ln(p)).sum::<f64>()
    }

    /// Draw a word of length `len` (at most [`BernoulliSeq::depth`]).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, len: usize) -> Vec<u8> {
        (0..len.min(self.probs.len()))
            .map(|k| {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let row = &self.probs[k];
                for (a, &p) in row.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        return a as u8;
                    }
                }
                // Rounding left u above the cumulative sum; take the last positive symbol.
                row.iter().rposition(|&p| p > 0.0).unwrap_or(0) as u8
            })
            .collect()
    }

    /// Push-forward under a position-dependent relabelling `perm(k, a)`,
    /// which must be a bijection of each alphabet.
    pub fn permuted(&self, perm: &dyn Fn(usize, u8) -> u8) -> Result<Self> {
        let mut probs = Vec::with_capacity(self.probs.len());
        for (k, row) in self.probs.iter().enumerate() {
            let mut out = vec![f64::NAN; row.len()];
            for (a, &p) in row.iter().enumerate() {
                let b = perm(k, a as u8) as usize;
                if b >= row.len() || !out[b].is_nan() {
                    return Err(NdsError::InvalidSpec("relabelling is not a bijection".into()));
                }
                out[b] = p;
            }
            probs.push(out);
        }
        Ok(Self { probs })
    }
}

/// A Borel probability measure on `X_0`, in one of two finite representations.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureRep<P> {
    /// Finitely many atoms with weights summing to 1.
    Atomic(Vec<(P, f64)>),
    /// Product measure on a shift (points are words).
    Bernoulli(BernoulliSeq),
}

impl<P: Clone + PartialEq> MeasureRep<P> {
    /// Atomic measure, checking weights are nonnegative and sum to 1.
    pub fn atomic(atoms: Vec<(P, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(NdsError::Empty("atomic measure"));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if atoms.iter().any(|a| !(a.1 >= 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(NdsError::InvalidSpec("atom weights must be nonnegative and sum to 1".into()));
        }
        Ok(MeasureRep::Atomic(atoms))
    }

    /// Uniform measure on a finite set.
    pub fn uniform(points: Vec<P>) -> Result<Self> {
        let w = 1.0 / points.len() as f64;
        Self::atomic(points.into_iter().map(|p| (p, w)).collect())
    }

    /// Push-forward of an atomic measure; equal images merge.
    pub fn pushforward<Q: Clone + PartialEq>(&self, pi: impl Fn(&P) -> Q) -> Result<MeasureRep<Q>> {
        match self {
            MeasureRep::Atomic(atoms) => {
                let mut out: Vec<(Q, f64)> = Vec::new();
                for (p, w) in atoms {
                    let q = pi(p);
                    match out.iter_mut().find(|(r, _)| *r == q) {
                        Some(slot) => slot.1 += w,
                        None => out.push((q, *w)),
                    }
                }
                Ok(MeasureRep::Atomic(out))
            }
            MeasureRep::Bernoulli(_) => Err(NdsError::Unsupported("push-forward of a product measure by an arbitrary map")),
        }
    }
}

/// `μ(B)` for a Bowen ball at level 0.
pub fn ball_mass<S: NdSystem + ?Sized>(sys: &S, mu: &MeasureRep<S::Point>, spec: &BowenBallSpec<S::Point>) -> Result<f64> {
    if spec.k != 0 {
        return Err(NdsError::InvalidSpec("measures live on level 0".into()));
    }
    match mu {
        MeasureRep::Atomic(atoms) => {
            let pts: Vec<S::Point> = atoms.iter().map(|a| a.0.clone()).collect();
            Ok(sys.ball_members(spec, &pts)?.into_iter().map(|i| atoms[i].1).sum())
        }
        MeasureRep::Bernoulli(b) => {
            let (Some(depth), Some(sym)) = (sys.cylinder_depth(spec.n, spec.eps, spec.closed), sys.symbols(&spec.center)) else {
                return Err(NdsError::Unsupported("product measures need a symbolic backend"));
            };
            b.cylinder_mass(&sym[..depth.min(sym.len()).min(b.depth())])
        }
    }
}

/// Prefix sums `log μ([x_0..x_d])` and `S_n f(x)` for a product measure and
/// a potential of the first symbol, so every depth costs O(1).
fn symbolic_prefix_sums<S: NdSystem + ?Sized>(sys: &S, mu: &MeasureRep<S::Point>, f: &PotentialSeq<S::Point>, x: &S::Point) -> Option<(Vec<f64>, Vec<f64>)> {
    let MeasureRep::Bernoulli(b) = mu else { return None };
    let sym = sys.symbols(x)?;
    f.shape().symbol_value(0, 0)?;
    let len = sym.len().min(b.depth());
    let mut mass = vec![0.0; len + 1];
    let mut phi = vec![0.0; sym.len() + 1];
    for (k, &a) in sym.iter().enumerate() {
        if k < len {
            mass[k + 1] = mass[k] + ln(*b.probs[k].get(a as usize)?);
        }
        phi[k + 1] = phi[k] + f.shape().symbol_value(k, a)?;
    }
    Some((mass, phi))
}

/// Finite-depth lower and upper local exponents at one radius.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalAtRadius {
    /// Radius.
    pub eps: f64,
    /// Smallest ratio over the tail window (liminf proxy).
    pub lower: f64,
    /// Largest ratio over the tail window (limsup proxy).
    pub upper: f64,
}

/// Local measure-theoretic pressure estimates at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalExponentReport {
    /// Lower local pressure (at the smallest radius).
    pub lower: f64,
    /// Upper local pressure (at the smallest radius).
    pub upper: f64,
    /// Per-radius values.
    pub per_eps: Vec<LocalAtRadius>,
    /// `(n, ratio)` at the smallest radius over the tail window.
    pub ratios: Vec<(usize, f64)>,
}

/// Local pressures: the ratios `(-log μ(B_n(x, ε)) + S_n f(x)) / n` over
/// the tail window `n ∈ [n_max / 2, n_max]`, whose minimum and maximum
/// stand in for the liminf and limsup.
pub fn local_exponents<S: NdSystem + ?Sized>(
    sys: &S,
    mu: &MeasureRep<S::Point>,
    f: &PotentialSeq<S::Point>,
    x: &S::Point,
    eps_schedule: &[f64],
    n_max: usize,
) -> Result<LocalExponentReport> {
    if eps_schedule.is_empty() {
        return Err(NdsError::Empty("radius schedule"));
    }
    if n_max < 2 {
        return Err(NdsError::InvalidSpec("local exponents need n_max >= 2".into()));
    }
    let fast = symbolic_prefix_sums(sys, mu, f, x);
    let mut per_eps = Vec::new();
    let mut ratios = Vec::new();
    for &eps in eps_schedule {
        ratios.clear();
        for n in (n_max / 2).max(1)..=n_max {
            let (log_m, sum) = match (&fast, sys.cylinder_depth(n, eps, false)) {
                (Some((mass, phi)), Some(d)) if d < mass.len() && n < phi.len() => (mass[d], phi[n]),
                _ => (ln(ball_mass(sys, mu, &BowenBallSpec::open(x.clone(), n, eps)?)?), birkhoff_sum(sys, f, 0, n, x)?),
            };
            // log 0 = -inf makes the exponent +inf.
            ratios.push((n, (-log_m + sum) / n as f64));
        }
        let lower = ratios.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
        let upper = ratios.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
        per_eps.push(LocalAtRadius { eps, lower, upper });
    }
    let last = per_eps.last().unwrap();
    Ok(LocalExponentReport { lower: last.lower, upper: last.upper, per_eps, ratios })
}

/// `∫ P^∓_μ(x, f) dμ`, exact for atomic measures and by Monte Carlo for
/// product measures.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratedReport {
    /// Integral of the lower local pressure.
    pub lower: f64,
    /// Integral of the upper local pressure.
    pub upper: f64,
    /// Standard error of `lower` (0 for exact integration).
    pub lower_stderr: f64,
    /// Standard error of `upper`.
    pub upper_stderr: f64,
    /// Points evaluated.
    pub samples: usize,
    /// Mass of points with an infinite exponent (a null ball), left out
    /// of both averages.
    pub excluded_mass: f64,
}

fn mean_stderr(xs: &[(f64, f64)], weighted: bool) -> (f64, f64) {
    if weighted {
        let m = xs.iter().map(|(v, w)| v * w).sum::<f64>();
        return (m, 0.0);
    }
    let n = xs.len() as f64;
    let m = xs.iter().map(|p| p.0).sum::<f64>() / n;
    let var = xs.iter().map(|p| (p.0 - m) * (p.0 - m)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, sqrt(var / n))
}

/// Integrated local pressures. Product measures are sampled (`samples >=
/// 500` points of length `word_len`, built by `make_point`).
#[allow(clippy::too_many_arguments)]
pub fn integrated_exponents<S: NdSystem + ?Sized, R: Rng + ?Sized>(
    sys: &S,
    mu: &MeasureRep<S::Point>,
    f: &PotentialSeq<S::Point>,
    eps_schedule: &[f64],
    n_max: usize,
    samples: usize,
    rng: &mut R,
    make_point: &dyn Fn(Vec<u8>) -> S::Point,
) -> Result<IntegratedReport> {
    let mut lows = Vec::new();
    let mut ups = Vec::new();
    let mut excluded = 0.0;
    let weighted = match mu {
        MeasureRep::Atomic(atoms) => {
            for (x, w) in atoms.iter().filter(|a| a.1 > 0.0) {
                let r = local_exponents(sys, mu, f, x, eps_schedule, n_max)?;
                if r.upper.is_finite() {
                    lows.push((r.lower, *w));
                    ups.push((r.upper, *w));
                } else {
                    excluded += w;
                }
            }
            // Renormalize over the included mass.
            let kept = 1.0 - excluded;
            for v in lows.iter_mut().chain(ups.iter_mut()) {
                v.1 /= kept;
            }
            true
        }
        MeasureRep::Bernoulli(b) => {
            if samples < 500 {
                return Err(NdsError::InvalidSpec("Monte Carlo integration needs at least 500 samples".into()));
            }
            for _ in 0..samples {
                let x = make_point(b.sample(rng, b.depth()));
                let r = local_exponents(sys, mu, f, &x, eps_schedule, n_max)?;
                if r.upper.is_finite() {
                    lows.push((r.lower, 1.0));
                    ups.push((r.upper, 1.0));
                } else {
                    excluded += 1.0 / samples as f64;
                }
            }
            false
        }
    };
    if lows.is_empty() {
        return Err(NdsError::Degenerate);
    }
    let (lower, lower_stderr) = mean_stderr(&lows, weighted);
    let (upper, upper_stderr) = mean_stderr(&ups, weighted);
    Ok(IntegratedReport { lower, upper, lower_stderr, upper_stderr, samples: lows.len(), excluded_mass: excluded })
}

/// A probability measure on the target set certifying a lower bound on
/// the weighted cover value: `μ(B) <= w_B / C` for every ball `B` of the family.
#[derive(Debug, Clone, PartialEq)]
pub struct FrostmanCertificate<P> {
    /// The measure (atoms on target points).
    pub measure: MeasureRep<P>,
    /// `log C`, reduced if needed so every constraint holds in floating point.
    pub log_c: f64,
    /// Log of the weighted cover value over the same family.
    pub log_weighted_cover: f64,
    /// Balls of the family with their log weights.
    pub balls: Vec<(BowenBallSpec<P>, f64)>,
    /// Ball masses, aligned with `balls`.
    pub masses: Vec<f64>,
}

impl<P> FrostmanCertificate<P> {
    /// Largest `μ(B) - w_B / C` over the family (`<= 0` when certified).
    pub fn worst_violation(&self) -> f64 {
        self.balls
            .iter()
            .zip(&self.masses)
            .map(|((_, lw), &m)| m - exp(lw - self.log_c))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Solve the dual of the weighted cover linear program over the family of
/// an explicit problem (sup weights, depths in `[lo, hi]`), giving the
/// finite Frostman measure.
pub fn frostman_dual<S: NdSystem>(
    problem: &ExplicitProblem<'_, S>,
    s: f64,
    lo: usize,
    hi: usize,
    eps: f64,
) -> Result<FrostmanCertificate<S::Point>> {
    let z = problem.target();
    let all: Vec<usize> = (0..z.len()).collect();
    let fam = problem.family(&all, lo, hi, eps, false)?;
    let lw = fam.log_weights(s, CoverMode::Weighted);
    let top = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let rows: Vec<Vec<f64>> = fam
        .members
        .iter()
        .map(|m| {
            let mut r = vec![0.0; z.len()];
            for &p in m {
                r[p] = 1.0;
            }
            r
        })
        .collect();
    let b: Vec<f64> = lw.iter().map(|&l| exp(l - top)).collect();
    let sol = lp::maximize(&rows, &b, &vec![1.0; z.len()])?;
    if !(sol.objective > 0.0) {
        return Err(NdsError::Degenerate);
    }
    let total: f64 = sol.x.iter().sum();
    let weights: Vec<f64> = sol.x.iter().map(|&y| y / total).collect();
    let masses: Vec<f64> = fam.members.iter().map(|m| m.iter().map(|&p| weights[p]).sum()).collect();
    // log C from the dual objective, lowered until every constraint holds.
    let mut log_c = ln(sol.objective) + top;
    let worst = masses.iter().zip(&lw).map(|(&m, &l)| if m > 0.0 { ln(m) - (l - log_c) } else { f64::NEG_INFINITY }).fold(0.0f64, f64::max);
    log_c -= worst;
    while masses.iter().zip(&lw).any(|(&m, &l)| m > exp(l - log_c)) {
        log_c -= 1e-15 * log_c.abs().max(1.0);
    }
    let sf = fam.target_family(z.len(), s, CoverMode::Weighted);
    let (log_weighted_cover, _) = fractional_cover(&sf)?;
    let atoms = z.iter().cloned().zip(weights).filter(|a| a.1 > 0.0).collect();
    Ok(FrostmanCertificate {
        measure: MeasureRep::Atomic(atoms),
        log_c,
        log_weighted_cover,
        balls: fam.balls.into_iter().zip(lw).collect(),
        masses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{bernoulli_measure, NaShift, ShiftSpec, Word};
    use rand::SeedableRng;

    #[test]
    fn bernoulli_ball_mass_is_product() {
        let sh = NaShift::new("full2", ShiftSpec::full(2), 10).unwrap();
        let mu = bernoulli_measure(sh.spec(), &vec![vec![0.25, 0.75]; 10]).unwrap();
        let x = Word(vec![1, 0, 1, 1, 0, 0, 0, 0, 0, 0]);
        // eps = 0.9: depth-3 cylinder [1 0 1].
        let m = ball_mass(&sh, &mu, &BowenBallSpec::open(x, 3, 0.9).unwrap()).unwrap();
        assert!((m - 0.75 * 0.25 * 0.75).abs() < 1e-15);
    }

    #[test]
    fn uniform_local_exponent_is_log_two() {
        let sh = NaShift::new("full2", ShiftSpec::full(2), 24).unwrap();
        let mu = MeasureRep::Bernoulli(BernoulliSeq::uniform(&[2; 24]));
        let r = local_exponents(&sh, &mu, &PotentialSeq::zero(), &Word(vec![0; 24]), &[0.9], 20).unwrap();
        assert!((r.lower - ln(2.0)).abs() < 1e-12 && (r.upper - ln(2.0)).abs() < 1e-12);
    }

    #[test]
    fn integration_needs_enough_samples() {
        let sh = NaShift::new("full2", ShiftSpec::full(2), 12).unwrap();
        let mu = MeasureRep::Bernoulli(BernoulliSeq::uniform(&[2; 12]));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let r = integrated_exponents(&sh, &mu, &PotentialSeq::zero(), &[0.9], 10, 10, &mut rng, &|w| Word(w));
        assert!(r.is_err());
    }

    #[test]
    fn pushforward_merges_atoms() {
        let mu = MeasureRep::uniform(vec![0usize, 1, 2, 3]).unwrap();
        let MeasureRep::Atomic(atoms) = mu.pushforward(|&i| i / 2).unwrap() else { panic!() };
        assert_eq!(atoms, vec![(0, 0.5), (1, 0.5)]);
    }

    #[test]
    fn permuted_bernoulli_swaps_marginals() {
        let b = BernoulliSeq::new_unchecked(vec![vec![0.2, 0.8]]);
        let p = b.permuted(&|_, a| 1 - a).unwrap();
        assert_eq!(p.marginal(0), &[0.8, 0.2]);
        assert!(b.permuted(&|_, _| 0).is_err());
    }

    #[test]
    fn frostman_on_full_shift_matches_cover() {
        let sh = NaShift::new("full2", ShiftSpec::full(2), 5).unwrap();
        let f = PotentialSeq::zero();
        let p = crate::pressure::ExplicitProblem::whole(&sh, &f).unwrap().with_centers(crate::pressure::CenterSource::All);
        let cert = frostman_dual(&p, 0.5, 2, 3, 0.9).unwrap();
        assert!(cert.worst_violation() <= 0.0);
        assert!((cert.log_c - cert.log_weighted_cover).abs() < 1e-8);
    }
}
