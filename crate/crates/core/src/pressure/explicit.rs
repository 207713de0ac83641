use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{CoverMode, CoverValueReport, Decomposition, PackingValueReport, PressureProblem, Quantity};
use crate::covering::separated_set;
use crate::math::log_sum_exp;
use crate::nds::{birkhoff_sum, spread, BowenBallSpec, NdSystem, PotentialSeq, PotentialShape};
use crate::setcover::{cover_lower_bound, fractional_cover, max_packing, min_cover, Method, SetFamily};
use crate::{NdsError, Result};

/// Linear programs are attempted up to this many sets and points.
const LP_LIMIT: usize = 2000;

/// Where candidate ball centers come from.
#[derive(Debug, Clone, PartialEq)]
pub enum CenterSource<P> {
    /// A greedy separated subset of the target set at Bowen spacing
    /// `fraction · eps`, recomputed per depth. With `fraction < 1` the
    /// radius-`eps` balls around it still cover the target set.
    Net {
        /// Spacing as a fraction of the ball radius.
        fraction: f64,
    },
    /// Every point of the target set.
    All,
    /// A fixed list (covers may use centers outside the target set;
    /// packings keep only those inside the part being packed).
    Given(Vec<P>),
}

/// Balls of one cover or packing family with their members and sums.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverFamily<P> {
    /// The balls.
    pub balls: Vec<BowenBallSpec<P>>,
    /// Members as positions into the target set.
    pub members: Vec<Vec<usize>>,
    /// Members as indices into the ambient carrier.
    pub ambient_members: Vec<Vec<usize>>,
    /// `S_n f(center)` per ball.
    pub center_sum: Vec<f64>,
    /// `max S_n f` over the ambient points of each ball.
    pub sup_sum: Vec<f64>,
}

impl<P> CoverFamily<P> {
    /// Log weights `-n s + S` for the given mode (center sums for
    /// [`CoverMode::Center`], sup sums otherwise).
    pub fn log_weights(&self, s: f64, mode: CoverMode) -> Vec<f64> {
        let sums = if mode == CoverMode::Center { &self.center_sum } else { &self.sup_sum };
        self.balls.iter().zip(sums).map(|(b, &v)| -(b.n as f64) * s + v).collect()
    }

    /// The cover family over the target set.
    pub fn target_family(&self, universe: usize, s: f64, mode: CoverMode) -> SetFamily {
        SetFamily { universe, sets: self.members.clone(), log_weights: self.log_weights(s, mode) }
    }

    /// The packing family over the ambient carrier, with center weights.
    pub fn ambient_family(&self, universe: usize, s: f64) -> SetFamily {
        SetFamily { universe, sets: self.ambient_members.clone(), log_weights: self.log_weights(s, CoverMode::Center) }
    }
}

/// A finite target set `Z` inside a finite level-0 carrier.
pub struct ExplicitProblem<'a, S: NdSystem> {
    sys: &'a S,
    f: &'a PotentialSeq<S::Point>,
    ambient: Vec<S::Point>,
    z: Vec<usize>,
    z_pts: Vec<S::Point>,
    z_pos: Vec<Option<usize>>,
    centers: CenterSource<S::Point>,
    label: String,
}

impl<'a, S: NdSystem> ExplicitProblem<'a, S> {
    /// `z` lists indices into `ambient`; they are sorted and deduplicated.
    pub fn new(sys: &'a S, f: &'a PotentialSeq<S::Point>, ambient: Vec<S::Point>, mut z: Vec<usize>) -> Result<Self> {
        z.sort_unstable();
        z.dedup();
        if z.is_empty() {
            return Err(NdsError::Empty("target set"));
        }
        if let Some(&bad) = z.iter().find(|&&i| i >= ambient.len()) {
            return Err(NdsError::PointOutOfRange { level: 0, index: bad, len: ambient.len() });
        }
        let mut z_pos = vec![None; ambient.len()];
        for (p, &i) in z.iter().enumerate() {
            z_pos[i] = Some(p);
        }
        let z_pts = z.iter().map(|&i| ambient[i].clone()).collect();
        Ok(Self {
            sys,
            f,
            ambient,
            z,
            z_pts,
            z_pos,
            centers: CenterSource::Net { fraction: 0.25 },
            label: String::from(sys.label()),
        })
    }

    /// The whole level-0 carrier as target set.
    pub fn whole(sys: &'a S, f: &'a PotentialSeq<S::Point>) -> Result<Self> {
        let ambient = sys.carrier(0)?;
        let z = (0..ambient.len()).collect();
        Self::new(sys, f, ambient, z)
    }

    /// Replace the center source.
    pub fn with_centers(mut self, centers: CenterSource<S::Point>) -> Self {
        self.centers = centers;
        self
    }

    /// Replace the label.
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Target set points.
    pub fn target(&self) -> &[S::Point] {
        &self.z_pts
    }

    /// Ambient carrier.
    pub fn ambient(&self) -> &[S::Point] {
        &self.ambient
    }

    /// The system.
    pub fn system(&self) -> &S {
        self.sys
    }

    /// The potential.
    pub fn potential(&self) -> &PotentialSeq<S::Point> {
        self.f
    }

    fn sums_over_ambient(&self, n: usize) -> Result<Vec<f64>> {
        match self.f.shape() {
            PotentialShape::Zero => Ok(vec![0.0; self.ambient.len()]),
            PotentialShape::Constant(a) => Ok(vec![a * n as f64; self.ambient.len()]),
            _ => self.ambient.iter().map(|x| birkhoff_sum(self.sys, self.f, 0, n, x)).collect(),
        }
    }

    /// Candidate centers at depth `n` for the given part of the target set.
    fn centers_for(&self, part: &[usize], n: usize, eps: f64, packing: bool) -> Result<Vec<S::Point>> {
        let pts: Vec<S::Point> = part.iter().map(|&p| self.z_pts[p].clone()).collect();
        Ok(match &self.centers {
            CenterSource::Net { fraction } => {
                if !(*fraction > 0.0 && *fraction < 1.0) {
                    return Err(NdsError::InvalidSpec("net spacing fraction must lie in (0, 1)".into()));
                }
                separated_set(self.sys, &pts, n, fraction * eps)?.into_iter().map(|i| pts[i].clone()).collect()
            }
            CenterSource::All => pts,
            CenterSource::Given(v) if packing => v.iter().filter(|c| pts.contains(c)).cloned().collect(),
            CenterSource::Given(v) => v.clone(),
        })
    }

    /// Enumerate the balls with depths in `[lo, hi]` centered at the
    /// candidate centers of `part` (positions into the target set).
    pub fn family(&self, part: &[usize], lo: usize, hi: usize, eps: f64, closed: bool) -> Result<CoverFamily<S::Point>> {
        if lo == 0 || lo > hi {
            return Err(NdsError::InvalidSpec("depth window must satisfy 1 <= lo <= hi".into()));
        }
        let mut fam = CoverFamily { balls: Vec::new(), members: Vec::new(), ambient_members: Vec::new(), center_sum: Vec::new(), sup_sum: Vec::new() };
        for n in lo..=hi {
            let sums = self.sums_over_ambient(n)?;
            for c in self.centers_for(part, n, eps, closed)? {
                let spec = BowenBallSpec::new(0, c, n, eps, closed)?;
                let amb = self.sys.ball_members(&spec, &self.ambient)?;
                let members: Vec<usize> = amb.iter().filter_map(|&i| self.z_pos[i]).collect();
                let sup = amb.iter().map(|&i| sums[i]).fold(f64::NEG_INFINITY, f64::max);
                let center = birkhoff_sum(self.sys, self.f, 0, n, &spec.center)?;
                fam.balls.push(spec);
                fam.members.push(members);
                fam.ambient_members.push(amb);
                fam.center_sum.push(center);
                fam.sup_sum.push(if sup.is_finite() { sup } else { center });
            }
        }
        Ok(fam)
    }

    fn all_positions(&self) -> Vec<usize> {
        (0..self.z.len()).collect()
    }

    fn parts(&self, d: &Decomposition) -> Result<Vec<Vec<usize>>> {
        let all = self.all_positions();
        Ok(match d {
            Decomposition::Trivial | Decomposition::Best => vec![all],
            Decomposition::Dyadic if all.len() < 2 => vec![all],
            Decomposition::Dyadic => {
                let mid = all.len() / 2;
                vec![all[..mid].to_vec(), all[mid..].to_vec()]
            }
            Decomposition::Parts(p) => {
                if p.iter().flatten().any(|&i| i >= all.len()) {
                    return Err(NdsError::InvalidSpec("decomposition part outside the target set".into()));
                }
                let mut seen = vec![false; all.len()];
                for &i in p.iter().flatten() {
                    seen[i] = true;
                }
                if seen.iter().any(|s| !s) {
                    return Err(NdsError::InvalidSpec("decomposition parts must cover the target set".into()));
                }
                p.clone()
            }
        })
    }

    fn solve_cover(&self, fam: &CoverFamily<S::Point>, s: f64, mode: CoverMode, eps: f64, lo: usize, hi: usize) -> Result<(f64, f64, Method, Vec<usize>, Option<Vec<f64>>)> {
        let sf = fam.target_family(self.z.len(), s, mode);
        let small = sf.sets.len() <= LP_LIMIT && sf.universe <= LP_LIMIT;
        match mode {
            CoverMode::Center | CoverMode::Sup => {
                let sol = min_cover(&sf).ok_or(NdsError::Infeasible { eps, n_lo: lo, n_hi: hi })?;
                let lower = match sol.method {
                    Method::Laminar | Method::Interval => sol.log_value,
                    _ if small => fractional_cover(&sf)?.0,
                    _ => cover_lower_bound(&sf),
                };
                Ok((lower, sol.log_value, sol.method, sol.chosen, None))
            }
            CoverMode::Weighted => {
                if small {
                    let (v, coeffs) = fractional_cover(&sf).map_err(|e| match e {
                        NdsError::LpInfeasible => NdsError::Infeasible { eps, n_lo: lo, n_hi: hi },
                        e => e,
                    })?;
                    let chosen: Vec<usize> = (0..coeffs.len()).filter(|&i| coeffs[i] > 1e-12).collect();
                    let c = chosen.iter().map(|&i| coeffs[i]).collect();
                    return Ok((v, v, Method::BranchAndBound, chosen, Some(c)));
                }
                // Totally unimodular families have integral fractional optima.
                let sol = min_cover(&sf).ok_or(NdsError::Infeasible { eps, n_lo: lo, n_hi: hi })?;
                if matches!(sol.method, Method::Laminar | Method::Interval) {
                    let c = vec![1.0; sol.chosen.len()];
                    Ok((sol.log_value, sol.log_value, sol.method, sol.chosen, Some(c)))
                } else {
                    Err(NdsError::Unsupported("weighted cover of a large unstructured family"))
                }
            }
        }
    }

    /// Cover value with depths in `[lo, hi]` (open balls).
    pub fn cover_value(&self, s: f64, lo: usize, hi: usize, eps: f64, mode: CoverMode) -> Result<CoverValueReport<S::Point>> {
        let fam = self.family(&self.all_positions(), lo, hi, eps, false)?;
        let (log_lower, log_upper, method, chosen, coefficients) = self.solve_cover(&fam, s, mode, eps, lo, hi)?;
        Ok(CoverValueReport {
            s,
            n_lo: lo,
            n_hi: hi,
            eps,
            mode,
            log_lower,
            log_upper,
            method,
            witness: Some(chosen.iter().map(|&i| fam.balls[i].clone()).collect()),
            coefficients,
        })
    }

    /// Packing value with centers in the target set and depths in
    /// `[lo, hi]` (closed balls, disjoint on the ambient carrier), summed
    /// over the parts of a decomposition.
    pub fn packing_value(&self, s: f64, lo: usize, hi: usize, eps: f64, decomposition: &Decomposition) -> Result<PackingValueReport<S::Point>> {
        if *decomposition == Decomposition::Best {
            let a = self.packing_value(s, lo, hi, eps, &Decomposition::Trivial)?;
            let b = self.packing_value(s, lo, hi, eps, &Decomposition::Dyadic)?;
            return Ok(if b.log_value < a.log_value { b } else { a });
        }
        let mut logs = Vec::new();
        let mut exact = true;
        let mut witness = Vec::new();
        for part in self.parts(decomposition)? {
            let fam = self.family(&part, lo, hi, eps, true)?;
            let sol = max_packing(&fam.ambient_family(self.ambient.len(), s));
            exact &= sol.exact();
            logs.push(sol.log_value);
            witness.extend(sol.chosen.iter().map(|&i| fam.balls[i].clone()));
        }
        Ok(PackingValueReport {
            s,
            n_lo: lo,
            n_hi: hi,
            eps,
            log_value: log_sum_exp(&logs),
            exact,
            witness: Some(witness),
            decomposition: decomposition.clone(),
        })
    }

    fn packing_fn<'s>(&'s self, d: &Decomposition, lo: usize, hi: usize, eps: f64) -> Result<Box<dyn Fn(f64) -> Result<f64> + 's>> {
        if *d == Decomposition::Best {
            let a = self.packing_fn(&Decomposition::Trivial, lo, hi, eps)?;
            let b = self.packing_fn(&Decomposition::Dyadic, lo, hi, eps)?;
            return Ok(Box::new(move |s| Ok(a(s)?.min(b(s)?))));
        }
        let fams: Vec<CoverFamily<S::Point>> = self.parts(d)?.iter().map(|p| self.family(p, lo, hi, eps, true)).collect::<Result<_>>()?;
        let universe = self.ambient.len();
        let eval = move |s: f64| -> f64 {
            let logs: Vec<f64> = fams.iter().map(|f| max_packing(&f.ambient_family(universe, s)).log_value).collect();
            log_sum_exp(&logs)
        };
        if lo == hi {
            let base = eval(0.0);
            Ok(Box::new(move |s| Ok(base - lo as f64 * s)))
        } else {
            Ok(Box::new(move |s| Ok(eval(s))))
        }
    }
}

impl<S: NdSystem> PressureProblem for ExplicitProblem<'_, S> {
    fn label(&self) -> &str {
        &self.label
    }

    fn log_value_fn<'s>(&'s self, q: &Quantity, lo: usize, hi: usize, eps: f64) -> Result<Box<dyn Fn(f64) -> Result<f64> + 's>> {
        match q {
            Quantity::Bowen(mode) => {
                let mode = *mode;
                let fam = self.family(&self.all_positions(), lo, hi, eps, false)?;
                if lo == hi {
                    // Every weight carries the same factor exp(-lo s), so the
                    // optimal family does not depend on s.
                    let base = self.solve_cover(&fam, 0.0, mode, eps, lo, hi)?.1;
                    Ok(Box::new(move |s| Ok(base - lo as f64 * s)))
                } else {
                    Ok(Box::new(move |s| Ok(self.solve_cover(&fam, s, mode, eps, lo, hi)?.1)))
                }
            }
            Quantity::Packing(d) => self.packing_fn(d, lo, hi, eps),
        }
    }

    fn resolved_depth(&self, eps: f64, min_points: f64, n_max: usize) -> Result<usize> {
        if min_points <= 1.0 {
            return Ok(n_max);
        }
        let probes = spread(self.z_pts.clone(), 64);
        for n in 1..=n_max {
            let mut total = 0usize;
            for c in &probes {
                total += self.sys.ball_members(&BowenBallSpec::open(c.clone(), n, eps)?, &self.z_pts)?.len();
            }
            if (total as f64) < min_points * probes.len() as f64 {
                return Ok(n - 1);
            }
        }
        Ok(n_max)
    }

    fn slack(&self, depth: usize) -> f64 {
        (0..depth).map(|j| self.sys.step_slack(j)).sum()
    }
}
