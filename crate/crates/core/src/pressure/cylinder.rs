use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use super::{CoverMode, Decomposition, PressureProblem, Quantity};
use crate::math::log_sum_exp;
use crate::nds::{PotentialSeq, PotentialShape};
use crate::systems::{NaShift, Word};
use crate::{NdsError, Result};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sense {
    Min,
    Max,
}

/// The cylinder `[prefix]` of a nonautonomous shift as target set, with a
/// potential depending on at most the first symbol.
///
/// A Bowen ball of depth `n` is a cylinder of depth `n + e`, where the
/// offset `e` depends only on the radius. Optimal covers and packings are
/// therefore unions of cylinders, and their values satisfy a recursion over
/// depth: a cylinder is either used as a ball or split into its children.
/// When `e > 0` the ball weight depends on the last `e` symbols, so
/// symbol-dependent potentials are only accepted for `e = 0`
/// (radius in `(1/2, 1]`); level-constant potentials work for every radius.
pub struct CylinderProblem<'a> {
    shift: &'a NaShift,
    prefix: Vec<u8>,
    shape: PotentialShape,
    label: String,
}

impl<'a> CylinderProblem<'a> {
    /// Target set `[prefix]` at level 0.
    pub fn new(shift: &'a NaShift, f: &PotentialSeq<Word>, prefix: Vec<u8>) -> Result<Self> {
        if prefix.len() > shift.depth() {
            return Err(NdsError::InvalidSpec("prefix longer than the truncation depth".into()));
        }
        for (j, &a) in prefix.iter().enumerate() {
            if a as usize >= shift.alphabet(j) {
                return Err(NdsError::InvalidSpec("prefix symbol outside the alphabet".into()));
            }
        }
        if matches!(f.shape(), PotentialShape::General) {
            return Err(NdsError::Unsupported("cylinder recursion needs a potential of the first symbol"));
        }
        Ok(Self { shift, prefix, shape: f.shape().clone(), label: String::from(crate::nds::NdSystem::label(shift)) })
    }

    /// The whole level-0 space.
    pub fn whole(shift: &'a NaShift, f: &PotentialSeq<Word>) -> Result<Self> {
        Self::new(shift, f, Vec::new())
    }

    fn phi(&self, j: usize, a: u8) -> f64 {
        self.shape.symbol_value(j, a).unwrap_or(0.0)
    }

    fn symbol_blind(&self) -> bool {
        !matches!(self.shape, PotentialShape::Symbolwise(_))
    }

    fn extreme(&self, j: usize, sense: Sense) -> f64 {
        let vals = (0..self.shift.alphabet(j)).map(|a| self.phi(j, a as u8));
        match sense {
            Sense::Min => vals.fold(f64::INFINITY, f64::min),
            Sense::Max => vals.fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// `log Σ_a e^{φ_d(a)}` over the children of a depth-`d` node meeting the target.
    fn log_children(&self, prefix: &[u8], d: usize) -> f64 {
        if d < prefix.len() {
            self.phi(d, prefix[d])
        } else {
            let v: Vec<f64> = (0..self.shift.alphabet(d)).map(|a| self.phi(d, a as u8)).collect();
            log_sum_exp(&v)
        }
    }

    fn log_value(&self, prefix: &[u8], s: f64, lo: usize, hi: usize, eps: f64, closed: bool, sense: Sense, sup: bool) -> Result<f64> {
        if lo == 0 || lo > hi {
            return Err(NdsError::InvalidSpec("depth window must satisfy 1 <= lo <= hi".into()));
        }
        let depth1 = NaShift::ball_cylinder_depth(1, eps, closed);
        if depth1 == 0 {
            // Every ball is the whole space: a cover or packing uses one ball.
            let best = (lo..=hi).map(|n| {
                let sum: f64 = (0..n)
                    .map(|j| match sense {
                        Sense::Max if j < prefix.len() => self.phi(j, prefix[j]),
                        Sense::Max => self.extreme(j, Sense::Max),
                        Sense::Min if sup => self.extreme(j, Sense::Max),
                        Sense::Min => self.extreme(j, Sense::Min),
                    })
                    .sum();
                -(n as f64) * s + sum
            });
            return Ok(match sense {
                Sense::Min => best.fold(f64::INFINITY, f64::min),
                Sense::Max => best.fold(f64::NEG_INFINITY, f64::max),
            });
        }
        let e = depth1 - 1;
        if e > 0 && !self.symbol_blind() {
            return Err(NdsError::Unsupported("symbol-dependent potential with radius at most 1/2"));
        }
        let top = hi + e;
        if top > self.shift.depth() {
            return Err(NdsError::Infeasible { eps, n_lo: lo, n_hi: hi });
        }
        // Ball weight relative to e^{S_d}: -(d-e) s - Σ_{d-e <= j < d} φ_j.
        let ball = |d: usize| -> f64 { -((d - e) as f64) * s - (d - e..d).map(|j| self.phi(j, 0)).sum::<f64>() };
        let mut r = ball(top);
        for d in (0..top).rev() {
            let split = self.log_children(prefix, d) + r;
            r = if d >= lo + e {
                match sense {
                    Sense::Min => split.min(ball(d)),
                    Sense::Max => split.max(ball(d)),
                }
            } else {
                split
            };
        }
        Ok(r)
    }

    /// Log cover value with depths in `[lo, hi]`. On cylinders the center
    /// and sup weights agree except when balls are the whole space, and the
    /// fractional optimum equals the integral one (the family is laminar).
    pub fn log_cover(&self, s: f64, lo: usize, hi: usize, eps: f64, mode: CoverMode) -> Result<f64> {
        self.log_value(&self.prefix, s, lo, hi, eps, false, Sense::Min, mode != CoverMode::Center)
    }

    /// Log packing value with depths in `[lo, hi]`, summed over a decomposition.
    pub fn log_packing(&self, s: f64, lo: usize, hi: usize, eps: f64, d: &Decomposition) -> Result<f64> {
        let l = self.prefix.len();
        match d {
            Decomposition::Trivial => self.log_value(&self.prefix, s, lo, hi, eps, true, Sense::Max, false),
            Decomposition::Dyadic if l >= self.shift.depth() => self.log_packing(s, lo, hi, eps, &Decomposition::Trivial),
            Decomposition::Dyadic => {
                let mut logs = Vec::new();
                for a in 0..self.shift.alphabet(l) {
                    let mut child = self.prefix.clone();
                    child.push(a as u8);
                    logs.push(self.log_value(&child, s, lo, hi, eps, true, Sense::Max, false)?);
                }
                Ok(log_sum_exp(&logs))
            }
            Decomposition::Best => {
                let a = self.log_packing(s, lo, hi, eps, &Decomposition::Trivial)?;
                let b = self.log_packing(s, lo, hi, eps, &Decomposition::Dyadic)?;
                Ok(a.min(b))
            }
            Decomposition::Parts(_) => Err(NdsError::Unsupported("explicit parts on a cylinder target")),
        }
    }
}

impl PressureProblem for CylinderProblem<'_> {
    fn label(&self) -> &str {
        &self.label
    }

    fn log_value_fn<'s>(&'s self, q: &Quantity, lo: usize, hi: usize, eps: f64) -> Result<Box<dyn Fn(f64) -> Result<f64> + 's>> {
        // Validate once so configuration errors surface before bisection.
        match q {
            Quantity::Bowen(mode) => {
                let mode = *mode;
                self.log_cover(0.0, lo, hi, eps, mode)?;
                Ok(Box::new(move |s| self.log_cover(s, lo, hi, eps, mode)))
            }
            Quantity::Packing(d) => {
                let d = d.clone();
                self.log_packing(0.0, lo, hi, eps, &d)?;
                Ok(Box::new(move |s| self.log_packing(s, lo, hi, eps, &d)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::ln;
    use crate::pressure::ExplicitProblem;
    use crate::systems::{symbol_potential, ShiftSpec};

    #[test]
    fn matches_explicit_enumeration() {
        let sh = NaShift::new("p23", ShiftSpec::periodic(&[2, 3]), 6).unwrap();
        let f = symbol_potential(|k, a| 0.3 * a as f64 - 0.1 * (k % 2) as f64);
        let cyl = CylinderProblem::new(&sh, &f, alloc::vec![1]).unwrap();
        let amb = crate::nds::NdSystem::carrier(&sh, 0).unwrap();
        let z: Vec<usize> = (0..amb.len()).filter(|&i| amb[i].0[0] == 1).collect();
        let ex = ExplicitProblem::new(&sh, &f, amb, z).unwrap().with_centers(crate::pressure::CenterSource::All);
        for &(s, lo, hi) in &[(0.2, 1, 3), (0.9, 2, 4), (-0.5, 1, 5)] {
            let a = cyl.log_cover(s, lo, hi, 0.9, CoverMode::Sup).unwrap();
            let b = ex.cover_value(s, lo, hi, 0.9, CoverMode::Sup).unwrap().log_upper;
            assert!((a - b).abs() < 1e-9, "cover {s} {lo} {hi}: {a} vs {b}");
            let a = cyl.log_packing(s, lo, hi, 0.9, &Decomposition::Trivial).unwrap();
            let b = ex.packing_value(s, lo, hi, 0.9, &Decomposition::Trivial).unwrap().log_value;
            assert!((a - b).abs() < 1e-9, "packing {s} {lo} {hi}: {a} vs {b}");
        }
    }

    #[test]
    fn level_constant_potential_with_small_radius() {
        let sh = NaShift::new("full2", ShiftSpec::full(2), 12).unwrap();
        let f = PotentialSeq::constant(0.5);
        let cyl = CylinderProblem::whole(&sh, &f).unwrap();
        // eps = 0.2: depth-n balls are depth-(n+2) cylinders; fixed depth n gives 2^{n+2} e^{n(0.5 - s)}.
        let v = cyl.log_cover(0.1, 5, 5, 0.2, CoverMode::Center).unwrap();
        assert!((v - (7.0 * ln(2.0) + 5.0 * 0.4)).abs() < 1e-9);
    }

    #[test]
    fn symbolwise_small_radius_is_unsupported() {
        let sh = NaShift::new("full2", ShiftSpec::full(2), 12).unwrap();
        let f = symbol_potential(|_, a| a as f64);
        let cyl = CylinderProblem::whole(&sh, &f).unwrap();
        assert!(matches!(cyl.log_cover(0.0, 2, 2, 0.2, CoverMode::Center), Err(NdsError::Unsupported(_))));
    }
}
