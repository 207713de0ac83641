//! Separated and spanning sets, and the 5r / 3ε disjoint-subfamily selections.
//!
//! Point sets are slices; results are index lists into them. Greedy passes
//! run in slice order with ties broken by the smaller index, so every
//! result is deterministic.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::bits::BitSet;
use crate::nds::{BowenBallSpec, NdSystem};
use crate::{NdsError, Result};

fn open_ball<S: NdSystem + ?Sized>(sys: &S, center: &S::Point, n: usize, eps: f64, domain: &[S::Point]) -> Result<Vec<usize>> {
    sys.ball_members(&BowenBallSpec::open(center.clone(), n, eps)?, domain)
}

/// Greedy maximal `(n, eps)`-separated subset of `z`: chosen points are
/// pairwise at Bowen distance `>= eps`, and every point of `z` is within
/// `< eps` of a chosen one.
pub fn separated_set<S: NdSystem + ?Sized>(sys: &S, z: &[S::Point], n: usize, eps: f64) -> Result<Vec<usize>> {
    if z.is_empty() {
        return Err(NdsError::Empty("separated set of an empty set"));
    }
    let mut marked = BitSet::new(z.len());
    let mut chosen = Vec::new();
    for i in 0..z.len() {
        if marked.contains(i) {
            continue;
        }
        chosen.push(i);
        for j in open_ball(sys, &z[i], n, eps, z)? {
            marked.insert(j);
        }
    }
    Ok(chosen)
}

/// Whether the chosen points are pairwise `(n, eps)`-separated.
pub fn is_separated<S: NdSystem + ?Sized>(sys: &S, z: &[S::Point], chosen: &[usize], n: usize, eps: f64) -> Result<bool> {
    for (a, &i) in chosen.iter().enumerate() {
        for &j in &chosen[a + 1..] {
            if sys.bowen_distance(0, n, &z[i], &z[j])? < eps {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether open Bowen balls of depth `n` and radius `eps` at `centers`
/// cover every point of `z`.
pub fn spans<S: NdSystem + ?Sized>(sys: &S, z: &[S::Point], centers: &[S::Point], n: usize, eps: f64) -> Result<bool> {
    let mut hit = BitSet::new(z.len());
    for c in centers {
        for j in open_ball(sys, c, n, eps, z)? {
            hit.insert(j);
        }
    }
    Ok(hit.count() == z.len())
}

/// Greedy max-coverage set cover of `z` by open Bowen balls centered in `z`.
fn greedy_cover<S: NdSystem + ?Sized>(sys: &S, z: &[S::Point], n: usize, eps: f64) -> Result<Vec<usize>> {
    let balls: Vec<Vec<usize>> = z.iter().map(|c| open_ball(sys, c, n, eps, z)).collect::<Result<_>>()?;
    let mut covered = BitSet::new(z.len());
    let mut left = z.len();
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> = balls.iter().enumerate().map(|(i, b)| (b.len(), Reverse(i))).collect();
    let mut chosen = Vec::new();
    while left > 0 {
        let Some((gain, Reverse(i))) = heap.pop() else {
            return Err(NdsError::Infeasible { eps, n_lo: n, n_hi: n });
        };
        let fresh = balls[i].iter().filter(|&&j| !covered.contains(j)).count();
        if fresh != gain {
            if fresh > 0 {
                heap.push((fresh, Reverse(i)));
            }
            continue;
        }
        chosen.push(i);
        for &j in &balls[i] {
            if !covered.contains(j) {
                covered.insert(j);
                left -= 1;
            }
        }
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// An `(n, eps)`-spanning subset of `z`: the smaller of a greedy set cover
/// at `eps` and a maximal separated set at `eps / 2` (which spans at
/// `eps / 2`, hence at `eps`).
pub fn spanning_set<S: NdSystem + ?Sized>(sys: &S, z: &[S::Point], n: usize, eps: f64) -> Result<Vec<usize>> {
    if z.is_empty() {
        return Err(NdsError::Empty("spanning set of an empty set"));
    }
    let cover = greedy_cover(sys, z, n, eps)?;
    let sep = separated_set(sys, z, n, eps / 2.0)?;
    Ok(if sep.len() < cover.len() { sep } else { cover })
}

/// A family of Bowen balls at level 0.
#[derive(Debug, Clone, PartialEq)]
pub struct BallFamily<P> {
    /// Member balls.
    pub balls: Vec<BowenBallSpec<P>>,
}

impl<P: Clone> BallFamily<P> {
    /// Wrap a list of balls, checking they all sit at level 0.
    pub fn new(balls: Vec<BowenBallSpec<P>>) -> Result<Self> {
        if balls.iter().any(|b| b.k != 0) {
            return Err(NdsError::InvalidSpec("ball families live at level 0".into()));
        }
        Ok(Self { balls })
    }

    /// Member sets over `domain`, as bit sets.
    fn member_sets<S: NdSystem<Point = P> + ?Sized>(&self, sys: &S, domain: &[P], scale: f64) -> Result<Vec<BitSet>> {
        self.balls
            .iter()
            .map(|b| {
                let spec = BowenBallSpec { eps: b.eps * scale, ..b.clone() };
                Ok(BitSet::from_indices(domain.len(), &sys.ball_members(&spec, domain)?))
            })
            .collect()
    }
}

fn greedy_disjoint(order: &[usize], sets: &[BitSet]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for &i in order {
        if chosen.iter().all(|&j| !sets[i].intersects(&sets[j])) {
            chosen.push(i);
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Pairwise disjoint subfamily of balls sharing `(k, n)`, chosen greedily
/// by decreasing radius, whose 5× enlargements cover the union of the
/// family. Disjointness is decided on `domain`, which should be the whole
/// level carrier.
pub fn disjoint_subfamily_5r<S: NdSystem + ?Sized>(sys: &S, family: &BallFamily<S::Point>, domain: &[S::Point]) -> Result<Vec<usize>> {
    let Some(first) = family.balls.first() else {
        return Ok(Vec::new());
    };
    if family.balls.iter().any(|b| b.n != first.n || b.k != first.k) {
        return Err(NdsError::InvalidSpec("5r selection needs a common level and depth".into()));
    }
    let sets = family.member_sets(sys, domain, 1.0)?;
    let mut order: Vec<usize> = (0..family.balls.len()).collect();
    order.sort_by(|&a, &b| family.balls[b].eps.total_cmp(&family.balls[a].eps).then(a.cmp(&b)));
    Ok(greedy_disjoint(&order, &sets))
}

/// Pairwise disjoint subfamily of Bowen balls sharing `eps` (depths may
/// differ), chosen greedily by increasing depth, whose radius-`3 eps`
/// versions (same depths) cover the union of the family.
pub fn disjoint_subfamily_bowen_3eps<S: NdSystem + ?Sized>(
    sys: &S,
    family: &BallFamily<S::Point>,
    domain: &[S::Point],
) -> Result<Vec<usize>> {
    let Some(first) = family.balls.first() else {
        return Ok(Vec::new());
    };
    if family.balls.iter().any(|b| b.eps != first.eps || b.k != first.k) {
        return Err(NdsError::InvalidSpec("3eps selection needs a common level and radius".into()));
    }
    let sets = family.member_sets(sys, domain, 1.0)?;
    let mut order: Vec<usize> = (0..family.balls.len()).collect();
    order.sort_by_key(|&i| (family.balls[i].n, i));
    Ok(greedy_disjoint(&order, &sets))
}

/// Exhaustive verification of a disjoint-subfamily selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubfamilyCheck {
    /// Selected balls are pairwise disjoint on the domain.
    pub disjoint: bool,
    /// Enlarged selected balls contain every point of every input ball.
    pub covers: bool,
}

impl SubfamilyCheck {
    /// Both properties hold.
    pub fn ok(self) -> bool {
        self.disjoint && self.covers
    }
}

/// Check disjointness of `chosen` and that enlarging their radii by
/// `factor` covers the union of the whole family, point by point on `domain`.
pub fn check_subfamily<S: NdSystem + ?Sized>(
    sys: &S,
    family: &BallFamily<S::Point>,
    chosen: &[usize],
    factor: f64,
    domain: &[S::Point],
) -> Result<SubfamilyCheck> {
    let sets = family.member_sets(sys, domain, 1.0)?;
    let mut disjoint = true;
    for (a, &i) in chosen.iter().enumerate() {
        for &j in &chosen[a + 1..] {
            if sets[i].intersects(&sets[j]) {
                disjoint = false;
            }
        }
    }
    let mut union = BitSet::new(domain.len());
    for s in &sets {
        union.union_with(s);
    }
    let mut grown = BitSet::new(domain.len());
    for &i in chosen {
        let b = &family.balls[i];
        let spec = BowenBallSpec { eps: b.eps * factor, ..b.clone() };
        for j in sys.ball_members(&spec, domain)? {
            grown.insert(j);
        }
    }
    Ok(SubfamilyCheck { disjoint, covers: union.is_subset(&grown) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{NaShift, ShiftSpec, Word};
    use alloc::vec;

    fn shift(depth: usize) -> NaShift {
        NaShift::new("full2", ShiftSpec::full(2), depth).unwrap()
    }

    #[test]
    fn separated_on_cylinders() {
        let s = shift(6);
        let z = s.carrier(0).unwrap();
        let sep = separated_set(&s, &z, 3, 0.99).unwrap();
        assert_eq!(sep.len(), 8);
        assert!(is_separated(&s, &z, &sep, 3, 0.99).unwrap());
        assert_eq!(spanning_set(&s, &z, 3, 0.99).unwrap().len(), 8);
    }

    #[test]
    fn large_radius_gives_one_point() {
        let s = shift(5);
        let z = s.carrier(0).unwrap();
        assert_eq!(separated_set(&s, &z, 1, 1.5).unwrap().len(), 1);
        assert_eq!(spanning_set(&s, &z[..1], 3, 0.4).unwrap(), vec![0]);
    }

    #[test]
    fn nested_balls_keep_the_big_one() {
        let s = shift(6);
        let dom = s.carrier(0).unwrap();
        let c = Word(vec![0; 6]);
        let fam = BallFamily::new(vec![BowenBallSpec::open(c.clone(), 2, 0.1).unwrap(), BowenBallSpec::open(c, 2, 0.3).unwrap()]).unwrap();
        let got = disjoint_subfamily_5r(&s, &fam, &dom).unwrap();
        assert_eq!(got, vec![1]);
        assert!(check_subfamily(&s, &fam, &got, 5.0, &dom).unwrap().ok());
    }

    #[test]
    fn shallow_ball_wins_in_3eps() {
        let s = shift(7);
        let dom = s.carrier(0).unwrap();
        let a = Word(vec![0, 0, 0, 0, 0, 0, 0]);
        let b = Word(vec![0, 0, 1, 1, 0, 1, 0]);
        let fam = BallFamily::new(vec![BowenBallSpec::open(b, 5, 0.6).unwrap(), BowenBallSpec::open(a, 2, 0.6).unwrap()]).unwrap();
        let got = disjoint_subfamily_bowen_3eps(&s, &fam, &dom).unwrap();
        assert_eq!(got, vec![1]);
        assert!(check_subfamily(&s, &fam, &got, 3.0, &dom).unwrap().ok());
    }
}
