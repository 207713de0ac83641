//! Minimum-weight set cover and maximum-weight set packing in log space.
//!
//! Weights are passed as logarithms because Carathéodory weights
//! `exp(-n s + S_n f)` span hundreds of orders of magnitude. Solvers are
//! tried from most to least structured:
//!
//! 1. laminar families (every pair nested or disjoint): exact tree DP;
//! 2. interval families (members contiguous in index order): exact DP;
//! 3. at most [`EXACT_LIMIT`] distinct sets: exact branch and bound;
//! 4. otherwise greedy (weight-ratio cover; greedy packing plus swaps).
//!
//! Laminar and interval incidence matrices are totally unimodular, so in
//! cases 1 and 2 the fractional optimum equals the integer one.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use crate::bits::BitSet;
use crate::lp;
use crate::math::{exp, ln, log_add, log_sum_exp};
use crate::Result;

/// Families with at most this many distinct sets are solved exactly by search.
pub const EXACT_LIMIT: usize = 24;

/// A weighted set family over the universe `0..universe`.
#[derive(Debug, Clone, PartialEq)]
pub struct SetFamily {
    /// Universe size.
    pub universe: usize,
    /// Sorted member lists.
    pub sets: Vec<Vec<usize>>,
    /// Natural logarithms of the set weights.
    pub log_weights: Vec<f64>,
}

/// How a solution was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Tree DP over a laminar family.
    Laminar,
    /// DP over contiguous index ranges.
    Interval,
    /// Exhaustive branch and bound.
    BranchAndBound,
    /// Greedy heuristic (an upper bound for covers, a lower bound for packings).
    Greedy,
}

/// A chosen subfamily and its log value.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Indices into the original family.
    pub chosen: Vec<usize>,
    /// `log Σ_{chosen} w_i`; `-inf` for an empty choice.
    pub log_value: f64,
    /// Solver used.
    pub method: Method,
}

impl Solution {
    /// Whether the value is provably optimal.
    pub fn exact(&self) -> bool {
        self.method != Method::Greedy
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sense {
    Min,
    Max,
}

/// Collapse identical sets, keeping the best weight; drop empty sets.
/// Returns `(sets, log weights, original index)`.
fn dedupe(fam: &SetFamily, sense: Sense) -> (Vec<Vec<usize>>, Vec<f64>, Vec<usize>) {
    let mut best: BTreeMap<&[usize], usize> = BTreeMap::new();
    for (i, s) in fam.sets.iter().enumerate() {
        if s.is_empty() || fam.log_weights[i].is_nan() {
            continue;
        }
        best.entry(s.as_slice())
            .and_modify(|j| {
                let better = match sense {
                    Sense::Min => fam.log_weights[i] < fam.log_weights[*j],
                    Sense::Max => fam.log_weights[i] > fam.log_weights[*j],
                };
                if better {
                    *j = i;
                }
            })
            .or_insert(i);
    }
    let mut idx: Vec<usize> = best.into_values().collect();
    idx.sort_unstable();
    (idx.iter().map(|&i| fam.sets[i].clone()).collect(), idx.iter().map(|&i| fam.log_weights[i]).collect(), idx)
}

/// Parent links of a laminar family, or `None` when some pair crosses.
fn laminar_parents(universe: usize, sets: &[Vec<usize>]) -> Option<(Vec<Option<usize>>, Vec<Option<usize>>)> {
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by_key(|&i| (Reverse(sets[i].len()), i));
    let mut owner: Vec<Option<usize>> = vec![None; universe];
    let mut parent = vec![None; sets.len()];
    for &s in &order {
        let o = owner[sets[s][0]];
        if sets[s].iter().any(|&p| owner[p] != o) {
            return None;
        }
        parent[s] = o;
        for &p in &sets[s] {
            owner[p] = Some(s);
        }
    }
    Some((parent, owner))
}

fn is_interval_family(sets: &[Vec<usize>]) -> bool {
    sets.iter().all(|s| s.last().unwrap() - s[0] + 1 == s.len())
}

/// Structural classification of a family (after removing duplicates).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Structure {
    /// Every pair is nested or disjoint.
    pub laminar: bool,
    /// Every set is a contiguous index range.
    pub interval: bool,
    /// Number of distinct non-empty sets.
    pub distinct: usize,
}

/// Classify a family.
pub fn structure(fam: &SetFamily) -> Structure {
    let (sets, _, _) = dedupe(fam, Sense::Min);
    Structure {
        laminar: laminar_parents(fam.universe, &sets).is_some(),
        interval: is_interval_family(&sets),
        distinct: sets.len(),
    }
}

fn children_of(parent: &[Option<usize>]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut children = vec![Vec::new(); parent.len()];
    let mut roots = Vec::new();
    for (i, p) in parent.iter().enumerate() {
        match p {
            Some(p) => children[*p].push(i),
            None => roots.push(i),
        }
    }
    (children, roots)
}

fn ascending_size(sets: &[Vec<usize>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by_key(|&i| (sets[i].len(), i));
    order
}

fn collect_tree(node: usize, take: &[bool], children: &[Vec<usize>], out: &mut Vec<usize>) {
    if take[node] {
        out.push(node);
    } else {
        for &c in &children[node] {
            collect_tree(c, take, children, out);
        }
    }
}

fn laminar_cover(universe: usize, sets: &[Vec<usize>], lw: &[f64], parent: &[Option<usize>], owner: &[Option<usize>]) -> Option<(Vec<usize>, f64)> {
    if owner.iter().any(|o| o.is_none()) {
        return None;
    }
    let (children, roots) = children_of(parent);
    let mut direct = vec![0usize; sets.len()];
    for o in owner.iter().take(universe).flatten() {
        direct[*o] += 1;
    }
    let mut best = vec![f64::INFINITY; sets.len()];
    let mut take = vec![true; sets.len()];
    for s in ascending_size(sets) {
        let split = if direct[s] == 0 && !children[s].is_empty() {
            children[s].iter().fold(f64::NEG_INFINITY, |acc, &c| log_add(acc, best[c]))
        } else {
            f64::INFINITY
        };
        if split < lw[s] {
            best[s] = split;
            take[s] = false;
        } else {
            best[s] = lw[s];
        }
    }
    let value = roots.iter().fold(f64::NEG_INFINITY, |acc, &r| log_add(acc, best[r]));
    let mut chosen = Vec::new();
    for &r in &roots {
        collect_tree(r, &take, &children, &mut chosen);
    }
    Some((chosen, value))
}

fn laminar_packing(sets: &[Vec<usize>], lw: &[f64], parent: &[Option<usize>]) -> (Vec<usize>, f64) {
    let (children, roots) = children_of(parent);
    let mut best = vec![f64::NEG_INFINITY; sets.len()];
    let mut take = vec![true; sets.len()];
    for s in ascending_size(sets) {
        let split = children[s].iter().fold(f64::NEG_INFINITY, |acc, &c| log_add(acc, best[c]));
        if split > lw[s] {
            best[s] = split;
            take[s] = false;
        } else {
            best[s] = lw[s];
        }
    }
    let value = roots.iter().fold(f64::NEG_INFINITY, |acc, &r| log_add(acc, best[r]));
    let mut chosen = Vec::new();
    for &r in &roots {
        collect_tree(r, &take, &children, &mut chosen);
    }
    (chosen, value)
}

/// `f(k)` = cheapest cover of points `< k`; the interval holding point
/// `k - 1` leaves points `< start` to the rest.
fn interval_cover(universe: usize, sets: &[Vec<usize>], lw: &[f64]) -> Option<(Vec<usize>, f64)> {
    let mut by_start: Vec<Vec<usize>> = vec![Vec::new(); universe];
    for (i, s) in sets.iter().enumerate() {
        by_start[s[0]].push(i);
    }
    let mut f = vec![f64::INFINITY; universe + 1];
    let mut via = vec![usize::MAX; universe + 1];
    f[0] = f64::NEG_INFINITY;
    for k in 0..universe {
        if f[k] == f64::INFINITY {
            continue;
        }
        for &i in &by_start[k] {
            let cand = log_add(lw[i], f[k]);
            let end = *sets[i].last().unwrap();
            for p in k..=end {
                if cand < f[p + 1] {
                    f[p + 1] = cand;
                    via[p + 1] = i;
                }
            }
        }
    }
    if f[universe] == f64::INFINITY {
        return None;
    }
    let mut chosen = Vec::new();
    let mut k = universe;
    while k > 0 {
        let i = via[k];
        chosen.push(i);
        k = sets[i][0];
    }
    Some((chosen, f[universe]))
}

/// Weighted interval scheduling.
fn interval_packing(sets: &[Vec<usize>], lw: &[f64]) -> (Vec<usize>, f64) {
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by_key(|&i| (*sets[i].last().unwrap(), sets[i][0], i));
    let ends: Vec<usize> = order.iter().map(|&i| *sets[i].last().unwrap()).collect();
    let mut h = vec![f64::NEG_INFINITY; order.len() + 1];
    let mut take = vec![false; order.len() + 1];
    let mut prev = vec![0usize; order.len() + 1];
    for (j, &i) in order.iter().enumerate() {
        let start = sets[i][0];
        let p = ends.partition_point(|&e| e < start);
        let with = log_add(lw[i], h[p]);
        prev[j + 1] = p;
        if with > h[j] {
            h[j + 1] = with;
            take[j + 1] = true;
        } else {
            h[j + 1] = h[j];
        }
    }
    let mut chosen = Vec::new();
    let mut j = order.len();
    while j > 0 {
        if take[j] {
            chosen.push(order[j - 1]);
            j = prev[j];
        } else {
            j -= 1;
        }
    }
    (chosen, h[order.len()])
}

fn bnb_cover(universe: usize, sets: &[Vec<usize>], lw: &[f64]) -> Option<(Vec<usize>, f64)> {
    let bits: Vec<BitSet> = sets.iter().map(|s| BitSet::from_indices(universe, s)).collect();
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); universe];
    for (i, s) in sets.iter().enumerate() {
        for &p in s {
            containing[p].push(i);
        }
    }
    if containing.iter().any(|c| c.is_empty()) {
        return None;
    }
    for c in containing.iter_mut() {
        c.sort_by(|&a, &b| lw[a].total_cmp(&lw[b]));
    }
    struct Search<'a> {
        bits: &'a [BitSet],
        containing: &'a [Vec<usize>],
        lw: &'a [f64],
        best: f64,
        best_set: Vec<usize>,
    }
    fn go(s: &mut Search<'_>, covered: &BitSet, cur: f64, picked: &mut Vec<usize>, universe: usize) {
        if cur >= s.best {
            return;
        }
        let mut pivot: Option<usize> = None;
        for p in 0..universe {
            if !covered.contains(p) && pivot.is_none_or(|q| s.containing[p].len() < s.containing[q].len()) {
                pivot = Some(p);
            }
        }
        let Some(p) = pivot else {
            s.best = cur;
            s.best_set = picked.clone();
            return;
        };
        for k in 0..s.containing[p].len() {
            let i = s.containing[p][k];
            let mut next = covered.clone();
            next.union_with(&s.bits[i]);
            picked.push(i);
            go(s, &next, log_add(cur, s.lw[i]), picked, universe);
            picked.pop();
        }
    }
    let mut s = Search { bits: &bits, containing: &containing, lw, best: f64::INFINITY, best_set: Vec::new() };
    go(&mut s, &BitSet::new(universe), f64::NEG_INFINITY, &mut Vec::new(), universe);
    Some((s.best_set, s.best))
}

fn bnb_packing(universe: usize, sets: &[Vec<usize>], lw: &[f64]) -> (Vec<usize>, f64) {
    let bits: Vec<BitSet> = sets.iter().map(|s| BitSet::from_indices(universe, s)).collect();
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by(|&a, &b| lw[b].total_cmp(&lw[a]));
    // suffix[j] = log Σ_{t >= j} w_{order[t]}
    let mut suffix = vec![f64::NEG_INFINITY; order.len() + 1];
    for j in (0..order.len()).rev() {
        suffix[j] = log_add(suffix[j + 1], lw[order[j]]);
    }
    struct Search<'a> {
        bits: &'a [BitSet],
        lw: &'a [f64],
        order: &'a [usize],
        suffix: &'a [f64],
        best: f64,
        best_set: Vec<usize>,
    }
    fn go(s: &mut Search<'_>, j: usize, used: &BitSet, cur: f64, picked: &mut Vec<usize>) {
        if cur > s.best {
            s.best = cur;
            s.best_set = picked.clone();
        }
        if j == s.order.len() || log_add(cur, s.suffix[j]) <= s.best {
            return;
        }
        let i = s.order[j];
        if !s.bits[i].intersects(used) {
            let mut next = used.clone();
            next.union_with(&s.bits[i]);
            picked.push(i);
            go(s, j + 1, &next, log_add(cur, s.lw[i]), picked);
            picked.pop();
        }
        go(s, j + 1, used, cur, picked);
    }
    let mut s = Search { bits: &bits, lw, order: &order, suffix: &suffix, best: f64::NEG_INFINITY, best_set: Vec::new() };
    go(&mut s, 0, &BitSet::new(universe), f64::NEG_INFINITY, &mut Vec::new());
    (s.best_set, s.best)
}

#[derive(PartialEq)]
struct Key(f64, usize);
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    // Reversed so the max-heap pops the smallest ratio, then the smallest index.
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

fn greedy_cover(universe: usize, sets: &[Vec<usize>], lw: &[f64]) -> Option<(Vec<usize>, f64)> {
    let mut covered = BitSet::new(universe);
    let mut left = universe;
    let mut heap: BinaryHeap<Key> = sets.iter().enumerate().map(|(i, s)| Key(lw[i] - ln(s.len() as f64), i)).collect();
    let mut chosen = Vec::new();
    let mut value = f64::NEG_INFINITY;
    while left > 0 {
        let Key(key, i) = heap.pop()?;
        let fresh = sets[i].iter().filter(|&&p| !covered.contains(p)).count();
        if fresh == 0 {
            continue;
        }
        let now = lw[i] - ln(fresh as f64);
        if now > key {
            heap.push(Key(now, i));
            continue;
        }
        chosen.push(i);
        value = log_add(value, lw[i]);
        for &p in &sets[i] {
            if !covered.contains(p) {
                covered.insert(p);
                left -= 1;
            }
        }
    }
    Some((chosen, value))
}

fn greedy_packing(universe: usize, sets: &[Vec<usize>], lw: &[f64]) -> (Vec<usize>, f64) {
    let bits: Vec<BitSet> = sets.iter().map(|s| BitSet::from_indices(universe, s)).collect();
    let top = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = lw.iter().map(|&l| exp(l - top)).collect();
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
    let mut chosen: Vec<usize> = Vec::new();
    for &i in &order {
        if chosen.iter().all(|&j| !bits[i].intersects(&bits[j])) {
            chosen.push(i);
        }
    }
    // Local search: drop one chosen set, add up to two unchosen sets that
    // only conflicted with it, when that strictly increases the total.
    for _ in 0..64 {
        let mut improved = false;
        'outer: for ci in 0..chosen.len() {
            let c = chosen[ci];
            let free: Vec<usize> = (0..sets.len())
                .filter(|&i| !chosen.contains(&i) && chosen.iter().all(|&j| j == c || !bits[i].intersects(&bits[j])))
                .collect();
            let mut best: Option<(f64, usize, Option<usize>)> = None;
            for (a, &i) in free.iter().enumerate() {
                if w[i] > w[c] * (1.0 + 1e-12) && best.is_none_or(|b| w[i] > b.0) {
                    best = Some((w[i], i, None));
                }
                for &j in &free[a + 1..] {
                    let gain = w[i] + w[j];
                    if !bits[i].intersects(&bits[j]) && gain > w[c] * (1.0 + 1e-12) && best.is_none_or(|b| gain > b.0) {
                        best = Some((gain, i, Some(j)));
                    }
                }
            }
            if let Some((_, i, j)) = best {
                chosen.swap_remove(ci);
                chosen.push(i);
                chosen.extend(j);
                improved = true;
                break 'outer;
            }
        }
        if !improved {
            break;
        }
    }
    let value = log_sum_exp(&chosen.iter().map(|&i| lw[i]).collect::<Vec<_>>());
    (chosen, value)
}

/// Minimum-weight cover of the whole universe, or `None` if the family
/// does not cover it.
pub fn min_cover(fam: &SetFamily) -> Option<Solution> {
    if fam.universe == 0 {
        return Some(Solution { chosen: Vec::new(), log_value: f64::NEG_INFINITY, method: Method::Laminar });
    }
    let (sets, lw, orig) = dedupe(fam, Sense::Min);
    if sets.is_empty() {
        return None;
    }
    let map = |(chosen, v): (Vec<usize>, f64), method| {
        let mut chosen: Vec<usize> = chosen.into_iter().map(|i| orig[i]).collect();
        chosen.sort_unstable();
        Solution { chosen, log_value: v, method }
    };
    if let Some((parent, owner)) = laminar_parents(fam.universe, &sets) {
        return laminar_cover(fam.universe, &sets, &lw, &parent, &owner).map(|r| map(r, Method::Laminar));
    }
    if is_interval_family(&sets) {
        return interval_cover(fam.universe, &sets, &lw).map(|r| map(r, Method::Interval));
    }
    if sets.len() <= EXACT_LIMIT {
        return bnb_cover(fam.universe, &sets, &lw).map(|r| map(r, Method::BranchAndBound));
    }
    greedy_cover(fam.universe, &sets, &lw).map(|r| map(r, Method::Greedy))
}

/// Maximum-weight subfamily of pairwise disjoint sets.
pub fn max_packing(fam: &SetFamily) -> Solution {
    let (sets, lw, orig) = dedupe(fam, Sense::Max);
    let map = |(chosen, v): (Vec<usize>, f64), method| {
        let mut chosen: Vec<usize> = chosen.into_iter().map(|i| orig[i]).collect();
        chosen.sort_unstable();
        Solution { chosen, log_value: v, method }
    };
    if sets.is_empty() {
        return Solution { chosen: Vec::new(), log_value: f64::NEG_INFINITY, method: Method::Laminar };
    }
    if let Some((parent, _)) = laminar_parents(fam.universe, &sets) {
        return map(laminar_packing(&sets, &lw, &parent), Method::Laminar);
    }
    if is_interval_family(&sets) {
        return map(interval_packing(&sets, &lw), Method::Interval);
    }
    if sets.len() <= EXACT_LIMIT {
        return map(bnb_packing(fam.universe, &sets, &lw), Method::BranchAndBound);
    }
    map(greedy_packing(fam.universe, &sets, &lw), Method::Greedy)
}

/// Optimal fractional cover: `min Σ c_i w_i` subject to every point being
/// covered with total coefficient at least 1. Returns the log optimum and
/// the coefficients (indexed like the input family).
pub fn fractional_cover(fam: &SetFamily) -> Result<(f64, Vec<f64>)> {
    let (sets, lw, orig) = dedupe(fam, Sense::Min);
    // Identical rows (points lying in exactly the same sets) are redundant.
    let mut rows: BTreeMap<Vec<usize>, ()> = BTreeMap::new();
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); fam.universe];
    for (i, s) in sets.iter().enumerate() {
        for &p in s {
            containing[p].push(i);
        }
    }
    for c in containing {
        if c.is_empty() {
            return Err(crate::NdsError::LpInfeasible);
        }
        rows.insert(c, ());
    }
    let top = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cost: Vec<f64> = lw.iter().map(|&l| exp(l - top)).collect();
    let a: Vec<Vec<f64>> = rows
        .keys()
        .map(|c| {
            let mut row = vec![0.0; sets.len()];
            for &i in c {
                row[i] = 1.0;
            }
            row
        })
        .collect();
    let sol = lp::minimize_covering(&a, &vec![1.0; a.len()], &cost)?;
    let mut coeffs = vec![0.0; fam.sets.len()];
    for (i, &x) in sol.x.iter().enumerate() {
        coeffs[orig[i]] = x;
    }
    Ok((ln(sol.objective) + top, coeffs))
}

/// A lower bound on the cover value valid for every family: each point
/// needs at least one set, so the value is at least the largest, over
/// points, of the cheapest set containing that point.
pub fn cover_lower_bound(fam: &SetFamily) -> f64 {
    let mut cheapest = vec![f64::INFINITY; fam.universe];
    for (s, &l) in fam.sets.iter().zip(&fam.log_weights) {
        for &p in s {
            if l < cheapest[p] {
                cheapest[p] = l;
            }
        }
    }
    cheapest.into_iter().fold(f64::NEG_INFINITY, f64::max)
}
