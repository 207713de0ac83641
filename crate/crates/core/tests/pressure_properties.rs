//! Structural properties of the cover and packing values and of the
//! pressure estimators.

use ndspressure::pressure::*;
use ndspressure::systems::*;
use ndspressure::{NdSystem, PotentialSeq};
use proptest::prelude::*;

fn p23(depth: usize) -> NaShift {
    NaShift::new("p23", ShiftSpec::periodic(&[2, 3]), depth).unwrap()
}

fn full2(depth: usize) -> NaShift {
    NaShift::new("full2", ShiftSpec::full(2), depth).unwrap()
}

fn wobble() -> PotentialSeq<Word> {
    symbol_potential(|k, a| 0.3 * ((k as f64) * 0.7 + a as f64).sin())
}

fn exact_cfg(n_max: usize, eps: &[f64]) -> EstimatorConfig {
    EstimatorConfig { eps_schedule: eps.to_vec(), n_max, min_ball_points: 0.0, ..EstimatorConfig::default() }
}

const MODES: [CoverMode; 3] = [CoverMode::Center, CoverMode::Sup, CoverMode::Weighted];

#[test]
fn values_decrease_in_s() {
    let sh = p23(5);
    let f = wobble();
    let p = ExplicitProblem::whole(&sh, &f).unwrap().with_centers(CenterSource::All);
    for eps in [0.9, 0.3] {
        let grid: Vec<f64> = (0..12).map(|i| -0.5 + 0.25 * i as f64).collect();
        for mode in MODES {
            let g = p.log_value_fn(&Quantity::Bowen(mode), 1, 3, eps).unwrap();
            let vals: Vec<f64> = grid.iter().map(|&s| g(s).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{mode:?} {vals:?}");
        }
        for d in [Decomposition::Trivial, Decomposition::Dyadic] {
            let vals: Vec<f64> = grid.iter().map(|&s| p.packing_value(s, 1, 3, eps, &d).unwrap().log_value).collect();
            assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{d:?} {vals:?}");
        }
    }
}

#[test]
fn values_grow_as_eps_shrinks() {
    let sh = p23(6);
    let f = wobble();
    let p = ExplicitProblem::whole(&sh, &f).unwrap().with_centers(CenterSource::All);
    let radii = [1.2, 0.9, 0.4, 0.2, 0.1];
    for s in [0.2, 0.9, 1.5] {
        for mode in MODES {
            let vals: Vec<f64> = radii.iter().map(|&e| p.cover_value(s, 2, 3, e, mode).unwrap().log_upper).collect();
            assert!(vals.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{mode:?} s={s} {vals:?}");
        }
        let vals: Vec<f64> = radii.iter().map(|&e| p.packing_value(s, 2, 3, e, &Decomposition::Trivial).unwrap().log_value).collect();
        assert!(vals.windows(2).all(|w| w[1] >= w[0] - 1e-12), "packing s={s} {vals:?}");
    }
}

#[test]
fn bowen_estimates_do_not_drop_as_eps_shrinks() {
    let sh = NaShift::new("s24", ShiftSpec::periodic(&[2, 4]), 16).unwrap();
    let f = PotentialSeq::zero();
    let p = CylinderProblem::whole(&sh, &f).unwrap();
    let est = bowen_pressure(&p, CoverMode::Sup, &exact_cfg(12, &[0.99, 0.49, 0.24])).unwrap();
    let s: Vec<f64> = est.per_eps.iter().map(|e| e.s_star).collect();
    assert!(s.windows(2).all(|w| w[1] >= w[0] - 1e-9), "{s:?}");
}

#[test]
fn full_shift_cover_at_log2_is_one() {
    let f = PotentialSeq::zero();
    for n in 1..=10 {
        let sh = full2(10);
        let cyl = CylinderProblem::whole(&sh, &f).unwrap();
        let v = cyl.log_cover(2f64.ln(), n, n, 0.99, CoverMode::Center).unwrap();
        assert!(v.abs() < 1e-9, "n={n}: {v}");
        let v = cyl.log_packing(2f64.ln(), n, n, 0.99, &Decomposition::Trivial).unwrap();
        assert!(v.abs() < 1e-9, "n={n}: {v}");
        if n <= 8 {
            let ex = ExplicitProblem::whole(&sh, &f).unwrap();
            let r = ex.cover_value(2f64.ln(), n, n, 0.99, CoverMode::Center).unwrap();
            assert!(r.log_upper.abs() < 1e-9 && r.log_lower <= r.log_upper + 1e-9);
        }
    }
}

#[test]
fn constant_potential_shifts_the_exponent() {
    let sh = p23(6);
    let zero = PotentialSeq::zero();
    for a in [-1.0, 0.5, 2.0] {
        let fa = PotentialSeq::constant(a);
        let p0 = ExplicitProblem::whole(&sh, &zero).unwrap();
        let pa = ExplicitProblem::whole(&sh, &fa).unwrap();
        for mode in MODES {
            for s in [0.0, 0.7] {
                let v0 = p0.cover_value(s, 2, 4, 0.4, mode).unwrap().log_upper;
                let va = pa.cover_value(s + a, 2, 4, 0.4, mode).unwrap().log_upper;
                assert!((v0 - va).abs() < 1e-9, "{mode:?} a={a}: {v0} vs {va}");
            }
        }
        let v0 = p0.packing_value(0.7, 2, 4, 0.4, &Decomposition::Trivial).unwrap().log_value;
        let va = pa.packing_value(0.7 + a, 2, 4, 0.4, &Decomposition::Trivial).unwrap().log_value;
        assert!((v0 - va).abs() < 1e-9);
        let big = NaShift::new("s24", ShiftSpec::periodic(&[2, 4]), 16).unwrap();
        let cfg = exact_cfg(12, &[0.99, 0.49]);
        for q in [Quantity::Bowen(CoverMode::Sup), Quantity::Packing(Decomposition::Best)] {
            let h = estimate(&CylinderProblem::whole(&big, &zero).unwrap(), &q, &cfg).unwrap().value;
            let pa = estimate(&CylinderProblem::whole(&big, &fa).unwrap(), &q, &cfg).unwrap().value;
            assert!((pa - h - a).abs() < 1e-9, "{q:?}: {pa} - {h} != {a}");
        }
    }
}

#[test]
fn singleton_target_uses_one_ball() {
    let sh = p23(6);
    let f = wobble();
    let amb = sh.carrier(0).unwrap();
    let i = 17;
    let p = ExplicitProblem::new(&sh, &f, amb.clone(), vec![i]).unwrap();
    let s = 0.4;
    let weights: Vec<f64> =
        (2..=4).map(|n| -(n as f64) * s + ndspressure::birkhoff_sum(&sh, &f, 0, n, &amb[i]).unwrap()).collect();
    let min = weights.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let c = p.cover_value(s, 2, 4, 0.9, CoverMode::Center).unwrap();
    assert!((c.log_upper - min).abs() < 1e-12);
    let pk = p.packing_value(s, 2, 4, 0.9, &Decomposition::Trivial).unwrap();
    assert!((pk.log_value - max).abs() < 1e-12);
}

#[test]
fn packing_ignores_boundary_points_on_a_grid() {
    let sys = DoublingChain::new("de", DoublingChainSpec { metric: MetricKind::Euclidean, delta: 1e-3 }).unwrap();
    let f = PotentialSeq::zero();
    let amb = sys.carrier(0).unwrap();
    let open: Vec<usize> = (101..=899).collect();
    let closed: Vec<usize> = (100..=900).collect();
    let po = ExplicitProblem::new(&sys, &f, amb.clone(), open).unwrap();
    let pc = ExplicitProblem::new(&sys, &f, amb, closed).unwrap();
    for s in [0.3, 0.7, 1.2] {
        for n in [2, 4, 6] {
            let a = po.packing_value(s, n, n, 0.05, &Decomposition::Trivial).unwrap().log_value;
            let b = pc.packing_value(s, n, n, 0.05, &Decomposition::Trivial).unwrap().log_value;
            assert!((a - b).abs() <= 0.05, "s={s} n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn countable_stability_for_a_union() {
    let sh = full2(12);
    let f = PotentialSeq::zero();
    let amb = sh.carrier(0).unwrap();
    // Z1: the cylinder [0]; Z2: words starting with 1 whose odd positions are 0.
    let z1: Vec<usize> = (0..amb.len()).filter(|&i| amb[i].0[0] == 0).collect();
    let z2: Vec<usize> = (0..amb.len()).filter(|&i| amb[i].0[0] == 1 && amb[i].0.iter().skip(1).step_by(2).all(|&a| a == 0)).collect();
    let union: Vec<usize> = z1.iter().chain(&z2).copied().collect();
    let cfg = exact_cfg(12, &[0.9]);
    let h = |z: Vec<usize>| {
        let p = ExplicitProblem::new(&sh, &f, amb.clone(), z).unwrap();
        bowen_pressure(&p, CoverMode::Center, &cfg).unwrap().value
    };
    // At eps = 0.9 the depth-n balls are depth-n cylinders, so the two-depth
    // extrapolation is (log C(12) - log C(6)) / 6 with C(n) the prefix count.
    let oracle = |z: &[usize]| {
        let count = |n: usize| z.iter().map(|&i| &amb[i].0[..n]).collect::<std::collections::BTreeSet<_>>().len() as f64;
        (count(12).ln() - count(6).ln()) / 6.0
    };
    let (o1, o2) = (oracle(&z1), oracle(&z2));
    let (h1, h2, hu) = (h(z1), h(z2), h(union));
    assert!((h1 - o1).abs() < 1e-9 && (h1 - 2f64.ln()).abs() < 1e-9);
    assert!((h2 - o2).abs() < 1e-9, "{h2} vs {o2}");
    assert!((hu - h1.max(h2)).abs() < 0.03, "{hu} vs max({h1}, {h2})");
}

#[test]
fn potential_bounds_and_order() {
    let sh = NaShift::new("s24", ShiftSpec::periodic(&[2, 4]), 16).unwrap();
    let cfg = exact_cfg(12, &[0.99]);
    let zero = PotentialSeq::zero();
    let f = symbol_potential(|k, a| 0.2 * ((k * 3 + a as usize) % 5) as f64 - 0.3);
    let g = symbol_potential(|k, a| 0.2 * ((k * 3 + a as usize) % 5) as f64 - 0.3 + 0.05 * (a % 2) as f64);
    let (inf, sup) = (-0.3, 0.5 + 0.05);
    for q in [Quantity::Bowen(CoverMode::Sup), Quantity::Packing(Decomposition::Best)] {
        let h = estimate(&CylinderProblem::whole(&sh, &zero).unwrap(), &q, &cfg).unwrap().value;
        let pf = estimate(&CylinderProblem::whole(&sh, &f).unwrap(), &q, &cfg).unwrap().value;
        let pg = estimate(&CylinderProblem::whole(&sh, &g).unwrap(), &q, &cfg).unwrap().value;
        assert!(h + inf - 1e-9 <= pf && pf <= h + sup + 1e-9, "{q:?}: {pf} outside [{}, {}]", h + inf, h + sup);
        assert!(pf <= pg + 1e-9, "{q:?}: {pf} > {pg}");
    }
}

#[test]
fn bowen_estimate_is_below_packing() {
    let sh = NaShift::new("gap", ShiftSpec { alphabet: AlphabetSeq::GeometricBlocks { even: 2, odd: 4 } }, 68).unwrap();
    let f = PotentialSeq::zero();
    let p = CylinderProblem::whole(&sh, &f).unwrap();
    let cfg = EstimatorConfig { scheme: DepthScheme::Window { lo: 32, hi: 64 }, ..exact_cfg(64, &[0.99]) };
    let hb = bowen_pressure(&p, CoverMode::Sup, &cfg).unwrap().value;
    let hp = packing_pressure(&p, Decomposition::Best, &cfg).unwrap().value;
    assert!(hb <= hp + 1e-9, "{hb} > {hp}");
}

#[test]
fn critical_exponent_examples() {
    let g = |s: f64| Ok(5.0 * (2f64.ln() - s));
    assert!((critical_exponent(&g, (0.0, 1.0), 1e-12).unwrap() - 2f64.ln()).abs() < 1e-11);
    let flat = |_s: f64| Ok(f64::NEG_INFINITY);
    assert!(critical_exponent(&flat, (0.0, 1.0), 1e-12).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn values_grow_with_the_target(mask in any::<u64>(), extra in any::<u64>(), s in -0.5f64..1.5, eps in prop::sample::select(vec![0.9, 0.4, 0.2])) {
        let sh = p23(4);
        let f = wobble();
        let amb = sh.carrier(0).unwrap();
        let z1: Vec<usize> = (0..amb.len()).filter(|&i| mask >> (i % 64) & 1 == 1).collect();
        prop_assume!(!z1.is_empty());
        let z2: Vec<usize> = (0..amb.len()).filter(|&i| (mask | extra) >> (i % 64) & 1 == 1).collect();
        let centers = CenterSource::Given(amb.clone());
        let p1 = ExplicitProblem::new(&sh, &f, amb.clone(), z1).unwrap().with_centers(centers.clone());
        let p2 = ExplicitProblem::new(&sh, &f, amb.clone(), z2).unwrap().with_centers(centers);
        for mode in MODES {
            let a = p1.cover_value(s, 1, 3, eps, mode).unwrap().log_upper;
            let b = p2.cover_value(s, 1, 3, eps, mode).unwrap().log_upper;
            prop_assert!(a <= b + 1e-9, "{:?}: {} > {}", mode, a, b);
        }
        let a = p1.packing_value(s, 1, 3, eps, &Decomposition::Trivial).unwrap();
        let b = p2.packing_value(s, 1, 3, eps, &Decomposition::Trivial).unwrap();
        prop_assert!(a.exact && b.exact);
        prop_assert!(a.log_value <= b.log_value + 1e-9);
    }

    #[test]
    fn lower_bound_below_upper(s in -0.5f64..1.5, eps in prop::sample::select(vec![0.9, 0.4, 0.2]), lo in 1usize..3, span in 0usize..2) {
        let sh = p23(5);
        let f = wobble();
        let p = ExplicitProblem::whole(&sh, &f).unwrap();
        for mode in MODES {
            let r = p.cover_value(s, lo, lo + span, eps, mode).unwrap();
            prop_assert!(r.log_lower <= r.log_upper + 1e-9);
            let wit = r.witness.unwrap();
            let amb = sh.carrier(0).unwrap();
            let covered = amb.iter().all(|x| wit.iter().any(|b| b.admits(ndspressure::bowen_distance(&sh, 0, b.n, &b.center, x).unwrap())));
            prop_assert!(covered);
        }
    }

    #[test]
    fn cylinder_recursion_matches_enumeration(s in -0.5f64..1.5, lo in 1usize..4, span in 0usize..3, closed_eps in prop::sample::select(vec![0.9, 0.3])) {
        let sh = full2(7);
        let f = PotentialSeq::level_constant(|k| 0.1 * k as f64);
        let ex = ExplicitProblem::whole(&sh, &f).unwrap().with_centers(CenterSource::All);
        let cyl = CylinderProblem::whole(&sh, &f).unwrap();
        let hi = lo + span;
        let a = cyl.log_cover(s, lo, hi, closed_eps, CoverMode::Center).unwrap();
        let b = ex.cover_value(s, lo, hi, closed_eps, CoverMode::Center).unwrap().log_upper;
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
        let a = cyl.log_packing(s, lo, hi, closed_eps, &Decomposition::Trivial).unwrap();
        let b = ex.packing_value(s, lo, hi, closed_eps, &Decomposition::Trivial).unwrap().log_value;
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
    }
}
