//! Metric, ball and cocycle invariants across all three backends.

use ndspressure::nds::orbit;
use ndspressure::systems::{symbol_potential, DoublingChain, DoublingChainSpec, MetricKind, NaShift, PointCloudSystem, ShiftSpec, Word};
use ndspressure::{birkhoff_sum, bowen_ball_points, bowen_ball_points_intersection, bowen_distance, BowenBallSpec, NdSystem, PotentialSeq};
use proptest::prelude::*;
use rand::SeedableRng;

fn shift() -> NaShift {
    NaShift::new("p23", ShiftSpec::periodic(&[2, 3]), 10).unwrap()
}

fn doubling(metric: MetricKind) -> DoublingChain {
    DoublingChain::new("dc", DoublingChainSpec { metric, delta: 1.0 / 64.0 }).unwrap()
}

fn cloud() -> PointCloudSystem {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    PointCloudSystem::random(&mut rng, "cloud", 8, 40, 2)
}

fn word(sh: &NaShift, idx: u64) -> Word {
    let total: u64 = (0..sh.depth()).map(|k| sh.alphabet(k) as u64).product();
    sh.word_from_index(0, (idx % total) as u128)
}

fn metric_axioms<S: NdSystem>(sys: &S, n: usize, x: &S::Point, y: &S::Point, z: &S::Point) {
    let dxy = bowen_distance(sys, 0, n, x, y).unwrap();
    let dyx = bowen_distance(sys, 0, n, y, x).unwrap();
    let dxz = bowen_distance(sys, 0, n, x, z).unwrap();
    let dzy = bowen_distance(sys, 0, n, z, y).unwrap();
    assert_eq!(dxy, dyx);
    assert_eq!(dxy == 0.0, x == y);
    assert!(dxy <= dxz + dzy + 1e-12, "{dxy} > {dxz} + {dzy}");
    assert!(bowen_distance(sys, 0, n + 1, x, y).unwrap() >= dxy);
    // The closed form (when overridden) agrees with the orbit definition.
    let ox = orbit(sys, 0, n, x).unwrap();
    let oy = orbit(sys, 0, n, y).unwrap();
    let direct = (0..n).map(|j| sys.metric(j, &ox[j], &oy[j])).fold(0.0, f64::max);
    assert!((sys.bowen_distance(0, n, x, y).unwrap() - direct).abs() <= 1e-12 * (1.0 + direct));
}

fn forms_agree<S: NdSystem>(sys: &S, spec: &BowenBallSpec<S::Point>) {
    let domain = sys.carrier(0).unwrap();
    let a = bowen_ball_points(sys, spec, &domain).unwrap();
    let b = bowen_ball_points_intersection(sys, spec, &domain).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn shift_metric_axioms(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), n in 1usize..8) {
        let sh = shift();
        metric_axioms(&sh, n, &word(&sh, a), &word(&sh, b), &word(&sh, c));
    }

    #[test]
    fn doubling_metric_axioms(x in 0i64..=64, y in 0i64..=64, z in 0i64..=64, n in 1usize..6, m in 0usize..3) {
        let sys = doubling([MetricKind::Euclidean, MetricKind::Scaled, MetricKind::Bounded][m]);
        metric_axioms(&sys, n, &x, &y, &z);
    }

    #[test]
    fn cloud_metric_axioms(x in 0usize..40, y in 0usize..40, z in 0usize..40, n in 1usize..6) {
        metric_axioms(&cloud(), n, &x, &y, &z);
    }

    #[test]
    fn shift_ball_forms_agree(a in any::<u64>(), n in 1usize..6, eps in 0.01f64..1.5, closed in any::<bool>()) {
        let sh = shift();
        forms_agree(&sh, &BowenBallSpec::new(0, word(&sh, a), n, eps, closed).unwrap());
    }

    #[test]
    fn doubling_ball_forms_agree(x in 0i64..=64, n in 1usize..6, eps in 0.01f64..2.0, closed in any::<bool>(), m in 0usize..3) {
        let sys = doubling([MetricKind::Euclidean, MetricKind::Scaled, MetricKind::Bounded][m]);
        forms_agree(&sys, &BowenBallSpec::new(0, x, n, eps, closed).unwrap());
    }

    #[test]
    fn cloud_ball_forms_agree(x in 0usize..40, n in 1usize..6, eps in 0.01f64..1.5, closed in any::<bool>()) {
        forms_agree(&cloud(), &BowenBallSpec::new(0, x, n, eps, closed).unwrap());
    }

    #[test]
    fn birkhoff_cocycle_on_shift(a in any::<u64>(), n in 1usize..5, m in 1usize..5) {
        let sh = shift();
        let f = symbol_potential(|k, s| (k as f64 * 0.37).sin() + s as f64 * 0.5);
        let x = word(&sh, a);
        let tx = orbit(&sh, 0, n + 1, &x).unwrap().pop().unwrap();
        let whole = birkhoff_sum(&sh, &f, 0, n + m, &x).unwrap();
        let split = birkhoff_sum(&sh, &f, 0, n, &x).unwrap() + birkhoff_sum(&sh, &f, n, m, &tx).unwrap();
        prop_assert!((whole - split).abs() < 1e-12);
    }

    #[test]
    fn birkhoff_cocycle_on_doubling(x in 0i64..=64, n in 1usize..4, m in 1usize..4) {
        let sys = doubling(MetricKind::Euclidean);
        let f = PotentialSeq::new(|k, i: &i64| (*i as f64 / 64.0).sin() / (1u64 << k) as f64);
        let tx = orbit(&sys, 0, n + 1, &x).unwrap().pop().unwrap();
        let whole = birkhoff_sum(&sys, &f, 0, n + m, &x).unwrap();
        let split = birkhoff_sum(&sys, &f, 0, n, &x).unwrap() + birkhoff_sum(&sys, &f, n, m, &tx).unwrap();
        prop_assert!((whole - split).abs() < 1e-12);
    }

    #[test]
    fn scaled_doubling_distance_ignores_depth(x in 0i64..=64, y in 0i64..=64, n in 1usize..10) {
        let sys = doubling(MetricKind::Scaled);
        prop_assert_eq!(bowen_distance(&sys, 0, n, &x, &y).unwrap(), sys.metric(0, &x, &y));
    }
}
