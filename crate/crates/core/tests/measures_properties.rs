//! Local and integrated exponents, push-forwards and Frostman certificates.

use ndspressure::measures::*;
use ndspressure::pressure::{CenterSource, CoverMode, ExplicitProblem};
use ndspressure::systems::*;
use ndspressure::{BowenBallSpec, NdSystem, PotentialSeq};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

const LN2: f64 = std::f64::consts::LN_2;

fn random_bernoulli<R: Rng>(rng: &mut R, sizes: &[usize]) -> Vec<Vec<f64>> {
    sizes
        .iter()
        .map(|&m| {
            let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
            let t: f64 = raw.iter().sum();
            raw.into_iter().map(|p| p / t).collect()
        })
        .collect()
}

#[test]
fn uniform_full_shift_has_constant_exponent() {
    let sh = NaShift::new("full2", ShiftSpec::full(2), 16).unwrap();
    let mu = MeasureRep::Bernoulli(BernoulliSeq::uniform(&[2; 16]));
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let x = Word(BernoulliSeq::uniform(&[2; 16]).sample(&mut rng, 16));
        let r = local_exponents(&sh, &mu, &PotentialSeq::zero(), &x, &[0.9], 14).unwrap();
        assert!((r.lower - LN2).abs() < 1e-12 && (r.upper - LN2).abs() < 1e-12);
    }
    let r = integrated_exponents(&sh, &mu, &PotentialSeq::zero(), &[0.9], 14, 500, &mut rng, &|w| Word(w)).unwrap();
    assert!((r.lower - LN2).abs() < 1e-12 && (r.upper - LN2).abs() < 1e-12);
    assert_eq!(r.excluded_mass, 0.0);
}

#[test]
fn dirac_on_scaled_doubling_has_zero_entropy() {
    let sys = DoublingChain::new("du", DoublingChainSpec { metric: MetricKind::Scaled, delta: 1e-3 }).unwrap();
    let x = sys.point(0.3);
    let mu = MeasureRep::atomic(vec![(x, 1.0)]).unwrap();
    let r = local_exponents(&sys, &mu, &PotentialSeq::zero(), &x, &[0.1, 0.05], 10).unwrap();
    assert_eq!((r.lower, r.upper), (0.0, 0.0));
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let r = integrated_exponents(&sys, &mu, &PotentialSeq::zero(), &[0.05], 10, 500, &mut rng, &|_| x).unwrap();
    assert_eq!((r.lower, r.upper), (0.0, 0.0));
}

#[test]
fn null_balls_are_excluded_from_integration() {
    let sh = NaShift::new("full2", ShiftSpec::full(2), 8).unwrap();
    // A point mass seen from a different point gives an empty ball.
    let a = Word(vec![0; 8]);
    let b = Word(vec![1; 8]);
    let mu = MeasureRep::atomic(vec![(a.clone(), 1.0)]).unwrap();
    let r = local_exponents(&sh, &mu, &PotentialSeq::zero(), &b, &[0.9], 6).unwrap();
    assert_eq!(r.lower, f64::INFINITY);
    let mu = MeasureRep::atomic(vec![(a, 0.5), (b, 0.5)]).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let r = integrated_exponents(&sh, &mu, &PotentialSeq::zero(), &[0.9], 6, 500, &mut rng, &|w| Word(w)).unwrap();
    // Each atom keeps mass 1/2 in its own ball: ratios log 2 / n for n in [3, 6].
    assert_eq!(r.excluded_mass, 0.0);
    assert!((r.lower - LN2 / 6.0).abs() < 1e-12 && (r.upper - LN2 / 3.0).abs() < 1e-12);
}

#[test]
fn alternating_shift_local_exponents_follow_the_tail_average() {
    let sh = NaShift::new("s24", ShiftSpec::periodic(&[2, 4]), 16).unwrap();
    let mu = MeasureRep::Bernoulli(BernoulliSeq::uniform(&[2, 4].repeat(8)));
    let x = Word(vec![1; 16]);
    let r = local_exponents(&sh, &mu, &PotentialSeq::zero(), &x, &[0.99], 12).unwrap();
    // Ratios (1/n) Σ_{k<n} log m_k over n in [6, 12]; odd n sit below 1.5 log 2.
    let oracle: Vec<f64> = (6..=12).map(|n| (0..n).map(|k| if k % 2 == 0 { LN2 } else { 2.0 * LN2 }).sum::<f64>() / n as f64).collect();
    let lo = oracle.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = oracle.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!((r.lower - lo).abs() < 1e-12 && (r.upper - hi).abs() < 1e-12);
    assert!((r.upper - 1.5 * LN2).abs() < 1e-12);
}

#[test]
fn frostman_examples() {
    // Depth-3 cylinders at eps = 0.9 tile the full 2-shift: the certificate
    // gives each tile the same mass.
    let sh = NaShift::new("full2", ShiftSpec::full(2), 6).unwrap();
    let f = PotentialSeq::zero();
    let p = ExplicitProblem::whole(&sh, &f).unwrap();
    let cert = frostman_dual(&p, LN2, 3, 3, 0.9).unwrap();
    assert!(cert.masses.iter().all(|m| (m - 0.125).abs() < 1e-12));
    assert!(cert.log_weighted_cover.abs() < 1e-9);
    assert!(cert.worst_violation() <= 0.0);
    // Mixed depths 1..8 at s = log 2: every cylinder of depth <= 8 obeys μ(C) <= 2^{-n} / C.
    let sh = NaShift::new("full2", ShiftSpec::full(2), 8).unwrap();
    let p = ExplicitProblem::whole(&sh, &f).unwrap().with_centers(CenterSource::All);
    let cert = frostman_dual(&p, LN2, 1, 8, 0.9).unwrap();
    for (i, (ball, lw)) in cert.balls.iter().enumerate() {
        assert!((lw + ball.n as f64 * LN2).abs() < 1e-12);
        assert!(cert.masses[i] <= (lw - cert.log_c).exp());
    }
    assert!(((cert.log_c - cert.log_weighted_cover).exp() - 1.0).abs() <= 1e-6);
}

#[test]
fn permuted_bernoulli_masses() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    let sizes = [2, 3, 2, 3, 2, 3];
    let seq = BernoulliSeq::uniform(&sizes);
    let probs = random_bernoulli(&mut rng, &sizes);
    let sh = NaShift::new("p23", ShiftSpec::periodic(&[2, 3]), 6).unwrap();
    let MeasureRep::Bernoulli(b) = bernoulli_measure(sh.spec(), &probs).unwrap() else { panic!() };
    let perm = |k: usize, a: u8| ((a as usize + k + 1) % sizes[k % 6]) as u8;
    let pb = b.permuted(&perm).unwrap();
    for x in sh.carrier(0).unwrap() {
        for d in 0..=6 {
            let y: Vec<u8> = x.0[..d].iter().enumerate().map(|(k, &a)| perm(k, a)).collect();
            assert!((b.cylinder_mass(&x.0[..d]).unwrap() - pb.cylinder_mass(&y).unwrap()).abs() < 1e-15);
        }
    }
    assert_eq!(seq.depth(), 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exponents_grow_as_eps_shrinks(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let sh = NaShift::new("p23", ShiftSpec::periodic(&[2, 3]), 14).unwrap();
        let probs = random_bernoulli(&mut rng, &[2, 3].repeat(7));
        let mu = bernoulli_measure(sh.spec(), &probs).unwrap();
        let MeasureRep::Bernoulli(b) = &mu else { unreachable!() };
        let x = Word(b.sample(&mut rng, 14));
        let r = local_exponents(&sh, &mu, &PotentialSeq::zero(), &x, &[0.99, 0.49, 0.24], 10).unwrap();
        // Balls shrink with eps, so -log μ(B) grows pointwise in n.
        for w in r.per_eps.windows(2) {
            prop_assert!(w[1].lower >= w[0].lower - 1e-12 && w[1].upper >= w[0].upper - 1e-12);
        }
        let sys = DoublingChain::new("de", DoublingChainSpec { metric: MetricKind::Euclidean, delta: 1.0 / 1024.0 }).unwrap();
        let pts: Vec<i64> = (0..40).map(|_| rng.gen_range(0..=1024)).collect();
        let mu = MeasureRep::uniform(pts.clone()).unwrap();
        let r = local_exponents(&sys, &mu, &PotentialSeq::zero(), &pts[0], &[0.2, 0.1, 0.05], 8).unwrap();
        for w in r.per_eps.windows(2) {
            prop_assert!(w[1].lower >= w[0].lower - 1e-12 && w[1].upper >= w[0].upper - 1e-12);
        }
    }

    #[test]
    fn pressure_is_entropy_plus_tail_average(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let sh = NaShift::new("p23", ShiftSpec::periodic(&[2, 3]), 14).unwrap();
        let mu = bernoulli_measure(sh.spec(), &random_bernoulli(&mut rng, &[2, 3].repeat(7))).unwrap();
        let MeasureRep::Bernoulli(b) = &mu else { unreachable!() };
        let x = Word(b.sample(&mut rng, 14));
        // f_k(T^k x) = 0.4 + 0.02 x_k 2^{-k} converges to 0.4.
        let f = symbol_potential(|k, a| 0.4 + 0.02 * a as f64 * 0.5f64.powi(k as i32));
        let h = local_exponents(&sh, &mu, &PotentialSeq::zero(), &x, &[0.99], 12).unwrap();
        let p = local_exponents(&sh, &mu, &f, &x, &[0.99], 12).unwrap();
        prop_assert!((p.lower - (h.lower + 0.4)).abs() < 0.01);
        prop_assert!((p.upper - (h.upper + 0.4)).abs() < 0.01);
    }

    #[test]
    fn pushforward_preserves_mass(weights in prop::collection::vec(0.01f64..1.0, 1..30), modulus in 1usize..10) {
        let t: f64 = weights.iter().sum();
        let mu = MeasureRep::atomic(weights.iter().enumerate().map(|(i, w)| (i, w / t)).collect()).unwrap();
        let MeasureRep::Atomic(before) = &mu else { unreachable!() };
        let MeasureRep::Atomic(after) = mu.pushforward(|&i| i % modulus).unwrap() else { unreachable!() };
        let a: f64 = before.iter().map(|x| x.1).sum();
        let b: f64 = after.iter().map(|x| x.1).sum();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!(after.len() <= modulus);
    }

    #[test]
    fn frostman_constraints_hold(seed in any::<u64>(), s in 0.0f64..1.5, eps in prop::sample::select(vec![0.9, 0.4])) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let sh = NaShift::new("p23", ShiftSpec::periodic(&[2, 3]), 5).unwrap();
        let amb = sh.carrier(0).unwrap();
        let z: Vec<usize> = (0..amb.len()).filter(|_| rng.gen_bool(0.4)).collect();
        prop_assume!(!z.is_empty());
        let shift: Vec<f64> = (0..6).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let f = symbol_potential(move |k, a| shift[(k + a as usize) % 6]);
        let p = ExplicitProblem::new(&sh, &f, amb, z).unwrap();
        let cert = frostman_dual(&p, s, 1, 3, eps).unwrap();
        prop_assert!(cert.worst_violation() <= 0.0);
        prop_assert!(((cert.log_c - cert.log_weighted_cover).exp() - 1.0).abs() <= 1e-6);
        let w = p.cover_value(s, 1, 3, eps, CoverMode::Weighted).unwrap().log_upper;
        prop_assert!((w - cert.log_weighted_cover).abs() < 1e-9);
        let MeasureRep::Atomic(atoms) = &cert.measure else { unreachable!() };
        prop_assert!((atoms.iter().map(|a| a.1).sum::<f64>() - 1.0).abs() < 1e-12);
        for ((ball, _), &m) in cert.balls.iter().zip(&cert.masses) {
            let direct = ball_mass(&sh, &cert.measure, &BowenBallSpec::open(ball.center.clone(), ball.n, ball.eps).unwrap()).unwrap();
            prop_assert!((direct - m).abs() < 1e-12);
        }
    }
}
