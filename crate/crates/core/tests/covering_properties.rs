//! Separated/spanning bracketing and the disjoint-subfamily lemmas.

use ndspressure::covering::*;
use ndspressure::systems::*;
use ndspressure::{BowenBallSpec, NdSystem};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn bracket<S: NdSystem>(sys: &S, max_n: usize, eps_list: &[f64]) {
    let z = sys.carrier(0).unwrap();
    for n in 1..=max_n {
        for &eps in eps_list {
            let sep = separated_set(sys, &z, n, eps).unwrap();
            assert!(is_separated(sys, &z, &sep, n, eps).unwrap());
            let sep_pts: Vec<S::Point> = sep.iter().map(|&i| z[i].clone()).collect();
            assert!(spans(sys, &z, &sep_pts, n, eps).unwrap(), "maximal separated sets span");
            let wide = spanning_set(sys, &z, n, 2.0 * eps).unwrap();
            let narrow = spanning_set(sys, &z, n, eps / 2.0).unwrap();
            let narrow_pts: Vec<S::Point> = narrow.iter().map(|&i| z[i].clone()).collect();
            assert!(spans(sys, &z, &narrow_pts, n, eps / 2.0).unwrap());
            assert!(sep.len() >= wide.len(), "{} n={n} eps={eps}: sep {} < span(2eps) {}", sys.label(), sep.len(), wide.len());
            assert!(sep.len() <= narrow.len(), "{} n={n} eps={eps}: sep {} > span(eps/2) {}", sys.label(), sep.len(), narrow.len());
        }
    }
}

#[test]
fn bracketing_on_the_zoo() {
    bracket(&NaShift::new("full2", ShiftSpec::full(2), 11).unwrap(), 10, &[0.9, 0.3]);
    bracket(&NaShift::new("s24", ShiftSpec::periodic(&[2, 4]), 7).unwrap(), 6, &[0.9, 0.3]);
    for metric in [MetricKind::Euclidean, MetricKind::Scaled, MetricKind::Bounded] {
        bracket(&DoublingChain::new("dc", DoublingChainSpec { metric, delta: 1.0 / 512.0 }).unwrap(), 10, &[0.2, 0.05]);
    }
    bracket(&NifsRepeller::new("cantor", &NifsSpec::middle_third(10)).unwrap(), 9, &[0.2, 0.05]);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    bracket(&PointCloudSystem::random(&mut rng, "cloud", 11, 60, 2), 10, &[0.3, 0.1]);
}

#[test]
fn separated_set_examples() {
    let sh = NaShift::new("full2", ShiftSpec::full(2), 8).unwrap();
    let z = sh.carrier(0).unwrap();
    assert_eq!(separated_set(&sh, &z, 3, 0.99).unwrap().len(), 8);
    assert_eq!(spanning_set(&sh, &z, 3, 0.99).unwrap().len(), 8);
    assert_eq!(separated_set(&sh, &z, 1, 1.5).unwrap().len(), 1);
    assert_eq!(spanning_set(&sh, &z[3..4], 5, 0.1).unwrap().len(), 1);
    let du = DoublingChain::new("du", DoublingChainSpec { metric: MetricKind::Scaled, delta: 1e-3 }).unwrap();
    let zu = du.carrier(0).unwrap();
    let counts: Vec<usize> = [2, 6, 10].iter().map(|&n| separated_set(&du, &zu, n, 0.05).unwrap().len()).collect();
    assert!(counts.windows(2).all(|w| w[0] == w[1]), "{counts:?}");
    let de = DoublingChain::new("de", DoublingChainSpec { metric: MetricKind::Euclidean, delta: 1e-4 }).unwrap();
    let ze = de.carrier(0).unwrap();
    let c = spanning_set(&de, &ze, 5, 0.05).unwrap().len() as f64;
    let oracle = 32.0 / (2.0 * 0.05);
    assert!(c >= oracle / 4.0 && c <= oracle * 4.0, "{c} vs {oracle}");
}

fn random_family<S: NdSystem, R: Rng>(sys: &S, rng: &mut R, size: usize, common_n: Option<usize>, common_eps: Option<f64>) -> BallFamily<S::Point> {
    let z = sys.carrier(0).unwrap();
    let balls = (0..size)
        .map(|_| {
            let c = z[rng.gen_range(0..z.len())].clone();
            let n = common_n.unwrap_or_else(|| rng.gen_range(1..6));
            let eps = common_eps.unwrap_or_else(|| rng.gen_range(0.02..0.6));
            BowenBallSpec::new(0, c, n, eps, rng.gen_bool(0.5)).unwrap()
        })
        .collect();
    BallFamily::new(balls).unwrap()
}

fn lemma_checks<S: NdSystem>(sys: &S, seed: u64, families: usize) {
    let dom = sys.carrier(0).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..families {
        let size = rng.gen_range(1..12);
        let n = rng.gen_range(1..6);
        let fam = random_family(sys, &mut rng, size, Some(n), None);
        let chosen = disjoint_subfamily_5r(sys, &fam, &dom).unwrap();
        assert!(check_subfamily(sys, &fam, &chosen, 5.0, &dom).unwrap().ok(), "5r on {}", sys.label());
        let eps = rng.gen_range(0.02..0.6);
        let fam = random_family(sys, &mut rng, size, None, Some(eps));
        let chosen = disjoint_subfamily_bowen_3eps(sys, &fam, &dom).unwrap();
        assert!(check_subfamily(sys, &fam, &chosen, 3.0, &dom).unwrap().ok(), "3eps on {}", sys.label());
    }
}

#[test]
fn lemmas_on_random_families_per_backend() {
    lemma_checks(&NaShift::new("full2", ShiftSpec::full(2), 8).unwrap(), 1, 500);
    lemma_checks(&DoublingChain::new("de", DoublingChainSpec { metric: MetricKind::Euclidean, delta: 1.0 / 256.0 }).unwrap(), 2, 500);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    lemma_checks(&PointCloudSystem::random(&mut rng, "cloud", 7, 50, 2), 4, 500);
}

#[test]
fn lemma_examples() {
    let sh = NaShift::new("full2", ShiftSpec::full(2), 7).unwrap();
    let dom = sh.carrier(0).unwrap();
    let single = BallFamily::new(vec![BowenBallSpec::open(dom[5].clone(), 3, 0.4).unwrap()]).unwrap();
    assert_eq!(disjoint_subfamily_bowen_3eps(&sh, &single, &dom).unwrap(), vec![0]);
    let disjoint = BallFamily::new((0..4).map(|i| BowenBallSpec::open(dom[i * 32].clone(), 2, 0.9).unwrap()).collect()).unwrap();
    assert_eq!(disjoint_subfamily_5r(&sh, &disjoint, &dom).unwrap(), vec![0, 1, 2, 3]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn selections_are_disjoint_and_cover(seed in any::<u64>()) {
        let sh = NaShift::new("p23", ShiftSpec::periodic(&[2, 3]), 6).unwrap();
        lemma_checks(&sh, seed, 4);
    }
}
