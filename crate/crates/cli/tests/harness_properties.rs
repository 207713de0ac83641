//! Harness building blocks against independent computations.

use ndspressure::measures::MeasureRep;
use ndspressure::systems::{NaShift, ShiftSpec, Word};
use ndspressure::NdSystem;
use ndspressure_cli::harness::*;
use proptest::prelude::*;

#[test]
fn report_builders() {
    let r = CheckReport::new("s", "c", "i", "q").near(1.0, 1.05, 0.1);
    assert!(r.pass && (r.lower, r.upper) == (1.05 - 0.1, 1.05 + 0.1));
    assert!(!CheckReport::new("s", "c", "i", "q").at_most(1.2, 1.0, 0.1).pass);
    assert!(CheckReport::new("s", "c", "i", "q").at_least(0.95, 1.0, 0.1).pass);
    assert!(!CheckReport::new("s", "c", "i", "q").above(1.0, 1.0).pass);
    let nan = CheckReport::new("s", "c", "i", "q").near(f64::NAN, 0.0, 1.0);
    assert!(nan.failed());
    assert!(!nan.clone().informative().failed());
    assert!(nan.same_outcome(&nan.clone().timed(std::time::Instant::now())));
}

#[test]
fn block_oracle_matches_long_windows() {
    let (lo, hi) = block_oracle(2, 4);
    let ln2 = std::f64::consts::LN_2;
    assert!((lo - 4.0 / 3.0 * ln2).abs() < 1e-15 && (hi - 5.0 / 3.0 * ln2).abs() < 1e-15);
    // Block b covers positions [2^b - 1, 2^{b+1} - 1).
    let size = |k: usize| if (usize::BITS - 1 - (k + 1).leading_zeros()).is_multiple_of(2) { 2 } else { 4 };
    let (wlo, whi) = count_ratio_range(size, 1 << 18, 1 << 19);
    assert!((wlo - lo).abs() < 1e-4 && (whi - hi).abs() < 1e-4, "{wlo} {whi}");
    let (a, b) = count_ratio_range(|_| 3, 5, 9);
    assert!((a - 3f64.ln()).abs() < 1e-15 && (b - 3f64.ln()).abs() < 1e-15);
}

#[test]
fn tilts_on_two_symbols_are_the_probability_grid() {
    let sh = NaShift::new("full2", ShiftSpec::full(2), 3).unwrap();
    for (i, &t) in TILTS.iter().enumerate() {
        let MeasureRep::Bernoulli(b) = tilted_bernoulli(&sh, t).unwrap() else { panic!() };
        let p0 = b.marginal(0)[0];
        assert!((p0 - 0.1 * (i + 1) as f64).abs() < 1e-12, "tilt {t}: {p0}");
    }
}

#[test]
fn exhaustive_cover_examples() {
    let members = vec![vec![0, 1], vec![1, 2], vec![2], vec![0]];
    let w = [1.0f64, 1.0, 0.25, 0.25].map(f64::ln);
    // {0,1} + {2} = 1.25 beats {0} + {1,2} = 1.25 tie, and beats two unit balls.
    assert!((exhaustive_min_cover(&members, &w, 3) - 1.25f64.ln()).abs() < 1e-15);
    assert_eq!(exhaustive_min_cover(&[vec![0]], &[0.0], 2), f64::INFINITY);
}

#[test]
fn commutation_defect_sees_a_wrong_map() {
    let sh = NaShift::new("full2", ShiftSpec::full(2), 6).unwrap();
    let good = ConjugacyMap::<NaShift, NaShift>::new(|k, x: &Word| sh.relabel(k, x, &|_, a| 1 - a), true).with_inverse(|k, x: &Word| sh.relabel(k, x, &|_, a| 1 - a));
    assert_eq!(good.commutation_defect(&sh, &sh, 4, 64).unwrap(), 0.0);
    // Flipping only at even levels does not commute with the shift... unless
    // applied by absolute level, which relabel does; a level-blind flip of
    // the first symbol does not.
    let bad = ConjugacyMap::<NaShift, NaShift>::new(
        |_, x: &Word| {
            let mut w = x.clone();
            w.0[0] = 1 - w.0[0];
            w
        },
        false,
    );
    assert!(bad.commutation_defect(&sh, &sh, 4, 64).unwrap() > 0.0);
}

#[test]
fn lemma_checks_pass_on_a_small_shift() {
    let sh = NaShift::new("p23", ShiftSpec::periodic(&[2, 3]), 5).unwrap();
    assert_eq!(sh.carrier(0).unwrap().len(), 72);
    for r in lemma_checks(&sh, 50, 1).unwrap() {
        assert!(r.pass, "{r}");
    }
}

#[test]
fn suites_are_reproducible() {
    let cfg = HarnessConfig { families: 40, weighted_instances: 6, ..HarnessConfig::default() };
    let a = Harness::new(cfg.clone()).unwrap();
    let b = Harness::new(cfg).unwrap();
    for suite in [Suite::Covering, Suite::Weighted, Suite::Invariance] {
        let ra = a.run(suite).unwrap();
        let rb = b.run(suite).unwrap();
        assert_eq!(ra.len(), rb.len());
        for (x, y) in ra.iter().zip(&rb) {
            assert!(x.same_outcome(y), "{x}\n{y}");
        }
    }
}

#[test]
fn suite_names_parse() {
    for s in Suite::ALL {
        assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
    }
    assert!("everything".parse::<Suite>().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn weighted_instances_satisfy_the_sandwich(seed in any::<u64>(), index in 0u64..1000) {
        for r in weighted_instance(seed, index).unwrap() {
            prop_assert!(r.pass, "{}", r);
        }
    }
}
