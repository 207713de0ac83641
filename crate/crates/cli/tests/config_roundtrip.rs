//! Configuration files parse back to exactly what was written.

use ndspressure_cli::config::*;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![any::<f64>().prop_filter("finite", |x| x.is_finite()), -10.0..10.0f64, Just(0.1), Just(1e-300), Just(f64::MAX)]
}

fn alphabet() -> impl Strategy<Value = AlphabetSpec> {
    prop_oneof![
        (2usize..=256).prop_map(|size| AlphabetSpec::Full { size }),
        prop::collection::vec(2usize..=256, 1..5).prop_map(|sizes| AlphabetSpec::Periodic { sizes }),
        (2usize..=256, 2usize..=256).prop_map(|(even, odd)| AlphabetSpec::GeometricBlocks { even, odd }),
    ]
}

fn system() -> impl Strategy<Value = SystemSpec> {
    prop_oneof![
        (alphabet(), 1usize..1000).prop_map(|(alphabet, depth)| SystemSpec::Shift { alphabet, depth }),
        (prop_oneof![Just(MetricSpec::Euclidean), Just(MetricSpec::Scaled), Just(MetricSpec::Bounded)], 1e-6..1.0f64)
            .prop_map(|(metric, delta)| SystemSpec::Doubling { metric, delta }),
        (prop::collection::vec(prop::collection::vec((finite(), finite()), 1..4), 1..3), 1usize..20, finite()).prop_map(|(l, depth, gap)| {
            SystemSpec::Nifs { levels: l.into_iter().map(|v| v.into_iter().map(|(ratio, offset)| ContractionSpec { ratio, offset }).collect()).collect(), depth, gap }
        }),
        (0..=i64::MAX as u64, 2usize..50, 1usize..100, 1usize..4).prop_map(|(seed, levels, points, dim)| SystemSpec::Cloud { seed, levels, points, dim }),
    ]
}

fn target() -> impl Strategy<Value = TargetSpec> {
    prop_oneof![
        Just(TargetSpec::Whole),
        prop::collection::vec(any::<u8>(), 0..6).prop_map(|prefix| TargetSpec::Cylinder { prefix }),
        (finite(), finite()).prop_map(|(lo, hi)| TargetSpec::Interval { lo, hi }),
        prop::collection::vec(0usize..1000, 1..6).prop_map(|indices| TargetSpec::Indices { indices }),
    ]
}

fn estimator() -> impl Strategy<Value = EstimatorSection> {
    (
        prop::collection::vec(1e-6..1.0f64, 1..5),
        1usize..40,
        prop_oneof![Just(SchemeSpec::Extrapolated), Just(SchemeSpec::Truncated), (1usize..10, 10usize..20).prop_map(|(lo, hi)| SchemeSpec::Window { lo, hi })],
        finite(),
        prop_oneof![finite(), Just(f64::INFINITY)],
        finite(),
        1e-15..1e-3f64,
        (-5.0..0.0f64, 0.5..5.0f64),
    )
        .prop_map(|(eps, n_max, scheme, min_ball_points, eps0, plateau_tol, bisection_tol, (a, b))| EstimatorSection {
            eps,
            n_max,
            scheme,
            min_ball_points,
            eps0,
            plateau_tol,
            bisection_tol,
            s_bracket: [a, b],
        })
}

fn bits(text: &str) -> Vec<u64> {
    // Every float literal in the document, as bits, for a bit-level comparison.
    text.split(|c: char| !(c.is_ascii_alphanumeric() || c == '.' || c == '-' || c == '+'))
        .filter_map(|t| t.parse::<f64>().ok())
        .map(f64::to_bits)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn system_files_round_trip(label in "[a-z][a-z0-9_]{0,12}", system in system(), target in target(), estimator in estimator()) {
        let file = SystemFile { label, system, target, estimator };
        let text = to_toml(&file).unwrap();
        let back: SystemFile = from_toml(&text).unwrap();
        prop_assert_eq!(&back, &file);
        let again = to_toml(&back).unwrap();
        prop_assert_eq!(bits(&again), bits(&text));
        prop_assert_eq!(again, text);
    }

    #[test]
    fn potentials_and_measures_round_trip(
        table in prop::collection::vec(prop::collection::vec(finite(), 1..4), 1..4),
        a in finite(),
        b in finite(),
        w in prop::collection::vec((prop::collection::vec(any::<u8>(), 1..5), 1e-6..1.0f64), 1..4),
    ) {
        for p in [
            PotentialSpec::Zero,
            PotentialSpec::Constant { value: a },
            PotentialSpec::Level { values: table[0].clone() },
            PotentialSpec::Symbol { table: table.clone() },
            PotentialSpec::Linear { a, b },
        ] {
            let back: PotentialSpec = from_toml(&to_toml(&p).unwrap()).unwrap();
            prop_assert_eq!(back, p);
        }
        let m = MeasureSpec::Atomic { atoms: w.iter().map(|(word, weight)| AtomSpec { point: PointSpec::Word(word.clone()), weight: *weight }).collect() };
        let back: MeasureSpec = from_toml(&to_toml(&m).unwrap()).unwrap();
        prop_assert_eq!(back, m);
        let m = MeasureSpec::Bernoulli { probs: table.clone() };
        let back: MeasureSpec = from_toml(&to_toml(&m).unwrap()).unwrap();
        prop_assert_eq!(back, m);
    }
}

#[test]
fn defaults_fill_missing_sections() {
    let f: SystemFile = from_toml("label = \"s\"\n[system]\nkind = \"shift\"\ndepth = 8\nalphabet = { kind = \"full\", size = 2 }\n").unwrap();
    assert_eq!(f.target, TargetSpec::Whole);
    assert_eq!(f.estimator, EstimatorSection::default());
    f.validate().unwrap();
}

#[test]
fn unknown_keys_are_rejected() {
    let err = from_toml::<SystemFile>("label = \"s\"\ncolour = 1\n[system]\nkind = \"doubling\"\nmetric = \"euclidean\"\ndelta = 0.01\n").unwrap_err();
    assert!(err.0.contains("colour"), "{err}");
}

#[test]
fn validation_examples() {
    let mut f: SystemFile = from_toml("label = \"d\"\n[system]\nkind = \"doubling\"\nmetric = \"scaled\"\ndelta = 0.01\n").unwrap();
    f.validate().unwrap();
    f.estimator.eps.clear();
    assert!(f.validate().is_err());
    f.estimator.eps = vec![0.1];
    f.estimator.scheme = SchemeSpec::Window { lo: 5, hi: 2 };
    assert!(f.validate().is_err());
    f.estimator.scheme = SchemeSpec::Truncated;
    f.system = SystemSpec::Doubling { metric: MetricSpec::Scaled, delta: 0.0 };
    assert!(f.validate().is_err());
}

#[test]
fn seeds_beyond_toml_integers_are_refused() {
    let mut f = ndspressure_cli::zoo::get("cloud").unwrap();
    f.system = SystemSpec::Cloud { seed: u64::MAX, levels: 4, points: 10, dim: 2 };
    assert!(to_toml(&f).is_err());
}
