//! Named reference instances.

use ndspressure::pressure::EstimatorConfig;
use ndspressure::systems::NifsSpec;

use crate::config::{AlphabetSpec, ContractionSpec, EstimatorSection, MetricSpec, SchemeSpec, SystemFile, SystemSpec, TargetSpec};

/// Names accepted by [`get`].
pub const NAMES: [&str; 8] = ["full2", "shift24", "gapblocks", "doubling_de", "doubling_du", "doubling_db", "cantor", "cloud"];

/// Word length of the shift instances; deep enough for the measure checks.
pub const SHIFT_DEPTH: usize = 260;

/// Half-length of the depth window of the gap instance.
pub const GAP_WINDOW: usize = 1 << 13;

/// Radii at which Bowen balls on shifts are exactly cylinders of depth `n`.
pub const SHIFT_EPS: [f64; 3] = [0.99, 0.49, 0.24];

fn shift_estimator() -> EstimatorSection {
    EstimatorSection { eps: SHIFT_EPS.to_vec(), n_max: 12, min_ball_points: 0.0, ..EstimatorSection::default() }
}

fn shift(label: &str, alphabet: AlphabetSpec) -> SystemFile {
    SystemFile {
        label: label.into(),
        system: SystemSpec::Shift { alphabet, depth: SHIFT_DEPTH },
        target: TargetSpec::Whole,
        estimator: shift_estimator(),
    }
}

fn doubling(label: &str, metric: MetricSpec) -> SystemFile {
    SystemFile {
        label: label.into(),
        system: SystemSpec::Doubling { metric, delta: 1e-4 },
        target: TargetSpec::Whole,
        estimator: EstimatorSection::from(&EstimatorConfig::default()),
    }
}

/// The zoo instance called `name`.
pub fn get(name: &str) -> Option<SystemFile> {
    Some(match name {
        "full2" => shift("full2", AlphabetSpec::Full { size: 2 }),
        "shift24" => shift("shift24", AlphabetSpec::Periodic { sizes: vec![2, 4] }),
        "gapblocks" => SystemFile {
            label: "gapblocks".into(),
            system: SystemSpec::Shift { alphabet: AlphabetSpec::GeometricBlocks { even: 2, odd: 4 }, depth: 2 * GAP_WINDOW + 4 },
            target: TargetSpec::Whole,
            estimator: EstimatorSection {
                eps: vec![0.99],
                n_max: 2 * GAP_WINDOW,
                scheme: SchemeSpec::Window { lo: GAP_WINDOW, hi: 2 * GAP_WINDOW },
                min_ball_points: 0.0,
                ..EstimatorSection::default()
            },
        },
        "doubling_de" => doubling("doubling_de", MetricSpec::Euclidean),
        "doubling_du" => doubling("doubling_du", MetricSpec::Scaled),
        "doubling_db" => doubling("doubling_db", MetricSpec::Bounded),
        "cantor" => {
            let spec = NifsSpec::middle_third(12);
            SystemFile {
                label: "cantor".into(),
                system: SystemSpec::Nifs {
                    levels: spec
                        .levels
                        .iter()
                        .map(|l| l.iter().map(|c| ContractionSpec { ratio: c.ratio, offset: c.offset }).collect())
                        .collect(),
                    depth: spec.depth,
                    gap: spec.gap,
                },
                target: TargetSpec::Whole,
                estimator: EstimatorSection::default(),
            }
        }
        "cloud" => SystemFile {
            label: "cloud".into(),
            system: SystemSpec::Cloud { seed: 11, levels: 13, points: 60, dim: 2 },
            target: TargetSpec::Whole,
            estimator: EstimatorSection { eps: vec![0.4, 0.3], n_max: 8, min_ball_points: 2.0, ..EstimatorSection::default() },
        },
        _ => return None,
    })
}

/// Every zoo instance, in [`NAMES`] order.
pub fn all() -> Vec<SystemFile> {
    NAMES.iter().filter_map(|n| get(n)).collect()
}
