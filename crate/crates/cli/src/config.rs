//! TOML configuration files for systems, potentials and measures.
//!
//! A system file names one instance, its target set and the estimator
//! settings:
//!
//! ```toml
//! label = "shift24"
//!
//! [system]
//! kind = "shift"
//! depth = 16
//! alphabet = { kind = "periodic", sizes = [2, 4] }
//!
//! [estimator]
//! eps = [0.99, 0.49, 0.24]
//! n_max = 12
//! min_ball_points = 0.0
//! ```
//!
//! Potential files hold a single tagged table (`kind = "zero" | "constant" |
//! "level" | "symbol" | "linear"`), measure files one of `kind = "bernoulli"
//! | "atomic"`. Every file is written back by [`to_toml`] in a form that
//! parses to an identical value, floats included.

use std::fmt;
use std::path::Path;

use ndspressure::pressure::{DepthScheme, EstimatorConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// A malformed or unreadable configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Alphabet sequence of a nonautonomous shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlphabetSpec {
    /// `m_k = size`.
    Full { size: usize },
    /// `m_k = sizes[k mod len]`.
    Periodic { sizes: Vec<usize> },
    /// Blocks of lengths `1, 2, 4, ...` alternating between two alphabets.
    GeometricBlocks { even: usize, odd: usize },
}

/// Level metric of the doubling chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricSpec {
    /// `|x - y|`.
    Euclidean,
    /// `|x - y| / 2^k`.
    Scaled,
    /// `t / (1 + t)` with `t = |x - y|`.
    Bounded,
}

/// One affine branch `x ↦ ratio·x + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractionSpec {
    /// Ratio in `(0, 1)`.
    pub ratio: f64,
    /// Left end of the image.
    pub offset: f64,
}

/// The dynamical system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    /// Full nonautonomous shift truncated at word length `depth`.
    Shift { alphabet: AlphabetSpec, depth: usize },
    /// `T_k(x) = 2x` on `[0, 2^k]`, on a grid of spacing `delta`.
    Doubling { metric: MetricSpec, delta: f64 },
    /// Repeller of a nonautonomous IFS; `levels` repeat periodically.
    Nifs { levels: Vec<Vec<ContractionSpec>>, depth: usize, gap: f64 },
    /// Random point clouds with random maps.
    Cloud { seed: u64, levels: usize, points: usize, dim: usize },
}

/// The set `Z` at level 0.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    /// The whole level-0 carrier.
    #[default]
    Whole,
    /// Words starting with `prefix` (shifts only).
    Cylinder { prefix: Vec<u8> },
    /// Points with coordinate in `[lo, hi]` (interval systems only).
    Interval { lo: f64, hi: f64 },
    /// Carrier indices.
    Indices { indices: Vec<usize> },
}

/// How depths are chosen at each radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SchemeSpec {
    /// Two-depth extrapolation at the resolved depth.
    #[default]
    Extrapolated,
    /// Depths from the resolved depth to `n_max`.
    Truncated,
    /// A fixed depth window.
    Window { lo: usize, hi: usize },
}

/// Estimator settings; missing keys take the library defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorSection {
    /// Radii, largest first.
    pub eps: Vec<f64>,
    /// Largest depth.
    pub n_max: usize,
    /// Depth scheme.
    pub scheme: SchemeSpec,
    /// Minimum average number of target points per ball.
    pub min_ball_points: f64,
    /// Radii above this are skipped.
    pub eps0: f64,
    /// Plateau tolerance between the last two radii.
    pub plateau_tol: f64,
    /// Bisection tolerance.
    pub bisection_tol: f64,
    /// Initial bisection bracket.
    pub s_bracket: [f64; 2],
}

impl Default for EstimatorSection {
    fn default() -> Self {
        Self::from(&EstimatorConfig::default())
    }
}

impl From<&EstimatorConfig> for EstimatorSection {
    fn from(c: &EstimatorConfig) -> Self {
        Self {
            eps: c.eps_schedule.clone(),
            n_max: c.n_max,
            scheme: match c.scheme {
                DepthScheme::Extrapolated => SchemeSpec::Extrapolated,
                DepthScheme::Truncated => SchemeSpec::Truncated,
                DepthScheme::Window { lo, hi } => SchemeSpec::Window { lo, hi },
            },
            min_ball_points: c.min_ball_points,
            eps0: c.eps0,
            plateau_tol: c.plateau_tol,
            bisection_tol: c.bisection_tol,
            s_bracket: [c.s_bracket.0, c.s_bracket.1],
        }
    }
}

impl EstimatorSection {
    /// The library configuration.
    pub fn to_config(&self) -> EstimatorConfig {
        EstimatorConfig {
            eps_schedule: self.eps.clone(),
            n_max: self.n_max,
            scheme: match self.scheme {
                SchemeSpec::Extrapolated => DepthScheme::Extrapolated,
                SchemeSpec::Truncated => DepthScheme::Truncated,
                SchemeSpec::Window { lo, hi } => DepthScheme::Window { lo, hi },
            },
            s_bracket: (self.s_bracket[0], self.s_bracket[1]),
            bisection_tol: self.bisection_tol,
            plateau_tol: self.plateau_tol,
            min_ball_points: self.min_ball_points,
            eps0: self.eps0,
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.eps.is_empty() || self.eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(ConfigError("estimator.eps must be a non-empty list of positive radii".into()));
        }
        if self.n_max == 0 {
            return Err(ConfigError("estimator.n_max must be at least 1".into()));
        }
        if let SchemeSpec::Window { lo, hi } = self.scheme {
            if lo == 0 || lo > hi {
                return Err(ConfigError("estimator.scheme window needs 1 <= lo <= hi".into()));
            }
        }
        if !(self.s_bracket[0] < self.s_bracket[1]) || !(self.bisection_tol > 0.0) {
            return Err(ConfigError("estimator.s_bracket must be increasing and bisection_tol positive".into()));
        }
        Ok(())
    }
}

/// A system file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    /// Instance label.
    pub label: String,
    /// The system.
    pub system: SystemSpec,
    /// Target set (defaults to the whole carrier).
    #[serde(default)]
    pub target: TargetSpec,
    /// Estimator settings.
    #[serde(default)]
    pub estimator: EstimatorSection,
}

impl SystemFile {
    /// Structural checks that do not need the system to be built.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.estimator.validate()?;
        match &self.system {
            SystemSpec::Shift { alphabet, depth } => {
                let sizes: Vec<usize> = match alphabet {
                    AlphabetSpec::Full { size } => vec![*size],
                    AlphabetSpec::Periodic { sizes } => sizes.clone(),
                    AlphabetSpec::GeometricBlocks { even, odd } => vec![*even, *odd],
                };
                if sizes.is_empty() || sizes.iter().any(|&m| !(2..=256).contains(&m)) {
                    return Err(ConfigError("shift alphabets must have between 2 and 256 symbols".into()));
                }
                if *depth == 0 {
                    return Err(ConfigError("shift depth must be positive".into()));
                }
            }
            SystemSpec::Doubling { delta, .. } => {
                if !(*delta > 0.0 && *delta <= 1.0) {
                    return Err(ConfigError("doubling delta must lie in (0, 1]".into()));
                }
            }
            SystemSpec::Nifs { levels, depth, .. } => {
                if levels.is_empty() || *depth == 0 {
                    return Err(ConfigError("nifs needs at least one level and a positive depth".into()));
                }
            }
            SystemSpec::Cloud { levels, points, dim, .. } => {
                if *levels < 2 || *points == 0 || *dim == 0 {
                    return Err(ConfigError("cloud needs at least two levels, one point and one dimension".into()));
                }
            }
        }
        Ok(())
    }
}

/// A potential sequence `f_k`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `f = 0`.
    #[default]
    Zero,
    /// `f_k = value`.
    Constant { value: f64 },
    /// `f_k = values[k mod len]`.
    Level { values: Vec<f64> },
    /// `f_k(x) = table[k mod len][x_0]` on symbolic points.
    Symbol { table: Vec<Vec<f64>> },
    /// `f_k(x) = a + b·u` with `u ∈ [0, 1]` the normalized coordinate.
    Linear { a: f64, b: f64 },
}

/// A point of level 0, in the representation of its backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointSpec {
    /// A shift word or an IFS address.
    Word(Vec<u8>),
    /// A real coordinate, snapped to the grid.
    X(f64),
    /// A carrier index.
    Index(usize),
}

/// One weighted atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    /// The point.
    pub point: PointSpec,
    /// Its weight.
    pub weight: f64,
}

/// A probability measure on level 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    /// Product measure; rows repeat periodically up to the shift depth.
    Bernoulli { probs: Vec<Vec<f64>> },
    /// Finitely many atoms.
    Atomic { atoms: Vec<AtomSpec> },
}

/// Parse a TOML document.
pub fn from_toml<T: DeserializeOwned>(text: &str) -> Result<T, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError(e.to_string()))
}

/// Render a value as TOML.
pub fn to_toml<T: Serialize>(value: &T) -> Result<String, ConfigError> {
    toml::to_string(value).map_err(|e| ConfigError(e.to_string()))
}

/// Read and parse a file.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    from_toml(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
}

/// Read, parse and validate a system file.
pub fn load_system(path: &Path) -> Result<SystemFile, ConfigError> {
    let f: SystemFile = load(path)?;
    f.validate()?;
    Ok(f)
}
