use alloc::string::String;
use alloc::vec::Vec;

use crate::math::{pow2, pow2_neg, round};
use crate::nds::{BackendKind, BowenBallSpec, LevelInfo, NdSystem};
use crate::{NdsError, Result};

/// Metric placed on every level `I_k = [0, 2^k]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    /// `d_e(x, y) = |x - y|`.
    Euclidean,
    /// `d_u(x, y) = |x - y| / 2^k`.
    Scaled,
    /// `d_b(x, y) = d_e / (1 + d_e)`.
    Bounded,
}

/// Parameters of the doubling chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublingChainSpec {
    /// Level metric.
    pub metric: MetricKind,
    /// Grid spacing; `1 / delta` must be an integer.
    pub delta: f64,
}

/// `I_k = [0, 2^k]` with `T_k(x) = 2x`, on the grid `δ·Z`.
///
/// Points are integer grid indices, so `T_k` is exact and carries no
/// snapping slack.
#[derive(Debug, Clone)]
pub struct DoublingChain {
    label: String,
    metric: MetricKind,
    per_unit: i64,
}

impl DoublingChain {
    /// Levels beyond this would overflow `i64` grid indices at `δ = 1e-4`.
    pub const MAX_LEVEL: usize = 48;

    /// Build the chain.
    pub fn new(label: impl Into<String>, spec: DoublingChainSpec) -> Result<Self> {
        if !(spec.delta > 0.0 && spec.delta <= 1.0) {
            return Err(NdsError::InvalidSpec("grid spacing must lie in (0, 1]".into()));
        }
        let g = round(1.0 / spec.delta);
        if (g * spec.delta - 1.0).abs() > 1e-9 || g > 1e9 {
            return Err(NdsError::InvalidSpec("1/delta must be an integer of at most 1e9".into()));
        }
        Ok(Self { label: label.into(), metric: spec.metric, per_unit: g as i64 })
    }

    /// Metric kind.
    pub fn metric_kind(&self) -> MetricKind {
        self.metric
    }

    /// Grid spacing `δ`.
    pub fn delta(&self) -> f64 {
        1.0 / self.per_unit as f64
    }

    /// Grid points per unit length.
    pub fn per_unit(&self) -> i64 {
        self.per_unit
    }

    /// Largest grid index at level `k`.
    pub fn top(&self, k: usize) -> i64 {
        self.per_unit << k.min(Self::MAX_LEVEL)
    }

    /// Nearest grid index to `x`.
    pub fn point(&self, x: f64) -> i64 {
        round(x * self.per_unit as f64) as i64
    }

    /// Real coordinate of a grid index.
    pub fn x(&self, i: i64) -> f64 {
        i as f64 / self.per_unit as f64
    }

    /// Every grid index of `[lo, hi]` at level 0.
    pub fn interval(&self, lo: f64, hi: f64) -> Vec<i64> {
        (self.point(lo).max(0)..=self.point(hi).min(self.top(0))).collect()
    }

    fn shape(&self, k: usize, t: f64) -> f64 {
        match self.metric {
            MetricKind::Euclidean => t,
            MetricKind::Scaled => t * pow2_neg(k),
            MetricKind::Bounded => t / (1.0 + t),
        }
    }

    /// Bowen distance as a function of the index gap at level `k`.
    #[inline]
    pub fn gap_distance(&self, k: usize, n: usize, gap: i64) -> f64 {
        let t = gap.unsigned_abs() as f64 / self.per_unit as f64;
        match self.metric {
            MetricKind::Scaled => t * pow2_neg(k),
            _ => self.shape(k + n - 1, t * pow2(n - 1)),
        }
    }

    /// Largest index gap admitted by the ball at level `k` (`-1` if none,
    /// which cannot happen since the center is always admitted).
    pub fn index_radius(&self, k: usize, n: usize, eps: f64, closed: bool) -> i64 {
        let admits = |g: i64| {
            let d = self.gap_distance(k, n, g);
            if closed {
                d <= eps
            } else {
                d < eps
            }
        };
        let limit = self.top(k);
        if admits(limit) {
            return limit;
        }
        // Bracket the threshold by doubling, then bisect on the exact predicate.
        let (mut lo, mut hi) = (0i64, 1i64);
        while admits(hi) {
            lo = hi;
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if admits(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    fn check(&self, k: usize) -> Result<()> {
        if k > Self::MAX_LEVEL {
            Err(NdsError::LevelOutOfRange { level: k, max: Self::MAX_LEVEL })
        } else {
            Ok(())
        }
    }
}

impl NdSystem for DoublingChain {
    type Point = i64;

    fn label(&self) -> &str {
        &self.label
    }

    fn backend(&self) -> BackendKind {
        BackendKind::IntervalGrid
    }

    fn max_level(&self) -> Option<usize> {
        Some(Self::MAX_LEVEL)
    }

    fn level_info(&self, k: usize) -> Result<LevelInfo> {
        self.check(k)?;
        let top = self.top(k);
        Ok(LevelInfo {
            kind: BackendKind::IntervalGrid,
            len: (top + 1) as usize,
            diameter: self.shape(k, pow2(k)),
            resolution: self.shape(k, self.delta()),
        })
    }

    fn carrier(&self, k: usize) -> Result<Vec<i64>> {
        self.check(k)?;
        if self.top(k) > 1 << 24 {
            return Err(NdsError::Unsupported("grid level too large to enumerate"));
        }
        Ok((0..=self.top(k)).collect())
    }

    fn contains(&self, k: usize, x: &i64) -> bool {
        k <= Self::MAX_LEVEL && *x >= 0 && *x <= self.top(k)
    }

    fn metric(&self, k: usize, x: &i64, y: &i64) -> f64 {
        let t = (x - y).unsigned_abs() as f64 / self.per_unit as f64;
        self.shape(k, t)
    }

    fn step(&self, k: usize, x: &i64) -> Result<i64> {
        self.check(k + 1)?;
        if !self.contains(k, x) {
            return Err(NdsError::OutsideCodomain);
        }
        Ok(2 * x)
    }

    fn sample_carrier(&self, k: usize, max: usize) -> Result<Vec<i64>> {
        self.check(k)?;
        let top = self.top(k);
        if max == 0 {
            return Ok(Vec::new());
        }
        if (top as u128) < max as u128 {
            return Ok((0..=top).collect());
        }
        let m = (max.max(2) - 1) as i128;
        Ok((0..=m).map(|i| (i * top as i128 / m) as i64).collect())
    }

    fn sample_pairs(&self, k: usize, max: usize) -> Result<Vec<(i64, i64)>> {
        self.check(k)?;
        let top = self.top(k);
        let bases = self.sample_carrier(k, max.clamp(2, 16))?;
        let mut out = Vec::new();
        for &b in &bases {
            let mut off = 1i64;
            while off <= top {
                if b + off <= top {
                    out.push((b, b + off));
                } else if b - off >= 0 {
                    out.push((b, b - off));
                }
                off *= 2;
            }
        }
        Ok(out)
    }

    fn bowen_distance(&self, k: usize, n: usize, x: &i64, y: &i64) -> Result<f64> {
        self.check(k + n.saturating_sub(1))?;
        Ok(self.gap_distance(k, n.max(1), x - y))
    }

    fn ball_members(&self, spec: &BowenBallSpec<i64>, domain: &[i64]) -> Result<Vec<usize>> {
        self.check(spec.k + spec.n - 1)?;
        let r = self.index_radius(spec.k, spec.n, spec.eps, spec.closed);
        let (lo, hi) = (spec.center - r, spec.center + r);
        if domain.windows(2).all(|w| w[0] < w[1]) {
            let a = domain.partition_point(|&v| v < lo);
            let b = domain.partition_point(|&v| v <= hi);
            return Ok((a..b).collect());
        }
        Ok(domain.iter().enumerate().filter(|(_, &v)| v >= lo && v <= hi).map(|(i, _)| i).collect())
    }

    fn coordinate(&self, _k: usize, x: &i64) -> Option<f64> {
        Some(self.x(*x))
    }
}
