use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::math::{abs, floor, round};
use crate::nds::{BackendKind, LevelInfo, NdSystem};
use crate::{NdsError, Result};

/// Equally spaced points `lo, lo + δ, ..., hi` on an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalGrid {
    /// Left endpoint.
    pub lo: f64,
    /// Right endpoint.
    pub hi: f64,
    /// Spacing.
    pub delta: f64,
}

impl IntervalGrid {
    /// Validated constructor.
    pub fn new(lo: f64, hi: f64, delta: f64) -> Result<Self> {
        if !(hi > lo) || !(delta > 0.0) || !lo.is_finite() || !hi.is_finite() {
            return Err(NdsError::InvalidSpec("interval grid needs lo < hi and delta > 0".into()));
        }
        Ok(Self { lo, hi, delta })
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        floor((self.hi - self.lo) / self.delta + 1e-9) as usize + 1
    }

    /// Always false: a grid holds at least its left endpoint.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of grid index `i`.
    pub fn point(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.delta
    }

    /// Nearest grid index to `x` (clamped) and the snapping error.
    pub fn snap(&self, x: f64) -> (usize, f64) {
        let raw = round((x - self.lo) / self.delta);
        let i = raw.clamp(0.0, (self.len() - 1) as f64) as usize;
        (i, abs(self.point(i) - x))
    }
}

type GridFn = Arc<dyn Fn(usize) -> IntervalGrid + Send + Sync>;
type MapFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

/// A system of interval grids with real maps snapped to the next grid.
///
/// Each application of `T_k` moves the exact image by at most half a
/// level-`k+1` spacing; that bound is reported by `step_slack`.
#[derive(Clone)]
pub struct GridMapSystem {
    label: String,
    grids: GridFn,
    map: MapFn,
    max_level: usize,
}

impl core::fmt::Debug for GridMapSystem {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("GridMapSystem").field("label", &self.label).field("max_level", &self.max_level).finish()
    }
}

impl GridMapSystem {
    /// Build from level grids and real maps.
    pub fn new(
        label: impl Into<String>,
        max_level: usize,
        grids: impl Fn(usize) -> IntervalGrid + Send + Sync + 'static,
        map: impl Fn(usize, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), grids: Arc::new(grids), map: Arc::new(map), max_level }
    }

    /// The level-`k` grid.
    pub fn grid(&self, k: usize) -> IntervalGrid {
        (self.grids)(k)
    }

    fn check(&self, k: usize) -> Result<()> {
        if k > self.max_level {
            Err(NdsError::LevelOutOfRange { level: k, max: self.max_level })
        } else {
            Ok(())
        }
    }
}

impl NdSystem for GridMapSystem {
    type Point = usize;

    fn label(&self) -> &str {
        &self.label
    }

    fn backend(&self) -> BackendKind {
        BackendKind::IntervalGrid
    }

    fn max_level(&self) -> Option<usize> {
        Some(self.max_level)
    }

    fn level_info(&self, k: usize) -> Result<LevelInfo> {
        self.check(k)?;
        let g = self.grid(k);
        Ok(LevelInfo { kind: BackendKind::IntervalGrid, len: g.len(), diameter: g.hi - g.lo, resolution: g.delta })
    }

    fn carrier(&self, k: usize) -> Result<Vec<usize>> {
        self.check(k)?;
        Ok((0..self.grid(k).len()).collect())
    }

    fn contains(&self, k: usize, x: &usize) -> bool {
        k <= self.max_level && *x < self.grid(k).len()
    }

    fn metric(&self, k: usize, x: &usize, y: &usize) -> f64 {
        let g = self.grid(k);
        abs(g.point(*x) - g.point(*y))
    }

    fn step(&self, k: usize, x: &usize) -> Result<usize> {
        self.check(k + 1)?;
        let y = (self.map)(k, self.grid(k).point(*x));
        Ok(self.grid(k + 1).snap(y).0)
    }

    fn step_slack(&self, k: usize) -> f64 {
        self.grid(k + 1).delta / 2.0
    }

    fn coordinate(&self, k: usize, x: &usize) -> Option<f64> {
        Some(self.grid(k).point(*x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapping_error_is_at_most_half_spacing() {
        let g = IntervalGrid::new(0.0, 1.0, 0.01).unwrap();
        assert_eq!(g.len(), 101);
        for i in 0..1000 {
            let x = i as f64 / 999.0;
            let (_, err) = g.snap(x);
            assert!(err <= 0.005 + 1e-12);
        }
    }

    #[test]
    fn tent_like_map_stays_on_grid() {
        let sys = GridMapSystem::new("rot", 5, |_| IntervalGrid { lo: 0.0, hi: 1.0, delta: 0.001 }, |_, x| (x * 1.7) % 1.0);
        for x in sys.carrier(0).unwrap() {
            let y = sys.step(0, &x).unwrap();
            assert!(sys.contains(1, &y));
        }
        assert_eq!(sys.step_slack(0), 0.0005);
    }
}
