use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::math::sqrt;
use crate::nds::{BackendKind, LevelInfo, NdSystem};
use crate::{NdsError, Result};

/// Explicit finite point clouds in `R^d` with index-table maps.
#[derive(Debug, Clone)]
pub struct PointCloudSystem {
    label: String,
    levels: Vec<Vec<Vec<f64>>>,
    maps: Vec<Vec<usize>>,
}

impl PointCloudSystem {
    /// `levels[k]` are the points of `X_k`; `maps[k][i]` is the index of
    /// `T_k(levels[k][i])` in `levels[k + 1]`.
    pub fn new(label: impl Into<String>, levels: Vec<Vec<Vec<f64>>>, maps: Vec<Vec<usize>>) -> Result<Self> {
        if levels.is_empty() || levels.iter().any(|l| l.is_empty()) {
            return Err(NdsError::Empty("point cloud levels must be non-empty"));
        }
        if maps.len() + 1 != levels.len() {
            return Err(NdsError::InvalidSpec("need one map between each pair of consecutive levels".into()));
        }
        for (k, m) in maps.iter().enumerate() {
            if m.len() != levels[k].len() {
                return Err(NdsError::DimensionMismatch { level: k, expected: levels[k].len(), got: m.len() });
            }
            if m.iter().any(|&j| j >= levels[k + 1].len()) {
                return Err(NdsError::OutsideCodomain);
            }
        }
        Ok(Self { label: label.into(), levels, maps })
    }

    /// Uniform random clouds in `[0, 1]^dim` with random maps.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, label: impl Into<String>, n_levels: usize, points: usize, dim: usize) -> Self {
        let levels: Vec<Vec<Vec<f64>>> =
            (0..n_levels).map(|_| (0..points).map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect()).collect()).collect();
        let maps = (1..n_levels).map(|_| (0..points).map(|_| rng.gen_range(0..points)).collect()).collect();
        Self { label: label.into(), levels, maps }
    }

    /// Coordinates of point `i` at level `k`.
    pub fn coords(&self, k: usize, i: usize) -> &[f64] {
        &self.levels[k][i]
    }

    fn check(&self, k: usize) -> Result<()> {
        let max = self.levels.len() - 1;
        if k > max {
            Err(NdsError::LevelOutOfRange { level: k, max })
        } else {
            Ok(())
        }
    }
}

impl NdSystem for PointCloudSystem {
    type Point = usize;

    fn label(&self) -> &str {
        &self.label
    }

    fn backend(&self) -> BackendKind {
        BackendKind::FinitePointCloud
    }

    fn max_level(&self) -> Option<usize> {
        Some(self.levels.len() - 1)
    }

    fn level_info(&self, k: usize) -> Result<LevelInfo> {
        self.check(k)?;
        let pts = &self.levels[k];
        let mut diameter = 0.0f64;
        let mut resolution = f64::INFINITY;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let d = self.metric(k, &i, &j);
                diameter = diameter.max(d);
                if d > 0.0 {
                    resolution = resolution.min(d);
                }
            }
        }
        Ok(LevelInfo {
            kind: BackendKind::FinitePointCloud,
            len: pts.len(),
            diameter,
            resolution: if resolution.is_finite() { resolution } else { 0.0 },
        })
    }

    fn carrier(&self, k: usize) -> Result<Vec<usize>> {
        self.check(k)?;
        Ok((0..self.levels[k].len()).collect())
    }

    fn contains(&self, k: usize, x: &usize) -> bool {
        k < self.levels.len() && *x < self.levels[k].len()
    }

    fn metric(&self, k: usize, x: &usize, y: &usize) -> f64 {
        let (a, b) = (&self.levels[k][*x], &self.levels[k][*y]);
        sqrt(a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum())
    }

    fn step(&self, k: usize, x: &usize) -> Result<usize> {
        self.check(k + 1)?;
        self.maps[k].get(*x).copied().ok_or(NdsError::OutsideCodomain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn random_cloud_is_well_formed() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let sys = PointCloudSystem::random(&mut rng, "cloud", 4, 30, 2);
        for k in 0..3 {
            for x in sys.carrier(k).unwrap() {
                assert!(sys.contains(k + 1, &sys.step(k, &x).unwrap()));
            }
        }
        assert!(sys.step(3, &0).is_err());
    }

    #[test]
    fn rejects_bad_map_table() {
        let levels = alloc::vec![alloc::vec![alloc::vec![0.0]], alloc::vec![alloc::vec![1.0]]];
        assert!(PointCloudSystem::new("bad", levels, alloc::vec![alloc::vec![3]]).is_err());
    }
}
