use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::math::{abs, floor, ln};
use crate::nds::{BackendKind, LevelInfo, NdSystem};
use crate::{NdsError, Result};

/// Affine contraction `S(x) = ratio·x + offset` of `[0, 1]` onto
/// `[offset, offset + ratio]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contraction {
    /// Contraction ratio in `(0, 1)`.
    pub ratio: f64,
    /// Left endpoint of the image.
    pub offset: f64,
}

impl Contraction {
    /// `S(x)`.
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        self.ratio * x + self.offset
    }

    /// `S^{-1}(y)`.
    #[inline]
    pub fn invert(&self, y: f64) -> f64 {
        (y - self.offset) / self.ratio
    }
}

/// Level-dependent contractions, repeated periodically past the list end.
#[derive(Debug, Clone, PartialEq)]
pub struct NifsSpec {
    /// `levels[k]` are the branches `S_{k,i}`.
    pub levels: Vec<Vec<Contraction>>,
    /// Address depth `p` of the attractor net.
    pub depth: usize,
    /// Minimum gap between images.
    pub gap: f64,
}

impl NifsSpec {
    /// The middle-third Cantor system at every level.
    pub fn middle_third(depth: usize) -> Self {
        let third = 1.0 / 3.0;
        Self {
            levels: vec![vec![Contraction { ratio: third, offset: 0.0 }, Contraction { ratio: third, offset: 2.0 * third }]],
            depth,
            gap: 1e-9,
        }
    }
}

/// A point of the repeller: its address from the current level on, and the
/// coordinates of all its forward images (`coords[j]` lives at level `k + j`).
#[derive(Debug, Clone, PartialEq)]
pub struct NifsPoint {
    /// Address `(a_k, ..., a_{p-1})`.
    pub addr: Vec<u8>,
    /// `coords[j]` is the coordinate of `T^j x`; the last entry is the base point 0.
    pub coords: Vec<f64>,
}

impl NifsPoint {
    /// Coordinate at the current level.
    pub fn x(&self) -> f64 {
        self.coords[0]
    }
}

/// The repeller of a nonautonomous IFS, with branch inverses as maps.
///
/// Level `k` is the net of `T^k F` made of the points
/// `S_{k,a_k} ∘ ... ∘ S_{p-1,a_{p-1}}(0)`; `T_k` inverts the first branch.
#[derive(Debug, Clone)]
pub struct NifsRepeller {
    label: String,
    maps: Vec<Vec<Contraction>>,
}

impl NifsRepeller {
    /// Build the repeller, checking that images are disjoint.
    pub fn new(label: impl Into<String>, spec: &NifsSpec) -> Result<Self> {
        if spec.levels.is_empty() || spec.levels.iter().any(|l| l.is_empty()) {
            return Err(NdsError::InvalidSpec("every level needs at least one contraction".into()));
        }
        let mut maps = Vec::with_capacity(spec.depth);
        for k in 0..spec.depth {
            let level = &spec.levels[k % spec.levels.len()];
            if level.len() > 256 {
                return Err(NdsError::InvalidSpec("at most 256 branches per level".into()));
            }
            for c in level {
                if !(c.ratio > 0.0 && c.ratio < 1.0) {
                    return Err(NdsError::InvalidSpec(alloc::format!("ratio {} at level {k} is outside (0, 1)", c.ratio)));
                }
                if c.offset < -1e-12 || c.offset + c.ratio > 1.0 + 1e-12 {
                    return Err(NdsError::InvalidSpec(alloc::format!("image at level {k} leaves [0, 1]")));
                }
            }
            let mut order: Vec<usize> = (0..level.len()).collect();
            order.sort_by(|&a, &b| level[a].offset.total_cmp(&level[b].offset));
            for w in order.windows(2) {
                let (a, b) = (&level[w[0]], &level[w[1]]);
                if b.offset - (a.offset + a.ratio) < spec.gap {
                    return Err(NdsError::Overlap { level: k, first: w[0].min(w[1]), second: w[0].max(w[1]) });
                }
            }
            maps.push(level.clone());
        }
        Ok(Self { label: label.into(), maps })
    }

    /// Address depth `p`.
    pub fn depth(&self) -> usize {
        self.maps.len()
    }

    /// Branches at level `k`.
    pub fn branches(&self, k: usize) -> &[Contraction] {
        &self.maps[k]
    }

    fn check(&self, k: usize) -> Result<()> {
        if k > self.depth() {
            Err(NdsError::LevelOutOfRange { level: k, max: self.depth() })
        } else {
            Ok(())
        }
    }

    /// The point with the given level-`k` address.
    pub fn point(&self, k: usize, addr: &[u8]) -> Result<NifsPoint> {
        self.check(k)?;
        if addr.len() != self.depth() - k {
            return Err(NdsError::InvalidSpec("address length must equal p - k".into()));
        }
        let mut coords = vec![0.0; addr.len() + 1];
        for j in (0..addr.len()).rev() {
            let branches = &self.maps[k + j];
            let a = addr[j] as usize;
            if a >= branches.len() {
                return Err(NdsError::OutsideCodomain);
            }
            coords[j] = branches[a].apply(coords[j + 1]);
        }
        Ok(NifsPoint { addr: addr.to_vec(), coords })
    }

    /// Midpoints of the depth-`p` cylinder intervals (sorted) and the
    /// certified radius `Π_k max_i r_{k,i}` within which they approximate `F`.
    /// Midpoints keep the net off the endpoints, which for self-similar sets
    /// sit exactly on box-counting mesh lines.
    pub fn attractor_net(&self) -> Result<(Vec<f64>, f64)> {
        let pts = self.carrier(0)?;
        let radius = self.maps.iter().map(|l| l.iter().map(|c| c.ratio).fold(0.0, f64::max)).product();
        let mid = |addr: &[u8]| addr.iter().enumerate().rev().fold(0.5, |y, (j, &a)| self.maps[j][a as usize].apply(y));
        let mut xs: Vec<f64> = pts.iter().map(|p| mid(&p.addr)).collect();
        xs.sort_by(f64::total_cmp);
        Ok((xs, radius))
    }
}

impl NdSystem for NifsRepeller {
    type Point = NifsPoint;

    fn label(&self) -> &str {
        &self.label
    }

    fn backend(&self) -> BackendKind {
        BackendKind::FinitePointCloud
    }

    fn max_level(&self) -> Option<usize> {
        Some(self.depth())
    }

    fn level_info(&self, k: usize) -> Result<LevelInfo> {
        self.check(k)?;
        let len = self.maps[k..].iter().fold(1usize, |a, l| a.saturating_mul(l.len()));
        let resolution = self.maps[k..].iter().map(|l| l.iter().map(|c| c.ratio).fold(0.0, f64::max)).product();
        Ok(LevelInfo { kind: BackendKind::FinitePointCloud, len, diameter: 1.0, resolution })
    }

    fn carrier(&self, k: usize) -> Result<Vec<NifsPoint>> {
        self.check(k)?;
        let len = self.depth() - k;
        let count = self.maps[k..].iter().fold(1u128, |a, l| a.saturating_mul(l.len() as u128));
        if count > 1 << 22 {
            return Err(NdsError::Unsupported("repeller net too large to enumerate"));
        }
        let mut addrs: Vec<Vec<u8>> = vec![Vec::new()];
        for j in 0..len {
            let m = self.maps[k + j].len();
            addrs = addrs
                .into_iter()
                .flat_map(|a| {
                    (0..m).map(move |s| {
                        let mut b = a.clone();
                        b.push(s as u8);
                        b
                    })
                })
                .collect();
        }
        let mut pts = addrs.iter().map(|a| self.point(k, a)).collect::<Result<Vec<_>>>()?;
        pts.sort_by(|a, b| a.x().total_cmp(&b.x()));
        Ok(pts)
    }

    fn contains(&self, k: usize, x: &NifsPoint) -> bool {
        match self.point(k, &x.addr) {
            Ok(p) => p.coords.iter().zip(&x.coords).all(|(a, b)| abs(a - b) <= 1e-12),
            Err(_) => false,
        }
    }

    fn metric(&self, _k: usize, x: &NifsPoint, y: &NifsPoint) -> f64 {
        abs(x.x() - y.x())
    }

    fn step(&self, k: usize, x: &NifsPoint) -> Result<NifsPoint> {
        self.check(k + 1)?;
        if x.addr.is_empty() {
            return Err(NdsError::LevelOutOfRange { level: k + 1, max: self.depth() });
        }
        Ok(NifsPoint { addr: x.addr[1..].to_vec(), coords: x.coords[1..].to_vec() })
    }

    fn bowen_distance(&self, k: usize, n: usize, x: &NifsPoint, y: &NifsPoint) -> Result<f64> {
        self.check(k + n.saturating_sub(1))?;
        Ok(x.coords.iter().zip(&y.coords).take(n.max(1)).map(|(a, b)| abs(a - b)).fold(0.0, f64::max))
    }

    fn coordinate(&self, _k: usize, x: &NifsPoint) -> Option<f64> {
        Some(x.x())
    }
}

/// Result of a box-counting regression.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDimension {
    /// Least-squares slope of `log N(r)` against `log(1/r)`.
    pub dimension: f64,
    /// `(log(1/r), log N(r))` samples.
    pub samples: Vec<(f64, f64)>,
}

/// Box-counting dimension of a finite set of reals over the given box sizes.
pub fn box_counting_dimension(points: &[f64], scales: &[f64]) -> Result<BoxDimension> {
    if points.is_empty() {
        return Err(NdsError::Empty("box counting needs points"));
    }
    if scales.len() < 2 {
        return Err(NdsError::InvalidSpec("box counting needs at least two scales".into()));
    }
    let mut samples = Vec::with_capacity(scales.len());
    for &r in scales {
        let mut boxes: Vec<i64> = points.iter().map(|&x| floor(x / r) as i64).collect();
        boxes.sort_unstable();
        boxes.dedup();
        samples.push((-ln(r), ln(boxes.len() as f64)));
    }
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxy: f64 = samples.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum();
    let sxx: f64 = samples.iter().map(|s| (s.0 - mx) * (s.0 - mx)).sum();
    Ok(BoxDimension { dimension: sxy / sxx, samples })
}
