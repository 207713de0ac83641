use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math::{ln, pow2_neg};
use crate::measures::{BernoulliSeq, MeasureRep};
use crate::nds::{BackendKind, BowenBallSpec, LevelInfo, NdSystem, PotentialSeq, PotentialShape};
use crate::{NdsError, Result};

/// Largest carrier `carrier()` will enumerate.
const MAX_ENUMERATION: u128 = 1 << 22;

/// A finite word; a level-`k` point of a truncated shift has length `D - k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<u8>);

impl Word {
    /// Index of the first differing symbol, `None` when equal.
    pub fn first_difference(&self, other: &Word) -> Option<usize> {
        let n = self.0.len().min(other.0.len());
        (0..n).find(|&i| self.0[i] != other.0[i]).or(if self.0.len() == other.0.len() { None } else { Some(n) })
    }
}

/// Alphabet sizes `m_k` along the levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlphabetSeq {
    /// `m_k = sizes[k mod len]`.
    Periodic(Vec<usize>),
    /// Blocks of lengths `1, 2, 4, 8, ...`; block `i` uses `even` when `i`
    /// is even and `odd` otherwise.
    GeometricBlocks {
        /// Alphabet on even-indexed blocks.
        even: usize,
        /// Alphabet on odd-indexed blocks.
        odd: usize,
    },
}

impl AlphabetSeq {
    /// `m_k`.
    pub fn size(&self, k: usize) -> usize {
        match self {
            AlphabetSeq::Periodic(v) => v[k % v.len()],
            AlphabetSeq::GeometricBlocks { even, odd } => {
                let block = usize::BITS - 1 - (k + 1).leading_zeros();
                if block.is_multiple_of(2) {
                    *even
                } else {
                    *odd
                }
            }
        }
    }
}

/// Specification of a nonautonomous full shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftSpec {
    /// Alphabet sizes, each in `2..=256`.
    pub alphabet: AlphabetSeq,
}

impl ShiftSpec {
    /// Constant alphabet.
    pub fn full(m: usize) -> Self {
        Self { alphabet: AlphabetSeq::Periodic(vec![m]) }
    }

    /// Periodic alphabet pattern.
    pub fn periodic(sizes: &[usize]) -> Self {
        Self { alphabet: AlphabetSeq::Periodic(sizes.to_vec()) }
    }

    fn validate(&self, depth: usize) -> Result<()> {
        if let AlphabetSeq::Periodic(v) = &self.alphabet {
            if v.is_empty() {
                return Err(NdsError::InvalidSpec("empty alphabet pattern".into()));
            }
        }
        for k in 0..depth {
            let m = self.alphabet.size(k);
            if !(2..=256).contains(&m) {
                return Err(NdsError::InvalidSpec(alloc::format!("alphabet size {m} at level {k} is outside 2..=256")));
            }
        }
        Ok(())
    }
}

/// The nonautonomous full shift truncated at word depth `D`.
///
/// Level `k` consists of all words `(a_k, ..., a_{D-1})` with `a_j < m_j`;
/// the map drops the first symbol. The level metric is
/// `d(x, y) = 2^{-i}` where `i` is the first differing index.
#[derive(Debug, Clone)]
pub struct NaShift {
    label: String,
    spec: ShiftSpec,
    sizes: Vec<usize>,
}

impl NaShift {
    /// Build the shift truncated at depth `depth`.
    pub fn new(label: impl Into<String>, spec: ShiftSpec, depth: usize) -> Result<Self> {
        spec.validate(depth)?;
        let sizes = (0..depth).map(|k| spec.alphabet.size(k)).collect();
        Ok(Self { label: label.into(), spec, sizes })
    }

    /// The generating spec.
    pub fn spec(&self) -> &ShiftSpec {
        &self.spec
    }

    /// Truncation depth `D`.
    pub fn depth(&self) -> usize {
        self.sizes.len()
    }

    /// Alphabet size at position `k`.
    pub fn alphabet(&self, k: usize) -> usize {
        self.sizes[k]
    }

    /// `Σ_{j<n} log m_{k+j}`.
    pub fn log_count(&self, k: usize, n: usize) -> f64 {
        self.sizes[k..k + n].iter().map(|&m| ln(m as f64)).sum()
    }

    fn count(&self, k: usize) -> u128 {
        let mut c: u128 = 1;
        for &m in &self.sizes[k..] {
            c = c.saturating_mul(m as u128);
        }
        c
    }

    /// The word at lexicographic rank `idx` of level `k`.
    pub fn word_from_index(&self, k: usize, mut idx: u128) -> Word {
        let len = self.depth() - k;
        let mut w = vec![0u8; len];
        for j in (0..len).rev() {
            let m = self.sizes[k + j] as u128;
            w[j] = (idx % m) as u8;
            idx /= m;
        }
        Word(w)
    }

    /// A word of level `k` extending `prefix` by zeros.
    pub fn pad(&self, k: usize, prefix: &[u8]) -> Word {
        let mut w = prefix.to_vec();
        w.resize(self.depth() - k, 0);
        Word(w)
    }

    /// Every level-`k` word starting with `prefix`, lexicographically.
    pub fn cylinder(&self, k: usize, prefix: &[u8]) -> Result<Vec<Word>> {
        let len = self.depth() - k;
        if prefix.len() > len {
            return Err(NdsError::InvalidSpec("cylinder prefix longer than the word".into()));
        }
        let mut out = vec![Word(prefix.to_vec())];
        for j in prefix.len()..len {
            let m = self.sizes[k + j];
            if (out.len() as u128) * (m as u128) > MAX_ENUMERATION {
                return Err(NdsError::Unsupported("cylinder too large to enumerate"));
            }
            let mut next = Vec::with_capacity(out.len() * m);
            for w in &out {
                for a in 0..m {
                    let mut v = w.0.clone();
                    v.push(a as u8);
                    next.push(Word(v));
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Apply a level-dependent symbol relabelling `perm(position, symbol)`
    /// to a level-`k` word.
    pub fn relabel(&self, k: usize, x: &Word, perm: &dyn Fn(usize, u8) -> u8) -> Word {
        Word(x.0.iter().enumerate().map(|(j, &a)| perm(k + j, a)).collect())
    }

    /// Closed-form Bowen distance between words of the same level.
    #[inline]
    pub fn word_bowen_distance(n: usize, x: &Word, y: &Word) -> f64 {
        match x.first_difference(y) {
            None => 0.0,
            Some(i) if i < n => 1.0,
            Some(i) => pow2_neg(i - n + 1),
        }
    }

    /// Cylinder depth of a Bowen ball, `Some(0)` meaning the whole space.
    pub fn ball_cylinder_depth(n: usize, eps: f64, closed: bool) -> usize {
        if eps > 1.0 || (closed && eps >= 1.0) {
            return 0;
        }
        let mut t = 1usize;
        while t < 1100 && if closed { pow2_neg(t) > eps } else { pow2_neg(t) >= eps } {
            t += 1;
        }
        n - 1 + t
    }
}

impl NdSystem for NaShift {
    type Point = Word;

    fn label(&self) -> &str {
        &self.label
    }

    fn backend(&self) -> BackendKind {
        BackendKind::SymbolicLevel
    }

    fn max_level(&self) -> Option<usize> {
        Some(self.depth())
    }

    fn level_info(&self, k: usize) -> Result<LevelInfo> {
        if k > self.depth() {
            return Err(NdsError::LevelOutOfRange { level: k, max: self.depth() });
        }
        let len = self.depth() - k;
        let count = self.count(k);
        Ok(LevelInfo {
            kind: BackendKind::SymbolicLevel,
            len: count.min(usize::MAX as u128) as usize,
            diameter: if len == 0 { 0.0 } else { 1.0 },
            resolution: if len == 0 { 0.0 } else { pow2_neg(len - 1) },
        })
    }

    fn carrier(&self, k: usize) -> Result<Vec<Word>> {
        if k > self.depth() {
            return Err(NdsError::LevelOutOfRange { level: k, max: self.depth() });
        }
        self.cylinder(k, &[])
    }

    fn contains(&self, k: usize, x: &Word) -> bool {
        k <= self.depth() && x.0.len() == self.depth() - k && x.0.iter().enumerate().all(|(j, &a)| (a as usize) < self.sizes[k + j])
    }

    fn metric(&self, _k: usize, x: &Word, y: &Word) -> f64 {
        match x.first_difference(y) {
            None => 0.0,
            Some(i) => pow2_neg(i),
        }
    }

    fn step(&self, k: usize, x: &Word) -> Result<Word> {
        if k >= self.depth() || x.0.is_empty() {
            return Err(NdsError::LevelOutOfRange { level: k + 1, max: self.depth() });
        }
        Ok(Word(x.0[1..].to_vec()))
    }

    fn sample_carrier(&self, k: usize, max: usize) -> Result<Vec<Word>> {
        if k > self.depth() {
            return Err(NdsError::LevelOutOfRange { level: k, max: self.depth() });
        }
        let count = self.count(k);
        if count <= max as u128 {
            return self.carrier(k);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ k as u64);
        Ok((0..max)
            .map(|_| Word((k..self.depth()).map(|j| rng.gen_range(0..self.sizes[j]) as u8).collect()))
            .collect())
    }

    fn sample_pairs(&self, k: usize, max: usize) -> Result<Vec<(Word, Word)>> {
        let pts = self.sample_carrier(k, max)?;
        let mut out = Vec::new();
        for (i, x) in pts.iter().enumerate() {
            for y in &pts[i + 1..] {
                out.push((x.clone(), y.clone()));
            }
            let mut p = 0usize;
            while p < x.0.len() {
                let mut y = x.clone();
                y.0[p] = ((y.0[p] as usize + 1) % self.sizes[k + p]) as u8;
                out.push((x.clone(), y));
                p = if p == 0 { 1 } else { 2 * p };
            }
        }
        Ok(out)
    }

    fn bowen_distance(&self, k: usize, n: usize, x: &Word, y: &Word) -> Result<f64> {
        if k + n.saturating_sub(1) > self.depth() {
            return Err(NdsError::LevelOutOfRange { level: k + n - 1, max: self.depth() });
        }
        Ok(Self::word_bowen_distance(n, x, y))
    }

    fn ball_members(&self, spec: &BowenBallSpec<Word>, domain: &[Word]) -> Result<Vec<usize>> {
        if spec.k + spec.n - 1 > self.depth() {
            return Err(NdsError::LevelOutOfRange { level: spec.k + spec.n - 1, max: self.depth() });
        }
        let c = Self::ball_cylinder_depth(spec.n, spec.eps, spec.closed).min(spec.center.0.len());
        let prefix = &spec.center.0[..c];
        Ok(domain
            .iter()
            .enumerate()
            .filter(|(_, y)| y.0.len() == spec.center.0.len() && y.0[..c] == *prefix)
            .map(|(i, _)| i)
            .collect())
    }

    fn cylinder_depth(&self, n: usize, eps: f64, closed: bool) -> Option<usize> {
        Some(Self::ball_cylinder_depth(n, eps, closed))
    }

    fn symbols<'a>(&self, x: &'a Word) -> Option<&'a [u8]> {
        Some(&x.0)
    }
}

/// `f_k(x) = phi(k, x_0)`; the empty word evaluates to 0.
pub fn symbol_potential(phi: impl Fn(usize, u8) -> f64 + Send + Sync + 'static) -> PotentialSeq<Word> {
    let phi: Arc<dyn Fn(usize, u8) -> f64 + Send + Sync> = Arc::new(phi);
    let g = phi.clone();
    PotentialSeq::new(move |k, x: &Word| x.0.first().map_or(0.0, |&a| g(k, a)))
        .with_modulus(|_| 0.5)
        .with_shape(PotentialShape::Symbolwise(phi))
}

/// Bernoulli product measure with level-`k` marginal `probs[k]`, defined on
/// cylinders of depth up to `probs.len()`.
pub fn bernoulli_measure(spec: &ShiftSpec, probs: &[Vec<f64>]) -> Result<MeasureRep<Word>> {
    spec.validate(probs.len())?;
    for (k, p) in probs.iter().enumerate() {
        let m = spec.alphabet.size(k);
        if p.len() != m {
            return Err(NdsError::DimensionMismatch { level: k, expected: m, got: p.len() });
        }
        let total: f64 = p.iter().sum();
        if p.iter().any(|&q| !(q >= 0.0)) || (total - 1.0).abs() > 1e-12 {
            return Err(NdsError::InvalidSpec(alloc::format!("level {k} probabilities are not a probability vector")));
        }
    }
    Ok(MeasureRep::Bernoulli(BernoulliSeq::new_unchecked(probs.to_vec())))
}
