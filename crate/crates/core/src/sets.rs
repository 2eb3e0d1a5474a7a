//! Intervals `{L+1, ..., L+H}` and subsets of `F_p^*`.
//!
//! Random instances come from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`, with a separate stream number per role, so an
//! instance is reproducible from its seed alone on every platform.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::modfield::PrimeContext;

/// Seeded generator for instance data. `stream` separates independent roles
/// (one set per factor, shifts, multipliers) under the same seed.
pub fn instance_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Block `{L+1, ..., L+H}` of residues, stored as `(L, H)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    shift: u64,
    len: u64,
    p: u64,
}

impl Interval {
    #[inline]
    pub fn shift(&self) -> u64 {
        self.shift
    }

    #[inline]
    pub fn len(&self) -> u64 {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_initial(&self) -> bool {
        self.shift == 0
    }

    /// True iff no element is `0 mod p`, so the block can be inverted.
    pub fn is_denominator_safe(&self) -> bool {
        let d = (self.p - self.shift) % self.p;
        d == 0 || d > self.len
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let (shift, p) = (self.shift, self.p);
        (1..=self.len).map(move |h| (shift + h) % p)
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    pub(crate) fn require_denominator_safe(&self) -> Result<()> {
        if self.is_denominator_safe() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "interval {{{}+1, ..., {}+{}}} contains 0 mod {}",
                self.shift, self.shift, self.len, self.p
            )))
        }
    }
}

/// `{1, ..., H}`.
pub fn initial_interval(h: u64, ctx: &PrimeContext) -> Result<Interval> {
    shifted_interval(0, h, ctx, false)
}

/// `{L+1, ..., L+H}` with `L` reduced mod `p`. With `require_safe`, an
/// interval passing through 0 is rejected.
pub fn shifted_interval(l: i64, h: u64, ctx: &PrimeContext, require_safe: bool) -> Result<Interval> {
    let p = ctx.p();
    if h == 0 || h > p - 1 {
        return Err(Error::domain(format!("interval length {h} outside 1..={}", p - 1)));
    }
    let iv = Interval {
        shift: ctx.reduce(l as i128),
        len: h,
        p,
    };
    if require_safe {
        iv.require_denominator_safe()?;
    }
    Ok(iv)
}

/// Subset of `F_p^*`, sorted and duplicate free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSet {
    elems: Vec<u64>,
}

impl ResidueSet {
    /// Validates, sorts and deduplicates. Every entry must already lie in
    /// `1..p`.
    pub fn new(mut elems: Vec<u64>, ctx: &PrimeContext) -> Result<Self> {
        if let Some(bad) = elems.iter().find(|&&e| e == 0 || e >= ctx.p()) {
            return Err(Error::domain(format!(
                "residue {bad} is not in 1..{}",
                ctx.p()
            )));
        }
        elems.sort_unstable();
        elems.dedup();
        if elems.is_empty() {
            return Err(Error::domain("empty residue set"));
        }
        let set = ResidueSet { elems };
        debug_assert!(set.elems.windows(2).all(|w| w[0] < w[1]));
        Ok(set)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[u64] {
        &self.elems
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    /// `c * M`.
    pub fn dilate(&self, c: u64, ctx: &PrimeContext) -> Result<Self> {
        if c.is_multiple_of(ctx.p()) {
            return Err(Error::domain("dilation by 0"));
        }
        ResidueSet::new(self.elems.iter().map(|&m| ctx.mul(m, c % ctx.p())).collect(), ctx)
    }

    /// All of `F_p^*`.
    pub fn full(ctx: &PrimeContext) -> Self {
        ResidueSet {
            elems: (1..ctx.p()).collect(),
        }
    }
}

/// Uniform `M`-subset of `{1, ..., p-1}` (stream 0 of `seed`).
pub fn random_subset(m: u64, seed: u64, ctx: &PrimeContext) -> Result<ResidueSet> {
    random_subset_stream(m, seed, 0, ctx)
}

/// Uniform `M`-subset drawn by a partial Fisher-Yates shuffle of the implicit
/// array `[1, ..., p-1]`; only displaced slots are stored.
pub fn random_subset_stream(m: u64, seed: u64, stream: u64, ctx: &PrimeContext) -> Result<ResidueSet> {
    let n = ctx.p() - 1;
    if m == 0 || m > n {
        return Err(Error::domain(format!("set size {m} outside 1..={n}")));
    }
    let mut rng = instance_rng(seed, stream);
    let mut moved: HashMap<u64, u64> = HashMap::new();
    let mut out = Vec::with_capacity(m as usize);
    for i in 0..m {
        let j = rng.gen_range(i..n);
        let at_j = *moved.get(&j).unwrap_or(&j);
        let at_i = *moved.get(&i).unwrap_or(&i);
        moved.insert(j, at_i);
        out.push(at_j + 1);
    }
    ResidueSet::new(out, ctx)
}

/// Parses a set file: one decimal residue per line, blank lines and lines
/// starting with `#` ignored. Residues must be pre-reduced to `1..p`.
pub fn set_from_file(path: &Path, ctx: &PrimeContext) -> Result<ResidueSet> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_set(&text, path, ctx)
}

pub(crate) fn parse_set(text: &str, path: &Path, ctx: &PrimeContext) -> Result<ResidueSet> {
    let p = ctx.p();
    let mut elems = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fail = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg,
        };
        let v: u64 = line
            .parse()
            .map_err(|_| fail(format!("not a decimal residue: {line:?}")))?;
        if v == 0 {
            return Err(fail("0 is not in F_p^*".into()));
        }
        if v >= p {
            return Err(fail(format!("{v} is not reduced mod {p}")));
        }
        elems.push(v);
    }
    if elems.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            msg: "set file holds no residues".into(),
        });
    }
    ResidueSet::new(elems, ctx)
}
