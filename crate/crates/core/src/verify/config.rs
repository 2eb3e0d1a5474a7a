//! Sweep configuration: a flat `key = value` text format.
//!
//! ```text
//! # comment
//! primes     = 10007, 30011
//! h_exps     = 0.5, 0.6      # H = ceil(p^e)
//! m_exps     = 0.4
//! tie_hm     = false         # true: M uses the H exponent, m_exps ignored
//! l_policy   = zero          # zero | random | <integer>
//! s          = 1, 2
//! ell        = 2, 3
//! k          = 6
//! r          = 4             # triple count uses J = ceil(p^(1/r)), K = H
//! seeds      = 1
//! quantities = prodset, energy, energy_s, triple, recip, expsum, tk, burgess
//! epsilon    = 0.05
//! budget     = 4000000000
//! workers    = 0             # 0 = all cores
//! format     = csv           # csv | json
//! out        = report.csv    # optional; stdout when absent
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::report::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftPolicy {
    Zero,
    Random,
    Explicit(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    /// Missing count of `HM`.
    ProdSet,
    /// `J(H, M)`.
    Energy,
    /// `J_s(L, H, M)`.
    EnergyS,
    /// `R(J, K, M)`.
    Triple,
    /// `J_{l,s}(X)`.
    Recip,
    /// Kloosterman-fraction sum `S`.
    ExpSum,
    /// `max |dev|` of `T_k`.
    Tk,
    /// Largest nonprincipal character sum over `{1..H}`.
    Burgess,
}

impl Quantity {
    pub const ALL: [Quantity; 8] = [
        Quantity::ProdSet,
        Quantity::Energy,
        Quantity::EnergyS,
        Quantity::Triple,
        Quantity::Recip,
        Quantity::ExpSum,
        Quantity::Tk,
        Quantity::Burgess,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Quantity::ProdSet => "prodset",
            Quantity::Energy => "energy",
            Quantity::EnergyS => "energy_s",
            Quantity::Triple => "triple",
            Quantity::Recip => "recip",
            Quantity::ExpSum => "expsum",
            Quantity::Tk => "tk",
            Quantity::Burgess => "burgess",
        }
    }

    pub(crate) fn uses_m(&self) -> bool {
        !matches!(self, Quantity::Recip | Quantity::Burgess)
    }

    pub(crate) fn uses_s(&self) -> bool {
        matches!(self, Quantity::EnergyS | Quantity::Recip | Quantity::ExpSum | Quantity::Tk)
    }

    pub(crate) fn uses_ell(&self) -> bool {
        matches!(self, Quantity::Recip | Quantity::ExpSum)
    }

    pub(crate) fn uses_k(&self) -> bool {
        matches!(self, Quantity::Tk)
    }

    pub(crate) fn uses_seed(&self) -> bool {
        !matches!(self, Quantity::Burgess)
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.as_str() == s)
            .ok_or_else(|| format!("unknown quantity {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub primes: Vec<u64>,
    pub h_exps: Vec<f64>,
    pub m_exps: Vec<f64>,
    pub tie_hm: bool,
    pub l_policy: ShiftPolicy,
    pub s: Vec<i64>,
    pub ell: Vec<u32>,
    pub k: Vec<usize>,
    pub r: u32,
    pub seeds: Vec<u64>,
    pub quantities: Vec<Quantity>,
    pub epsilon: f64,
    pub budget: u64,
    pub workers: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            primes: Vec::new(),
            h_exps: vec![0.5],
            m_exps: vec![0.5],
            tie_hm: false,
            l_policy: ShiftPolicy::Zero,
            s: vec![1],
            ell: vec![2],
            k: vec![6],
            r: 4,
            seeds: vec![1],
            quantities: vec![Quantity::ProdSet],
            epsilon: 0.05,
            budget: crate::DEFAULT_BUDGET,
            workers: 0,
            format: Format::Csv,
            out: None,
        }
    }
}

fn list<T: FromStr>(value: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse::<T>().map_err(|e| format!("{v:?}: {e}")))
        .collect()
}

fn scalar<T: FromStr>(value: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| format!("{value:?}: {e}"))
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SweepConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Config(format!("line {}: {msg}", i + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let res: std::result::Result<(), String> = match key {
                "primes" => list(value).map(|v| cfg.primes = v),
                "h_exps" => list(value).map(|v| cfg.h_exps = v),
                "m_exps" => list(value).map(|v| cfg.m_exps = v),
                "tie_hm" => scalar(value).map(|v| cfg.tie_hm = v),
                "l_policy" => match value {
                    "zero" => Ok(ShiftPolicy::Zero),
                    "random" => Ok(ShiftPolicy::Random),
                    other => scalar(other).map(ShiftPolicy::Explicit),
                }
                .map(|v| cfg.l_policy = v),
                "s" => list(value).map(|v| cfg.s = v),
                "ell" => list(value).map(|v| cfg.ell = v),
                "k" => list(value).map(|v| cfg.k = v),
                "r" => scalar(value).map(|v| cfg.r = v),
                "seeds" => list(value).map(|v| cfg.seeds = v),
                "quantities" => list(value).map(|v| cfg.quantities = v),
                "epsilon" => scalar(value).map(|v| cfg.epsilon = v),
                "budget" => scalar(value).map(|v| cfg.budget = v),
                "workers" => scalar(value).map(|v| cfg.workers = v),
                "format" => value.parse().map(|v| cfg.format = v),
                "out" => {
                    cfg.out = Some(PathBuf::from(value));
                    Ok(())
                }
                other => Err(format!("unknown key {other:?}")),
            };
            res.map_err(|m| err(format!("{key}: {m}")))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s.contains(&0) {
            return Err(Error::Config("s: exponent 0 is not allowed".into()));
        }
        if self.ell.contains(&0) {
            return Err(Error::Config("ell: values must be >= 1".into()));
        }
        if self.k.iter().any(|&k| k < 2) {
            return Err(Error::Config("k: values must be >= 2".into()));
        }
        if self.r == 0 {
            return Err(Error::Config("r: must be >= 1".into()));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::Config("epsilon: must be positive".into()));
        }
        let bad_exp = |e: &f64| !(0.0..=1.0).contains(e);
        if self.h_exps.iter().any(bad_exp) || self.m_exps.iter().any(bad_exp) {
            return Err(Error::Config("h_exps/m_exps: exponents must lie in [0, 1]".into()));
        }
        Ok(())
    }
}
