//! Pair-coincidence counts built from a single count vector.
//!
//! Every quantity here has the form `sum_lambda c(lambda)^2`, where `c` counts
//! how many generating tuples land on `lambda`. This is exact and costs
//! `O(HM + p)` instead of enumerating pairs of tuples.

use crate::convolve::{k_fold_count, ConvolutionPlan};
use crate::error::{check_budget, Error, Result};
use crate::modfield::{batch_neg_pow, PrimeContext};
use crate::sets::{initial_interval, Interval, ResidueSet};

/// Length-`p` vector of exact counts indexed by residue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountVector {
    counts: Vec<u128>,
}

impl CountVector {
    pub fn from_counts(counts: Vec<u128>) -> Self {
        CountVector { counts }
    }

    pub fn zeros(p: u64) -> Self {
        CountVector {
            counts: vec![0; p as usize],
        }
    }

    #[inline]
    pub fn counts(&self) -> &[u128] {
        &self.counts
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    #[inline]
    pub fn get(&self, lambda: u64) -> u128 {
        self.counts[lambda as usize]
    }

    /// `sum_lambda counts[lambda]`.
    pub fn total(&self) -> u128 {
        self.counts.iter().sum()
    }

    /// `sum_lambda counts[lambda]^2`, refusing on `u128` overflow.
    pub fn sum_squares(&self) -> Result<u128> {
        self.counts.iter().try_fold(0u128, |acc, &c| {
            c.checked_mul(c)
                .and_then(|sq| acc.checked_add(sq))
                .ok_or_else(|| Error::Overflow {
                    bound: "sum of squared counts >= 2^128".into(),
                    strategy: "u128 accumulator",
                })
        })
    }

    /// Counts as `f64` (lossy above `2^53`).
    pub fn to_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }
}

/// Distribution of `m * x^{-s}` over `(m, x)` in `M x X`.
///
/// `s > 0` needs an interval avoiding 0; `s < 0` gives the plain product map
/// `m * x^{|s|}` and accepts 0 in the interval.
pub fn count_vector_product(
    interval: &Interval,
    set: &ResidueSet,
    s: i64,
    ctx: &PrimeContext,
    budget: u64,
) -> Result<CountVector> {
    if s == 0 {
        return Err(Error::domain("exponent s must be nonzero"));
    }
    if s > 0 {
        interval.require_denominator_safe()?;
    }
    check_budget(interval.len() as u128 * set.len() as u128, budget)?;
    let ys = batch_neg_pow(&interval.to_vec(), s, ctx)?;
    let mut out = CountVector::zeros(ctx.p());
    for &y in &ys {
        for &m in set.as_slice() {
            out.counts[ctx.mul(m, y) as usize] += 1;
        }
    }
    debug_assert_eq!(out.total(), interval.len() as u128 * set.len() as u128);
    Ok(out)
}

/// `J(H, M)`: solutions of `h1 m1 = h2 m2` with `H = {1..H}`.
pub fn energy_j(interval: &Interval, set: &ResidueSet, ctx: &PrimeContext, budget: u64) -> Result<u128> {
    if !interval.is_initial() {
        return Err(Error::domain("J(H, M) needs an initial interval (L = 0)"));
    }
    energy_shifted(interval, set, ctx, budget)
}

/// `J(L, H, M)`: solutions of `(L+h1) m1 = (L+h2) m2`; the interval may
/// contain 0.
pub fn energy_shifted(
    interval: &Interval,
    set: &ResidueSet,
    ctx: &PrimeContext,
    budget: u64,
) -> Result<u128> {
    count_vector_product(interval, set, -1, ctx, budget)?.sum_squares()
}

/// `J_s(L, H, M)`: solutions of `m1 x1^{-s} = m2 x2^{-s}`.
pub fn energy_js(
    interval: &Interval,
    set: &ResidueSet,
    s: i64,
    ctx: &PrimeContext,
    budget: u64,
) -> Result<u128> {
    count_vector_product(interval, set, s, ctx, budget)?.sum_squares()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripleReport {
    /// `R(J, K, M)`.
    pub r: u128,
    /// `J^2 K^2 M^2 / (p - 1)`.
    pub main_term: f64,
}

impl TripleReport {
    pub fn ratio(&self) -> f64 {
        self.r as f64 / self.main_term
    }
}

/// `R(J, K, M)`: solutions of `j1 k1 m1 = j2 k2 m2` over two initial
/// intervals and a set.
pub fn triple_r(
    j_len: u64,
    k_len: u64,
    set: &ResidueSet,
    ctx: &PrimeContext,
    budget: u64,
) -> Result<TripleReport> {
    let jv = initial_interval(j_len, ctx)?;
    let kv = initial_interval(k_len, ctx)?;
    let m = set.len() as u128;
    check_budget(j_len as u128 * k_len as u128 * m, budget)?;
    // Distribution of jk, then spread by every m.
    let mut jk = vec![0u128; ctx.p() as usize];
    for j in jv.iter() {
        for k in kv.iter() {
            jk[ctx.mul(j, k) as usize] += 1;
        }
    }
    let mut d = CountVector::zeros(ctx.p());
    for (v, &c) in jk.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for &mm in set.as_slice() {
            d.counts[ctx.mul(v as u64, mm) as usize] += c;
        }
    }
    let total = (j_len as f64 * k_len as f64 * m as f64).powi(2);
    Ok(TripleReport {
        r: d.sum_squares()?,
        main_term: total / (ctx.p() - 1) as f64,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecipEnergyReport {
    /// `J_{l,s}(X)`.
    pub energy: u128,
    /// `H^{2l^2/(l+1)} + H^{2l}/p`, with every `H^{o(1)}` factor set to 1.
    pub envelope: f64,
}

/// Bound envelope for `J_{l,s}(X)`.
pub fn recip_envelope(h: u64, ell: u32, p: u64) -> f64 {
    let (h, l) = (h as f64, ell as f64);
    h.powf(2.0 * l * l / (l + 1.0)) + h.powf(2.0 * l) / p as f64
}

/// `J_{l,s}(X)`: solutions of `x1^{-s} + ... + xl^{-s} = x_{l+1}^{-s} + ... +
/// x_{2l}^{-s}` with all `x_i` in `X`.
pub fn additive_energy_recip(
    interval: &Interval,
    s: i64,
    ell: u32,
    ctx: &PrimeContext,
    budget: u64,
) -> Result<RecipEnergyReport> {
    if ell == 0 {
        return Err(Error::domain("l must be at least 1"));
    }
    if s == 0 {
        return Err(Error::domain("exponent s must be nonzero"));
    }
    interval.require_denominator_safe()?;
    let p = ctx.p();
    let h = interval.len();
    // The largest possible energy is H^{2l}.
    if (h as f64).log2() * 2.0 * ell as f64 >= 127.0 {
        return Err(Error::Overflow {
            bound: format!("H^(2l) with H = {h}, l = {ell}"),
            strategy: "u128 accumulator",
        });
    }
    let work = ell as u128 * p as u128 * ((ell as u128 * p as u128).ilog2() as u128 + 1);
    check_budget(work.max(h as u128), budget)?;
    let one = ResidueSet::new(vec![1], ctx)?;
    let u = count_vector_product(interval, &one, s, ctx, budget)?;
    let energy = if ell == 1 {
        u.sum_squares()?
    } else {
        let factors = vec![u; ell as usize];
        let masses: Vec<u128> = factors.iter().map(|v| v.total()).collect();
        let plan = ConvolutionPlan::select(p, &masses)?;
        k_fold_count(&factors, &plan)?.sum_squares()?
    };
    Ok(RecipEnergyReport {
        energy,
        envelope: recip_envelope(h, ell, p),
    })
}

/// Bound envelope shared by `J(H, M)` and `J_s(L, H, M)`, with every
/// `p^{o(1)}` factor set to 1. The first branch's leading term is read as
/// `H^2 M^2 / p`.
pub fn energy_envelope(h: u64, m: u64, p: u64) -> f64 {
    let (hf, mf, pf) = (h as f64, m as f64, p as f64);
    let h_big = (h as u128).pow(3) >= (p as u128).pow(2);
    let m_big = (m as u128).pow(3) >= p as u128;
    if h_big {
        hf * hf * mf * mf / pf + hf * mf
    } else if m_big {
        hf * hf * mf * mf / pf + hf * mf.powf(1.75) * pf.powf(-0.25) + mf * mf
    } else {
        hf * mf + mf * mf
    }
}
