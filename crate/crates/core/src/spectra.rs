//! Additive and multiplicative character sums.
//!
//! Additive sums use `e_p(z) = exp(2 pi i z / p)`. The table
//! `W[c] = sum_{x in X} e_p(c x^{-s})` is the length-`p` transform of the
//! count vector of `x^{-s}`, so all `p` complete sums cost one transform.
//! Multiplicative characters are indexed through the primitive root `g`:
//! `chi_t(g^k) = exp(2 pi i t k / (p-1))`, with `t = 0` principal.
//!
//! Values are `f64`. Double-precision rounding over at most `p` unit-modulus
//! terms keeps entry errors around `1e-10` at the sizes used here.

use num_complex::Complex64;

use crate::convolve::{dft_plus, length_p_transform};
use crate::energy::count_vector_product;
use crate::error::{Error, Result};
use crate::modfield::{batch_neg_pow, PrimeContext};
use crate::sets::{initial_interval, Interval, ResidueSet};

#[derive(Debug, Clone)]
pub struct CompleteSumTable {
    w: Vec<Complex64>,
    len: u64,
    s: i64,
    /// `sum_lambda u(lambda)^2` of the underlying count vector.
    square_mass: u128,
}

impl CompleteSumTable {
    #[inline]
    pub fn get(&self, c: u64) -> Complex64 {
        self.w[c as usize]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.w
    }

    pub fn interval_len(&self) -> u64 {
        self.len
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    /// Relative defect of `sum_c |W[c]|^2 = p * sum_lambda u(lambda)^2`.
    pub fn parseval_defect(&self) -> f64 {
        let lhs: f64 = self.w.iter().map(|z| z.norm_sqr()).sum();
        let rhs = self.w.len() as f64 * self.square_mass as f64;
        (lhs - rhs).abs() / rhs
    }
}

/// `W[c]` for every `c` in `Z_p`.
pub fn complete_sum_table(interval: &Interval, s: i64, ctx: &PrimeContext, budget: u64) -> Result<CompleteSumTable> {
    interval.require_denominator_safe()?;
    let one = ResidueSet::new(vec![1], ctx)?;
    let u = count_vector_product(interval, &one, s, ctx, budget)?;
    let input: Vec<Complex64> = u.to_f64().into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    let mut w = length_p_transform(&input);
    w[0] = Complex64::new(interval.len() as f64, 0.0);
    Ok(CompleteSumTable {
        w,
        len: interval.len(),
        s,
        square_mass: u.sum_squares()?,
    })
}

/// Bound envelope `HM (p / (M H^{2l/(l+1)}) + 1/M)^{1/(2l)}` with the
/// `p^{o(1)}` factor set to 1.
pub fn frac_sum_envelope(h: u64, m: u64, p: u64, ell: u32) -> f64 {
    let (h, m, p, l) = (h as f64, m as f64, p as f64, ell as f64);
    h * m * (p / (m * h.powf(2.0 * l / (l + 1.0))) + 1.0 / m).powf(1.0 / (2.0 * l))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FracSumReport {
    /// `sum_{m in M} |sum_{x in X} e_p(a m x^{-s})|`.
    pub value: f64,
    pub h: u64,
    pub m: u64,
    pub p: u64,
}

impl FracSumReport {
    pub fn envelope(&self, ell: u32) -> f64 {
        frac_sum_envelope(self.h, self.m, self.p, ell)
    }

    pub fn ratio(&self, ell: u32) -> f64 {
        self.value / self.envelope(ell)
    }
}

/// Kloosterman-fraction sum read off a precomputed table.
pub fn kloosterman_frac_sum(a: u64, set: &ResidueSet, table: &CompleteSumTable, ctx: &PrimeContext) -> FracSumReport {
    let a = a % ctx.p();
    let value = set
        .as_slice()
        .iter()
        .map(|&m| table.get(ctx.mul(a, m)).norm())
        .sum::<f64>();
    let value = if a == 0 {
        (table.interval_len() * set.len() as u64) as f64
    } else {
        value
    };
    FracSumReport {
        value,
        h: table.interval_len(),
        m: set.len() as u64,
        p: ctx.p(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSumReport {
    pub value: Complex64,
    pub h: u64,
    pub m: u64,
    pub p: u64,
    alpha: Vec<Complex64>,
}

impl WeightedSumReport {
    /// `||alpha||_{l/(l-1)} H M^{1/l} (p/(M H^{2l/(l+1)}) + 1/M)^{1/(2l)}`.
    pub fn envelope(&self, ell: u32) -> f64 {
        let norm = if ell <= 1 {
            self.alpha.iter().map(|a| a.norm()).fold(0.0, f64::max)
        } else {
            let q = ell as f64 / (ell as f64 - 1.0);
            self.alpha.iter().map(|a| a.norm().powf(q)).sum::<f64>().powf(1.0 / q)
        };
        let (h, m, p, l) = (self.h as f64, self.m as f64, self.p as f64, ell as f64);
        norm * h * m.powf(1.0 / l) * (p / (m * h.powf(2.0 * l / (l + 1.0))) + 1.0 / m).powf(1.0 / (2.0 * l))
    }
}

/// `sum_m sum_x alpha_m beta_x e_p(a m x^{-s})` with `|beta_x| <= 1`, via the
/// transform of the beta-weighted count vector of `x^{-s}`.
#[allow(clippy::too_many_arguments)]
pub fn weighted_frac_sum(
    alpha: &[Complex64],
    beta: &[Complex64],
    a: u64,
    set: &ResidueSet,
    interval: &Interval,
    s: i64,
    ctx: &PrimeContext,
) -> Result<WeightedSumReport> {
    if alpha.len() != set.len() || beta.len() as u64 != interval.len() {
        return Err(Error::domain(format!(
            "weights sized {}/{} do not match |M| = {}, H = {}",
            alpha.len(),
            beta.len(),
            set.len(),
            interval.len()
        )));
    }
    if let Some((i, b)) = beta.iter().enumerate().find(|(_, b)| b.norm() > 1.0 + 1e-12) {
        return Err(Error::domain(format!("|beta[{i}]| = {} exceeds 1", b.norm())));
    }
    if s == 0 {
        return Err(Error::domain("exponent s must be nonzero"));
    }
    interval.require_denominator_safe()?;
    let ys = batch_neg_pow(&interval.to_vec(), s, ctx)?;
    let mut weighted = vec![Complex64::new(0.0, 0.0); ctx.p() as usize];
    for (&y, &b) in ys.iter().zip(beta) {
        weighted[y as usize] += b;
    }
    let w = length_p_transform(&weighted);
    let a = a % ctx.p();
    let value = set
        .as_slice()
        .iter()
        .zip(alpha)
        .map(|(&m, &al)| al * w[ctx.mul(a, m) as usize])
        .sum();
    Ok(WeightedSumReport {
        value,
        h: interval.len(),
        m: set.len() as u64,
        p: ctx.p(),
        alpha: alpha.to_vec(),
    })
}

/// `S_U(chi_t)` for every multiplicative character.
#[derive(Debug, Clone)]
pub struct CharSpectrum {
    s: Vec<Complex64>,
    size: usize,
}

impl CharSpectrum {
    #[inline]
    pub fn get(&self, t: usize) -> Complex64 {
        self.s[t]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.s
    }

    pub fn set_size(&self) -> usize {
        self.size
    }

    /// Relative defect of `sum_t |S[t]|^2 = (p-1) #U`.
    pub fn parseval_defect(&self) -> f64 {
        let lhs: f64 = self.s.iter().map(|z| z.norm_sqr()).sum();
        let rhs = (self.s.len() * self.size) as f64;
        (lhs - rhs).abs() / rhs
    }
}

/// Character spectrum of a subset of `F_p^*`, given as distinct elements.
pub fn char_spectrum(elements: &[u64], ctx: &PrimeContext) -> Result<CharSpectrum> {
    let dlog = ctx.dlog_table()?;
    let n = (ctx.p() - 1) as usize;
    let mut f = vec![Complex64::new(0.0, 0.0); n];
    for &u in elements {
        if u == 0 || u >= ctx.p() {
            return Err(Error::domain(format!("{u} is not in F_p^*")));
        }
        let slot = &mut f[dlog[u as usize] as usize];
        if slot.re != 0.0 {
            return Err(Error::domain(format!("{u} repeated in character-sum input")));
        }
        slot.re = 1.0;
    }
    let size = elements.len();
    let mut s = if size == n {
        vec![Complex64::new(0.0, 0.0); n]
    } else {
        dft_plus(&f)
    };
    s[0] = Complex64::new(size as f64, 0.0);
    Ok(CharSpectrum { s, size })
}

pub fn char_spectrum_of_set(set: &ResidueSet, ctx: &PrimeContext) -> Result<CharSpectrum> {
    char_spectrum(set.as_slice(), ctx)
}

pub fn char_spectrum_of_interval(interval: &Interval, ctx: &PrimeContext) -> Result<CharSpectrum> {
    interval.require_denominator_safe()?;
    char_spectrum(&interval.to_vec(), ctx)
}

/// `(1/(p-1)) sum_chi |S_H(chi)|^2 |S_M(chi)|^2`, which equals `J(L, H, M)`
/// by orthogonality.
pub fn energy_via_characters(interval: &Interval, set: &ResidueSet, ctx: &PrimeContext) -> Result<f64> {
    let sh = char_spectrum_of_interval(interval, ctx)?;
    let sm = char_spectrum_of_set(set, ctx)?;
    let total: f64 = sh
        .values()
        .iter()
        .zip(sm.values())
        .map(|(a, b)| a.norm_sqr() * b.norm_sqr())
        .sum();
    Ok(total / (ctx.p() - 1) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BurgessReport {
    pub k_len: u64,
    pub p: u64,
    /// `max_{t != 0} |S_K(chi_t)|`.
    pub max_abs: f64,
    /// `max_abs / (K^{1/2} p^{3/16})`.
    pub ratio: f64,
}

/// Largest nonprincipal character sum over `{1..K}` against `K^{1/2} p^{3/16}`.
pub fn burgess_ratio(k_len: u64, ctx: &PrimeContext) -> Result<BurgessReport> {
    let kv = initial_interval(k_len, ctx)?;
    let spec = char_spectrum_of_interval(&kv, ctx)?;
    let max_abs = spec.values()[1..].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let ratio = max_abs / ((k_len as f64).sqrt() * (ctx.p() as f64).powf(3.0 / 16.0));
    Ok(BurgessReport {
        k_len,
        p: ctx.p(),
        max_abs,
        ratio,
    })
}
