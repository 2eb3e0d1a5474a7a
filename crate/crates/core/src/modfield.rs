//! Modular arithmetic for a fixed odd prime `p`.
//!
//! Residues are `u64` values in `0..p`. A [`PrimeContext`] owns the prime,
//! its smallest primitive root, and lazily built lookup tables (discrete logs
//! and additive phases) shared by the kernels.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest modulus accepted by [`PrimeContext::new`].
pub const MAX_PRIME: u64 = 1 << 40;

/// Witnesses making Miller-Rabin deterministic for all `n < 2^64`.
const MR_WITNESSES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

#[inline]
fn mul_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_u64(acc, base, m);
        }
        base = mul_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin primality test, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(small) {
            return n == small;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let r = (n - 1).trailing_zeros();
    'witness: for &w in MR_WITNESSES.iter() {
        let a = w % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors of `n` by trial division.
pub fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest primitive root modulo the prime `p`.
pub fn find_primitive_root(p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if p == 2 {
        return Ok(1);
    }
    let factors = distinct_prime_factors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_u64(g, (p - 1) / q, p) != 1))
        .ok_or_else(|| Error::Invariant(format!("no primitive root found for {p}")))
}

/// Discrete-log table: `table[u] = k` with `g^k = u (mod p)` for `u` in
/// `1..p`. Index 0 is unused and holds `u32::MAX`.
pub fn build_dlog_table(p: u64, g: u64) -> Result<Vec<u32>> {
    if p - 1 > u32::MAX as u64 {
        return Err(Error::domain(format!(
            "discrete-log table for p = {p} does not fit 32-bit entries"
        )));
    }
    let n = p as usize;
    let mut table = vec![u32::MAX; n];
    let mut x = 1u64;
    for k in 0..(p - 1) {
        let slot = &mut table[x as usize];
        if *slot != u32::MAX {
            return Err(Error::Invariant(format!(
                "{g} is not a primitive root mod {p}: power {k} repeats {x}"
            )));
        }
        *slot = k as u32;
        x = mul_u64(x, g, p);
    }
    Ok(table)
}

/// The ambient prime field. Immutable once built; lookup tables are
/// constructed on first use and then shared.
#[derive(Debug)]
pub struct PrimeContext {
    p: u64,
    g: u64,
    dlog: OnceLock<Vec<u32>>,
    phases: OnceLock<Vec<Complex64>>,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if !(3..MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(Error::domain(format!(
                "modulus {p} must be an odd prime below 2^40"
            )));
        }
        let g = find_primitive_root(p)?;
        Ok(PrimeContext {
            p,
            g,
            dlog: OnceLock::new(),
            phases: OnceLock::new(),
        })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Smallest primitive root.
    #[inline]
    pub fn generator(&self) -> u64 {
        self.g
    }

    /// Discrete-log table relative to [`generator`](Self::generator).
    pub fn dlog_table(&self) -> Result<&[u32]> {
        if let Some(t) = self.dlog.get() {
            return Ok(t);
        }
        let table = build_dlog_table(self.p, self.g)?;
        Ok(self.dlog.get_or_init(|| table))
    }

    /// `dlog(u)` for nonzero `u`.
    pub fn dlog(&self, u: u64) -> Result<u32> {
        if u == 0 || u >= self.p {
            return Err(Error::domain(format!("dlog of {u} undefined mod {}", self.p)));
        }
        Ok(self.dlog_table()?[u as usize])
    }

    /// Table of `e_p(k) = exp(2 pi i k / p)` for `k` in `0..p`.
    pub fn phases(&self) -> &[Complex64] {
        self.phases.get_or_init(|| {
            let p = self.p as f64;
            (0..self.p)
                .map(|k| Complex64::from_polar(1.0, TAU * (k as f64) / p))
                .collect()
        })
    }

    /// `e_p(k)` for any integer `k`.
    #[inline]
    pub fn e_p(&self, k: i128) -> Complex64 {
        self.phases()[k.rem_euclid(self.p as i128) as usize]
    }

    #[inline]
    pub fn reduce(&self, x: i128) -> u64 {
        x.rem_euclid(self.p as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.p <= u32::MAX as u64 {
            a * b % self.p
        } else {
            mul_u64(a, b, self.p)
        }
    }

    /// Inverse of a nonzero residue.
    pub fn inv(&self, a: u64) -> Result<u64> {
        mod_pow(a, -1, self)
    }
}

/// `base^exp mod p`. Negative exponents invert first, so `x^{-s}` means
/// `(x^{-1})^s`.
pub fn mod_pow(base: u64, exp: i64, ctx: &PrimeContext) -> Result<u64> {
    let p = ctx.p;
    if base >= p {
        return Err(Error::domain(format!("base {base} is not reduced mod {p}")));
    }
    if exp >= 0 {
        return Ok(pow_u64(base, exp as u64, p));
    }
    if base == 0 {
        return Err(Error::domain(format!(
            "0 raised to negative exponent {exp} mod {p}"
        )));
    }
    let inv = pow_u64(base, p - 2, p);
    Ok(pow_u64(inv, exp.unsigned_abs(), p))
}

/// Inverts every entry with one modular exponentiation (prefix products).
pub fn batch_inverse(values: &[u64], ctx: &PrimeContext) -> Result<Vec<u64>> {
    let p = ctx.p;
    let mut prefix = Vec::with_capacity(values.len());
    let mut acc = 1u64;
    for (index, &v) in values.iter().enumerate() {
        if v % p == 0 {
            return Err(Error::ZeroInverse { index });
        }
        acc = ctx.mul(acc, v % p);
        prefix.push(acc);
    }
    let mut out = vec![0u64; values.len()];
    let mut inv = pow_u64(acc, p - 2, p);
    for i in (0..values.len()).rev() {
        let before = if i == 0 { 1 } else { prefix[i - 1] };
        out[i] = ctx.mul(inv, before);
        inv = ctx.mul(inv, values[i] % p);
    }
    Ok(out)
}

/// `x^{-s}` (or `x^{|s|}` for negative `s`) for every `x`, sharing one
/// batched inversion. Zero entries are allowed only when `s <= 0`.
pub fn batch_neg_pow(values: &[u64], s: i64, ctx: &PrimeContext) -> Result<Vec<u64>> {
    let exp = s.unsigned_abs();
    if s > 0 {
        let inv = batch_inverse(values, ctx)?;
        Ok(inv.into_iter().map(|v| pow_u64(v, exp, ctx.p)).collect())
    } else {
        Ok(values.iter().map(|&v| pow_u64(v, exp, ctx.p)).collect())
    }
}
