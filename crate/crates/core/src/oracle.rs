//! Brute-force reference implementations.
//!
//! These enumerate tuples directly and compute every power with
//! [`mod_pow`], sharing no code with the fast kernels. They back the
//! `selftest` subcommand and the differential test suites, and are only
//! practical for tiny instances.

use std::collections::{HashMap, HashSet};

use num_complex::Complex64;

use crate::modfield::{mod_pow, PrimeContext};
use crate::sets::{Interval, ResidueSet};
use crate::tkcount::TkInputs;

fn frac(m: u64, x: u64, s: i64, ctx: &PrimeContext) -> u64 {
    let p = ctx.p();
    (m as u128 * mod_pow(x, -s, ctx).expect("valid power") as u128 % p as u128) as u64
}

pub fn product_set_size(interval: &Interval, set: &ResidueSet, p: u64) -> u64 {
    let mut seen = HashSet::new();
    for h in interval.iter() {
        for &m in set.as_slice() {
            seen.insert(h * m % p);
        }
    }
    seen.len() as u64
}

pub fn ratio_set_size(interval: &Interval, set: &ResidueSet, ctx: &PrimeContext) -> u64 {
    let mut seen = HashSet::new();
    for h in interval.iter() {
        for &m in set.as_slice() {
            seen.insert(frac(m, h, 1, ctx));
        }
    }
    seen.len() as u64
}

/// Solutions of `(L+h1) m1 = (L+h2) m2` by quadruple enumeration.
pub fn energy_shifted(interval: &Interval, set: &ResidueSet, p: u64) -> u128 {
    let xs: Vec<u64> = interval.iter().collect();
    let ms = set.as_slice();
    let mut n = 0u128;
    for &x1 in &xs {
        for &m1 in ms {
            for &x2 in &xs {
                for &m2 in ms {
                    if x1 * m1 % p == x2 * m2 % p {
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

/// Solutions of `m1 x1^{-s} = m2 x2^{-s}` by quadruple enumeration.
pub fn energy_js(interval: &Interval, set: &ResidueSet, s: i64, ctx: &PrimeContext) -> u128 {
    let xs: Vec<u64> = interval.iter().collect();
    let ms = set.as_slice();
    let mut n = 0u128;
    for &x1 in &xs {
        for &m1 in ms {
            let lhs = frac(m1, x1, s, ctx);
            for &x2 in &xs {
                for &m2 in ms {
                    if lhs == frac(m2, x2, s, ctx) {
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

/// Solutions of `j1 k1 m1 = j2 k2 m2` by enumerating pairs of triples.
pub fn triple_r(j_len: u64, k_len: u64, set: &ResidueSet, p: u64) -> u128 {
    let mut triples = Vec::new();
    for j in 1..=j_len {
        for k in 1..=k_len {
            for &m in set.as_slice() {
                triples.push(j * k % p * m % p);
            }
        }
    }
    let mut n = 0u128;
    for a in &triples {
        for b in &triples {
            if a == b {
                n += 1;
            }
        }
    }
    n
}

/// Solutions of `x1^{-s} + ... + xl^{-s} = x_{l+1}^{-s} + ... + x_{2l}^{-s}`
/// by enumerating every `2l`-tuple.
pub fn recip_energy(interval: &Interval, s: i64, ell: u32, ctx: &PrimeContext) -> u128 {
    let p = ctx.p();
    let ys: Vec<u64> = interval.iter().map(|x| frac(1, x, s, ctx)).collect();
    let width = 2 * ell as usize;
    let mut idx = vec![0usize; width];
    let mut n = 0u128;
    loop {
        let (mut lhs, mut rhs) = (0u64, 0u64);
        for (i, &j) in idx.iter().enumerate() {
            if i < ell as usize {
                lhs = (lhs + ys[j]) % p;
            } else {
                rhs = (rhs + ys[j]) % p;
            }
        }
        if lhs == rhs {
            n += 1;
        }
        let mut pos = 0;
        loop {
            if pos == width {
                return n;
            }
            idx[pos] += 1;
            if idx[pos] < ys.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn tuple_sums(lists: &[Vec<u64>], p: u64) -> HashMap<u64, u128> {
    let mut acc: HashMap<u64, u128> = HashMap::from([(0, 1)]);
    for list in lists {
        let mut next = HashMap::new();
        // Extend every partial sum by every element of the next factor.
        for (&sum, &cnt) in &acc {
            for &v in list {
                *next.entry((sum + v) % p).or_insert(0) += cnt;
            }
        }
        acc = next;
    }
    acc
}

/// `T_k(lambda)` for all `lambda`, meeting in the middle: sums over the first
/// `ceil(k/2)` factors and over the rest are tabulated separately and joined.
pub fn tk_counts(inputs: &TkInputs, ctx: &PrimeContext) -> Vec<u128> {
    let p = ctx.p();
    let lists: Vec<Vec<u64>> = inputs
        .factors
        .iter()
        .map(|f| {
            let mut vals = Vec::new();
            for h in 1..=inputs.h {
                let x = ctx.reduce(f.shift as i128 + h as i128);
                for &m in f.set.as_slice() {
                    vals.push(frac(m, x, inputs.s, ctx));
                }
            }
            vals
        })
        .collect();
    let split = lists.len().div_ceil(2);
    let left = tuple_sums(&lists[..split], p);
    let right = tuple_sums(&lists[split..], p);
    let mut out = vec![0u128; p as usize];
    for (&a, &ca) in &left {
        for (&b, &cb) in &right {
            out[((a + b) % p) as usize] += ca * cb;
        }
    }
    out
}

/// `sum_{x in X} e_p(c x^{-s})` evaluated term by term.
pub fn complete_sum(interval: &Interval, s: i64, c: u64, ctx: &PrimeContext) -> Complex64 {
    let p = ctx.p() as f64;
    interval
        .iter()
        .map(|x| {
            let z = (c as u128 * frac(1, x, s, ctx) as u128 % ctx.p() as u128) as f64;
            Complex64::from_polar(1.0, std::f64::consts::TAU * z / p)
        })
        .sum()
}

/// `S_U(chi_t)` evaluated term by term through repeated powers of `g`.
pub fn char_sum(elements: &[u64], t: u64, ctx: &PrimeContext) -> Complex64 {
    let n = ctx.p() - 1;
    let g = ctx.generator();
    let mut log = HashMap::new();
    let mut x = 1u64;
    for k in 0..n {
        log.insert(x, k);
        x = (x as u128 * g as u128 % ctx.p() as u128) as u64;
    }
    elements
        .iter()
        .map(|u| {
            let e = (t as u128 * log[u] as u128 % n as u128) as f64;
            Complex64::from_polar(1.0, std::f64::consts::TAU * e / n as f64)
        })
        .sum()
}
