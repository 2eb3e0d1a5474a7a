//! Exact cyclic convolution of count vectors over `Z_p`.
//!
//! Three routes share one contract (exact integer output):
//!
//! * `Direct`: schoolbook `O(p^2)` per factor, used for tiny `p`.
//! * `Float`: double-precision FFT of the linear convolution, rounded. Only
//!   selected when every output is below `2^40` and `p <= 2^21`, where the
//!   accumulated error stays far below `0.5`.
//! * `Exact`: NTTs modulo two or three 62-bit primes with CRT recombination.
//!
//! The selector bounds every output coefficient by the product of the input
//! masses, which is also the exact total of the output.

mod fft;
mod ntt;

use num_complex::Complex64;

use crate::energy::CountVector;
use crate::error::{Error, Result};
use crate::par;

pub use fft::dft_plus;

use fft::{chirp_dft_plus, direct_dft_plus, fft_forward, fft_inverse, DIRECT_DFT_MAX};
use ntt::{crt_combine, NttPlan, MAX_LOG_LEN, MODULI};

/// Largest `p` for which the selector picks the schoolbook route.
pub const DIRECT_MAX_P: u64 = 128;
/// Coefficient bound below which the floating route is certified.
pub const FLOAT_MAX_BOUND: u128 = 1 << 40;
/// Largest `p` for the floating route.
pub const FLOAT_MAX_P: u64 = 1 << 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Direct,
    Float,
    Exact,
}

impl Strategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Direct => "direct",
            Strategy::Float => "float",
            Strategy::Exact => "exact-ntt",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvolutionPlan {
    p: u64,
    strategy: Strategy,
    bound: u128,
    reason: &'static str,
}

fn mass_bound(masses: &[u128]) -> Result<u128> {
    masses.iter().try_fold(1u128, |acc, &m| {
        acc.checked_mul(m).ok_or_else(|| Error::Overflow {
            bound: "product of masses >= 2^128".into(),
            strategy: "any route (outputs are u128)",
        })
    })
}

impl ConvolutionPlan {
    /// Picks the cheapest route able to represent every output exactly.
    pub fn select(p: u64, masses: &[u128]) -> Result<Self> {
        let bound = mass_bound(masses)?;
        let (strategy, reason) = if p <= DIRECT_MAX_P {
            (Strategy::Direct, "p small enough for schoolbook")
        } else if bound < FLOAT_MAX_BOUND && p <= FLOAT_MAX_P {
            (Strategy::Float, "bound below 2^40, float rounding certified")
        } else {
            (Strategy::Exact, "bound too large for float, escalated to NTT")
        };
        Ok(ConvolutionPlan {
            p,
            strategy,
            bound,
            reason,
        })
    }

    /// Forces a route, refusing when it cannot certify the bound.
    pub fn with_strategy(p: u64, masses: &[u128], strategy: Strategy) -> Result<Self> {
        let bound = mass_bound(masses)?;
        check_capacity(strategy, p, bound)?;
        Ok(ConvolutionPlan {
            p,
            strategy,
            bound,
            reason: "forced",
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// Upper bound on any output coefficient.
    pub fn bound(&self) -> u128 {
        self.bound
    }

    pub fn reason(&self) -> &'static str {
        self.reason
    }
}

fn check_capacity(strategy: Strategy, p: u64, bound: u128) -> Result<()> {
    if strategy == Strategy::Float && (bound >= FLOAT_MAX_BOUND || p > FLOAT_MAX_P) {
        return Err(Error::Overflow {
            bound: bound.to_string(),
            strategy: "float route (requires bound < 2^40, p <= 2^21); use exact-ntt",
        });
    }
    Ok(())
}

/// `w[l] = sum_mu u[mu] v[(l - mu) mod p]`.
pub fn cyclic_convolve(u: &CountVector, v: &CountVector, plan: &ConvolutionPlan) -> Result<CountVector> {
    k_fold_count(&[u.clone(), v.clone()], plan)
}

/// k-fold cyclic convolution. For the count vectors of `m * x^{-s}` over
/// `(M_i, X_i)` the output at `lambda` is `T_k(lambda)`.
pub fn k_fold_count(vectors: &[CountVector], plan: &ConvolutionPlan) -> Result<CountVector> {
    if vectors.len() < 2 {
        return Err(Error::domain(format!(
            "k-fold convolution needs k >= 2, got {}",
            vectors.len()
        )));
    }
    let p = plan.p;
    if let Some(bad) = vectors.iter().find(|v| v.len() as u64 != p) {
        return Err(Error::domain(format!(
            "count vector of length {} does not match p = {p}",
            bad.len()
        )));
    }
    let masses: Vec<u128> = vectors.iter().map(|v| v.total()).collect();
    let bound = mass_bound(&masses)?;
    if bound > plan.bound {
        return Err(Error::Overflow {
            bound: bound.to_string(),
            strategy: "this plan; rebuild it with ConvolutionPlan::select",
        });
    }
    check_capacity(plan.strategy, p, bound)?;

    // Identical factors are transformed once and raised to a power.
    let mut groups: Vec<(&CountVector, u32)> = Vec::new();
    for v in vectors {
        match groups.iter_mut().find(|(g, _)| *g == v) {
            Some((_, e)) => *e += 1,
            None => groups.push((v, 1)),
        }
    }

    let out = match plan.strategy {
        Strategy::Direct => direct_kfold(vectors, p),
        Strategy::Float => float_kfold(&groups, vectors.len(), p)?,
        Strategy::Exact => exact_kfold(&groups, vectors.len(), p, bound)?,
    };
    let total = out.total();
    if total != bound {
        return Err(Error::Invariant(format!(
            "convolution mass {total} != product of input masses {bound}"
        )));
    }
    Ok(out)
}

fn direct_kfold(vectors: &[CountVector], p: u64) -> CountVector {
    let n = p as usize;
    let mut acc = vectors[0].counts().to_vec();
    for v in &vectors[1..] {
        let mut next = vec![0u128; n];
        for (i, &a) in acc.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in v.counts().iter().enumerate() {
                if b != 0 {
                    next[(i + j) % n] += a * b;
                }
            }
        }
        acc = next;
    }
    CountVector::from_counts(acc)
}

fn linear_len(k: usize, p: u64) -> Result<(usize, u32)> {
    let need = k as u128 * (p as u128 - 1) + 1;
    let len = need.next_power_of_two();
    let log = len.trailing_zeros();
    if log > MAX_LOG_LEN {
        return Err(Error::domain(format!("transform length 2^{log} unsupported")));
    }
    Ok((len as usize, log))
}

fn float_kfold(groups: &[(&CountVector, u32)], k: usize, p: u64) -> Result<CountVector> {
    let (len, _) = linear_len(k, p)?;
    let transforms = par::map_collect(groups.to_vec(), |(v, e)| {
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        for (slot, &c) in buf.iter_mut().zip(v.counts()) {
            slot.re = c as f64;
        }
        fft_forward(&mut buf);
        if e > 1 {
            for x in buf.iter_mut() {
                *x = x.powu(e);
            }
        }
        buf
    });
    let mut acc = transforms[0].clone();
    for t in &transforms[1..] {
        for (a, b) in acc.iter_mut().zip(t) {
            *a *= *b;
        }
    }
    fft_inverse(&mut acc);
    let n = p as usize;
    let scale = 1.0 / len as f64;
    let mut folded = vec![0f64; n];
    for (i, x) in acc.iter().enumerate() {
        folded[i % n] += x.re * scale;
    }
    let mut counts = Vec::with_capacity(n);
    for (i, x) in folded.into_iter().enumerate() {
        let r = x.round();
        if (x - r).abs() > 0.25 || r < 0.0 {
            return Err(Error::Invariant(format!(
                "float convolution output {x} at index {i} is not near a nonnegative integer"
            )));
        }
        counts.push(r as u128);
    }
    Ok(CountVector::from_counts(counts))
}

fn exact_kfold(groups: &[(&CountVector, u32)], k: usize, p: u64, bound: u128) -> Result<CountVector> {
    let (_, log) = linear_len(k, p)?;
    let two = MODULI[0].0 as u128 * MODULI[1].0 as u128;
    let used = if bound < two { 2 } else { 3 };
    let n = p as usize;
    let residues: Vec<Vec<u64>> = par::map_collect(MODULI[..used].to_vec(), |modulus| {
        let plan = NttPlan::new(modulus, log);
        let m = plan.mont;
        let q = m.q() as u128;
        let mut acc: Option<Vec<u64>> = None;
        for &(v, e) in groups {
            let mut buf = vec![0u64; plan.len()];
            for (slot, &c) in buf.iter_mut().zip(v.counts()) {
                *slot = m.enter((c % q) as u64);
            }
            plan.forward(&mut buf);
            if e > 1 {
                for x in buf.iter_mut() {
                    let base = *x;
                    for _ in 1..e {
                        *x = m.mul(*x, base);
                    }
                }
            }
            acc = Some(match acc {
                None => buf,
                Some(mut a) => {
                    for (x, y) in a.iter_mut().zip(&buf) {
                        *x = m.mul(*x, *y);
                    }
                    a
                }
            });
        }
        let mut acc = acc.expect("at least one factor");
        plan.inverse(&mut acc);
        let mut folded = vec![0u64; n];
        for (i, &x) in acc.iter().enumerate() {
            let slot = &mut folded[i % n];
            *slot = m.add(*slot, m.leave(x));
        }
        folded
    });
    let mut counts = Vec::with_capacity(n);
    let mut digits = vec![0u64; used];
    for i in 0..n {
        for (d, r) in digits.iter_mut().zip(&residues) {
            *d = r[i];
        }
        let v = crt_combine(&digits).ok_or_else(|| {
            Error::Invariant(format!("CRT value at index {i} exceeds u128"))
        })?;
        if v > bound {
            return Err(Error::Invariant(format!(
                "NTT output {v} at index {i} exceeds bound {bound}"
            )));
        }
        counts.push(v);
    }
    Ok(CountVector::from_counts(counts))
}

/// `out[c] = sum_l u[l] e_p(c l)` for a prime length `p = u.len()`, by the
/// chirp reduction to a power-of-two convolution (direct below 64 entries).
pub fn length_p_transform(u: &[Complex64]) -> Vec<Complex64> {
    if u.len() <= DIRECT_DFT_MAX {
        direct_dft_plus(u)
    } else {
        chirp_dft_plus(u)
    }
}
