//! Number-theoretic transforms over 62-bit primes `c * 2^32 + 1`, in
//! Montgomery form.

use crate::par;

/// `(q, primitive root)`; `q - 1` is divisible by `2^33` or more.
pub(crate) const MODULI: [(u64, u64); 3] = [
    (4611685941117976577, 3),
    (4611685692009873409, 19),
    (4611685606110527489, 3),
];

/// Largest supported transform length exponent (common 2-adicity).
pub(crate) const MAX_LOG_LEN: u32 = 33;

/// Butterflies below this block size run sequentially.
const PAR_GRAIN: usize = 1 << 14;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Montgomery {
    q: u64,
    /// `-q^{-1} mod 2^64`
    q_neg_inv: u64,
    /// `2^128 mod q`
    r2: u64,
}

impl Montgomery {
    pub(crate) fn new(q: u64) -> Self {
        debug_assert!(q % 2 == 1 && q < 1 << 62);
        let mut inv = 1u64;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(q.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % q as u128) as u64;
        let r2 = ((r as u128 * r as u128) % q as u128) as u64;
        Montgomery {
            q,
            q_neg_inv: inv.wrapping_neg(),
            r2,
        }
    }

    #[inline]
    pub(crate) fn q(&self) -> u64 {
        self.q
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.q_neg_inv);
        let u = ((t + m as u128 * self.q as u128) >> 64) as u64;
        if u >= self.q {
            u - self.q
        } else {
            u
        }
    }

    #[inline]
    pub(crate) fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    pub(crate) fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub(crate) fn enter(&self, a: u64) -> u64 {
        self.mul(a % self.q, self.r2)
    }

    #[inline]
    pub(crate) fn leave(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    pub(crate) fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut acc = self.enter(1);
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }
}

/// Transform plan for one modulus and one power-of-two length.
pub(crate) struct NttPlan {
    pub(crate) mont: Montgomery,
    len: usize,
    /// `w^j` for `j < len/2`, Montgomery form, `w` of order `len`.
    roots: Vec<u64>,
    inv_roots: Vec<u64>,
    len_inv: u64,
}

impl NttPlan {
    pub(crate) fn new(modulus: (u64, u64), log_len: u32) -> Self {
        assert!(log_len <= MAX_LOG_LEN);
        let (q, g) = modulus;
        let mont = Montgomery::new(q);
        let len = 1usize << log_len;
        let w = mont.pow(mont.enter(g), (q - 1) >> log_len);
        let w_inv = mont.pow(w, q - 2);
        let powers = |base: u64| {
            let mut out = Vec::with_capacity(len / 2);
            let mut x = mont.enter(1);
            for _ in 0..len / 2 {
                out.push(x);
                x = mont.mul(x, base);
            }
            out
        };
        let roots = powers(w);
        let inv_roots = powers(w_inv);
        let len_inv = mont.pow(mont.enter(len as u64), q - 2);
        NttPlan {
            mont,
            len,
            roots,
            inv_roots,
            len_inv,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    pub(crate) fn forward(&self, data: &mut [u64]) {
        self.transform(data, &self.roots);
    }

    /// Inverse transform including the `1/len` scaling.
    pub(crate) fn inverse(&self, data: &mut [u64]) {
        self.transform(data, &self.inv_roots);
        let (m, s) = (self.mont, self.len_inv);
        par::for_each_chunk_mut(data, PAR_GRAIN, |_, c| {
            for x in c {
                *x = m.mul(*x, s);
            }
        });
    }

    fn transform(&self, data: &mut [u64], roots: &[u64]) {
        let n = self.len;
        assert_eq!(data.len(), n);
        bit_reverse(data);
        let m = self.mont;
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            let butterfly = |offset: usize, lo: &mut [u64], hi: &mut [u64]| {
                for (j, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    let t = m.mul(*b, roots[(offset + j) * stride]);
                    let u = *a;
                    *a = m.add(u, t);
                    *b = m.sub(u, t);
                }
            };
            if 2 * half <= PAR_GRAIN {
                par::for_each_chunk_mut(data, PAR_GRAIN, |_, chunk| {
                    for block in chunk.chunks_mut(2 * half) {
                        let (lo, hi) = block.split_at_mut(half);
                        butterfly(0, lo, hi);
                    }
                });
            } else {
                for block in data.chunks_mut(2 * half) {
                    let (lo, hi) = block.split_at_mut(half);
                    par::for_each_zip_chunk_mut(lo, hi, PAR_GRAIN / 2, butterfly);
                }
            }
            half *= 2;
        }
    }
}

fn bit_reverse<T>(data: &mut [T]) {
    let n = data.len();
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
}

/// Recombines residues modulo the first `r.len()` moduli into the unique
/// value below their product, or `None` when it does not fit in `u128`.
pub(crate) fn crt_combine(r: &[u64]) -> Option<u128> {
    let q: Vec<u128> = MODULI.iter().map(|m| m.0 as u128).collect();
    let mulmod = |a: u128, b: u128, m: u128| -> u128 {
        // a, b < m < 2^62 so the product fits.
        (a % m) * (b % m) % m
    };
    let powmod = |mut b: u128, mut e: u128, m: u128| -> u128 {
        let mut acc = 1u128;
        b %= m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % m;
            }
            b = b * b % m;
            e >>= 1;
        }
        acc
    };
    let mut x = r[0] as u128;
    let mut prod = q[0];
    for i in 1..r.len() {
        let qi = q[i];
        let x_mod = x % qi;
        let diff = (r[i] as u128 + qi - x_mod) % qi;
        let t = mulmod(diff, powmod(prod % qi, qi - 2, qi), qi);
        let add = prod.checked_mul(t)?;
        x = x.checked_add(add)?;
        if i + 1 < r.len() {
            // Two moduli multiply to under 2^124.
            prod = prod.checked_mul(qi)?;
        }
    }
    Some(x)
}
