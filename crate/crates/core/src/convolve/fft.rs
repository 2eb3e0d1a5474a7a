//! Floating-point transforms built on `rustfft`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Below this length the prime-length transform is evaluated directly.
pub(crate) const DIRECT_DFT_MAX: usize = 64;

/// `out[c] = sum_j u[j] exp(+2 pi i c j / n)` for any length (unnormalized).
pub fn dft_plus(u: &[Complex64]) -> Vec<Complex64> {
    let mut buf = u.to_vec();
    if buf.is_empty() {
        return buf;
    }
    FftPlanner::<f64>::new()
        .plan_fft_inverse(buf.len())
        .process(&mut buf);
    buf
}

/// Forward (`exp(-...)`) transform in place, power-of-two or any length.
pub(crate) fn fft_forward(buf: &mut [Complex64]) {
    FftPlanner::<f64>::new()
        .plan_fft_forward(buf.len())
        .process(buf);
}

/// Unnormalized inverse (`exp(+...)`) transform in place.
pub(crate) fn fft_inverse(buf: &mut [Complex64]) {
    FftPlanner::<f64>::new()
        .plan_fft_inverse(buf.len())
        .process(buf);
}

/// Naive `O(n^2)` evaluation of `sum_j u[j] exp(+2 pi i c j / n)`.
pub(crate) fn direct_dft_plus(u: &[Complex64]) -> Vec<Complex64> {
    let n = u.len();
    (0..n)
        .map(|c| {
            u.iter()
                .enumerate()
                .map(|(j, &x)| {
                    let k = (c * j) % n;
                    x * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
                })
                .sum()
        })
        .collect()
}

/// Chirp-z evaluation of `sum_j u[j] exp(+2 pi i c j / n)` using the
/// identity `cj = (c^2 + j^2 - (c-j)^2) / 2` and one power-of-two cyclic
/// convolution of length at least `2n - 1`.
pub(crate) fn chirp_dft_plus(u: &[Complex64]) -> Vec<Complex64> {
    let n = u.len();
    let two_n = 2 * n as u128;
    // chirp[j] = exp(pi i j^2 / n); j^2 reduced mod 2n keeps the angle small.
    let chirp: Vec<Complex64> = (0..n)
        .map(|j| {
            let r = (j as u128 * j as u128 % two_n) as f64;
            Complex64::from_polar(1.0, PI * r / n as f64)
        })
        .collect();
    let len = (2 * n - 1).next_power_of_two();
    let mut a = vec![Complex64::new(0.0, 0.0); len];
    for j in 0..n {
        a[j] = u[j] * chirp[j];
    }
    let mut b = vec![Complex64::new(0.0, 0.0); len];
    b[0] = chirp[0].conj();
    for j in 1..n {
        b[j] = chirp[j].conj();
        b[len - j] = chirp[j].conj();
    }
    fft_forward(&mut a);
    fft_forward(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= *y;
    }
    fft_inverse(&mut a);
    let scale = 1.0 / len as f64;
    (0..n).map(|c| a[c] * scale * chirp[c]).collect()
}
