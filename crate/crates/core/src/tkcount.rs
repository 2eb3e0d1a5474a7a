//! `T_k(lambda)`: the number of `k`-tuples with
//! `m_1/x_1^s + ... + m_k/x_k^s = lambda (mod p)`, `m_i` in `M_i`,
//! `x_i` in `L_i + {1..H}`.
//!
//! The exact route is the k-fold cyclic convolution of the per-factor count
//! vectors. [`tk_spectral_check`] recomputes sampled values from complete
//! exponential sums as an independent cross-check.

use num_complex::Complex64;

use crate::convolve::{k_fold_count, ConvolutionPlan, Strategy};
use crate::energy::{count_vector_product, CountVector};
use crate::error::{Error, Result};
use crate::modfield::PrimeContext;
use crate::sets::{shifted_interval, ResidueSet};
use crate::spectra::complete_sum_table;

/// Largest `p` accepted by the spectral cross-check.
pub const SPECTRAL_MAX_P: u64 = 10_000;

#[derive(Debug, Clone)]
pub struct Factor {
    pub set: ResidueSet,
    pub shift: i64,
}

#[derive(Debug, Clone)]
pub struct TkInputs {
    pub factors: Vec<Factor>,
    pub h: u64,
    pub s: i64,
}

impl TkInputs {
    pub fn k(&self) -> usize {
        self.factors.len()
    }

    /// Same set and shift for every factor.
    pub fn uniform(k: usize, set: ResidueSet, shift: i64, h: u64, s: i64) -> Self {
        TkInputs {
            factors: vec![Factor { set, shift }; k],
            h,
            s,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TkOptions {
    pub epsilon: f64,
    /// Allow `#M_i` to differ.
    pub allow_unequal: bool,
    pub budget: u64,
    pub lambdas: Vec<u64>,
}

impl Default for TkOptions {
    fn default() -> Self {
        TkOptions {
            epsilon: 0.05,
            allow_unequal: false,
            budget: crate::DEFAULT_BUDGET,
            lambdas: Vec::new(),
        }
    }
}

/// The three size conditions of the six-term asymptotic, as exponent
/// margins `log_p(lhs) - (1 + eps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TkHypotheses {
    pub margins: [f64; 3],
}

impl TkHypotheses {
    pub fn new(h: u64, m: u64, p: u64, epsilon: f64) -> Self {
        let lp = (p as f64).ln();
        let eh = (h as f64).ln() / lp;
        let em = (m as f64).ln() / lp;
        let target = 1.0 + epsilon;
        TkHypotheses {
            margins: [
                24.0 / 17.0 * eh + 11.0 / 17.0 * em - target,
                9.0 / 5.0 * eh + 2.0 / 5.0 * em - target,
                6.0 / 5.0 * eh + em - target,
            ],
        }
    }

    pub fn flags(&self) -> [bool; 3] {
        self.margins.map(|m| m > 0.0)
    }

    pub fn all(&self) -> bool {
        self.flags().iter().all(|&f| f)
    }
}

#[derive(Debug, Clone)]
pub struct TkReport {
    pub k: usize,
    pub p: u64,
    pub h: u64,
    pub s: i64,
    pub set_sizes: Vec<u64>,
    pub shifts: Vec<u64>,
    /// Main term `main_num / p` with `main_num = prod_i H #M_i`.
    pub main_num: u128,
    pub t: CountVector,
    pub max_abs_dev: f64,
    pub mean_abs_dev: f64,
    /// `(lambda, T_k(lambda), dev(lambda))` at the requested points.
    pub sampled: Vec<(u64, u128, f64)>,
    pub hypotheses: TkHypotheses,
    pub epsilon: f64,
    pub strategy: Strategy,
    /// Set sizes differ, outside the equal-size asymptotic.
    pub unequal_sizes: bool,
    /// `k = 5`, the open-question case.
    pub open_question: bool,
}

impl TkReport {
    /// `T_k(lambda) p / main_num - 1`.
    pub fn dev(&self, lambda: u64) -> f64 {
        relative_dev(self.t.get(lambda), self.p, self.main_num)
    }

    pub fn main_term(&self) -> f64 {
        self.main_num as f64 / self.p as f64
    }
}

fn relative_dev(t: u128, p: u64, main: u128) -> f64 {
    match t.checked_mul(p as u128) {
        Some(tp) if tp >= main => (tp - main) as f64 / main as f64,
        Some(tp) => -((main - tp) as f64 / main as f64),
        None => t as f64 * p as f64 / main as f64 - 1.0,
    }
}

fn factor_vectors(inputs: &TkInputs, ctx: &PrimeContext, opts: &TkOptions) -> Result<Vec<CountVector>> {
    if inputs.k() < 2 {
        return Err(Error::domain(format!("k must be at least 2, got {}", inputs.k())));
    }
    let m0 = inputs.factors[0].set.len();
    if !opts.allow_unequal && inputs.factors.iter().any(|f| f.set.len() != m0) {
        return Err(Error::domain(
            "sets M_i have different sizes; pass the unequal-sizes flag to allow it",
        ));
    }
    inputs
        .factors
        .iter()
        .map(|f| {
            let x = shifted_interval(f.shift, inputs.h, ctx, true)?;
            count_vector_product(&x, &f.set, inputs.s, ctx, opts.budget)
        })
        .collect()
}

/// Computes `T_k(lambda)` for every `lambda` and summarizes the deviation
/// from the main term `prod(H #M_i) / p`.
pub fn tk_experiment(inputs: &TkInputs, ctx: &PrimeContext, opts: &TkOptions) -> Result<TkReport> {
    let vectors = factor_vectors(inputs, ctx, opts)?;
    let masses: Vec<u128> = vectors.iter().map(|v| v.total()).collect();
    let plan = ConvolutionPlan::select(ctx.p(), &masses)?;
    let t = k_fold_count(&vectors, &plan)?;
    let main_num = plan.bound();
    if t.total() != main_num {
        return Err(Error::Invariant(format!(
            "sum of T_k = {} differs from prod(H M_i) = {main_num}",
            t.total()
        )));
    }
    let p = ctx.p();
    let (mut max_abs, mut sum_abs) = (0.0f64, 0.0f64);
    for &c in t.counts() {
        let d = relative_dev(c, p, main_num).abs();
        max_abs = max_abs.max(d);
        sum_abs += d;
    }
    let mut sampled = Vec::with_capacity(opts.lambdas.len());
    for &l in &opts.lambdas {
        if l >= p {
            return Err(Error::domain(format!("lambda {l} is not reduced mod {p}")));
        }
        sampled.push((l, t.get(l), relative_dev(t.get(l), p, main_num)));
    }
    let set_sizes: Vec<u64> = inputs.factors.iter().map(|f| f.set.len() as u64).collect();
    let m_min = *set_sizes.iter().min().expect("k >= 2");
    Ok(TkReport {
        k: inputs.k(),
        p,
        h: inputs.h,
        s: inputs.s,
        unequal_sizes: set_sizes.iter().any(|&m| m != set_sizes[0]),
        set_sizes,
        shifts: inputs.factors.iter().map(|f| ctx.reduce(f.shift as i128)).collect(),
        main_num,
        t,
        max_abs_dev: max_abs,
        mean_abs_dev: sum_abs / p as f64,
        sampled,
        hypotheses: TkHypotheses::new(inputs.h, m_min, p, opts.epsilon),
        epsilon: opts.epsilon,
        strategy: plan.strategy(),
        open_question: inputs.k() == 5,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResidual {
    pub lambda: u64,
    pub exact: u128,
    pub spectral: f64,
    pub residual: f64,
}

/// `T_k(lambda) = (1/p) sum_a prod_i (sum_{m in M_i} W_i[a m]) e_p(-a lambda)`
/// at each sampled `lambda`, compared with the exact route.
pub fn tk_spectral_check(
    inputs: &TkInputs,
    lambdas: &[u64],
    ctx: &PrimeContext,
    opts: &TkOptions,
) -> Result<Vec<SpectralResidual>> {
    let p = ctx.p();
    if p > SPECTRAL_MAX_P {
        return Err(Error::domain(format!(
            "spectral check limited to p <= {SPECTRAL_MAX_P}"
        )));
    }
    let report = tk_experiment(inputs, ctx, opts)?;
    let per_factor: Vec<Vec<Complex64>> = inputs
        .factors
        .iter()
        .map(|f| {
            let x = shifted_interval(f.shift, inputs.h, ctx, true)?;
            let table = complete_sum_table(&x, inputs.s, ctx, opts.budget)?;
            Ok((0..p)
                .map(|a| {
                    f.set
                        .as_slice()
                        .iter()
                        .map(|&m| table.get(ctx.mul(a, m)))
                        .sum::<Complex64>()
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let products: Vec<Complex64> = (0..p as usize)
        .map(|a| per_factor.iter().map(|f| f[a]).product())
        .collect();
    lambdas
        .iter()
        .map(|&lambda| {
            if lambda >= p {
                return Err(Error::domain(format!("lambda {lambda} is not reduced mod {p}")));
            }
            let sum: Complex64 = products
                .iter()
                .enumerate()
                .map(|(a, &z)| z * ctx.e_p(-(a as i128) * lambda as i128))
                .sum();
            let spectral = sum.re / p as f64;
            let exact = report.t.get(lambda);
            Ok(SpectralResidual {
                lambda,
                exact,
                spectral,
                residual: (spectral - exact as f64).abs(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::random_subset;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    #[test]
    fn six_fold_binomial_example() {
        let c = ctx(3);
        let one = ResidueSet::new(vec![1], &c).unwrap();
        let inputs = TkInputs::uniform(6, one, 0, 2, 1);
        let r = tk_experiment(&inputs, &c, &TkOptions::default()).unwrap();
        assert_eq!(r.t.counts(), &[22, 21, 21]);
        assert_eq!(r.main_num, 64);
        assert!((r.dev(0) - (22.0 * 3.0 / 64.0 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn single_tuple_examples() {
        let c = ctx(7);
        let one = ResidueSet::new(vec![1], &c).unwrap();
        let r = tk_experiment(&TkInputs::uniform(2, one.clone(), 0, 1, 1), &c, &TkOptions::default()).unwrap();
        assert_eq!(r.t.counts(), &[0, 0, 1, 0, 0, 0, 0]);
        let r = tk_experiment(&TkInputs::uniform(6, one, 0, 1, 1), &c, &TkOptions::default()).unwrap();
        assert_eq!(r.t.get(6), 1);
        assert_eq!(r.t.total(), 1);
    }

    #[test]
    fn unequal_sets_need_flag() {
        let c = ctx(31);
        let a = random_subset(3, 1, &c).unwrap();
        let b = random_subset(4, 2, &c).unwrap();
        let inputs = TkInputs {
            factors: vec![Factor { set: a, shift: 0 }, Factor { set: b, shift: 5 }],
            h: 4,
            s: 2,
        };
        assert!(tk_experiment(&inputs, &c, &TkOptions::default()).is_err());
        let opts = TkOptions {
            allow_unequal: true,
            ..TkOptions::default()
        };
        let r = tk_experiment(&inputs, &c, &opts).unwrap();
        assert!(r.unequal_sizes);
        assert_eq!(r.t.total(), 12 * 16);
    }

    #[test]
    fn spectral_route_agrees() {
        let c = ctx(101);
        let factors = (0..6)
            .map(|i| Factor {
                set: random_subset(8, 100 + i, &c).unwrap(),
                shift: 7 * i as i64,
            })
            .collect();
        let inputs = TkInputs { factors, h: 8, s: 1 };
        let lambdas: Vec<u64> = (0..101).step_by(10).collect();
        for r in tk_spectral_check(&inputs, &lambdas, &c, &TkOptions::default()).unwrap() {
            assert!(r.residual < 1e-3, "{r:?}");
        }
    }

    #[test]
    fn k2_tiny_case() {
        // 1/1 + 1/1 = 2 is the only tuple.
        let c = ctx(5);
        let one = ResidueSet::new(vec![1], &c).unwrap();
        let inputs = TkInputs::uniform(2, one, 0, 1, 1);
        let res = tk_spectral_check(&inputs, &[2, 3], &c, &TkOptions::default()).unwrap();
        assert!((res[0].spectral - 1.0).abs() < 1e-12);
        assert!(res[1].spectral.abs() < 1e-12);
    }

    #[test]
    fn hypotheses_at_p055() {
        for p in [10007u64, 30011, 100003] {
            let h = (p as f64).powf(0.55).ceil() as u64;
            assert!(TkHypotheses::new(h, h, p, 0.05).all());
        }
        assert!(!TkHypotheses::new(10, 10, 10007, 0.05).all());
    }
}
