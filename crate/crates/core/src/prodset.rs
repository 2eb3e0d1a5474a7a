//! Cardinalities of `HM = {hm}` and `M/H = {m/h}`.

use crate::error::{check_budget, Result};
use crate::modfield::{batch_inverse, PrimeContext};
use crate::sets::{Interval, ResidueSet};

/// Which size regime of the product-set estimate an instance falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `H >= p^{2/3}` and `HM >= p^{1+eps}`.
    A,
    /// `H < p^{2/3}`, `M >= p^{1/3}` and `H M^{1/4} >= p^{3/4+eps}`.
    B,
    Neither,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::A => "A",
            Branch::B => "B",
            Branch::Neither => "none",
        }
    }
}

/// Hypothesis evaluation with exponent margins: each margin is the smallest
/// `log_p(lhs) - rhs_exponent` among the branch's conditions, so a branch
/// holds iff its margin is nonnegative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hypothesis {
    pub branch: Branch,
    pub margin_a: f64,
    pub margin_b: f64,
}

pub fn hypothesis(h: u64, m: u64, p: u64, epsilon: f64) -> Hypothesis {
    let lp = (p as f64).ln();
    let eh = (h as f64).ln() / lp;
    let em = (m as f64).ln() / lp;
    // Integer forms of H >= p^{2/3} and M >= p^{1/3}.
    let h_big = (h as u128).pow(3) >= (p as u128).pow(2);
    let m_big = (m as u128).pow(3) >= p as u128;
    let tag = |holds: bool, x: f64| if holds { x.abs() } else { -x.abs().max(f64::MIN_POSITIVE) };
    let h_margin = tag(h_big, eh - 2.0 / 3.0);
    let margin_a = h_margin.min(eh + em - (1.0 + epsilon));
    let margin_b = (-h_margin)
        .min(tag(m_big, em - 1.0 / 3.0))
        .min(eh + em / 4.0 - (0.75 + epsilon));
    let branch = if margin_a >= 0.0 {
        Branch::A
    } else if margin_b >= 0.0 {
        Branch::B
    } else {
        Branch::Neither
    };
    Hypothesis {
        branch,
        margin_a,
        margin_b,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductSetReport {
    pub p: u64,
    pub h: u64,
    pub m: u64,
    pub size: u64,
    pub missing: u64,
    pub epsilon: f64,
    pub hypothesis: Hypothesis,
}

/// Factors per occupancy block.
const OCCUPANCY_BLOCK: usize = 256;

/// Packed occupancy table over `0..p`.
struct BitTable {
    words: Vec<u64>,
}

impl BitTable {
    fn new(p: u64) -> Self {
        BitTable {
            words: vec![0; (p as usize).div_ceil(64)],
        }
    }

    #[inline]
    fn set(&mut self, i: u64) {
        self.words[(i >> 6) as usize] |= 1 << (i & 63);
    }

    fn or(&mut self, other: &BitTable) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }
}

fn occupancy(
    factors: &[u64],
    set: &ResidueSet,
    ctx: &PrimeContext,
    epsilon: f64,
    budget: u64,
) -> Result<ProductSetReport> {
    let (h, m) = (factors.len() as u64, set.len() as u64);
    check_budget(h as u128 * m as u128, budget)?;
    // Each block of factors fills its own table; the tables are OR-ed.
    let blocks = factors.len().div_ceil(OCCUPANCY_BLOCK);
    let partial = crate::par::map_range(blocks, |b| {
        let mut table = BitTable::new(ctx.p());
        let end = ((b + 1) * OCCUPANCY_BLOCK).min(factors.len());
        for &x in &factors[b * OCCUPANCY_BLOCK..end] {
            for &y in set.as_slice() {
                table.set(ctx.mul(x, y));
            }
        }
        table
    });
    let mut table = BitTable::new(ctx.p());
    for t in &partial {
        table.or(t);
    }
    let size = table.count();
    Ok(ProductSetReport {
        p: ctx.p(),
        h,
        m,
        size,
        missing: ctx.p() - size,
        epsilon,
        hypothesis: hypothesis(h, m, ctx.p(), epsilon),
    })
}

/// Exact `#(HM)` by marking all `H * M` products.
pub fn product_set(
    interval: &Interval,
    set: &ResidueSet,
    ctx: &PrimeContext,
    epsilon: f64,
    budget: u64,
) -> Result<ProductSetReport> {
    occupancy(&interval.to_vec(), set, ctx, epsilon, budget)
}

/// Exact `#(M/H)`, i.e. the product set of `H^{-1}` with `M`.
pub fn ratio_set(
    interval: &Interval,
    set: &ResidueSet,
    ctx: &PrimeContext,
    epsilon: f64,
    budget: u64,
) -> Result<ProductSetReport> {
    interval.require_denominator_safe()?;
    let inv = batch_inverse(&interval.to_vec(), ctx)?;
    occupancy(&inv, set, ctx, epsilon, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{initial_interval, shifted_interval};
    use crate::Error;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    #[test]
    fn product_examples() {
        let c = ctx(7);
        let h2 = initial_interval(2, &c).unwrap();
        let m13 = ResidueSet::new(vec![1, 3], &c).unwrap();
        let r = product_set(&h2, &m13, &c, 0.05, 100).unwrap();
        assert_eq!((r.size, r.missing), (4, 3));

        let full = initial_interval(6, &c).unwrap();
        let one = ResidueSet::new(vec![1], &c).unwrap();
        let r = product_set(&full, &one, &c, 0.05, 100).unwrap();
        assert_eq!((r.size, r.missing), (6, 1));

        let c5 = ctx(5);
        let r = product_set(
            &initial_interval(1, &c5).unwrap(),
            &ResidueSet::new(vec![2], &c5).unwrap(),
            &c5,
            0.05,
            100,
        )
        .unwrap();
        assert_eq!(r.size, 1);
    }

    #[test]
    fn ratio_examples() {
        let c = ctx(7);
        let h2 = initial_interval(2, &c).unwrap();
        let m13 = ResidueSet::new(vec![1, 3], &c).unwrap();
        assert_eq!(ratio_set(&h2, &m13, &c, 0.05, 100).unwrap().size, 4);
        let h1 = initial_interval(1, &c).unwrap();
        assert_eq!(ratio_set(&h1, &m13, &c, 0.05, 100).unwrap().size, 2);
        let bad = shifted_interval(5, 3, &c, false).unwrap();
        assert!(ratio_set(&bad, &m13, &c, 0.05, 100).is_err());
    }

    #[test]
    fn shifted_interval_through_zero_marks_zero() {
        let c = ctx(7);
        let iv = shifted_interval(6, 2, &c, false).unwrap(); // {0, 1}
        let m = ResidueSet::new(vec![2], &c).unwrap();
        assert_eq!(product_set(&iv, &m, &c, 0.05, 100).unwrap().size, 2);
    }

    #[test]
    fn budget_refusal() {
        let c = ctx(101);
        let iv = initial_interval(50, &c).unwrap();
        let m = ResidueSet::full(&c);
        match product_set(&iv, &m, &c, 0.05, 10) {
            Err(Error::Budget { required, budget }) => assert_eq!((required, budget), (5000, 10)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hypothesis_branches() {
        // p = 10007: H = 465 >= p^{2/3}, M = 40, HM ~ p^{1.07}.
        assert_eq!(hypothesis(465, 40, 10007, 0.05).branch, Branch::A);
        assert_eq!(hypothesis(464, 40, 10007, 0.05).branch, Branch::Neither);
        // H < p^{2/3}, M = p-1: H M^{1/4} >= p^{0.8} needs H >= p^{0.55}.
        assert_eq!(hypothesis(200, 10006, 10007, 0.05).branch, Branch::B);
        assert_eq!(hypothesis(10, 10, 10007, 0.05).branch, Branch::Neither);
        let hy = hypothesis(465, 40, 10007, 0.05);
        assert!(hy.margin_a >= 0.0 && hy.margin_b < 0.0);
    }
}
