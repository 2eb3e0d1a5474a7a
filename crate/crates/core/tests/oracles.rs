//! Fast kernels against the brute-force references on small random
//! instances.

use fplab::energy::{additive_energy_recip, energy_j, energy_js, energy_shifted, triple_r};
use fplab::modfield::PrimeContext;
use fplab::oracle;
use fplab::prodset::{product_set, ratio_set};
use fplab::sets::{initial_interval, random_subset_stream, shifted_interval};
use fplab::spectra::{char_spectrum, complete_sum_table};
use fplab::tkcount::{tk_experiment, Factor, TkInputs, TkOptions};
use proptest::prelude::*;

const SMALL_PRIMES: [u64; 10] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31];

fn ctx(p: u64) -> PrimeContext {
    PrimeContext::new(p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_and_ratio_sets(pi in 0usize..10, h in 1u64..40, m in 1u64..40, seed: u64) {
        let p = SMALL_PRIMES[pi];
        let c = ctx(p);
        let (h, m) = (1 + h % (p - 1), 1 + m % (p - 1));
        let set = random_subset_stream(m, seed, 0, &c).unwrap();
        let x = initial_interval(h, &c).unwrap();
        prop_assert_eq!(product_set(&x, &set, &c, 0.05, u64::MAX).unwrap().size, oracle::product_set_size(&x, &set, p));
        prop_assert_eq!(ratio_set(&x, &set, &c, 0.05, u64::MAX).unwrap().size, oracle::ratio_set_size(&x, &set, &c));
    }

    #[test]
    fn energies(pi in 0usize..10, h in 1u64..40, m in 1u64..40, l in 0i64..40, s in 1i64..5, seed: u64) {
        let p = SMALL_PRIMES[pi];
        let c = ctx(p);
        let (h, m) = (1 + h % (p - 1), 1 + m % (p - 1));
        let set = random_subset_stream(m, seed, 0, &c).unwrap();
        let x = shifted_interval(l, h, &c, false).unwrap();
        prop_assert_eq!(energy_shifted(&x, &set, &c, u64::MAX).unwrap(), oracle::energy_shifted(&x, &set, p));
        let x0 = initial_interval(h, &c).unwrap();
        prop_assert_eq!(energy_j(&x0, &set, &c, u64::MAX).unwrap(), oracle::energy_shifted(&x0, &set, p));
        if x.is_denominator_safe() {
            prop_assert_eq!(energy_js(&x, &set, s, &c, u64::MAX).unwrap(), oracle::energy_js(&x, &set, s, &c));
        }
        let j = 1 + (seed % 5).min(p - 2);
        prop_assert_eq!(triple_r(j, h, &set, &c, u64::MAX).unwrap().r, oracle::triple_r(j, h, &set, p));
    }

    #[test]
    fn complete_sums(pi in 0usize..10, h in 1u64..40, l in 0i64..40, s in -3i64..4) {
        prop_assume!(s != 0);
        let p = SMALL_PRIMES[pi];
        let c = ctx(p);
        let h = 1 + h % (p - 1);
        let Ok(x) = shifted_interval(l, h, &c, true) else { return Ok(()) };
        let t = complete_sum_table(&x, s, &c, u64::MAX).unwrap();
        for a in 0..p {
            prop_assert!((t.get(a) - oracle::complete_sum(&x, s, a, &c)).norm() < 1e-9);
        }
    }

    #[test]
    fn character_sums(p in prop::sample::select(vec![3u64, 5, 13, 31, 61, 101, 257]), m in 1u64..300, seed: u64) {
        let c = ctx(p);
        let set = random_subset_stream(1 + m % (p - 1), seed, 0, &c).unwrap();
        let spec = char_spectrum(set.as_slice(), &c).unwrap();
        for t in 0..p - 1 {
            prop_assert!((spec.get(t as usize) - oracle::char_sum(set.as_slice(), t, &c)).norm() < 1e-8);
        }
    }
}

#[test]
fn recip_energy_small() {
    for (i, &p) in [5u64, 7, 11, 13, 17, 19, 23, 29, 31].iter().enumerate() {
        let c = ctx(p);
        for ell in 1..=3u32 {
            let hmax = [p - 1, 12, 7][ell as usize - 1].min(p - 1);
            for h in [1, hmax / 2 + 1, hmax] {
                for s in [1i64, 2, -1] {
                    let x = shifted_interval(i as i64, h, &c, false).unwrap();
                    if !x.is_denominator_safe() {
                        continue;
                    }
                    let fast = additive_energy_recip(&x, s, ell, &c, u64::MAX).unwrap();
                    assert_eq!(fast.energy, oracle::recip_energy(&x, s, ell, &c), "p={p} h={h} l={ell} s={s}");
                }
            }
        }
    }
}

#[test]
fn tk_small() {
    for seed in 0..40u64 {
        let p = SMALL_PRIMES[2 + (seed % 8) as usize];
        let c = ctx(p);
        let k = 2 + (seed % 5) as usize;
        let h = 1 + seed % 4.min(p - 1);
        let m = 1 + (seed / 3) % 3;
        let factors: Vec<Factor> = (0..k)
            .map(|i| Factor {
                set: random_subset_stream(m, seed, i as u64, &c).unwrap(),
                shift: (seed as i64 * 7 + i as i64) % p as i64,
            })
            .filter(|f| shifted_interval(f.shift, h, &c, true).is_ok())
            .collect();
        if factors.len() < 2 {
            continue;
        }
        let inputs = TkInputs { factors, h, s: 1 + (seed % 3) as i64 };
        let r = tk_experiment(&inputs, &c, &TkOptions::default()).unwrap();
        assert_eq!(r.t.counts(), oracle::tk_counts(&inputs, &c).as_slice(), "seed {seed}");
    }
}
