//! Parameter sweeps: grid expansion, per-point evaluation, reports and
//! log-log exponent fits.
//!
//! Report columns, in order:
//!
//! `index, quantity, status, reason, p, h, m, l, s, ell, k, seed, a,
//! measured, envelope, ratio, branch, hyp1, hyp2, hyp3, margin`
//!
//! `status` is `ok` or `skipped`; a skipped row carries the error code in
//! `reason` and leaves the numeric columns empty. Columns that a quantity
//! does not use are empty as well.

mod config;
mod fit;

use std::io::Write;

use rand::Rng;

pub use config::{Quantity, ShiftPolicy, SweepConfig};
pub use fit::{fit_loglog, Fit};

use crate::energy::{additive_energy_recip, energy_envelope, energy_j, energy_js, triple_r};
use crate::error::{Error, Result};
use crate::modfield::PrimeContext;
use crate::prodset::{hypothesis, product_set, Branch};
use crate::report::{Record, RecordWriter, Value};
use crate::sets::{initial_interval, instance_rng, random_subset_stream, shifted_interval};
use crate::spectra::{burgess_ratio, complete_sum_table, kloosterman_frac_sum};
use crate::tkcount::{tk_experiment, Factor, TkHypotheses, TkInputs, TkOptions};

/// RNG stream for random shifts `L`; sets use streams `0..k`.
pub const STREAM_SHIFT: u64 = 1000;
/// RNG stream for the multiplier `a` of exponential sums.
pub const STREAM_MULTIPLIER: u64 = 1001;

pub const COLUMNS: [&str; 21] = [
    "index", "quantity", "status", "reason", "p", "h", "m", "l", "s", "ell", "k", "seed", "a",
    "measured", "envelope", "ratio", "branch", "hyp1", "hyp2", "hyp3", "margin",
];

/// One grid point with its resolved parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub quantity: Quantity,
    pub p: u64,
    pub h_exp: f64,
    pub m_exp: Option<f64>,
    pub s: Option<i64>,
    pub ell: Option<u32>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub index: usize,
    pub quantity: Quantity,
    /// `None` for a completed point, otherwise the skip reason code.
    pub skipped: Option<&'static str>,
    pub p: u64,
    pub h: Option<u64>,
    pub m: Option<u64>,
    /// Shifts as reduced residues; one per factor for `tk`.
    pub l: Vec<u64>,
    pub s: Option<i64>,
    pub ell: Option<u32>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub a: Option<u64>,
    pub measured: Value,
    pub measured_f64: f64,
    pub envelope: f64,
    pub ratio: f64,
    pub branch: Option<Branch>,
    pub hyps: Vec<bool>,
    /// Smallest hypothesis margin (exponent units).
    pub margin: Option<f64>,
}

impl ReportRow {
    fn skipped(point: &GridPoint, code: &'static str) -> Self {
        ReportRow {
            index: point.index,
            quantity: point.quantity,
            skipped: Some(code),
            p: point.p,
            h: None,
            m: None,
            l: Vec::new(),
            s: point.s,
            ell: point.ell,
            k: point.k,
            seed: point.seed,
            a: None,
            measured: Value::Empty,
            measured_f64: f64::NAN,
            envelope: f64::NAN,
            ratio: f64::NAN,
            branch: None,
            hyps: Vec::new(),
            margin: None,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.skipped.is_none()
    }

    pub fn to_record(&self) -> Record {
        let ok = self.is_ok();
        let num = |x: f64| if ok { Value::Float(x) } else { Value::Empty };
        let hyp = |i: usize| self.hyps.get(i).copied().map_or(Value::Empty, Value::Bool);
        let l = match self.l.as_slice() {
            [] => Value::Empty,
            [one] => Value::from(*one),
            many => Value::Str(many.iter().map(u64::to_string).collect::<Vec<_>>().join(";")),
        };
        Record::new()
            .with("index", self.index)
            .with("quantity", self.quantity.as_str())
            .with("status", if ok { "ok" } else { "skipped" })
            .with("reason", self.skipped.unwrap_or(""))
            .with("p", self.p)
            .with("h", self.h)
            .with("m", self.m)
            .with("l", l)
            .with("s", self.s)
            .with("ell", self.ell)
            .with("k", self.k)
            .with("seed", self.seed)
            .with("a", self.a)
            .with("measured", self.measured.clone())
            .with("envelope", num(self.envelope))
            .with("ratio", num(self.ratio))
            .with("branch", self.branch.map(|b| b.as_str()))
            .with("hyp1", hyp(0))
            .with("hyp2", hyp(1))
            .with("hyp3", hyp(2))
            .with("margin", self.margin)
    }
}

/// `ceil(p^e)`, tolerant of rounding at exact powers.
pub fn size_from_exponent(p: u64, e: f64) -> u64 {
    let target = (p as f64).powf(e);
    ((target * (1.0 - 1e-12)).ceil() as u64).max(1)
}

/// Expands the grid in a fixed order: quantity, p, H exponent, M exponent,
/// s, l, k, seed. Dimensions a quantity does not use collapse to one value.
pub fn grid(cfg: &SweepConfig) -> Vec<GridPoint> {
    fn dim<T: Copy>(used: bool, values: &[T]) -> Vec<Option<T>> {
        if used {
            values.iter().copied().map(Some).collect()
        } else {
            vec![None]
        }
    }
    let mut points = Vec::new();
    for &q in &cfg.quantities {
        for &p in &cfg.primes {
            for &he in &cfg.h_exps {
                let m_exps: Vec<Option<f64>> = if !q.uses_m() {
                    vec![None]
                } else if cfg.tie_hm {
                    vec![Some(he)]
                } else {
                    cfg.m_exps.iter().copied().map(Some).collect()
                };
                for &me in &m_exps {
                    for &s in &dim(q.uses_s(), &cfg.s) {
                        for &ell in &dim(q.uses_ell(), &cfg.ell) {
                            for &k in &dim(q.uses_k(), &cfg.k) {
                                for &seed in &dim(q.uses_seed(), &cfg.seeds) {
                                    points.push(GridPoint {
                                        index: points.len(),
                                        quantity: q,
                                        p,
                                        h_exp: he,
                                        m_exp: me,
                                        s,
                                        ell,
                                        k,
                                        seed,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    points
}

/// Shifts for `count` factors under `policy`. Random shifts avoid
/// intervals through 0 when `safe` is set.
fn shifts(policy: ShiftPolicy, count: usize, h: u64, seed: u64, safe: bool, ctx: &PrimeContext) -> Result<Vec<i64>> {
    match policy {
        ShiftPolicy::Zero => Ok(vec![0; count]),
        ShiftPolicy::Explicit(l) => Ok(vec![l; count]),
        ShiftPolicy::Random => {
            let p = ctx.p();
            let mut rng = instance_rng(seed, STREAM_SHIFT);
            (0..count)
                .map(|_| {
                    for _ in 0..256 {
                        let l = rng.gen_range(0..p);
                        if !safe || shifted_interval(l as i64, h, ctx, true).is_ok() {
                            return Ok(l as i64);
                        }
                    }
                    Err(Error::domain("no denominator-safe random shift found"))
                })
                .collect()
        }
    }
}

fn evaluate(point: &GridPoint, cfg: &SweepConfig) -> Result<ReportRow> {
    let ctx = PrimeContext::new(point.p)?;
    let p = point.p;
    let h = size_from_exponent(p, point.h_exp);
    let m = point.m_exp.map(|e| size_from_exponent(p, e));
    let seed = point.seed.unwrap_or(0);
    let budget = cfg.budget;
    let mut row = ReportRow::skipped(point, "");
    row.skipped = None;
    row.h = Some(h);
    row.m = m;
    let set = |stream: u64| random_subset_stream(m.unwrap_or(1), seed, stream, &ctx);
    let finish = |row: &mut ReportRow, measured: Value, x: f64, env: f64| {
        row.measured = measured;
        row.measured_f64 = x;
        row.envelope = env;
        row.ratio = x / env;
    };
    match point.quantity {
        Quantity::ProdSet => {
            let r = product_set(&initial_interval(h, &ctx)?, &set(0)?, &ctx, cfg.epsilon, budget)?;
            finish(&mut row, Value::from(r.missing), r.missing as f64, p as f64);
            row.branch = Some(r.hypothesis.branch);
            row.margin = Some(r.hypothesis.margin_a.max(r.hypothesis.margin_b));
        }
        Quantity::Energy => {
            let m = m.expect("energy uses M");
            let j = energy_j(&initial_interval(h, &ctx)?, &set(0)?, &ctx, budget)?;
            finish(&mut row, Value::from(j), j as f64, energy_envelope(h, m, p));
        }
        Quantity::EnergyS => {
            let m = m.expect("energy_s uses M");
            let s = point.s.expect("energy_s uses s");
            let l = shifts(cfg.l_policy, 1, h, seed, s > 0, &ctx)?[0];
            let x = shifted_interval(l, h, &ctx, s > 0)?;
            row.l = vec![x.shift()];
            let j = energy_js(&x, &set(0)?, s, &ctx, budget)?;
            finish(&mut row, Value::from(j), j as f64, energy_envelope(h, m, p));
        }
        Quantity::Triple => {
            let j_len = size_from_exponent(p, 1.0 / cfg.r as f64);
            let t = triple_r(j_len, h, &set(0)?, &ctx, budget)?;
            finish(&mut row, Value::from(t.r), t.r as f64, t.main_term);
            let hyp = hypothesis(h, m.expect("triple uses M"), p, 0.0);
            row.branch = Some(hyp.branch);
            row.margin = Some(hyp.margin_a.max(hyp.margin_b));
        }
        Quantity::Recip => {
            let s = point.s.expect("recip uses s");
            let ell = point.ell.expect("recip uses l");
            let l = shifts(cfg.l_policy, 1, h, seed, true, &ctx)?[0];
            let x = shifted_interval(l, h, &ctx, true)?;
            row.l = vec![x.shift()];
            let r = additive_energy_recip(&x, s, ell, &ctx, budget)?;
            finish(&mut row, Value::from(r.energy), r.energy as f64, r.envelope);
        }
        Quantity::ExpSum => {
            let s = point.s.expect("expsum uses s");
            let ell = point.ell.expect("expsum uses l");
            let l = shifts(cfg.l_policy, 1, h, seed, true, &ctx)?[0];
            let x = shifted_interval(l, h, &ctx, true)?;
            row.l = vec![x.shift()];
            let a = instance_rng(seed, STREAM_MULTIPLIER).gen_range(1..p);
            row.a = Some(a);
            let table = complete_sum_table(&x, s, &ctx, budget)?;
            let r = kloosterman_frac_sum(a, &set(0)?, &table, &ctx);
            finish(&mut row, Value::from(r.value), r.value, r.envelope(ell));
        }
        Quantity::Tk => {
            let m_len = m.expect("tk uses M");
            let s = point.s.expect("tk uses s");
            let k = point.k.expect("tk uses k");
            let ls = shifts(cfg.l_policy, k, h, seed, true, &ctx)?;
            let factors = ls
                .iter()
                .enumerate()
                .map(|(i, &shift)| Ok(Factor { set: set(i as u64)?, shift }))
                .collect::<Result<Vec<_>>>()?;
            let opts = TkOptions {
                epsilon: cfg.epsilon,
                budget,
                ..TkOptions::default()
            };
            let r = tk_experiment(&TkInputs { factors, h, s }, &ctx, &opts)?;
            row.l = r.shifts.clone();
            finish(&mut row, Value::from(r.max_abs_dev), r.max_abs_dev, 1.0);
            let hyp = TkHypotheses::new(h, m_len, p, cfg.epsilon);
            row.hyps = hyp.flags().to_vec();
            row.margin = Some(hyp.margins.iter().copied().fold(f64::INFINITY, f64::min));
        }
        Quantity::Burgess => {
            let r = burgess_ratio(h, &ctx)?;
            finish(&mut row, Value::from(r.max_abs), r.max_abs, (h as f64).sqrt() * (p as f64).powf(3.0 / 16.0));
        }
    }
    Ok(row)
}

/// Evaluates one grid point; errors become skipped rows.
pub fn run_point(point: &GridPoint, cfg: &SweepConfig) -> ReportRow {
    evaluate(point, cfg).unwrap_or_else(|e| ReportRow::skipped(point, e.code()))
}

/// Runs the sweep, handing rows to `sink` in grid order as soon as each
/// block of points is done.
pub fn run_sweep_with(cfg: &SweepConfig, mut sink: impl FnMut(&ReportRow) -> Result<()>) -> Result<()> {
    cfg.validate()?;
    let points = grid(cfg);
    let workers = crate::par::Workers::new(cfg.workers);
    let block = (workers.num_threads() * 2).max(1);
    for chunk in points.chunks(block) {
        let rows = workers.install(|| crate::par::map_collect(chunk.to_vec(), |pt| run_point(&pt, cfg)));
        for row in &rows {
            sink(row)?;
        }
    }
    Ok(())
}

/// Runs the sweep and collects every row.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    run_sweep_with(cfg, |r| {
        rows.push(r.clone());
        Ok(())
    })?;
    Ok(rows)
}

/// Runs the sweep and streams the report to `out`.
pub fn write_sweep<W: Write>(cfg: &SweepConfig, out: W) -> Result<Vec<ReportRow>> {
    let io_err = |source| Error::Io {
        path: cfg.out.clone().unwrap_or_else(|| "<stdout>".into()),
        source,
    };
    let mut writer = RecordWriter::new(out, cfg.format);
    writer.write_header(&COLUMNS).map_err(io_err)?;
    let mut rows = Vec::new();
    run_sweep_with(cfg, |r| {
        writer.write(&r.to_record()).map_err(io_err)?;
        writer.flush().map_err(io_err)?;
        rows.push(r.clone());
        Ok(())
    })?;
    writer.flush().map_err(io_err)?;
    Ok(rows)
}

/// Per-quantity maximum of `ratio` over completed rows: the sweep's fitted
/// constant for each envelope.
pub fn fitted_constants(rows: &[ReportRow]) -> Vec<(Quantity, f64)> {
    let mut out: Vec<(Quantity, f64)> = Vec::new();
    for r in rows.iter().filter(|r| r.is_ok() && r.ratio.is_finite()) {
        match out.iter_mut().find(|(q, _)| *q == r.quantity) {
            Some((_, c)) => *c = c.max(r.ratio),
            None => out.push((r.quantity, r.ratio)),
        }
    }
    out
}

/// Least-squares fit of `ln y` against `ln x` over the rows where both
/// extractors return a value.
pub fn fit_exponent(
    rows: &[ReportRow],
    x_expr: impl Fn(&ReportRow) -> Option<f64>,
    y_expr: impl Fn(&ReportRow) -> Option<f64>,
) -> Result<Fit> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| Some((x_expr(r)?, y_expr(r)?)))
        .collect();
    fit_loglog(&points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::random_subset;

    #[test]
    fn exponent_sizes() {
        assert_eq!(size_from_exponent(10007, 0.55), 159);
        assert_eq!(size_from_exponent(30011, 0.55), 291);
        assert_eq!(size_from_exponent(100003, 0.55), 563);
        assert_eq!(size_from_exponent(10007, 2.0 / 3.0), 465);
        assert_eq!(size_from_exponent(100003, 0.4), 101);
        assert_eq!(size_from_exponent(101, 0.5), 11);
        assert_eq!(size_from_exponent(10201, 0.5), 101);
        assert_eq!(size_from_exponent(1024, 0.5), 32);
        assert_eq!(size_from_exponent(7, 0.0), 1);
    }

    #[test]
    fn empty_grid() {
        let cfg = SweepConfig::default();
        assert!(run_sweep(&cfg).unwrap().is_empty());
        let mut buf = Vec::new();
        write_sweep(&cfg, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), COLUMNS.join(",") + "\n");
    }

    #[test]
    fn grid_collapses_unused_dimensions() {
        let cfg = SweepConfig {
            primes: vec![101, 103],
            s: vec![1, 2],
            ell: vec![2, 3],
            seeds: vec![1, 2, 3],
            quantities: vec![Quantity::Burgess, Quantity::ProdSet, Quantity::ExpSum],
            ..SweepConfig::default()
        };
        let g = grid(&cfg);
        assert_eq!(g.len(), 2 + 2 * 3 + 2 * 2 * 2 * 3);
        assert!(g.iter().enumerate().all(|(i, p)| p.index == i));
    }

    #[test]
    fn single_point_matches_direct_call() {
        let cfg = SweepConfig {
            primes: vec![1009],
            h_exps: vec![0.6],
            m_exps: vec![0.4],
            seeds: vec![5],
            quantities: vec![Quantity::Energy, Quantity::ProdSet],
            ..SweepConfig::default()
        };
        let rows = run_sweep(&cfg).unwrap();
        let ctx = PrimeContext::new(1009).unwrap();
        let (h, m) = (size_from_exponent(1009, 0.6), size_from_exponent(1009, 0.4));
        let set = random_subset(m, 5, &ctx).unwrap();
        let x = initial_interval(h, &ctx).unwrap();
        let j = energy_j(&x, &set, &ctx, u64::MAX).unwrap();
        assert_eq!(rows[0].measured, Value::from(j));
        let ps = product_set(&x, &set, &ctx, 0.05, u64::MAX).unwrap();
        assert_eq!(rows[1].measured, Value::from(ps.missing));
    }

    #[test]
    fn failures_become_skipped_rows() {
        let cfg = SweepConfig {
            primes: vec![100, 101],
            budget: 10,
            quantities: vec![Quantity::ProdSet],
            ..SweepConfig::default()
        };
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows[0].skipped, Some("domain"));
        assert_eq!(rows[1].skipped, Some("budget"));
        let rec = rows[1].to_record();
        assert_eq!(rec.get("status"), Some(&Value::from("skipped")));
        assert_eq!(rec.get("measured"), Some(&Value::Empty));
    }

    #[test]
    fn fit_from_rows() {
        let rows: Vec<ReportRow> = [2.0f64, 4.0, 8.0]
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let pt = GridPoint {
                    index: i,
                    quantity: Quantity::ProdSet,
                    p: x as u64,
                    h_exp: 0.5,
                    m_exp: None,
                    s: None,
                    ell: None,
                    k: None,
                    seed: None,
                };
                let mut r = ReportRow::skipped(&pt, "");
                r.skipped = None;
                r.measured_f64 = x * x;
                r
            })
            .collect();
        let f = fit_exponent(&rows, |r| Some(r.p as f64), |r| Some(r.measured_f64)).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
    }
}
