//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or internal failure, 2 usage or input
//! error, 3 work budget or capacity refusal.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::convolve::{k_fold_count, ConvolutionPlan};
use crate::energy::{
    additive_energy_recip, count_vector_product, energy_envelope, energy_j, energy_js, energy_shifted, triple_r,
    CountVector,
};
use crate::error::Error;
use crate::modfield::{mod_pow, PrimeContext};
use crate::prodset::{product_set, ratio_set};
use crate::report::{Format, Record, RecordWriter, Value};
use crate::sets::{initial_interval, random_subset_stream, set_from_file, shifted_interval, Interval, ResidueSet};
use crate::spectra::{char_spectrum, complete_sum_table, kloosterman_frac_sum};
use crate::tkcount::{tk_experiment, Factor, TkInputs, TkOptions};
use crate::{oracle, verify, DEFAULT_BUDGET};

/// Largest `p` for which `tk` prints the whole `T_k` vector.
pub const FULL_VECTOR_MAX_P: u64 = 1024;

#[derive(Debug, Parser)]
#[command(name = "fplab", version, about = "Exact counts and exponential sums over F_p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sizes of the product set HM and the ratio set M/H.
    Prodset(Common),
    /// Multiplicative and additive energies.
    Energy(EnergyArgs),
    /// Kloosterman-fraction sum over M and an interval.
    Expsum(ExpsumArgs),
    /// Distribution of sums of k fractions.
    Tk(TkArgs),
    /// Parameter sweep from a config file.
    Sweep(SweepArgs),
    /// Small-instance oracle comparisons for every module.
    Selftest(OutArgs),
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Prime modulus.
    #[arg(long)]
    pub p: u64,
    /// Interval length.
    #[arg(long = "H")]
    pub h: u64,
    /// Interval shift; `tk` takes one value or one per factor, comma separated.
    #[arg(long = "L", default_value = "0", allow_hyphen_values = true)]
    pub l: String,
    /// Exponent in `x^{-s}`.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub s: i64,
    #[arg(long, default_value_t = 2)]
    pub ell: u32,
    #[arg(long, default_value_t = 6)]
    pub k: usize,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// `file:PATH` or `random:M`; `tk` accepts one per factor.
    #[arg(long)]
    pub set: Vec<String>,
    /// Seed for random sets (required by `random:M`).
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutArgs,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnergyKind {
    /// `J(H, M)` over `{1..H}`.
    J,
    /// `J(L, H, M)` over a shifted block, with the sliding bound `2J + M^2`.
    Jl,
    /// `J_s(L, H, M)` together with `J_{-s}`.
    Js,
    /// `R(J, K, M)` with `K = H`.
    R,
    /// `J_{l,s}` of a shifted block.
    Recip,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    #[arg(long, value_enum, default_value = "j")]
    pub kind: EnergyKind,
    /// Length of the first interval for `--kind r`.
    #[arg(long = "J")]
    pub j_len: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ExpsumArgs {
    /// Multiplier `a`.
    #[arg(long)]
    pub a: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TkArgs {
    /// Values of lambda to report individually, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Vec<u64>,
    /// Allow sets of different sizes.
    #[arg(long)]
    pub allow_unequal: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's `out`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the config's `format`.
    #[arg(long)]
    pub format: Option<Format>,
    /// Overrides the config's `workers`.
    #[arg(long)]
    pub workers: Option<usize>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn from_error(context: &str, e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::ZeroInverse { .. } | Error::Parse { .. } | Error::Config(_) => 2,
            Error::Budget { .. } | Error::Overflow { .. } => 3,
            Error::Io { .. } | Error::Invariant(_) => 1,
        };
        let message = if context.is_empty() {
            e.to_string()
        } else {
            format!("{context}: {e}")
        };
        Failure { code, message }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

trait Context<T> {
    fn ctx(self, context: &str) -> CliResult<T>;
}

impl<T> Context<T> for crate::Result<T> {
    fn ctx(self, context: &str) -> CliResult<T> {
        self.map_err(|e| Failure::from_error(context, e))
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Reports go to `stdout` unless `--out` is given.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<i32> {
    match cmd {
        Command::Prodset(c) => {
            let rec = cmd_prodset(&c)?;
            emit(&c.output, &[rec], stdout)?;
        }
        Command::Energy(a) => {
            let rec = cmd_energy(&a)?;
            emit(&a.common.output, &[rec], stdout)?;
        }
        Command::Expsum(a) => {
            let rec = cmd_expsum(&a)?;
            emit(&a.common.output, &[rec], stdout)?;
        }
        Command::Tk(a) => {
            let rec = cmd_tk(&a)?;
            emit(&a.common.output, &[rec], stdout)?;
        }
        Command::Sweep(a) => cmd_sweep(&a, stdout, stderr)?,
        Command::Selftest(o) => {
            let records = selftest();
            let failed = records
                .iter()
                .filter(|r| r.get("status") != Some(&Value::from("pass")))
                .count();
            emit(&o, &records, stdout)?;
            if failed > 0 {
                let _ = writeln!(stderr, "selftest: {failed} check(s) failed");
                return Ok(1);
            }
        }
    }
    Ok(0)
}

fn open_out(path: &Option<PathBuf>) -> CliResult<Option<BufWriter<File>>> {
    path.as_ref()
        .map(|p| {
            File::create(p).map(BufWriter::new).map_err(|source| Failure {
                code: 1,
                message: format!(
                    "--out: {}",
                    Error::Io {
                        path: p.clone(),
                        source
                    }
                ),
            })
        })
        .transpose()
}

fn emit(out: &OutArgs, records: &[Record], stdout: &mut dyn Write) -> CliResult<()> {
    let io_fail = |e: io::Error| Failure {
        code: 1,
        message: format!("writing report: {e}"),
    };
    let mut file = open_out(&out.out)?;
    let sink: &mut dyn Write = match file.as_mut() {
        Some(f) => f,
        None => stdout,
    };
    let mut w = RecordWriter::new(sink, out.format);
    for r in records {
        w.write(r).map_err(io_fail)?;
    }
    w.flush().map_err(io_fail)
}

fn prime(p: u64) -> CliResult<PrimeContext> {
    PrimeContext::new(p).map_err(|e| Failure::usage(format!("--p: {e}")))
}

fn shift_list(c: &Common) -> CliResult<Vec<i64>> {
    c.l.split(',')
        .map(|v| {
            v.trim()
                .parse::<i64>()
                .map_err(|e| Failure::usage(format!("--L: {v:?}: {e}")))
        })
        .collect()
}

fn single_shift(c: &Common) -> CliResult<i64> {
    match shift_list(c)?.as_slice() {
        [l] => Ok(*l),
        _ => Err(Failure::usage("--L: expected a single shift")),
    }
}

fn interval(c: &Common, l: i64, safe: bool, ctx: &PrimeContext) -> CliResult<Interval> {
    if c.h == 0 || c.h > ctx.p() - 1 {
        return Err(Failure::usage(format!("--H: {} outside 1..={}", c.h, ctx.p() - 1)));
    }
    shifted_interval(l, c.h, ctx, safe).map_err(|e| Failure::usage(format!("--L: {e}")))
}

fn nonzero_s(c: &Common) -> CliResult<i64> {
    if c.s == 0 {
        Err(Failure::usage("--s: exponent must be nonzero"))
    } else {
        Ok(c.s)
    }
}

/// Resolves the `i`-th `--set` (the last one repeats).
fn load_set(c: &Common, i: usize, ctx: &PrimeContext) -> CliResult<ResidueSet> {
    let spec = match c.set.get(i).or(c.set.last()) {
        Some(s) => s,
        None => return Err(Failure::usage("--set: required (file:PATH or random:M)")),
    };
    if let Some(path) = spec.strip_prefix("file:") {
        if c.seed.is_some() {
            return Err(Failure::usage("--seed: not allowed with --set file:PATH"));
        }
        set_from_file(Path::new(path), ctx).map_err(|e| Failure::usage(format!("--set: {e}")))
    } else if let Some(m) = spec.strip_prefix("random:") {
        let seed = c
            .seed
            .ok_or_else(|| Failure::usage("--seed: required with --set random:M"))?;
        let m: u64 = m
            .parse()
            .map_err(|e| Failure::usage(format!("--set: size {m:?}: {e}")))?;
        random_subset_stream(m, seed, i as u64, ctx).map_err(|e| Failure::usage(format!("--set: {e}")))
    } else {
        Err(Failure::usage(format!(
            "--set: {spec:?} is neither file:PATH nor random:M"
        )))
    }
}

fn cmd_prodset(c: &Common) -> CliResult<Record> {
    let ctx = prime(c.p)?;
    let x = interval(c, single_shift(c)?, false, &ctx)?;
    let set = load_set(c, 0, &ctx)?;
    let r = product_set(&x, &set, &ctx, c.eps, c.budget).ctx("product set")?;
    let ratio = if x.is_denominator_safe() {
        Some(ratio_set(&x, &set, &ctx, c.eps, c.budget).ctx("ratio set")?.size)
    } else {
        None
    };
    Ok(Record::new()
        .with("p", r.p)
        .with("h", r.h)
        .with("m", r.m)
        .with("l", x.shift())
        .with("size", r.size)
        .with("missing", r.missing)
        .with("ratio_size", ratio)
        .with("branch", r.hypothesis.branch.as_str())
        .with("margin_a", r.hypothesis.margin_a)
        .with("margin_b", r.hypothesis.margin_b)
        .with("epsilon", r.epsilon))
}

fn cmd_energy(a: &EnergyArgs) -> CliResult<Record> {
    let c = &a.common;
    let ctx = prime(c.p)?;
    let p = ctx.p();
    let l = single_shift(c)?;
    let kind = a.kind.to_possible_value().expect("named variant").get_name().to_string();
    let mut rec = Record::new().with("kind", kind).with("p", p).with("h", c.h);
    let (value, envelope, companion): (u128, f64, Option<u128>);
    let mut m = None;
    let mut j_len = None;
    match a.kind {
        EnergyKind::J => {
            let x = interval(c, 0, false, &ctx)?;
            let set = load_set(c, 0, &ctx)?;
            m = Some(set.len() as u64);
            value = energy_j(&x, &set, &ctx, c.budget).ctx("energy")?;
            envelope = energy_envelope(c.h, set.len() as u64, p);
            companion = None;
        }
        EnergyKind::Jl => {
            let x = interval(c, l, false, &ctx)?;
            let set = load_set(c, 0, &ctx)?;
            let ms = set.len() as u128;
            m = Some(ms as u64);
            value = energy_shifted(&x, &set, &ctx, c.budget).ctx("energy")?;
            let base = energy_j(&initial_interval(c.h, &ctx).ctx("--H")?, &set, &ctx, c.budget).ctx("energy")?;
            envelope = energy_envelope(c.h, ms as u64, p);
            companion = Some(2 * base + ms * ms);
        }
        EnergyKind::Js => {
            let s = nonzero_s(c)?;
            let x = interval(c, l, true, &ctx)?;
            let set = load_set(c, 0, &ctx)?;
            m = Some(set.len() as u64);
            value = energy_js(&x, &set, s, &ctx, c.budget).ctx("energy")?;
            envelope = energy_envelope(c.h, set.len() as u64, p);
            companion = Some(energy_js(&x, &set, -s, &ctx, c.budget).ctx("energy")?);
        }
        EnergyKind::R => {
            let set = load_set(c, 0, &ctx)?;
            m = Some(set.len() as u64);
            let jl = a
                .j_len
                .ok_or_else(|| Failure::usage("--J: required with --kind r"))?;
            if jl == 0 || jl > p - 1 {
                return Err(Failure::usage(format!("--J: {jl} outside 1..={}", p - 1)));
            }
            interval(c, 0, false, &ctx)?;
            j_len = Some(jl);
            let r = triple_r(jl, c.h, &set, &ctx, c.budget).ctx("triple count")?;
            value = r.r;
            envelope = r.main_term;
            companion = None;
        }
        EnergyKind::Recip => {
            let s = nonzero_s(c)?;
            if c.ell == 0 {
                return Err(Failure::usage("--ell: must be at least 1"));
            }
            let x = interval(c, l, true, &ctx)?;
            let r = additive_energy_recip(&x, s, c.ell, &ctx, c.budget).ctx("energy")?;
            value = r.energy;
            envelope = r.envelope;
            companion = None;
        }
    }
    let uses_s = matches!(a.kind, EnergyKind::Js | EnergyKind::Recip);
    rec.push("m", m);
    rec.push("l", if matches!(a.kind, EnergyKind::J | EnergyKind::R) { None } else { Some(ctx.reduce(l as i128)) });
    rec.push("s", uses_s.then_some(c.s));
    rec.push("ell", (a.kind == EnergyKind::Recip).then_some(c.ell));
    rec.push("j_len", j_len);
    rec.push("value", value);
    rec.push("envelope", envelope);
    rec.push("ratio", value as f64 / envelope);
    rec.push("companion", companion);
    Ok(rec)
}

fn cmd_expsum(a: &ExpsumArgs) -> CliResult<Record> {
    let c = &a.common;
    let ctx = prime(c.p)?;
    let s = nonzero_s(c)?;
    if c.ell == 0 {
        return Err(Failure::usage("--ell: must be at least 1"));
    }
    let x = interval(c, single_shift(c)?, true, &ctx)?;
    let set = load_set(c, 0, &ctx)?;
    let table = complete_sum_table(&x, s, &ctx, c.budget).ctx("complete sums")?;
    let r = kloosterman_frac_sum(a.a, &set, &table, &ctx);
    Ok(Record::new()
        .with("p", r.p)
        .with("h", r.h)
        .with("m", r.m)
        .with("l", x.shift())
        .with("s", s)
        .with("a", a.a % ctx.p())
        .with("ell", c.ell)
        .with("sum", r.value)
        .with("envelope", r.envelope(c.ell))
        .with("ratio", r.ratio(c.ell))
        .with("trivial", r.h * r.m))
}

fn joined<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn cmd_tk(a: &TkArgs) -> CliResult<Record> {
    let c = &a.common;
    let ctx = prime(c.p)?;
    let s = nonzero_s(c)?;
    if c.k < 2 {
        return Err(Failure::usage("--k: must be at least 2"));
    }
    let ls = shift_list(c)?;
    if ls.len() != 1 && ls.len() != c.k {
        return Err(Failure::usage(format!("--L: expected 1 or {} shifts, got {}", c.k, ls.len())));
    }
    if c.set.len() > 1 && c.set.len() != c.k {
        return Err(Failure::usage(format!("--set: expected 1 or {} sets, got {}", c.k, c.set.len())));
    }
    let mut factors = Vec::with_capacity(c.k);
    for i in 0..c.k {
        let shift = ls[i.min(ls.len() - 1)];
        interval(c, shift, true, &ctx)?;
        factors.push(Factor {
            set: load_set(c, i, &ctx)?,
            shift,
        });
    }
    let sizes: Vec<usize> = factors.iter().map(|f| f.set.len()).collect();
    if !a.allow_unequal && sizes.iter().any(|&m| m != sizes[0]) {
        return Err(Failure::usage("--set: sets differ in size; pass --allow-unequal"));
    }
    if let Some(&bad) = a.lambdas.iter().find(|&&l| l >= ctx.p()) {
        return Err(Failure::usage(format!("--lambdas: {bad} is not reduced mod {}", ctx.p())));
    }
    let opts = TkOptions {
        epsilon: c.eps,
        allow_unequal: a.allow_unequal,
        budget: c.budget,
        lambdas: a.lambdas.clone(),
    };
    let r = tk_experiment(&TkInputs { factors, h: c.h, s }, &ctx, &opts).ctx("T_k")?;
    let flags = r.hypotheses.flags();
    let full = (r.p <= FULL_VECTOR_MAX_P).then(|| joined(r.t.counts()));
    Ok(Record::new()
        .with("k", r.k)
        .with("p", r.p)
        .with("h", r.h)
        .with("m", joined(&r.set_sizes))
        .with("s", r.s)
        .with("l", joined(&r.shifts))
        .with("strategy", r.strategy.as_str())
        .with("main_num", r.main_num)
        .with("main_term", r.main_term())
        .with("max_abs_dev", r.max_abs_dev)
        .with("mean_abs_dev", r.mean_abs_dev)
        .with("hyp1", flags[0])
        .with("hyp2", flags[1])
        .with("hyp3", flags[2])
        .with("margin", r.hypotheses.margins.iter().copied().fold(f64::INFINITY, f64::min))
        .with("epsilon", r.epsilon)
        .with("unequal_sizes", r.unequal_sizes)
        .with("open_question", r.open_question)
        .with("lambdas", joined(r.sampled.iter().map(|t| t.0)))
        .with("t_at", joined(r.sampled.iter().map(|t| t.1)))
        .with("dev_at", joined(r.sampled.iter().map(|t| crate::report::fmt_g12(t.2))))
        .with("t_values", full))
}

fn cmd_sweep(a: &SweepArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let mut cfg = verify::SweepConfig::from_file(&a.config).map_err(|e| Failure::usage(format!("--config: {e}")))?;
    if a.out.is_some() {
        cfg.out = a.out.clone();
    }
    if let Some(f) = a.format {
        cfg.format = f;
    }
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    let rows = match open_out(&cfg.out)? {
        Some(mut f) => {
            let rows = verify::write_sweep(&cfg, &mut f).ctx("sweep")?;
            f.flush().map_err(|e| Failure {
                code: 1,
                message: format!("--out: {e}"),
            })?;
            rows
        }
        None => verify::write_sweep(&cfg, &mut *stdout).ctx("sweep")?,
    };
    let skipped = rows.iter().filter(|r| !r.is_ok()).count();
    let _ = writeln!(stderr, "sweep: {} rows, {} skipped", rows.len(), skipped);
    for (q, c) in verify::fitted_constants(&rows) {
        let _ = writeln!(stderr, "sweep: max ratio {} = {}", q.as_str(), crate::report::fmt_g12(c));
    }
    Ok(())
}

type Check = fn() -> Result<String, String>;

/// One oracle comparison per module, as report rows.
pub fn selftest() -> Vec<Record> {
    let checks: Vec<(&str, &str, Check)> = vec![
        ("modfield", "inverse_and_dlog", check_modfield),
        ("sets", "seeded_subset", check_sets),
        ("prodset", "product_and_ratio_sets", check_prodset),
        ("energy", "energies_vs_enumeration", check_energy),
        ("convolve", "k_fold_vs_direct", check_convolve),
        ("spectra", "complete_and_character_sums", check_spectra),
        ("tkcount", "t_k_vs_meet_in_middle", check_tk),
        ("verify", "sweep_row_vs_direct", check_verify),
    ];
    checks
        .into_iter()
        .map(|(module, check, f)| {
            let (status, detail) = match f() {
                Ok(d) => ("pass", d),
                Err(d) => ("fail", d),
            };
            Record::new()
                .with("module", module)
                .with("check", check)
                .with("status", status)
                .with("detail", detail)
        })
        .collect()
}

fn ok_or<E: std::fmt::Display, T>(r: std::result::Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn same<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

fn check_modfield() -> Result<String, String> {
    let ctx = ok_or(PrimeContext::new(1009))?;
    for a in 1..1009 {
        let inv = ok_or(ctx.inv(a))?;
        same("inverse", ctx.mul(a, inv), 1)?;
        same("dlog", ok_or(mod_pow(ctx.generator(), ok_or(ctx.dlog(a))? as i64, &ctx))?, a)?;
    }
    Ok("p=1009, all units".into())
}

fn check_sets() -> Result<String, String> {
    let ctx = ok_or(PrimeContext::new(101))?;
    let a = ok_or(random_subset_stream(30, 9, 0, &ctx))?;
    let b = ok_or(random_subset_stream(30, 9, 0, &ctx))?;
    same("repeat draw", &a, &b)?;
    same("size", a.len(), 30)?;
    let full = ok_or(random_subset_stream(100, 3, 0, &ctx))?;
    same("full draw", full, ResidueSet::full(&ctx))?;
    Ok("p=101, M=30".into())
}

fn check_prodset() -> Result<String, String> {
    let ctx = ok_or(PrimeContext::new(31))?;
    for seed in 0..20 {
        let set = ok_or(random_subset_stream(1 + seed % 7, seed, 0, &ctx))?;
        let x = ok_or(initial_interval(1 + seed % 11, &ctx))?;
        let fast = ok_or(product_set(&x, &set, &ctx, 0.05, u64::MAX))?;
        same("product set", fast.size, oracle::product_set_size(&x, &set, 31))?;
        let fast = ok_or(ratio_set(&x, &set, &ctx, 0.05, u64::MAX))?;
        same("ratio set", fast.size, oracle::ratio_set_size(&x, &set, &ctx))?;
    }
    Ok("p=31, 20 instances".into())
}

fn check_energy() -> Result<String, String> {
    let ctx = ok_or(PrimeContext::new(29))?;
    for seed in 0..12u64 {
        let set = ok_or(random_subset_stream(1 + seed % 5, seed, 0, &ctx))?;
        let h = 1 + seed % 9;
        let x = ok_or(shifted_interval(3 + seed as i64, h, &ctx, true))?;
        same("J_s", ok_or(energy_js(&x, &set, 2, &ctx, u64::MAX))?, oracle::energy_js(&x, &set, 2, &ctx))?;
        same("J(L)", ok_or(energy_shifted(&x, &set, &ctx, u64::MAX))?, oracle::energy_shifted(&x, &set, 29))?;
        let r = ok_or(triple_r(2, h, &set, &ctx, u64::MAX))?;
        same("R", r.r, oracle::triple_r(2, h, &set, 29))?;
        let e = ok_or(additive_energy_recip(&x, 1, 2, &ctx, u64::MAX))?;
        same("J_{2,1}", e.energy, oracle::recip_energy(&x, 1, 2, &ctx))?;
    }
    Ok("p=29, 12 instances".into())
}

fn check_convolve() -> Result<String, String> {
    let ctx = ok_or(PrimeContext::new(37))?;
    let x = ok_or(initial_interval(6, &ctx))?;
    let set = ok_or(random_subset_stream(4, 1, 0, &ctx))?;
    let u = ok_or(count_vector_product(&x, &set, 1, &ctx, u64::MAX))?;
    let v = vec![u.clone(); 3];
    let masses = vec![u.total(); 3];
    let plan = ok_or(ConvolutionPlan::select(37, &masses))?;
    let fast = ok_or(k_fold_count(&v, &plan))?;
    let mut direct = vec![0u128; 37];
    for (i, &a) in u.counts().iter().enumerate() {
        for (j, &b) in u.counts().iter().enumerate() {
            for (k, &c) in u.counts().iter().enumerate() {
                direct[(i + j + k) % 37] += a * b * c;
            }
        }
    }
    same("3-fold", fast, CountVector::from_counts(direct))?;
    Ok("p=37, k=3".into())
}

fn check_spectra() -> Result<String, String> {
    let ctx = ok_or(PrimeContext::new(53))?;
    let x = ok_or(shifted_interval(4, 9, &ctx, true))?;
    let table = ok_or(complete_sum_table(&x, 3, &ctx, u64::MAX))?;
    for c in 0..53 {
        let d = (table.get(c) - oracle::complete_sum(&x, 3, c, &ctx)).norm();
        if d > 1e-9 {
            return Err(format!("complete sum at c={c} off by {d}"));
        }
    }
    let elems = x.to_vec();
    let spec = ok_or(char_spectrum(&elems, &ctx))?;
    for t in 0..52 {
        let d: f64 = (spec.get(t as usize) - oracle::char_sum(&elems, t, &ctx)).norm();
        if d > 1e-9 {
            return Err(format!("character sum at t={t} off by {d}"));
        }
    }
    Ok("p=53, H=9".into())
}

fn check_tk() -> Result<String, String> {
    let ctx = ok_or(PrimeContext::new(13))?;
    let factors: Vec<Factor> = (0..4)
        .map(|i| {
            Ok(Factor {
                set: ok_or(random_subset_stream(3, 4, i, &ctx))?,
                shift: i as i64,
            })
        })
        .collect::<Result<_, String>>()?;
    let inputs = TkInputs { factors, h: 3, s: 1 };
    let r = ok_or(tk_experiment(&inputs, &ctx, &TkOptions::default()))?;
    same("T_4", r.t.counts().to_vec(), oracle::tk_counts(&inputs, &ctx))?;
    Ok("p=13, k=4".into())
}

fn check_verify() -> Result<String, String> {
    let cfg = verify::SweepConfig {
        primes: vec![101],
        h_exps: vec![0.5],
        m_exps: vec![0.5],
        quantities: vec![verify::Quantity::Energy],
        seeds: vec![2],
        ..verify::SweepConfig::default()
    };
    let rows = ok_or(verify::run_sweep(&cfg))?;
    let ctx = ok_or(PrimeContext::new(101))?;
    let set = ok_or(random_subset_stream(11, 2, 0, &ctx))?;
    let x = ok_or(initial_interval(11, &ctx))?;
    same("sweep J", rows[0].measured.clone(), Value::from(oracle::energy_shifted(&x, &set, 101)))?;
    Ok("p=101, H=M=11".into())
}
