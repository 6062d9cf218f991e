//! Command-line front end. [`run`] parses arguments, executes one command,
//! prints a human-readable summary and appends an [`ExperimentRecord`] as
//! one JSON line to `--out` when given.
//!
//! Exit codes: 0 when every check passes, 1 on a failed check or a
//! structured runtime error, 2 on usage or input errors.

use std::ffi::OsString;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::apcount::{ap_list, counterexample_family, restricted_density};
use crate::error::{Error, Result};
use crate::exec::{Exec, DEFAULT_BUDGET};
use crate::ffcore::{DenseFunction, FieldParams, INEQUALITY_TOL};
use crate::gowers::{gowers_with, phase_function, phase_norm_closed_form, Strategy};
use crate::polymap::PolyMap;
use crate::report::{Relation, VerificationReport};
use crate::subspace::{greedy_max_subspace, subspace_bound_report, Choice};
use crate::suite::{all_passed, run_suite};
use crate::variety::{dim_proxy, level_set, level_set_sizes, singular_locus, PointSet, WstarScan};

#[derive(Debug, Parser)]
#[command(name = "fpgowers", version, about = "Exact Gowers norms, restricted progressions and level sets over F_p^n")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunConfig {
    /// Largest enumeration (points or tuples) a command may perform.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, global = true, default_value_t = 1)]
    #[serde(skip)]
    pub workers: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Overrides the tolerance of floating-point comparisons.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Append one JSON record per run to this file.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Estimate W* sizes from this many uniform samples instead of failing
    /// when the exact scan exceeds the budget.
    #[arg(long, global = true)]
    pub sample: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    Recursive,
    Definitional,
    Fourier,
    ClosedForm,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Recursive => Strategy::Recursive,
            StrategyArg::Definitional => Strategy::Definitional,
            StrategyArg::Fourier => Strategy::Fourier,
            StrategyArg::ClosedForm => Strategy::ClosedForm,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Level sets, singular locus and W* of a map.
    Levelset {
        /// Map document path, or `sum:<p>:<n>:<d>`.
        map: String,
        /// Comma-separated value `v`; all values are swept when omitted.
        #[arg(long)]
        v: Option<String>,
        /// Write the level set as an index list.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// U^l norm of a phase function `e(alpha . P)` or of a function file.
    Gowers {
        #[arg(long, required_unless_present = "function")]
        map: Option<String>,
        /// Comma-separated `alpha`, default `1,0,...`.
        #[arg(long)]
        alpha: Option<String>,
        /// File with `p n` on the first line and `p^n` values `re [im]`.
        #[arg(long, conflicts_with = "map")]
        function: Option<PathBuf>,
        #[arg(long)]
        l: Option<usize>,
        #[arg(long, value_enum, default_value = "recursive")]
        strategy: StrategyArg,
    },
    /// Run a named verification suite (`all` runs every suite).
    Verify { suite: String },
    /// Greedy maximal subspace inside `P^{-1}(0)`.
    Subspace {
        map: String,
        /// Pick extension vectors at random (from `--seed`) instead of by
        /// lowest index.
        #[arg(long)]
        random: bool,
    },
    /// Density of `l`-term progressions in `A` with gap in `S_v`.
    Apcount {
        map: String,
        /// Index-list file, `levelset:<v>` or `random:<density>:<seed>`.
        #[arg(long)]
        set: String,
        #[arg(long, default_value = "0")]
        v: String,
        #[arg(long, default_value_t = 3)]
        l: usize,
        /// Number of witness progressions to list.
        #[arg(long, default_value_t = 5)]
        witnesses: usize,
    },
    /// Exhaustive check that progressions in `{sum x_j^d = 0}` have gaps in
    /// the same set.
    Counterexample {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRecord {
    pub timestamp: u64,
    pub command: String,
    pub fingerprint: String,
    pub parameters: Value,
    pub results: Vec<VerificationReport>,
    pub data: Value,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub wall_time_s: f64,
}

struct Outcome {
    fingerprint: String,
    parameters: Value,
    results: Vec<VerificationReport>,
    data: Value,
}

fn fingerprint(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

fn load_map(spec: &str, exec: &Exec) -> Result<PolyMap> {
    let map = if let Some(rest) = spec.strip_prefix("sum:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [p, n, d] = parts[..] else {
            return Err(Error::Parse(format!("expected sum:<p>:<n>:<d>, got {spec:?}")));
        };
        let num = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse(format!("{s:?}: {e}")));
        PolyMap::sum_of_powers(num(n)?, num(d)?, num(p)? as u32)?
    } else {
        PolyMap::parse(&std::fs::read_to_string(spec)?)?
    };
    FieldParams::with_budget(map.p(), map.n(), exec.budget())?;
    Ok(map)
}

fn parse_vector(text: &str, len: usize, p: u32) -> Result<Vec<u32>> {
    let v = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map(|x| x.rem_euclid(p as i64) as u32)
                .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if v.len() != len {
        return Err(Error::DimensionMismatch { expected: len, got: v.len() });
    }
    Ok(v)
}

/// Resolves a set spec; returns the set and bytes for the fingerprint.
fn load_set(spec: &str, map: &PolyMap, exec: &Exec) -> Result<(PointSet, Vec<u8>)> {
    let params = FieldParams::with_budget(map.p(), map.n(), exec.budget())?;
    if let Some(v) = spec.strip_prefix("levelset:") {
        let v = parse_vector(v, map.r(), map.p())?;
        return Ok((level_set(map, &v, exec)?, spec.as_bytes().to_vec()));
    }
    if let Some(rest) = spec.strip_prefix("random:") {
        let (density, seed) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected random:<density>:<seed>, got {spec:?}")))?;
        let density: f64 = density.parse().map_err(|e| Error::Parse(format!("{density:?}: {e}")))?;
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::InvalidArgument(format!("density {density} outside [0, 1]")));
        }
        let seed: u64 = seed.parse().map_err(|e| Error::Parse(format!("{seed:?}: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let set = PointSet::from_indices(params.clone(), (0..params.size()).filter(|_| rng.gen_bool(density)))?;
        return Ok((set, spec.as_bytes().to_vec()));
    }
    let text = std::fs::read_to_string(spec)?;
    Ok((PointSet::from_index_list(params, &text)?, text.into_bytes()))
}

fn load_function(path: &PathBuf, exec: &Exec) -> Result<(DenseFunction, Vec<u8>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty function file".into()))?;
    let nums: Vec<&str> = header.split_whitespace().collect();
    let [p, n] = nums[..] else {
        return Err(Error::Parse(format!("header must be `p n`, got {header:?}")));
    };
    let p: u32 = p.parse().map_err(|e| Error::Parse(format!("{p:?}: {e}")))?;
    let n: usize = n.parse().map_err(|e| Error::Parse(format!("{n:?}: {e}")))?;
    let params = FieldParams::with_budget(p, n, exec.budget())?;
    let mut table = Vec::with_capacity(params.size());
    for line in lines {
        let vals = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        match vals[..] {
            [re] => table.push(Complex64::new(re, 0.0)),
            [re, im] => table.push(Complex64::new(re, im)),
            _ => return Err(Error::Parse(format!("expected `re [im]`, got {line:?}"))),
        }
    }
    if table.len() != params.size() {
        return Err(Error::DimensionMismatch { expected: params.size(), got: table.len() });
    }
    let f = match DenseFunction::bounded(params.clone(), table.clone()) {
        Ok(f) => f,
        Err(Error::NotBounded { .. }) => DenseFunction::new(params, table)?,
        Err(e) => return Err(e),
    };
    Ok((f, text.into_bytes()))
}

fn map_print(map: &PolyMap) -> Vec<u8> {
    map.serialize().into_bytes()
}

fn cmd_levelset(map_spec: &str, v: Option<&str>, export: Option<&PathBuf>, cfg: &RunConfig, exec: &Exec, out: &mut dyn Write) -> Result<Outcome> {
    let map = load_map(map_spec, exec)?;
    let (p, n, d, r) = (map.p(), map.n(), map.d(), map.r());
    let mut results = Vec::new();
    let mut data = json!({});
    match v {
        Some(v) => {
            let v = parse_vector(v, r, p)?;
            let set = level_set(&map, &v, exec)?;
            writeln!(out, "|S_v| = {} for v = {v:?}", set.len())?;
            if let Some(path) = export {
                std::fs::write(path, set.to_index_list())?;
            }
            data["v"] = json!(v);
            data["level_set_size"] = json!(set.len());
            data["level_set_dim_proxy"] = json!(dim_proxy(&set));
        }
        None => {
            let sizes = level_set_sizes(&map, exec)?;
            let total: u64 = sizes.iter().sum();
            writeln!(out, "level set sizes (v in little-endian order): {sizes:?}")?;
            results.push(VerificationReport::exact(
                "level-set-partition",
                format!("p={p} n={n} d={d} R={r}"),
                total as u128,
                (p as u128).pow(n as u32),
                Relation::Eq,
            ));
            data["level_set_sizes"] = json!(sizes);
        }
    }
    let sing = singular_locus(&map, exec)?;
    let proxy = dim_proxy(&sing);
    writeln!(out, "|singular locus| = {}, dim proxy = {proxy:.6}", sing.len())?;
    data["singular_locus_size"] = json!(sing.len());
    data["singular_dim_proxy"] = json!(proxy);
    data["condition_inputs"] = json!({
        "p": p, "n": n, "d": d, "R": r,
        "K_proxy": n as f64 - proxy,
    });
    let scan = WstarScan::rank_deficient(&map)?;
    match (exec.check_budget(scan.tuple_count() as u128), cfg.sample) {
        (Ok(()), _) => {
            let count = scan.count(exec)?;
            writeln!(out, "|W*| = {count} of {} tuples", scan.tuple_count())?;
            data["wstar"] = json!({ "exact": count, "tuples": scan.tuple_count() });
        }
        (Err(_), Some(samples)) => {
            let s = scan.sample(samples, cfg.seed);
            writeln!(out, "|W*| ~ {:.3} +- {:.3} ({} samples)", s.estimate, s.std_error, s.samples)?;
            data["wstar"] = json!({
                "estimate": s.estimate, "std_error": s.std_error,
                "samples": s.samples, "hits": s.hits, "tuples": scan.tuple_count(),
            });
        }
        (Err(e), None) => return Err(e),
    }
    Ok(Outcome {
        fingerprint: fingerprint(&[&map_print(&map)]),
        parameters: json!({ "map": map_spec, "v": v }),
        results,
        data,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_gowers(
    map_spec: Option<&str>,
    alpha: Option<&str>,
    function: Option<&PathBuf>,
    l: Option<usize>,
    strategy: StrategyArg,
    exec: &Exec,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let strategy = Strategy::from(strategy);
    let mut results = Vec::new();
    let (f, l, print, mut data) = match (map_spec, function) {
        (Some(spec), _) => {
            let map = load_map(spec, exec)?;
            let alpha = match alpha {
                Some(a) => parse_vector(a, map.r(), map.p())?,
                None => (0..map.r()).map(|i| (i == 0) as u32).collect(),
            };
            let l = l.unwrap_or(map.d());
            let f = phase_function(&map, &alpha, exec)?;
            let mut data = json!({ "alpha": alpha });
            if l == map.d() {
                let closed = phase_norm_closed_form(&map, &alpha, exec)?;
                data["closed_form"] = json!(closed);
                if strategy != Strategy::ClosedForm {
                    let direct = gowers_with(&f, l, strategy, exec)?;
                    results.push(VerificationReport::eq(
                        "phase-norm-identity",
                        format!("p={} n={} d={} alpha={alpha:?}", map.p(), map.n(), map.d()),
                        direct.raw_power,
                        closed.raw_power,
                        INEQUALITY_TOL,
                    ));
                }
            } else if strategy == Strategy::ClosedForm {
                return Err(Error::InvalidArgument(format!("the closed form gives U^d only (d = {})", map.d())));
            }
            (f, l, map_print(&map), data)
        }
        (None, Some(path)) => {
            let (f, bytes) = load_function(path, exec)?;
            let l = l.ok_or_else(|| Error::InvalidArgument("--l is required with --function".into()))?;
            (f, l, bytes, json!({}))
        }
        (None, None) => return Err(Error::InvalidArgument("give --map or --function".into())),
    };
    if strategy == Strategy::ClosedForm {
        let report = data["closed_form"].clone();
        writeln!(out, "U^{l} (closed form) = {}", report["value"])?;
    } else {
        let g = gowers_with(&f, l, strategy, exec)?;
        writeln!(out, "U^{l} ({:?}) = {:.15}  (raw power {:.15e})", g.strategy, g.value, g.raw_power)?;
        data["norm"] = json!(g);
    }
    Ok(Outcome {
        fingerprint: fingerprint(&[&print]),
        parameters: json!({ "map": map_spec, "function": function, "l": l, "strategy": strategy }),
        results,
        data,
    })
}

fn cmd_verify(suite: &str, exec: &Exec) -> Result<Outcome> {
    let results = run_suite(suite, exec)?;
    Ok(Outcome {
        fingerprint: fingerprint(&[suite.as_bytes()]),
        parameters: json!({ "suite": suite }),
        data: json!({ "checks": results.len(), "failed": results.iter().filter(|r| !r.passed()).count() }),
        results,
    })
}

fn cmd_subspace(map_spec: &str, random: bool, cfg: &RunConfig, exec: &Exec, out: &mut dyn Write) -> Result<Outcome> {
    let map = load_map(map_spec, exec)?;
    let choice = if random { Choice::Seeded(cfg.seed) } else { Choice::LowestIndex };
    let g = greedy_max_subspace(&map, choice, exec)?;
    writeln!(out, "maximal subspace of dimension {}: {}", g.subspace.dim(), g.subspace)?;
    let bound = subspace_bound_report(&map, &g.subspace);
    let basis: Vec<Vec<u32>> = g.subspace.basis().iter().map(|b| b.coords().to_vec()).collect();
    Ok(Outcome {
        fingerprint: fingerprint(&[&map_print(&map)]),
        parameters: json!({ "map": map_spec, "choice": choice }),
        data: json!({
            "dim": g.subspace.dim(),
            "basis": basis,
            "steps": g.steps.iter().map(|h| h.index()).collect::<Vec<_>>(),
        }),
        results: vec![g.certificate, bound],
    })
}

fn cmd_apcount(map_spec: &str, set_spec: &str, v: &str, l: usize, witnesses: usize, exec: &Exec, out: &mut dyn Write) -> Result<Outcome> {
    let map = load_map(map_spec, exec)?;
    let (a, set_bytes) = load_set(set_spec, &map, exec)?;
    let v = parse_vector(v, map.r(), map.p())?;
    let s = level_set(&map, &v, exec)?;
    let report = restricted_density(&a, &s, l, exec)?;
    let list = ap_list(&a, &s, l, witnesses)?;
    writeln!(
        out,
        "|A| = {}, |S_v| = {}, restricted {l}-AP density = {:.12} ({} of {})",
        a.len(),
        s.len(),
        report.density,
        report.count,
        report.normalizer
    )?;
    for (x, y) in &list {
        writeln!(out, "  x = {:?}, y = {:?}", x.coords(), y.coords())?;
    }
    Ok(Outcome {
        fingerprint: fingerprint(&[&map_print(&map), &set_bytes]),
        parameters: json!({ "map": map_spec, "set": set_spec, "v": v, "l": l }),
        results: Vec::new(),
        data: json!({
            "set_size": a.len(),
            "level_set_size": s.len(),
            "ap": report,
            "witnesses": list.iter().map(|(x, y)| (x.index(), y.index())).collect::<Vec<_>>(),
        }),
    })
}

fn cmd_counterexample(p: u32, n: usize, d: usize, cfg: &RunConfig, exec: &Exec, out: &mut dyn Write) -> Result<Outcome> {
    let c = counterexample_family(p, n, d, cfg.seed, exec)?;
    let all = c.report.passed();
    writeln!(out, "all {}-AP gaps satisfy P(y)=0: {all}", d + 1)?;
    writeln!(out, "|A| = {}, nontrivial progressions = {}", c.set.len(), c.progressions)?;
    Ok(Outcome {
        fingerprint: fingerprint(&[&map_print(&c.map)]),
        parameters: json!({ "p": p, "n": n, "d": d }),
        data: json!({
            "set_size": c.set.len(),
            "progressions": c.progressions,
            "bad_gaps": c.bad_gaps,
        }),
        results: vec![c.report],
    })
}

fn is_usage_error(e: &Error) -> bool {
    !matches!(
        e,
        Error::EmptySet | Error::NotInVariety(_) | Error::ImaginaryResidue { .. } | Error::NotBounded { .. }
    )
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Levelset { .. } => "levelset",
        Command::Gowers { .. } => "gowers",
        Command::Verify { .. } => "verify",
        Command::Subspace { .. } => "subspace",
        Command::Apcount { .. } => "apcount",
        Command::Counterexample { .. } => "counterexample",
    }
}

fn dispatch(cli: &Cli, exec: &Exec, out: &mut dyn Write) -> Result<Outcome> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Levelset { map, v, export } => cmd_levelset(map, v.as_deref(), export.as_ref(), cfg, exec, out),
        Command::Gowers { map, alpha, function, l, strategy } => {
            cmd_gowers(map.as_deref(), alpha.as_deref(), function.as_ref(), *l, *strategy, exec, out)
        }
        Command::Verify { suite } => cmd_verify(suite, exec),
        Command::Subspace { map, random } => cmd_subspace(map, *random, cfg, exec, out),
        Command::Apcount { map, set, v, l, witnesses } => cmd_apcount(map, set, v, *l, *witnesses, exec, out),
        Command::Counterexample { p, n, d } => cmd_counterexample(*p, *n, *d, cfg, exec, out),
    }
}

fn append_record(path: &PathBuf, record: &ExperimentRecord) -> Result<()> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut line = serde_json::to_string(record)?;
    line.push('\n');
    file.write_all(line.as_bytes())?;
    Ok(())
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code. Human-readable output goes to `out`, parse errors to
/// `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    let exec = match Exec::new(cli.config.workers, cli.config.budget) {
        Ok(e) => e,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let start = Instant::now();
    let outcome = dispatch(&cli, &exec, out);
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let parameters_base = serde_json::to_value(&cli.config).unwrap_or(Value::Null);
    let (record, code) = match outcome {
        Ok(o) => {
            let results: Vec<VerificationReport> = match cli.config.tolerance {
                Some(t) => o.results.into_iter().map(|r| r.with_tolerance(t)).collect(),
                None => o.results,
            };
            for r in &results {
                let _ = writeln!(out, "{r}");
            }
            let passed = all_passed(&results);
            let mut parameters = parameters_base;
            parameters["command"] = o.parameters;
            let record = ExperimentRecord {
                timestamp,
                command: command_name(&cli.command).into(),
                fingerprint: o.fingerprint,
                parameters,
                passed,
                results,
                data: o.data,
                error: None,
                wall_time_s: start.elapsed().as_secs_f64(),
            };
            if !passed {
                let _ = writeln!(out, "FAILED checks:");
                for r in record.results.iter().filter(|r| !r.passed()) {
                    let _ = writeln!(out, "  {r}  (diff {:.3e})", r.lhs - r.rhs);
                }
            }
            (record, if passed { 0 } else { 1 })
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            let record = ExperimentRecord {
                timestamp,
                command: command_name(&cli.command).into(),
                fingerprint: String::new(),
                parameters: parameters_base,
                results: Vec::new(),
                data: Value::Null,
                passed: false,
                error: Some(e.to_string()),
                wall_time_s: start.elapsed().as_secs_f64(),
            };
            (record, if is_usage_error(&e) { 2 } else { 1 })
        }
    };
    if let Some(path) = &cli.config.out {
        if let Err(e) = append_record(path, &record) {
            let _ = writeln!(err, "error: cannot write record: {e}");
            return 2;
        }
    }
    code
}

/// [`run_with`] on the process arguments and standard streams.
pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}
