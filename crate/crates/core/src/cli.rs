//! The `gaussq` command-line front end.
//!
//! Tables are written as CSV (default) or JSON with a metadata header
//! naming the command, its parameters, the seed and the toolkit version.
//! Numbers carry 12 significant digits. Wall time goes to stderr only, so
//! identical invocations produce byte-identical files.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::inequalities::broadcast_region;
use crate::memcap::{
    additive_noise_capacity, critical_energy, flat_allocation_capacity, memory_capacity,
    waterfill, waterfill_with_samples, MemoryChannelParams, DEFAULT_TOL,
};
use crate::superop::{
    classify_multimode_nonoise, classify_one_mode, one_mode_cp, one_mode_valid,
    sampled_positivity_falsifier, MapSpec, Witness,
};
use crate::verify::{run_suite, VerificationReport, VerifyConfig, SUITES};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gaussq", version, about = "Gaussian quantum information numerics")]
pub struct Cli {
    /// Seed for every randomized computation.
    #[arg(long, global = true, default_value_t = 0, help_heading = "Global options")]
    pub seed: u64,

    /// Output file; stdout when absent.
    #[arg(long, short, global = true, help_heading = "Global options")]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv, help_heading = "Global options")]
    pub format: Format,

    /// JSON object of flag values; its entries override the command line.
    #[arg(long, global = true, help_heading = "Global options")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classical capacity of memory and additive-noise channels.
    #[command(subcommand)]
    Capacity(CapacityCommand),
    /// Optimal energy profile N(z) of the memory channel.
    Waterfill(WaterfillArgs),
    /// Rate-region bounds for the thermal broadcast channel.
    Region(RegionArgs),
    /// Run a seeded verification suite; exits 1 on any failure.
    Verify(VerifyArgs),
    /// Normal form of a Gaussian-to-Gaussian map (K, alpha).
    Normalform(NormalformArgs),
}

#[derive(Debug, Subcommand)]
pub enum CapacityCommand {
    /// Single capacity value of the thermal memory channel.
    Memory(MemoryArgs),
    /// Additive classical noise with memory.
    Additive(AdditiveArgs),
    /// Capacity along a sweep of energy or thermal photons.
    Curve(CurveArgs),
    /// Critical energy above which every decoupled channel is used.
    Ecrit(EcritArgs),
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct MemoryArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub nbar: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub energy: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct AdditiveArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    /// Average added noise N_C.
    #[arg(long, allow_negative_numbers = true)]
    pub nc: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub energy: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sweep {
    Energy,
    Nbar,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct CurveArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    /// Fixed thermal photons (ignored when sweeping nbar).
    #[arg(long, default_value_t = 0.0)]
    pub nbar: f64,
    /// Fixed energy (ignored when sweeping energy).
    #[arg(long, default_value_t = 1.0)]
    pub energy: f64,
    #[arg(long, value_enum, default_value_t = Sweep::Energy)]
    pub vary: Sweep,
    #[arg(long, default_value_t = 0.0)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = 51)]
    pub points: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct EcritArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.0)]
    pub nbar_from: f64,
    #[arg(long)]
    pub nbar_to: f64,
    #[arg(long, default_value_t = 51)]
    pub points: usize,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct WaterfillArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub nbar: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub energy: f64,
    /// Number of (z, N(z)) rows on [0, 2π].
    #[arg(long, default_value_t = 257)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct RegionArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub eta: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub energy: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long)]
    pub suite: String,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct NormalformArgs {
    /// JSON map file `{n, k, alpha, y}` with row-major matrices.
    #[arg(long, conflicts_with_all = ["k", "alpha"])]
    pub spec: Option<PathBuf>,
    /// Row-major K entries, comma separated.
    #[arg(long, allow_negative_numbers = true, value_delimiter = ',')]
    pub k: Option<Vec<f64>>,
    /// Row-major alpha entries, comma separated (zero when absent).
    #[arg(long, allow_negative_numbers = true, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    /// Falsifier trials for multimode maps with noise.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

/// A rendered result: either a table or a JSON document.
enum Payload {
    Table {
        columns: Vec<&'static str>,
        rows: Vec<Vec<f64>>,
        trailer: Vec<(&'static str, f64)>,
    },
    Document(Value),
}

struct Outcome {
    command: String,
    params: Vec<(String, String)>,
    payload: Payload,
    exit: i32,
}

/// Format with 12 significant digits, positional for moderate exponents.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, mant.parse::<f64>().unwrap() * 10f64.powi(exp)))
    } else {
        format!("{}e{}", trim_zeros(mant.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Round every number in a JSON tree to 12 significant digits.
fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => fmt_sig(x)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            _ => Value::Number(n),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn metadata_line(out: &Outcome, seed: u64) -> String {
    let mut line = format!("# gaussq {}", out.command);
    for (k, v) in &out.params {
        let _ = write!(line, " {k}={v}");
    }
    let _ = write!(line, " seed={seed} version={VERSION}");
    line
}

fn render(out: &Outcome, format: Format, seed: u64) -> String {
    let meta = metadata_line(out, seed);
    match (&out.payload, format) {
        (Payload::Table { columns, rows, trailer }, Format::Csv) => {
            let mut s = format!("{meta}\n{}\n", columns.join(","));
            for row in rows {
                let cells: Vec<String> = row.iter().map(|&x| fmt_sig(x)).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            if !trailer.is_empty() {
                let cells: Vec<String> = trailer.iter().map(|(k, v)| format!("{k}={}", fmt_sig(*v))).collect();
                let _ = writeln!(s, "# {}", cells.join(" "));
            }
            s
        }
        (Payload::Table { columns, rows, trailer }, Format::Json) => {
            let records: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> = columns
                        .iter()
                        .zip(r)
                        .map(|(c, &x)| (c.to_string(), number(x)))
                        .collect();
                    Value::Object(m)
                })
                .collect();
            let mut doc = json!({"metadata": meta.trim_start_matches("# "), "rows": records});
            if !trailer.is_empty() {
                let t: Map<String, Value> = trailer.iter().map(|(k, v)| (k.to_string(), number(*v))).collect();
                doc["summary"] = Value::Object(t);
            }
            pretty(doc)
        }
        (Payload::Document(v), _) => {
            let mut doc = v.clone();
            if let Value::Object(m) = &mut doc {
                m.insert("metadata".into(), Value::String(meta.trim_start_matches("# ").to_string()));
            }
            pretty(doc)
        }
    }
}

/// JSON has no infinities; they are written as strings.
fn number(x: f64) -> Value {
    match serde_json::Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None => Value::String(fmt_sig(x)),
    }
}

fn pretty(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&round_json(v)).expect("serializable");
    s.push('\n');
    s
}

fn kv(name: &str, x: impl ToString) -> (String, String) {
    (name.to_string(), x.to_string())
}

fn kf(name: &str, x: f64) -> (String, String) {
    (name.to_string(), fmt_sig(x))
}

fn grid(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::OutOfRange {
            name: "points",
            value: points as f64,
            constraint: "points >= 2",
        });
    }
    Ok((0..points)
        .map(|k| from + (to - from) * k as f64 / (points - 1) as f64)
        .collect())
}

fn cmd_memory(a: &MemoryArgs) -> Result<Outcome> {
    let p = MemoryChannelParams::new(a.kappa, a.mu, a.nbar, a.energy)?;
    let c = memory_capacity(&p, a.tol)?;
    let flat = flat_allocation_capacity(&p)?;
    let z0 = if a.energy > 0.0 { waterfill(&p, a.tol)?.z0 } else { 0.0 };
    Ok(Outcome {
        command: "capacity memory".into(),
        params: vec![kf("kappa", a.kappa), kf("mu", a.mu), kf("nbar", a.nbar), kf("energy", a.energy), kf("tol", a.tol)],
        payload: Payload::Table {
            columns: vec!["kappa", "mu", "nbar", "energy", "capacity", "flat_capacity", "z0"],
            rows: vec![vec![a.kappa, a.mu, a.nbar, a.energy, c, flat, z0]],
            trailer: vec![],
        },
        exit: EXIT_OK,
    })
}

fn cmd_additive(a: &AdditiveArgs) -> Result<Outcome> {
    let c = additive_noise_capacity(a.mu, a.nc, a.energy, a.tol)?;
    Ok(Outcome {
        command: "capacity additive".into(),
        params: vec![kf("mu", a.mu), kf("nc", a.nc), kf("energy", a.energy), kf("tol", a.tol)],
        payload: Payload::Table {
            columns: vec!["mu", "nc", "energy", "capacity"],
            rows: vec![vec![a.mu, a.nc, a.energy, c]],
            trailer: vec![],
        },
        exit: EXIT_OK,
    })
}

fn cmd_curve(a: &CurveArgs) -> Result<Outcome> {
    let xs = grid(a.from, a.to, a.points)?;
    let rows = xs
        .par_iter()
        .map(|&x| {
            let (nbar, energy) = match a.vary {
                Sweep::Energy => (a.nbar, x),
                Sweep::Nbar => (x, a.energy),
            };
            let p = MemoryChannelParams::new(a.kappa, a.mu, nbar, energy)?;
            Ok(vec![nbar, energy, memory_capacity(&p, a.tol)?, flat_allocation_capacity(&p)?])
        })
        .collect::<Result<Vec<_>>>()?;
    let vary = match a.vary {
        Sweep::Energy => "energy",
        Sweep::Nbar => "nbar",
    };
    Ok(Outcome {
        command: "capacity curve".into(),
        params: vec![
            kf("kappa", a.kappa),
            kf("mu", a.mu),
            kf("nbar", a.nbar),
            kf("energy", a.energy),
            kv("vary", vary),
            kf("from", a.from),
            kf("to", a.to),
            kv("points", a.points),
            kf("tol", a.tol),
        ],
        payload: Payload::Table {
            columns: vec!["nbar", "energy", "capacity", "flat_capacity"],
            rows,
            trailer: vec![],
        },
        exit: EXIT_OK,
    })
}

fn cmd_ecrit(a: &EcritArgs) -> Result<Outcome> {
    let rows = grid(a.nbar_from, a.nbar_to, a.points)?
        .into_iter()
        .map(|n| Ok(vec![n, critical_energy(a.kappa, a.mu, n)?]))
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome {
        command: "capacity ecrit".into(),
        params: vec![
            kf("kappa", a.kappa),
            kf("mu", a.mu),
            kf("nbar_from", a.nbar_from),
            kf("nbar_to", a.nbar_to),
            kv("points", a.points),
        ],
        payload: Payload::Table {
            columns: vec!["nbar", "e_crit"],
            rows,
            trailer: vec![],
        },
        exit: EXIT_OK,
    })
}

fn cmd_waterfill(a: &WaterfillArgs) -> Result<Outcome> {
    if a.samples < 2 {
        return Err(Error::OutOfRange {
            name: "samples",
            value: a.samples as f64,
            constraint: "samples >= 2",
        });
    }
    let p = MemoryChannelParams::new(a.kappa, a.mu, a.nbar, a.energy)?;
    let sol = waterfill_with_samples(&p, a.tol, a.samples - 1)?;
    Ok(Outcome {
        command: "waterfill".into(),
        params: vec![
            kf("kappa", a.kappa),
            kf("mu", a.mu),
            kf("nbar", a.nbar),
            kf("energy", a.energy),
            kv("samples", a.samples),
            kf("tol", a.tol),
        ],
        payload: Payload::Table {
            columns: vec!["z", "n_z"],
            rows: sol.samples.iter().map(|&(z, n)| vec![z, n]).collect(),
            trailer: vec![("lambda_mult", sol.lambda_mult), ("z0", sol.z0), ("capacity", sol.capacity)],
        },
        exit: EXIT_OK,
    })
}

fn cmd_region(a: &RegionArgs) -> Result<Outcome> {
    let pts = broadcast_region(a.eta, a.energy, a.points)?;
    Ok(Outcome {
        command: "region".into(),
        params: vec![kf("eta", a.eta), kf("energy", a.energy), kv("points", a.points)],
        payload: Payload::Table {
            columns: vec!["r_b", "r_c_conjectured", "r_c_epi"],
            rows: pts.iter().map(|p| vec![p.r_b, p.r_c_conjectured, p.r_c_epi]).collect(),
            trailer: vec![],
        },
        exit: EXIT_OK,
    })
}

fn cmd_verify(a: &VerifyArgs, seed: u64) -> Result<Outcome> {
    let cfg = VerifyConfig {
        dim: a.dim,
        trials: a.trials,
        seed,
    };
    let names: Vec<&str> = if a.suite == "all" {
        SUITES.to_vec()
    } else {
        vec![a.suite.as_str()]
    };
    let reports: Vec<VerificationReport> = names
        .iter()
        .map(|n| run_suite(n, &cfg))
        .collect::<Result<_>>()?;
    for r in &reports {
        eprintln!(
            "gaussq verify: {} {} in {:.3}s (max violation {})",
            r.suite,
            if r.passed { "passed" } else { "FAILED" },
            r.wall_time.as_secs_f64(),
            fmt_sig(r.max_violation)
        );
    }
    let passed = reports.iter().all(|r| r.passed);
    let mut params = vec![kv("suite", &a.suite)];
    if let Some(d) = a.dim {
        params.push(kv("dim", d));
    }
    if let Some(t) = a.trials {
        params.push(kv("trials", t));
    }
    let body = if reports.len() == 1 {
        serde_json::to_value(&reports[0])
    } else {
        serde_json::to_value(&reports).map(|v| json!({ "reports": v, "passed": passed }))
    }
    .expect("serializable report");
    Ok(Outcome {
        command: "verify".into(),
        params,
        payload: Payload::Document(body),
        exit: if passed { EXIT_OK } else { EXIT_FAILURE },
    })
}

fn cmd_normalform(a: &NormalformArgs, seed: u64) -> Result<Outcome> {
    let (spec, source) = match (&a.spec, &a.k) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| Error::InvalidMap(format!("{}: {e}", path.display())))?;
            let spec: MapSpec = serde_json::from_str(&text).map_err(|e| Error::InvalidMap(e.to_string()))?;
            (spec, kv("spec", path.display()))
        }
        (None, Some(k)) => {
            let d = (k.len() as f64).sqrt().round() as usize;
            if d * d != k.len() {
                return Err(Error::InvalidMap(format!("{} entries do not form a square matrix", k.len())));
            }
            let alpha = match &a.alpha {
                Some(v) if v.len() == d * d => DMatrix::from_row_slice(d, d, v),
                Some(v) => return Err(Error::DimensionMismatch { expected: d * d, got: v.len() }),
                None => DMatrix::zeros(d, d),
            };
            let spec = MapSpec::new(DMatrix::from_row_slice(d, d, k), alpha)?;
            let join = |v: &[f64]| v.iter().map(|x| fmt_sig(*x)).collect::<Vec<_>>().join(";");
            (spec, kv("k", join(k)))
        }
        (None, None) => return Err(Error::InvalidMap("either --spec or --k is required".into())),
    };
    let spec_json = serde_json::to_value(&spec).expect("serializable spec");
    let mut doc = json!({ "spec": spec_json, "modes": spec.modes() });
    if spec.modes() == 1 {
        let valid = one_mode_valid(&spec, a.tol)?;
        doc["valid"] = json!(valid);
        doc["completely_positive"] = json!(one_mode_cp(&spec, a.tol)?);
        doc["case"] = json!("NotGaussianToGaussian");
        if valid {
            let nf = classify_one_mode(&spec, a.tol)?;
            doc["case"] = json!(nf.case);
            doc["normal_form"] = serde_json::to_value(&nf).expect("serializable");
        }
    } else if spec.alpha().amax() == 0.0 {
        let nf = classify_multimode_nonoise(spec.k(), a.tol)?;
        doc["valid"] = json!(nf.case.is_gaussian_to_gaussian());
        doc["case"] = json!(nf.case);
        if nf.case.is_gaussian_to_gaussian() {
            doc["normal_form"] = serde_json::to_value(&nf).expect("serializable");
        }
    } else {
        // No decision procedure: report only what sampling found.
        let out = sampled_positivity_falsifier(&spec, a.trials, seed);
        let witness = match &out.witness {
            None => Value::Null,
            Some((trial, Witness::Covariance(s))) => json!({
                "trial": trial,
                "covariance": s.row_iter().map(|r| r.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>(),
            }),
            Some((trial, Witness::Vector(w))) => json!({
                "trial": trial,
                "vector": w.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
            }),
        };
        doc["valid"] = if out.witness.is_some() { json!(false) } else { json!("undetermined") };
        doc["case"] = if out.witness.is_some() { json!("NotGaussianToGaussian") } else { json!("undetermined") };
        doc["falsifier"] = json!({
            "trials": out.trials,
            "max_violation": number(out.max_violation),
            "witness": witness,
        });
    }
    Ok(Outcome {
        command: "normalform".into(),
        params: vec![source, kf("tol", a.tol)],
        payload: Payload::Document(doc),
        exit: EXIT_OK,
    })
}

/// Appends `--key value` pairs from the `--config` file so that clap both
/// validates the keys and lets them override earlier flags.
fn expand_config(args: Vec<OsString>) -> std::result::Result<Vec<OsString>, String> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = args.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))?;
    let Value::Object(map) = value else {
        return Err(format!("config {} is not a JSON object", path.display()));
    };
    let mut out = args;
    for (key, v) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        if flag == "--config" {
            return Err("config files cannot nest --config".into());
        }
        let text = match v {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s,
            Value::Bool(true) => {
                out.push(flag.into());
                continue;
            }
            Value::Array(items) => items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
            other => return Err(format!("unsupported value for `{key}`: {other}")),
        };
        out.push(flag.into());
        out.push(text.into());
    }
    Ok(out)
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Capacity(CapacityCommand::Memory(a)) => cmd_memory(a),
        Command::Capacity(CapacityCommand::Additive(a)) => cmd_additive(a),
        Command::Capacity(CapacityCommand::Curve(a)) => cmd_curve(a),
        Command::Capacity(CapacityCommand::Ecrit(a)) => cmd_ecrit(a),
        Command::Waterfill(a) => cmd_waterfill(a),
        Command::Region(a) => cmd_region(a),
        Command::Verify(a) => cmd_verify(a, cli.seed),
        Command::Normalform(a) => cmd_normalform(a, cli.seed),
    }
}

/// Runs the tool and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("gaussq: {msg}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let start = Instant::now();
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("gaussq: {e}");
            return EXIT_USAGE;
        }
    };
    let text = render(&outcome, cli.format, cli.seed);
    let written = match &cli.output {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("gaussq: cannot write output: {e}");
        return EXIT_USAGE;
    }
    eprintln!("gaussq: {} finished in {:.3}s", outcome.command, start.elapsed().as_secs_f64());
    outcome.exit
}
