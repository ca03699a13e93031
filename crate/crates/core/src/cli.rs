//! Command-line front end.
//!
//! Every command prints one record
//! `{"schema_version": "1", "command": ..., "inputs": {...}, "results": {...}}`
//! (or a CSV table with `--format csv`). Output is produced only after the
//! whole computation succeeded.
//!
//! Exit codes: 0 success, 1 I/O or internal failure, 2 usage error,
//! 3 invalid input (domain, normalization, mode, malformed point file).

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::complexity::{
    alpha_from_g, expected_random_sq, family_bounds, inverse_bounds, inverse_upper_classical, regime_advisory,
    sweep, GFamily,
};
use crate::constants::compute_constants;
use crate::discrepancy::{
    closed_form_l2_squared, initial_l2_squared, mc_definition_l2_squared, CapScale, ScaleMode,
};
use crate::error::{Error, Result};
use crate::format::{fmt_f64, to_json_string};
use crate::optimize::{maximize_with, OptimizeOptions};
use crate::sphere_geom::{
    antipodal_symmetrize, cap_measure, cap_measure_estimate_check, read_point_set, uniform_points,
    write_point_set_csv, write_point_set_json, PointSet, Seed,
};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Parser, Debug)]
#[command(name = "spherecap", version, about = "Spherical cap L2 discrepancy toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Worker threads (does not change results).
    #[arg(long, global = true, value_name = "K")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// C_d, I_d and related constants.
    Constants {
        #[arg(long)]
        dim: u64,
    },
    /// Normalized measure of a cap of height t.
    CapMeasure {
        #[arg(long)]
        dim: u64,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Uniform random point set.
    Generate {
        #[arg(long)]
        dim: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Append the antipode of every point.
        #[arg(long)]
        symmetrize: bool,
    },
    /// Closed-form discrepancy of a point set.
    Discrepancy {
        #[arg(long, value_name = "FILE")]
        points: PathBuf,
        #[command(flatten)]
        scale: ScaleArgs,
    },
    /// Closed form against the direct Monte Carlo estimate.
    VerifyStolarsky {
        #[arg(long, value_name = "FILE")]
        points: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        #[arg(long, default_value_t = 64)]
        t_nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Inverse-discrepancy bounds for one dimension.
    Bounds {
        #[arg(long)]
        dim: u64,
        #[arg(long)]
        epsilon: f64,
        #[command(flatten)]
        alpha: AlphaArgs,
    },
    /// Inverse-discrepancy bounds over a range of dimensions.
    Sweep {
        /// classical, sqrt2cd, eta:V, g-const:C, g-poly:DELTA or g-exp:A
        #[arg(long)]
        family: String,
        /// `D1..D2` (inclusive) or a comma-separated list.
        #[arg(long)]
        dims: String,
        #[arg(long)]
        epsilon: f64,
    },
    /// Expected squared discrepancy of i.i.d. uniform points.
    Expected {
        #[arg(long)]
        dim: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        alpha: f64,
    },
    /// Locally maximize the pairwise distance sum.
    Optimize {
        #[arg(long, value_name = "FILE")]
        points: PathBuf,
        #[arg(long, default_value_t = 1000)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Seed for the jitter applied to coincident start points.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Record the objective after every accepted step.
        #[arg(long)]
        trace: bool,
        /// Also write the optimized set (JSON) to FILE.
        #[arg(long, value_name = "FILE")]
        points_out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct AlphaArgs {
    #[arg(long)]
    alpha: Option<f64>,
    /// classical, sqrt2cd, eta:V, g-const:C, g-poly:DELTA or g-exp:A
    #[arg(long)]
    alpha_mode: Option<String>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct ScaleArgs {
    #[arg(long)]
    alpha: Option<f64>,
    /// classical, sqrt2cd, eta:V, g-const:C, g-poly:DELTA or g-exp:A
    #[arg(long)]
    alpha_mode: Option<String>,
    /// Hemisphere discrepancy (alpha = 0).
    #[arg(long)]
    hemisphere: bool,
}

/// What a command produced.
enum Output {
    Record {
        inputs: Map<String, Value>,
        results: Map<String, Value>,
    },
    /// Table for CSV mode; JSON mode still uses the record.
    Table {
        inputs: Map<String, Value>,
        results: Map<String, Value>,
        header: Vec<&'static str>,
        rows: Vec<Vec<String>>,
    },
    /// A point-set file, written verbatim.
    Points(PointSet),
}

/// Runs the command line `argv` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let name = command_name(&cli.command);
    let result = match cli.threads {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(Error::InternalConsistency(format!("thread pool: {e}"))),
        },
        None => execute(&cli),
    };
    match result.and_then(|text| emit(&cli, &text)) {
        Ok(()) => 0,
        Err(e) => {
            let record = json!({
                "schema_version": SCHEMA_VERSION,
                "command": name,
                "error": { "kind": e.kind(), "message": e.to_string() },
            });
            eprintln!("{}", to_json_string(&record));
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::InternalConsistency(_) => 1,
        _ => 3,
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Constants { .. } => "constants",
        Command::CapMeasure { .. } => "cap-measure",
        Command::Generate { .. } => "generate",
        Command::Discrepancy { .. } => "discrepancy",
        Command::VerifyStolarsky { .. } => "verify-stolarsky",
        Command::Bounds { .. } => "bounds",
        Command::Sweep { .. } => "sweep",
        Command::Expected { .. } => "expected",
        Command::Optimize { .. } => "optimize",
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<String> {
    let output = dispatch(&cli.command)?;
    let name = command_name(&cli.command);
    Ok(match (output, cli.format) {
        (Output::Points(p), Format::Json) => write_point_set_json(&p) + "\n",
        (Output::Points(p), Format::Csv) => {
            let mut buf = Vec::new();
            write_point_set_csv(&p, &mut buf)?;
            String::from_utf8(buf).map_err(|e| Error::InternalConsistency(e.to_string()))?
        }
        (Output::Record { inputs, results } | Output::Table { inputs, results, .. }, Format::Json) => {
            let record = json!({
                "schema_version": SCHEMA_VERSION,
                "command": name,
                "inputs": inputs,
                "results": results,
            });
            to_json_string(&record) + "\n"
        }
        (Output::Record { results, .. }, Format::Csv) => {
            let (header, row): (Vec<String>, Vec<String>) = results
                .iter()
                .filter_map(|(k, v)| csv_cell(v).map(|c| (k.clone(), c)))
                .unzip();
            csv_text(&header, &[row])?
        }
        (Output::Table { header, rows, .. }, Format::Csv) => {
            csv_text(&header.iter().map(|h| h.to_string()).collect::<Vec<_>>(), &rows)?
        }
    })
}

/// Scalar JSON value as a CSV cell; arrays and objects are left out.
fn csv_cell(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some(String::new()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => u.to_string(),
            (None, Some(i), _) => i.to_string(),
            (_, _, Some(f)) => fmt_f64(f),
            _ => n.to_string(),
        }),
        Value::String(s) => Some(s.clone()),
        Value::Array(_) | Value::Object(_) => None,
    }
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::InternalConsistency(format!("csv: {e}"));
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InternalConsistency(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::InternalConsistency(e.to_string()))
}

fn obj(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("json! object literal"),
    }
}

fn resolve_alpha(d: u64, alpha: Option<f64>, mode: Option<&str>) -> Result<(f64, Option<GFamily>)> {
    match (alpha, mode) {
        (Some(a), None) => {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::domain("alpha", format!("alpha must lie in [0, 1], got {a}")));
            }
            Ok((a, None))
        }
        (None, Some(m)) => {
            let fam: GFamily = m.parse()?;
            Ok((alpha_from_g(fam, d)?, Some(fam)))
        }
        _ => Err(Error::domain("alpha", "give exactly one of --alpha or --alpha-mode")),
    }
}

fn dispatch(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Constants { dim } => {
            let c = compute_constants(*dim)?;
            Ok(Output::Record {
                inputs: obj(json!({ "dim": dim })),
                results: obj(json!({
                    "d": c.d,
                    "c_d": c.c_d,
                    "i_d": c.i_d,
                    "cdid": c.cdid,
                    "ratio_cdid": c.ratio_cdid(),
                    "f_star": c.f_star,
                    "sqrt2_cd": std::f64::consts::SQRT_2 * c.c_d,
                    "initial_classical_sq": 1.0 - c.cdid,
                })),
            })
        }
        Command::CapMeasure { dim, t } => {
            let m = cap_measure(*dim, *t)?;
            let est = (*t > 0.0 && *t < 1.0)
                .then(|| cap_measure_estimate_check(*dim, *t))
                .transpose()?;
            Ok(Output::Record {
                inputs: obj(json!({ "dim": dim, "t": t })),
                results: obj(json!({
                    "measure": m,
                    "estimate_lower": est.map(|e| e.lower),
                    "estimate_upper": est.map(|e| e.upper),
                })),
            })
        }
        Command::Generate { dim, n, seed, symmetrize } => {
            let mut p = uniform_points(*dim, *n, Seed(*seed))?;
            if *symmetrize {
                p = antipodal_symmetrize(&p)?;
            }
            let label = format!("uniform d={dim} n={n} seed={seed}{}", if *symmetrize { " symmetrized" } else { "" });
            Ok(Output::Points(p.with_label(label)))
        }
        Command::Discrepancy { points, scale } => {
            let p = read_point_set(points)?;
            let d = p.d();
            let (alpha, fam) = if scale.hemisphere {
                (0.0, None)
            } else {
                resolve_alpha(d, scale.alpha, scale.alpha_mode.as_deref())?
            };
            let s = CapScale::new(alpha, d)?;
            let sq = closed_form_l2_squared(&p, &s)?;
            let init = initial_l2_squared(&s)?;
            let method = match s.mode() {
                ScaleMode::Hemisphere => "hemisphere",
                _ => "stolarsky",
            };
            Ok(Output::Record {
                inputs: obj(json!({
                    "points": points.display().to_string(),
                    "alpha": alpha,
                    "alpha_mode": fam.map(|f| f.to_string()),
                })),
                results: obj(json!({
                    "d": d,
                    "n": p.len(),
                    "alpha": alpha,
                    "method": method,
                    "value": sq.sqrt(),
                    "value_squared": sq,
                    "initial_squared": init,
                    "normalized": (sq / init).sqrt(),
                })),
            })
        }
        Command::VerifyStolarsky { points, alpha, samples, t_nodes, seed } => {
            let p = read_point_set(points)?;
            let s = CapScale::new(*alpha, p.d())?;
            let closed = match s.mode() {
                ScaleMode::McOnly => None,
                _ => Some(closed_form_l2_squared(&p, &s)?),
            };
            let mc = mc_definition_l2_squared(&p, *alpha, *samples, *t_nodes, Seed(*seed))?;
            let z = closed.map(|c| if mc.std_error > 0.0 { (mc.mean - c) / mc.std_error } else { 0.0 });
            Ok(Output::Record {
                inputs: obj(json!({
                    "points": points.display().to_string(),
                    "alpha": alpha,
                    "samples": samples,
                    "t_nodes": t_nodes,
                    "seed": seed,
                })),
                results: obj(json!({
                    "d": p.d(),
                    "n": p.len(),
                    "alpha": alpha,
                    "mode": s.mode().name(),
                    "closed_form": closed,
                    "mc_mean": mc.mean,
                    "std_error": mc.std_error,
                    "seed": seed,
                    "z_score": z,
                    "within_4se": closed.map(|c| (mc.mean - c).abs() <= 4.0 * mc.std_error),
                })),
            })
        }
        Command::Bounds { dim, epsilon, alpha } => {
            let (a, fam) = resolve_alpha(*dim, alpha.alpha, alpha.alpha_mode.as_deref())?;
            let b = match fam {
                Some(f) => family_bounds(f, *dim, *epsilon)?,
                None => inverse_bounds(*epsilon, *dim, a)?,
            };
            let dim_only = (a == 1.0).then(|| inverse_upper_classical(*epsilon, *dim)).transpose()?;
            Ok(Output::Record {
                inputs: obj(json!({
                    "dim": dim,
                    "epsilon": epsilon,
                    "alpha": alpha.alpha,
                    "alpha_mode": fam.map(|f| f.to_string()),
                })),
                results: obj(json!({
                    "d": b.d,
                    "epsilon": b.epsilon,
                    "alpha": b.alpha,
                    "g": b.g,
                    "lower": b.lower,
                    "upper": b.upper,
                    "upper_dimension_only": dim_only,
                })),
            })
        }
        Command::Sweep { family, dims, epsilon } => {
            let fam: GFamily = family.parse()?;
            let ds = parse_dims(dims)?;
            let rows = sweep(fam, &ds, *epsilon)?;
            let advisory = regime_advisory(fam, &rows);
            let json_rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "d": r.d,
                        "epsilon": r.epsilon,
                        "alpha": r.bounds.map(|b| b.alpha),
                        "g": r.bounds.map(|b| b.g),
                        "lower": r.bounds.map(|b| b.lower),
                        "upper": r.bounds.map(|b| b.upper),
                        "flag": r.flag,
                    })
                })
                .collect();
            let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
            let table = rows
                .iter()
                .map(|r| {
                    vec![
                        r.d.to_string(),
                        fmt_f64(r.epsilon),
                        opt(r.bounds.map(|b| b.alpha)),
                        opt(r.bounds.map(|b| b.g)),
                        opt(r.bounds.map(|b| b.lower)),
                        r.bounds.map(|b| b.upper.to_string()).unwrap_or_default(),
                        r.flag.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            Ok(Output::Table {
                inputs: obj(json!({ "family": fam.to_string(), "dims": dims, "epsilon": epsilon })),
                results: obj(json!({ "rows": json_rows, "advisory": advisory })),
                header: vec!["d", "epsilon", "alpha", "g", "lower", "upper", "flag"],
                rows: table,
            })
        }
        Command::Expected { dim, n, alpha } => {
            let v = expected_random_sq(*dim, *n, *alpha)?;
            Ok(Output::Record {
                inputs: obj(json!({ "dim": dim, "n": n, "alpha": alpha })),
                results: obj(json!({ "value_squared": v })),
            })
        }
        Command::Optimize { points, max_iters, tol, seed, trace, points_out } => {
            let p = read_point_set(points)?;
            let mut opts = OptimizeOptions::new(*max_iters, *tol);
            opts.seed = Seed(*seed);
            opts.record_trace = *trace;
            let (q, rep) = maximize_with(&p, &opts)?;
            let classical = CapScale::classical(p.d())?;
            let before = closed_form_l2_squared(&p, &classical)?;
            let after = closed_form_l2_squared(&q, &classical)?;
            if let Some(path) = points_out {
                fs::write(path, write_point_set_json(&q) + "\n")?;
            }
            Ok(Output::Record {
                inputs: obj(json!({
                    "points": points.display().to_string(),
                    "max_iters": max_iters,
                    "tol": tol,
                    "seed": seed,
                })),
                results: obj(json!({
                    "d": p.d(),
                    "n": p.len(),
                    "initial_objective": rep.initial_objective,
                    "final_objective": rep.final_objective,
                    "iterations": rep.iterations,
                    "accepted_steps": rep.accepted_steps,
                    "converged": rep.converged,
                    "jittered": rep.jittered,
                    "classical_sq_before": before,
                    "classical_sq_after": after,
                    "step_trace": rep.step_trace,
                })),
            })
        }
    }
}

/// `D1..D2` (inclusive) or `D1,D2,...`.
fn parse_dims(s: &str) -> Result<Vec<u64>> {
    let num = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|e| Error::Parse(format!("dimension '{t}': {e}")))
    };
    let ds: Vec<u64> = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(Error::domain("sweep", format!("empty dimension range {s}")));
        }
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<Result<_>>()?
    };
    if ds.is_empty() || ds.contains(&0) {
        return Err(Error::domain("sweep", "dimensions must be >= 1"));
    }
    Ok(ds)
}
