//! Command-line front end. [`run`] is what the `cdfreg` binary calls; it
//! never exits the process itself, so it can be driven from tests.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when a solve did
//! not converge (its result is still written).

mod files;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::analysis::{
    delta_q_seeded, gnsp_falsify_with, irwin_hall_check, recovery_bound, sparsity_sweep,
    BoundReport, DeltaEstimate, GnspSearch, ThetaSweep,
};
use crate::harness::{
    compressible_signal, gen_gaussian_matrix, read_config, run_sweep, success_table, trial_problem,
    write_curve_csv, write_manifest, write_records_csv, write_success_csv, Magnitudes, Manifest,
    MatrixScaling,
};
use crate::penalties::{Family, PenaltyModel, DEFAULT_WEIGHT_EPS};
use crate::solvers::{AdmmConfig, Irl1Config, MeasurementProblem, Regularizer, SolveResult};

pub use files::{format_vector, read_matrix, read_vector};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cdfreg",
    version,
    about = "Sparse recovery with CDF-induced penalties"
)]
struct Cli {
    /// Seed for every random draw (simulated problems, Monte Carlo). For
    /// `sweep` it overrides the config's master_seed.
    #[arg(long, global = true, value_parser = parse_u64)]
    seed: Option<u64>,
    /// Output file (output directory for `sweep`). Standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress informational messages on standard error.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Recover a sparse vector from y = A x.
    Solve(SolveArgs),
    /// Run a sparsity sweep described by a JSON config.
    Sweep(SweepArgs),
    /// Tabulate a penalty's normalized curve or its IRL1 weights.
    Penalty(PenaltyArgs),
    /// Evaluate J_θ(x) of a signal over a grid of θ.
    Measure(MeasureArgs),
    /// Null-space, spherical-section and Irwin–Hall diagnostics.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["matrix", "simulate"])))]
struct SolveArgs {
    /// Measurement matrix, CSV, row-major, no header.
    #[arg(long, requires = "y")]
    matrix: Option<PathBuf>,
    /// Observation vector file.
    #[arg(long)]
    y: Option<PathBuf>,
    /// Ground truth, used only to report the relative error.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Draw a Gaussian problem from --n, --m, --s and --seed instead.
    #[arg(long)]
    simulate: bool,
    #[arg(long, value_parser = parse_count, default_value = "256")]
    n: usize,
    #[arg(long, value_parser = parse_count, default_value = "64")]
    m: usize,
    #[arg(long, value_parser = parse_count, default_value = "10")]
    s: usize,
    /// "l1" or a penalty such as "weibull(k=1,sigma=1)".
    #[arg(long, default_value = "l1")]
    penalty: String,
    #[arg(long, value_parser = parse_f64, default_value = "1e-7")]
    lambda: f64,
    #[arg(long, value_parser = parse_count, default_value = "20")]
    max_outer: usize,
    #[arg(long, value_parser = parse_f64, default_value = "1e-8")]
    weight_eps: f64,
    #[arg(long, value_parser = parse_count, default_value = "2000")]
    max_iter: usize,
    #[arg(long, value_parser = parse_f64, default_value = "1")]
    rho: f64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").args(["curve", "weights", "list"])))]
struct PenaltyArgs {
    /// Penalty specification, e.g. "weibull(k=0.5,sigma=1)".
    #[arg(required_unless_present = "list")]
    spec: Option<String>,
    /// F(t)/F(1) (the default).
    #[arg(long)]
    curve: bool,
    /// IRL1 weights f(t + eps).
    #[arg(long)]
    weights: bool,
    /// List the catalog families and their parameters.
    #[arg(long)]
    list: bool,
    #[arg(long, value_parser = parse_f64, default_value = "0")]
    from: f64,
    #[arg(long, value_parser = parse_f64, default_value = "2")]
    to: f64,
    #[arg(long, value_parser = parse_count, default_value = "201")]
    points: usize,
    #[arg(long, value_parser = parse_f64, default_value = "1e-8")]
    eps: f64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("signal_source").required(true).args(["signal", "compressible"])))]
#[command(group(ArgGroup::new("grid_source").required(true).args(["theta", "from"])))]
struct MeasureArgs {
    /// Family with one free parameter: a bare one-parameter family name
    /// ("exponential" is swept by its rate 1/σ), or a template leaving one
    /// parameter out, e.g. "weibull(k=1.5)".
    #[arg(long)]
    template: String,
    /// With a template, θ is the reciprocal of the free parameter.
    #[arg(long)]
    reciprocal: bool,
    #[arg(long)]
    signal: Option<PathBuf>,
    /// Signal of length N with entries j^(-EXP).
    #[arg(long, num_args = 2, value_names = ["N", "EXP"], value_parser = parse_f64)]
    compressible: Option<Vec<f64>>,
    /// Explicit comma-separated θ values.
    #[arg(long, value_delimiter = ',', value_parser = parse_f64)]
    theta: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_f64, requires = "to")]
    from: Option<f64>,
    #[arg(long, value_parser = parse_f64)]
    to: Option<f64>,
    #[arg(long, value_parser = parse_count, default_value = "50")]
    points: usize,
    /// Space the θ grid logarithmically.
    #[arg(long)]
    log: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("check").required(true).args(["gnsp", "ssp", "irwin_hall"])))]
struct VerifyArgs {
    /// Search for a null space property violation.
    #[arg(long)]
    gnsp: bool,
    /// Estimate the spherical-section constant (and the error bound when
    /// --spec and --s are given).
    #[arg(long)]
    ssp: bool,
    /// Compare J(x) of random signals with the Irwin–Hall law.
    #[arg(long)]
    irwin_hall: bool,
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Use a seeded Gaussian matrix of this many rows (with --cols).
    #[arg(long, value_parser = parse_count, requires = "cols", conflicts_with = "matrix")]
    rows: Option<usize>,
    #[arg(long, value_parser = parse_count)]
    cols: Option<usize>,
    #[arg(long)]
    spec: Option<String>,
    #[arg(long, value_parser = parse_count)]
    s: Option<usize>,
    #[arg(long, value_parser = parse_count, default_value = "10000")]
    budget: usize,
    /// Extra magnitudes at which each kernel direction is tested.
    #[arg(long, value_delimiter = ',', value_parser = parse_f64)]
    scales: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_f64, default_value = "inf")]
    q: f64,
    #[arg(long, value_parser = parse_count, default_value = "4096")]
    grid: usize,
    /// Signal length for --irwin-hall.
    #[arg(long, value_parser = parse_count, default_value = "12")]
    n: usize,
    #[arg(long, value_parser = parse_count, default_value = "100000")]
    samples: usize,
}

/// Outcome of a command: exit code, or a usage-level error message.
type Outcome = Result<i32, String>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let ctx = Context {
        seed: cli.seed,
        out: cli.out.clone(),
        quiet: cli.quiet,
    };
    let outcome = match &cli.command {
        Command::Solve(a) => cmd_solve(&ctx, a, stdout, stderr),
        Command::Sweep(a) => cmd_sweep(&ctx, a, stderr),
        Command::Penalty(a) => cmd_penalty(&ctx, a, stdout),
        Command::Measure(a) => cmd_measure(&ctx, a, stdout),
        Command::Verify(a) => cmd_verify(&ctx, a, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
    }
}

struct Context {
    seed: Option<u64>,
    out: Option<PathBuf>,
    quiet: bool,
}

impl Context {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Writes the finished output in one piece, to --out or standard output.
    fn emit(&self, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), String> {
        match &self.out {
            Some(path) => {
                std::fs::write(path, bytes).map_err(|e| format!("{}: {e}", path.display()))
            }
            None => stdout.write_all(bytes).map_err(|e| e.to_string()),
        }
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let t = s.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        _ => t
            .parse::<f64>()
            .map_err(|_| format!("'{s}' is not a number")),
    }
}

/// Non-negative integer; scientific notation such as `1e5` is accepted.
fn parse_count(s: &str) -> Result<usize, String> {
    let v = parse_f64(s)?;
    if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= 9.007_199_254_740_992e15 {
        Ok(v as usize)
    } else {
        Err(format!("'{s}' is not a non-negative integer"))
    }
}

fn parse_u64(s: &str) -> Result<u64, String> {
    s.trim()
        .parse::<u64>()
        .or_else(|_| parse_count(s).map(|v| v as u64))
        .map_err(|_| format!("'{s}' is not a non-negative integer"))
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, String> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| e.to_string())?;
    bytes.push(b'\n');
    Ok(bytes)
}

#[derive(Serialize)]
struct SolveReport {
    penalty: String,
    lambda: f64,
    rows: usize,
    cols: usize,
    seed: Option<u64>,
    rel_error: Option<f64>,
    #[serde(flatten)]
    result: SolveResult,
}

fn cmd_solve(
    ctx: &Context,
    a: &SolveArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Outcome {
    let reg: Regularizer = a.penalty.parse().map_err(|e| format!("--penalty: {e}"))?;
    let irl1 = Irl1Config {
        lambda: a.lambda,
        max_outer: a.max_outer,
        eps: a.weight_eps,
        ..Irl1Config::default()
    };
    let admm = AdmmConfig {
        rho: a.rho,
        max_iter: a.max_iter,
        ..AdmmConfig::default()
    };
    irl1.validate().map_err(|e| e.to_string())?;
    admm.validate().map_err(|e| e.to_string())?;
    if let Regularizer::Cdf(model) = &reg {
        crate::solvers::check_irl1_model(model).map_err(|e| e.to_string())?;
    }

    let problem = if a.simulate {
        if a.m == 0 || a.n == 0 || a.s == 0 || a.s > a.n {
            return Err(format!(
                "--simulate needs 0 < s <= n, got n = {}, s = {}",
                a.n, a.s
            ));
        }
        trial_problem(
            a.n,
            a.m,
            a.s,
            ctx.seed(),
            Magnitudes::Gaussian,
            MatrixScaling::InverseRows,
        )
        .map_err(|e| e.to_string())?
    } else {
        let matrix = read_matrix(a.matrix.as_deref().expect("clap group"))?;
        let y = read_vector(a.y.as_deref().expect("clap requires"))?;
        let truth = a.truth.as_deref().map(read_vector).transpose()?;
        MeasurementProblem::new(matrix, DVector::from_vec(y), truth.map(DVector::from_vec))
            .map_err(|e| e.to_string())?
    };

    let result = reg
        .solve(&problem, &irl1, &admm)
        .map_err(|e| e.to_string())?;
    let report = SolveReport {
        penalty: reg.to_string(),
        lambda: a.lambda,
        rows: problem.rows(),
        cols: problem.cols(),
        seed: a.simulate.then(|| ctx.seed()),
        rel_error: problem.relative_error(&result.xhat),
        result,
    };
    ctx.emit(&to_json(&report)?, stdout)?;
    if !ctx.quiet {
        let err = report
            .rel_error
            .map(|e| format!(", relative error {e:.3e}"))
            .unwrap_or_default();
        let _ = writeln!(
            stderr,
            "{}: {} outer iterations{err}{}",
            report.penalty,
            report.result.outer_iters,
            if report.result.converged {
                ""
            } else {
                ", NOT converged"
            }
        );
    }
    Ok(if report.result.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn cmd_sweep(ctx: &Context, a: &SweepArgs, stderr: &mut dyn Write) -> Outcome {
    let Some(dir) = &ctx.out else {
        return Err("sweep needs --out DIR for its result files".into());
    };
    let mut cfg = read_config(&a.config).map_err(|e| e.to_string())?;
    if let Some(seed) = ctx.seed {
        cfg.master_seed = seed;
    }
    let records = run_sweep(&cfg).map_err(|e| e.to_string())?;
    let rates = success_table(&records);

    let mut results = Vec::new();
    write_records_csv(&mut results, &records).map_err(|e| e.to_string())?;
    let mut rate_csv = Vec::new();
    write_success_csv(&mut rate_csv, &rates).map_err(|e| e.to_string())?;

    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let write = |name: &str, bytes: &[u8]| {
        let path = dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| format!("{}: {e}", path.display()))
    };
    write("results.csv", &results)?;
    write("success_rates.csv", &rate_csv)?;
    write_manifest(&dir.join("manifest.json"), &Manifest::new(&cfg, &records))
        .map_err(|e| e.to_string())?;

    if !ctx.quiet {
        let _ = writeln!(
            stderr,
            "{} records written to {}",
            records.len(),
            dir.display()
        );
        for row in &rates {
            let _ = writeln!(
                stderr,
                "{:28} s={:3} success={:.2}",
                row.penalty, row.s, row.success_rate
            );
        }
    }
    Ok(EXIT_OK)
}

fn linear_grid(from: f64, to: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..points)
            .map(|i| from + (to - from) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

fn cmd_penalty(ctx: &Context, a: &PenaltyArgs, stdout: &mut dyn Write) -> Outcome {
    if a.list {
        let mut text = String::from("family,parameters\n");
        for f in Family::ALL {
            text.push_str(&format!("{},{}\n", f, f.param_names().join(" ")));
        }
        ctx.emit(text.as_bytes(), stdout)?;
        return Ok(EXIT_OK);
    }
    let spec = a.spec.as_deref().expect("clap requires spec");
    let model: PenaltyModel = spec.parse().map_err(|e| format!("{e}"))?;
    if !(a.from.is_finite() && a.to.is_finite() && a.from >= 0.0 && a.to >= a.from) || a.points == 0
    {
        return Err("grid needs 0 <= --from <= --to and --points >= 1".into());
    }
    let grid = linear_grid(a.from, a.to, a.points);
    let mut buf = Vec::new();
    if a.weights {
        let eps = if a.eps >= 0.0 {
            a.eps
        } else {
            DEFAULT_WEIGHT_EPS
        };
        let w: Vec<f64> = grid
            .iter()
            .map(|&t| model.irl1_weight(t, eps))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        write_curve_csv(&mut buf, ["t", "weight"], grid.iter().copied().zip(w))
            .map_err(|e| e.to_string())?;
    } else {
        let c = model
            .scaled_penalty_curve(&grid)
            .map_err(|e| e.to_string())?;
        write_curve_csv(
            &mut buf,
            ["t", "scaled_penalty"],
            grid.iter().copied().zip(c),
        )
        .map_err(|e| e.to_string())?;
    }
    ctx.emit(&buf, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_measure(ctx: &Context, a: &MeasureArgs, stdout: &mut dyn Write) -> Outcome {
    let sweep = if a.template.contains('(') {
        ThetaSweep::parse(&a.template, a.reciprocal)
    } else {
        let family = Family::from_name(a.template.trim())
            .ok_or_else(|| format!("unknown family '{}'", a.template))?;
        if a.reciprocal {
            ThetaSweep::parse(family.name(), true)
        } else {
            ThetaSweep::for_family(family)
        }
    }
    .map_err(|e| e.to_string())?;

    let x = match (&a.signal, &a.compressible) {
        (Some(path), _) => read_vector(path)?,
        (None, Some(ne)) => {
            let n =
                parse_count(&ne[0].to_string()).map_err(|e| format!("--compressible N: {e}"))?;
            if n == 0 {
                return Err("--compressible N must be positive".into());
            }
            compressible_signal(n, ne[1])
        }
        _ => unreachable!("clap group"),
    };

    let grid = match (&a.theta, a.from, a.to) {
        (Some(t), ..) => t.clone(),
        (None, Some(from), Some(to)) => {
            if a.log {
                if !(from > 0.0 && to > 0.0) {
                    return Err("--log needs positive --from and --to".into());
                }
                linear_grid(from.ln(), to.ln(), a.points)
                    .into_iter()
                    .map(f64::exp)
                    .collect()
            } else {
                linear_grid(from, to, a.points)
            }
        }
        _ => unreachable!("clap group"),
    };

    let values = sparsity_sweep(&sweep, &grid, &x);
    let mut w = csv::Writer::from_writer(Vec::new());
    let wr = |e: csv::Error| e.to_string();
    w.write_record(["theta", "J", "error"]).map_err(wr)?;
    for (theta, v) in grid.iter().zip(values) {
        match v {
            Ok(j) => w.write_record([theta.to_string(), j.to_string(), String::new()]),
            Err(e) => w.write_record([theta.to_string(), String::new(), e.to_string()]),
        }
        .map_err(wr)?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    ctx.emit(&bytes, stdout)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SspReport {
    delta: DeltaEstimate,
    bound: Option<BoundReport>,
}

fn verify_matrix(ctx: &Context, a: &VerifyArgs) -> Result<DMatrix<f64>, String> {
    match (&a.matrix, a.rows, a.cols) {
        (Some(path), ..) => read_matrix(path),
        (None, Some(m), Some(n)) if m > 0 && n > 0 => {
            gen_gaussian_matrix(m, n, ctx.seed()).map_err(|e| e.to_string())
        }
        _ => Err("this check needs --matrix FILE or --rows M --cols N".into()),
    }
}

fn cmd_verify(ctx: &Context, a: &VerifyArgs, stdout: &mut dyn Write) -> Outcome {
    let model = a
        .spec
        .as_deref()
        .map(|s| {
            s.parse::<PenaltyModel>()
                .map_err(|e| format!("--spec: {e}"))
        })
        .transpose()?;
    let bytes = if a.gnsp {
        let (Some(model), Some(s)) = (&model, a.s) else {
            return Err("--gnsp needs --spec and --s".into());
        };
        let matrix = verify_matrix(ctx, a)?;
        let mut search = GnspSearch::new(a.budget, ctx.seed());
        if let Some(scales) = &a.scales {
            search.scales = scales.clone();
        }
        to_json(&gnsp_falsify_with(&matrix, s, model, &search).map_err(|e| e.to_string())?)?
    } else if a.ssp {
        let matrix = verify_matrix(ctx, a)?;
        let delta = delta_q_seeded(&matrix, a.q, a.grid, ctx.seed()).map_err(|e| e.to_string())?;
        let bound = match (&model, a.s) {
            (Some(model), Some(s)) if delta.value.is_finite() => Some(
                recovery_bound(delta.value, a.q, matrix.ncols(), model, s)
                    .map_err(|e| e.to_string())?,
            ),
            _ => None,
        };
        to_json(&SspReport { delta, bound })?
    } else {
        let Some(model) = &model else {
            return Err("--irwin-hall needs --spec".into());
        };
        to_json(&irwin_hall_check(model, a.n, a.samples, ctx.seed()).map_err(|e| e.to_string())?)?
    };
    ctx.emit(&bytes, stdout)?;
    Ok(EXIT_OK)
}
