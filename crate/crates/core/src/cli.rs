//! The `qrpat` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 argument error, 3 I/O error.

use std::io::Write;
use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};
use serde::Serialize;

use crate::checks::{run_checks, CheckRegistry};
use crate::pattern::{admits, bundle_parameter, denominator_set, layouts_equivalent};
use crate::predictor::{fraction_params, parabola_family, FractionParams};
use crate::render::{overlay_predictions, render_scatter, render_sum_squares, write_pgm, write_svg};
use crate::residue::{farey_fractions, lambda_value, ExactRational, Modulus, ReducedFraction};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "QRPAT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "qrpat", version, about = "Parabola patterns in quadratic-residue plots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scatter plot of x² mod m as a PGM image.
    Plot(PlotArgs),
    /// Grayscale grid of (x² + y²) mod m as a PGM image.
    Grid(GridArgs),
    /// Parabola family parameters for one fraction or all fractions up to a denominator.
    Predict(PredictArgs),
    /// Run the verification checks against direct squaring.
    Verify(VerifyArgs),
    /// Compare the parabola layouts of two moduli.
    Equiv(EquivArgs),
    /// Bundle curves through the parabola vertices, optionally drawn as SVG.
    Bundle(BundleArgs),
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub modulus: u64,
    #[arg(long, default_value_t = 800)]
    pub width: usize,
    #[arg(long, default_value_t = 800)]
    pub height: usize,
    /// Plot only x < m/2.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub half: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub modulus: u64,
    #[arg(long)]
    pub size: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("target").required(true).args(["fraction", "max_denominator"]))]
pub struct PredictArgs {
    #[arg(long)]
    pub modulus: u64,
    #[arg(long)]
    pub fraction: Option<String>,
    #[arg(long)]
    pub max_denominator: Option<u64>,
    /// Emit JSON instead of a text summary.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub modulus: u64,
    #[arg(long)]
    pub max_denominator: u64,
    /// Half-width of the direct-squaring window around x0 (default: min(50, ⌊(m−1)/2⌋)).
    #[arg(long)]
    pub window: Option<u64>,
    /// Comma-separated subset of checks to run (default: all registered).
    #[arg(long, value_delimiter = ',')]
    pub checks: Vec<String>,
}

#[derive(Debug, Args)]
pub struct EquivArgs {
    #[arg(long)]
    pub m1: u64,
    #[arg(long)]
    pub m2: u64,
    /// Λ = Λ(n) = 2·lcm(2..n).
    #[arg(long, default_value_t = 9)]
    pub lambda_n: u32,
    /// Largest denominator compared (default: the Λ index n).
    #[arg(long)]
    pub max_denominator: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BundleArgs {
    #[arg(long)]
    pub modulus: u64,
    #[arg(long, default_value_t = 9)]
    pub lambda_n: u32,
    #[arg(long, default_value_t = 9)]
    pub max_denominator: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 800)]
    pub width: usize,
    #[arg(long, default_value_t = 800)]
    pub height: usize,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    VerifyFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::VerifyFailed => EXIT_VERIFY_FAILED,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

type CliResult = std::result::Result<(), CliError>;

/// Parses `args` (program name first) and runs the command, returning the exit code.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            }
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Plot(a) => cmd_plot(a),
        Command::Grid(a) => cmd_grid(a),
        Command::Predict(a) => cmd_predict(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Equiv(a) => cmd_equiv(a, out),
        Command::Bundle(a) => cmd_bundle(a, out, err),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => {
                    let _ = writeln!(err, "error: {msg}");
                }
                CliError::Io(msg) => {
                    let _ = writeln!(err, "I/O error: {msg}");
                }
                CliError::VerifyFailed => {
                    let _ = writeln!(err, "verification failed");
                }
            }
            e.exit_code()
        }
    }
}

fn modulus(m: u64) -> std::result::Result<Modulus, CliError> {
    Ok(Modulus::new(m)?)
}

fn lambda_of(n: u32) -> std::result::Result<u128, CliError> {
    Ok(lambda_value(n)?)
}

fn require_above_square(m: u64, d: u64) -> CliResult {
    if (d as u128).pow(2) >= m as u128 {
        return Err(Error::ModulusNotAboveDenominatorSquare { m, b: d }.into());
    }
    Ok(())
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(out).map_err(io_err)
}

pub fn cmd_plot(a: PlotArgs) -> CliResult {
    let m = modulus(a.modulus)?;
    let canvas = render_scatter(m, a.width, a.height, a.half)?;
    write_pgm(&canvas, &a.out)?;
    Ok(())
}

pub fn cmd_grid(a: GridArgs) -> CliResult {
    let m = modulus(a.modulus)?;
    let canvas = render_sum_squares(m, a.size)?;
    write_pgm(&canvas, &a.out)?;
    Ok(())
}

/// Exact rational as a numerator/denominator pair.
#[derive(Debug, Serialize)]
pub struct RationalJson {
    pub num: i128,
    pub den: i128,
}

impl TryFrom<&ExactRational> for RationalJson {
    type Error = CliError;
    fn try_from(r: &ExactRational) -> std::result::Result<Self, CliError> {
        let (num, den) = r
            .to_i128_parts()
            .ok_or_else(|| CliError::Usage(format!("rational {r} exceeds 128-bit output range")))?;
        Ok(Self { num, den })
    }
}

#[derive(Debug, Serialize)]
pub struct FractionJson {
    pub a: u64,
    pub b: u64,
}

impl From<ReducedFraction> for FractionJson {
    fn from(f: ReducedFraction) -> Self {
        Self { a: f.numer(), b: f.denom() }
    }
}

#[derive(Debug, Serialize)]
pub struct VertexJson {
    pub i: i64,
    pub a_prime: u64,
    /// `a·m/b` written as `num/den` (or an integer).
    pub x: String,
    pub x_num: i128,
    pub x_den: i128,
    pub y_num: i128,
    pub y_den: i128,
}

#[derive(Debug, Serialize)]
#[allow(non_snake_case)]
pub struct CoefficientsJson {
    pub i: i64,
    pub A: u64,
    pub B: i128,
    pub C: u64,
}

#[derive(Debug, Serialize)]
pub struct PredictionJson {
    pub modulus: u64,
    pub fraction: FractionJson,
    pub b_prime: u64,
    pub c: u64,
    pub alpha: i64,
    pub beta: u64,
    pub x0: u64,
    pub r0: u64,
    pub vertices: Vec<VertexJson>,
    pub coefficients: Vec<CoefficientsJson>,
}

pub fn prediction_json(params: &FractionParams) -> std::result::Result<PredictionJson, CliError> {
    let fam = parabola_family(params);
    let mut vertices = Vec::with_capacity(fam.members.len());
    let mut coefficients = Vec::with_capacity(fam.members.len());
    for p in &fam.members {
        let x = RationalJson::try_from(&p.vertex_x)?;
        let y = RationalJson::try_from(&p.vertex_y)?;
        vertices.push(VertexJson {
            i: p.i,
            a_prime: p.a_prime,
            x: p.vertex_x.to_string(),
            x_num: x.num,
            x_den: x.den,
            y_num: y.num,
            y_den: y.den,
        });
        coefficients.push(CoefficientsJson { i: p.i, A: p.quad, B: p.linear, C: p.constant });
    }
    Ok(PredictionJson {
        modulus: params.m,
        fraction: params.frac.into(),
        b_prime: params.b_prime,
        c: params.c,
        alpha: params.alpha,
        beta: params.beta,
        x0: params.x0,
        r0: params.r0,
        vertices,
        coefficients,
    })
}

pub fn cmd_predict(a: PredictArgs, out: &mut dyn Write) -> CliResult {
    let m = modulus(a.modulus)?;
    let fracs = match (&a.fraction, a.max_denominator) {
        (Some(f), _) => vec![f.parse::<ReducedFraction>()?],
        (None, Some(d)) => {
            require_above_square(a.modulus, d)?;
            farey_fractions(d)?
        }
        (None, None) => return Err(CliError::Usage("need --fraction or --max-denominator".into())),
    };
    let predictions = fracs
        .iter()
        .map(|&f| prediction_json(&fraction_params(m, f)?))
        .collect::<std::result::Result<Vec<_>, CliError>>()?;

    if a.json {
        if a.fraction.is_some() {
            print_json(out, &predictions[0])
        } else {
            print_json(out, &predictions)
        }
    } else {
        for p in &predictions {
            let ys: Vec<String> = p
                .vertices
                .iter()
                .map(|v| {
                    if v.y_den == 1 {
                        v.y_num.to_string()
                    } else {
                        format!("{}/{}", v.y_num, v.y_den)
                    }
                })
                .collect();
            writeln!(
                out,
                "{}/{}: b'={} c={} alpha={} beta={} x0={} r0={} vertex x={} y=[{}]",
                p.fraction.a,
                p.fraction.b,
                p.b_prime,
                p.c,
                p.alpha,
                p.beta,
                p.x0,
                p.r0,
                p.vertices[0].x,
                ys.join(", ")
            )
            .map_err(io_err)?;
        }
        Ok(())
    }
}

pub fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> CliResult {
    let m = modulus(a.modulus)?;
    require_above_square(a.modulus, a.max_denominator)?;
    let window = a.window.unwrap_or_else(|| 50.min((a.modulus - 1) / 2));
    let registry = CheckRegistry::default();
    let checks = if a.checks.is_empty() {
        registry.all()
    } else {
        registry.select(&a.checks)?
    };
    let report = run_checks(m, a.max_denominator, window, &checks)?;
    print_json(out, &report)?;
    if report.ok {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}

#[derive(Debug, Serialize)]
pub struct EquivJson {
    pub m1: u64,
    pub m2: u64,
    pub lambda: u128,
    pub max_denominator: u64,
    pub denominators: Vec<u64>,
    pub m1_mod_lambda: u128,
    pub m2_mod_lambda: u128,
    pub equivalent: bool,
    pub witness: Option<FractionJson>,
}

pub fn cmd_equiv(a: EquivArgs, out: &mut dyn Write) -> CliResult {
    let m1 = modulus(a.m1)?;
    let m2 = modulus(a.m2)?;
    let lambda = lambda_of(a.lambda_n)?;
    let d = a.max_denominator.unwrap_or(a.lambda_n as u64);
    require_above_square(a.m1, d)?;
    require_above_square(a.m2, d)?;
    let verdict = layouts_equivalent(m1, m2, lambda, d)?;
    let dens = denominator_set(lambda, d)?;
    print_json(
        out,
        &EquivJson {
            m1: a.m1,
            m2: a.m2,
            lambda,
            max_denominator: d,
            denominators: dens.members.into_iter().collect(),
            m1_mod_lambda: a.m1 as u128 % lambda,
            m2_mod_lambda: a.m2 as u128 % lambda,
            equivalent: verdict.equivalent,
            witness: verdict.witness.map(Into::into),
        },
    )
}

#[derive(Debug, Serialize)]
pub struct BundleVertexJson {
    pub a: u64,
    pub b: u64,
    pub k: u64,
    pub n: i64,
    pub y_num: i128,
    pub y_den: i128,
}

#[derive(Debug, Serialize)]
pub struct BundleJson {
    pub modulus: u64,
    pub lambda: u128,
    pub s: i128,
    pub max_denominator: u64,
    pub denominators: Vec<u64>,
    pub skipped: Vec<u64>,
    pub lines: Vec<i64>,
    pub vertices: Vec<BundleVertexJson>,
    pub svg: Option<String>,
}

pub fn cmd_bundle(a: BundleArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let m = modulus(a.modulus)?;
    let lambda = lambda_of(a.lambda_n)?;
    require_above_square(a.modulus, a.max_denominator)?;
    let scene = overlay_predictions(m, a.max_denominator, lambda, a.width, a.height)?;
    for b in &scene.skipped {
        writeln!(err, "warning: denominator {b} is not covered by Λ = {lambda}; its vertices are skipped")
            .map_err(io_err)?;
    }
    if let Some(path) = &a.out {
        write_svg(&scene, path)?;
    }
    let mut lines: Vec<i64> = scene.markers.iter().map(|mk| mk.vertex.n).collect();
    lines.sort_unstable();
    lines.dedup();
    let vertices = scene
        .markers
        .iter()
        .map(|mk| {
            let v = &mk.vertex;
            let y = RationalJson::try_from(&v.y)?;
            Ok(BundleVertexJson { a: v.frac.numer(), b: v.frac.denom(), k: v.k, n: v.n, y_num: y.num, y_den: y.den })
        })
        .collect::<std::result::Result<Vec<_>, CliError>>()?;
    print_json(
        out,
        &BundleJson {
            modulus: a.modulus,
            lambda,
            s: bundle_parameter(m, lambda)?,
            max_denominator: a.max_denominator,
            denominators: (1..=a.max_denominator).filter(|&b| admits(lambda, b)).collect(),
            skipped: scene.skipped.clone(),
            lines,
            vertices,
            svg: a.out.as_ref().map(|p| p.display().to_string()),
        },
    )
}

/// Reads the thread cap from the environment, if set.
pub fn thread_cap() -> std::result::Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {v:?}")),
        Err(_) => Ok(None),
    }
}
