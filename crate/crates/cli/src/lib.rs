//! Command-line front end for `mahler-core`.
//!
//! Subcommands: `coeffs`, `verify`, `quad`, `zeta-mahler`. Every flag can be
//! set through a `MAHLER_*` environment variable. Exit codes: 0 success,
//! 1 failed claim or non-convergence, 2 usage or domain error, 3 I/O error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mahler_core::quadrature::DEFAULT_MAX_LEVEL;
use mahler_core::verify::{self, Schedules, VerificationReport};
use mahler_core::{
    build_table, HpReal, MahlerError, PrecisionContext, QuadratureResult, UnitCirclePoint,
};
use serde::{Deserialize, Serialize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const COEFF_COLUMNS: [&str; 7] = [
    "k",
    "a_k",
    "m_k",
    "abs_a_k",
    "k_abs_a_sum",
    "ratio_next",
    "B_k",
];
pub const CHECK_COLUMNS: [&str; 9] = [
    "claim_id",
    "statement",
    "comparison",
    "observed",
    "bound_or_target",
    "tolerance",
    "margin",
    "pass",
    "detail",
];
pub const QUAD_COLUMNS: [&str; 5] = ["quantity", "value", "error_estimate", "levels", "nodes"];

#[derive(Debug, Parser)]
#[command(
    name = "mahler",
    version,
    about = "Higher Mahler measures of x - r on the unit circle"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Decimal digits of output precision (at least 15).
    #[arg(long, global = true, env = "MAHLER_DIGITS", default_value_t = 30)]
    pub digits: u32,
    /// Extra internal decimal digits (at least 10).
    #[arg(long, global = true, env = "MAHLER_GUARD_DIGITS", default_value_t = 10)]
    pub guard_digits: u32,
    #[arg(long, global = true, env = "MAHLER_FORMAT", value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true, env = "MAHLER_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficient table a_k, m_k and derived sequences for k = 0..max-k.
    Coeffs {
        #[arg(long, env = "MAHLER_MAX_K", default_value_t = 1000)]
        max_k: usize,
    },
    /// Run every claim check and write the report.
    Verify {
        #[arg(long, env = "MAHLER_MAX_K", default_value_t = 1000)]
        max_k: usize,
        /// Quadrature tolerance.
        #[arg(long, env = "MAHLER_TOL", default_value = "1e-12")]
        tol: f64,
        #[arg(long, env = "MAHLER_MAX_LEVEL", default_value_t = DEFAULT_MAX_LEVEL)]
        max_level: u32,
        /// Comma-separated grid of s values in (-1, 1).
        #[arg(long, env = "MAHLER_S", value_delimiter = ',', default_values_t = [-0.9, -0.5, 0.0, 0.5, 0.9], allow_negative_numbers = true)]
        s: Vec<f64>,
        #[arg(long, env = "MAHLER_INJECT_SIGN_FLIP", hide = true)]
        inject_sign_flip: Option<usize>,
    },
    /// m_k(x - r) by direct quadrature, r = exp(2 pi i angle).
    Quad {
        #[arg(long, env = "MAHLER_K")]
        k: u32,
        #[arg(
            long,
            env = "MAHLER_ANGLE",
            default_value = "0",
            allow_negative_numbers = true
        )]
        angle: String,
        #[arg(long, env = "MAHLER_TOL", default_value = "1e-12")]
        tol: String,
        #[arg(long, env = "MAHLER_MAX_LEVEL", default_value_t = DEFAULT_MAX_LEVEL)]
        max_level: u32,
    },
    /// Z(s) = int |e^(2 pi i t) - r|^s dt by direct quadrature.
    ZetaMahler {
        #[arg(long, env = "MAHLER_S", allow_negative_numbers = true)]
        s: String,
        #[arg(
            long,
            env = "MAHLER_ANGLE",
            default_value = "0",
            allow_negative_numbers = true
        )]
        angle: String,
        #[arg(long, env = "MAHLER_TOL", default_value = "1e-12")]
        tol: String,
        #[arg(long, env = "MAHLER_MAX_LEVEL", default_value_t = DEFAULT_MAX_LEVEL)]
        max_level: u32,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failed(_) => EXIT_FAILED,
            CliError::Io(_) => EXIT_IO,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failed(m) | CliError::Io(m) => m,
        }
    }
}

impl From<MahlerError> for CliError {
    fn from(e: MahlerError) -> Self {
        match e {
            MahlerError::Domain(_) | MahlerError::Range { .. } | MahlerError::Usage(_) => {
                CliError::Usage(e.to_string())
            }
            MahlerError::Resource(_)
            | MahlerError::Integrity { .. }
            | MahlerError::Convergence { .. }
            | MahlerError::Integrand { .. } => CliError::Failed(e.to_string()),
        }
    }
}

fn io_error(path: Option<&Path>, e: impl std::fmt::Display) -> CliError {
    match path {
        Some(p) => CliError::Io(format!("cannot write {}: {e}", p.display())),
        None => CliError::Io(format!("cannot write output: {e}")),
    }
}

// ---------------------------------------------------------------------------
// serialized records

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffRow {
    pub k: usize,
    pub a_k: String,
    pub m_k: String,
    pub abs_a_k: String,
    pub k_abs_a_sum: Option<String>,
    pub ratio_next: Option<String>,
    #[serde(rename = "B_k")]
    pub b_k: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffTableOut {
    pub digits: u32,
    pub guard_digits: u32,
    pub max_k: usize,
    pub rows: Vec<CoeffRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOut {
    pub claim_id: String,
    pub statement: String,
    pub comparison: String,
    pub observed: Option<String>,
    pub bound_or_target: Option<String>,
    pub tolerance: Option<String>,
    pub margin: Option<String>,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportOut {
    pub digits: u32,
    pub guard_digits: u32,
    pub max_k: usize,
    pub overall_pass: bool,
    pub checks: Vec<CheckOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadOut {
    pub quantity: String,
    pub value: String,
    pub error_estimate: String,
    pub levels: u32,
    pub nodes: usize,
}

fn num(ctx: &PrecisionContext, x: &HpReal) -> String {
    ctx.format(x)
}

fn opt_num(ctx: &PrecisionContext, x: &HpReal) -> Option<String> {
    (!x.is_nan() && !x.is_infinite()).then(|| num(ctx, x))
}

pub fn coefficient_rows(max_k: usize, ctx: &PrecisionContext) -> Result<CoeffTableOut, CliError> {
    let table = build_table(max_k, ctx)?;
    let a = table.a_values();
    let rows = (0..=max_k)
        .map(|k| {
            let abs = HpReal::with_val(ctx.prec(), a[k].abs_ref());
            let (sum, ratio) = if k < max_k {
                let sum = HpReal::with_val(ctx.prec(), &a[k + 1] + &a[k]).abs() * k as u64;
                let ratio =
                    (k >= 2).then(|| num(ctx, &HpReal::with_val(ctx.prec(), &a[k + 1] / &a[k])));
                (Some(num(ctx, &sum)), ratio)
            } else {
                (None, None)
            };
            let b = if k >= 1 {
                table.eta_shifted(k).ok().map(|b| num(ctx, b))
            } else {
                None
            };
            CoeffRow {
                k,
                a_k: num(ctx, &a[k]),
                m_k: num(ctx, &table.m_values()[k]),
                abs_a_k: num(ctx, &abs),
                k_abs_a_sum: sum,
                ratio_next: ratio,
                b_k: b,
            }
        })
        .collect();
    Ok(CoeffTableOut {
        digits: ctx.digits(),
        guard_digits: ctx.guard_digits(),
        max_k,
        rows,
    })
}

pub fn report_out(report: &VerificationReport, ctx: &PrecisionContext) -> ReportOut {
    ReportOut {
        digits: report.digits,
        guard_digits: report.guard_digits,
        max_k: report.max_k,
        overall_pass: report.overall_pass,
        checks: report
            .checks
            .iter()
            .map(|c| CheckOut {
                claim_id: c.claim_id.clone(),
                statement: c.statement.clone(),
                comparison: c.comparison.to_string(),
                observed: opt_num(ctx, &c.observed),
                bound_or_target: opt_num(ctx, &c.bound_or_target),
                tolerance: opt_num(ctx, &c.tolerance),
                margin: opt_num(ctx, &c.margin),
                pass: c.pass,
                detail: c.detail.clone(),
            })
            .collect(),
    }
}

fn quad_out(quantity: String, q: &QuadratureResult, ctx: &PrecisionContext) -> QuadOut {
    QuadOut {
        quantity,
        value: num(ctx, &q.value),
        error_estimate: num(ctx, &q.error_estimate),
        levels: q.levels,
        nodes: q.nodes,
    }
}

// ---------------------------------------------------------------------------
// writers

fn write_csv<W: Write>(
    out: W,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn cell(x: &Option<String>) -> String {
    x.clone().unwrap_or_default()
}

fn emit<W: Write>(out: W, format: Format, payload: &Payload) -> Result<(), String> {
    match format {
        Format::Json => {
            let mut out = out;
            let text = match payload {
                Payload::Coeffs(t) => serde_json::to_string_pretty(t),
                Payload::Report(r) => serde_json::to_string_pretty(r),
                Payload::Quad(q) => serde_json::to_string_pretty(q),
            }
            .map_err(|e| e.to_string())?;
            writeln!(out, "{text}").map_err(|e| e.to_string())
        }
        Format::Csv => match payload {
            Payload::Coeffs(t) => write_csv(
                out,
                &COEFF_COLUMNS,
                t.rows.iter().map(|r| {
                    vec![
                        r.k.to_string(),
                        r.a_k.clone(),
                        r.m_k.clone(),
                        r.abs_a_k.clone(),
                        cell(&r.k_abs_a_sum),
                        cell(&r.ratio_next),
                        cell(&r.b_k),
                    ]
                }),
            ),
            Payload::Report(r) => write_csv(
                out,
                &CHECK_COLUMNS,
                r.checks.iter().map(|c| {
                    vec![
                        c.claim_id.clone(),
                        c.statement.clone(),
                        c.comparison.clone(),
                        cell(&c.observed),
                        cell(&c.bound_or_target),
                        cell(&c.tolerance),
                        cell(&c.margin),
                        c.pass.to_string(),
                        c.detail.clone(),
                    ]
                }),
            ),
            Payload::Quad(q) => write_csv(
                out,
                &QUAD_COLUMNS,
                [vec![
                    q.quantity.clone(),
                    q.value.clone(),
                    q.error_estimate.clone(),
                    q.levels.to_string(),
                    q.nodes.to_string(),
                ]],
            ),
        }
        .map_err(|e| e.to_string()),
    }
}

pub enum Payload {
    Coeffs(CoeffTableOut),
    Report(ReportOut),
    Quad(QuadOut),
}

fn write_payload(
    common: &Common,
    payload: &Payload,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    match &common.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_error(Some(path), e))?;
            let mut w = BufWriter::new(file);
            emit(&mut w, common.format, payload).map_err(|e| io_error(Some(path), e))?;
            w.flush().map_err(|e| io_error(Some(path), e))
        }
        None => emit(stdout, common.format, payload).map_err(|e| io_error(None, e)),
    }
}

// ---------------------------------------------------------------------------
// commands

fn context(common: &Common) -> Result<PrecisionContext, CliError> {
    Ok(PrecisionContext::new(common.digits, common.guard_digits)?)
}

fn positive(ctx: &PrecisionContext, text: &str, name: &str) -> Result<HpReal, CliError> {
    let x = ctx
        .parse(text)
        .map_err(|_| CliError::Usage(format!("--{name}: cannot parse {text:?}")))?;
    if x > 0 {
        Ok(x)
    } else {
        Err(CliError::Usage(format!("--{name} must be positive")))
    }
}

fn angle(ctx: &PrecisionContext, text: &str) -> Result<UnitCirclePoint, CliError> {
    let x = ctx
        .parse(text)
        .map_err(|_| CliError::Usage(format!("--angle: cannot parse {text:?}")))?;
    Ok(UnitCirclePoint::new(&x)?)
}

/// Runs one command and returns its exit code; the report's pass/fail
/// decides the code for `verify`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let ctx = context(&cli.common)?;
    match &cli.command {
        Command::Coeffs { max_k } => {
            if *max_k < 2 {
                return Err(CliError::Usage("--max-k must be at least 2".into()));
            }
            let table = coefficient_rows(*max_k, &ctx)?;
            write_payload(&cli.common, &Payload::Coeffs(table), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            max_k,
            tol,
            max_level,
            s,
            inject_sign_flip,
        } => {
            if *max_k < 2 {
                return Err(CliError::Usage("--max-k must be at least 2".into()));
            }
            if !(*tol > 0.0) {
                return Err(CliError::Usage("--tol must be positive".into()));
            }
            if let Some(bad) = s.iter().find(|x| !(**x > -1.0 && **x < 1.0)) {
                return Err(CliError::Usage(format!(
                    "--s value {bad} is outside (-1, 1)"
                )));
            }
            let mut schedules = Schedules::for_max_k(*max_k);
            schedules.quad_tol = *tol;
            schedules.quad_max_level = *max_level;
            schedules.s_grid = s.clone();
            schedules.sign_flip = *inject_sign_flip;
            let report = verify::run_all(*max_k, &ctx, &schedules)?;
            let out = report_out(&report, &ctx);
            write_payload(&cli.common, &Payload::Report(out), stdout)?;
            Ok(if report.overall_pass {
                EXIT_OK
            } else {
                EXIT_FAILED
            })
        }
        Command::Quad {
            k,
            angle: a,
            tol,
            max_level,
        } => {
            let tol = positive(&ctx, tol, "tol")?;
            let point = angle(&ctx, a)?;
            let q = mahler_core::integral::mahler_integral_with_levels(
                *k, &point, &tol, *max_level, &ctx,
            )?;
            write_payload(
                &cli.common,
                &Payload::Quad(quad_out(format!("m_{k}"), &q, &ctx)),
                stdout,
            )?;
            Ok(EXIT_OK)
        }
        Command::ZetaMahler {
            s,
            angle: a,
            tol,
            max_level,
        } => {
            let tol = positive(&ctx, tol, "tol")?;
            let sv = ctx
                .parse(s)
                .map_err(|_| CliError::Usage(format!("--s: cannot parse {s:?}")))?;
            let point = angle(&ctx, a)?;
            let q = mahler_core::integral::zeta_mahler_integral_with_levels(
                &sv, &point, &tol, *max_level, &ctx,
            )?;
            write_payload(
                &cli.common,
                &Payload::Quad(quad_out(format!("Z({s})"), &q, &ctx)),
                stdout,
            )?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args`, runs the command and maps every outcome to an exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "mahler: {}", e.message());
            e.exit_code()
        }
    }
}

pub fn main_with_stdio() -> i32 {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut err = io::stderr();
    run(std::env::args_os(), &mut out, &mut err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("mahler").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn coeffs_csv_header_and_row() {
        let (code, out, _) = run_str(&["coeffs", "--max-k", "10", "--digits", "30"]);
        assert_eq!(code, EXIT_OK);
        let mut lines = out.lines();
        assert_eq!(lines.next().unwrap(), COEFF_COLUMNS.join(","));
        let row2 = out.lines().nth(3).unwrap();
        assert!(
            row2.starts_with("2,4.11233516712056609118103791662e-1,"),
            "{row2}"
        );
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str(&["coeffs", "--max-k", "0"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["verify", "--digits", "5"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["quad", "--k", "2", "--tol", "0"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["zeta-mahler", "--s", "-1"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["bogus"]).0, EXIT_USAGE);
    }

    #[test]
    fn quad_k_zero_is_exactly_one() {
        let (code, out, _) = run_str(&["quad", "--k", "0", "--tol", "1e-3", "--format", "json"]);
        assert_eq!(code, EXIT_OK);
        let q: QuadOut = serde_json::from_str(&out).unwrap();
        assert_eq!(q.value, format!("1.{}e0", "0".repeat(29)));
    }
}
