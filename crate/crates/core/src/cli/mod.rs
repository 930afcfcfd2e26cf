//! The `heun` command-line front end.
//!
//! Exit codes: 0 success, 1 a requested check failed (`compare`, `bound`),
//! 2 invalid input, 3 method or formula not applicable, 4 numerical failure.
//! Errors go to stderr as one line `error[<code>]: <message>`.

mod commands;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use crate::error::{HeunError, Result};
use crate::params::{HeunValentParams, WConvention};
use crate::scalar::Scalar;
use crate::table::Method;

pub use output::{Cell, Format, Report};

#[derive(Debug, Parser)]
#[command(name = "heun", version, about = "Power-series coefficients of the local Heun solution")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print c_0..c_N.
    Coeffs(CoeffsArgs),
    /// Sum the series at one or more points of the unit disk.
    Eval(EvalArgs),
    /// Compute the coefficients by several methods and report discrepancies.
    Compare(CompareArgs),
    /// Check |c_n| against the explicit envelope.
    Bound(BoundArgs),
    /// Print the Green function of the drift-free Jacobi matrix.
    Green(GreenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    General,
    BetaPlusOne,
}

impl From<ConventionArg> for WConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::General => WConvention::GeneralW,
            ConventionArg::BetaPlusOne => WConvention::BetaPlusOneW,
        }
    }
}

/// Parameter flags. Missing values fall back to `--params`, then to
/// `k = 1/2, alpha = beta = gamma = 1, w = 0` and `delta = 0` (general) or
/// `delta = beta + 1` (beta-plus-one).
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// JSON file with keys k, alpha, beta, gamma, delta, w, w_convention.
    #[arg(long, value_name = "FILE")]
    pub params: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<String>,
    /// Meaning of w: `general` (q = -w/k^2 + alpha beta) or `beta-plus-one`
    /// (q = -(w - beta gamma)/k^2, delta = beta + 1).
    #[arg(long, value_enum, visible_alias = "delta-convention")]
    pub w_convention: Option<ConventionArg>,
}

impl ParamArgs {
    fn merged_json(&self) -> Result<Value> {
        let mut obj = match &self.params {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| HeunError::Parse {
                    input: path.display().to_string(),
                    reason: e.to_string(),
                })?;
                let value: Value = serde_json::from_str(&text).map_err(|e| HeunError::Parse {
                    input: path.display().to_string(),
                    reason: e.to_string(),
                })?;
                match value {
                    Value::Object(m) => m,
                    _ => {
                        return Err(HeunError::Parse {
                            input: path.display().to_string(),
                            reason: "expected a JSON object".to_string(),
                        })
                    }
                }
            }
            None => Map::new(),
        };
        let flags = [
            ("k", &self.k),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
            ("delta", &self.delta),
            ("w", &self.w),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                obj.insert(key.to_string(), Value::String(v.clone()));
            }
        }
        if let Some(c) = self.w_convention {
            let c: WConvention = c.into();
            obj.insert("w_convention".to_string(), Value::String(c.as_str().to_string()));
        }
        let beta_plus_one = obj.get("w_convention").and_then(Value::as_str).map(WConvention::parse)
            == Some(Ok(WConvention::BetaPlusOneW));
        for (key, default) in [("k", "1/2"), ("alpha", "1"), ("beta", "1"), ("gamma", "1"), ("w", "0")] {
            obj.entry(key).or_insert_with(|| Value::String(default.to_string()));
        }
        if !beta_plus_one {
            obj.entry("delta").or_insert_with(|| Value::String("0".to_string()));
        }
        Ok(Value::Object(obj))
    }

    pub fn build<S: Scalar>(&self) -> Result<HeunValentParams<S>> {
        HeunValentParams::from_json(&self.merged_json()?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Add the current Unix time to the metadata.
    #[arg(long)]
    pub timestamp: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(short = 'N', long = "order", default_value_t = 10)]
    pub order: usize,
    #[arg(long, default_value = "recurrence")]
    pub method: Method,
    /// Largest exact-mode order accepted by the closed-form methods.
    #[arg(long, default_value_t = crate::closed_form::DEFAULT_EXACT_ORDER_CAP)]
    pub max_exact_order: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Arithmetic used for the coefficients; the sum is always in floating point.
    #[arg(long, value_enum, default_value = "float")]
    pub mode: Mode,
    /// Evaluation point (`x`, `x+yi`, `p/q`); repeat for a grid.
    #[arg(long, required = true, allow_hyphen_values = true)]
    pub z: Vec<String>,
    #[arg(long, default_value_t = crate::series::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value = "recurrence")]
    pub method: Method,
    /// Largest truncation order tried before giving up.
    #[arg(long, default_value_t = crate::series::DEFAULT_TERM_CAP)]
    pub max_order: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(short = 'N', long = "order", default_value_t = 12)]
    pub order: usize,
    /// Methods to compare (repeatable). Default: every applicable method.
    #[arg(long)]
    pub method: Vec<Method>,
    /// Largest acceptable relative discrepancy. Default: 0 (exact), 1e-8 (float).
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Largest exact-mode order accepted by the closed-form methods.
    #[arg(long, default_value_t = crate::closed_form::DEFAULT_EXACT_ORDER_CAP)]
    pub max_exact_order: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundArg {
    General,
    BetaPlusOne,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(short = 'N', long = "order", default_value_t = 40)]
    pub order: usize,
    #[arg(long, default_value = "recurrence")]
    pub method: Method,
    /// Envelope to check. Default: beta-plus-one for that convention, else general.
    #[arg(long, value_enum)]
    pub bound: Option<BoundArg>,
    /// Largest exact-mode order accepted by the closed-form methods.
    #[arg(long, default_value_t = crate::closed_form::DEFAULT_EXACT_ORDER_CAP)]
    pub max_exact_order: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GreenArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Only `float` is supported.
    #[arg(long, value_enum, default_value = "float")]
    pub mode: Mode,
    /// Entries (m, n) with n < m <= N are printed.
    #[arg(short = 'N', long = "order", default_value_t = 10)]
    pub order: usize,
    /// Extra rows computed beyond the printed block.
    #[arg(long, default_value_t = 2)]
    pub margin: usize,
    /// Also print the Green function of the drifted matrix.
    #[arg(long)]
    pub perturbed: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Process exit code for an error.
pub fn exit_code(e: &HeunError) -> i32 {
    match e {
        HeunError::InvalidParameter { .. }
        | HeunError::UnsupportedParameter { .. }
        | HeunError::Domain(_)
        | HeunError::Parse { .. } => 2,
        HeunError::MethodNotApplicable { .. }
        | HeunError::Precondition(_)
        | HeunError::DivisionByZero(_) => 3,
        HeunError::NonConvergence { .. } | HeunError::Numerical(_) => 4,
    }
}

/// Runs the command and returns its report without writing anything.
pub fn execute(cli: &Cli) -> Result<(Report, OutputArgs)> {
    let (report, output) = match &cli.command {
        Command::Coeffs(a) => (commands::coeffs(a)?, &a.output),
        Command::Eval(a) => (commands::eval(a)?, &a.output),
        Command::Compare(a) => (commands::compare(a)?, &a.output),
        Command::Bound(a) => (commands::bound(a)?, &a.output),
        Command::Green(a) => (commands::green(a)?, &a.output),
    };
    let mut report = report;
    if output.timestamp {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        report.meta("timestamp", Value::from(now));
    }
    Ok((report, output.clone()))
}

/// Parses `args` (including the program name), runs, writes the output and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            let line = text
                .lines()
                .map(|l| l.trim_start_matches("error: ").trim())
                .find(|l| !l.is_empty())
                .unwrap_or("bad arguments");
            eprintln!("error[usage]: {line}");
            return 2;
        }
    };
    let (report, output) = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error[{}]: {}", e.code(), e);
            return exit_code(&e);
        }
    };
    let text = match report.render(output.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error[{}]: {}", e.code(), e);
            return exit_code(&e);
        }
    };
    let written = match &output.out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("error[io]: cannot write output: {e}");
        return 2;
    }
    report.exit_code
}
