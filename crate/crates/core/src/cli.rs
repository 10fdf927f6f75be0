//! Command-line front end: point evaluation, CSV tables and verification runs.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::config::EvalConfig;
use crate::dunkl::{dunkl_integral, dunkl_series, IntegralConvention, KernelPoint};
use crate::error::{Error, Result};
use crate::qcore::{JacksonTruncation, QContext};
use crate::qdunkl::{
    q_dunkl_from_definition, q_dunkl_qintegral, q_dunkl_series, QIntegrandVariant, QKernelPoint,
};
use crate::verify::{run_suite, GridSpec, RunOptions};

#[derive(Debug, Parser)]
#[command(
    name = "dunkl",
    version,
    about = "Classical and q-Dunkl kernels and their inequalities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the classical kernel E_ν(λ, x).
    Eval(EvalArgs),
    /// Evaluate the q-kernel E_ν(x; q²).
    Qeval(QevalArgs),
    /// Emit a CSV table of kernel values over a grid.
    Table(TableArgs),
    /// Run verification suites and print one JSON report per suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassicalMethod {
    Series,
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QMethod {
    Series,
    Definition,
    Qintegral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableMethod {
    Series,
    Integral,
    Definition,
    Qintegral,
    /// Series plus the independent path, with a deviation column.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    AsPrinted,
    SeriesMatched,
}

impl From<ConventionArg> for IntegralConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::AsPrinted => IntegralConvention::AsPrinted,
            ConventionArg::SeriesMatched => IntegralConvention::SeriesMatched,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    AsPrinted,
    QShifted,
    SmallExponential,
}

impl From<VariantArg> for QIntegrandVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::AsPrinted => QIntegrandVariant::AsPrinted,
            VariantArg::QShifted => QIntegrandVariant::QShifted,
            VariantArg::SmallExponential => QIntegrandVariant::SmallExponential,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub nu: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long, value_enum, default_value_t = ClassicalMethod::Series)]
    pub method: ClassicalMethod,
    #[arg(long, value_enum, default_value_t = ConventionArg::SeriesMatched)]
    pub convention: ConventionArg,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
    #[arg(long)]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct QevalArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub nu: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long, value_enum, default_value_t = QMethod::Series)]
    pub method: QMethod,
    #[arg(long, value_enum, default_value_t = VariantArg::AsPrinted)]
    pub variant: VariantArg,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
    #[arg(long)]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Comma-separated ν values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub nu: Vec<f64>,
    /// Comma-separated x values; the arg column is λx (classical) or x (q).
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_negative_numbers = true
    )]
    pub x: Vec<f64>,
    /// Comma-separated q values; omit for the classical kernel.
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<f64>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = TableMethod::Series)]
    pub method: TableMethod,
    #[arg(long, value_enum, default_value_t = ConventionArg::SeriesMatched)]
    pub convention: ConventionArg,
    #[arg(long, value_enum, default_value_t = VariantArg::AsPrinted)]
    pub variant: VariantArg,
    #[arg(long)]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite names (comma-separated or repeated); "all" runs every suite.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub suite: Vec<String>,
    /// JSON GridSpec whose nonempty lists replace the suite defaults.
    #[arg(long)]
    pub grid_file: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
}

/// Text to print and whether the run counts as a success.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub success: bool,
}

/// Formats with 15 significant digits: fixed notation for exponents in
/// [−5, 15), scientific otherwise.
pub fn format_value(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let v = if v == 0.0 { 0.0 } else { v };
    let sci = format!("{v:.14e}");
    let exp: i32 = sci[sci.find('e').map_or(sci.len(), |i| i + 1)..]
        .parse()
        .unwrap_or(0);
    if (-5..15).contains(&exp) {
        format!("{v:.*}", (14 - exp) as usize)
    } else {
        sci
    }
}

/// Exit status for an error: 2 for invalid input, 1 for evaluation failures.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Domain(_) => 2,
        Error::AtPoint { source, .. } => match **source {
            Error::Config(_) => 2,
            _ => 1,
        },
        _ => 1,
    }
}

fn eval_config(rel_tol: Option<f64>) -> Result<EvalConfig> {
    match rel_tol {
        Some(t) => EvalConfig::default().with_rel_tol(t),
        None => Ok(EvalConfig::default()),
    }
}

fn rel_dev(value: f64, reference: f64) -> f64 {
    if value == reference {
        0.0
    } else {
        ((value - reference) / reference).abs()
    }
}

fn render_point(
    format: Format,
    coords: serde_json::Value,
    csv_prefix: String,
    method: &str,
    value: f64,
    check: Option<(f64, f64)>,
) -> String {
    match format {
        Format::Plain => {
            let mut s = format!("{}\n", format_value(value));
            if let Some((series, dev)) = check {
                let _ = writeln!(s, "series: {}", format_value(series));
                let _ = writeln!(s, "relative deviation: {}", format_value(dev));
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("nu,q,arg,method,value");
            if check.is_some() {
                s.push_str(",series,deviation");
            }
            let _ = write!(s, "\n{csv_prefix},{method},{}", format_value(value));
            if let Some((series, dev)) = check {
                let _ = write!(s, ",{},{}", format_value(series), format_value(dev));
            }
            s.push('\n');
            s
        }
        Format::Json => {
            let mut obj = coords;
            obj["method"] = json!(method);
            obj["value"] = json!(value);
            if let Some((series, dev)) = check {
                obj["series"] = json!(series);
                obj["relative_deviation"] = json!(dev);
            }
            format!("{obj}\n")
        }
    }
}

fn cmd_eval(a: &EvalArgs) -> Result<Output> {
    let cfg = eval_config(a.rel_tol)?;
    let p = KernelPoint::new(a.nu, a.lambda, a.x)?;
    let series = dunkl_series(&p, &cfg)?;
    let (method, value, check) = match a.method {
        ClassicalMethod::Series => ("series", series, None),
        ClassicalMethod::Integral => {
            let v = dunkl_integral(&p, a.convention.into(), &cfg)?;
            ("integral", v, Some((series, rel_dev(v, series))))
        }
    };
    let coords = json!({ "nu": a.nu, "lambda": a.lambda, "x": a.x });
    let prefix = format!("{},,{}", a.nu, p.arg());
    Ok(Output {
        text: render_point(a.format, coords, prefix, method, value, check),
        success: true,
    })
}

fn cmd_qeval(a: &QevalArgs) -> Result<Output> {
    let cfg = eval_config(a.rel_tol)?;
    let ctx = QContext::new(a.q)?;
    let p = QKernelPoint::new(a.nu, a.x, ctx)?;
    let series = q_dunkl_series(&p, &cfg)?;
    let (method, value, check) = match a.method {
        QMethod::Series => ("series", series, None),
        QMethod::Definition => {
            let v = q_dunkl_from_definition(&p, &cfg)?;
            ("definition", v, Some((series, rel_dev(v, series))))
        }
        QMethod::Qintegral => {
            let trunc = JacksonTruncation::for_context(&ctx, 1e-13);
            let d = q_dunkl_qintegral(&p, a.variant.into(), &trunc, &cfg)?;
            ("qintegral", d.value, Some((series, d.relative_deviation)))
        }
    };
    let coords = json!({ "nu": a.nu, "q": a.q, "x": a.x });
    let prefix = format!("{},{},{}", a.nu, a.q, a.x);
    Ok(Output {
        text: render_point(a.format, coords, prefix, method, value, check),
        success: true,
    })
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn cmd_table(a: &TableArgs) -> Result<Output> {
    let cfg = eval_config(a.rel_tol)?;
    let classical = a.q.is_empty();
    let (primary, alternate) = match (classical, a.method) {
        (_, TableMethod::Series) => ("series", None),
        (true, TableMethod::Integral) => ("integral", None),
        (true, TableMethod::Both) => ("series", Some("integral")),
        (false, TableMethod::Definition) => ("definition", None),
        (false, TableMethod::Qintegral) => ("qintegral", None),
        (false, TableMethod::Both) => ("series", Some("definition")),
        (true, m) => {
            return Err(Error::Config(format!(
                "method {m:?} needs --q; classical tables accept series, integral or both"
            )))
        }
        (false, m) => {
            return Err(Error::Config(format!(
                "method {m:?} needs a classical table; with --q use series, definition, qintegral or both"
            )))
        }
    };
    let eval_one = |method: &str, nu: f64, q: Option<f64>, x: f64| -> Result<f64> {
        match q {
            None => {
                let p = KernelPoint::new(nu, a.lambda, x)?;
                match method {
                    "series" => dunkl_series(&p, &cfg),
                    _ => dunkl_integral(&p, a.convention.into(), &cfg),
                }
            }
            Some(q) => {
                let ctx = QContext::new(q)?;
                let p = QKernelPoint::new(nu, x, ctx)?;
                match method {
                    "series" => q_dunkl_series(&p, &cfg),
                    "definition" => q_dunkl_from_definition(&p, &cfg),
                    _ => {
                        let trunc = JacksonTruncation::for_context(&ctx, 1e-13);
                        Ok(q_dunkl_qintegral(&p, a.variant.into(), &trunc, &cfg)?.value)
                    }
                }
            }
        }
    };

    let mut text = String::from("nu,q,arg,method,value");
    if alternate.is_some() {
        text.push_str(",deviation");
    }
    text.push('\n');
    let qs: Vec<Option<f64>> = if classical {
        vec![None]
    } else {
        sorted(&a.q).into_iter().map(Some).collect()
    };
    let args: Vec<f64> = if classical {
        sorted(&a.x.iter().map(|x| a.lambda * x).collect::<Vec<_>>())
    } else {
        sorted(&a.x)
    };
    for nu in sorted(&a.nu) {
        for &q in &qs {
            for &arg in &args {
                let x = if classical { arg / a.lambda } else { arg };
                let x = if classical && a.lambda == 0.0 { 0.0 } else { x };
                let q_col = q.map_or(String::new(), |q| q.to_string());
                let base = eval_one(primary, nu, q, x)?;
                let _ = write!(text, "{nu},{q_col},{arg},{primary},{}", format_value(base));
                match alternate {
                    None => text.push('\n'),
                    Some(alt) => {
                        let v = eval_one(alt, nu, q, x)?;
                        let _ = writeln!(text, ",{}", format_value(0.0));
                        let _ = writeln!(
                            text,
                            "{nu},{q_col},{arg},{alt},{},{}",
                            format_value(v),
                            format_value(rel_dev(v, base))
                        );
                    }
                }
            }
        }
    }
    Ok(Output {
        text,
        success: true,
    })
}

fn cmd_verify(a: &VerifyArgs) -> Result<Output> {
    let cfg = eval_config(a.rel_tol)?;
    let overrides = match &a.grid_file {
        None => GridSpec::default(),
        Some(path) => {
            let raw = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&raw)
                .map_err(|e| Error::Config(format!("invalid grid file {}: {e}", path.display())))?
        }
    };
    let opts = RunOptions { cfg, jobs: a.jobs };
    let reports = run_suite(&a.suite, &overrides, &opts)?;
    let mut text = String::new();
    for r in &reports {
        let line = serde_json::to_string(r).map_err(|e| Error::Config(e.to_string()))?;
        text.push_str(&line);
        text.push('\n');
    }
    let success = reports.iter().all(|r| !r.gating() || r.passed());
    Ok(Output { text, success })
}

pub fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Qeval(a) => cmd_qeval(a),
        Command::Table(a) => cmd_table(a),
        Command::Verify(a) => cmd_verify(a),
    }
}
