//! Grid sweeps turning each inequality and cross-path identity into a report.
//!
//! Every suite is a list of grid points and a margin function. The margin is
//! the quantity asserted to be nonnegative; a suite passes when its smallest
//! margin is at least `-tolerance`. Margins are evaluated independently (and
//! optionally in parallel); the minimum is taken with ties broken by the
//! lexicographically smallest grid point, so reports are deterministic.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::EvalConfig;
use crate::dunkl::{
    dunkl_integral, dunkl_operator_residual, dunkl_series, dunkl_series_at, normalized_dunkl,
    IntegralConvention, KernelPoint,
};
use crate::error::{Error, Result};
use crate::qcore::{q_gamma, JacksonTruncation, QContext};
use crate::qdunkl::{
    normalized_q_dunkl, q_dunkl_from_bessel_derivative, q_dunkl_from_definition, q_dunkl_qintegral,
    q_dunkl_series, q_operator_residual, q_weight, QIntegrandVariant, QKernelPoint,
};
use crate::scalar_special::gamma;

/// Tolerance for the "≥ 0" assertions, relative to the squared middle term.
pub const INEQUALITY_TOL: f64 = 1e-10;

/// How q-suite argument values are turned into kernel arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArgScale {
    /// Values are used as given.
    Absolute,
    /// Values are fractions of 1/(1−q)².
    DomainRadius,
    /// Values are fractions of 1/(1−q), the radius of convergence of the series.
    ConvergenceRadius,
}

impl ArgScale {
    pub fn resolve(self, value: f64, q: f64) -> f64 {
        match self {
            ArgScale::Absolute => value,
            ArgScale::DomainRadius => value / ((1.0 - q) * (1.0 - q)),
            ArgScale::ConvergenceRadius => value / (1.0 - q),
        }
    }
}

/// Sweep grid. Empty lists are filled from the suite's default grid.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub nu_values: Vec<f64>,
    /// λx for classical suites, x (after scaling) for q suites, t for weight suites.
    #[serde(default)]
    pub arg_values: Vec<f64>,
    #[serde(default)]
    pub q_values: Vec<f64>,
    /// Step sizes for the convexity suites.
    #[serde(default)]
    pub h_values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arg_scale: Option<ArgScale>,
}

impl GridSpec {
    /// Fills empty lists from `defaults`. Overridden argument values are taken
    /// as absolute unless the override names a scale.
    pub fn over(&self, defaults: &GridSpec) -> GridSpec {
        let pick = |own: &Vec<f64>, dflt: &Vec<f64>| {
            if own.is_empty() {
                dflt.clone()
            } else {
                own.clone()
            }
        };
        let arg_scale = if self.arg_values.is_empty() {
            self.arg_scale.or(defaults.arg_scale)
        } else {
            self.arg_scale.or(Some(ArgScale::Absolute))
        };
        GridSpec {
            nu_values: pick(&self.nu_values, &defaults.nu_values),
            arg_values: pick(&self.arg_values, &defaults.arg_values),
            q_values: pick(&self.q_values, &defaults.q_values),
            h_values: pick(&self.h_values, &defaults.h_values),
            arg_scale,
        }
    }

    fn scale(&self) -> ArgScale {
        self.arg_scale.unwrap_or(ArgScale::Absolute)
    }

    fn validate(&self, suite: Suite) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Err(Error::Config(format!(
                "{}: invalid {what} value {v}",
                suite.name()
            )))
        };
        for &v in &self.nu_values {
            if !(v.is_finite() && v > 0.0) {
                return bad("nu", v);
            }
        }
        for &v in &self.arg_values {
            if !v.is_finite() {
                return bad("arg", v);
            }
        }
        for &v in &self.q_values {
            if !(v > 0.0 && v < 1.0) {
                return bad("q", v);
            }
        }
        for &v in &self.h_values {
            if !(v.is_finite() && v > 0.0) {
                return bad("h", v);
            }
        }
        if !suite.uses_q() && self.scale() != ArgScale::Absolute {
            return Err(Error::Config(format!(
                "{}: arg_scale applies to q suites only",
                suite.name()
            )));
        }
        Ok(())
    }
}

/// A grid point. For the ratio and classical-limit suites `h` is the step to
/// the next ν (respectively q) grid value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub nu: f64,
    pub arg: f64,
    pub q: Option<f64>,
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl Witness {
    fn lex_cmp(&self, other: &Self) -> Ordering {
        let opt = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) => a.total_cmp(&b),
            (a, b) => a.is_some().cmp(&b.is_some()),
        };
        self.nu
            .total_cmp(&other.nu)
            .then(self.arg.total_cmp(&other.arg))
            .then(opt(self.q, other.q))
            .then(opt(self.h, other.h))
            .then(opt(self.alpha, other.alpha))
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "nu={}, arg={}", self.nu, self.arg)?;
        if let Some(q) = self.q {
            write!(f, ", q={q}")?;
        }
        if let Some(h) = self.h {
            write!(f, ", h={h}")?;
        }
        if let Some(a) = self.alpha {
            write!(f, ", alpha={a}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Reported but never gating.
    Diagnostic,
}

/// Per-point record of the q-integral diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub nu: f64,
    pub q: f64,
    pub x: f64,
    pub value: f64,
    pub series: f64,
    pub relative_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub suite: String,
    pub points_checked: usize,
    pub points_skipped: usize,
    pub min_margin: Option<f64>,
    pub witness: Option<Witness>,
    pub verdict: Verdict,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<ProfileEntry>>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn gating(&self) -> bool {
        self.verdict != Verdict::Diagnostic
    }
}

/// Registered suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    TuranClassical,
    TuranClassicalNormalized,
    TuranQ,
    TuranQNormalized,
    LogConvexityClassical,
    LogConvexityQ,
    RatioMonotoneClassical,
    RatioMonotoneQ,
    WeightTuran,
    WeightIdentity,
    Jordan,
    ClassicalLimitKernel,
    ClassicalLimitGamma,
    CrossPathQDefinition,
    CrossPathQDerivative,
    CrossPathClassicalSeriesMatched,
    CrossPathClassicalAsPrinted,
    ResidualClassical,
    ResidualQ,
    QIntegralAsPrinted,
    QIntegralQShifted,
    QIntegralSmallExponential,
}

const DEFAULT_NU: [f64; 7] = [0.1, 0.25, 0.5, 1.0, 1.5, 2.5, 5.0];
const DEFAULT_ARG: [f64; 7] = [0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0];
const DEFAULT_Q: [f64; 4] = [0.3, 0.5, 0.7, 0.9];
const DEFAULT_FRACTIONS: [f64; 4] = [0.0, 0.1, 0.25, 0.5];
const DEFAULT_H: [f64; 3] = [0.1, 0.5, 1.0];
const LOG_CONVEXITY_ALPHAS: [f64; 3] = [0.25, 0.5, 0.75];

/// 50 log-spaced points on [0.01, 10] on each side of the origin.
pub fn jordan_default_args() -> Vec<f64> {
    let n = 50;
    let pos: Vec<f64> = (0..n)
        .map(|i| 10f64.powf(-2.0 + 3.0 * i as f64 / (n - 1) as f64))
        .collect();
    pos.iter()
        .rev()
        .map(|x| -x)
        .chain(pos.iter().copied())
        .collect()
}

impl Suite {
    pub const ALL: [Suite; 22] = [
        Suite::TuranClassical,
        Suite::TuranClassicalNormalized,
        Suite::TuranQ,
        Suite::TuranQNormalized,
        Suite::LogConvexityClassical,
        Suite::LogConvexityQ,
        Suite::RatioMonotoneClassical,
        Suite::RatioMonotoneQ,
        Suite::WeightTuran,
        Suite::WeightIdentity,
        Suite::Jordan,
        Suite::ClassicalLimitKernel,
        Suite::ClassicalLimitGamma,
        Suite::CrossPathQDefinition,
        Suite::CrossPathQDerivative,
        Suite::CrossPathClassicalSeriesMatched,
        Suite::CrossPathClassicalAsPrinted,
        Suite::ResidualClassical,
        Suite::ResidualQ,
        Suite::QIntegralAsPrinted,
        Suite::QIntegralQShifted,
        Suite::QIntegralSmallExponential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::TuranClassical => "turan-classical",
            Suite::TuranClassicalNormalized => "turan-classical-normalized",
            Suite::TuranQ => "turan-q",
            Suite::TuranQNormalized => "turan-q-normalized",
            Suite::LogConvexityClassical => "log-convexity-classical",
            Suite::LogConvexityQ => "log-convexity-q",
            Suite::RatioMonotoneClassical => "ratio-monotone-classical",
            Suite::RatioMonotoneQ => "ratio-monotone-q",
            Suite::WeightTuran => "weight-turan",
            Suite::WeightIdentity => "weight-identity",
            Suite::Jordan => "jordan",
            Suite::ClassicalLimitKernel => "classical-limit-kernel",
            Suite::ClassicalLimitGamma => "classical-limit-gamma",
            Suite::CrossPathQDefinition => "cross-path-q-definition",
            Suite::CrossPathQDerivative => "cross-path-q-derivative",
            Suite::CrossPathClassicalSeriesMatched => "cross-path-classical-series-matched",
            Suite::CrossPathClassicalAsPrinted => "cross-path-classical-as-printed",
            Suite::ResidualClassical => "residual-classical",
            Suite::ResidualQ => "residual-q",
            Suite::QIntegralAsPrinted => "qintegral-as-printed",
            Suite::QIntegralQShifted => "qintegral-q-shifted",
            Suite::QIntegralSmallExponential => "qintegral-small-exponential",
        }
    }

    pub fn from_name(name: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| Error::Config(format!("unknown suite '{name}'")))
    }

    pub fn is_diagnostic(self) -> bool {
        matches!(
            self,
            Suite::QIntegralAsPrinted | Suite::QIntegralQShifted | Suite::QIntegralSmallExponential
        )
    }

    pub fn uses_q(self) -> bool {
        matches!(
            self,
            Suite::TuranQ
                | Suite::TuranQNormalized
                | Suite::LogConvexityQ
                | Suite::RatioMonotoneQ
                | Suite::WeightTuran
                | Suite::WeightIdentity
                | Suite::ClassicalLimitKernel
                | Suite::ClassicalLimitGamma
                | Suite::CrossPathQDefinition
                | Suite::CrossPathQDerivative
                | Suite::ResidualQ
                | Suite::QIntegralAsPrinted
                | Suite::QIntegralQShifted
                | Suite::QIntegralSmallExponential
        )
    }

    pub fn tolerance(self) -> f64 {
        match self {
            Suite::WeightIdentity => 1e-12,
            Suite::ClassicalLimitKernel | Suite::ClassicalLimitGamma => 0.0,
            Suite::CrossPathClassicalSeriesMatched
            | Suite::CrossPathClassicalAsPrinted
            | Suite::ResidualClassical
            | Suite::ResidualQ => 1e-9,
            _ => INEQUALITY_TOL,
        }
    }

    pub fn default_grid(self) -> GridSpec {
        let v = |s: &[f64]| s.to_vec();
        let q_grid = |nu: &[f64], args: &[f64]| GridSpec {
            nu_values: v(nu),
            arg_values: v(args),
            q_values: v(&DEFAULT_Q),
            h_values: vec![],
            arg_scale: Some(ArgScale::ConvergenceRadius),
        };
        let classical = |nu: &[f64], args: &[f64]| GridSpec {
            nu_values: v(nu),
            arg_values: v(args),
            ..GridSpec::default()
        };
        let signed_fractions = [-0.5, -0.25, -0.1, 0.0, 0.1, 0.25, 0.5];
        match self {
            Suite::TuranClassical | Suite::RatioMonotoneClassical => {
                classical(&DEFAULT_NU, &DEFAULT_ARG)
            }
            Suite::TuranClassicalNormalized => {
                let mut args = vec![-5.0, -1.0];
                args.extend(DEFAULT_ARG);
                classical(&DEFAULT_NU, &args)
            }
            Suite::LogConvexityClassical => GridSpec {
                h_values: v(&DEFAULT_H),
                ..classical(&DEFAULT_NU, &DEFAULT_ARG)
            },
            Suite::TuranQ | Suite::TuranQNormalized => q_grid(&[0.5, 1.0, 2.5], &DEFAULT_FRACTIONS),
            Suite::LogConvexityQ => GridSpec {
                h_values: v(&DEFAULT_H),
                ..q_grid(&DEFAULT_NU, &DEFAULT_FRACTIONS)
            },
            Suite::RatioMonotoneQ => q_grid(&DEFAULT_NU, &[0.0, 0.1, 0.25, 0.5, 0.9]),
            Suite::WeightTuran | Suite::WeightIdentity => GridSpec {
                arg_scale: Some(ArgScale::Absolute),
                ..q_grid(&DEFAULT_NU, &[0.0, 0.1, 0.25, 0.5, 0.75, 1.0])
            },
            Suite::Jordan => classical(&[], &jordan_default_args()),
            Suite::ClassicalLimitKernel => GridSpec {
                nu_values: vec![0.5, 1.0, 2.5],
                arg_values: vec![-1.0, 0.0, 0.5, 1.0, 2.0],
                q_values: vec![0.9, 0.99, 0.999],
                h_values: vec![],
                arg_scale: Some(ArgScale::Absolute),
            },
            Suite::ClassicalLimitGamma => GridSpec {
                nu_values: vec![0.5, 1.5, 3.0],
                arg_values: vec![0.0],
                q_values: vec![0.9, 0.99, 0.999],
                h_values: vec![],
                arg_scale: Some(ArgScale::Absolute),
            },
            Suite::CrossPathQDefinition | Suite::CrossPathQDerivative => {
                q_grid(&DEFAULT_NU, &signed_fractions)
            }
            Suite::CrossPathClassicalSeriesMatched | Suite::CrossPathClassicalAsPrinted => {
                classical(&[0.6, 1.0, 1.5, 2.5, 5.0], &DEFAULT_ARG)
            }
            Suite::ResidualClassical => classical(
                &DEFAULT_NU,
                &[-5.0, -1.0, -0.1, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0],
            ),
            Suite::ResidualQ => q_grid(&DEFAULT_NU, &[-0.5, -0.25, -0.1, 0.1, 0.25, 0.5]),
            Suite::QIntegralAsPrinted
            | Suite::QIntegralQShifted
            | Suite::QIntegralSmallExponential => {
                q_grid(&[0.5, 1.0, 2.5], &[-0.25, 0.0, 0.1, 0.25, 0.5])
            }
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn sorted_unique(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn point(nu: f64, arg: f64) -> Witness {
    Witness {
        nu,
        arg,
        q: None,
        h: None,
        alpha: None,
    }
}

/// The grid points a suite sweeps, before domain filtering.
pub fn grid_points(suite: Suite, grid: &GridSpec) -> Vec<Witness> {
    let scale = grid.scale();
    let mut out = Vec::new();
    match suite {
        Suite::Jordan => {
            for &x in &grid.arg_values {
                out.push(point(-0.5, x));
            }
        }
        Suite::RatioMonotoneClassical | Suite::RatioMonotoneQ => {
            let nus = sorted_unique(&grid.nu_values);
            let qs: Vec<Option<f64>> = if suite.uses_q() {
                grid.q_values.iter().map(|&q| Some(q)).collect()
            } else {
                vec![None]
            };
            for pair in nus.windows(2) {
                for &q in &qs {
                    for &a in &grid.arg_values {
                        let arg = q.map_or(a, |q| scale.resolve(a, q));
                        out.push(Witness {
                            q,
                            h: Some(pair[1] - pair[0]),
                            ..point(pair[0], arg)
                        });
                    }
                }
            }
        }
        Suite::ClassicalLimitKernel | Suite::ClassicalLimitGamma => {
            let qs = sorted_unique(&grid.q_values);
            for &nu in &grid.nu_values {
                for &a in &grid.arg_values {
                    for pair in qs.windows(2) {
                        out.push(Witness {
                            q: Some(pair[0]),
                            h: Some(pair[1] - pair[0]),
                            ..point(nu, a)
                        });
                    }
                }
            }
        }
        _ => {
            let qs: Vec<Option<f64>> = if suite.uses_q() {
                grid.q_values.iter().map(|&q| Some(q)).collect()
            } else {
                vec![None]
            };
            let convex = matches!(suite, Suite::LogConvexityClassical | Suite::LogConvexityQ);
            let hs: Vec<Option<f64>> = if convex {
                grid.h_values.iter().map(|&h| Some(h)).collect()
            } else {
                vec![None]
            };
            let alphas: Vec<Option<f64>> = if convex {
                LOG_CONVEXITY_ALPHAS.iter().map(|&a| Some(a)).collect()
            } else {
                vec![None]
            };
            for &nu in &grid.nu_values {
                for &q in &qs {
                    for &a in &grid.arg_values {
                        let arg = q.map_or(a, |q| scale.resolve(a, q));
                        for &h in &hs {
                            for &alpha in &alphas {
                                out.push(Witness {
                                    q,
                                    h,
                                    alpha,
                                    ..point(nu, arg)
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Whether a grid point lies where the suite's quantities are defined.
/// Points outside are skipped and counted, not evaluated.
pub fn in_domain(suite: Suite, w: &Witness) -> bool {
    let series_ok = |x: f64, q: f64| x.abs() < 1.0 / (1.0 - q);
    match suite {
        Suite::Jordan | Suite::ResidualClassical => w.arg != 0.0,
        Suite::ResidualQ => w.arg != 0.0 && w.q.is_some_and(|q| series_ok(w.arg, q)),
        Suite::WeightTuran | Suite::WeightIdentity | Suite::ClassicalLimitGamma => true,
        s if s.uses_q() => w.q.is_some_and(|q| series_ok(w.arg, q)),
        _ => true,
    }
}

struct Evaluated {
    margin: f64,
    profile: Option<ProfileEntry>,
}

impl From<f64> for Evaluated {
    fn from(margin: f64) -> Self {
        Self {
            margin,
            profile: None,
        }
    }
}

fn ctx_of(w: &Witness) -> Result<QContext> {
    let q =
        w.q.ok_or_else(|| Error::Config("q-suite point without q".into()))?;
    QContext::new(q)
}

fn step(w: &Witness) -> Result<f64> {
    w.h.ok_or_else(|| Error::Config("point without step".into()))
}

fn turan<F: Fn(f64) -> Result<f64>>(f: F, nu: f64) -> Result<f64> {
    let (a, b, c) = (f(nu)?, f(nu + 1.0)?, f(nu + 2.0)?);
    Ok((a * c - b * b) / (b * b))
}

fn log_convexity<F: Fn(f64) -> Result<f64>>(f: F, nu: f64, h: f64, alpha: f64) -> Result<f64> {
    let lo = f(nu)?.ln();
    let hi = f(nu + 2.0 * h)?.ln();
    if alpha == 0.5 {
        Ok(lo + hi - 2.0 * f(nu + h)?.ln())
    } else {
        let mid = f(nu + 2.0 * (1.0 - alpha) * h)?.ln();
        Ok(alpha * lo + (1.0 - alpha) * hi - mid)
    }
}

/// min of ratio(ν₂) − ratio(ν₁), 1 − ratio(ν₁), 1 − ratio(ν₂) with ratio(ν) = f(ν+1)/f(ν).
fn ratio_monotone<F: Fn(f64) -> Result<f64>>(f: F, nu1: f64, nu2: f64) -> Result<f64> {
    let r1 = f(nu1 + 1.0)? / f(nu1)?;
    let r2 = f(nu2 + 1.0)? / f(nu2)?;
    Ok((r2 - r1).min(1.0 - r1).min(1.0 - r2))
}

fn rel_dev(value: f64, reference: f64) -> f64 {
    if value == reference {
        0.0
    } else {
        ((value - reference) / reference).abs()
    }
}

fn jordan_margin(x: f64) -> f64 {
    let lhs = if x > 0.0 {
        (1.0 - x) * x.exp()
    } else {
        (1.0 + x) * (-x).exp()
    };
    x.sinh() / x - lhs
}

fn evaluate(suite: Suite, w: &Witness, cfg: &EvalConfig) -> Result<Evaluated> {
    let classical = |nu: f64| dunkl_series_at(nu, w.arg, cfg);
    let q_point = |nu: f64| -> Result<QKernelPoint> { QKernelPoint::new(nu, w.arg, ctx_of(w)?) };
    let q_kernel = |nu: f64| q_dunkl_series(&q_point(nu)?, cfg);
    let margin = match suite {
        Suite::TuranClassical => turan(classical, w.nu)?,
        Suite::TuranClassicalNormalized => turan(
            |nu| {
                normalized_dunkl(
                    &KernelPoint::new(nu, 1.0, w.arg)?,
                    IntegralConvention::AsPrinted,
                    cfg,
                )
            },
            w.nu,
        )?,
        Suite::TuranQ => turan(q_kernel, w.nu)?,
        Suite::TuranQNormalized => turan(|nu| normalized_q_dunkl(&q_point(nu)?, cfg), w.nu)?,
        Suite::LogConvexityClassical => {
            log_convexity(classical, w.nu, step(w)?, w.alpha.unwrap_or(0.5))?
        }
        Suite::LogConvexityQ => log_convexity(q_kernel, w.nu, step(w)?, w.alpha.unwrap_or(0.5))?,
        Suite::RatioMonotoneClassical => ratio_monotone(classical, w.nu, w.nu + step(w)?)?,
        Suite::RatioMonotoneQ => ratio_monotone(q_kernel, w.nu, w.nu + step(w)?)?,
        Suite::WeightTuran | Suite::WeightIdentity => {
            let ctx = ctx_of(w)?;
            let t = w.arg;
            let ratio = q_weight(t, w.nu + 1.0, &ctx)?.powi(2)
                / (q_weight(t, w.nu, &ctx)? * q_weight(t, w.nu + 2.0, &ctx)?);
            if suite == Suite::WeightTuran {
                1.0 - ratio
            } else {
                let q = ctx.q;
                let closed = (1.0 - t * t * q.powf(2.0 * w.nu + 1.0))
                    / (1.0 - t * t * q.powf(2.0 * w.nu + 3.0));
                -rel_dev(ratio, closed)
            }
        }
        Suite::Jordan => jordan_margin(w.arg),
        Suite::ClassicalLimitKernel => {
            let reference = classical(w.nu)?;
            let err = |q: f64| -> Result<f64> {
                let p = QKernelPoint::new(w.nu, w.arg, QContext::new(q)?)?;
                Ok((q_dunkl_series(&p, cfg)? - reference).abs())
            };
            let q = ctx_of(w)?.q;
            err(q)? - err(q + step(w)?)?
        }
        Suite::ClassicalLimitGamma => {
            let reference = gamma(w.nu)?;
            let err = |q: f64| -> Result<f64> {
                Ok((q_gamma(w.nu, &QContext::new(q)?)? - reference).abs())
            };
            let q = ctx_of(w)?.q;
            err(q)? - err(q + step(w)?)?
        }
        Suite::CrossPathQDefinition => {
            let p = q_point(w.nu)?;
            -rel_dev(q_dunkl_from_definition(&p, cfg)?, q_dunkl_series(&p, cfg)?)
        }
        Suite::CrossPathQDerivative => {
            let p = q_point(w.nu)?;
            -rel_dev(
                q_dunkl_from_bessel_derivative(&p, cfg)?,
                q_dunkl_series(&p, cfg)?,
            )
        }
        Suite::CrossPathClassicalSeriesMatched => {
            let p = KernelPoint::new(w.nu, 1.0, w.arg)?;
            let integral = dunkl_integral(&p, IntegralConvention::SeriesMatched, cfg)?;
            -rel_dev(integral, dunkl_series_at(w.nu, w.arg, cfg)?)
        }
        Suite::CrossPathClassicalAsPrinted => {
            let p = KernelPoint::new(w.nu, 1.0, w.arg)?;
            let integral = dunkl_integral(&p, IntegralConvention::AsPrinted, cfg)?;
            -rel_dev(integral, dunkl_series_at(w.nu - 0.5, w.arg, cfg)?)
        }
        Suite::ResidualClassical => {
            let p = KernelPoint::new(w.nu, 1.0, w.arg)?;
            -dunkl_operator_residual(&p, cfg)? / dunkl_series(&p, cfg)?.abs()
        }
        Suite::ResidualQ => {
            let p = q_point(w.nu)?.with_lambda(1.0)?;
            -q_operator_residual(&p, cfg)? / q_dunkl_series(&p, cfg)?.abs()
        }
        Suite::QIntegralAsPrinted | Suite::QIntegralQShifted | Suite::QIntegralSmallExponential => {
            let variant = match suite {
                Suite::QIntegralAsPrinted => QIntegrandVariant::AsPrinted,
                Suite::QIntegralQShifted => QIntegrandVariant::QShifted,
                _ => QIntegrandVariant::SmallExponential,
            };
            let p = q_point(w.nu)?;
            let trunc = JacksonTruncation::for_context(&p.ctx, 1e-13);
            let d = q_dunkl_qintegral(&p, variant, &trunc, cfg)?;
            return Ok(Evaluated {
                margin: -d.relative_deviation,
                profile: Some(ProfileEntry {
                    nu: w.nu,
                    q: p.ctx.q,
                    x: w.arg,
                    value: d.value,
                    series: d.series,
                    relative_deviation: d.relative_deviation,
                }),
            });
        }
    };
    Ok(margin.into())
}

/// Margin of `suite` at a single point; the sweep uses exactly this function.
pub fn evaluate_margin(suite: Suite, w: &Witness, cfg: &EvalConfig) -> Result<f64> {
    let m = evaluate(suite, w, cfg)?.margin;
    if m.is_nan() {
        return Err(Error::Evaluation {
            point: w.arg,
            value: m,
        });
    }
    Ok(m)
}

/// Harness options shared by all suites.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    pub cfg: EvalConfig,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

fn in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Error::Config("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::Config(format!("cannot start thread pool: {e}"))),
    }
}

fn sweep(suite: Suite, grid: &GridSpec, cfg: &EvalConfig) -> Result<PropertyReport> {
    grid.validate(suite)?;
    let points = grid_points(suite, grid);
    let results: Vec<Option<Result<Evaluated>>> = points
        .par_iter()
        .map(|w| {
            in_domain(suite, w).then(|| {
                let e = evaluate(suite, w, cfg)?;
                if e.margin.is_nan() {
                    return Err(Error::Evaluation {
                        point: w.arg,
                        value: e.margin,
                    });
                }
                Ok(e)
            })
        })
        .collect();

    let mut checked = 0;
    let mut skipped = 0;
    let mut best: Option<(f64, Witness)> = None;
    let mut profile = Vec::new();
    for (w, r) in points.iter().zip(results) {
        let Some(r) = r else {
            skipped += 1;
            continue;
        };
        let e = r.map_err(|source| Error::AtPoint {
            suite: suite.name().into(),
            point: w.to_string(),
            source: Box::new(source),
        })?;
        checked += 1;
        profile.extend(e.profile);
        let better = match &best {
            None => true,
            Some((m, bw)) => match e.margin.total_cmp(m) {
                Ordering::Less => true,
                Ordering::Equal => w.lex_cmp(bw) == Ordering::Less,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((e.margin, *w));
        }
    }

    let tolerance = suite.tolerance();
    let verdict = if suite.is_diagnostic() {
        Verdict::Diagnostic
    } else if best.is_some_and(|(m, _)| m >= -tolerance) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(PropertyReport {
        suite: suite.name().into(),
        points_checked: checked,
        points_skipped: skipped,
        min_margin: best.map(|b| b.0),
        witness: best.map(|b| b.1),
        verdict,
        tolerance,
        profile: suite.is_diagnostic().then_some(profile),
    })
}

/// Runs one suite on `grid`, with empty lists taken from the suite's defaults.
pub fn check(suite: Suite, grid: &GridSpec, opts: &RunOptions) -> Result<PropertyReport> {
    opts.cfg.validate()?;
    let grid = grid.over(&suite.default_grid());
    in_pool(opts.jobs, || sweep(suite, &grid, &opts.cfg))?
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Classical,
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TuranKind {
    Classical,
    ClassicalNormalized,
    Q,
    QNormalized,
}

pub fn check_log_convexity(
    kind: Kind,
    grid: &GridSpec,
    opts: &RunOptions,
) -> Result<PropertyReport> {
    let suite = match kind {
        Kind::Classical => Suite::LogConvexityClassical,
        Kind::Q => Suite::LogConvexityQ,
    };
    check(suite, grid, opts)
}

pub fn check_turan(kind: TuranKind, grid: &GridSpec, opts: &RunOptions) -> Result<PropertyReport> {
    let suite = match kind {
        TuranKind::Classical => Suite::TuranClassical,
        TuranKind::ClassicalNormalized => Suite::TuranClassicalNormalized,
        TuranKind::Q => Suite::TuranQ,
        TuranKind::QNormalized => Suite::TuranQNormalized,
    };
    check(suite, grid, opts)
}

pub fn check_ratio_monotone(
    kind: Kind,
    grid: &GridSpec,
    opts: &RunOptions,
) -> Result<PropertyReport> {
    let suite = match kind {
        Kind::Classical => Suite::RatioMonotoneClassical,
        Kind::Q => Suite::RatioMonotoneQ,
    };
    check(suite, grid, opts)
}

/// Product-form weight inequality and the closed-form ratio identity.
pub fn check_weight_turan(grid: &GridSpec, opts: &RunOptions) -> Result<[PropertyReport; 2]> {
    Ok([
        check(Suite::WeightTuran, grid, opts)?,
        check(Suite::WeightIdentity, grid, opts)?,
    ])
}

pub fn check_jordan(x_values: &[f64], opts: &RunOptions) -> Result<PropertyReport> {
    let grid = GridSpec {
        arg_values: x_values.to_vec(),
        ..GridSpec::default()
    };
    check(Suite::Jordan, &grid, opts)
}

/// Kernel-level and Γ_q-level convergence as q → 1.
pub fn check_classical_limit(grid: &GridSpec, opts: &RunOptions) -> Result<[PropertyReport; 2]> {
    let gamma_grid = GridSpec {
        nu_values: vec![],
        arg_values: vec![],
        ..grid.clone()
    };
    Ok([
        check(Suite::ClassicalLimitKernel, grid, opts)?,
        check(Suite::ClassicalLimitGamma, &gamma_grid, opts)?,
    ])
}

/// Expands "all", rejects unknown names, and runs the suites in the order given.
pub fn run_suite(
    names: &[String],
    overrides: &GridSpec,
    opts: &RunOptions,
) -> Result<Vec<PropertyReport>> {
    let mut suites = Vec::new();
    for name in names {
        if name == "all" {
            suites.extend(Suite::ALL);
        } else {
            suites.push(Suite::from_name(name)?);
        }
    }
    opts.cfg.validate()?;
    in_pool(opts.jobs, || {
        suites
            .iter()
            .map(|&s| sweep(s, &overrides.over(&s.default_grid()), &opts.cfg))
            .collect()
    })?
}
