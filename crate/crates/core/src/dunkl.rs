//! The classical one-dimensional Dunkl kernel E_ν(λ, x).
//!
//! The power series Σ (λx)^n / b_n(ν) is the reference definition. The
//! Poisson-type integral over [−1, 1] is an independent second path, and
//! the Dunkl-operator residual checks the eigenfunction property directly.

use std::ops::{Add, Div, Mul};

use serde::{Deserialize, Serialize};

use crate::config::EvalConfig;
use crate::error::{require_finite, Error, Result};
use crate::extended::DoubleDouble;
use crate::quadrature::integrate_adaptive;
use crate::scalar_special::ln_gamma;

/// Below this value of λx the series is accumulated in double-double.
const EXTENDED_THRESHOLD: f64 = -10.0;

const QUAD_START_ORDER: usize = 16;
const QUAD_MAX_ORDER: usize = 1024;

/// Evaluation site (ν, λ, x) of the classical kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelPoint {
    pub nu: f64,
    pub lambda: f64,
    pub x: f64,
}

impl KernelPoint {
    pub fn new(nu: f64, lambda: f64, x: f64) -> Result<Self> {
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::Domain(format!("nu must be > 0, got {nu}")));
        }
        require_finite("lambda", lambda)?;
        require_finite("x", x)?;
        Ok(Self { nu, lambda, x })
    }

    /// The kernel depends on λ and x only through their product.
    pub fn arg(&self) -> f64 {
        self.lambda * self.x
    }
}

/// Which weight exponent and constant the integral representation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegralConvention {
    /// Weight (1−t²)^{ν−1}(1+t) with c(ν) = Γ(ν+1/2)/(Γ(1/2)Γ(ν)).
    AsPrinted,
    /// Weight (1−t²)^{ν−1/2}(1+t) with Γ(ν+1)/(Γ(1/2)Γ(ν+1/2)); reproduces the series at ν.
    SeriesMatched,
}

impl IntegralConvention {
    pub fn weight_exponent(self, nu: f64) -> f64 {
        match self {
            Self::AsPrinted => nu - 1.0,
            Self::SeriesMatched => nu - 0.5,
        }
    }

    /// The normalizing constant in front of the integral.
    pub fn constant(self, nu: f64) -> Result<f64> {
        let ln_sqrt_pi = 0.5 * std::f64::consts::PI.ln();
        let ln_c = match self {
            Self::AsPrinted => ln_gamma(nu + 0.5)? - ln_sqrt_pi - ln_gamma(nu)?,
            Self::SeriesMatched => ln_gamma(nu + 1.0)? - ln_sqrt_pi - ln_gamma(nu + 0.5)?,
        };
        Ok(ln_c.exp())
    }
}

/// Reflection-term coefficient used when assembling the Dunkl operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorCoefficient {
    /// T f = f′ + ((2ν+1)/x)·(f(x) − f(−x))/2, the operator the series solves.
    SeriesConsistent,
    /// T f = f′ + (ν/x)·(f(x) − f(−x))/2.
    Literal,
}

/// log b_n(ν), where b_{2m} = 2^{2m} m! Γ(m+ν+1)/Γ(ν+1) and b_{2m+1} = 2(ν+1) b_{2m}(ν+1).
pub fn ln_dunkl_coefficient(n: usize, nu: f64) -> Result<f64> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::Domain(format!("nu must be > 0, got {nu}")));
    }
    let m = (n / 2) as f64;
    let shift = if n.is_multiple_of(2) { 1.0 } else { 2.0 };
    Ok(
        n as f64 * std::f64::consts::LN_2 + ln_gamma(m + 1.0)? + ln_gamma(m + nu + shift)?
            - ln_gamma(nu + 1.0)?,
    )
}

pub fn dunkl_coefficient(n: usize, nu: f64) -> Result<f64> {
    let v = ln_dunkl_coefficient(n, nu)?.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Range(format!("b_{n}({nu}) overflows f64")))
    }
}

trait Accum: Copy + Add<Output = Self> + Mul<f64, Output = Self> + Div<Output = Self> {
    fn of(x: f64) -> Self;
    fn of_sum(a: f64, b: f64) -> Self;
    fn value(self) -> f64;
}

impl Accum for f64 {
    fn of(x: f64) -> Self {
        x
    }
    fn of_sum(a: f64, b: f64) -> Self {
        a + b
    }
    fn value(self) -> f64 {
        self
    }
}

impl Accum for DoubleDouble {
    fn of(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
    fn of_sum(a: f64, b: f64) -> Self {
        DoubleDouble::sum_of(a, b)
    }
    fn value(self) -> f64 {
        self.to_f64()
    }
}

/// Partial sums needed by the kernel and by the operator residual.
#[derive(Debug, Clone, Copy)]
struct SeriesSums {
    /// Σ t_m with t_m = z^m / b_m.
    total: f64,
    /// Σ m t_m.
    weighted: f64,
    /// Σ_{m odd} t_m.
    odd: f64,
}

fn accumulate<A: Accum>(nu: f64, z: f64, cfg: &EvalConfig) -> Result<SeriesSums> {
    let two_nu_plus_one = A::of_sum(2.0 * nu, 1.0);
    let mut term = A::of(1.0);
    let mut total = A::of(1.0);
    let mut weighted = A::of(0.0);
    let mut odd = A::of(0.0);
    let mut quiet_run = 0;
    for m in 1..=cfg.max_terms {
        let mf = m as f64;
        // t_m / t_{m−1} = z / (m + (2ν+1)[m odd])
        let denom = if m % 2 == 1 {
            two_nu_plus_one + A::of(mf)
        } else {
            A::of(mf)
        };
        term = term * z / denom;
        total = total + term;
        weighted = weighted + term * mf;
        if m % 2 == 1 {
            odd = odd + term;
        }
        let scale = total.value().abs();
        let t = term.value().abs() * mf;
        if mf > z.abs() && (t <= cfg.rel_tol * scale || t < cfg.abs_tol) {
            quiet_run += 1;
            if quiet_run >= 2 {
                return Ok(SeriesSums {
                    total: total.value(),
                    weighted: weighted.value(),
                    odd: odd.value(),
                });
            }
        } else {
            quiet_run = 0;
        }
    }
    Err(Error::Truncation {
        terms: cfg.max_terms,
        last_term: term.value().abs(),
    })
}

fn series_sums(nu: f64, z: f64, cfg: &EvalConfig) -> Result<SeriesSums> {
    if z < EXTENDED_THRESHOLD {
        accumulate::<DoubleDouble>(nu, z, cfg)
    } else {
        accumulate::<f64>(nu, z, cfg)
    }
}

/// E_ν(λ, x) = Σ_{n≥0} (λx)^n / b_n(ν).
///
/// Stops once two consecutive terms fall below `rel_tol` relative to the partial sum.
pub fn dunkl_series(p: &KernelPoint, cfg: &EvalConfig) -> Result<f64> {
    Ok(series_sums(p.nu, p.arg(), cfg)?.total)
}

/// The series at a raw parameter ν > −1 and argument z = λx.
///
/// The coefficients stay positive for ν > −1, which the shifted integral
/// convention needs when ν − 1/2 drops below zero.
pub fn dunkl_series_at(nu: f64, z: f64, cfg: &EvalConfig) -> Result<f64> {
    if !(nu.is_finite() && nu > -1.0) {
        return Err(Error::Domain(format!(
            "series parameter must be > -1, got {nu}"
        )));
    }
    require_finite("z", z)?;
    Ok(series_sums(nu, z, cfg)?.total)
}

/// ∫_{−1}^{1} e^{λxt} w(t) dt under the chosen convention, without the constant.
pub fn normalized_dunkl(
    p: &KernelPoint,
    conv: IntegralConvention,
    cfg: &EvalConfig,
) -> Result<f64> {
    let e = conv.weight_exponent(p.nu);
    if e <= -1.0 {
        return Err(Error::Domain(format!(
            "weight exponent {e} is not integrable at t = ±1"
        )));
    }
    let z = p.arg();
    // (1−t²)^e (1+t) = (1−t)^e (1+t)^{e+1}
    integrate_adaptive(
        |t| (z * t).exp(),
        e,
        e + 1.0,
        cfg.rel_tol,
        QUAD_START_ORDER,
        QUAD_MAX_ORDER,
    )
}

/// c · ∫_{−1}^{1} e^{λxt} w(t) dt.
pub fn dunkl_integral(p: &KernelPoint, conv: IntegralConvention, cfg: &EvalConfig) -> Result<f64> {
    Ok(conv.constant(p.nu)? * normalized_dunkl(p, conv, cfg)?)
}

/// |T_ν f(x) − λ f(x)| for f = E_ν(λ, ·), with f′ from the differentiated series.
pub fn dunkl_operator_residual(p: &KernelPoint, cfg: &EvalConfig) -> Result<f64> {
    dunkl_operator_residual_with(p, OperatorCoefficient::SeriesConsistent, cfg)
}

pub fn dunkl_operator_residual_with(
    p: &KernelPoint,
    coefficient: OperatorCoefficient,
    cfg: &EvalConfig,
) -> Result<f64> {
    if p.x == 0.0 {
        return Err(Error::Domain("operator residual needs x != 0".into()));
    }
    let sums = series_sums(p.nu, p.arg(), cfg)?;
    let derivative = sums.weighted / p.x;
    let c = match coefficient {
        OperatorCoefficient::SeriesConsistent => 2.0 * p.nu + 1.0,
        OperatorCoefficient::Literal => p.nu,
    };
    let t_f = derivative + c / p.x * sums.odd;
    Ok((t_f - p.lambda * sums.total).abs())
}
