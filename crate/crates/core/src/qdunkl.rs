//! The q-Dunkl kernel E_ν(x; q²) and its building blocks.
//!
//! Three evaluation routes are provided: the power series (reference), the
//! assembly from two normalized q-modified Bessel functions, and the Jackson
//! q-integral representation, which is kept as a diagnostic. The integral
//! reproduces the series only with the small exponential e(q, ·); the big
//! exponential E(q, ·) variants are retained to report how far they are off.

use serde::{Deserialize, Serialize};

use crate::config::EvalConfig;
use crate::error::{require_finite, Error, Result};
use crate::qcore::{
    jackson_integral, ln_q_gamma, q_derivative, q_exp_big, q_exp_small, q_number, q_pochhammer,
    JacksonTruncation, Length, QContext,
};

/// Evaluation site of the q-kernel: E_ν(x; q²), and E_ν(λ·; q²) for the residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QKernelPoint {
    pub nu: f64,
    pub x: f64,
    pub lambda: f64,
    pub ctx: QContext,
}

fn check_in_series_domain(what: &str, value: f64, ctx: &QContext) -> Result<()> {
    require_finite(what, value)?;
    if value.abs() < ctx.series_radius {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "|{what}| must be < 1/(1-q) = {} (series radius of convergence), got {value}",
            ctx.series_radius
        )))
    }
}

impl QKernelPoint {
    pub fn new(nu: f64, x: f64, ctx: QContext) -> Result<Self> {
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::Domain(format!("nu must be > 0, got {nu}")));
        }
        check_in_series_domain("x", x, &ctx)?;
        Ok(Self {
            nu,
            x,
            lambda: 1.0,
            ctx,
        })
    }

    /// Sets the eigenvalue used by [`q_operator_residual`]; λx must stay in the domain.
    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        require_finite("lambda", lambda)?;
        check_in_series_domain("lambda * x", lambda * self.x, &self.ctx)?;
        Ok(Self { lambda, ..self })
    }

    fn at(&self, x: f64) -> Result<Self> {
        Self::new(self.nu, x, self.ctx)
    }
}

/// Integrand used for the q-integral representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QIntegrandVariant {
    /// W_ν(t) (1+t) E(q, (1−q) t x).
    AsPrinted,
    /// W_ν(t) [E(q, (1−q) t x) + t E(q, (1−q) q t x)].
    QShifted,
    /// W_ν(t) (1+t) e(q, (1−q) t x) with the small exponential 1/(z; q)_∞.
    SmallExponential,
}

/// 𝓘_ν(z; q²) = Σ_k z^{2k} Γ_{q²}(ν+1) / ((1+q)^{2k} Γ_{q²}(k+1) Γ_{q²}(ν+k+1)).
pub fn q_bessel_normalized(nu: f64, z: f64, ctx: &QContext, cfg: &EvalConfig) -> Result<f64> {
    if !(nu.is_finite() && nu > -1.0) {
        return Err(Error::Domain(format!(
            "q-Bessel order must be > -1, got {nu}"
        )));
    }
    check_in_series_domain("z", z, ctx)?;
    let q2 = ctx.q2;
    let w = z * z / ((1.0 + ctx.q) * (1.0 + ctx.q));
    let ratio = |k: f64| w / (q_number(k + 1.0, q2) * q_number(nu + k + 1.0, q2));
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..cfg.max_terms {
        let kf = k as f64;
        term *= ratio(kf);
        sum += term;
        let next = ratio(kf + 1.0);
        if next < 1.0 {
            let tail = term * next / (1.0 - next);
            if tail <= cfg.rel_tol * sum || term < cfg.abs_tol {
                return Ok(sum);
            }
        }
    }
    Err(Error::Truncation {
        terms: cfg.max_terms,
        last_term: term,
    })
}

/// log b_m(ν; q²) with b_{2k} = (1+q)^{2k} Γ_{q²}(k+1) Γ_{q²}(ν+k+1)/Γ_{q²}(ν+1)
/// and b_{2k+1} = (1+q)^{2k+1} Γ_{q²}(k+1) Γ_{q²}(ν+k+2)/Γ_{q²}(ν+1).
pub fn ln_q_dunkl_coefficient(m: usize, nu: f64, ctx: &QContext) -> Result<f64> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::Domain(format!("nu must be > 0, got {nu}")));
    }
    let base = ctx.squared();
    let k = (m / 2) as f64;
    let shift = if m.is_multiple_of(2) { 1.0 } else { 2.0 };
    Ok(m as f64 * (1.0 + ctx.q).ln()
        + ln_q_gamma(k + 1.0, &base)?
        + ln_q_gamma(nu + k + shift, &base)?
        - ln_q_gamma(nu + 1.0, &base)?)
}

/// b_m(ν; q²), indexed like the classical b_m(ν).
pub fn q_dunkl_coefficient(m: usize, nu: f64, ctx: &QContext) -> Result<f64> {
    let v = ln_q_dunkl_coefficient(m, nu, ctx)?.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Range(format!("b_{m}({nu}; q²) overflows f64")))
    }
}

/// E_ν(x; q²) = Σ_m x^m / b_m(ν; q²).
pub fn q_dunkl_series(p: &QKernelPoint, cfg: &EvalConfig) -> Result<f64> {
    let q = p.ctx.q;
    let q2 = p.ctx.q2;
    let x = p.x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..=cfg.max_terms {
        let k = ((m - 1) / 2) as f64;
        // b_{2k+1}/b_{2k} = (1+q)[ν+k+1]_{q²};  b_{2k+2}/b_{2k+1} = (1+q)[k+1]_{q²}
        let denom = if m % 2 == 1 {
            (1.0 + q) * q_number(p.nu + k + 1.0, q2)
        } else {
            (1.0 + q) * q_number(k + 1.0, q2)
        };
        let prev = term;
        term *= x / denom;
        sum += term;
        // two-step ratio from here on is bounded by its current value
        let kk = (m / 2) as f64;
        let pair = x * x
            / ((1.0 + q) * (1.0 + q) * q_number(kk + 1.0, q2) * q_number(p.nu + kk + 1.0, q2));
        if pair < 1.0 {
            let tail = (term.abs() + prev.abs()) * pair / (1.0 - pair);
            if tail <= cfg.rel_tol * sum.abs() || tail < cfg.abs_tol {
                return Ok(sum);
            }
        }
    }
    Err(Error::Truncation {
        terms: cfg.max_terms,
        last_term: term.abs(),
    })
}

/// 𝓘_ν(x; q²) + x/((1+q)[ν+1]_{q²}) 𝓘_{ν+1}(x; q²).
pub fn q_dunkl_from_definition(p: &QKernelPoint, cfg: &EvalConfig) -> Result<f64> {
    let even = q_bessel_normalized(p.nu, p.x, &p.ctx, cfg)?;
    let odd = q_bessel_normalized(p.nu + 1.0, p.x, &p.ctx, cfg)?;
    let c = p.x / ((1.0 + p.ctx.q) * q_number(p.nu + 1.0, p.ctx.q2));
    Ok(even + c * odd)
}

/// 𝓘_ν(x; q²) + D_q[𝓘_ν](x), with the q-derivative formed pointwise from x and qx.
pub fn q_dunkl_from_bessel_derivative(p: &QKernelPoint, cfg: &EvalConfig) -> Result<f64> {
    let even = q_bessel_normalized(p.nu, p.x, &p.ctx, cfg)?;
    let shifted = q_bessel_normalized(p.nu, p.ctx.q * p.x, &p.ctx, cfg)?;
    // 𝓘_ν is even, so its derivative vanishes at the origin
    let d = q_derivative(
        |t| if t == p.x { even } else { shifted },
        p.x,
        &p.ctx,
        Some(0.0),
    )?;
    Ok(even + d)
}

/// W_ν(t; q²) = (t²q²; q²)_∞ / (t²q^{2ν+1}; q²)_∞.
pub fn q_weight(t: f64, nu: f64, ctx: &QContext) -> Result<f64> {
    if !(t.is_finite() && t.abs() <= 1.0) {
        return Err(Error::Domain(format!("q_weight needs |t| <= 1, got {t}")));
    }
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::Domain(format!("nu must be > 0, got {nu}")));
    }
    let base = ctx.squared();
    let t2 = t * t;
    let num = q_pochhammer(t2 * ctx.q2, &base, Length::Infinite)?;
    let den = q_pochhammer(t2 * ctx.q.powf(2.0 * nu + 1.0), &base, Length::Infinite)?;
    Ok(num / den)
}

/// C(ν, q²) = (1+q) Γ_{q²}(ν+1) / (2 Γ_{q²}(1/2) Γ_{q²}(ν+1/2)).
pub fn q_norm_const(nu: f64, ctx: &QContext) -> Result<f64> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::Domain(format!("nu must be > 0, got {nu}")));
    }
    let base = ctx.squared();
    let ln_c = (0.5 * (1.0 + ctx.q)).ln() + ln_q_gamma(nu + 1.0, &base)?
        - ln_q_gamma(0.5, &base)?
        - ln_q_gamma(nu + 0.5, &base)?;
    Ok(ln_c.exp())
}

/// Ẽ_ν(x; q²) = E_ν(x; q²)/C(ν, q²), series-backed.
pub fn normalized_q_dunkl(p: &QKernelPoint, cfg: &EvalConfig) -> Result<f64> {
    Ok(q_dunkl_series(p, cfg)? / q_norm_const(p.nu, &p.ctx)?)
}

fn qintegral_bare(
    p: &QKernelPoint,
    variant: QIntegrandVariant,
    trunc: &JacksonTruncation,
) -> Result<(f64, f64)> {
    let ctx = p.ctx;
    let scale = (1.0 - ctx.q) * p.x;
    let failure = std::cell::RefCell::new(None);
    let integrand = |t: f64| {
        let eval = || -> Result<f64> {
            let w = q_weight(t, p.nu, &ctx)?;
            Ok(match variant {
                QIntegrandVariant::AsPrinted => w * (1.0 + t) * q_exp_big(scale * t, &ctx)?,
                QIntegrandVariant::QShifted => {
                    w * (q_exp_big(scale * t, &ctx)? + t * q_exp_big(scale * ctx.q * t, &ctx)?)
                }
                QIntegrandVariant::SmallExponential => {
                    w * (1.0 + t) * q_exp_small(scale * t, &ctx)?
                }
            })
        };
        eval().unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        })
    };
    let sum = jackson_integral(integrand, -1.0, 1.0, &ctx, trunc);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let sum = sum?;
    Ok((sum.value, sum.tail_bound))
}

/// The Jackson integral ∫_{−1}^{1} of the variant's integrand, without C(ν, q²).
pub fn normalized_q_dunkl_qintegral(
    p: &QKernelPoint,
    variant: QIntegrandVariant,
    trunc: &JacksonTruncation,
) -> Result<f64> {
    Ok(qintegral_bare(p, variant, trunc)?.0)
}

/// Outcome of the q-integral route together with its distance from the series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QIntegralDiagnostic {
    pub value: f64,
    pub series: f64,
    pub relative_deviation: f64,
    pub tail_bound: f64,
}

/// C(ν, q²) ∫_{−1}^{1} (integrand) d_q t, compared against the series.
pub fn q_dunkl_qintegral(
    p: &QKernelPoint,
    variant: QIntegrandVariant,
    trunc: &JacksonTruncation,
    cfg: &EvalConfig,
) -> Result<QIntegralDiagnostic> {
    let c = q_norm_const(p.nu, &p.ctx)?;
    let (bare, tail) = qintegral_bare(p, variant, trunc)?;
    let value = c * bare;
    let series = q_dunkl_series(p, cfg)?;
    Ok(QIntegralDiagnostic {
        value,
        series,
        relative_deviation: ((value - series) / series).abs(),
        tail_bound: c * tail,
    })
}

/// |T_{q,ν} f(x) − λ f(x)| for f(t) = E_ν(λt; q²), where
/// T_{q,ν} f(x) = D_q f(x) + ([2ν+1]_q / x)(f(qx) − f(−qx))/2.
pub fn q_operator_residual(p: &QKernelPoint, cfg: &EvalConfig) -> Result<f64> {
    if p.x == 0.0 {
        return Err(Error::Domain("operator residual needs x != 0".into()));
    }
    let q = p.ctx.q;
    let lx = p.lambda * p.x;
    let f_x = q_dunkl_series(&p.at(lx)?, cfg)?;
    let f_qx = q_dunkl_series(&p.at(q * lx)?, cfg)?;
    let f_mqx = q_dunkl_series(&p.at(-q * lx)?, cfg)?;
    let dq = (f_x - f_qx) / ((1.0 - q) * p.x);
    let reflection = q_number(2.0 * p.nu + 1.0, q) / p.x * 0.5 * (f_qx - f_mqx);
    Ok((dq + reflection - p.lambda * f_x).abs())
}
