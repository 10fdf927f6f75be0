//! q-calculus primitives: q-Pochhammer symbols, q-numbers, q-gamma and its
//! logarithmic derivatives, the q-derivative, Jackson integrals and the two
//! q-exponentials.

use crate::error::{require_finite, Error, Result};

/// Factors `1 - a q^k` with `|a q^k|` below this are folded into a first-order tail.
const POCHHAMMER_FLOOR: f64 = 1e-17;

/// Hard cap on the number of summands for the q-digamma family.
const Q_SERIES_TERM_CAP: usize = 10_000_000;

/// A fixed deformation parameter `q` in (0, 1) together with the quantities
/// derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QContext {
    pub q: f64,
    /// q².
    pub q2: f64,
    /// 1/(1−q)², the bound |x| < 1/(1−q)² under which the q-Dunkl kernel is
    /// usually stated.
    pub radius: f64,
    /// 1/(1−q), the radius of convergence of the q-Bessel and q-Dunkl power
    /// series. Kernel arguments are validated against this bound.
    pub series_radius: f64,
}

impl QContext {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("q must lie in (0, 1), got {q}")));
        }
        let one_minus = 1.0 - q;
        Ok(Self {
            q,
            q2: q * q,
            radius: 1.0 / (one_minus * one_minus),
            series_radius: 1.0 / one_minus,
        })
    }

    /// The context for base q², as used by Γ_{q²} and (·; q²)_∞.
    pub fn squared(&self) -> Self {
        Self::new(self.q2).expect("q² lies in (0, 1) whenever q does")
    }
}

/// Length of a q-shifted factorial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Length {
    Finite(usize),
    Infinite,
}

/// (a; q)_n = ∏_{k=0}^{n−1} (1 − a q^k), or the infinite product.
pub fn q_pochhammer(a: f64, ctx: &QContext, n: Length) -> Result<f64> {
    require_finite("a", a)?;
    let q = ctx.q;
    match n {
        Length::Finite(n) => {
            let mut prod = 1.0;
            let mut aqk = a;
            for _ in 0..n {
                prod *= 1.0 - aqk;
                aqk *= q;
            }
            Ok(prod)
        }
        Length::Infinite => {
            let mut prod = 1.0;
            let mut aqk = a;
            while aqk.abs() >= POCHHAMMER_FLOOR {
                prod *= 1.0 - aqk;
                aqk *= q;
            }
            // ∏_{j≥k}(1 − a q^j) = 1 − a q^k/(1−q) + O((a q^k)²)
            Ok(prod * (1.0 - aqk / (1.0 - q)))
        }
    }
}

/// The q-number [a]_q = (1 − q^a)/(1 − q).
pub fn q_number(a: f64, q: f64) -> f64 {
    -(a * q.ln()).exp_m1() / (1.0 - q)
}

fn require_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} requires a positive finite argument, got {x}"
        )))
    }
}

/// log Γ_q(x) from the product (q;q)_∞/(q^x;q)_∞ · (1−q)^{1−x}, summed factor
/// pair by factor pair so that q close to 1 neither underflows nor cancels.
pub fn ln_q_gamma(x: f64, ctx: &QContext) -> Result<f64> {
    require_positive("q_gamma", x)?;
    let ln_q = ctx.q.ln();
    let mut acc = (1.0 - x) * (-ln_q.exp_m1()).ln();
    let smallest = x.min(1.0);
    let mut k = 0usize;
    loop {
        let kf = k as f64;
        let a = ((kf + 1.0) * ln_q).exp();
        let b = ((kf + x) * ln_q).exp();
        let num = if a > 0.5 {
            (-((kf + 1.0) * ln_q).exp_m1()).ln()
        } else {
            (-a).ln_1p()
        };
        let den = if b > 0.5 {
            (-((kf + x) * ln_q).exp_m1()).ln()
        } else {
            (-b).ln_1p()
        };
        acc += num - den;
        k += 1;
        if ((kf + 1.0 + smallest) * ln_q).exp() < POCHHAMMER_FLOOR {
            break;
        }
    }
    // remaining pairs contribute Σ_{j≥k} (q^{j+x} − q^{j+1}) to first order
    let qk = (k as f64 * ln_q).exp();
    acc += qk * ((x * ln_q).exp() - ctx.q) / (1.0 - ctx.q);
    Ok(acc)
}

pub fn q_gamma(x: f64, ctx: &QContext) -> Result<f64> {
    let lg = ln_q_gamma(x, ctx)?;
    let v = lg.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Range(format!("q_gamma({x}) overflows f64")))
    }
}

/// Sums Σ_{n≥1} weight(n) q^{nx}/(1 − q^n) until the geometric remainder is negligible.
fn q_lambert_sum(x: f64, ctx: &QContext, weight: impl Fn(f64) -> f64) -> Result<f64> {
    let ln_q = ctx.q.ln();
    let qx = (x * ln_q).exp();
    let mut sum = 0.0;
    let mut last = 0.0;
    for n in 1..=Q_SERIES_TERM_CAP {
        let nf = n as f64;
        let qnx = (nf * x * ln_q).exp();
        let term = weight(nf) * qnx / (-(nf * ln_q).exp_m1());
        sum += term;
        last = term;
        // successive ratios tend to q^x from above, bounded by q^x (n+1)/n
        let ratio = qx * weight(nf + 1.0) / weight(nf) / (1.0 - (nf * ln_q).exp());
        if ratio < 1.0 && term * ratio / (1.0 - ratio) <= 1e-17 * sum.abs() {
            return Ok(sum);
        }
        if term == 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::Truncation {
        terms: Q_SERIES_TERM_CAP,
        last_term: last,
    })
}

/// ψ_q(x) = −log(1−q) + log(q) Σ_{n≥1} q^{nx}/(1−q^n).
pub fn q_digamma(x: f64, ctx: &QContext) -> Result<f64> {
    require_positive("q_digamma", x)?;
    let s = q_lambert_sum(x, ctx, |_| 1.0)?;
    Ok(-(1.0 - ctx.q).ln() + ctx.q.ln() * s)
}

/// ψ′_q(x) = (log q)² Σ_{n≥1} n q^{nx}/(1−q^n); positive and decreasing in x.
pub fn q_trigamma(x: f64, ctx: &QContext) -> Result<f64> {
    require_positive("q_trigamma", x)?;
    let s = q_lambert_sum(x, ctx, |n| n)?;
    let lq = ctx.q.ln();
    Ok(lq * lq * s)
}

/// (D_q f)(x) = (f(x) − f(qx))/((1−q)x).
///
/// At x = 0 the value is f′(0), which must be supplied by the caller.
pub fn q_derivative<F>(f: F, x: f64, ctx: &QContext, derivative_at_zero: Option<f64>) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    require_finite("x", x)?;
    if x == 0.0 {
        return derivative_at_zero.ok_or_else(|| {
            Error::Domain("q-derivative at x = 0 needs f'(0) from the caller".into())
        });
    }
    Ok((f(x) - f(ctx.q * x)) / ((1.0 - ctx.q) * x))
}

/// Truncation depth for Jackson sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacksonTruncation {
    /// Last nonnegative exponent n in the nodes q^n.
    pub n_max: usize,
    /// First (negative) exponent, used only by improper integrals.
    pub n_min: i32,
    /// Relative size the boundary terms of an improper sum must fall below.
    pub tail_tol: f64,
}

impl Default for JacksonTruncation {
    fn default() -> Self {
        Self {
            n_max: 200,
            n_min: -60,
            tail_tol: 1e-12,
        }
    }
}

impl JacksonTruncation {
    /// Default depth, deepened so that q^{n_max+1}/(1−q) stays below `tol`.
    pub fn for_context(ctx: &QContext, tol: f64) -> Self {
        let needed = ((tol * (1.0 - ctx.q)).ln() / ctx.q.ln()).ceil().max(0.0) as usize;
        Self {
            n_max: needed.max(Self::default().n_max),
            ..Self::default()
        }
    }

    /// Bound on the omitted part of Σ q^n.
    pub fn geometric_tail(&self, ctx: &QContext) -> f64 {
        ctx.q.powi(self.n_max as i32 + 1) / (1.0 - ctx.q)
    }
}

/// A truncated Jackson sum and an estimate of what the truncation dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacksonSum {
    pub value: f64,
    /// Estimated magnitude of the omitted terms near the origin.
    pub tail_bound: f64,
    /// Size of the boundary term on the large-argument side (improper sums only).
    pub upper_tail: f64,
}

fn sample<F: Fn(f64) -> f64>(f: &F, t: f64) -> Result<f64> {
    let v = f(t);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation { point: t, value: v })
    }
}

/// ∫_0^a f d_q t = (1−q) a Σ_{n=0}^{n_max} f(a q^n) q^n; returns (value, last |f|).
fn jackson_from_zero<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    ctx: &QContext,
    trunc: &JacksonTruncation,
) -> Result<(f64, f64)> {
    if a == 0.0 {
        return Ok((0.0, 0.0));
    }
    let mut sum = 0.0;
    let mut qn = 1.0;
    let mut last = 0.0;
    for _ in 0..=trunc.n_max {
        let v = sample(f, a * qn)?;
        sum += v * qn;
        last = v.abs();
        qn *= ctx.q;
    }
    Ok(((1.0 - ctx.q) * a * sum, last))
}

/// Jackson integral ∫_a^b f d_q t = ∫_0^b − ∫_0^a.
///
/// For [−1, 1] this is (1−q) Σ q^n [f(q^n) + f(−q^n)].
pub fn jackson_integral<F>(
    f: F,
    a: f64,
    b: f64,
    ctx: &QContext,
    trunc: &JacksonTruncation,
) -> Result<JacksonSum>
where
    F: Fn(f64) -> f64,
{
    require_finite("a", a)?;
    require_finite("b", b)?;
    let (upper, last_b) = jackson_from_zero(&f, b, ctx, trunc)?;
    let (lower, last_a) = jackson_from_zero(&f, a, ctx, trunc)?;
    let tail = (a.abs() * last_a + b.abs() * last_b) * trunc.geometric_tail(ctx) * (1.0 - ctx.q);
    Ok(JacksonSum {
        value: upper - lower,
        tail_bound: tail,
        upper_tail: 0.0,
    })
}

/// ∫_0^{∞/A} f d_q t = (1−q) Σ_{n∈ℤ} f(q^n/A) q^n/A, truncated to n_min ≤ n ≤ n_max.
pub fn jackson_integral_improper<F>(
    f: F,
    scale: f64,
    ctx: &QContext,
    trunc: &JacksonTruncation,
) -> Result<JacksonSum>
where
    F: Fn(f64) -> f64,
{
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Domain(format!(
            "improper Jackson integral needs A > 0, got {scale}"
        )));
    }
    let ln_q = ctx.q.ln();
    let mut sum = 0.0;
    let mut first = 0.0;
    let mut last = 0.0;
    for n in trunc.n_min..=trunc.n_max as i32 {
        let node = (n as f64 * ln_q).exp() / scale;
        let term = sample(&f, node)? * node;
        if n == trunc.n_min {
            first = term.abs();
        }
        last = term.abs();
        sum += term;
    }
    let value = (1.0 - ctx.q) * sum;
    let lower = (1.0 - ctx.q) * last / (1.0 - ctx.q);
    let upper = (1.0 - ctx.q) * first;
    let limit = trunc.tail_tol * value.abs().max(f64::MIN_POSITIVE);
    if lower > limit || upper > limit {
        let worst = lower.max(upper);
        return Err(Error::Truncation {
            terms: (trunc.n_max as i64 - trunc.n_min as i64 + 1) as usize,
            last_term: worst,
        });
    }
    Ok(JacksonSum {
        value,
        tail_bound: lower,
        upper_tail: upper,
    })
}

/// Index n of the pole q^{−n} of e(q, ·) closest to z, if z is within 1e-9 of it.
fn near_pole(z: f64, ctx: &QContext) -> Option<u32> {
    if z < 1.0 - 1e-9 {
        return None;
    }
    let n = (-(z.ln()) / ctx.q.ln()).round().max(0.0);
    let pole = ctx.q.powf(-n);
    ((z - pole).abs() <= 1e-9 * pole).then_some(n as u32)
}

/// The small q-exponential e(q, z) = 1/(z; q)_∞.
pub fn q_exp_small(z: f64, ctx: &QContext) -> Result<f64> {
    require_finite("z", z)?;
    if let Some(n) = near_pole(z, ctx) {
        return Err(Error::Pole { z, n });
    }
    Ok(1.0 / q_pochhammer(z, ctx, Length::Infinite)?)
}

/// e(q, z) by its power series Σ z^n/(q;q)_n.
///
/// Valid for |z| < 1 only. For z < 0 and q near 1 the series alternates with
/// large terms and loses digits; `q_exp_small` has no such cancellation.
pub fn q_exp_small_series(z: f64, ctx: &QContext) -> Result<f64> {
    if z.is_nan() || z.abs() >= 1.0 {
        return Err(Error::Domain(format!(
            "series form of e(q, z) requires |z| < 1, got {z}"
        )));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0usize;
    loop {
        n += 1;
        term *= z / (1.0 - ctx.q.powi(n as i32));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() * (1.0 - z.abs()) || n > 100_000 {
            return Ok(sum);
        }
    }
}

/// Σ|term|/|sum| above which the alternating series of E(q; z) is abandoned.
const BIG_EXP_CANCELLATION: f64 = 1e3;

/// The big q-exponential E(q; z) = Σ q^{n(n−1)/2} z^n/(q;q)_n, an entire function.
///
/// For z < 0 the series alternates; when it cancels badly the product form,
/// whose factors are all computed without cancellation away from its zeros,
/// is returned instead.
pub fn q_exp_big(z: f64, ctx: &QContext) -> Result<f64> {
    require_finite("z", z)?;
    let q = ctx.q;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut abs_sum = 1.0;
    let mut qn = 1.0; // q^n
    let mut n = 0usize;
    loop {
        // term_{n+1}/term_n = q^n z/(1 − q^{n+1})
        let ratio = qn * z / (1.0 - qn * q);
        term *= ratio;
        sum += term;
        abs_sum += term.abs();
        n += 1;
        qn *= q;
        if (term.abs() <= 1e-17 * sum.abs() && ratio.abs() < 0.5) || term == 0.0 {
            if abs_sum > BIG_EXP_CANCELLATION * sum.abs() {
                return q_exp_big_product(z, ctx);
            }
            return Ok(sum);
        }
        if n > 100_000 {
            return Err(Error::Truncation {
                terms: n,
                last_term: term.abs(),
            });
        }
    }
}

/// E(q; z) through its product form (−z; q)_∞ = ∏ (1 + z q^k).
pub fn q_exp_big_product(z: f64, ctx: &QContext) -> Result<f64> {
    q_pochhammer(-z, ctx, Length::Infinite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_special::gamma;

    fn ctx(q: f64) -> QContext {
        QContext::new(q).unwrap()
    }

    #[test]
    fn context_validation() {
        assert!(QContext::new(0.0).is_err());
        assert!(QContext::new(1.0).is_err());
        assert!(QContext::new(-0.5).is_err());
        assert!(QContext::new(f64::NAN).is_err());
        let c = ctx(0.5);
        assert_eq!(c.q2, 0.25);
        assert_eq!(c.radius, 4.0);
        assert_eq!(c.series_radius, 2.0);
    }

    #[test]
    fn pochhammer_simple_cases() {
        let c = ctx(0.5);
        assert_eq!(q_pochhammer(0.0, &c, Length::Infinite).unwrap(), 1.0);
        assert_eq!(q_pochhammer(0.5, &c, Length::Finite(2)).unwrap(), 0.375);
        assert_eq!(q_pochhammer(0.3, &c, Length::Finite(0)).unwrap(), 1.0);
        assert!(q_pochhammer(f64::NAN, &c, Length::Finite(2)).is_err());
    }

    #[test]
    fn q_numbers() {
        assert!((q_number(1.0, 0.5) - 1.0).abs() < 1e-15);
        assert!((q_number(2.0, 0.5) - 1.5).abs() < 1e-15);
        let direct = (1.0 - (3.2 * 0.7f64.ln()).exp()) / 0.3;
        assert!((q_number(3.2, 0.7) - direct).abs() < 1e-14);
    }

    #[test]
    fn q_gamma_anchor_values() {
        for &q in &[0.1, 0.5, 0.9, 0.999] {
            let c = ctx(q);
            assert!((q_gamma(1.0, &c).unwrap() - 1.0).abs() < 1e-12, "q = {q}");
            assert!((q_gamma(2.0, &c).unwrap() - 1.0).abs() < 1e-12, "q = {q}");
        }
        assert!((q_gamma(3.0, &ctx(0.5)).unwrap() - 1.5).abs() < 1e-12);
        assert!(q_gamma(0.0, &ctx(0.5)).is_err());
        assert!(q_gamma(-2.0, &ctx(0.5)).is_err());
    }

    #[test]
    fn q_gamma_recurrence_on_grid() {
        for &q in &[0.3, 0.5, 0.9, 0.99] {
            let c = ctx(q);
            for i in 1..=40 {
                let x = 0.25 * i as f64;
                let lhs = q_gamma(x + 1.0, &c).unwrap();
                let rhs = q_number(x, q) * q_gamma(x, &c).unwrap();
                assert!(((lhs - rhs) / rhs).abs() < 1e-11, "q = {q}, x = {x}");
            }
        }
    }

    #[test]
    fn q_gamma_tends_to_gamma() {
        for &x in &[0.5, 1.5, 3.0] {
            let g = gamma(x).unwrap();
            let errs: Vec<f64> = [0.9, 0.99, 0.999]
                .iter()
                .map(|&q| (q_gamma(x, &ctx(q)).unwrap() - g).abs())
                .collect();
            assert!(errs[0] > errs[1] && errs[1] > errs[2], "x = {x}: {errs:?}");
        }
    }

    #[test]
    fn q_digamma_limits() {
        let c = ctx(0.5);
        assert!((q_digamma(50.0, &c).unwrap() + 0.5f64.ln()).abs() < 1e-12);
        assert!(q_digamma(0.0, &c).is_err());
    }

    #[test]
    fn q_trigamma_positive_and_decreasing() {
        for &q in &[0.3, 0.5, 0.81, 0.99] {
            let c = ctx(q);
            let mut prev = f64::INFINITY;
            for i in 1..=100 {
                let x = 0.1 * i as f64;
                let v = q_trigamma(x, &c).unwrap();
                assert!(v > 0.0 && v < prev, "q = {q}, x = {x}");
                prev = v;
            }
        }
    }

    #[test]
    fn q_derivative_of_monomials() {
        let c = ctx(0.5);
        assert!((q_derivative(|t| t, 3.7, &c, None).unwrap() - 1.0).abs() < 1e-15);
        assert!((q_derivative(|t| t * t, 1.0, &c, None).unwrap() - 1.5).abs() < 1e-15);
        for n in 0..8 {
            let x = 1.3;
            let d = q_derivative(|t| t.powi(n), x, &c, None).unwrap();
            let expect = q_number(n as f64, 0.5) * x.powi(n - 1);
            assert!(
                (d - expect).abs() < 1e-13 * expect.abs().max(1.0),
                "n = {n}"
            );
        }
    }

    #[test]
    fn q_derivative_at_origin() {
        let c = ctx(0.5);
        assert!(matches!(
            q_derivative(|t| t, 0.0, &c, None),
            Err(Error::Domain(_))
        ));
        assert_eq!(q_derivative(|t| t, 0.0, &c, Some(1.0)).unwrap(), 1.0);
    }

    #[test]
    fn jackson_closed_forms() {
        let c = ctx(0.5);
        let tr = JacksonTruncation::default();
        let one = jackson_integral(|_| 1.0, 0.0, 1.0, &c, &tr).unwrap();
        assert!((one.value - 1.0).abs() < 1e-15);
        let lin = jackson_integral(|t| t, 0.0, 1.0, &c, &tr).unwrap();
        assert!((lin.value - 2.0 / 3.0).abs() < 1e-15);
        let odd = jackson_integral(|t| t, -1.0, 1.0, &c, &tr).unwrap();
        assert!(odd.value.abs() < 1e-16);
    }

    #[test]
    fn jackson_reports_nonfinite_samples() {
        let c = ctx(0.5);
        let tr = JacksonTruncation::default();
        match jackson_integral(|t| 1.0 / (t - 0.25), 0.0, 1.0, &c, &tr) {
            Err(Error::Evaluation { point, .. }) => assert_eq!(point, 0.25),
            other => panic!("expected evaluation error, got {other:?}"),
        }
    }

    #[test]
    fn jackson_depth_scales_with_q() {
        let shallow = JacksonTruncation::for_context(&ctx(0.5), 1e-12);
        assert_eq!(shallow.n_max, 200);
        let deep = JacksonTruncation::for_context(&ctx(0.95), 1e-12);
        assert!(deep.geometric_tail(&ctx(0.95)) < 1e-12);
    }

    #[test]
    fn improper_jackson_zero_and_scale_invariance() {
        let c = ctx(0.5);
        let tr = JacksonTruncation::default();
        let zero = jackson_integral_improper(|_| 0.0, 1.0, &c, &tr).unwrap();
        assert_eq!(zero.value, 0.0);
        let g = |t: f64| (-t * t).exp();
        let a = jackson_integral_improper(g, 1.0, &c, &tr).unwrap();
        let b = jackson_integral_improper(g, 0.5f64.powi(-3), &c, &tr).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
    }

    #[test]
    fn improper_jackson_detects_slow_tails() {
        let c = ctx(0.5);
        let tr = JacksonTruncation::default();
        let slow = jackson_integral_improper(|t| 1.0 / (1.0 + t), 1.0, &c, &tr);
        assert!(matches!(slow, Err(Error::Truncation { .. })));
    }

    #[test]
    fn small_q_exponential_forms_agree() {
        let c = ctx(0.5);
        assert_eq!(q_exp_small(0.0, &c).unwrap(), 1.0);
        let p = q_exp_small(0.5, &c).unwrap();
        let s = q_exp_small_series(0.5, &c).unwrap();
        assert!(((p - s) / s).abs() < 1e-12);
        let neg = q_exp_small(-1.0, &c).unwrap();
        assert!(
            ((neg - 1.0 / q_pochhammer(-1.0, &c, Length::Infinite).unwrap()) / neg).abs() < 1e-15
        );
        assert!(q_exp_small_series(1.5, &c).is_err());
    }

    #[test]
    fn small_q_exponential_poles() {
        let c = ctx(0.5);
        assert!(matches!(
            q_exp_small(1.0, &c),
            Err(Error::Pole { n: 0, .. })
        ));
        assert!(matches!(
            q_exp_small(8.0, &c),
            Err(Error::Pole { n: 3, .. })
        ));
        assert!(q_exp_small(3.0, &c).is_ok());
    }

    #[test]
    fn big_q_exponential() {
        let c = ctx(0.5);
        assert_eq!(q_exp_big(0.0, &c).unwrap(), 1.0);
        let s = q_exp_big(1.0, &c).unwrap();
        let p = q_exp_big_product(1.0, &c).unwrap();
        assert!(((s - p) / p).abs() < 1e-12);
        let z = 0.3;
        let prod = q_exp_small(z, &c).unwrap() * q_exp_big(-z, &c).unwrap();
        assert!((prod - 1.0).abs() < 1e-12);
    }
}
