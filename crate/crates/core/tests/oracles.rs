//! Independent oracles: exact rational series, brute-force sums and products,
//! and direct quadrature, each compared against the library's evaluation path.

use dunkl_core::dunkl::{
    dunkl_coefficient, dunkl_integral, dunkl_operator_residual, dunkl_series, dunkl_series_at,
    normalized_dunkl, IntegralConvention, KernelPoint,
};
use dunkl_core::qcore::{
    jackson_integral, jackson_integral_improper, q_digamma, q_exp_big, q_exp_big_product,
    q_exp_small, q_exp_small_series, q_gamma, q_number, q_pochhammer, q_trigamma,
    JacksonTruncation, Length, QContext,
};
use dunkl_core::qdunkl::{
    normalized_q_dunkl, q_bessel_normalized, q_dunkl_coefficient, q_dunkl_from_definition,
    q_dunkl_qintegral, q_dunkl_series, q_norm_const, q_operator_residual, q_weight,
    QIntegrandVariant, QKernelPoint,
};
use dunkl_core::scalar_special::{digamma, gamma, normalized_modified_bessel, trigamma};
use dunkl_core::verify::{evaluate_margin, Suite, Witness};
use dunkl_core::EvalConfig;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

fn cfg() -> EvalConfig {
    EvalConfig::default()
}

fn ctx(q: f64) -> QContext {
    QContext::new(q).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rpow(q: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * q)
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap()
}

/// Σ_{m<terms} z^m / b_m(ν) with ν = nu2/2 and b_m/b_{m−1} = m + (2ν+1)[m odd].
fn classical_series_exact(nu2: i64, z: &BigRational, terms: u32) -> BigRational {
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for m in 1..terms as i64 {
        // 2ν + 1 = nu2 + 1
        let d = if m % 2 == 1 {
            rat(m + nu2 + 1, 1)
        } else {
            rat(m, 1)
        };
        term = term * z / d;
        sum += &term;
    }
    sum
}

/// [n]_{q²} for integer n, exactly.
fn qnum2(n: u32, q: &BigRational) -> BigRational {
    let q2 = q * q;
    (BigRational::one() - rpow(&q2, n)) / (BigRational::one() - q2)
}

/// [a/2]_{q²} for a half-integer argument a/2: (1 − q^a)/(1 − q²).
fn qnum2_half(a: u32, q: &BigRational) -> BigRational {
    (BigRational::one() - rpow(q, a)) / (BigRational::one() - q * q)
}

// ---------------------------------------------------------------- classical special functions

#[test]
fn gamma_3_7_from_quadrature_of_the_defining_integral() {
    // Γ(1.7) = ∫_0^∞ t^{0.7} e^{−t} dt; t = u^p with p = 10/1.7 gives
    // p ∫_0^∞ u^9 e^{−u^p} du, smooth at the origin. Composite Simpson on [0, 2].
    let p = 10.0 / 1.7;
    let n = 200_000;
    let h = 2.0 / n as f64;
    let f = |u: f64| u.powi(9) * (-u.powf(p)).exp();
    let mut s = f(0.0) + f(2.0);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let gamma_1_7 = p * s * h / 3.0;
    let oracle = 2.7 * 1.7 * gamma_1_7;
    assert!(
        rel(gamma(3.7).unwrap(), oracle) < 1e-13,
        "{} vs {oracle}",
        gamma(3.7).unwrap()
    );
}

#[test]
fn digamma_0_3_from_ten_million_terms() {
    let x = 0.3f64;
    let n = 10_000_000u64;
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for k in 0..n {
        let k = k as f64;
        let y = (x - 1.0) / ((k + 1.0) * (k + x)) - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    let nf = n as f64;
    let tail = -(((1.0 - x) / (nf + x)).ln_1p() - 0.5 / (nf + 1.0) + 0.5 / (nf + x));
    let oracle = -0.577_215_664_901_532_9 + s + tail;
    assert!((digamma(x).unwrap() - oracle).abs() < 1e-12);
}

#[test]
fn trigamma_0_7_from_ten_million_terms() {
    let x = 0.7f64;
    let n = 10_000_000u64;
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for k in (0..n).rev() {
        let v = k as f64 + x;
        let y = 1.0 / (v * v) - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    let v = n as f64 + x;
    let tail = 1.0 / v + 0.5 / (v * v) + 1.0 / (6.0 * v * v * v);
    assert!((trigamma(x).unwrap() - (s + tail)).abs() < 1e-12);
}

#[test]
fn modified_bessel_half_order_closed_form() {
    // 𝓘_{1/2}(z) = sinh z / z
    for &z in &[0.3f64, 2.0, -7.5] {
        let v = normalized_modified_bessel(0.5, z, &cfg()).unwrap();
        assert!(rel(v, z.sinh() / z) < 1e-14);
    }
}

// ---------------------------------------------------------------- q-calculus

#[test]
fn q_pochhammer_exact_product() {
    let q = rat(1, 2);
    let a = rat(3, 10);
    // factors beyond k = 80 differ from 1 by less than 1e-24
    let mut p = BigRational::one();
    let mut qk = BigRational::one();
    for _ in 0..80 {
        p *= BigRational::one() - &a * &qk;
        qk *= &q;
    }
    let v = q_pochhammer(0.3, &ctx(0.5), Length::Infinite).unwrap();
    assert!(rel(v, to_f64(&p)) < 1e-14);
}

#[test]
fn q_number_exp_log_cross_check() {
    let direct = (1.0 - (3.2 * 0.7f64.ln()).exp()) / 0.3;
    assert!(rel(q_number(3.2, 0.7), direct) < 1e-14);
}

/// Γ_q(x) = (q;q)_∞ / (q^x;q)_∞ · (1−q)^{1−x}, by a plain product loop.
fn q_gamma_product(x: f64, q: f64) -> f64 {
    let (mut num, mut den) = (1.0, 1.0);
    let mut qk = 1.0;
    for _ in 0..20_000 {
        num *= 1.0 - q * qk;
        den *= 1.0 - q.powf(x) * qk;
        qk *= q;
        if qk < 1e-30 {
            break;
        }
    }
    num / den * (1.0 - q).powf(1.0 - x)
}

#[test]
fn q_gamma_against_product_oracle() {
    assert!(rel(q_gamma(3.0, &ctx(0.5)).unwrap(), 1.5) < 1e-14);
    for &(x, q) in &[(0.5, 0.3), (2.7, 0.5), (1.5, 0.9), (4.2, 0.75)] {
        assert!(
            rel(q_gamma(x, &ctx(q)).unwrap(), q_gamma_product(x, q)) < 1e-12,
            "{x} {q}"
        );
    }
}

#[test]
fn q_digamma_brute_force_and_finite_difference() {
    let l = 0.5f64.ln();
    let s: f64 = (1..=200)
        .map(|n| 0.5f64.powi(n) / (1.0 - 0.5f64.powi(n)))
        .sum();
    assert!((q_digamma(1.0, &ctx(0.5)).unwrap() - (-(0.5f64).ln() + l * s)).abs() < 1e-13);

    let c = ctx(0.9);
    let h = 1e-6;
    let fd = (q_gamma(2.0 + h, &c).unwrap().ln() - q_gamma(2.0 - h, &c).unwrap().ln()) / (2.0 * h);
    assert!((q_digamma(2.0, &c).unwrap() - fd).abs() < 1e-7);
}

#[test]
fn q_trigamma_brute_force_and_finite_difference() {
    let l = 0.5f64.ln();
    let s: f64 = (1..=500)
        .map(|n| {
            let qn = 0.5f64.powi(n);
            qn / ((1.0 - qn) * (1.0 - qn))
        })
        .sum();
    assert!(rel(q_trigamma(1.0, &ctx(0.5)).unwrap(), l * l * s) < 1e-13);

    let c = ctx(0.5);
    let h = 1e-6;
    let fd = (q_digamma(2.0 + h, &c).unwrap() - q_digamma(2.0 - h, &c).unwrap()) / (2.0 * h);
    assert!((q_trigamma(2.0, &c).unwrap() - fd).abs() < 1e-6);
}

#[test]
fn jackson_closed_form_and_bilateral_gaussian() {
    let c = ctx(0.5);
    let v = jackson_integral(|t| t, 0.0, 1.0, &c, &JacksonTruncation::default()).unwrap();
    assert!(rel(v.value, 2.0 / 3.0) < 1e-15);

    let oracle: f64 = (1.0 - 0.5)
        * (-500..=500)
            .map(|n| {
                let t = 0.5f64.powi(n);
                t * (-t * t).exp()
            })
            .sum::<f64>();
    let v = jackson_integral_improper(|t| (-t * t).exp(), 1.0, &c, &JacksonTruncation::default())
        .unwrap();
    assert!(rel(v.value, oracle) < 1e-14);
}

#[test]
fn q_exponential_forms() {
    let c = ctx(0.5);
    let prod = q_exp_small(0.5, &c).unwrap();
    assert!(rel(prod, q_exp_small_series(0.5, &c).unwrap()) < 1e-12);
    let mut p = 1.0;
    for k in 0..200 {
        p *= 1.0 + 0.5f64.powi(k);
    }
    assert!(rel(q_exp_small(-1.0, &c).unwrap(), 1.0 / p) < 1e-14);
    assert!(rel(q_exp_big(1.0, &c).unwrap(), p) < 1e-13);
    assert!(rel(q_exp_big_product(1.0, &c).unwrap(), p) < 1e-14);
    let product = q_exp_small_series(0.3, &c).unwrap() * q_exp_big(-0.3, &c).unwrap();
    assert!((product - 1.0).abs() < 1e-12);
}

#[test]
fn big_q_exponential_under_cancellation() {
    // (10; 0.9)_∞ at 30 digits
    let frozen = 0.016_480_606_493_851_651;
    let c = ctx(0.9);
    assert!(rel(q_exp_big(-10.0, &c).unwrap(), frozen) < 1e-12);
}

// ---------------------------------------------------------------- classical kernel

#[test]
fn classical_series_against_exact_rational_sum() {
    let exact = classical_series_exact(2, &rat(1, 1), 60);
    let v = dunkl_series(&KernelPoint::new(1.0, 1.0, 1.0).unwrap(), &cfg()).unwrap();
    assert!(rel(v, to_f64(&exact)) < 2e-16);
    for &(nu2, zn, zd) in &[(1i64, -7i64, 2i64), (5, 3, 1), (10, -12, 1)] {
        let exact = classical_series_exact(nu2, &rat(zn, zd), 160);
        let v = dunkl_series_at(nu2 as f64 / 2.0, zn as f64 / zd as f64, &cfg()).unwrap();
        assert!(
            rel(v, to_f64(&exact)) < 1e-14,
            "nu = {}/2, z = {zn}/{zd}",
            nu2
        );
    }
}

#[test]
fn classical_turan_margin_against_exact_series() {
    let one = rat(1, 1);
    let e1 = classical_series_exact(2, &one, 60);
    let e2 = classical_series_exact(4, &one, 60);
    let e3 = classical_series_exact(6, &one, 60);
    let exact = to_f64(&((&e1 * &e3 - &e2 * &e2) / (&e2 * &e2)));
    let w = Witness {
        nu: 1.0,
        arg: 1.0,
        q: None,
        h: None,
        alpha: None,
    };
    let m = evaluate_margin(Suite::TuranClassical, &w, &cfg()).unwrap();
    assert!(exact > 0.0);
    assert!(rel(m, exact) < 1e-12, "{m} vs {exact}");
}

#[test]
fn classical_coefficients_satisfy_the_operator_recurrence() {
    // T_ν z^m = (m + (2ν+1)[m odd]) z^{m−1}, so b_m/b_{m−1} must equal that factor
    for &nu in &[0.3, 1.0, 2.5] {
        assert!(rel(dunkl_coefficient(2, 1.0).unwrap(), 8.0) < 1e-14);
        for m in 1..=10usize {
            let ratio = dunkl_coefficient(m, nu).unwrap() / dunkl_coefficient(m - 1, nu).unwrap();
            let factor = m as f64 + if m % 2 == 1 { 2.0 * nu + 1.0 } else { 0.0 };
            assert!(rel(ratio, factor) < 1e-13, "nu={nu} m={m}");
        }
    }
    let r = dunkl_operator_residual(&KernelPoint::new(1.0, 1.0, 0.7).unwrap(), &cfg()).unwrap();
    assert!(r < 1e-10);
    let r = dunkl_operator_residual(&KernelPoint::new(2.5, -1.0, 1.3).unwrap(), &cfg()).unwrap();
    assert!(r < 1e-10);
}

#[test]
fn integral_conventions_against_series() {
    let p = KernelPoint::new(1.5, 1.0, 1.0).unwrap();
    let sm = dunkl_integral(&p, IntegralConvention::SeriesMatched, &cfg()).unwrap();
    assert!(rel(sm, dunkl_series_at(1.5, 1.0, &cfg()).unwrap()) < 1e-10);
    let ap = dunkl_integral(&p, IntegralConvention::AsPrinted, &cfg()).unwrap();
    assert!(rel(ap, dunkl_series_at(1.0, 1.0, &cfg()).unwrap()) < 1e-10);

    let origin = KernelPoint::new(1.0, 1.0, 0.0).unwrap();
    let bare = normalized_dunkl(&origin, IntegralConvention::AsPrinted, &cfg()).unwrap();
    assert!(rel(bare, 2.0) < 1e-14);
}

/// ∫_{−1}^{1} e^{zt} (1−t²)^{ν−1} (1+t) dt via t = −cos θ and a composite
/// Simpson rule on 10⁶ intervals.
fn as_printed_bare_integral(nu: f64, z: f64) -> f64 {
    let n = 1_000_000;
    let h = std::f64::consts::PI / n as f64;
    let f = |th: f64| {
        let t = -th.cos();
        let s = th.sin();
        (z * t).exp() * s.powf(2.0 * nu - 1.0) * (1.0 + t)
    };
    let mut acc = f(0.0) + f(std::f64::consts::PI);
    for i in 1..n {
        acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn as_printed_integral_against_brute_force_quadrature() {
    for &(nu, z) in &[(2.0, 0.5), (1.25, -3.0)] {
        let p = KernelPoint::new(nu, 1.0, z).unwrap();
        let v = normalized_dunkl(&p, IntegralConvention::AsPrinted, &cfg()).unwrap();
        assert!(
            rel(v, as_printed_bare_integral(nu, z)) < 1e-11,
            "nu={nu} z={z}"
        );
    }
}

// ---------------------------------------------------------------- q kernel

#[test]
fn q_bessel_against_exact_rational_sum() {
    // ν = 1/2, z = 3/10, q = 3/5: ratio z²/((1+q)² [k+1]_{q²} [k+3/2]_{q²})
    let q = rat(3, 5);
    let z = rat(3, 10);
    let one_q = BigRational::one() + &q;
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    // the term ratio is below 0.015, so 25 terms exceed double precision
    for k in 0..25u32 {
        term = term * &z * &z / (&one_q * &one_q * qnum2(k + 1, &q) * qnum2_half(2 * k + 3, &q));
        sum += &term;
    }
    let v = q_bessel_normalized(0.5, 0.3, &ctx(0.6), &cfg()).unwrap();
    assert!(
        rel(v, to_f64(&sum)) < cfg().rel_tol,
        "{v} vs {}",
        to_f64(&sum)
    );
}

/// E_1(x; q²) as an exact rational partial sum with b_m/b_{m−1} from the q-numbers.
fn q_series_exact(x: &BigRational, q: &BigRational, terms: u32) -> (BigRational, Vec<BigRational>) {
    let one_q = BigRational::one() + q;
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    let mut coeffs = vec![BigRational::one()];
    for m in 1..terms {
        let k = (m - 1) / 2;
        let d = if m % 2 == 1 {
            &one_q * qnum2(k + 2, q)
        } else {
            &one_q * qnum2(k + 1, q)
        };
        let b = coeffs.last().unwrap() * &d;
        coeffs.push(b);
        term = term * x / d;
        sum += &term;
    }
    (sum, coeffs)
}

#[test]
fn q_series_against_exact_rational_sum() {
    let (sum, coeffs) = q_series_exact(&rat(1, 2), &rat(1, 2), 60);
    let p = QKernelPoint::new(1.0, 0.5, ctx(0.5)).unwrap();
    let v = q_dunkl_series(&p, &cfg()).unwrap();
    assert!(
        rel(v, to_f64(&sum)) < cfg().rel_tol,
        "{v} vs {}",
        to_f64(&sum)
    );
    assert!(rel(q_dunkl_coefficient(1, 1.0, &ctx(0.5)).unwrap(), 1.875) < 1e-14);
    for (m, b) in coeffs.iter().enumerate().take(12) {
        let v = q_dunkl_coefficient(m, 1.0, &ctx(0.5)).unwrap();
        assert!(rel(v, to_f64(b)) < 1e-13, "m = {m}");
    }
}

#[test]
fn q_coefficient_tends_to_classical() {
    let e99 = (q_dunkl_coefficient(4, 1.0, &ctx(0.99)).unwrap() - 192.0).abs();
    let e999 = (q_dunkl_coefficient(4, 1.0, &ctx(0.999)).unwrap() - 192.0).abs();
    // (1+q)^4 [2]_{q²}² [3]_{q²} is ≈ 180.8 at q = 0.99
    assert!(e999 < e99 && e999 < 2.0, "{e99} {e999}");
    assert!(rel(dunkl_coefficient(4, 1.0).unwrap(), 192.0) < 1e-14);
}

#[test]
fn q_kernel_tends_to_classical() {
    let classical = dunkl_series_at(1.0, 1.0, &cfg()).unwrap();
    let err = |q: f64| {
        let p = QKernelPoint::new(1.0, 1.0, ctx(q)).unwrap();
        (q_dunkl_series(&p, &cfg()).unwrap() - classical).abs()
    };
    assert!(err(0.999) < err(0.99) && err(0.99) < err(0.9));
    assert!(err(0.999) < 1e-2);

    let bessel = normalized_modified_bessel(1.0, 1.0, &cfg()).unwrap();
    let berr = |q: f64| (q_bessel_normalized(1.0, 1.0, &ctx(q), &cfg()).unwrap() - bessel).abs();
    assert!(berr(0.999) < berr(0.99));
}

#[test]
fn q_definition_cross_path() {
    for &(nu, x, q) in &[(1.5, 0.4, 0.5), (0.5, -0.4, 0.7)] {
        let p = QKernelPoint::new(nu, x, ctx(q)).unwrap();
        let a = q_dunkl_from_definition(&p, &cfg()).unwrap();
        assert!(rel(a, q_dunkl_series(&p, &cfg()).unwrap()) < 1e-11);
    }
}

#[test]
fn q_weight_against_exact_products() {
    // W_1(1; 0.25) = (0.25; 0.25)_∞ / (0.125; 0.25)_∞
    let q2 = rat(1, 4);
    let (mut num, mut den) = (BigRational::one(), BigRational::one());
    let mut qk = BigRational::one();
    for _ in 0..60 {
        den *= BigRational::one() - rat(1, 8) * &qk;
        qk *= &q2;
        num *= BigRational::one() - &qk;
    }
    let v = q_weight(1.0, 1.0, &ctx(0.5)).unwrap();
    assert!(rel(v, to_f64(&(num / den))) < 1e-14);

    let c = ctx(0.5);
    let ratio = q_weight(0.5, 2.0, &c).unwrap() / q_weight(0.5, 1.0, &c).unwrap();
    assert!((ratio - (1.0 - 0.25 * 0.125)).abs() < 1e-12);
}

#[test]
fn q_norm_const_oracles() {
    let classical = gamma(2.0).unwrap() / (gamma(0.5).unwrap() * gamma(1.5).unwrap());
    assert!(rel(q_norm_const(1.0, &ctx(0.999)).unwrap(), classical) < 1e-3);
    let direct = 1.5 * q_gamma_product(2.0, 0.25)
        / (2.0 * q_gamma_product(0.5, 0.25) * q_gamma_product(1.5, 0.25));
    assert!(rel(q_norm_const(1.0, &ctx(0.5)).unwrap(), direct) < 1e-12);
}

#[test]
fn normalized_q_kernel_is_series_over_constant() {
    let p = QKernelPoint::new(2.0, 0.3, ctx(0.5)).unwrap();
    let v = normalized_q_dunkl(&p, &cfg()).unwrap();
    let expected = q_dunkl_series(&p, &cfg()).unwrap() / q_norm_const(2.0, &p.ctx).unwrap();
    assert_eq!(v, expected);
}

#[test]
fn q_residual_against_coefficient_recurrence() {
    // T_{q,ν} x^m = ([m]_q + [2ν+1]_q q^m [m odd]) x^{m−1}; with b_m/b_{m−1}
    // equal to that factor the truncated kernel is an exact eigenfunction.
    for &(nu, q) in &[(1.0, 0.5), (2.5, 0.7)] {
        let c = ctx(q);
        for m in 1..=10usize {
            let ratio = q_dunkl_coefficient(m, nu, &c).unwrap()
                / q_dunkl_coefficient(m - 1, nu, &c).unwrap();
            let odd = if m % 2 == 1 {
                q_number(2.0 * nu + 1.0, q) * q.powi(m as i32)
            } else {
                0.0
            };
            assert!(
                rel(ratio, q_number(m as f64, q) + odd) < 1e-12,
                "nu={nu} q={q} m={m}: {ratio} vs {}",
                q_number(m as f64, q) + odd
            );
        }
    }
    let a = QKernelPoint::new(1.0, 0.5, ctx(0.5))
        .unwrap()
        .with_lambda(0.5)
        .unwrap();
    assert!(q_operator_residual(&a, &cfg()).unwrap() < 1e-10);
    let b = QKernelPoint::new(2.5, 0.8, ctx(0.7))
        .unwrap()
        .with_lambda(-0.3)
        .unwrap();
    assert!(q_operator_residual(&b, &cfg()).unwrap() < 1e-10);
}

#[test]
fn q_integral_with_small_exponential_reproduces_series() {
    for &(nu, x, q) in &[(1.0, 0.5, 0.5), (0.1, 2.9, 0.7), (2.5, -4.0, 0.9)] {
        let p = QKernelPoint::new(nu, x, ctx(q)).unwrap();
        let tr = JacksonTruncation::for_context(&p.ctx, 1e-15);
        let d = q_dunkl_qintegral(&p, QIntegrandVariant::SmallExponential, &tr, &cfg()).unwrap();
        assert!(d.relative_deviation < 1e-12, "{nu} {x} {q}: {d:?}");
    }
}
