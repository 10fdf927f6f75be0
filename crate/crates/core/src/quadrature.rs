//! Gauss-Jacobi quadrature for ∫_{-1}^{1} (1−t)^α (1+t)^β f(t) dt.
//!
//! Nodes come from the Golub-Welsch eigenvalue problem and are polished with
//! Newton steps on P_n^{(α,β)}; weights use the closed form in terms of P_n′,
//! which keeps the small weights next to a regular endpoint accurate.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar_special::gamma;

/// Relative accuracy the rules can deliver. A node next to a singular endpoint
/// (exponent near −1) is only known to about one ulp of t, so its distance to
/// the endpoint, and with it the dominant weight, carries a relative error of
/// up to ~1e-13 that grows with the order.
pub const RESOLUTION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussJacobi {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    alpha: f64,
    beta: f64,
}

/// P_n^{(α,β)}(t) and P_{n−1}^{(α,β)}(t) by the three-term recurrence.
fn jacobi_pair(n: usize, alpha: f64, beta: f64, t: f64) -> (f64, f64) {
    let ab = alpha + beta;
    let mut p_prev = 1.0;
    let mut p = 0.5 * (alpha - beta + (ab + 2.0) * t);
    if n == 0 {
        return (p_prev, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let c = 2.0 * k + ab;
        let a1 = 2.0 * k * (k + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (c * (c - 2.0) * t + alpha * alpha - beta * beta);
        let a3 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c;
        let next = (a2 * p - a3 * p_prev) / a1;
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

/// P_n′ from (2n+α+β)(1−t²)P_n′ = n[(α−β) − (2n+α+β)t]P_n + 2(n+α)(n+β)P_{n−1}.
fn jacobi_derivative(n: usize, alpha: f64, beta: f64, t: f64, p: f64, p_prev: f64) -> f64 {
    let nf = n as f64;
    let c = 2.0 * nf + alpha + beta;
    (nf * ((alpha - beta) - c * t) * p + 2.0 * (nf + alpha) * (nf + beta) * p_prev)
        / (c * (1.0 - t) * (1.0 + t))
}

impl GaussJacobi {
    pub fn new(order: usize, alpha: f64, beta: f64) -> Result<Self> {
        if order < 1 {
            return Err(Error::Domain(
                "Gauss-Jacobi order must be at least 1".into(),
            ));
        }
        if !(alpha > -1.0 && beta > -1.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::Domain(format!(
                "Gauss-Jacobi exponents must exceed -1, got alpha = {alpha}, beta = {beta}"
            )));
        }
        let n = order;
        let ab = alpha + beta;
        let mut jm = DMatrix::<f64>::zeros(n, n);
        jm[(0, 0)] = (beta - alpha) / (ab + 2.0);
        for k in 1..n {
            let kf = k as f64;
            let c = 2.0 * kf + ab;
            jm[(k, k)] = (beta * beta - alpha * alpha) / (c * (c + 2.0));
            let off2 = if k == 1 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0))
            } else {
                4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (c * c * (c + 1.0) * (c - 1.0))
            };
            let off = off2.sqrt();
            jm[(k, k - 1)] = off;
            jm[(k - 1, k)] = off;
        }
        let mut nodes: Vec<f64> = jm.symmetric_eigenvalues().iter().copied().collect();
        nodes.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));

        // Γ(n+α+1)Γ(n+β+1)/(Γ(n+α+β+1) n!) built up from n = 1
        let mut ratio = gamma(alpha + 2.0)? * gamma(beta + 2.0)? / gamma(ab + 2.0)?;
        for k in 2..=n {
            let kf = k as f64;
            ratio *= (kf + alpha) * (kf + beta) / ((kf + ab) * kf);
        }
        let ln_const = (ab + 1.0) * std::f64::consts::LN_2 + ratio.ln();

        let mut weights = Vec::with_capacity(n);
        for t in nodes.iter_mut() {
            for _ in 0..3 {
                let (p, pp) = jacobi_pair(n, alpha, beta, *t);
                let d = jacobi_derivative(n, alpha, beta, *t, p, pp);
                let step = p / d;
                if step.is_finite() {
                    let next = *t - step;
                    if next > -1.0 && next < 1.0 {
                        *t = next;
                    }
                }
            }
            let (p, pp) = jacobi_pair(n, alpha, beta, *t);
            let d = jacobi_derivative(n, alpha, beta, *t, p, pp);
            let w = (ln_const - ((1.0 - *t) * (1.0 + *t)).ln() - 2.0 * d.abs().ln()).exp();
            weights.push(w);
        }
        Ok(Self {
            nodes,
            weights,
            alpha,
            beta,
        })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Σ w_i f(t_i) ≈ ∫_{-1}^{1} (1−t)^α (1+t)^β f(t) dt.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// Integrates against the Jacobi weight, doubling the order from `start`
/// until two successive estimates agree to `rel_tol`, floored at [`RESOLUTION`].
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    alpha: f64,
    beta: f64,
    rel_tol: f64,
    start: usize,
    max_order: usize,
) -> Result<f64> {
    let rel_tol = rel_tol.max(RESOLUTION);
    let mut order = start.max(2);
    let mut coarse = GaussJacobi::new(order, alpha, beta)?.integrate(&f);
    loop {
        let fine_order = 2 * order;
        let fine = GaussJacobi::new(fine_order, alpha, beta)?.integrate(&f);
        if (fine - coarse).abs() <= rel_tol * fine.abs() {
            return Ok(fine);
        }
        if fine_order >= max_order {
            return Err(Error::Quadrature {
                coarse_order: order,
                coarse,
                fine_order,
                fine,
            });
        }
        order = fine_order;
        coarse = fine;
    }
}
