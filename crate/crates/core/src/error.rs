use thiserror::Error;

/// Errors raised by kernel evaluation, quadrature and the verification harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge within {terms} terms (last term magnitude {last_term:e})")]
    Truncation { terms: usize, last_term: f64 },

    #[error("range error: {0}")]
    Range(String),

    #[error("quadrature did not converge: order {coarse_order} gave {coarse}, order {fine_order} gave {fine}")]
    Quadrature {
        coarse_order: usize,
        coarse: f64,
        fine_order: usize,
        fine: f64,
    },

    #[error("non-finite integrand value {value} at sample point {point}")]
    Evaluation { point: f64, value: f64 },

    #[error("argument {z} lies within 1e-9 of the pole q^-{n}")]
    Pole { z: f64, n: u32 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("suite {suite} failed at {point}: {source}")]
    AtPoint {
        suite: String,
        point: String,
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {value}")))
    }
}
