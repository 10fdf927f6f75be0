use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncation and tolerance policy shared by every series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub max_terms: usize,
    pub rel_tol: f64,
    /// Terms below this magnitude are treated as zero.
    pub abs_tol: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            max_terms: 500,
            rel_tol: 1e-14,
            abs_tol: 1e-300,
        }
    }
}

impl EvalConfig {
    pub fn new(max_terms: usize, rel_tol: f64, abs_tol: f64) -> Result<Self> {
        let cfg = Self {
            max_terms,
            rel_tol,
            abs_tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Result<Self> {
        Self::new(self.max_terms, rel_tol, self.abs_tol)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_terms == 0 {
            return Err(Error::Config("max_terms must be at least 1".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::Config(format!(
                "rel_tol must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::Config(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        Ok(())
    }
}
