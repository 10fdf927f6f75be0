pub mod cli;
pub mod config;
pub mod dunkl;
pub mod error;
mod extended;
pub mod qcore;
pub mod qdunkl;
pub mod quadrature;
pub mod scalar_special;
pub mod verify;

pub use config::EvalConfig;
pub use error::{Error, Result};
