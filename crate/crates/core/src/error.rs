use thiserror::Error;

/// Errors raised by the problem, quadrature, solver and oracle layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value {value} when evaluating {what} at {at}")]
    Evaluation { what: &'static str, at: f64, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid reduction: tau(b) = {tau_b} is not positive")]
    InvalidReduction { tau_b: f64 },

    #[error("unsolvable problem: reduced target {b} is not below the extension limit {limit}")]
    Unsolvable { b: f64, limit: f64 },

    #[error("scan exceeded node cap {cap} before reaching target {target}")]
    CapExceeded { cap: u64, target: f64 },

    #[error("invalid integrand: p({at}) = {value} is not positive")]
    InvalidIntegrand { at: f64, value: f64 },

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error("classical solver diverged at step {step} (x = {x})")]
    Divergence { step: usize, x: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
