use std::fmt;

use thiserror::Error;

/// One violated invariant, tagged with the offending field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        FieldError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid configuration:\n{}", format_errors(.0))]
    Invalid(Vec<FieldError>),
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
}

fn format_errors(errors: &[FieldError]) -> String {
    errors
        .iter()
        .map(|e| format!("  {e}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Numerical failures carry the best available estimate so callers can
/// decide whether to retry with looser tolerances.
#[derive(Debug, Error)]
pub enum NumericalError {
    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    QuadratureTolerance { achieved: f64, requested: f64, estimate: f64 },
    #[error("oscillatory integral failed tolerance: achieved {achieved:.3e} (estimate {estimate:.6e})")]
    Oscillatory { achieved: f64, estimate: f64 },
    #[error("quantile bracket [{lo:.3e}, {hi:.3e}] does not straddle q = {q}")]
    Bracket { lo: f64, hi: f64, q: f64 },
    #[error("domain error: {0}")]
    Domain(String),
}

pub type NumericalResult<T> = Result<T, NumericalError>;
