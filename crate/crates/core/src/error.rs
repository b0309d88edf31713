use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate region: lower edge {lo} is not below upper edge {hi}")]
    DegenerateRegion { lo: f64, hi: f64 },

    #[error("line {line}: {reason}")]
    Parse { line: u64, reason: String },

    #[error("quadrature did not converge within {nodes} nodes")]
    QuadratureLimit { nodes: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn require_probability(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(invalid(name, format!("must lie in [0, 1], got {value}")))
    }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && !value.is_nan() {
        Ok(value)
    } else {
        Err(invalid(name, format!("must be positive, got {value}")))
    }
}
