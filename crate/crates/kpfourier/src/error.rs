use num_complex::Complex64;
use thiserror::Error;

/// Everything that can go wrong inside the engines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("non-finite evaluation at ({x}, {y})")]
    NonFinite { x: f64, y: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("variation appears unbounded (last estimate {last})")]
    VariationUnbounded { last: f64, history: Vec<f64> },

    #[error("refinement did not converge (last delta {})", deltas.last().copied().unwrap_or(f64::NAN))]
    NonConvergence { deltas: Vec<f64> },

    #[error("Pringsheim limit not detected after {} rungs", values.len())]
    PringsheimStall { values: Vec<Complex64>, deltas: Vec<f64> },

    #[error("edge integral along {edge} did not converge")]
    EdgeNonConvergence { edge: &'static str, deltas: Vec<f64> },

    #[error("sequence is not lacunary: {0}")]
    NotLacunary(String),

    #[error("frequency ({xi}, {eta}) lies on a coordinate axis")]
    AxisFrequency { xi: f64, eta: f64 },

    #[error("transform failed at ({xi}, {eta}): {source}")]
    TransformAt {
        xi: f64,
        eta: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("limit not detected in direction {direction}")]
    LimitNotDetected { direction: String },

    #[error("catalog: {0}")]
    Catalog(String),
}

impl Error {
    /// True for failures of a numerical limit (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::VariationUnbounded { .. }
            | Error::NonConvergence { .. }
            | Error::PringsheimStall { .. }
            | Error::EdgeNonConvergence { .. }
            | Error::LimitNotDetected { .. }
            | Error::NonFinite { .. } => true,
            Error::TransformAt { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
