use thiserror::Error;

/// Errors raised by the metric, curvature, isometry and catalog routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A frame is singular or too close to singular to canonicalize or invert.
    #[error("degenerate frame: pivot {pivot:e} at index {index} is below threshold {threshold:e}")]
    Degenerate {
        index: usize,
        pivot: f64,
        threshold: f64,
    },

    /// Matrix or coordinate dimensions do not fit together.
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// The request exceeds an enumeration or arithmetic budget.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// No embedded reference critical-point set exists for this dimension.
    #[error("no reference critical-point set for n = {0}")]
    UnsupportedReference(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
