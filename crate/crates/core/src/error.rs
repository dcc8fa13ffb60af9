use thiserror::Error;

/// Errors raised while building or validating conics and bodies.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("a must exceed b and b must be positive (got a={a}, b={b})")]
    DegenerateEllipse { a: f64, b: f64 },
    #[error("confocal pair violates {relation}: relative residual {residual:e}")]
    InvalidPair {
        relation: &'static str,
        residual: f64,
    },
    #[error("point is off the conic by {distance:e} (tolerance {tolerance:e})")]
    OffCurve { distance: f64, tolerance: f64 },
    #[error("phi_b={phi_b} is not above phi_H={phi_h}")]
    PhiBBelowPhiH { phi_b: f64, phi_h: f64 },
    #[error("phi_b={phi_b} is not below the asymptotic angle {asymptote} seen from F1")]
    PhiBBeyondAsymptote { phi_b: f64, asymptote: f64 },
    #[error("dilation coefficient must exceed 1 (got {0})")]
    InvalidDilation(f64),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("degenerate triangle: {0}")]
    DegenerateTriangle(String),
    #[error("direction is parallel to the rotation axis")]
    AxisParallel,
    #[error("mesh resolution ({azimuthal}, {meridian}) is below the minimum of {min} steps")]
    MeshResolution {
        azimuthal: usize,
        meridian: usize,
        min: usize,
    },
}

/// Errors reading or writing text documents.
#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported schema {found:?}, expected {expected:?}")]
    Schema {
        found: String,
        expected: &'static str,
    },
    #[error("invalid body: {0}")]
    Invalid(#[from] GeometryError),
    #[error("stale document: field {field} differs from the re-derived body by {delta:e}")]
    Stale { field: String, delta: f64 },
    #[error("serialization failed: {0}")]
    Write(String),
}

impl From<serde_json::Error> for DocumentError {
    fn from(e: serde_json::Error) -> Self {
        DocumentError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
