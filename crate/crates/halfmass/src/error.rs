use thiserror::Error;

/// Errors produced by metric evaluation, quadrature and the mass functionals.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("unknown metric family `{0}`")]
    UnknownFamily(String),

    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("point {point:?} outside the domain of the field: {message}")]
    OutsideDomain { point: Vec<f64>, message: String },

    #[error("metric not positive definite at {point:?}")]
    SingularMetric { point: Vec<f64> },

    #[error("finite-difference step {step} underflows at scale {scale}")]
    StepUnderflow { step: f64, scale: f64 },

    #[error("non-finite integrand value at node {index} located at {node:?}")]
    NonFiniteIntegrand { index: usize, node: Vec<f64> },

    #[error("degenerate frame construction at {point:?}: {message}")]
    DegenerateFrame { point: Vec<f64>, message: String },

    #[error(
        "position field is not conformal Killing for this metric \
         (residual {residual:.3e} exceeds {threshold:.3e})"
    )]
    ConformalKillingViolation { residual: f64, threshold: f64 },

    #[error("operation requires dimension {required}, field has dimension {actual}")]
    UnsupportedDimension { required: String, actual: usize },

    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
