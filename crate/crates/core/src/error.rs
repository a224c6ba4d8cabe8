use thiserror::Error;

/// Errors raised by the geometry, worldsheet and Jacobi machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular metric at {point:?}: |det g| = {det:e}")]
    SingularMetric { point: Vec<f64>, det: f64 },

    #[error("metric at {point:?} is not symmetric (max asymmetry {asymmetry:e})")]
    AsymmetricMetric { point: Vec<f64>, asymmetry: f64 },

    #[error("point {point:?} lies outside the chart domain")]
    OutOfDomain { point: Vec<f64> },

    #[error("finite-difference stencil around {point:?} leaves the chart domain")]
    StencilOutOfDomain { point: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "degenerate tube at node (tau index {tau_index}, sigma index {sigma_index}): \
         discriminant {discriminant:e} is not positive"
    )]
    DegenerateTube {
        tau_index: usize,
        sigma_index: usize,
        discriminant: f64,
    },

    #[error("tau grid is not uniform (max spacing deviation {deviation:e})")]
    NonUniformGrid { deviation: f64 },

    #[error("frame is not orthonormal (max Gram deviation {deviation:e})")]
    FrameNotOrthonormal { deviation: f64 },

    #[error("frame is degenerate (Gram determinant {gram_det:e})")]
    FrameDegenerate { gram_det: f64 },

    #[error("grid is not in orthonormal gauge (max residual {residual:e} > {tolerance:e})")]
    NotInGauge { residual: f64, tolerance: f64 },

    #[error("CFL rule violated: dt = {dt} exceeds dsigma = {dsigma}")]
    Cfl { dt: f64, dsigma: f64 },

    #[error("gauge drift {residual:e} at tau = {tau} exceeds ceiling {ceiling:e}")]
    GaugeDrift { tau: f64, residual: f64, ceiling: f64 },

    #[error("Jacobi matrix norm {norm:e} at tau = {tau} exceeds the overflow limit")]
    Overflow { tau: f64, norm: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("missing one-sided derivative data at break tau = {tau}")]
    MissingBreakData { tau: f64 },

    #[error("break at tau = {tau} is not a grid node")]
    BreakOffGrid { tau: f64 },

    #[error("variation field does not vanish at the endpoints (|V| = {magnitude:e})")]
    EndpointNonzero { magnitude: f64 },

    #[error("conjugate string at tau = {tau} inside the interval; A is not invertible")]
    ConjugateStringPresent { tau: f64 },

    #[error("no conjugate string at tau = {tau} (smallest singular value {sigma_min:e})")]
    NoConjugateString { tau: f64, sigma_min: f64 },

    #[error("jump pairing c = {c:e} is not positive")]
    NonPositiveJump { c: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures of the numerics (degenerate tube, CFL, overflow, drift)
    /// as opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularMetric { .. }
                | Error::DegenerateTube { .. }
                | Error::Cfl { .. }
                | Error::GaugeDrift { .. }
                | Error::Overflow { .. }
                | Error::StencilOutOfDomain { .. }
                | Error::ConjugateStringPresent { .. }
                | Error::NoConjugateString { .. }
                | Error::FrameDegenerate { .. }
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SingularMetric { .. } => "singular_metric",
            Error::AsymmetricMetric { .. } => "asymmetric_metric",
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::StencilOutOfDomain { .. } => "stencil_out_of_domain",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::DegenerateTube { .. } => "degenerate_tube",
            Error::NonUniformGrid { .. } => "non_uniform_grid",
            Error::FrameNotOrthonormal { .. } => "frame_not_orthonormal",
            Error::FrameDegenerate { .. } => "frame_degenerate",
            Error::NotInGauge { .. } => "not_in_gauge",
            Error::Cfl { .. } => "cfl",
            Error::GaugeDrift { .. } => "gauge_drift",
            Error::Overflow { .. } => "overflow",
            Error::GridMismatch(_) => "grid_mismatch",
            Error::MissingBreakData { .. } => "missing_break_data",
            Error::BreakOffGrid { .. } => "break_off_grid",
            Error::EndpointNonzero { .. } => "endpoint_nonzero",
            Error::ConjugateStringPresent { .. } => "conjugate_string_present",
            Error::NoConjugateString { .. } => "no_conjugate_string",
            Error::NonPositiveJump { .. } => "non_positive_jump",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
