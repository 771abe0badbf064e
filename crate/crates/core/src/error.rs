use thiserror::Error;

/// Everything that can go wrong while building or checking a curve.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("the zero vector has no causal character")]
    ZeroVector,
    #[error("jet is not unit speed: |g(T,T) - eps| = {residual:e}")]
    NotUnitSpeed { residual: f64 },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("values are not strictly monotone at index {index}")]
    NonMonotone { index: usize },
    #[error("sample arrays have mismatched lengths ({expected} vs {got})")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("no admissible interval in the scan window [{lo}, {hi}]")]
    EmptyDomain { lo: f64, hi: f64 },
    #[error("non-integrable singularity (double zero of the radicand) at {location}")]
    NonIntegrable { location: f64 },
    #[error("pseudodistance vanishes inside the requested range at {location}")]
    SingularRange { location: f64 },
    #[error("momentum changes sign at v = {location}; arc length is not monotone")]
    MomentumZeroCrossing { location: f64 },
    #[error("{what} = {value} is outside {domain}")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        domain: String,
    },
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: String,
        value: f64,
        reason: String,
    },
    #[error("family `{0}` has no closed-form intrinsic equation (pseudopolar-only)")]
    PseudopolarOnly(&'static str),
    #[error("the two curves have no overlapping arc-length range")]
    NoOverlap,
    #[error("quadrature on [{a}, {b}] did not reach tolerance {tol:e}")]
    QuadratureFailed { a: f64, b: f64, tol: f64 },
    #[error("root is not bracketed on [{lo}, {hi}]")]
    NotBracketed { lo: f64, hi: f64 },
    #[error("inversion residual {residual:e} exceeds target {target:e}")]
    InversionFailed { residual: f64, target: f64 },
    #[error("momentum is not an antiderivative of the curvature law: residual {residual:e} at {at}")]
    InconsistentMomentum { residual: f64, at: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
