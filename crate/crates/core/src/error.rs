use num_complex::Complex64;
use thiserror::Error;

use crate::analytic::NumeratorFactor;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GammaError {
    #[error("Gamma has a pole at z = {z} (within tolerance of -{n})")]
    PoleAtNonPositiveInteger { z: Complex64, n: u64 },
    #[error("non-finite argument {0}")]
    NonFinite(Complex64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    /// One of the four numerator Gamma factors of t(k) diverged.
    #[error("t(k) has a pole at k = {k} from factor {factor:?}")]
    PoleOfT { k: Complex64, factor: NumeratorFactor },
    #[error("invalid wavenumber {0}")]
    InvalidWavenumber(f64),
    #[error("non-finite parameter {0}")]
    NonFiniteParameter(Complex64),
    #[error(transparent)]
    Gamma(#[from] GammaError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClosedFormError {
    #[error("no closed form is available for the {0} parameterization")]
    UnsupportedTag(&'static str),
    #[error("parameter constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("invalid wavenumber {0}")]
    InvalidWavenumber(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("invalid scan region: {0}")]
    InvalidRegion(String),
    #[error("root k = {k} lies within tolerance of two classes ({first} / {second})")]
    AmbiguousClassification {
        k: Complex64,
        first: &'static str,
        second: &'static str,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("|V(±{half_width})| = {magnitude:e} is not negligible against k² = {k_squared:e}")]
    AsymptoticsInvalid {
        half_width: f64,
        magnitude: f64,
        k_squared: f64,
    },
    #[error("step-halving error estimate {estimate:e} exceeds {limit:e}")]
    StepError { estimate: f64, limit: f64 },
    #[error("invalid oracle input: {0}")]
    InvalidInput(String),
}
