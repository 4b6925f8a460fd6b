//! Coherent scattering from the complex Scarf II potential
//! `V(x) = P sech²x + Q sech x tanh x`.
//!
//! - [`gamma`]: complex Gamma / log-Gamma.
//! - [`analytic`]: exact `t(k)`, `r(k)`, `|det S|` from the Gamma-function formulas.
//! - [`closed_forms`]: simplified expressions for the special parameter families.
//! - [`spectral`]: numerical pole finding and classification in the complex `k` plane.
//! - [`oracle`]: direct integration of the Schrödinger equation, independent of the above.

pub mod analytic;
pub mod closed_forms;
pub mod error;
pub mod gamma;
pub mod oracle;
pub mod params;
pub mod spectral;

pub use num_complex::Complex64;

/// Complex numbers used throughout the crate.
pub type Complex = Complex64;

pub use analytic::{
    f_factor, reflection_zero_general, scattering_coefficients, transmission_amplitude, ReflectionZeros,
    ScatteringResult, Side,
};

pub use closed_forms::Parameterization;
pub use error::{AnalyticError, ClosedFormError, GammaError, OracleError, SpectralError};
pub use params::{potential, Extended, ScarfParams};
