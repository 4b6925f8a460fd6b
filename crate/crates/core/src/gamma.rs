//! Complex Gamma and log-Gamma.
//!
//! Lanczos approximation (g = 7, nine coefficients) on `Re z >= 1/2`, and the
//! reflection formula `Γ(z) Γ(1 - z) = π / sin(πz)` below that line. The
//! logarithm returned is the principal branch of `log Γ`, i.e. the branch that
//! is real on the positive axis and continuous on `ℂ \ (-∞, 0]`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::GammaError;

/// Distance from a non-positive integer below which an argument is treated as
/// an exact pole of `Γ`.
pub const POLE_TOLERANCE: f64 = 1e-9;

const LANCZOS_G: f64 = 7.0;

#[allow(clippy::excessive_precision)] // published to this many digits
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

// ln(2π) / 2
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Returns `Some(n)` when `z` lies within [`POLE_TOLERANCE`] of `-n`, `n >= 0`.
pub fn nearest_pole(z: Complex64) -> Option<u64> {
    if z.re > 0.5 {
        return None;
    }
    let n = (-z.re).round();
    if n < 0.0 {
        return None;
    }
    if (z + n).norm() < POLE_TOLERANCE {
        Some(n as u64)
    } else {
        None
    }
}

/// Principal branch of `log Γ(z)`.
pub fn log_gamma(z: Complex64) -> Result<Complex64, GammaError> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(GammaError::NonFinite(z));
    }
    if let Some(n) = nearest_pole(z) {
        return Err(GammaError::PoleAtNonPositiveInteger { z, n });
    }
    // Evaluate in the closed upper half-plane and conjugate back, so that
    // log_gamma(conj z) == conj(log_gamma(z)) holds bit for bit.
    if z.im < 0.0 {
        return Ok(log_gamma_upper(z.conj()).conj());
    }
    let lg = log_gamma_upper(z);
    if z.im == 0.0 {
        // On the real axis the imaginary part is an exact multiple of π
        // (zero for z > 0); drop the rounding left by the reflection branch.
        return Ok(Complex64::new(lg.re, (lg.im / PI).round() * PI));
    }
    Ok(lg)
}

/// `Γ(z)`, as `exp(log Γ(z))`. Real input gives an exactly real result.
pub fn gamma(z: Complex64) -> Result<Complex64, GammaError> {
    let lg = log_gamma(z)?;
    if z.im == 0.0 {
        // The branch of log Γ on the negative axis carries iπn; exp would
        // turn that into a stray imaginary part of order 1e-16.
        let odd = (lg.im / PI).round().rem_euclid(2.0) == 1.0;
        let m = lg.re.exp();
        return Ok(Complex64::new(if odd { -m } else { m }, 0.0));
    }
    Ok(lg.exp())
}

/// `1 / Γ(z)`, entire: exactly zero at the poles of `Γ` and smooth through them.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // 1/Γ(z) = sin(πz) Γ(1 - z) / π
        let g = Complex64::exp(lanczos_log(Complex64::new(1.0, 0.0) - z));
        return sin_pi(z) * g / PI;
    }
    Complex64::exp(-lanczos_log(z))
}

fn log_gamma_upper(z: Complex64) -> Complex64 {
    debug_assert!(z.im >= 0.0);
    if z.re >= 0.5 {
        return lanczos_log(z);
    }
    // log Γ(z) = ln π - log sin(πz) - log Γ(1 - z), with the logarithm of
    // sin(πz) continued analytically through the upper half-plane:
    //   log sin(πz) = -ln 2 + iπ(1/2 - z) + log(1 - e^{2πiz}).
    // |e^{2πiz}| <= 1 there, so the last log stays on its principal sheet.
    let one = Complex64::new(1.0, 0.0);
    let w = Complex64::new(0.0, 2.0 * PI) * z;
    let log_sin = Complex64::new(-std::f64::consts::LN_2, 0.0)
        + Complex64::new(0.0, PI) * (Complex64::new(0.5, 0.0) - z)
        + (one - w.exp()).ln();
    Complex64::new(LN_PI, 0.0) - log_sin - lanczos_log(one - z)
}

/// Lanczos series for `log Γ(z)`, valid for `Re z >= 1/2`.
fn lanczos_log(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + series.ln()
}

/// `sin(πz)` with the real part reduced modulo 2 first, so that integer
/// arguments give exact zeros.
pub(crate) fn sin_pi(z: Complex64) -> Complex64 {
    let re = z.re.rem_euclid(2.0);
    let (s, c) = (PI * re).sin_cos();
    let s = if re == 1.0 { 0.0 } else { s };
    let y = PI * z.im;
    Complex64::new(s * y.cosh(), c * y.sinh())
}
