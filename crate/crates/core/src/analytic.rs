//! Exact scattering amplitudes of the Scarf II potential.
//!
//! ```text
//!            Γ(-A-ik) Γ(1+A-ik) Γ(1/2+iB-ik) Γ(1/2-iB-ik)
//! t_{A,B} = ---------------------------------------------
//!                  Γ(-ik) Γ(1-ik) Γ²(1/2-ik)
//!
//! r_{A,B} = t_{A,B} f_{A,B},
//! f_{A,B} = cos πA sinh πB / cosh πk + i sin πA cosh πB / sinh πk
//! ```
//!
//! Side convention, used everywhere in the crate: a wave incident from the
//! left sees `(A, B)`, a wave incident from the right sees `(A, -B)`.
//! Transmission is the same from both sides.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::AnalyticError;
use crate::gamma::{log_gamma, nearest_pole, recip_gamma};
use crate::params::{Extended, ScarfParams};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// The four parameter-dependent Gamma factors in the numerator of `t(k)`.
/// Each has the form `Γ(z0 - ik)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NumeratorFactor {
    /// `Γ(-A - ik)`
    MinusA,
    /// `Γ(1 + A - ik)`
    OnePlusA,
    /// `Γ(1/2 + iB - ik)`
    HalfPlusIB,
    /// `Γ(1/2 - iB - ik)`
    HalfMinusIB,
}

impl NumeratorFactor {
    pub const ALL: [NumeratorFactor; 4] = [
        NumeratorFactor::MinusA,
        NumeratorFactor::OnePlusA,
        NumeratorFactor::HalfPlusIB,
        NumeratorFactor::HalfMinusIB,
    ];

    /// `z0` such that the factor is `Γ(z0 - ik)`.
    pub fn offset(self, params: &ScarfParams) -> Complex64 {
        let half = Complex64::new(0.5, 0.0);
        match self {
            NumeratorFactor::MinusA => -params.a,
            NumeratorFactor::OnePlusA => 1.0 + params.a,
            NumeratorFactor::HalfPlusIB => half + I * params.b,
            NumeratorFactor::HalfMinusIB => half - I * params.b,
        }
    }
}

fn numerator_args(params: &ScarfParams, k: Complex64) -> [(NumeratorFactor, Complex64); 4] {
    NumeratorFactor::ALL.map(|f| (f, f.offset(params) - I * k))
}

fn denominator_args(k: Complex64) -> [Complex64; 4] {
    let ik = I * k;
    [-ik, 1.0 - ik, 0.5 - ik, 0.5 - ik]
}

/// `t_{A,B}(k)` for complex `k`, evaluated as a single exponential of a sum
/// of log-Gammas.
///
/// A numerator factor at a pole gives [`AnalyticError::PoleOfT`]; this is how
/// spectral singularities and bound states show up. At `k = 0` the result is
/// the generic low-energy limit `t = 0` (the `Γ(-ik)` pole in the denominator).
pub fn transmission_amplitude(params: &ScarfParams, k: Complex64) -> Result<Complex64, AnalyticError> {
    if !(k.re.is_finite() && k.im.is_finite()) {
        return Err(AnalyticError::NonFiniteParameter(k));
    }
    let num = numerator_args(params, k);
    for (factor, z) in num {
        if nearest_pole(z).is_some() {
            return Err(AnalyticError::PoleOfT { k, factor });
        }
    }
    let mut log_t = Complex64::new(0.0, 0.0);
    for (_, z) in num {
        log_t += log_gamma(z)?;
    }
    for z in denominator_args(k) {
        if nearest_pole(z).is_some() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        log_t -= log_gamma(z)?;
    }
    Ok(log_t.exp())
}

/// `1 / t(k)`, an analytic function whose zeros are the poles of `t`.
///
/// Numerator Gammas enter through the entire function `1/Γ`, so the zeros
/// come out exactly and the function is smooth through them. Returns `None`
/// where `1/t` itself has a pole (zeros of `t`, from the denominator Gammas).
pub fn inverse_transmission(params: &ScarfParams, k: Complex64) -> Option<Complex64> {
    let mut log_g = Complex64::new(0.0, 0.0);
    for z in denominator_args(k) {
        log_g += log_gamma(z).ok()?;
    }
    let mut scale = Complex64::new(1.0, 0.0);
    for (_, z) in numerator_args(params, k) {
        // Near a pole of Γ the reciprocal is small and is multiplied in
        // directly; elsewhere it stays in log space.
        let near = z.re < 0.5 && (z.re - z.re.round()).hypot(z.im) < 0.25;
        if near {
            scale *= recip_gamma(z);
        } else {
            log_g -= log_gamma(z).ok()?;
        }
    }
    let g = log_g.exp() * scale;
    (g.re.is_finite() && g.im.is_finite()).then_some(g)
}

/// `f_{A,B}(k)` for the left side and `f_{A,-B}(k)` for the right side.
/// Any real `k != 0` is accepted; negative `k` is the time-reversed reading.
pub fn f_factor(params: &ScarfParams, k: f64, side: Side) -> Result<Complex64, AnalyticError> {
    if k == 0.0 || !k.is_finite() {
        return Err(AnalyticError::InvalidWavenumber(k));
    }
    let b = match side {
        Side::Left => params.b,
        Side::Right => -params.b,
    };
    let pa = PI * params.a;
    let pb = PI * b;
    let pk = PI * k;
    Ok(pa.cos() * pb.sinh() / pk.cosh() + I * pa.sin() * pb.cosh() / pk.sinh())
}

/// All coherent-scattering observables at one real wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringResult {
    pub k: f64,
    pub t: Extended<Complex64>,
    pub r_left: Extended<Complex64>,
    pub r_right: Extended<Complex64>,
    /// `T = |t|²`
    pub transmission: Extended<f64>,
    pub reflection_left: Extended<f64>,
    pub reflection_right: Extended<f64>,
    /// `|det S| = |t² - r_left r_right|`, evaluated as `|t(k) / t(-k)|`.
    pub det_s_abs: Extended<f64>,
}

/// Assembles `t`, `r_left`, `r_right` and the derived probabilities at a real
/// `k != 0`. A pole of `t` is reported through infinite flags.
pub fn scattering_coefficients(params: &ScarfParams, k: f64) -> Result<ScatteringResult, AnalyticError> {
    let f_left = f_factor(params, k, Side::Left)?;
    let f_right = f_factor(params, k, Side::Right)?;
    let t = match transmission_amplitude(params, Complex64::new(k, 0.0)) {
        Ok(t) => t,
        Err(AnalyticError::PoleOfT { .. }) => {
            return Ok(ScatteringResult {
                k,
                t: Extended::Infinite,
                r_left: Extended::Infinite,
                r_right: Extended::Infinite,
                transmission: Extended::Infinite,
                reflection_left: Extended::Infinite,
                reflection_right: Extended::Infinite,
                det_s_abs: Extended::Infinite,
            })
        }
        Err(e) => return Err(e),
    };
    let r_left = t * f_left;
    let r_right = t * f_right;
    // det S = t(k)/t(-k) is the same quantity as t² - r_l r_r, but the direct
    // difference cancels catastrophically next to a real pole, where |t| is
    // huge while |det S| stays of order one.
    let det_s_abs = match transmission_amplitude(params, Complex64::new(-k, 0.0)) {
        Ok(t_mirror) => (t / t_mirror).norm(),
        Err(AnalyticError::PoleOfT { .. }) => 0.0,
        Err(e) => return Err(e),
    };
    Ok(ScatteringResult {
        k,
        t: Extended::Finite(t),
        r_left: Extended::Finite(r_left),
        r_right: Extended::Finite(r_right),
        transmission: Extended::Finite(t.norm_sqr()),
        reflection_left: Extended::Finite(r_left.norm_sqr()),
        reflection_right: Extended::Finite(r_right.norm_sqr()),
        det_s_abs: Extended::Finite(det_s_abs),
    })
}

/// Real wavenumbers at which one side's reflection amplitude vanishes.
///
/// Values are signed: a positive entry is a reflectivity zero for incidence
/// with `k > 0`, a negative one lives in the time-reversed setting.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReflectionZeros {
    pub left: Option<f64>,
    pub right: Option<f64>,
}

impl ReflectionZeros {
    pub fn get(&self, side: Side) -> Option<f64> {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }
}

/// Relative size of the imaginary part of `tanh πk_z` tolerated as roundoff.
const REAL_ARGUMENT_TOL: f64 = 1e-12;

/// Zeros of `f` on the real `k` axis.
///
/// `f = 0` is equivalent to `tanh πk = -i tan πA coth πB` (with `B -> -B` on
/// the right). A real zero exists when that argument is real and lies inside
/// `(-1, 1)`; otherwise the side has none.
pub fn reflection_zero_general(params: &ScarfParams) -> ReflectionZeros {
    let zero_for = |b: Complex64| -> Option<f64> {
        let pa = PI * params.a;
        let pb = PI * b;
        let den = pa.cos() * pb.sinh();
        if den.norm() == 0.0 {
            return None;
        }
        let w = -I * pa.sin() * pb.cosh() / den;
        if !(w.re.is_finite() && w.im.is_finite()) {
            return None;
        }
        if w.im.abs() > REAL_ARGUMENT_TOL * w.norm().max(1.0) {
            return None;
        }
        if w.re == 0.0 || w.re.abs() >= 1.0 {
            return None;
        }
        Some(w.re.atanh() / PI)
    };
    ReflectionZeros {
        left: zero_for(params.b),
        right: zero_for(-params.b),
    }
}

/// A pole of `t(k)` from a numerator factor, in closed form:
/// `Γ(z0 - ik)` diverges at `k = -i(z0 + n)`, `n = 0, 1, ...`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticPole {
    pub k: Complex64,
    pub factor: NumeratorFactor,
    pub n: u64,
}

/// Every numerator pole with `Im k >= im_min`, sorted by `(Re k, Im k)`.
///
/// Upper half-plane poles of `t` are exactly these, since the denominator
/// Gammas only have poles on the closed negative imaginary axis.
pub fn transmission_poles(params: &ScarfParams, im_min: f64) -> Vec<AnalyticPole> {
    let mut out = Vec::new();
    for factor in NumeratorFactor::ALL {
        let z0 = factor.offset(params);
        // Im k = -Re z0 - n
        let n_max = (-z0.re - im_min).floor();
        if n_max < 0.0 {
            continue;
        }
        for n in 0..=(n_max as u64) {
            let k = -I * (z0 + n as f64);
            out.push(AnalyticPole { k, factor, n });
        }
    }
    out.sort_by(|a, b| a.k.re.total_cmp(&b.k.re).then(a.k.im.total_cmp(&b.k.im)));
    out
}

/// Real `k != 0` of either sign at which `t` has a pole. Negative entries are
/// spectral singularities of the time-reversed potential.
pub fn real_poles(params: &ScarfParams, tol: f64) -> Vec<f64> {
    let mut ks: Vec<f64> = transmission_poles(params, -tol)
        .into_iter()
        .filter(|p| p.k.im.abs() <= tol && p.k.re.abs() > tol)
        .map(|p| p.k.re)
        .collect();
    ks.sort_by(f64::total_cmp);
    ks.dedup_by(|a, b| (*a - *b).abs() <= tol);
    ks
}

/// Positive real `k` at which `t` has a pole: the spectral singularities.
pub fn spectral_singularities(params: &ScarfParams, tol: f64) -> Vec<f64> {
    real_poles(params, tol).into_iter().filter(|&k| k > 0.0).collect()
}
