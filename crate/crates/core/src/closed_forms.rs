//! Closed-form transmission, reflection factors and `|det S|` for the four
//! special parameter families, where the Gamma functions cancel pairwise.
//!
//! | family | `A`               | `B`        |
//! |--------|-------------------|------------|
//! | P1     | `-ic`             | `d + i/2`  |
//! | P2     | `1 - ic`          | `c - i/2`  |
//! | P3     | `q + 1/2 - ic`    | `c - iq`   |
//! | P4     | `-ic`             | `id`       |
//!
//! The `cosh²πk - cosh²πc` denominators are evaluated as
//! `sinh π(k-c) sinh π(k+c)`, which turns the removable `0/0` at `k = -c`
//! into a smooth `(k+c) / sinh π(k+c)` factor.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::analytic::Side;
use crate::error::ClosedFormError;
use crate::params::{Extended, ScarfParams};

/// Closed forms refuse to evaluate this close to one of their poles.
pub const POLE_GUARD: f64 = 1e-8;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Parameterization {
    P1 {
        c: f64,
        d: f64,
    },
    P2 {
        c: f64,
    },
    /// Splitting family; `q = 1/2` is P2 and `q = -1/2` is P1 with `d = c`.
    P3 {
        c: f64,
        q: f64,
    },
    P4 {
        c: f64,
        d: f64,
    },
    Raw(ScarfParams),
}

impl Parameterization {
    pub fn tag(&self) -> &'static str {
        match self {
            Parameterization::P1 { .. } => "P1",
            Parameterization::P2 { .. } => "P2",
            Parameterization::P3 { .. } => "P3",
            Parameterization::P4 { .. } => "P4",
            Parameterization::Raw(_) => "Raw",
        }
    }

    fn validate(&self) -> Result<(), ClosedFormError> {
        let finite = |vals: &[f64]| {
            if vals.iter().all(|v| v.is_finite()) {
                Ok(())
            } else {
                Err(ClosedFormError::ConstraintViolation(format!(
                    "{} parameters must be finite",
                    self.tag()
                )))
            }
        };
        match *self {
            Parameterization::P1 { c, d } => finite(&[c, d]),
            Parameterization::P2 { c } => finite(&[c]),
            Parameterization::P3 { c, q } => {
                finite(&[c, q])?;
                if c <= 0.0 || q < -0.5 {
                    return Err(ClosedFormError::ConstraintViolation(format!(
                        "P3 requires c > 0 and q >= -1/2 (got c = {c}, q = {q})"
                    )));
                }
                Ok(())
            }
            Parameterization::P4 { c, d } => {
                finite(&[c, d])?;
                if c <= 0.0 || d <= 0.0 {
                    return Err(ClosedFormError::ConstraintViolation(format!(
                        "P4 requires c > 0 and d > 0 (got c = {c}, d = {d})"
                    )));
                }
                Ok(())
            }
            Parameterization::Raw(p) => finite(&[p.a.re, p.a.im, p.b.re, p.b.im]),
        }
    }

    /// The `(A, B)` pair of this family.
    pub fn to_scarf_params(&self) -> Result<ScarfParams, ClosedFormError> {
        self.validate()?;
        let cx = Complex64::new;
        Ok(match *self {
            Parameterization::P1 { c, d } => ScarfParams {
                a: cx(0.0, -c),
                b: cx(d, 0.5),
            },
            Parameterization::P2 { c } => ScarfParams {
                a: cx(1.0, -c),
                b: cx(c, -0.5),
            },
            Parameterization::P3 { c, q } => ScarfParams {
                a: cx(q + 0.5, -c),
                b: cx(c, -q),
            },
            Parameterization::P4 { c, d } => ScarfParams {
                a: cx(0.0, -c),
                b: cx(0.0, d),
            },
            Parameterization::Raw(p) => p,
        })
    }

    /// Real `k` at which the closed-form `T(k)` is infinite.
    pub fn closed_poles(&self) -> Result<Vec<f64>, ClosedFormError> {
        self.validate()?;
        match *self {
            Parameterization::P1 { c, d } => Ok(vec![c, d]),
            Parameterization::P2 { c } => Ok(vec![c, -c]),
            Parameterization::P4 { c, .. } => Ok(vec![c]),
            _ => Err(ClosedFormError::UnsupportedTag(self.tag())),
        }
    }
}

/// `x / sinh(πx)`, continuous through `x = 0`.
fn x_over_sinh(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let px = PI * x;
        (1.0 - px * px / 6.0) / PI
    } else {
        x / (PI * x).sinh()
    }
}

fn near(k: f64, pole: f64) -> bool {
    (k - pole).abs() < POLE_GUARD
}

fn check_k(k: f64) -> Result<(), ClosedFormError> {
    if k == 0.0 || !k.is_finite() {
        Err(ClosedFormError::InvalidWavenumber(k))
    } else {
        Ok(())
    }
}

/// Closed-form transmission probability `T(k)` for P1, P2, P4. Negative `k`
/// gives the time-reversed `T(-|k|)`.
pub fn closed_t(p: &Parameterization, k: f64) -> Result<Extended<f64>, ClosedFormError> {
    check_k(k)?;
    let poles = p.closed_poles()?;
    if poles.iter().any(|&pole| near(k, pole)) {
        return Ok(Extended::Infinite);
    }
    let (sk, ck) = ((PI * k).sinh(), (PI * k).cosh());
    // sinh πk / ((k - a) sinh π(k - a))
    let singular = |a: f64| sk / ((k - a) * (PI * (k - a)).sinh());
    let value = match *p {
        Parameterization::P1 { c, d } => singular(c) * ck * x_over_sinh(k + c) * singular(d) * ck * x_over_sinh(k + d),
        Parameterization::P2 { c } => {
            let ratio = (1.0 + (k + c).powi(2)) / (1.0 + (k - c).powi(2));
            let s = sk / (PI * (k - c)).sinh() * ck / (PI * (k + c)).sinh();
            ratio * s * s
        }
        Parameterization::P4 { c, d } => {
            let cd = (PI * d).cos();
            singular(c) * ck * x_over_sinh(k + c) * sk * ck / (sk * sk + cd * cd)
        }
        _ => unreachable!("closed_poles rejects other tags"),
    };
    Ok(Extended::Finite(value.abs()))
}

/// Closed-form reflection factor `F_side(k)`, with `r_side = t F_side`.
pub fn closed_f(p: &Parameterization, k: f64, side: Side) -> Result<Complex64, ClosedFormError> {
    check_k(k)?;
    p.validate()?;
    let sign = match side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    };
    let (sk, ck) = ((PI * k).sinh(), (PI * k).cosh());
    match *p {
        Parameterization::P1 { c, d } => {
            let even = (PI * c).cosh() * (PI * d).cosh() / ck;
            let odd = (PI * c).sinh() * (PI * d).sinh() / sk;
            Ok(I * (sign * even + odd))
        }
        Parameterization::P2 { c } => {
            let even = (PI * c).cosh().powi(2) / ck;
            let odd = (PI * c).sinh().powi(2) / sk;
            Ok(I * (sign * even + odd))
        }
        Parameterization::P4 { c, d } => {
            let re = (PI * c).sinh() * (PI * d).cos() / sk;
            let im = (PI * c).cosh() * (PI * d).sin() / ck;
            Ok(Complex64::new(re, sign * im))
        }
        _ => Err(ClosedFormError::UnsupportedTag(p.tag())),
    }
}

/// Closed-form `|det S(k)|` for P1, P2, P4; any real `k`, negative values
/// being the time-reversed reading.
pub fn closed_det_s(p: &Parameterization, k: f64) -> Result<Extended<f64>, ClosedFormError> {
    if !k.is_finite() {
        return Err(ClosedFormError::InvalidWavenumber(k));
    }
    p.validate()?;
    match *p {
        Parameterization::P1 { c, d } => {
            if near(k, c) || near(k, d) {
                return Ok(Extended::Infinite);
            }
            Ok(Extended::Finite(((k + c) * (k + d) / ((k - c) * (k - d))).abs()))
        }
        Parameterization::P2 { c } => Ok(Extended::Finite((1.0 + (k + c).powi(2)) / (1.0 + (k - c).powi(2)))),
        Parameterization::P4 { c, .. } => {
            if near(k, c) {
                return Ok(Extended::Infinite);
            }
            Ok(Extended::Finite(((k + c) / (k - c)).abs()))
        }
        _ => Err(ClosedFormError::UnsupportedTag(p.tag())),
    }
}

/// A positive reflectivity zero and the side whose reflection vanishes there.
/// The mirror value `-k` is a zero of the opposite side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedZero {
    pub k: f64,
    pub side: Side,
}

/// Closed-form reflectivity zero: `tanh πk_z = tanh πc tanh πd` (P1) or
/// `tanh² πc` (P2). P4 has none on the real axis.
pub fn closed_kz(p: &Parameterization) -> Result<Option<ClosedZero>, ClosedFormError> {
    p.validate()?;
    // Left zero at tanh πk = -w, right zero at tanh πk = +w.
    let w = match *p {
        Parameterization::P1 { c, d } => (PI * c).tanh() * (PI * d).tanh(),
        Parameterization::P2 { c } => (PI * c).tanh().powi(2),
        Parameterization::P4 { .. } => return Ok(None),
        _ => return Err(ClosedFormError::UnsupportedTag(p.tag())),
    };
    if w == 0.0 || w.abs() >= 1.0 {
        return Ok(None);
    }
    let k = w.abs().atanh() / PI;
    let side = if w > 0.0 { Side::Right } else { Side::Left };
    Ok(Some(ClosedZero { k, side }))
}

/// Poles of `t(k)` in the upper half-plane for P3:
/// pairs `±c + i(q - 1/2 - n)` for `n = 0 ..= ⌊q - 1/2⌋`, listed as
/// `[-c + iy, c + iy]`, followed by the unpaired `c + i(q + 1/2)`.
pub fn p3_analytic_poles(c: f64, q: f64) -> Result<Vec<Complex64>, ClosedFormError> {
    if !(c > 0.0 && q >= 0.5 && c.is_finite() && q.is_finite()) {
        return Err(ClosedFormError::ConstraintViolation(format!(
            "P3 poles require c > 0 and q >= 1/2 (got c = {c}, q = {q})"
        )));
    }
    let mut out = Vec::new();
    let n_max = (q - 0.5 + 1e-12).floor() as u64;
    for n in 0..=n_max {
        let y = (q - 0.5 - n as f64).max(0.0);
        out.push(Complex64::new(-c, y));
        out.push(Complex64::new(c, y));
    }
    out.push(Complex64::new(c, q + 0.5));
    Ok(out)
}

/// One negative-energy level of P4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundLevel {
    pub n: u32,
    /// `κ_n = d - 1/2 - n > 0`; the pole sits at `k = iκ_n`.
    pub kappa: f64,
    /// `E_n = -κ_n²`
    pub energy: f64,
}

/// Real discrete spectrum of P4: `E_n = -(d - 1/2 - n)²` while `κ_n > 0`.
pub fn p4_bound_states(c: f64, d: f64) -> Result<Vec<BoundLevel>, ClosedFormError> {
    if !(c > 0.0 && c.is_finite() && d.is_finite()) {
        return Err(ClosedFormError::ConstraintViolation(format!(
            "P4 bound states require c > 0 (got c = {c}, d = {d})"
        )));
    }
    let mut out = Vec::new();
    let mut n = 0u32;
    loop {
        let kappa = d - 0.5 - n as f64;
        if kappa <= 1e-12 {
            break;
        }
        out.push(BoundLevel {
            n,
            kappa,
            energy: -kappa * kappa,
        });
        n += 1;
    }
    Ok(out)
}
