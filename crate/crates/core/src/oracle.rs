//! Direct numerical integration of `-ψ'' + V(x) ψ = k² ψ`.
//!
//! Nothing here touches the Gamma-function formulas: the amplitudes come from
//! integrating the ODE across `[-L, L]` and matching to plane waves, which
//! makes this module the reference the analytic results are checked against.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::OracleError;
use crate::params::ScarfParams;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Tail criterion: `|V(±L)| <= ASYMPTOTIC_RATIO * k²`.
pub const ASYMPTOTIC_RATIO: f64 = 1e-9;
/// Largest tolerated step-halving estimate.
pub const MAX_STEP_ERROR: f64 = 1e-4;
/// Hard cap on the half-width reached by automatic domain extension.
pub const MAX_HALF_WIDTH: f64 = 80.0;
/// Tail size aimed for when the domain is extended. Much smaller than the
/// validity limit, since the truncated tail feeds straight into small
/// reflection amplitudes.
pub const TAIL_TARGET: f64 = 1e-12;

/// A potential that can be sampled on the real line.
pub trait Potential: Sync {
    fn value(&self, x: f64) -> Complex64;
}

impl Potential for ScarfParams {
    fn value(&self, x: f64) -> Complex64 {
        self.potential(x)
    }
}

/// Adapter for potentials given as closures.
pub struct FnPotential<F>(pub F);

impl<F: Fn(f64) -> Complex64 + Sync> Potential for FnPotential<F> {
    fn value(&self, x: f64) -> Complex64 {
        (self.0)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Classical fixed-step fourth-order Runge–Kutta.
    Rk4,
    /// Dormand–Prince 5(4) with adaptive step size.
    Rk45,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Half-width `L` of the integration domain `[-L, L]`.
    pub half_width: f64,
    /// Fixed-step count across `[-L, L]` for [`Method::Rk4`].
    pub n_steps: usize,
    pub method: Method,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Grow `L` (at constant step size) until the tail criterion holds,
    /// instead of failing with [`OracleError::AsymptoticsInvalid`].
    pub extend_domain: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            half_width: 16.0,
            n_steps: 40_000,
            method: Method::Rk4,
            abs_tol: 1e-11,
            rel_tol: 1e-11,
            extend_domain: true,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<(), OracleError> {
        if !(self.half_width >= 12.0 && self.half_width.is_finite()) {
            return Err(OracleError::InvalidInput(format!(
                "half-width must be at least 12 (got {})",
                self.half_width
            )));
        }
        if self.method == Method::Rk4 && self.n_steps < 2000 {
            return Err(OracleError::InvalidInput(format!(
                "fixed-step integration needs at least 2000 steps (got {})",
                self.n_steps
            )));
        }
        if self.method == Method::Rk45 && !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(OracleError::InvalidInput("adaptive tolerances must be positive".into()));
        }
        Ok(())
    }

    /// Resolves the domain for a given energy scale `|k²|`: returns the
    /// half-width actually used and the matching step count.
    fn domain<P: Potential + ?Sized>(&self, pot: &P, scale: f64) -> Result<(f64, usize), OracleError> {
        let tail = |l: f64| pot.value(l).norm().max(pot.value(-l).norm());
        let limit = ASYMPTOTIC_RATIO * scale;
        let mut l = self.half_width;
        if self.extend_domain {
            let target = limit.min(TAIL_TARGET);
            while tail(l) > target && l < MAX_HALF_WIDTH {
                l += 0.5;
            }
        }
        if tail(l) > limit {
            return Err(OracleError::AsymptoticsInvalid {
                half_width: l,
                magnitude: tail(l),
                k_squared: scale,
            });
        }
        let n = (self.n_steps as f64 * l / self.half_width).ceil() as usize;
        Ok((l, n))
    }
}

/// Numerically integrated amplitudes at one `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub k: f64,
    /// Transmission for incidence from the left.
    pub t: Complex64,
    /// Transmission for incidence from the right; equal to `t` up to the
    /// integration error.
    pub t_right: Complex64,
    pub r_left: Complex64,
    pub r_right: Complex64,
    /// Step-halving estimate, `max |Δ|` over the amplitudes divided by
    /// `max(1, |t|, |r_left|, |r_right|)`.
    pub est_error: f64,
    /// Half-width actually integrated over.
    pub half_width: f64,
}

impl OracleResult {
    pub fn transmission(&self) -> f64 {
        self.t.norm_sqr()
    }

    pub fn reflection_left(&self) -> f64 {
        self.r_left.norm_sqr()
    }

    pub fn reflection_right(&self) -> f64 {
        self.r_right.norm_sqr()
    }

    /// `|t² - r_left r_right|`
    pub fn det_s_abs(&self) -> f64 {
        (self.t * self.t - self.r_left * self.r_right).norm()
    }
}

type State = [Complex64; 2];

fn rhs<P: Potential + ?Sized>(pot: &P, energy: Complex64, x: f64, y: &State) -> State {
    [y[1], (pot.value(x) - energy) * y[0]]
}

fn axpy(y: &State, h: f64, k: &State) -> State {
    [y[0] + k[0] * h, y[1] + k[1] * h]
}

/// Fixed-step RK4 from `x0` to `x1`.
fn rk4<P: Potential + ?Sized>(pot: &P, energy: Complex64, x0: f64, x1: f64, y0: State, n: usize) -> State {
    let h = (x1 - x0) / n as f64;
    let mut y = y0;
    let mut v0 = pot.value(x0);
    for i in 0..n {
        let x = x0 + h * i as f64;
        let vm = pot.value(x + 0.5 * h);
        let v1 = pot.value(x + h);
        let f = |v: Complex64, y: &State| -> State { [y[1], (v - energy) * y[0]] };
        let k1 = f(v0, &y);
        let k2 = f(vm, &axpy(&y, 0.5 * h, &k1));
        let k3 = f(vm, &axpy(&y, 0.5 * h, &k2));
        let k4 = f(v1, &axpy(&y, h, &k3));
        for j in 0..2 {
            y[j] += (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) * (h / 6.0);
        }
        v0 = v1;
    }
    y
}

// Dormand–Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive Dormand–Prince from `x0` to `x1`.
fn rk45<P: Potential + ?Sized>(
    pot: &P,
    energy: Complex64,
    x0: f64,
    x1: f64,
    y0: State,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<State, OracleError> {
    let span = x1 - x0;
    let dir = span.signum();
    let mut h = dir * 1e-2;
    let mut x = x0;
    let mut y = y0;
    let mut steps = 0usize;
    while (x1 - x) * dir > 0.0 {
        if (x + h - x1) * dir > 0.0 {
            h = x1 - x;
        }
        let mut k = [[Complex64::new(0.0, 0.0); 2]; 7];
        for s in 0..7 {
            let mut ys = y;
            for (j, a) in DP_A[s].iter().enumerate().take(s) {
                ys = axpy(&ys, h * a, &k[j]);
            }
            k[s] = rhs(pot, energy, x + DP_C[s] * h, &ys);
        }
        let mut y5 = y;
        let mut y4 = y;
        for s in 0..7 {
            y5 = axpy(&y5, h * DP_B5[s], &k[s]);
            y4 = axpy(&y4, h * DP_B4[s], &k[s]);
        }
        let mut err: f64 = 0.0;
        for j in 0..2 {
            let scale = abs_tol + rel_tol * y[j].norm().max(y5[j].norm());
            err = err.max((y5[j] - y4[j]).norm() / scale);
        }
        if err <= 1.0 {
            x += h;
            y = y5;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        steps += 1;
        if steps > 10_000_000 || h.abs() < 1e-14 {
            return Err(OracleError::StepError {
                estimate: err,
                limit: 1.0,
            });
        }
    }
    Ok(y)
}

#[derive(Debug, Clone, Copy)]
enum Resolution {
    Steps(usize),
    Tolerance(f64, f64),
}

fn propagate<P: Potential + ?Sized>(
    pot: &P,
    energy: Complex64,
    x0: f64,
    x1: f64,
    y0: State,
    res: Resolution,
) -> Result<State, OracleError> {
    match res {
        Resolution::Steps(n) => Ok(rk4(pot, energy, x0, x1, y0, n)),
        Resolution::Tolerance(a, r) => rk45(pot, energy, x0, x1, y0, a, r),
    }
}

/// Amplitudes for both incidences at a given resolution:
/// `(t_left, r_left, t_right, r_right)`.
fn amplitudes<P: Potential + ?Sized>(pot: &P, k: f64, l: f64, res: Resolution) -> Result<[Complex64; 4], OracleError> {
    let energy = Complex64::new(k * k, 0.0);
    let ik = I * k;
    let plane = |x: f64| (ik * x).exp();

    // Incident from the left: ψ = t e^{ikx} for x > L.
    let start = [plane(l), ik * plane(l)];
    let [psi, dpsi] = propagate(pot, energy, l, -l, start, res)?;
    let a = (ik * psi + dpsi) * plane(l) / (2.0 * ik);
    let b = (ik * psi - dpsi) / plane(l) / (2.0 * ik);
    let (t_left, r_left) = (1.0 / a, b / a);

    // Incident from the right: ψ = t e^{-ikx} for x < -L.
    let start = [1.0 / plane(-l), -ik / plane(-l)];
    let [psi, dpsi] = propagate(pot, energy, -l, l, start, res)?;
    let a = (ik * psi + dpsi) / plane(l) / (2.0 * ik);
    let b = (ik * psi - dpsi) * plane(l) / (2.0 * ik);
    let (t_right, r_right) = (1.0 / b, a / b);

    Ok([t_left, r_left, t_right, r_right])
}

/// Left transmission amplitude from a single fixed-step integration over
/// `[-half_width, half_width]` with `n_steps` steps. No tail check, no error
/// estimate; for convergence studies.
pub fn transmission_at_resolution<P: Potential + ?Sized>(
    pot: &P,
    k: f64,
    half_width: f64,
    n_steps: usize,
) -> Complex64 {
    let energy = Complex64::new(k * k, 0.0);
    let ik = I * k;
    let start = [(ik * half_width).exp(), ik * (ik * half_width).exp()];
    let [psi, dpsi] = rk4(pot, energy, half_width, -half_width, start, n_steps);
    let a = (ik * psi + dpsi) * (ik * half_width).exp() / (2.0 * ik);
    1.0 / a
}

/// `t`, `r_left`, `r_right` at `k > 0` by direct integration.
///
/// Two runs are made (step count doubled, or tolerances divided by 32 for
/// the adaptive method) and their difference is `est_error`. Fixed-step
/// amplitudes are Richardson-extrapolated from the pair; adaptive ones are
/// taken from the finer run.
pub fn numerical_scatter<P: Potential + ?Sized>(
    pot: &P,
    k: f64,
    cfg: &OracleConfig,
) -> Result<OracleResult, OracleError> {
    cfg.validate()?;
    if !(k >= 0.05 && k.is_finite()) {
        return Err(OracleError::InvalidInput(format!(
            "oracle needs k >= 0.05 for plane-wave asymptotics (got {k})"
        )));
    }
    let (l, n) = cfg.domain(pot, k * k)?;
    let (coarse, fine) = match cfg.method {
        Method::Rk4 => (Resolution::Steps(n), Resolution::Steps(2 * n)),
        Method::Rk45 => (
            Resolution::Tolerance(cfg.abs_tol, cfg.rel_tol),
            Resolution::Tolerance(cfg.abs_tol / 32.0, cfg.rel_tol / 32.0),
        ),
    };
    let c = amplitudes(pot, k, l, coarse)?;
    let mut f = amplitudes(pot, k, l, fine)?;
    let scale = f.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let est_error = c.iter().zip(&f).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
    if cfg.method == Method::Rk4 {
        // Richardson: the leading h⁴ error cancels between the two runs.
        for (fi, ci) in f.iter_mut().zip(&c) {
            *fi += (*fi - ci) / 15.0;
        }
    }
    if !est_error.is_finite() || est_error > MAX_STEP_ERROR {
        return Err(OracleError::StepError {
            estimate: est_error,
            limit: MAX_STEP_ERROR,
        });
    }
    Ok(OracleResult {
        k,
        t: f[0],
        r_left: f[1],
        t_right: f[2],
        r_right: f[3],
        est_error,
        half_width: l,
    })
}

/// Oracle counterpart of the analytic observables at a signed `k`.
///
/// Negative `k` is the time-reversed reading: the integration runs on
/// `conj V` at `|k|`, whose `|t|²`, `|r_left|²`, `|r_right|²` and `|det S|`
/// equal the analytic continuation of the original ones to `-|k|`.
pub fn numerical_scatter_signed(params: &ScarfParams, k: f64, cfg: &OracleConfig) -> Result<OracleResult, OracleError> {
    if k < 0.0 {
        let mut r = numerical_scatter(&params.time_reversed(), -k, cfg)?;
        r.k = k;
        Ok(r)
    } else {
        numerical_scatter(params, k, cfg)
    }
}

/// `(k, |t² - r_left r_right|)` over a grid of `k > 0`, integrated in parallel.
pub fn det_s_profile<P: Potential + ?Sized>(
    pot: &P,
    k_grid: &[f64],
    cfg: &OracleConfig,
) -> Result<Vec<(f64, f64)>, OracleError> {
    k_grid
        .par_iter()
        .map(|&k| numerical_scatter(pot, k, cfg).map(|r| (k, r.det_s_abs())))
        .collect()
}

/// Mismatch of the two decaying solutions at `x = 0` for a trial energy
/// `E < 0`.
///
/// The solutions `e^{-κ|x|}` are integrated inward from `±L`; the returned
/// value is `|W| / (κ |u| |v|)` with `u = (ψ, ψ'/κ)` for each side, i.e. the
/// sine of the angle between the two Cauchy data. It vanishes at an
/// eigenvalue.
pub fn verify_bound_state<P: Potential + ?Sized>(pot: &P, energy: f64, cfg: &OracleConfig) -> Result<f64, OracleError> {
    cfg.validate()?;
    if !(energy < 0.0 && energy.is_finite()) {
        return Err(OracleError::InvalidInput(format!(
            "bound-state energy must be negative (got {energy})"
        )));
    }
    let kappa = (-energy).sqrt();
    let (l, n) = cfg.domain(pot, -energy)?;
    let e = Complex64::new(energy, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let half = (n / 2).max(1);
    let inward = |from: f64, slope: f64| -> Result<State, OracleError> {
        // Split into chunks and renormalize; the decaying solution grows
        // like e^{κL} on the way in.
        let chunks = 16;
        let mut y = [one, Complex64::new(slope, 0.0)];
        let mut x = from;
        for c in 0..chunks {
            let x_next = from * (1.0 - (c + 1) as f64 / chunks as f64);
            y = match cfg.method {
                Method::Rk4 => rk4(pot, e, x, x_next, y, half.div_ceil(chunks)),
                Method::Rk45 => rk45(pot, e, x, x_next, y, cfg.abs_tol, cfg.rel_tol)?,
            };
            let norm = y[0].norm().max(y[1].norm());
            y = [y[0] / norm, y[1] / norm];
            x = x_next;
        }
        Ok(y)
    };
    let right = inward(l, -kappa)?;
    let left = inward(-l, kappa)?;
    let wronskian = right[0] * left[1] - right[1] * left[0];
    let size = |y: &State| (y[0].norm_sqr() + y[1].norm_sqr() / (kappa * kappa)).sqrt();
    Ok(wronskian.norm() / (kappa * size(&right) * size(&left)))
}
