//! Complex `k`-plane poles of `t(k)`, found as zeros of `g(k) = 1/t(k)`.
//!
//! The scan evaluates `g` on a grid, seeds Newton's method in every cell
//! where both `Re g` and `Im g` change sign (the zero contours of the real
//! and imaginary parts cross there), refines, deduplicates and classifies.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::analytic::inverse_transmission;
use crate::error::SpectralError;
use crate::params::ScarfParams;

/// `|Im k|` (or `|Re k|`) below this counts as zero for classification.
pub const AXIS_TOL: f64 = 1e-7;
/// Two roots closer than this are the same root.
pub const DEDUP_TOL: f64 = 1e-6;
/// Pairing tolerance for `k₂ ≈ -conj(k₁)` and `k₂ ≈ -k₁`.
pub const PAIR_TOL: f64 = 1e-6;
/// Required `|1/t|` at an accepted root.
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 100;

/// Rectangular window of the complex `k` plane, divided into `nx × ny` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRegion {
    pub kx_min: f64,
    pub kx_max: f64,
    pub ky_min: f64,
    pub ky_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl ScanRegion {
    pub fn new(kx: (f64, f64), ky: (f64, f64), nx: usize, ny: usize) -> Result<Self, SpectralError> {
        let r = Self {
            kx_min: kx.0,
            kx_max: kx.1,
            ky_min: ky.0,
            ky_max: ky.1,
            nx,
            ny,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), SpectralError> {
        let all_finite = [self.kx_min, self.kx_max, self.ky_min, self.ky_max]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite || self.kx_max <= self.kx_min || self.ky_max <= self.ky_min {
            return Err(SpectralError::InvalidRegion(format!(
                "need finite bounds with max > min, got [{}, {}] x [{}, {}]",
                self.kx_min, self.kx_max, self.ky_min, self.ky_max
            )));
        }
        if self.nx < 8 || self.ny < 8 {
            return Err(SpectralError::InvalidRegion(format!(
                "resolution must be at least 8 per axis, got {}x{}",
                self.nx, self.ny
            )));
        }
        Ok(())
    }

    /// Real part of node `i`, `0 <= i <= nx`.
    pub fn kx(&self, i: usize) -> f64 {
        self.kx_min + (i as f64 * (self.kx_max - self.kx_min)) / self.nx as f64
    }

    /// Imaginary part of node `j`, `0 <= j <= ny`.
    pub fn ky(&self, j: usize) -> f64 {
        self.ky_min + (j as f64 * (self.ky_max - self.ky_min)) / self.ny as f64
    }

    fn cell_diagonal(&self) -> f64 {
        let dx = (self.kx_max - self.kx_min) / self.nx as f64;
        let dy = (self.ky_max - self.ky_min) / self.ny as f64;
        dx.hypot(dy)
    }

    fn contains(&self, k: Complex64, margin: f64) -> bool {
        k.re >= self.kx_min - margin
            && k.re <= self.kx_max + margin
            && k.im >= self.ky_min - margin
            && k.im <= self.ky_max + margin
    }
}

/// `1/t` sampled on the nodes of a [`ScanRegion`]. `None` marks nodes where
/// `1/t` itself is singular.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseGrid {
    pub region: ScanRegion,
    /// Row-major, `(ny + 1)` rows of `(nx + 1)` values; row `j` has `Im k = ky(j)`.
    pub values: Vec<Option<Complex64>>,
}

impl InverseGrid {
    pub fn at(&self, i: usize, j: usize) -> Option<Complex64> {
        self.values[j * (self.region.nx + 1) + i]
    }
}

pub fn inverse_t_grid(params: &ScarfParams, region: &ScanRegion) -> Result<InverseGrid, SpectralError> {
    region.validate()?;
    let values = (0..=region.ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            let ky = region.ky(j);
            (0..=region.nx).map(move |i| inverse_transmission(params, Complex64::new(region.kx(i), ky)))
        })
        .collect();
    Ok(InverseGrid {
        region: *region,
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoleClass {
    /// Real `k ≠ 0` whose mirror `-k` is not a pole.
    SpectralSingularity,
    /// Real `k` whose mirror `-k` is also a pole.
    SelfDualPair,
    /// Positive imaginary axis.
    BoundState,
    /// Upper half-plane, paired with a pole at `-conj(k)` (complex-conjugate energies).
    CcpeMember,
    /// Upper half-plane without a `-conj(k)` partner.
    UnpairedComplex,
    /// Lower half-plane.
    Unphysical,
}

impl PoleClass {
    pub fn name(self) -> &'static str {
        match self {
            PoleClass::SpectralSingularity => "SS",
            PoleClass::SelfDualPair => "SelfDualSSPair",
            PoleClass::BoundState => "BoundState",
            PoleClass::CcpeMember => "CCPEMember",
            PoleClass::UnpairedComplex => "UnpairedComplex",
            PoleClass::Unphysical => "Unphysical",
        }
    }

    pub fn is_physical(self) -> bool {
        self != PoleClass::Unphysical
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleRecord {
    pub k: Complex64,
    /// `E = k²`
    pub energy: Complex64,
    pub class: PoleClass,
    /// `|1/t(k)|` at the refined root.
    pub residual: f64,
    /// Index of the paired record in the same list.
    pub partner: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonConvergence {
    pub seed: Complex64,
    /// Last iterate reached, when finite.
    pub last: Option<Complex64>,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleScan {
    pub records: Vec<PoleRecord>,
    pub warnings: Vec<NonConvergence>,
}

impl PoleScan {
    pub fn count(&self, class: PoleClass) -> usize {
        self.records.iter().filter(|r| r.class == class).count()
    }

    pub fn physical(&self) -> impl Iterator<Item = &PoleRecord> {
        self.records.iter().filter(|r| r.class.is_physical())
    }
}

/// Known singularities of `1/t` (zeros of `t`): `k = -in` and `k = -i(n + 1/2)`.
fn inverse_poles_in(region: &ScanRegion, margin: f64) -> Vec<Complex64> {
    let mut out = Vec::new();
    let mut y = 0.0;
    while -y >= region.ky_min - margin {
        let k = Complex64::new(0.0, -y);
        if region.contains(k, margin) {
            out.push(k);
        }
        y += 0.5;
    }
    out
}

fn cell_straddles(values: [Complex64; 4]) -> bool {
    let straddles = |part: fn(&Complex64) -> f64| {
        let lo = values.iter().map(part).fold(f64::INFINITY, f64::min);
        let hi = values.iter().map(part).fold(f64::NEG_INFINITY, f64::max);
        lo <= 0.0 && hi >= 0.0
    };
    straddles(|z| z.re) && straddles(|z| z.im)
}

enum Refined {
    Root(Complex64, f64),
    Diverged(NonConvergence),
    Escaped,
}

fn newton(params: &ScarfParams, seed: Complex64, region: &ScanRegion) -> Refined {
    let g = |k: Complex64| inverse_transmission(params, k);
    let fail = |last: Option<Complex64>| {
        let residual = last.and_then(g).map(|v| v.norm());
        Refined::Diverged(NonConvergence { seed, last, residual })
    };
    let mut k = seed;
    let mut settled = 0;
    for _ in 0..MAX_ITERATIONS {
        let Some(gk) = g(k) else { return fail(Some(k)) };
        if gk.norm() == 0.0 {
            return Refined::Root(k, 0.0);
        }
        let h = 1e-6 * k.norm().max(1.0);
        let (Some(gp), Some(gm)) = (g(k + h), g(k - h)) else {
            return fail(Some(k));
        };
        let deriv = (gp - gm) / (2.0 * h);
        if deriv.norm() == 0.0 || !deriv.re.is_finite() || !deriv.im.is_finite() {
            return fail(Some(k));
        }
        let step = gk / deriv;
        k -= step;
        if !(k.re.is_finite() && k.im.is_finite()) {
            return fail(None);
        }
        if !region.contains(k, 10.0 * region.cell_diagonal() + 1.0) {
            return Refined::Escaped;
        }
        if step.norm() <= 1e-15 * k.norm().max(1.0) {
            // a couple of extra iterations once the step has collapsed
            settled += 1;
            if settled >= 2 {
                break;
            }
        }
    }
    match g(k) {
        Some(v) if v.norm() < RESIDUAL_TOL => Refined::Root(k, v.norm()),
        _ => fail(Some(k)),
    }
}

/// Zeros of `1/t` inside `region`, classified.
pub fn find_poles(params: &ScarfParams, region: &ScanRegion) -> Result<PoleScan, SpectralError> {
    let grid = inverse_t_grid(params, region)?;
    let diag = region.cell_diagonal();
    let avoid = inverse_poles_in(region, diag);

    let mut seeds = Vec::new();
    for j in 0..region.ny {
        for i in 0..region.nx {
            let corners = [
                grid.at(i, j),
                grid.at(i + 1, j),
                grid.at(i, j + 1),
                grid.at(i + 1, j + 1),
            ];
            let Some(values) = corners.into_iter().collect::<Option<Vec<_>>>() else {
                continue;
            };
            if !cell_straddles([values[0], values[1], values[2], values[3]]) {
                continue;
            }
            let center = Complex64::new(
                0.5 * (region.kx(i) + region.kx(i + 1)),
                0.5 * (region.ky(j) + region.ky(j + 1)),
            );
            if avoid.iter().any(|p| (p - center).norm() < 1.5 * diag) {
                continue;
            }
            seeds.push(center);
        }
    }

    let refined: Vec<Refined> = seeds.par_iter().map(|&s| newton(params, s, region)).collect();
    let mut roots: Vec<(Complex64, f64)> = Vec::new();
    let mut warnings = Vec::new();
    for r in refined {
        match r {
            Refined::Root(k, res) => {
                if !region.contains(k, 1e-9) {
                    continue;
                }
                match roots.iter_mut().find(|(q, _)| (q - k).norm() < DEDUP_TOL) {
                    Some(existing) => {
                        if res < existing.1 {
                            *existing = (k, res);
                        }
                    }
                    None => roots.push((k, res)),
                }
            }
            Refined::Diverged(w) => warnings.push(w),
            Refined::Escaped => {}
        }
    }
    let ks: Vec<Complex64> = roots.iter().map(|r| snap_axes(r.0)).collect();
    let records = classify(&ks, params)?;
    Ok(PoleScan { records, warnings })
}

// Newton lands a few ulps off the axes; clean that up so ordering is stable.
fn snap_axes(k: Complex64) -> Complex64 {
    let eps = 1e-13 * k.norm().max(1.0);
    let clean = |v: f64| if v.abs() < eps { 0.0 } else { v };
    Complex64::new(clean(k.re), clean(k.im))
}

/// Assigns a [`PoleClass`] to each root and links pairs. The output is sorted
/// by `(Re k, Im k)` and `partner` indexes into it.
pub fn classify(roots: &[Complex64], params: &ScarfParams) -> Result<Vec<PoleRecord>, SpectralError> {
    let mut ks = roots.to_vec();
    ks.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let find = |target: Complex64, skip: usize| {
        ks.iter()
            .enumerate()
            .find(|&(i, k)| i != skip && (k - target).norm() < PAIR_TOL)
            .map(|(i, _)| i)
    };
    let mut out = Vec::with_capacity(ks.len());
    for (idx, &k) in ks.iter().enumerate() {
        let real_axis = k.im.abs() < AXIS_TOL;
        let imag_axis = k.re.abs() < AXIS_TOL;
        let (class, partner) = if real_axis && imag_axis {
            return Err(SpectralError::AmbiguousClassification {
                k,
                first: PoleClass::SpectralSingularity.name(),
                second: PoleClass::BoundState.name(),
            });
        } else if k.im <= -AXIS_TOL {
            (PoleClass::Unphysical, None)
        } else if real_axis {
            match find(-k, idx) {
                Some(j) => (PoleClass::SelfDualPair, Some(j)),
                None => (PoleClass::SpectralSingularity, None),
            }
        } else if imag_axis {
            (PoleClass::BoundState, None)
        } else {
            match find(-k.conj(), idx) {
                Some(j) => (PoleClass::CcpeMember, Some(j)),
                None => (PoleClass::UnpairedComplex, None),
            }
        };
        let residual = inverse_transmission(params, k).map_or(f64::INFINITY, |g| g.norm());
        out.push(PoleRecord {
            k,
            energy: k * k,
            class,
            residual,
            partner,
        });
    }
    Ok(out)
}

/// Comparison of the lowest spectral-singularity energy with the largest real
/// part among complex-conjugate-pair energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularityBound {
    pub e_star: f64,
    pub re_e_last: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Energies of the physical records, ordered by real part.
    pub energies: Vec<Complex64>,
    /// Present when a spectral singularity coexists with CCPEs.
    pub bound: Option<SingularityBound>,
}

pub fn energy_spectrum(records: &[PoleRecord]) -> Spectrum {
    let mut energies: Vec<Complex64> = records
        .iter()
        .filter(|r| r.class.is_physical())
        .map(|r| r.energy)
        .collect();
    energies.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let ss = records
        .iter()
        .filter(|r| matches!(r.class, PoleClass::SpectralSingularity | PoleClass::SelfDualPair))
        .map(|r| r.energy.re)
        .fold(None, |acc: Option<f64>, e| Some(acc.map_or(e, |a| a.min(e))));
    let last = records
        .iter()
        .filter(|r| r.class == PoleClass::CcpeMember)
        .map(|r| r.energy.re)
        .fold(None, |acc: Option<f64>, e| Some(acc.map_or(e, |a| a.max(e))));
    let bound = match (ss, last) {
        (Some(e_star), Some(re_e_last)) => Some(SingularityBound {
            e_star,
            re_e_last,
            holds: e_star >= re_e_last,
        }),
        _ => None,
    };
    Spectrum { energies, bound }
}
