use rayon::prelude::*;
use scarf_core::analytic::{real_poles, transmission_poles};
use scarf_core::closed_forms::{closed_det_s, closed_kz, closed_t, p4_bound_states};
use scarf_core::oracle::{numerical_scatter_signed, verify_bound_state, Method, OracleConfig, OracleResult};
use scarf_core::spectral::{classify, energy_spectrum, find_poles, inverse_t_grid, PoleClass, ScanRegion};
use scarf_core::{
    reflection_zero_general, scattering_coefficients, Complex64, Extended, Parameterization, ScarfParams,
    ScatteringResult, Side,
};
use serde_json::{json, Map, Value};

use crate::args::{
    parse_grid, parse_range, parse_region, BoundArgs, CoeffsArgs, Compare, DetSArgs, OracleArgs, PolesArgs, ZerosArgs,
};
use crate::output::{num, Document, Row, Table};
use crate::{CliError, Outcome};

/// The oracle is not run closer than this to a real pole of `t`.
pub const ORACLE_POLE_GAP: f64 = 1e-3;
/// Smallest `|k|` handed to the oracle.
pub const ORACLE_MIN_K: f64 = 0.05;
/// Residual below which a bound-state energy counts as verified.
pub const BOUND_RESIDUAL_TOL: f64 = 1e-6;

pub(crate) fn params_of(fam: &Parameterization) -> ScarfParams {
    fam.to_scarf_params().expect("family validated while parsing")
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

pub(crate) fn parameters_json(fam: &Parameterization) -> Value {
    let p = params_of(fam);
    let mut m = Map::new();
    m.insert("family".into(), Value::from(fam.tag()));
    match *fam {
        Parameterization::P1 { c, d } | Parameterization::P4 { c, d } => {
            m.insert("c".into(), num(c));
            m.insert("d".into(), num(d));
        }
        Parameterization::P2 { c } => {
            m.insert("c".into(), num(c));
        }
        Parameterization::P3 { c, q } => {
            m.insert("c".into(), num(c));
            m.insert("q".into(), num(q));
        }
        Parameterization::Raw(_) => {}
    }
    m.insert("A".into(), complex_json(p.a));
    m.insert("B".into(), complex_json(p.b));
    Value::Object(m)
}

pub(crate) fn oracle_json(cfg: &OracleConfig) -> Value {
    json!({
        "half_width": num(cfg.half_width),
        "steps": cfg.n_steps,
        "method": match cfg.method { Method::Rk4 => "rk4", Method::Rk45 => "rk45" },
        "extend_domain": cfg.extend_domain,
    })
}

fn nonzero_ks(range: &str) -> Result<Vec<f64>, CliError> {
    let ks = parse_range(range)?;
    if ks.contains(&0.0) {
        return Err(CliError::Usage("k = 0 is not a scattering wavenumber".into()));
    }
    Ok(ks)
}

fn require_closed(fam: &Parameterization) -> Result<(), CliError> {
    fam.closed_poles()
        .map(|_| ())
        .map_err(|_| CliError::Usage(format!("closed forms exist for P1, P2 and P4, not {}", fam.tag())))
}

pub(crate) fn analytic_at(params: &ScarfParams, k: f64) -> Result<ScatteringResult, CliError> {
    scattering_coefficients(params, k).map_err(|e| CliError::Compute(e.to_string()))
}

/// Whether the oracle should be skipped at `k` (too slow a wave, or too
/// close to a real pole).
pub(crate) fn oracle_skips(k: f64, poles: &[f64]) -> bool {
    k.abs() < ORACLE_MIN_K || poles.iter().any(|p| (k - p).abs() < ORACLE_POLE_GAP)
}

/// Oracle runs over `ks` in parallel; `None` where skipped.
pub(crate) fn oracle_runs(
    params: &ScarfParams,
    ks: &[f64],
    cfg: &OracleConfig,
) -> Result<Vec<Option<OracleResult>>, CliError> {
    let poles = real_poles(params, 1e-9);
    ks.par_iter()
        .map(|&k| {
            if oracle_skips(k, &poles) {
                Ok(None)
            } else {
                numerical_scatter_signed(params, k, cfg)
                    .map(Some)
                    .map_err(|e| CliError::Compute(format!("oracle at k = {k}: {e}")))
            }
        })
        .collect()
}

/// `|b - a| / |a|`, or the absolute difference when `a = 0`.
pub(crate) fn rel_diff(a: Extended<f64>, b: Option<f64>) -> Option<f64> {
    let (Extended::Finite(a), Some(b)) = (a, b) else {
        return None;
    };
    let d = (b - a).abs();
    Some(if a == 0.0 { d } else { d / a.abs() })
}

pub fn coeffs(a: &CoeffsArgs) -> Result<Outcome, CliError> {
    let fam = a.family.resolve()?;
    let params = params_of(&fam);
    let ks = nonzero_ks(&a.k)?;
    let with_closed = a.compare.contains(&Compare::Closed);
    let with_oracle = a.compare.contains(&Compare::Oracle);
    if with_closed {
        require_closed(&fam)?;
    }
    let cfg = a.oracle.config()?;
    let oracle = if with_oracle {
        oracle_runs(&params, &ks, &cfg)?
    } else {
        Vec::new()
    };

    let mut rows = Vec::with_capacity(ks.len());
    for (i, &k) in ks.iter().enumerate() {
        let s = analytic_at(&params, k)?;
        let unit = |r: Extended<f64>| match (s.transmission, r) {
            (Extended::Finite(t), Extended::Finite(r)) => Some(t + r),
            _ => None,
        };
        let mut row = Row::new()
            .num("k", k)
            .ext("T", s.transmission)
            .ext("R_left", s.reflection_left)
            .ext("R_right", s.reflection_right)
            .ext("detS", s.det_s_abs)
            .opt("T_plus_R_left", unit(s.reflection_left))
            .opt("T_plus_R_right", unit(s.reflection_right));
        if with_closed {
            let t = closed_t(&fam, k).map_err(|e| CliError::Compute(e.to_string()))?;
            let d = closed_det_s(&fam, k).map_err(|e| CliError::Compute(e.to_string()))?;
            row = row
                .ext("T_closed", t)
                .ext("detS_closed", d)
                .opt("dT_closed", rel_diff(s.transmission, t.finite()))
                .opt("ddetS_closed", rel_diff(s.det_s_abs, d.finite()));
        }
        if with_oracle {
            let o = oracle[i];
            row = row
                .opt("T_oracle", o.map(|o| o.transmission()))
                .opt("R_left_oracle", o.map(|o| o.reflection_left()))
                .opt("R_right_oracle", o.map(|o| o.reflection_right()))
                .opt("detS_oracle", o.map(|o| o.det_s_abs()))
                .opt("oracle_est_error", o.map(|o| o.est_error))
                .flag("oracle_skipped", o.is_none())
                .opt("dT_oracle", rel_diff(s.transmission, o.map(|o| o.transmission())))
                .opt(
                    "dR_left_oracle",
                    rel_diff(s.reflection_left, o.map(|o| o.reflection_left())),
                )
                .opt(
                    "dR_right_oracle",
                    rel_diff(s.reflection_right, o.map(|o| o.reflection_right())),
                )
                .opt("ddetS_oracle", rel_diff(s.det_s_abs, o.map(|o| o.det_s_abs())));
        }
        rows.push(row);
    }
    let mut doc = Document::new("coeffs").meta("parameters", parameters_json(&fam));
    if with_oracle {
        doc = doc.meta("oracle", oracle_json(&cfg));
    }
    Ok(Outcome::new(doc.table("rows", Table::from_rows(rows))))
}

pub fn det_s(a: &DetSArgs) -> Result<Outcome, CliError> {
    let fam = a.family.resolve()?;
    let params = params_of(&fam);
    let ks = nonzero_ks(&a.k)?;
    let with_closed = a.compare.contains(&Compare::Closed);
    let with_oracle = a.compare.contains(&Compare::Oracle);
    if with_closed {
        require_closed(&fam)?;
    }
    let cfg = a.oracle.config()?;
    let oracle = if with_oracle {
        oracle_runs(&params, &ks, &cfg)?
    } else {
        Vec::new()
    };
    let mut rows = Vec::with_capacity(ks.len());
    for (i, &k) in ks.iter().enumerate() {
        let s = analytic_at(&params, k)?;
        let mut row = Row::new().num("k", k).ext("detS", s.det_s_abs);
        if with_closed {
            let d = closed_det_s(&fam, k).map_err(|e| CliError::Compute(e.to_string()))?;
            row = row
                .ext("detS_closed", d)
                .opt("ddetS_closed", rel_diff(s.det_s_abs, d.finite()));
        }
        if with_oracle {
            let o = oracle[i];
            row = row
                .opt("detS_oracle", o.map(|o| o.det_s_abs()))
                .opt("oracle_est_error", o.map(|o| o.est_error))
                .flag("oracle_skipped", o.is_none())
                .opt("ddetS_oracle", rel_diff(s.det_s_abs, o.map(|o| o.det_s_abs())));
        }
        rows.push(row);
    }
    let mut doc = Document::new("detS").meta("parameters", parameters_json(&fam));
    if with_oracle {
        doc = doc.meta("oracle", oracle_json(&cfg));
    }
    Ok(Outcome::new(doc.table("rows", Table::from_rows(rows))))
}

pub fn oracle(a: &OracleArgs) -> Result<Outcome, CliError> {
    let fam = a.family.resolve()?;
    let params = params_of(&fam);
    let ks = nonzero_ks(&a.k)?;
    let [k] = ks[..] else {
        return Err(CliError::Usage("oracle takes a single --k value".into()));
    };
    if k.abs() < ORACLE_MIN_K {
        return Err(CliError::Usage(format!("oracle needs |k| >= {ORACLE_MIN_K}")));
    }
    let cfg = a.oracle.config()?;
    let o = numerical_scatter_signed(&params, k, &cfg).map_err(|e| CliError::Compute(e.to_string()))?;
    let s = analytic_at(&params, k)?;
    let row = Row::new()
        .num("k", k)
        .num("half_width", o.half_width)
        .num("est_error", o.est_error)
        .num("t_re", o.t.re)
        .num("t_im", o.t.im)
        .num("t_right_re", o.t_right.re)
        .num("t_right_im", o.t_right.im)
        .num("r_left_re", o.r_left.re)
        .num("r_left_im", o.r_left.im)
        .num("r_right_re", o.r_right.re)
        .num("r_right_im", o.r_right.im)
        .num("T", o.transmission())
        .num("R_left", o.reflection_left())
        .num("R_right", o.reflection_right())
        .num("detS", o.det_s_abs())
        .ext("T_analytic", s.transmission)
        .ext("R_left_analytic", s.reflection_left)
        .ext("R_right_analytic", s.reflection_right)
        .ext("detS_analytic", s.det_s_abs)
        .opt("dT", rel_diff(s.transmission, Some(o.transmission())))
        .opt("dR_left", rel_diff(s.reflection_left, Some(o.reflection_left())))
        .opt("dR_right", rel_diff(s.reflection_right, Some(o.reflection_right())));
    let doc = Document::new("oracle")
        .meta("parameters", parameters_json(&fam))
        .meta("oracle", oracle_json(&cfg))
        .table("result", Table::from_rows(vec![row]));
    Ok(Outcome::new(doc))
}

/// Window around the upper-half-plane poles, with a thin strip below the
/// real axis so that real poles are interior.
fn default_region(params: &ScarfParams) -> [f64; 4] {
    let poles = transmission_poles(params, 0.0);
    let re = poles.iter().map(|p| p.k.re.abs()).fold(2.0, f64::max) + 1.0;
    let im = poles.iter().map(|p| p.k.im).fold(1.0, f64::max) + 1.0;
    [-re, re, -0.05, im]
}

const POLE_COLUMNS: [&str; 7] = ["k_re", "k_im", "E_re", "E_im", "class", "residual", "partner"];

pub fn poles(a: &PolesArgs) -> Result<Outcome, CliError> {
    let fam = a.family.resolve()?;
    let params = params_of(&fam);
    let explicit = a.region.is_some();
    let [x0, x1, y0, y1] = match &a.region {
        Some(s) => parse_region(s)?,
        None => default_region(&params),
    };
    let (nx, ny) = parse_grid(&a.grid)?;
    let region = ScanRegion::new((x0, x1), (y0, y1), nx, ny).map_err(|e| CliError::Usage(e.to_string()))?;
    let scan = find_poles(&params, &region).map_err(|e| CliError::Compute(e.to_string()))?;
    let records = if explicit {
        scan.records
    } else {
        // the default window is meant for physical poles only
        let kept: Vec<Complex64> = scan
            .records
            .iter()
            .filter(|r| r.class.is_physical())
            .map(|r| r.k)
            .collect();
        classify(&kept, &params).map_err(|e| CliError::Compute(e.to_string()))?
    };

    let mut table = Table::new(&POLE_COLUMNS);
    for r in &records {
        table.push(
            Row::new()
                .num("k_re", r.k.re)
                .num("k_im", r.k.im)
                .num("E_re", r.energy.re)
                .num("E_im", r.energy.im)
                .text("class", r.class.name())
                .num("residual", r.residual)
                .opt_int("partner", r.partner.map(|p| p as i64)),
        );
    }
    let mut warnings = Table::new(&["seed_re", "seed_im", "last_re", "last_im", "residual"]);
    let mut notes = Vec::new();
    for w in &scan.warnings {
        notes.push(format!(
            "warning: Newton refinement did not converge from seed {}",
            w.seed
        ));
        warnings.push(
            Row::new()
                .num("seed_re", w.seed.re)
                .num("seed_im", w.seed.im)
                .opt("last_re", w.last.map(|z| z.re))
                .opt("last_im", w.last.map(|z| z.im))
                .opt("residual", w.residual),
        );
    }
    let spectrum = energy_spectrum(&records);
    let mut energies = Table::new(&["E_re", "E_im"]);
    for e in &spectrum.energies {
        energies.push(Row::new().num("E_re", e.re).num("E_im", e.im));
    }
    let bound = match spectrum.bound {
        Some(b) => json!({ "e_star": num(b.e_star), "re_e_last": num(b.re_e_last), "holds": b.holds }),
        None => Value::Null,
    };
    let counts: Map<String, Value> = [
        PoleClass::SpectralSingularity,
        PoleClass::SelfDualPair,
        PoleClass::BoundState,
        PoleClass::CcpeMember,
        PoleClass::UnpairedComplex,
        PoleClass::Unphysical,
    ]
    .iter()
    .map(|c| {
        (
            c.name().to_string(),
            Value::from(records.iter().filter(|r| r.class == *c).count()),
        )
    })
    .collect();

    let doc = Document::new("poles")
        .meta("parameters", parameters_json(&fam))
        .meta(
            "region",
            json!({
                "kx_min": num(x0), "kx_max": num(x1), "ky_min": num(y0), "ky_max": num(y1),
                "nx": nx, "ny": ny, "default": !explicit,
            }),
        )
        .meta("counts", Value::Object(counts))
        .meta("singularity_bound", bound)
        .table("poles", table)
        .table("warnings", warnings)
        .table("spectrum", energies);

    let mut out = Outcome::new(doc);
    out.notes = notes;
    if let Some(path) = &a.contours {
        let grid = inverse_t_grid(&params, &region).map_err(|e| CliError::Compute(e.to_string()))?;
        let mut t = Table::new(&["kx", "ky", "g_re", "g_im", "g_finite"]);
        for j in 0..=region.ny {
            for i in 0..=region.nx {
                let g = grid.at(i, j);
                t.push(
                    Row::new()
                        .num("kx", region.kx(i))
                        .num("ky", region.ky(j))
                        .opt("g_re", g.map(|z| z.re))
                        .opt("g_im", g.map(|z| z.im))
                        .flag("g_finite", g.is_some()),
                );
            }
        }
        let doc = Document::new("poles-contours")
            .meta("parameters", parameters_json(&fam))
            .table("grid", t);
        out.extra_files.push((path.clone(), doc));
    }
    Ok(out)
}

struct Level {
    n: u32,
    kappa: f64,
}

pub fn boundstates(a: &BoundArgs) -> Result<Outcome, CliError> {
    let fam = a.family.resolve()?;
    let params = params_of(&fam);
    let cfg = a.oracle.config()?;
    let (source, levels) = match fam {
        Parameterization::P4 { c, d } => {
            let lv = p4_bound_states(c, d).map_err(|e| CliError::Compute(e.to_string()))?;
            (
                "closed",
                lv.iter().map(|l| Level { n: l.n, kappa: l.kappa }).collect::<Vec<_>>(),
            )
        }
        _ => {
            let mut kappas: Vec<f64> = transmission_poles(&params, 1e-12)
                .iter()
                .filter(|p| p.k.re.abs() < 1e-9 && p.k.im > 1e-9)
                .map(|p| p.k.im)
                .collect();
            kappas.sort_by(|a, b| b.total_cmp(a));
            kappas.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
            let lv = kappas
                .into_iter()
                .enumerate()
                .map(|(n, kappa)| Level { n: n as u32, kappa })
                .collect();
            ("analytic", lv)
        }
    };
    let residuals: Vec<f64> = levels
        .par_iter()
        .map(|l| {
            verify_bound_state(&params, -l.kappa * l.kappa, &cfg)
                .map_err(|e| CliError::Compute(format!("bound state at E = {}: {e}", -l.kappa * l.kappa)))
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&["n", "kappa", "energy", "residual", "verified"]);
    for (l, r) in levels.iter().zip(&residuals) {
        table.push(
            Row::new()
                .int("n", l.n as i64)
                .num("kappa", l.kappa)
                .num("energy", -l.kappa * l.kappa)
                .num("residual", *r)
                .flag("verified", *r < BOUND_RESIDUAL_TOL),
        );
    }
    let doc = Document::new("boundstates")
        .meta("parameters", parameters_json(&fam))
        .meta("source", Value::from(source))
        .meta("oracle", oracle_json(&cfg))
        .table("levels", table);
    Ok(Outcome::new(doc))
}

pub fn zeros(a: &ZerosArgs) -> Result<Outcome, CliError> {
    let fam = a.family.resolve()?;
    let params = params_of(&fam);
    let cfg = a.oracle.config()?;
    let with_oracle = a.compare.contains(&Compare::Oracle);
    let closed = match fam {
        Parameterization::P1 { .. } | Parameterization::P2 { .. } => {
            closed_kz(&fam).map_err(|e| CliError::Compute(e.to_string()))?
        }
        _ => None,
    };
    let found = reflection_zero_general(&params);
    let mut rows = Vec::new();
    for side in [Side::Left, Side::Right] {
        let Some(kz) = found.get(side) else { continue };
        let s = analytic_at(&params, kz)?;
        let closed_k = closed.map(|z| if z.side == side { z.k } else { -z.k });
        let mut row = Row::new()
            .text("side", side.name())
            .num("k_z", kz)
            .opt("k_z_closed", closed_k)
            .ext("R_left", s.reflection_left)
            .ext("R_right", s.reflection_right)
            .ext("T", s.transmission);
        if with_oracle {
            let o = if kz.abs() >= ORACLE_MIN_K {
                Some(numerical_scatter_signed(&params, kz, &cfg).map_err(|e| CliError::Compute(e.to_string()))?)
            } else {
                None
            };
            row = row
                .opt("R_left_oracle", o.map(|o| o.reflection_left()))
                .opt("R_right_oracle", o.map(|o| o.reflection_right()))
                .opt("T_oracle", o.map(|o| o.transmission()))
                .flag("oracle_skipped", o.is_none());
        }
        rows.push(row);
    }
    let mut columns = vec![
        "side",
        "k_z",
        "k_z_closed",
        "R_left",
        "R_left_infinite",
        "R_right",
        "R_right_infinite",
        "T",
        "T_infinite",
    ];
    if with_oracle {
        columns.extend(["R_left_oracle", "R_right_oracle", "T_oracle", "oracle_skipped"]);
    }
    let mut table = Table::new(&columns);
    for r in rows {
        table.push(r);
    }
    let doc = Document::new("zeros")
        .meta("parameters", parameters_json(&fam))
        .table("zeros", table);
    Ok(Outcome::new(doc))
}
