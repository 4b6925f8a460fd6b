//! Analytic claims checked against direct integration.
//!
//! Negative `k` is read as the time-reversed problem: the oracle integrates
//! `conj V` at `|k|`, and the analytic side continues `t`, `r` to `-|k|`.

use scarf_core::analytic::real_poles;
use scarf_core::closed_forms::{closed_det_s, closed_f, closed_t};
use scarf_core::oracle::{numerical_scatter_signed, OracleConfig};
use scarf_core::{reflection_zero_general, Extended, Parameterization, ScarfParams, Side};
use serde_json::Value;

use crate::args::ReportArgs;
use crate::commands::{analytic_at, oracle_json, oracle_runs, parameters_json, params_of, rel_diff};
use crate::output::{num, Document, Row, Table};
use crate::{CliError, Outcome};

/// Distances from a real pole at which `|det S|` is sampled, outward to inward.
const APPROACH: [f64; 5] = [1e-1, 3e-2, 1e-2, 5e-3, 2e-3];
/// Offset used for the PT check, closer than the oracle is allowed to go.
const PT_OFFSET: f64 = 1e-4;
const PT_ORACLE_OFFSET: f64 = 2e-3;
const PT_TOL: f64 = 1e-8;
pub const CONSISTENCY_TOL: f64 = 1e-6;
/// Points closer than this to a real pole do not enter the consistency figure.
const POLE_CLEARANCE: f64 = 0.05;
const ZERO_R: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Trend {
    Diverges,
    Vanishes,
    Bounded,
}

impl Trend {
    fn of(values: &[f64]) -> Trend {
        let (first, last) = (values[0], values[values.len() - 1]);
        let rising = values.windows(2).all(|w| w[1] > w[0]);
        let falling = values.windows(2).all(|w| w[1] < w[0]);
        if rising && last >= 10.0 * first {
            Trend::Diverges
        } else if falling && last <= 0.1 * first && last < 1e-2 {
            Trend::Vanishes
        } else {
            Trend::Bounded
        }
    }

    fn describe(self) -> &'static str {
        match self {
            Trend::Diverges => "diverges",
            Trend::Vanishes => "vanishes",
            Trend::Bounded => "stays bounded",
        }
    }
}

struct Measurement {
    item: &'static str,
    quantity: &'static str,
    k: f64,
    closed: Option<Extended<f64>>,
    gamma: Extended<f64>,
    oracle: Option<f64>,
    /// Whether the point enters the self-consistency figure.
    counted: bool,
}

impl Measurement {
    fn reference(&self) -> Extended<f64> {
        self.closed.unwrap_or(self.gamma)
    }

    fn rel_err(&self) -> Option<f64> {
        rel_diff(self.reference(), self.oracle)
    }

    fn row(&self) -> Row {
        let row = Row::new()
            .text("item", self.item)
            .text("quantity", self.quantity)
            .num("k", self.k);
        let row = match self.closed {
            Some(c) => row.ext("closed", c),
            None => row.ext_missing("closed"),
        };
        row.ext("gamma", self.gamma)
            .opt("oracle", self.oracle)
            .opt("rel_err", self.rel_err())
            .flag("counted", self.counted)
    }
}

struct Verdict {
    item: &'static str,
    k: Option<f64>,
    text: String,
    consistent: bool,
}

struct Ctx<'a> {
    fam: &'a Parameterization,
    params: ScarfParams,
    cfg: OracleConfig,
    poles: Vec<f64>,
    has_closed: bool,
}

impl Ctx<'_> {
    fn clear_of_poles(&self, k: f64) -> bool {
        self.poles.iter().all(|p| (k - p).abs() >= POLE_CLEARANCE)
    }

    fn det_s(&self, item: &'static str, ks: &[f64]) -> Result<Vec<Measurement>, CliError> {
        let oracle = oracle_runs(&self.params, ks, &self.cfg)?;
        ks.iter()
            .zip(oracle)
            .map(|(&k, o)| {
                let closed = if self.has_closed {
                    Some(closed_det_s(self.fam, k).map_err(|e| CliError::Compute(e.to_string()))?)
                } else {
                    None
                };
                Ok(Measurement {
                    item,
                    quantity: "detS",
                    k,
                    closed,
                    gamma: analytic_at(&self.params, k)?.det_s_abs,
                    oracle: o.map(|o| o.det_s_abs()),
                    counted: self.clear_of_poles(k),
                })
            })
            .collect()
    }
}

fn reading(k: f64) -> &'static str {
    if k > 0.0 {
        "V"
    } else {
        "conj V"
    }
}

fn trend_of(ms: &[Measurement], pick: impl Fn(&Measurement) -> Option<f64>) -> Option<Trend> {
    let vals: Option<Vec<f64>> = ms.iter().map(pick).collect();
    vals.map(|v| Trend::of(&v))
}

/// `|det S|` approaching each real pole of `t` and at the mirrored points.
fn pole_items(ctx: &Ctx, meas: &mut Vec<Measurement>, verdicts: &mut Vec<Verdict>) -> Result<(), CliError> {
    let mut absorbing = Vec::new();
    for &p in &ctx.poles {
        let near: Vec<f64> = APPROACH.iter().map(|e| p + p.signum() * e).collect();
        let mirror: Vec<f64> = near.iter().map(|k| -k).collect();
        for (item, ks, at) in [("detS_at_pole", near, p), ("detS_at_mirror", mirror, -p)] {
            let ms = ctx.det_s(item, &ks)?;
            let analytic = trend_of(&ms, |m| m.gamma.finite());
            let oracle = trend_of(&ms, |m| m.oracle);
            let last = ms.last().expect("non-empty approach");
            let (text, consistent) = match (analytic, oracle) {
                (Some(a), Some(o)) => {
                    if o == Trend::Vanishes {
                        absorbing.push(at);
                    }
                    (
                        format!(
                            "k -> {at:+.6}: |det S| {} for {} at |k| = {:.6} (oracle {:.6e}, analytic {:.6e} at distance {:.0e}); analytic trend {}",
                            o.describe(),
                            reading(at),
                            at.abs(),
                            last.oracle.unwrap_or(f64::NAN),
                            last.gamma.finite().unwrap_or(f64::INFINITY),
                            APPROACH[APPROACH.len() - 1],
                            if a == o { "agrees" } else { "DISAGREES" },
                        ),
                        a == o,
                    )
                }
                _ => (format!("k -> {at:+.6}: oracle or analytic sequence incomplete"), false),
            };
            verdicts.push(Verdict {
                item,
                k: Some(at),
                text,
                consistent,
            });
            meas.extend(ms);
        }
    }
    let text = if ctx.poles.is_empty() {
        "no real pole of t, hence no spectral singularity and no CPA partner".to_string()
    } else if absorbing.is_empty() {
        "no coherent perfect absorption: |det S| stays away from zero at every mirrored pole".to_string()
    } else {
        let at: Vec<String> = absorbing
            .iter()
            .map(|k| format!("{} at k = {:.6}", reading(*k), k.abs()))
            .collect();
        format!(
            "coherent perfect absorption present (|det S| -> 0, oracle): {}",
            at.join("; ")
        )
    };
    verdicts.push(Verdict {
        item: "cpa",
        k: None,
        text,
        consistent: true,
    });
    Ok(())
}

fn reflection_items(ctx: &Ctx, meas: &mut Vec<Measurement>, verdicts: &mut Vec<Verdict>) -> Result<(), CliError> {
    let zeros = reflection_zero_general(&ctx.params);
    let mut any = false;
    for side in [Side::Left, Side::Right] {
        let Some(kz) = zeros.get(side) else { continue };
        any = true;
        let s = analytic_at(&ctx.params, kz)?;
        let o = numerical_scatter_signed(&ctx.params, kz, &ctx.cfg)
            .map_err(|e| CliError::Compute(format!("oracle at k_z = {kz}: {e}")))?;
        let closed_t = if ctx.has_closed {
            Some(closed_t(ctx.fam, kz).map_err(|e| CliError::Compute(e.to_string()))?)
        } else {
            None
        };
        let closed_r = |which: Side| -> Result<Option<Extended<f64>>, CliError> {
            let (Some(t), true) = (closed_t, ctx.has_closed) else {
                return Ok(None);
            };
            let f = closed_f(ctx.fam, kz, which).map_err(|e| CliError::Compute(e.to_string()))?;
            Ok(Some(t.map(|t| t * f.norm_sqr())))
        };
        let zero_side_oracle = match side {
            Side::Left => o.reflection_left(),
            Side::Right => o.reflection_right(),
        };
        let other_side_oracle = match side {
            Side::Left => o.reflection_right(),
            Side::Right => o.reflection_left(),
        };
        let (r_zero, r_other) = match side {
            Side::Left => (s.reflection_left, s.reflection_right),
            Side::Right => (s.reflection_right, s.reflection_left),
        };
        let r_left_counted = side != Side::Left;
        meas.push(Measurement {
            item: "reflectivity_zero",
            quantity: "R_left",
            k: kz,
            closed: closed_r(Side::Left)?,
            gamma: s.reflection_left,
            oracle: Some(o.reflection_left()),
            counted: r_left_counted,
        });
        meas.push(Measurement {
            item: "reflectivity_zero",
            quantity: "R_right",
            k: kz,
            closed: closed_r(Side::Right)?,
            gamma: s.reflection_right,
            oracle: Some(o.reflection_right()),
            counted: !r_left_counted,
        });
        meas.push(Measurement {
            item: "reflectivity_zero",
            quantity: "T",
            k: kz,
            closed: closed_t,
            gamma: s.transmission,
            oracle: Some(o.transmission()),
            counted: true,
        });
        let analytic_zero = r_zero.finite().is_some_and(|r| r < ZERO_R);
        let oracle_zero = zero_side_oracle < ZERO_R;
        let other_open = other_side_oracle > 1e-3 && r_other.finite().is_some_and(|r| r > 1e-3);
        let t = o.transmission();
        let transparent = (t - 1.0).abs() <= 1e-6;
        let text = format!(
            "k_z = {kz:+.10} ({}): R_{} = {:.3e} analytic, {:.3e} oracle; R_{} = {:.6e} oracle; T = {:.10} oracle ({}): {}",
            reading(kz),
            side.name(),
            r_zero.finite().unwrap_or(f64::INFINITY),
            zero_side_oracle,
            side.opposite().name(),
            other_side_oracle,
            t,
            if transparent { "T = 1" } else { "T != 1" },
            if analytic_zero && oracle_zero && other_open {
                let kind = if transparent { "unidirectionally invisible" } else { "not invisible" };
                format!("reflectionless from the {} only, {kind}", side.name())
            } else {
                "analytic and oracle disagree on the zero side".to_string()
            },
        );
        verdicts.push(Verdict {
            item: "reflectivity_zero",
            k: Some(kz),
            text,
            consistent: analytic_zero && oracle_zero && other_open,
        });
    }
    if !any {
        verdicts.push(Verdict {
            item: "reflectivity_zero",
            k: None,
            text: "no real reflectivity zero on either side".into(),
            consistent: true,
        });
    }
    Ok(())
}

fn is_pt_symmetric(p: &ScarfParams) -> bool {
    let (pp, q) = (p.p(), p.q());
    let scale = pp.norm().max(q.norm()).max(1.0);
    pp.im.abs() <= 1e-12 * scale && q.re.abs() <= 1e-12 * scale
}

fn pt_items(ctx: &Ctx, meas: &mut Vec<Measurement>, verdicts: &mut Vec<Verdict>) -> Result<(), CliError> {
    if !is_pt_symmetric(&ctx.params) || ctx.poles.is_empty() {
        return Ok(());
    }
    // The oracle forms t² - r_l r_r from amplitudes of size 1/distance, so it
    // is held to its own accuracy rather than to PT_TOL.
    let (mut worst, mut worst_oracle): (f64, f64) = (0.0, 0.0);
    for &p in &ctx.poles {
        let ks = [p - PT_OFFSET, p + PT_OFFSET, p - PT_ORACLE_OFFSET, p + PT_ORACLE_OFFSET];
        let ms = ctx.det_s("pt_reduction", &ks)?;
        for m in &ms {
            for v in [m.closed.and_then(|c| c.finite()), m.gamma.finite()]
                .into_iter()
                .flatten()
            {
                worst = worst.max((v - 1.0).abs());
            }
            if let Some(v) = m.oracle {
                worst_oracle = worst_oracle.max((v - 1.0).abs());
            }
            if m.gamma.is_infinite() || m.closed.is_some_and(|c| c.is_infinite()) {
                worst = f64::INFINITY;
            }
        }
        meas.extend(ms);
    }
    let ok = worst <= PT_TOL && worst_oracle <= CONSISTENCY_TOL;
    verdicts.push(Verdict {
        item: "pt_reduction",
        k: None,
        text: format!(
            "PT-symmetric potential: max ||det S| - 1| = {worst:.3e} analytic (tolerance {PT_TOL:.0e}) and {worst_oracle:.3e} oracle (tolerance {CONSISTENCY_TOL:.0e}) at distances {PT_OFFSET:.0e} and {PT_ORACLE_OFFSET:.0e} from every real pole: {}",
            if ok { "|det S| -> 1 holds" } else { "|det S| -> 1 FAILS" }
        ),
        consistent: ok,
    });
    Ok(())
}

fn grid_item(ctx: &Ctx, meas: &mut Vec<Measurement>) -> Result<(), CliError> {
    let ks: Vec<f64> = (1..=20)
        .flat_map(|i| {
            let k = 0.2 * i as f64;
            [-k, k]
        })
        .filter(|&k| ctx.clear_of_poles(k))
        .collect();
    meas.extend(ctx.det_s("consistency_grid", &ks)?);
    Ok(())
}

pub fn report(a: &ReportArgs) -> Result<Outcome, CliError> {
    let fam = a.family.resolve()?;
    let params = params_of(&fam);
    let ctx = Ctx {
        fam: &fam,
        params,
        cfg: a.oracle.config()?,
        poles: real_poles(&params, 1e-9),
        has_closed: fam.closed_poles().is_ok(),
    };
    let mut meas = Vec::new();
    let mut verdicts = Vec::new();
    pole_items(&ctx, &mut meas, &mut verdicts)?;
    reflection_items(&ctx, &mut meas, &mut verdicts)?;
    pt_items(&ctx, &mut meas, &mut verdicts)?;
    grid_item(&ctx, &mut meas)?;

    let counted: Vec<f64> = meas.iter().filter(|m| m.counted).filter_map(|m| m.rel_err()).collect();
    let max_rel = counted.iter().copied().fold(0.0, f64::max);
    let consistent = max_rel < CONSISTENCY_TOL;
    verdicts.push(Verdict {
        item: "self_consistency",
        k: None,
        text: format!(
            "analytic vs oracle over {} points clear of poles: max relative difference {max_rel:.3e} (tolerance {CONSISTENCY_TOL:.0e}): {}",
            counted.len(),
            if consistent { "consistent" } else { "INCONSISTENT" }
        ),
        consistent,
    });

    let mut mt = Table::new(&[
        "item",
        "quantity",
        "k",
        "closed",
        "closed_infinite",
        "gamma",
        "gamma_infinite",
        "oracle",
        "rel_err",
        "counted",
    ]);
    for m in &meas {
        mt.push(m.row());
    }
    let mut vt = Table::new(&["item", "k", "verdict", "consistent"]);
    let mut notes = Vec::new();
    for v in &verdicts {
        notes.push(format!(
            "verdict [{}{}]: {}",
            v.item,
            v.k.map(|k| format!(" k={k:+.6}")).unwrap_or_default(),
            v.text
        ));
        vt.push(
            Row::new()
                .text("item", v.item)
                .opt("k", v.k)
                .text("verdict", v.text.clone())
                .flag("consistent", v.consistent),
        );
    }
    let all_consistent = verdicts.iter().all(|v| v.consistent);
    let doc = Document::new("report")
        .meta("parameters", parameters_json(&fam))
        .meta("oracle", oracle_json(&ctx.cfg))
        .meta("real_poles", Value::Array(ctx.poles.iter().map(|&p| num(p)).collect()))
        .meta("max_rel_err", num(max_rel))
        .meta("tolerance", num(CONSISTENCY_TOL))
        .meta("self_consistent", Value::Bool(consistent))
        .meta("all_verdicts_consistent", Value::Bool(all_consistent))
        .table("measurements", mt)
        .table("verdicts", vt);
    let mut out = Outcome::new(doc);
    out.notes = notes;
    Ok(out)
}
