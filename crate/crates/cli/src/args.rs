use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use scarf_core::oracle::{Method, OracleConfig};
use scarf_core::{Parameterization, ScarfParams};

use crate::expr::{parse_complex, parse_real};
use crate::output::Format;
use crate::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "scarf",
    version,
    about = "Coherent scattering off the complex Scarf II potential"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// T, R_left, R_right and |det S| over a range of k
    Coeffs(CoeffsArgs),
    /// Poles of t(k) in a window of the complex k plane
    Poles(PolesArgs),
    /// Negative-energy levels, checked by direct integration
    Boundstates(BoundArgs),
    /// Real wavenumbers where one side's reflection vanishes
    Zeros(ZerosArgs),
    /// |det S| over a range of k
    #[command(name = "detS")]
    DetS(DetSArgs),
    /// Direct integration at a single k
    Oracle(OracleArgs),
    /// Analytic vs numerical adjudication of pole, CPA and reflectivity-zero claims
    Report(ReportArgs),
}

/// Potential parameters: one family with its values, e.g. `--p1 c=1 d=0.5`.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct FamilyArgs {
    /// A = -ic, B = d + i/2
    #[arg(long, num_args = 2, value_names = ["c=", "d="], allow_hyphen_values = true)]
    pub p1: Option<Vec<String>>,
    /// A = 1 - ic, B = c - i/2
    #[arg(long, num_args = 1, value_names = ["c="], allow_hyphen_values = true)]
    pub p2: Option<Vec<String>>,
    /// A = q + 1/2 - ic, B = c - iq
    #[arg(long, num_args = 2, value_names = ["c=", "q="], allow_hyphen_values = true)]
    pub p3: Option<Vec<String>>,
    /// A = -ic, B = id
    #[arg(long, num_args = 2, value_names = ["c=", "d="], allow_hyphen_values = true)]
    pub p4: Option<Vec<String>>,
    /// Arbitrary complex A and B, e.g. `A=0.3+0.2i B=0.7-0.1i`
    #[arg(long, num_args = 2, value_names = ["A=", "B="], allow_hyphen_values = true)]
    pub raw: Option<Vec<String>>,
}

fn key_values<'a>(flag: &str, values: &'a [String], keys: &[&str]) -> Result<Vec<&'a str>, CliError> {
    let mut out = vec![None; keys.len()];
    for v in values {
        let (k, val) = v
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--{flag}: expected key=value, got {v:?}")))?;
        let idx = keys
            .iter()
            .position(|key| key.eq_ignore_ascii_case(k.trim()))
            .ok_or_else(|| CliError::Usage(format!("--{flag}: unknown key {k:?} (expected {})", keys.join(", "))))?;
        if out[idx].replace(val).is_some() {
            return Err(CliError::Usage(format!("--{flag}: {k} given twice")));
        }
    }
    out.into_iter()
        .zip(keys)
        .map(|(v, k)| v.ok_or_else(|| CliError::Usage(format!("--{flag}: missing {k}="))))
        .collect()
}

fn reals(flag: &str, values: &[String], keys: &[&str]) -> Result<Vec<f64>, CliError> {
    key_values(flag, values, keys)?
        .into_iter()
        .map(|s| parse_real(s).map_err(|e| CliError::Usage(format!("--{flag}: {e}"))))
        .collect()
}

impl FamilyArgs {
    pub fn resolve(&self) -> Result<Parameterization, CliError> {
        let fam = if let Some(v) = &self.p1 {
            let x = reals("p1", v, &["c", "d"])?;
            Parameterization::P1 { c: x[0], d: x[1] }
        } else if let Some(v) = &self.p2 {
            let x = reals("p2", v, &["c"])?;
            Parameterization::P2 { c: x[0] }
        } else if let Some(v) = &self.p3 {
            let x = reals("p3", v, &["c", "q"])?;
            Parameterization::P3 { c: x[0], q: x[1] }
        } else if let Some(v) = &self.p4 {
            let x = reals("p4", v, &["c", "d"])?;
            Parameterization::P4 { c: x[0], d: x[1] }
        } else if let Some(v) = &self.raw {
            let s = key_values("raw", v, &["A", "B"])?;
            let parse = |s: &str| parse_complex(s).map_err(|e| CliError::Usage(format!("--raw: {e}")));
            let params = ScarfParams::new(parse(s[0])?, parse(s[1])?).map_err(|e| CliError::Usage(e.to_string()))?;
            Parameterization::Raw(params)
        } else {
            return Err(CliError::Usage(
                "one of --p1, --p2, --p3, --p4, --raw is required".into(),
            ));
        };
        fam.to_scarf_params().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(fam)
    }
}

#[derive(Args, Debug, Clone)]
pub struct OracleOpts {
    /// Initial half-width L of the integration domain [-L, L]
    #[arg(long, default_value_t = 16.0)]
    pub half_width: f64,
    /// Fixed RK4 steps across [-L, L]
    #[arg(long, default_value_t = 40_000)]
    pub steps: usize,
    /// Adaptive Dormand-Prince instead of fixed-step RK4
    #[arg(long)]
    pub adaptive: bool,
    /// Fail instead of widening the domain when the potential tail is too large
    #[arg(long)]
    pub fixed_domain: bool,
}

impl OracleOpts {
    pub fn config(&self) -> Result<OracleConfig, CliError> {
        let cfg = OracleConfig {
            half_width: self.half_width,
            n_steps: self.steps,
            method: if self.adaptive { Method::Rk45 } else { Method::Rk4 },
            extend_domain: !self.fixed_domain,
            ..OracleConfig::default()
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OutputOpts {
    /// Output file (written atomically); stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
}

impl OutputOpts {
    pub fn format(&self) -> Format {
        match self.format {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compare {
    Closed,
    Oracle,
}

#[derive(Args, Debug)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// `min:max:step` or a single value; negative k is the time-reversed reading
    #[arg(long, allow_hyphen_values = true)]
    pub k: String,
    /// Extra columns: closed-form values and/or direct integration
    #[arg(long, value_enum, value_delimiter = ',')]
    pub compare: Vec<Compare>,
    #[command(flatten)]
    pub oracle: OracleOpts,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Args, Debug)]
pub struct PolesArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// `kxmin:kxmax:kymin:kymax`; defaults to a box around the expected poles with Im k >= 0
    #[arg(long, allow_hyphen_values = true)]
    pub region: Option<String>,
    /// Cells per axis, `NXxNY`
    #[arg(long, default_value = "200x200")]
    pub grid: String,
    /// Also write the sampled 1/t grid (for zero-contour plots) to this file
    #[arg(long)]
    pub contours: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub oracle: OracleOpts,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Args, Debug)]
pub struct ZerosArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub compare: Vec<Compare>,
    #[command(flatten)]
    pub oracle: OracleOpts,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Args, Debug)]
pub struct DetSArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// `min:max:step` or a single value; negative k is the time-reversed reading
    #[arg(long, allow_hyphen_values = true)]
    pub k: String,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub compare: Vec<Compare>,
    #[command(flatten)]
    pub oracle: OracleOpts,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Single wavenumber, |k| >= 0.05; negative integrates conj V at |k|
    #[arg(long, allow_hyphen_values = true)]
    pub k: String,
    #[command(flatten)]
    pub oracle: OracleOpts,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub oracle: OracleOpts,
    #[command(flatten)]
    pub output: OutputOpts,
}

/// `min:max:step` (inclusive of `max` when it lies on the lattice) or a
/// single value.
pub fn parse_range(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |m: String| CliError::Usage(format!("--k {s:?}: {m}"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![parse_real(single).map_err(bad)?]),
        [lo, hi, step] => {
            let lo = parse_real(lo).map_err(bad)?;
            let hi = parse_real(hi).map_err(bad)?;
            let step = parse_real(step).map_err(bad)?;
            if step <= 0.0 {
                return Err(bad("step must be positive".into()));
            }
            if hi < lo {
                return Err(bad("empty range (max < min)".into()));
            }
            let n = ((hi - lo) / step + 0.5).floor() as usize;
            if n > 10_000_000 {
                return Err(bad("too many points".into()));
            }
            Ok((0..=n)
                .map(|i| lo + i as f64 * step)
                .filter(|&k| k < hi + 0.5 * step)
                .collect())
        }
        _ => Err(bad("expected min:max:step or a single value".into())),
    }
}

pub fn parse_region(s: &str) -> Result<[f64; 4], CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 {
        return Err(CliError::Usage(format!(
            "--region {s:?}: expected kxmin:kxmax:kymin:kymax"
        )));
    }
    let mut out = [0.0; 4];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse_real(p).map_err(|e| CliError::Usage(format!("--region: {e}")))?;
    }
    Ok(out)
}

pub fn parse_grid(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("--grid {s:?}: expected NXxNY, e.g. 400x400"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let nx = a.trim().parse().map_err(|_| bad())?;
    let ny = b.trim().parse().map_err(|_| bad())?;
    Ok((nx, ny))
}
