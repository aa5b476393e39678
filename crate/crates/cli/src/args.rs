use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use smax_core::set_spec::parse_real;
use smax_core::SetSpec;

#[derive(Debug, Parser)]
#[command(name = "smax", version, about = "Covering numbers, Riesz-diagram regions and spherical maximal scaling sweeps")]
pub struct Cli {
    /// Seed for randomized verifications; recorded in every output.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output path. JSON goes to stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Vertices of Q(β,γ) and the classification of a Riesz point.
    Region(RegionArgs),
    /// Covering number and dyadic cell count of a set.
    Cover(CoverArgs),
    /// Dimension estimates and the six Assouad-regular quantities.
    Dim(DimArgs),
    /// Norm-ratio scaling sweep for one test-function family.
    Sweep(SweepArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long)]
    pub d: u32,
    #[arg(long, value_parser = real)]
    pub beta: f64,
    #[arg(long, value_parser = real)]
    pub gamma: f64,
    /// `ip,iq`
    #[arg(long, value_parser = pair)]
    pub point: Option<(f64, f64)>,
}

#[derive(Debug, Args)]
pub struct CoverArgs {
    #[arg(long)]
    pub set: SetSpec,
    #[arg(long, value_parser = real)]
    pub delta: f64,
    /// `lo,hi`
    #[arg(long, value_parser = pair)]
    pub window: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DimMode {
    Minkowski,
    Assouad,
    Spectrum,
    Six,
}

#[derive(Debug, Args)]
pub struct DimArgs {
    /// Required except in `six` mode, which builds its own set.
    #[arg(long)]
    pub set: Option<SetSpec>,
    #[arg(long, value_enum)]
    pub mode: DimMode,
    #[arg(long, value_parser = real)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub jmin: Option<u32>,
    #[arg(long)]
    pub jmax: Option<u32>,
    #[arg(long, value_parser = real)]
    pub beta: Option<f64>,
    #[arg(long, value_parser = real)]
    pub gamma: Option<f64>,
    /// Generations of the Assouad-regular set in `six` mode.
    #[arg(long)]
    pub gens: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Ball,
    Annulus,
    Cylinder,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub set: SetSpec,
    #[arg(long)]
    pub d: u32,
    #[arg(long, value_parser = real)]
    pub ip: f64,
    #[arg(long, value_parser = real)]
    pub iq: f64,
    /// Cylinder only: spectrum parameter, giving `γ̃ = β/(1-θ)`.
    #[arg(long, value_parser = real)]
    pub theta: Option<f64>,
    /// `2^-a..2^-b` or a comma-separated list.
    #[arg(long, value_parser = deltas)]
    pub deltas: Option<Deltas>,
    /// Ball only: use this β instead of the measured Minkowski slope.
    #[arg(long, value_parser = real)]
    pub beta_override: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Factor7,
    Znj,
    Inclusion44,
    Six,
    Hullhalfplane,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: SuiteArg,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Replaces the suite's checked constant.
    #[arg(long, hide = true, value_parser = real)]
    pub constant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deltas(pub Vec<f64>);

pub fn real(s: &str) -> Result<f64, String> {
    let v = parse_real(s.trim())?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

pub fn pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    Ok((real(a)?, real(b)?))
}

fn dyadic_exponent(s: &str) -> Result<i32, String> {
    let e = s.trim().strip_prefix("2^").ok_or_else(|| format!("expected `2^-k`, got `{s}`"))?;
    e.parse::<i32>().map_err(|e| format!("bad exponent in `{s}`: {e}"))
}

pub fn deltas(s: &str) -> Result<Deltas, String> {
    let values = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (dyadic_exponent(a)?, dyadic_exponent(b)?);
        if b >= a {
            return Err(format!("`{s}` must decrease, e.g. 2^-4..2^-12"));
        }
        (b..=a).rev().map(|k| (k as f64).exp2()).collect()
    } else {
        s.split(',')
            .map(|x| match dyadic_exponent(x) {
                Ok(k) => Ok((k as f64).exp2()),
                Err(_) => real(x),
            })
            .collect::<Result<Vec<f64>, String>>()?
    };
    if values.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
        return Err(format!("deltas in `{s}` must lie in (0, 1)"));
    }
    if values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(format!("deltas in `{s}` must be strictly decreasing"));
    }
    Ok(Deltas(values))
}
