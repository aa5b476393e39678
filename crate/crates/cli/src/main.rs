mod args;
mod output;

use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};
use smax_core::covering::{covering_number_local, dyadic_cells};
use smax_core::dimension::{assouad_max_level, quantity_six_assouad};
use smax_core::experiments::{dyadic_deltas, sweep_annulus, sweep_ball, sweep_cylinder};
use smax_core::region::{l_functional, membership, necessary_conditions, q_vertices, DEFAULT_TOL};
use smax_core::sets::assouad_regular_set;
use smax_core::verify::{run_suite, VerifyOptions};
use smax_core::{
    assouad_fit, assouad_spectrum_fit, default_levels, minkowski_fit, realize, Interval, RieszPoint, SetSpec,
    SmaxError, Suite, SweepResult,
};

use args::{Cli, Command, CoverArgs, DimArgs, DimMode, FamilyArg, RegionArgs, SuiteArg, SweepArgs, VerifyArgs};
use output::{write_json, write_sweep, CliError};

/// Finest scale the six-quantity check descends to by default.
const SIX_FLOOR_LEVEL: u32 = 30;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match configure_threads().and_then(|()| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("smax: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("SMAX_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("SMAX_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the worker pool: {e}")))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Region(a) => write_json(out, "region", cli.seed, region(a)?),
        Command::Cover(a) => write_json(out, "cover", cli.seed, cover(a)?),
        Command::Dim(a) => write_json(out, "dim", cli.seed, dim(a)?),
        Command::Sweep(a) => write_sweep(out, cli.seed, &sweep(a)?),
        Command::Verify(a) => verify(a, cli.seed, out),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize to JSON")
}

fn region(a: &RegionArgs) -> Result<Value, CliError> {
    let r = q_vertices(a.d, a.beta, a.gamma)?;
    let mut v = json!({
        "d": a.d,
        "beta": a.beta,
        "gamma": a.gamma,
        "vertices": r.vertices.map(|p| [p.ip, p.iq]),
    });
    if let Some((ip, iq)) = a.point {
        let pt = RieszPoint::new(ip, iq)?;
        v["point"] = json!([ip, iq]);
        v["classification"] = to_value(&membership(&r, pt, DEFAULT_TOL));
        v["violated_conditions"] = to_value(&necessary_conditions(a.d, a.beta, a.gamma, pt, DEFAULT_TOL)?);
        v["L_value"] = json!(l_functional(a.d, a.beta, a.gamma, pt)?);
    }
    Ok(v)
}

fn cover(a: &CoverArgs) -> Result<Value, CliError> {
    let e = realize(&a.set)?;
    let window = match a.window {
        Some((lo, hi)) if lo <= hi => Interval::new(lo, hi),
        Some((lo, hi)) => return Err(CliError::Usage(format!("--window {lo},{hi} is empty"))),
        None => e.ambient(),
    };
    let n_cover = covering_number_local(&e, window, a.delta)?;
    // Cells of the dyadic level whose length is the largest power of two <= δ.
    let j = (-a.delta.log2()).ceil().max(0.0) as u32;
    let cells = dyadic_cells(&e.clip(window.lo, window.hi), j, None);
    Ok(json!({
        "set": a.set.to_string(),
        "delta": a.delta,
        "window": [window.lo, window.hi],
        "n_cover": n_cover,
        "dyadic_level": j,
        "n_dyadic_cells": cells.len(),
    }))
}

fn dim(a: &DimArgs) -> Result<Value, CliError> {
    if a.mode == DimMode::Six {
        return six(a);
    }
    let spec = a.set.as_ref().ok_or_else(|| CliError::Usage("--set is required in this mode".into()))?;
    let e = realize(spec)?;
    let (lo, hi) = default_levels(&e);
    let (j_min, j_max) = (a.jmin.unwrap_or(lo), a.jmax.unwrap_or(hi));
    let mut v = json!({ "set": spec.to_string(), "mode": format!("{:?}", a.mode).to_lowercase(), "jmin": j_min, "jmax": j_max });
    match a.mode {
        DimMode::Minkowski => v["fit"] = to_value(&minkowski_fit(&e, j_min, j_max)?),
        DimMode::Spectrum => {
            let theta = a.theta.ok_or_else(|| CliError::Usage("--theta is required in spectrum mode".into()))?;
            v["theta"] = json!(theta);
            v["fit"] = to_value(&assouad_spectrum_fit(&e, theta, j_min, j_max)?);
        }
        DimMode::Assouad => {
            let f = assouad_fit(&e, j_min, j_max)?;
            v["fit"] = to_value(&f.fit);
            v["max_pair_exponent"] = json!(f.max_pair_exponent);
            v["table"] = to_value(&f.table);
        }
        DimMode::Six => unreachable!(),
    }
    Ok(v)
}

fn six(a: &DimArgs) -> Result<Value, CliError> {
    let (beta, gamma, set_gens) = match (&a.set, a.beta, a.gamma) {
        (Some(SetSpec::AssouadRegular { beta, gamma, gens }), None, None) => (*beta, *gamma, Some(*gens)),
        (None, Some(b), Some(g)) => (b, g, None),
        _ => {
            return Err(CliError::Usage(
                "six mode needs --beta and --gamma, or --set assouad:beta=..,gamma=..,gens=..".into(),
            ))
        }
    };
    let gens = match a.gens.or(set_gens) {
        Some(g) => g,
        None => {
            let floor = (-(SIX_FLOOR_LEVEL as f64)).exp2();
            (1..)
                .take_while(|&g| assouad_regular_set(beta, gamma, g).is_ok_and(|e| e.finest_delta() >= floor))
                .last()
                .ok_or_else(|| CliError::Usage(format!("no generation of assouad({beta},{gamma}) resolves 2^-{SIX_FLOOR_LEVEL}")))?
        }
    };
    let e = assouad_regular_set(beta, gamma, gens)?;
    let (j_min, j_max) = (a.jmin.unwrap_or(4), a.jmax.unwrap_or(assouad_max_level(&e)));
    let r = quantity_six_assouad(&e, j_min, j_max)?;
    Ok(json!({
        "set": SetSpec::AssouadRegular { beta, gamma, gens }.to_string(),
        "mode": "six",
        "jmin": j_min,
        "jmax": j_max,
        "quantities": r.quantities(),
        "report": to_value(&r),
    }))
}

fn sweep(a: &SweepArgs) -> Result<SweepResult, CliError> {
    let pt = RieszPoint::new(a.ip, a.iq)?;
    let deltas = a.deltas.as_ref().map(|d| d.0.clone());
    let default = || dyadic_deltas(4, 12);
    if a.family != FamilyArg::Ball && a.beta_override.is_some() {
        return Err(CliError::Usage("--beta-override applies to the ball family only".into()));
    }
    if a.family != FamilyArg::Cylinder && a.theta.is_some() {
        return Err(CliError::Usage("--theta applies to the cylinder family only".into()));
    }
    let r = match a.family {
        FamilyArg::Ball => sweep_ball(a.d, &a.set, pt, &deltas.unwrap_or_else(default), a.beta_override)?,
        FamilyArg::Annulus => sweep_annulus(a.d, &a.set, pt, &deltas.unwrap_or_else(default))?,
        FamilyArg::Cylinder => {
            let SetSpec::AssouadRegular { beta, gamma, .. } = a.set else {
                return Err(CliError::Usage("the cylinder family needs --set assouad:...".into()));
            };
            let gamma_tilde = match a.theta {
                Some(t) if (0.0..1.0).contains(&t) => beta / (1.0 - t),
                Some(t) => return Err(CliError::Usage(format!("--theta {t} outside [0, 1)"))),
                None => gamma,
            };
            sweep_cylinder(a.d, &a.set, beta, gamma_tilde, pt, deltas.as_deref())?
        }
    };
    Ok(r)
}

fn verify(a: &VerifyArgs, seed: u64, out: Option<&std::path::Path>) -> Result<(), CliError> {
    let suites: Vec<Suite> = match a.suite {
        SuiteArg::All => Suite::ALL.to_vec(),
        SuiteArg::Factor7 => vec![Suite::Factor7],
        SuiteArg::Znj => vec![Suite::Znj],
        SuiteArg::Inclusion44 => vec![Suite::Inclusion44],
        SuiteArg::Six => vec![Suite::Six],
        SuiteArg::Hullhalfplane => vec![Suite::HullHalfplane],
    };
    if a.constant.is_some() && suites.len() > 1 {
        return Err(CliError::Usage("--constant needs a single suite".into()));
    }
    let opts = VerifyOptions { seed, constant: a.constant, samples: a.samples };
    let reports = suites.iter().map(|&s| run_suite(s, &opts)).collect::<Result<Vec<_>, SmaxError>>()?;
    let passed = reports.iter().all(|r| r.passed);
    let value = if reports.len() == 1 {
        to_value(&reports[0])
    } else {
        json!({ "passed": passed, "suites": to_value(&reports) })
    };
    write_json(out, "verify", seed, value)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}
