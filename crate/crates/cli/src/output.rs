use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use smax_core::{SmaxError, SweepResult};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    VerifyFailed,
    /// A NaN or infinity reached the output stage.
    NonFinite(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::VerifyFailed | CliError::NonFinite(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::VerifyFailed => write!(f, "verification failed"),
            CliError::NonFinite(m) => write!(f, "non-finite value in output at {m}"),
        }
    }
}

impl From<SmaxError> for CliError {
    fn from(e: SmaxError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// serde_json turns NaN and infinities into `null`; report types never
/// serialize `null` otherwise, so any `null` is a non-finite number.
fn check_finite(v: &Value, path: &str) -> Result<(), CliError> {
    match v {
        Value::Null => Err(CliError::NonFinite(path.to_string())),
        Value::Array(xs) => xs.iter().enumerate().try_for_each(|(i, x)| check_finite(x, &format!("{path}[{i}]"))),
        Value::Object(m) => m.iter().try_for_each(|(k, x)| check_finite(x, &format!("{path}.{k}"))),
        _ => Ok(()),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(bytes).map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn render(command: &str, seed: u64, result: Value) -> Result<Vec<u8>, CliError> {
    let doc = json!({ "command": command, "seed": seed, "result": result });
    check_finite(&doc, "$")?;
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("JSON values serialize");
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn write_json(out: Option<&Path>, command: &str, seed: u64, result: Value) -> Result<(), CliError> {
    emit(out, &render(command, seed, result)?)
}

/// `x.csv` gets the sidecar `x.json`; an output already named `*.json` gets
/// `*.sidecar.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    if out.extension().is_some_and(|e| e == "json") {
        out.with_extension("sidecar.json")
    } else {
        out.with_extension("json")
    }
}

/// Records as CSV to `out` (or stdout) and the fit summary as JSON next to
/// it (or to stderr).
pub fn write_sweep(out: Option<&Path>, seed: u64, r: &SweepResult) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["delta", "norm_f_p", "norm_Mf_q", "ratio", "log2_delta", "log2_ratio"]).map_err(csv_err)?;
    for rec in &r.records {
        let row = [rec.delta, rec.norm_f_p, rec.norm_mf_q_lower, rec.ratio, rec.delta.log2(), rec.ratio.log2()];
        if let Some(x) = row.iter().find(|x| !x.is_finite()) {
            return Err(CliError::NonFinite(format!("record delta={} value {x}", rec.delta)));
        }
        w.write_record(row.map(|x| x.to_string())).map_err(csv_err)?;
    }
    let csv_bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;

    let sidecar = render(
        "sweep",
        seed,
        json!({
            "family": r.family,
            "fitted_slope": r.fit.slope,
            "predicted_exponent": r.predicted_exponent,
            "r_squared": r.fit.r_squared,
            "params": r.params,
            "fit": r.fit,
            "skipped": r.skipped,
        }),
    )?;
    match out {
        Some(p) => {
            emit(Some(p), &csv_bytes)?;
            emit(Some(&sidecar_path(p)), &sidecar)
        }
        None => {
            emit(None, &csv_bytes)?;
            io::stderr().write_all(&sidecar).map_err(|e| CliError::Io(format!("stderr: {e}")))
        }
    }
}
