//! Ordinary least-squares fits of power laws on a log2-log2 scale.

use serde::Serialize;

use crate::error::{param, Result};

/// A straight-line fit `y ≈ slope·x + intercept`.
///
/// `scales` keeps the raw `(scale, value)` pairs the fit was built from; `x`
/// and `y` are their log2 transforms as chosen by the caller.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub max_residual: f64,
    pub scales: Vec<(f64, f64)>,
    /// Set when every `y` is equal (for example a single point, where every
    /// covering number is 1); the slope is then reported as 0.
    pub degenerate: bool,
}

pub fn linear_fit(xs: &[f64], ys: &[f64], scales: Vec<(f64, f64)>) -> Result<FitReport> {
    if xs.len() != ys.len() {
        return Err(param("fit needs equally many x and y values"));
    }
    if xs.len() < 3 {
        return Err(param(format!("fit needs at least 3 scales, got {}", xs.len())));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(param("fit input contains a non-finite value"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(param("fit needs at least two distinct x values"));
    }
    if syy == 0.0 {
        return Ok(FitReport {
            slope: 0.0,
            intercept: my,
            r_squared: 1.0,
            max_residual: 0.0,
            scales,
            degenerate: true,
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let max_residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    let r_squared = (1.0 - ss_res / syy).clamp(0.0, 1.0);
    Ok(FitReport { slope, intercept, r_squared, max_residual, scales, degenerate: false })
}
