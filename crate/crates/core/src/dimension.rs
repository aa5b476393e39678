//! Minkowski dimension, Assouad dimension and Assouad spectrum estimates from
//! exact covering counts at dyadic scales.
//!
//! Every estimate is a least-squares slope on a log2-log2 scale. Regression
//! ranges are always explicit: the dimensions are limits, and a finite
//! truncation of `E` only resembles its limit set down to the construction
//! resolution.

use rayon::prelude::*;
use serde::Serialize;

use crate::covering::{covering_number, max_window_count};
use crate::error::{param, Result, SmaxError};
use crate::fit::{linear_fit, FitReport};
use crate::sets::{AssouadRegular, IntervalSet};

#[inline]
pub(crate) fn dyadic(j: u32) -> f64 {
    (-(j as f64)).exp2()
}

fn check_range(set: &IntervalSet, j_min: u32, j_max: u32, min_span: u32) -> Result<()> {
    if j_max < j_min + min_span {
        return Err(param(format!("need j_max >= j_min + {min_span}, got [{j_min}, {j_max}]")));
    }
    if dyadic(j_max) < set.merge_tol() {
        return Err(SmaxError::Resolution(format!("2^-{j_max} is below the merge tolerance")));
    }
    if set.is_empty() {
        return Err(param("dimension of the empty set"));
    }
    Ok(())
}

/// Slope of `log2 N(E, 2^-j)` against `j` for `j_min <= j <= j_max`.
pub fn minkowski_fit(set: &IntervalSet, j_min: u32, j_max: u32) -> Result<FitReport> {
    check_range(set, j_min, j_max, 2)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut scales = Vec::new();
    for j in j_min..=j_max {
        let delta = dyadic(j);
        let n = covering_number(set, delta)?;
        xs.push(j as f64);
        ys.push((n as f64).log2());
        scales.push((delta, n as f64));
    }
    linear_fit(&xs, &ys, scales)
}

/// Assouad spectrum at `theta`: for `δ = 2^-j` take the worst window of
/// length `δ^θ` (slid in half-length steps from the ambient's left end) and
/// fit `log2 max_I N(E ∩ I, δ)` against `log2(|I|/δ) = (1 - θ) j`.
pub fn assouad_spectrum_fit(set: &IntervalSet, theta: f64, j_min: u32, j_max: u32) -> Result<FitReport> {
    if !(0.0..1.0).contains(&theta) {
        return Err(param(format!("theta={theta} outside [0, 1)")));
    }
    check_range(set, j_min, j_max, 2)?;
    let rows: Vec<(u32, f64, u64)> = (j_min..=j_max)
        .into_par_iter()
        .map(|j| {
            let delta = dyadic(j);
            let len = delta.powf(theta);
            max_window_count(set, len, delta).map(|m| (j, delta, m.count))
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = rows.iter().map(|&(j, _, _)| (1.0 - theta) * j as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|&(_, _, c)| (c as f64).log2()).collect();
    let scales = rows.iter().map(|&(_, d, c)| (d, c as f64)).collect();
    linear_fit(&xs, &ys, scales)
}

/// One `(window level, fine level)` entry of the Assouad table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssouadCell {
    pub m: u32,
    pub j: u32,
    pub count: u64,
    /// `log2 max_I N(E ∩ I, 2^-j) / (j - m)` with `|I| = 2^-m`.
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssouadFit {
    /// Fit of the gap envelope `log2 max_m max_I N(E ∩ I, 2^-(m+g))` against
    /// the gap `g = j - m`; `slope` is the Assouad-dimension estimate.
    pub fit: FitReport,
    /// Largest single-pair exponent. Saturates at 1 for small gaps on any
    /// set containing two points, so it is diagnostic only.
    pub max_pair_exponent: f64,
    pub table: Vec<AssouadCell>,
}

impl AssouadFit {
    pub fn slope(&self) -> f64 {
        self.fit.slope
    }
}

/// Default regression range `[4, j]` with `j` the set's resolution level
/// (at least 7, so every fit has three scales).
pub fn default_levels(set: &IntervalSet) -> (u32, u32) {
    (4, set.resolution_level().max(7))
}

/// Assouad dimension estimate over all pairs `j_min <= m < j <= j_max`.
///
/// For each gap `g = j - m` the worst count over every window level and
/// every window position forms an upper envelope `M(g)`; the estimate is
/// the least-squares slope of `log2 M(g)` against `g` for
/// `g <= max(3, (j_max - j_min)/2)`. Larger gaps see only the few window
/// levels `m <= j_max - g` and saturate.
pub fn assouad_fit(set: &IntervalSet, j_min: u32, j_max: u32) -> Result<AssouadFit> {
    check_range(set, j_min, j_max, 3)?;
    let pairs: Vec<(u32, u32)> = (j_min..j_max)
        .flat_map(|m| (m + 1..=j_max).map(move |j| (m, j)))
        .collect();
    let table: Vec<AssouadCell> = pairs
        .into_par_iter()
        .map(|(m, j)| {
            let w = max_window_count(set, dyadic(m), dyadic(j))?;
            let exponent = (w.count.max(1) as f64).log2() / (j - m) as f64;
            Ok(AssouadCell { m, j, count: w.count, exponent })
        })
        .collect::<Result<_>>()?;

    let max_gap = j_max - j_min;
    let mut envelope = vec![0u64; max_gap as usize + 1];
    for c in &table {
        let g = (c.j - c.m) as usize;
        envelope[g] = envelope[g].max(c.count);
    }
    let fit_gap = (max_gap / 2).max(3);
    let xs: Vec<f64> = (1..=fit_gap).map(f64::from).collect();
    let ys: Vec<f64> = (1..=fit_gap).map(|g| (envelope[g as usize].max(1) as f64).log2()).collect();
    let scales = (1..=fit_gap).map(|g| (dyadic(g), envelope[g as usize] as f64)).collect();
    let fit = linear_fit(&xs, &ys, scales)?;
    let max_pair_exponent = table.iter().map(|c| c.exponent).fold(0.0, f64::max);
    Ok(AssouadFit { fit, max_pair_exponent, table })
}

/// Parameters of the six-quantity check: `β`, `γ` and the spectrum
/// parameter `θ` (normally `1 - β/γ`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SixParams {
    pub beta: f64,
    pub gamma: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SixSample {
    pub j: u32,
    pub delta: f64,
    /// `δ^β N(E, δ)`.
    pub global: f64,
    /// `sup_{|I| = δ^θ} (δ/|I|)^γ N(E ∩ I, δ)`.
    pub spectrum: f64,
    /// `sup_{|I| >= δ} (δ/|I|)^γ N(E ∩ I, δ)`.
    pub all_windows: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spread {
    pub max: f64,
    pub min: f64,
}

impl Spread {
    fn of(values: impl Iterator<Item = f64>) -> Spread {
        let (mut max, mut min) = (f64::NEG_INFINITY, f64::INFINITY);
        for v in values {
            max = max.max(v);
            min = min.min(v);
        }
        Spread { max, min }
    }

    pub fn ratio(&self) -> f64 {
        self.max / self.min
    }

    pub fn is_positive_finite(&self) -> bool {
        self.min > 0.0 && self.max.is_finite() && self.max >= self.min
    }
}

/// Dyadic-sample proxies for the six limsup/liminf quantities: (i)/(ii) are
/// `global.max`/`global.min`, (iii)/(iv) `spectrum`, (v)/(vi) `all_windows`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantitySixReport {
    pub params: SixParams,
    pub samples: Vec<SixSample>,
    pub global: Spread,
    pub spectrum: Spread,
    pub all_windows: Spread,
}

impl QuantitySixReport {
    /// The six values in order (i)..(vi).
    pub fn quantities(&self) -> [f64; 6] {
        [
            self.global.max,
            self.global.min,
            self.spectrum.max,
            self.spectrum.min,
            self.all_windows.max,
            self.all_windows.min,
        ]
    }

    /// All six positive and finite with every max/min ratio at most `bound`.
    pub fn passes(&self, bound: f64) -> bool {
        [self.global, self.spectrum, self.all_windows]
            .iter()
            .all(|s| s.is_positive_finite() && s.ratio() <= bound)
    }
}

/// Evaluates the six quantities at `δ = 2^-j`, `j_min <= j <= j_max`.
///
/// `resolution` is the smallest scale at which `E` is trusted (for the
/// Assouad-regular construction, `δ_gens`). Window lengths for the
/// all-windows supremum are the dyadic lengths `2^-m >= δ`, the spectrum
/// length `δ^θ`, and the ambient length.
pub fn quantity_six(
    set: &IntervalSet,
    params: SixParams,
    j_min: u32,
    j_max: u32,
    resolution: f64,
) -> Result<QuantitySixReport> {
    check_range(set, j_min, j_max, 2)?;
    if dyadic(j_max) < resolution {
        return Err(SmaxError::Resolution(format!(
            "2^-{j_max} lies below the construction resolution {resolution:e}"
        )));
    }
    let SixParams { beta, gamma, theta } = params;
    if !(0.0..1.0).contains(&theta) {
        return Err(param(format!("theta={theta} outside [0, 1)")));
    }
    let amb_len = set.ambient().len();
    let samples: Vec<SixSample> = (j_min..=j_max)
        .into_par_iter()
        .map(|j| {
            let delta = dyadic(j);
            let weighted = |len: f64| -> Result<f64> {
                let w = max_window_count(set, len, delta)?;
                Ok((delta / len).powf(gamma) * w.count as f64)
            };
            let global = delta.powf(beta) * covering_number(set, delta)? as f64;
            let spectrum_len = delta.powf(theta);
            let spectrum = weighted(spectrum_len)?;
            let mut all_windows = spectrum;
            let mut lengths: Vec<f64> = (0..=j).map(dyadic).filter(|&l| l <= amb_len).collect();
            if amb_len >= delta {
                lengths.push(amb_len);
            }
            for len in lengths {
                all_windows = all_windows.max(weighted(len)?);
            }
            Ok(SixSample { j, delta, global, spectrum, all_windows })
        })
        .collect::<Result<_>>()?;
    Ok(QuantitySixReport {
        params,
        global: Spread::of(samples.iter().map(|s| s.global)),
        spectrum: Spread::of(samples.iter().map(|s| s.spectrum)),
        all_windows: Spread::of(samples.iter().map(|s| s.all_windows)),
        samples,
    })
}

/// [`quantity_six`] for the Assouad-regular construction, with `θ = 1 - β/γ`
/// and the resolution floor `δ_gens`.
pub fn quantity_six_assouad(e: &AssouadRegular, j_min: u32, j_max: u32) -> Result<QuantitySixReport> {
    let params = SixParams { beta: e.beta, gamma: e.gamma, theta: e.theta };
    quantity_six(&e.set, params, j_min, j_max, e.finest_delta())
}

/// Finest dyadic level at or above the construction resolution `δ_gens`.
pub fn assouad_max_level(e: &AssouadRegular) -> u32 {
    (-e.finest_delta().log2()).floor() as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{cantor_endpoints, Interval};

    fn unit() -> IntervalSet {
        IntervalSet::new(vec![Interval::new(1.0, 2.0)], Interval::new(1.0, 2.0)).unwrap()
    }

    #[test]
    fn single_point_has_zero_slope() {
        let p = IntervalSet::from_points(&[1.5], Interval::new(1.0, 2.0)).unwrap();
        let f = minkowski_fit(&p, 2, 10).unwrap();
        assert_eq!(f.slope, 0.0);
        assert!(f.degenerate);
    }

    #[test]
    fn full_interval_dimensions_are_one() {
        let f = minkowski_fit(&unit(), 2, 10).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12);
        let a = assouad_fit(&unit(), 2, 10).unwrap();
        assert!((a.slope() - 1.0).abs() < 1e-12);
        let s = assouad_spectrum_fit(&unit(), 0.5, 2, 12).unwrap();
        assert!((s.slope - 1.0).abs() < 0.05);
    }

    #[test]
    fn theta_zero_matches_minkowski() {
        let e = cantor_endpoints(Interval::new(1.0, 2.0), 1.0 / 3.0, 9).unwrap();
        let a = minkowski_fit(&e, 3, 12).unwrap();
        let b = assouad_spectrum_fit(&e, 0.0, 3, 12).unwrap();
        assert_eq!(a.scales, b.scales);
        assert!((a.slope - b.slope).abs() < 1e-12);
    }

    #[test]
    fn theta_out_of_range() {
        assert!(assouad_spectrum_fit(&unit(), 1.0, 2, 8).is_err());
    }

    #[test]
    fn six_on_unit_interval() {
        let r = quantity_six(&unit(), SixParams { beta: 1.0, gamma: 1.0, theta: 0.0 }, 2, 10, 0.0).unwrap();
        for s in &r.samples {
            assert!((s.global - 1.0).abs() < 1e-12);
            assert!(s.all_windows >= s.spectrum);
        }
    }

    #[test]
    fn six_rejects_range_below_resolution() {
        let r = quantity_six(&unit(), SixParams { beta: 1.0, gamma: 1.0, theta: 0.0 }, 2, 10, 1e-2);
        assert!(matches!(r, Err(SmaxError::Resolution(_))));
    }
}
