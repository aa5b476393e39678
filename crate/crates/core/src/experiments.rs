//! Scaling sweeps `δ → 0` of `‖M_E f_δ‖_q / ‖f_δ‖_p` for the ball, annulus
//! and cylinder-annulus test functions, and the sampled check of the
//! cylinder inclusion.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::covering::greedy_starts;
use crate::dimension::minkowski_fit;
use crate::error::{param, Result, SmaxError};
use crate::fit::{linear_fit, FitReport};
use crate::region::{l_functional, RieszPoint};
use crate::set_spec::{realize, SetSpec};
use crate::sets::{assouad_regular_set, Interval, IntervalSet};
use crate::spherical::{
    cylinder_average, exponent_from_inverse, lp_norm, maximal_value_in, radial_average, CylProfile,
    EvalGrid, RadialProfile,
};

/// Region half-size constant `c` used by the cylinder sweep.
pub const REGION_C: f64 = 0.01;
/// Radial grid step as a fraction of `δ`.
pub const GRID_FRACTION: f64 = 1.0 / 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Ball,
    Annulus,
    Cylinder,
}

impl std::str::FromStr for Family {
    type Err = SmaxError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ball" => Ok(Family::Ball),
            "annulus" => Ok(Family::Annulus),
            "cylinder" => Ok(Family::Cylinder),
            _ => Err(param(format!("unknown sweep family `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRecord {
    pub delta: f64,
    pub norm_f_p: f64,
    pub norm_mf_q_lower: f64,
    pub ratio: f64,
}

impl SweepRecord {
    fn new(delta: f64, norm_f_p: f64, norm_mf_q_lower: f64) -> Result<Self> {
        let ratio = norm_mf_q_lower / norm_f_p;
        if !(norm_f_p > 0.0 && norm_mf_q_lower > 0.0 && ratio.is_finite()) {
            return Err(SmaxError::Precondition(format!(
                "non-positive norms at delta={delta}: |f|_p={norm_f_p}, |Mf|_q={norm_mf_q_lower}"
            )));
        }
        Ok(SweepRecord { delta, norm_f_p, norm_mf_q_lower, ratio })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepParams {
    pub d: u32,
    pub set: SetSpec,
    pub pt: RieszPoint,
    /// Minkowski slope used in the ball prediction.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_tilde: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedScale {
    pub delta: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub family: Family,
    pub params: SweepParams,
    pub records: Vec<SweepRecord>,
    /// Slope of `log2 ratio` against `log2 δ`.
    pub fit: FitReport,
    pub predicted_exponent: f64,
    pub skipped: Vec<SkippedScale>,
}

impl SweepResult {
    pub fn slope_error(&self) -> f64 {
        (self.fit.slope - self.predicted_exponent).abs()
    }

    /// Ratios over the last `n` scales are strictly increasing.
    pub fn blows_up(&self, n: usize) -> bool {
        let r = &self.records;
        r.len() >= n && r[r.len() - n..].windows(2).all(|w| w[1].ratio > w[0].ratio)
    }
}

/// `2^-lo, ..., 2^-hi`.
pub fn dyadic_deltas(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(|j| (-(j as f64)).exp2()).collect()
}

fn check_deltas(deltas: &[f64]) -> Result<()> {
    if deltas.len() < 4 {
        return Err(param(format!("a sweep needs at least 4 scales, got {}", deltas.len())));
    }
    if deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
        return Err(param("sweep scales must lie in (0, 1)"));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(param("sweep scales must be strictly decreasing"));
    }
    Ok(())
}

fn check_point(pt: RieszPoint) -> Result<()> {
    RieszPoint::new(pt.ip, pt.iq).map(|_| ())
}

/// Level with `2^-j <= δ`, and the sampling level two steps finer.
fn levels_for(delta: f64) -> (u32, u32) {
    let j = (-delta.log2() - 1e-9).ceil().max(0.0) as u32;
    (j, j + 2)
}

fn fit_records(records: &[SweepRecord]) -> Result<FitReport> {
    let xs: Vec<f64> = records.iter().map(|r| r.delta.log2()).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.ratio.log2()).collect();
    let scales = records.iter().map(|r| (r.delta, r.ratio)).collect();
    linear_fit(&xs, &ys, scales)
}

fn set_hull(set: &IntervalSet) -> Result<(f64, f64)> {
    match (set.min(), set.max()) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(param("sweeps need a nonempty dilation set")),
    }
}

/// `‖M_E f‖_q` on a radial grid, with the dilations for radius `ρ`
/// restricted to `window(ρ)`.
fn radial_maximal_norm<W>(
    set: &IntervalSet,
    profile: &RadialProfile,
    grid: &EvalGrid,
    j_res: u32,
    q: f64,
    window: W,
) -> Result<f64>
where
    W: Fn(f64) -> Interval + Sync,
{
    grid.require_resolution(profile.feature_scale())?;
    let values: Vec<f64> = grid
        .nodes
        .par_iter()
        .map(|&(rho, _)| maximal_value_in(set, |t| radial_average(profile, t, rho), j_res, Some(window(rho))))
        .collect();
    lp_norm(&values, grid, q)
}

/// Ball family: `f_δ = 1_{B_δ}`, predicted exponent
/// `(d-1) + (1-β̂)/q - d/p` with `β̂` the Minkowski slope of `E` over the
/// sweep's own dyadic levels (or `beta_override`).
pub fn sweep_ball(
    d: u32,
    spec: &SetSpec,
    pt: RieszPoint,
    deltas: &[f64],
    beta_override: Option<f64>,
) -> Result<SweepResult> {
    check_deltas(deltas)?;
    check_point(pt)?;
    let set = realize(spec)?;
    let (lo, hi) = set_hull(&set)?;
    let beta_hat = match beta_override {
        Some(b) => b,
        None => {
            let (j_lo, _) = levels_for(deltas[0]);
            let (j_hi, _) = levels_for(*deltas.last().unwrap());
            minkowski_fit(&set, j_lo, j_hi)?.slope
        }
    };
    let (p, q) = (exponent_from_inverse(pt.ip), exponent_from_inverse(pt.iq));
    let records: Vec<SweepRecord> = deltas
        .iter()
        .map(|&delta| {
            let (_, j_res) = levels_for(delta);
            let profile = RadialProfile::ball(d, delta)?;
            let grid = EvalGrid::radial(d, (lo - 2.0 * delta).max(0.0), hi + 2.0 * delta, delta * GRID_FRACTION)?;
            let mf = radial_maximal_norm(&set, &profile, &grid, j_res, q, |rho| {
                Interval::new(rho - delta, rho + delta)
            })?;
            SweepRecord::new(delta, profile.norm(p), mf)
        })
        .collect::<Result<_>>()?;
    let df = d as f64;
    Ok(SweepResult {
        family: Family::Ball,
        params: SweepParams {
            d,
            set: spec.clone(),
            pt,
            beta_hat: Some(beta_hat),
            beta: beta_override,
            gamma_tilde: None,
            theta: None,
        },
        fit: fit_records(&records)?,
        predicted_exponent: (df - 1.0) + (1.0 - beta_hat) * pt.iq - df * pt.ip,
        records,
        skipped: Vec::new(),
    })
}

/// Annulus family: `f_δ` the indicator of `{ ||y| - t*| <= δ }` with
/// `t* = min E`, predicted exponent `d/q - 1/p`.
pub fn sweep_annulus(d: u32, spec: &SetSpec, pt: RieszPoint, deltas: &[f64]) -> Result<SweepResult> {
    check_deltas(deltas)?;
    check_point(pt)?;
    let set = realize(spec)?;
    let (t_star, hi) = set_hull(&set)?;
    if deltas[0] >= t_star {
        return Err(param("annulus sweep needs delta < min E"));
    }
    let (p, q) = (exponent_from_inverse(pt.ip), exponent_from_inverse(pt.iq));
    let records: Vec<SweepRecord> = deltas
        .iter()
        .map(|&delta| {
            let (_, j_res) = levels_for(delta);
            let profile = RadialProfile::annulus(d, t_star, delta)?;
            let grid = EvalGrid::radial(d, 0.0, hi + 2.0 * delta, delta * GRID_FRACTION)?;
            let mf = radial_maximal_norm(&set, &profile, &grid, j_res, q, |rho| {
                Interval::new((rho - t_star).abs() - delta, rho + t_star + delta)
            })?;
            SweepRecord::new(delta, profile.norm(p), mf)
        })
        .collect::<Result<_>>()?;
    let df = d as f64;
    Ok(SweepResult {
        family: Family::Annulus,
        params: SweepParams { d, set: spec.clone(), pt, beta_hat: None, beta: None, gamma_tilde: None, theta: None },
        fit: fit_records(&records)?,
        predicted_exponent: df * pt.iq - pt.ip,
        records,
        skipped: Vec::new(),
    })
}

/// Nodes per axis of the grid laid over each cylinder region.
const REGION_NODES: usize = 3;

/// Cylinder family on an Assouad-regular set. Each scale is a construction
/// level `k`: `δ = δ_k`, `I = J_k`, `r` the left end of `J_k`,
/// `σ = δ^{α/2}` with `α = β/γ̃`. `‖M_E g‖_q` is bounded below by the
/// disjoint regions `{|x'| <= cδ/σ, |x_d - (r - t_J)| <= cδ}` over the greedy
/// cover starts `t_J` of `E ∩ I`. When `deltas` is given each entry is
/// matched to the level whose `δ_k` is within a factor 2; unmatched entries
/// are skipped.
pub fn sweep_cylinder(
    d: u32,
    spec: &SetSpec,
    beta: f64,
    gamma_tilde: f64,
    pt: RieszPoint,
    deltas: Option<&[f64]>,
) -> Result<SweepResult> {
    check_point(pt)?;
    let predicted = l_functional(d, beta, gamma_tilde, pt)?;
    if d < 2 {
        return Err(param("cylinder sweep needs d >= 2"));
    }
    let SetSpec::AssouadRegular { beta: sb, gamma: sg, gens } = *spec else {
        return Err(SmaxError::Window("the cylinder sweep needs an assouad_regular set".into()));
    };
    let e = assouad_regular_set(sb, sg, gens)?;
    let alpha = beta / gamma_tilde;
    let mut skipped = Vec::new();
    let levels: Vec<_> = match deltas {
        None => e.levels.clone(),
        Some(ds) => {
            let mut chosen: Vec<crate::sets::AssouadLevel> = Vec::new();
            for &delta in ds {
                let best = e
                    .levels
                    .iter()
                    .min_by(|a, b| (a.delta / delta).log2().abs().total_cmp(&(b.delta / delta).log2().abs()));
                match best {
                    Some(l) if (l.delta / delta).log2().abs() <= 1.0 && chosen.last() != Some(l) => chosen.push(*l),
                    _ => skipped.push(SkippedScale {
                        delta,
                        reason: "no construction level within a factor 2".into(),
                    }),
                }
            }
            chosen
        }
    };
    let (p, q) = (exponent_from_inverse(pt.ip), exponent_from_inverse(pt.iq));
    let mut records = Vec::with_capacity(levels.len());
    for lvl in &levels {
        let delta = lvl.delta;
        let sigma = delta.powf(alpha / 2.0);
        let r = lvl.window.lo;
        let profile = CylProfile::new(d, r, delta, sigma)?;
        let starts = greedy_starts(&e.set, lvl.window, delta)?;
        if starts.is_empty() {
            skipped.push(SkippedScale { delta, reason: "window misses E".into() });
            continue;
        }
        let s_max = REGION_C * delta / sigma;
        let half = REGION_C * delta;
        let region_sum: f64 = starts
            .par_iter()
            .map(|&t| -> Result<f64> {
                let xd = r - t;
                let grid = EvalGrid::cylindrical(d, s_max, Interval::new(xd - half, xd + half), REGION_NODES, REGION_NODES)?;
                let vals: Vec<f64> =
                    grid.nodes.iter().map(|&(s, x)| cylinder_average(&profile, t, s, x).value).collect();
                Ok(if q.is_infinite() {
                    vals.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
                } else {
                    vals.iter().zip(&grid.weights).map(|(v, w)| w * v.abs().powf(q)).sum()
                })
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, |acc, v| if q.is_infinite() { acc.max(v) } else { acc + v });
        let mf = if q.is_infinite() { region_sum } else { region_sum.powf(1.0 / q) };
        records.push(SweepRecord::new(delta, profile.norm(p), mf)?);
    }
    if records.len() < 4 {
        return Err(param(format!("cylinder sweep produced {} scales, need at least 4", records.len())));
    }
    Ok(SweepResult {
        family: Family::Cylinder,
        params: SweepParams {
            d,
            set: spec.clone(),
            pt,
            beta_hat: None,
            beta: Some(beta),
            gamma_tilde: Some(gamma_tilde),
            theta: Some(1.0 - alpha),
        },
        fit: fit_records(&records)?,
        predicted_exponent: predicted,
        records,
        skipped,
    })
}

/// Configuration of the sampled cylinder-inclusion check. The window is
/// `I = [r, r + δσ^{-2}]` with `σ = δ^{α/2}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InclusionConfig {
    pub d: u32,
    pub alpha: f64,
    pub r: f64,
    pub c: f64,
    pub samples: usize,
    pub deltas: Vec<f64>,
    /// Region points per scale at which `A_t g` is evaluated.
    pub average_points: usize,
    pub seed: u64,
}

impl Default for InclusionConfig {
    fn default() -> Self {
        InclusionConfig {
            d: 3,
            alpha: 0.5,
            r: 1.0,
            c: 0.01,
            samples: 100_000,
            deltas: dyadic_deltas(8, 14),
            average_points: 16,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct InclusionViolations {
    /// `||x'|² + (x_d+t)² - r²| <= 6cδ`.
    pub radial_6c: u64,
    /// `|2t<x',y'>| <= 4c²δ`.
    pub cross_4c2: u64,
    /// `|2t x_d (sqrt(1-|y'|²) - 1)| <= 4cδ`.
    pub vertical_4c: u64,
    /// `||x+ty| - r| <= δ`.
    pub shell: u64,
    /// `|x' + ty'| <= σ`.
    pub cylinder: u64,
}

impl InclusionViolations {
    pub fn total(&self) -> u64 {
        self.radial_6c + self.cross_4c2 + self.vertical_4c + self.shell + self.cylinder
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InclusionScale {
    pub delta: f64,
    pub sigma: f64,
    pub window_len: f64,
    pub samples: usize,
    pub violations: InclusionViolations,
    /// `min A_t g / σ^{d-1}` over the sampled region points.
    pub min_average_ratio: f64,
    pub quadrature_converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InclusionReport {
    pub config: InclusionConfig,
    pub scales: Vec<InclusionScale>,
}

impl InclusionReport {
    pub fn total_violations(&self) -> u64 {
        self.scales.iter().map(|s| s.violations.total()).sum()
    }

    pub fn min_average_ratio(&self) -> f64 {
        self.scales.iter().map(|s| s.min_average_ratio).fold(f64::INFINITY, f64::min)
    }
}

/// Uniform point in the closed ball of radius `radius` in `R^k`.
fn ball_point(rng: &mut ChaCha8Rng, k: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 <= 1.0 {
            return v.into_iter().map(|x| x * radius).collect();
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Samples `(x, t, y)` with `t ∈ I`, `|x'| <= cδ/σ`, `|x_d + t - r| <= cδ`
/// and `y ∈ S^{d-1}`, `y_d > 0`, `|y'| <= cσ`, and counts failures of the
/// three intermediate bounds and of the conclusion `g(x + ty) = 1`.
pub fn verify_inclusion_44(config: &InclusionConfig) -> Result<InclusionReport> {
    let InclusionConfig { d, alpha, r, c, samples, .. } = *config;
    if d < 2 {
        return Err(param("inclusion check needs d >= 2"));
    }
    if !(alpha > 0.0 && alpha <= 1.0 && c > 0.0 && r > 0.0) {
        return Err(param("inclusion check needs 0 < alpha <= 1, c > 0, r > 0"));
    }
    let k = d as usize - 1;
    let scales = config
        .deltas
        .par_iter()
        .enumerate()
        .map(|(idx, &delta)| -> Result<InclusionScale> {
            let sigma = delta.powf(alpha / 2.0);
            let window_len = delta / (sigma * sigma);
            if window_len > 1.0 {
                return Err(SmaxError::Precondition(format!("delta={delta} exceeds sigma^2")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(idx as u64));
            let mut v = InclusionViolations::default();
            let draw = |rng: &mut ChaCha8Rng| {
                let t = r + rng.gen_range(0.0..=window_len);
                let xp = ball_point(rng, k, c * delta / sigma);
                let xd = r - t + rng.gen_range(-c * delta..=c * delta);
                (t, xp, xd)
            };
            for _ in 0..samples {
                let (t, xp, xd) = draw(&mut rng);
                let yp = ball_point(&mut rng, k, c * sigma);
                let yp2 = dot(&yp, &yp);
                let yd = (1.0 - yp2).sqrt();
                let xp2 = dot(&xp, &xp);
                if (xp2 + (xd + t).powi(2) - r * r).abs() > 6.0 * c * delta {
                    v.radial_6c += 1;
                }
                if (2.0 * t * dot(&xp, &yp)).abs() > 4.0 * c * c * delta {
                    v.cross_4c2 += 1;
                }
                if (2.0 * t * xd * (yd - 1.0)).abs() > 4.0 * c * delta {
                    v.vertical_4c += 1;
                }
                let zp: Vec<f64> = xp.iter().zip(&yp).map(|(a, b)| a + t * b).collect();
                let zp2 = dot(&zp, &zp);
                let zd = xd + t * yd;
                if ((zp2 + zd * zd).sqrt() - r).abs() > delta {
                    v.shell += 1;
                }
                if zp2.sqrt() > sigma {
                    v.cylinder += 1;
                }
            }
            let profile = CylProfile::new(d, r, delta, sigma)?;
            let mut min_ratio = f64::INFINITY;
            let mut converged = true;
            for _ in 0..config.average_points {
                let (t, xp, xd) = draw(&mut rng);
                let a = cylinder_average(&profile, t, dot(&xp, &xp).sqrt(), xd);
                converged &= a.converged;
                min_ratio = min_ratio.min(a.value / sigma.powi(d as i32 - 1));
            }
            Ok(InclusionScale {
                delta,
                sigma,
                window_len,
                samples,
                violations: v,
                min_average_ratio: min_ratio,
                quadrature_converged: converged,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InclusionReport { config: config.clone(), scales })
}

/// The largest `c` in `candidates` whose sampled check has no violation of
/// the conclusion (intermediate bounds are not required).
pub fn largest_inclusion_c(base: &InclusionConfig, candidates: &[f64]) -> Result<Option<f64>> {
    let mut best = None;
    for &c in candidates {
        let cfg = InclusionConfig { c, average_points: 0, ..base.clone() };
        let rep = verify_inclusion_44(&cfg)?;
        let ok = rep.scales.iter().all(|s| s.violations.shell == 0 && s.violations.cylinder == 0);
        if ok && best.is_none_or(|b| c > b) {
            best = Some(c);
        }
    }
    Ok(best)
}
