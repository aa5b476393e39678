//! Spherical averages `A_t f` of radial and cylinder-annulus indicators,
//! the sampled maximal value over a dilation set, and weighted `L^p` norms.

use std::f64::consts::PI;

use serde::Serialize;

use crate::covering::dyadic_cells;
use crate::error::{param, Result, SmaxError};
use crate::quadrature::{adaptive, gl32, Integral};
use crate::sets::{Interval, IntervalSet};

/// `Γ(n/2)` for a positive integer `n`.
pub fn gamma_half(n: u32) -> f64 {
    match n {
        0 => f64::INFINITY,
        1 => PI.sqrt(),
        2 => 1.0,
        _ => (n as f64 / 2.0 - 1.0) * gamma_half(n - 2),
    }
}

/// Surface measure of the unit sphere `S^{d-1}` in `R^d`.
pub fn sphere_area(d: u32) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / gamma_half(d)
}

/// Volume of the unit ball in `R^d`.
pub fn ball_volume(d: u32) -> f64 {
    sphere_area(d) / d as f64
}

/// `p` from `1/p`, with `1/p = 0` meaning `p = ∞`.
pub fn exponent_from_inverse(ip: f64) -> f64 {
    if ip == 0.0 {
        f64::INFINITY
    } else {
        1.0 / ip
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapFraction {
    pub value: f64,
    /// Set when `u` was outside `[-1, 1]` and had to be clamped.
    pub clamped: bool,
}

/// Normalized measure of the cap `{y ∈ S^{d-1} : y_d >= u}`.
pub fn cap_fraction(d: u32, u: f64) -> Result<CapFraction> {
    if d < 2 {
        return Err(param(format!("cap_fraction needs d >= 2, got {d}")));
    }
    if u.is_nan() {
        return Err(param("cap_fraction at NaN"));
    }
    let clamped = !(-1.0..=1.0).contains(&u);
    Ok(CapFraction { value: cap(d, u.clamp(-1.0, 1.0)), clamped })
}

#[inline]
pub(crate) fn cap(d: u32, u: f64) -> f64 {
    match d {
        2 => u.acos() / PI,
        3 => 0.5 * (1.0 - u),
        _ => {
            // ∫_0^{arccos u} sin^{d-2}φ dφ over the same integral on [0, π].
            let k = (d - 2) as i32;
            let f = |phi: f64| phi.sin().powi(k);
            let rule = gl32();
            rule.integrate(&f, 0.0, u.acos()) / rule.integrate(&f, 0.0, PI)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialPiece {
    pub r_lo: f64,
    pub r_hi: f64,
    pub value: f64,
}

/// A piecewise-constant radial function on `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    pub d: u32,
    pieces: Vec<RadialPiece>,
}

impl RadialProfile {
    pub fn new(d: u32, mut pieces: Vec<RadialPiece>) -> Result<Self> {
        if d < 2 {
            return Err(param("radial profiles need d >= 2"));
        }
        pieces.sort_by(|a, b| a.r_lo.total_cmp(&b.r_lo));
        for p in &pieces {
            if !(p.r_lo >= 0.0 && p.r_lo < p.r_hi && p.r_hi.is_finite() && p.value.is_finite()) {
                return Err(param(format!("bad radial piece {p:?}")));
            }
        }
        if pieces.windows(2).any(|w| w[1].r_lo < w[0].r_hi) {
            return Err(param("radial pieces overlap"));
        }
        Ok(RadialProfile { d, pieces })
    }

    /// Indicator of the closed ball of the given radius.
    pub fn ball(d: u32, radius: f64) -> Result<Self> {
        Self::new(d, vec![RadialPiece { r_lo: 0.0, r_hi: radius, value: 1.0 }])
    }

    /// Indicator of `{ |y| ∈ [center - half, center + half] }`.
    pub fn annulus(d: u32, center: f64, half: f64) -> Result<Self> {
        if !(half > 0.0) {
            return Err(param("annulus half-width must be positive"));
        }
        Self::new(d, vec![RadialPiece { r_lo: (center - half).max(0.0), r_hi: center + half, value: 1.0 }])
    }

    pub fn pieces(&self) -> &[RadialPiece] {
        &self.pieces
    }

    pub fn value_at(&self, r: f64) -> f64 {
        self.pieces.iter().find(|p| p.r_lo <= r && r <= p.r_hi).map_or(0.0, |p| p.value)
    }

    pub fn max_abs(&self) -> f64 {
        self.pieces.iter().map(|p| p.value.abs()).fold(0.0, f64::max)
    }

    /// Narrowest piece width, the feature scale grids must resolve.
    pub fn feature_scale(&self) -> f64 {
        self.pieces.iter().map(|p| p.r_hi - p.r_lo).fold(f64::INFINITY, f64::min)
    }

    /// Closed-form `‖f‖_p`.
    pub fn norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_abs();
        }
        let vd = ball_volume(self.d);
        let di = self.d as i32;
        let s: f64 = self
            .pieces
            .iter()
            .map(|q| q.value.abs().powf(p) * vd * (q.r_hi.powi(di) - q.r_lo.powi(di)))
            .sum();
        s.powf(1.0 / p)
    }
}

/// `A_t f` at any point with `|x| = rho`, exact up to cap accuracy.
pub fn radial_average(profile: &RadialProfile, t: f64, rho: f64) -> f64 {
    if rho == 0.0 {
        return profile.value_at(t);
    }
    let d = profile.d;
    let u = |r: f64| ((rho * rho + t * t - r * r) / (2.0 * t * rho)).clamp(-1.0, 1.0);
    let (near, far) = ((t - rho).abs(), t + rho);
    profile
        .pieces
        .iter()
        .filter(|p| p.r_hi >= near && p.r_lo <= far)
        .map(|p| p.value * (cap(d, u(p.r_hi)) - cap(d, u(p.r_lo))))
        .sum()
}

/// Indicator of `{ y : ||y| - r| <= delta, |y'| <= sigma }` in `R^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CylProfile {
    pub d: u32,
    pub r: f64,
    pub delta: f64,
    pub sigma: f64,
}

impl CylProfile {
    pub fn new(d: u32, r: f64, delta: f64, sigma: f64) -> Result<Self> {
        if d < 2 {
            return Err(param("cylinder profiles need d >= 2"));
        }
        if !(r > 0.0 && delta > 0.0 && sigma >= delta && sigma.is_finite() && r.is_finite()) {
            return Err(param(format!("need r > 0 and 0 < delta <= sigma, got r={r}, delta={delta}, sigma={sigma}")));
        }
        Ok(CylProfile { d, r, delta, sigma })
    }

    /// Lebesgue measure of the support.
    pub fn measure(&self) -> f64 {
        let (outer, inner) = (self.r + self.delta, (self.r - self.delta).max(0.0));
        let k = (self.d - 2) as i32;
        let f = |s: f64| {
            let hi = (outer * outer - s * s).max(0.0).sqrt();
            let lo = (inner * inner - s * s).max(0.0).sqrt();
            s.powi(k) * 2.0 * (hi - lo)
        };
        let top = self.sigma.min(outer);
        let mut cuts = vec![0.0, top];
        if inner > 0.0 && inner < top {
            cuts.insert(1, inner);
        }
        let total: f64 = cuts
            .windows(2)
            .map(|w| adaptive(&f, w[0], w[1], 8, 1e-15 * outer.powi(self.d as i32)).value)
            .sum();
        sphere_area(self.d - 1) * total
    }

    pub fn norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            1.0
        } else {
            self.measure().powf(1.0 / p)
        }
    }
}

const CYL_PANELS: usize = 16;
const CYL_TOL: f64 = 1e-7;

/// `A_t g(x)` for `x = (x', x_d)` with `|x'| = x_perp`.
///
/// The angle between `x'` and the horizontal part of `y` is integrated
/// exactly through cap measures on `S^{d-2}`; the polar angle is integrated
/// by adaptive Gauss–Legendre over the range where `|x' - t y'| <= σ` is
/// possible. For `d = 2` the value is an exact arc length.
pub fn cylinder_average(profile: &CylProfile, t: f64, x_perp: f64, x_d: f64) -> Integral {
    if profile.d == 2 {
        return Integral::exact(planar_cylinder_average(profile, t, x_perp, x_d));
    }
    if x_perp == 0.0 {
        return Integral::exact(axial_cylinder_average(profile, t, x_d));
    }
    let CylProfile { d, r, delta, sigma } = *profile;
    let lower2 = (r - delta).max(0.0).powi(2);
    let upper2 = (r + delta).powi(2);
    let k = (d - 2) as i32;
    let frac = |phi: f64| -> f64 {
        let (s, c) = phi.sin_cos();
        let zd = x_d - t * c;
        let a = lower2 - zd * zd;
        let b = (sigma * sigma).min(upper2 - zd * zd);
        if b < a.max(0.0) {
            return 0.0;
        }
        let p = x_perp * x_perp + t * t * s * s;
        let q = 2.0 * x_perp * t * s;
        let w = s.powi(k);
        if q <= 1e-300 {
            return if p >= a && p <= b { w } else { 0.0 };
        }
        let c_lo = (p - b) / q;
        let c_hi = (p - a) / q;
        if c_lo > 1.0 || c_hi < -1.0 {
            return 0.0;
        }
        w * (cap(d - 1, c_lo.clamp(-1.0, 1.0)) - cap(d - 1, c_hi.clamp(-1.0, 1.0)))
    };
    let s_lo = ((x_perp - sigma) / t).max(0.0);
    let s_hi = (x_perp + sigma) / t;
    let ranges: Vec<(f64, f64)> = if s_hi >= 1.0 && s_lo <= 0.0 {
        vec![(0.0, PI)]
    } else if s_hi >= 1.0 {
        let a = s_lo.asin();
        vec![(a, PI - a)]
    } else {
        let (a, b) = (s_lo.asin(), s_hi.asin());
        vec![(a, b), (PI - b, PI - a)]
    };
    let norm = sphere_area(d) / sphere_area(d - 1);
    let tol = CYL_TOL * sigma.min(1.0).powi(d as i32 - 1);
    let mut out = Integral::exact(0.0);
    for (a, b) in ranges {
        let part = adaptive(&frac, a, b, CYL_PANELS, tol * norm);
        out.value += part.value;
        out.capped_error += part.capped_error;
    }
    out.value /= norm;
    out.capped_error /= norm;
    out.converged = out.capped_error <= tol;
    out
}

/// `x` on the axis: with `u = y_d`, `|x - ty|² = x_d² + t² - 2 t x_d u` and
/// `|x' - ty'| = t sqrt(1 - u²)`, so the support is a union of `u`-ranges.
fn axial_cylinder_average(profile: &CylProfile, t: f64, x_d: f64) -> f64 {
    let CylProfile { d, r, delta, sigma } = *profile;
    let band = |a: f64, b: f64| -> f64 {
        let (a, b) = (a.max(-1.0), b.min(1.0));
        if b > a {
            cap(d, a) - cap(d, b)
        } else {
            0.0
        }
    };
    // Shell condition as a u-range.
    let base = x_d * x_d + t * t;
    let lower2 = (r - delta).max(0.0).powi(2);
    let upper2 = (r + delta).powi(2);
    let (s_lo, s_hi) = if x_d == 0.0 {
        if base >= lower2 && base <= upper2 {
            (-1.0, 1.0)
        } else {
            return 0.0;
        }
    } else {
        let u_of = |rad2: f64| (base - rad2) / (2.0 * t * x_d);
        let (a, b) = (u_of(upper2), u_of(lower2));
        (a.min(b), a.max(b))
    };
    // Cylinder condition: |u| >= w.
    let w2 = 1.0 - (sigma / t).powi(2);
    if w2 <= 0.0 {
        return band(s_lo, s_hi);
    }
    let w = w2.sqrt();
    band(s_lo, s_hi.min(-w)) + band(s_lo.max(w), s_hi)
}

/// Arcs `{φ ∈ [0, 2π) : cos(φ - c) >= v}`.
fn arcs(c: f64, v: f64) -> Vec<(f64, f64)> {
    const TAU: f64 = 2.0 * PI;
    if v <= -1.0 {
        return vec![(0.0, TAU)];
    }
    if v > 1.0 {
        return Vec::new();
    }
    let a = v.acos();
    let start = (c - a).rem_euclid(TAU);
    let end = start + 2.0 * a;
    if end <= TAU {
        vec![(start, end)]
    } else {
        vec![(start, TAU), (0.0, end - TAU)]
    }
}

fn intersect_arcs(x: &[(f64, f64)], y: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(a, b) in x {
        for &(c, d) in y {
            let (lo, hi) = (a.max(c), b.min(d));
            if hi > lo {
                out.push((lo, hi));
            }
        }
    }
    out
}

fn planar_cylinder_average(profile: &CylProfile, t: f64, x_perp: f64, x_d: f64) -> f64 {
    let CylProfile { r, delta, sigma, .. } = *profile;
    let half_pi = 0.5 * PI;
    // |x_perp - t sin φ| <= σ.
    let mut set = intersect_arcs(&arcs(half_pi, (x_perp - sigma) / t), &arcs(-half_pi, -(x_perp + sigma) / t));
    let rho = x_perp.hypot(x_d);
    if rho == 0.0 {
        if (t - r).abs() > delta {
            return 0.0;
        }
    } else {
        // |x - t y|^2 = ρ² + t² - 2tρ cos(φ - φ_x).
        let phi_x = x_perp.atan2(x_d);
        let u = |radius: f64| (rho * rho + t * t - radius * radius) / (2.0 * t * rho);
        set = intersect_arcs(&set, &arcs(phi_x, u(r + delta)));
        if r - delta > 0.0 {
            set = intersect_arcs(&set, &arcs(phi_x + PI, -u(r - delta)));
        }
    }
    set.iter().map(|(a, b)| b - a).sum::<f64>() / (2.0 * PI)
}

/// Dilations sampled by [`maximal_value`]: for every level-`j_res` cell
/// meeting `E ∩ window`, the points of `E ∩ window ∩ cell` nearest to the
/// cell's left endpoint and to its midpoint.
///
/// Every sample lies in `E`, so the resulting maximum is a lower bound for
/// the supremum over `E`. When the component endpoints of `E` lie on the
/// half-cell grid the samples are exactly the half-cell grid points in `E`,
/// which makes the maximum monotone under inclusion of such sets.
pub fn sample_dilations(set: &IntervalSet, j_res: u32, window: Option<Interval>) -> Vec<f64> {
    let cells = dyadic_cells(set, j_res, window);
    let w = cells.width();
    let win = window.unwrap_or(Interval::new(f64::NEG_INFINITY, f64::INFINITY));
    let mut out = Vec::with_capacity(2 * cells.len());
    for &k in &cells.indices {
        let lo = (k as f64 * w).max(win.lo);
        let hi = ((k + 1) as f64 * w).min(win.hi);
        for target in [k as f64 * w, (k as f64 + 0.5) * w] {
            let mut best: Option<f64> = None;
            for iv in set.clipped(lo, hi) {
                let cand = target.clamp(iv.lo, iv.hi);
                if best.is_none_or(|b| (cand - target).abs() < (b - target).abs()) {
                    best = Some(cand);
                }
            }
            if let Some(b) = best {
                if out.last() != Some(&b) {
                    out.push(b);
                }
            }
        }
    }
    out
}

/// `max |evaluator(t)|` over [`sample_dilations`] of `E` at level `j_res`.
/// Callers choose `2^-j_res <= δ/4` for a profile with feature scale `δ`.
pub fn maximal_value<F: Fn(f64) -> f64>(set: &IntervalSet, evaluator: F, j_res: u32) -> f64 {
    maximal_value_in(set, evaluator, j_res, None)
}

/// [`maximal_value`] restricted to the dilations in `window`.
pub fn maximal_value_in<F: Fn(f64) -> f64>(
    set: &IntervalSet,
    evaluator: F,
    j_res: u32,
    window: Option<Interval>,
) -> f64 {
    sample_dilations(set, j_res, window).into_iter().map(|t| evaluator(t).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Radial,
    Cylindrical,
}

/// Quadrature nodes with `d`-dimensional volume weights.
///
/// Radial cells carry two Gauss–Legendre nodes `(ρ, 0)` with weight
/// `ω_{d-1} ρ^{d-1} Δρ/2` each; cylindrical cells carry one midpoint node
/// `(|x'|, x_d)` with weight `ω_{d-2} |x'|^{d-2} Δ|x'| Δx_d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalGrid {
    pub d: u32,
    pub kind: GridKind,
    pub nodes: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
    /// Largest cell side.
    pub step: f64,
}

impl EvalGrid {
    /// Cells covering `[lo, hi]` with side at most `max_step`.
    pub fn radial(d: u32, lo: f64, hi: f64, max_step: f64) -> Result<Self> {
        if d < 2 || !(0.0 <= lo && lo < hi && max_step > 0.0) {
            return Err(param(format!("bad radial grid d={d} [{lo}, {hi}] step {max_step}")));
        }
        let n = ((hi - lo) / max_step * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let h = (hi - lo) / n as f64;
        let area = sphere_area(d);
        let g = 0.5 / 3f64.sqrt();
        let nodes: Vec<(f64, f64)> = (0..n)
            .flat_map(|i| [0.5 - g, 0.5 + g].map(|o| (lo + (i as f64 + o) * h, 0.0)))
            .collect();
        let weights = nodes.iter().map(|&(r, _)| area * r.powi(d as i32 - 1) * h / 2.0).collect();
        Ok(EvalGrid { d, kind: GridKind::Radial, nodes, weights, step: h })
    }

    /// `n_perp × n_d` cells on `[0, s_max] × [xd_lo, xd_hi]`.
    pub fn cylindrical(d: u32, s_max: f64, xd: Interval, n_perp: usize, n_d: usize) -> Result<Self> {
        if d < 2 || !(s_max > 0.0 && xd.hi > xd.lo && n_perp > 0 && n_d > 0) {
            return Err(param("bad cylindrical grid"));
        }
        let hs = s_max / n_perp as f64;
        let hd = (xd.hi - xd.lo) / n_d as f64;
        let area = sphere_area(d - 1);
        let mut nodes = Vec::with_capacity(n_perp * n_d);
        let mut weights = Vec::with_capacity(n_perp * n_d);
        for i in 0..n_perp {
            let s = (i as f64 + 0.5) * hs;
            for k in 0..n_d {
                nodes.push((s, xd.lo + (k as f64 + 0.5) * hd));
                weights.push(area * s.powi(d as i32 - 2) * hs * hd);
            }
        }
        Ok(EvalGrid { d, kind: GridKind::Cylindrical, nodes, weights, step: hs.max(hd) })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Fails unless at least 8 grid steps fit across `feature`.
    pub fn require_resolution(&self, feature: f64) -> Result<()> {
        if self.step > feature / 8.0 * (1.0 + 1e-9) {
            return Err(SmaxError::Precondition(format!(
                "grid step {} does not resolve feature scale {feature} with 8 samples",
                self.step
            )));
        }
        Ok(())
    }
}

/// `(Σ w_i |v_i|^p)^{1/p}`, or `max |v_i|` for `p = ∞`.
pub fn lp_norm(values: &[f64], grid: &EvalGrid, p: f64) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(param(format!("{} values for a grid of {} nodes", values.len(), grid.len())));
    }
    if !(p >= 1.0) {
        return Err(param(format!("p={p} must be at least 1")));
    }
    if p.is_infinite() {
        return Ok(values.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    let s: f64 = values.iter().zip(&grid.weights).map(|(v, w)| w * v.abs().powf(p)).sum();
    Ok(s.powf(1.0 / p))
}
