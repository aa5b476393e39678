//! The quadrangle `Q(β,γ)` in the Riesz diagram, its interior plus the
//! half-open diagonal segment, and the four necessary-condition half-planes.

use serde::Serialize;

use crate::error::{param, Result};

pub const DEFAULT_TOL: f64 = 1e-9;

/// A point `(1/p, 1/q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RieszPoint {
    pub ip: f64,
    pub iq: f64,
}

impl RieszPoint {
    pub fn new(ip: f64, iq: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&ip) || !(0.0..=1.0).contains(&iq) {
            return Err(param(format!("Riesz point ({ip}, {iq}) outside the unit square")));
        }
        Ok(RieszPoint { ip, iq })
    }

    pub fn midpoint(a: RieszPoint, b: RieszPoint) -> RieszPoint {
        RieszPoint { ip: 0.5 * (a.ip + b.ip), iq: 0.5 * (a.iq + b.iq) }
    }

    fn sub(self, o: RieszPoint) -> (f64, f64) {
        (self.ip - o.ip, self.iq - o.iq)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionSpec {
    pub d: u32,
    pub beta: f64,
    pub gamma: f64,
    /// `Q1, Q2(β), Q3(β), Q4(γ)`.
    pub vertices: [RieszPoint; 4],
}

impl RegionSpec {
    pub fn q1(&self) -> RieszPoint {
        self.vertices[0]
    }
    pub fn q2(&self) -> RieszPoint {
        self.vertices[1]
    }
    pub fn q3(&self) -> RieszPoint {
        self.vertices[2]
    }
    pub fn q4(&self) -> RieszPoint {
        self.vertices[3]
    }
}

pub fn q_vertices(d: u32, beta: f64, gamma: f64) -> Result<RegionSpec> {
    if d < 2 {
        return Err(param(format!("dimension d={d} must be at least 2")));
    }
    if !(0.0..=1.0).contains(&beta) || !(0.0..=1.0).contains(&gamma) {
        return Err(param("beta and gamma must lie in [0, 1]"));
    }
    if beta > gamma {
        return Err(param(format!("beta={beta} exceeds gamma={gamma}")));
    }
    let d = d as f64;
    let q2 = (d - 1.0) / (d - 1.0 + beta);
    let q3 = d - beta + 1.0;
    let q4 = d * d + 2.0 * gamma - 1.0;
    Ok(RegionSpec {
        d: d as u32,
        beta,
        gamma,
        vertices: [
            RieszPoint { ip: 0.0, iq: 0.0 },
            RieszPoint { ip: q2, iq: q2 },
            RieszPoint { ip: (d - beta) / q3, iq: 1.0 / q3 },
            RieszPoint { ip: d * (d - 1.0) / q4, iq: (d - 1.0) / q4 },
        ],
    })
}

fn cross(o: RieszPoint, a: RieszPoint, b: RieszPoint) -> f64 {
    let (ax, ay) = a.sub(o);
    let (bx, by) = b.sub(o);
    ax * by - ay * bx
}

/// Counter-clockwise convex hull with duplicate and collinear vertices removed.
pub fn convex_hull(points: &[RieszPoint]) -> Vec<RieszPoint> {
    const EPS: f64 = 1e-15;
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.ip.total_cmp(&b.ip).then(a.iq.total_cmp(&b.iq)));
    pts.dedup_by(|a, b| (a.ip - b.ip).abs() <= EPS && (a.iq - b.iq).abs() <= EPS);
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<RieszPoint> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &RieszPoint>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= EPS {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn segment_distance(p: RieszPoint, a: RieszPoint, b: RieszPoint) -> f64 {
    let (dx, dy) = b.sub(a);
    let (px, py) = p.sub(a);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { ((px * dx + py * dy) / len2).clamp(0.0, 1.0) };
    let (ex, ey) = (px - t * dx, py - t * dy);
    (ex * ex + ey * ey).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Interior,
    Boundary,
    Outside,
}

/// Point location in `Q(β,γ)`; `Boundary` means within `tol` of the hull
/// boundary.
pub fn membership(region: &RegionSpec, pt: RieszPoint, tol: f64) -> Classification {
    let hull = convex_hull(&region.vertices);
    let n = hull.len();
    let boundary_dist = (0..n)
        .map(|i| segment_distance(pt, hull[i], hull[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min);
    if boundary_dist <= tol {
        return Classification::Boundary;
    }
    if n < 3 {
        return Classification::Outside;
    }
    let inside = (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], pt) > 0.0);
    if inside {
        Classification::Interior
    } else {
        Classification::Outside
    }
}

/// Membership in `R(β,γ)`: the interior of `Q(β,γ)` together with the
/// diagonal segment from `Q1` (included) to `Q2(β)` (excluded).
pub fn in_r(region: &RegionSpec, pt: RieszPoint, tol: f64) -> bool {
    if membership(region, pt, tol) == Classification::Interior {
        return true;
    }
    let on_segment = segment_distance(pt, region.q1(), region.q2()) <= tol;
    let at_q2 = segment_distance(pt, region.q2(), region.q2()) <= tol;
    on_segment && !at_q2
}

/// The cylinder-family functional
/// `L = (α/2)(d-1) + (d - β - (d-1)α/2)/q - (1 + (d-1)α/2)/p` with
/// `α = β/γ̃`.
pub fn l_functional(d: u32, beta: f64, gamma_tilde: f64, pt: RieszPoint) -> Result<f64> {
    let (c0, cq, cp) = l_coefficients(d, beta, gamma_tilde)?;
    Ok(c0 + cq * pt.iq - cp * pt.ip)
}

fn l_coefficients(d: u32, beta: f64, gamma_tilde: f64) -> Result<(f64, f64, f64)> {
    if gamma_tilde == 0.0 {
        return Err(param("gamma_tilde must be positive"));
    }
    if !(0.0 <= beta && beta <= gamma_tilde && gamma_tilde <= 1.0) {
        return Err(param(format!("need 0 <= beta <= gamma_tilde <= 1, got {beta}, {gamma_tilde}")));
    }
    let d = d as f64;
    let half = 0.5 * beta / gamma_tilde * (d - 1.0);
    Ok((half, d - beta - half, 1.0 + half))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `1/q <= 1/p` (translation invariance).
    Translation,
    /// `(1-β)/q + d - 1 >= d/p` (ball family).
    Ball,
    /// `d/q >= 1/p` (annulus family).
    Annulus,
    /// `L(1/p, 1/q) >= 0` (cylinder family).
    Cylinder,
}

/// Signed distances of `pt` to the four constraint lines, positive on the
/// admissible side. The cylinder entry is omitted when `γ = 0`.
pub fn condition_margins(d: u32, beta: f64, gamma: f64, pt: RieszPoint) -> Result<Vec<(Condition, f64)>> {
    if d < 2 {
        return Err(param("dimension must be at least 2"));
    }
    let df = d as f64;
    let norm = |a: f64, b: f64| (a * a + b * b).sqrt();
    let mut out = vec![
        (Condition::Translation, (pt.ip - pt.iq) / norm(1.0, 1.0)),
        (Condition::Ball, ((1.0 - beta) * pt.iq + df - 1.0 - df * pt.ip) / norm(1.0 - beta, df)),
        (Condition::Annulus, (df * pt.iq - pt.ip) / norm(df, 1.0)),
    ];
    if gamma > 0.0 {
        let (c0, cq, cp) = l_coefficients(d, beta, gamma)?;
        out.push((Condition::Cylinder, (c0 + cq * pt.iq - cp * pt.ip) / norm(cq, cp)));
    }
    Ok(out)
}

/// The necessary conditions violated by more than `tol` (in distance).
pub fn necessary_conditions(d: u32, beta: f64, gamma: f64, pt: RieszPoint, tol: f64) -> Result<Vec<Condition>> {
    Ok(condition_margins(d, beta, gamma, pt)?
        .into_iter()
        .filter(|&(_, m)| m < -tol)
        .map(|(c, _)| c)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(ip: f64, iq: f64) -> RieszPoint {
        RieszPoint::new(ip, iq).unwrap()
    }

    #[test]
    fn classical_vertices() {
        let r = q_vertices(3, 1.0, 1.0).unwrap();
        let want = [(0.0, 0.0), (2.0 / 3.0, 2.0 / 3.0), (2.0 / 3.0, 1.0 / 3.0), (3.0 / 5.0, 1.0 / 5.0)];
        for (v, (ip, iq)) in r.vertices.iter().zip(want) {
            assert_eq!((v.ip, v.iq), (ip, iq));
        }
    }

    #[test]
    fn planar_triangle_degeneration() {
        let r = q_vertices(2, 1.0, 1.0).unwrap();
        assert_eq!(r.q2(), r.q3());
        assert_eq!(r.q2(), pt(0.5, 0.5));
        assert_eq!(convex_hull(&r.vertices).len(), 3);
    }

    #[test]
    fn beta_zero_vertices() {
        for d in 2..7 {
            let r = q_vertices(d, 0.0, 0.0).unwrap();
            let df = d as f64;
            assert_eq!(r.q2(), pt(1.0, 1.0));
            assert!((r.q3().ip - df / (df + 1.0)).abs() < 1e-15);
            assert!((r.q3().iq - 1.0 / (df + 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn beta_above_gamma_rejected() {
        assert!(q_vertices(3, 0.9, 0.5).is_err());
        assert!(q_vertices(1, 0.5, 0.5).is_err());
    }

    #[test]
    fn membership_examples() {
        let r = q_vertices(3, 1.0, 1.0).unwrap();
        assert_eq!(membership(&r, pt(0.0, 0.0), DEFAULT_TOL), Classification::Boundary);
        assert_eq!(membership(&r, pt(0.5, 0.3), DEFAULT_TOL), Classification::Interior);
        assert_eq!(membership(&r, pt(0.9, 0.1), DEFAULT_TOL), Classification::Outside);
    }

    #[test]
    fn r_region_examples() {
        let r = q_vertices(3, 0.5, 0.8).unwrap();
        assert!(!in_r(&r, r.q2(), DEFAULT_TOL));
        assert!(in_r(&r, r.q1(), DEFAULT_TOL));
        assert!(in_r(&r, RieszPoint::midpoint(r.q1(), r.q2()), DEFAULT_TOL));
        assert!(!in_r(&r, RieszPoint::midpoint(r.q3(), r.q4()), DEFAULT_TOL));
    }

    #[test]
    fn l_vanishes_on_q3_q4() {
        let (d, beta, gt) = (3, 0.4, 0.8);
        let r = q_vertices(d, beta, gt).unwrap();
        assert!(l_functional(d, beta, gt, r.q3()).unwrap().abs() < 1e-12);
        assert!(l_functional(d, beta, gt, r.q4()).unwrap().abs() < 1e-12);
        let at_origin = l_functional(d, beta, gt, pt(0.0, 0.0)).unwrap();
        assert!((at_origin - 0.5 * 0.5 * 2.0).abs() < 1e-15);
        assert!(l_functional(d, beta, 0.0, pt(0.0, 0.0)).is_err());
    }

    #[test]
    fn necessary_condition_examples() {
        let r = q_vertices(3, 0.6, 0.9).unwrap();
        let inner = RieszPoint {
            ip: (r.q2().ip + r.q3().ip + r.q4().ip) / 4.0,
            iq: (r.q2().iq + r.q3().iq + r.q4().iq) / 4.0,
        };
        assert!(necessary_conditions(3, 0.6, 0.9, inner, DEFAULT_TOL).unwrap().is_empty());
        let v = necessary_conditions(3, 0.6, 0.9, pt(1.0, 1.0), DEFAULT_TOL).unwrap();
        assert!(v.contains(&Condition::Ball));
        let v = necessary_conditions(3, 0.6, 0.9, pt(0.0, 0.5), DEFAULT_TOL).unwrap();
        assert!(v.contains(&Condition::Translation));
    }
}
