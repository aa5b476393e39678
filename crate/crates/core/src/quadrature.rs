//! Gauss–Legendre rules and an adaptive panel integrator.

use std::f64::consts::PI;
use std::sync::OnceLock;

pub const ORDER: usize = 32;
pub const MAX_DEPTH: u32 = 12;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let s: f64 = self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(mid + half * x)).sum();
        s * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

pub fn gl32() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(ORDER))
}

/// An integral value with the summed error estimate of the panels that hit
/// the depth cap; `converged` is false when that estimate exceeds the
/// requested tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub converged: bool,
    pub capped_error: f64,
}

impl Integral {
    pub fn exact(value: f64) -> Self {
        Integral { value, converged: true, capped_error: 0.0 }
    }
}

/// Order-32 Gauss–Legendre on `panels` equal panels of `[a, b]`, each split
/// dyadically until the two-halves estimate agrees with the whole-panel one
/// to within its share of `abs_tol`, up to [`MAX_DEPTH`] levels.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize, abs_tol: f64) -> Integral {
    if b <= a {
        return Integral::exact(0.0);
    }
    let rule = gl32();
    let h = (b - a) / panels as f64;
    let tol = abs_tol / panels as f64;
    let mut out = Integral::exact(0.0);
    for i in 0..panels {
        let lo = a + i as f64 * h;
        let hi = if i + 1 == panels { b } else { lo + h };
        let whole = rule.integrate(f, lo, hi);
        refine(f, rule, lo, hi, whole, tol, 0, &mut out);
    }
    out.converged = out.capped_error <= abs_tol;
    out
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    out: &mut Integral,
) {
    let m = 0.5 * (a + b);
    let left = rule.integrate(f, a, m);
    let right = rule.integrate(f, m, b);
    if (left + right - whole).abs() <= tol {
        out.value += left + right;
        return;
    }
    if depth >= MAX_DEPTH {
        out.value += left + right;
        out.capped_error += (left + right - whole).abs();
        return;
    }
    refine(f, rule, a, m, left, 0.5 * tol, depth + 1, out);
    refine(f, rule, m, b, right, 0.5 * tol, depth + 1, out);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        let s: f64 = gl32().weights().iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let small = GaussLegendre::new(3);
        assert!((small.nodes()[2] - (0.6f64).sqrt()).abs() < 1e-15);
        assert!((small.weights()[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn exact_on_high_degree_polynomials() {
        let f = |x: f64| x.powi(62) + 3.0 * x.powi(7);
        let v = gl32().integrate(&f, 0.0, 1.0);
        assert!((v - (1.0 / 63.0 + 3.0 / 8.0)).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_a_jump() {
        let f = |x: f64| if x < 0.3 { 1.0 } else { 0.0 };
        let r = adaptive(&f, 0.0, 1.0, 4, 1e-8);
        assert!((r.value - 0.3).abs() < 1e-5);
    }

    #[test]
    fn adaptive_smooth_converges() {
        let r = adaptive(&|x: f64| x.sin(), 0.0, PI, 2, 1e-12);
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-12);
    }
}
