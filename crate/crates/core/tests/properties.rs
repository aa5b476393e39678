use proptest::prelude::*;

use smax_core::covering::{covering_number, covering_number_local, dyadic_cells, max_window_count, znj_partition};
use smax_core::dimension::{assouad_fit, assouad_spectrum_fit, minkowski_fit};
use smax_core::region::{in_r, l_functional, necessary_conditions, q_vertices, RieszPoint, DEFAULT_TOL};
use smax_core::sets::{assouad_regular_set, cantor_endpoints, cantor_generation};
use smax_core::spherical::{
    cap_fraction, cylinder_average, lp_norm, maximal_value, radial_average, CylProfile, EvalGrid, RadialPiece,
    RadialProfile,
};
use smax_core::{realize, Interval, IntervalSet, SetSpec};

fn unit() -> Interval {
    Interval::new(1.0, 2.0)
}

/// Components on the 1/64 grid of [1, 2], points included.
fn arb_set() -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec((0u32..64, 0u32..6), 1..12).prop_map(|raw| {
        let parts = raw
            .into_iter()
            .map(|(a, len)| {
                let lo = 1.0 + a as f64 / 64.0;
                Interval::new(lo, (lo + len as f64 / 64.0).min(2.0))
            })
            .collect();
        IntervalSet::new(parts, unit()).unwrap()
    })
}

fn arb_window() -> impl Strategy<Value = Interval> {
    (0u32..32, 1u32..33).prop_map(|(a, len)| {
        let lo = 1.0 + a as f64 / 32.0;
        Interval::new(lo, (lo + len as f64 / 32.0).min(2.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn factor_seven_and_converse(e in arb_set(), w in arb_window(), j in 1u32..12) {
        prop_assume!((-(j as f64)).exp2() <= w.len());
        let clipped = e.clip(w.lo, w.hi);
        let cells = dyadic_cells(&clipped, j, None).len() as u64;
        let n = covering_number_local(&e, w, (-(j as f64)).exp2()).unwrap();
        prop_assert!(cells <= 7 * n, "cells={} n={}", cells, n);
        prop_assert!(n <= cells);
    }

    #[test]
    fn buckets_partition_the_cells(e in arb_set(), j in 1u32..10, pick in any::<prop::sample::Index>()) {
        let cells = dyadic_cells(&e, j, None);
        let nu = cells.indices[pick.index(cells.len())];
        let mut seen: Vec<i64> = Vec::new();
        for n in 0..=j + 2 {
            seen.extend(znj_partition(&cells, nu, n).unwrap());
        }
        seen.sort_unstable();
        let before = seen.len();
        seen.dedup();
        prop_assert_eq!(before, seen.len());
        prop_assert_eq!(seen, cells.indices.clone());
    }

    #[test]
    fn covering_is_monotone_in_delta(e in arb_set(), a in 1u32..200, b in 1u32..200) {
        let (small, large) = (a.min(b) as f64 / 1000.0, a.max(b) as f64 / 1000.0);
        prop_assert!(covering_number(&e, small).unwrap() >= covering_number(&e, large).unwrap());
    }

    #[test]
    fn counts_are_invariant_under_dyadic_affine_maps(
        e in arb_set(),
        k in -3i32..4,
        shift in -8i32..8,
        j in 2u32..10,
    ) {
        let s = (k as f64).exp2();
        let image = e.affine(s, shift as f64 / 4.0).unwrap();
        let delta = (-(j as f64)).exp2();
        prop_assert_eq!(covering_number(&e, delta).unwrap(), covering_number(&image, s * delta).unwrap());
    }

    #[test]
    fn window_maximum_grows_with_length(e in arb_set(), j in 6u32..10, m in 1u32..5) {
        let delta = (-(j as f64)).exp2();
        let len = (-(m as f64)).exp2();
        let short = max_window_count(&e, len, delta).unwrap().count;
        let long = max_window_count(&e, 2.0 * len, delta).unwrap().count;
        prop_assert!(short <= long);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cantor_generations_nest(mu in 0.1f64..=0.5, k in 0u32..7) {
        let coarse = cantor_generation(unit(), mu, k).unwrap().cells;
        let fine = cantor_generation(unit(), mu, k + 1).unwrap().cells;
        for c in &fine {
            let parents = coarse.iter().filter(|p| p.contains_interval(c)).count();
            prop_assert_eq!(parents, 1);
        }
        let coarse_set = IntervalSet::new(coarse, unit()).unwrap();
        let fine_set = IntervalSet::new(fine, unit()).unwrap();
        prop_assert!(fine_set.is_subset_of(&coarse_set));
    }

    #[test]
    fn realize_is_deterministic(mu in 0.1f64..=0.5, depth in 0u32..8, endpoints in any::<bool>()) {
        let spec = SetSpec::Cantor { mu, depth, base: unit(), endpoints };
        prop_assert_eq!(realize(&spec).unwrap(), realize(&spec).unwrap());
    }

    #[test]
    fn assouad_windows(beta in 0.3f64..0.7, ratio in 0.3f64..0.9) {
        let gamma = beta / ratio;
        prop_assume!(gamma < 0.95);
        let built = assouad_regular_set(beta, gamma, 3);
        prop_assume!(built.is_ok());
        let a = built.unwrap();
        for w in a.levels.windows(2) {
            prop_assert!(w[1].window.hi <= w[0].window.lo + 1e-15);
        }
        for l in &a.levels {
            let want = a.lambda.powi(l.k as i32) * (1.0 - a.lambda);
            prop_assert!((l.window.len() - want).abs() <= 4.0 * f64::EPSILON);
            // δ_k^θ and |J_k| agree up to μ^{-1}λ^{-1}, which is at most 2^{1/γ + 1/β}.
            let r = l.delta.powf(a.theta) / l.window.len();
            let c = (1.0 / beta + 1.0 / gamma).exp2();
            prop_assert!(r >= 1.0 / c && r <= c, "k={} ratio={}", l.k, r);
        }
    }

    #[test]
    fn sandwich(mu in 0.15f64..0.4, theta in 0.2f64..0.7) {
        const TOL: f64 = 0.1;
        let e = cantor_endpoints(unit(), mu, 12).unwrap();
        let j_max = ((12.0 * -mu.log2()).floor() as u32 - 1).min(22);
        let j_min = 4;
        prop_assume!(j_max >= j_min + 4);
        let m = minkowski_fit(&e, j_min, j_max).unwrap().slope;
        let s = assouad_spectrum_fit(&e, theta, j_min, j_max).unwrap().slope;
        let a = assouad_fit(&e, j_min, j_max).unwrap().slope();
        prop_assert!(m <= s + TOL, "m={} s={}", m, s);
        prop_assert!(s <= (m / (1.0 - theta)).min(a) + TOL, "s={} m={} a={}", s, m, a);
    }
}

fn arb_region() -> impl Strategy<Value = (u32, f64, f64)> {
    (2u32..=5, 0.01f64..=1.0, 0.0f64..=1.0).prop_map(|(d, g, r)| (d, g * r.max(0.01), g))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hull_matches_half_planes((d, beta, gamma) in arb_region(), pts in prop::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 200)) {
        let region = q_vertices(d, beta, gamma).unwrap();
        for (ip, iq) in pts {
            let pt = RieszPoint::new(ip, iq).unwrap();
            let inside = in_r(&region, pt, DEFAULT_TOL);
            let ok = necessary_conditions(d, beta, gamma, pt, DEFAULT_TOL).unwrap().is_empty();
            prop_assert_eq!(inside, ok, "d={} beta={} gamma={} pt={:?}", d, beta, gamma, pt);
        }
    }

    #[test]
    fn larger_gamma_shrinks_the_region(
        (d, beta, g1) in arb_region(),
        bump in 0.0f64..1.0,
        pts in prop::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 200),
    ) {
        let g2 = g1 + (1.0 - g1) * bump;
        let small = q_vertices(d, beta, g2).unwrap();
        let big = q_vertices(d, beta, g1).unwrap();
        for (ip, iq) in pts {
            let pt = RieszPoint::new(ip, iq).unwrap();
            if in_r(&small, pt, 0.0) {
                prop_assert!(in_r(&big, pt, DEFAULT_TOL), "{:?}", pt);
            }
        }
    }

    #[test]
    fn l_vanishes_at_q3_and_q4((d, beta, gamma) in arb_region()) {
        let region = q_vertices(d, beta, gamma).unwrap();
        for v in [region.q3(), region.q4()] {
            prop_assert!(l_functional(d, beta, gamma, v).unwrap().abs() <= 1e-12);
        }
    }
}

fn arb_profile() -> impl Strategy<Value = (u32, Vec<RadialPiece>)> {
    (2u32..=6, prop::collection::vec((0.0f64..2.0, 0.01f64..0.5, 0.0f64..3.0), 1..4)).prop_map(|(d, raw)| {
        let mut pieces: Vec<RadialPiece> = Vec::new();
        let mut cursor = 0.0;
        for (gap, len, value) in raw {
            let r_lo = cursor + gap * 0.3;
            pieces.push(RadialPiece { r_lo, r_hi: r_lo + len, value });
            cursor = r_lo + len;
        }
        (d, pieces)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn antipodal_identity(d in 2u32..=9, u in -1.0f64..=1.0) {
        let s = cap_fraction(d, u).unwrap().value + cap_fraction(d, -u).unwrap().value;
        let tol = if d <= 3 { 1e-15 } else { 1e-10 };
        prop_assert!((s - 1.0).abs() <= tol, "d={} u={} sum={}", d, u, s);
    }

    #[test]
    fn averaging_conserves_mass((d, pieces) in arb_profile(), t in 0.5f64..2.0) {
        let f = RadialProfile::new(d, pieces).unwrap();
        let feature = f.feature_scale();
        let reach = f.pieces().last().unwrap().r_hi + t;
        // The average has square-root kinks at |t ± r| that the profile's
        // feature scale does not see, so the grid is finer than for sweeps.
        let grid = EvalGrid::radial(d, 0.0, reach + feature, feature / 32.0).unwrap();
        let values: Vec<f64> = grid.nodes.iter().map(|&(rho, _)| radial_average(&f, t, rho)).collect();
        let mass = lp_norm(&values, &grid, 1.0).unwrap();
        let want = f.norm(1.0);
        prop_assume!(want > 0.0);
        prop_assert!((mass / want - 1.0).abs() <= 1e-3, "mass={} want={}", mass, want);
    }

    #[test]
    fn radial_average_bounds_and_domination(
        (d, pieces) in arb_profile(),
        extra in prop::collection::vec(0.0f64..1.0, 4),
        t in 0.5f64..2.0,
        rho in 0.0f64..3.0,
    ) {
        let bigger: Vec<RadialPiece> = pieces
            .iter()
            .zip(extra.iter().cycle())
            .map(|(p, e)| RadialPiece { value: p.value + e, ..*p })
            .collect();
        let f = RadialProfile::new(d, pieces).unwrap();
        let g = RadialProfile::new(d, bigger).unwrap();
        let af = radial_average(&f, t, rho);
        prop_assert!(af >= 0.0 && af <= f.max_abs() + 1e-12);
        prop_assert!(af <= radial_average(&g, t, rho) + 1e-12);
    }

    #[test]
    fn wide_cylinder_is_an_annulus(
        d in 2u32..=5,
        r in 1.0f64..2.0,
        delta in 0.01f64..0.2,
        t in 1.0f64..2.0,
        x_perp in 0.0f64..1.0,
        x_d in -1.0f64..1.0,
    ) {
        let sigma = t + (x_perp * x_perp + x_d * x_d).sqrt() + r + 1.0;
        let cyl = CylProfile::new(d, r, delta, sigma).unwrap();
        let ann = RadialProfile::annulus(d, r, delta).unwrap();
        let a = cylinder_average(&cyl, t, x_perp, x_d);
        let b = radial_average(&ann, t, x_perp.hypot(x_d));
        prop_assert!((a.value - b).abs() <= 1e-3, "{:?} vs {}", a, b);
    }

    /// Components with endpoints on the half-cell grid of the sampling level.
    #[test]
    fn maximal_value_is_monotone_in_the_set(
        base in prop::collection::vec((0u32..128, 0u32..8), 1..5),
        more in prop::collection::vec((0u32..128, 0u32..8), 1..5),
        rho in 0.5f64..2.5,
    ) {
        let j_res = 6;
        let half = (-(j_res as f64 + 1.0)).exp2();
        let to_parts = |raw: &[(u32, u32)]| -> Vec<Interval> {
            raw.iter()
                .map(|&(a, l)| {
                    let lo = 1.0 + a as f64 * half;
                    Interval::new(lo, (lo + l as f64 * half).min(2.0))
                })
                .collect()
        };
        let small = IntervalSet::new(to_parts(&base), unit()).unwrap();
        let mut all = to_parts(&base);
        all.extend(to_parts(&more));
        let large = IntervalSet::new(all, unit()).unwrap();
        let ball = RadialProfile::ball(3, 1.0 / 32.0).unwrap();
        let eval = |t: f64| radial_average(&ball, t, rho);
        prop_assert!(maximal_value(&small, eval, j_res) <= maximal_value(&large, eval, j_res));
    }
}
