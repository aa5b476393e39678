//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use smax_core::dimension::{assouad_max_level, quantity_six_assouad};
use smax_core::experiments::{dyadic_deltas, sweep_annulus, sweep_ball, verify_inclusion_44, InclusionConfig};
use smax_core::region::{l_functional, q_vertices, RieszPoint};
use smax_core::sets::{assouad_regular_set, cantor_endpoints, convex_sequence_set};
use smax_core::spherical::{
    cap_fraction, cylinder_average, lp_norm, radial_average, CylProfile, EvalGrid, RadialProfile,
};
use smax_core::verify::{run_suite, Suite, VerifyOptions, INCLUSION_BASELINE};
use smax_core::{assouad_fit, assouad_spectrum_fit, default_levels, minkowski_fit, Interval, SetSpec};

const CANTOR_TOL: f64 = 0.03;
const CANTOR_BUDGET: Duration = Duration::from_secs(10);
const CONVEX_MINKOWSKI: (f64, f64) = (0.45, 0.55);
const CONVEX_ASSOUAD: (f64, f64) = (0.9, 1.05);
const CONVEX_BUDGET: Duration = Duration::from_secs(60);
const SIX_RATIO: f64 = 64.0;
const SIX_FLOOR_LEVEL: u32 = 30;
const HULL_TOL: f64 = 1e-9;
const L_TOL: f64 = 1e-12;
const ANTIPODAL_TOL: f64 = 1e-10;
const MASS_TOL: f64 = 1e-3;
const CONSISTENCY_TOL: f64 = 1e-3;
const ANNULUS_TOL: f64 = 0.1;
const ANNULUS_BUDGET: Duration = Duration::from_secs(120);
const BALL_TOL: f64 = 0.15;
const BALL_BUDGET: Duration = Duration::from_secs(300);
const BUCKET_C: f64 = 16.0;

struct Line {
    label: &'static str,
    pass: bool,
    detail: String,
}

fn line(label: &'static str, pass: bool, detail: String) -> Line {
    Line { label, pass, detail }
}

fn unit() -> Interval {
    Interval::new(1.0, 2.0)
}

fn within(x: f64, (lo, hi): (f64, f64)) -> bool {
    (lo..=hi).contains(&x)
}

fn cantor_recovery() -> Vec<Line> {
    let start = Instant::now();
    let e = cantor_endpoints(unit(), 1.0 / 3.0, 12).unwrap();
    let target = 2f64.ln() / 3f64.ln();
    let m = minkowski_fit(&e, 4, 11).unwrap().slope;
    let (lo, hi) = default_levels(&e);
    let a = assouad_fit(&e, lo, hi).unwrap().slope();
    let t = start.elapsed();
    vec![
        line("1a cantor minkowski", (m - target).abs() <= CANTOR_TOL, format!("slope {m:.4} vs {target:.4} ± {CANTOR_TOL}")),
        line(
            "1b cantor assouad",
            (a - target).abs() <= CANTOR_TOL,
            format!("slope {a:.4} vs {target:.4} ± {CANTOR_TOL} over j in [{lo}, {hi}]"),
        ),
        line("1c cantor runtime", t <= CANTOR_BUDGET, format!("{:.2?} <= {CANTOR_BUDGET:?}", t)),
    ]
}

fn convex_recovery() -> Vec<Line> {
    let start = Instant::now();
    let e = convex_sequence_set(1.0, 1_000_000).unwrap();
    let m = minkowski_fit(&e, 4, 18).unwrap().slope;
    let s = assouad_spectrum_fit(&e, 0.6, 4, 18).unwrap().slope;
    let a = assouad_fit(&e, 4, 18).unwrap().slope();
    let t = start.elapsed();
    vec![
        line("2a convex minkowski", within(m, CONVEX_MINKOWSKI), format!("slope {m:.4} in {CONVEX_MINKOWSKI:?}")),
        line("2b convex spectrum θ=0.6", within(s, CONVEX_ASSOUAD), format!("slope {s:.4} in {CONVEX_ASSOUAD:?}")),
        line("2c convex assouad", within(a, CONVEX_ASSOUAD), format!("slope {a:.4} in {CONVEX_ASSOUAD:?}")),
        line("2d convex runtime", t <= CONVEX_BUDGET, format!("{:.2?} <= {CONVEX_BUDGET:?}", t)),
    ]
}

fn six_quantities() -> Vec<Line> {
    // Largest generation count whose finest scale stays at or above 2^-30.
    let floor = (-(SIX_FLOOR_LEVEL as f64)).exp2();
    let gens = (1..)
        .take_while(|&g| assouad_regular_set(0.4, 0.8, g).is_ok_and(|a| a.finest_delta() >= floor))
        .last()
        .unwrap();
    let a = assouad_regular_set(0.4, 0.8, gens).unwrap();
    let r = quantity_six_assouad(&a, 4, assouad_max_level(&a)).unwrap();
    let q = r.quantities();
    let ratios = [r.global.ratio(), r.spectrum.ratio(), r.all_windows.ratio()];
    vec![line(
        "3  six quantities",
        r.passes(SIX_RATIO),
        format!(
            "gens {gens}, values {:?}, max/min ratios {:.2?} <= {SIX_RATIO}",
            q.map(|v| (v * 1e3).round() / 1e3),
            ratios
        ),
    )]
}

fn region_geometry() -> Vec<Line> {
    let r = q_vertices(3, 1.0, 1.0).unwrap();
    let want = [(0.0, 0.0), (2.0 / 3.0, 2.0 / 3.0), (2.0 / 3.0, 1.0 / 3.0), (3.0 / 5.0, 1.0 / 5.0)];
    let exact = r.vertices.iter().zip(want).all(|(v, (ip, iq))| v.ip == ip && v.iq == iq);

    let hull = run_suite(Suite::HullHalfplane, &VerifyOptions { constant: Some(HULL_TOL), ..Default::default() }).unwrap();

    let mut worst: f64 = 0.0;
    for d in 2..=6 {
        for bi in 1..=10 {
            for gi in bi..=10 {
                let (beta, gamma) = (bi as f64 / 10.0, gi as f64 / 10.0);
                let q = q_vertices(d, beta, gamma).unwrap();
                for v in [q.q3(), q.q4()] {
                    worst = worst.max(l_functional(d, beta, gamma, v).unwrap().abs());
                }
            }
        }
    }
    vec![
        line("4a q_vertices(3,1,1) exact", exact, format!("{:?}", r.vertices.map(|v| (v.ip, v.iq)))),
        line(
            "4b hull/half-plane",
            hull.passed,
            format!("{} disagreements in {} checks at tol {HULL_TOL:e}", hull.violations, hull.checks),
        ),
        line("4c L at Q3, Q4", worst <= L_TOL, format!("max |L| {worst:.2e} <= {L_TOL:e}")),
    ]
}

fn spherical_engine() -> Vec<Line> {
    let mut antipodal: f64 = 0.0;
    for d in 2..=9 {
        for i in 0..=200 {
            let u = -1.0 + i as f64 / 100.0;
            let s = cap_fraction(d, u).unwrap().value + cap_fraction(d, -u).unwrap().value;
            antipodal = antipodal.max((s - 1.0).abs());
        }
    }

    let mut mass: f64 = 0.0;
    for d in [2, 3, 4, 5] {
        for delta in [1.0 / 16.0, 1.0 / 64.0] {
            for (f, t) in [
                (RadialProfile::ball(d, delta).unwrap(), 1.5),
                (RadialProfile::annulus(d, 1.25, delta).unwrap(), 1.0),
            ] {
                let reach = f.pieces().last().unwrap().r_hi + t + delta;
                let grid = EvalGrid::radial(d, 0.0, reach, delta / 8.0).unwrap();
                let v: Vec<f64> = grid.nodes.iter().map(|&(rho, _)| radial_average(&f, t, rho)).collect();
                let rel = lp_norm(&v, &grid, 1.0).unwrap() / f.norm(1.0) - 1.0;
                mass = mass.max(rel.abs());
            }
        }
    }

    let mut consistency: f64 = 0.0;
    for d in [2, 3, 4] {
        for &(t, xp, xd) in &[(1.0, 0.2, 0.9), (1.5, 0.0, 1.4), (1.2, 0.7, -0.3), (1.8, 1.0, 1.0)] {
            let (r, delta) = (1.25, 0.05);
            let sigma = t + f64::hypot(xp, xd) + r;
            let cyl = CylProfile::new(d, r, delta, sigma).unwrap();
            let ann = RadialProfile::annulus(d, r, delta).unwrap();
            let diff = cylinder_average(&cyl, t, xp, xd).value - radial_average(&ann, t, f64::hypot(xp, xd));
            consistency = consistency.max(diff.abs());
        }
    }
    vec![
        line("5a antipodal identity", antipodal <= ANTIPODAL_TOL, format!("max err {antipodal:.2e} <= {ANTIPODAL_TOL:e}")),
        line("5b mass conservation", mass <= MASS_TOL, format!("max rel err {mass:.2e} <= {MASS_TOL:e}")),
        line(
            "5c cylinder/radial consistency",
            consistency <= CONSISTENCY_TOL,
            format!("max diff {consistency:.2e} <= {CONSISTENCY_TOL:e}"),
        ),
    ]
}

fn annulus_sweep() -> Vec<Line> {
    let start = Instant::now();
    let r = sweep_annulus(3, &SetSpec::FullInterval, RieszPoint::new(0.9, 0.1).unwrap(), &dyadic_deltas(4, 10)).unwrap();
    let t = start.elapsed();
    vec![
        line(
            "6a annulus exponent",
            r.slope_error() <= ANNULUS_TOL,
            format!("slope {:.4} vs {:.4} ± {ANNULUS_TOL}", r.fit.slope, r.predicted_exponent),
        ),
        line("6b annulus runtime", t <= ANNULUS_BUDGET, format!("{:.2?} <= {ANNULUS_BUDGET:?}", t)),
    ]
}

fn ball_sweep() -> Vec<Line> {
    let start = Instant::now();
    let spec = SetSpec::cantor_endpoints(1.0 / 3.0, 10);
    let r = sweep_ball(3, &spec, RieszPoint::new(0.8, 0.2).unwrap(), &dyadic_deltas(4, 10), None).unwrap();
    let t = start.elapsed();
    vec![
        line(
            "7a ball exponent",
            r.slope_error() <= BALL_TOL,
            format!(
                "slope {:.4} vs {:.4} ± {BALL_TOL} (β̂ {:.4})",
                r.fit.slope,
                r.predicted_exponent,
                r.params.beta_hat.unwrap_or(f64::NAN)
            ),
        ),
        line("7b ball runtime", t <= BALL_BUDGET, format!("{:.2?} <= {BALL_BUDGET:?}", t)),
    ]
}

fn inclusion() -> Vec<Line> {
    let r = verify_inclusion_44(&InclusionConfig::default()).unwrap();
    let min = r.min_average_ratio();
    vec![
        line("8a inclusion violations", r.total_violations() == 0, format!("{} violations", r.total_violations())),
        line(
            "8b average lower bound",
            min >= INCLUSION_BASELINE,
            format!("min A_t g/σ² {min:.4} >= {INCLUSION_BASELINE}"),
        ),
    ]
}

fn combinatorics() -> Vec<Line> {
    let opts = VerifyOptions::default();
    let f7 = run_suite(Suite::Factor7, &opts).unwrap();
    let znj = run_suite(Suite::Znj, &VerifyOptions { constant: Some(BUCKET_C), ..opts }).unwrap();
    vec![
        line("9a factor-7", f7.passed, format!("{} violations in {} checks", f7.violations, f7.checks)),
        line(
            "9b buckets and C <= 16",
            znj.passed,
            format!(
                "{} violations in {} checks, max C {:.3}",
                znj.violations,
                znj.checks,
                znj.metrics.get("max_bucket_constant").copied().unwrap_or(f64::NAN)
            ),
        ),
    ]
}

fn main() -> ExitCode {
    let groups: [fn() -> Vec<Line>; 9] = [
        cantor_recovery,
        convex_recovery,
        six_quantities,
        region_geometry,
        spherical_engine,
        annulus_sweep,
        ball_sweep,
        inclusion,
        combinatorics,
    ];
    let mut failed = 0;
    for group in groups {
        for l in group() {
            println!("{} {:<30} {}", if l.pass { "PASS" } else { "FAIL" }, l.label, l.detail);
            failed += usize::from(!l.pass);
        }
    }
    println!("NOTE 10 operator-norm upper bounds are not checked numerically");
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} check(s) failed");
        ExitCode::FAILURE
    }
}
