//! Self-check suites with pass/fail counters, as run by `smax verify`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::covering::{covering_number_local, dyadic_cells, znj_partition, DyadicCells};
use crate::dimension::{assouad_max_level, quantity_six_assouad};
use crate::error::{param, Result, SmaxError};
use crate::experiments::{verify_inclusion_44, InclusionConfig};
use crate::region::{membership, necessary_conditions, q_vertices, Classification, RieszPoint};
use crate::sets::{
    assouad_regular_set, cantor_endpoints, cantor_generation, convex_sequence_set, Interval, IntervalSet,
};

/// Finest dyadic level visited by the combinatorial suites.
pub const MAX_LEVEL: u32 = 20;
/// Frozen lower baseline for `min A_t g / σ^{d-1}` in the inclusion suite.
pub const INCLUSION_BASELINE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Factor7,
    Znj,
    Inclusion44,
    Six,
    HullHalfplane,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Factor7, Suite::Znj, Suite::Inclusion44, Suite::Six, Suite::HullHalfplane];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Factor7 => "factor7",
            Suite::Znj => "znj",
            Suite::Inclusion44 => "inclusion44",
            Suite::Six => "six",
            Suite::HullHalfplane => "hullhalfplane",
        }
    }

    /// The constant each suite checks against: the cell-count factor, the
    /// bucket constant `C`, the inclusion constant `c`, the max/min ratio
    /// bound, and the point-location tolerance.
    pub fn default_constant(self) -> f64 {
        match self {
            Suite::Factor7 => 7.0,
            Suite::Znj => 16.0,
            Suite::Inclusion44 => 0.01,
            Suite::Six => 64.0,
            Suite::HullHalfplane => 1e-9,
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = SmaxError;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| param(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Overrides [`Suite::default_constant`].
    pub constant: Option<f64>,
    /// Sample count for the randomized suites.
    pub samples: Option<usize>,
}


#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub constant: f64,
    pub passed: bool,
    pub checks: u64,
    pub violations: u64,
    pub metrics: BTreeMap<String, f64>,
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<SuiteReport> {
    let constant = opts.constant.unwrap_or(suite.default_constant());
    if !constant.is_finite() {
        return Err(param("suite constant must be finite"));
    }
    let mut metrics = BTreeMap::new();
    let (checks, violations) = match suite {
        Suite::Factor7 => factor7(opts.seed, constant, &mut metrics)?,
        Suite::Znj => znj(opts.seed, constant, &mut metrics)?,
        Suite::Inclusion44 => inclusion(opts, constant, &mut metrics)?,
        Suite::Six => six(constant, &mut metrics)?,
        Suite::HullHalfplane => hull_halfplane(opts, constant, &mut metrics)?,
    };
    Ok(SuiteReport { suite, seed: opts.seed, constant, passed: violations == 0, checks, violations, metrics })
}

/// The sets exercised by the combinatorial suites: fixed constructions plus
/// a few seeded random unions of points and intervals.
pub fn suite_sets(seed: u64) -> Result<Vec<(String, IntervalSet)>> {
    let unit = Interval::new(1.0, 2.0);
    let mut out = vec![
        ("interval".to_string(), IntervalSet::new(vec![unit], unit)?),
        ("cantor_endpoints_1/3_10".to_string(), cantor_endpoints(unit, 1.0 / 3.0, 10)?),
        ("cantor_cells_1/4_8".to_string(), IntervalSet::new(cantor_generation(unit, 0.25, 8)?.cells, unit)?),
        ("convex_1_10000".to_string(), convex_sequence_set(1.0, 10_000)?),
        ("assouad_0.4_0.8_5".to_string(), assouad_regular_set(0.4, 0.8, 5)?.set),
        ("assouad_0.3_0.6_4".to_string(), assouad_regular_set(0.3, 0.6, 4)?.set),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..4 {
        let n = rng.gen_range(3..40);
        let parts: Vec<Interval> = (0..n)
            .map(|_| {
                let a: f64 = rng.gen_range(1.0..2.0);
                let len = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..0.05) };
                Interval::new(a, (a + len).min(2.0))
            })
            .collect();
        out.push((format!("random_{i}"), IntervalSet::new(parts, unit)?));
    }
    Ok(out)
}

fn windows_for(set: &IntervalSet, rng: &mut ChaCha8Rng, count: usize) -> Vec<Interval> {
    let amb = set.ambient();
    let mut out = vec![amb];
    for _ in 0..count {
        let len = amb.len() * (-rng.gen_range(0.0..12.0f64)).exp2();
        let lo = rng.gen_range(amb.lo - 0.1 * len..amb.hi);
        out.push(Interval::new(lo, lo + len));
    }
    out
}

fn factor7(seed: u64, factor: f64, metrics: &mut BTreeMap<String, f64>) -> Result<(u64, u64)> {
    let sets = suite_sets(seed)?;
    let results: Vec<(u64, u64, u64, f64)> = sets
        .par_iter()
        .enumerate()
        .map(|(i, (_, set))| -> Result<(u64, u64, u64, f64)> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1000 + i as u64));
            let (mut checks, mut bad, mut converse_bad, mut worst) = (0u64, 0u64, 0u64, 0.0f64);
            for w in windows_for(set, &mut rng, 24) {
                let j0 = (-w.len().log2()).ceil().max(0.0) as u32;
                for j in j0..=MAX_LEVEL {
                    let delta = (-(j as f64)).exp2();
                    let cells = dyadic_cells(set, j, Some(w)).len() as u64;
                    let n = covering_number_local(set, w, delta)?;
                    checks += 1;
                    if cells as f64 > factor * n as f64 {
                        bad += 1;
                    }
                    if n > cells {
                        converse_bad += 1;
                    }
                    if n > 0 {
                        worst = worst.max(cells as f64 / n as f64);
                    }
                }
            }
            Ok((checks, bad, converse_bad, worst))
        })
        .collect::<Result<_>>()?;
    let checks = results.iter().map(|r| r.0).sum();
    let bad: u64 = results.iter().map(|r| r.1).sum();
    let converse: u64 = results.iter().map(|r| r.2).sum();
    metrics.insert("max_cells_over_cover".into(), results.iter().map(|r| r.3).fold(0.0, f64::max));
    metrics.insert("factor_violations".into(), bad as f64);
    metrics.insert("converse_violations".into(), converse as f64);
    Ok((checks, bad + converse))
}

/// Checks that the buckets `n = 0..=j+2` partition the cells and that
/// higher buckets are empty: every member is a cell at the right distance,
/// no bucket repeats a cell, and the sizes add up to the cell count.
fn check_buckets(cells: &DyadicCells, nu: i64) -> Result<u64> {
    let j = cells.j;
    let mut total = 0usize;
    let mut bad = 0u64;
    for n in 0..=j + 5 {
        let bucket = znj_partition(cells, nu, n)?;
        if n > j + 2 && !bucket.is_empty() {
            bad += 1;
        }
        for &k in &bucket {
            let dist = (k - nu).unsigned_abs();
            let ok = if n == 0 { dist == 0 } else { dist >= 1 << (n - 1) && dist < 1 << n };
            if !ok || cells.position(k).is_none() {
                bad += 1;
            }
        }
        if bucket.windows(2).any(|w| w[0] >= w[1]) {
            bad += 1;
        }
        total += bucket.len();
    }
    if total != cells.len() {
        bad += 1;
    }
    Ok(bad)
}

/// `#Z_{n,j}(ν)` by binary search, without materializing the bucket.
fn bucket_size(cells: &DyadicCells, nu: i64, n: u32) -> usize {
    if n == 0 {
        return 1;
    }
    let (near, far) = (1i64 << (n - 1), (1i64 << n) - 1);
    let count = |lo: i64, hi: i64| {
        cells.indices.partition_point(|&k| k <= hi) - cells.indices.partition_point(|&k| k < lo)
    };
    count(nu - far, nu - near) + count(nu + near, nu + far)
}

fn znj(seed: u64, bound: f64, metrics: &mut BTreeMap<String, f64>) -> Result<(u64, u64)> {
    let sets = suite_sets(seed)?;
    let gammas = [(0.4, 0.8, 5u32), (0.3, 0.6, 4)];
    let results: Vec<(u64, u64)> = sets
        .par_iter()
        .enumerate()
        .map(|(i, (_, set))| -> Result<(u64, u64)> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2000 + i as u64));
            let (mut checks, mut bad) = (0u64, 0u64);
            for j in 0..=MAX_LEVEL {
                let cells = dyadic_cells(set, j, None);
                if cells.is_empty() {
                    continue;
                }
                // Each pick scans every cell, so large levels get fewer picks.
                let budget = if cells.len() > 1 << 14 { 6 } else { 62 };
                let picks: Vec<i64> = if cells.len() <= budget + 2 {
                    cells.indices.clone()
                } else {
                    let mut p: Vec<i64> =
                        (0..budget).map(|_| cells.indices[rng.gen_range(0..cells.len())]).collect();
                    p.push(cells.indices[0]);
                    p.push(*cells.indices.last().unwrap());
                    p
                };
                for nu in picks {
                    checks += 1;
                    bad += check_buckets(&cells, nu)?;
                }
            }
            Ok((checks, bad))
        })
        .collect::<Result<_>>()?;
    let mut checks: u64 = results.iter().map(|r| r.0).sum();
    let partition_bad: u64 = results.iter().map(|r| r.1).sum();

    // Cardinality bound on every cell of the Assouad-regular sets.
    let mut worst = 0.0f64;
    let mut bound_bad = 0u64;
    for (beta, gamma, gens) in gammas {
        let e = assouad_regular_set(beta, gamma, gens)?;
        let per_level: Vec<(u64, u64, f64)> = (0..=MAX_LEVEL)
            .into_par_iter()
            .map(|j| -> Result<(u64, u64, f64)> {
                let cells = dyadic_cells(&e.set, j, None);
                let (mut c, mut b, mut w) = (0u64, 0u64, 0.0f64);
                for &nu in &cells.indices {
                    let ratio = (0..=j + 2)
                        .map(|n| bucket_size(&cells, nu, n) as f64 / (n as f64 * gamma).exp2())
                        .fold(0.0, f64::max);
                    c += 1;
                    if ratio > bound {
                        b += 1;
                    }
                    w = w.max(ratio);
                }
                Ok((c, b, w))
            })
            .collect::<Result<_>>()?;
        for (c, b, w) in per_level {
            checks += c;
            bound_bad += b;
            worst = worst.max(w);
        }
    }
    metrics.insert("partition_violations".into(), partition_bad as f64);
    metrics.insert("bound_violations".into(), bound_bad as f64);
    metrics.insert("max_bucket_constant".into(), worst);
    Ok((checks, partition_bad + bound_bad))
}

fn inclusion(opts: &VerifyOptions, c: f64, metrics: &mut BTreeMap<String, f64>) -> Result<(u64, u64)> {
    let cfg = InclusionConfig {
        c,
        seed: opts.seed,
        samples: opts.samples.unwrap_or(InclusionConfig::default().samples),
        ..Default::default()
    };
    let rep = verify_inclusion_44(&cfg)?;
    let min_ratio = rep.min_average_ratio();
    let below = u64::from(min_ratio < INCLUSION_BASELINE);
    metrics.insert("min_average_ratio".into(), min_ratio);
    metrics.insert("baseline".into(), INCLUSION_BASELINE);
    metrics.insert("sample_violations".into(), rep.total_violations() as f64);
    let checks = rep.scales.iter().map(|s| s.samples as u64).sum::<u64>() + 1;
    Ok((checks, rep.total_violations() + below))
}

fn six(bound: f64, metrics: &mut BTreeMap<String, f64>) -> Result<(u64, u64)> {
    let e = assouad_regular_set(0.4, 0.8, 5)?;
    let rep = quantity_six_assouad(&e, 2, assouad_max_level(&e))?;
    let names = ["global", "spectrum", "all_windows"];
    let mut bad = 0u64;
    for (name, s) in names.iter().zip([rep.global, rep.spectrum, rep.all_windows]) {
        metrics.insert(format!("{name}_max"), s.max);
        metrics.insert(format!("{name}_min"), s.min);
        metrics.insert(format!("{name}_ratio"), s.ratio());
        if !(s.is_positive_finite() && s.ratio() <= bound) {
            bad += 1;
        }
    }
    Ok((3, bad))
}

fn hull_halfplane(opts: &VerifyOptions, tol: f64, metrics: &mut BTreeMap<String, f64>) -> Result<(u64, u64)> {
    let points = opts.samples.unwrap_or(10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = 0u64;
    let mut bad = 0u64;
    for _ in 0..50 {
        let d = rng.gen_range(2..=6u32);
        let beta: f64 = rng.gen_range(0.01..1.0);
        let gamma: f64 = rng.gen_range(beta..=1.0);
        let region = q_vertices(d, beta, gamma)?;
        for _ in 0..points {
            let pt = RieszPoint { ip: rng.gen_range(0.0..=1.0), iq: rng.gen_range(0.0..=1.0) };
            let inside = membership(&region, pt, tol) != Classification::Outside;
            let admissible = necessary_conditions(d, beta, gamma, pt, tol)?.is_empty();
            checks += 1;
            if inside != admissible {
                bad += 1;
            }
        }
    }
    metrics.insert("disagreements".into(), bad as f64);
    Ok((checks, bad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn broken_factor_fails() {
        let opts = VerifyOptions { constant: Some(0.5), ..Default::default() };
        let r = run_suite(Suite::Factor7, &opts).unwrap();
        assert!(!r.passed);
    }
}
