//! Covering numbers `N(E, δ)`, their localized versions, and the dyadic
//! cell families `I_j(E)` with the distance buckets `Z_{n,j}(ν)`.

use serde::Serialize;

use crate::error::{param, Result, SmaxError};
use crate::sets::{Interval, IntervalSet};

/// Left-to-right greedy cover of sorted, disjoint components by closed
/// intervals `[x, x + δ]`. A point `y` counts as covered when
/// `y <= x + δ + slack`.
fn greedy_count<I: IntoIterator<Item = Interval>>(components: I, delta: f64, slack: f64) -> u64 {
    let mut count = 0u64;
    let mut reach = f64::NEG_INFINITY;
    for iv in components {
        if iv.hi <= reach + slack {
            continue;
        }
        let start = if iv.lo > reach + slack { iv.lo } else { reach };
        let n = ((iv.hi - start - slack) / delta).ceil().max(1.0);
        count += n as u64;
        reach = start + n * delta;
    }
    count
}

/// Minimal number of closed intervals of length `delta` covering `E`
/// (zero for the empty set). The greedy sweep is exact in one dimension.
pub fn covering_number(set: &IntervalSet, delta: f64) -> Result<u64> {
    check_delta(delta)?;
    Ok(greedy_count(set.intervals().iter().copied(), delta, set.merge_tol()))
}

/// `N(E ∩ I, δ)` for the closed window `I`.
pub fn covering_number_local(set: &IntervalSet, window: Interval, delta: f64) -> Result<u64> {
    check_delta(delta)?;
    if window.lo > window.hi {
        return Err(param("window with lo > hi"));
    }
    Ok(local_count(set, window, delta))
}

/// Left endpoints of the greedy cover of `E ∩ I` by length-`delta`
/// intervals. Each start is a point of `E` and consecutive starts are at
/// least `delta` apart.
pub fn greedy_starts(set: &IntervalSet, window: Interval, delta: f64) -> Result<Vec<f64>> {
    check_delta(delta)?;
    let slack = set.merge_tol();
    let mut starts = Vec::new();
    let mut reach = f64::NEG_INFINITY;
    for iv in set.clipped(window.lo, window.hi) {
        if iv.hi <= reach + slack {
            continue;
        }
        let mut x = if iv.lo > reach + slack { iv.lo } else { reach };
        loop {
            starts.push(x);
            reach = x + delta;
            if iv.hi <= reach + slack {
                break;
            }
            x = reach;
        }
    }
    Ok(starts)
}

#[inline]
pub(crate) fn local_count(set: &IntervalSet, window: Interval, delta: f64) -> u64 {
    greedy_count(set.clipped(window.lo, window.hi), delta, set.merge_tol())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(param(format!("delta={delta} must be positive and finite")));
    }
    Ok(())
}

/// The worst window of a sliding family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowMax {
    pub count: u64,
    pub window: Interval,
}

/// `max_I N(E ∩ I, δ)` over the windows `I = [a, a + len]` with
/// `a = ambient.lo + i·len/2`, `i >= 0`, `a <= ambient.hi`.
///
/// Only windows meeting `E` are visited, so the cost is linear in the
/// number of components rather than in the number of windows.
pub fn max_window_count(set: &IntervalSet, len: f64, delta: f64) -> Result<WindowMax> {
    check_delta(delta)?;
    if !(len > 0.0) {
        return Err(param("window length must be positive"));
    }
    let amb = set.ambient();
    let step = len / 2.0;
    let last = ((amb.hi - amb.lo) / step).floor().max(0.0) as i64;
    let start_of = |i: i64| amb.lo + i as f64 * step;

    let mut best = WindowMax { count: 0, window: Interval::new(amb.lo, amb.lo + len) };
    let mut next_i: i64 = 0;
    for iv in set.intervals() {
        let first = (((iv.lo - len - amb.lo) / step).ceil() as i64 - 1).max(next_i);
        let stop = (((iv.hi - amb.lo) / step).floor() as i64 + 1).min(last);
        for i in first..=stop {
            let a = start_of(i);
            let w = Interval::new(a, a + len);
            let c = local_count(set, w, delta);
            if c > best.count {
                best = WindowMax { count: c, window: w };
            }
        }
        next_i = next_i.max(stop + 1);
    }
    Ok(best)
}

/// Level-`j` dyadic cells `[k 2^-j, (k+1) 2^-j)` meeting `E`.
///
/// A point `x` lies in cell `⌊x 2^j⌋`, so a point on a dyadic boundary is
/// assigned to the cell on its right.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicCells {
    pub j: u32,
    pub indices: Vec<i64>,
}

impl DyadicCells {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn width(&self) -> f64 {
        (-(self.j as f64)).exp2()
    }

    /// The discretized dilations `t_ν = k 2^-j`.
    pub fn left_endpoints(&self) -> Vec<f64> {
        let w = self.width();
        self.indices.iter().map(|&k| k as f64 * w).collect()
    }

    pub fn cell(&self, k: i64) -> Interval {
        let w = self.width();
        Interval::new(k as f64 * w, (k + 1) as f64 * w)
    }

    pub fn position(&self, k: i64) -> Option<usize> {
        self.indices.binary_search(&k).ok()
    }
}

pub fn dyadic_cells(set: &IntervalSet, j: u32, window: Option<Interval>) -> DyadicCells {
    let scale = (j as f64).exp2();
    let w = window.unwrap_or(Interval::new(f64::NEG_INFINITY, f64::INFINITY));
    let mut indices: Vec<i64> = Vec::new();
    for iv in set.clipped(w.lo, w.hi) {
        let a = (iv.lo * scale).floor() as i64;
        let b = (iv.hi * scale).floor() as i64;
        let from = match indices.last() {
            Some(&last) if last >= a => last + 1,
            _ => a,
        };
        indices.extend(from..=b);
    }
    DyadicCells { j, indices }
}

/// `Z_{n,j}(ν)`: cells `ν'` with `2^(n-1) <= |k_ν - k_ν'| < 2^n` (in units of
/// `2^-j`). The `n = 0` bucket is `{ν}` itself, so the buckets
/// `n = 0..=j+2` partition all cells.
pub fn znj_partition(cells: &DyadicCells, nu: i64, n: u32) -> Result<Vec<i64>> {
    if cells.position(nu).is_none() {
        return Err(SmaxError::Index(format!("cell {nu} is not in I_{}(E)", cells.j)));
    }
    if n == 0 {
        return Ok(vec![nu]);
    }
    if n > 62 {
        return Ok(Vec::new());
    }
    let near = 1i64 << (n - 1);
    let far = (1i64 << n) - 1;
    let range = |lo: i64, hi: i64| {
        let a = cells.indices.partition_point(|&k| k < lo);
        let b = cells.indices.partition_point(|&k| k <= hi);
        cells.indices[a..b].iter().copied()
    };
    Ok(range(nu - far, nu - near).chain(range(nu + near, nu + far)).collect())
}
