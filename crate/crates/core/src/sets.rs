//! Dilation sets `E ⊂ [1,2]` as finite unions of closed intervals, and the
//! generators used by the experiments: truncated Cantor sets, convex
//! sequences and the Assouad-regular construction.

use serde::Serialize;

use crate::error::{param, Result, SmaxError};

/// Resolution floor for every [`IntervalSet`]. Experiments stop at `2^-32`,
/// so twelve bits remain before distinct points could be merged.
pub const MERGE_TOL: f64 = 1.0 / (1u64 << 44) as f64;

/// Largest number of components a generator may emit.
pub const MAX_COMPONENTS: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    #[inline]
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl From<(f64, f64)> for Interval {
    fn from((lo, hi): (f64, f64)) -> Self {
        Interval { lo, hi }
    }
}

/// A normalized finite union of disjoint closed intervals.
///
/// Components are sorted and separated by gaps strictly larger than
/// `merge_tol`; degenerate components are points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
    ambient: Interval,
    merge_tol: f64,
}

impl IntervalSet {
    /// Builds a normalized set. Components may be given in any order and may
    /// overlap; they are sorted and merged at [`MERGE_TOL`].
    pub fn new(intervals: Vec<Interval>, ambient: Interval) -> Result<Self> {
        Self::with_tol(intervals, ambient, MERGE_TOL)
    }

    pub fn with_tol(mut intervals: Vec<Interval>, ambient: Interval, merge_tol: f64) -> Result<Self> {
        if !(merge_tol > 0.0) {
            return Err(param("merge_tol must be positive"));
        }
        if !(ambient.lo <= ambient.hi) || !ambient.lo.is_finite() || !ambient.hi.is_finite() {
            return Err(param(format!("bad ambient interval {:?}", ambient)));
        }
        for iv in &intervals {
            if !(iv.lo <= iv.hi) || !iv.lo.is_finite() || !iv.hi.is_finite() {
                return Err(param(format!("bad interval [{}, {}]", iv.lo, iv.hi)));
            }
            if iv.lo < ambient.lo - merge_tol || iv.hi > ambient.hi + merge_tol {
                return Err(param(format!(
                    "interval [{}, {}] leaves ambient [{}, {}]",
                    iv.lo, iv.hi, ambient.lo, ambient.hi
                )));
            }
        }
        intervals.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut merged: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            let iv = Interval::new(iv.lo.max(ambient.lo), iv.hi.min(ambient.hi));
            match merged.last_mut() {
                Some(last) if iv.lo - last.hi <= merge_tol => last.hi = last.hi.max(iv.hi),
                _ => merged.push(iv),
            }
        }
        Ok(IntervalSet { intervals: merged, ambient, merge_tol })
    }

    pub fn empty(ambient: Interval) -> Self {
        IntervalSet { intervals: Vec::new(), ambient, merge_tol: MERGE_TOL }
    }

    pub fn from_points(points: &[f64], ambient: Interval) -> Result<Self> {
        Self::new(points.iter().map(|&x| Interval::point(x)).collect(), ambient)
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn ambient(&self) -> Interval {
        self.ambient
    }

    pub fn merge_tol(&self) -> f64 {
        self.merge_tol
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.intervals.first().map(|iv| iv.lo)
    }

    pub fn max(&self) -> Option<f64> {
        self.intervals.last().map(|iv| iv.hi)
    }

    /// Total Lebesgue measure.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(Interval::len).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        let i = self.intervals.partition_point(|iv| iv.hi < x);
        self.intervals.get(i).is_some_and(|iv| iv.lo <= x)
    }

    /// Index of the first component whose right end is `>= x`.
    pub(crate) fn first_reaching(&self, x: f64) -> usize {
        self.intervals.partition_point(|iv| iv.hi < x)
    }

    /// Components meeting the closed window `[lo, hi]`, clipped to it.
    pub fn clipped(&self, lo: f64, hi: f64) -> impl Iterator<Item = Interval> + '_ {
        let start = self.first_reaching(lo);
        self.intervals[start..]
            .iter()
            .take_while(move |iv| iv.lo <= hi)
            .map(move |iv| Interval::new(iv.lo.max(lo), iv.hi.min(hi)))
    }

    /// The closed intersection `E ∩ [lo, hi]`, keeping the ambient.
    pub fn clip(&self, lo: f64, hi: f64) -> IntervalSet {
        IntervalSet {
            intervals: self.clipped(lo, hi).collect(),
            ambient: self.ambient,
            merge_tol: self.merge_tol,
        }
    }

    /// Smallest gap between consecutive components, `None` for fewer than two.
    pub fn min_gap(&self) -> Option<f64> {
        self.intervals.windows(2).map(|w| w[1].lo - w[0].hi).min_by(f64::total_cmp)
    }

    /// Finest dyadic level `j` with `2^-j` still at or above the set's
    /// smallest gap (and never below the merge tolerance).
    pub fn resolution_level(&self) -> u32 {
        let floor = self.min_gap().unwrap_or(1.0).max(self.merge_tol);
        (-floor.log2()).floor().max(0.0) as u32
    }

    /// Image under `x ↦ scale·x + shift` (`scale > 0`), ambient included.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<IntervalSet> {
        if !(scale > 0.0) {
            return Err(param("affine scale must be positive"));
        }
        let map = |iv: &Interval| Interval::new(scale * iv.lo + shift, scale * iv.hi + shift);
        Ok(IntervalSet {
            intervals: self.intervals.iter().map(map).collect(),
            ambient: map(&self.ambient),
            merge_tol: self.merge_tol,
        })
    }

    /// Same components inside a larger ambient interval.
    pub fn widen_ambient(&self, ambient: Interval) -> Result<IntervalSet> {
        if !ambient.contains_interval(&self.ambient) {
            return Err(SmaxError::Ambient(
                (self.ambient.lo, self.ambient.hi),
                (ambient.lo, ambient.hi),
            ));
        }
        Ok(IntervalSet { ambient, ..self.clone() })
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.intervals.iter().all(|iv| {
            let i = other.first_reaching(iv.lo);
            other
                .intervals
                .get(i)
                .is_some_and(|o| o.lo <= iv.lo + self.merge_tol && iv.hi <= o.hi + self.merge_tol)
        })
    }
}

/// Normalized union of sets sharing one ambient interval.
pub fn set_union(sets: &[IntervalSet]) -> Result<IntervalSet> {
    let first = sets.first().ok_or_else(|| param("union of no sets"))?;
    let ambient = first.ambient;
    let mut all = Vec::with_capacity(sets.iter().map(IntervalSet::len).sum());
    for s in sets {
        if s.ambient != ambient {
            return Err(SmaxError::Ambient((ambient.lo, ambient.hi), (s.ambient.lo, s.ambient.hi)));
        }
        all.extend_from_slice(&s.intervals);
    }
    IntervalSet::new(all, ambient)
}

/// Generation `k` of the Cantor dissection of `base` with ratio `mu`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CantorStage {
    pub base: Interval,
    pub mu: f64,
    pub k: u32,
    pub cells: Vec<Interval>,
}

fn check_cantor(base: Interval, mu: f64, k: u32) -> Result<()> {
    if !(mu > 0.0 && mu <= 0.5) {
        return Err(param(format!("cantor ratio mu={mu} outside (0, 1/2]")));
    }
    if !(base.lo < base.hi) {
        return Err(param("cantor base must have positive length"));
    }
    if k >= 26 {
        return Err(param(format!("cantor depth {k} exceeds the component cap")));
    }
    Ok(())
}

/// Cell `nu` of generation `k`: the binary digits of `nu`, most significant
/// first, choose the left (0) or right (1) `mu`-fraction at each step.
pub fn cantor_cell(base: Interval, mu: f64, k: u32, nu: u64) -> Interval {
    let (mut lo, mut hi) = (base.lo, base.hi);
    for level in (0..k).rev() {
        let len = (hi - lo) * mu;
        if (nu >> level) & 1 == 0 {
            hi = lo + len;
        } else {
            lo = hi - len;
        }
    }
    Interval::new(lo, hi)
}

pub fn cantor_generation(base: Interval, mu: f64, k: u32) -> Result<CantorStage> {
    check_cantor(base, mu, k)?;
    let cells = (0..1u64 << k).map(|nu| cantor_cell(base, mu, k, nu)).collect();
    Ok(CantorStage { base, mu, k, cells })
}

/// The `2^(k+1)` boundary points of the generation-`k` cells.
pub fn cantor_endpoints(base: Interval, mu: f64, k: u32) -> Result<IntervalSet> {
    let stage = cantor_generation(base, mu, k)?;
    let pts: Vec<Interval> = stage
        .cells
        .iter()
        .flat_map(|c| [Interval::point(c.lo), Interval::point(c.hi)])
        .collect();
    IntervalSet::new(pts, base)
}

/// `{1 + n^-a : 1 <= n <= n_max} ∪ {1}` inside `[1, 2]`.
pub fn convex_sequence_set(a: f64, n_max: u64) -> Result<IntervalSet> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(param(format!("convex sequence exponent a={a} must be positive")));
    }
    if n_max == 0 {
        return Err(param("convex sequence needs n_max >= 1"));
    }
    if n_max as usize > MAX_COMPONENTS {
        return Err(param(format!("n_max={n_max} exceeds the component cap")));
    }
    let mut pts = Vec::with_capacity(n_max as usize + 1);
    pts.push(Interval::point(1.0));
    pts.extend((1..=n_max).map(|n| Interval::point(1.0 + (n as f64).powf(-a))));
    IntervalSet::new(pts, Interval::new(1.0, 2.0))
}

/// One block `E_k` of the Assouad-regular construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssouadLevel {
    pub k: u32,
    /// `J_k = [1 + λ^(k+1), 1 + λ^k]`.
    pub window: Interval,
    /// Cantor generation `m(k) = 1 + ⌊k/θ⌋`.
    pub m: u32,
    /// Generation-cell length `μ^m(k)·|J_k|`.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssouadRegular {
    pub set: IntervalSet,
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub mu: f64,
    pub theta: f64,
    pub levels: Vec<AssouadLevel>,
}

impl AssouadRegular {
    pub fn level(&self, k: u32) -> Option<&AssouadLevel> {
        self.levels.iter().find(|l| l.k == k)
    }

    /// The smallest construction scale, `δ_gens`.
    pub fn finest_delta(&self) -> f64 {
        self.levels.last().map_or(1.0, |l| l.delta)
    }
}

/// `m(k) = 1 + ⌊k/θ⌋`, with a small guard so that exact quotients such as
/// `k/(1/3)` do not round down.
pub fn assouad_generation(k: u32, theta: f64) -> u32 {
    1 + (k as f64 / theta + 1e-9).floor() as u32
}

pub fn assouad_regular_set(beta: f64, gamma: f64, gens: u32) -> Result<AssouadRegular> {
    if !(0.0 < beta && beta < gamma && gamma < 1.0) {
        return Err(param(format!("need 0 < beta < gamma < 1, got beta={beta}, gamma={gamma}")));
    }
    if gens == 0 {
        return Err(param("assouad construction needs gens >= 1"));
    }
    let lambda = (-1.0 / beta).exp2();
    let mu = (-1.0 / gamma).exp2();
    let theta = 1.0 - beta / gamma;

    let mut levels = Vec::with_capacity(gens as usize);
    let mut total: usize = 0;
    for k in 1..=gens {
        let window = Interval::new(1.0 + lambda.powi(k as i32 + 1), 1.0 + lambda.powi(k as i32));
        let m = assouad_generation(k, theta);
        let delta = mu.powi(m as i32) * window.len();
        if delta < MERGE_TOL {
            return Err(SmaxError::Resolution(format!(
                "delta_{k} = {delta:e} is below the merge tolerance; lower gens"
            )));
        }
        total += 1usize << (m + 1).min(40);
        if m >= 26 || total > MAX_COMPONENTS {
            return Err(SmaxError::Resolution(format!(
                "generation {k} needs 2^{} points; lower gens",
                m + 1
            )));
        }
        levels.push(AssouadLevel { k, window, m, delta });
    }

    let ambient = Interval::new(1.0, 1.0 + lambda);
    let mut pts = Vec::with_capacity(total);
    for lvl in &levels {
        let stage = cantor_generation(lvl.window, mu, lvl.m)?;
        pts.extend(stage.cells.iter().flat_map(|c| [Interval::point(c.lo), Interval::point(c.hi)]));
    }
    let set = IntervalSet::new(pts, ambient)?;
    Ok(AssouadRegular { set, beta, gamma, lambda, mu, theta, levels })
}
