//! Fixtures shared by the benchmarks.

use smax_core::sets::{cantor_endpoints, convex_sequence_set, Interval, IntervalSet};

pub fn cantor(depth: u32) -> IntervalSet {
    cantor_endpoints(Interval::new(1.0, 2.0), 1.0 / 3.0, depth).expect("valid cantor parameters")
}

pub fn convex(n_max: u64) -> IntervalSet {
    convex_sequence_set(1.0, n_max).expect("valid convex parameters")
}
