//! Fractal dilation sets, covering numbers, Riesz-diagram regions and
//! scaling experiments for spherical maximal operators `M_E`.

// Negated comparisons such as `!(x > 0.0)` are used on purpose to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod covering;
pub mod dimension;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod quadrature;
pub mod region;
pub mod set_spec;
pub mod sets;
pub mod spherical;
pub mod verify;

pub use covering::{covering_number, covering_number_local, dyadic_cells, znj_partition, DyadicCells};
pub use dimension::{assouad_fit, default_levels, assouad_spectrum_fit, minkowski_fit, quantity_six, QuantitySixReport};
pub use error::{Result, SmaxError};
pub use experiments::{Family, SweepRecord, SweepResult};
pub use fit::FitReport;
pub use region::{Classification, RegionSpec, RieszPoint};
pub use set_spec::{realize, SetSpec};
pub use sets::{Interval, IntervalSet};
pub use spherical::{CylProfile, EvalGrid, RadialProfile};
pub use verify::{Suite, SuiteReport};
