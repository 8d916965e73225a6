//! Upper bounds on decay of correlations and their verification against
//! exact or sampled correlations.
//!
//! Unit-clock bounds use `γ_m = 1 − e^{−var_m(ψ)}` for the normalized
//! potential `ψ`; block-clock bounds use the rest sums of the input
//! potential under a block schedule.

mod constant;
mod series;
mod verify;

pub use crate::coupling::{auto_schedule, auto_schedule_from, validate_schedule, BlockSchedule};
pub use constant::{ConstantC, INITIAL_CUTOFF, MAX_CUTOFF, OSCILLATION_TOL};
pub use series::{
    holder_bound, holder_series, single_coordinate_bound, unit_bounds, unit_series, block_bounds,
    block_series, theta_norm, unit_gamma, UnitSeries, UnitBound, BlockSeries,
};
pub use verify::{verify_bounds, BoundReport, BoundRow, Method, ReportHeader, Violation, VerifyOptions};
