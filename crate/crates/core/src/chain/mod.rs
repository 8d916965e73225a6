//! Chains with complete connections: kernels, sampling, stationary measures
//! and exact transfer-operator iterates.

mod function;
mod kernel;
mod sample;
mod stationary;
mod transfer;

pub use function::CylinderFunction;
pub use kernel::{GammaIndexing, TransitionKernel, MAX_WINDOW};
pub(crate) use sample::History;
pub use sample::{empirical_law, sample_chain, Trajectory};
pub use stationary::{stationary_measure, stationary_measure_at, StationaryMeasure};
pub use transfer::{correlation_series, exact_correlation, law_at, propagate, transfer_iterate, WORK_BUDGET};
