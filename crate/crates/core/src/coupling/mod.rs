//! Maximal couplings, the coupled pair of chains started from two pasts,
//! its agreement clock, and block couplings.

mod block;
mod coupled;
mod domination;
mod maximal;

pub use block::{
    auto_schedule, auto_schedule_from, block_disagreement_profile, block_gamma, block_gamma_from, block_kernel,
    sample_block_coupled_chain, validate_schedule, BlockCoupledPath, BlockKernel, BlockSchedule, SUBADDITIVITY_CHECK,
};
pub use coupled::{
    clock_counts, conditional_disagreement, disagreement_probability, disagreement_profile, sample_coupled_chain,
    ClockCounts, CoupledPath, Estimate, MC_CHUNK,
};
pub use domination::{domination_test, DominationCell, DominationReport};
pub use maximal::{
    diagonal_weight, maximal_coupling, overlap, sample_maximal, vertex_search_diagonal, JointDistribution,
};
