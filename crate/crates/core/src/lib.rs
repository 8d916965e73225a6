//! Couplings, dominating renewal chains and decay-of-correlation bounds for
//! chains with complete connections.
//!
//! The crate is organised bottom-up:
//!
//! - [`seq`]: alphabets, finite contexts for infinite histories, variation
//!   sequences;
//! - [`potential`]: potentials, exact variations, normalization;
//! - [`chain`]: transition kernels, sampling, stationary measures, exact
//!   transfer-operator iterates and correlations;
//! - [`coupling`]: maximal couplings, coupled chains, block couplings;
//! - [`renewal`]: the dominating house-of-cards chain and its renewal
//!   quantities;
//! - [`bounds`]: correlation upper bounds and their verification.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds;
pub mod chain;
pub mod coupling;
pub mod error;
mod graph;
pub mod io;
pub mod par;
pub mod potential;
pub mod renewal;
pub mod rng;
pub mod seq;
pub mod special;

pub use error::{Error, Result};

/// Default cap on the number of table entries any enumeration may touch.
pub const DEFAULT_BUDGET: u128 = 1 << 24;

pub(crate) fn check_budget(needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        Err(Error::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}

pub(crate) fn entries(alphabet_size: usize, len: usize) -> u128 {
    (alphabet_size as u128).checked_pow(len as u32).unwrap_or(u128::MAX)
}
