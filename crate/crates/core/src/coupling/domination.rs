use serde::Serialize;

use super::coupled::clock_counts;
use crate::chain::TransitionKernel;
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::renewal::state_tails;
use crate::seq::Context;

/// Slack on the `3σ` band absorbing rounding when the estimate is exactly
/// 0 or 1.
const SLACK: f64 = 1e-12;

/// One `(n, k)` comparison of `P(S_n ≥ k)` with `P̂(T_n ≥ k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DominationCell {
    pub n: usize,
    pub k: usize,
    pub exact: f64,
    pub estimate: f64,
    pub std_err: f64,
    pub violation: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominationReport {
    pub runs: usize,
    pub seed: u64,
    pub cells: Vec<DominationCell>,
}

impl DominationReport {
    pub fn violations(&self) -> impl Iterator<Item = &DominationCell> {
        self.cells.iter().filter(|c| c.violation)
    }

    pub fn holds(&self) -> bool {
        self.violations().next().is_none()
    }

    /// Largest `exact − (estimate + 3σ)`.
    pub fn worst_excess(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| c.exact - c.estimate - 3.0 * c.std_err)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Compares the house-of-cards chain built on the kernel's gamma against
/// the Monte-Carlo clock of the coupled pair with pasts `x`, `y`.
#[allow(clippy::too_many_arguments)]
pub fn domination_test(
    kernel: &TransitionKernel,
    x: &Context,
    y: &Context,
    n_max: usize,
    k_max: usize,
    runs: usize,
    seed: u64,
    exec: Execution,
) -> Result<DominationReport> {
    let gamma = kernel
        .gamma()
        .ok_or_else(|| Error::InvalidGamma("kernel has no finite gamma sequence".into()))?;
    let exact = state_tails(gamma, n_max, k_max);
    let counts = clock_counts(kernel, x, y, n_max, k_max, runs, seed, exec)?;
    let mut cells = Vec::with_capacity((n_max + 1) * (k_max + 1));
    for (n, row) in exact.iter().enumerate() {
        for (k, &p) in row.iter().enumerate() {
            let e = counts.tail(n, k);
            cells.push(DominationCell {
                n,
                k,
                exact: p,
                estimate: e.value,
                std_err: e.std_err,
                violation: p > e.upper(3.0) + SLACK,
            });
        }
    }
    Ok(DominationReport { runs, seed, cells })
}
