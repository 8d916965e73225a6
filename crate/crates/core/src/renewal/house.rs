use super::gamma::GammaSequence;
use super::sum::Neumaier;

/// Exact state distribution of the house-of-cards chain started at 0: from
/// state `j` it climbs to `j + 1` with probability `1 − γ_j` and falls back
/// to 0 with probability `γ_j`.
///
/// At time `n` the chain lives on `0..=n`, so propagation is exact. The
/// state vector is renormalized after every step to keep the total mass at
/// one to rounding.
#[derive(Clone, Debug)]
pub struct HouseOfCards {
    gamma: Vec<f64>,
    dist: Vec<f64>,
}

impl HouseOfCards {
    /// Prepares propagation up to time `n_max`.
    pub fn new(gamma: &GammaSequence, n_max: usize) -> Self {
        let mut dist = Vec::with_capacity(n_max + 1);
        dist.push(1.0);
        HouseOfCards { gamma: gamma.values(n_max), dist }
    }

    pub fn time(&self) -> usize {
        self.dist.len() - 1
    }

    /// `P(S_n = j)` for `j = 0..=n`.
    pub fn distribution(&self) -> &[f64] {
        &self.dist
    }

    /// `P(S_n = 0)`.
    pub fn at_zero(&self) -> f64 {
        self.dist[0]
    }

    /// Advances one step. Returns `false` once the prepared horizon is reached.
    pub fn step(&mut self) -> bool {
        let n = self.time();
        if n >= self.gamma.len() {
            return false;
        }
        let mut reset = Neumaier::default();
        self.dist.push(0.0);
        for j in (0..=n).rev() {
            let p = self.dist[j];
            reset.add(p * self.gamma[j]);
            self.dist[j + 1] = p * (1.0 - self.gamma[j]);
        }
        self.dist[0] = reset.total();
        let total = Neumaier::sum(&self.dist);
        if total > 0.0 && total != 1.0 {
            for d in &mut self.dist {
                *d /= total;
            }
        }
        true
    }

    /// `P(S_n ≥ k)` for `k = 0..=k_max`.
    pub fn tails(&self, k_max: usize) -> Vec<f64> {
        let mut out = vec![0.0; k_max + 1];
        let mut acc = Neumaier::default();
        for j in (0..self.dist.len()).rev() {
            acc.add(self.dist[j]);
            if j <= k_max {
                out[j] = acc.total();
            }
        }
        out
    }
}

/// `γ*_n = P(S_n = 0)` for `n = 0..=n_max`.
pub fn return_probabilities(gamma: &GammaSequence, n_max: usize) -> Vec<f64> {
    let mut chain = HouseOfCards::new(gamma, n_max);
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    while chain.step() {
        out.push(chain.at_zero());
    }
    out
}

/// `P(S_n ≥ k)` for `n = 0..=n_max` (outer) and `k = 0..=k_max` (inner).
pub fn state_tails(gamma: &GammaSequence, n_max: usize, k_max: usize) -> Vec<Vec<f64>> {
    let mut chain = HouseOfCards::new(gamma, n_max);
    let mut out = Vec::with_capacity(n_max + 1);
    loop {
        out.push(chain.tails(k_max));
        if !chain.step() {
            break;
        }
    }
    out
}

/// Largest violation of the one-step tail recursion
/// `P(S_{n+1} ≥ k) = (1 − γ_{k−1}) P(S_n ≥ k−1) + Σ_{m ≥ k} (γ_{m−1} − γ_m) P(S_n ≥ m)`
/// over `n < n_max` and `1 ≤ k ≤ n + 1`.
pub fn recurrence_residual(gamma: &GammaSequence, n_max: usize) -> f64 {
    let g = gamma.values(n_max + 1);
    let mut chain = HouseOfCards::new(gamma, n_max);
    let mut worst = 0.0f64;
    let mut prev = chain.tails(n_max + 1);
    while chain.step() {
        let n = chain.time();
        let next = chain.tails(n_max + 1);
        // suffix sums Σ_{m ≥ k} (γ_{m−1} − γ_m) P(S_{n−1} ≥ m); tails vanish past n − 1
        let mut suffix = 0.0;
        for k in (1..=n).rev() {
            suffix += (g[k - 1] - g[k]) * prev[k];
            let rhs = (1.0 - g[k - 1]) * prev[k - 1] + suffix;
            worst = worst.max((next[k] - rhs).abs());
        }
        prev = next;
    }
    worst
}

/// Comparison of `P(S_n ≤ k)` against its expansion over the time of the
/// last visit to 0.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct LastVisitCheck {
    /// `max |P(S_n ≤ k) − Σ_{j ≤ k} Π_{m=0}^{j−1}(1 − γ_m) γ*_{n−j}|`.
    pub exact_residual: f64,
    /// Smallest value of the first-factor-dropped form
    /// `Σ_{j ≤ k} Π_{m=1}^{j−1}(1 − γ_m) γ*_{n−j}` minus `P(S_n ≤ k)`.
    pub dropped_factor_min_excess: f64,
    /// Largest such excess.
    pub dropped_factor_max_excess: f64,
}

/// Checks the last-visit expansion for all `n ≤ n_max`, `k ≤ k_max`.
///
/// The chain-exact expansion uses `Π_{m=0}^{j−1}`; the variant that starts
/// the product at `m = 1` is reported alongside and is always an upper bound.
pub fn last_visit_check(gamma: &GammaSequence, n_max: usize, k_max: usize) -> LastVisitCheck {
    let g = gamma.values(n_max.max(k_max) + 1);
    let star = return_probabilities(gamma, n_max);
    let mut exact_prod = vec![1.0; k_max + 1];
    let mut dropped_prod = vec![1.0; k_max + 1];
    for j in 1..=k_max {
        exact_prod[j] = exact_prod[j - 1] * (1.0 - g[j - 1]);
        dropped_prod[j] = if j == 1 { 1.0 } else { dropped_prod[j - 1] * (1.0 - g[j - 1]) };
    }
    let mut chain = HouseOfCards::new(gamma, n_max);
    let mut out = LastVisitCheck {
        exact_residual: 0.0,
        dropped_factor_min_excess: f64::INFINITY,
        dropped_factor_max_excess: f64::NEG_INFINITY,
    };
    loop {
        let n = chain.time();
        let dist = chain.distribution();
        let mut direct = 0.0;
        let mut exact = 0.0;
        let mut dropped = 0.0;
        for k in 0..=k_max {
            if k <= n {
                direct += dist[k];
                exact += exact_prod[k] * star[n - k];
                dropped += dropped_prod[k] * star[n - k];
            }
            out.exact_residual = out.exact_residual.max((direct - exact).abs());
            out.dropped_factor_min_excess = out.dropped_factor_min_excess.min(dropped - direct);
            out.dropped_factor_max_excess = out.dropped_factor_max_excess.max(dropped - direct);
        }
        if !chain.step() {
            break;
        }
    }
    out
}
