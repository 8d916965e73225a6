use serde::Serialize;

use super::gamma::{GammaSequence, GammaTail};
use super::house::return_probabilities;
use super::tau::{tau_distribution, TauDistribution};
use crate::error::{Error, Result};

/// Truncated generating functions `F(s) = Σ P(τ = n) s^n` and
/// `G(s) = Σ γ*_n s^n` with certified remainders.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeneratingFunctions {
    pub s: f64,
    pub n_max: usize,
    pub f: f64,
    pub g: f64,
    /// Bound on `F(s) − f`.
    pub f_remainder: f64,
    /// Bound on `G(s) − g`.
    pub g_remainder: f64,
    /// `1/(1 − f) − g`; lies in `[0, g_remainder]` when `G = 1/(1 − F)`.
    pub identity_gap: f64,
    pub consistent: bool,
}

/// Evaluates `F` and `G` at `s ≥ 0` up to degree `n_max`.
pub fn generating_functions(gamma: &GammaSequence, s: f64, n_max: usize) -> Result<GeneratingFunctions> {
    let tau = tau_distribution(gamma, n_max);
    let star = return_probabilities(gamma, n_max);
    evaluate(gamma, &tau, &star, s)
}

pub(crate) fn evaluate(gamma: &GammaSequence, tau: &TauDistribution, star: &[f64], s: f64) -> Result<GeneratingFunctions> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidArgument(format!("s = {s} must be finite and ≥ 0")));
    }
    let n = tau.n_max();
    let (mut f, mut g, mut pow) = (0.0, star[0], 1.0);
    for k in 1..=n {
        pow *= s;
        f += tau.pmf[k] * pow;
        g += star[k] * pow;
    }
    let s_next = pow * s;
    let surv = tau.survival(n);
    let f_remainder = if s <= 1.0 {
        s_next * (surv - tau.infinity.lower).max(0.0)
    } else {
        beyond_one_remainder(gamma, n, surv, s, s_next)?
    };
    if f >= 1.0 {
        return Err(Error::InvalidArgument(format!("F({s}) ≥ 1: s is at or beyond the radius of G")));
    }
    let via_identity = if f + f_remainder < 1.0 { 1.0 / (1.0 - f - f_remainder) - g } else { f64::INFINITY };
    let g_remainder = if s < 1.0 { (s_next / (1.0 - s)).min(via_identity) } else { via_identity };
    if g_remainder.is_infinite() {
        return Err(Error::InvalidArgument(format!("F({s}) may reach 1 within the truncation remainder")));
    }
    let identity_gap = 1.0 / (1.0 - f) - g;
    let slack = 1e-12 * (1.0 + g.abs());
    let consistent = identity_gap >= -slack && identity_gap <= g_remainder + slack;
    Ok(GeneratingFunctions { s, n_max: n, f, g, f_remainder, g_remainder, identity_gap, consistent })
}

/// `Σ_{k > n} P(τ = k) s^k` for `s > 1`, where
/// `P(τ = k) = γ_{k−1} P(τ > k − 1) ≤ P(τ > n) γ_{k−1} Π_{n ≤ m < k−1} (1 − γ_m)`.
fn beyond_one_remainder(gamma: &GammaSequence, n: usize, surv: f64, s: f64, s_next: f64) -> Result<f64> {
    let beyond = || Err(Error::InvalidArgument(format!("s = {s} is beyond the certified radius of F")));
    if let GammaTail::Constant { value } = gamma.tail() {
        if gamma.table().len() <= n {
            let q = s * (1.0 - value);
            return if q < 1.0 { Ok(surv * value * s_next / (1.0 - q)) } else { beyond() };
        }
    }
    match gamma.geometric_envelope() {
        Some((c, theta, from)) if from <= n => {
            if c == 0.0 {
                Ok(0.0)
            } else if s * theta < 1.0 {
                Ok(surv * c * s_next * theta.powf(n as f64) / (1.0 - s * theta))
            } else {
                beyond()
            }
        }
        _ => beyond(),
    }
}
