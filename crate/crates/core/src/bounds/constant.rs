use serde::Serialize;

use crate::error::{Error, Result};
use crate::renewal::{tau_distribution, GammaSequence};

/// First cutoff tried for the supremum in the constant.
pub const INITIAL_CUTOFF: usize = 256;
/// Largest cutoff before certification gives up.
pub const MAX_CUTOFF: usize = 1 << 16;
/// Largest relative oscillation of the ratio over the trailing window.
pub const OSCILLATION_TOL: f64 = 0.01;

/// `C = w_0 + sup_{k ≥ 1} w_k / P(τ = k)`, with the supremum past the
/// cutoff bounded in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConstantC {
    pub value: f64,
    /// `w_0`.
    pub head: f64,
    /// Largest ratio for `1 ≤ k ≤ cutoff`.
    pub window_max: f64,
    pub argmax: usize,
    /// `1 / P(τ = ∞)`, the limit of the ratio when `w_k / w_{k−1} → 1`.
    pub limit: f64,
    /// Bound on every ratio with `k > cutoff`.
    pub tail_bound: f64,
    pub cutoff: usize,
    /// `(max − min) / max` of the ratio over `[cutoff/2, cutoff]`; the
    /// window is accepted below [`OSCILLATION_TOL`] or when the ratio is
    /// nonincreasing across it.
    pub oscillation: f64,
}

/// Certifies the constant for weights `w_k` (given by `ln_weight`) against
/// the first-return law of `gamma`. `tail_ratio(K)` must bound
/// `sup_{k > K} w_k / γ_{k−1}`.
pub(crate) fn certify(
    head: f64,
    ln_weight: impl Fn(usize) -> f64,
    gamma: &GammaSequence,
    tail_ratio: impl Fn(usize) -> f64,
) -> Result<ConstantC> {
    let mut cutoff = INITIAL_CUTOFF;
    loop {
        let tau = tau_distribution(gamma, cutoff);
        let p_inf = tau.infinity;
        if !(p_inf.lower > 0.0) {
            return Err(Error::NotSummable("P(τ = ∞) = 0: the gamma sequence is not summable".into()));
        }
        let ln_ratio = |k: usize| {
            let w = ln_weight(k);
            if w == f64::NEG_INFINITY {
                w
            } else {
                w - gamma.ln_value(k - 1) - tau.log_survival[k - 1]
            }
        };
        let (mut window_max, mut argmax) = (0.0f64, 0);
        for k in 1..=cutoff {
            let lr = ln_ratio(k);
            if lr.is_nan() || lr == f64::INFINITY {
                return Err(Error::Numerical(format!("ratio at k = {k} is unbounded")));
            }
            let r = lr.exp();
            if r > window_max {
                window_max = r;
                argmax = k;
            }
        }
        let window: Vec<f64> = (cutoff / 2..=cutoff).map(|k| ln_ratio(k).exp()).filter(|r| *r > 0.0).collect();
        let oscillation = match window.iter().copied().reduce(f64::max) {
            Some(hi) => (hi - window.iter().copied().fold(f64::INFINITY, f64::min)) / hi,
            None => 0.0,
        };
        // a ratio still falling across the window peaks before it
        let falling = window.windows(2).all(|w| w[1] <= w[0]);
        if oscillation < OSCILLATION_TOL || falling {
            let limit = 1.0 / p_inf.value;
            let tail_bound = tail_ratio(cutoff) / p_inf.lower;
            let sup = window_max.max(1.01 * limit).max(tail_bound);
            return Ok(ConstantC {
                value: head + sup,
                head,
                window_max,
                argmax,
                limit,
                tail_bound,
                cutoff,
                oscillation,
            });
        }
        if cutoff >= MAX_CUTOFF {
            return Err(Error::Numerical(format!(
                "ratio still oscillates by {:.2}% over [{}, {cutoff}]",
                100.0 * oscillation,
                cutoff / 2
            )));
        }
        cutoff *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::VariationSequence;

    fn unit_constant(v: &VariationSequence) -> Result<ConstantC> {
        let g = GammaSequence::from_variations(v, 0, 1.0).unwrap();
        certify(v.value(0), |k| v.ln_value(k), &g, |k| 1.0 + v.value(k))
    }

    #[test]
    fn markov_example() {
        let v = VariationSequence::finite(vec![9f64.ln(), 8f64.ln()]).unwrap();
        let c = unit_constant(&v).unwrap();
        // P(τ = ∞) = (1/9)(1/8)
        assert!((c.limit - 72.0).abs() < 1e-9);
        assert!((c.window_max - 8f64.ln() * 9.0 / 8.0).abs() < 1e-12);
        assert_eq!(c.argmax, 1);
        assert!((c.value - (9f64.ln() + 72.0 * 1.01)).abs() < 1e-9);
    }

    #[test]
    fn geometric_and_polynomial_certify() {
        let g = unit_constant(&VariationSequence::geometric(1.0, 0.5).unwrap()).unwrap();
        assert_eq!(g.cutoff, INITIAL_CUTOFF);
        assert!(g.value.is_finite() && g.value >= g.window_max);
        let p = unit_constant(&VariationSequence::polynomial(0.5, 3.0).unwrap()).unwrap();
        assert!(p.value.is_finite() && p.oscillation < OSCILLATION_TOL);
    }

    #[test]
    fn window_ratio_matches_direct() {
        let v = VariationSequence::geometric(0.8, 0.6).unwrap();
        let gamma = GammaSequence::from_variations(&v, 0, 1.0).unwrap();
        let c = unit_constant(&v).unwrap();
        let tau = tau_distribution(&gamma, c.cutoff);
        let direct = (1..=c.cutoff).map(|k| v.value(k) / tau.pmf[k]).fold(0.0, f64::max);
        assert!((c.window_max - direct).abs() < 1e-9 * direct);
    }
}
