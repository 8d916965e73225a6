use serde::Serialize;

use super::gamma::GammaSequence;
use super::genfun::evaluate;
use super::house::return_probabilities;
use super::sum::{fit_line, LineFit};
use super::tau::tau_distribution;
use crate::error::{Error, Result};

/// Default number of terms inspected by [`radius_estimate`].
pub const RADIUS_HORIZON: usize = 10_000;

/// Numerical estimate of `lim γ_n^{-1/n}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadiusEstimate {
    /// `e^{-slope}` of `log γ_n` on the window; infinite when flagged
    /// super-exponential.
    pub radius: f64,
    pub window: (usize, usize),
    pub slope: f64,
    /// Slopes of the two window halves.
    pub half_slopes: (f64, f64),
    pub super_exponential: bool,
}

/// [`radius_estimate_with`] over [`RADIUS_HORIZON`] terms.
pub fn radius_estimate(gamma: &GammaSequence) -> Result<RadiusEstimate> {
    radius_estimate_with(gamma, RADIUS_HORIZON)
}

/// Regresses `log γ_n` on the trailing half of `0..=horizon`. A vanishing
/// term, or a second-half slope steeper than 1.2 times the first-half slope,
/// marks super-exponential decay and an infinite radius.
pub fn radius_estimate_with(gamma: &GammaSequence, horizon: usize) -> Result<RadiusEstimate> {
    if !gamma.is_summable() {
        return Err(Error::NotSummable("the radius statement needs a summable γ".into()));
    }
    let horizon = horizon.max(8);
    let lo = horizon / 2;
    let window = (lo, horizon);
    let logs: Vec<f64> = (0..=horizon).map(|m| gamma.ln_value(m)).collect();
    let infinite = |half_slopes| RadiusEstimate {
        radius: f64::INFINITY,
        window,
        slope: f64::NEG_INFINITY,
        half_slopes,
        super_exponential: true,
    };
    if logs[lo..].contains(&f64::NEG_INFINITY) {
        return Ok(infinite((f64::NEG_INFINITY, f64::NEG_INFINITY)));
    }
    let slope_on = |a: usize, b: usize| {
        let x: Vec<f64> = (a..=b).map(|m| m as f64).collect();
        let y = &logs[a..=b];
        fit_line(&x, y).map(|f| f.slope).unwrap_or(0.0)
    };
    let mid = (lo + horizon) / 2;
    let halves = (slope_on(lo, mid), slope_on(mid, horizon));
    let slope = slope_on(lo, horizon);
    if halves.1 < -1e-12 && halves.1 < 1.2 * halves.0 {
        return Ok(infinite(halves));
    }
    Ok(RadiusEstimate { radius: (-slope).exp(), window, slope, half_slopes: halves, super_exponential: false })
}

/// Radius of convergence of `G(s) = Σ γ*_n s^n`: 1 when the chain is
/// recurrent or `F` has radius 1, otherwise the root of `F(s) = 1` below the
/// radius of `F` (or that radius if `F` stays below 1).
pub fn g_radius(gamma: &GammaSequence) -> Result<f64> {
    let n = 4096;
    let tau = tau_distribution(gamma, n);
    if tau.infinity.upper == 0.0 || !gamma.is_summable() {
        return Ok(1.0);
    }
    let rf = radius_estimate(gamma)?.radius;
    if rf <= 1.0 + 1e-9 {
        return Ok(1.0);
    }
    let star = return_probabilities(gamma, n);
    let f_at = |s: f64| evaluate(gamma, &tau, &star, s).map(|r| r.f + r.f_remainder).unwrap_or(f64::INFINITY);
    let mut hi = if rf.is_finite() { rf * (1.0 - 1e-9) } else { 1e6 };
    if f_at(hi) < 1.0 {
        return Ok(if rf.is_finite() { rf } else { hi });
    }
    let mut lo = 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f_at(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(lo)
}

/// Decay regime of `γ*_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `γ*_n = 0` for every `n ≥ 1`.
    Vanishing,
    /// `Σ_m Π_{k ≤ m} (1 − γ_k)` converges: `γ*_n` does not tend to 0.
    NonRelaxing,
    Exponential,
    Polynomial,
    Indeterminate,
}

/// Evidence for the divergence of `Σ_m Π_{k ≤ m} (1 − γ_k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Relaxation {
    /// Partial sum over `m < horizon`.
    pub partial_sum: f64,
    /// Last product `Π_{k ≤ horizon} (1 − γ_k)`.
    pub last_term: f64,
    /// `horizon · last_term / partial_sum > 0.01`: the terms are not
    /// negligible against the running average.
    pub diverging: bool,
    pub gamma_star_last: f64,
}

/// Boundedness of `γ*_n / γ_n` over the window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioDrift {
    pub max_first_half: f64,
    pub max_second_half: f64,
    /// `max_second_half / max_first_half − 1`.
    pub drift: f64,
}

/// Numerical evidence for the decay regime of `γ*_n`. Every flag is a
/// heuristic on the stated window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub regime: Regime,
    pub horizon: usize,
    pub window: (usize, usize),
    pub gamma_summable: bool,
    /// `Σ_{n ≤ horizon} γ*_n`.
    pub gamma_star_sum: f64,
    pub relaxation: Relaxation,
    /// `log γ*_n` against `n`; the rate is `-slope`.
    pub log_linear: Option<LineFit>,
    /// `log γ*_n` against `log n`; the exponent is `-slope`.
    pub log_log: Option<LineFit>,
    pub ratio: Option<RatioDrift>,
}

const R2_THRESHOLD: f64 = 0.99;
const DRIFT_LIMIT: f64 = 0.1;

/// Classifies over the trailing half of the horizon (or of the range where
/// `γ*_n` is still representable).
pub fn classify_decay(gamma: &GammaSequence, horizon: usize) -> Result<DecayReport> {
    classify(gamma, horizon, None)
}

/// Classifies over an explicit window `lo..=hi ⊆ 1..=horizon`.
pub fn classify_decay_window(gamma: &GammaSequence, horizon: usize, lo: usize, hi: usize) -> Result<DecayReport> {
    if !(1 <= lo && lo < hi && hi <= horizon) {
        return Err(Error::InvalidArgument(format!("window {lo}..={hi} must lie in 1..={horizon}")));
    }
    classify(gamma, horizon, Some((lo, hi)))
}

fn classify(gamma: &GammaSequence, horizon: usize, window: Option<(usize, usize)>) -> Result<DecayReport> {
    if horizon < 100 {
        return Err(Error::InvalidArgument(format!("horizon {horizon} must be at least 100")));
    }
    let star = return_probabilities(gamma, horizon);
    let tau = tau_distribution(gamma, horizon + 1);
    let products: f64 = tau.log_survival[1..=horizon].iter().map(|l| l.exp()).sum();
    let last_term = tau.survival(horizon + 1);
    let relaxation = Relaxation {
        partial_sum: products,
        last_term,
        diverging: products > 0.0 && horizon as f64 * last_term / products > 0.01,
        gamma_star_last: star[horizon],
    };
    let report = |regime, window, log_linear, log_log, ratio| DecayReport {
        regime,
        horizon,
        window,
        gamma_summable: gamma.is_summable(),
        gamma_star_sum: star.iter().sum(),
        relaxation,
        log_linear,
        log_log,
        ratio,
    };

    if star[1..].iter().all(|v| *v == 0.0) {
        return Ok(report(Regime::Vanishing, (1, horizon), None, None, None));
    }
    let (lo, hi) = window.unwrap_or_else(|| {
        let last = (1..=horizon).rev().find(|&n| star[n] > f64::MIN_POSITIVE).unwrap_or(1);
        ((last / 2).max(1), last)
    });
    let pts: Vec<usize> = (lo..=hi).filter(|&n| star[n] > 0.0).collect();
    let ys: Vec<f64> = pts.iter().map(|&n| star[n].ln()).collect();
    let xs: Vec<f64> = pts.iter().map(|&n| n as f64).collect();
    let lxs: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let log_linear = fit_line(&xs, &ys);
    let log_log = fit_line(&lxs, &ys);
    let gam = gamma.values(hi + 1);
    let ratio = if gam[lo..=hi].iter().all(|g| *g > 0.0) {
        let mid = (lo + hi) / 2;
        let max_on = |a: usize, b: usize| (a..=b).map(|n| star[n] / gam[n]).fold(0.0, f64::max);
        let (first, second) = (max_on(lo, mid), max_on(mid, hi));
        Some(RatioDrift { max_first_half: first, max_second_half: second, drift: second / first - 1.0 })
    } else {
        None
    };

    let regime = if !relaxation.diverging {
        Regime::NonRelaxing
    } else {
        match (log_linear, log_log) {
            (Some(e), Some(p)) if e.slope < 0.0 && e.r_squared > R2_THRESHOLD && e.r_squared >= p.r_squared => {
                Regime::Exponential
            }
            (Some(e), Some(p))
                if p.slope < 0.0
                    && p.r_squared > R2_THRESHOLD
                    && p.r_squared > e.r_squared
                    && ratio.is_some_and(|r| r.drift.abs() < DRIFT_LIMIT) =>
            {
                Regime::Polynomial
            }
            _ => Regime::Indeterminate,
        }
    };
    Ok(report(regime, (lo, hi), log_linear, log_log, ratio))
}

/// Finite-window estimate of `α = sup_i limsup_k [P(τ = i) / P(τ = ki)]^{1/k}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CondPoly {
    pub alpha: f64,
    /// The `i` attaining the estimate.
    pub argmax_i: usize,
    /// `1 / P(τ < ∞)`.
    pub threshold: f64,
    /// `alpha < threshold`.
    pub holds: bool,
    /// Range of `k` inspected.
    pub k_window: (usize, usize),
}

/// Takes the largest `[P(τ = i)/P(τ = ki)]^{1/k}` over `1 ≤ i ≤ i_max` and
/// `k` in the trailing half of `2..=k_max`.
pub fn condpoly_alpha(gamma: &GammaSequence, i_max: usize, k_max: usize) -> Result<CondPoly> {
    if i_max < 1 || k_max < 2 {
        return Err(Error::InvalidArgument("condpoly needs i_max ≥ 1 and k_max ≥ 2".into()));
    }
    let n = i_max * k_max;
    let tau = tau_distribution(gamma, n);
    let log_pmf = |m: usize| -> Result<f64> {
        let g = gamma.value(m - 1);
        if g == 0.0 || tau.pmf[m] == 0.0 && tau.log_survival[m - 1] == f64::NEG_INFINITY {
            return Err(Error::Numerical(format!("P(τ = {m}) vanishes")));
        }
        Ok(g.ln() + tau.log_survival[m - 1])
    };
    let k_lo = (k_max / 2).max(2);
    let mut best = (f64::NEG_INFINITY, 1);
    for i in 1..=i_max {
        let li = log_pmf(i)?;
        for k in k_lo..=k_max {
            let r = (li - log_pmf(k * i)?) / k as f64;
            if r > best.0 {
                best = (r, i);
            }
        }
    }
    let finite = tau.finite_mass().value;
    let threshold = if finite > 0.0 { 1.0 / finite } else { f64::INFINITY };
    let alpha = best.0.exp();
    Ok(CondPoly { alpha, argmax_i: best.1, threshold, holds: alpha < threshold, k_window: (k_lo, k_max) })
}
