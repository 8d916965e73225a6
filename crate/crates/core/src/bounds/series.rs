use serde::Serialize;

use super::constant::{certify, ConstantC};
use crate::coupling::{block_gamma_from, BlockSchedule};
use crate::error::{Error, Result};
use crate::potential::{Potential, NORMALIZATION_TOL};
use crate::renewal::{return_probabilities, GammaSequence};
use crate::seq::VariationSequence;

/// `‖f‖₁ · ‖g‖`, with a zero factor winning over an infinite one.
fn prefactor(f_norm1: f64, g_seminorm: f64) -> f64 {
    if f_norm1 == 0.0 || g_seminorm == 0.0 {
        0.0
    } else {
        f_norm1 * g_seminorm
    }
}

/// `Σ_{k=0}^{n} w_k r_{n−k}` for every `n < r.len()`.
fn convolve(w: &[f64], r: &[f64]) -> Vec<f64> {
    (0..r.len())
        .map(|n| (0..=n).map(|k| w[k] * r[n - k]).filter(|t| *t != 0.0).sum())
        .collect()
}

fn require_normalized(phi: &Potential) -> Result<()> {
    let check = phi.is_normalized(NORMALIZATION_TOL);
    if !check.normalized {
        return Err(Error::NotNormalized { deviation: check.max_deviation });
    }
    Ok(())
}

/// Correlation bounds on the unit clock for `n = 0..=n_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnitSeries {
    pub constant: ConstantC,
    pub gamma_star: Vec<f64>,
    /// `‖f‖₁ ‖g‖ Σ_{k ≤ n} var_k γ*_{n−k}`.
    pub sum_bound: Vec<f64>,
    /// `C ‖f‖₁ ‖g‖ γ*_n`.
    pub c_bound: Vec<f64>,
}

/// Both unit-clock bounds at a single `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnitBound {
    pub sum_bound: f64,
    pub c_bound: f64,
    pub c: f64,
}

/// Unit-clock bounds from variations and an explicit gamma sequence.
pub fn unit_series(
    vars: &VariationSequence,
    gamma: &GammaSequence,
    f_norm1: f64,
    g_seminorm: f64,
    n_max: usize,
) -> Result<UnitSeries> {
    if !vars.is_summable() {
        return Err(Error::NotSummable("variations are not summable".into()));
    }
    let constant = certify(vars.value(0), |k| vars.ln_value(k), gamma, |k| 1.0 + vars.value(k))?;
    let gamma_star = return_probabilities(gamma, n_max);
    let pre = prefactor(f_norm1, g_seminorm);
    let sum_bound = if pre == 0.0 {
        vec![0.0; n_max + 1]
    } else {
        convolve(&vars.values(n_max + 1), &gamma_star).into_iter().map(|s| pre * s).collect()
    };
    let c_bound = gamma_star.iter().map(|g| if pre == 0.0 { 0.0 } else { constant.value * pre * g }).collect();
    Ok(UnitSeries { constant, gamma_star, sum_bound, c_bound })
}

/// `γ_m = 1 − e^{−var_m(φ)}`.
pub fn unit_gamma(vars: &VariationSequence) -> Result<GammaSequence> {
    GammaSequence::from_variations(vars, 0, 1.0)
}

/// Unit-clock bounds at `n` for a normalized potential.
pub fn unit_bounds(phi: &Potential, f_norm1: f64, g_seminorm: f64, n: usize) -> Result<UnitBound> {
    require_normalized(phi)?;
    let vars = phi.variations();
    let t = unit_series(vars, &unit_gamma(vars)?, f_norm1, g_seminorm, n)?;
    Ok(UnitBound { sum_bound: t.sum_bound[n], c_bound: t.c_bound[n], c: t.constant.value })
}

/// Correlation bounds on the block clock for blocks `m = 0..=m_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockSeries {
    pub schedule: BlockSchedule,
    pub gamma: Vec<f64>,
    pub constant: ConstantC,
    pub gamma_star: Vec<f64>,
    /// `‖f‖₁ ‖g‖_φ Σ_{k ≤ m} var_{n_k}(φ) γ̄*_{m−k}`.
    pub sum_bound: Vec<f64>,
    /// `C̄ ‖f‖₁ ‖g‖_φ γ̄*_m`.
    pub c_bound: Vec<f64>,
}

impl BlockSeries {
    /// Bound at unit time `n`, read on the block containing `n`; `None` past
    /// the computed blocks.
    pub fn sum_at(&self, n: usize) -> Option<f64> {
        self.sum_bound.get(self.schedule.block_of(n)).copied()
    }

    pub fn c_at(&self, n: usize) -> Option<f64> {
        self.c_bound.get(self.schedule.block_of(n)).copied()
    }
}

/// Block-clock bounds from the variations of a (not necessarily normalized)
/// potential.
pub fn block_series(
    vars: &VariationSequence,
    schedule: &BlockSchedule,
    f_norm1: f64,
    g_seminorm: f64,
    m_max: usize,
) -> Result<BlockSeries> {
    let gamma = block_gamma_from(vars, schedule)?;
    let weight = |k: usize| vars.ln_value(schedule.at(k));
    // w_k ≤ rest(n_{k−1}) and r / (1 − e^{−3r}) ≤ (1 + 3r)/3
    let tail = |k: usize| (1.0 + 3.0 * vars.tail_sum(schedule.at(k))) / 3.0;
    let constant = certify(vars.value(0), weight, &gamma, tail)?;
    let gamma_star = return_probabilities(&gamma, m_max);
    let pre = prefactor(f_norm1, g_seminorm);
    let w: Vec<f64> = (0..=m_max).map(|k| vars.value(schedule.at(k))).collect();
    let sum_bound = if pre == 0.0 {
        vec![0.0; m_max + 1]
    } else {
        convolve(&w, &gamma_star).into_iter().map(|s| pre * s).collect()
    };
    let c_bound = gamma_star.iter().map(|g| if pre == 0.0 { 0.0 } else { constant.value * pre * g }).collect();
    Ok(BlockSeries {
        schedule: schedule.clone(),
        gamma: gamma.values(m_max + 1),
        constant,
        gamma_star,
        sum_bound,
        c_bound,
    })
}

/// Block-clock bounds mapped to unit time `n`: `(sum_bound, C_bound)`.
pub fn block_bounds(
    phi: &Potential,
    schedule: &BlockSchedule,
    f_norm1: f64,
    g_seminorm: f64,
    n: usize,
) -> Result<(f64, f64)> {
    let t = block_series(phi.variations(), schedule, f_norm1, g_seminorm, schedule.block_of(n))?;
    Ok((t.sum_at(n).expect("block in range"), t.c_at(n).expect("block in range")))
}

/// `‖f‖₁ ‖g‖_θ Σ_{k ≤ n} θ^{n−k} γ*_k` for every `n < gamma_star.len()`.
pub fn holder_series(gamma_star: &[f64], g_theta_norm: f64, theta: f64, f_norm1: f64) -> Result<Vec<f64>> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidArgument(format!("θ = {theta} must lie in (0, 1)")));
    }
    let pre = prefactor(f_norm1, g_theta_norm);
    let mut acc = 0.0;
    Ok(gamma_star
        .iter()
        .map(|g| {
            acc = theta * acc + g;
            if pre == 0.0 { 0.0 } else { pre * acc }
        })
        .collect())
}

/// Hölder-class bound at `n` for a normalized potential.
pub fn holder_bound(phi: &Potential, g_theta_norm: f64, theta: f64, f_norm1: f64, n: usize) -> Result<f64> {
    require_normalized(phi)?;
    let star = return_probabilities(&unit_gamma(phi.variations())?, n);
    Ok(holder_series(&star, g_theta_norm, theta, f_norm1)?[n])
}

/// `sup_k var_k(g) / θ^k`.
pub fn theta_norm(g_vars: &VariationSequence, theta: f64) -> f64 {
    let len = g_vars.support_len().unwrap_or(usize::MAX);
    if len == usize::MAX {
        return f64::INFINITY;
    }
    (0..len).map(|k| g_vars.value(k) / theta.powi(k as i32)).fold(0.0, f64::max)
}

/// `‖f‖₁ ‖g‖_∞ γ*_n` for `g` depending on the last symbol only.
pub fn single_coordinate_bound(phi: &Potential, g_sup: f64, f_norm1: f64, n: usize) -> Result<f64> {
    require_normalized(phi)?;
    let star = return_probabilities(&unit_gamma(phi.variations())?, n);
    Ok(prefactor(f_norm1, g_sup) * star[n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::Alphabet;

    fn q() -> Potential {
        let rows = vec![vec![0.9, 0.1], vec![0.2, 0.8]];
        Potential::from_matrix(Alphabet::digits(2).unwrap(), &rows).unwrap()
    }

    #[test]
    fn finite_memory_sum_has_k_terms() {
        let v = VariationSequence::finite(vec![0.5, 0.25]).unwrap();
        let g = unit_gamma(&v).unwrap();
        let t = unit_series(&v, &g, 1.0, 1.0, 30).unwrap();
        for n in 1..=30 {
            let want = 0.5 * t.gamma_star[n] + 0.25 * t.gamma_star[n - 1];
            assert!((t.sum_bound[n] - want).abs() < 1e-15);
        }
    }

    #[test]
    fn geometric_sum_matches_convolution() {
        let v = VariationSequence::geometric(1.0, 0.5).unwrap();
        let g = unit_gamma(&v).unwrap();
        let t = unit_series(&v, &g, 2.0, 0.5, 20).unwrap();
        let star = return_probabilities(&g, 20);
        let mut direct = 0.0;
        for k in 0..=20 {
            direct += 0.5f64.powi(k) * star[20 - k as usize];
        }
        assert!((t.sum_bound[20] - direct).abs() < 1e-12);
    }

    #[test]
    fn constant_g_gives_zero() {
        let b = unit_bounds(&q(), 0.7, 0.0, 12).unwrap();
        assert_eq!((b.sum_bound, b.c_bound), (0.0, 0.0));
        assert!(b.c.is_finite());
    }

    #[test]
    fn markov_dominance() {
        let phi = q();
        let gs = 1.0 / 9f64.ln();
        let f1 = 2.0 / 3.0;
        let t = unit_series(phi.variations(), &unit_gamma(phi.variations()).unwrap(), f1, gs, 200).unwrap();
        for n in 0..=200 {
            let exact = (2.0 / 9.0) * 0.7f64.powi(n as i32);
            assert!(exact <= t.sum_bound[n] + 1e-10 && exact <= t.c_bound[n] + 1e-10, "n={n}");
        }
    }

    #[test]
    fn non_normalized_rejected() {
        let phi = Potential::from_matrix(Alphabet::digits(2).unwrap(), &[vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!(matches!(unit_bounds(&phi, 1.0, 1.0, 3), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn holder_cases() {
        let star = return_probabilities(&GammaSequence::zero(), 10);
        let h = holder_series(&star, 2.0, 0.5, 3.0).unwrap();
        assert_eq!(h[0], 6.0);
        assert!((h[10] - 6.0 * 0.5f64.powi(10)).abs() < 1e-15);
        let star = return_probabilities(&GammaSequence::constant(0.1).unwrap(), 10);
        let h = holder_series(&star, 1.0, 0.9, 1.0).unwrap();
        let direct: f64 = (0..=10).map(|k| 0.9f64.powi(10 - k) * star[k as usize]).sum();
        assert!((h[10] - direct).abs() < 1e-15);
        assert!(holder_series(&star, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn single_coordinate_cases() {
        let phi = q();
        assert_eq!(single_coordinate_bound(&phi, 0.0, 1.0, 4).unwrap(), 0.0);
        assert_eq!(single_coordinate_bound(&phi, 2.0, 1.5, 0).unwrap(), 3.0);
        let star = return_probabilities(&GammaSequence::constant(0.3).unwrap(), 5);
        assert!((star[5] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn block_bounds_geometric() {
        let theta: f64 = 0.5;
        let v = VariationSequence::geometric(1.0, theta).unwrap();
        let t = block_series(&v, &BlockSchedule::unit(), 1.0, 1.0, 50).unwrap();
        for k in 0..10 {
            let want = 1.0 - (-3.0 * theta.powi(k) / (1.0 - theta)).exp();
            assert!((t.gamma[k as usize] - want).abs() < 1e-14);
        }
        assert!(t.sum_bound.iter().all(|b| b.is_finite()));
        let p = block_series(&VariationSequence::polynomial(1.0, 4.0).unwrap(), &BlockSchedule::unit(), 1.0, 1.0, 50);
        assert!(p.unwrap().c_bound[50].is_finite());
    }

    #[test]
    fn block_bounds_exceed_unit_bounds() {
        let phi = q();
        let vars = phi.variations();
        let t1 = unit_series(vars, &unit_gamma(vars).unwrap(), 1.0, 1.0, 40).unwrap();
        let t2 = block_series(vars, &BlockSchedule::unit(), 1.0, 1.0, 40).unwrap();
        assert!(t2.gamma.iter().zip(t1.gamma_star.iter()).count() > 0);
        for n in 0..=40 {
            assert!(t2.sum_bound[n] >= t1.sum_bound[n] - 1e-12, "n={n}");
        }
    }
}
