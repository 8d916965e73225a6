use serde::Serialize;

use super::gamma::GammaSequence;

/// A value with certified lower and upper bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Certified {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Certified {
    pub fn exact(value: f64) -> Self {
        Certified { value, lower: value, upper: value }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Law of the first return time `τ` of the house-of-cards chain to 0.
#[derive(Clone, Debug, PartialEq)]
pub struct TauDistribution {
    /// `P(τ = n)` at index `n`; index 0 holds 0.
    pub pmf: Vec<f64>,
    /// `log P(τ > n) = Σ_{m<n} log(1 − γ_m)` for `n = 0..=n_max`.
    pub log_survival: Vec<f64>,
    /// `P(τ = ∞) = Π_{m ≥ 0} (1 − γ_m)`.
    pub infinity: Certified,
}

/// Terms summed directly past the horizon when the closed-form log tail is
/// only a bound.
const EXTENSION: usize = 1 << 20;

impl TauDistribution {
    pub fn n_max(&self) -> usize {
        self.pmf.len() - 1
    }

    /// `P(τ > n)` for `n ≤ n_max`.
    pub fn survival(&self, n: usize) -> f64 {
        self.log_survival[n].exp()
    }

    /// `P(τ < ∞)` with bounds.
    pub fn finite_mass(&self) -> Certified {
        Certified {
            value: 1.0 - self.infinity.value,
            lower: 1.0 - self.infinity.upper,
            upper: 1.0 - self.infinity.lower,
        }
    }

    /// `1 − Σ_{n ≤ n_max} P(τ = n) − P(τ = ∞)`, which lies in
    /// `[0, P(τ > n_max) − P(τ = ∞)]` up to rounding.
    pub fn mass_defect(&self) -> f64 {
        1.0 - self.pmf.iter().sum::<f64>() - self.infinity.value
    }
}

/// `P(τ = 1) = γ_0`, `P(τ = n) = γ_{n−1} Π_{m ≤ n−2} (1 − γ_m)`, evaluated in
/// log space, with `P(τ = ∞)` bracketed by the closed-form tail of `γ`.
pub fn tau_distribution(gamma: &GammaSequence, n_max: usize) -> TauDistribution {
    let mut log_survival = Vec::with_capacity(n_max + 1);
    let mut pmf = Vec::with_capacity(n_max + 1);
    log_survival.push(0.0);
    pmf.push(0.0);
    let mut s = 0.0f64;
    for m in 0..n_max {
        let g = gamma.value(m);
        pmf.push(g * s.exp());
        s += (-g).ln_1p();
        log_survival.push(s);
    }
    let infinity = infinity_mass(gamma, n_max, s);
    TauDistribution { pmf, log_survival, infinity }
}

fn infinity_mass(gamma: &GammaSequence, n: usize, log_head: f64) -> Certified {
    let bound = gamma.neg_log_survival_tail(n);
    if bound.is_infinite() {
        return Certified::exact(0.0);
    }
    if gamma.exact_log_tail() || bound <= 1e-15 {
        return Certified::exact((log_head - bound).exp());
    }
    let mut head = log_head;
    for m in n..n + EXTENSION {
        head += (-gamma.value(m)).ln_1p();
    }
    let bound = gamma.neg_log_survival_tail(n + EXTENSION);
    let lower = (head - bound).exp();
    let upper = head.exp();
    Certified { value: 0.5 * (lower + upper), lower, upper }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::VariationSequence;

    #[test]
    fn zero_gamma() {
        let t = tau_distribution(&GammaSequence::zero(), 20);
        assert!(t.pmf.iter().all(|p| *p == 0.0));
        assert_eq!(t.infinity, Certified::exact(1.0));
    }

    #[test]
    fn constant_is_geometric() {
        let t = tau_distribution(&GammaSequence::constant(0.3).unwrap(), 50);
        for n in 1..=50 {
            let want = 0.3 * 0.7f64.powi(n as i32 - 1);
            assert!((t.pmf[n] - want).abs() < 1e-15 * (1.0 + want / 1e-15).min(1e3));
        }
        assert_eq!(t.infinity.value, 0.0);
    }

    #[test]
    fn halving_gamma() {
        let g = GammaSequence::geometric(0.5, 0.5).unwrap();
        let t = tau_distribution(&g, 60);
        assert_eq!(t.pmf[1], 0.5);
        assert!((t.pmf[2] - 0.125).abs() < 1e-16);
        // Π_{m≥1} (1 − 2^{-m})
        let direct: f64 = (1..200).map(|m| 1.0 - 0.5f64.powi(m)).product();
        assert!(t.infinity.lower <= direct + 1e-15 && direct <= t.infinity.upper + 1e-15);
        assert!((t.infinity.value - 0.288_788_095_086_602_4).abs() < 1e-12);
        assert!(t.mass_defect().abs() < 1e-15);
    }

    #[test]
    fn certified_polynomial() {
        // γ_m = (m + 2)^{-2}: Π (1 − 1/k²) over k ≥ 2 is 1/2
        let g = GammaSequence::polynomial(1.0, 2.0, 2.0).unwrap();
        let t = tau_distribution(&g, 1000);
        assert!(t.infinity.lower <= 0.5 && 0.5 <= t.infinity.upper);
        assert!(t.infinity.width() < 1e-6);
    }

    #[test]
    fn exact_tail_from_variations() {
        let v = VariationSequence::geometric(1.0, 0.5).unwrap();
        let g = GammaSequence::from_variations(&v, 0, 1.0).unwrap();
        let t = tau_distribution(&g, 3);
        // Π e^{-var_m} = e^{-Σ var_m} = e^{-2}
        assert!((t.infinity.value - (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(t.infinity.width(), 0.0);
    }
}
