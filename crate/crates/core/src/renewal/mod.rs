//! The dominating house-of-cards chain: return probabilities `γ*_n`, the
//! first return time `τ`, generating functions and decay diagnostics.

mod classify;
mod gamma;
mod genfun;
mod house;
mod sum;
mod tau;

pub use classify::{
    classify_decay, classify_decay_window, condpoly_alpha, g_radius, radius_estimate, radius_estimate_with, CondPoly,
    DecayReport, RadiusEstimate, RatioDrift, Regime, Relaxation, RADIUS_HORIZON,
};
pub use gamma::{GammaSequence, GammaTail};
pub use genfun::{generating_functions, GeneratingFunctions};
pub use house::{last_visit_check, recurrence_residual, return_probabilities, state_tails, HouseOfCards, LastVisitCheck};
pub use sum::LineFit;
pub(crate) use sum::Neumaier;
pub use tau::{tau_distribution, Certified, TauDistribution};

use crate::io::{fmt_f64, Csv};

/// Return probabilities and first-return law up to a horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct RenewalProfile {
    /// `γ_n` for `n = 0..n_max`.
    pub gamma: Vec<f64>,
    /// `γ*_n` for `n = 0..=n_max`; `γ*_0 = 1`.
    pub gamma_star: Vec<f64>,
    pub tau: TauDistribution,
}

impl RenewalProfile {
    pub fn compute(gamma: &GammaSequence, n_max: usize) -> Self {
        RenewalProfile {
            gamma: gamma.values(n_max + 1),
            gamma_star: return_probabilities(gamma, n_max),
            tau: tau_distribution(gamma, n_max),
        }
    }

    pub fn n_max(&self) -> usize {
        self.gamma_star.len() - 1
    }

    /// `max_n |γ*_n − Σ_{k=1}^{n} P(τ = k) γ*_{n−k}|` over `1 ≤ n ≤ n_max`.
    pub fn renewal_residual(&self) -> f64 {
        let s = &self.gamma_star;
        let p = &self.tau.pmf;
        (1..s.len())
            .map(|n| {
                let mut acc = Neumaier::default();
                for k in 1..=n {
                    acc.add(p[k] * s[n - k]);
                }
                (s[n] - acc.total()).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Columns `n, gamma_n, gamma_star_n, tau_pmf_n`.
    pub fn to_csv(&self) -> String {
        let mut csv = Csv::new(&["n", "gamma_n", "gamma_star_n", "tau_pmf_n"]);
        for n in 0..=self.n_max() {
            csv.row([n.to_string(), fmt_f64(self.gamma[n]), fmt_f64(self.gamma_star[n]), fmt_f64(self.tau.pmf[n])]);
        }
        csv.finish()
    }
}

/// Recomputes `γ*_n = Σ_k P(τ = ·)^{*k}[n]` by iterated self-convolution and
/// returns the largest deviation from forward propagation over `n ≤ n_max`.
pub fn convolution_check(gamma: &GammaSequence, n_max: usize) -> f64 {
    let pmf = tau_distribution(gamma, n_max).pmf;
    let star = return_probabilities(gamma, n_max);
    let mut power = vec![0.0; n_max + 1];
    power[0] = 1.0;
    let mut total = power.clone();
    for _ in 1..=n_max {
        let mut next = vec![0.0; n_max + 1];
        for (i, &a) in power.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in pmf.iter().enumerate().take(n_max + 1 - i).skip(1) {
                next[i + j] += a * b;
            }
        }
        if next.iter().all(|v| *v == 0.0) {
            break;
        }
        for (t, v) in total.iter_mut().zip(&next) {
            *t += v;
        }
        power = next;
    }
    total.iter().zip(&star).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn families() -> Vec<GammaSequence> {
        vec![
            GammaSequence::constant(0.2).unwrap(),
            GammaSequence::geometric(0.5, 0.5).unwrap(),
            GammaSequence::polynomial(1.0, 2.0, 2.0).unwrap(),
        ]
    }

    #[test]
    fn renewal_identity() {
        for g in families() {
            let p = RenewalProfile::compute(&g, 500);
            assert_eq!(p.gamma_star[0], 1.0);
            assert!(p.renewal_residual() < 1e-12);
        }
    }

    #[test]
    fn convolutions() {
        for g in families() {
            assert!(convolution_check(&g, 120) < 1e-12);
        }
        assert_eq!(convolution_check(&GammaSequence::zero(), 40), 0.0);
    }

    #[test]
    fn csv_shape() {
        let p = RenewalProfile::compute(&GammaSequence::constant(0.2).unwrap(), 3);
        let csv = p.to_csv();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with("n,gamma_n,gamma_star_n,tau_pmf_n\n0,"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_gamma() -> impl Strategy<Value = GammaSequence> {
            (proptest::collection::vec(0.0f64..0.95, 1..12), 0.0f64..0.9).prop_map(|(mut t, theta)| {
                t.sort_by(|a, b| b.partial_cmp(a).unwrap());
                let last = *t.last().unwrap();
                let c = last * theta.powf(-(t.len() as f64));
                GammaSequence::new(t, GammaTail::Geometric { c: c.min(last), theta }).unwrap()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn renewal_and_mass(g in arb_gamma()) {
                let p = RenewalProfile::compute(&g, 150);
                prop_assert!(p.renewal_residual() < 1e-12);
                let defect = p.tau.mass_defect();
                let room = p.tau.survival(150) - p.tau.infinity.lower;
                prop_assert!(defect >= -1e-12 && defect <= room + 1e-12);
                prop_assert!(recurrence_residual(&g, 80) < 1e-12);
                prop_assert!(last_visit_check(&g, 60, 10).exact_residual < 1e-12);
            }
        }
    }
}
