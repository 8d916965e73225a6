use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::check_primitive;
use crate::seq::{word_count, word_index, Context};

use super::Potential;

const POWER_TOL: f64 = 1e-14;
const POWER_MAX_ITER: usize = 100_000;
/// Power-iteration residual at which dense refinement takes over.
const POWER_HANDOFF: f64 = 1e-8;
/// Largest state space refined with a dense LU solve.
const DENSE_LIMIT: usize = 2048;
const REFINE_TARGET: f64 = 1e-14;
const REFINE_STEPS: usize = 6;
/// Relative offset of the inverse-iteration shift above the eigenvalue.
const INVERSE_SHIFT: f64 = 1e-10;

/// Output of [`normalize`].
#[derive(Clone, Debug)]
pub struct NormalizationResult {
    /// Normalized potential of the same memory order.
    pub psi: Potential,
    /// `log ρ` over `A^k` (oldest symbol most significant); `Σ ρ = 1`.
    pub log_rho: Vec<f64>,
    /// Log of the Perron eigenvalue (pressure constant).
    pub log_lambda: f64,
    pub order: usize,
    pub power_iterations: usize,
    /// `max_u |(Mρ)(u) / (λ ρ(u)) − 1|` after refinement.
    pub residual: f64,
}

impl NormalizationResult {
    /// `log ρ` at the last `k` symbols of a history.
    pub fn log_rho_at(&self, x: &Context) -> f64 {
        self.log_rho[word_index(&x.suffix(self.order), x.alphabet().size())]
    }
}

/// Normalizes a finite-memory potential through the Perron eigenproblem of
/// its transfer matrix on `A^k`:
/// `ψ(xa) = φ(xa) + log ρ(xa) − log ρ(x) − log λ`.
pub fn normalize(phi: &Potential) -> Result<NormalizationResult> {
    let order = phi
        .memory_order()
        .ok_or_else(|| Error::InfiniteMemory("normalization needs finite memory; truncate first".into()))?;
    let values = phi.table().expect("finite memory potentials are tables");
    let a = phi.alphabet().size();
    let n = word_count(a, order).ok_or_else(|| Error::InvalidArgument("order too large".into()))?;
    crate::check_budget(values.len() as u128, crate::DEFAULT_BUDGET)?;

    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = values.iter().map(|v| (v - top).exp()).collect();
    check_primitive(n, |u, out| {
        for s in 0..a {
            if weights[u * a + s] > 0.0 {
                out.push((u * a + s) % n);
            }
        }
    })?;

    let apply = |v: &[f64], out: &mut [f64]| {
        for (u, o) in out.iter_mut().enumerate() {
            let base = u * a;
            *o = (0..a).map(|s| weights[base + s] * v[(base + s) % n]).sum();
        }
    };

    // power iteration on the probability simplex, stopped on the eigen-residual
    let mut v = vec![1.0 / n as f64; n];
    let mut w = vec![0.0; n];
    let mut iterations = 0;
    let dense = n > 1 && n <= DENSE_LIMIT;
    let target = if dense { POWER_HANDOFF } else { POWER_TOL };
    while iterations < POWER_MAX_ITER {
        iterations += 1;
        apply(&v, &mut w);
        let lambda = w.iter().sum::<f64>();
        let res = residual(&v, &w, lambda);
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / lambda;
        }
        if res <= target {
            break;
        }
    }

    let mut rho = v;
    if dense {
        for _ in 0..REFINE_STEPS {
            apply(&rho, &mut w);
            let lambda = w.iter().sum::<f64>() / rho.iter().sum::<f64>();
            if residual(&rho, &w, lambda) < REFINE_TARGET {
                break;
            }
            match inverse_step(&weights, a, n, lambda, &rho) {
                Some(r) => rho = r,
                None => break,
            }
        }
    }
    apply(&rho, &mut w);
    let lambda = w.iter().sum::<f64>() / rho.iter().sum::<f64>();
    let res = residual(&rho, &w, lambda);
    if !(lambda > 0.0) || rho.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Numerical("Perron vector is not positive".into()));
    }

    let total: f64 = rho.iter().sum();
    let log_rho: Vec<f64> = rho.iter().map(|r| (r / total).ln()).collect();
    let log_lambda = top + lambda.ln();
    let psi_values: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(i, v)| v + log_rho[i % n] - log_rho[i / a] - log_lambda)
        .collect();
    let psi = Potential::from_table(phi.alphabet().clone(), order, psi_values)?;
    Ok(NormalizationResult { psi, log_rho, log_lambda, order, power_iterations: iterations, residual: res })
}

/// One step of shifted inverse iteration: `(M − μI)⁻¹ ρ` rescaled to sum 1,
/// with `μ` just above the current eigenvalue estimate.
fn inverse_step(weights: &[f64], a: usize, n: usize, lambda: f64, rho: &[f64]) -> Option<Vec<f64>> {
    let shift = lambda * (1.0 + INVERSE_SHIFT);
    let mut m = DMatrix::<f64>::zeros(n, n);
    for u in 0..n {
        for s in 0..a {
            m[(u, (u * a + s) % n)] += weights[u * a + s];
        }
        m[(u, u)] -= shift;
    }
    let sol = m.lu().solve(&DVector::from_column_slice(rho))?;
    let total: f64 = sol.iter().sum();
    let next: Vec<f64> = sol.iter().map(|x| x / total).collect();
    next.iter().all(|x| *x > 0.0 && x.is_finite()).then_some(next)
}

fn residual(rho: &[f64], m_rho: &[f64], lambda: f64) -> f64 {
    rho.iter().zip(m_rho).map(|(r, mr)| (mr / (lambda * r) - 1.0).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::{index_word, Alphabet};
    use proptest::prelude::*;

    fn sum_exp_psi(res: &NormalizationResult) -> f64 {
        let t = res.psi.table().unwrap();
        let a = res.psi.alphabet().size();
        t.chunks(a).map(|row| (row.iter().map(|v| v.exp()).sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }

    proptest! {
        #[test]
        fn random_tables_normalize_to_precision(
            (a, vals) in (2usize..=3).prop_flat_map(|a| (Just(a), prop::collection::vec(-3.0f64..3.0, a * a * a)))
        ) {
            let phi = Potential::from_table(Alphabet::digits(a).unwrap(), 2, vals).unwrap();
            let r = normalize(&phi).unwrap();
            prop_assert!(sum_exp_psi(&r) < 1e-12, "residual {}", sum_exp_psi(&r));
            let again = normalize(&r.psi).unwrap();
            let drift = again.psi.table().unwrap().iter().zip(r.psi.table().unwrap()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            prop_assert!(drift < 1e-12, "drift {}", drift);
        }
    }

    #[test]
    fn stochastic_matrix_is_a_fixed_point() {
        let phi = Potential::from_matrix(Alphabet::digits(2).unwrap(), &[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let r = normalize(&phi).unwrap();
        assert!(r.log_lambda.abs() < 1e-12);
        assert!((r.log_rho[0] - r.log_rho[1]).abs() < 1e-12);
        for (x, y) in r.psi.table().unwrap().iter().zip(phi.table().unwrap()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn constants_shift_pressure_only() {
        let phi = Potential::from_matrix(Alphabet::digits(2).unwrap(), &[vec![0.6, 0.4], vec![0.3, 0.7]]).unwrap();
        let r = normalize(&phi.shifted(1.75).unwrap()).unwrap();
        assert!((r.log_lambda - 1.75).abs() < 1e-12);
        for (x, y) in r.psi.table().unwrap().iter().zip(phi.table().unwrap()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn two_by_two_against_closed_form() {
        // W = ((1,2),(3,4)): λ = (5 + √33)/2
        let phi = Potential::from_matrix(Alphabet::digits(2).unwrap(), &[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let r = normalize(&phi).unwrap();
        let lambda = (5.0 + 33f64.sqrt()) / 2.0;
        assert!((r.log_lambda - lambda.ln()).abs() < 1e-13);
        // right eigenvector: ρ_1/ρ_0 = (λ − 1)/2
        let ratio = (r.log_rho[1] - r.log_rho[0]).exp();
        assert!((ratio - (lambda - 1.0) / 2.0).abs() < 1e-12);
        assert!(sum_exp_psi(&r) < 1e-12);
        assert!(r.psi.is_normalized_flag());
    }

    #[test]
    fn memoryless_and_higher_order() {
        let a = Alphabet::digits(3).unwrap();
        let phi = Potential::from_table(a.clone(), 0, vec![0.0, 1.0, 2.0]).unwrap();
        let r = normalize(&phi).unwrap();
        assert!((r.log_lambda - (1.0 + 1f64.exp() + 2f64.exp()).ln()).abs() < 1e-14);
        assert!(sum_exp_psi(&r) < 1e-14);

        let vals: Vec<f64> = (0..81).map(|i| ((i * 37 % 17) as f64 - 8.0) * 0.3).collect();
        let phi = Potential::from_table(a, 3, vals).unwrap();
        let r = normalize(&phi).unwrap();
        assert!(sum_exp_psi(&r) < 1e-11, "residual {}", r.residual);
        // pointwise cocycle identity
        let t = phi.table().unwrap();
        let p = r.psi.table().unwrap();
        for i in 0..81 {
            let w = index_word(i, 4, 3);
            let lhs = p[i];
            let rhs = t[i] + r.log_rho[word_index(&w[1..], 3)] - r.log_rho[word_index(&w[..3], 3)] - r.log_lambda;
            assert!((lhs - rhs).abs() < 1e-11);
        }
    }

    #[test]
    fn rejects_infinite_memory() {
        use crate::potential::{Decay, PairFamily};
        let a = Alphabet::digits(2).unwrap();
        let f = PairFamily::ferromagnetic(&a, 1.0, Decay::Geometric { theta: 0.5 }, false).unwrap();
        let p = Potential::from_family(a, f).unwrap();
        assert!(matches!(normalize(&p), Err(Error::InfiniteMemory(_))));
    }
}
