use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::io::{fmt_f64, Csv};
use crate::rng::pick;

const SUM_TOL: f64 = 1e-9;

/// Joint law on `A × A`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    size: usize,
    p: Vec<f64>,
}

impl JointDistribution {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.p[a * self.size + b]
    }

    /// Row sums.
    pub fn first_marginal(&self) -> Vec<f64> {
        self.p.chunks(self.size).map(|r| r.iter().sum()).collect()
    }

    /// Column sums.
    pub fn second_marginal(&self) -> Vec<f64> {
        (0..self.size).map(|b| (0..self.size).map(|a| self.get(a, b)).sum()).collect()
    }

    /// Columns `a, b, p`.
    pub fn to_csv(&self) -> String {
        let mut csv = Csv::new(&["a", "b", "p"]);
        for a in 0..self.size {
            for b in 0..self.size {
                csv.row([a.to_string(), b.to_string(), fmt_f64(self.get(a, b))]);
            }
        }
        csv.finish()
    }
}

fn validate(mu: &[f64], nu: &[f64]) -> Result<()> {
    if mu.len() != nu.len() || mu.is_empty() {
        return Err(Error::InvalidDistribution(format!("lengths {} and {} differ", mu.len(), nu.len())));
    }
    for (name, d) in [("μ", mu), ("ν", nu)] {
        if d.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return Err(Error::InvalidDistribution(format!("{name} has a negative or non-finite entry")));
        }
        let s: f64 = d.iter().sum();
        if (s - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!("{name} sums to {s}")));
        }
    }
    Ok(())
}

/// The coupling of `μ` and `ν` with the heaviest diagonal: `min(μ, ν)` on
/// the diagonal and `(μ(a) − ν(a))⁺ (ν(b) − μ(b))⁺ / Σ_e (μ(e) − ν(e))⁺` off it.
pub fn maximal_coupling(mu: &[f64], nu: &[f64]) -> Result<JointDistribution> {
    validate(mu, nu)?;
    let n = mu.len();
    let mut p = vec![0.0; n * n];
    let excess: Vec<f64> = mu.iter().zip(nu).map(|(m, v)| (m - v).max(0.0)).collect();
    let deficit: Vec<f64> = mu.iter().zip(nu).map(|(m, v)| (v - m).max(0.0)).collect();
    let d: f64 = excess.iter().sum();
    for a in 0..n {
        p[a * n + a] = mu[a].min(nu[a]);
        if d > 0.0 {
            for b in 0..n {
                if a != b {
                    p[a * n + b] = excess[a] * deficit[b] / d;
                }
            }
        }
    }
    Ok(JointDistribution { size: n, p })
}

/// `Σ_a joint(a, a)`.
pub fn diagonal_weight(joint: &JointDistribution) -> f64 {
    (0..joint.size).map(|a| joint.get(a, a)).sum()
}

/// `1 − ½ Σ |μ − ν|`.
pub fn overlap(mu: &[f64], nu: &[f64]) -> f64 {
    mu.iter().zip(nu).map(|(m, v)| m.min(*v)).sum()
}

/// Draws a pair from the maximal coupling of two probability vectors
/// without building the joint: with probability `Δ` a shared symbol from
/// `min(μ, ν)`, otherwise independent draws from the two positive parts.
pub fn sample_maximal<R: Rng + ?Sized>(rng: &mut R, mu: &[f64], nu: &[f64]) -> (usize, usize) {
    let u: f64 = rng.gen();
    if mu == nu {
        let a = pick(mu, u * mu.iter().sum::<f64>());
        return (a, a);
    }
    let delta = overlap(mu, nu);
    let excess: f64 = mu.iter().zip(nu).map(|(m, v)| (m - v).max(0.0)).sum();
    if u < delta || excess <= 0.0 {
        let w: Vec<f64> = mu.iter().zip(nu).map(|(m, v)| m.min(*v)).collect();
        let a = pick(&w, u.min(delta) * (1.0 - f64::EPSILON));
        return (a, a);
    }
    let plus: Vec<f64> = mu.iter().zip(nu).map(|(m, v)| (m - v).max(0.0)).collect();
    let minus: Vec<f64> = mu.iter().zip(nu).map(|(m, v)| (v - m).max(0.0)).collect();
    let a = pick(&plus, rng.gen::<f64>() * excess);
    let b = pick(&minus, rng.gen::<f64>() * minus.iter().sum::<f64>());
    (a, b)
}

/// Largest diagonal weight over the vertices of the polytope of couplings
/// of `μ` and `ν`, by enumerating every basis of `2|A| − 1` cells. Only for
/// `|A| ≤ 4`.
pub fn vertex_search_diagonal(mu: &[f64], nu: &[f64]) -> Result<f64> {
    validate(mu, nu)?;
    let n = mu.len();
    if n > 4 {
        return Err(Error::InvalidArgument(format!("vertex search limited to 4 symbols, got {n}")));
    }
    let cells = n * n;
    let rank = 2 * n - 1;
    let mut rhs = DVector::<f64>::zeros(rank);
    for i in 0..n {
        rhs[i] = mu[i];
    }
    for j in 0..n - 1 {
        rhs[n + j] = nu[j];
    }
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..(1 << cells) {
        if mask.count_ones() as usize != rank {
            continue;
        }
        let support: Vec<usize> = (0..cells).filter(|c| mask >> c & 1 == 1).collect();
        let mut m = DMatrix::<f64>::zeros(rank, rank);
        for (col, &c) in support.iter().enumerate() {
            let (a, b) = (c / n, c % n);
            m[(a, col)] = 1.0;
            if b < n - 1 {
                m[(n + b, col)] = 1.0;
            }
        }
        if m.determinant().abs() < 0.5 {
            continue;
        }
        let Some(sol) = m.lu().solve(&rhs) else { continue };
        if sol.iter().any(|v| *v < -1e-12) {
            continue;
        }
        let diag: f64 = support.iter().zip(sol.iter()).filter(|(c, _)| *c / n == *c % n).map(|(_, v)| v).sum();
        best = best.max(diag);
    }
    Ok(best)
}
