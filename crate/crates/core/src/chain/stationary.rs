use nalgebra::{DMatrix, DVector};

use super::function::CylinderFunction;
use super::kernel::TransitionKernel;
use crate::error::{Error, Result};
use crate::graph::check_primitive;

/// Largest lifted state space solved directly.
const DENSE_LIMIT: usize = 1024;
const FIXED_POINT_TOL: f64 = 1e-10;

/// Stationary law of the `depth` most recent symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct StationaryMeasure {
    alphabet_size: usize,
    depth: usize,
    weights: Vec<f64>,
}

impl StationaryMeasure {
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Weights over `A^depth`, oldest symbol most significant.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ f dμ` for `f.depth() ≤ depth`.
    pub fn integrate(&self, f: &CylinderFunction) -> f64 {
        f.lift(self.depth).iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// `∫ |f| dμ`.
    pub fn l1_norm(&self, f: &CylinderFunction) -> f64 {
        f.lift(self.depth).iter().zip(&self.weights).map(|(v, w)| v.abs() * w).sum()
    }

    /// Marginal on the last `d ≤ depth` symbols.
    pub fn marginal(&self, d: usize) -> Vec<f64> {
        assert!(d <= self.depth);
        let m = self.alphabet_size.pow(d as u32);
        let mut out = vec![0.0; m];
        for (u, w) in self.weights.iter().enumerate() {
            out[u % m] += w;
        }
        out
    }
}

/// Stationary law on `A^{max(k, 1)}` of a kernel of memory `k`.
pub fn stationary_measure(kernel: &TransitionKernel) -> Result<StationaryMeasure> {
    let k = kernel
        .memory_order()
        .ok_or_else(|| Error::InfiniteMemory("stationary measures are computed for finite memory".into()))?;
    let n = kernel.alphabet().size();
    let depth = k.max(1);
    let lift = kernel.lift(depth)?;
    let states = n.pow(depth as u32);
    check_primitive(states, |u, out| {
        for a in 0..n {
            if lift[u * n + a] > 0.0 {
                out.push((u * n + a) % states);
            }
        }
    })?;
    let weights = if states <= DENSE_LIMIT { dense(&lift, n, states)? } else { power(&lift, n, states) };
    let res = step(&lift, n, &weights).iter().zip(&weights).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if res > FIXED_POINT_TOL {
        return Err(Error::Numerical(format!("stationary vector residual {res:.3e}")));
    }
    Ok(StationaryMeasure { alphabet_size: n, depth, weights })
}

/// Stationary law on `A^depth` for any `depth ≥ max(k, 1)`, extending by
/// `μ(w a) = μ(w) P(a | w)`.
pub fn stationary_measure_at(kernel: &TransitionKernel, depth: usize) -> Result<StationaryMeasure> {
    let mut m = stationary_measure(kernel)?;
    if depth < m.depth {
        return Err(Error::InvalidArgument(format!("depth {depth} below {}", m.depth)));
    }
    let n = m.alphabet_size;
    crate::check_budget(crate::entries(n, depth), crate::DEFAULT_BUDGET)?;
    while m.depth < depth {
        let lift = kernel.lift(m.depth)?;
        let weights = m.weights.iter().enumerate().flat_map(|(u, w)| (0..n).map(move |a| (u, a, w)));
        m.weights = weights.map(|(u, a, w)| w * lift[u * n + a]).collect();
        m.depth += 1;
    }
    Ok(m)
}

/// One step of the lifted chain `u ↦ (u_2, …, u_D, a)`.
pub(crate) fn step(lift: &[f64], n: usize, dist: &[f64]) -> Vec<f64> {
    let states = dist.len();
    let mut out = vec![0.0; states];
    for (u, &p) in dist.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for a in 0..n {
            out[(u * n + a) % states] += p * lift[u * n + a];
        }
    }
    out
}

fn dense(lift: &[f64], n: usize, states: usize) -> Result<Vec<f64>> {
    // (Pᵀ − I) π = 0 with the first equation replaced by Σ π = 1
    let mut m = DMatrix::<f64>::zeros(states, states);
    for u in 0..states {
        for a in 0..n {
            m[((u * n + a) % states, u)] += lift[u * n + a];
        }
        m[(u, u)] -= 1.0;
    }
    for j in 0..states {
        m[(0, j)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(states);
    rhs[0] = 1.0;
    let sol = m.lu().solve(&rhs).ok_or_else(|| Error::Numerical("singular stationary system".into()))?;
    let mut w: Vec<f64> = sol.iter().map(|x| x.max(0.0)).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    Ok(w)
}

fn power(lift: &[f64], n: usize, states: usize) -> Vec<f64> {
    let mut w = vec![1.0 / states as f64; states];
    for _ in 0..1_000_000 {
        let next = step(lift, n, &w);
        let diff = next.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        w = next;
        if diff < 1e-15 {
            break;
        }
    }
    w
}
