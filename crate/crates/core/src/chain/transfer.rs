use super::function::CylinderFunction;
use super::kernel::TransitionKernel;
use super::stationary::{stationary_measure_at, step};
use crate::error::{Error, Result};
use crate::seq::{word_index, Context};

/// Cap on `steps · |A|^{depth+1}` for exact propagation.
pub const WORK_BUDGET: u128 = 1 << 34;

fn check_work(n: usize, depth: usize, steps: usize) -> Result<()> {
    crate::check_budget(crate::entries(n, depth + 1), crate::DEFAULT_BUDGET)?;
    crate::check_budget(crate::entries(n, depth + 1).saturating_mul(steps.max(1) as u128), WORK_BUDGET)
}

fn check_alphabet(kernel: &TransitionKernel, f: &CylinderFunction) -> Result<()> {
    if f.alphabet_size() != kernel.alphabet().size() {
        return Err(Error::AlphabetMismatch("cylinder function and kernel differ in alphabet size".into()));
    }
    Ok(())
}

/// Law of the window of the `depth` most recent symbols after `steps` steps
/// of the chain with past `x`.
pub fn propagate(kernel: &TransitionKernel, x: &Context, steps: usize, depth: usize) -> Result<Vec<f64>> {
    let depth = depth.max(kernel.memory_order().unwrap_or(0)).max(1);
    let n = kernel.alphabet().size();
    check_work(n, depth, steps)?;
    let lift = kernel.lift(depth)?;
    let mut dist = vec![0.0; n.pow(depth as u32)];
    dist[word_index(&x.suffix(depth), n)] = 1.0;
    for _ in 0..steps {
        dist = step(&lift, n, &dist);
    }
    Ok(dist)
}

/// `L^n g(x) = E[g((Z^x_{n+j})_{j ≤ −1})]`, by forward propagation of the
/// window law on `A^{max(k, d)}`.
pub fn transfer_iterate(kernel: &TransitionKernel, g: &CylinderFunction, x: &Context, n: usize) -> Result<f64> {
    check_alphabet(kernel, g)?;
    let depth = g.depth().max(kernel.memory_order().unwrap_or(0)).max(1);
    let dist = propagate(kernel, x, n, depth)?;
    Ok(g.lift(depth).iter().zip(&dist).map(|(v, p)| v * p).sum())
}

/// Law of `Z^x_n`.
pub fn law_at(kernel: &TransitionKernel, x: &Context, n: usize) -> Result<Vec<f64>> {
    let a = kernel.alphabet().size();
    let dist = propagate(kernel, x, n + 1, 1)?;
    let mut out = vec![0.0; a];
    for (u, p) in dist.iter().enumerate() {
        out[u % a] += p;
    }
    Ok(out)
}

/// `∫ f ∘ Tⁿ · g dμ − ∫ f dμ ∫ g dμ` for `n = 0..=n_max`, computed as
/// `∫ f (Lⁿ g − ∫ g) dμ` by backward iteration of `Lⁿ g` on `A^D`.
pub fn correlation_series(
    kernel: &TransitionKernel,
    f: &CylinderFunction,
    g: &CylinderFunction,
    n_max: usize,
) -> Result<Vec<f64>> {
    check_alphabet(kernel, f)?;
    check_alphabet(kernel, g)?;
    let k = kernel
        .memory_order()
        .ok_or_else(|| Error::InfiniteMemory("exact correlations need finite memory".into()))?;
    let a = kernel.alphabet().size();
    let depth = k.max(f.depth()).max(g.depth()).max(1);
    check_work(a, depth, n_max)?;
    if f.is_constant() || g.is_constant() {
        return Ok(vec![0.0; n_max + 1]);
    }
    let mu = stationary_measure_at(kernel, depth)?;
    let lift = kernel.lift(depth)?;
    let pi = mu.weights();
    let fv = f.lift(depth);
    let mut h = g.lift(depth);
    let mean_g = mu.integrate(g);
    let states = h.len();
    let mut out = Vec::with_capacity(n_max + 1);
    for t in 0..=n_max {
        out.push(pi.iter().zip(&fv).zip(&h).map(|((p, f), h)| p * f * (h - mean_g)).sum());
        if t < n_max {
            h = (0..states)
                .map(|u| (0..a).map(|s| lift[u * a + s] * h[(u * a + s) % states]).sum())
                .collect();
        }
    }
    Ok(out)
}

/// `∫ f ∘ Tⁿ · g dμ − ∫ f dμ ∫ g dμ`.
pub fn exact_correlation(kernel: &TransitionKernel, f: &CylinderFunction, g: &CylinderFunction, n: usize) -> Result<f64> {
    Ok(correlation_series(kernel, f, g, n)?[n])
}
