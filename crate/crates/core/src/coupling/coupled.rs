use super::maximal::sample_maximal;
use crate::chain::{History, TransitionKernel};
use crate::error::{Error, Result};
use crate::io::Csv;
use crate::par::Execution;
use crate::rng::{stream, StreamRng};
use crate::seq::{agreement_length, Context, DEFAULT_AGREEMENT_CAP};

/// Runs per parallel chunk in Monte-Carlo estimates.
pub const MC_CHUNK: usize = 4096;

/// A path of the coupled pair `(U, V)` with pasts `x` and `y`, together with
/// the backward agreement clock.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledPath {
    pub x: Context,
    pub y: Context,
    pub u: Vec<usize>,
    pub v: Vec<usize>,
    /// `clock[n] = T_n`: number of consecutive agreements ending at time `n`,
    /// counting the common suffix of the pasts.
    pub clock: Vec<usize>,
    pub seed: u64,
}

impl CoupledPath {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Columns `t, u, v, clock`.
    pub fn to_csv(&self) -> String {
        let a = self.x.alphabet();
        let mut csv = Csv::new(&["t", "u", "v", "clock"]);
        for t in 0..self.u.len() {
            csv.row([
                t.to_string(),
                a.symbol(self.u[t]).to_string(),
                a.symbol(self.v[t]).to_string(),
                self.clock[t].to_string(),
            ]);
        }
        csv.finish()
    }
}

/// Clock value before time 0.
pub(crate) fn initial_clock(x: &Context, y: &Context) -> Result<usize> {
    agreement_length(x, y, DEFAULT_AGREEMENT_CAP)
}

pub(crate) fn check_pasts(kernel: &TransitionKernel, x: &Context, y: &Context) -> Result<()> {
    for p in [x, y] {
        if p.alphabet() != kernel.alphabet() {
            return Err(Error::AlphabetMismatch(format!("{} vs {}", p.alphabet(), kernel.alphabet())));
        }
    }
    Ok(())
}

/// Pair of rolling histories driven by maximal couplings of their rows.
pub(crate) struct Pair<'a> {
    kernel: &'a TransitionKernel,
    hu: History,
    hv: History,
    ru: Vec<f64>,
    rv: Vec<f64>,
    pub(crate) clock: usize,
}

impl<'a> Pair<'a> {
    pub(crate) fn new(kernel: &'a TransitionKernel, x: &Context, y: &Context, clock: usize) -> Self {
        let a = kernel.alphabet().size();
        Pair {
            kernel,
            hu: History::new(x, kernel.depth()),
            hv: History::new(y, kernel.depth()),
            ru: vec![0.0; a],
            rv: vec![0.0; a],
            clock,
        }
    }

    pub(crate) fn step(&mut self, rng: &mut StreamRng) -> (usize, usize) {
        self.kernel.row_into(self.hu.window(), &mut self.ru);
        self.kernel.row_into(self.hv.window(), &mut self.rv);
        let (a, b) = sample_maximal(rng, &self.ru, &self.rv);
        self.push(a, b);
        (a, b)
    }

    pub(crate) fn push(&mut self, a: usize, b: usize) {
        self.hu.push(a);
        self.hv.push(b);
        self.clock = if a == b { self.clock.saturating_add(1) } else { 0 };
    }

    pub(crate) fn windows(&self) -> (&[usize], &[usize]) {
        (self.hu.window(), self.hv.window())
    }
}

/// Draws `n` steps of the maximally coupled pair from stream 0 of `seed`.
pub fn sample_coupled_chain(
    kernel: &TransitionKernel,
    x: &Context,
    y: &Context,
    n: usize,
    seed: u64,
) -> Result<CoupledPath> {
    if n == 0 {
        return Err(Error::InvalidArgument("path length must be at least 1".into()));
    }
    check_pasts(kernel, x, y)?;
    let mut rng = stream(seed, 0);
    let mut pair = Pair::new(kernel, x, y, initial_clock(x, y)?);
    let (mut u, mut v, mut clock) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for _ in 0..n {
        let (a, b) = pair.step(&mut rng);
        u.push(a);
        v.push(b);
        clock.push(pair.clock);
    }
    Ok(CoupledPath { x: x.clone(), y: y.clone(), u, v, clock, seed })
}

/// Binomial frequency with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
    pub runs: usize,
}

impl Estimate {
    pub fn from_count(count: u64, runs: usize) -> Self {
        let p = count as f64 / runs.max(1) as f64;
        Estimate { value: p, std_err: (p * (1.0 - p) / runs.max(1) as f64).sqrt(), runs }
    }

    /// `value + z · std_err`.
    pub fn upper(&self, z: f64) -> f64 {
        self.value + z * self.std_err
    }
}

/// Monte-Carlo counts of the coupled clock over independent runs.
#[derive(Clone, Debug, PartialEq)]
pub struct ClockCounts {
    pub runs: usize,
    /// `disagree[n]` counts runs with `U_n ≠ V_n`.
    pub disagree: Vec<u64>,
    /// `at_least[n][k]` counts runs with `T_n ≥ k`.
    pub at_least: Vec<Vec<u64>>,
}

impl ClockCounts {
    pub fn disagreement(&self, n: usize) -> Estimate {
        Estimate::from_count(self.disagree[n], self.runs)
    }

    pub fn tail(&self, n: usize, k: usize) -> Estimate {
        Estimate::from_count(self.at_least[n][k], self.runs)
    }
}

/// Clock statistics for `n = 0..=n_max`, `k = 0..=k_max`. Run `r` uses
/// stream `r` of `seed`.
#[allow(clippy::too_many_arguments)]
pub fn clock_counts(
    kernel: &TransitionKernel,
    x: &Context,
    y: &Context,
    n_max: usize,
    k_max: usize,
    runs: usize,
    seed: u64,
    exec: Execution,
) -> Result<ClockCounts> {
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be at least 1".into()));
    }
    check_pasts(kernel, x, y)?;
    let t0 = initial_clock(x, y)?;
    let empty = || ClockCounts { runs: 0, disagree: vec![0; n_max + 1], at_least: vec![vec![0; k_max + 1]; n_max + 1] };
    let counts = exec.map_chunks(
        runs,
        MC_CHUNK,
        |range| {
            let mut c = empty();
            for r in range {
                let mut rng = stream(seed, r as u64);
                let mut pair = Pair::new(kernel, x, y, t0);
                for n in 0..=n_max {
                    let (a, b) = pair.step(&mut rng);
                    if a != b {
                        c.disagree[n] += 1;
                    }
                    let top = pair.clock.min(k_max);
                    c.at_least[n][..=top].iter_mut().for_each(|v| *v += 1);
                }
                c.runs += 1;
            }
            c
        },
        |mut acc, other| {
            acc.runs += other.runs;
            acc.disagree.iter_mut().zip(other.disagree).for_each(|(a, b)| *a += b);
            for (ra, rb) in acc.at_least.iter_mut().zip(other.at_least) {
                ra.iter_mut().zip(rb).for_each(|(a, b)| *a += b);
            }
            acc
        },
    );
    Ok(counts.unwrap_or_else(empty))
}

/// Monte-Carlo estimate of `P(U_n ≠ V_n)`.
pub fn disagreement_probability(
    kernel: &TransitionKernel,
    x: &Context,
    y: &Context,
    n: usize,
    runs: usize,
    seed: u64,
) -> Result<Estimate> {
    Ok(clock_counts(kernel, x, y, n, 0, runs, seed, Execution::default())?.disagreement(n))
}

/// Monte-Carlo estimates of `P(U_n ≠ V_n)` for `n = 0..=n_max`.
pub fn disagreement_profile(
    kernel: &TransitionKernel,
    x: &Context,
    y: &Context,
    n_max: usize,
    runs: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<Estimate>> {
    let c = clock_counts(kernel, x, y, n_max, 0, runs, seed, exec)?;
    Ok((0..=n_max).map(|n| c.disagreement(n)).collect())
}

/// `P(U_n ≠ V_n | T_{n−1} = m)` estimated for `m = 0..=m_max` along long
/// coupled runs; entries with no visits are `None`.
#[allow(clippy::too_many_arguments)]
pub fn conditional_disagreement(
    kernel: &TransitionKernel,
    x: &Context,
    y: &Context,
    n: usize,
    m_max: usize,
    runs: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<Option<Estimate>>> {
    check_pasts(kernel, x, y)?;
    let t0 = initial_clock(x, y)?;
    let zero = || (vec![0u64; m_max + 1], vec![0u64; m_max + 1]);
    let (visits, fails) = exec
        .map_chunks(
            runs,
            MC_CHUNK,
            |range| {
                let (mut visits, mut fails) = zero();
                for r in range {
                    let mut rng = stream(seed, r as u64);
                    let mut pair = Pair::new(kernel, x, y, t0);
                    for _ in 0..n {
                        let before = pair.clock;
                        let (a, b) = pair.step(&mut rng);
                        if before <= m_max {
                            visits[before] += 1;
                            fails[before] += u64::from(a != b);
                        }
                    }
                }
                (visits, fails)
            },
            |(mut v, mut f), (v2, f2)| {
                v.iter_mut().zip(v2).for_each(|(a, b)| *a += b);
                f.iter_mut().zip(f2).for_each(|(a, b)| *a += b);
                (v, f)
            },
        )
        .unwrap_or_else(zero);
    Ok(visits
        .iter()
        .zip(&fails)
        .map(|(v, f)| (*v > 0).then(|| Estimate::from_count(*f, *v as usize)))
        .collect())
}
