use serde::{Deserialize, Serialize};

use super::coupled::{check_pasts, initial_clock, CoupledPath, Estimate, Pair, MC_CHUNK};
use super::maximal::sample_maximal;
use crate::chain::TransitionKernel;
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::renewal::{GammaSequence, GammaTail};
use crate::par::Execution;
use crate::rng::{stream, StreamRng};
use crate::seq::{index_word, Context, Tail, VariationSequence, DEFAULT_AGREEMENT_CAP};

/// Range of `m, k` checked for subadditivity.
pub const SUBADDITIVITY_CHECK: usize = 256;

/// Increasing times `n_0 = 0 < n_1 < …`, an explicit prefix continued with
/// the prefix's last step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleJson", into = "ScheduleJson")]
pub struct BlockSchedule {
    times: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ScheduleJson {
    times: Vec<usize>,
}

impl TryFrom<ScheduleJson> for BlockSchedule {
    type Error = Error;
    fn try_from(j: ScheduleJson) -> Result<Self> {
        BlockSchedule::new(j.times)
    }
}

impl From<BlockSchedule> for ScheduleJson {
    fn from(s: BlockSchedule) -> Self {
        ScheduleJson { times: s.times }
    }
}

impl BlockSchedule {
    pub fn new(times: Vec<usize>) -> Result<Self> {
        if times.len() < 2 || times[0] != 0 {
            return Err(Error::InvalidSchedule("need n_0 = 0 and at least one more time".into()));
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSchedule(format!("times must increase strictly ({} then {})", w[0], w[1])));
        }
        Ok(BlockSchedule { times })
    }

    /// `n_m = m`.
    pub fn unit() -> Self {
        BlockSchedule { times: vec![0, 1] }
    }

    /// `n_m = step · m`.
    pub fn linear(step: usize) -> Result<Self> {
        BlockSchedule::new(vec![0, step])
    }

    pub fn prefix(&self) -> &[usize] {
        &self.times
    }

    fn step(&self) -> usize {
        let l = self.times.len();
        self.times[l - 1] - self.times[l - 2]
    }

    /// `n_m`.
    pub fn at(&self, m: usize) -> usize {
        let l = self.times.len();
        if m < l {
            self.times[m]
        } else {
            self.times[l - 1] + (m - (l - 1)) * self.step()
        }
    }

    /// `n_{m+1} − n_m`.
    pub fn block_len(&self, m: usize) -> usize {
        self.at(m + 1) - self.at(m)
    }

    /// Largest `m` with `n_m ≤ n`.
    pub fn block_of(&self, n: usize) -> usize {
        let l = self.times.len();
        if n >= self.times[l - 1] {
            l - 1 + (n - self.times[l - 1]) / self.step()
        } else {
            self.times.partition_point(|t| *t <= n) - 1
        }
    }

    /// First `(m, k)` with `n_{m+k} − n_m > n_k`, for `m, k ≤ limit`.
    pub fn subadditivity_violation(&self, limit: usize) -> Option<(usize, usize)> {
        // beyond the prefix the differences are constant, so checking one
        // prefix length past it covers every pair
        let limit = limit.max(self.times.len());
        (0..=limit)
            .flat_map(|m| (0..=limit).map(move |k| (m, k)))
            .find(|&(m, k)| self.at(m + k) - self.at(m) > self.at(k))
    }

    pub fn check_subadditive(&self) -> Result<()> {
        match self.subadditivity_violation(SUBADDITIVITY_CHECK) {
            None => Ok(()),
            Some((m, k)) => Err(Error::InvalidSchedule(format!(
                "not subadditive: n_{} − n_{m} = {} > n_{k} = {}",
                m + k,
                self.at(m + k) - self.at(m),
                self.at(k)
            ))),
        }
    }
}

/// Transition rule for blocks of `len` symbols.
#[derive(Clone, Debug)]
pub struct BlockKernel<'a> {
    kernel: &'a TransitionKernel,
    len: usize,
}

/// `P_len(· | x)` as a table over `A^len`, first drawn symbol most
/// significant.
pub fn block_kernel(kernel: &TransitionKernel, len: usize) -> Result<BlockKernel<'_>> {
    if len == 0 {
        return Err(Error::InvalidArgument("block length must be at least 1".into()));
    }
    crate::check_budget(crate::entries(kernel.alphabet().size(), len), crate::DEFAULT_BUDGET)?;
    Ok(BlockKernel { kernel, len })
}

impl BlockKernel<'_> {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row of block probabilities given the `kernel.depth()` most recent
    /// symbols.
    pub fn row(&self, window: &[usize]) -> Vec<f64> {
        let a = self.kernel.alphabet().size();
        let d = self.kernel.depth();
        let mut out = vec![0.0; a.pow(self.len as u32)];
        let mut buf: Vec<usize> = window[window.len() - d..].to_vec();
        let mut row = vec![0.0; a];
        fill(self.kernel, &mut buf, d, self.len, 0, 1.0, &mut row, &mut out);
        out
    }

    /// Row given a past context.
    pub fn row_for(&self, x: &Context) -> Vec<f64> {
        self.row(&x.suffix(self.kernel.depth()))
    }
}

#[allow(clippy::too_many_arguments)]
fn fill(
    kernel: &TransitionKernel,
    buf: &mut Vec<usize>,
    d: usize,
    left: usize,
    index: usize,
    weight: f64,
    row: &mut [f64],
    out: &mut [f64],
) {
    if left == 0 {
        out[index] = weight;
        return;
    }
    let a = row.len();
    kernel.row_into(&buf[buf.len() - d..], row);
    let probs = row.to_vec();
    for (s, p) in probs.into_iter().enumerate() {
        if p == 0.0 && left > 1 {
            continue;
        }
        buf.push(s);
        fill(kernel, buf, d, left - 1, index * a + s, weight * p, row, out);
        buf.pop();
    }
}

/// `γ̄_k = 1 − exp(−3 Σ_{j ≥ n_k} var_j(φ))`.
pub fn block_gamma(phi: &Potential, schedule: &BlockSchedule) -> Result<GammaSequence> {
    block_gamma_from(phi.variations(), schedule)
}

/// [`block_gamma`] from a variation sequence.
pub fn block_gamma_from(vars: &VariationSequence, schedule: &BlockSchedule) -> Result<GammaSequence> {
    schedule.check_subadditive()?;
    if !vars.is_summable() {
        return Err(Error::NotSummable("variations are not summable".into()));
    }
    let l = schedule.prefix().len();
    let step = schedule.block_len(l - 1);
    let base = schedule.at(l - 1) as i64 - (step * (l - 1)) as i64;
    let table: Vec<f64> = (0..l - 1).map(|m| -(-3.0 * vars.tail_sum(schedule.at(m))).exp_m1()).collect();
    let tail = GammaTail::Rests { variations: vars.clone(), scale: 3.0, base, step };
    let gamma = GammaSequence::new(table, tail)?;
    let rests = gamma.neg_log_survival_tail(0);
    if !rests.is_finite() {
        return Err(Error::NotSummable(format!(
            "rest sums Σ_m Σ_(j ≥ n_m) var_j diverge under schedule {:?}",
            schedule.prefix()
        )));
    }
    Ok(gamma)
}

/// A schedule for which the rest sums converge: `n_m = m` when the
/// variations have finite support, a geometric tail, or a polynomial tail
/// of exponent above 2.
pub fn auto_schedule(phi: &Potential) -> Result<BlockSchedule> {
    auto_schedule_from(phi.variations())
}

/// [`auto_schedule`] from a variation sequence.
pub fn auto_schedule_from(vars: &VariationSequence) -> Result<BlockSchedule> {
    match vars.tail() {
        Tail::Zero | Tail::Geometric { .. } => {}
        Tail::Polynomial { c, p, .. } if c > 0.0 && p <= 2.0 => {
            return Err(Error::InvalidSchedule(format!(
                "variations decay like m^-{p}; the rests decay like m^-{} and are not summable \
                 under any subadditive schedule with n_m = O(m)",
                p - 1.0
            )));
        }
        Tail::Polynomial { .. } => {}
    }
    let s = BlockSchedule::unit();
    block_gamma_from(vars, &s)?;
    Ok(s)
}

/// Checks a user schedule for subadditivity and summable rests.
pub fn validate_schedule(vars: &VariationSequence, schedule: &BlockSchedule) -> Result<()> {
    block_gamma_from(vars, schedule).map(|_| ())
}

/// Block-coupled path with the block-level clock.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockCoupledPath {
    pub path: CoupledPath,
    pub schedule: BlockSchedule,
    /// `block_clock[m]`: consecutive agreeing blocks ending with block `m`.
    pub block_clock: Vec<usize>,
}

/// Draws `blocks` blocks of the coupled pair, block `m` from the maximal
/// coupling of the two block rows given each side's realized prefix.
/// The block clock starts at 0 unless the pasts agree everywhere.
pub fn sample_block_coupled_chain(
    kernel: &TransitionKernel,
    x: &Context,
    y: &Context,
    schedule: &BlockSchedule,
    blocks: usize,
    seed: u64,
) -> Result<BlockCoupledPath> {
    let kernels = block_kernels(kernel, x, y, schedule, blocks)?;
    let mut rng = stream(seed, 0);
    let (path, block_clock) = block_path(kernel, x, y, &kernels, seed, &mut rng)?;
    Ok(BlockCoupledPath { path, schedule: schedule.clone(), block_clock })
}

fn block_kernels<'a>(
    kernel: &'a TransitionKernel,
    x: &Context,
    y: &Context,
    schedule: &BlockSchedule,
    blocks: usize,
) -> Result<Vec<BlockKernel<'a>>> {
    if blocks == 0 {
        return Err(Error::InvalidArgument("need at least one block".into()));
    }
    check_pasts(kernel, x, y)?;
    (0..blocks).map(|m| block_kernel(kernel, schedule.block_len(m))).collect()
}

fn block_path(
    kernel: &TransitionKernel,
    x: &Context,
    y: &Context,
    kernels: &[BlockKernel<'_>],
    seed: u64,
    rng: &mut StreamRng,
) -> Result<(CoupledPath, Vec<usize>)> {
    let t0 = initial_clock(x, y)?;
    let mut pair = Pair::new(kernel, x, y, t0);
    let mut current = if t0 == DEFAULT_AGREEMENT_CAP { t0 } else { 0 };
    let total: usize = kernels.iter().map(|k| k.len()).sum();
    let mut path = CoupledPath {
        x: x.clone(),
        y: y.clone(),
        u: Vec::with_capacity(total),
        v: Vec::with_capacity(total),
        clock: Vec::with_capacity(total),
        seed,
    };
    let mut block_clock = Vec::with_capacity(kernels.len());
    let a = kernel.alphabet().size();
    for bk in kernels {
        let same = if bk.len() == 1 {
            // identical draws to the unit coupled chain
            let (s, t) = pair.step(rng);
            record(&mut path, s, t, pair.clock);
            s == t
        } else {
            let (wu, wv) = pair.windows();
            let (ru, rv) = (bk.row(wu), bk.row(wv));
            let (bu, bv) = sample_maximal(rng, &ru, &rv);
            for (s, t) in index_word(bu, bk.len(), a).into_iter().zip(index_word(bv, bk.len(), a)) {
                pair.push(s, t);
                record(&mut path, s, t, pair.clock);
            }
            bu == bv
        };
        current = if same { current.saturating_add(1) } else { 0 };
        block_clock.push(current);
    }
    Ok((path, block_clock))
}

fn record(path: &mut CoupledPath, a: usize, b: usize, clock: usize) {
    path.u.push(a);
    path.v.push(b);
    path.clock.push(clock);
}

/// Monte-Carlo frequency of disagreeing block `m` for `m < blocks`. Run `r`
/// uses stream `r` of `seed`.
#[allow(clippy::too_many_arguments)]
pub fn block_disagreement_profile(
    kernel: &TransitionKernel,
    x: &Context,
    y: &Context,
    schedule: &BlockSchedule,
    blocks: usize,
    runs: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<Estimate>> {
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be at least 1".into()));
    }
    let kernels = block_kernels(kernel, x, y, schedule, blocks)?;
    initial_clock(x, y)?;
    let counts = exec
        .map_chunks(
            runs,
            MC_CHUNK,
            |range| {
                let mut c = vec![0u64; blocks];
                for r in range {
                    let mut rng = stream(seed, r as u64);
                    let (_, clock) = block_path(kernel, x, y, &kernels, seed, &mut rng).expect("pasts validated");
                    for (m, t) in clock.iter().enumerate() {
                        c[m] += u64::from(*t == 0);
                    }
                }
                c
            },
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
        .unwrap_or_else(|| vec![0; blocks]);
    Ok(counts.into_iter().map(|c| Estimate::from_count(c, runs)).collect())
}
