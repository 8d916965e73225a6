use super::kernel::TransitionKernel;
use crate::error::{Error, Result};
use crate::io::Csv;
use crate::rng::{draw, stream, StreamRng};
use crate::seq::Context;

/// A sampled path `Z^x_0, …, Z^x_{n−1}` of the chain with past `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub past: Context,
    pub samples: Vec<usize>,
    pub seed: u64,
}

impl Trajectory {
    /// Columns `t, symbol`.
    pub fn to_csv(&self) -> String {
        let a = self.past.alphabet();
        let mut csv = Csv::new(&["t", "symbol"]);
        for (t, s) in self.samples.iter().enumerate() {
            csv.row([t.to_string(), a.symbol(*s).to_string()]);
        }
        csv.finish()
    }
}

/// Rolling window of the most recent symbols of a history.
#[derive(Clone, Debug)]
pub(crate) struct History {
    buf: Vec<usize>,
    depth: usize,
}

impl History {
    pub(crate) fn new(past: &Context, depth: usize) -> Self {
        let mut buf = Vec::with_capacity(2 * depth.max(16));
        buf.extend(past.suffix(depth));
        History { buf, depth }
    }

    pub(crate) fn window(&self) -> &[usize] {
        &self.buf[self.buf.len() - self.depth..]
    }

    pub(crate) fn push(&mut self, s: usize) {
        if self.buf.len() == self.buf.capacity() {
            let keep = self.buf.len() - self.depth;
            self.buf.drain(..keep);
        }
        self.buf.push(s);
    }
}

/// Draws `n` steps of the chain with past `x` from stream 0 of `seed`.
pub fn sample_chain(kernel: &TransitionKernel, past: &Context, n: usize, seed: u64) -> Result<Trajectory> {
    if n == 0 {
        return Err(Error::InvalidArgument("trajectory length must be at least 1".into()));
    }
    if past.alphabet() != kernel.alphabet() {
        return Err(Error::AlphabetMismatch(format!("{} vs {}", past.alphabet(), kernel.alphabet())));
    }
    let mut rng = stream(seed, 0);
    let samples = sample_with(kernel, past, n, &mut rng);
    Ok(Trajectory { past: past.clone(), samples, seed })
}

pub(crate) fn sample_with(kernel: &TransitionKernel, past: &Context, n: usize, rng: &mut StreamRng) -> Vec<usize> {
    let mut hist = History::new(past, kernel.depth());
    let mut row = vec![0.0; kernel.alphabet().size()];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        kernel.row_into(hist.window(), &mut row);
        let s = draw(rng, &row);
        hist.push(s);
        out.push(s);
    }
    out
}

/// Empirical law of `Z^x_n` over `runs` independent paths (run `r` uses
/// stream `r` of `seed`).
pub fn empirical_law(
    kernel: &TransitionKernel,
    past: &Context,
    n: usize,
    runs: usize,
    seed: u64,
    exec: crate::par::Execution,
) -> Vec<f64> {
    let a = kernel.alphabet().size();
    let counts = exec
        .map_chunks(
            runs,
            4096,
            |range| {
                let mut c = vec![0u64; a];
                for r in range {
                    let mut rng = stream(seed, r as u64);
                    c[*sample_with(kernel, past, n + 1, &mut rng).last().unwrap()] += 1;
                }
                c
            },
            |mut x, y| {
                x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
                x
            },
        )
        .unwrap_or_else(|| vec![0; a]);
    counts.iter().map(|c| *c as f64 / runs.max(1) as f64).collect()
}
