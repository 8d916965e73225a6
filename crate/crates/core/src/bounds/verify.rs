use serde::{Deserialize, Serialize};

use super::constant::ConstantC;
use super::series::{holder_series, unit_series, block_series, theta_norm, unit_gamma, BlockSeries};
use crate::chain::{correlation_series, stationary_measure_at, CylinderFunction, History, StationaryMeasure, TransitionKernel};
use crate::coupling::{auto_schedule_from, BlockSchedule};
use crate::error::{Error, Result};
use crate::io::{fmt_f64, Csv};
use crate::par::Execution;
use crate::potential::{normalize, Potential, NORMALIZATION_TOL};
use crate::rng::{draw, stream};
use crate::seq::{index_word, seminorm, Context, Extension};

/// How correlations are measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo { runs: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub n_max: usize,
    pub method: Method,
    pub seed: u64,
    /// Multiplies the unit-clock gamma before the bounds are formed.
    pub gamma_scale: f64,
    /// Block schedule for the block-clock bound; chosen automatically when
    /// absent.
    pub schedule: Option<BlockSchedule>,
    /// Hölder exponent for the Hölder-class bound.
    pub theta: Option<f64>,
    /// Absolute slack before a measurement counts as exceeding a bound.
    pub tolerance: f64,
    pub exec: Execution,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            n_max: 100,
            method: Method::Exact,
            seed: 0,
            gamma_scale: 1.0,
            schedule: None,
            theta: None,
            tolerance: 1e-10,
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub n: usize,
    pub measured: f64,
    /// Half-width of the `3σ` band (0 for exact measurements).
    pub ci: f64,
    pub sum_bound: f64,
    pub c_bound: f64,
    pub t2_bound: Option<f64>,
    pub holder: Option<f64>,
    pub single_coord: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub n: usize,
    pub bound: &'static str,
    pub measured: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportHeader {
    pub method: Method,
    pub seed: u64,
    pub n_max: usize,
    pub input_normalized: bool,
    pub gamma_scale: f64,
    pub f_norm1: f64,
    /// `‖g‖` relative to the normalized potential (unit-clock bounds).
    pub g_seminorm: f64,
    /// `‖g‖_φ` relative to the input potential (block-clock bound).
    pub g_seminorm_input: f64,
    pub constant: ConstantC,
    pub block_constant: Option<ConstantC>,
    pub schedule: Option<Vec<usize>>,
    /// Why the block-clock bound is absent, if it is.
    pub block_note: Option<String>,
    /// The block-clock bound at time `n` is the bound of the block holding `n`.
    pub t2_clock: &'static str,
    pub theta: Option<f64>,
    pub g_theta_norm: Option<f64>,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub header: ReportHeader,
    pub rows: Vec<BoundRow>,
    pub violations: Vec<Violation>,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// Columns `n, measured, ci, sum_bound, C_bound, t2_bound, holder,
    /// single_coord`; absent bounds are empty cells.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        let mut csv = Csv::new(&["n", "measured", "ci", "sum_bound", "C_bound", "t2_bound", "holder", "single_coord"]);
        for r in &self.rows {
            csv.row([
                r.n.to_string(),
                fmt_f64(r.measured),
                fmt_f64(r.ci),
                fmt_f64(r.sum_bound),
                fmt_f64(r.c_bound),
                opt(r.t2_bound),
                opt(r.holder),
                opt(r.single_coord),
            ]);
        }
        csv.finish()
    }

    pub fn header_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(&self.header).expect("header serializes");
        v["violations"] = serde_json::to_value(&self.violations).expect("violations serialize");
        v
    }
}

/// Measures the correlations of `f` and `g` under the chain of `phi`
/// (normalized first when needed) and sets every applicable bound beside
/// them.
pub fn verify_bounds(
    phi: &Potential,
    f: &CylinderFunction,
    g: &CylinderFunction,
    opts: &VerifyOptions,
) -> Result<BoundReport> {
    if !(opts.tolerance > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let input_normalized = phi.is_normalized(NORMALIZATION_TOL).normalized;
    let psi = if input_normalized { phi.clone() } else { normalize(phi)?.psi };
    let kernel = TransitionKernel::from_potential(&psi)?;
    let k = kernel
        .memory_order()
        .ok_or_else(|| Error::InfiniteMemory("verification needs finite memory; truncate first".into()))?;
    let depth = k.max(f.depth()).max(g.depth()).max(1);
    let mu = stationary_measure_at(&kernel, depth)?;
    let f_norm1 = mu.l1_norm(f);
    let g_vars = g.variations();
    let g_seminorm = seminorm(&g_vars, psi.variations());
    let g_seminorm_input = seminorm(&g_vars, phi.variations());

    let n_max = opts.n_max;
    let mut gamma = unit_gamma(psi.variations())?;
    if opts.gamma_scale != 1.0 {
        gamma = gamma.scaled(opts.gamma_scale, n_max + 2)?;
    }
    let t1 = unit_series(psi.variations(), &gamma, f_norm1, g_seminorm, n_max)?;

    let (t2, block_note): (Option<BlockSeries>, Option<String>) = {
        let schedule = match &opts.schedule {
            Some(s) => Ok(s.clone()),
            None => auto_schedule_from(phi.variations()),
        };
        match schedule {
            Ok(s) => {
                let m_max = s.block_of(n_max);
                match block_series(phi.variations(), &s, f_norm1, g_seminorm_input, m_max) {
                    Ok(t) => (Some(t), None),
                    Err(e) if opts.schedule.is_some() => return Err(e),
                    Err(e) => (None, Some(e.to_string())),
                }
            }
            Err(e) if opts.schedule.is_some() => return Err(e),
            Err(e) => (None, Some(e.to_string())),
        }
    };

    let holder = match opts.theta {
        Some(theta) => {
            let norm = theta_norm(&g_vars, theta);
            Some((norm, holder_series(&t1.gamma_star, norm, theta, f_norm1)?))
        }
        None => None,
    };
    let single = (g.depth() <= 1).then(|| {
        let pre = if f_norm1 == 0.0 || g.sup_norm() == 0.0 { 0.0 } else { f_norm1 * g.sup_norm() };
        t1.gamma_star.iter().map(|s| pre * s).collect::<Vec<f64>>()
    });

    let (measured, ci) = match opts.method {
        _ if f.is_constant() || g.is_constant() => (vec![0.0; n_max + 1], vec![0.0; n_max + 1]),
        Method::Exact => {
            let c = correlation_series(&kernel, f, g, n_max)?;
            (c.iter().map(|v| v.abs()).collect::<Vec<_>>(), vec![0.0; n_max + 1])
        }
        Method::MonteCarlo { runs } => monte_carlo(&kernel, &mu, f, g, n_max, runs, opts.seed, opts.exec)?,
    };

    let mut rows = Vec::with_capacity(n_max + 1);
    let mut violations = Vec::new();
    for n in 0..=n_max {
        let row = BoundRow {
            n,
            measured: measured[n],
            ci: ci[n],
            sum_bound: t1.sum_bound[n],
            c_bound: t1.c_bound[n],
            t2_bound: t2.as_ref().and_then(|t| t.sum_at(n)),
            holder: holder.as_ref().map(|(_, h)| h[n]),
            single_coord: single.as_ref().map(|s| s[n]),
        };
        let low = row.measured - row.ci;
        let checks = [
            ("sum_bound", Some(row.sum_bound)),
            ("C_bound", Some(row.c_bound)),
            ("t2_bound", row.t2_bound),
            ("holder", row.holder),
            ("single_coord", row.single_coord),
        ];
        for (name, b) in checks {
            if let Some(b) = b {
                if low > b + opts.tolerance {
                    violations.push(Violation { n, bound: name, measured: row.measured, value: b });
                }
            }
        }
        rows.push(row);
    }

    let header = ReportHeader {
        method: opts.method,
        seed: opts.seed,
        n_max,
        input_normalized,
        gamma_scale: opts.gamma_scale,
        f_norm1,
        g_seminorm,
        g_seminorm_input,
        constant: t1.constant,
        block_constant: t2.as_ref().map(|t| t.constant),
        schedule: t2.as_ref().map(|t| t.schedule.prefix().to_vec()),
        block_note,
        t2_clock: "block",
        theta: opts.theta,
        g_theta_norm: holder.as_ref().map(|(n, _)| *n),
        tolerance: opts.tolerance,
    };
    Ok(BoundReport { header, rows, violations })
}

/// `|mean f(W_0) g(W_n) − ∫f ∫g|` over stationary runs, with `3σ` bands.
#[allow(clippy::too_many_arguments)]
fn monte_carlo(
    kernel: &TransitionKernel,
    mu: &StationaryMeasure,
    f: &CylinderFunction,
    g: &CylinderFunction,
    n_max: usize,
    runs: usize,
    seed: u64,
    exec: Execution,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if runs < 2 {
        return Err(Error::InvalidArgument("Monte-Carlo verification needs at least 2 runs".into()));
    }
    let a = kernel.alphabet().size();
    let depth = mu.depth();
    let (mf, mg) = (mu.integrate(f), mu.integrate(g));
    let zero = || (vec![0.0f64; n_max + 1], vec![0.0f64; n_max + 1]);
    let (s1, s2) = exec
        .map_chunks(
            runs,
            crate::coupling::MC_CHUNK,
            |range| {
                let (mut s1, mut s2) = zero();
                let mut row = vec![0.0; a];
                for r in range {
                    let mut rng = stream(seed, r as u64);
                    let w = index_word(draw(&mut rng, mu.weights()), depth, a);
                    let past = Context::new(kernel.alphabet().clone(), w, Extension::Pad(0)).expect("valid word");
                    let mut h = History::new(&past, depth);
                    let fv = f.eval(h.window());
                    for n in 0..=n_max {
                        if n > 0 {
                            kernel.row_into(h.window(), &mut row);
                            h.push(draw(&mut rng, &row));
                        }
                        let x = fv * g.eval(h.window());
                        s1[n] += x;
                        s2[n] += x * x;
                    }
                }
                (s1, s2)
            },
            |(mut a1, mut a2), (b1, b2)| {
                a1.iter_mut().zip(b1).for_each(|(x, y)| *x += y);
                a2.iter_mut().zip(b2).for_each(|(x, y)| *x += y);
                (a1, a2)
            },
        )
        .unwrap_or_else(zero);
    let r = runs as f64;
    let measured = s1.iter().map(|s| (s / r - mf * mg).abs()).collect();
    let ci = s1
        .iter()
        .zip(&s2)
        .map(|(s, q)| {
            let m = s / r;
            let var = ((q / r - m * m) * r / (r - 1.0)).max(0.0);
            3.0 * (var / r).sqrt()
        })
        .collect();
    Ok((measured, ci))
}
