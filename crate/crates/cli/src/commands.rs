//! One function per subcommand.

use std::path::PathBuf;

use mixlab::bounds::{auto_schedule, verify_bounds, VerifyOptions};
use mixlab::chain::{sample_chain, TransitionKernel};
use mixlab::coupling::{clock_counts, domination_test, sample_block_coupled_chain, sample_coupled_chain};
use mixlab::io::{fmt_f64, Csv};
use mixlab::potential::{self as pot, Potential};
use mixlab::renewal::{
    classify_decay, classify_decay_window, convolution_check, generating_functions, radius_estimate,
    return_probabilities, GammaSequence, RenewalProfile,
};
use mixlab::seq::{agreement_length, ContextSpec, DEFAULT_AGREEMENT_CAP};
use serde::Serialize;
use serde_json::json;

use crate::output::Outputs;
use crate::{Failure, Run};

/// Tolerance for treating an input potential as already normalized.
const NORMALIZED_TOL: f64 = 1e-10;
/// Largest horizon for the self-convolution cross-check, which is cubic.
const CONVOLUTION_CAP: usize = 200;

/// The chain of `φ`: its own kernel when normalized, else that of its
/// normalization.
fn kernel_for(phi: &Potential) -> Result<TransitionKernel, Failure> {
    if phi.is_normalized(NORMALIZED_TOL).normalized {
        Ok(TransitionKernel::from_potential(phi)?)
    } else {
        Ok(TransitionKernel::from_potential(&pot::normalize(phi)?.psi)?)
    }
}

fn outputs(run: &Run, command: &'static str, seed: Option<u64>) -> Result<Outputs, Failure> {
    Outputs::new(&run.out, command, &run.loaded.bytes, seed)
}

/// An explicit gamma from the config, else the certificate of the potential's
/// kernel.
fn gamma_from(run: &Run, explicit: &Option<GammaSequence>) -> Result<GammaSequence, Failure> {
    if let Some(g) = explicit {
        return Ok(g.clone());
    }
    let kernel = kernel_for(&run.loaded.potential()?)?;
    kernel
        .gamma()
        .cloned()
        .ok_or_else(|| Failure::numeric("the chain admits no continuity sequence with γ_0 < 1"))
}

pub fn simulate(run: &Run, command: &'static str) -> Result<Vec<PathBuf>, Failure> {
    let cfg = run.loaded.section(&run.loaded.config.simulate, "simulate")?;
    let seed = run.seed()?;
    let phi = run.loaded.potential()?;
    let kernel = kernel_for(&phi)?;
    let past = cfg.past.resolve(phi.alphabet())?;
    let traj = sample_chain(&kernel, &past, cfg.n, seed)?;
    let mut out = outputs(run, command, Some(seed))?;
    out.write("trajectory.csv", &traj.to_csv())?;
    Ok(out.written().to_vec())
}

#[derive(Serialize)]
struct DisagreementRow {
    n: usize,
    p_disagree: f64,
    std_err: f64,
    gamma_star: f64,
}

pub fn couple(run: &Run, command: &'static str) -> Result<Vec<PathBuf>, Failure> {
    let cfg = run.loaded.section(&run.loaded.config.couple, "couple")?;
    let seed = run.seed()?;
    let phi = run.loaded.potential()?;
    let kernel = kernel_for(&phi)?;
    let (x, y) = (cfg.x.resolve(phi.alphabet())?, cfg.y.resolve(phi.alphabet())?);
    let mut out = outputs(run, command, Some(seed))?;

    let path = sample_coupled_chain(&kernel, &x, &y, cfg.n, seed)?;
    out.write("coupled_path.csv", &path.to_csv())?;

    let star = kernel.gamma().map(|g| return_probabilities(g, cfg.n));
    let mut summary = json!({
        "x": ContextSpec::from(&x),
        "y": ContextSpec::from(&y),
        "n": cfg.n,
        "seed": seed,
        "initial_agreement": agreement_length(&x, &y, DEFAULT_AGREEMENT_CAP)?,
        "path_disagreements": path.u.iter().zip(&path.v).filter(|(a, b)| a != b).count(),
    });
    if cfg.runs > 0 {
        let counts = clock_counts(&kernel, &x, &y, cfg.n - 1, 0, cfg.runs, seed, run.exec)?;
        let rows: Vec<DisagreementRow> = (0..cfg.n)
            .map(|n| {
                let e = counts.disagreement(n);
                DisagreementRow {
                    n,
                    p_disagree: e.value,
                    std_err: e.std_err,
                    gamma_star: star.as_ref().map_or(f64::NAN, |s| s[n]),
                }
            })
            .collect();
        summary["runs"] = json!(cfg.runs);
        summary["disagreement"] = json!(rows);
    }
    if let Some(k_max) = cfg.k_max {
        let runs = cfg.runs.max(1);
        let report = domination_test(&kernel, &x, &y, cfg.n - 1, k_max, runs, seed, run.exec)?;
        let mut csv = Csv::new(&["n", "k", "exact", "estimate", "std_err", "violation"]);
        for c in &report.cells {
            csv.row([
                c.n.to_string(),
                c.k.to_string(),
                fmt_f64(c.exact),
                fmt_f64(c.estimate),
                fmt_f64(c.std_err),
                c.violation.to_string(),
            ]);
        }
        out.write("domination.csv", &csv.finish())?;
        summary["domination_holds"] = json!(report.holds());
        summary["domination_worst_excess"] = json!(report.worst_excess());
    }
    if let Some(schedule) = &cfg.schedule {
        let blocks = cfg.blocks.ok_or_else(|| Failure::config("a block schedule needs \"blocks\""))?;
        let bp = sample_block_coupled_chain(&kernel, &x, &y, schedule, blocks, seed)?;
        out.write("block_path.csv", &bp.path.to_csv())?;
        summary["block_clock"] = json!(bp.block_clock);
    }
    out.write_json("disagreement.json", &summary)?;
    Ok(out.written().to_vec())
}

pub fn renewal(run: &Run, command: &'static str) -> Result<Vec<PathBuf>, Failure> {
    let cfg = run.loaded.section(&run.loaded.config.renewal, "renewal")?;
    let gamma = gamma_from(run, &cfg.gamma)?;
    let profile = RenewalProfile::compute(&gamma, cfg.n_max);
    let generating: Vec<_> = cfg
        .s
        .iter()
        .map(|&s| generating_functions(&gamma, s, cfg.n_max))
        .collect::<Result<_, _>>()?;
    let summary = json!({
        "gamma": gamma,
        "n_max": cfg.n_max,
        "renewal_residual": profile.renewal_residual(),
        "convolution_residual": convolution_check(&gamma, cfg.n_max.min(CONVOLUTION_CAP)),
        "classification": classify_decay(&gamma, cfg.horizon)?,
        "radius": radius_estimate(&gamma).ok(),
        "generating_functions": generating,
    });
    let mut out = outputs(run, command, None)?;
    out.write("renewal.csv", &profile.to_csv())?;
    out.write_json("classification.json", &summary)?;
    Ok(out.written().to_vec())
}

pub fn classify(run: &Run, command: &'static str) -> Result<Vec<PathBuf>, Failure> {
    let cfg = run.loaded.section(&run.loaded.config.classify, "classify")?;
    let gamma = gamma_from(run, &cfg.gamma)?;
    let report = match cfg.window {
        Some((lo, hi)) => classify_decay_window(&gamma, cfg.horizon, lo, hi)?,
        None => classify_decay(&gamma, cfg.horizon)?,
    };
    let mut summary = json!({
        "gamma": gamma,
        "classification": report,
        "radius": radius_estimate(&gamma).ok(),
    });
    if cfg.gamma.is_none() {
        let phi = run.loaded.potential()?;
        let vars = phi.variations();
        summary["variations_summable"] = json!(vars.is_summable());
        summary["auto_schedule"] = match auto_schedule(&phi) {
            Ok(s) => json!(s),
            Err(e) => json!({ "error": e.to_string() }),
        };
    }
    let mut out = outputs(run, command, None)?;
    out.write_json("classification.json", &summary)?;
    Ok(out.written().to_vec())
}

pub fn verify(run: &Run, command: &'static str) -> Result<Vec<PathBuf>, Failure> {
    let cfg = run.loaded.section(&run.loaded.config.verify, "verify")?;
    let phi = run.loaded.potential()?;
    let stochastic = !matches!(cfg.method, mixlab::bounds::Method::Exact);
    let seed = if stochastic { Some(run.seed()?) } else { run.seed };
    if cfg.tolerance.is_nan() || cfg.tolerance <= 0.0 {
        return Err(Failure::config("tolerance must be positive"));
    }
    let opts = VerifyOptions {
        n_max: cfg.n_max,
        method: cfg.method,
        seed: seed.unwrap_or(0),
        gamma_scale: cfg.gamma_scale,
        schedule: cfg.schedule.clone(),
        theta: cfg.theta,
        tolerance: cfg.tolerance,
        exec: run.exec,
    };
    let (f, g) = (cfg.f.build(phi.alphabet())?, cfg.g.build(phi.alphabet())?);
    let report = verify_bounds(&phi, &f, &g, &opts)?;
    let mut out = outputs(run, command, seed)?;
    out.write("bounds.csv", &report.to_csv())?;
    out.write_json("bounds.json", &report.header_json())?;
    if report.holds() {
        Ok(out.written().to_vec())
    } else {
        let first = &report.violations[0];
        Err(Failure::violation(format!(
            "{} bound violation(s); first at n = {}: measured {} exceeds {} bound {} (see {})",
            report.violations.len(),
            first.n,
            fmt_f64(first.measured),
            first.bound,
            fmt_f64(first.value),
            run.out.join("bounds.csv").display(),
        )))
    }
}

pub fn normalize(run: &Run, command: &'static str) -> Result<Vec<PathBuf>, Failure> {
    let phi = run.loaded.potential()?;
    let check = phi.is_normalized(NORMALIZED_TOL);
    let result = pot::normalize(&phi)?;
    let summary = json!({
        "input_normalized": check.normalized,
        "input_deviation": check.max_deviation,
        "order": result.order,
        "log_lambda": result.log_lambda,
        "log_rho": result.log_rho,
        "power_iterations": result.power_iterations,
        "residual": result.residual,
        "output_deviation": result.psi.is_normalized(NORMALIZED_TOL).max_deviation,
    });
    let mut out = outputs(run, command, None)?;
    out.write_json("psi.json", &result.psi.to_json())?;
    out.write_json("normalization.json", &summary)?;
    Ok(out.written().to_vec())
}
