//! Experiment configuration files.

use std::path::{Path, PathBuf};

use mixlab::bounds::{BlockSchedule, Method};
use mixlab::chain::CylinderFunction;
use mixlab::potential::Potential;
use mixlab::renewal::GammaSequence;
use mixlab::seq::{Alphabet, ContextSpec};
use serde::Deserialize;
use serde_json::Value;

use crate::Failure;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Inline potential, or a path to a JSON file relative to the config.
    pub potential: Option<Value>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub simulate: Option<Simulate>,
    #[serde(default)]
    pub couple: Option<Couple>,
    #[serde(default)]
    pub renewal: Option<Renewal>,
    #[serde(default)]
    pub verify: Option<Verify>,
    #[serde(default)]
    pub classify: Option<Classify>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Simulate {
    pub past: ContextSpec,
    pub n: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Couple {
    pub x: ContextSpec,
    pub y: ContextSpec,
    pub n: usize,
    /// Independent runs for the disagreement summary; 0 skips it.
    #[serde(default)]
    pub runs: usize,
    /// Largest clock level in the domination table; absent skips it.
    pub k_max: Option<usize>,
    pub schedule: Option<BlockSchedule>,
    pub blocks: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Renewal {
    /// Explicit gamma; read off the potential's kernel when absent.
    pub gamma: Option<GammaSequence>,
    pub n_max: usize,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    /// Points at which the generating functions are evaluated.
    #[serde(default)]
    pub s: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Classify {
    pub gamma: Option<GammaSequence>,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    /// Window `[lo, hi]` for the regression; the default window otherwise.
    pub window: Option<(usize, usize)>,
}

fn default_horizon() -> usize {
    2000
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verify {
    pub f: FunctionSpec,
    pub g: FunctionSpec,
    pub n_max: usize,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default = "one")]
    pub gamma_scale: f64,
    pub schedule: Option<BlockSchedule>,
    pub theta: Option<f64>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_method() -> Method {
    Method::Exact
}

fn one() -> f64 {
    1.0
}

fn default_tolerance() -> f64 {
    1e-10
}

/// A cylinder function: an indicator of the most recent symbols, a
/// constant, or an explicit table over `A^depth`.
#[derive(Debug, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum FunctionSpec {
    Indicator { indicator: String },
    Constant { constant: f64 },
    Table { depth: usize, values: Vec<f64> },
}

impl FunctionSpec {
    pub fn build(&self, alphabet: &Alphabet) -> Result<CylinderFunction, Failure> {
        let n = alphabet.size();
        Ok(match self {
            FunctionSpec::Indicator { indicator } => CylinderFunction::indicator(n, &alphabet.parse_word(indicator)?)?,
            FunctionSpec::Constant { constant } => CylinderFunction::constant(n, *constant),
            FunctionSpec::Table { depth, values } => CylinderFunction::new(n, *depth, values.clone())?,
        })
    }
}

/// A parsed config with its raw bytes and location.
pub struct Loaded {
    pub config: Config,
    pub bytes: Vec<u8>,
    pub dir: PathBuf,
}

pub fn load(path: &Path) -> Result<Loaded, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
    let config: Config = serde_json::from_slice(&bytes)
        .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Loaded { config, bytes, dir })
}

impl Loaded {
    pub fn potential(&self) -> Result<Potential, Failure> {
        let value = self
            .config
            .potential
            .as_ref()
            .ok_or_else(|| Failure::config("config has no potential"))?;
        let value = match value {
            Value::String(file) => {
                let p = self.dir.join(file);
                let text = std::fs::read_to_string(&p)
                    .map_err(|e| Failure::config(format!("cannot read potential {}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", p.display())))?
            }
            v => v.clone(),
        };
        Ok(Potential::from_json(value)?)
    }

    pub fn section<'a, T>(&self, s: &'a Option<T>, name: &str) -> Result<&'a T, Failure> {
        s.as_ref().ok_or_else(|| Failure::config(format!("config has no \"{name}\" section")))
    }
}
