use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::VariationSequence;
use crate::special::hurwitz_zeta;

/// Analytic continuation of a gamma table. Indices are absolute.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum GammaTail {
    Zero,
    /// `γ_m = value`.
    Constant { value: f64 },
    /// `γ_m = c θ^m`.
    Geometric { c: f64, theta: f64 },
    /// `γ_m = c (m + shift)^{-p}`.
    Polynomial {
        c: f64,
        p: f64,
        #[serde(default = "one")]
        shift: f64,
    },
    /// `γ_m = 1 − exp(−scale · var_{m + offset})`.
    Variations { variations: VariationSequence, offset: usize, scale: f64 },
    /// `γ_m = 1 − exp(−scale · Σ_{j ≥ base + step·m} var_j)`.
    Rests { variations: VariationSequence, scale: f64, base: i64, step: usize },
}

fn one() -> f64 {
    1.0
}

impl GammaTail {
    fn value(&self, m: usize) -> f64 {
        match self {
            GammaTail::Zero => 0.0,
            GammaTail::Constant { value } => *value,
            GammaTail::Geometric { c, theta } => c * theta.powf(m as f64),
            GammaTail::Polynomial { c, p, shift } => c * (m as f64 + shift).powf(-p),
            GammaTail::Variations { variations, offset, scale } => {
                -(-scale * variations.value(m + offset)).exp_m1()
            }
            GammaTail::Rests { variations, scale, base, step } => {
                -(-scale * variations.tail_sum(rest_index(*base, *step, m))).exp_m1()
            }
        }
    }

    fn ln_value(&self, m: usize) -> f64 {
        match self {
            GammaTail::Geometric { c, theta } => c.ln() + m as f64 * theta.ln(),
            GammaTail::Polynomial { c, p, shift } => c.ln() - p * (m as f64 + shift).ln(),
            GammaTail::Variations { variations, offset, scale } => {
                let x = scale * variations.value(m + offset);
                if x > 1e-300 {
                    (-(-x).exp_m1()).ln()
                } else {
                    scale.ln() + variations.ln_value(m + offset)
                }
            }
            _ => self.value(m).ln(),
        }
    }

    /// Upper bound on `Σ_{k ≥ m} −log(1 − γ_k)`.
    fn neg_log_survival_from(&self, m: usize) -> f64 {
        let g = self.value(m);
        match self {
            GammaTail::Zero => 0.0,
            GammaTail::Constant { value } => {
                if *value > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            GammaTail::Geometric { c, theta } => {
                if *c == 0.0 {
                    0.0
                } else {
                    c * theta.powf(m as f64) / ((1.0 - theta) * (1.0 - g))
                }
            }
            GammaTail::Polynomial { c, p, shift } => {
                if *c == 0.0 {
                    0.0
                } else {
                    c * hurwitz_zeta(*p, m as f64 + shift) / (1.0 - g)
                }
            }
            GammaTail::Variations { variations, offset, scale } => scale * variations.tail_sum(m + offset),
            GammaTail::Rests { variations, scale, base, step } => {
                let n0 = rest_index(*base, *step, m);
                let s = if *step == 1 {
                    variations.second_tail_sum(n0)
                } else {
                    // tail_sum(n0 + s k) ≤ mean of tail_sum over the preceding s indices
                    variations.tail_sum(n0) + variations.second_tail_sum(n0 + 1) / *step as f64
                };
                scale * s
            }
        }
    }

    /// True when the bound of `neg_log_survival_from` is an identity.
    fn exact_log_tail(&self) -> bool {
        matches!(
            self,
            GammaTail::Zero
                | GammaTail::Constant { .. }
                | GammaTail::Variations { .. }
                | GammaTail::Rests { step: 1, .. }
        )
    }

    /// `(c, θ, from)` with `γ_m ≤ c θ^m` for `m ≥ from`, if such an envelope
    /// with `θ < 1` exists.
    fn geometric_envelope(&self, len: usize) -> Option<(f64, f64, usize)> {
        use crate::seq::Tail;
        match self {
            GammaTail::Zero => Some((0.0, 0.0, len)),
            GammaTail::Constant { value } if *value == 0.0 => Some((0.0, 0.0, len)),
            GammaTail::Geometric { c, theta } => Some((*c, *theta, len)),
            GammaTail::Variations { variations, offset, scale } => {
                let from = len.max(variations.resolved_len().saturating_sub(*offset));
                match variations.tail() {
                    Tail::Zero => Some((0.0, 0.0, from)),
                    Tail::Geometric { c, theta } => {
                        Some((scale * c * theta.powf(*offset as f64), theta, from))
                    }
                    Tail::Polynomial { .. } => None,
                }
            }
            GammaTail::Rests { variations, scale, base, step } => {
                let rl = variations.resolved_len() as i64;
                let k0 = if rl > *base { ((rl - base) as usize).div_ceil(*step) } else { 0 };
                let from = len.max(k0);
                match variations.tail() {
                    Tail::Zero => Some((0.0, 0.0, from)),
                    Tail::Geometric { c, theta } => Some((
                        scale * c * theta.powf(*base as f64) / (1.0 - theta),
                        theta.powf(*step as f64),
                        from,
                    )),
                    Tail::Polynomial { .. } => None,
                }
            }
            _ => None,
        }
    }
}

fn rest_index(base: i64, step: usize, m: usize) -> usize {
    (base + (step * m) as i64).max(0) as usize
}

#[derive(Serialize, Deserialize)]
struct GammaJson {
    #[serde(flatten)]
    tail: GammaTail,
    #[serde(default)]
    table: Vec<f64>,
}

/// Nonincreasing sequence `γ_m ∈ [0, 1)` with `γ_0 < 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GammaJson", into = "GammaJson")]
pub struct GammaSequence {
    table: Vec<f64>,
    tail: GammaTail,
}

impl TryFrom<GammaJson> for GammaSequence {
    type Error = Error;

    fn try_from(j: GammaJson) -> Result<Self> {
        GammaSequence::new(j.table, j.tail)
    }
}

impl From<GammaSequence> for GammaJson {
    fn from(g: GammaSequence) -> Self {
        GammaJson { tail: g.tail, table: g.table }
    }
}

const MONOTONE_SLACK: f64 = 1e-12;

impl GammaSequence {
    pub fn new(mut table: Vec<f64>, tail: GammaTail) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidGamma(m));
        match &tail {
            GammaTail::Constant { value } if !(0.0..1.0).contains(value) => {
                return bad(format!("constant {value} must lie in [0, 1)"))
            }
            GammaTail::Geometric { c, theta } if !(*c >= 0.0 && (0.0..1.0).contains(theta)) => {
                return bad(format!("geometric tail needs c ≥ 0 and θ ∈ [0, 1), got c={c}, θ={theta}"))
            }
            GammaTail::Polynomial { c, p, shift } if !(*c >= 0.0 && *p > 0.0 && *shift > 0.0) => {
                return bad(format!("polynomial tail needs c ≥ 0, p > 0, shift > 0, got {c}, {p}, {shift}"))
            }
            GammaTail::Variations { scale, .. } | GammaTail::Rests { scale, .. } if !(*scale > 0.0) => {
                return bad(format!("scale {scale} must be positive"))
            }
            GammaTail::Rests { step: 0, .. } => return bad("schedule step must be positive".into()),
            _ => {}
        }
        for (m, g) in table.iter().enumerate() {
            if !(0.0..1.0).contains(g) {
                return bad(format!("γ_{m} = {g} outside [0, 1)"));
            }
        }
        let first_tail = tail.value(table.len());
        if !(0.0..1.0).contains(&first_tail) {
            return bad(format!("γ_{} = {first_tail} outside [0, 1)", table.len()));
        }
        let mut next = first_tail;
        for m in (0..table.len()).rev() {
            if table[m] < next {
                if next - table[m] > MONOTONE_SLACK {
                    return bad(format!("sequence increases at index {m}"));
                }
                table[m] = next;
            }
            next = table[m];
        }
        Ok(GammaSequence { table, tail })
    }

    pub fn zero() -> Self {
        GammaSequence { table: vec![], tail: GammaTail::Zero }
    }

    pub fn finite(table: Vec<f64>) -> Result<Self> {
        Self::new(table, GammaTail::Zero)
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::new(vec![], GammaTail::Constant { value })
    }

    /// `γ_m = c θ^m`.
    pub fn geometric(c: f64, theta: f64) -> Result<Self> {
        Self::new(vec![], GammaTail::Geometric { c, theta })
    }

    /// `γ_m = c (m + shift)^{-p}`.
    pub fn polynomial(c: f64, p: f64, shift: f64) -> Result<Self> {
        Self::new(vec![], GammaTail::Polynomial { c, p, shift })
    }

    /// `γ_m = 1 − exp(−scale · var_{m + offset})`.
    pub fn from_variations(variations: &VariationSequence, offset: usize, scale: f64) -> Result<Self> {
        Self::new(vec![], GammaTail::Variations { variations: variations.clone(), offset, scale })
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn tail(&self) -> &GammaTail {
        &self.tail
    }

    pub fn value(&self, m: usize) -> f64 {
        self.table.get(m).copied().unwrap_or_else(|| self.tail.value(m))
    }

    /// `log γ_m`, without underflow in the analytic tail.
    pub fn ln_value(&self, m: usize) -> f64 {
        self.table.get(m).map(|g| g.ln()).unwrap_or_else(|| self.tail.ln_value(m))
    }

    /// `γ_0, …, γ_{n−1}`.
    pub fn values(&self, n: usize) -> Vec<f64> {
        (0..n).map(|m| self.value(m)).collect()
    }

    /// Upper bound on `Σ_{k ≥ m} −log(1 − γ_k)` (possibly infinite).
    pub fn neg_log_survival_tail(&self, m: usize) -> f64 {
        let n = self.table.len();
        if m < n {
            let head: f64 = self.table[m..].iter().map(|g| -(-g).ln_1p()).sum();
            head + self.tail.neg_log_survival_from(n)
        } else {
            self.tail.neg_log_survival_from(m)
        }
    }

    /// Whether [`Self::neg_log_survival_tail`] is exact rather than a bound.
    pub fn exact_log_tail(&self) -> bool {
        self.tail.exact_log_tail()
    }

    /// `Σ γ_m < ∞`.
    pub fn is_summable(&self) -> bool {
        self.neg_log_survival_tail(0).is_finite()
    }

    /// `(c, θ, from)` with `γ_m ≤ c θ^m` for `m ≥ from` and `θ < 1`.
    pub fn geometric_envelope(&self) -> Option<(f64, f64, usize)> {
        self.tail.geometric_envelope(self.table.len())
    }

    /// `factor · γ_m`, tabulated up to `len` and continued by the scaled tail
    /// where that stays in closed form.
    pub fn scaled(&self, factor: f64, len: usize) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(Error::InvalidGamma(format!("scale factor {factor} must be positive")));
        }
        let table: Vec<f64> = (0..len.max(self.table.len())).map(|m| factor * self.value(m)).collect();
        let n = table.len();
        let tail = match &self.tail {
            GammaTail::Zero => GammaTail::Zero,
            GammaTail::Constant { value } => GammaTail::Constant { value: value * factor },
            GammaTail::Geometric { c, theta } => GammaTail::Geometric { c: c * factor, theta: *theta },
            GammaTail::Polynomial { c, p, shift } => GammaTail::Polynomial { c: c * factor, p: *p, shift: *shift },
            _ => {
                // 1 − e^{−x} has no scaled closed form; continue with a constant
                // dominating the scaled values.
                let bound = factor * self.value(n);
                if factor <= 1.0 {
                    GammaTail::Geometric { c: bound, theta: 0.0 }
                } else {
                    GammaTail::Constant { value: bound }
                }
            }
        };
        let tail = match tail {
            GammaTail::Geometric { c, theta: 0.0 } if n > 0 => {
                // c·0^m vanishes for m ≥ 1; keep the scaled sequence on the table
                let _ = c;
                GammaTail::Zero
            }
            t => t,
        };
        Self::new(table, tail)
    }
}
