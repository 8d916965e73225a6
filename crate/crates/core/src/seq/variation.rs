use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::hurwitz_zeta;

/// Analytic continuation of a variation table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum Tail {
    /// Zero beyond the table.
    Zero,
    /// `c · θ^m`.
    Geometric { c: f64, theta: f64 },
    /// `c · (m + shift)^{-p}`.
    Polynomial {
        c: f64,
        p: f64,
        #[serde(default = "one")]
        shift: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl Tail {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidVariations(msg));
        match *self {
            Tail::Zero => Ok(()),
            Tail::Geometric { c, theta } => {
                if !(c >= 0.0 && c.is_finite()) {
                    return bad(format!("geometric constant {c} must be finite and ≥ 0"));
                }
                if !(0.0..1.0).contains(&theta) {
                    return bad(format!("geometric ratio {theta} must lie in [0, 1)"));
                }
                Ok(())
            }
            Tail::Polynomial { c, p, shift } => {
                if !(c >= 0.0 && c.is_finite()) {
                    return bad(format!("polynomial constant {c} must be finite and ≥ 0"));
                }
                if !(p > 0.0 && p.is_finite()) {
                    return bad(format!("polynomial exponent {p} must be positive"));
                }
                if !(shift >= 1.0 && shift.is_finite()) {
                    return bad(format!("polynomial shift {shift} must be ≥ 1"));
                }
                Ok(())
            }
        }
    }

    pub fn value(&self, m: usize) -> f64 {
        match *self {
            Tail::Zero => 0.0,
            Tail::Geometric { c, theta } => c * theta.powf(m as f64),
            Tail::Polynomial { c, p, shift } => c * (m as f64 + shift).powf(-p),
        }
    }

    /// `log value(m)`, without underflow.
    pub fn ln_value(&self, m: usize) -> f64 {
        match *self {
            Tail::Zero => f64::NEG_INFINITY,
            Tail::Geometric { c, theta } => c.ln() + m as f64 * theta.ln(),
            Tail::Polynomial { c, p, shift } => c.ln() - p * (m as f64 + shift).ln(),
        }
    }

    /// Σ_{k ≥ m} value(k).
    pub fn sum_from(&self, m: usize) -> f64 {
        match *self {
            Tail::Zero => 0.0,
            Tail::Geometric { c, theta } => c * theta.powf(m as f64) / (1.0 - theta),
            Tail::Polynomial { c, p, shift } => {
                if c == 0.0 {
                    0.0
                } else {
                    c * hurwitz_zeta(p, m as f64 + shift)
                }
            }
        }
    }

    /// Σ_{j ≥ m} Σ_{k ≥ j} value(k) = Σ_{k ≥ m} (k - m + 1) value(k).
    pub fn second_sum_from(&self, m: usize) -> f64 {
        match *self {
            Tail::Zero => 0.0,
            Tail::Geometric { c, theta } => c * theta.powf(m as f64) / ((1.0 - theta) * (1.0 - theta)),
            Tail::Polynomial { c, p, shift } => {
                if c == 0.0 {
                    return 0.0;
                }
                if p <= 2.0 {
                    return f64::INFINITY;
                }
                let q = m as f64 + shift;
                c * (hurwitz_zeta(p - 1.0, q) - (q - 1.0) * hurwitz_zeta(p, q))
            }
        }
    }

    fn scaled(&self, factor: f64) -> Tail {
        match *self {
            Tail::Zero => Tail::Zero,
            Tail::Geometric { c, theta } => Tail::Geometric { c: c * factor, theta },
            Tail::Polynomial { c, p, shift } => Tail::Polynomial { c: c * factor, p, shift },
        }
    }
}

#[derive(Serialize, Deserialize)]
struct VariationJson {
    #[serde(flatten)]
    tail: Tail,
    #[serde(default)]
    table: Vec<f64>,
}

/// Nonincreasing nonnegative sequence `var_0 ≥ var_1 ≥ ... ≥ 0`, stored as
/// an explicit table followed by an analytic tail.
///
/// Index `m` of the tail is the absolute index: for `m ≥ table.len()` the
/// value is `tail.value(m)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VariationJson", into = "VariationJson")]
pub struct VariationSequence {
    table: Vec<f64>,
    tail: Tail,
    /// suffix[m] = Σ_{m ≤ k < table.len()} table[k]
    suffix: Vec<f64>,
}

impl TryFrom<VariationJson> for VariationSequence {
    type Error = Error;

    fn try_from(j: VariationJson) -> Result<Self> {
        VariationSequence::new(j.table, j.tail)
    }
}

impl From<VariationSequence> for VariationJson {
    fn from(v: VariationSequence) -> Self {
        VariationJson { tail: v.tail, table: v.table }
    }
}

const MONOTONE_SLACK: f64 = 1e-12;

impl VariationSequence {
    /// Builds and validates a sequence. Violations of monotonicity up to a
    /// relative 1e-12 (rounding in enumerated maxima) are clamped away.
    pub fn new(table: Vec<f64>, tail: Tail) -> Result<Self> {
        tail.validate()?;
        let mut table = table;
        for (m, v) in table.iter().enumerate() {
            if !(v.is_finite() && *v >= 0.0) {
                return Err(Error::InvalidVariations(format!("entry {m} = {v} is not finite and ≥ 0")));
            }
        }
        let mut next = tail.value(table.len());
        for m in (0..table.len()).rev() {
            if table[m] < next {
                if next - table[m] > MONOTONE_SLACK * next.max(1.0) {
                    return Err(Error::InvalidVariations(format!(
                        "sequence increases at index {m}: {} < {next}",
                        table[m]
                    )));
                }
                table[m] = next;
            }
            next = table[m];
        }
        let mut suffix = vec![0.0; table.len() + 1];
        for m in (0..table.len()).rev() {
            suffix[m] = suffix[m + 1] + table[m];
        }
        Ok(VariationSequence { table, tail, suffix })
    }

    pub fn zero() -> Self {
        Self::new(vec![], Tail::Zero).unwrap()
    }

    pub fn finite(table: Vec<f64>) -> Result<Self> {
        Self::new(table, Tail::Zero)
    }

    pub fn geometric(c: f64, theta: f64) -> Result<Self> {
        Self::new(vec![], Tail::Geometric { c, theta })
    }

    /// `c · (m + 1)^{-p}`.
    pub fn polynomial(c: f64, p: f64) -> Result<Self> {
        Self::new(vec![], Tail::Polynomial { c, p, shift: 1.0 })
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Number of explicitly tabulated entries.
    pub fn resolved_len(&self) -> usize {
        self.table.len()
    }

    /// Index from which every entry is zero, if the sequence has finite support.
    pub fn support_len(&self) -> Option<usize> {
        let n = self.table.len();
        let head = self.table.iter().rposition(|&v| v > 0.0).map_or(0, |i| i + 1);
        match self.tail {
            Tail::Zero => Some(head),
            Tail::Geometric { c, theta } if c == 0.0 || theta == 0.0 => {
                Some(if self.value(n) > 0.0 { n + 1 } else { head })
            }
            Tail::Polynomial { c: 0.0, .. } => Some(head),
            _ => None,
        }
    }

    pub fn value(&self, m: usize) -> f64 {
        self.table.get(m).copied().unwrap_or_else(|| self.tail.value(m))
    }

    /// `log var_m`, without underflow in the analytic tail.
    pub fn ln_value(&self, m: usize) -> f64 {
        self.table.get(m).map(|v| v.ln()).unwrap_or_else(|| self.tail.ln_value(m))
    }

    /// Σ_{k ≥ m} var_k (possibly infinite).
    pub fn tail_sum(&self, m: usize) -> f64 {
        let n = self.table.len();
        if m < n {
            self.suffix[m] + self.tail.sum_from(n)
        } else {
            self.tail.sum_from(m)
        }
    }

    /// Σ_{j ≥ m} tail_sum(j) (possibly infinite).
    pub fn second_tail_sum(&self, m: usize) -> f64 {
        let n = self.table.len();
        if m < n {
            let head: f64 = self.suffix[m..n].iter().sum();
            head + (n - m) as f64 * self.tail.sum_from(n) + self.tail.second_sum_from(n)
        } else {
            self.tail.second_sum_from(m)
        }
    }

    pub fn is_summable(&self) -> bool {
        self.tail_sum(0).is_finite()
    }

    /// Smallest index `m` with `value(m) < eps`, if one exists.
    pub fn first_below(&self, eps: f64) -> Option<usize> {
        if let Some(i) = self.table.iter().position(|&v| v < eps) {
            return Some(i);
        }
        let n = self.table.len();
        let m = match self.tail {
            Tail::Zero => n,
            Tail::Geometric { c, theta } => {
                if c < eps {
                    n
                } else if theta == 0.0 {
                    n.max(1)
                } else {
                    let k = ((eps / c).ln() / theta.ln()).floor().max(0.0) as usize;
                    k.max(n)
                }
            }
            Tail::Polynomial { c, p, shift } => {
                if c < eps {
                    n
                } else {
                    let k = ((c / eps).powf(1.0 / p) - shift).floor().max(0.0);
                    if k > 1e15 {
                        return None;
                    }
                    (k as usize).max(n)
                }
            }
        };
        // guard against rounding in the closed-form inversion
        (m..m + 4).find(|&k| self.value(k) < eps)
    }

    /// `factor · var_m`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.table.iter().map(|v| v * factor).collect(), self.tail.scaled(factor))
    }

    /// Pointwise maximum with another sequence over the first `len` entries,
    /// keeping `self`'s tail beyond. Used to merge certified bounds.
    pub fn values(&self, len: usize) -> Vec<f64> {
        (0..len).map(|m| self.value(m)).collect()
    }
}

/// `sup_{0 ≤ k ≤ k_max} var_k(g) / var_k(φ)`, with `0/0 = 0` and
/// `positive/0 = ∞`.
pub fn seminorm_ratio(g: &VariationSequence, phi: &VariationSequence, k_max: usize) -> f64 {
    (0..=k_max).map(|k| ratio(g.value(k), phi.value(k))).fold(0.0, f64::max)
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// `sup_{k ≥ 0} var_k(g) / var_k(φ)` over the whole sequence, with the
/// supremum over the analytic tails evaluated in closed form.
pub fn seminorm(g: &VariationSequence, phi: &VariationSequence) -> f64 {
    let n = g.resolved_len().max(phi.resolved_len());
    let head = seminorm_ratio(g, phi, n);
    let tail = match (g.tail(), phi.tail()) {
        (Tail::Zero, _) => 0.0,
        (_, Tail::Zero) => {
            // g has a nonzero analytic tail, φ does not
            if g.value(n) > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        }
        (Tail::Geometric { c: cg, theta: tg }, Tail::Geometric { c: cp, theta: tp }) => {
            if cg == 0.0 {
                0.0
            } else if cp == 0.0 || tp == 0.0 || tg > tp {
                f64::INFINITY
            } else {
                // ratio (cg/cp)(tg/tp)^k is nonincreasing: sup at k = n
                ratio(g.value(n), phi.value(n))
            }
        }
        (Tail::Polynomial { c: cg, p: pg, shift: sg }, Tail::Polynomial { c: cp, p: pp, shift: sp }) => {
            if cg == 0.0 {
                0.0
            } else if cp == 0.0 || pg < pp {
                f64::INFINITY
            } else if sg == sp {
                // (cg/cp)(k+s)^{pp-pg} is nonincreasing
                ratio(g.value(n), phi.value(n))
            } else {
                // ratio → cg/cp (pg = pp) or 0; compare the first tail term with the limit
                let limit = if pg == pp { cg / cp } else { 0.0 };
                ratio(g.value(n), phi.value(n)).max(limit)
            }
        }
        (Tail::Polynomial { c, .. }, Tail::Geometric { .. }) => {
            if c == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        }
        (Tail::Geometric { c: cg, theta: tg }, Tail::Polynomial { c: cp, p, shift }) => {
            if cg == 0.0 || tg == 0.0 {
                ratio(g.value(n), phi.value(n))
            } else if cp == 0.0 {
                f64::INFINITY
            } else {
                // cg θ^k (k+s)^p / cp peaks near k* = p/(-ln θ) - s
                let peak = (p / -tg.ln() - shift).max(0.0).ceil() as usize;
                let end = peak.max(n) + 1;
                seminorm_ratio(g, phi, end) // covers [0, end]; decreasing afterwards
            }
        }
    };
    head.max(tail)
}
