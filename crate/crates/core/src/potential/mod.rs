//! Potentials `φ(xa)` on histories, their variations, the normalization
//! test and the normalization transform.

mod family;
mod normalize;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::seq::{index_word, word_count, word_index, Alphabet, Context, Extension, VariationSequence};

pub use family::{Decay, PairFamily};
pub use normalize::{normalize, NormalizationResult};


/// Tolerance used for the `normalized` flag.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// A potential together with certified variations.
///
/// Finite-memory potentials are tables over `A^{k+1}` (context of length
/// `k` followed by the current symbol); their variations are exact and
/// vanish from index `k + 1` on. Pair-interaction families have infinite
/// memory and carry an analytic variation bound.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    alphabet: Alphabet,
    kind: Kind,
    variations: VariationSequence,
    normalized: bool,
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Table { order: usize, values: Vec<f64> },
    Pair(PairFamily),
}

/// A potential value with the error incurred by truncating the history.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub error_radius: f64,
}

/// Outcome of [`Potential::is_normalized`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalizationCheck {
    pub normalized: bool,
    pub max_deviation: f64,
    /// Context (oldest first) with the largest deviation.
    pub witness: Option<String>,
    pub contexts_checked: usize,
}

impl Potential {
    /// Finite-memory potential from `|A|^{order+1}` values indexed by the word
    /// `u·a` (oldest symbol most significant).
    pub fn from_table(alphabet: Alphabet, order: usize, values: Vec<f64>) -> Result<Self> {
        let n = word_count(alphabet.size(), order + 1)
            .ok_or_else(|| Error::InvalidArgument(format!("order {order} too large")))?;
        if values.len() != n {
            return Err(Error::InvalidArgument(format!(
                "table for order {order} needs {n} values, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "potential value for {:?} is not finite",
                alphabet.format_word(&index_word(i, order + 1, alphabet.size()))
            )));
        }
        let variations = table_variations(alphabet.size(), order, &values)?;
        let mut p = Potential { alphabet, kind: Kind::Table { order, values }, variations, normalized: false };
        p.normalized = p.is_normalized(NORMALIZATION_TOL).normalized;
        Ok(p)
    }

    /// Order-1 potential `log Q(x_{-1}, a)` of a strictly positive stochastic
    /// (or merely positive) matrix.
    pub fn from_matrix(alphabet: Alphabet, rows: &[Vec<f64>]) -> Result<Self> {
        let n = alphabet.size();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument(format!("matrix must be {n}×{n}")));
        }
        let values = rows.iter().flatten().map(|q| q.ln()).collect();
        Self::from_table(alphabet, 1, values)
    }

    /// `φ ≡ -log |A|`.
    pub fn uniform(alphabet: Alphabet) -> Self {
        let v = -(alphabet.size() as f64).ln();
        let n = alphabet.size();
        Self::from_table(alphabet, 0, vec![v; n]).expect("uniform potential is valid")
    }

    pub fn from_family(alphabet: Alphabet, family: PairFamily) -> Result<Self> {
        let variations = family.variations()?;
        let normalized = family.locally_normalized;
        Ok(Potential { alphabet, kind: Kind::Pair(family), variations, normalized })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// `Some(k)` for finite memory, `None` for infinite memory.
    pub fn memory_order(&self) -> Option<usize> {
        match &self.kind {
            Kind::Table { order, .. } => Some(*order),
            Kind::Pair(_) => None,
        }
    }

    /// Exact variations (finite memory) or a certified upper bound.
    pub fn variations(&self) -> &VariationSequence {
        &self.variations
    }

    pub fn is_normalized_flag(&self) -> bool {
        self.normalized
    }

    pub fn family(&self) -> Option<&PairFamily> {
        match &self.kind {
            Kind::Pair(f) => Some(f),
            Kind::Table { .. } => None,
        }
    }

    /// Table over `A^{k+1}` for finite-memory potentials.
    pub fn table(&self) -> Option<&[f64]> {
        match &self.kind {
            Kind::Table { values, .. } => Some(values),
            Kind::Pair(_) => None,
        }
    }

    /// `φ(xa)`. Finite-memory and padded histories evaluate exactly; for
    /// periodic histories of infinite-memory potentials the sum is cut where
    /// the remaining weight drops below 1e-15 and the cut is reported.
    pub fn evaluate(&self, x: &Context, a: usize) -> Result<Evaluation> {
        if x.alphabet() != &self.alphabet {
            return Err(Error::AlphabetMismatch(format!("{} vs {}", x.alphabet(), self.alphabet)));
        }
        if a >= self.alphabet.size() {
            return Err(Error::InvalidContext(format!("symbol index {a} outside alphabet")));
        }
        match &self.kind {
            Kind::Table { order, values } => {
                let mut w = x.suffix(*order);
                w.push(a);
                Ok(Evaluation { value: values[word_index(&w, self.alphabet.size())], error_radius: 0.0 })
            }
            Kind::Pair(f) => match x.constant_beyond() {
                Some((len, pad)) => {
                    Ok(Evaluation { value: f.value(&x.suffix(len), Some(pad), a), error_radius: 0.0 })
                }
                None => {
                    let depth = f.weight_tail_cut(1e-15).max(x.len());
                    let value = f.value(&x.suffix(depth), None, a);
                    Ok(Evaluation { value, error_radius: f.truncation_radius(depth) })
                }
            },
        }
    }

    /// `φ` on a window of the most recent symbols (oldest first) followed by
    /// `a`; for infinite memory the history beyond the window is replaced by
    /// the interaction midpoint. The window must hold at least
    /// `memory_order` symbols.
    pub(crate) fn value_on_window(&self, window: &[usize], a: usize) -> f64 {
        match &self.kind {
            Kind::Table { order, values } => {
                let w = &window[window.len() - order..];
                let idx = word_index(w, self.alphabet.size()) * self.alphabet.size() + a;
                values[idx]
            }
            Kind::Pair(f) => f.value(window, None, a),
        }
    }

    /// Error radius of [`Self::value_on_window`] at a given window depth.
    pub fn truncation_radius(&self, depth: usize) -> f64 {
        match &self.kind {
            Kind::Table { order, .. } if depth >= *order => 0.0,
            Kind::Table { .. } => f64::INFINITY,
            Kind::Pair(f) => f.truncation_radius(depth),
        }
    }

    /// Finite-memory approximation of order `k`. Tables of lower order are
    /// lifted; pair families replace the history beyond depth `k` by the
    /// interaction midpoint (and are renormalized locally when flagged).
    pub fn truncate(&self, k: usize) -> Result<Potential> {
        let n = self.alphabet.size();
        let count =
            word_count(n, k + 1).ok_or_else(|| Error::InvalidArgument(format!("order {k} too large")))?;
        crate::check_budget(count as u128, crate::DEFAULT_BUDGET)?;
        if let Kind::Table { order, .. } = &self.kind {
            if *order > k {
                return Err(Error::InvalidArgument(format!(
                    "cannot truncate an order-{order} table to order {k}"
                )));
            }
        }
        let values = (0..count)
            .map(|i| {
                let w = index_word(i, k + 1, n);
                self.value_on_window(&w[..k], w[k])
            })
            .collect();
        Potential::from_table(self.alphabet.clone(), k, values)
    }

    /// Checks `|Σ_a e^{φ(xa)} − 1| ≤ tol`: on every context of length `k`
    /// for finite memory, on all padded words up to length 6 (at most 4096
    /// contexts) plus periodic words otherwise.
    pub fn is_normalized(&self, tol: f64) -> NormalizationCheck {
        let n = self.alphabet.size();
        let mut worst = (0.0f64, None::<String>);
        let mut checked = 0;
        let mut visit = |x: &Context| {
            let s: f64 = (0..n)
                .map(|a| self.evaluate(x, a).map(|e| e.value.exp()).unwrap_or(f64::NAN))
                .sum();
            let dev = (s - 1.0).abs();
            checked += 1;
            if !(dev <= worst.0) {
                worst = (dev, Some(x.to_symbol_string()));
            }
        };
        match &self.kind {
            Kind::Table { order, .. } => {
                for i in 0..n.pow(*order as u32) {
                    let w = index_word(i, *order, n);
                    visit(&Context::new(self.alphabet.clone(), w, Extension::Pad(0)).unwrap());
                }
            }
            Kind::Pair(_) => {
                let mut len = 0;
                while len < 6 && n.pow(len as u32 + 1) <= 4096 {
                    len += 1;
                }
                for pad in 0..n {
                    for i in 0..n.pow(len as u32) {
                        let w = index_word(i, len, n);
                        visit(&Context::new(self.alphabet.clone(), w.clone(), Extension::Pad(pad)).unwrap());
                        if pad == 0 && !w.is_empty() {
                            visit(&Context::new(self.alphabet.clone(), w, Extension::Periodic).unwrap());
                        }
                    }
                }
            }
        }
        let normalized = worst.0 <= tol;
        NormalizationCheck { normalized, max_deviation: worst.0, witness: worst.1, contexts_checked: checked }
    }

    /// Potential with every value shifted by `c`.
    pub fn shifted(&self, c: f64) -> Result<Potential> {
        match &self.kind {
            Kind::Table { order, values } => {
                Potential::from_table(self.alphabet.clone(), *order, values.iter().map(|v| v + c).collect())
            }
            Kind::Pair(_) => Err(Error::InfiniteMemory("shift applies to tables only".into())),
        }
    }

    pub fn to_json(&self) -> Value {
        match &self.kind {
            Kind::Table { order, values } => {
                let n = self.alphabet.size();
                let table: BTreeMap<String, f64> = values
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (self.alphabet.format_word(&index_word(i, order + 1, n)), v))
                    .collect();
                serde_json::json!({
                    "alphabet": self.alphabet,
                    "memory_order": order,
                    "table": table,
                })
            }
            Kind::Pair(f) => serde_json::json!({
                "family": f.decay.name(),
                "params": f.params(&self.alphabet),
            }),
        }
    }

    pub fn from_json(v: Value) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct TableJson {
            alphabet: Alphabet,
            memory_order: usize,
            table: BTreeMap<String, f64>,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct FamilyJson {
            family: String,
            params: family::FamilyParams,
        }
        if v.get("family").is_some() {
            let f: FamilyJson = serde_json::from_value(v)?;
            let fam = PairFamily::from_params(&f.params, &f.family)?;
            return Potential::from_family(f.params.alphabet, fam);
        }
        let t: TableJson = serde_json::from_value(v)?;
        let n = t.alphabet.size();
        let count = word_count(n, t.memory_order + 1)
            .ok_or_else(|| Error::InvalidArgument(format!("order {} too large", t.memory_order)))?;
        if t.table.len() != count {
            return Err(Error::InvalidArgument(format!(
                "table has {} entries, order {} needs {count}",
                t.table.len(),
                t.memory_order
            )));
        }
        let mut values = vec![f64::NAN; count];
        for (key, val) in &t.table {
            let w = t.alphabet.parse_word(key)?;
            if w.len() != t.memory_order + 1 {
                return Err(Error::InvalidArgument(format!(
                    "table key {key:?} must have {} symbols",
                    t.memory_order + 1
                )));
            }
            values[word_index(&w, n)] = *val;
        }
        Potential::from_table(t.alphabet, t.memory_order, values)
    }
}

impl Serialize for Potential {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Potential {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Potential::from_json(Value::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl PairFamily {
    /// Smallest depth whose remaining weight is below `eps` (capped at 2^16).
    pub(crate) fn weight_tail_cut(&self, eps: f64) -> usize {
        let mut d = 1usize;
        while d < (1 << 16) && self.weight_tail(d) * self.coupling_scale() >= eps {
            d *= 2;
        }
        d
    }

    fn coupling_scale(&self) -> f64 {
        self.coupling.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0)
    }
}

/// `var_m` of a table of order `k`, `m = 0..=k`, by grouping entries on
/// their last `m` symbols.
fn table_variations(n: usize, order: usize, values: &[f64]) -> Result<VariationSequence> {
    let mut vars = Vec::with_capacity(order + 1);
    for m in 0..=order {
        let groups = n.pow(m as u32);
        let mut lo = vec![f64::INFINITY; groups];
        let mut hi = vec![f64::NEG_INFINITY; groups];
        for (i, &v) in values.iter().enumerate() {
            let g = i % groups;
            lo[g] = lo[g].min(v);
            hi[g] = hi[g].max(v);
        }
        vars.push(lo.iter().zip(&hi).map(|(l, h)| h - l).fold(0.0, f64::max));
    }
    VariationSequence::finite(vars)
}

/// `var_m(φ)` for `m = 0..=m_max` by exhaustive grouping of contexts that
/// agree on their last `m` symbols. Requires finite memory and
/// `|A|^{k+1} ≤ budget`.
pub fn exact_variations(phi: &Potential, m_max: usize, budget: u128) -> Result<VariationSequence> {
    match &phi.kind {
        Kind::Pair(_) => Err(Error::InfiniteMemory(
            "exact variations need a finite-memory potential; use the declared bound".into(),
        )),
        Kind::Table { order, values } => {
            crate::check_budget(crate::entries(phi.alphabet.size(), order + 1), budget)?;
            if m_max < *order {
                return Err(Error::InvalidArgument(format!("m_max = {m_max} below memory order {order}")));
            }
            let v = table_variations(phi.alphabet.size(), *order, values)?;
            VariationSequence::finite((0..=m_max).map(|m| v.value(m)).collect())
        }
    }
}

/// `Σ_{k≥m} var_k(φ)`, the bound on `var_m(ψ)` and `var_m(log ρ)` for the
/// normalization `ψ` of `φ`.
pub fn psi_variation_bound(phi: &Potential, m: usize) -> Result<f64> {
    let s = phi.variations.tail_sum(m);
    if s.is_finite() {
        Ok(s)
    } else {
        Err(Error::NotSummable(format!("variations of φ are not summable (tail from {m})")))
    }
}

/// `2 Σ_{k≥m} var_k(φ)`: bound on `var_m(ψ)` obtained from
/// `var_m(log ρ) ≤ Σ_{k>m} var_k(φ)` and the cocycle
/// `ψ = φ + log ρ(xa) − log ρ(x) − log λ`.
pub fn psi_variation_bound_cocycle(phi: &Potential, m: usize) -> Result<f64> {
    psi_variation_bound(phi, m).map(|s| 2.0 * s)
}
