use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{Potential, NORMALIZATION_TOL};
use crate::renewal::GammaSequence;
use crate::seq::{index_word, word_count, word_index, Alphabet, Context, VariationSequence};

/// Largest window kept for infinite-memory kernels.
pub const MAX_WINDOW: usize = 4096;
/// Truncation error tolerated when cutting an infinite-memory kernel.
const WINDOW_TOL: f64 = 1e-12;
const ROW_TOL: f64 = 1e-12;

/// Which continuity sequence a kernel certifies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaIndexing {
    /// `γ_m = 1 − e^{−var_m(ψ)}`.
    #[default]
    Variations,
    /// `γ_m = 1 − e^{−var_{m+1}(ψ)}`, the tightest bound read off the
    /// variations alone.
    Shifted,
    /// `γ_m = 1 − min P(a|x)/P(a|y)` over `x ≗m y`, by enumeration.
    Enumerated,
}

#[derive(Clone, Debug, PartialEq)]
enum Law {
    /// `P(a | u)` at `word_index(u)·|A| + a` for `u ∈ A^order`.
    Table { order: usize, probs: Vec<f64> },
    /// `e^{ψ}` on the last `depth` symbols, history beyond replaced by the
    /// interaction midpoint.
    Window { psi: Potential, depth: usize },
}

/// Transition probabilities `P(a | x)` of a chain with complete connections,
/// with a certified continuity sequence `γ`:
/// `P(a|x) / P(a|y) ≥ 1 − γ_m` whenever `x ≗m y`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionKernel {
    alphabet: Alphabet,
    law: Law,
    variations: Option<VariationSequence>,
    indexing: GammaIndexing,
    gamma: Option<GammaSequence>,
}

impl TransitionKernel {
    /// Finite-memory kernel from `|A|^{order+1}` probabilities, rows indexed
    /// by the context (oldest symbol most significant). `γ` is enumerated.
    pub fn from_table(alphabet: Alphabet, order: usize, probs: Vec<f64>) -> Result<Self> {
        let n = alphabet.size();
        let count = word_count(n, order + 1).ok_or_else(|| Error::InvalidArgument(format!("order {order} too large")))?;
        crate::check_budget(count as u128, crate::DEFAULT_BUDGET)?;
        if probs.len() != count {
            return Err(Error::InvalidDistribution(format!("order {order} needs {count} probabilities, got {}", probs.len())));
        }
        for (r, row) in probs.chunks(n).enumerate() {
            let s: f64 = row.iter().sum();
            if row.iter().any(|p| !(*p >= 0.0 && p.is_finite())) || (s - 1.0).abs() > ROW_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "row for context {:?} is not a probability vector (sum {s})",
                    alphabet.format_word(&index_word(r, order, n))
                )));
            }
        }
        let mut k = TransitionKernel {
            alphabet,
            law: Law::Table { order, probs },
            variations: None,
            indexing: GammaIndexing::Enumerated,
            gamma: None,
        };
        k.gamma = k.enumerated_gamma().ok().flatten();
        Ok(k)
    }

    /// Order-1 kernel from a stochastic matrix.
    pub fn from_matrix(alphabet: Alphabet, rows: &[Vec<f64>]) -> Result<Self> {
        let n = alphabet.size();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidDistribution(format!("matrix must be {n}×{n}")));
        }
        Self::from_table(alphabet, 1, rows.concat())
    }

    /// `P(a|x) = e^{ψ(xa)}` for a normalized potential, with `γ` read off the
    /// variations of `ψ` ([`GammaIndexing::Variations`]).
    pub fn from_potential(psi: &Potential) -> Result<Self> {
        let check = psi.is_normalized(NORMALIZATION_TOL);
        if !check.normalized {
            return Err(Error::NotNormalized { deviation: check.max_deviation });
        }
        let n = psi.alphabet().size();
        let law = match (psi.memory_order(), psi.table()) {
            (Some(order), Some(values)) => {
                let mut probs: Vec<f64> = values.iter().map(|v| v.exp()).collect();
                for row in probs.chunks_mut(n) {
                    let s: f64 = row.iter().sum();
                    row.iter_mut().for_each(|p| *p /= s);
                }
                Law::Table { order, probs }
            }
            _ => {
                let mut depth = 1;
                while depth < MAX_WINDOW && psi.truncation_radius(depth) > WINDOW_TOL {
                    depth *= 2;
                }
                Law::Window { psi: psi.clone(), depth: depth.min(MAX_WINDOW) }
            }
        };
        let mut k = TransitionKernel {
            alphabet: psi.alphabet().clone(),
            law,
            variations: Some(psi.variations().clone()),
            indexing: GammaIndexing::Variations,
            gamma: None,
        };
        k.gamma = k.gamma_for(GammaIndexing::Variations)?;
        Ok(k)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// `Some(k)` for finite memory.
    pub fn memory_order(&self) -> Option<usize> {
        match &self.law {
            Law::Table { order, .. } => Some(*order),
            Law::Window { .. } => None,
        }
    }

    /// Number of most recent symbols a row depends on.
    pub fn depth(&self) -> usize {
        match &self.law {
            Law::Table { order, .. } => *order,
            Law::Window { depth, .. } => *depth,
        }
    }

    /// The certified `γ`, if one exists (a vanishing probability next to a
    /// positive one admits none).
    pub fn gamma(&self) -> Option<&GammaSequence> {
        self.gamma.as_ref()
    }

    pub fn indexing(&self) -> GammaIndexing {
        self.indexing
    }

    /// Probabilities over `A^{order+1}` for finite memory.
    pub fn table(&self) -> Option<&[f64]> {
        match &self.law {
            Law::Table { probs, .. } => Some(probs),
            Law::Window { .. } => None,
        }
    }

    /// Replaces the certificate, e.g. to study a deliberately wrong one.
    pub fn with_gamma(mut self, gamma: GammaSequence) -> Self {
        self.gamma = Some(gamma);
        self
    }

    /// Switches the certificate to another indexing.
    pub fn with_indexing(mut self, indexing: GammaIndexing) -> Result<Self> {
        self.gamma = self.gamma_for(indexing)?;
        self.indexing = indexing;
        Ok(self)
    }

    /// `γ` under the given indexing; `None` when no certificate with
    /// `γ_0 < 1` exists.
    pub fn gamma_for(&self, indexing: GammaIndexing) -> Result<Option<GammaSequence>> {
        match indexing {
            GammaIndexing::Enumerated => self.enumerated_gamma(),
            GammaIndexing::Variations | GammaIndexing::Shifted => {
                let v = self.variations.as_ref().ok_or_else(|| {
                    Error::InvalidArgument("kernel was not built from a potential; only enumeration applies".into())
                })?;
                let offset = usize::from(indexing == GammaIndexing::Shifted);
                if v.value(offset).is_infinite() {
                    return Ok(None);
                }
                Ok(GammaSequence::from_variations(v, offset, 1.0).ok())
            }
        }
    }

    /// `γ_m = 1 − min_{x ≗m y, a} P(a|x)/P(a|y)` for `m < k`, 0 beyond.
    pub fn enumerated_gamma(&self) -> Result<Option<GammaSequence>> {
        let Law::Table { order, probs } = &self.law else {
            return Err(Error::InfiniteMemory("enumerated γ needs finite memory".into()));
        };
        let n = self.alphabet.size();
        let mut table = Vec::with_capacity(*order);
        for m in 0..*order {
            let groups = n.pow(m as u32);
            let mut lo = vec![f64::INFINITY; groups * n];
            let mut hi = vec![0.0f64; groups * n];
            for (i, row) in probs.chunks(n).enumerate() {
                let g = i % groups;
                for (a, &p) in row.iter().enumerate() {
                    lo[g * n + a] = lo[g * n + a].min(p);
                    hi[g * n + a] = hi[g * n + a].max(p);
                }
            }
            let ratio = lo.iter().zip(&hi).map(|(l, h)| if *h == 0.0 { 1.0 } else { l / h }).fold(1.0, f64::min);
            table.push(1.0 - ratio);
        }
        if table.first().is_some_and(|g| *g >= 1.0) || table.iter().any(|g| *g >= 1.0) {
            return Ok(None);
        }
        Ok(Some(GammaSequence::finite(table)?))
    }

    /// Fills `out` with `P(· | window)`, where `window` (oldest first) holds
    /// at least [`Self::depth`] symbols.
    pub fn row_into(&self, window: &[usize], out: &mut [f64]) {
        let n = self.alphabet.size();
        match &self.law {
            Law::Table { order, probs } => {
                let i = word_index(&window[window.len() - order..], n) * n;
                out.copy_from_slice(&probs[i..i + n]);
            }
            Law::Window { psi, depth } => {
                let w = &window[window.len().saturating_sub(*depth)..];
                for (a, o) in out.iter_mut().enumerate() {
                    *o = psi.value_on_window(w, a).exp();
                }
                let s: f64 = out.iter().sum();
                out.iter_mut().for_each(|p| *p /= s);
            }
        }
    }

    /// `P(· | window)`.
    pub fn row(&self, window: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; self.alphabet.size()];
        self.row_into(window, &mut out);
        out
    }

    /// `P(a | x)`.
    pub fn prob(&self, a: usize, x: &Context) -> Result<f64> {
        if x.alphabet() != &self.alphabet {
            return Err(Error::AlphabetMismatch(format!("{} vs {}", x.alphabet(), self.alphabet)));
        }
        if a >= self.alphabet.size() {
            return Err(Error::InvalidContext(format!("symbol index {a} outside alphabet")));
        }
        Ok(self.row(&x.suffix(self.depth()))[a])
    }

    /// `P(a | u)` for every `u ∈ A^depth`, `depth ≥ order`, at
    /// `word_index(u)·|A| + a`.
    pub fn lift(&self, depth: usize) -> Result<Vec<f64>> {
        let Law::Table { order, probs } = &self.law else {
            return Err(Error::InfiniteMemory("lifted transitions need finite memory".into()));
        };
        if depth < *order {
            return Err(Error::InvalidArgument(format!("lift depth {depth} below memory order {order}")));
        }
        let n = self.alphabet.size();
        crate::check_budget(crate::entries(n, depth + 1), crate::DEFAULT_BUDGET)?;
        let rows = n.pow(*order as u32);
        let count = n.pow(depth as u32);
        let mut out = Vec::with_capacity(count * n);
        for u in 0..count {
            let r = u % rows;
            out.extend_from_slice(&probs[r * n..(r + 1) * n]);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{Decay, PairFamily};

    fn q() -> TransitionKernel {
        TransitionKernel::from_matrix(Alphabet::digits(2).unwrap(), &[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap()
    }

    #[test]
    fn uniform_kernel_has_no_memory() {
        let k = TransitionKernel::from_potential(&Potential::uniform(Alphabet::digits(3).unwrap())).unwrap();
        let x = Context::parse(k.alphabet(), "210", Default::default()).unwrap();
        assert!((k.prob(1, &x).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(k.gamma().unwrap().values(5).iter().all(|g| *g == 0.0));
    }

    #[test]
    fn order_one_gamma_indexings() {
        let a = Alphabet::digits(2).unwrap();
        let psi = Potential::from_matrix(a, &[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let k = TransitionKernel::from_potential(&psi).unwrap();
        let g = k.gamma().unwrap();
        assert!((g.value(0) - (1.0 - 1.0 / 9.0)).abs() < 1e-12);
        assert!((g.value(1) - 7.0 / 8.0).abs() < 1e-12);
        assert_eq!(g.value(2), 0.0);
        let s = k.gamma_for(GammaIndexing::Shifted).unwrap().unwrap();
        assert!((s.value(0) - 7.0 / 8.0).abs() < 1e-12);
        assert_eq!(s.value(1), 0.0);
        // enumeration: min over a of min/max of column a = 0.1/0.8
        let e = k.enumerated_gamma().unwrap().unwrap();
        assert!((e.value(0) - 0.875).abs() < 1e-15);
        assert_eq!(e.value(1), 0.0);
    }

    #[test]
    fn enumerated_gamma_is_tightest() {
        let k = q();
        let e = k.gamma().unwrap();
        for m in 0..3 {
            let s = k.gamma_for(GammaIndexing::Enumerated).unwrap().unwrap();
            assert_eq!(s.value(m), e.value(m));
        }
    }

    #[test]
    fn rows_validated() {
        let a = Alphabet::digits(2).unwrap();
        assert!(TransitionKernel::from_matrix(a.clone(), &[vec![0.9, 0.2], vec![0.2, 0.8]]).is_err());
        let det = TransitionKernel::from_matrix(a, &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(det.gamma().is_none());
    }

    #[test]
    fn lift_matches_rows() {
        let k = q();
        let l = k.lift(3).unwrap();
        assert_eq!(&l[2 * 5..2 * 5 + 2], &[0.2, 0.8]);
        assert_eq!(&l[2 * 4..2 * 4 + 2], &[0.9, 0.1]);
    }

    #[test]
    fn infinite_memory_window() {
        let a = Alphabet::digits(2).unwrap();
        let f = PairFamily::ferromagnetic(&a, 1.0, Decay::Geometric { theta: 0.5 }, true).unwrap();
        let psi = Potential::from_family(a.clone(), f).unwrap();
        let k = TransitionKernel::from_potential(&psi).unwrap();
        assert!(k.memory_order().is_none() && k.depth() <= 64);
        let x = Context::parse(&a, "0011", Default::default()).unwrap();
        let exact = psi.evaluate(&x, 1).unwrap().value.exp();
        assert!((k.prob(1, &x).unwrap() - exact).abs() < 1e-11);
        assert!(k.gamma().is_some());
    }
}
