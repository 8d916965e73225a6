use crate::error::{Error, Result};
use crate::seq::{word_count, word_index, VariationSequence};

/// A function of the `depth` most recent symbols of a history, tabulated
/// over `A^depth` (oldest symbol most significant).
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderFunction {
    alphabet_size: usize,
    depth: usize,
    values: Vec<f64>,
}

impl CylinderFunction {
    pub fn new(alphabet_size: usize, depth: usize, values: Vec<f64>) -> Result<Self> {
        let n = word_count(alphabet_size, depth).ok_or_else(|| Error::InvalidArgument("depth too large".into()))?;
        if values.len() != n {
            return Err(Error::InvalidArgument(format!("depth {depth} needs {n} values, got {}", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("function values must be finite".into()));
        }
        Ok(CylinderFunction { alphabet_size, depth, values })
    }

    pub fn constant(alphabet_size: usize, c: f64) -> Self {
        CylinderFunction { alphabet_size, depth: 0, values: vec![c] }
    }

    /// `1{(x_{-L}, …, x_{-1}) = word}` with `L = word.len()`.
    pub fn indicator(alphabet_size: usize, word: &[usize]) -> Result<Self> {
        if word.iter().any(|s| *s >= alphabet_size) {
            return Err(Error::InvalidArgument("indicator word outside alphabet".into()));
        }
        let n = word_count(alphabet_size, word.len()).ok_or_else(|| Error::InvalidArgument("word too long".into()))?;
        let mut values = vec![0.0; n];
        values[word_index(word, alphabet_size)] = 1.0;
        Self::new(alphabet_size, word.len(), values)
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value on a window (oldest first) of at least `depth` symbols.
    pub fn eval(&self, window: &[usize]) -> f64 {
        self.values[word_index(&window[window.len() - self.depth..], self.alphabet_size)]
    }

    /// The same function tabulated over `A^depth`, `depth ≥ self.depth`.
    pub fn lift(&self, depth: usize) -> Vec<f64> {
        assert!(depth >= self.depth);
        let count = self.alphabet_size.pow(depth as u32);
        let m = self.values.len();
        (0..count).map(|u| self.values[u % m]).collect()
    }

    /// `var_m` over histories agreeing on their last `m` symbols; zero from
    /// `m = depth`.
    pub fn variations(&self) -> VariationSequence {
        let vars = (0..=self.depth)
            .map(|m| {
                let groups = self.alphabet_size.pow(m as u32);
                let mut lo = vec![f64::INFINITY; groups];
                let mut hi = vec![f64::NEG_INFINITY; groups];
                for (i, &v) in self.values.iter().enumerate() {
                    lo[i % groups] = lo[i % groups].min(v);
                    hi[i % groups] = hi[i % groups].max(v);
                }
                lo.iter().zip(&hi).map(|(l, h)| h - l).fold(0.0, f64::max)
            })
            .collect();
        VariationSequence::finite(vars).expect("variations of a table are nonincreasing")
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|v| *v == self.values[0])
    }
}
