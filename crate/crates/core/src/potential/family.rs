use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::{Alphabet, Tail, VariationSequence};

/// Decay profile `ϑ(m)` of a pair interaction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decay {
    /// `ϑ(m) = θ^m`.
    Geometric { theta: f64 },
    /// `ϑ(m) = (m + 1)^{-p}`.
    Polynomial { p: f64 },
}

impl Decay {
    pub(crate) fn profile(&self, m: usize) -> f64 {
        match *self {
            Decay::Geometric { theta } => theta.powf(m as f64),
            Decay::Polynomial { p } => (m as f64 + 1.0).powf(-p),
        }
    }

    fn tail(&self, c: f64) -> Tail {
        match *self {
            Decay::Geometric { theta } => Tail::Geometric { c, theta },
            Decay::Polynomial { p } => Tail::Polynomial { c, p, shift: 1.0 },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Decay::Geometric { .. } => "geometric",
            Decay::Polynomial { .. } => "polynomial",
        }
    }
}

/// Long-range pair interaction
/// `φ(xa) = u(a) + Σ_{j≥1} w_j J(a, x_{-j})`
/// with weights chosen so that `Σ_{j≥m} w_j · r_J = c·ϑ(m)`, where `r_J` is
/// the largest row range of `J`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairFamily {
    pub(crate) field: Vec<f64>,
    pub(crate) coupling: Vec<Vec<f64>>,
    pub(crate) c: f64,
    pub(crate) decay: Decay,
    pub(crate) locally_normalized: bool,
    row_range: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub(crate) struct FamilyParams {
    pub alphabet: Alphabet,
    pub c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub locally_normalized: bool,
}

impl PairFamily {
    pub fn new(
        alphabet: &Alphabet,
        field: Vec<f64>,
        coupling: Vec<Vec<f64>>,
        c: f64,
        decay: Decay,
        locally_normalized: bool,
    ) -> Result<Self> {
        let n = alphabet.size();
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if field.len() != n || coupling.len() != n || coupling.iter().any(|r| r.len() != n) {
            return bad(format!("field and coupling must be sized to the alphabet ({n})"));
        }
        if field.iter().chain(coupling.iter().flatten()).any(|v| !v.is_finite()) {
            return bad("field and coupling entries must be finite".into());
        }
        if !(c >= 0.0 && c.is_finite()) {
            return bad(format!("strength c = {c} must be finite and ≥ 0"));
        }
        match decay {
            Decay::Geometric { theta } if !(theta > 0.0 && theta < 1.0) => {
                return bad(format!("theta = {theta} must lie in (0, 1)"))
            }
            Decay::Polynomial { p } if !(p > 0.0 && p.is_finite()) => {
                return bad(format!("exponent p = {p} must be positive"))
            }
            _ => {}
        }
        let row_range = coupling.iter().map(|r| range(r)).fold(0.0, f64::max);
        if row_range == 0.0 && c > 0.0 {
            return bad("coupling rows are constant; the interaction has no memory".into());
        }
        Ok(PairFamily { field, coupling, c, decay, locally_normalized, row_range })
    }

    /// Ferromagnetic default: no field, `J(a, b) = 1{a = b}`.
    pub fn ferromagnetic(alphabet: &Alphabet, c: f64, decay: Decay, locally_normalized: bool) -> Result<Self> {
        let n = alphabet.size();
        let coupling = (0..n).map(|a| (0..n).map(|b| f64::from(u8::from(a == b))).collect()).collect();
        Self::new(alphabet, vec![0.0; n], coupling, c, decay, locally_normalized)
    }

    pub(crate) fn from_params(p: &FamilyParams, family: &str) -> Result<Self> {
        let decay = match family {
            "geometric" => Decay::Geometric {
                theta: p.theta.ok_or_else(|| Error::InvalidArgument("geometric family needs theta".into()))?,
            },
            "polynomial" => Decay::Polynomial {
                p: p.p.ok_or_else(|| Error::InvalidArgument("polynomial family needs p".into()))?,
            },
            other => return Err(Error::InvalidArgument(format!("unknown family {other:?}"))),
        };
        match (&p.field, &p.coupling) {
            (None, None) => Self::ferromagnetic(&p.alphabet, p.c, decay, p.locally_normalized),
            (field, coupling) => {
                let n = p.alphabet.size();
                let field = field.clone().unwrap_or_else(|| vec![0.0; n]);
                let coupling = coupling.clone().unwrap_or_else(|| {
                    (0..n).map(|a| (0..n).map(|b| f64::from(u8::from(a == b))).collect()).collect()
                });
                Self::new(&p.alphabet, field, coupling, p.c, decay, p.locally_normalized)
            }
        }
    }

    pub(crate) fn params(&self, alphabet: &Alphabet) -> FamilyParams {
        let (theta, p) = match self.decay {
            Decay::Geometric { theta } => (Some(theta), None),
            Decay::Polynomial { p } => (None, Some(p)),
        };
        FamilyParams {
            alphabet: alphabet.clone(),
            c: self.c,
            theta,
            p,
            field: Some(self.field.clone()),
            coupling: Some(self.coupling.clone()),
            locally_normalized: self.locally_normalized,
        }
    }

    /// `w_j`, the weight of the symbol at depth `j ≥ 1`.
    pub(crate) fn weight(&self, j: usize) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        self.c * (self.decay.profile(j) - self.decay.profile(j + 1)) / self.row_range
    }

    /// `Σ_{j > depth} w_j`.
    pub(crate) fn weight_tail(&self, depth: usize) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        self.c * self.decay.profile(depth + 1) / self.row_range
    }

    fn row_mid(&self, a: usize) -> f64 {
        let r = &self.coupling[a];
        let (lo, hi) = r.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        0.5 * (lo + hi)
    }

    /// Unnormalized value given an explicit window (oldest first) and, beyond
    /// it, either a padding symbol (exact) or the midpoint of `J(a, ·)`.
    pub(crate) fn raw_value(&self, window: &[usize], beyond: Option<usize>, a: usize) -> f64 {
        let len = window.len();
        let mut v = self.field[a];
        for (j, &s) in window.iter().rev().enumerate() {
            v += self.weight(j + 1) * self.coupling[a][s];
        }
        let far = match beyond {
            Some(pad) => self.coupling[a][pad],
            None => self.row_mid(a),
        };
        v + self.weight_tail(len) * far
    }

    pub(crate) fn value(&self, window: &[usize], beyond: Option<usize>, a: usize) -> f64 {
        let raw = self.raw_value(window, beyond, a);
        if !self.locally_normalized {
            return raw;
        }
        let all: Vec<f64> = (0..self.field.len()).map(|b| self.raw_value(window, beyond, b)).collect();
        raw - log_sum_exp(&all)
    }

    /// Error radius of [`Self::value`] when the history beyond the window is
    /// unknown and replaced by the row midpoint.
    pub(crate) fn truncation_radius(&self, depth: usize) -> f64 {
        let half = 0.5 * self.weight_tail(depth) * self.row_range;
        if self.locally_normalized { 2.0 * half } else { half }
    }

    /// Certified variation bound: exact for the raw interaction when all rows
    /// of `J` have the same range, an upper bound otherwise.
    pub(crate) fn variations(&self) -> Result<VariationSequence> {
        let full_range = {
            let all: Vec<f64> = self.coupling.iter().flatten().copied().collect();
            range(&all)
        };
        let head = range(&self.field)
            + if self.c == 0.0 { 0.0 } else { self.c * self.decay.profile(1) * full_range / self.row_range };
        let head = head.max(self.c * self.decay.profile(1));
        let v = VariationSequence::new(vec![head], self.decay.tail(self.c))?;
        if self.locally_normalized {
            // ψ = φ − log Z(x): var_0 gains var_1(φ), var_m doubles for m ≥ 1.
            let t = self.decay.tail(2.0 * self.c);
            VariationSequence::new(vec![head + self.c * self.decay.profile(1)], t)
        } else {
            Ok(v)
        }
    }
}

fn range(v: &[f64]) -> f64 {
    let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
    if v.is_empty() { 0.0 } else { hi - lo }
}

pub(crate) fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}
