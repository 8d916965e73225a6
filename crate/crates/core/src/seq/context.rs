use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::Alphabet;

/// Default cap returned by [`agreement_length`] for histories that agree
/// at every resolvable depth.
pub const DEFAULT_AGREEMENT_CAP: usize = 1 << 16;

/// How a finite word is continued into the infinite past.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Extension {
    /// Every symbol older than the word is this symbol index.
    Pad(usize),
    /// The word repeats periodically into the past.
    Periodic,
}

impl fmt::Display for Extension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extension::Pad(s) => write!(f, "pad:{s}"),
            Extension::Periodic => write!(f, "periodic"),
        }
    }
}

impl FromStr for Extension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "periodic" {
            return Ok(Extension::Periodic);
        }
        s.strip_prefix("pad:")
            .and_then(|i| i.parse().ok())
            .map(Extension::Pad)
            .ok_or_else(|| Error::InvalidContext(format!("bad extension rule {s:?}")))
    }
}

impl Default for Extension {
    fn default() -> Self {
        Extension::Pad(0)
    }
}

/// A finite word of most-recent symbols standing for a full history
/// `(x_j)_{j ≤ -1}`.
///
/// The word is stored oldest-to-newest, so `word.last()` is `x_{-1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Context {
    alphabet: Alphabet,
    word: Vec<usize>,
    extension: Extension,
}

impl Context {
    pub fn new(alphabet: Alphabet, word: Vec<usize>, extension: Extension) -> Result<Self> {
        if let Some(&bad) = word.iter().find(|&&s| s >= alphabet.size()) {
            return Err(Error::InvalidContext(format!(
                "symbol index {bad} outside alphabet of size {}",
                alphabet.size()
            )));
        }
        match extension {
            Extension::Pad(p) if p >= alphabet.size() => {
                return Err(Error::InvalidContext(format!(
                    "padding symbol {p} outside alphabet"
                )))
            }
            Extension::Periodic if word.is_empty() => {
                return Err(Error::InvalidContext(
                    "periodic extension needs a non-empty word".into(),
                ))
            }
            _ => {}
        }
        Ok(Context { alphabet, word, extension })
    }

    /// Parses a symbol string written oldest-to-newest.
    pub fn parse(alphabet: &Alphabet, word: &str, extension: Extension) -> Result<Self> {
        let w = alphabet.parse_word(word)?;
        Context::new(alphabet.clone(), w, extension)
    }

    /// The all-`symbol` history.
    pub fn constant(alphabet: &Alphabet, symbol: usize) -> Result<Self> {
        Context::new(alphabet.clone(), vec![symbol], Extension::Pad(symbol))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Symbol `x_{-depth}` (depth ≥ 1).
    pub fn symbol_at(&self, depth: usize) -> usize {
        debug_assert!(depth >= 1);
        let len = self.word.len();
        if depth <= len {
            return self.word[len - depth];
        }
        match self.extension {
            Extension::Pad(p) => p,
            Extension::Periodic => self.word[len - 1 - (depth - 1) % len],
        }
    }

    /// The `k` most recent symbols, oldest first.
    pub fn suffix(&self, k: usize) -> Vec<usize> {
        (1..=k).rev().map(|d| self.symbol_at(d)).collect()
    }

    /// Period of the history beyond the stored word.
    fn period(&self) -> usize {
        match self.extension {
            Extension::Pad(_) => 1,
            Extension::Periodic => self.word.len(),
        }
    }

    /// Depth beyond which the history is a single repeated symbol, if any.
    pub fn constant_beyond(&self) -> Option<(usize, usize)> {
        match self.extension {
            Extension::Pad(p) => Some((self.word.len(), p)),
            Extension::Periodic => None,
        }
    }

    pub fn to_symbol_string(&self) -> String {
        self.alphabet.format_word(&self.word)
    }
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Context({:?}, {})", self.to_symbol_string(), self.extension)
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_symbol_string())
    }
}

/// Serialized form: symbol string oldest-to-newest plus the extension rule.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ContextSpec {
    pub word: String,
    #[serde(default = "default_extension")]
    pub extension: String,
}

fn default_extension() -> String {
    "pad:0".into()
}

impl ContextSpec {
    pub fn resolve(&self, alphabet: &Alphabet) -> Result<Context> {
        Context::parse(alphabet, &self.word, self.extension.parse()?)
    }
}

impl From<&Context> for ContextSpec {
    fn from(c: &Context) -> Self {
        ContextSpec { word: c.to_symbol_string(), extension: c.extension.to_string() }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Largest `m` with `x_j = y_j` for all `-m ≤ j ≤ -1`, or `cap` when the
/// histories agree at every depth that their representations resolve.
pub fn agreement_length(x: &Context, y: &Context, cap: usize) -> Result<usize> {
    if x.alphabet != y.alphabet {
        return Err(Error::AlphabetMismatch(format!("{} vs {}", x.alphabet, y.alphabet)));
    }
    // Both histories are eventually periodic past max(len); comparing one
    // joint period beyond that decides agreement forever.
    let (px, py) = (x.period(), y.period());
    let resolvable = x.len().max(y.len()) + px / gcd(px, py) * py;
    let limit = resolvable.min(cap);
    for depth in 1..=limit {
        if x.symbol_at(depth) != y.symbol_at(depth) {
            return Ok(depth - 1);
        }
    }
    Ok(cap)
}
