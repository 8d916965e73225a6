use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite ordered alphabet of single-character symbols.
///
/// The position of a symbol in the alphabet is its index; every other
/// type in the crate works with indices and only converts back to
/// characters for I/O.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Alphabet(Arc<[char]>);

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        if symbols.len() < 2 {
            return Err(Error::InvalidAlphabet(format!(
                "need at least two symbols, got {}",
                symbols.len()
            )));
        }
        for (i, c) in symbols.iter().enumerate() {
            if symbols[..i].contains(c) {
                return Err(Error::InvalidAlphabet(format!("duplicate symbol {c:?}")));
            }
            if c.is_whitespace() || *c == ',' {
                return Err(Error::InvalidAlphabet(format!("symbol {c:?} is reserved")));
            }
        }
        Ok(Alphabet(symbols.into()))
    }

    /// Alphabet `0, 1, ..., size-1` (size ≤ 10).
    pub fn digits(size: usize) -> Result<Self> {
        if size > 10 {
            return Err(Error::InvalidAlphabet(format!(
                "digit alphabet limited to 10 symbols, got {size}"
            )));
        }
        Self::new((0..size).map(|d| char::from_digit(d as u32, 10).unwrap()))
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn symbol(&self, index: usize) -> char {
        self.0[index]
    }

    pub fn index_of(&self, symbol: char) -> Result<usize> {
        self.0
            .iter()
            .position(|&c| c == symbol)
            .ok_or_else(|| Error::InvalidContext(format!("symbol {symbol:?} not in alphabet {self}")))
    }

    /// Parses a word written oldest-to-newest into symbol indices.
    pub fn parse_word(&self, word: &str) -> Result<Vec<usize>> {
        word.chars().map(|c| self.index_of(c)).collect()
    }

    pub fn format_word(&self, word: &[usize]) -> String {
        word.iter().map(|&i| self.symbol(i)).collect()
    }

    pub fn symbols(&self) -> &[char] {
        &self.0
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.0.iter() {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet({self})")
    }
}

impl Serialize for Alphabet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Alphabet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Alphabet::new(s.chars()).map_err(serde::de::Error::custom)
    }
}
