//! Finite words over small integer alphabets, and sequences that can be sampled
//! on a prefix.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Symbol = u8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("invalid symbol {ch:?} at position {pos}")]
    InvalidSymbol { pos: usize, ch: char },
}

/// A finite block of consecutive symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.0
    }

    /// Whether `self` occurs as a contiguous block of `other`.
    pub fn is_factor_of(&self, other: &Word) -> bool {
        if self.is_empty() {
            return true;
        }
        other.0.windows(self.len()).any(|w| w == self.0.as_slice())
    }

    /// Word without its first symbol.
    pub fn drop_first(&self) -> Word {
        Word(self.0.get(1..).unwrap_or(&[]).to_vec())
    }

    /// Word without its last symbol.
    pub fn drop_last(&self) -> Word {
        let n = self.0.len().saturating_sub(1);
        Word(self.0[..n].to_vec())
    }

    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|&s| s <= 1)
    }
}

impl From<&[Symbol]> for Word {
    fn from(s: &[Symbol]) -> Self {
        Word(s.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&s| s < 10) {
            for s in &self.0 {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

impl FromStr for Word {
    type Err = WordError;

    /// Parses a digit string (`0110`) or a comma-separated list (`0,12,3`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.contains(',') {
            let mut out = Vec::new();
            let mut pos = 0;
            for part in s.split(',') {
                let sym = part
                    .trim()
                    .parse::<Symbol>()
                    .map_err(|_| WordError::InvalidSymbol {
                        pos,
                        ch: part.trim().chars().next().unwrap_or(','),
                    })?;
                out.push(sym);
                pos += part.len() + 1;
            }
            return Ok(Word(out));
        }
        s.chars()
            .enumerate()
            .map(|(pos, ch)| {
                ch.to_digit(10)
                    .map(|d| d as Symbol)
                    .ok_or(WordError::InvalidSymbol { pos, ch })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A symbol-valued sequence indexed by `n >= 0`.
pub trait SymbolSequence: Sync {
    fn symbol_at(&self, n: u64) -> Result<Symbol, crate::Error>;

    /// Values at `0..len`, evaluated in parallel.
    fn prefix(&self, len: usize) -> Result<Vec<Symbol>, crate::Error> {
        use rayon::prelude::*;
        (0..len as u64)
            .into_par_iter()
            .map(|n| self.symbol_at(n))
            .collect()
    }
}

/// A sequence given by an explicit list of values (finite prefix).
impl SymbolSequence for [Symbol] {
    fn symbol_at(&self, n: u64) -> Result<Symbol, crate::Error> {
        self.get(n as usize)
            .copied()
            .ok_or(crate::Error::PrefixTooShort {
                needed: n as usize + 1,
                available: self.len(),
            })
    }

    fn prefix(&self, len: usize) -> Result<Vec<Symbol>, crate::Error> {
        if len > self.len() {
            return Err(crate::Error::PrefixTooShort {
                needed: len,
                available: self.len(),
            });
        }
        Ok(self[..len].to_vec())
    }
}
