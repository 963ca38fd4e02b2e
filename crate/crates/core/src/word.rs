//! One-sided symbolic sequences.
//!
//! Two encodings are supported: eventually periodic words stored as a
//! canonical `preperiod · period^∞` pair, and words produced by the greedy
//! block generator in [`crate::irregular`], whose coordinates are computed on
//! demand up to a fixed cap.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::irregular::GeneratedWord;

/// Largest alphabet accepted anywhere in the crate (symbols print as `0-9a-z`).
pub const MAX_ALPHABET: u8 = 36;

/// Parses a symbol string such as `"011"` or `"0a3"` into symbol values.
pub fn parse_symbols(text: &str) -> Result<Vec<u8>> {
    text.chars()
        .map(|c| {
            c.to_digit(36)
                .map(|d| d as u8)
                .ok_or_else(|| LabError::InvalidPoint(format!("'{c}' is not a symbol (0-9, a-z)")))
        })
        .collect()
}

pub fn format_symbols(symbols: &[u8]) -> String {
    symbols
        .iter()
        .map(|&s| std::char::from_digit(s as u32, 36).unwrap_or('?'))
        .collect()
}

/// Eventually periodic word `preperiod · period^∞` in canonical form.
///
/// Canonical means the period block is primitive (not a power of a shorter
/// block) and the preperiod is as short as possible.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "WordRepr", into = "WordRepr")]
pub struct PeriodicWord {
    preperiod: Vec<u8>,
    period: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WordRepr {
    #[serde(default)]
    preperiod: String,
    period: String,
}

impl TryFrom<WordRepr> for PeriodicWord {
    type Error = LabError;

    fn try_from(repr: WordRepr) -> Result<Self> {
        PeriodicWord::new(
            parse_symbols(&repr.preperiod)?,
            parse_symbols(&repr.period)?,
        )
    }
}

impl From<PeriodicWord> for WordRepr {
    fn from(word: PeriodicWord) -> Self {
        WordRepr {
            preperiod: format_symbols(&word.preperiod),
            period: format_symbols(&word.period),
        }
    }
}

impl PeriodicWord {
    pub fn new(preperiod: Vec<u8>, period: Vec<u8>) -> Result<Self> {
        if period.is_empty() {
            return Err(LabError::InvalidPoint(
                "period block must be nonempty".into(),
            ));
        }
        if let Some(&s) = preperiod
            .iter()
            .chain(&period)
            .find(|&&s| s >= MAX_ALPHABET)
        {
            return Err(LabError::InvalidPoint(format!(
                "symbol {s} exceeds the largest alphabet"
            )));
        }
        let mut period = primitive_root(period);
        let mut preperiod = preperiod;
        while let Some(&last) = preperiod.last() {
            if last != *period.last().expect("nonempty period") {
                break;
            }
            preperiod.pop();
            period.rotate_right(1);
        }
        Ok(Self { preperiod, period })
    }

    /// The purely periodic word `block^∞`.
    pub fn periodic(block: Vec<u8>) -> Result<Self> {
        Self::new(Vec::new(), block)
    }

    /// Parses `"pre"`/`"period"` symbol strings.
    pub fn parse(preperiod: &str, period: &str) -> Result<Self> {
        Self::new(parse_symbols(preperiod)?, parse_symbols(period)?)
    }

    pub fn preperiod(&self) -> &[u8] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    #[inline]
    pub fn symbol(&self, i: usize) -> u8 {
        let pre = self.preperiod.len();
        if i < pre {
            self.preperiod[i]
        } else {
            self.period[(i - pre) % self.period.len()]
        }
    }

    pub fn shift(&self, n: usize) -> Self {
        let pre = self.preperiod.len();
        if n < pre {
            Self {
                preperiod: self.preperiod[n..].to_vec(),
                period: self.period.clone(),
            }
        } else {
            let mut period = self.period.clone();
            let r = (n - pre) % period.len();
            period.rotate_left(r);
            Self {
                preperiod: Vec::new(),
                period,
            }
        }
    }

    pub fn max_symbol(&self) -> u8 {
        self.preperiod
            .iter()
            .chain(&self.period)
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// Frequency of `symbol` along the period block, i.e. the limit of its
    /// running frequency along the word.
    pub fn frequency(&self, symbol: u8) -> f64 {
        let hits = self.period.iter().filter(|&&s| s == symbol).count();
        hits as f64 / self.period.len() as f64
    }

    pub fn is_purely_periodic(&self) -> bool {
        self.preperiod.is_empty()
    }
}

impl fmt::Debug for PeriodicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}({})^∞",
            format_symbols(&self.preperiod),
            format_symbols(&self.period)
        )
    }
}

impl fmt::Display for PeriodicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn primitive_root(block: Vec<u8>) -> Vec<u8> {
    let n = block.len();
    for p in 1..n {
        if n.is_multiple_of(p) && (p..n).all(|i| block[i] == block[i - p]) {
            return block[..p].to_vec();
        }
    }
    block
}

/// A point of a one-sided shift space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Word {
    Periodic(PeriodicWord),
    Generated(GeneratedWord),
}

impl Word {
    pub fn symbol(&self, i: usize) -> Result<u8> {
        match self {
            Word::Periodic(w) => Ok(w.symbol(i)),
            Word::Generated(g) => g.symbol(i),
        }
    }

    pub fn shift(&self, n: usize) -> Word {
        match self {
            Word::Periodic(w) => Word::Periodic(w.shift(n)),
            Word::Generated(g) => Word::Generated(g.shift(n)),
        }
    }

    /// First `len` symbols.
    pub fn prefix(&self, len: usize) -> Result<Vec<u8>> {
        match self {
            Word::Periodic(w) => Ok((0..len).map(|i| w.symbol(i)).collect()),
            Word::Generated(g) => g.prefix(len),
        }
    }

    /// Index of the first disagreement, if any within `limit` symbols.
    pub fn first_disagreement(&self, other: &Word, limit: usize) -> Result<Option<usize>> {
        for i in 0..limit {
            if self.symbol(i)? != other.symbol(i)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }
}

impl From<PeriodicWord> for Word {
    fn from(w: PeriodicWord) -> Self {
        Word::Periodic(w)
    }
}
