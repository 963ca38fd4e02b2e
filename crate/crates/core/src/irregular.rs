//! Explicit construction of irregular points of the full shift.
//!
//! The generator alternates between copying two periodic target words. A
//! block ends as soon as the running frequency of the tracked symbol comes
//! within the current tolerance of the block's target frequency; after each
//! complete α→β cycle the tolerance index advances. Running averages of the
//! resulting word therefore swing between the two target frequencies with
//! shrinking slack, which is the signature of a point whose Birkhoff averages
//! do not converge.

use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::point::Point;
use crate::system::{SystemKind, SystemSpec};
use crate::word::{PeriodicWord, Word};

/// Tolerance sequence δ_k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Tolerance {
    /// δ_k = scale / (k + 1)
    Harmonic { scale: f64 },
    /// δ_k = value for every k
    Constant { value: f64 },
    /// Explicit values; the last one repeats.
    Explicit { values: Vec<f64> },
}

impl Tolerance {
    pub fn delta(&self, k: usize) -> f64 {
        match self {
            Tolerance::Harmonic { scale } => scale / (k as f64 + 1.0),
            Tolerance::Constant { value } => *value,
            Tolerance::Explicit { values } => values[k.min(values.len() - 1)],
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(LabError::Schedule(msg.to_string()));
        match self {
            Tolerance::Harmonic { scale } if !(scale.is_finite() && *scale > 0.0) => {
                bad("harmonic scale must be positive")
            }
            Tolerance::Constant { value } if !(value.is_finite() && *value > 0.0) => {
                bad("constant tolerance must be positive")
            }
            Tolerance::Explicit { values } => {
                if values.is_empty() {
                    return bad("explicit tolerance list is empty");
                }
                if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                    return bad("tolerances must be strictly positive");
                }
                if values.windows(2).any(|w| w[1] > w[0]) {
                    return bad("tolerances must be nonincreasing");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Targets, tolerance sequence and horizon cap for the greedy construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSchedule {
    pub alpha: PeriodicWord,
    pub beta: PeriodicWord,
    pub tolerance: Tolerance,
    pub cap: usize,
    /// Symbol whose running frequency is steered (the coordinate observable).
    #[serde(default = "default_tracked")]
    pub tracked: u8,
}

fn default_tracked() -> u8 {
    1
}

impl BlockSchedule {
    pub fn new(alpha: PeriodicWord, beta: PeriodicWord, tolerance: Tolerance, cap: usize) -> Self {
        Self {
            alpha,
            beta,
            tolerance,
            cap,
            tracked: 1,
        }
    }

    pub fn alpha_target(&self) -> f64 {
        self.alpha.frequency(self.tracked)
    }

    pub fn beta_target(&self) -> f64 {
        self.beta.frequency(self.tracked)
    }

    pub fn validate(&self, alphabet: u8) -> Result<()> {
        self.tolerance.validate()?;
        if self.cap < 2 {
            return Err(LabError::Schedule("horizon cap must be at least 2".into()));
        }
        if self.alpha.max_symbol() >= alphabet || self.beta.max_symbol() >= alphabet {
            return Err(LabError::Schedule(format!(
                "target words use symbols outside the alphabet of size {alphabet}"
            )));
        }
        if self.tracked >= alphabet {
            return Err(LabError::Schedule(
                "tracked symbol outside the alphabet".into(),
            ));
        }
        if self.alpha_target() == self.beta_target() {
            return Err(LabError::Schedule(
                "targets must have distinct frequencies".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Alpha,
    Beta,
}

#[derive(Debug)]
struct GreedyState {
    symbols: Vec<u8>,
    hits: u64,
    k: usize,
    phase: Phase,
    pos_in_block: usize,
    /// Indices at which a new block starts (the first block, at 0, excluded).
    switches: Vec<usize>,
}

impl GreedyState {
    fn new() -> Self {
        Self {
            symbols: Vec::new(),
            hits: 0,
            k: 0,
            phase: Phase::Alpha,
            pos_in_block: 0,
            switches: Vec::new(),
        }
    }

    fn extend_to(&mut self, schedule: &BlockSchedule, len: usize) {
        let (alpha_t, beta_t) = (schedule.alpha_target(), schedule.beta_target());
        while self.symbols.len() < len {
            let (word, target) = match self.phase {
                Phase::Alpha => (&schedule.alpha, alpha_t),
                Phase::Beta => (&schedule.beta, beta_t),
            };
            let s = word.symbol(self.pos_in_block);
            self.symbols.push(s);
            self.pos_in_block += 1;
            if s == schedule.tracked {
                self.hits += 1;
            }
            let freq = self.hits as f64 / self.symbols.len() as f64;
            if (freq - target).abs() <= schedule.tolerance.delta(self.k) {
                self.switches.push(self.symbols.len());
                self.pos_in_block = 0;
                self.phase = match self.phase {
                    Phase::Alpha => Phase::Beta,
                    Phase::Beta => {
                        self.k += 1;
                        Phase::Alpha
                    }
                };
            }
        }
    }
}

/// Shared, append-only memo of the generated prefix.
#[derive(Debug)]
struct Generator {
    schedule: BlockSchedule,
    state: RwLock<GreedyState>,
}

impl Generator {
    fn ensure(&self, len: usize) -> Result<()> {
        if len > self.schedule.cap {
            return Err(LabError::BeyondHorizon {
                index: len - 1,
                cap: self.schedule.cap,
            });
        }
        if self.state.read().expect("generator lock").symbols.len() >= len {
            return Ok(());
        }
        self.state
            .write()
            .expect("generator lock")
            .extend_to(&self.schedule, len);
        Ok(())
    }

    fn symbol(&self, i: usize) -> Result<u8> {
        self.ensure(i + 1)?;
        Ok(self.state.read().expect("generator lock").symbols[i])
    }
}

/// A word produced by the greedy block generator, viewed from `offset`.
///
/// Clones share the memoized prefix; concurrent readers always observe a
/// consistent prefix because the memo only ever grows.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "GeneratedRepr", into = "GeneratedRepr")]
pub struct GeneratedWord {
    source: Arc<Generator>,
    offset: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratedRepr {
    schedule: BlockSchedule,
    offset: usize,
}

impl TryFrom<GeneratedRepr> for GeneratedWord {
    type Error = LabError;

    fn try_from(repr: GeneratedRepr) -> Result<Self> {
        let alphabet = repr
            .schedule
            .alpha
            .max_symbol()
            .max(repr.schedule.beta.max_symbol())
            .max(repr.schedule.tracked)
            + 1;
        repr.schedule.validate(alphabet.max(2))?;
        Ok(GeneratedWord::new(repr.schedule).shift(repr.offset))
    }
}

impl From<GeneratedWord> for GeneratedRepr {
    fn from(word: GeneratedWord) -> Self {
        GeneratedRepr {
            schedule: word.source.schedule.clone(),
            offset: word.offset,
        }
    }
}

impl GeneratedWord {
    /// Lazily generated word; no symbol is computed until requested.
    pub fn new(schedule: BlockSchedule) -> Self {
        Self {
            source: Arc::new(Generator {
                schedule,
                state: RwLock::new(GreedyState::new()),
            }),
            offset: 0,
        }
    }

    pub fn schedule(&self) -> &BlockSchedule {
        &self.source.schedule
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    /// Number of coordinates available from this offset.
    pub fn available(&self) -> usize {
        self.source.schedule.cap.saturating_sub(self.offset)
    }

    pub fn symbol(&self, i: usize) -> Result<u8> {
        self.source.symbol(self.offset + i).map_err(|e| match e {
            LabError::BeyondHorizon { .. } => LabError::BeyondHorizon {
                index: i,
                cap: self.available(),
            },
            other => other,
        })
    }

    pub fn shift(&self, n: usize) -> Self {
        Self {
            source: Arc::clone(&self.source),
            offset: self.offset + n,
        }
    }

    pub fn prefix(&self, len: usize) -> Result<Vec<u8>> {
        if len > self.available() {
            return Err(LabError::BeyondHorizon {
                index: len.saturating_sub(1),
                cap: self.available(),
            });
        }
        self.source.ensure(self.offset + len)?;
        let state = self.source.state.read().expect("generator lock");
        Ok(state.symbols[self.offset..self.offset + len].to_vec())
    }

    /// Block start indices realized so far (relative to the unshifted word).
    pub fn switches(&self) -> Vec<usize> {
        self.source
            .state
            .read()
            .expect("generator lock")
            .switches
            .clone()
    }

    /// Number of symbols memoized so far.
    pub fn memoized(&self) -> usize {
        self.source
            .state
            .read()
            .expect("generator lock")
            .symbols
            .len()
    }
}

impl PartialEq for GeneratedWord {
    fn eq(&self, other: &Self) -> bool {
        self.offset == other.offset
            && (Arc::ptr_eq(&self.source, &other.source)
                || self.source.schedule == other.source.schedule)
    }
}

impl fmt::Debug for GeneratedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratedWord")
            .field("schedule", &self.source.schedule)
            .field("offset", &self.offset)
            .finish()
    }
}

/// Output of [`build_irregular_word`].
#[derive(Clone, Debug)]
pub struct IrregularWord {
    pub point: Point,
    pub word: GeneratedWord,
    /// Indices at which blocks switch, over the whole capped prefix.
    pub switches: Vec<usize>,
    pub alpha_target: f64,
    pub beta_target: f64,
    /// Tolerance in force during the last completed cycle.
    pub delta_last: f64,
    pub cycles_completed: usize,
}

/// Runs the greedy block construction up to the schedule's cap.
pub fn build_irregular_word(system: &SystemSpec, schedule: BlockSchedule) -> Result<IrregularWord> {
    let alphabet = match system.kind() {
        SystemKind::FullShift { alphabet } => *alphabet,
        other => {
            return Err(LabError::InvalidSystem(format!(
                "irregular words are built on the full shift, not {other:?}"
            )))
        }
    };
    schedule.validate(alphabet)?;
    let word = GeneratedWord::new(schedule);
    word.source.ensure(word.source.schedule.cap)?;
    let switches = word.switches();
    if switches.len() < 2 {
        return Err(LabError::HorizonTooShort(format!(
            "cap {} does not complete one α→β cycle",
            word.source.schedule.cap
        )));
    }
    let cycles_completed = switches.len() / 2;
    let schedule = word.schedule();
    Ok(IrregularWord {
        point: Point::Symbolic(Word::Generated(word.clone())),
        switches,
        alpha_target: schedule.alpha_target(),
        beta_target: schedule.beta_target(),
        delta_last: schedule.tolerance.delta(cycles_completed - 1),
        cycles_completed,
        word,
    })
}
