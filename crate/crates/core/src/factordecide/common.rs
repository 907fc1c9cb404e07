//! Common factors of an automatic sequence and a quadratic-phase sequence.

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::QuadraticPhase;
use crate::automatic::{Dfao, FactorBound};
use crate::words::{Symbol, SymbolSequence, Word};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub length: usize,
    pub words: Vec<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommonFactorReport {
    /// Common factors of each length `0..=longest`, sorted.
    pub levels: Vec<Level>,
    /// Common factors not contained in a longer common factor.
    pub maximal: Vec<Word>,
    pub longest: usize,
    /// True when the search stopped at an empty level, i.e. the list is complete
    /// up to the quality of the enumeration; false when `max_len` was reached.
    pub complete: bool,
    /// Whether the factor enumeration of the automatic side was certified.
    pub certified: bool,
    /// Candidate words handed to the decision procedure.
    pub decided: usize,
}

impl CommonFactorReport {
    fn from_levels(
        levels: Vec<BTreeSet<Word>>,
        complete: bool,
        certified: bool,
        decided: usize,
    ) -> Self {
        let longest = levels.len().saturating_sub(1);
        let mut maximal = Vec::new();
        for (l, words) in levels.iter().enumerate() {
            let longer = levels.get(l + 1);
            for w in words {
                let extended = longer.is_some_and(|next| {
                    next.iter()
                        .any(|v| &v.drop_first() == w || &v.drop_last() == w)
                });
                if !extended {
                    maximal.push(w.clone());
                }
            }
        }
        CommonFactorReport {
            levels: levels
                .into_iter()
                .enumerate()
                .map(|(length, words)| Level {
                    length,
                    words: words.into_iter().collect(),
                })
                .collect(),
            maximal,
            longest,
            complete,
            certified,
            decided,
        }
    }

    pub fn all_words(&self) -> impl Iterator<Item = &Word> {
        self.levels.iter().flat_map(|l| l.words.iter())
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.levels
            .get(w.len())
            .is_some_and(|l| l.words.binary_search(w).is_ok())
    }
}

/// All common factors of `x` and `phase` up to `max_len`, by filtering the
/// factors of `x` through [`QuadraticPhase::decide_factor`].
///
/// `bound` controls the enumeration of `x`; anything but
/// [`FactorBound::Certified`] yields a report with `certified = false`.
/// Stops at the first length without common factors.
pub fn common_factors(
    x: &Dfao,
    phase: &QuadraticPhase,
    max_len: usize,
    bound: FactorBound,
) -> Result<CommonFactorReport, Error> {
    let alphabet = x.alphabet();
    if alphabet.iter().any(|&s| s > 1) {
        return Err(Error::AlphabetMismatch(alphabet.into_iter().collect()));
    }
    let mut levels: Vec<BTreeSet<Word>> = Vec::new();
    let mut certified = true;
    let mut decided = 0;
    for len in 0..=max_len {
        let factors = x.enumerate_factors(len, bound)?;
        certified &= factors.certified;
        // factor sets are closed under subwords, so both one-shorter ends must
        // already be common factors
        let candidates: Vec<Word> = factors
            .words
            .into_iter()
            .filter(|w| {
                len == 0
                    || levels[len - 1].contains(&w.drop_last())
                        && levels[len - 1].contains(&w.drop_first())
            })
            .collect();
        decided += candidates.len();
        let accepted = candidates
            .into_par_iter()
            .map(|w| phase.decide_factor(&w).map(|d| d.accepted.then_some(w)))
            .collect::<Result<Vec<_>, _>>()?;
        let level: BTreeSet<Word> = accepted.into_iter().flatten().collect();
        if level.is_empty() {
            return Ok(CommonFactorReport::from_levels(
                levels, true, certified, decided,
            ));
        }
        levels.push(level);
    }
    Ok(CommonFactorReport::from_levels(
        levels, false, certified, decided,
    ))
}

/// Common windows of the first `prefix` values of two sequences; a lower
/// bound on the true common-factor set.
pub fn common_factors_brute(
    x: &(impl SymbolSequence + ?Sized),
    y: &(impl SymbolSequence + ?Sized),
    max_len: usize,
    prefix: usize,
) -> Result<CommonFactorReport, Error> {
    if prefix < max_len {
        return Err(Error::PrefixTooShort {
            needed: max_len,
            available: prefix,
        });
    }
    let xs = x.prefix(prefix)?;
    let ys = y.prefix(prefix)?;
    Ok(common_windows(&xs, &ys, max_len))
}

/// Window-set intersection of two explicit prefixes.
pub fn common_windows(xs: &[Symbol], ys: &[Symbol], max_len: usize) -> CommonFactorReport {
    let mut levels: Vec<BTreeSet<Word>> = vec![BTreeSet::from([Word::empty()])];
    for len in 1..=max_len {
        let left: HashSet<&[Symbol]> = xs.windows(len).collect();
        let shared: HashSet<&[Symbol]> = ys.windows(len).filter(|w| left.contains(w)).collect();
        if shared.is_empty() {
            return CommonFactorReport::from_levels(levels, true, false, 0);
        }
        levels.push(shared.into_iter().map(Word::from).collect());
    }
    CommonFactorReport::from_levels(levels, false, false, 0)
}
