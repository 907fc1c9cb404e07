//! k-automatic sequences as deterministic finite automata with output (DFAO).
//!
//! Digits are read most-significant first and every automaton must satisfy
//! `transition(initial, 0) == initial`, so the value at `n` does not depend on
//! zero padding.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::words::{Symbol, SymbolSequence, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("base must be at least 2, got {0}")]
    BaseTooSmall(u32),
    #[error("automaton has no states")]
    NoStates,
    #[error("duplicate state name {0:?}")]
    DuplicateState(String),
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("state {state:?} has {found} transitions, expected {expected}")]
    TransitionCount {
        state: String,
        found: usize,
        expected: usize,
    },
    #[error("state {0:?} has no output symbol")]
    MissingOutput(String),
    #[error(
        "initial state {0:?} must map to itself on digit 0 (leading zeros would change values)"
    )]
    LeadingZero(String),
    #[error("automata use different bases {0} and {1}")]
    BaseMismatch(u32, u32),
    #[error("prefix length {prefix} is shorter than the factor length {len}")]
    PrefixTooShort { prefix: usize, len: usize },
    #[error("certified factor bounds are only known for the Thue-Morse sequence")]
    NotCertifiable,
    #[error("invalid automaton JSON: {0}")]
    Json(String),
}

/// Deterministic finite automaton with output, reading base-`k` digits
/// most-significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfao {
    base: u32,
    names: Vec<String>,
    initial: usize,
    /// `delta[state][digit]`
    delta: Vec<Vec<usize>>,
    outputs: Vec<Symbol>,
}

type Pair = (usize, usize);

/// On-disk JSON form of a [`Dfao`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfaoFile {
    pub k: u32,
    pub states: Vec<String>,
    pub initial: String,
    pub transitions: BTreeMap<String, Vec<String>>,
    pub outputs: BTreeMap<String, Symbol>,
}

impl Dfao {
    pub fn new(
        base: u32,
        names: Vec<String>,
        initial: usize,
        delta: Vec<Vec<usize>>,
        outputs: Vec<Symbol>,
    ) -> Result<Self, AutomatonError> {
        if base < 2 {
            return Err(AutomatonError::BaseTooSmall(base));
        }
        if names.is_empty() {
            return Err(AutomatonError::NoStates);
        }
        let n = names.len();
        let name = |i: usize| names.get(i).cloned().unwrap_or_else(|| format!("#{i}"));
        if initial >= n {
            return Err(AutomatonError::UnknownState(name(initial)));
        }
        if delta.len() != n {
            return Err(AutomatonError::TransitionCount {
                state: name(delta.len().min(n)),
                found: 0,
                expected: base as usize,
            });
        }
        for (q, row) in delta.iter().enumerate() {
            if row.len() != base as usize {
                return Err(AutomatonError::TransitionCount {
                    state: name(q),
                    found: row.len(),
                    expected: base as usize,
                });
            }
            if let Some(&bad) = row.iter().find(|&&t| t >= n) {
                return Err(AutomatonError::UnknownState(name(bad)));
            }
        }
        if outputs.len() != n {
            return Err(AutomatonError::MissingOutput(name(
                outputs.len().min(n - 1),
            )));
        }
        if delta[initial][0] != initial {
            return Err(AutomatonError::LeadingZero(name(initial)));
        }
        Ok(Dfao {
            base,
            names,
            initial,
            delta,
            outputs,
        })
    }

    /// The Thue-Morse sequence `t(n) = s_2(n) mod 2`.
    pub fn thue_morse() -> Self {
        Dfao::new(
            2,
            vec!["even".into(), "odd".into()],
            0,
            vec![vec![0, 1], vec![1, 0]],
            vec![0, 1],
        )
        .expect("thue-morse automaton is valid")
    }

    /// One-state automaton for the constant sequence.
    pub fn constant(base: u32, symbol: Symbol) -> Result<Self, AutomatonError> {
        Dfao::new(
            base,
            vec!["c".into()],
            0,
            vec![vec![0; base as usize]],
            vec![symbol],
        )
    }

    pub fn from_file(spec: &DfaoFile) -> Result<Self, AutomatonError> {
        let mut index = HashMap::new();
        for (i, s) in spec.states.iter().enumerate() {
            if index.insert(s.as_str(), i).is_some() {
                return Err(AutomatonError::DuplicateState(s.clone()));
            }
        }
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| AutomatonError::UnknownState(s.to_string()))
        };
        for s in spec.transitions.keys().chain(spec.outputs.keys()) {
            lookup(s)?;
        }
        let initial = lookup(&spec.initial)?;
        let mut delta = Vec::with_capacity(spec.states.len());
        let mut outputs = Vec::with_capacity(spec.states.len());
        for s in &spec.states {
            let row = spec
                .transitions
                .get(s)
                .ok_or(AutomatonError::TransitionCount {
                    state: s.clone(),
                    found: 0,
                    expected: spec.k as usize,
                })?;
            delta.push(
                row.iter()
                    .map(|t| lookup(t))
                    .collect::<Result<Vec<_>, _>>()?,
            );
            outputs.push(
                *spec
                    .outputs
                    .get(s)
                    .ok_or_else(|| AutomatonError::MissingOutput(s.clone()))?,
            );
        }
        Dfao::new(spec.k, spec.states.clone(), initial, delta, outputs)
    }

    pub fn from_json(text: &str) -> Result<Self, AutomatonError> {
        let spec: DfaoFile =
            serde_json::from_str(text).map_err(|e| AutomatonError::Json(e.to_string()))?;
        Dfao::from_file(&spec)
    }

    pub fn to_file(&self) -> DfaoFile {
        DfaoFile {
            k: self.base,
            states: self.names.clone(),
            initial: self.names[self.initial].clone(),
            transitions: self
                .names
                .iter()
                .zip(&self.delta)
                .map(|(s, row)| {
                    (
                        s.clone(),
                        row.iter().map(|&t| self.names[t].clone()).collect(),
                    )
                })
                .collect(),
            outputs: self
                .names
                .iter()
                .cloned()
                .zip(self.outputs.iter().copied())
                .collect(),
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    /// Output symbols of the states reachable from the initial state.
    pub fn alphabet(&self) -> BTreeSet<Symbol> {
        self.reachable()
            .into_iter()
            .map(|q| self.outputs[q])
            .collect()
    }

    fn reachable(&self) -> Vec<usize> {
        let mut seen = vec![false; self.num_states()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut i = 0;
        while i < order.len() {
            for &t in &self.delta[order[i]] {
                if !seen[t] {
                    seen[t] = true;
                    order.push(t);
                }
            }
            i += 1;
        }
        order
    }

    fn run_from(&self, state: usize, digits: impl IntoIterator<Item = u32>) -> usize {
        digits
            .into_iter()
            .fold(state, |q, d| self.delta[q][d as usize])
    }

    /// Value on an explicit most-significant-first digit string (zero padding allowed).
    pub fn eval_digits(&self, digits: &[u32]) -> Symbol {
        self.outputs[self.run_from(self.initial, digits.iter().copied())]
    }

    pub fn eval(&self, n: u64) -> Symbol {
        self.outputs[self.state_of(n)]
    }

    fn state_of(&self, n: u64) -> usize {
        self.run_from(self.initial, digits_msb(n, self.base))
    }

    /// Automaton for `n -> x(a*n + b)` in the same base.
    ///
    /// A state records, for every carry `c` in `0..=C` with `C = max(a - 1, b)`,
    /// the state of `self` after reading `a*P + c`, where `P` is the prefix of
    /// `n` read so far. Appending a digit `r` maps carry `c'` to the old entry
    /// for carry `(a*r + c') / k` followed by the digit `(a*r + c') % k`.
    pub fn subsequence(&self, a: u64, b: u64) -> Dfao {
        assert!(a >= 1, "subsequence step must be positive");
        let k = self.base as u64;
        let carries = (a - 1).max(b) as usize + 1;
        let start: Vec<usize> = (0..carries as u64).map(|c| self.state_of(c)).collect();

        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut states = vec![start.clone()];
        index.insert(start, 0);
        let mut delta: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let mut row = Vec::with_capacity(k as usize);
            for r in 0..k {
                let next: Vec<usize> = (0..carries as u64)
                    .map(|c| {
                        let v = a * r + c;
                        self.delta[states[i][(v / k) as usize]][(v % k) as usize]
                    })
                    .collect();
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = states.len();
                        index.insert(next.clone(), id);
                        states.push(next);
                        id
                    }
                };
                row.push(id);
            }
            delta.push(row);
            i += 1;
        }
        let outputs = states.iter().map(|v| self.outputs[v[b as usize]]).collect();
        let names = (0..states.len()).map(|i| format!("q{i}")).collect();
        Dfao::new(self.base, names, 0, delta, outputs)
            .expect("subsequence construction keeps the initial state fixed under 0")
    }

    /// Smallest `n` (among shortest digit strings) where the two sequences
    /// differ, or `None` if they are equal everywhere.
    pub fn first_difference(&self, other: &Dfao) -> Result<Option<BigUint>, AutomatonError> {
        if self.base != other.base {
            return Err(AutomatonError::BaseMismatch(self.base, other.base));
        }
        let start = (self.initial, other.initial);
        // pair -> (predecessor, digit)
        let mut parent: HashMap<Pair, Option<(Pair, u32)>> = HashMap::new();
        parent.insert(start, None);
        let mut queue = VecDeque::from([start]);
        while let Some(pair @ (p, q)) = queue.pop_front() {
            if self.outputs[p] != other.outputs[q] {
                let mut digits = Vec::new();
                let mut cur = pair;
                while let Some(Some((prev, d))) = parent.get(&cur) {
                    digits.push(*d);
                    cur = *prev;
                }
                let n = digits
                    .iter()
                    .rev()
                    .fold(BigUint::from(0u32), |acc, &d| acc * self.base + d);
                return Ok(Some(n));
            }
            for d in 0..self.base {
                let next = (self.delta[p][d as usize], other.delta[q][d as usize]);
                if let Entry::Vacant(slot) = parent.entry(next) {
                    slot.insert(Some((pair, d)));
                    queue.push_back(next);
                }
            }
        }
        Ok(None)
    }

    /// Exact equality of the two sequences over all `n >= 0`.
    pub fn sequences_equal(&self, other: &Dfao) -> Result<bool, AutomatonError> {
        Ok(self.first_difference(other)?.is_none())
    }

    /// Number of distinct sequences `n -> x(k^e n + s)` over all `e >= 0`, `0 <= s < k^e`.
    ///
    /// Each kernel element is `output . tau_w` restricted to the reachable
    /// states, where `tau_w` is the state map of the padded digit string of `s`.
    pub fn kernel_size(&self) -> usize {
        let reach = self.reachable();
        let identity: Vec<usize> = reach.clone();
        let mut seen_maps: HashMap<Vec<usize>, ()> = HashMap::new();
        let mut signatures: BTreeSet<Vec<Symbol>> = BTreeSet::new();
        let mut queue = VecDeque::from([identity.clone()]);
        seen_maps.insert(identity, ());
        while let Some(map) = queue.pop_front() {
            signatures.insert(map.iter().map(|&q| self.outputs[q]).collect());
            for d in 0..self.base as usize {
                let next: Vec<usize> = map.iter().map(|&q| self.delta[q][d]).collect();
                if !seen_maps.contains_key(&next) {
                    seen_maps.insert(next.clone(), ());
                    queue.push_back(next);
                }
            }
        }
        signatures.len()
    }

    /// The smallest `r` admitting `s < t < k^r` with `x(k^r n + s) = x(k^r n + t)`
    /// for every `n`; within it the smallest gap `t - s`, then the smallest `s`.
    pub fn kernel_collision(&self) -> KernelCollision {
        // pigeonhole: k^r > |kernel| forces two equal subsequences
        let kernel = self.kernel_size() as u64;
        let k = self.base as u64;
        let mut r = 1u32;
        loop {
            let kr = k
                .checked_pow(r)
                .expect("kernel collision search overflowed");
            let subs: Vec<Dfao> = (0..kr).map(|s| self.subsequence(kr, s)).collect();
            for gap in 1..kr {
                for s in 0..kr - gap {
                    let t = s + gap;
                    if subs[s as usize]
                        .sequences_equal(&subs[t as usize])
                        .expect("same base")
                    {
                        return KernelCollision { r, s, t };
                    }
                }
            }
            assert!(
                kr <= kernel,
                "no kernel collision at r = {r} although k^r exceeds the kernel size {kernel}"
            );
            r += 1;
        }
    }

    /// Windows `x(i..i+len)` for `0 <= i <= prefix - len`.
    pub fn factors_in_prefix(
        &self,
        len: usize,
        prefix: usize,
    ) -> Result<BTreeSet<Word>, AutomatonError> {
        if prefix < len {
            return Err(AutomatonError::PrefixTooShort { prefix, len });
        }
        let values: Vec<Symbol> = (0..prefix as u64).map(|n| self.eval(n)).collect();
        Ok(windows(&values, len))
    }

    /// Factor set of the given length under the chosen enumeration bound.
    pub fn enumerate_factors(
        &self,
        len: usize,
        bound: FactorBound,
    ) -> Result<FactorSet, AutomatonError> {
        match bound {
            FactorBound::Prefix(n) => Ok(FactorSet {
                words: self.factors_in_prefix(len, n)?,
                prefix: n,
                certified: false,
            }),
            FactorBound::Certified => {
                if !self.sequences_equal(&Dfao::thue_morse()).unwrap_or(false) {
                    return Err(AutomatonError::NotCertifiable);
                }
                let n = thue_morse_certified_prefix(len);
                Ok(FactorSet {
                    words: self.factors_in_prefix(len, n)?,
                    prefix: n,
                    certified: true,
                })
            }
            FactorBound::Doubling { start } => {
                let mut n = start.max(len).max(1);
                let mut words = self.factors_in_prefix(len, n)?;
                loop {
                    let next = self.factors_in_prefix(len, 2 * n)?;
                    n *= 2;
                    if next.len() == words.len() {
                        return Ok(FactorSet {
                            words: next,
                            prefix: n,
                            certified: false,
                        });
                    }
                    words = next;
                }
            }
        }
    }
}

impl SymbolSequence for Dfao {
    fn symbol_at(&self, n: u64) -> Result<Symbol, crate::Error> {
        Ok(self.eval(n))
    }
}

/// Collision `x(k^r n + s) = x(k^r n + t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelCollision {
    pub r: u32,
    pub s: u64,
    pub t: u64,
}

/// How far to scan when enumerating factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorBound {
    /// Scan the first `N` values.
    Prefix(usize),
    /// Thue-Morse only: every factor of length `<= 2^j + 1` starts before `9 * 2^(j-1)`.
    Certified,
    /// Double the prefix until the factor set survives one doubling. Not certified.
    Doubling { start: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorSet {
    pub words: BTreeSet<Word>,
    pub prefix: usize,
    pub certified: bool,
}

/// Prefix length that contains every Thue-Morse factor of length `len`.
pub fn thue_morse_certified_prefix(len: usize) -> usize {
    let mut j = 1u32;
    while len > (1usize << j) + 1 {
        j += 1;
    }
    9 * (1usize << (j - 1)) + len - 1
}

pub fn windows(values: &[Symbol], len: usize) -> BTreeSet<Word> {
    if len == 0 {
        return BTreeSet::from([Word::empty()]);
    }
    values.windows(len).map(Word::from).collect()
}

pub fn digits_msb(n: u64, base: u32) -> Vec<u32> {
    let mut digits = Vec::new();
    let mut n = n;
    while n > 0 {
        digits.push((n % base as u64) as u32);
        n /= base as u64;
    }
    digits.reverse();
    digits
}
