//! Exact factor computations for automatic sequences and generalised
//! polynomials.
//!
//! - [`quadfield`]: exact arithmetic, sign and floor in `Q(sqrt(d))`.
//! - [`gpexpr`]: generalised-polynomial expressions (parse, print, evaluate),
//!   including Sturmian words.
//! - [`automatic`]: DFAO-defined k-automatic sequences, arithmetic
//!   subsequences, exact sequence equality, k-kernel collisions, factor
//!   enumeration.
//! - [`factordecide`]: the factor decision procedure for quadratic-phase
//!   sequences and common-factor searches.
//! - [`cli`]: the `gpfactors` command line.

pub mod automatic;
pub mod cli;
pub mod factordecide;
pub mod gpexpr;
pub mod quadfield;
pub mod words;

pub use automatic::{Dfao, FactorBound, KernelCollision};
pub use factordecide::{CommonFactorReport, QuadraticPhase};
pub use gpexpr::GpExpr;
pub use quadfield::{QuadExt, Radicand};
pub use words::{Symbol, SymbolSequence, Word};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] quadfield::FieldError),
    #[error(transparent)]
    Expr(#[from] gpexpr::GpError),
    #[error(transparent)]
    Automaton(#[from] automatic::AutomatonError),
    #[error(transparent)]
    Phase(#[from] factordecide::PhaseError),
    #[error(transparent)]
    Word(#[from] words::WordError),
    #[error("symbol {symbol} at position {pos} is not 0 or 1")]
    NonBinarySymbol { pos: usize, symbol: Symbol },
    #[error("automaton alphabet {0:?} is not a subset of {{0, 1}}")]
    AlphabetMismatch(Vec<Symbol>),
    #[error("need {needed} values but only {available} are available")]
    PrefixTooShort { needed: usize, available: usize },
}
