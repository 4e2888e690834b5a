//! Finite automata over digit alphabets `Σ_b`, read most-significant digit
//! first: deterministic automata with minimization and equivalence,
//! automata with output for characteristic words, and kernel exploration.

mod dfa;
mod dfao;
mod kernel;

use thiserror::Error;

pub use dfa::{Dfa, DfaTable, Equivalence, WordFamily};
pub use dfao::{dfao_from_dfa, Dfao, DfaoTable};
pub use kernel::{kernel_explore, KernelReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error("digit {digit} is not below base {base}")]
    DigitOutOfRange { digit: u32, base: u32 },
    #[error("alphabets differ: base {0} vs base {1}")]
    AlphabetMismatch(u32, u32),
    #[error("malformed automaton: {0}")]
    Malformed(String),
    #[error("kernel exploration needs {needed} terms, source has {available}")]
    SourceTooShort { needed: u64, available: u64 },
    #[error("minimization changed the language; witness {0:?}")]
    MinimizationUnsound(Vec<u32>),
}
