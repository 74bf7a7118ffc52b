//! Finite, budgeted computations on multidimensional subshifts.
//!
//! A subshift over a finite alphabet `Σ` in dimension `d` is the set of
//! colourings of `ℤ^d` avoiding a set of forbidden finite patterns.  This
//! crate works with *presentations* `⟨Σ | F⟩^d` of such subshifts, where the
//! forbidden set is finite or produced by a staged generator, and answers
//! (co-)language membership questions with explicit finite budgets.
//!
//! The main subsystems:
//!
//! * [`patterns`] — words on integer rectangles, containment, extension
//!   streams, and variable-bearing patterns.
//! * [`presentations`] — presentations, budgeted membership certificates,
//!   and the exact one-dimensional decision core.
//! * [`codes`] — block codes, factor-image certificates, slices and lifts,
//!   full restrictions, and finite determination.
//! * [`enumred`] — codings of words and finite sets, enumeration and
//!   1-enumeration operators, and reduction verification.
//! * [`oracle`] — the stacked oracle tiling that displays a subshift's
//!   language in typed periodic rows, and the combined two-alphabet oracle
//!   with implication coding.
//! * [`forcing`] — stagewise construction of existentially closed subshifts
//!   for consistent systems, with diagonalization and branch separation.
//! * [`fileio`] — the textual file formats shared by the library and the
//!   `shiftlab` command-line tool.

pub mod codes;
pub mod enumred;
pub mod fileio;
pub mod forcing;
pub mod oracle;
pub mod patterns;
pub mod presentations;
pub mod report;

pub use patterns::{Alphabet, Cell, Pattern, Rect, Symbol, VariablePattern};
pub use presentations::{Certificate, ForbiddenSource, Presentation, Verdict};

/// Errors produced by library operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("pattern does not fit in target rectangle")]
    DoesNotFit,
    #[error("unbound variable ?{0}")]
    UnboundVariable(u32),
    #[error("{0}")]
    Unsupported(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("search space too large: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
