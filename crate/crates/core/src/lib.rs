//! Exact p-adic valuation bounds for sums of harmonic numbers weighted by
//! powers of a prime, verified by computation.
//!
//! * [`arith`]: valuations, digit sums, Legendre's formula, harmonic numbers.
//! * [`series`]: truncated power series and the vanishing of `R_n`.
//! * [`theorem`]: the central sums `S(p, a, n)` and their valuation bound.
//! * [`sequence`]: the sequences `u_n`, `v_n`, `K_n` and the bit-count lemma.
//! * [`cli`], [`report`]: the command-line tool and its output formats.

pub mod arith;
pub mod cli;
pub mod error;
pub mod report;
pub mod sequence;
pub mod series;
pub mod theorem;

pub use arith::{BigRat, HarmonicTable, Prime, Valuation};
pub use error::{Error, Result};
