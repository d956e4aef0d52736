//! Exact computation and verification of f(S,k;r), the least `n` such that
//! every r-coloring of `[1, n]` contains a monochromatic k-term S-diffsequence.

pub mod chain;
pub mod coloring;
pub mod error;
pub mod formulas;
pub mod primechain;
pub mod primes;
pub mod sets;
pub mod solver;
pub mod table1;
pub mod witnesses;

pub use chain::{
    brute_force_longest, has_k_term, longest_mono_diffseq, ChainState, DiffseqWitness,
};
pub use coloring::Coloring;
pub use error::{Error, Result};
pub use sets::GapSet;
pub use solver::{compute_f, feasible, SearchBudget, SolveResult, SolveStatus};
