//! Exact computation and structural analysis of sets cut out by large-prime
//! residue constraints.

pub mod arith;
pub mod checkers;
pub mod constructions;
pub mod error;
pub mod format;
pub mod par;
pub mod real;
pub mod sieve;
pub mod structure;
pub mod subset_sums;
pub mod types;

pub use error::{CheckError, ConstructionError, SieveError, StructureError, SubsetSumError, TypeError};
pub use sieve::{intersect_ap_with_constraint, iterated_interval_localization, sieve_bruteforce, sieve_fast, SieveResult};
pub use types::{
    ConstraintFamily, GapDescription, GapGenerator, IntegerProgression, IntegerSet, ModProgression, ModQuadratic,
    PrimeModulus, ResidueConstraint, ResiduePart,
};
