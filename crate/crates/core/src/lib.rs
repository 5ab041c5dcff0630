//! Submodular maximization on bounded integer lattices and on distributive
//! lattices given as the ideals of a finite poset.
//!
//! The crate contains the double greedy algorithm for the integer lattice and
//! its two randomized variants, the greedy algorithm under poset-matroid
//! constraints, the double greedy algorithm for DR-submodular functions on
//! distributive lattices, the reduction from densest k-subhypergraph to
//! knapsack-constrained maximization, exhaustive property checkers and
//! brute-force optima.

pub mod checks;
pub mod constraint;
pub mod dl;
pub mod error;
pub mod exact;
pub mod instance;
pub mod lattice;
pub mod numeric;
pub mod oracle;
pub mod reduction;
pub mod smbil;
pub mod trace;

pub use constraint::{Constraint, IndependenceOracle, KnapsackConstraint, PosetMatroid};
pub use error::{LatmaxError, Result};
pub use lattice::{
    enumerate_ideals, enumeration_limit, linear_extension, meet_join, Ideal, LatticePoint, LinearExtension, Point,
    Poset, TieBreak,
};
pub use numeric::{Comparison, TAU};
pub use oracle::{Domain, DrParams, ValueOracle};
