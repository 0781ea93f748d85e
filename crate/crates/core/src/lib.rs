//! Exact lattice and cone computations for K3 surfaces of Picard rank four
//! with finite automorphism group: (−2)-curves via Vinberg's algorithm,
//! effective and nef cones with their Hilbert bases, linear-system calculus,
//! and the degrees of Cox ring generators.

pub mod arith;
pub mod coxgen;
pub mod error;
pub mod lattice;
pub mod polyhedra;
pub mod report;
pub mod rrk3;
pub mod tables;
pub mod vinberg;

pub use error::{Error, Result};
pub use lattice::{catalog, pairing, solve_slice, LatticeClass, NSLattice, QuadraticSliceQuery};
