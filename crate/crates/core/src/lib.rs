pub mod bose_hubbard;
pub mod fock;
pub mod gates;
pub mod hofstadter;
pub mod lattice;
pub mod meanfield;
pub mod numerics;
pub mod spinchain;
pub use numerics::{HermitianMatrix, StateVector};
