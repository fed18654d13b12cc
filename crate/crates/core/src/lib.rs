//! Ground-state energies of AB and AB2 NMR spin systems by the variational
//! quantum eigensolver.
//!
//! The pipeline runs from measured line positions to spin parameters
//! ([`nmr`]), to a Pauli-sum Hamiltonian ([`pauli`]), through a
//! parametrized circuit ([`ansatz`], [`statevector`]) minimized by a
//! classical optimizer ([`optimizer`], [`vqe`]). Every energy is checked
//! against exact diagonalization ([`oracle`]).
//!
//! All frequencies and energies are in Hz. Qubit 0 is the leftmost tensor
//! factor and the most significant bit of a basis index.

pub mod ansatz;
pub mod cli;
pub mod error;
pub mod nmr;
pub mod optimizer;
pub mod oracle;
pub mod pauli;
pub mod statevector;
pub mod vqe;

pub use error::{Error, Result};
