//! Contextual-subspace reduction of qubit Hamiltonians.
//!
//! The library splits a Hamiltonian into a classically solvable noncontextual
//! part and a contextual remainder, solves the noncontextual ground state by
//! brute force over a hidden-variable model, maps the resulting stabilizers to
//! single-qubit Z operators with Clifford rotations (plus an optional
//! unitary-partitioning stage built either as a sequence of rotations or as a
//! linear combination of Pauli words), and projects the rotated Hamiltonian
//! onto fewer qubits. A measurement planner partitions any Hamiltonian into
//! pairwise-anticommuting cliques and estimates the resulting shot savings.

pub mod contextuality;
pub mod eigen;
mod exec;
pub mod fixtures;
pub mod io;
pub mod measurement;
pub mod noncon;
pub mod partitioning;
pub mod pauli;
pub mod stabilizer;
pub mod statevec;

pub use pauli::{PauliError, PauliSum, PauliTerm, PauliWord, Phase};
