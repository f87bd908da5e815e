//! Generalized non-Markovian depolarizing channels and their
//! non-Markovianity diagnostics.
//!
//! The crate is organised bottom-up:
//!
//! - [`matcore`]: dense complex matrices, vectorization, the commutation
//!   matrix, Hermitian spectra, trace norm and guarded inversion.
//! - [`channels`]: Kraus families for qubits, `N`-level qudits (Weyl
//!   operators) and independent multiqubit noise.
//! - [`dynmaps`]: superoperators, intermediate maps `Φ(p,q)`, Choi matrices,
//!   crossover points and the NCP witness.
//! - [`measures`]: canonical decay rates, HCLA, trace distance / BLP and the
//!   quantum-memory witness.
//! - [`geometry`]: Bloch affine maps, accessible-state volume, the `F_N`
//!   matrix and parameter-space trajectories.

pub mod channels;
pub mod dynmaps;
pub mod error;
pub mod geometry;
pub mod matcore;
pub mod measures;
pub mod quadrature;

pub use error::{Error, Result};
pub use matcore::ComplexMatrix;
