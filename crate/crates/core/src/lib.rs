//! Truncated Fock-space simulation of engineered charge-conjugation
//! operators in trapped-ion and cavity systems.
//!
//! Conventions: `hbar = 1`, frequencies in s^-1. The computational basis is
//! ordered modes first, then qubits, little-endian (mode 0 is the fastest
//! digit). Qubit digit 0 is `|g>`, 1 is `|e>`, and `sz = |e><e| - |g><g|`.

pub mod error;
pub mod evolve;
pub mod hilbert;
pub mod hspec;
pub mod james;
pub mod linalg;
pub mod model;
pub mod scenario;
pub mod terms;
pub mod verify;

pub use error::{Error, Result};
pub use hilbert::{make_space, CMatrix, CVector, Operator, SpaceDescriptor, Subspace};
pub use scenario::{Scenario, Scheme};
pub use terms::{Term, TermList};
