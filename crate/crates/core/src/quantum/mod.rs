//! Finite-frequency-ratio Lindblad dynamics on the truncated spin ⊗ Fock space.

pub mod banded;
pub mod density;
pub mod evolve;
pub mod liouvillian;
pub mod operators;
pub mod sparse;
pub mod spectrum;
pub mod steady;
pub mod wigner;

pub use density::DensityMatrix;
pub use liouvillian::{build_liouvillian, build_sector, Liouvillian, Sector};
pub use operators::{build_hamiltonian, TruncatedOperator};
pub use steady::{steady_state, SteadyState};
pub use wigner::{wigner, WignerGrid};
