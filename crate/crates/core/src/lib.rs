//! Asymptotic coin-position entanglement of two-dimensional discrete-time
//! quantum walks.
//!
//! The walker carries a two-qubit coin in the basis (LL, LR, RL, RR) and moves
//! on the square lattice. The long-time reduced coin density operator is
//! obtained by integrating spectral projectors of the one-step operator over
//! the Brillouin zone ([`asymptotics`]); a direct lattice evolution
//! ([`simulator`]) serves as an independent cross-check.

pub mod asymptotics;
pub mod cli;
pub mod coin;
pub mod config;
pub mod error;
pub mod kspace;
pub mod linalg;
pub mod simulator;
pub mod states;
pub mod validation;

pub use num_complex::Complex64 as C64;

pub use asymptotics::{
    additivity_check, asymptotic_entanglement, asymptotic_reduced_density, oned_closed_form_cpe,
    pointwise_p_matrix, uniform_limit_reduced_density, AsymptoticSolver, EntanglementReport,
    QuadratureSpec, ReducedDensity,
};
pub use coin::CoinOperator;
pub use error::{Error, Result};
pub use kspace::{build_uk, hadamard_closed_eigenvector, hadamard_closed_spectrum, WaveVector};
pub use linalg::{hermitian_eigen, unitary_eigen, von_neumann_entropy, ComplexMatrix, SpectralDecomposition};
pub use simulator::{entanglement_trajectory, LatticeState};
pub use states::{CoinState, PositionDistribution};
