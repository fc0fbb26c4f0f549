//! Numerical laboratory for spectral gap amplification of frustration-free
//! Hamiltonians: operator assembly, exact diagonalization oracles,
//! black-box Trotter simulation, expander-search instances, and stoquastic
//! path-integral Monte Carlo.

pub mod amplify;
pub mod error;
pub mod ffham;
pub mod op;
pub mod searchlab;
pub mod spectra;
pub mod stoqmc;
pub mod trotter;

pub use error::{CoreError, Result};
pub use ffham::{BlackBoxLedger, FFHamiltonian, ProjectorTerm};
pub use op::SparseSymOperator;
pub use spectra::{EigOptions, SpectrumReport};

// Downstream crates use the same matrix types; re-exported so they need no
// separate nalgebra pin.
pub use nalgebra;

use rand_chacha::rand_core::SeedableRng;

/// Deterministic per-task RNG stream.
pub fn rng_from_seed(seed: u64) -> rand_chacha::ChaCha12Rng {
    rand_chacha::ChaCha12Rng::seed_from_u64(seed)
}
