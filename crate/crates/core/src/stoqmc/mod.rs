//! Stoquastic perturbed-search Hamiltonians, path-integral weights, and
//! Metropolis mixing experiments.

pub mod metropolis;
pub mod paths;
pub mod perturbed;

pub use metropolis::{chain_transition_matrix, metropolis_mix, MixStats};
pub use paths::{mixing_schedule, path_weights, projection_schedule, PathEnsemble, Schedule};
pub use perturbed::{
    build_perturbed, expander_perturbation, random_stoquastic, PerturbedSearchHam,
    VerificationReport,
};
