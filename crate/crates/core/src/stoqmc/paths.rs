//! Path-integral weights for the classical (diagonal) image of the
//! perturbed search Hamiltonian.
//!
//! A path configuration is `p` basis indices with periodic boundary; its
//! weight is the product of slice factors
//! `f(z, z') = <z| 1 - eta H |z'>` with `eta = beta / p`. Stoquasticity
//! keeps every factor non-negative, and the total weight over all
//! configurations equals `tr((1 - eta H)^p)`, the first-order image of
//! `tr(e^{-beta H})`.

use crate::error::{CoreError, Result};
use crate::op::SparseSymOperator;
use crate::spectra::{self, EigOptions};

use super::perturbed::PerturbedSearchHam;

/// Imaginary-time discretization parameters.
#[derive(Debug, Clone, Copy)]
pub struct Schedule {
    pub beta: f64,
    pub eta: f64,
    pub p: usize,
}

/// Ground-state-projection schedule: `beta = ceil(2 ln M)`,
/// `eta = 1/(4 beta)`, `p = ceil(beta/eta)` (positivity is automatic for
/// the zero-diagonal perturbations used here).
pub fn projection_schedule(m: usize) -> Schedule {
    let beta = (2.0 * (m as f64).ln()).ceil().max(1.0);
    let eta = 1.0 / (4.0 * beta);
    Schedule {
        beta,
        eta,
        p: (beta / eta).ceil() as usize,
    }
}

/// Mixing-measurement schedule: `eta = 1/4` held fixed across sizes so the
/// kink-creation cost of the chain is size-independent and the hitting
/// time isolates the search hardness; `p = ceil(beta/eta) = 4 beta` stays
/// polylogarithmic.
pub fn mixing_schedule(m: usize) -> Schedule {
    let beta = (2.0 * (m as f64).ln()).ceil().max(1.0);
    let eta = 0.25;
    Schedule {
        beta,
        eta,
        p: (beta / eta).ceil() as usize,
    }
}

/// The slice operator `1 - eta H` with cached rows, plus the path-weight
/// accessors built on it.
#[derive(Debug, Clone)]
pub struct PathEnsemble {
    dim: usize,
    beta: f64,
    eta: f64,
    p: usize,
    slice: SparseSymOperator,
}

/// Build the ensemble, validating that every slice entry is non-negative
/// (the first-order expansion stays a weight only while `eta` is small
/// enough for the diagonal).
pub fn path_weights(ham: &PerturbedSearchHam, beta: f64, p: usize) -> Result<PathEnsemble> {
    if p == 0 {
        return Err(CoreError::EmptyPath);
    }
    let eta = beta / p as f64;
    let m = ham.dim();
    let slice = SparseSymOperator::identity(m).add_scaled(-eta, ham.hamiltonian())?;
    for (i, j, v) in slice.iter() {
        if v < 0.0 {
            return Err(CoreError::NegativeSliceEntry {
                row: i,
                col: j,
                value: v,
            });
        }
    }
    Ok(PathEnsemble {
        dim: m,
        beta,
        eta,
        p,
        slice,
    })
}

impl PathEnsemble {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn slices(&self) -> usize {
        self.p
    }

    pub fn slice_operator(&self) -> &SparseSymOperator {
        &self.slice
    }

    /// One slice factor `f(z, z')`.
    pub fn factor(&self, z: usize, z_next: usize) -> f64 {
        self.slice.get(z, z_next)
    }

    /// Row support of the slice operator at `z` (candidates reachable in
    /// one slice step, including `z` itself through the diagonal).
    pub fn neighbors(&self, z: usize) -> &[(usize, f64)] {
        self.slice.row(z)
    }

    /// Product of slice factors around the periodic path.
    pub fn weight(&self, z: &[usize]) -> f64 {
        assert_eq!(z.len(), self.p);
        let mut w = 1.0;
        for r in 0..self.p {
            w *= self.factor(z[r], z[(r + 1) % self.p]);
        }
        w
    }

    /// `tr((1 - eta H)^p)` through the eigenvalues of the slice operator;
    /// equals the total weight over all `M^p` configurations.
    pub fn transfer_trace(&self) -> Result<f64> {
        let report = spectra::eig_full(&self.slice, &EigOptions::values_only())?;
        Ok(report
            .eigenvalues()
            .iter()
            .map(|&mu| mu.powi(self.p as i32))
            .sum())
    }

    /// Diagonal of `(1 - eta H)^p`: the unnormalized single-slice
    /// marginal over configurations.
    pub fn marginal_diagonal(&self) -> Result<Vec<f64>> {
        let report = spectra::eig_full(&self.slice, &EigOptions::default())?;
        let mut diag = vec![0.0; self.dim];
        for (j, &mu) in report.eigenvalues().iter().enumerate() {
            let v = report.eigenvector(j).expect("vectors requested");
            let mp = mu.powi(self.p as i32);
            for (y, d) in diag.iter_mut().enumerate() {
                *d += mp * v[y] * v[y];
            }
        }
        Ok(diag)
    }

    /// Brute-force total weight by enumerating all `M^p` configurations;
    /// only for oracle checks at tiny sizes.
    pub fn enumerate_total(&self) -> f64 {
        assert!(
            (self.dim as f64).powi(self.p as i32) <= 2e7,
            "enumeration oracle is for tiny cases only"
        );
        let mut total = 0.0;
        let mut z = vec![0usize; self.p];
        loop {
            total += self.weight(&z);
            let mut r = 0;
            loop {
                z[r] += 1;
                if z[r] < self.dim {
                    break;
                }
                z[r] = 0;
                r += 1;
                if r == self.p {
                    return total;
                }
            }
        }
    }
}
