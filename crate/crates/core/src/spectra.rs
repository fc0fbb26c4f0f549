//! Exact dense eigendecomposition, spectral gaps, null-space dimensions,
//! and verification of the two-dimensional invariant blocks of the
//! amplified operator G.
//!
//! The dense symmetric eigensolver is the single source of truth for every
//! spectral claim in this workspace; everything upstream is sparse only for
//! assembly convenience.

use std::io::Write;

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::Serialize;

use crate::amplify::{self, AmplifiedOperator};
use crate::error::{CoreError, Result};
use crate::ffham::FFHamiltonian;

use crate::op::SparseSymOperator;

/// Default dense-diagonalization cap.
pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Options for [`eig_full`].
#[derive(Debug, Clone)]
pub struct EigOptions {
    /// Refuse to densify operators above this dimension.
    pub dense_cap: usize,
    /// Retain eigenvectors (needed for residuals, overlaps, block checks).
    pub with_vectors: bool,
    /// Override for the null-cluster tolerance; `None` selects
    /// `1e-9 * max(1, |lambda|_max)`.
    pub null_tol: Option<f64>,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self {
            dense_cap: DEFAULT_DENSE_CAP,
            with_vectors: true,
            null_tol: None,
        }
    }
}

impl EigOptions {
    pub fn values_only() -> Self {
        Self {
            with_vectors: false,
            ..Self::default()
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.dense_cap = cap;
        self
    }
}

/// Sorted eigendecomposition of a symmetric operator.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    eigenvalues: Vec<f64>,
    /// Columns are eigenvectors matching `eigenvalues` order.
    eigenvectors: Option<DMatrix<f64>>,
    null_tol: f64,
}

/// JSON-facing summary of a spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub dim: usize,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub null_dim: usize,
    pub gap_about_zero: Option<f64>,
    pub null_tol: f64,
}

impl SpectrumReport {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn null_tol(&self) -> f64 {
        self.null_tol
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// Eigenvector for index `j` (ascending eigenvalue order).
    pub fn eigenvector(&self, j: usize) -> Option<DVector<f64>> {
        self.eigenvectors.as_ref().map(|q| q.column(j).into_owned())
    }

    pub fn has_vectors(&self) -> bool {
        self.eigenvectors.is_some()
    }

    /// Count of eigenvalues with `|lambda| <= null_tol`.
    pub fn null_dim(&self) -> usize {
        self.count_near(0.0, self.null_tol)
    }

    fn count_near(&self, value: f64, tol: f64) -> usize {
        self.eigenvalues
            .iter()
            .filter(|&&l| (l - value).abs() <= tol)
            .count()
    }

    /// Smallest distance from `value` to an eigenvalue outside its own
    /// cluster (cluster radius = `null_tol`). Errors if `value` is not an
    /// eigenvalue to within 1e-9.
    pub fn gap_about(&self, value: f64) -> Result<f64> {
        let closest = self
            .eigenvalues
            .iter()
            .copied()
            .min_by(|a, b| {
                (a - value)
                    .abs()
                    .partial_cmp(&(b - value).abs())
                    .unwrap()
            })
            .unwrap();
        if (closest - value).abs() > f64::max(1e-9, self.null_tol) {
            return Err(CoreError::TargetNotInSpectrum {
                target: value,
                closest,
            });
        }
        self.eigenvalues
            .iter()
            .filter(|&&l| (l - value).abs() > self.null_tol)
            .map(|&l| (l - value).abs())
            .fold(None, |acc: Option<f64>, d| {
                Some(acc.map_or(d, |a| a.min(d)))
            })
            .ok_or(CoreError::TargetNotInSpectrum {
                target: value,
                closest,
            })
    }

    pub fn summary(&self) -> SpectrumSummary {
        SpectrumSummary {
            dim: self.dim(),
            min_eigenvalue: self.min_eigenvalue(),
            max_eigenvalue: self.max_eigenvalue(),
            null_dim: self.null_dim(),
            gap_about_zero: self.gap_about(0.0).ok(),
            null_tol: self.null_tol,
        }
    }

    /// CSV form: `index,eigenvalue` per line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,eigenvalue")?;
        for (i, l) in self.eigenvalues.iter().enumerate() {
            writeln!(w, "{},{}", i, l)?;
        }
        Ok(())
    }
}

/// Full symmetric eigendecomposition with deterministic ascending order.
pub fn eig_full(op: &SparseSymOperator, opts: &EigOptions) -> Result<SpectrumReport> {
    if op.dim() > opts.dense_cap {
        return Err(CoreError::DenseCapExceeded {
            dim: op.dim(),
            cap: opts.dense_cap,
        });
    }
    let dense = op.to_dense();
    let (mut eigenvalues, eigenvectors) = if opts.with_vectors {
        let se = dense.symmetric_eigen();
        (
            se.eigenvalues.iter().copied().collect::<Vec<_>>(),
            Some(se.eigenvectors),
        )
    } else {
        (
            dense.symmetric_eigenvalues().iter().copied().collect(),
            None,
        )
    };

    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eigenvalues[a].partial_cmp(&eigenvalues[b]).unwrap());
    eigenvalues = order.iter().map(|&i| eigenvalues[i]).collect();
    let eigenvectors = eigenvectors.map(|q| {
        let mut sorted = DMatrix::zeros(q.nrows(), q.ncols());
        for (dst, &src) in order.iter().enumerate() {
            let mut col = q.column(src).into_owned();
            // Deterministic sign: largest-magnitude component positive.
            let lead = col.iter().cloned().fold(0.0f64, |acc, v| {
                if v.abs() > acc.abs() {
                    v
                } else {
                    acc
                }
            });
            if lead < 0.0 {
                col.neg_mut();
            }
            sorted.set_column(dst, &col);
        }
        sorted
    });

    let scale = eigenvalues
        .iter()
        .fold(0.0f64, |a, &l| a.max(l.abs()))
        .max(1.0);
    let null_tol = opts.null_tol.unwrap_or(1e-9 * scale);
    Ok(SpectrumReport {
        eigenvalues,
        eigenvectors,
        null_tol,
    })
}

/// Count of eigenvalues with `|lambda| <= tol`.
pub fn null_space_dim(op: &SparseSymOperator, tol: f64) -> Result<usize> {
    let report = eig_full(
        op,
        &EigOptions {
            with_vectors: false,
            null_tol: Some(tol),
            ..Default::default()
        },
    )?;
    Ok(report.null_dim())
}

/// Free-function form of [`SpectrumReport::gap_about`].
pub fn spectral_gap(report: &SpectrumReport, target: f64) -> Result<f64> {
    report.gap_about(target)
}

/// Result of projecting G onto one invariant two-dimensional subspace.
#[derive(Debug, Clone)]
pub struct BlockReport {
    /// Eigenvalue of the projector-sum Hamiltonian the block belongs to.
    pub lambda: f64,
    /// cos(alpha) = 1 - 2*lambda/L_eff.
    pub gamma: f64,
    pub sin_alpha: f64,
    /// Measured 2x2 matrix of G in the basis `{psi x |o>, perp}`.
    pub block: Matrix2<f64>,
    /// Analytic form `[[-s^2, s c], [s c, s^2]]`.
    pub analytic: Matrix2<f64>,
    /// Max-entry deviation between the two.
    pub max_dev: f64,
    /// Norm of the component of G * (basis) leaking outside the subspace.
    pub leakage: f64,
}

/// Project G onto the invariant subspace spanned by `{psi_j x |o>, U psi_j x |o>}`
/// and compare with the closed rotation-block form.
///
/// `j` indexes the ascending eigenpairs of the projector-sum Hamiltonian
/// (the operator the amplification engine acts on; see
/// [`FFHamiltonian::skeleton`]). Errors when `lambda_j` sits in the null
/// cluster, where the subspace degenerates to one dimension.
pub fn verify_block(
    ham: &FFHamiltonian,
    g: &AmplifiedOperator,
    j: usize,
) -> Result<BlockReport> {
    let skeleton = ham.skeleton();
    let report = eig_full(&skeleton, &EigOptions::default())?;
    let u = amplify::build_u_padded(ham, g.padded())?;
    verify_block_with(&report, &u, g, j)
}

/// [`verify_block`] with the skeleton decomposition and the reflection
/// operator precomputed, for sweeps over many block indices.
pub fn verify_block_with(
    report: &SpectrumReport,
    u: &SparseSymOperator,
    g: &AmplifiedOperator,
    j: usize,
) -> Result<BlockReport> {
    let lambda = report.eigenvalues()[j];
    if lambda.abs() <= report.null_tol() {
        return Err(CoreError::NullEigenvalueBlock { index: j });
    }
    let psi = report.eigenvector(j).expect("vectors requested");

    let l_eff = g.l_eff() as f64;
    let gamma = 1.0 - 2.0 * lambda / l_eff;
    let sin_alpha = (1.0 - gamma * gamma).max(0.0).sqrt();
    // gamma = -1 collapses the subspace to one dimension as well (U merely
    // flips the embedded state); padding exists to rule this out.
    if sin_alpha <= 1e-7 {
        return Err(CoreError::NullEigenvalueBlock { index: j });
    }

    let v1 = amplify::embed_with_uniform_ancilla(&psi, g.ancilla_dim());
    let w = u.matvec(&v1);
    // Gram-Schmidt against v1.
    let overlap = v1.dot(&w);
    let mut perp = &w - &v1 * overlap;
    let norm = perp.norm();
    perp /= norm;

    let gv1 = g.operator().matvec(&v1);
    let gperp = g.operator().matvec(&perp);
    let block = Matrix2::new(
        v1.dot(&gv1),
        v1.dot(&gperp),
        perp.dot(&gv1),
        perp.dot(&gperp),
    );
    let analytic = Matrix2::new(
        -sin_alpha * sin_alpha,
        sin_alpha * gamma,
        sin_alpha * gamma,
        sin_alpha * sin_alpha,
    );
    let max_dev = (block - analytic).abs().max();

    let leak1 = (&gv1 - (&v1 * block[(0, 0)] + &perp * block[(1, 0)])).norm();
    let leak2 = (&gperp - (&v1 * block[(0, 1)] + &perp * block[(1, 1)])).norm();

    Ok(BlockReport {
        lambda,
        gamma,
        sin_alpha,
        block,
        analytic,
        max_dev,
        leakage: leak1.max(leak2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diag_spectrum_and_null_dim() {
        let a = SparseSymOperator::from_triplets(2, [(1, 1, 1.0)]).unwrap();
        let r = eig_full(&a, &EigOptions::default()).unwrap();
        assert_eq!(r.eigenvalues(), &[0.0, 1.0]);
        assert_eq!(r.null_dim(), 1);
        assert_eq!(r.gap_about(0.0).unwrap(), 1.0);
    }

    #[test]
    fn rank1_projector_spectrum() {
        // (1/2) [[1,1],[1,1]] has eigenvalues {0, 1}.
        let a = SparseSymOperator::from_triplets(
            2,
            [(0, 0, 0.5), (0, 1, 0.5), (1, 0, 0.5), (1, 1, 0.5)],
        )
        .unwrap();
        let r = eig_full(&a, &EigOptions::default()).unwrap();
        assert!((r.eigenvalues()[0]).abs() < 1e-12);
        assert!((r.eigenvalues()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cluster_aware_gap() {
        let a = SparseSymOperator::from_triplets(3, [(2, 2, 5.0)]).unwrap();
        let r = eig_full(&a, &EigOptions::default()).unwrap();
        assert_eq!(r.null_dim(), 2);
        assert_eq!(r.gap_about(0.0).unwrap(), 5.0);
    }

    #[test]
    fn gap_about_rejects_non_eigenvalue() {
        let a = SparseSymOperator::identity(2);
        let r = eig_full(&a, &EigOptions::default()).unwrap();
        assert!(matches!(
            r.gap_about(0.5),
            Err(CoreError::TargetNotInSpectrum { .. })
        ));
    }

    #[test]
    fn reconstruction_residual_small() {
        let a = SparseSymOperator::from_triplets(
            3,
            [
                (0, 0, 2.0),
                (0, 1, -1.0),
                (1, 0, -1.0),
                (1, 1, 2.0),
                (1, 2, -1.0),
                (2, 1, -1.0),
                (2, 2, 2.0),
            ],
        )
        .unwrap();
        let r = eig_full(&a, &EigOptions::default()).unwrap();
        let q = (0..3)
            .map(|j| r.eigenvector(j).unwrap())
            .collect::<Vec<_>>();
        let mut recon = DMatrix::<f64>::zeros(3, 3);
        for (j, v) in q.iter().enumerate() {
            recon += v * v.transpose() * r.eigenvalues()[j];
        }
        let resid = (recon - a.to_dense()).abs().max();
        assert!(resid < 1e-8, "residual {resid}");
    }

    #[test]
    fn dense_cap_enforced() {
        let a = SparseSymOperator::zeros(10);
        let opts = EigOptions::default().with_cap(4);
        assert!(matches!(
            eig_full(&a, &opts),
            Err(CoreError::DenseCapExceeded { .. })
        ));
    }
}
