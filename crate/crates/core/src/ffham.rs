//! Frustration-free Hamiltonians `H = sum_k a_k Pi_k` and the black-box
//! cost model.
//!
//! Each term is a projector (`Pi^2 = Pi`, symmetric) with a coefficient in
//! `[0, 1]`. An instance is frustration free when every null vector of the
//! assembled `H` is annihilated by every individual `Pi_k`; validation
//! measures exactly that.
//!
//! On disk an instance is a JSON manifest naming one triplet file per term:
//!
//! ```json
//! { "dimension": 4, "terms": [ { "coefficient": 1.0, "matrix_file": "ham_term0.triplets" } ] }
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::op::SparseSymOperator;
use crate::spectra::{self, EigOptions};

/// Max `|Pi^2 - Pi|` accepted at term construction.
pub const IDEMPOTENCY_TOL: f64 = 1e-10;
/// Default tolerance for the frustration-free annihilation check.
pub const ANNIHILATION_TOL: f64 = 1e-8;

/// One projector term `a_k Pi_k`.
#[derive(Debug, Clone)]
pub struct ProjectorTerm {
    matrix: SparseSymOperator,
    coefficient: f64,
}

impl ProjectorTerm {
    /// Validates symmetry (exact), idempotency (`<= 1e-10`), and the
    /// coefficient range.
    pub fn new(matrix: SparseSymOperator, coefficient: f64) -> Result<Self> {
        if let Some((row, col)) = matrix.asymmetry_witness() {
            return Err(CoreError::NotSymmetric { row, col });
        }
        if !(0.0..=1.0).contains(&coefficient) {
            return Err(CoreError::CoefficientRange { value: coefficient });
        }
        let residual = idempotency_residual(&matrix)?;
        if residual > IDEMPOTENCY_TOL {
            return Err(CoreError::NotIdempotent {
                residual,
                tol: IDEMPOTENCY_TOL,
            });
        }
        Ok(Self {
            matrix,
            coefficient,
        })
    }

    pub fn matrix(&self) -> &SparseSymOperator {
        &self.matrix
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// `max |Pi^2 - Pi|`.
pub fn idempotency_residual(matrix: &SparseSymOperator) -> Result<f64> {
    matrix.matmul(matrix)?.max_abs_diff(matrix)
}

/// Rank-1 projector `v v^T / |v|^2` with coefficient 1.
pub fn rank1_projector(v: &DVector<f64>) -> Result<ProjectorTerm> {
    let norm_sq = v.norm_squared();
    if norm_sq == 0.0 {
        return Err(CoreError::ZeroVector);
    }
    let dim = v.len();
    let mut triplets = Vec::new();
    for i in 0..dim {
        for j in i..dim {
            let val = v[i] * v[j] / norm_sq;
            if val != 0.0 {
                triplets.push((i, j, val));
                if i != j {
                    triplets.push((j, i, val));
                }
            }
        }
    }
    ProjectorTerm::new(SparseSymOperator::from_triplets(dim, triplets)?, 1.0)
}

/// Ordered list of projector terms over one N-dimensional space.
#[derive(Debug, Clone)]
pub struct FFHamiltonian {
    terms: Vec<ProjectorTerm>,
    dim: usize,
}

impl FFHamiltonian {
    pub fn new(terms: Vec<ProjectorTerm>) -> Result<Self> {
        let dim = terms.first().ok_or(CoreError::EmptyTerms)?.dim();
        for t in &terms {
            if t.dim() != dim {
                return Err(CoreError::DimensionMismatch {
                    left: dim,
                    right: t.dim(),
                });
            }
        }
        Ok(Self { terms, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of terms L.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[ProjectorTerm] {
        &self.terms
    }

    /// Weighted assembly `H = sum_k a_k Pi_k`.
    pub fn assemble(&self) -> SparseSymOperator {
        let mut h = SparseSymOperator::zeros(self.dim);
        for t in &self.terms {
            h = h
                .add_scaled(t.coefficient(), t.matrix())
                .expect("terms share dimension");
        }
        h
    }

    /// Uniform projector sum `sum_k Pi_k` — the operator the gap
    /// amplification engine acts on. It dominates the weighted assembly
    /// (coefficients are in [0,1]) and shares its null space on validated
    /// instances, so its spectral gap is at least the weighted one.
    pub fn skeleton(&self) -> SparseSymOperator {
        let mut h = SparseSymOperator::zeros(self.dim);
        for t in &self.terms {
            h = h.add_scaled(1.0, t.matrix()).expect("terms share dimension");
        }
        h
    }

    /// Per-term idempotency residuals plus the worst `|Pi_k psi|` over all
    /// null vectors `psi` of the assembled H. Failures are report entries,
    /// not errors.
    pub fn validate_frustration_free(&self, tol: f64) -> Result<ValidationReport> {
        let mut idempotency = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            idempotency.push(idempotency_residual(t.matrix())?);
        }

        let h = self.assemble();
        let report = spectra::eig_full(&h, &EigOptions::default())?;
        let null_dim = report.null_dim();
        let mut max_annihilation = 0.0f64;
        for j in 0..null_dim {
            let psi = report.eigenvector(j).expect("vectors requested");
            for t in &self.terms {
                max_annihilation = max_annihilation.max(t.matrix().matvec(&psi).norm());
            }
        }

        let passed = idempotency.iter().all(|&r| r <= tol) && max_annihilation <= tol;
        Ok(ValidationReport {
            idempotency_residuals: idempotency,
            null_dim,
            max_annihilation_residual: max_annihilation,
            tol,
            passed,
        })
    }

    /// Write `<name>.json` plus one `<name>_term<k>.triplets` per term
    /// under `dir`; returns the manifest path.
    pub fn save_manifest(&self, dir: &Path, name: &str) -> Result<PathBuf> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (k, t) in self.terms.iter().enumerate() {
            let file_name = format!("{name}_term{k}.triplets");
            let mut w = BufWriter::new(File::create(dir.join(&file_name))?);
            t.matrix().write_triplets(&mut w)?;
            terms.push(ManifestTerm {
                coefficient: t.coefficient(),
                matrix_file: file_name,
            });
        }
        let manifest = Manifest {
            dimension: self.dim,
            terms,
        };
        let path = dir.join(format!("{name}.json"));
        serde_json::to_writer_pretty(BufWriter::new(File::create(&path)?), &manifest)?;
        Ok(path)
    }

    /// Load from a manifest written by [`FFHamiltonian::save_manifest`];
    /// triplet paths resolve relative to the manifest location.
    pub fn load_manifest(path: &Path) -> Result<Self> {
        let manifest: Manifest = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let mut terms = Vec::with_capacity(manifest.terms.len());
        for t in &manifest.terms {
            let m = SparseSymOperator::read_triplets(BufReader::new(File::open(
                base.join(&t.matrix_file),
            )?))?;
            if m.dim() != manifest.dimension {
                return Err(CoreError::Manifest(format!(
                    "term file {} has dimension {}, manifest says {}",
                    t.matrix_file,
                    m.dim(),
                    manifest.dimension
                )));
            }
            terms.push(ProjectorTerm::new(m, t.coefficient)?);
        }
        Self::new(terms)
    }
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    dimension: usize,
    terms: Vec<ManifestTerm>,
}

#[derive(Serialize, Deserialize)]
struct ManifestTerm {
    coefficient: f64,
    matrix_file: String,
}

/// Outcome of [`FFHamiltonian::validate_frustration_free`].
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub idempotency_residuals: Vec<f64>,
    /// Dimension of the null space of the assembled H; 0 flags a vacuous
    /// pass (no null vectors to annihilate).
    pub null_dim: usize,
    pub max_annihilation_residual: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Counter of black-box invocations charged by evolution routines.
/// Confined to one evolution run; monotone within it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BlackBoxLedger {
    calls: u64,
}

impl BlackBoxLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(&mut self, n: u64) {
        self.calls += n;
    }

    pub fn count(&self) -> u64 {
        self.calls
    }
}

/// Configuration for the random frustration-free ensemble used by the
/// verification suites.
#[derive(Debug, Clone)]
pub struct RandomInstanceConfig {
    pub dim: usize,
    pub terms: usize,
    /// Dimension of the enforced common null space (>= 1).
    pub null_dim: usize,
    /// Highest projector rank to draw per term.
    pub max_rank: usize,
    /// Mix coefficients in [0.2, 1] instead of pinning them to 1.
    pub mixed_coefficients: bool,
}

/// Draw a frustration-free instance: every term is a projector built from
/// random orthonormal vectors inside the orthogonal complement of a shared
/// null subspace.
pub fn random_ff_instance<R: Rng>(cfg: &RandomInstanceConfig, rng: &mut R) -> Result<FFHamiltonian> {
    assert!(cfg.null_dim >= 1 && cfg.null_dim < cfg.dim);
    assert!(cfg.terms >= 1);
    let n = cfg.dim;
    let complement = n - cfg.null_dim;
    let max_rank = cfg.max_rank.clamp(1, complement);

    // Shared random orthonormal frame; the first `null_dim` columns span
    // the common null space, the rest its complement.
    let frame = random_orthonormal(n, rng);
    let comp_basis = frame.columns(cfg.null_dim, complement).into_owned();

    let mut terms = Vec::with_capacity(cfg.terms);
    for _ in 0..cfg.terms {
        let rank = rng.gen_range(1..=max_rank);
        // Fresh random rotation of the complement, then take `rank` columns.
        let rot = random_orthonormal(complement, rng);
        let v = &comp_basis * rot.columns(0, rank).into_owned();
        let mut triplets = Vec::new();
        for i in 0..n {
            for j in i..n {
                let mut val = 0.0;
                for r in 0..rank {
                    val += v[(i, r)] * v[(j, r)];
                }
                if val != 0.0 {
                    triplets.push((i, j, val));
                    if i != j {
                        triplets.push((j, i, val));
                    }
                }
            }
        }
        let coefficient = if cfg.mixed_coefficients && rng.gen_bool(0.5) {
            rng.gen_range(0.2..1.0)
        } else {
            1.0
        };
        terms.push(ProjectorTerm::new(
            SparseSymOperator::from_triplets(n, triplets)?,
            coefficient,
        )?);
    }
    FFHamiltonian::new(terms)
}

/// Random orthonormal matrix via QR of a Gaussian draw.
fn random_orthonormal<R: Rng>(n: usize, rng: &mut R) -> nalgebra::DMatrix<f64> {
    use rand::distributions::Distribution;
    let normal = rand::distributions::Uniform::new(-1.0, 1.0);
    loop {
        let g = nalgebra::DMatrix::from_fn(n, n, |_, _| normal.sample(rng));
        let qr = g.qr();
        let q = qr.q();
        // Re-draw in the (measure-zero) degenerate case.
        if q.column(n - 1).norm() > 0.5 {
            return q;
        }
    }
}
