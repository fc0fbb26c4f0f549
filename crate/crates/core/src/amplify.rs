//! Gap-amplified operators built from a frustration-free input.
//!
//! The engine attaches an ancilla register to the system and produces, for
//! `H = sum_k a_k Pi_k` with projector sum `Hs = sum_k Pi_k`:
//!
//! - `X  = sum_k Pi_k x |k><k|`, idempotent;
//! - `U  = 1 - 2X`, a self-inverse reflection (one black box per use);
//! - `G  = U P U - P`, with `P = 1 x |o><o|` and `|o>` the uniform ancilla
//!   state — its nonzero spectrum is `{±sin(alpha_j)}` with
//!   `cos(alpha_j) = 1 - 2 lambda_j / L_eff` over the eigenvalues
//!   `lambda_j` of `Hs`;
//! - `H' = L_eff G + delta (1 - P)`, `delta = sqrt(gap_bound * L_eff)`,
//!   which keeps the null space of `Hs` and pushes every other eigenvalue
//!   to magnitude at least `(1/6) sqrt(lambda_j L_eff)`;
//! - `Gt = sum_k sqrt(a_k) Pi_k x (|k><0| + |0><k|)` on a flag-plus-term
//!   ancilla, with nonzero spectrum `{±sqrt(lambda_j)}` over the weighted
//!   eigenvalues;
//! - `Gb = Gt + (sqrt(gap_bound)/2) (1 x (1 - |0><0|))`, the penalized
//!   single-particle form;
//! - a local qubit Hamiltonian on `L+1` ancilla qubits whose
//!   single-particle block reproduces `Gb / L^(1/d)`.
//!
//! The amplification engine always acts on the projector sum `Hs`: it
//! dominates the weighted assembly entrywise as a quadratic form and shares
//! its null space on validated instances, so every gap bound stated against
//! the weighted gap holds a fortiori. `Gt`/`Gb`/the local form carry the
//! weights explicitly through `sqrt(a_k)` factors.
//!
//! Padding (`padded = true`, the default choice in experiment drivers)
//! doubles the ancilla register with empty slots so that
//! `cos(alpha_j) = 1 - lambda_j / L >= 0` always holds.
//!
//! Qubit convention for the local form: basis order `(|empty>, |occupied>)`
//! per ancilla qubit, `sigma_z = diag(+1, -1)` (so `sigma_z` is `+1` on
//! empty), `sigma_plus = |occupied><empty|` creates a particle, and every
//! operator is assembled as a real matrix in the occupation basis.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::ffham::FFHamiltonian;
use crate::op::SparseSymOperator;
use crate::spectra::{self, EigOptions};

/// Kronecker assembly refuses to build operators above this total dimension.
pub const KRON_ASSEMBLY_CAP: usize = 1 << 14;

/// Human-readable record of the qubit convention, embedded in serialized
/// headers so downstream tools agree on basis order.
pub const SPIN_CONVENTION: &str =
    "basis (|empty>,|occupied>); sigma_z = diag(+1,-1); sigma_plus = |occupied><empty|";

/// Which amplified construction an operator came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    G,
    Hprime,
    Gtilde,
    Gbar,
    LocalHprime,
}

impl Flavor {
    pub fn name(&self) -> &'static str {
        match self {
            Flavor::G => "G",
            Flavor::Hprime => "Hprime",
            Flavor::Gtilde => "Gtilde",
            Flavor::Gbar => "Gbar",
            Flavor::LocalHprime => "LocalHprime",
        }
    }
}

/// An operator on `system x ancilla` produced by one of the builders.
#[derive(Debug, Clone)]
pub struct AmplifiedOperator {
    operator: SparseSymOperator,
    flavor: Flavor,
    base_dim: usize,
    ancilla_dim: usize,
    /// Penalty scale: `sqrt(gap_bound * L_eff)` for `Hprime`,
    /// `sqrt(gap_bound)/2` for `Gbar`/`LocalHprime`, 0 when unused.
    delta: f64,
    padded: bool,
    /// Number of projector terms L in the input.
    n_terms: usize,
    /// Exponent d of the `1/L^(1/d)` prefactor (local form only).
    d_exponent: Option<f64>,
}

impl AmplifiedOperator {
    pub fn operator(&self) -> &SparseSymOperator {
        &self.operator
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn padded(&self) -> bool {
        self.padded
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn d_exponent(&self) -> Option<f64> {
        self.d_exponent
    }

    /// Effective term count `L_eff` (ancilla slots) for the `G`/`Hprime`
    /// constructions: L unpadded, 2L padded.
    pub fn l_eff(&self) -> usize {
        match self.flavor {
            Flavor::G | Flavor::Hprime => self.ancilla_dim,
            _ => self.n_terms,
        }
    }

    /// Write `<name>.triplets` plus `<name>.json` under `dir`.
    pub fn save(&self, dir: &Path, name: &str) -> Result<PathBuf> {
        let triplet_file = format!("{name}.triplets");
        let mut w = BufWriter::new(File::create(dir.join(&triplet_file))?);
        self.operator.write_triplets(&mut w)?;
        let header = OperatorHeader {
            flavor: self.flavor,
            base_dim: self.base_dim,
            ancilla_dim: self.ancilla_dim,
            delta: self.delta,
            padded: self.padded,
            n_terms: self.n_terms,
            l_eff: self.l_eff(),
            d_exponent: self.d_exponent,
            spin_convention: SPIN_CONVENTION.to_string(),
            matrix_file: triplet_file,
        };
        let path = dir.join(format!("{name}.json"));
        serde_json::to_writer_pretty(BufWriter::new(File::create(&path)?), &header)?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let header: OperatorHeader = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let operator = SparseSymOperator::read_triplets(BufReader::new(File::open(
            base.join(&header.matrix_file),
        )?))?;
        if operator.dim() != header.base_dim * header.ancilla_dim {
            return Err(CoreError::Manifest(format!(
                "operator dimension {} != {} * {}",
                operator.dim(),
                header.base_dim,
                header.ancilla_dim
            )));
        }
        Ok(Self {
            operator,
            flavor: header.flavor,
            base_dim: header.base_dim,
            ancilla_dim: header.ancilla_dim,
            delta: header.delta,
            padded: header.padded,
            n_terms: header.n_terms,
            d_exponent: header.d_exponent,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorHeader {
    flavor: Flavor,
    base_dim: usize,
    ancilla_dim: usize,
    delta: f64,
    padded: bool,
    n_terms: usize,
    l_eff: usize,
    d_exponent: Option<f64>,
    spin_convention: String,
    matrix_file: String,
}

fn check_cap(dim: usize) -> Result<()> {
    if dim > KRON_ASSEMBLY_CAP {
        return Err(CoreError::DenseCapExceeded {
            dim,
            cap: KRON_ASSEMBLY_CAP,
        });
    }
    Ok(())
}

/// Uniform ancilla state `|o> = (1/sqrt(D)) sum_k |k>`.
pub fn ancilla_uniform(d: usize) -> DVector<f64> {
    DVector::from_element(d, 1.0 / (d as f64).sqrt())
}

/// `psi x |o>` with the uniform ancilla of dimension `d`.
pub fn embed_with_uniform_ancilla(psi: &DVector<f64>, d: usize) -> DVector<f64> {
    embed_with_ancilla(psi, &ancilla_uniform(d))
}

/// `psi x anc` under the `(i_sys * D + i_anc)` index convention.
pub fn embed_with_ancilla(psi: &DVector<f64>, anc: &DVector<f64>) -> DVector<f64> {
    let (n, d) = (psi.len(), anc.len());
    DVector::from_fn(n * d, |idx, _| psi[idx / d] * anc[idx % d])
}

/// `psi x |k>`.
pub fn embed_with_basis_ancilla(psi: &DVector<f64>, d: usize, k: usize) -> DVector<f64> {
    let mut anc = DVector::zeros(d);
    anc[k] = 1.0;
    embed_with_ancilla(psi, &anc)
}

/// Contract the ancilla register against `anc` on both sides:
/// `B[i,j] = sum_{k,l} anc[k] op[(i,k),(j,l)] anc[l]`.
pub fn ancilla_contraction(
    op: &SparseSymOperator,
    base_dim: usize,
    ancilla_dim: usize,
    anc: &DVector<f64>,
) -> Result<SparseSymOperator> {
    if op.dim() != base_dim * ancilla_dim {
        return Err(CoreError::DimensionMismatch {
            left: op.dim(),
            right: base_dim * ancilla_dim,
        });
    }
    let mut triplets = Vec::new();
    for (r, c, v) in op.iter() {
        let (i, k) = (r / ancilla_dim, r % ancilla_dim);
        let (j, l) = (c / ancilla_dim, c % ancilla_dim);
        triplets.push((i, j, v * anc[k] * anc[l]));
    }
    SparseSymOperator::from_triplets(base_dim, triplets)
}

/// Ancilla dimension used by the `G`/`Hprime` register.
fn g_register_dim(ham: &FFHamiltonian, padded: bool) -> usize {
    if padded {
        2 * ham.len()
    } else {
        ham.len()
    }
}

/// `X = sum_k Pi_k x |k><k|` on an ancilla register of `ancilla_dim`
/// slots; slots beyond the term count stay empty.
fn build_x_register(ham: &FFHamiltonian, ancilla_dim: usize) -> Result<SparseSymOperator> {
    let n = ham.dim();
    let dim = n * ancilla_dim;
    check_cap(dim)?;
    let mut triplets = Vec::new();
    for (k, term) in ham.terms().iter().enumerate() {
        for (i, j, v) in term.matrix().iter() {
            triplets.push((i * ancilla_dim + k, j * ancilla_dim + k, v));
        }
    }
    SparseSymOperator::from_triplets(dim, triplets)
}

/// `X = sum_k Pi_k x |k><k|` on dimension `N * L`; idempotent.
pub fn build_x(ham: &FFHamiltonian) -> Result<SparseSymOperator> {
    build_x_register(ham, ham.len())
}

/// `U = 1 - 2X` (equivalently `exp(-i pi X)`); real, symmetric,
/// self-inverse. One black box per application.
pub fn build_u(ham: &FFHamiltonian) -> Result<SparseSymOperator> {
    build_u_padded(ham, false)
}

/// `U` on the padded (or unpadded) `G` register.
pub fn build_u_padded(ham: &FFHamiltonian, padded: bool) -> Result<SparseSymOperator> {
    let d = g_register_dim(ham, padded);
    let x = build_x_register(ham, d)?;
    SparseSymOperator::identity(x.dim()).add_scaled(-2.0, &x)
}

/// `P = 1 x |o><o|` for the uniform ancilla state.
fn projector_onto_uniform_ancilla(n: usize, d: usize) -> SparseSymOperator {
    let val = 1.0 / d as f64;
    let mut triplets = Vec::with_capacity(n * d * d);
    for i in 0..n {
        for k in 0..d {
            for l in 0..d {
                triplets.push((i * d + k, i * d + l, val));
            }
        }
    }
    SparseSymOperator::from_triplets(n * d, triplets).expect("indices in range")
}

/// `G = U P U - P`.
///
/// Unpadded, the ancilla register has one slot per term and
/// `|o> = (1/sqrt(L)) sum |k>`; padded, the register doubles to `2L` slots
/// (the upper half carrying empty projectors) so the contraction
/// `(1 x <o|) U (1 x |o>) = 1 - Hs/L` stays positive semidefinite.
pub fn build_g(ham: &FFHamiltonian, padded: bool) -> Result<AmplifiedOperator> {
    let n = ham.dim();
    let d = g_register_dim(ham, padded);
    let u = build_u_padded(ham, padded)?;
    let p = projector_onto_uniform_ancilla(n, d);
    let upu = u.matmul(&p.matmul(&u)?)?;
    let g = upu.add_scaled(-1.0, &p)?.symmetrized();
    Ok(AmplifiedOperator {
        operator: g,
        flavor: Flavor::G,
        base_dim: n,
        ancilla_dim: d,
        delta: 0.0,
        padded,
        n_terms: ham.len(),
        d_exponent: None,
    })
}

/// `H' = L_eff G + delta (1 - P)` with `delta = sqrt(gap_bound * L_eff)`.
///
/// `gap_bound` may be the exactly computed spectral gap or any positive
/// lower bound for it; a smaller bound only shrinks the guaranteed gap of
/// `H'`, never the null space.
pub fn build_hprime(
    ham: &FFHamiltonian,
    gap_lower_bound: f64,
    padded: bool,
) -> Result<AmplifiedOperator> {
    if gap_lower_bound <= 0.0 {
        return Err(CoreError::NonPositiveGapBound {
            value: gap_lower_bound,
        });
    }
    let g = build_g(ham, padded)?;
    let n = ham.dim();
    let d = g.ancilla_dim;
    let l_eff = d as f64;
    let delta = (gap_lower_bound * l_eff).sqrt();
    let p = projector_onto_uniform_ancilla(n, d);
    let one_minus_p = SparseSymOperator::identity(n * d).add_scaled(-1.0, &p)?;
    let hp = g
        .operator
        .scale(l_eff)
        .add_scaled(delta, &one_minus_p)?;
    Ok(AmplifiedOperator {
        operator: hp,
        flavor: Flavor::Hprime,
        base_dim: n,
        ancilla_dim: d,
        delta,
        padded,
        n_terms: ham.len(),
        d_exponent: None,
    })
}

/// `Gt = sum_k sqrt(a_k) Pi_k x (|k><0| + |0><k|)` on an `(L+1)`-slot
/// ancilla whose index 0 is the flag state. Nonzero spectrum:
/// `{±sqrt(lambda_j)}` over the weighted eigenvalues of `H`.
pub fn build_gtilde(ham: &FFHamiltonian) -> Result<AmplifiedOperator> {
    let n = ham.dim();
    let d = ham.len() + 1;
    check_cap(n * d)?;
    let mut triplets = Vec::new();
    for (k, term) in ham.terms().iter().enumerate() {
        let w = term.coefficient().sqrt();
        if w == 0.0 {
            continue;
        }
        for (i, j, v) in term.matrix().iter() {
            triplets.push((i * d + (k + 1), j * d, w * v));
            triplets.push((i * d, j * d + (k + 1), w * v));
        }
    }
    Ok(AmplifiedOperator {
        operator: SparseSymOperator::from_triplets(n * d, triplets)?,
        flavor: Flavor::Gtilde,
        base_dim: n,
        ancilla_dim: d,
        delta: 0.0,
        padded: false,
        n_terms: ham.len(),
        d_exponent: None,
    })
}

/// `Gb = Gt + (sqrt(gap_bound)/2) (1 x (1 - |0><0|))`: the flag-penalized
/// form whose single-particle qubit image appears in the local Hamiltonian.
pub fn build_gbar(ham: &FFHamiltonian, gap_lower_bound: f64) -> Result<AmplifiedOperator> {
    if gap_lower_bound <= 0.0 {
        return Err(CoreError::NonPositiveGapBound {
            value: gap_lower_bound,
        });
    }
    let gt = build_gtilde(ham)?;
    let n = ham.dim();
    let d = gt.ancilla_dim;
    let pen = gap_lower_bound.sqrt() / 2.0;
    let mut triplets = Vec::new();
    for i in 0..n {
        for k in 1..d {
            triplets.push((i * d + k, i * d + k, pen));
        }
    }
    let penalty = SparseSymOperator::from_triplets(n * d, triplets)?;
    Ok(AmplifiedOperator {
        operator: gt.operator.add_scaled(1.0, &penalty)?,
        flavor: Flavor::Gbar,
        base_dim: n,
        ancilla_dim: d,
        delta: pen,
        padded: false,
        n_terms: ham.len(),
        d_exponent: None,
    })
}

/// Diagonal particle-number operator on `system x (L+1 qubits)`: counts
/// occupied ancilla qubits.
pub fn particle_number_operator(base_dim: usize, qubits: usize) -> SparseSymOperator {
    let d = 1usize << qubits;
    let mut triplets = Vec::new();
    for i in 0..base_dim {
        for b in 0..d {
            let w = (b as u64).count_ones() as f64;
            if w != 0.0 {
                triplets.push((i * d + b, i * d + b, w));
            }
        }
    }
    SparseSymOperator::from_triplets(base_dim * d, triplets).expect("indices in range")
}

/// The local qubit Hamiltonian on `N * 2^(L+1)` dimensions:
///
/// ```text
/// H' = (1/L^(1/d)) [ sum_k sqrt(a_k) Pi_k (s+_k s-_0 + s-_k s+_0)
///                    + (sqrt(gap)/2) (1 + sz_0)/2 ] + 4 (Nhat - 1)
/// ```
///
/// It commutes with the total particle number. With a unique null vector
/// `psi_0` of `H`, `psi_0 x |particle at 0>` spans its null space and every
/// other eigenvalue has magnitude at least `sqrt(gap)/(2 L^(1/d))` (the
/// states `psi_0 x |particle at k>`, k >= 1, sit exactly there).
pub fn build_local_hprime(
    ham: &FFHamiltonian,
    gap_lower_bound: f64,
    d_exponent: f64,
) -> Result<AmplifiedOperator> {
    let ctx = local_context(ham, gap_lower_bound, d_exponent)?;
    let n = ham.dim();
    let qubits = ham.len() + 1;
    let d = 1usize << qubits;
    check_cap(n * d)?;

    let mut triplets = Vec::new();
    // Hopping between ancilla qubit k and qubit 0 within each system block.
    for (k, term) in ham.terms().iter().enumerate() {
        let w = ctx.prefactor * term.coefficient().sqrt();
        if w == 0.0 {
            continue;
        }
        let bit_k = 1usize << (k + 1);
        for b in 0..d {
            // b has the particle at 0 and none at k; partner swaps them.
            if b & 1 == 1 && b & bit_k == 0 {
                let b2 = (b & !1) | bit_k;
                for (i, j, v) in term.matrix().iter() {
                    triplets.push((i * d + b2, j * d + b, w * v));
                    triplets.push((i * d + b, j * d + b2, w * v));
                }
            }
        }
    }
    // Penalty on "qubit 0 empty", plus the particle-number ladder.
    for i in 0..n {
        for b in 0..d {
            let mut diag = 4.0 * ((b as u64).count_ones() as f64 - 1.0);
            if b & 1 == 0 {
                diag += ctx.prefactor * ctx.penalty;
            }
            if diag != 0.0 {
                triplets.push((i * d + b, i * d + b, diag));
            }
        }
    }

    Ok(AmplifiedOperator {
        operator: SparseSymOperator::from_triplets(n * d, triplets)?,
        flavor: Flavor::LocalHprime,
        base_dim: n,
        ancilla_dim: d,
        delta: ctx.penalty,
        padded: false,
        n_terms: ham.len(),
        d_exponent: Some(d_exponent),
    })
}

struct LocalContext {
    /// `1 / L^(1/d)`.
    prefactor: f64,
    /// `sqrt(gap)/2`.
    penalty: f64,
}

fn local_context(
    ham: &FFHamiltonian,
    gap_lower_bound: f64,
    d_exponent: f64,
) -> Result<LocalContext> {
    if gap_lower_bound <= 0.0 {
        return Err(CoreError::NonPositiveGapBound {
            value: gap_lower_bound,
        });
    }
    if !(d_exponent > 0.0 && d_exponent <= 2.0) {
        return Err(CoreError::ExponentRange { value: d_exponent });
    }
    let h = ham.assemble();
    let null_dim = spectra::eig_full(&h, &EigOptions::values_only())?.null_dim();
    if null_dim != 1 {
        return Err(CoreError::DegenerateNullSpace { dim: null_dim });
    }
    Ok(LocalContext {
        prefactor: (ham.len() as f64).powf(-1.0 / d_exponent),
        penalty: gap_lower_bound.sqrt() / 2.0,
    })
}

/// Ascending list of `(L+1)`-bit strings with `a` occupied qubits.
pub fn weight_a_bitstrings(qubits: usize, a: usize) -> Vec<usize> {
    (0..(1usize << qubits))
        .filter(|b| (*b as u64).count_ones() as usize == a)
        .collect()
}

/// Assemble only the `a`-particle block of the local Hamiltonian, on
/// dimension `N * C(L+1, a)`. Reaches larger L than the full register.
pub fn build_local_sector(
    ham: &FFHamiltonian,
    gap_lower_bound: f64,
    d_exponent: f64,
    a: usize,
) -> Result<SparseSymOperator> {
    let qubits = ham.len() + 1;
    if a > qubits {
        return Err(CoreError::SectorOutOfRange { a, max: qubits });
    }
    let ctx = local_context(ham, gap_lower_bound, d_exponent)?;
    let n = ham.dim();
    let basis = weight_a_bitstrings(qubits, a);
    let pos: std::collections::HashMap<usize, usize> =
        basis.iter().enumerate().map(|(p, &b)| (b, p)).collect();
    let c = basis.len();
    check_cap(n * c)?;

    let mut triplets = Vec::new();
    for (k, term) in ham.terms().iter().enumerate() {
        let w = ctx.prefactor * term.coefficient().sqrt();
        if w == 0.0 {
            continue;
        }
        let bit_k = 1usize << (k + 1);
        for (pb, &b) in basis.iter().enumerate() {
            if b & 1 == 1 && b & bit_k == 0 {
                let b2 = (b & !1) | bit_k;
                let pb2 = pos[&b2];
                for (i, j, v) in term.matrix().iter() {
                    triplets.push((i * c + pb2, j * c + pb, w * v));
                    triplets.push((i * c + pb, j * c + pb2, w * v));
                }
            }
        }
    }
    let sector_shift = 4.0 * (a as f64 - 1.0);
    for i in 0..n {
        for (pb, &b) in basis.iter().enumerate() {
            let mut diag = sector_shift;
            if b & 1 == 0 {
                diag += ctx.prefactor * ctx.penalty;
            }
            if diag != 0.0 {
                triplets.push((i * c + pb, i * c + pb, diag));
            }
        }
    }
    SparseSymOperator::from_triplets(n * c, triplets)
}

/// Extract the `a`-particle block of a fully assembled local Hamiltonian.
/// Basis order matches [`build_local_sector`] (bitstrings ascending).
pub fn restrict_to_sector(op: &AmplifiedOperator, a: usize) -> Result<SparseSymOperator> {
    if op.flavor != Flavor::LocalHprime {
        return Err(CoreError::WrongFlavor {
            expected: "LocalHprime",
            found: op.flavor.name(),
        });
    }
    let qubits = op.n_terms + 1;
    if a > qubits {
        return Err(CoreError::SectorOutOfRange { a, max: qubits });
    }
    let d = op.ancilla_dim;
    let basis = weight_a_bitstrings(qubits, a);
    let pos: std::collections::HashMap<usize, usize> =
        basis.iter().enumerate().map(|(p, &b)| (b, p)).collect();
    let c = basis.len();
    let n = op.base_dim;
    let mut triplets = Vec::new();
    for (r, col, v) in op.operator.iter() {
        let (i, b) = (r / d, r % d);
        let (j, b2) = (col / d, col % d);
        if let (Some(&pb), Some(&pb2)) = (pos.get(&b), pos.get(&b2)) {
            triplets.push((i * c + pb, j * c + pb2, v));
        }
    }
    SparseSymOperator::from_triplets(n * c, triplets)
}

/// Raising-operator normalization `N(S, m) = (1/2) sqrt((S+m)(S-m+2))`
/// for total-spin label S and magnetization m (both integers of the same
/// parity, m stepping by 2; `m = S + 2` is the annihilation boundary where
/// the value is 0).
pub fn su2_ladder_coefficient(s: i64, m: i64) -> Result<f64> {
    if s < 0 || (s + m) % 2 != 0 || m < -s || m > s + 2 {
        return Err(CoreError::SpinDomain { s, m });
    }
    Ok(0.5 * (((s + m) * (s - m + 2)) as f64).sqrt())
}
