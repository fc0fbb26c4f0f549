//! Error type shared by all core modules.

use thiserror::Error;

/// Errors produced by operator assembly, validation, and the experiment
/// drivers.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("entry ({row}, {col}) out of bounds for dimension {dim}")]
    IndexOutOfBounds { row: usize, col: usize, dim: usize },

    #[error("matrix is not symmetric (max |A - A^T| entry at ({row}, {col}))")]
    NotSymmetric { row: usize, col: usize },

    #[error("not idempotent: max |P^2 - P| = {residual:.3e} exceeds {tol:.1e}")]
    NotIdempotent { residual: f64, tol: f64 },

    #[error("coefficient {value} outside [0, 1]")]
    CoefficientRange { value: f64 },

    #[error("a frustration-free Hamiltonian needs at least one term")]
    EmptyTerms,

    #[error("zero vector cannot define a rank-1 projector")]
    ZeroVector,

    #[error("dimension {dim} exceeds dense cap {cap}")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("target {target} is not an eigenvalue (closest is {closest})")]
    TargetNotInSpectrum { target: f64, closest: f64 },

    #[error("eigenvalue index {index} gives a one-dimensional invariant subspace (lambda in the null cluster, or gamma = -1)")]
    NullEigenvalueBlock { index: usize },

    #[error("gap lower bound must be positive, got {value}")]
    NonPositiveGapBound { value: f64 },

    #[error("null space of H is degenerate (dimension {dim}); a unique ground state is required")]
    DegenerateNullSpace { dim: usize },

    #[error("exponent d must lie in (0, 2], got {value}")]
    ExponentRange { value: f64 },

    #[error("particle number {a} out of range 0..={max}")]
    SectorOutOfRange { a: usize, max: usize },

    #[error("operator flavor {found} does not support this operation (expected {expected})")]
    WrongFlavor { expected: &'static str, found: &'static str },

    #[error("spin domain violation: S = {s}, m = {m}")]
    SpinDomain { s: i64, m: i64 },

    #[error("no {degree}-regular simple graph on {vertices} vertices (need degree < vertices and an even degree sum)")]
    InfeasibleRegularGraph { vertices: usize, degree: usize },

    #[error("retry cap {cap} exceeded while sampling an expander; best lambda found: {best_lambda:.4}")]
    ExpanderRetryExhausted { cap: usize, best_lambda: f64 },

    #[error("edge coloring is not proper: edges {first} and {second} share a vertex and a color")]
    ImproperColoring { first: usize, second: usize },

    #[error("vertex {vertex} out of range 0..{count}")]
    VertexOutOfRange { vertex: usize, count: usize },

    #[error("evolution needs at least one step")]
    ZeroSteps,

    #[error("precision must be positive, got {value}")]
    NonPositivePrecision { value: f64 },

    #[error("kappa must be at least 1")]
    KappaRange,

    #[error("perturbation norm {norm:.6} exceeds 1")]
    PerturbationTooLarge { norm: f64 },

    #[error("perturbation support graph is not connected (irreducibility violated)")]
    ReduciblePerturbation,

    #[error("off-diagonal entry ({row}, {col}) = {value} breaks the stoquastic sign pattern")]
    NotStoquastic { row: usize, col: usize, value: f64 },

    #[error("slice operator has a negative entry ({row}, {col}) = {value}; eta is too large")]
    NegativeSliceEntry { row: usize, col: usize, value: f64 },

    #[error("path length must be at least 1")]
    EmptyPath,

    #[error("found {steps} was exhausted before convergence")]
    StepBudgetExhausted { steps: usize },

    #[error("triplet parse error at line {line}: {message}")]
    TripletParse { line: usize, message: String },

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
