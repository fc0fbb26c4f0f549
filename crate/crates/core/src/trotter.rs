//! Black-box simulation of `exp(-i H' t)`.
//!
//! `H' = A1 + B + delta*1` with `A1 = L_eff * U P U` and
//! `B = -(L_eff + delta) P`; the scalar offset is a global phase. One
//! `A1` exponential costs exactly two black boxes, via
//!
//! ```text
//! exp(-i A1 s) = U exp(-i L_eff P s) U
//! ```
//!
//! and `P` is a rank-`N` projector, so `exp(-i theta P) = 1 +
//! (e^{-i theta} - 1) P` in closed form with no black box at all.
//!
//! Supported product formulas: first order (Lie) and second order (Strang,
//! arranged with the projector exponentials outside so each step still
//! charges two black boxes).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::amplify;
use crate::error::{CoreError, Result};
use crate::ffham::{BlackBoxLedger, FFHamiltonian};
use crate::op::SparseSymOperator;
use crate::spectra::{self, EigOptions};

type CMatrix = DMatrix<Complex64>;

/// Product-formula order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrotterOrder {
    First,
    Second,
}

impl TrotterOrder {
    pub fn value(&self) -> u32 {
        match self {
            TrotterOrder::First => 1,
            TrotterOrder::Second => 2,
        }
    }
}

/// Outcome of one black-box evolution run.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    /// The assembled approximation `W(t)` to `exp(-i H' t)`.
    pub unitary: CMatrix,
    /// Black-box applications charged while composing `W(t)`.
    pub ledger: BlackBoxLedger,
    pub t: f64,
    pub steps: usize,
    pub order: TrotterOrder,
}

/// `exp(-i op t)` through the dense eigendecomposition oracle.
pub fn evolve_exact(op: &SparseSymOperator, t: f64, opts: &EigOptions) -> Result<CMatrix> {
    let mut opts = opts.clone();
    opts.with_vectors = true;
    let report = spectra::eig_full(op, &opts)?;
    let n = op.dim();
    let mut q = CMatrix::zeros(n, n);
    for j in 0..n {
        let col = report.eigenvector(j).expect("vectors requested");
        for i in 0..n {
            q[(i, j)] = Complex64::new(col[i], 0.0);
        }
    }
    let mut phases = CMatrix::zeros(n, n);
    for (j, &l) in report.eigenvalues().iter().enumerate() {
        phases[(j, j)] = Complex64::from_polar(1.0, -l * t);
    }
    Ok(&q * phases * q.adjoint())
}

/// `max |W^dagger W - 1|`: unitarity residual.
pub fn unitarity_residual(w: &CMatrix) -> f64 {
    let n = w.nrows();
    let mut g = w.adjoint() * w;
    for i in 0..n {
        g[(i, i)] -= Complex64::new(1.0, 0.0);
    }
    g.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spectral-norm distance between two matrices.
pub fn spectral_norm_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let d = a - b;
    d.singular_values().max()
}

/// Pieces of the split `H' = A1 + B + delta` on the padded register.
struct SplitPieces {
    u: CMatrix,
    /// Projector `P = 1 x |o><o|` as a dense complex matrix.
    p: CMatrix,
    l_eff: f64,
    delta: f64,
    dim: usize,
}

fn split_pieces(ham: &FFHamiltonian, gap_lower_bound: f64) -> Result<SplitPieces> {
    if gap_lower_bound <= 0.0 {
        return Err(CoreError::NonPositiveGapBound {
            value: gap_lower_bound,
        });
    }
    let padded = true;
    let u_sparse = amplify::build_u_padded(ham, padded)?;
    let dim = u_sparse.dim();
    let d = 2 * ham.len();
    let l_eff = d as f64;
    let delta = (gap_lower_bound * l_eff).sqrt();

    let mut u = CMatrix::zeros(dim, dim);
    for (i, j, v) in u_sparse.iter() {
        u[(i, j)] = Complex64::new(v, 0.0);
    }
    let n = ham.dim();
    let mut p = CMatrix::zeros(dim, dim);
    let val = Complex64::new(1.0 / d as f64, 0.0);
    for i in 0..n {
        for k in 0..d {
            for l in 0..d {
                p[(i * d + k, i * d + l)] = val;
            }
        }
    }
    Ok(SplitPieces {
        u,
        p,
        l_eff,
        delta,
        dim,
    })
}

impl SplitPieces {
    /// `exp(-i theta P) = 1 + (e^{-i theta} - 1) P`, closed form.
    fn projector_exp(&self, theta: f64) -> CMatrix {
        let phase = Complex64::from_polar(1.0, -theta) - Complex64::new(1.0, 0.0);
        let mut m = &self.p * phase;
        for i in 0..self.dim {
            m[(i, i)] += Complex64::new(1.0, 0.0);
        }
        m
    }

    /// `exp(-i A1 s) = U exp(-i L_eff P s) U`; charges two black boxes.
    fn a1_exp(&self, s: f64, ledger: &mut BlackBoxLedger) -> CMatrix {
        ledger.charge(2);
        &self.u * self.projector_exp(self.l_eff * s) * &self.u
    }

    /// `exp(-i B s)` with `B = -(L_eff + delta) P`; no black box.
    fn b_exp(&self, s: f64) -> CMatrix {
        self.projector_exp(-(self.l_eff + self.delta) * s)
    }
}

/// Compose the product-formula approximation of `exp(-i H' t)` on the
/// padded register, with exact black-box accounting: two charges per step
/// (one `A1` exponential each), none for the projector factors. `t = 0`
/// short-circuits to the identity at zero cost.
pub fn evolve_blackbox(
    ham: &FFHamiltonian,
    gap_lower_bound: f64,
    t: f64,
    steps: usize,
    order: TrotterOrder,
) -> Result<EvolutionResult> {
    if steps == 0 {
        return Err(CoreError::ZeroSteps);
    }
    let pieces = split_pieces(ham, gap_lower_bound)?;
    let mut ledger = BlackBoxLedger::new();
    if t == 0.0 {
        return Ok(EvolutionResult {
            unitary: CMatrix::identity(pieces.dim, pieces.dim),
            ledger,
            t,
            steps,
            order,
        });
    }

    let tau = t / steps as f64;
    let step = match order {
        TrotterOrder::First => pieces.a1_exp(tau, &mut ledger) * pieces.b_exp(tau),
        TrotterOrder::Second => {
            let half = pieces.b_exp(tau / 2.0);
            &half * pieces.a1_exp(tau, &mut ledger) * &half
        }
    };
    // The ledger charges per *application*; the composition applies the
    // same step `steps` times.
    ledger.charge(2 * (steps as u64 - 1));

    let mut w = matrix_power(&step, steps);
    let phase = Complex64::from_polar(1.0, -pieces.delta * t);
    w *= phase;
    Ok(EvolutionResult {
        unitary: w,
        ledger,
        t,
        steps,
        order,
    })
}

fn matrix_power(m: &CMatrix, mut n: usize) -> CMatrix {
    let mut base = m.clone();
    let mut acc = CMatrix::identity(m.nrows(), m.ncols());
    while n > 0 {
        if n & 1 == 1 {
            acc = &acc * &base;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Exact evolution `V(t) = exp(-i H' t)` for the same padded register, the
/// oracle [`evolve_blackbox`] is measured against.
pub fn exact_reference(
    ham: &FFHamiltonian,
    gap_lower_bound: f64,
    t: f64,
) -> Result<CMatrix> {
    let hp = amplify::build_hprime(ham, gap_lower_bound, true)?;
    evolve_exact(hp.operator(), t, &EigOptions::default())
}

/// Smallest step count (and its 2-per-step call count) reaching
/// `|W - V| <= eps`, found by doubling then bisecting.
pub fn measured_calls_for_accuracy(
    ham: &FFHamiltonian,
    gap_lower_bound: f64,
    t: f64,
    order: TrotterOrder,
    eps: f64,
    max_steps: usize,
) -> Result<MeasuredCost> {
    if eps <= 0.0 {
        return Err(CoreError::NonPositivePrecision { value: eps });
    }
    let v = exact_reference(ham, gap_lower_bound, t)?;
    let err_at = |n: usize| -> Result<f64> {
        let w = evolve_blackbox(ham, gap_lower_bound, t, n, order)?;
        Ok(spectral_norm_diff(&w.unitary, &v))
    };

    let mut hi = 1usize;
    let mut hi_err = err_at(hi)?;
    while hi_err > eps {
        if hi >= max_steps {
            return Err(CoreError::StepBudgetExhausted { steps: max_steps });
        }
        hi = (hi * 2).min(max_steps);
        hi_err = err_at(hi)?;
    }
    let mut lo = hi / 2; // err(lo) > eps when lo >= 1
    while hi - lo > 1 && lo >= 1 {
        let mid = lo + (hi - lo) / 2;
        if err_at(mid)? <= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(MeasuredCost {
        steps: hi,
        calls: 2 * hi as u64,
        error: err_at(hi)?,
    })
}

/// Result of [`measured_calls_for_accuracy`].
#[derive(Debug, Clone, Copy)]
pub struct MeasuredCost {
    pub steps: usize,
    pub calls: u64,
    pub error: f64,
}

/// Default constant for the call-count model, calibrated on the reference
/// sweep (`measured_calls_for_accuracy` over the three-level toy at
/// eps = 1e-4, t in {1, 2, 4}, kappa = 1, second order); see
/// `calibrate_call_constant`.
pub const DEFAULT_CALL_CONSTANT: f64 = 0.32;

/// Model bound `ceil(c0 * eps^(-1/(2 kappa)) * |L t|^(1 + 1/(2 kappa)))`
/// on black-box calls, monotone in `|L t|`.
pub fn calls_needed(l: f64, t: f64, kappa: u32, eps: f64) -> Result<u64> {
    calls_needed_with(DEFAULT_CALL_CONSTANT, l, t, kappa, eps)
}

/// [`calls_needed`] with an explicit calibration constant.
pub fn calls_needed_with(c0: f64, l: f64, t: f64, kappa: u32, eps: f64) -> Result<u64> {
    if kappa < 1 {
        return Err(CoreError::KappaRange);
    }
    if eps <= 0.0 {
        return Err(CoreError::NonPositivePrecision { value: eps });
    }
    let lt = (l * t).abs();
    let exponent = 1.0 + 1.0 / (2.0 * kappa as f64);
    let c = c0 * eps.powf(-1.0 / (2.0 * kappa as f64));
    Ok((c * lt.powf(exponent)).ceil() as u64)
}

/// Fit `c0` so the model reproduces a set of measured `(l, t, eps, calls)`
/// points at the given kappa; returns the largest implied constant.
pub fn calibrate_call_constant(kappa: u32, points: &[(f64, f64, f64, u64)]) -> f64 {
    points
        .iter()
        .map(|&(l, t, eps, calls)| {
            let lt = (l * t).abs();
            let exponent = 1.0 + 1.0 / (2.0 * kappa as f64);
            calls as f64 * eps.powf(1.0 / (2.0 * kappa as f64)) / lt.powf(exponent)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffham::ProjectorTerm;

    fn toy() -> FFHamiltonian {
        // Single projector: A1 and B commute exactly (the invariant-block
        // angle is 0 or pi/2), so the product formula is exact. Good for
        // ledger and phase checks, useless for convergence-rate checks.
        let t = ProjectorTerm::new(
            SparseSymOperator::from_triplets(2, [(1, 1, 1.0)]).unwrap(),
            1.0,
        )
        .unwrap();
        FFHamiltonian::new(vec![t]).unwrap()
    }

    fn noncommuting_toy() -> FFHamiltonian {
        // Smallest frustration-free instance with generic block angles
        // (on C^2 every projector orthogonal to the ground state hits the
        // same ray and the split commutes): |1><1| plus the projector onto
        // (e1 + e2)/sqrt(2), sharing the null vector e0.
        let t1 = ProjectorTerm::new(
            SparseSymOperator::from_triplets(3, [(1, 1, 1.0)]).unwrap(),
            1.0,
        )
        .unwrap();
        let t2 =
            crate::ffham::rank1_projector(&nalgebra::dvector![0.0, 1.0, 1.0]).unwrap();
        FFHamiltonian::new(vec![t1, t2]).unwrap()
    }

    #[test]
    fn exact_of_zero_is_identity() {
        let z = SparseSymOperator::zeros(3);
        let v = evolve_exact(&z, 2.3, &EigOptions::default()).unwrap();
        let dev = (&v - CMatrix::identity(3, 3))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(dev <= 1e-12);
    }

    #[test]
    fn exact_diagonal_phases() {
        let d = SparseSymOperator::from_triplets(2, [(1, 1, std::f64::consts::PI)]).unwrap();
        let v = evolve_exact(&d, 1.0, &EigOptions::default()).unwrap();
        assert!((v[(0, 0)] - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
        assert!((v[(1, 1)] - Complex64::new(-1.0, 0.0)).norm() <= 1e-10);
    }

    #[test]
    fn exact_matches_taylor_series_oracle() {
        let ham = toy();
        let hp = amplify::build_hprime(&ham, 1.0, true).unwrap();
        let t = 0.7;
        let v = evolve_exact(hp.operator(), t, &EigOptions::default()).unwrap();
        // Scaling-and-squaring Taylor oracle.
        let n = hp.operator().dim();
        let scale = 16u32;
        let mut a = CMatrix::zeros(n, n);
        for (i, j, val) in hp.operator().iter() {
            a[(i, j)] = Complex64::new(0.0, -val * t / f64::from(1 << scale));
        }
        let mut term = CMatrix::identity(n, n);
        let mut sum = CMatrix::identity(n, n);
        for k in 1..20 {
            term = &term * &a / Complex64::new(k as f64, 0.0);
            sum += &term;
        }
        let mut approx = sum;
        for _ in 0..scale {
            approx = &approx * &approx;
        }
        let dev = (&v - &approx).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(dev <= 1e-10, "taylor deviation {dev}");
    }

    #[test]
    fn zero_time_identity_and_empty_ledger() {
        let r = evolve_blackbox(&toy(), 1.0, 0.0, 5, TrotterOrder::Second).unwrap();
        assert_eq!(r.ledger.count(), 0);
        let dev = (&r.unitary - CMatrix::identity(4, 4))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn ledger_counts_two_per_step() {
        for order in [TrotterOrder::First, TrotterOrder::Second] {
            let r = evolve_blackbox(&toy(), 1.0, 1.0, 13, order).unwrap();
            assert_eq!(r.ledger.count(), 26);
        }
    }

    #[test]
    fn zero_steps_rejected() {
        assert!(matches!(
            evolve_blackbox(&toy(), 1.0, 1.0, 0, TrotterOrder::First),
            Err(CoreError::ZeroSteps)
        ));
    }

    #[test]
    fn trotter_unitary_and_converging() {
        let ham = noncommuting_toy();
        let v = exact_reference(&ham, 1.0, 1.0).unwrap();
        let w10 = evolve_blackbox(&ham, 1.0, 1.0, 10, TrotterOrder::Second).unwrap();
        let w20 = evolve_blackbox(&ham, 1.0, 1.0, 20, TrotterOrder::Second).unwrap();
        assert!(unitarity_residual(&w10.unitary) <= 1e-8);
        let e10 = spectral_norm_diff(&w10.unitary, &v);
        let e20 = spectral_norm_diff(&w20.unitary, &v);
        let ratio = e10 / e20;
        assert!(
            (3.0..=5.0).contains(&ratio),
            "second-order halving ratio {ratio} (e10={e10:.3e}, e20={e20:.3e})"
        );
    }

    #[test]
    fn first_order_halving_ratio() {
        let ham = noncommuting_toy();
        let v = exact_reference(&ham, 1.0, 1.0).unwrap();
        let e = |n| {
            let w = evolve_blackbox(&ham, 1.0, 1.0, n, TrotterOrder::First).unwrap();
            spectral_norm_diff(&w.unitary, &v)
        };
        let ratio = e(16) / e(32);
        assert!((1.6..=2.4).contains(&ratio), "first-order ratio {ratio}");
    }

    #[test]
    fn calls_needed_model_shape() {
        assert_eq!(calls_needed(2.0, 0.0, 1, 1e-4).unwrap(), 0);
        let a = calls_needed(2.0, 1.0, 1, 1e-4).unwrap();
        let b = calls_needed(2.0, 2.0, 1, 1e-4).unwrap();
        let ratio = b as f64 / a as f64;
        let expect = 2.0f64.powf(1.5);
        assert!((ratio - expect).abs() <= 0.2, "doubling ratio {ratio}");
        assert!(matches!(
            calls_needed(2.0, 1.0, 0, 1e-4),
            Err(CoreError::KappaRange)
        ));
        assert!(matches!(
            calls_needed(2.0, 1.0, 1, -1.0),
            Err(CoreError::NonPositivePrecision { .. })
        ));
    }

    #[test]
    fn default_constant_reproduces_measurement() {
        let ham = noncommuting_toy();
        let gap = 0.2928932188134524;
        let eps = 1e-4;
        let l_eff = 4.0;
        let t = 2.0;
        let cost =
            measured_calls_for_accuracy(&ham, gap, t, TrotterOrder::Second, eps, 1 << 16)
                .unwrap();
        let model = calls_needed(l_eff, t, 1, eps).unwrap();
        let ratio = model as f64 / cost.calls as f64;
        assert!(
            (0.5..=2.0).contains(&ratio),
            "model {model} vs measured {} (ratio {ratio:.2})",
            cost.calls
        );
    }

    #[test]
    fn measured_cost_minimal_steps() {
        let ham = noncommuting_toy();
        let cost =
            measured_calls_for_accuracy(&ham, 1.0, 1.0, TrotterOrder::Second, 1e-3, 1 << 14)
                .unwrap();
        assert!(cost.error <= 1e-3);
        assert_eq!(cost.calls, 2 * cost.steps as u64);
        if cost.steps > 1 {
            let v = exact_reference(&ham, 1.0, 1.0).unwrap();
            let w = evolve_blackbox(&ham, 1.0, 1.0, cost.steps - 1, TrotterOrder::Second)
                .unwrap();
            assert!(spectral_norm_diff(&w.unitary, &v) > 1e-3);
        }
    }
}
