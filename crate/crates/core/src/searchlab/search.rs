//! Exact simulation of the two-measurement search protocol.
//!
//! Start in the equal superposition `|s>`, Born-measure the projector onto
//! the unique ground state `psi` (taken from dense diagonalization), then
//! Born-measure the computational basis; success means reading out the
//! marked index. The analytic lower bound on the success rate is
//! `p_x * p_s` with `p_x = |<x|psi>|^2`, `p_s = |<s|psi>|^2`; the second
//! branch only adds probability.

use nalgebra::DVector;
use rand::Rng;

use crate::error::{CoreError, Result};
use crate::op::SparseSymOperator;
use crate::spectra::{self, EigOptions};

/// Outcome of a measurement-search run.
#[derive(Debug, Clone)]
pub struct SearchStats {
    pub trials: u64,
    pub successes: u64,
    pub empirical_rate: f64,
    /// Wilson score lower bound at z = 3.
    pub wilson_lower: f64,
    /// Overlap of the ground state with the marked basis vector.
    pub p_x: f64,
    /// Overlap of the ground state with the equal superposition.
    pub p_s: f64,
    /// `p_x * p_s`, the analytic success lower bound.
    pub analytic_lower: f64,
    /// Binomial sigma of the analytic bound at this trial count.
    pub sigma: f64,
}

/// Wilson score interval lower bound.
pub fn wilson_lower_bound(successes: u64, trials: u64, z: f64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let center = p + z2 / (2.0 * n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half) / (1.0 + z2 / n)).max(0.0)
}

/// Run the protocol `trials` times against the unique ground state of
/// `op`, with exact Born sampling on both measurement branches.
pub fn measurement_search<R: Rng>(
    op: &SparseSymOperator,
    marked: usize,
    trials: u64,
    rng: &mut R,
) -> Result<SearchStats> {
    let m = op.dim();
    if marked >= m {
        return Err(CoreError::VertexOutOfRange {
            vertex: marked,
            count: m,
        });
    }
    let report = spectra::eig_full(op, &EigOptions::default())?;
    let evs = report.eigenvalues();
    let ground = evs[0];
    let degeneracy = evs
        .iter()
        .filter(|&&l| (l - ground).abs() <= report.null_tol())
        .count();
    if degeneracy != 1 {
        return Err(CoreError::DegenerateNullSpace { dim: degeneracy });
    }
    let psi = report.eigenvector(0).expect("vectors requested");

    let s = DVector::from_element(m, 1.0 / (m as f64).sqrt());
    let overlap = psi.dot(&s);
    let p_s = overlap * overlap;
    let p_x = psi[marked] * psi[marked];

    // Post-measurement states: psi itself, and the normalized rejection of
    // s from psi.
    let mut rejected = &s - &psi * overlap;
    let rnorm = rejected.norm();
    let degenerate_reject = rnorm < 1e-12;
    if !degenerate_reject {
        rejected /= rnorm;
    }
    let cdf = |v: &DVector<f64>| -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(m);
        for i in 0..m {
            acc += v[i] * v[i];
            out.push(acc);
        }
        out
    };
    let cdf_psi = cdf(&psi);
    let cdf_rej = cdf(&rejected);

    let mut successes = 0u64;
    for _ in 0..trials {
        let hit_ground = rng.gen::<f64>() < p_s;
        let table = if hit_ground || degenerate_reject {
            &cdf_psi
        } else {
            &cdf_rej
        };
        let r = rng.gen::<f64>() * table.last().copied().unwrap_or(1.0);
        let idx = table.partition_point(|&c| c < r).min(m - 1);
        if idx == marked {
            successes += 1;
        }
    }

    let analytic_lower = p_x * p_s;
    Ok(SearchStats {
        trials,
        successes,
        empirical_rate: successes as f64 / trials.max(1) as f64,
        wilson_lower: wilson_lower_bound(successes, trials, 3.0),
        p_x,
        p_s,
        analytic_lower,
        sigma: (analytic_lower * (1.0 - analytic_lower) / trials.max(1) as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::searchlab::coloring::misra_gries_edge_color;
    use crate::searchlab::graph::complete_graph;
    use crate::searchlab::instance::build_search_ff;

    #[test]
    fn wilson_bounds_sane() {
        assert_eq!(wilson_lower_bound(0, 0, 3.0), 0.0);
        let w = wilson_lower_bound(500, 1000, 3.0);
        assert!(w > 0.40 && w < 0.5);
        assert!(wilson_lower_bound(1000, 1000, 3.0) > 0.98);
    }

    #[test]
    fn analytic_overlaps_on_search_instance() {
        let g = complete_graph(8).unwrap();
        let coloring = misra_gries_edge_color(8, g.edges());
        let inst = build_search_ff(&g, &coloring, 5).unwrap();
        let mut rng = crate::rng_from_seed(9);
        let stats =
            measurement_search(&inst.ham.assemble(), 5, 2000, &mut rng).unwrap();
        // p_x = 1/2 exactly from the closed-form ground state.
        assert!((stats.p_x - 0.5).abs() <= 1e-9, "p_x = {}", stats.p_x);
        let m = 8.0f64;
        let expect_ps = (1.0 / (2.0 * m).sqrt() + ((m - 1.0) / (2.0 * m)).sqrt()).powi(2);
        assert!((stats.p_s - expect_ps).abs() <= 1e-9);
        assert!(stats.empirical_rate >= stats.analytic_lower - 3.0 * stats.sigma);
    }

    #[test]
    fn success_rate_matches_enumerated_probability() {
        // M = 4 instance; exact success probability =
        // p_s * p_x + (1 - p_s) * |<x|rejected>|^2.
        let g = complete_graph(4).unwrap();
        let coloring = misra_gries_edge_color(4, g.edges());
        let inst = build_search_ff(&g, &coloring, 1).unwrap();
        let op = inst.ham.assemble();
        let mut rng = crate::rng_from_seed(5);
        let stats = measurement_search(&op, 1, 40_000, &mut rng).unwrap();
        let psi = &inst.psi;
        let m = 4usize;
        let s = DVector::from_element(m, 0.5);
        let ov = psi.dot(&s);
        let mut rej = &s - psi * ov;
        rej /= rej.norm();
        let exact = stats.p_s * psi[1] * psi[1] + (1.0 - stats.p_s) * rej[1] * rej[1];
        assert!(
            (stats.empirical_rate - exact).abs() <= 4.0 * (exact / 40_000.0f64).sqrt() + 0.005,
            "empirical {} exact {exact}",
            stats.empirical_rate
        );
    }

    #[test]
    fn degenerate_ground_state_rejected() {
        let op = SparseSymOperator::identity(4);
        let mut rng = crate::rng_from_seed(1);
        assert!(matches!(
            measurement_search(&op, 0, 10, &mut rng),
            Err(CoreError::DegenerateNullSpace { .. })
        ));
    }
}
