//! Single-site Metropolis dynamics over path configurations, with hitting
//! time of the marked index as the operational mixing proxy.
//!
//! A move picks a slice `r` uniformly, proposes `z'` uniformly from the
//! slice-operator support row of `z^{r-1}` (a set independent of the
//! current `z^r`, so the proposal is symmetric), and accepts with the
//! ratio of the two adjacent factors. Every factor evaluation is one
//! matrix-element query of the underlying Hamiltonian and is charged to
//! the oracle counter.

use rand::Rng;

use nalgebra::DMatrix;

use crate::error::{CoreError, Result};

use super::paths::PathEnsemble;

/// Outcome of one chain run.
#[derive(Debug, Clone, Copy)]
pub struct MixStats {
    pub m: usize,
    pub beta: f64,
    pub eta: f64,
    pub p: usize,
    pub seed: u64,
    /// Starting value of the constant initial path.
    pub start: usize,
    /// First step at which some slice equals the marked index (0 when the
    /// start already contains it); `None` if censored at `max_steps`.
    pub hitting_time: Option<u64>,
    pub steps_run: u64,
    pub accepted: u64,
    pub oracle_calls: u64,
}

/// Run the chain from a uniform random constant path until the marked
/// index appears in some slice or `max_steps` elapse.
///
/// Constant paths are the tractable uniform start: a configuration with
/// independently uniform slices has zero weight almost surely, while a
/// constant path is always admissible.
pub fn metropolis_mix(
    ens: &PathEnsemble,
    marked: usize,
    seed: u64,
    max_steps: u64,
) -> Result<MixStats> {
    let m = ens.dim();
    if marked >= m {
        return Err(CoreError::VertexOutOfRange {
            vertex: marked,
            count: m,
        });
    }
    ensure_ergodic(ens)?;
    let p = ens.slices();
    let mut rng = crate::rng_from_seed(seed);
    let start = rng.gen_range(0..m);
    let mut z = vec![start; p];

    let mut stats = MixStats {
        m,
        beta: ens.beta(),
        eta: ens.eta(),
        p,
        seed,
        start,
        hitting_time: None,
        steps_run: 0,
        accepted: 0,
        oracle_calls: 0,
    };
    if start == marked {
        stats.hitting_time = Some(0);
        return Ok(stats);
    }

    for step in 1..=max_steps {
        stats.steps_run = step;
        let r = rng.gen_range(0..p);
        let prev = z[(r + p - 1) % p];
        let next = z[(r + 1) % p];
        let row = ens.neighbors(prev);
        let proposal = row[rng.gen_range(0..row.len())].0;
        let current = z[r];
        // Two factors change; old and new each cost two lookups.
        stats.oracle_calls += 4;
        let (num, den) = if p == 1 {
            (
                ens.factor(proposal, proposal),
                ens.factor(current, current),
            )
        } else {
            (
                ens.factor(prev, proposal) * ens.factor(proposal, next),
                ens.factor(prev, current) * ens.factor(current, next),
            )
        };
        debug_assert!(den > 0.0, "current configuration must stay admissible");
        if num > 0.0 && (num >= den || rng.gen::<f64>() < num / den) {
            z[r] = proposal;
            stats.accepted += 1;
            if proposal == marked {
                stats.hitting_time = Some(step);
                return Ok(stats);
            }
        }
    }
    Ok(stats)
}

/// The proposal graph is ergodic iff the slice support is connected
/// (positive diagonals provide aperiodicity).
fn ensure_ergodic(ens: &PathEnsemble) -> Result<()> {
    let m = ens.dim();
    let mut seen = vec![false; m];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &(v, w) in ens.neighbors(u) {
            if w > 0.0 && !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    if count == m {
        Ok(())
    } else {
        Err(CoreError::ReduciblePerturbation)
    }
}

/// Enumerate all `M^p` configurations (tiny cases only) and build the
/// exact one-step transition matrix of the chain, for detailed-balance
/// and stationarity oracles.
pub fn chain_transition_matrix(ens: &PathEnsemble) -> (Vec<Vec<usize>>, Vec<f64>, DMatrix<f64>) {
    let m = ens.dim();
    let p = ens.slices();
    let states: Vec<Vec<usize>> = enumerate_states(m, p);
    let weights: Vec<f64> = states.iter().map(|z| ens.weight(z)).collect();
    let index_of = |z: &[usize]| -> usize {
        z.iter().fold(0usize, |acc, &d| acc * m + d)
    };
    let n = states.len();
    let mut t = DMatrix::<f64>::zeros(n, n);
    for (si, z) in states.iter().enumerate() {
        if weights[si] == 0.0 {
            t[(si, si)] = 1.0; // inadmissible states are absorbing and unreachable
            continue;
        }
        let mut stay = 1.0;
        for r in 0..p {
            let prev = z[(r + p - 1) % p];
            let next = z[(r + 1) % p];
            let row = ens.neighbors(prev);
            let pick = 1.0 / (p as f64 * row.len() as f64);
            for &(proposal, _) in row {
                if proposal == z[r] {
                    continue;
                }
                let (num, den) = if p == 1 {
                    (ens.factor(proposal, proposal), ens.factor(z[r], z[r]))
                } else {
                    (
                        ens.factor(prev, proposal) * ens.factor(proposal, next),
                        ens.factor(prev, z[r]) * ens.factor(z[r], next),
                    )
                };
                let accept = if num <= 0.0 { 0.0 } else { (num / den).min(1.0) };
                if accept > 0.0 {
                    let mut znew = z.clone();
                    znew[r] = proposal;
                    t[(si, index_of(&znew))] += pick * accept;
                    stay -= pick * accept;
                }
            }
        }
        t[(si, si)] = stay;
    }
    (states, weights, t)
}

fn enumerate_states(m: usize, p: usize) -> Vec<Vec<usize>> {
    let total = m.pow(p as u32);
    assert!(total <= 1 << 20, "enumeration oracle is for tiny cases only");
    let mut out = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut z = vec![0usize; p];
        for r in (0..p).rev() {
            z[r] = idx % m;
            idx /= m;
        }
        out.push(z);
    }
    out
}
