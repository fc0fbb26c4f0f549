//! Frustration-free search instances over expander graphs.
//!
//! For a marked vertex `x` on a d-regular graph with M vertices, each edge
//! (y, z) carries the unnormalized state `phi = c(y)|y> - c(z)|z>` with
//! amplitude `c(y) = 1/sqrt(d(M-1))` at the marked vertex and `1/sqrt(d)`
//! elsewhere. The raw Hamiltonian sums the outer products `|phi><phi|`;
//! the frustration-free form normalizes each edge into a rank-1 projector
//! and groups them by edge color, so the term count equals the chromatic
//! index rather than the edge count. Both share the unique ground state
//!
//! ```text
//! psi_x = (1/sqrt(2)) |x> + (1/sqrt(2(M-1))) sum_{y != x} |y>
//! ```
//!
//! at eigenvalue 0, and the gap of either form is at least `1/(4(M-1))`.
//!
//! Vertex-identity tests (the classical search oracle) are counted: the
//! amplitude function queries "is y marked" once per evaluation, twice per
//! edge during assembly.

use std::cell::Cell;

use nalgebra::DVector;

use super::coloring::{verify_proper, EdgeColoring};
use super::graph::RegularGraph;
use crate::error::{CoreError, Result};
use crate::ffham::{FFHamiltonian, ProjectorTerm};
use crate::op::SparseSymOperator;
use crate::spectra::{self, EigOptions};

/// Classical oracle for "is this the marked vertex", with call accounting.
struct SearchOracle {
    marked: usize,
    calls: Cell<u64>,
}

impl SearchOracle {
    fn is_marked(&self, y: usize) -> bool {
        self.calls.set(self.calls.get() + 1);
        y == self.marked
    }
}

/// A built search instance: graph, coloring, the grouped frustration-free
/// Hamiltonian (one term per color), the raw unnormalized form, and the
/// analytic ground state.
#[derive(Debug, Clone)]
pub struct SearchInstance {
    pub graph: RegularGraph,
    pub coloring: EdgeColoring,
    pub marked: usize,
    /// Grouped-by-color frustration-free form; term count = chi.
    pub ham: FFHamiltonian,
    /// Raw `sum_edges |phi><phi|` (unnormalized projectors).
    pub h_unnormalized: SparseSymOperator,
    /// Analytic ground state.
    pub psi: DVector<f64>,
    /// Vertex-identity tests consumed during assembly.
    pub oracle_calls: u64,
}

/// The analytic ground state of a search instance on M vertices.
pub fn search_ground_state(m: usize, x: usize) -> DVector<f64> {
    let off = 1.0 / (2.0 * (m as f64 - 1.0)).sqrt();
    let mut psi = DVector::from_element(m, off);
    psi[x] = 1.0 / 2.0f64.sqrt();
    psi
}

/// Assemble the search instance for marked vertex `x`.
pub fn build_search_ff(
    graph: &RegularGraph,
    coloring: &EdgeColoring,
    x: usize,
) -> Result<SearchInstance> {
    let m = graph.vertex_count();
    if x >= m {
        return Err(CoreError::VertexOutOfRange {
            vertex: x,
            count: m,
        });
    }
    verify_proper(m, graph.edges(), coloring)?;

    let d = graph.degree() as f64;
    let oracle = SearchOracle {
        marked: x,
        calls: Cell::new(0),
    };
    let amp = |y: usize| -> f64 {
        if oracle.is_marked(y) {
            1.0 / (d * (m as f64 - 1.0)).sqrt()
        } else {
            1.0 / d.sqrt()
        }
    };

    let mut raw = Vec::new();
    let mut grouped: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); coloring.chi()];
    for (e, &(y, z)) in graph.edges().iter().enumerate() {
        let (cy, cz) = (amp(y), amp(z));
        let norm_sq = cy * cy + cz * cz;
        let entries = [
            (y, y, cy * cy),
            (z, z, cz * cz),
            (y, z, -cy * cz),
            (z, y, -cy * cz),
        ];
        raw.extend_from_slice(&entries);
        let k = coloring.color_of_edge(e);
        grouped[k].extend(entries.iter().map(|&(r, c, v)| (r, c, v / norm_sq)));
    }

    let h_unnormalized = SparseSymOperator::from_triplets(m, raw)?;
    let mut terms = Vec::with_capacity(coloring.chi());
    for triplets in grouped {
        terms.push(ProjectorTerm::new(
            SparseSymOperator::from_triplets(m, triplets)?,
            1.0,
        )?);
    }
    Ok(SearchInstance {
        graph: graph.clone(),
        coloring: coloring.clone(),
        marked: x,
        ham: FFHamiltonian::new(terms)?,
        h_unnormalized,
        psi: search_ground_state(m, x),
        oracle_calls: oracle.calls.get(),
    })
}

/// Gap certificate from dense diagonalization of the grouped form.
#[derive(Debug, Clone)]
pub struct GapCertificate {
    pub m: usize,
    pub degree: usize,
    pub lambda: f64,
    pub chi: usize,
    /// Measured spectral gap about the zero eigenvalue.
    pub gap: f64,
    /// `1/(4(M-1))`.
    pub bound: f64,
    pub passed: bool,
}

/// Measure the gap of the grouped Hamiltonian and compare against
/// `1/(4(M-1))`. A failed bound is a report entry, not an error.
pub fn gap_certificate(instance: &SearchInstance) -> Result<GapCertificate> {
    let m = instance.graph.vertex_count();
    let report = spectra::eig_full(&instance.ham.assemble(), &EigOptions::values_only())?;
    let gap = report.gap_about(0.0)?;
    let bound = 1.0 / (4.0 * (m as f64 - 1.0));
    Ok(GapCertificate {
        m,
        degree: instance.graph.degree(),
        lambda: instance.graph.lambda(),
        chi: instance.coloring.chi(),
        gap,
        bound,
        passed: gap >= bound,
    })
}
