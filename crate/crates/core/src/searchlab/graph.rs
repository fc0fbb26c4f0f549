//! Regular-graph sampling with a measured expansion gate, plus periodic
//! lattice adjacency.

use rand::Rng;

use crate::error::{CoreError, Result};
use crate::op::SparseSymOperator;
use crate::spectra::{self, EigOptions};

/// How many freshly seeded graphs to try before giving up on the lambda
/// gate.
pub const EXPANDER_RETRY_CAP: usize = 50;

/// A simple connected d-regular graph with its measured expansion
/// parameter `lambda = max_{i >= 2} |mu_i| / d` over the adjacency
/// spectrum `mu_1 >= mu_2 >= ...`.
#[derive(Debug, Clone)]
pub struct RegularGraph {
    m: usize,
    degree: usize,
    /// Canonical edge list: `(min, max)` pairs, sorted.
    edges: Vec<(usize, usize)>,
    adjacency: SparseSymOperator,
    lambda: f64,
}

impl RegularGraph {
    pub fn vertex_count(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacency(&self) -> &SparseSymOperator {
        &self.adjacency
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Edge list serialization: one `u v` line per edge.
    pub fn write_edge_list<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# vertices {} degree {}", self.m, self.degree)?;
        for &(u, v) in &self.edges {
            writeln!(w, "{} {}", u, v)?;
        }
        Ok(())
    }

    /// Build from an explicit edge list, validating simplicity,
    /// d-regularity, and connectivity, and measuring lambda exactly.
    pub fn from_edge_list(m: usize, degree: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut deg = vec![0usize; m];
        let mut seen = std::collections::HashSet::new();
        let mut lists = vec![Vec::new(); m];
        for &(u, v) in &edges {
            if u >= m || v >= m {
                return Err(CoreError::VertexOutOfRange {
                    vertex: u.max(v),
                    count: m,
                });
            }
            if u == v || !seen.insert((u.min(v), u.max(v))) {
                return Err(CoreError::InfeasibleRegularGraph {
                    vertices: m,
                    degree,
                });
            }
            deg[u] += 1;
            deg[v] += 1;
            lists[u].push(v);
            lists[v].push(u);
        }
        if deg.iter().any(|&d| d != degree) || !is_connected(m, &lists) {
            return Err(CoreError::InfeasibleRegularGraph {
                vertices: m,
                degree,
            });
        }
        Self::from_edges(m, degree, edges)
    }

    fn from_edges(m: usize, degree: usize, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        edges.sort_unstable();
        let adjacency = SparseSymOperator::from_triplets(
            m,
            edges
                .iter()
                .flat_map(|&(u, v)| [(u, v, 1.0), (v, u, 1.0)]),
        )?;
        let lambda = measured_lambda(&adjacency, degree)?;
        Ok(Self {
            m,
            degree,
            edges,
            adjacency,
            lambda,
        })
    }
}

/// `max_{i >= 2} |mu_i| / d` from the exact adjacency spectrum.
fn measured_lambda(adjacency: &SparseSymOperator, degree: usize) -> Result<f64> {
    let report = spectra::eig_full(adjacency, &EigOptions::values_only())?;
    let evs = report.eigenvalues(); // ascending; top is the Perron value d
    let second = evs[evs.len() - 2];
    let bottom = evs[0];
    Ok(second.abs().max(bottom.abs()) / degree as f64)
}

fn is_connected(m: usize, adj_lists: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; m];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &v in &adj_lists[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == m
}

/// Complete graph `K_m` (the unique simple (m-1)-regular graph).
pub fn complete_graph(m: usize) -> Result<RegularGraph> {
    let mut edges = Vec::with_capacity(m * (m - 1) / 2);
    for u in 0..m {
        for v in (u + 1)..m {
            edges.push((u, v));
        }
    }
    RegularGraph::from_edges(m, m - 1, edges)
}

/// Sample a random d-regular simple connected graph whose measured lambda
/// is at most `lambda_max`, re-drawing up to [`EXPANDER_RETRY_CAP`] times
/// (the cap-exhausted error reports the best lambda seen).
///
/// Pair-matching sampler: stubs are paired uniformly at random, rejecting
/// self-loops and parallel edges, with dead-end restarts.
pub fn random_regular_expander<R: Rng>(
    m: usize,
    d: usize,
    lambda_max: f64,
    rng: &mut R,
) -> Result<RegularGraph> {
    if d < 3 || d >= m || (m * d) % 2 != 0 {
        return Err(CoreError::InfeasibleRegularGraph {
            vertices: m,
            degree: d,
        });
    }
    if d == m - 1 {
        // Degenerate request: the complete graph is forced.
        return complete_graph(m);
    }
    let mut best_lambda = f64::INFINITY;
    for _ in 0..EXPANDER_RETRY_CAP {
        let Some(edges) = try_regular_edges(m, d, rng) else {
            continue;
        };
        let adj_lists = {
            let mut lists = vec![Vec::with_capacity(d); m];
            for &(u, v) in &edges {
                lists[u].push(v);
                lists[v].push(u);
            }
            lists
        };
        if !is_connected(m, &adj_lists) {
            continue;
        }
        let graph = RegularGraph::from_edges(m, d, edges)?;
        if graph.lambda <= lambda_max {
            return Ok(graph);
        }
        best_lambda = best_lambda.min(graph.lambda);
    }
    Err(CoreError::ExpanderRetryExhausted {
        cap: EXPANDER_RETRY_CAP,
        best_lambda,
    })
}

/// One pairing-model attempt; `None` on a dead end.
fn try_regular_edges<R: Rng>(m: usize, d: usize, rng: &mut R) -> Option<Vec<(usize, usize)>> {
    let mut stubs: Vec<usize> = (0..m).flat_map(|v| std::iter::repeat(v).take(d)).collect();
    let mut adjacent = vec![false; m * m];
    let mut edges = Vec::with_capacity(m * d / 2);
    while !stubs.is_empty() {
        let mut placed = false;
        // A bounded number of uniform pair draws before declaring a dead end.
        for _ in 0..50 * stubs.len() {
            let i = rng.gen_range(0..stubs.len());
            let mut j = rng.gen_range(0..stubs.len() - 1);
            if j >= i {
                j += 1;
            }
            let (u, v) = (stubs[i], stubs[j]);
            if u == v || adjacent[u * m + v] {
                continue;
            }
            adjacent[u * m + v] = true;
            adjacent[v * m + u] = true;
            edges.push((u.min(v), u.max(v)));
            let (hi, lo) = (i.max(j), i.min(j));
            stubs.swap_remove(hi);
            stubs.swap_remove(lo);
            placed = true;
            break;
        }
        if !placed {
            return None;
        }
    }
    Some(edges)
}

/// Adjacency of the periodic hypercubic lattice with `side^dims` sites,
/// assembled as the circulant sum of one forward and one backward shift
/// per axis (for `side = 2` the two wrap onto the same neighbor, giving
/// entry weight 2; every row sums to `2 * dims` regardless).
pub fn torus_adjacency(side: usize, dims: usize) -> Result<SparseSymOperator> {
    assert!(side >= 2 && dims >= 1);
    let m = side.pow(dims as u32);
    let mut triplets = Vec::new();
    for v in 0..m {
        let mut stride = 1;
        for _ in 0..dims {
            let digit = (v / stride) % side;
            let up = v - digit * stride + ((digit + 1) % side) * stride;
            let down = v - digit * stride + ((digit + side - 1) % side) * stride;
            triplets.push((v, up, 1.0));
            triplets.push((v, down, 1.0));
            stride *= side;
        }
    }
    SparseSymOperator::from_triplets(m, triplets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_k4_lambda() {
        // Spectrum of K4 is {3, -1, -1, -1}: lambda = 1/3.
        let g = complete_graph(4).unwrap();
        assert_eq!(g.degree(), 3);
        assert!((g.lambda() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_request_is_complete_graph() {
        let mut rng = crate::rng_from_seed(1);
        let g = random_regular_expander(4, 3, 0.5, &mut rng).unwrap();
        assert_eq!(g.edges().len(), 6);
    }

    #[test]
    fn handshake_parity_rejected() {
        let mut rng = crate::rng_from_seed(1);
        assert!(matches!(
            random_regular_expander(7, 3, 0.9, &mut rng),
            Err(CoreError::InfeasibleRegularGraph { .. })
        ));
    }

    #[test]
    fn sampled_graph_is_regular_connected_and_deterministic() {
        let mut rng = crate::rng_from_seed(42);
        let g = random_regular_expander(16, 4, 0.9, &mut rng).unwrap();
        assert_eq!(g.vertex_count(), 16);
        for v in 0..16 {
            let row_sum: f64 = g.adjacency().row(v).iter().map(|&(_, x)| x).sum();
            assert_eq!(row_sum, 4.0);
            assert_eq!(g.adjacency().get(v, v), 0.0, "no self-loops");
        }
        assert!(g.lambda() <= 0.9);

        let mut rng2 = crate::rng_from_seed(42);
        let g2 = random_regular_expander(16, 4, 0.9, &mut rng2).unwrap();
        assert_eq!(g.edges(), g2.edges(), "same seed, same graph");
    }

    #[test]
    fn unreachable_lambda_reports_best() {
        let mut rng = crate::rng_from_seed(3);
        let err = random_regular_expander(24, 4, 0.01, &mut rng).unwrap_err();
        match err {
            CoreError::ExpanderRetryExhausted { best_lambda, .. } => {
                assert!(best_lambda > 0.01 && best_lambda < 1.0);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn torus_row_sums_and_side_two_doubling() {
        let a3 = torus_adjacency(3, 2).unwrap();
        for v in 0..9 {
            let s: f64 = a3.row(v).iter().map(|&(_, x)| x).sum();
            assert_eq!(s, 4.0);
        }
        let a2 = torus_adjacency(2, 2).unwrap();
        // side 2: both shifts land on the same neighbor.
        assert_eq!(a2.get(0, 1), 2.0);
        assert_eq!(a2.get(0, 2), 2.0);
        assert_eq!(a2.get(0, 3), 0.0);
    }
}
