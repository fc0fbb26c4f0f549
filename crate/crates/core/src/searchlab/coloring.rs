//! Proper edge coloring with at most `max_degree + 1` colors
//! (Misra-Gries fan-rotation construction of the Vizing bound).

use crate::error::{CoreError, Result};

/// A proper edge coloring; `color_of[e]` matches the edge order it was
/// built from, colors are `0..chi`.
#[derive(Debug, Clone)]
pub struct EdgeColoring {
    color_of: Vec<usize>,
    chi: usize,
}

impl EdgeColoring {
    /// Wrap an explicit per-edge color assignment (properness is checked
    /// where the coloring is consumed).
    pub fn new(color_of: Vec<usize>) -> Self {
        let chi = color_of.iter().map(|&c| c + 1).max().unwrap_or(0);
        Self { color_of, chi }
    }

    pub fn color_of_edge(&self, e: usize) -> usize {
        self.color_of[e]
    }

    pub fn colors(&self) -> &[usize] {
        &self.color_of
    }

    pub fn chi(&self) -> usize {
        self.chi
    }
}

/// Deterministic Misra-Gries edge coloring; at most `max_degree + 1`
/// colors on a simple graph.
pub fn misra_gries_edge_color(m: usize, edges: &[(usize, usize)]) -> EdgeColoring {
    let mut mg = MisraGries::new(m, edges);
    mg.run();
    let chi = mg.color.iter().map(|c| c.unwrap() + 1).max().unwrap_or(0);
    EdgeColoring {
        color_of: mg.color.into_iter().map(Option::unwrap).collect(),
        chi,
    }
}

/// Checks that no two same-colored edges share a vertex.
pub fn verify_proper(m: usize, edges: &[(usize, usize)], coloring: &EdgeColoring) -> Result<()> {
    let mut seen: Vec<std::collections::HashMap<usize, usize>> = vec![Default::default(); m];
    for (e, &(u, v)) in edges.iter().enumerate() {
        let c = coloring.color_of_edge(e);
        for w in [u, v] {
            if let Some(&other) = seen[w].get(&c) {
                return Err(CoreError::ImproperColoring {
                    first: other,
                    second: e,
                });
            }
            seen[w].insert(c, e);
        }
    }
    Ok(())
}

struct MisraGries<'a> {
    edges: &'a [(usize, usize)],
    /// Incident edge indices per vertex.
    incident: Vec<Vec<usize>>,
    color: Vec<Option<usize>>,
    /// Palette size: max degree + 1.
    palette: usize,
}

impl<'a> MisraGries<'a> {
    fn new(m: usize, edges: &'a [(usize, usize)]) -> Self {
        let mut incident = vec![Vec::new(); m];
        for (e, &(u, v)) in edges.iter().enumerate() {
            debug_assert!(u != v && u < m && v < m);
            incident[u].push(e);
            incident[v].push(e);
        }
        let max_degree = incident.iter().map(Vec::len).max().unwrap_or(0);
        Self {
            edges,
            incident,
            color: vec![None; edges.len()],
            palette: max_degree + 1,
        }
    }

    fn other(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    fn is_free(&self, v: usize, c: usize) -> bool {
        !self.incident[v]
            .iter()
            .any(|&e| self.color[e] == Some(c))
    }

    fn free_color(&self, v: usize) -> usize {
        (0..self.palette)
            .find(|&c| self.is_free(v, c))
            .expect("palette covers degree + 1")
    }

    /// Colored edge at `v` with color `c`, if any.
    fn edge_with_color(&self, v: usize, c: usize) -> Option<usize> {
        self.incident[v]
            .iter()
            .copied()
            .find(|&e| self.color[e] == Some(c))
    }

    /// Maximal fan of `u` starting with the uncolored edge to `v`: each
    /// next fan edge is colored with a color free on the previous fan
    /// vertex.
    fn maximal_fan(&self, u: usize, v: usize, first_edge: usize) -> Vec<(usize, usize)> {
        let mut fan = vec![(first_edge, v)];
        let mut remaining: Vec<(usize, usize)> = self.incident[u]
            .iter()
            .filter(|&&e| e != first_edge && self.color[e].is_some())
            .map(|&e| (e, self.other(e, u)))
            .collect();
        loop {
            let last_vertex = fan.last().unwrap().1;
            let Some(pos) = remaining
                .iter()
                .position(|&(e, _)| self.is_free(last_vertex, self.color[e].unwrap()))
            else {
                break;
            };
            fan.push(remaining.remove(pos));
        }
        fan
    }

    /// Flip colors along the maximal path from `u` alternating `d, c, d, ...`.
    fn invert_cd_path(&mut self, u: usize, c: usize, d: usize) {
        let mut path = Vec::new();
        let mut cur_vertex = u;
        let mut cur_color = d;
        while let Some(e) = self.edge_with_color(cur_vertex, cur_color) {
            if path.contains(&e) {
                break; // closed up; cannot happen on a proper partial coloring
            }
            path.push(e);
            cur_vertex = self.other(e, cur_vertex);
            cur_color = if cur_color == d { c } else { d };
        }
        for e in path {
            let col = self.color[e].unwrap();
            self.color[e] = Some(if col == c { d } else { c });
        }
    }

    fn run(&mut self) {
        for e in 0..self.edges.len() {
            let (u, v) = self.edges[e];
            let fan = self.maximal_fan(u, v, e);
            let c = self.free_color(u);
            let d = self.free_color(fan.last().unwrap().1);
            if c != d {
                self.invert_cd_path(u, c, d);
            }
            let w = fan
                .iter()
                .position(|&(_, z)| self.is_free(z, d))
                .expect("inversion frees d on some fan vertex");
            // Rotate the fan prefix and finish with d.
            for i in 1..=w {
                self.color[fan[i - 1].0] = self.color[fan[i].0];
            }
            self.color[fan[w].0] = Some(d);
        }
    }
}

/// Exact minimum proper edge coloring by backtracking; exponential, only
/// for small oracle cases in tests.
pub fn brute_force_chromatic_index(m: usize, edges: &[(usize, usize)]) -> usize {
    let max_degree = {
        let mut deg = vec![0usize; m];
        for &(u, v) in edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    };
    for k in max_degree..=(max_degree + 1) {
        let mut colors = vec![usize::MAX; edges.len()];
        if backtrack(edges, &mut colors, 0, k) {
            return k;
        }
    }
    max_degree + 1
}

fn backtrack(edges: &[(usize, usize)], colors: &mut [usize], e: usize, k: usize) -> bool {
    if e == edges.len() {
        return true;
    }
    let (u, v) = edges[e];
    'next_color: for c in 0..k {
        for (f, &(a, b)) in edges.iter().enumerate().take(e) {
            if colors[f] == c && (a == u || a == v || b == u || b == v) {
                continue 'next_color;
            }
        }
        colors[e] = c;
        if backtrack(edges, colors, e + 1, k) {
            return true;
        }
        colors[e] = usize::MAX;
    }
    false
}
