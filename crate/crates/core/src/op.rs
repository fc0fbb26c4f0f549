//! Sparse real-symmetric operators.
//!
//! Storage is per-row sorted coordinate lists. Builders are expected to
//! insert both triangles with bit-identical values so that symmetry holds
//! exactly (`is_symmetric` tests `a_ij == a_ji` with no tolerance); products
//! of symmetric operators can pick up last-ulp asymmetry from summation
//! order, which [`SparseSymOperator::symmetrized`] repairs by pairwise
//! averaging.
//!
//! Text serialization uses a coordinate triplet format: a `%%dim N` header
//! followed by one `row col value` line per stored entry, 0-indexed. Values
//! are printed with Rust's shortest round-trip `f64` formatting, so a
//! write/read cycle is bit-exact.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};

use crate::error::{CoreError, Result};

/// Sparse real-symmetric operator with explicit dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymOperator {
    dim: usize,
    /// `rows[i]` holds `(j, a_ij)` sorted by `j`; exact zeros are dropped.
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseSymOperator {
    /// Zero operator of the given dimension.
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            rows: vec![Vec::new(); dim],
        }
    }

    /// Identity operator.
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            rows: (0..dim).map(|i| vec![(i, 1.0)]).collect(),
        }
    }

    /// Build from coordinate triplets; duplicate coordinates accumulate,
    /// entries that cancel to exact zero are dropped.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(CoreError::IndexOutOfBounds {
                    row: r,
                    col: c,
                    dim,
                });
            }
            *map.entry((r, c)).or_insert(0.0) += v;
        }
        let mut rows = vec![Vec::new(); dim];
        for ((r, c), v) in map {
            if v != 0.0 {
                rows[r].push((c, v));
            }
        }
        Ok(Self { dim, rows })
    }

    /// Dense matrix to sparse, keeping every nonzero entry exactly.
    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(CoreError::DimensionMismatch {
                left: m.nrows(),
                right: m.ncols(),
            });
        }
        let dim = m.nrows();
        let mut rows = vec![Vec::new(); dim];
        for i in 0..dim {
            for j in 0..dim {
                let v = m[(i, j)];
                if v != 0.0 {
                    rows[i].push((j, v));
                }
            }
        }
        Ok(Self { dim, rows })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored entries (both triangles).
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Entry lookup; absent entries are zero.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self.rows[i].binary_search_by_key(&j, |&(c, _)| c) {
            Ok(pos) => self.rows[i][pos].1,
            Err(_) => 0.0,
        }
    }

    /// Iterate stored entries as `(row, col, value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(j, v)| (i, j, v)))
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn matvec(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim);
        for i in 0..self.dim {
            let mut acc = 0.0;
            for &(j, a) in &self.rows[i] {
                acc += a * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(CoreError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let mut rows = vec![Vec::new(); self.dim];
        let mut scratch = vec![0.0f64; self.dim];
        let mut touched: Vec<usize> = Vec::new();
        for i in 0..self.dim {
            for &(k, a) in &self.rows[i] {
                for &(j, b) in &other.rows[k] {
                    if scratch[j] == 0.0 {
                        touched.push(j);
                    }
                    scratch[j] += a * b;
                }
            }
            touched.sort_unstable();
            let row: Vec<(usize, f64)> = touched
                .iter()
                .filter(|&&j| scratch[j] != 0.0)
                .map(|&j| (j, scratch[j]))
                .collect();
            for &j in &touched {
                scratch[j] = 0.0;
            }
            touched.clear();
            rows[i] = row;
        }
        Ok(Self {
            dim: self.dim,
            rows,
        })
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: f64, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(CoreError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let mut rows = vec![Vec::new(); self.dim];
        for i in 0..self.dim {
            rows[i] = merge_rows(&self.rows[i], &other.rows[i], 1.0, c);
        }
        Ok(Self {
            dim: self.dim,
            rows,
        })
    }

    pub fn scale(&self, c: f64) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&(j, v)| (j, c * v))
                    .filter(|&(_, v)| v != 0.0)
                    .collect()
            })
            .collect();
        Self {
            dim: self.dim,
            rows,
        }
    }

    /// Kronecker product; index convention `(i_a * dim_b + i_b)`.
    pub fn kron(&self, other: &Self) -> Self {
        let dim = self.dim * other.dim;
        let mut rows = vec![Vec::new(); dim];
        for (ia, ja, va) in self.iter() {
            for (ib, jb, vb) in other.iter() {
                let v = va * vb;
                if v != 0.0 {
                    rows[ia * other.dim + ib].push((ja * other.dim + jb, v));
                }
            }
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|&(j, _)| j);
        }
        Self { dim, rows }
    }

    /// Exact symmetry test: `a_ij == a_ji` bitwise for every stored entry.
    pub fn is_symmetric(&self) -> bool {
        self.iter().all(|(i, j, v)| self.get(j, i) == v)
    }

    /// First asymmetric coordinate, if any.
    pub fn asymmetry_witness(&self) -> Option<(usize, usize)> {
        self.iter()
            .find(|&(i, j, v)| self.get(j, i) != v)
            .map(|(i, j, _)| (i, j))
    }

    /// `(A + A^T) / 2` with one shared computation per pair, so the output
    /// is exactly symmetric.
    pub fn symmetrized(&self) -> Self {
        let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, v) in self.iter() {
            if i <= j {
                let avg = 0.5 * (v + self.get(j, i));
                if avg != 0.0 {
                    map.insert((i, j), avg);
                }
            } else if self.get(j, i) == 0.0 {
                // lower-triangle entry with no upper partner
                let avg = 0.5 * v;
                if avg != 0.0 {
                    map.insert((j, i), avg);
                }
            }
        }
        let mut rows = vec![Vec::new(); self.dim];
        for (&(i, j), &v) in &map {
            rows[i].push((j, v));
            if i != j {
                rows[j].push((i, v));
            }
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|&(j, _)| j);
        }
        Self {
            dim: self.dim,
            rows,
        }
    }

    /// Largest entry magnitude (max norm).
    pub fn max_abs(&self) -> f64 {
        self.iter().map(|(_, _, v)| v.abs()).fold(0.0, f64::max)
    }

    /// `max |A - B|` entrywise.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.dim != other.dim {
            return Err(CoreError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let mut max = 0.0f64;
        for i in 0..self.dim {
            for (j, d) in merge_rows(&self.rows[i], &other.rows[i], 1.0, -1.0) {
                let _ = j;
                max = max.max(d.abs());
            }
        }
        Ok(max)
    }

    /// Write the `%%dim`-headed triplet text form.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "%%dim {}", self.dim)?;
        for (i, j, v) in self.iter() {
            writeln!(w, "{} {} {}", i, j, v)?;
        }
        Ok(())
    }

    /// Parse the triplet text form.
    pub fn read_triplets<R: BufRead>(r: R) -> Result<Self> {
        let mut dim: Option<usize> = None;
        let mut triplets = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("%%dim") {
                if dim.is_some() {
                    return Err(CoreError::TripletParse {
                        line: lineno,
                        message: "duplicate %%dim header".into(),
                    });
                }
                dim = Some(rest.trim().parse().map_err(|e| CoreError::TripletParse {
                    line: lineno,
                    message: format!("bad dimension: {e}"),
                })?);
                continue;
            }
            let d = dim.ok_or_else(|| CoreError::TripletParse {
                line: lineno,
                message: "entry before %%dim header".into(),
            })?;
            let mut parts = line.split_whitespace();
            let parse3 = (|| {
                let r: usize = parts.next()?.parse().ok()?;
                let c: usize = parts.next()?.parse().ok()?;
                let v: f64 = parts.next()?.parse().ok()?;
                if parts.next().is_some() {
                    return None;
                }
                Some((r, c, v))
            })();
            let (r, c, v) = parse3.ok_or_else(|| CoreError::TripletParse {
                line: lineno,
                message: "expected `row col value`".into(),
            })?;
            if r >= d || c >= d {
                return Err(CoreError::IndexOutOfBounds { row: r, col: c, dim: d });
            }
            triplets.push((r, c, v));
        }
        let dim = dim.ok_or_else(|| CoreError::TripletParse {
            line: 0,
            message: "missing %%dim header".into(),
        })?;
        Self::from_triplets(dim, triplets)
    }
}

/// Merge two sorted sparse rows into `a*x + b*y`, dropping exact zeros.
fn merge_rows(x: &[(usize, f64)], y: &[(usize, f64)], a: f64, b: f64) -> Vec<(usize, f64)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut p, mut q) = (0, 0);
    while p < x.len() || q < y.len() {
        let v = if q == y.len() || (p < x.len() && x[p].0 < y[q].0) {
            let e = (x[p].0, a * x[p].1);
            p += 1;
            e
        } else if p == x.len() || y[q].0 < x[p].0 {
            let e = (y[q].0, b * y[q].1);
            q += 1;
            e
        } else {
            let e = (x[p].0, a * x[p].1 + b * y[q].1);
            p += 1;
            q += 1;
            e
        };
        if v.1 != 0.0 {
            out.push(v);
        }
    }
    out
}
