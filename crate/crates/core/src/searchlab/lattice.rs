//! Search Hamiltonians `H = -|x><x| - c A` on periodic hypercubic
//! lattices, and the scan locating the coupling `c*` where the gap is
//! smallest (the avoided crossing between the marked-site defect level and
//! the delocalized band edge).

use nalgebra::DVector;

use crate::error::{CoreError, Result};
use crate::op::SparseSymOperator;
use crate::spectra::{self, EigOptions};

use super::graph::torus_adjacency;

/// A periodic lattice with its adjacency operator.
#[derive(Debug, Clone)]
pub struct LatticeFamily {
    pub side: usize,
    pub dims: usize,
    pub m: usize,
    adjacency: SparseSymOperator,
}

/// One scan point.
#[derive(Debug, Clone, Copy)]
pub struct ScanPoint {
    pub c: f64,
    pub gap: f64,
    pub p_x: f64,
    pub p_s: f64,
}

/// Scan outcome: the sampled curve and the refined minimum.
#[derive(Debug, Clone)]
pub struct LatticeScan {
    pub curve: Vec<ScanPoint>,
    pub c_star: f64,
    pub gap_at_c_star: f64,
    pub p_x: f64,
    pub p_s: f64,
    /// Whether the coarse minimum sat strictly inside the scanned range.
    pub interior_minimum: bool,
}

/// Build the lattice family; `side^dims` must stay within the dense cap.
pub fn lattice_family(side: usize, dims: usize) -> Result<LatticeFamily> {
    let m = side.pow(dims as u32);
    if m > spectra::DEFAULT_DENSE_CAP {
        return Err(CoreError::DenseCapExceeded {
            dim: m,
            cap: spectra::DEFAULT_DENSE_CAP,
        });
    }
    Ok(LatticeFamily {
        side,
        dims,
        m,
        adjacency: torus_adjacency(side, dims)?,
    })
}

impl LatticeFamily {
    pub fn adjacency(&self) -> &SparseSymOperator {
        &self.adjacency
    }

    /// `H = -|x><x| - c A`.
    pub fn hamiltonian(&self, x: usize, c: f64) -> Result<SparseSymOperator> {
        if x >= self.m {
            return Err(CoreError::VertexOutOfRange {
                vertex: x,
                count: self.m,
            });
        }
        let mut marked = SparseSymOperator::zeros(self.m);
        marked = marked.add_scaled(
            1.0,
            &SparseSymOperator::from_triplets(self.m, [(x, x, -1.0)])?,
        )?;
        marked.add_scaled(-c, &self.adjacency)
    }

    /// Gap between the ground and first excited level.
    pub fn gap_at(&self, x: usize, c: f64) -> Result<f64> {
        let h = self.hamiltonian(x, c)?;
        let report = spectra::eig_full(&h, &EigOptions::values_only())?;
        let evs = report.eigenvalues();
        Ok(evs[1] - evs[0])
    }

    /// `(gap, p_x, p_s)` at one coupling, from the full decomposition.
    pub fn point_at(&self, x: usize, c: f64) -> Result<ScanPoint> {
        let h = self.hamiltonian(x, c)?;
        let report = spectra::eig_full(&h, &EigOptions::default())?;
        let evs = report.eigenvalues();
        let psi = report.eigenvector(0).expect("vectors requested");
        let s = DVector::from_element(self.m, 1.0 / (self.m as f64).sqrt());
        let ov = psi.dot(&s);
        Ok(ScanPoint {
            c,
            gap: evs[1] - evs[0],
            p_x: psi[x] * psi[x],
            p_s: ov * ov,
        })
    }

    /// Coarse grid over `(c_lo, c_hi]` followed by golden-section
    /// refinement of the gap minimum to tolerance `tol`.
    pub fn scan(
        &self,
        x: usize,
        c_lo: f64,
        c_hi: f64,
        grid: usize,
        tol: f64,
    ) -> Result<LatticeScan> {
        assert!(grid >= 3 && c_hi > c_lo && c_lo >= 0.0);
        let mut curve = Vec::with_capacity(grid);
        let step = (c_hi - c_lo) / grid as f64;
        for i in 1..=grid {
            let c = c_lo + step * i as f64;
            curve.push(self.point_at(x, c)?);
        }
        let (min_idx, _) = curve
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.gap.partial_cmp(&b.1.gap).unwrap())
            .unwrap();
        let interior_minimum = min_idx > 0 && min_idx + 1 < curve.len();
        let lo = if min_idx == 0 {
            c_lo
        } else {
            curve[min_idx - 1].c
        };
        let hi = if min_idx + 1 == curve.len() {
            c_hi
        } else {
            curve[min_idx + 1].c
        };
        let c_star = self.golden_min(x, lo, hi, tol)?;
        let star = self.point_at(x, c_star)?;
        Ok(LatticeScan {
            curve,
            c_star,
            gap_at_c_star: star.gap,
            p_x: star.p_x,
            p_s: star.p_s,
            interior_minimum,
        })
    }

    fn golden_min(&self, x: usize, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
        let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
        let mut a = hi - inv_phi * (hi - lo);
        let mut b = lo + inv_phi * (hi - lo);
        let mut fa = self.gap_at(x, a)?;
        let mut fb = self.gap_at(x, b)?;
        while hi - lo > tol {
            if fa < fb {
                hi = b;
                b = a;
                fb = fa;
                a = hi - inv_phi * (hi - lo);
                fa = self.gap_at(x, a)?;
            } else {
                lo = a;
                a = b;
                fa = fb;
                b = lo + inv_phi * (hi - lo);
                fb = self.gap_at(x, b)?;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coupling_trivial_spectrum() {
        let fam = lattice_family(2, 5).unwrap();
        let p = fam.point_at(0, 0.0).unwrap();
        assert!((p.gap - 1.0).abs() <= 1e-9);
        assert!((p.p_x - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn dense_cap_respected() {
        assert!(matches!(
            lattice_family(6, 5),
            Err(CoreError::DenseCapExceeded { .. })
        ));
    }

    #[test]
    fn side_three_scan_has_interior_minimum() {
        let fam = lattice_family(3, 5).unwrap();
        let scan = fam.scan(0, 0.0, 0.5, 24, 1e-3).unwrap();
        assert!(scan.interior_minimum, "minimum must be interior");
        assert!(scan.gap_at_c_star > 0.0);
        assert!(scan.gap_at_c_star <= scan.curve.first().unwrap().gap);
        assert!(scan.gap_at_c_star <= scan.curve.last().unwrap().gap);
        // Ground-state weight redistributes between |x> and |s> near c*.
        assert!(scan.p_x >= 0.2, "p_x = {}", scan.p_x);
        assert!(scan.p_s >= 0.2, "p_s = {}", scan.p_s);
    }
}
