//! H¹-conforming Lagrange spaces of uniform degree on a [`Mesh`].

pub mod basis;
pub mod quadrature;

use std::sync::Arc;

use num_complex::Complex64 as c64;
use thiserror::Error;

use crate::diskmesh::{ElementGeometry, Mesh, Point};
use basis::{LagrangeBasis, NodeKind};
use quadrature::{LineRule, QuadratureRule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FemSpaceError {
    #[error("unsupported polynomial degree {0} (supported: 1..={max})", max = basis::MAX_DEGREE)]
    UnsupportedDegree(usize),
    #[error("unsupported quadrature order {0}")]
    UnsupportedQuadratureOrder(usize),
}

#[derive(Debug, Clone)]
pub struct DofSpace {
    mesh: Arc<Mesh>,
    basis: LagrangeBasis,
    n_dofs: usize,
    /// `n_triangles * basis.len()` global indices, element-major
    element_dofs: Vec<usize>,
    boundary_dofs: Vec<usize>,
    geometries: Vec<ElementGeometry>,
    volume_rule: QuadratureRule,
    boundary_rule: LineRule,
}

pub fn build_space(mesh: Arc<Mesh>, p: usize) -> Result<DofSpace, FemSpaceError> {
    DofSpace::new(mesh, p)
}

impl DofSpace {
    pub fn new(mesh: Arc<Mesh>, p: usize) -> Result<Self, FemSpaceError> {
        let basis = LagrangeBasis::new(p)?;
        let nv = mesh.n_vertices();
        let ne = mesh.n_edges();
        let nint = basis.n_interior();
        let n_dofs = nv + (p - 1) * ne + nint * mesh.n_triangles();
        let nloc = basis.len();
        let mut element_dofs = Vec::with_capacity(nloc * mesh.n_triangles());
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let mut k = 0;
            for kind in basis.kinds() {
                let dof = match *kind {
                    NodeKind::Vertex(v) => tri[v],
                    NodeKind::Edge(e, j) => {
                        let ge = mesh.triangle_edges()[t][e];
                        // global edge dofs run from the lower vertex index upward
                        let pos = if tri[e] == mesh.edges()[ge][0] {
                            j - 1
                        } else {
                            p - 1 - j
                        };
                        nv + ge * (p - 1) + pos
                    }
                    NodeKind::Interior => {
                        k += 1;
                        nv + ne * (p - 1) + t * nint + k - 1
                    }
                };
                element_dofs.push(dof);
            }
        }
        let mut boundary_dofs = Vec::new();
        for be in mesh.boundary_edges() {
            let [a, b] = mesh.edges()[be.edge];
            boundary_dofs.push(a);
            boundary_dofs.push(b);
            boundary_dofs.extend((0..p - 1).map(|j| nv + be.edge * (p - 1) + j));
        }
        boundary_dofs.sort_unstable();
        boundary_dofs.dedup();
        let geometries = (0..mesh.n_triangles()).map(|t| mesh.element_geometry(t)).collect();
        Ok(Self {
            volume_rule: QuadratureRule::triangle(2 * p + 2)?,
            boundary_rule: LineRule::gauss_legendre(p + 2),
            mesh,
            basis,
            n_dofs,
            element_dofs,
            boundary_dofs,
            geometries,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn basis(&self) -> &LagrangeBasis {
        &self.basis
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn n_elements(&self) -> usize {
        self.mesh.n_triangles()
    }

    pub fn local_dofs(&self) -> usize {
        self.basis.len()
    }

    pub fn element_dofs(&self, t: usize) -> &[usize] {
        let n = self.basis.len();
        &self.element_dofs[t * n..(t + 1) * n]
    }

    pub fn boundary_dofs(&self) -> &[usize] {
        &self.boundary_dofs
    }

    pub fn geometry(&self, t: usize) -> &ElementGeometry {
        &self.geometries[t]
    }

    pub fn volume_rule(&self) -> &QuadratureRule {
        &self.volume_rule
    }

    pub fn boundary_rule(&self) -> &LineRule {
        &self.boundary_rule
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate<F: Fn(Point) -> c64>(&self, f: F) -> Vec<c64> {
        let mut out = vec![c64::new(0.0, 0.0); self.n_dofs];
        let nodes = self.basis.nodes();
        for t in 0..self.n_elements() {
            let geo = &self.geometries[t];
            for (&dof, &xi) in self.element_dofs(t).iter().zip(&nodes) {
                out[dof] = f(geo.map(xi));
            }
        }
        out
    }

    /// Value of the discrete function at reference point `xi` of element `t`.
    pub fn evaluate(&self, coeffs: &[c64], t: usize, xi: Point) -> c64 {
        let phi = self.basis.eval(xi);
        self.element_dofs(t)
            .iter()
            .zip(&phi)
            .map(|(&d, &w)| coeffs[d] * w)
            .sum()
    }

    /// Physical point and physical gradient of the discrete function.
    pub fn evaluate_with_grad(&self, coeffs: &[c64], t: usize, xi: Point) -> (c64, [c64; 2]) {
        let (phi, dphi) = self.basis.eval_with_grad(xi);
        let jac = self.geometries[t].jacobian(xi);
        let jinv = inverse_transpose(jac);
        let mut u = c64::new(0.0, 0.0);
        let mut g = [c64::new(0.0, 0.0); 2];
        for ((&d, &w), dw) in self.element_dofs(t).iter().zip(&phi).zip(&dphi) {
            let gx = jinv[0][0] * dw[0] + jinv[0][1] * dw[1];
            let gy = jinv[1][0] * dw[0] + jinv[1][1] * dw[1];
            u += coeffs[d] * w;
            g[0] += coeffs[d] * gx;
            g[1] += coeffs[d] * gy;
        }
        (u, g)
    }
}

/// `J^{-T}`, mapping reference gradients to physical ones.
pub fn inverse_transpose(j: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    [[j[1][1] / det, -j[1][0] / det], [-j[0][1] / det, j[0][0] / det]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diskmesh::{default_geometry_degree, edge_point, make_disk_mesh};

    fn space(level: usize, p: usize) -> DofSpace {
        let mesh = make_disk_mesh(level, default_geometry_degree(p)).unwrap();
        DofSpace::new(Arc::new(mesh), p).unwrap()
    }

    #[test]
    fn dof_counts() {
        assert_eq!(space(0, 1).n_dofs(), 7);
        assert_eq!(space(0, 2).n_dofs(), 19);
        for p in 1..=4 {
            let s = space(2, p);
            let m = s.mesh();
            let expect = m.n_vertices() + (p - 1) * m.n_edges() + (p - 1) * (p.max(2) - 2) / 2 * m.n_triangles();
            assert_eq!(s.n_dofs(), expect);
        }
        assert!(DofSpace::new(Arc::new(make_disk_mesh(0, 1).unwrap()), 0).is_err());
    }

    #[test]
    fn element_maps_are_injective_and_cover_all_dofs() {
        let s = space(2, 4);
        let mut hit = vec![false; s.n_dofs()];
        for t in 0..s.n_elements() {
            let mut d = s.element_dofs(t).to_vec();
            d.iter().for_each(|&i| hit[i] = true);
            d.sort_unstable();
            d.dedup();
            assert_eq!(d.len(), s.local_dofs());
        }
        assert!(hit.iter().all(|&h| h));
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        for p in 1..=4usize {
            // straight elements keep polynomials polynomial
            let mesh = make_disk_mesh(1, 1).unwrap();
            let s = DofSpace::new(Arc::new(mesh), p).unwrap();
            let f = |x: Point| {
                let v: f64 = (0..=p)
                    .map(|k| (k as f64 + 1.0) * x[0].powi(k as i32) * x[1].powi((p - k) as i32))
                    .sum();
                c64::new(v, -0.5 * v)
            };
            let c = s.interpolate(f);
            for t in 0..s.n_elements() {
                for xi in [[0.11, 0.23], [0.6, 0.2], [0.05, 0.9]] {
                    let x = s.geometry(t).map(xi);
                    assert!((s.evaluate(&c, t, xi) - f(x)).norm() < 1e-12, "p={p}");
                }
            }
        }
    }

    #[test]
    fn traces_agree_across_interior_edges() {
        for p in 1..=4 {
            let s = space(2, p);
            let m = s.mesh();
            let c: Vec<c64> = (0..s.n_dofs())
                .map(|i| c64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
                .collect();
            let mut owners: std::collections::HashMap<usize, Vec<(usize, usize)>> = Default::default();
            for t in 0..m.n_triangles() {
                for e in 0..3 {
                    owners.entry(m.triangle_edges()[t][e]).or_default().push((t, e));
                }
            }
            for list in owners.values().filter(|l| l.len() == 2) {
                let (t0, e0) = list[0];
                let (t1, e1) = list[1];
                for &s_ in &s.boundary_rule().points {
                    // the neighbour runs along the shared edge in the opposite direction
                    let a = s.evaluate(&c, t0, edge_point(e0, s_));
                    let b = s.evaluate(&c, t1, edge_point(e1, 1.0 - s_));
                    assert!((a - b).norm() < 1e-12, "p={p}");
                }
            }
        }
    }

    #[test]
    fn boundary_dofs_are_on_the_circle() {
        let s = space(2, 3);
        let nodes = s.basis().nodes();
        let mut pos = vec![[0.0; 2]; s.n_dofs()];
        for t in 0..s.n_elements() {
            for (&d, &xi) in s.element_dofs(t).iter().zip(&nodes) {
                pos[d] = s.geometry(t).map(xi);
            }
        }
        for &d in s.boundary_dofs() {
            let r = (pos[d][0].powi(2) + pos[d][1].powi(2)).sqrt();
            assert!((r - 1.0).abs() < 1e-14);
        }
        assert_eq!(s.boundary_dofs().len(), 3 * s.mesh().boundary_edges().len());
    }
}
