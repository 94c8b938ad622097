//! Stiffness, mass and boundary-mass matrices, the system matrix
//! `A = K + ζ²M + ζM_Γ`, the weighted Gram matrix `B_ρ = K + ρ²M` and loads.
//!
//! The form is conjugate-linear in its second argument. Basis functions are
//! real, so `A` is complex symmetric and the adjoint matrix is `conj(A)`.

use std::sync::Arc;

use num_complex::Complex64 as c64;
use rayon::prelude::*;
use thiserror::Error;

use crate::diskmesh::{edge_point, Point};
use crate::femspace::{inverse_transpose, DofSpace};
use crate::sparse::{CsrMatrix, CsrPattern};
use crate::wavenumber::Wavenumber;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssemblyError {
    #[error("volume source is not finite at ({x}, {y})")]
    VolumeSource { x: f64, y: f64 },
    #[error("boundary source is not finite at ({x}, {y})")]
    BoundarySource { x: f64, y: f64 },
}

/// `K`, `M` and `M_Γ` on one shared pattern.
#[derive(Debug, Clone)]
pub struct Matrices {
    pattern: Arc<CsrPattern>,
    stiffness: Vec<f64>,
    mass: Vec<f64>,
    boundary_mass: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrices: Arc<Matrices>,
    pub zeta: Wavenumber,
    pub a: CsrMatrix<c64>,
    pub rhs: Vec<c64>,
}

#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub rho: f64,
    pub b: CsrMatrix<f64>,
}

const CHUNK: usize = 2048;

/// Per-element local matrices, row-major `n x n`.
struct Local {
    k: Vec<f64>,
    m: Vec<f64>,
    mg: Vec<f64>,
}

/// Triangle index to its boundary local edges.
fn boundary_lookup(space: &DofSpace) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); space.n_elements()];
    for be in space.mesh().boundary_edges() {
        out[be.triangle].push(be.local_edge);
    }
    out
}

pub fn sparsity_pattern(space: &DofSpace) -> CsrPattern {
    let mut rows = vec![Vec::new(); space.n_dofs()];
    for t in 0..space.n_elements() {
        let dofs = space.element_dofs(t);
        for &i in dofs {
            rows[i].extend_from_slice(dofs);
        }
    }
    CsrPattern::from_rows(space.n_dofs(), rows)
}

pub fn assemble_matrices(space: &DofSpace) -> Matrices {
    let pattern = Arc::new(sparsity_pattern(space));
    let nnz = pattern.nnz();
    let mut stiffness = vec![0.0; nnz];
    let mut mass = vec![0.0; nnz];
    let mut boundary_mass = vec![0.0; nnz];
    let n = space.local_dofs();
    let basis = space.basis();
    let rule = space.volume_rule();
    let tables: Vec<(Vec<f64>, Vec<[f64; 2]>)> = rule.points.iter().map(|&xi| basis.eval_with_grad(xi)).collect();
    let bnd = boundary_lookup(space);
    let line = space.boundary_rule();

    let local = |t: usize| -> Local {
        let geo = space.geometry(t);
        let mut k = vec![0.0; n * n];
        let mut m = vec![0.0; n * n];
        let mut mg = vec![0.0; n * n];
        let mut grads = vec![[0.0; 2]; n];
        for (q, &w) in rule.weights.iter().enumerate() {
            let xi = rule.points[q];
            let jac = geo.jacobian(xi);
            let det = crate::diskmesh::det(jac);
            let jit = inverse_transpose(jac);
            let (phi, dphi) = &tables[q];
            for (g, d) in grads.iter_mut().zip(dphi) {
                *g = [jit[0][0] * d[0] + jit[0][1] * d[1], jit[1][0] * d[0] + jit[1][1] * d[1]];
            }
            let wd = w * det;
            for i in 0..n {
                for j in i..n {
                    let kij = wd * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
                    let mij = wd * phi[i] * phi[j];
                    k[i * n + j] += kij;
                    m[i * n + j] += mij;
                }
            }
        }
        for &le in &bnd[t] {
            for (&s, &w) in line.points.iter().zip(&line.weights) {
                let xi = edge_point(le, s);
                let phi = basis.eval(xi);
                let ws = w * geo.edge_speed(le, s);
                for i in 0..n {
                    for j in i..n {
                        mg[i * n + j] += ws * phi[i] * phi[j];
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                k[i * n + j] = k[j * n + i];
                m[i * n + j] = m[j * n + i];
                mg[i * n + j] = mg[j * n + i];
            }
        }
        Local { k, m, mg }
    };

    let ne = space.n_elements();
    for start in (0..ne).step_by(CHUNK) {
        let end = (start + CHUNK).min(ne);
        let locals: Vec<Local> = (start..end).into_par_iter().map(local).collect();
        // scatter in element order so sums are bit-stable
        for (t, loc) in (start..end).zip(&locals) {
            let dofs = space.element_dofs(t);
            for (i, &gi) in dofs.iter().enumerate() {
                for (j, &gj) in dofs.iter().enumerate() {
                    let pos = pattern.position(gi, gj).expect("pattern covers element couplings");
                    stiffness[pos] += loc.k[i * n + j];
                    mass[pos] += loc.m[i * n + j];
                    boundary_mass[pos] += loc.mg[i * n + j];
                }
            }
        }
    }
    Matrices {
        pattern,
        stiffness,
        mass,
        boundary_mass,
    }
}

impl Matrices {
    pub fn pattern(&self) -> &Arc<CsrPattern> {
        &self.pattern
    }

    pub fn n_dofs(&self) -> usize {
        self.pattern.nrows()
    }

    pub fn stiffness(&self) -> CsrMatrix<f64> {
        CsrMatrix::new(Arc::clone(&self.pattern), self.stiffness.clone())
    }

    pub fn mass(&self) -> CsrMatrix<f64> {
        CsrMatrix::new(Arc::clone(&self.pattern), self.mass.clone())
    }

    pub fn boundary_mass(&self) -> CsrMatrix<f64> {
        CsrMatrix::new(Arc::clone(&self.pattern), self.boundary_mass.clone())
    }

    /// `K + ζ²M + ζM_Γ`.
    pub fn system_matrix(&self, zeta: c64) -> CsrMatrix<c64> {
        let z2 = zeta * zeta;
        let values = self
            .stiffness
            .iter()
            .zip(&self.mass)
            .zip(&self.boundary_mass)
            .map(|((&k, &m), &mg)| k + z2 * m + zeta * mg)
            .collect();
        CsrMatrix::new(Arc::clone(&self.pattern), values)
    }

    /// `K + ρ²M`.
    pub fn gram(&self, rho: f64) -> GramMatrix {
        assert!(rho > 0.0, "the Gram weight must be positive");
        let r2 = rho * rho;
        let values = self
            .stiffness
            .iter()
            .zip(&self.mass)
            .map(|(&k, &m)| k + r2 * m)
            .collect();
        GramMatrix {
            rho,
            b: CsrMatrix::new(Arc::clone(&self.pattern), values),
        }
    }
}

/// Load vector `(f, φ_i) + (g, φ_i)_Γ`.
pub fn assemble_load<F, G>(space: &DofSpace, f: F, g: G) -> Result<Vec<c64>, AssemblyError>
where
    F: Fn(Point) -> c64 + Sync,
    G: Fn(Point) -> c64 + Sync,
{
    let n = space.local_dofs();
    let basis = space.basis();
    let rule = space.volume_rule();
    let phis: Vec<Vec<f64>> = rule.points.iter().map(|&xi| basis.eval(xi)).collect();
    let bnd = boundary_lookup(space);
    let line = space.boundary_rule();
    let local = |t: usize| -> Result<Vec<c64>, AssemblyError> {
        let geo = space.geometry(t);
        let mut out = vec![c64::new(0.0, 0.0); n];
        for (q, &w) in rule.weights.iter().enumerate() {
            let (x, jac) = geo.map_with_jacobian(rule.points[q]);
            let fx = f(x);
            if !(fx.re.is_finite() && fx.im.is_finite()) {
                return Err(AssemblyError::VolumeSource { x: x[0], y: x[1] });
            }
            let wf = fx * (w * crate::diskmesh::det(jac));
            for (o, &p) in out.iter_mut().zip(&phis[q]) {
                *o += wf * p;
            }
        }
        for &le in &bnd[t] {
            for (&s, &w) in line.points.iter().zip(&line.weights) {
                let xi = edge_point(le, s);
                let x = geo.map(xi);
                let gx = g(x);
                if !(gx.re.is_finite() && gx.im.is_finite()) {
                    return Err(AssemblyError::BoundarySource { x: x[0], y: x[1] });
                }
                let wg = gx * (w * geo.edge_speed(le, s));
                for (o, p) in out.iter_mut().zip(basis.eval(xi)) {
                    *o += wg * p;
                }
            }
        }
        Ok(out)
    };
    let mut rhs = vec![c64::new(0.0, 0.0); space.n_dofs()];
    let ne = space.n_elements();
    for start in (0..ne).step_by(CHUNK) {
        let end = (start + CHUNK).min(ne);
        let locals: Vec<Vec<c64>> = (start..end).into_par_iter().map(local).collect::<Result<_, _>>()?;
        for (t, loc) in (start..end).zip(&locals) {
            for (&d, &v) in space.element_dofs(t).iter().zip(loc) {
                rhs[d] += v;
            }
        }
    }
    Ok(rhs)
}

pub fn assemble_system<F, G>(space: &DofSpace, zeta: Wavenumber, f: F, g: G) -> Result<AssembledSystem, AssemblyError>
where
    F: Fn(Point) -> c64 + Sync,
    G: Fn(Point) -> c64 + Sync,
{
    let matrices = Arc::new(assemble_matrices(space));
    system_from_matrices(space, matrices, zeta, f, g)
}

/// Reuse already assembled matrices for another frequency.
pub fn system_from_matrices<F, G>(
    space: &DofSpace,
    matrices: Arc<Matrices>,
    zeta: Wavenumber,
    f: F,
    g: G,
) -> Result<AssembledSystem, AssemblyError>
where
    F: Fn(Point) -> c64 + Sync,
    G: Fn(Point) -> c64 + Sync,
{
    let rhs = assemble_load(space, f, g)?;
    Ok(AssembledSystem {
        a: matrices.system_matrix(zeta.zeta()),
        matrices,
        zeta,
        rhs,
    })
}

pub fn assemble_gram(space: &DofSpace, rho: f64) -> GramMatrix {
    assemble_matrices(space).gram(rho)
}

/// Matrix of the adjoint form `a_{ζ̄}`: the entrywise conjugate of `A`.
pub fn apply_adjoint_system(sys: &AssembledSystem) -> CsrMatrix<c64> {
    sys.a.conj()
}
