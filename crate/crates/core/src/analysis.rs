//! Error norms, best approximation, discrete inf-sup and continuity
//! constants, the boundary constant `C_b`, the adjoint approximability
//! estimate `η̂` and quasi-optimality ratios.

use std::f64::consts::PI;
use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64 as c64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::assembly::{assemble_load, assemble_matrices, AssemblyError, Matrices};
use crate::diskmesh::{child_to_parent, det, Point};
use crate::exactsol::{ExactSolError, ExactSolution};
use crate::femspace::quadrature::{QuadratureRule, MAX_TRIANGLE_ORDER};
use crate::femspace::{inverse_transpose, DofSpace, FemSpaceError};
use crate::linalg::{
    csr_to_dense, csr_to_dense_real, generalized_singular_range, max_generalized_eigenvalue, singular_range,
    whiten_real, Factorization, LinalgError, SpdFactor, DENSE_CAP,
};
use crate::sparse::{dot, CsrMatrix};
use crate::wavenumber::Wavenumber;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    ExactSolution(#[from] ExactSolError),
    #[error(transparent)]
    FemSpace(#[from] FemSpaceError),
    #[error("best approximation error underflows: the solution is resolved to machine precision")]
    Resolved,
    #[error("reference space is not a refinement of the space: {0}")]
    InvalidReference(String),
}

/// A space with its assembled `K`, `M`, `M_Γ`.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub space: Arc<DofSpace>,
    pub matrices: Arc<Matrices>,
}

impl Discretization {
    pub fn new(space: Arc<DofSpace>) -> Self {
        let matrices = Arc::new(assemble_matrices(&space));
        Self { space, matrices }
    }

    pub fn n_dofs(&self) -> usize {
        self.space.n_dofs()
    }
}

fn zero(_: Point) -> c64 {
    c64::new(0.0, 0.0)
}

/// Galerkin solution of `a_ζ(u, v) = (f, v) + (g, v)_Γ`.
pub fn solve_helmholtz<F, G>(disc: &Discretization, z: &Wavenumber, f: F, g: G) -> Result<Vec<c64>, AnalysisError>
where
    F: Fn(Point) -> c64 + Sync,
    G: Fn(Point) -> c64 + Sync,
{
    let rhs = assemble_load(&disc.space, f, g)?;
    let a = disc.matrices.system_matrix(z.zeta());
    Ok(Factorization::new(&a)?.solve(&rhs)?)
}

/// Solution of the disk problem with `f = 1`, `g = 0`.
pub fn solve_model_problem(disc: &Discretization, z: &Wavenumber) -> Result<Vec<c64>, AnalysisError> {
    solve_helmholtz(disc, z, |_| c64::new(1.0, 0.0), zero)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ErrorReport {
    pub l2_error: f64,
    pub h1_semi_error: f64,
    /// `(|u - u_S|²_{H¹} + ρ²‖u - u_S‖²)^{1/2}`
    pub weighted_error: f64,
    pub rel_l2: f64,
    pub rel_h1_semi: f64,
    pub rel_weighted: f64,
    pub best_approx_weighted_error: Option<f64>,
    pub rho: f64,
}

/// Triangle rule used for norms against the exact solution: exactness
/// `2p + 4`, raised with the number of oscillations per element.
pub fn error_quadrature_order(p: usize, modulus: f64, h: f64) -> usize {
    (2 * p + 4 + (2.0 * modulus * h).ceil() as usize).min(MAX_TRIANGLE_ORDER)
}

/// Squared norms `(‖e‖², |e|²_{H¹}, ‖u‖², |u|²_{H¹})` with `e = u - u_S`.
fn error_pieces<U>(space: &DofSpace, coeffs: &[c64], exact: U, order: usize) -> Result<[f64; 4], AnalysisError>
where
    U: Fn(Point) -> (c64, [c64; 2]) + Sync,
{
    let rule = QuadratureRule::triangle(order)?;
    let basis = space.basis();
    let tables: Vec<(Vec<f64>, Vec<[f64; 2]>)> = rule.points.iter().map(|&xi| basis.eval_with_grad(xi)).collect();
    let per_element = |t: usize| -> [f64; 4] {
        let geo = space.geometry(t);
        let dofs = space.element_dofs(t);
        let mut acc = [0.0; 4];
        for (q, &w) in rule.weights.iter().enumerate() {
            let (x, jac) = geo.map_with_jacobian(rule.points[q]);
            let jit = inverse_transpose(jac);
            let (phi, dphi) = &tables[q];
            let mut uh = c64::new(0.0, 0.0);
            let mut gh = [c64::new(0.0, 0.0); 2];
            for ((&d, &v), g) in dofs.iter().zip(phi).zip(dphi) {
                let c = coeffs[d];
                uh += c * v;
                gh[0] += c * (jit[0][0] * g[0] + jit[0][1] * g[1]);
                gh[1] += c * (jit[1][0] * g[0] + jit[1][1] * g[1]);
            }
            let (u, gu) = exact(x);
            let wd = w * det(jac);
            acc[0] += wd * (u - uh).norm_sqr();
            acc[1] += wd * ((gu[0] - gh[0]).norm_sqr() + (gu[1] - gh[1]).norm_sqr());
            acc[2] += wd * u.norm_sqr();
            acc[3] += wd * (gu[0].norm_sqr() + gu[1].norm_sqr());
        }
        acc
    };
    // fixed-order reduction so the sums are reproducible
    let parts: Vec<[f64; 4]> = (0..space.n_elements()).into_par_iter().map(per_element).collect();
    Ok(parts
        .iter()
        .fold([0.0; 4], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]))
}

/// Errors of `coeffs` against a field given with its gradient.
pub fn error_against_field<U>(
    space: &DofSpace,
    coeffs: &[c64],
    exact: U,
    rho: f64,
    order: usize,
) -> Result<ErrorReport, AnalysisError>
where
    U: Fn(Point) -> (c64, [c64; 2]) + Sync,
{
    let [e_l2, e_h1, u_l2, u_h1] = error_pieces(space, coeffs, exact, order)?;
    let rel = |e: f64, u: f64| if u > 0.0 { (e / u).sqrt() } else { e.sqrt() };
    let r2 = rho * rho;
    Ok(ErrorReport {
        l2_error: e_l2.sqrt(),
        h1_semi_error: e_h1.sqrt(),
        weighted_error: (e_h1 + r2 * e_l2).sqrt(),
        rel_l2: rel(e_l2, u_l2),
        rel_h1_semi: rel(e_h1, u_h1),
        rel_weighted: rel(e_h1 + r2 * e_l2, u_h1 + r2 * u_l2),
        best_approx_weighted_error: None,
        rho,
    })
}

pub fn error_against_exact(
    space: &DofSpace,
    coeffs: &[c64],
    sol: &ExactSolution,
    rho: f64,
) -> Result<ErrorReport, AnalysisError> {
    let order = error_quadrature_order(space.degree(), sol.zeta().modulus(), space.mesh().mesh_size());
    error_against_field(space, coeffs, |x| sol.evaluate_field(x), rho, order)
}

/// `((∇u, ∇φᵢ) + ρ²(u, φᵢ))ᵢ` for a field given with its gradient.
pub fn projection_load<U>(disc: &Discretization, exact: U, rho: f64, order: usize) -> Result<Vec<c64>, AnalysisError>
where
    U: Fn(Point) -> (c64, [c64; 2]) + Sync,
{
    let space = &disc.space;
    let rule = QuadratureRule::triangle(order)?;
    let basis = space.basis();
    let tables: Vec<(Vec<f64>, Vec<[f64; 2]>)> = rule.points.iter().map(|&xi| basis.eval_with_grad(xi)).collect();
    let r2 = rho * rho;
    let local = |t: usize| -> Vec<c64> {
        let geo = space.geometry(t);
        let mut out = vec![c64::new(0.0, 0.0); space.local_dofs()];
        for (q, &w) in rule.weights.iter().enumerate() {
            let (x, jac) = geo.map_with_jacobian(rule.points[q]);
            let jit = inverse_transpose(jac);
            let (u, gu) = exact(x);
            let wd = w * det(jac);
            let (phi, dphi) = &tables[q];
            for ((o, &v), g) in out.iter_mut().zip(phi).zip(dphi) {
                let gx = jit[0][0] * g[0] + jit[0][1] * g[1];
                let gy = jit[1][0] * g[0] + jit[1][1] * g[1];
                *o += (gu[0] * gx + gu[1] * gy + u * (r2 * v)) * wd;
            }
        }
        out
    };
    let locals: Vec<Vec<c64>> = (0..space.n_elements()).into_par_iter().map(local).collect();
    let mut rhs = vec![c64::new(0.0, 0.0); space.n_dofs()];
    for (t, loc) in locals.iter().enumerate() {
        for (&d, &v) in space.element_dofs(t).iter().zip(loc) {
            rhs[d] += v;
        }
    }
    Ok(rhs)
}

/// `B_ρ`-orthogonal projection of a field onto the space.
pub fn best_approximation_of<U>(
    disc: &Discretization,
    exact: U,
    rho: f64,
    order: usize,
) -> Result<Vec<c64>, AnalysisError>
where
    U: Fn(Point) -> (c64, [c64; 2]) + Sync,
{
    let rhs = projection_load(disc, exact, rho, order)?;
    let gram = disc.matrices.gram(rho);
    Ok(SpdFactor::new(&gram.b)?.solve_complex(&rhs))
}

pub fn best_approximation(disc: &Discretization, sol: &ExactSolution, rho: f64) -> Result<Vec<c64>, AnalysisError> {
    let space = &disc.space;
    let order = error_quadrature_order(space.degree(), sol.zeta().modulus(), space.mesh().mesh_size());
    best_approximation_of(disc, |x| sol.evaluate_field(x), rho, order)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StabilityReport {
    pub gamma_disc: Option<f64>,
    pub continuity_norm: Option<f64>,
    pub cb_estimate: f64,
    pub eta_hat: Option<f64>,
    /// `(Im ζ)²/|ζ| · η̂`
    pub resolution_lhs: Option<f64>,
}

/// `K`, `M`, `M_Γ` whitened by the Cholesky factor of `B = K + ρ²M`;
/// `L⁻¹A(ζ)L⁻ᵀ = K̃ + ζ²M̃ + ζM̃_Γ` for every `ζ` with `|ζ| = ρ`.
pub struct InfSupPencil {
    rho: f64,
    k: Mat<f64>,
    m: Mat<f64>,
    g: Mat<f64>,
}

impl InfSupPencil {
    pub fn new(disc: &Discretization, rho: f64) -> Result<Self, AnalysisError> {
        let n = disc.n_dofs();
        if n > DENSE_CAP {
            return Err(LinalgError::TooLarge { n, cap: DENSE_CAP }.into());
        }
        let mats = &disc.matrices;
        let k = csr_to_dense_real(&mats.stiffness());
        let m = csr_to_dense_real(&mats.mass());
        let g = csr_to_dense_real(&mats.boundary_mass());
        let b = csr_to_dense_real(&mats.gram(rho).b);
        let mut w = whiten_real(&[&k, &m, &g], &b)?.into_iter();
        let (k, m, g) = (w.next().unwrap(), w.next().unwrap(), w.next().unwrap());
        Ok(Self { rho, k, m, g })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `(γ_disc, ‖a_ζ‖)`; `ζ` must have modulus `ρ` for these to be the
    /// constants in the `‖·‖_{|ζ|}` norm.
    pub fn range(&self, zeta: c64) -> Result<(f64, f64), AnalysisError> {
        let z2 = zeta * zeta;
        let c = Mat::<c64>::from_fn(self.k.nrows(), self.k.ncols(), |i, j| {
            z2 * self.m[(i, j)] + zeta * self.g[(i, j)] + self.k[(i, j)]
        });
        Ok(singular_range(&c)?)
    }
}

/// `(γ_disc, ‖a_ζ‖)` as extreme singular values of `L⁻¹AL⁻ᴴ`, `B = LLᴴ`, `ρ = |ζ|`.
pub fn discrete_inf_sup(disc: &Discretization, z: &Wavenumber) -> Result<(f64, f64), AnalysisError> {
    InfSupPencil::new(disc, z.modulus())?.range(z.zeta())
}

/// [`discrete_inf_sup`] through the generic complex pencil, without the
/// per-modulus whitening; kept as a cross-check.
pub fn discrete_inf_sup_direct(disc: &Discretization, z: &Wavenumber) -> Result<(f64, f64), AnalysisError> {
    let n = disc.n_dofs();
    if n > DENSE_CAP {
        return Err(LinalgError::TooLarge { n, cap: DENSE_CAP }.into());
    }
    let a = csr_to_dense(&disc.matrices.system_matrix(z.zeta()));
    let b = csr_to_dense(&disc.matrices.gram(z.modulus()).b.to_complex());
    let pair = generalized_singular_range(&a, &b, false)?;
    Ok((pair.sigma_min, pair.sigma_max))
}

const SCHUR_BLOCK: usize = 64;

/// Smallest `C_b` with `|ζ| ‖γ₀u‖²_Γ ≤ C_b ‖u‖²_{|ζ|}` on the space.
///
/// `M_Γ` only touches boundary dofs, so the generalized eigenproblem reduces
/// to the boundary block against the Schur complement of `B` on it.
pub fn estimate_cb(disc: &Discretization, z: &Wavenumber) -> Result<f64, AnalysisError> {
    let n = disc.n_dofs();
    let boundary = disc.space.boundary_dofs().to_vec();
    let mut is_boundary = vec![false; n];
    boundary.iter().for_each(|&d| is_boundary[d] = true);
    let interior: Vec<usize> = (0..n).filter(|&d| !is_boundary[d]).collect();
    let mg = disc.matrices.boundary_mass().submatrix(&boundary, &boundary);
    if mg.values().iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let b = disc.matrices.gram(z.modulus()).b;
    let s = schur_complement(&b, &boundary, &interior)?;
    let mg = csr_to_dense_real(&mg);
    let scaled = Mat::<f64>::from_fn(mg.nrows(), mg.ncols(), |i, j| z.modulus() * mg[(i, j)]);
    Ok(max_generalized_eigenvalue(&scaled, &s)?)
}

/// Dense `B_bb - B_bi B_ii⁻¹ B_ib`.
fn schur_complement(b: &CsrMatrix<f64>, keep: &[usize], elim: &[usize]) -> Result<Mat<f64>, AnalysisError> {
    let nb = keep.len();
    let mut s = csr_to_dense_real(&b.submatrix(keep, keep));
    if elim.is_empty() {
        return Ok(s);
    }
    let b_ii = b.submatrix(elim, elim);
    let b_ib = b.submatrix(elim, keep);
    let b_bi = b_ib.transpose();
    let fact = SpdFactor::new(&b_ii)?;
    for start in (0..nb).step_by(SCHUR_BLOCK) {
        let end = (start + SCHUR_BLOCK).min(nb);
        let mut rhs = Mat::<f64>::zeros(elim.len(), end - start);
        for (i, j, v) in b_ib.triplets() {
            if j >= start && j < end {
                rhs[(i, j - start)] = v;
            }
        }
        let x = fact.solve_mat(&rhs);
        for (i, k, v) in b_bi.triplets() {
            for j in start..end {
                s[(i, j)] -= v * x[(k, j - start)];
            }
        }
    }
    Ok(s)
}

/// Dense `C_b` from the full pencil `(|ζ|M_Γ, B)`; used to cross-check
/// [`estimate_cb`] on small spaces.
pub fn estimate_cb_dense(disc: &Discretization, z: &Wavenumber) -> Result<f64, AnalysisError> {
    let n = disc.n_dofs();
    if n > DENSE_CAP {
        return Err(LinalgError::TooLarge { n, cap: DENSE_CAP }.into());
    }
    let mg = csr_to_dense_real(&disc.matrices.boundary_mass());
    let scaled = Mat::<f64>::from_fn(n, n, |i, j| z.modulus() * mg[(i, j)]);
    let b = csr_to_dense_real(&disc.matrices.gram(z.modulus()).b);
    Ok(max_generalized_eigenvalue(&scaled, &b)?)
}

/// Fine space with its prolongation from the coarse one.
pub struct ReferenceSpace {
    pub disc: Discretization,
    /// `n_ref x n_coarse`
    pub prolongation: CsrMatrix<f64>,
}

impl ReferenceSpace {
    /// `reference` must live on the same mesh or on one red refinement of it,
    /// with degree at least that of `coarse`.
    pub fn new(coarse: &DofSpace, reference: Discretization) -> Result<Self, AnalysisError> {
        let prolongation = prolongation(coarse, &reference.space)?;
        Ok(Self {
            disc: reference,
            prolongation,
        })
    }
}

/// Matrix of the natural embedding: coarse functions evaluated at fine nodes
/// through the parent reference coordinates.
pub fn prolongation(coarse: &DofSpace, fine: &DofSpace) -> Result<CsrMatrix<f64>, AnalysisError> {
    if fine.degree() < coarse.degree() {
        return Err(AnalysisError::InvalidReference("reference degree is lower".into()));
    }
    let same_mesh = Arc::ptr_eq(coarse.mesh_arc(), fine.mesh_arc());
    let links = fine.mesh().parents();
    if !same_mesh {
        match links {
            Some(l) if l.len() == 4 * coarse.n_elements() && fine.mesh().level() == coarse.mesh().level() + 1 => {}
            _ => {
                return Err(AnalysisError::InvalidReference(
                    "meshes are not one refinement apart".into(),
                ))
            }
        }
    }
    let nodes = fine.basis().nodes();
    let mut seen = vec![false; fine.n_dofs()];
    let mut trips = Vec::new();
    for t in 0..fine.n_elements() {
        let (parent, child) = if same_mesh {
            (t, None)
        } else {
            let l = links.expect("checked above")[t];
            (l.parent, Some(l.child))
        };
        let cdofs = coarse.element_dofs(parent);
        for (&fd, &xi) in fine.element_dofs(t).iter().zip(&nodes) {
            if seen[fd] {
                continue;
            }
            seen[fd] = true;
            let xp = child.map_or(xi, |c| child_to_parent(c, xi));
            for (&cd, v) in cdofs.iter().zip(coarse.basis().eval(xp)) {
                if v.abs() > 1e-14 {
                    trips.push((fd, cd, v));
                }
            }
        }
    }
    Ok(CsrMatrix::from_triplets(fine.n_dofs(), coarse.n_dofs(), &trips))
}

/// Random smooth right-hand side: a few plane waves with wavenumbers near `|ζ|`.
#[derive(Debug, Clone)]
pub struct PlaneWaveField {
    waves: Vec<(c64, [f64; 2])>,
}

impl PlaneWaveField {
    pub fn sample(rng: &mut ChaCha8Rng, modulus: f64, count: usize) -> Self {
        let waves = (0..count)
            .map(|_| {
                let amp = c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                let k = modulus * rng.random_range(0.5..1.5);
                let theta = rng.random_range(0.0..2.0 * PI);
                (amp, [k * theta.cos(), k * theta.sin()])
            })
            .collect();
        Self { waves }
    }

    pub fn eval(&self, x: Point) -> c64 {
        self.waves
            .iter()
            .map(|(a, k)| a * c64::from_polar(1.0, k[0] * x[0] + k[1] * x[1]))
            .sum()
    }
}

pub const PLANE_WAVES_PER_SAMPLE: usize = 3;

/// L² norm of a field by quadrature on a space's mesh.
fn l2_norm<F: Fn(Point) -> c64 + Sync>(space: &DofSpace, f: F, order: usize) -> Result<f64, AnalysisError> {
    let rule = QuadratureRule::triangle(order)?;
    let parts: Vec<f64> = (0..space.n_elements())
        .into_par_iter()
        .map(|t| {
            let geo = space.geometry(t);
            rule.points
                .iter()
                .zip(&rule.weights)
                .map(|(&xi, &w)| {
                    let (x, jac) = geo.map_with_jacobian(xi);
                    w * det(jac) * f(x).norm_sqr()
                })
                .sum()
        })
        .collect();
    Ok(parts.iter().sum::<f64>().sqrt())
}

/// Lower estimate of `η(S)`: the largest `‖z_f - Π_S z_f‖_{|ζ|} / ‖f‖` over
/// `n_samples` seeded random `f`, with `z_f` the adjoint solution on the
/// reference space and `Π_S` the `B`-projection onto the embedded space.
pub fn estimate_eta(
    _coarse: &Discretization,
    z: &Wavenumber,
    n_samples: usize,
    reference: &ReferenceSpace,
    seed: u64,
) -> Result<f64, AnalysisError> {
    let rdisc = &reference.disc;
    let p = &reference.prolongation;
    let adjoint = rdisc.matrices.system_matrix(z.zeta().conj());
    let lu = Factorization::new(&adjoint)?;
    let b_ref = rdisc.matrices.gram(z.modulus()).b;
    let pt = p.transpose();
    let b_s = pt.matmul(&b_ref.matmul(p));
    let b_s_fact = SpdFactor::new(&b_s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = error_quadrature_order(rdisc.space.degree(), z.modulus(), rdisc.space.mesh().mesh_size());
    let mut worst: f64 = 0.0;
    for _ in 0..n_samples {
        let field = PlaneWaveField::sample(&mut rng, z.modulus(), PLANE_WAVES_PER_SAMPLE);
        let load = assemble_load(&rdisc.space, |x| field.eval(x), zero)?;
        let zf = lu.solve(&load)?;
        let c = b_s_fact.solve_complex(&pt.mul_cvec(&b_ref.mul_cvec(&zf)));
        let pc = p.mul_cvec(&c);
        let e: Vec<c64> = zf.iter().zip(&pc).map(|(a, b)| a - b).collect();
        let err = b_ref.quad_form(&e).re.max(0.0).sqrt();
        let fnorm = l2_norm(&rdisc.space, |x| field.eval(x), order)?;
        worst = worst.max(err / fnorm);
    }
    Ok(worst)
}

/// `‖u - u_S‖_{|ζ|} / inf_v ‖u - v‖_{|ζ|}` for the disk problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QuasiOptimality {
    pub galerkin: ErrorReport,
    pub best: ErrorReport,
    pub ratio: f64,
}

pub fn quasi_optimality(
    disc: &Discretization,
    sol: &ExactSolution,
    galerkin_coeffs: &[c64],
) -> Result<QuasiOptimality, AnalysisError> {
    let rho = sol.zeta().modulus();
    let mut galerkin = error_against_exact(&disc.space, galerkin_coeffs, sol, rho)?;
    let best_coeffs = best_approximation(disc, sol, rho)?;
    let best = error_against_exact(&disc.space, &best_coeffs, sol, rho)?;
    if !(best.rel_weighted > 1e-14) {
        return Err(AnalysisError::Resolved);
    }
    galerkin.best_approx_weighted_error = Some(best.weighted_error);
    Ok(QuasiOptimality {
        ratio: galerkin.weighted_error / best.weighted_error,
        galerkin,
        best,
    })
}

pub fn quasi_optimality_ratio(disc: &Discretization, z: &Wavenumber) -> Result<f64, AnalysisError> {
    let sol = ExactSolution::new(*z)?;
    let u = solve_model_problem(disc, z)?;
    Ok(quasi_optimality(disc, &sol, &u)?.ratio)
}

/// `(Re[(ζ̄/|ζ|) uᴴAu], (Re ζ/|ζ|) uᴴBu, uᴴBu)` with `B` at `ρ = |ζ|`.
pub fn coercivity_terms(matrices: &Matrices, z: &Wavenumber, u: &[c64]) -> (f64, f64, f64) {
    let a = matrices.system_matrix(z.zeta());
    let b = matrices.gram(z.modulus()).b;
    let aval = dot(u, &a.mul_vec(u));
    let bval = b.quad_form(u).re;
    let lhs = (z.zeta().conj() / z.modulus() * aval).re;
    (lhs, z.coercive_inf_sup_bound() * bval, bval)
}
