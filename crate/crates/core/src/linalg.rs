//! Sparse direct solves, sparse Cholesky for Gram matrices, and dense
//! generalized singular values for inf-sup constants.

use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::prelude::*;
use faer::sparse::linalg::solvers::{Llt as SparseLlt, Lu as SparseLu};
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Par, Side};
use num_complex::Complex64 as c64;
use thiserror::Error;

use crate::sparse::{norm2, CsrMatrix};

/// Rows whose largest entry is below this fraction of the largest row are
/// treated as zero.
pub const SINGULARITY_CUTOFF: f64 = 1e-14;
/// Accepted relative residual `‖Ax - b‖ / ‖b‖` after refinement.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Largest system handled by the dense singular value path.
pub const DENSE_CAP: usize = 3000;
const REFINEMENT_STEPS: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("singular matrix: {0}")]
    SingularMatrix(String),
    #[error("Cholesky factorization failed: matrix is not numerically positive definite")]
    CholeskyFailure,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{n} unknowns exceed the dense cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("eigenvalue solver did not converge")]
    EigenFailure,
}

/// LU factors of a complex sparse matrix, kept with the matrix for residual
/// checks and iterative refinement.
pub struct Factorization {
    matrix: CsrMatrix<c64>,
    lu: SparseLu<usize, c64>,
}

fn to_faer<T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<Output = T>>(
    a: &CsrMatrix<T>,
) -> Vec<Triplet<usize, usize, T>> {
    a.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect()
}

impl Factorization {
    pub fn new(a: &CsrMatrix<c64>) -> Result<Self, LinalgError> {
        if a.nrows() != a.ncols() {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} is not square",
                a.nrows(),
                a.ncols()
            )));
        }
        let n = a.nrows();
        let mut row_max = vec![0.0f64; n];
        for (i, _, v) in a.triplets() {
            row_max[i] = row_max[i].max(v.norm());
        }
        let global = row_max.iter().cloned().fold(0.0, f64::max);
        if let Some(i) = row_max.iter().position(|&r| !(r > SINGULARITY_CUTOFF * global)) {
            return Err(LinalgError::SingularMatrix(format!("row {i} vanishes")));
        }
        if row_max.iter().any(|r| !r.is_finite()) {
            return Err(LinalgError::SingularMatrix("non-finite entries".into()));
        }
        let sp = SparseColMat::<usize, c64>::try_new_from_triplets(n, n, &to_faer(a))
            .map_err(|e| LinalgError::SingularMatrix(format!("{e:?}")))?;
        let lu = sp
            .sp_lu()
            .map_err(|e| LinalgError::SingularMatrix(format!("factorization failed: {e:?}")))?;
        Ok(Self { matrix: a.clone(), lu })
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// Solve `A x = b` with iterative refinement; a residual that stays above
    /// [`RESIDUAL_TOLERANCE`] reports the matrix as singular.
    pub fn solve(&self, b: &[c64]) -> Result<Vec<c64>, LinalgError> {
        if b.len() != self.n() {
            return Err(LinalgError::DimensionMismatch(format!(
                "rhs has {} entries, need {}",
                b.len(),
                self.n()
            )));
        }
        let bnorm = norm2(b);
        if bnorm == 0.0 {
            return Ok(vec![c64::new(0.0, 0.0); b.len()]);
        }
        let mut x = self.raw_solve(b);
        let mut rel = f64::INFINITY;
        for step in 0..=REFINEMENT_STEPS {
            let ax = self.matrix.mul_vec(&x);
            let r: Vec<c64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
            rel = norm2(&r) / bnorm;
            if !rel.is_finite() {
                return Err(LinalgError::SingularMatrix("solution is not finite".into()));
            }
            if rel <= 1e-3 * RESIDUAL_TOLERANCE || step == REFINEMENT_STEPS {
                break;
            }
            let dx = self.raw_solve(&r);
            x.iter_mut().zip(&dx).for_each(|(xi, di)| *xi += di);
        }
        if rel > RESIDUAL_TOLERANCE {
            return Err(LinalgError::SingularMatrix(format!(
                "relative residual {rel:.3e} after refinement"
            )));
        }
        Ok(x)
    }

    fn raw_solve(&self, b: &[c64]) -> Vec<c64> {
        let rhs = Mat::<c64>::from_fn(b.len(), 1, |i, _| b[i]);
        let x = self.lu.solve(&rhs);
        (0..b.len()).map(|i| x[(i, 0)]).collect()
    }
}

pub fn sparse_solve(a: &CsrMatrix<c64>, b: &[c64]) -> Result<Vec<c64>, LinalgError> {
    Factorization::new(a)?.solve(b)
}

/// Sparse Cholesky factor of a real symmetric positive definite matrix.
pub struct SpdFactor {
    n: usize,
    llt: SparseLlt<usize, f64>,
}

impl SpdFactor {
    pub fn new(b: &CsrMatrix<f64>) -> Result<Self, LinalgError> {
        let n = b.nrows();
        let lower: Vec<_> = b
            .triplets()
            .filter(|&(i, j, _)| i >= j)
            .map(|(i, j, v)| Triplet::new(i, j, v))
            .collect();
        let sp = SparseColMat::<usize, f64>::try_new_from_triplets(n, b.ncols(), &lower)
            .map_err(|e| LinalgError::DimensionMismatch(format!("{e:?}")))?;
        let llt = sp.sp_cholesky(Side::Lower).map_err(|_| LinalgError::CholeskyFailure)?;
        Ok(Self { n, llt })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Solve for several real right-hand sides at once (columns of `rhs`).
    pub fn solve_mat(&self, rhs: &Mat<f64>) -> Mat<f64> {
        self.llt.solve(rhs)
    }

    pub fn solve_complex(&self, b: &[c64]) -> Vec<c64> {
        let rhs = Mat::<f64>::from_fn(self.n, 2, |i, j| if j == 0 { b[i].re } else { b[i].im });
        let x = self.llt.solve(&rhs);
        (0..self.n).map(|i| c64::new(x[(i, 0)], x[(i, 1)])).collect()
    }
}

/// Extreme generalized singular values of `A` with respect to `B`.
#[derive(Debug, Clone)]
pub struct SingularPair {
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// coefficient vector attaining `sigma_min`, normalised in the `B` norm
    pub minimizer: Option<Vec<c64>>,
}

pub fn csr_to_dense(a: &CsrMatrix<c64>) -> Mat<c64> {
    let mut m = Mat::<c64>::zeros(a.nrows(), a.ncols());
    for (i, j, v) in a.triplets() {
        m[(i, j)] = v;
    }
    m
}

pub fn csr_to_dense_real(a: &CsrMatrix<f64>) -> Mat<f64> {
    let mut m = Mat::<f64>::zeros(a.nrows(), a.ncols());
    for (i, j, v) in a.triplets() {
        m[(i, j)] = v;
    }
    m
}

/// `L⁻¹ A L⁻ᴴ` for the Cholesky factor `B = LLᴴ`.
pub fn whitened(a: &Mat<c64>, b: &Mat<c64>) -> Result<(Mat<c64>, Mat<c64>), LinalgError> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(LinalgError::DimensionMismatch(format!(
            "A is {}x{}, B is {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let llt = b.llt(Side::Lower).map_err(|_| LinalgError::CholeskyFailure)?;
    let l = llt.L().to_owned();
    let mut x = a.clone();
    solve_lower_triangular_in_place(l.as_ref(), x.as_mut(), Par::Seq);
    // (L⁻¹ (L⁻¹A)ᴴ)ᴴ = L⁻¹ A L⁻ᴴ
    let mut y = x.adjoint().to_owned();
    solve_lower_triangular_in_place(l.as_ref(), y.as_mut(), Par::Seq);
    Ok((y.adjoint().to_owned(), l))
}

/// Eigenvalues of `CᴴC` with `C = L⁻¹AL⁻ᴴ`; their square roots are the
/// generalized singular values.
pub fn generalized_singular_range(
    a: &Mat<c64>,
    b: &Mat<c64>,
    want_minimizer: bool,
) -> Result<SingularPair, LinalgError> {
    let n = a.nrows();
    if n > DENSE_CAP {
        return Err(LinalgError::TooLarge { n, cap: DENSE_CAP });
    }
    let (c, l) = whitened(a, b)?;
    if !want_minimizer {
        let (sigma_min, sigma_max) = singular_range(&c)?;
        return Ok(SingularPair {
            sigma_min,
            sigma_max,
            minimizer: None,
        });
    }
    let h = c.adjoint() * &c;
    let root = |v: f64| v.max(0.0).sqrt();
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| LinalgError::EigenFailure)?;
    let s = evd.S().column_vector();
    let u = evd.U();
    // y minimises ‖Cy‖/‖y‖; the coefficient vector is x = L⁻ᴴ y
    let mut y = Mat::<c64>::from_fn(n, 1, |i, _| u[(i, 0)]);
    let lh = l.adjoint().to_owned();
    solve_upper_triangular_in_place(lh.as_ref(), y.as_mut(), Par::Seq);
    let x = (0..n).map(|i| y[(i, 0)]).collect();
    Ok(SingularPair {
        sigma_min: root(s[0].re),
        sigma_max: root(s[n - 1].re),
        minimizer: Some(x),
    })
}

/// Smallest and largest singular value of a square matrix, from the
/// eigenvalues of `CᴴC`.
pub fn singular_range(c: &Mat<c64>) -> Result<(f64, f64), LinalgError> {
    let n = c.nrows();
    if n == 0 || c.ncols() != n {
        return Err(LinalgError::DimensionMismatch(format!(
            "expected a nonempty square matrix, got {}x{}",
            n,
            c.ncols()
        )));
    }
    let h = c.adjoint() * c;
    let ev = h
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| LinalgError::EigenFailure)?;
    Ok((ev[0].max(0.0).sqrt(), ev[n - 1].max(0.0).sqrt()))
}

/// `L⁻¹ X L⁻ᵀ` for each real `X`, with `B = LLᵀ`.
pub fn whiten_real(mats: &[&Mat<f64>], b: &Mat<f64>) -> Result<Vec<Mat<f64>>, LinalgError> {
    let n = b.nrows();
    if mats.iter().any(|m| m.nrows() != n || m.ncols() != n) || b.ncols() != n {
        return Err(LinalgError::DimensionMismatch("pencil matrices must match B".into()));
    }
    let llt = b.llt(Side::Lower).map_err(|_| LinalgError::CholeskyFailure)?;
    let l = llt.L();
    Ok(mats
        .iter()
        .map(|m| {
            let mut x = (*m).clone();
            solve_lower_triangular_in_place(l, x.as_mut(), Par::Seq);
            let mut y = x.transpose().to_owned();
            solve_lower_triangular_in_place(l, y.as_mut(), Par::Seq);
            y
        })
        .collect())
}

/// Largest `λ` with `A x = λ B x` for real symmetric `A` and SPD `B`.
pub fn max_generalized_eigenvalue(a: &Mat<f64>, b: &Mat<f64>) -> Result<f64, LinalgError> {
    let n = a.nrows();
    if n == 0 {
        return Ok(0.0);
    }
    let llt = b.llt(Side::Lower).map_err(|_| LinalgError::CholeskyFailure)?;
    let l = llt.L().to_owned();
    let mut x = a.clone();
    solve_lower_triangular_in_place(l.as_ref(), x.as_mut(), Par::Seq);
    let mut y = x.transpose().to_owned();
    solve_lower_triangular_in_place(l.as_ref(), y.as_mut(), Par::Seq);
    // symmetrise against rounding before the symmetric solver
    let c = Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (y[(i, j)] + y[(j, i)]));
    let ev = c
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| LinalgError::EigenFailure)?;
    Ok(ev[n - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve_returns_rhs() {
        let a = CsrMatrix::identity(5, c64::new(1.0, 0.0));
        let b: Vec<c64> = (0..5).map(|i| c64::new(i as f64, -1.0)).collect();
        assert_eq!(sparse_solve(&a, &b).unwrap(), b);
    }

    #[test]
    fn zero_row_is_singular() {
        let a = CsrMatrix::from_triplets(
            3,
            3,
            &[
                (0, 0, c64::new(1.0, 0.0)),
                (1, 1, c64::new(0.0, 0.0)),
                (2, 2, c64::new(2.0, 1.0)),
            ],
        );
        let b = vec![c64::new(1.0, 0.0); 3];
        assert!(matches!(sparse_solve(&a, &b), Err(LinalgError::SingularMatrix(_))));
    }

    #[test]
    fn rank_deficient_matrix_is_singular() {
        // two identical rows survive the row check and must be caught later
        let one = c64::new(1.0, 0.0);
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, one), (0, 1, one), (1, 0, one), (1, 1, one)]);
        assert!(matches!(
            sparse_solve(&a, &[one, c64::new(2.0, 0.0)]),
            Err(LinalgError::SingularMatrix(_))
        ));
    }

    #[test]
    fn spd_factor_solves() {
        let b = CsrMatrix::from_triplets(2, 2, &[(0, 0, 4.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)]);
        let f = SpdFactor::new(&b).unwrap();
        let x = f.solve_complex(&[c64::new(1.0, 2.0), c64::new(2.0, -1.0)]);
        let r = b.mul_cvec(&x);
        assert!((r[0] - c64::new(1.0, 2.0)).norm() < 1e-14);
        assert!((r[1] - c64::new(2.0, -1.0)).norm() < 1e-14);
        let indefinite = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]);
        assert!(matches!(SpdFactor::new(&indefinite), Err(LinalgError::CholeskyFailure)));
    }

    #[test]
    fn singular_range_of_multiples_of_b() {
        let n = 6;
        let b = Mat::<c64>::from_fn(n, n, |i, j| {
            let v = 1.0 / (1.0 + (i as f64 - j as f64).abs());
            c64::new(if i == j { v + 2.0 } else { v }, 0.0)
        });
        let one = generalized_singular_range(&b, &b, false).unwrap();
        assert!((one.sigma_min - 1.0).abs() < 1e-12 && (one.sigma_max - 1.0).abs() < 1e-12);
        let two = Mat::<c64>::from_fn(n, n, |i, j| b[(i, j)] * 2.0);
        let r = generalized_singular_range(&two, &b, true).unwrap();
        assert!((r.sigma_min - 2.0).abs() < 1e-12 && (r.sigma_max - 2.0).abs() < 1e-12);
        assert_eq!(r.minimizer.unwrap().len(), n);
        let big = Mat::<c64>::zeros(DENSE_CAP + 1, DENSE_CAP + 1);
        assert!(matches!(
            generalized_singular_range(&big, &big, false),
            Err(LinalgError::TooLarge { .. })
        ));
    }

    #[test]
    fn max_eigenvalue_of_diagonal_pencil() {
        let a = Mat::<f64>::from_fn(3, 3, |i, j| if i == j { [1.0, 6.0, 2.0][i] } else { 0.0 });
        let b = Mat::<f64>::from_fn(3, 3, |i, j| if i == j { [1.0, 2.0, 4.0][i] } else { 0.0 });
        assert!((max_generalized_eigenvalue(&a, &b).unwrap() - 3.0).abs() < 1e-14);
    }
}
