//! Small dense real matrix kernel plus the algebraic condition checks
//! imposed on the coupling matrices: cooperativity, M-matrix structure,
//! conjugation and the orthant flux condition.

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for sign/zero tests on matrix entries.
pub const TAU_ALG: f64 = 1e-9;

/// Largest matrix dimension accepted by the dense kernel.
pub const MAX_DIM: usize = 16;

/// Condition-number ceiling above which a matrix is treated as singular.
pub const COND_LIMIT: f64 = 1e12;

#[derive(Debug, Error, PartialEq)]
pub enum AlgebraError {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension {0} exceeds the supported maximum {MAX_DIM}")]
    DimensionTooLarge(usize),
    #[error("matrix Q is singular or too ill-conditioned (cond ~ {cond:.3e})")]
    SingularQ { cond: f64 },
    #[error("matrix entries must be finite")]
    NotFinite,
    #[error("matrix must be nonempty")]
    Empty,
    #[error("eigenvalue iteration failed to converge")]
    EigenFailure,
}

/// Dense real matrix in row-major order. Serialized as an array of row arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Mat {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl TryFrom<Vec<Vec<f64>>> for Mat {
    type Error = AlgebraError;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self, AlgebraError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(AlgebraError::Empty);
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(AlgebraError::NonSquare {
                rows: rows.len(),
                cols,
            });
        }
        let entries: Vec<f64> = rows.into_iter().flatten().collect();
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(AlgebraError::NotFinite);
        }
        Ok(Mat {
            rows: entries.len() / cols,
            cols,
            entries,
        })
    }
}

impl From<Mat> for Vec<Vec<f64>> {
    fn from(m: Mat) -> Vec<Vec<f64>> {
        m.entries.chunks(m.cols).map(|r| r.to_vec()).collect()
    }
}

impl Mat {
    pub fn from_rows(rows: &[&[f64]]) -> Mat {
        Mat::try_from(rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).expect("valid rows")
    }

    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.entries)
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Mat {
        let mut entries = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                entries.push(m[(i, j)]);
            }
        }
        Mat {
            rows: m.nrows(),
            cols: m.ncols(),
            entries,
        }
    }

    /// Max-norm of the entries.
    pub fn norm_max(&self) -> f64 {
        self.entries.iter().fold(0.0, |a, e| a.max(e.abs()))
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        Mat::from_dmatrix(&(self.to_dmatrix() * other.to_dmatrix()))
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        Mat::from_dmatrix(&(self.to_dmatrix() - other.to_dmatrix()))
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    fn require_square(&self) -> Result<usize, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.rows)
    }

    /// 2-norm condition number via SVD.
    pub fn condition_number(&self) -> f64 {
        let svd = self.to_dmatrix().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if smin <= 0.0 {
            f64::INFINITY
        } else {
            smax / smin
        }
    }

    /// Inverse, failing when the condition number exceeds `COND_LIMIT`.
    pub fn inverse(&self) -> Result<Mat, AlgebraError> {
        self.require_square()?;
        let cond = self.condition_number();
        if !cond.is_finite() || cond > COND_LIMIT {
            return Err(AlgebraError::SingularQ { cond });
        }
        let inv = self
            .to_dmatrix()
            .try_inverse()
            .ok_or(AlgebraError::SingularQ { cond })?;
        Ok(Mat::from_dmatrix(&inv))
    }
}

/// Eigenvalues via a bounded-iteration Schur decomposition. Triangular
/// inputs are read off directly (the unbounded default of nalgebra can
/// fail to terminate on exactly triangular matrices), and a deterministic
/// orthogonal-similarity retry covers the remaining convergence failures.
pub(crate) fn complex_eigs(a: &DMatrix<f64>) -> Result<Vec<Complex<f64>>, AlgebraError> {
    let n = a.nrows();
    let scale = a.amax().max(1.0);
    let triangular_diag = |m: &DMatrix<f64>| -> Option<Vec<Complex<f64>>> {
        let mut lower = 0.0f64;
        let mut upper = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                if r > c {
                    lower = lower.max(m[(r, c)].abs());
                } else if r < c {
                    upper = upper.max(m[(r, c)].abs());
                }
            }
        }
        if lower <= 1e-14 * scale || upper <= 1e-14 * scale {
            Some((0..n).map(|i| Complex::new(m[(i, i)], 0.0)).collect())
        } else {
            None
        }
    };
    if let Some(e) = triangular_diag(a) {
        return Ok(e);
    }
    if let Some(s) = a.clone().try_schur(1e-13, 100_000) {
        return Ok(s.complex_eigenvalues().iter().cloned().collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x0E16_5EED);
    for _ in 0..8 {
        let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let q = g.qr().q();
        let t = q.transpose() * a * &q;
        if let Some(e) = triangular_diag(&t) {
            return Ok(e);
        }
        if let Some(s) = t.try_schur(1e-13, 100_000) {
            return Ok(s.complex_eigenvalues().iter().cloned().collect());
        }
    }
    Err(AlgebraError::EigenFailure)
}

/// Spectral data of a square matrix.
#[derive(Debug, Clone, Serialize)]
pub struct EigenDecomp {
    /// Eigenvalues as (re, im) pairs, sorted by (re, im).
    pub eigenvalues: Vec<(f64, f64)>,
    /// Right eigenvectors as columns, present only when the spectrum is real
    /// and the matrix is diagonalizable over the reals. Columns are scaled to
    /// unit max-norm.
    pub real_eigenbasis: Option<Mat>,
    /// Geometric multiplicity per distinct eigenvalue cluster, paired with
    /// the cluster representative (re, im).
    pub multiplicities: Vec<((f64, f64), usize)>,
    /// Condition number of the eigenbasis, when present.
    pub basis_condition: Option<f64>,
}

/// Nullspace basis of M (columns), using singular vectors with singular
/// values below `tol`.
fn nullspace(m: &DMatrix<f64>, tol: f64) -> Vec<Vec<f64>> {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("svd with v_t");
    let mut basis = Vec::new();
    for i in 0..n {
        let sv = if i < svd.singular_values.len() {
            svd.singular_values[i]
        } else {
            0.0
        };
        if sv <= tol {
            basis.push((0..n).map(|j| vt[(i, j)]).collect());
        }
    }
    basis
}

/// Scale a vector to unit max-norm with a deterministic sign: the entry of
/// largest modulus is made positive.
pub fn normalize_column(v: &[f64]) -> Vec<f64> {
    let (mut maxval, mut maxabs) = (0.0f64, 0.0f64);
    for &e in v {
        if e.abs() > maxabs {
            maxabs = e.abs();
            maxval = e;
        }
    }
    if maxabs == 0.0 {
        return v.to_vec();
    }
    v.iter().map(|e| e / maxval).collect()
}

/// Eigenvalues and, when possible, a real eigenbasis of M.
///
/// Eigenvalues come from the real Schur form (Hessenberg + QR iteration);
/// eigenvectors of real eigenvalues are recovered as nullspaces of M - λI.
pub fn eigen(m: &Mat) -> Result<EigenDecomp, AlgebraError> {
    let n = m.require_square()?;
    if n > MAX_DIM {
        return Err(AlgebraError::DimensionTooLarge(n));
    }
    let dm = m.to_dmatrix();
    let scale = 1.0 + m.norm_max();
    let eig: Vec<Complex<f64>> = complex_eigs(&dm)?;
    let mut eigenvalues: Vec<(f64, f64)> = eig.iter().map(|c| (c.re, c.im)).collect();
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // Snap numerically-real eigenvalues onto the real axis.
    let real_tol = 1e-8 * scale;
    let all_real = eigenvalues.iter().all(|&(_, im)| im.abs() <= real_tol);

    let mut multiplicities = Vec::new();
    let mut real_eigenbasis = None;
    let mut basis_condition = None;

    if all_real {
        // Cluster nearby eigenvalues, then take one nullspace per cluster.
        let cluster_tol = 1e-7 * scale;
        let mut reps: Vec<f64> = Vec::new();
        for &(re, _) in &eigenvalues {
            if !reps.iter().any(|r| (r - re).abs() <= cluster_tol) {
                reps.push(re);
            }
        }
        let mut columns: Vec<Vec<f64>> = Vec::new();
        for &lambda in &reps {
            let shifted = &dm - DMatrix::<f64>::identity(n, n) * lambda;
            let basis = nullspace(&shifted, cluster_tol);
            multiplicities.push(((lambda, 0.0), basis.len()));
            for v in basis {
                columns.push(normalize_column(&v));
            }
        }
        if columns.len() == n {
            let mut v = DMatrix::<f64>::zeros(n, n);
            // Column order follows the sorted eigenvalue order.
            let mut ordered_eigs = Vec::with_capacity(n);
            for (idx, &lambda) in reps.iter().enumerate() {
                for _ in 0..multiplicities[idx].1 {
                    ordered_eigs.push(lambda);
                }
            }
            for (col, w) in columns.iter().enumerate() {
                for (i, &e) in w.iter().enumerate() {
                    v[(i, col)] = e;
                }
            }
            let vm = Mat::from_dmatrix(&v);
            let cond = vm.condition_number();
            // Residual check: M V = V Diag(λ) within tolerance.
            let mut diag = DMatrix::<f64>::zeros(n, n);
            for (j, &lambda) in ordered_eigs.iter().enumerate() {
                diag[(j, j)] = lambda;
            }
            let residual = (&dm * &v - &v * &diag).amax();
            if cond.is_finite() && cond < COND_LIMIT && residual <= 1e-7 * scale {
                eigenvalues = ordered_eigs.iter().map(|&l| (l, 0.0)).collect();
                real_eigenbasis = Some(vm);
                basis_condition = Some(cond);
            }
        }
    } else {
        // Complex spectrum: report algebraic clusters only.
        for &(re, im) in &eigenvalues {
            multiplicities.push(((re, im), 1));
        }
    }

    Ok(EigenDecomp {
        eigenvalues,
        real_eigenbasis,
        multiplicities,
        basis_condition,
    })
}

/// Cooperativity report for a square matrix C: nonnegative off-diagonal
/// entries and nonpositive row sums.
#[derive(Debug, Clone, Serialize)]
pub struct CoopReport {
    pub is_cooperative: bool,
    /// min over j != k of c_jk (+inf for 1x1 matrices).
    pub worst_offdiag_margin: f64,
    /// max over j of sum_k c_jk.
    pub worst_rowsum_margin: f64,
    /// Largest K such that c_jk >= K off-diagonal and row sums <= -K.
    pub strict_level: f64,
}

pub fn is_cooperative(c: &Mat) -> Result<CoopReport, AlgebraError> {
    let n = c.require_square()?;
    let mut offdiag = f64::INFINITY;
    let mut rowsum = f64::NEG_INFINITY;
    for j in 0..n {
        let mut s = 0.0;
        for k in 0..n {
            s += c.get(j, k);
            if j != k {
                offdiag = offdiag.min(c.get(j, k));
            }
        }
        rowsum = rowsum.max(s);
    }
    Ok(CoopReport {
        is_cooperative: offdiag >= -TAU_ALG && rowsum <= TAU_ALG,
        worst_offdiag_margin: offdiag,
        worst_rowsum_margin: rowsum,
        strict_level: offdiag.min(-rowsum),
    })
}

/// Witness for the M-matrix test: Q = sI - X with X >= 0 and rho(X) < s.
#[derive(Debug, Clone, Serialize)]
pub struct MMatrixReport {
    pub is_m_matrix: bool,
    pub s: f64,
    pub x: Mat,
    pub spectral_radius: f64,
    /// Entrywise nonnegativity of Q^{-1}, checked when the test passes.
    pub inverse_nonneg: Option<bool>,
}

pub fn is_m_matrix(q: &Mat) -> Result<MMatrixReport, AlgebraError> {
    let n = q.require_square()?;
    let mut offdiag_ok = true;
    let mut s = f64::NEG_INFINITY;
    for j in 0..n {
        s = s.max(q.get(j, j));
        for k in 0..n {
            if j != k && q.get(j, k) > TAU_ALG {
                offdiag_ok = false;
            }
        }
    }
    let x = Mat::from_dmatrix(&(DMatrix::<f64>::identity(n, n) * s - q.to_dmatrix()));
    let rho = complex_eigs(&x.to_dmatrix())?
        .iter()
        .fold(0.0f64, |a, c| a.max(c.norm()));
    let is_m = offdiag_ok && rho < s - TAU_ALG;
    let inverse_nonneg = if is_m {
        let inv = q.inverse()?;
        Some((0..n).all(|i| (0..n).all(|j| inv.get(i, j) >= -TAU_ALG)))
    } else {
        None
    };
    Ok(MMatrixReport {
        is_m_matrix: is_m,
        s,
        x,
        spectral_radius: rho,
        inverse_nonneg,
    })
}

/// Q^{-1} C Q.
pub fn conjugate(c: &Mat, q: &Mat) -> Result<Mat, AlgebraError> {
    c.require_square()?;
    let p = q.inverse()?;
    Ok(p.mul(c).mul(q))
}

/// Weinberger flux condition p . (Cu) <= 0 for the negative orthant and all
/// of its diagonal translates a*1 + R^m_-. Sign propagation for the
/// inequality system is translation-covariant along the diagonal, and the
/// translated faces are what encodes the row-sum half of cooperativity
/// (at a face point u = a*1 + w with w <= 0, w_j = 0 and normal e_j,
/// e_j . Cu = a * rowsum_j + sum_{k!=j} c_jk w_k).
pub fn flux_condition_orthant(c: &Mat, samples: usize) -> Result<bool, AlgebraError> {
    let n = c.require_square()?;
    assert!(samples >= 1, "samples must be >= 1");
    let flux_ok = |u: &[f64], p: &[f64]| -> bool {
        let cu = c.mul_vec(u);
        let dot: f64 = p.iter().zip(&cu).map(|(a, b)| a * b).sum();
        dot <= TAU_ALG
    };

    // Edges: u = -e_k, normal e_j (j != k): checks c_jk >= 0.
    for k in 0..n {
        let mut u = vec![0.0; n];
        u[k] = -1.0;
        for j in 0..n {
            if j == k {
                continue;
            }
            let mut p = vec![0.0; n];
            p[j] = 1.0;
            if !flux_ok(&u, &p) {
                return Ok(false);
            }
        }
    }
    // Face centers: u_j = 0, u_k = -1 otherwise, normal e_j.
    for j in 0..n {
        let mut u = vec![-1.0; n];
        u[j] = 0.0;
        let mut p = vec![0.0; n];
        p[j] = 1.0;
        if !flux_ok(&u, &p) {
            return Ok(false);
        }
    }
    // Row-sum faces: face point of the translate 1 + R^m_- with w = 0.
    for j in 0..n {
        let u = vec![1.0; n];
        let mut p = vec![0.0; n];
        p[j] = 1.0;
        if !flux_ok(&u, &p) {
            return Ok(false);
        }
    }
    // Random boundary points of random translates, with normals drawn from
    // the normal cone at the sampled point.
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x466c7578);
    for _ in 0..samples {
        let a: f64 = rng.gen_range(0.0..2.0);
        let mut u = vec![0.0; n];
        let mut active = vec![false; n];
        let mut any_active = false;
        for j in 0..n {
            if rng.gen_bool(0.5) {
                active[j] = true;
                any_active = true;
                u[j] = a;
            } else {
                u[j] = a - rng.gen_range(0.0..1.0);
            }
        }
        if !any_active {
            let j = rng.gen_range(0..n);
            active[j] = true;
            u[j] = a;
        }
        let mut p = vec![0.0; n];
        for j in 0..n {
            if active[j] {
                p[j] = rng.gen_range(0.0..1.0);
            }
        }
        if !flux_ok(&u, &p) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eigen_example_2x2() {
        // Roots of the characteristic polynomial l^2 - 6l + 8 are {2, 4}.
        let m = Mat::from_rows(&[&[6.0, 1.0], &[-8.0, 0.0]]);
        let d = eigen(&m).unwrap();
        assert!(approx(d.eigenvalues[0].0, 2.0, 1e-9));
        assert!(approx(d.eigenvalues[1].0, 4.0, 1e-9));
        let v = d.real_eigenbasis.expect("real basis");
        // B v = lambda v for each column.
        for (j, lambda) in [2.0, 4.0].iter().enumerate() {
            let col = [v.get(0, j), v.get(1, j)];
            let bv = m.mul_vec(&col);
            assert!(approx(bv[0], lambda * col[0], 1e-8));
            assert!(approx(bv[1], lambda * col[1], 1e-8));
        }
    }

    #[test]
    fn eigen_identity() {
        let d = eigen(&Mat::identity(2)).unwrap();
        assert!(approx(d.eigenvalues[0].0, 1.0, 1e-12));
        assert!(approx(d.eigenvalues[1].0, 1.0, 1e-12));
        let v = d.real_eigenbasis.expect("identity is diagonalizable");
        // Any orthonormal basis works; residual check is the contract.
        assert!(v.condition_number() < 10.0);
    }

    #[test]
    fn eigen_rotation_has_no_real_basis() {
        let m = Mat::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let d = eigen(&m).unwrap();
        assert!(d.real_eigenbasis.is_none());
        assert!(approx(d.eigenvalues[0].1.abs(), 1.0, 1e-9));
    }

    #[test]
    fn eigen_jordan_block_not_diagonalizable() {
        let m = Mat::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let d = eigen(&m).unwrap();
        assert!(d.real_eigenbasis.is_none());
    }

    #[test]
    fn eigen_rejects_nonsquare_and_large() {
        let m = Mat::try_from(vec![vec![1.0, 2.0]]).unwrap();
        assert!(matches!(eigen(&m), Err(AlgebraError::NonSquare { .. })));
        let big = Mat::identity(17);
        assert!(matches!(eigen(&big), Err(AlgebraError::DimensionTooLarge(17))));
    }

    #[test]
    fn cooperative_examples() {
        let c = Mat::from_rows(&[&[-3.0, 2.0], &[1.0, -2.0]]);
        assert!(is_cooperative(&c).unwrap().is_cooperative);
        let c2 = Mat::from_rows(&[&[-4.0, 3.0], &[0.0, -1.0]]);
        assert!(is_cooperative(&c2).unwrap().is_cooperative);
        let c3 = Mat::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let r = is_cooperative(&c3).unwrap();
        assert!(!r.is_cooperative);
        assert!(approx(r.worst_rowsum_margin, 1.0, 1e-12));
    }

    #[test]
    fn strict_level_formula() {
        let c = Mat::from_rows(&[&[-3.0, 2.0], &[1.0, -2.0]]);
        let r = is_cooperative(&c).unwrap();
        // min(min offdiag, min_j -rowsum_j) = min(1, min(1, 1)) = 1.
        assert!(approx(r.strict_level, 1.0, 1e-12));
    }

    #[test]
    fn m_matrix_examples() {
        let q = Mat::from_rows(&[&[2.0, -1.0], &[-1.0, 2.0]]);
        let r = is_m_matrix(&q).unwrap();
        assert!(r.is_m_matrix);
        assert!(approx(r.s, 2.0, 1e-12));
        assert!(approx(r.spectral_radius, 1.0, 1e-9));
        assert_eq!(r.inverse_nonneg, Some(true));

        assert!(is_m_matrix(&Mat::identity(3)).unwrap().is_m_matrix);

        let sing = Mat::from_rows(&[&[0.0, -1.0], &[-1.0, 0.0]]);
        let r = is_m_matrix(&sing).unwrap();
        assert!(!r.is_m_matrix);
        assert!(approx(r.spectral_radius, r.s.max(1.0), 1e-9));
    }

    #[test]
    fn conjugate_remark_example() {
        let c = Mat::from_rows(&[&[-3.0, 2.0], &[1.0, -2.0]]);
        let q = Mat::from_rows(&[&[2.0, -1.0], &[-1.0, 2.0]]);
        let r = conjugate(&c, &q).unwrap();
        let expected = Mat::from_rows(&[&[-4.0, 3.0], &[0.0, -1.0]]);
        assert!(r.sub(&expected).norm_max() <= 1e-12);
    }

    #[test]
    fn conjugate_identity_and_scalar() {
        let c = Mat::from_rows(&[&[-3.0, 2.0], &[1.0, -2.0]]);
        let r = conjugate(&c, &Mat::identity(2)).unwrap();
        assert!(r.sub(&c).norm_max() <= 1e-12);

        let neg_i = Mat::identity(2).scale(-1.0);
        let q = Mat::from_rows(&[&[3.0, 1.0], &[2.0, 5.0]]);
        let r = conjugate(&neg_i, &q).unwrap();
        assert!(r.sub(&neg_i).norm_max() <= 1e-12);
    }

    #[test]
    fn conjugate_rejects_singular() {
        let c = Mat::identity(2);
        let q = Mat::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(conjugate(&c, &q), Err(AlgebraError::SingularQ { .. })));
    }

    #[test]
    fn flux_condition_examples() {
        let coop = Mat::from_rows(&[&[-3.0, 2.0], &[1.0, -2.0]]);
        assert!(flux_condition_orthant(&coop, 1000).unwrap());
        // Positive row sums must be caught by the translated faces.
        let swap = Mat::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(!flux_condition_orthant(&swap, 1000).unwrap());
        let zero = Mat::zeros(3, 3);
        assert!(flux_condition_orthant(&zero, 10).unwrap());
    }
}
