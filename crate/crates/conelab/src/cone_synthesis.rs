//! Search for a change of basis Q that simultaneously diagonalizes the
//! first-order coupling matrices and turns the cone {u : Q^{-1} u <= 0}
//! (or a partial k-row version of it) into an invariant set.

use crate::matrix_algebra::{
    self, conjugate, eigen, is_cooperative, normalize_column, Mat, TAU_ALG,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Linear elliptic system with componentwise Laplacian second-order part:
/// Au + sum_i B^(i) D_i u + C u >= 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EllipticSystem {
    /// Spatial dimension.
    pub n: usize,
    /// Number of unknowns.
    pub m: usize,
    /// First-order coupling matrices, one m x m matrix per spatial direction.
    #[serde(rename = "B")]
    pub b: Vec<Mat>,
    /// Zero-order coupling matrix.
    #[serde(rename = "C")]
    pub c: Mat,
}

impl EllipticSystem {
    pub fn new(b: Vec<Mat>, c: Mat) -> Result<EllipticSystem, SynthesisError> {
        let m = c.rows();
        if !c.is_square() || m == 0 {
            return Err(SynthesisError::BadSystem("C must be square and nonempty".into()));
        }
        if b.is_empty() {
            return Err(SynthesisError::BadSystem("at least one B matrix required".into()));
        }
        if b.iter().any(|bi| bi.rows() != m || bi.cols() != m) {
            return Err(SynthesisError::BadSystem("all B matrices must be m x m".into()));
        }
        Ok(EllipticSystem { n: b.len(), m, b, c })
    }
}

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error("invalid system: {0}")]
    BadSystem(String),
    #[error("no common real eigenbasis exists: {0}")]
    NoCommonBasis(String),
    #[error("search exhausted without a valid cone: {0}")]
    SearchExhausted(NotFoundReport),
    #[error(transparent)]
    Algebra(#[from] matrix_algebra::AlgebraError),
}

/// Diagnosis attached to a failed search: which condition broke for the
/// candidate that got furthest.
#[derive(Debug, Clone, Serialize)]
pub struct NotFoundReport {
    pub candidates_tried: usize,
    pub best_failed_condition: String,
    /// Non-simple eigenspaces are searched only through their computed
    /// orthogonal representatives; "not found" is not "nonexistent".
    pub search_space_note: String,
}

impl std::fmt::Display for NotFoundReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} candidates tried, best candidate failed: {}",
            self.candidates_tried, self.best_failed_condition
        )
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CertChecks {
    pub diagonalized: bool,
    pub p_rows_nonneg: bool,
    pub conj_coop: bool,
}

/// Certificate for the invariant cone {u : first k rows of P u <= 0}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeCertificate {
    #[serde(rename = "Q")]
    pub q: Mat,
    #[serde(rename = "P")]
    pub p: Mat,
    /// Active row count: k = m for a full cone, k < m for a partial one.
    pub k: usize,
    /// Drift coefficients beta[i][j] for direction i and component j < k.
    pub betas: Vec<Vec<f64>>,
    pub checks: CertChecks,
    pub candidates_tried: usize,
}

/// True iff all B^(i) pairwise commute (relative max-norm tolerance).
pub fn commute_check(sys: &EllipticSystem) -> bool {
    for i in 0..sys.n {
        for j in (i + 1)..sys.n {
            let bi = &sys.b[i];
            let bj = &sys.b[j];
            let comm = bi.mul(bj).sub(&bj.mul(bi));
            let scale = 1.0 + bi.norm_max() * bj.norm_max();
            if comm.norm_max() > TAU_ALG * scale {
                return false;
            }
        }
    }
    true
}

/// Eigenvalue of `b` along eigenvector `q`, read off at the largest entry.
fn rayleigh(b: &Mat, q: &[f64]) -> f64 {
    let bq = b.mul_vec(q);
    let idx = q
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    bq[idx] / q[idx]
}

fn eigen_residual(b: &Mat, q: &[f64], beta: f64) -> f64 {
    let bq = b.mul_vec(q);
    bq.iter()
        .zip(q)
        .map(|(x, y)| (x - beta * y).abs())
        .fold(0.0, f64::max)
}

/// Common real eigenbasis of all B^(i), found from a generic random
/// combination and verified per matrix. Two independent draws must both
/// yield a verified basis.
fn common_eigenbasis(sys: &EllipticSystem) -> Result<(Mat, Vec<Vec<f64>>), SynthesisError> {
    let m = sys.m;
    let scale: f64 = sys.b.iter().map(|b| 1.0 + b.norm_max()).product();
    let try_draw = |rng: &mut ChaCha8Rng| -> Result<(Mat, Vec<Vec<f64>>), String> {
        let combo = {
            let mut acc = DMatrix::<f64>::zeros(m, m);
            for bi in &sys.b {
                let t: f64 = rng.gen_range(0.25..1.0);
                acc += bi.to_dmatrix() * t;
            }
            Mat::from_dmatrix(&acc)
        };
        let decomp = eigen(&combo).map_err(|e| e.to_string())?;
        let basis = decomp
            .real_eigenbasis
            .ok_or("generic combination has no real eigenbasis")?;
        // Each column must be an eigenvector of every B^(i).
        let mut betas = vec![vec![0.0; m]; sys.n];
        for j in 0..m {
            let col: Vec<f64> = (0..m).map(|i| basis.get(i, j)).collect();
            for (i, bi) in sys.b.iter().enumerate() {
                let beta = rayleigh(bi, &col);
                if eigen_residual(bi, &col, beta) > 1e-7 * scale {
                    return Err(format!(
                        "column {j} is not an eigenvector of B^({})",
                        i + 1
                    ));
                }
                betas[i][j] = beta;
            }
        }
        Ok((basis, betas))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let first = try_draw(&mut rng);
    let second = try_draw(&mut rng);
    match (first, second) {
        (Ok(res), Ok(_)) => Ok(res),
        (Err(e), _) | (_, Err(e)) => Err(SynthesisError::NoCommonBasis(e)),
    }
}

/// Lexicographic sign patterns: bit j = 0 means +1 on column j.
fn sign_pattern(mask: usize, len: usize) -> Vec<f64> {
    (0..len)
        .map(|j| if mask & (1 << (len - 1 - j)) == 0 { 1.0 } else { -1.0 })
        .collect()
}

/// Permutations of 0..len in lexicographic order.
fn permutations(len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..len).collect();
    fn heap(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in k..cur.len() {
            cur.swap(k, i);
            heap(cur, k + 1, out);
            cur.swap(k, i);
        }
    }
    heap(&mut cur, 0, &mut out);
    out.sort();
    out
}

fn check_candidate_full(
    sys: &EllipticSystem,
    q: &Mat,
    betas: &[Vec<f64>],
) -> Result<(CertChecks, Option<Mat>), String> {
    let m = sys.m;
    let p = match q.inverse() {
        Ok(p) => p,
        Err(_) => return Err("Q singular".into()),
    };
    let mut checks = CertChecks {
        diagonalized: true,
        p_rows_nonneg: true,
        conj_coop: true,
    };
    for (i, bi) in sys.b.iter().enumerate() {
        for j in 0..m {
            let col: Vec<f64> = (0..m).map(|r| q.get(r, j)).collect();
            if eigen_residual(bi, &col, betas[i][j]) > 1e-7 * (1.0 + bi.norm_max()) {
                checks.diagonalized = false;
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            if p.get(i, j) < -TAU_ALG {
                checks.p_rows_nonneg = false;
            }
        }
    }
    let conj = conjugate(&sys.c, q).map_err(|e| e.to_string())?;
    if !is_cooperative(&conj).map_err(|e| e.to_string())?.is_cooperative {
        checks.conj_coop = false;
    }
    if checks.diagonalized && checks.p_rows_nonneg && checks.conj_coop {
        Ok((checks, Some(p)))
    } else {
        Ok((checks, None))
    }
}

fn failed_condition(c: &CertChecks) -> &'static str {
    if !c.diagonalized {
        "simultaneous diagonalization of the drift matrices"
    } else if !c.p_rows_nonneg {
        "nonnegative certified rows of P"
    } else {
        "cooperativity of the conjugated zero-order matrix"
    }
}

fn score(c: &CertChecks) -> u32 {
    c.diagonalized as u32 + c.p_rows_nonneg as u32 + c.conj_coop as u32
}

/// Full-cone search (k = m): enumerate sign patterns and column
/// permutations of the common eigenbasis, lexicographically.
pub fn synthesize_full_cone(sys: &EllipticSystem) -> Result<ConeCertificate, SynthesisError> {
    let m = sys.m;
    let (basis, betas) = common_eigenbasis(sys)?;
    let perms = if m <= 8 {
        permutations(m)
    } else {
        vec![(0..m).collect()]
    };
    let mut tried = 0usize;
    let mut best: Option<CertChecks> = None;
    for mask in 0..(1usize << m) {
        let signs = sign_pattern(mask, m);
        for perm in &perms {
            tried += 1;
            let mut q = Mat::zeros(m, m);
            let mut cand_betas = vec![vec![0.0; m]; sys.n];
            for (dst, &src) in perm.iter().enumerate() {
                for r in 0..m {
                    q.set(r, dst, signs[dst] * basis.get(r, src));
                }
                for i in 0..sys.n {
                    cand_betas[i][dst] = betas[i][src];
                }
            }
            match check_candidate_full(sys, &q, &cand_betas) {
                Ok((checks, Some(p))) => {
                    return Ok(ConeCertificate {
                        q,
                        p,
                        k: m,
                        betas: cand_betas,
                        checks,
                        candidates_tried: tried,
                    });
                }
                Ok((checks, None)) => {
                    if best.map_or(true, |b| score(&checks) > score(&b)) {
                        best = Some(checks);
                    }
                }
                Err(_) => {}
            }
        }
    }
    Err(SynthesisError::SearchExhausted(NotFoundReport {
        candidates_tried: tried,
        best_failed_condition: best
            .map(|c| failed_condition(&c).to_string())
            .unwrap_or_else(|| "no invertible candidate".to_string()),
        search_space_note: "normalized sign/permutation space only".to_string(),
    }))
}

/// Real eigenvalues of a matrix (clustered representatives).
fn real_eigenvalue_reps(b: &Mat) -> Vec<f64> {
    let scale = 1.0 + b.norm_max();
    let eig = match matrix_algebra::complex_eigs(&b.to_dmatrix()) {
        Ok(e) => e,
        Err(_) => return Vec::new(),
    };
    let mut reps: Vec<f64> = Vec::new();
    for c in eig.iter() {
        if c.im.abs() <= 1e-8 * scale && !reps.iter().any(|r| (r - c.re).abs() <= 1e-7 * scale) {
            reps.push(c.re);
        }
    }
    reps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    reps
}

/// All common real eigenvectors of the B^(i), each tagged with its
/// eigenvalue tuple. Found by intersecting one eigenspace per matrix over
/// all eigenvalue combinations.
fn common_eigenvectors(sys: &EllipticSystem) -> Vec<(Vec<f64>, Vec<f64>)> {
    let m = sys.m;
    let per_matrix: Vec<Vec<f64>> = sys.b.iter().map(real_eigenvalue_reps).collect();
    let mut combos: Vec<Vec<f64>> = vec![vec![]];
    for reps in &per_matrix {
        let mut next = Vec::new();
        for combo in &combos {
            for &r in reps {
                let mut c = combo.clone();
                c.push(r);
                next.push(c);
            }
        }
        combos = next;
    }
    let mut out: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for combo in combos {
        // Stack (B^(i) - lambda_i I) and take the joint nullspace.
        let mut stacked = DMatrix::<f64>::zeros(sys.n * m, m);
        for (i, bi) in sys.b.iter().enumerate() {
            let shifted = bi.to_dmatrix() - DMatrix::<f64>::identity(m, m) * combo[i];
            for r in 0..m {
                for c in 0..m {
                    stacked[(i * m + r, c)] = shifted[(r, c)];
                }
            }
        }
        let scale: f64 = sys.b.iter().fold(1.0, |a, b| a + b.norm_max());
        let svd = stacked.svd(false, true);
        let vt = svd.v_t.expect("svd v_t");
        for r in 0..m {
            let sv = if r < svd.singular_values.len() {
                svd.singular_values[r]
            } else {
                0.0
            };
            if sv <= 1e-7 * scale {
                let v: Vec<f64> = (0..m).map(|c| vt[(r, c)]).collect();
                out.push((normalize_column(&v), combo.clone()));
            }
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Orthogonal complement of the span of `cols` by Gram-Schmidt sweeps over
/// the axis vectors; returns empty when `cols` itself is dependent.
fn orthogonal_complement(cols: &[Vec<f64>], m: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let orthogonalize = |v: &[f64], basis: &mut Vec<Vec<f64>>| -> Option<Vec<f64>> {
        let mut w = v.to_vec();
        for b in basis.iter() {
            let dot: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= dot * bi;
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 1e-9 {
            return None;
        }
        let w: Vec<f64> = w.iter().map(|x| x / norm).collect();
        basis.push(w.clone());
        Some(w)
    };
    for col in cols {
        if orthogonalize(col, &mut basis).is_none() {
            return Vec::new();
        }
    }
    let mut out = Vec::new();
    for j in 0..m {
        if out.len() == m - cols.len() {
            break;
        }
        let mut e = vec![0.0; m];
        e[j] = 1.0;
        if let Some(w) = orthogonalize(&e, &mut basis) {
            out.push(normalize_column(&w));
        }
    }
    out
}

/// Partial-cone search (k < m certified rows). Falls back through
/// decreasing k over subsets of the common eigenvectors; the basis is
/// completed with the orthogonal complement.
pub fn synthesize_partial_cone(sys: &EllipticSystem) -> Result<ConeCertificate, SynthesisError> {
    // The full case is k = m; reuse the full search verbatim.
    match synthesize_full_cone(sys) {
        Ok(cert) => return Ok(cert),
        Err(SynthesisError::BadSystem(e)) => return Err(SynthesisError::BadSystem(e)),
        Err(_) => {}
    }
    let m = sys.m;
    let candidates = common_eigenvectors(sys);
    if candidates.is_empty() {
        return Err(SynthesisError::NoCommonBasis(
            "no common real eigenvector".to_string(),
        ));
    }
    let mut tried = 0usize;
    let mut best: Option<String> = None;
    let k_max = candidates.len().min(m - 1);
    for k in (1..=k_max).rev() {
        for subset in combinations(candidates.len(), k) {
            let cols: Vec<Vec<f64>> = subset.iter().map(|&i| candidates[i].0.clone()).collect();
            let completion = orthogonal_complement(&cols, m);
            if completion.len() != m - k {
                continue; // dependent subset
            }
            for mask in 0..(1usize << k) {
                tried += 1;
                let signs = sign_pattern(mask, k);
                let mut q = Mat::zeros(m, m);
                for (j, col) in cols.iter().enumerate() {
                    for r in 0..m {
                        q.set(r, j, signs[j] * col[r]);
                    }
                }
                for (j, col) in completion.iter().enumerate() {
                    for r in 0..m {
                        q.set(r, k + j, col[r]);
                    }
                }
                let p = match q.inverse() {
                    Ok(p) => p,
                    Err(_) => continue,
                };
                let betas: Vec<Vec<f64>> = (0..sys.n)
                    .map(|i| subset.iter().map(|&c| candidates[c].1[i]).collect())
                    .collect();
                let mut checks = CertChecks {
                    diagonalized: true,
                    p_rows_nonneg: true,
                    conj_coop: true,
                };
                for (i, bi) in sys.b.iter().enumerate() {
                    for j in 0..k {
                        let col: Vec<f64> = (0..m).map(|r| q.get(r, j)).collect();
                        if eigen_residual(bi, &col, betas[i][j]) > 1e-7 * (1.0 + bi.norm_max()) {
                            checks.diagonalized = false;
                        }
                    }
                }
                for i in 0..k {
                    for j in 0..m {
                        if p.get(i, j) < -TAU_ALG {
                            checks.p_rows_nonneg = false;
                        }
                    }
                }
                let conj = conjugate(&sys.c, &q)?;
                let scale = 1.0 + sys.c.norm_max();
                let mut lead = Mat::zeros(k, k);
                for i in 0..k {
                    for j in 0..k {
                        lead.set(i, j, conj.get(i, j));
                    }
                    for j in k..m {
                        if conj.get(i, j).abs() > TAU_ALG * scale {
                            checks.conj_coop = false;
                        }
                    }
                }
                if !is_cooperative(&lead)?.is_cooperative {
                    checks.conj_coop = false;
                }
                if checks.diagonalized && checks.p_rows_nonneg && checks.conj_coop {
                    return Ok(ConeCertificate {
                        q,
                        p,
                        k,
                        betas,
                        checks,
                        candidates_tried: tried,
                    });
                }
                if best.is_none() {
                    best = Some(failed_condition(&checks).to_string());
                }
            }
        }
    }
    Err(SynthesisError::SearchExhausted(NotFoundReport {
        candidates_tried: tried,
        best_failed_condition: best.unwrap_or_else(|| "no invertible candidate".to_string()),
        search_space_note: "subsets of computed common eigenvectors with sign flips only"
            .to_string(),
    }))
}

/// Independent re-validation of a certificate against the system, using the
/// matrix_algebra checks rather than any search state.
pub fn validate_certificate(
    sys: &EllipticSystem,
    cert: &ConeCertificate,
) -> Result<(), String> {
    let m = sys.m;
    let k = cert.k;
    if cert.q.rows() != m || cert.q.cols() != m || k == 0 || k > m {
        return Err("certificate dimensions do not match the system".into());
    }
    let qp = cert.q.mul(&cert.p);
    if qp.sub(&Mat::identity(m)).norm_max() > 1e-8 {
        return Err("Q*P is not the identity".into());
    }
    for (i, bi) in sys.b.iter().enumerate() {
        for j in 0..k {
            let col: Vec<f64> = (0..m).map(|r| cert.q.get(r, j)).collect();
            if eigen_residual(bi, &col, cert.betas[i][j]) > 1e-7 * (1.0 + bi.norm_max()) {
                return Err(format!("column {j} is not an eigenvector of B^({})", i + 1));
            }
        }
    }
    for i in 0..k {
        for j in 0..m {
            if cert.p.get(i, j) < -TAU_ALG {
                return Err(format!("P row {i} has a negative entry"));
            }
        }
    }
    let conj = conjugate(&sys.c, &cert.q).map_err(|e| e.to_string())?;
    if k == m {
        if !is_cooperative(&conj).map_err(|e| e.to_string())?.is_cooperative {
            return Err("conjugated C is not cooperative".into());
        }
    } else {
        let scale = 1.0 + sys.c.norm_max();
        let mut lead = Mat::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                lead.set(i, j, conj.get(i, j));
            }
            for j in k..m {
                if conj.get(i, j).abs() > TAU_ALG * scale {
                    return Err("leading block of conjugated C has nonzero tail".into());
                }
            }
        }
        if !is_cooperative(&lead).map_err(|e| e.to_string())?.is_cooperative {
            return Err("leading block of conjugated C is not cooperative".into());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_1_8() -> EllipticSystem {
        EllipticSystem::new(
            vec![
                Mat::from_rows(&[&[6.0, 1.0], &[-8.0, 0.0]]),
                Mat::zeros(2, 2),
            ],
            Mat::identity(2).scale(-1.0),
        )
        .unwrap()
    }

    #[test]
    fn commute_examples() {
        assert!(commute_check(&example_1_8()));
        let sys = EllipticSystem::new(
            vec![
                Mat::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]),
                Mat::from_rows(&[&[0.0, 0.0], &[1.0, 0.0]]),
            ],
            Mat::zeros(2, 2),
        )
        .unwrap();
        assert!(!commute_check(&sys));
        let single = EllipticSystem::new(
            vec![Mat::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]])],
            Mat::zeros(2, 2),
        )
        .unwrap();
        assert!(commute_check(&single));
    }

    #[test]
    fn full_cone_example_1_8() {
        let sys = example_1_8();
        let cert = synthesize_full_cone(&sys).unwrap();
        assert_eq!(cert.k, 2);
        // Diagonalized drifts are (2, 4) along x1 and (0, 0) along x2.
        assert!((cert.betas[0][0] - 2.0).abs() < 1e-9);
        assert!((cert.betas[0][1] - 4.0).abs() < 1e-9);
        assert!(cert.betas[1][0].abs() < 1e-9 && cert.betas[1][1].abs() < 1e-9);
        // Cone rows proportional to (1, 1/2) and (4, 1).
        let r0 = (cert.p.get(0, 1) / cert.p.get(0, 0), 0.5);
        let r1 = (cert.p.get(1, 1) / cert.p.get(1, 0), 0.25);
        assert!((r0.0 - r0.1).abs() < 1e-9);
        assert!((r1.0 - r1.1).abs() < 1e-9);
        validate_certificate(&sys, &cert).unwrap();
    }

    #[test]
    fn full_cone_diagonal_b_gives_orthant() {
        let sys = EllipticSystem::new(
            vec![Mat::from_rows(&[&[2.0, 0.0], &[0.0, -1.0]])],
            Mat::from_rows(&[&[-3.0, 2.0], &[1.0, -2.0]]),
        )
        .unwrap();
        let cert = synthesize_full_cone(&sys).unwrap();
        validate_certificate(&sys, &cert).unwrap();
        // The cone is exactly the negative orthant: P is a nonnegative
        // monomial matrix (one positive entry per row and column).
        for i in 0..2 {
            let row: Vec<f64> = (0..2).map(|j| cert.p.get(i, j)).collect();
            let nonzeros = row.iter().filter(|v| v.abs() > 1e-9).count();
            assert_eq!(nonzeros, 1, "row {i}: {row:?}");
            assert!(row.iter().all(|&v| v > -1e-9));
        }
        assert!(cert.p.get(0, 0).abs() + cert.p.get(1, 0).abs() > 1e-9);
        assert!(cert.p.get(0, 1).abs() + cert.p.get(1, 1).abs() > 1e-9);
    }

    #[test]
    fn full_cone_example_1_3_not_found() {
        let sys = EllipticSystem::new(
            vec![Mat::from_rows(&[&[0.0, -1.0], &[-1.0, 0.0]])],
            Mat::zeros(2, 2),
        )
        .unwrap();
        match synthesize_full_cone(&sys) {
            Err(SynthesisError::SearchExhausted(rep)) => {
                assert!(rep.best_failed_condition.contains("nonnegative certified rows"));
            }
            other => panic!("expected SearchExhausted, got {other:?}"),
        }
    }

    #[test]
    fn partial_cone_example_1_10() {
        let sys = EllipticSystem::new(
            vec![
                Mat::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
                Mat::zeros(2, 2),
            ],
            Mat::identity(2).scale(-1.0),
        )
        .unwrap();
        let cert = synthesize_partial_cone(&sys).unwrap();
        assert_eq!(cert.k, 1);
        // Half-space cone {u1 + u2 <= 0}: first row of P proportional to (1, 1).
        assert!((cert.p.get(0, 0) - cert.p.get(0, 1)).abs() < 1e-9);
        assert!(cert.p.get(0, 0) > 0.0);
        assert!((cert.betas[0][0] - 1.0).abs() < 1e-9);
        validate_certificate(&sys, &cert).unwrap();
    }

    #[test]
    fn partial_cone_reduces_to_full() {
        let sys = example_1_8();
        let full = synthesize_full_cone(&sys).unwrap();
        let partial = synthesize_partial_cone(&sys).unwrap();
        assert_eq!(partial.k, sys.m);
        assert!(partial.q.sub(&full.q).norm_max() < 1e-12);
    }

    #[test]
    fn partial_cone_no_real_eigenvector() {
        let sys = EllipticSystem::new(
            vec![Mat::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]])],
            Mat::zeros(2, 2),
        )
        .unwrap();
        assert!(matches!(
            synthesize_partial_cone(&sys),
            Err(SynthesisError::NoCommonBasis(_))
        ));
    }

    #[test]
    fn scale_invariance_of_validation() {
        let sys = example_1_8();
        let cert = synthesize_full_cone(&sys).unwrap();
        // Rescaling columns of Q by a positive diagonal keeps the cone valid.
        let d = Mat::from_rows(&[&[3.0, 0.0], &[0.0, 0.5]]);
        let q = cert.q.mul(&d);
        let p = q.inverse().unwrap();
        let scaled = ConeCertificate { q, p, ..cert };
        validate_certificate(&sys, &scaled).unwrap();
    }
}
