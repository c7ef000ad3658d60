//! Scalar Bellman reduction F[psi] = Delta psi + max_j b^j . grad psi,
//! supersolution-certified lower bounds for its principal eigenvalue, and a
//! 1D discrete upper-bound oracle.

use crate::cone_synthesis::ConeCertificate;
use crate::cone_synthesis::EllipticSystem;
use crate::fd_lab::{DiscreteField, GridDomain};
use serde::Serialize;
use thiserror::Error;

/// Pointwise tolerance for supersolution re-validation.
pub const TAU_EIG: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum BellmanError {
    #[error("certificate not usable for the reduction: {0}")]
    InvalidCertificate(String),
    #[error("node {0} is not interior")]
    BoundaryNode(usize),
    #[error("inverse power iteration failed to converge")]
    ConvergenceFailure,
}

/// The reduced scalar problem: drift vectors b^j over a box domain.
#[derive(Debug, Clone, Serialize)]
pub struct BellmanProblem {
    pub n: usize,
    /// One drift vector per component of the original system.
    pub drifts: Vec<Vec<f64>>,
    pub domain: GridDomain,
}

/// Certified two-sided information on the principal eigenvalue.
#[derive(Debug, Clone, Serialize)]
pub struct EigenBound {
    pub lower: f64,
    /// Min over drifts of the 1D discrete eigenvalue; only for intervals.
    pub upper: Option<f64>,
    pub gamma: f64,
    pub delta: f64,
    pub grid: GridDomain,
}

/// Builds the scalar problem from a full-cone certificate: drift j collects
/// the j-th diagonal entries of the transformed first-order matrices.
pub fn reduce_to_bellman(
    sys: &EllipticSystem,
    cert: &ConeCertificate,
    domain: GridDomain,
) -> Result<BellmanProblem, BellmanError> {
    if cert.k != sys.m {
        return Err(BellmanError::InvalidCertificate(format!(
            "need a full cone (k = {}), got k = {}",
            sys.m, cert.k
        )));
    }
    if cert.betas.len() != sys.n || cert.betas.iter().any(|row| row.len() != sys.m) {
        return Err(BellmanError::InvalidCertificate(
            "betas table shape does not match the system".to_string(),
        ));
    }
    if domain.dim() != sys.n {
        return Err(BellmanError::InvalidCertificate(format!(
            "domain dimension {} does not match system dimension {}",
            domain.dim(),
            sys.n
        )));
    }
    let drifts = (0..sys.m)
        .map(|j| (0..sys.n).map(|i| cert.betas[i][j]).collect())
        .collect();
    Ok(BellmanProblem {
        n: sys.n,
        drifts,
        domain,
    })
}

/// F[psi] at an interior grid node by centered differences.
pub fn evaluate_f(
    p: &BellmanProblem,
    psi: &DiscreteField,
    node: usize,
) -> Result<f64, BellmanError> {
    let grid = &psi.grid;
    if !grid.is_interior(node) {
        return Err(BellmanError::BoundaryNode(node));
    }
    let h = grid.spacing();
    let center = psi.value(node, 0);
    let mut lap = 0.0;
    let mut grad = vec![0.0; p.n];
    for i in 0..p.n {
        let up = psi.value(grid.neighbor_node(node, i, 1), 0);
        let dn = psi.value(grid.neighbor_node(node, i, -1), 0);
        lap += (up - 2.0 * center + dn) / (h[i] * h[i]);
        grad[i] = (up - dn) / (2.0 * h[i]);
    }
    let drift_term = p
        .drifts
        .iter()
        .map(|b| b.iter().zip(&grad).map(|(bi, gi)| bi * gi).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(lap + drift_term)
}

/// Closed-form F[psi] for the exponential supersolution
/// psi = 1 - delta e^{gamma x_1}.
fn f_of_supersolution(p: &BellmanProblem, gamma: f64, delta: f64, x1: f64) -> f64 {
    let e = delta * gamma * (gamma * x1).exp();
    let min_b1 = p
        .drifts
        .iter()
        .map(|b| b[0])
        .fold(f64::INFINITY, f64::min);
    -e * (gamma + min_b1)
}

fn supersolution_value(gamma: f64, delta: f64, x1: f64) -> f64 {
    1.0 - delta * (gamma * x1).exp()
}

/// Certified positive lower bound for the principal eigenvalue via the
/// supersolution psi = 1 - delta e^{gamma x_1}: gamma clears the worst drift
/// by 1, delta keeps psi >= 1/2 on the closed box, and the bound is the
/// largest lambda with F[psi] + lambda psi <= 0 on a 200-per-axis grid.
pub fn supersolution_lower_bound(p: &BellmanProblem) -> EigenBound {
    let min_b1 = p
        .drifts
        .iter()
        .map(|b| b[0])
        .fold(f64::INFINITY, f64::min);
    let gamma = min_b1.abs() + 1.0;
    let delta = 0.5 * (-gamma * p.domain.hi[0]).exp();

    // F[psi] and psi depend on x_1 only; verify on 200 nodes along axis 1
    // spanning the closure (the remaining axes are immaterial, but the grid
    // spec is kept for the record).
    let grid = p.domain.clone();
    let nodes = 200usize;
    let x1s: Vec<f64> = (0..nodes)
        .map(|i| {
            grid.lo[0] + (grid.hi[0] - grid.lo[0]) * i as f64 / (nodes - 1) as f64
        })
        .collect();

    let admissible = |lambda: f64| {
        x1s.iter().all(|&x1| {
            f_of_supersolution(p, gamma, delta, x1)
                + lambda * supersolution_value(gamma, delta, x1)
                <= 0.0
        })
    };
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while admissible(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            break;
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if admissible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lower = lo;

    // Independent re-validation of the certificate.
    for &x1 in &x1s {
        let psi = supersolution_value(gamma, delta, x1);
        let f = f_of_supersolution(p, gamma, delta, x1);
        assert!(f + lower * psi <= TAU_EIG, "supersolution check failed");
        assert!(psi >= 0.5 - TAU_EIG, "supersolution floor failed");
    }

    let upper = if p.n == 1 {
        let rho = p.domain.hi[0] - p.domain.lo[0];
        p.drifts
            .iter()
            .map(|b| linear_principal_eigenvalue(b[0], rho))
            .try_fold(f64::INFINITY, |acc, r| r.map(|v| acc.min(v)))
            .ok()
    } else {
        None
    };

    EigenBound {
        lower,
        upper,
        gamma,
        delta,
        grid,
    }
}

/// Discrete principal eigenvalue of -(psi'' + b1 psi') on (0, rho) with
/// Dirichlet ends: centered differences at h <= 1e-3, inverse power
/// iteration with a Thomas solve per step.
pub fn linear_principal_eigenvalue(b1: f64, rho: f64) -> Result<f64, BellmanError> {
    assert!(rho > 0.0);
    let n_cells = ((rho / 1e-3).ceil() as usize).max(4);
    let n = n_cells - 1; // interior nodes
    let h = rho / n_cells as f64;
    let diag = 2.0 / (h * h);
    let lower = -1.0 / (h * h) + b1 / (2.0 * h);
    let upper = -1.0 / (h * h) - b1 / (2.0 * h);

    // Thomas factorization of the constant tridiagonal system.
    let solve = |rhs: &[f64]| -> Vec<f64> {
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        cp[0] = upper / diag;
        dp[0] = rhs[0] / diag;
        for i in 1..n {
            let denom = diag - lower * cp[i - 1];
            cp[i] = upper / denom;
            dp[i] = (rhs[i] - lower * dp[i - 1]) / denom;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = dp[i] - cp[i] * x[i + 1];
        }
        x
    };

    // Positive start vector: the principal eigenfunction is positive.
    let mut y: Vec<f64> = (1..=n)
        .map(|i| (std::f64::consts::PI * i as f64 / n_cells as f64).sin())
        .collect();
    let mut lambda_old = f64::INFINITY;
    for _ in 0..10_000 {
        let z = solve(&y);
        let norm = z.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if norm == 0.0 {
            return Err(BellmanError::ConvergenceFailure);
        }
        let y_new: Vec<f64> = z.iter().map(|v| v / norm).collect();
        // Rayleigh quotient of the tridiagonal operator at y_new.
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            let mut a_y = diag * y_new[i];
            if i > 0 {
                a_y += lower * y_new[i - 1];
            }
            if i + 1 < n {
                a_y += upper * y_new[i + 1];
            }
            num += y_new[i] * a_y;
            den += y_new[i] * y_new[i];
        }
        let lambda = num / den;
        if (lambda - lambda_old).abs() <= 1e-10 * lambda.abs().max(1.0) {
            return Ok(lambda);
        }
        lambda_old = lambda;
        y = y_new;
    }
    Err(BellmanError::ConvergenceFailure)
}
