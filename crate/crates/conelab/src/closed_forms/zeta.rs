//! The threshold function zeta(tau) = (cosh tau - 1)/(sinh tau - tau) and
//! the derived failure predictions for the two-component model system.

use crate::closed_forms::ClosedFormError;
use crate::closed_forms::family::ZetaQuery;

/// sinh(tau) - tau without cancellation: series for small tau.
fn sinh_minus_tau(tau: f64) -> f64 {
    if tau < 1.0 {
        // sum_{k>=1} tau^(2k+1)/(2k+1)!
        let t2 = tau * tau;
        let mut term = tau * t2 / 6.0;
        let mut sum = term;
        let mut k = 1usize;
        loop {
            k += 1;
            term *= t2 / ((2 * k) as f64 * (2 * k + 1) as f64);
            let next = sum + term;
            if next == sum {
                return sum;
            }
            sum = next;
        }
    } else {
        tau.sinh() - tau
    }
}

/// zeta(tau) = (cosh tau - 1)/(sinh tau - tau); zeta(0+) = +inf, zeta(inf) = 1.
pub fn zeta(tau: f64) -> Result<f64, ClosedFormError> {
    if tau <= 0.0 || !tau.is_finite() {
        return Err(ClosedFormError::NonPositiveTau(tau));
    }
    // cosh(tau) - 1 = 2 sinh^2(tau/2), exact in floating point.
    let num = 2.0 * (tau / 2.0).sinh().powi(2);
    Ok(num / sinh_minus_tau(tau))
}

/// The curve c -> zeta(sqrt(c) rho) sqrt(c), with the c -> 0+ limit 3/rho
/// substituted for tiny c.
pub fn zeta_curve_value(c: f64, rho: f64) -> f64 {
    assert!(rho > 0.0 && c >= 0.0);
    if c < 1e-12 {
        3.0 / rho
    } else {
        let sc = c.sqrt();
        zeta(rho * sc).expect("positive tau") * sc
    }
}

/// The failure condition zeta(rho sqrt(c)) sqrt(c) > alpha/eps, with margin.
pub fn wmp_fails_prediction(q: &ZetaQuery) -> (bool, f64) {
    let margin = zeta_curve_value(q.c, q.rho) - q.alpha_over_eps;
    (margin > 0.0, margin)
}

/// Threshold c0(rho; alpha/eps): the failure condition holds for all
/// c > c0. Zero when alpha/eps < 3/rho; otherwise the unique root of
/// zeta(sqrt(c) rho) sqrt(c) = alpha/eps, found by bisection (the curve is
/// increasing in c).
pub fn c_threshold(rho: f64, alpha_over_eps: f64) -> f64 {
    assert!(rho > 0.0 && alpha_over_eps >= 0.0);
    if alpha_over_eps <= 3.0 / rho {
        return 0.0;
    }
    let f = |c: f64| zeta_curve_value(c, rho) - alpha_over_eps;
    let mut lo = 1e-12;
    let mut hi = (alpha_over_eps * alpha_over_eps).max(1.0);
    while f(hi) <= 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
