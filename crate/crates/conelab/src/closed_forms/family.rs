//! The u_k counterexample family for the two-component model system
//! u'' - eps v' - c u + alpha v >= 0, v'' - ctilde v >= 0 on (0, rho),
//! paired with v(x) = -x. Evaluations use expm1-based forms so that
//! u_k(0) = 0 holds exactly and small sqrt(c)/k causes no cancellation.

use crate::closed_forms::field::{AnalyticField, FieldComponent};
use crate::closed_forms::ClosedFormError;

/// Parameters of the model system: interval length rho, diagonal zero-order
/// coefficient c, and the ratio alpha/eps.
#[derive(Debug, Clone, Copy)]
pub struct ZetaQuery {
    pub rho: f64,
    pub c: f64,
    pub alpha_over_eps: f64,
}

impl ZetaQuery {
    pub fn validate(&self) -> Result<(), ClosedFormError> {
        if !(self.rho > 0.0) {
            return Err(ClosedFormError::InvalidParams(format!(
                "rho must be positive, got {}",
                self.rho
            )));
        }
        if self.c < 0.0 || self.alpha_over_eps < 0.0 {
            return Err(ClosedFormError::InvalidParams(
                "c and alpha/eps must be nonnegative".to_string(),
            ));
        }
        Ok(())
    }
}

struct UkCoeffs {
    eps: f64,
    c: f64,
    sc: f64,
    aoe: f64,
    a: f64,
    b: f64,
    /// k * sinh(sqrt(c)/k)
    ksinh: f64,
}

impl UkCoeffs {
    fn new(q: &ZetaQuery, eps: f64, k: u32) -> UkCoeffs {
        let c = q.c;
        let sc = c.sqrt();
        let s = sc / k as f64;
        let sinh_s = s.sinh();
        UkCoeffs {
            eps,
            c,
            sc,
            aoe: q.alpha_over_eps,
            a: -(-s).exp_m1() / (2.0 * sinh_s),
            b: s.exp_m1() / (2.0 * sinh_s),
            ksinh: k as f64 * sinh_s,
        }
    }

    fn value(&self, x: f64) -> f64 {
        let t = self.a * (self.sc * x).exp_m1()
            + self.b * (-self.sc * x).exp_m1()
            - self.aoe * ((self.sc * x).sinh() / self.ksinh - x);
        -(self.eps / self.c) * t
    }

    fn deriv(&self, x: f64) -> f64 {
        let t = self.sc * (self.a * (self.sc * x).exp() - self.b * (-self.sc * x).exp())
            - self.aoe * (self.sc * (self.sc * x).cosh() / self.ksinh - 1.0);
        -(self.eps / self.c) * t
    }

    fn second(&self, x: f64) -> f64 {
        -self.eps * (self.a * (self.sc * x).exp() + self.b * (-self.sc * x).exp())
            + self.aoe * self.eps * (self.sc * x).sinh() / self.ksinh
    }
}

fn v_component() -> FieldComponent {
    FieldComponent::new(
        Box::new(|x: &[f64]| -x[0]),
        Box::new(|_: &[f64]| vec![-1.0]),
        Box::new(|_: &[f64]| 0.0),
    )
}

/// The exact pair (u_k, v = -x); u_k(0) = 0 holds exactly.
pub fn u_k_family(q: &ZetaQuery, eps: f64, k: u32) -> Result<AnalyticField, ClosedFormError> {
    q.validate()?;
    if q.c <= 0.0 {
        return Err(ClosedFormError::NonPositiveC(q.c));
    }
    if eps <= 0.0 || k == 0 {
        return Err(ClosedFormError::InvalidParams(
            "eps must be positive and k >= 1".to_string(),
        ));
    }
    let c1 = UkCoeffs::new(q, eps, k);
    let c2 = UkCoeffs::new(q, eps, k);
    let c3 = UkCoeffs::new(q, eps, k);
    Ok(AnalyticField::new(
        &format!("u_{k} family"),
        &format!("(0, {})", q.rho),
        1,
        vec![
            FieldComponent::new(
                Box::new(move |x: &[f64]| c1.value(x[0])),
                Box::new(move |x: &[f64]| vec![c2.deriv(x[0])]),
                Box::new(move |x: &[f64]| c3.second(x[0])),
            ),
            v_component(),
        ],
    ))
}

/// Derivative of u_k at 0: eps/(2k) + o(1/k).
pub fn u_k_prime_at_zero(q: &ZetaQuery, eps: f64, k: u32) -> Result<f64, ClosedFormError> {
    q.validate()?;
    if q.c <= 0.0 {
        return Err(ClosedFormError::NonPositiveC(q.c));
    }
    Ok(UkCoeffs::new(q, eps, k).deriv(0.0))
}

/// The k -> infinity limit pair (u_0, v = -x), with
/// u_0(x) = -(eps/c) { cosh(sqrt(c) x) - 1 - (alpha/eps)(sinh(sqrt(c) x)/sqrt(c) - x) }.
pub fn u_limit_field(q: &ZetaQuery, eps: f64) -> Result<AnalyticField, ClosedFormError> {
    q.validate()?;
    if q.c <= 0.0 {
        return Err(ClosedFormError::NonPositiveC(q.c));
    }
    let (c, sc, aoe) = (q.c, q.c.sqrt(), q.alpha_over_eps);
    let value = move |x: f64| {
        // cosh - 1 as 2 sinh^2(t/2) avoids cancellation near 0.
        let t = 2.0 * (sc * x / 2.0).sinh().powi(2) - aoe * ((sc * x).sinh() / sc - x);
        -(eps / c) * t
    };
    let deriv = move |x: f64| {
        let t = sc * (sc * x).sinh() - aoe * ((sc * x).cosh() - 1.0);
        -(eps / c) * t
    };
    let second = move |x: f64| {
        let t = c * (sc * x).cosh() - aoe * sc * (sc * x).sinh();
        -(eps / c) * t
    };
    Ok(AnalyticField::new(
        "u_0 limit",
        &format!("(0, {})", q.rho),
        1,
        vec![
            FieldComponent::new(
                Box::new(move |x: &[f64]| value(x[0])),
                Box::new(move |x: &[f64]| vec![deriv(x[0])]),
                Box::new(move |x: &[f64]| second(x[0])),
            ),
            v_component(),
        ],
    ))
}
