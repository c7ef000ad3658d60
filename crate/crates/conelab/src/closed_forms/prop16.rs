//! Explicit strict-subsolution pair for the general two-component
//! counterexample: v(x) = x^2 - x, u(x) = sigma * chi(x), with chi a C^2
//! non-increasing cutoff realized as a quintic smoothstep.

use crate::closed_forms::field::{AnalyticField, FieldComponent};
use crate::closed_forms::ClosedFormError;
use crate::cone_synthesis::EllipticSystem;
use crate::matrix_algebra::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Parameters of the system u'' - eps v' - c u + alpha v >= 0,
/// v'' - eps_tilde u' - ctilde v + beta u >= 0 on (0, 1).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Prop16Params {
    pub eps: f64,
    pub eps_tilde: f64,
    pub alpha: f64,
    pub beta: f64,
    pub c_tilde: f64,
}

/// Quintic smoothstep s(t) = 6t^5 - 15t^4 + 10t^3 on [0, 1].
fn smoothstep(t: f64) -> f64 {
    ((6.0 * t - 15.0) * t + 10.0) * t * t * t
}

fn smoothstep_d1(t: f64) -> f64 {
    ((30.0 * t - 60.0) * t + 30.0) * t * t
}

fn smoothstep_d2(t: f64) -> f64 {
    ((120.0 * t - 180.0) * t + 60.0) * t
}

/// Sup norms of s' and s'' on [0, 1], located by a fine scan.
fn smoothstep_norms() -> (f64, f64) {
    let n = 100_000;
    let mut d1: f64 = 0.0;
    let mut d2: f64 = 0.0;
    for i in 0..=n {
        let t = i as f64 / n as f64;
        d1 = d1.max(smoothstep_d1(t).abs());
        d2 = d2.max(smoothstep_d2(t).abs());
    }
    (d1, d2)
}

#[derive(Debug, Clone, Copy)]
struct Chi {
    sigma: f64,
    x_star: f64,
}

impl Chi {
    // chi(x) = -s(min(x / x_star, 1)).
    fn value(&self, x: f64) -> f64 {
        -smoothstep((x / self.x_star).min(1.0))
    }
    fn d1(&self, x: f64) -> f64 {
        if x >= self.x_star {
            0.0
        } else {
            -smoothstep_d1(x / self.x_star) / self.x_star
        }
    }
    fn d2(&self, x: f64) -> f64 {
        if x >= self.x_star {
            0.0
        } else {
            -smoothstep_d2(x / self.x_star) / (self.x_star * self.x_star)
        }
    }
    fn u(&self, x: f64) -> f64 {
        self.sigma * self.value(x)
    }
}

/// Counterexample construction together with its derived thresholds.
#[derive(Serialize)]
pub struct Prop16Construction {
    pub params: Prop16Params,
    pub x_star: f64,
    pub chi_d1_norm: f64,
    pub chi_d2_norm: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma: f64,
    pub c_threshold: f64,
    /// Zero-order diagonal coefficient the pair was verified at.
    pub c: f64,
    pub delta: f64,
    /// Infima over the verification grid of the two strict residuals.
    pub residual_infima: (f64, f64),
    /// True when the input eps was negative and the pair is the mirror
    /// image x -> 1 - x of the positive-eps construction.
    pub mirrored: bool,
    #[serde(skip)]
    pub field: AnalyticField,
}

/// Verification points: uniform 10^4-point grid plus 10^3 seeded
/// pseudo-random points of (0, 1).
fn verification_points() -> Vec<f64> {
    let n = 10_000;
    let mut pts: Vec<f64> = (1..n).map(|i| i as f64 / n as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x505F16);
    for _ in 0..1000 {
        pts.push(rng.gen_range(0.0..1.0));
    }
    pts
}

fn residuals_at(p: &Prop16Params, chi: Chi, c: f64, delta: f64, x: f64) -> (f64, f64) {
    let u = chi.u(x) + delta * x;
    let up = chi.sigma * chi.d1(x) + delta;
    let upp = chi.sigma * chi.d2(x);
    let v = x * x - x;
    let vp = 2.0 * x - 1.0;
    let r1 = upp - p.eps * vp - c * u + p.alpha * v;
    let r2 = 2.0 - p.eps_tilde * up - p.c_tilde * v + p.beta * u;
    (r1, r2)
}

/// The system matrices for the construction at zero-order coefficient c:
/// B^(1) = [[0, -eps], [-eps_tilde, 0]], C = [[-c, alpha], [beta, -c_tilde]].
pub fn prop16_system(p: &Prop16Params, c: f64) -> EllipticSystem {
    EllipticSystem::new(
        vec![Mat::from_rows(&[
            &[0.0, -p.eps],
            &[-p.eps_tilde, 0.0],
        ])],
        Mat::from_rows(&[&[-c, p.alpha], &[p.beta, -p.c_tilde]]),
    )
    .expect("2x2 system")
}

/// Builds the pair (u + delta x, v) at zero-order coefficient `c`, choosing
/// delta as the largest power of two for which all five guarantees hold:
/// both strict residual infima positive, both components nonpositive at
/// {0, 1}, and u + delta x positive somewhere inside.
pub fn prop16_construct(
    params: &Prop16Params,
    c: f64,
) -> Result<Prop16Construction, ClosedFormError> {
    if params.eps == 0.0 {
        return Err(ClosedFormError::InvalidParams("eps must be nonzero".into()));
    }
    if params.c_tilde <= 0.0 {
        return Err(ClosedFormError::InvalidParams(
            "c_tilde must be positive".into(),
        ));
    }
    if c <= 0.0 {
        return Err(ClosedFormError::NonPositiveC(c));
    }
    // Orientation reduction: for eps < 0 build the positive-eps pair for the
    // sign-flipped first-order couplings and mirror it through x -> 1 - x.
    let mirrored = params.eps < 0.0;
    let p = if mirrored {
        Prop16Params {
            eps: -params.eps,
            eps_tilde: -params.eps_tilde,
            ..*params
        }
    } else {
        *params
    };

    let (s1_norm, s2_norm) = smoothstep_norms();
    let x_star = (0.25f64).min(p.eps / (4.0 * p.alpha.abs() + 1.0));
    let chi_d1_norm = s1_norm / x_star;
    let chi_d2_norm = s2_norm / (x_star * x_star);
    let sigma1 = 1.0 / (p.beta.abs() + p.eps_tilde.abs() * chi_d1_norm + 1.0);
    let sigma2 = p.eps / (8.0 * chi_d2_norm);
    let sigma = sigma1.min(sigma2);
    let c_threshold = (p.eps + p.alpha.abs()) / sigma;

    let chi = Chi { sigma, x_star };
    let pts = verification_points();

    let mut chosen: Option<(f64, (f64, f64))> = None;
    'delta: for j in 1..=60u32 {
        let delta = 0.5f64.powi(j as i32);
        // Boundary signs.
        let ub0 = chi.u(0.0);
        let ub1 = chi.u(1.0) + delta;
        if ub0 > 0.0 || ub1 > 0.0 {
            continue;
        }
        let mut inf1 = f64::INFINITY;
        let mut inf2 = f64::INFINITY;
        let mut positive_inside = false;
        for &x in &pts {
            let (r1, r2) = residuals_at(&p, chi, c, delta, x);
            inf1 = inf1.min(r1);
            inf2 = inf2.min(r2);
            if inf1 <= 0.0 || inf2 <= 0.0 {
                continue 'delta;
            }
            if chi.u(x) + delta * x > 0.0 {
                positive_inside = true;
            }
        }
        if positive_inside {
            chosen = Some((delta, (inf1, inf2)));
            break;
        }
    }
    let (delta, residual_infima) = chosen.ok_or_else(|| {
        ClosedFormError::InvalidParams(format!(
            "no admissible delta at c = {c}; threshold is {c_threshold}"
        ))
    })?;

    // Expose the pair in the original orientation.
    let map = move |x: f64| if mirrored { 1.0 - x } else { x };
    let dsign = if mirrored { -1.0 } else { 1.0 };
    let u_chi = chi;
    let field = AnalyticField::new(
        "prop16 pair (u + delta x, v)",
        "(0, 1)",
        1,
        vec![
            FieldComponent::new(
                Box::new(move |x: &[f64]| u_chi.u(map(x[0])) + delta * map(x[0])),
                Box::new(move |x: &[f64]| {
                    vec![dsign * (u_chi.sigma * u_chi.d1(map(x[0])) + delta)]
                }),
                Box::new(move |x: &[f64]| u_chi.sigma * u_chi.d2(map(x[0]))),
            ),
            FieldComponent::new(
                Box::new(move |x: &[f64]| {
                    let y = map(x[0]);
                    y * y - y
                }),
                Box::new(move |x: &[f64]| vec![dsign * (2.0 * map(x[0]) - 1.0)]),
                Box::new(move |_: &[f64]| 2.0),
            ),
        ],
    );

    Ok(Prop16Construction {
        params: *params,
        x_star,
        chi_d1_norm,
        chi_d2_norm,
        sigma1,
        sigma2,
        sigma,
        c_threshold,
        c,
        delta,
        residual_infima,
        mirrored,
        field,
    })
}

impl Prop16Construction {
    /// Connected component of {u + delta x > 0} inside (0, 1), located on a
    /// fine scan. The first component from the left is returned.
    pub fn positive_component(&self) -> Option<(f64, f64)> {
        let n = 100_000;
        let mut start = None;
        for i in 1..n {
            let x = i as f64 / n as f64;
            let positive = self.field.value(0, &[x]) > 0.0;
            match (start, positive) {
                (None, true) => start = Some(x),
                (Some(a), false) => return Some((a, (i - 1) as f64 / n as f64)),
                _ => {}
            }
        }
        start.map(|a| (a, 1.0 - 1.0 / n as f64))
    }
}
