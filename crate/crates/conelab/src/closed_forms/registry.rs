//! Registry of the explicit example systems, their witness fields with
//! hand-coded exact derivatives, and the asserted verdicts.

use crate::closed_forms::field::{AnalyticField, FieldComponent};
use crate::closed_forms::ClosedFormError;
use crate::cone_synthesis::EllipticSystem;
use crate::matrix_algebra::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Verdict asserted for a registry entry. `None` means not asserted.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExpectedVerdict {
    pub wmp_fails: Option<bool>,
    /// When set, an invariant cone with this many active rows exists.
    pub invariant_cone_k: Option<usize>,
}

pub struct RegistryEntry {
    pub id: String,
    pub system: EllipticSystem,
    pub domain: String,
    pub field: Option<AnalyticField>,
    pub expected: ExpectedVerdict,
}

fn poly_field_ex_1_1() -> AnalyticField {
    AnalyticField::new(
        "ex1.1 witness",
        "unit disk",
        2,
        vec![
            // u1 = 1 - x1^2 - x2^2
            FieldComponent::new(
                Box::new(|x: &[f64]| 1.0 - x[0] * x[0] - x[1] * x[1]),
                Box::new(|x: &[f64]| vec![-2.0 * x[0], -2.0 * x[1]]),
                Box::new(|_: &[f64]| -4.0),
            ),
            // u2 = x1^3/3 + 4 x2 - 20
            FieldComponent::new(
                Box::new(|x: &[f64]| x[0] * x[0] * x[0] / 3.0 + 4.0 * x[1] - 20.0),
                Box::new(|x: &[f64]| vec![x[0] * x[0], 4.0]),
                Box::new(|x: &[f64]| 2.0 * x[0]),
            ),
        ],
    )
}

fn exp_field_ex_1_3() -> AnalyticField {
    // u = delta - |x - xbar|^2, v = k (e^{-x1} - h) on (0,1)^2,
    // xbar = (1/2, 1/2), delta = 0.1, k = 20, h = 2.
    const DELTA: f64 = 0.1;
    const K: f64 = 20.0;
    const H: f64 = 2.0;
    AnalyticField::new(
        "ex1.3 witness",
        "unit square",
        2,
        vec![
            FieldComponent::new(
                Box::new(|x: &[f64]| {
                    DELTA - (x[0] - 0.5) * (x[0] - 0.5) - (x[1] - 0.5) * (x[1] - 0.5)
                }),
                Box::new(|x: &[f64]| vec![-2.0 * (x[0] - 0.5), -2.0 * (x[1] - 0.5)]),
                Box::new(|_: &[f64]| -4.0),
            ),
            FieldComponent::new(
                Box::new(|x: &[f64]| K * ((-x[0]).exp() - H)),
                Box::new(|x: &[f64]| vec![-K * (-x[0]).exp(), 0.0]),
                Box::new(|x: &[f64]| K * (-x[0]).exp()),
            ),
        ],
    )
}

fn poly_field_ex_1_10() -> AnalyticField {
    // u1 = (x1 - x1^2)(x2 - x2^2)^3, u2 = (x1^2 + 2 x1 - 4)(x2 - x2^2).
    let f = |t: f64| t - t * t;
    let fp = |t: f64| 1.0 - 2.0 * t;
    let p = |t: f64| t * t + 2.0 * t - 4.0;
    AnalyticField::new(
        "ex1.10 witness",
        "unit square",
        2,
        vec![
            FieldComponent::new(
                Box::new(move |x: &[f64]| f(x[0]) * f(x[1]).powi(3)),
                Box::new(move |x: &[f64]| {
                    vec![
                        fp(x[0]) * f(x[1]).powi(3),
                        f(x[0]) * 3.0 * f(x[1]).powi(2) * fp(x[1]),
                    ]
                }),
                Box::new(move |x: &[f64]| {
                    let g = f(x[1]);
                    -2.0 * g.powi(3) + 6.0 * f(x[0]) * g * (fp(x[1]).powi(2) - g)
                }),
            ),
            FieldComponent::new(
                Box::new(move |x: &[f64]| p(x[0]) * f(x[1])),
                Box::new(move |x: &[f64]| {
                    vec![(2.0 * x[0] + 2.0) * f(x[1]), p(x[0]) * fp(x[1])]
                }),
                Box::new(move |x: &[f64]| 2.0 * f(x[1]) - 2.0 * p(x[0])),
            ),
        ],
    )
}

/// Pseudo-random interior points of the unit disk.
pub fn unit_disk_points(count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(count);
    while pts.len() < count {
        let x = rng.gen_range(-1.0..1.0);
        let y = rng.gen_range(-1.0..1.0);
        if x * x + y * y < 1.0 {
            pts.push(vec![x, y]);
        }
    }
    pts
}

/// Pseudo-random interior points of the unit square.
pub fn unit_square_points(count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
        .collect()
}

/// Known ids: ex1.1, ex1.3, ex1.3-decoupled, ex1.8, ex1.10,
/// remark1.8-matrices.
pub fn example_registry(id: &str) -> Result<RegistryEntry, ClosedFormError> {
    let entry = match id {
        "ex1.1" => RegistryEntry {
            id: id.to_string(),
            system: EllipticSystem::new(
                vec![
                    Mat::from_rows(&[&[0.0, 0.0], &[1.0, 0.0]]),
                    Mat::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]),
                ],
                Mat::zeros(2, 2),
            )
            .expect("valid system"),
            domain: "unit disk".to_string(),
            field: Some(poly_field_ex_1_1()),
            expected: ExpectedVerdict {
                wmp_fails: Some(true),
                invariant_cone_k: None,
            },
        },
        "ex1.3" => RegistryEntry {
            id: id.to_string(),
            system: EllipticSystem::new(
                vec![
                    Mat::from_rows(&[&[0.0, -1.0], &[-1.0, 0.0]]),
                    Mat::zeros(2, 2),
                ],
                Mat::zeros(2, 2),
            )
            .expect("valid system"),
            domain: "unit square".to_string(),
            field: Some(exp_field_ex_1_3()),
            expected: ExpectedVerdict {
                wmp_fails: Some(true),
                invariant_cone_k: None,
            },
        },
        "ex1.3-decoupled" => RegistryEntry {
            id: id.to_string(),
            system: EllipticSystem::new(
                vec![Mat::zeros(2, 2), Mat::zeros(2, 2)],
                Mat::zeros(2, 2),
            )
            .expect("valid system"),
            domain: "unit square".to_string(),
            field: None,
            expected: ExpectedVerdict {
                wmp_fails: Some(false),
                invariant_cone_k: Some(2),
            },
        },
        "ex1.8" => RegistryEntry {
            id: id.to_string(),
            system: EllipticSystem::new(
                vec![
                    Mat::from_rows(&[&[6.0, 1.0], &[-8.0, 0.0]]),
                    Mat::zeros(2, 2),
                ],
                Mat::identity(2).scale(-1.0),
            )
            .expect("valid system"),
            domain: "unit square".to_string(),
            field: None,
            expected: ExpectedVerdict {
                wmp_fails: None,
                invariant_cone_k: Some(2),
            },
        },
        "ex1.10" => RegistryEntry {
            id: id.to_string(),
            system: EllipticSystem::new(
                vec![
                    Mat::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
                    Mat::zeros(2, 2),
                ],
                Mat::identity(2).scale(-1.0),
            )
            .expect("valid system"),
            domain: "unit square".to_string(),
            field: Some(poly_field_ex_1_10()),
            expected: ExpectedVerdict {
                wmp_fails: Some(true),
                invariant_cone_k: Some(1),
            },
        },
        "remark1.8-matrices" => RegistryEntry {
            id: id.to_string(),
            system: EllipticSystem::new(
                vec![Mat::zeros(2, 2)],
                Mat::from_rows(&[&[-3.0, 2.0], &[1.0, -2.0]]),
            )
            .expect("valid system"),
            domain: "interval (0, 1)".to_string(),
            field: None,
            expected: ExpectedVerdict {
                wmp_fails: Some(false),
                invariant_cone_k: Some(2),
            },
        },
        _ => return Err(ClosedFormError::UnknownId(id.to_string())),
    };
    Ok(entry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::residual;

    #[test]
    fn ex_1_1_witness() {
        let entry = example_registry("ex1.1").unwrap();
        let field = entry.field.unwrap();
        // Interior violation and boundary signs.
        assert_eq!(field.value(0, &[0.0, 0.0]), 1.0);
        for i in 0..64 {
            let t = 2.0 * std::f64::consts::PI * i as f64 / 64.0;
            let x = [t.cos(), t.sin()];
            assert!(field.value(0, &x).abs() < 1e-12);
            assert!(field.value(1, &x) <= 1.0 / 3.0 + 4.0 - 20.0 + 1e-12);
        }
        // Both equations hold with equality.
        let pts = unit_disk_points(1000, 11);
        let mins = residual(&entry.system, &field, &pts).unwrap();
        assert!(mins[0].abs() < 1e-10 && mins[1].abs() < 1e-10, "{mins:?}");
    }

    #[test]
    fn ex_1_3_witness() {
        let entry = example_registry("ex1.3").unwrap();
        let field = entry.field.unwrap();
        let pts = unit_square_points(1000, 7);
        let mins = residual(&entry.system, &field, &pts).unwrap();
        assert!(mins[0] > 0.0 && mins[1] > 0.0, "{mins:?}");
        // Interior violation of the first component.
        assert!(field.value(0, &[0.5, 0.5]) > 0.0);
        // Boundary signs on the square edges.
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            for x in [[0.0, t], [1.0, t], [t, 0.0], [t, 1.0]] {
                assert!(field.value(0, &x) <= 0.0);
                assert!(field.value(1, &x) < 0.0);
            }
        }
    }

    #[test]
    fn ex_1_10_witness() {
        let entry = example_registry("ex1.10").unwrap();
        let field = entry.field.unwrap();
        assert!((field.value(0, &[0.5, 0.5]) - 1.0 / 256.0).abs() < 1e-15);
        assert!((field.value(1, &[0.5, 0.5]) + 0.6875).abs() < 1e-15);
        let pts = unit_square_points(1000, 3);
        let mins = residual(&entry.system, &field, &pts).unwrap();
        assert!(mins[0] >= -1e-10 && mins[1] >= -1e-10, "{mins:?}");
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            for x in [[0.0, t], [1.0, t], [t, 0.0], [t, 1.0]] {
                assert!(field.value(0, &x) <= 1e-15);
                assert!(field.value(1, &x) <= 1e-15);
            }
        }
    }

    #[test]
    fn all_registry_fields_pass_fd_consistency() {
        for id in ["ex1.1", "ex1.3", "ex1.10"] {
            let entry = example_registry(id).unwrap();
            let field = entry.field.unwrap();
            let pts = if entry.domain == "unit disk" {
                unit_disk_points(50, 5)
            } else {
                unit_square_points(50, 5)
            };
            field.fd_consistency(&pts, 1e-4, 1e-5).unwrap();
        }
    }

    #[test]
    fn unknown_id() {
        assert!(matches!(
            example_registry("ex9.9"),
            Err(ClosedFormError::UnknownId(_))
        ));
    }
}
