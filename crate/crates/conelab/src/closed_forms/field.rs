//! Candidate vector solutions with exact value/gradient/Laplacian
//! evaluators per component.

use crate::closed_forms::ClosedFormError;
use crate::cone_synthesis::EllipticSystem;

type ValueFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// One scalar component with closed-form derivatives.
pub struct FieldComponent {
    value: ValueFn,
    gradient: GradFn,
    laplacian: ValueFn,
}

impl FieldComponent {
    pub fn new(value: ValueFn, gradient: GradFn, laplacian: ValueFn) -> FieldComponent {
        FieldComponent {
            value,
            gradient,
            laplacian,
        }
    }
}

/// A vector field u: R^n -> R^m with exact evaluators.
pub struct AnalyticField {
    pub name: String,
    pub domain: String,
    pub dim: usize,
    components: Vec<FieldComponent>,
}

impl AnalyticField {
    pub fn new(
        name: &str,
        domain: &str,
        dim: usize,
        components: Vec<FieldComponent>,
    ) -> AnalyticField {
        AnalyticField {
            name: name.to_string(),
            domain: domain.to_string(),
            dim,
            components,
        }
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn value(&self, j: usize, x: &[f64]) -> f64 {
        (self.components[j].value)(x)
    }

    pub fn gradient(&self, j: usize, x: &[f64]) -> Vec<f64> {
        (self.components[j].gradient)(x)
    }

    pub fn laplacian(&self, j: usize, x: &[f64]) -> f64 {
        (self.components[j].laplacian)(x)
    }

    pub fn value_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.components.len()).map(|j| self.value(j, x)).collect()
    }

    /// Centered finite-difference consistency check of gradient and
    /// Laplacian against the value evaluator at the given points.
    pub fn fd_consistency(&self, points: &[Vec<f64>], h: f64, rel_tol: f64) -> Result<(), String> {
        for x in points {
            for j in 0..self.components.len() {
                let grad = self.gradient(j, x);
                let lap = self.laplacian(j, x);
                let mut fd_lap = 0.0;
                let center = self.value(j, x);
                for i in 0..self.dim {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += h;
                    xm[i] -= h;
                    let vp = self.value(j, &xp);
                    let vm = self.value(j, &xm);
                    let fd_g = (vp - vm) / (2.0 * h);
                    if (fd_g - grad[i]).abs() > rel_tol * (1.0 + grad[i].abs()) {
                        return Err(format!(
                            "component {j}: gradient[{i}] mismatch at {x:?}: {} vs fd {}",
                            grad[i], fd_g
                        ));
                    }
                    fd_lap += (vp - 2.0 * center + vm) / (h * h);
                }
                if (fd_lap - lap).abs() > rel_tol * (1.0 + lap.abs() + center.abs()) {
                    return Err(format!(
                        "component {j}: laplacian mismatch at {x:?}: {lap} vs fd {fd_lap}"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Minimum over `points`, per component, of the system residual
/// Delta u_j + sum_i (B^(i) D_i u)_j + (C u)_j using exact derivatives.
pub fn residual(
    sys: &EllipticSystem,
    field: &AnalyticField,
    points: &[Vec<f64>],
) -> Result<Vec<f64>, ClosedFormError> {
    if field.num_components() != sys.m {
        return Err(ClosedFormError::DimensionMismatch {
            field: field.num_components(),
            system: sys.m,
        });
    }
    let mut mins = vec![f64::INFINITY; sys.m];
    for x in points {
        let grads: Vec<Vec<f64>> = (0..sys.m).map(|j| field.gradient(j, x)).collect();
        let values = field.value_vec(x);
        let cu = sys.c.mul_vec(&values);
        for j in 0..sys.m {
            let mut r = field.laplacian(j, x) + cu[j];
            for i in 0..sys.n {
                // (B^(i) D_i u)_j = sum_k B^(i)_{jk} du_k/dx_i
                for k in 0..sys.m {
                    r += sys.b[i].get(j, k) * grads[k][i];
                }
            }
            if r < mins[j] {
                mins[j] = r;
            }
        }
    }
    Ok(mins)
}
