//! Complex coordinates on the open torus orbit and the Legendre transform back.
//!
//! A point `w` of `(C^*)^n` is stored as `y = log|w| / 2 pi` and `theta = arg w / 2 pi`
//! so that large deformation parameters never overflow.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SymplecticPotential;
use crate::error::{Error, Result};

pub const NEWTON_MAX_ITER: usize = 100;
pub const NEWTON_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexCoord {
    pub y: Vec<f64>,
    pub theta: Vec<f64>,
}

impl ComplexCoord {
    pub fn from_w(w: &[Complex64]) -> Result<Self> {
        if let Some(i) = w.iter().position(|z| *z == Complex64::new(0.0, 0.0)) {
            return Err(crate::error::invalid(format!(
                "coordinate {i} is zero; not on the open orbit"
            )));
        }
        Ok(Self {
            y: w.iter().map(|z| z.norm().ln() / (2.0 * PI)).collect(),
            theta: w.iter().map(|z| z.arg() / (2.0 * PI)).collect(),
        })
    }

    /// `w_i = exp(2 pi (y_i + i theta_i))`; may overflow for extreme `y`.
    pub fn w(&self) -> Vec<Complex64> {
        self.y
            .iter()
            .zip(&self.theta)
            .map(|(&y, &t)| Complex64::from_polar((2.0 * PI * y).exp(), 2.0 * PI * t))
            .collect()
    }
}

/// `w_i = exp(2 pi (dg/dx_i + i theta_i))` at an interior point.
pub fn moment_to_complex(
    g: &SymplecticPotential,
    x: &[f64],
    theta: &[f64],
) -> Result<ComplexCoord> {
    if theta.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: theta.len(),
        });
    }
    let grad = g.gradient(x)?;
    Ok(ComplexCoord {
        y: grad.iter().copied().collect(),
        theta: theta.to_vec(),
    })
}

/// Inverts [`moment_to_complex`]: solves `grad g(x) = y` by damped Newton from the
/// barycenter. Returns `(x, theta)`.
pub fn complex_to_moment(
    g: &SymplecticPotential,
    c: &ComplexCoord,
) -> Result<(Vec<f64>, Vec<f64>)> {
    g.check_dim(&c.y)?;
    g.check_dim(&c.theta)?;
    if c.y.iter().any(|v| !v.is_finite()) {
        return Err(crate::error::invalid("non-finite complex coordinate"));
    }
    let x = solve_gradient(g, &c.y)?;
    Ok((x, c.theta.clone()))
}

/// Solves `grad g(x) = y` inside the polytope.
pub fn solve_gradient(g: &SymplecticPotential, y: &[f64]) -> Result<Vec<f64>> {
    let target = DVector::from_column_slice(y);
    let tol = NEWTON_TOL * target.norm().max(1.0);
    let merit = |x: &DVector<f64>| -> Option<(f64, f64)> {
        let xs = x.as_slice();
        let r = g.gradient(xs).ok()? - &target;
        let phi = g.value(xs).ok()? - target.dot(x);
        Some((r.norm(), phi))
    };
    let mut x = DVector::from_column_slice(g.barycenter());
    let (mut res, mut phi) = merit(&x).expect("barycenter is interior");
    for _ in 0..NEWTON_MAX_ITER {
        if res <= tol {
            return Ok(x.iter().copied().collect());
        }
        let r = g.gradient(x.as_slice())? - &target;
        let h = g.hessian(x.as_slice())?;
        let step = match h.cholesky() {
            Some(ch) => -ch.solve(&r),
            None => {
                return Err(Error::Singular {
                    what: "potential Hessian".into(),
                    value: 0.0,
                })
            }
        };
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..80 {
            let cand = &x + alpha * &step;
            if let Some((r_new, phi_new)) = merit(&cand) {
                // Residual decrease is the primary test; a decrease of the convex
                // objective keeps the iteration moving far from the solution.
                if r_new < res || phi_new < phi - 1e-4 * alpha * step.dot(&r).abs() {
                    x = cand;
                    res = r_new;
                    phi = phi_new;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res <= tol {
        Ok(x.iter().copied().collect())
    } else {
        Err(Error::NoConvergence {
            solver: "Legendre Newton",
            iterations: NEWTON_MAX_ITER,
            residual: res,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::interval;

    #[test]
    fn midpoint_maps_to_one() {
        let g = SymplecticPotential::new(interval(0, 1).unwrap(), 0.0).unwrap();
        let c = moment_to_complex(&g, &[0.5], &[0.0]).unwrap();
        let w = c.w()[0];
        assert!((w - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn deformed_midpoint() {
        // grad of 1/2 x^2 at 1/2 is 1/2, so |w| = e^{pi}.
        let g = SymplecticPotential::new(interval(0, 1).unwrap(), 1.0).unwrap();
        let w = moment_to_complex(&g, &[0.5], &[0.0]).unwrap().w()[0];
        assert!((w.re - PI.exp()).abs() < 1e-12 * PI.exp());
    }

    #[test]
    fn boundary_is_rejected() {
        let g = SymplecticPotential::new(interval(0, 1).unwrap(), 0.0).unwrap();
        assert!(moment_to_complex(&g, &[0.0], &[0.0]).is_err());
    }

    #[test]
    fn round_trip_near_boundary() {
        let g = SymplecticPotential::new(interval(0, 3).unwrap(), 10.0).unwrap();
        for &x in &[1e-9, 0.3, 1.5, 2.999_999] {
            let c = moment_to_complex(&g, &[x], &[0.25]).unwrap();
            let (back, theta) = complex_to_moment(&g, &c).unwrap();
            assert!((back[0] - x).abs() < 1e-10, "{x} -> {}", back[0]);
            assert_eq!(theta, vec![0.25]);
        }
    }
}
