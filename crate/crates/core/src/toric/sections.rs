//! Monomial sections and their pointwise norms.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::SymplecticPotential;
use crate::error::{Error, Result};
use crate::polytope::DelzantPolytope;

fn checked_powi(z: Complex64, e: i64, index: usize) -> Result<Complex64> {
    if e < 0 && z == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroToNegativePower { index, exponent: e });
    }
    let e = i32::try_from(e).map_err(|_| crate::error::invalid("exponent too large"))?;
    Ok(z.powi(e))
}

/// `prod_i w_i^{m_i}`, the section `sigma^m` relative to `s^0` on the open orbit.
pub fn sigma_m_complex(m: &[i64], w: &[Complex64]) -> Result<Complex64> {
    if m.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: m.len(),
            got: w.len(),
        });
    }
    m.iter()
        .zip(w)
        .enumerate()
        .try_fold(Complex64::new(1.0, 0.0), |acc, (i, (&e, &z))| {
            Ok(acc * checked_powi(z, e, i)?)
        })
}

/// `prod_j z_j^{l_j(m)}` in homogeneous coordinates, one per facet.
pub fn sigma_m_homogeneous(p: &DelzantPolytope, m: &[i64], z: &[Complex64]) -> Result<Complex64> {
    if z.len() != p.num_facets() {
        return Err(Error::DimensionMismatch {
            expected: p.num_facets(),
            got: z.len(),
        });
    }
    (0..p.num_facets()).try_fold(Complex64::new(1.0, 0.0), |acc, j| {
        Ok(acc * checked_powi(z[j], p.support_value_int(j, m)?, j)?)
    })
}

/// `alpha_m(x) = <iota^* x - iota^* m, grad nu(iota^* x)> - nu(iota^* x)`.
pub fn alpha_m(g: &SymplecticPotential, m: &[f64], x: &[f64]) -> Result<f64> {
    g.check_dim(m)?;
    g.check_dim(x)?;
    let (rx, rm) = (g.restrict(x), g.restrict(m));
    let grad = g.deformer().gradient(&rx);
    let lin: f64 = rx
        .iter()
        .zip(&rm)
        .zip(grad.iter())
        .map(|((a, b), c)| (a - b) * c)
        .sum();
    Ok(lin - g.deformer().value(&rx))
}

/// `log |sigma^m|` at moment point `x` under the metric of `g`:
/// `2 pi [g(x) - sum_i (x_i - m_i) dg/dx_i(x)]`.
///
/// The `g_can` part is evaluated as
/// `sum_j (l_j(m)/2) log l_j(x) + (l_j(m) - l_j(x))/2`, which extends continuously to
/// the boundary (giving `-inf` where `l_j(x) = 0 < l_j(m)`).
pub fn section_log_density(g: &SymplecticPotential, m: &[f64], x: &[f64]) -> Result<f64> {
    g.check_dim(m)?;
    g.check_dim(x)?;
    let lx = g.facet_values(x);
    if lx.min() < 0.0 {
        return Err(Error::OutsideInterior {
            min_facet_value: lx.min(),
        });
    }
    let lm = g.facet_values(m);
    let mut total = 0.0;
    for (&a, &b) in lm.iter().zip(lx.iter()) {
        let log_term = if a == 0.0 {
            0.0
        } else if b == 0.0 {
            f64::NEG_INFINITY
        } else {
            0.5 * a * b.ln()
        };
        total += log_term + 0.5 * (a - b);
    }
    if let Some(h) = g.base() {
        let grad = h.gradient(x);
        let lin: f64 = x
            .iter()
            .zip(m)
            .zip(grad.iter())
            .map(|((a, b), c)| (a - b) * c)
            .sum();
        total += 2.0 * PI * (h.value(x) - lin);
    }
    Ok(total - 2.0 * PI * g.s() * alpha_m(g, m, x)?)
}

/// Direct interior evaluation of `2 pi [g(x) - <x - m, grad g(x)>]`.
pub fn section_log_density_direct(g: &SymplecticPotential, m: &[f64], x: &[f64]) -> Result<f64> {
    g.check_dim(m)?;
    let grad = g.gradient(x)?;
    let lin: f64 = x
        .iter()
        .zip(m)
        .zip(grad.iter())
        .map(|((a, b), c)| (a - b) * c)
        .sum();
    Ok(2.0 * PI * (g.value(x)? - lin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{interval, simplex};

    #[test]
    fn monomials_on_p1() {
        assert_eq!(
            sigma_m_complex(&[0], &[Complex64::new(2.0, 0.0)]).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(
            sigma_m_complex(&[1], &[Complex64::new(2.0, 0.0)]).unwrap(),
            Complex64::new(2.0, 0.0)
        );
        assert!(matches!(
            sigma_m_complex(&[-1], &[Complex64::new(0.0, 0.0)]),
            Err(Error::ZeroToNegativePower { .. })
        ));
    }

    #[test]
    fn homogeneous_and_affine_forms_agree() {
        // On the triangle, w_i = z_i / z_3.
        let p = simplex(2, 2).unwrap();
        let z = [
            Complex64::new(0.3, 0.4),
            Complex64::new(-1.2, 0.1),
            Complex64::new(0.7, -0.2),
        ];
        let w = [z[0] / z[2], z[1] / z[2]];
        for m in p.lattice_points().unwrap() {
            let hom = sigma_m_homogeneous(&p, &m, &z).unwrap();
            let aff = sigma_m_complex(&m, &w).unwrap() * z[2].powi(2);
            assert!((hom - aff).norm() < 1e-14);
        }
    }

    #[test]
    fn density_on_p1() {
        let g = SymplecticPotential::new(interval(0, 1).unwrap(), 0.0).unwrap();
        let d = |x: f64| section_log_density(&g, &[0.0], &[x]).unwrap().exp();
        assert!((d(0.5) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(d(0.0), 1.0);
        assert_eq!(d(1.0), 0.0);
    }

    #[test]
    fn quadratic_alpha() {
        let g = SymplecticPotential::new(interval(0, 3).unwrap(), 1.0).unwrap();
        for &(m, x) in &[(1.0, 0.2), (2.0, 2.5), (1.0, 1.0)] {
            let a = alpha_m(&g, &[m], &[x]).unwrap();
            assert!((a - (x * x / 2.0 - m * x)).abs() < 1e-15);
        }
        assert!((alpha_m(&g, &[1.0], &[1.0]).unwrap() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_direct_evaluation() {
        let g = SymplecticPotential::new(simplex(2, 3).unwrap(), 2.5).unwrap();
        for m in g.polytope().lattice_points().unwrap() {
            let m: Vec<f64> = m.iter().map(|&v| v as f64).collect();
            for x in [[0.4, 1.1], [2.0, 0.5], [0.01, 0.01]] {
                let a = section_log_density(&g, &m, &x).unwrap();
                let b = section_log_density_direct(&g, &m, &x).unwrap();
                assert!(
                    (a - b).abs() < 1e-12 * (1.0 + a.abs()),
                    "{m:?} {x:?}: {a} vs {b}"
                );
            }
        }
    }
}
