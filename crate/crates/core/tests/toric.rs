use std::f64::consts::PI;
use std::sync::Arc;

use gcq_core::polytope::{gc_polytope, interval, simplex};
use gcq_core::toric::{
    alpha_m, complex_to_moment, holonomy, is_bohr_sommerfeld, l1_norm, loop_holonomy,
    moment_to_complex, section_log_density, Quadratic, QuadratureOptions, SymplecticPotential,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn spd(entries: &[f64]) -> DMatrix<f64> {
    // B^T B + I is symmetric positive definite.
    let b = DMatrix::from_row_slice(2, 2, entries);
    b.transpose() * &b + DMatrix::identity(2, 2)
}

fn triangle_potential(s: f64, a: DMatrix<f64>) -> SymplecticPotential {
    let p = simplex(2, 3).unwrap();
    let id = vec![vec![1, 0], vec![0, 1]];
    SymplecticPotential::with_deformer(p, s, id, Arc::new(Quadratic::new(a).unwrap())).unwrap()
}

#[test]
fn derivatives_match_central_differences() {
    let g = triangle_potential(1.7, spd(&[0.3, -0.2, 0.5, 1.1]));
    let x = [0.8, 1.3];
    let fd_grad = |h: f64| -> Vec<f64> {
        (0..2)
            .map(|i| {
                let (mut p, mut m) = (x, x);
                p[i] += h;
                m[i] -= h;
                (g.value(&p).unwrap() - g.value(&m).unwrap()) / (2.0 * h)
            })
            .collect()
    };
    let fd_hess = |h: f64| -> DMatrix<f64> {
        DMatrix::from_fn(2, 2, |i, j| {
            let (mut p, mut m) = (x, x);
            p[j] += h;
            m[j] -= h;
            (g.gradient(&p).unwrap()[i] - g.gradient(&m).unwrap()[i]) / (2.0 * h)
        })
    };
    let grad = g.gradient(&x).unwrap();
    let hess = g.hessian(&x).unwrap();
    let eg = |h| {
        fd_grad(h)
            .iter()
            .zip(grad.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let eh = |h| (fd_hess(h) - &hess).amax();
    // Central differences are second order: halving h divides the error by about four.
    let (rg, rh) = (eg(1e-2) / eg(5e-3), eh(1e-2) / eh(5e-3));
    assert!((3.5..4.5).contains(&rg), "{rg}");
    assert!((3.5..4.5).contains(&rh), "{rh}");
    assert!(eg(1e-3) < 1e-6 && eh(1e-3) < 1e-5);
}

#[test]
fn canonical_potential_examples() {
    let g = SymplecticPotential::new(interval(0, 1).unwrap(), 0.0).unwrap();
    let expect = (0.5f64.ln()) / (4.0 * PI);
    assert!((g.g_can(&[0.5]).unwrap() - expect).abs() < 1e-15);
    assert!((g.g_can(&[0.5]).unwrap() + 0.0551589).abs() < 1e-7);
    // At s = 1 and x = 1/2 only the deformer contributes to the gradient.
    let g1 = g.with_s(1.0);
    let c = moment_to_complex(&g1, &[0.5], &[0.0]).unwrap();
    assert!((c.w()[0].re - PI.exp()).abs() < 1e-10 * PI.exp());
    assert!(c.w()[0].im.abs() < 1e-12);
}

#[test]
fn section_density_and_norm_on_p1() {
    let g = SymplecticPotential::new(interval(0, 1).unwrap(), 0.0).unwrap();
    for x in [0.1, 0.37, 0.5, 0.9] {
        let d = section_log_density(&g, &[0.0], &[x]).unwrap().exp();
        assert!((d - (1.0f64 - x).sqrt()).abs() < 1e-14);
    }
    let l1 = l1_norm(&g, &[0.0], &QuadratureOptions::default()).unwrap();
    assert!((l1.log_total.exp() - 2.0 / 3.0).abs() < 1e-7);
}

#[test]
fn holonomy_examples() {
    assert!((holonomy(&[0.5], 0) + 1.0).norm() < 1e-15);
    assert_eq!(holonomy(&[2.0], 0).re, 1.0);
    assert!((holonomy(&[0.25], 0).im - 1.0).abs() < 1e-15);
    assert!((loop_holonomy(&[0.5, 0.25], &[2, 2]) + 1.0).norm() < 1e-15);
    assert!(is_bohr_sommerfeld(&[1.0, 2.0]));
    assert!(!is_bohr_sommerfeld(&[1.0, 0.5]));
}

#[test]
fn gc_potential_density_closed_form() {
    let p = gc_polytope(3, &[1, 1]).unwrap();
    let g = SymplecticPotential::new(p, 2.0).unwrap();
    let m = [1.0, 1.0, 0.0];
    let x = [0.9, 1.4, 0.3];
    let a = section_log_density(&g, &m, &x).unwrap();
    let b = gcq_core::toric::section_log_density_direct(&g, &m, &x).unwrap();
    assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn legendre_round_trip(u in 0.02f64..0.98, v in 0.02f64..0.98, s in 0.0f64..50.0,
                           th in -0.5f64..0.5, b in proptest::collection::vec(-1.0f64..1.0, 4)) {
        let g = triangle_potential(s, spd(&b));
        // Interior point of the triangle of size 3.
        let x = [3.0 * u * (1.0 - v), 3.0 * u * v];
        prop_assume!(3.0 - x[0] - x[1] > 0.05);
        let c = moment_to_complex(&g, &x, &[th, -th]).unwrap();
        let (back, theta) = complex_to_moment(&g, &c).unwrap();
        prop_assert!((back[0] - x[0]).abs() < 1e-9 && (back[1] - x[1]).abs() < 1e-9);
        prop_assert_eq!(theta, vec![th, -th]);
    }

    #[test]
    fn density_plus_alpha_is_independent_of_s(u in 0.01f64..0.99, v in 0.01f64..0.99,
                                              s1 in 0.0f64..100.0, s2 in 0.0f64..100.0,
                                              k in 0usize..10) {
        let g = triangle_potential(0.0, spd(&[0.4, 0.1, -0.3, 0.2]));
        let x = [3.0 * u * (1.0 - v), 3.0 * u * v];
        let m = g.polytope().lattice_points().unwrap()[k].iter().map(|&a| a as f64).collect::<Vec<_>>();
        let a = alpha_m(&g, &m, &x).unwrap();
        let l = |s: f64| section_log_density(&g.with_s(s), &m, &x).unwrap() + 2.0 * PI * s * a;
        let (l1, l2) = (l(s1), l(s2));
        prop_assert!((l1 - l2).abs() < 1e-12 * (1.0 + l1.abs() + 2.0 * PI * 100.0 * a.abs()));
    }

    #[test]
    fn alpha_dominates_distance(u in 0.0f64..1.0, v in 0.0f64..1.0, k in 0usize..10,
                                b in proptest::collection::vec(-1.0f64..1.0, 4)) {
        // alpha_m(x) + nu(m) >= (lambda_min / 2) |x - m|^2 for a convex quadratic nu.
        let a = spd(&b);
        let lmin = a.clone().symmetric_eigenvalues().min();
        let g = triangle_potential(1.0, a);
        let x = [3.0 * u * (1.0 - v), 3.0 * u * v];
        let m = g.polytope().lattice_points().unwrap()[k].iter().map(|&c| c as f64).collect::<Vec<_>>();
        let lhs = alpha_m(&g, &m, &x).unwrap() + g.deformer().value(&m);
        let d2 = (x[0] - m[0]).powi(2) + (x[1] - m[1]).powi(2);
        prop_assert!(lhs >= 0.5 * lmin * d2 - 1e-12, "{} < {}", lhs, 0.5 * lmin * d2);
    }
}
