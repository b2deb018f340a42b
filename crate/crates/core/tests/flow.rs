use gcq_core::flag::random_flag;
use gcq_core::flow::{
    bargmann_holonomy, bargmann_holonomy_extrapolated, BundleElement, Family, FamilyPoint,
    FlowOptions, FrameTransport, Tangent, C,
};
use gcq_core::toric::holonomy;
use nalgebra::Vector3;

fn setup(seed: u64) -> (Family, FamilyPoint) {
    let fam = Family::new([1.0, 1.0]).unwrap();
    let x = FamilyPoint::from_flag(&random_flag(3, seed), C::new(1.0, 0.0)).unwrap();
    (fam, x)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn flow_reaches_target_fiber() {
    let (fam, x) = setup(3);
    let y = fam.flow(&x, 0.5, &FlowOptions::default()).unwrap();
    assert!((y.t - C::new(0.5, 0.0)).norm() < 1e-10);
    assert!(fam.relation(&y).norm() < 1e-10);
    assert!((y.z1.norm() - 1.0).abs() < 1e-12 && (y.z2.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn zero_time_is_identity() {
    let (fam, x) = setup(4);
    assert_eq!(fam.flow(&x, 0.0, &FlowOptions::default()).unwrap(), x);
}

#[test]
fn reverse_flow_returns() {
    let (fam, x) = setup(5);
    let opts = FlowOptions::default();
    let y = fam.flow(&x, 0.5, &opts).unwrap();
    let back = fam.flow(&y, -0.5, &opts).unwrap();
    let d = x.distance(&back);
    println!("reverse distance {d:e}");
    assert!(d < 1e-7);
}

#[test]
fn field_derivatives_of_f_along_trajectory() {
    let (fam, mut x) = setup(6);
    let opts = FlowOptions::with_step(1e-2);
    for _ in 0..50 {
        let z = fam.grad_ham_field(&x).unwrap();
        // Directional derivative of t computed through the ambient relation.
        assert!((z[6].re + 1.0).abs() < 1e-8);
        assert!(z[6].im.abs() < 1e-8);
        x = fam.rk4_step(&x, 1e-2, &opts).unwrap().0;
    }
}

#[test]
fn metric_scaling_scales_gradient_inversely() {
    // Z does not depend on a global rescaling of the metric: only its length does.
    let (fam, x) = setup(7);
    let c2 = 9.0;
    let z = fam.grad_ham_field(&x).unwrap();
    let scaled = fam.scaled(c2).unwrap();
    let zs = scaled.grad_ham_field(&x).unwrap();
    assert!((z - zs).norm() < 1e-12);
    assert!((scaled.metric(&zs, &zs).sqrt() - c2.sqrt() * fam.metric(&z, &z).sqrt()).abs() < 1e-12);
    let g = fam.grad_re_t(&x).unwrap();
    let gs = scaled.grad_re_t(&x).unwrap();
    let ratio = scaled.metric(&gs, &gs).sqrt() / fam.metric(&g, &g).sqrt();
    assert!((ratio - 1.0 / c2.sqrt()).abs() < 1e-12);
}

#[test]
fn retraction_is_idempotent_on_manifold() {
    let (fam, x) = setup(8);
    let (y, _) = fam.retract(&x, 1e-12, 20).unwrap();
    assert!(x.distance(&y) < 1e-14);
}

#[test]
fn step_halving_shows_fourth_order_in_position() {
    let (fam, x) = setup(9);
    let reference = fam.flow(&x, 0.5, &FlowOptions::with_step(0.0125)).unwrap();
    let coarse = fam.flow(&x, 0.5, &FlowOptions::with_step(0.1)).unwrap();
    let mid = fam.flow(&x, 0.5, &FlowOptions::with_step(0.05)).unwrap();
    let e1 = coarse.distance(&reference);
    let e2 = mid.distance(&reference);
    println!("rk4 errors {e1:e} {e2:e} ratio {}", e1 / e2);
    assert!((10.0..=24.0).contains(&(e1 / e2)));
}

#[test]
fn moment_invariants_are_conserved() {
    let (fam, x) = setup(10);
    let y = fam.flow(&x, 0.5, &FlowOptions::default()).unwrap();
    let d = max_diff(&fam.gc_invariants(&x), &fam.gc_invariants(&y));
    println!("gc invariant drift {d:e}");
    assert!(d < 1e-10);
    let h0 = fam.moment_matrix(&x);
    let h1 = fam.moment_matrix(&y);
    for i in 0..3 {
        assert!((h0[(i, i)] - h1[(i, i)]).norm() < 1e-10);
    }
}

#[test]
fn frame_pairings_preserved_at_second_order() {
    let (fam, x) = setup(11);
    let frame = fam.fiber_tangent_space(&x).unwrap();
    let run = |h| {
        fam.transport_frame(
            &x,
            &frame,
            0.5,
            &FlowOptions::with_step(h),
            FrameTransport::Heun,
        )
        .unwrap()
        .max_pairing_drift()
    };
    let d1 = run(1e-3);
    let d2 = run(5e-4);
    println!("pairing drift {d1:e} {d2:e} ratio {}", d1 / d2);
    assert!(d1 < 1e-6);
    assert!((3.0..=6.0).contains(&(d1 / d2)));
}

#[test]
fn zero_vector_transports_to_zero() {
    let (fam, x) = setup(12);
    let traj = fam
        .transport_frame(
            &x,
            &[Tangent::zeros()],
            0.1,
            &FlowOptions::with_step(1e-2),
            FrameTransport::Heun,
        )
        .unwrap();
    assert_eq!(traj.frame[0].norm(), 0.0);
}

#[test]
fn bundle_norm_preserved_and_holonomy_invariant() {
    let (fam, x) = setup(13);
    let opts = FlowOptions::default();
    let e = BundleElement {
        base: x.clone(),
        value: C::new(0.6, -0.8),
    };
    let moved = fam.transport_along_flow(&e, 0.5, &opts).unwrap();
    assert!((moved.norm() - 1.0).abs() < 1e-8);

    let basis = fam.fiber_tangent_space(&x).unwrap();
    let pts = fam
        .fiber_loop(&x, &basis[0], &basis[2], 0.4, 64, &opts)
        .unwrap();
    let before = fam.loop_holonomy(&pts).unwrap();
    let flowed: Vec<_> = pts
        .iter()
        .map(|p| fam.flow(p, 0.5, &opts).unwrap())
        .collect();
    let after = fam.loop_holonomy(&flowed).unwrap();
    println!(
        "holonomy {before} {after} diff {:e}",
        (before - after).norm()
    );
    assert!((before - after).norm() < 1e-5);
    assert!((before - C::new(1.0, 0.0)).norm() > 1e-3);
}

#[test]
fn constant_loop_has_trivial_holonomy() {
    let (fam, x) = setup(14);
    let pts = vec![x; 8];
    assert!((fam.loop_holonomy(&pts).unwrap() - C::new(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn torus_loop_holonomy_matches_moment() {
    // The circle k = (1, 0, 0) has moment H_11 = lambda_1^1, which the loop detects.
    let (fam, x) = setup(15);
    let pts = fam.torus_loop(&x, [1, 0, 0], 512);
    let h = fam.loop_holonomy(&pts).unwrap();
    let l11 = fam.gc_invariants(&x)[0];
    assert!((h - holonomy(&[l11], 0)).norm() < 1e-8);
}

#[test]
fn projective_line_latitude_holonomy() {
    for a in [1.0f64, 3.0] {
        for x in [0.3f64, 1.25, 2.0] {
            if x >= a {
                continue;
            }
            let r1 = (x / a).sqrt();
            let r0 = (1.0 - x / a).sqrt();
            let pts: Vec<Vec<Vec<C>>> = (0..400)
                .map(|k| {
                    let th = 2.0 * std::f64::consts::PI * k as f64 / 400.0;
                    vec![vec![C::new(r0, 0.0), C::from_polar(r1, th)]]
                })
                .collect();
            let h = bargmann_holonomy_extrapolated(&pts, &[a]).unwrap();
            let expect = holonomy(&[x], 0);
            assert!((h - expect).norm() < 1e-8, "a={a} x={x} {h} {expect}");
        }
    }
}

#[test]
fn holonomy_multiplicative_over_concatenation() {
    let (fam, x) = setup(16);
    let a = fam.torus_loop(&x, [1, 0, 0], 32);
    let b = fam.torus_loop(&x, [0, 1, 0], 32);
    let mut ab = a.clone();
    ab.extend(b.iter().cloned());
    let pa: Vec<_> = a.iter().map(FamilyPoint::factors).collect();
    let pb: Vec<_> = b.iter().map(FamilyPoint::factors).collect();
    let pab: Vec<_> = ab.iter().map(FamilyPoint::factors).collect();
    let w = [1.0, 1.0];
    let prod = bargmann_holonomy(&pa, &w) * bargmann_holonomy(&pb, &w);
    assert!((bargmann_holonomy(&pab, &w) - prod).norm() < 1e-12);
}

#[test]
fn toric_fiber_points_identify_gc_values() {
    // On t = 0 with q_1 q_23 = q_2 q_13, GC values equal the identified torus moment.
    let fam = Family::new([2.0, 1.0]).unwrap();
    let (q2, q13, q23) = (C::new(0.3, 0.4), C::new(-0.5, 0.2), C::new(0.7, 0.1));
    let q1 = q2 * q13 / q23;
    let x = FamilyPoint::new(
        Vector3::new(q1, q2, C::new(0.9, 0.0)),
        Vector3::new(C::new(0.2, -0.6), q13, q23),
        C::new(0.0, 0.0),
    )
    .unwrap();
    assert!(fam.relation(&x).norm() < 1e-15);
    assert!(max_diff(&fam.gc_invariants(&x), &fam.toric_gc(&x)) < 1e-12);
}
