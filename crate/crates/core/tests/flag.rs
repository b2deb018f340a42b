//! Flag-manifold checks against independent oracles.

use gcq_core::flag::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

type C = Complex64;

/// Polynomial in `t` with complex coefficients, lowest degree first.
#[derive(Clone, Debug)]
struct Poly(Vec<C>);

impl Poly {
    fn monomial(c: C, deg: usize) -> Self {
        let mut v = vec![C::new(0.0, 0.0); deg + 1];
        v[deg] = c;
        Poly(v)
    }
    fn add(&self, o: &Poly, sign: f64) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly(
            (0..n)
                .map(|i| {
                    self.0.get(i).copied().unwrap_or_default()
                        + o.0.get(i).copied().unwrap_or_default() * sign
                })
                .collect(),
        )
    }
    fn mul(&self, o: &Poly) -> Poly {
        let mut v = vec![C::new(0.0, 0.0); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly(v)
    }
    fn eval(&self, t: C) -> C {
        self.0
            .iter()
            .rev()
            .fold(C::new(0.0, 0.0), |acc, c| acc * t + c)
    }
    fn coeff(&self, k: usize) -> C {
        self.0.get(k).copied().unwrap_or_default()
    }
}

/// Determinant by cofactor expansion along the first row.
fn det_poly(m: &[Vec<Poly>]) -> Poly {
    if m.len() == 1 {
        return m[0][0].clone();
    }
    let mut acc = Poly(vec![C::new(0.0, 0.0)]);
    for j in 0..m.len() {
        let minor: Vec<Vec<Poly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = m[0][j].mul(&det_poly(&minor));
        acc = acc.add(&term, if j % 2 == 0 { 1.0 } else { -1.0 });
    }
    acc
}

/// `q_I` as an explicit polynomial in `t`, after dividing out `t^{d_I}`.
fn oracle_q(v: &DMatrix<C>, set: &[usize]) -> Poly {
    let n = v.nrows();
    let omega = |i: usize, j: usize| {
        if i > j {
            3usize.pow((i - j - 1) as u32)
        } else {
            0
        }
    };
    let l = set.len();
    let m: Vec<Vec<Poly>> = set
        .iter()
        .map(|&i| {
            (0..l)
                .map(|j| Poly::monomial(v[(i - 1, j)], omega(i - 1, j)))
                .collect()
        })
        .collect();
    let full = det_poly(&m);
    let d: usize = set.iter().enumerate().map(|(k, &i)| omega(i - 1, k)).sum();
    for k in 0..d {
        assert!(
            full.coeff(k).norm() < 1e-12 * (1.0 + v.norm().powi(l as i32)),
            "not divisible by t^{d}"
        );
    }
    assert!(n >= l);
    Poly(full.0[d.min(full.0.len())..].to_vec())
}

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

#[test]
fn deformed_coordinates_match_polynomial_oracle() {
    for seed in 0..20 {
        let v = random_flag(3, seed);
        for k in 0..5 {
            let t = c(0.3 * k as f64 - 0.4, 0.17 * k as f64);
            let q = deformed_pluecker(&v, t).unwrap();
            for l in 1..3 {
                for set in index_sets(3, l) {
                    let expect = oracle_q(v.matrix(), &set).eval(t);
                    let got = q.get(&set).unwrap();
                    assert!(
                        (got - expect).norm() < 1e-12 * (1.0 + expect.norm()),
                        "{set:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn deformed_coordinates_for_three_in_closed_form() {
    // Derived by expanding the weighted minors: exponents (2,1)->1, (3,1)->3, (3,2)->1.
    let v = random_flag(3, 11);
    let m = v.matrix();
    let e = |i: usize, j: usize| m[(i - 1, j - 1)];
    let t = c(0.37, -0.21);
    let q = deformed_pluecker(&v, t).unwrap();
    let q12 = e(1, 1) * e(2, 2) - t * e(1, 2) * e(2, 1);
    let q13 = e(1, 1) * e(3, 2) - t * t * e(1, 2) * e(3, 1);
    let q23 = e(2, 1) * e(3, 2) - t * e(2, 2) * e(3, 1);
    assert!((q.get(&[1, 2]).unwrap() - q12).norm() < 1e-14);
    assert!((q.get(&[1, 3]).unwrap() - q13).norm() < 1e-14);
    assert!((q.get(&[2, 3]).unwrap() - q23).norm() < 1e-14);
    for i in 1..=3 {
        assert_eq!(q.get(&[i]).unwrap(), e(i, 1));
    }
    // Polynomial degrees from the oracle.
    assert_eq!(oracle_q(m, &[1, 3]).0.len(), 3);
    assert_eq!(oracle_q(m, &[2, 3]).0.len(), 2);
}

#[test]
fn deformed_relation_vanishes_identically_in_t() {
    // Coefficientwise in the polynomial oracle, not just at sample points.
    let v = random_flag(3, 5);
    let m = v.matrix();
    let q = |s: &[usize]| oracle_q(m, s);
    let t = Poly::monomial(c(1.0, 0.0), 1);
    let rel = q(&[1])
        .mul(&q(&[2, 3]))
        .add(&q(&[2]).mul(&q(&[1, 3])), -1.0)
        .add(&t.mul(&q(&[3])).mul(&q(&[1, 2])), 1.0);
    for k in 0..rel.0.len() {
        assert!(
            rel.coeff(k).norm() < 1e-13,
            "coefficient {k}: {}",
            rel.coeff(k)
        );
    }
}

#[test]
fn deformation_at_zero_is_exact() {
    let v = random_flag(3, 3);
    let q = deformed_pluecker(&v, c(0.0, 0.0)).unwrap();
    let m = v.matrix();
    assert_eq!(q.get(&[1, 3]).unwrap(), m[(0, 0)] * m[(2, 1)]);
    assert_eq!(q.get(&[2, 3]).unwrap(), m[(1, 0)] * m[(2, 1)]);
    let f = deformed_relation_n3(&q, c(0.0, 0.0)).unwrap();
    assert!(f.norm() < 1e-15 * relation_scale_n3(&q, c(0.0, 0.0)).max(1.0));
}

#[test]
fn classical_pluecker_relation_for_identity_and_random() {
    let p = pluecker(&FlagMatrix::identity(3));
    assert_eq!(deformed_relation_n3(&p, c(1.0, 0.0)).unwrap(), c(0.0, 0.0));
    for seed in 0..50 {
        let p = pluecker(&random_flag(3, seed));
        let f = deformed_relation_n3(&p, c(1.0, 0.0)).unwrap();
        assert!(f.norm() < 1e-13 * relation_scale_n3(&p, c(1.0, 0.0)));
    }
}

#[test]
fn n4_deformation_is_polynomial() {
    for seed in 0..5 {
        let v = random_flag(4, seed);
        let t = c(0.6, 0.1);
        let q = deformed_pluecker(&v, t).unwrap();
        for l in 1..4 {
            for set in index_sets(4, l) {
                let expect = oracle_q(v.matrix(), &set).eval(t);
                assert!((q.get(&set).unwrap() - expect).norm() < 1e-12 * (1.0 + expect.norm()));
            }
        }
    }
}

#[test]
fn ambient_moment_matches_projection_formula() {
    let a = [1.5, 0.7, 2.0];
    for seed in 0..10 {
        let v = random_flag(4, seed);
        let p = pluecker(&v);
        let levels: Vec<Vec<C>> = (1..4).map(|l| p.level(l)).collect();
        let h1 = ambient_moment_matrix(4, &levels, &a).unwrap();
        let h2 = moment_matrix(&v, &a).unwrap();
        assert!((h1 - h2).norm() < 1e-12);
    }
}

#[test]
fn moment_map_is_equivariant() {
    let mut rng = ChaCha20Rng::seed_from_u64(99);
    for seed in 0..20 {
        let v = random_flag(3, seed);
        let u = random_unitary(3, &mut rng);
        let uv = FlagMatrix::new(&u * v.matrix()).unwrap();
        let lhs = moment_matrix(&uv, &[1.0, 2.0]).unwrap();
        let rhs = &u * moment_matrix(&v, &[1.0, 2.0]).unwrap() * u.adjoint();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gc_values_interlace_with_fixed_spectrum(seed in 0u64..1_000_000, a1 in 1u32..4, a2 in 1u32..4) {
        let a = [a1 as f64, a2 as f64];
        let gc = gc_map(&random_flag(3, seed), &a).unwrap();
        prop_assert!(gc.interlacing_violation() < 1e-10);
        let lam = [a[0] + a[1], a[1], 0.0];
        for (x, y) in gc.spectrum().iter().zip(lam) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn ratios_invariant_under_upper_triangular_action(seed in 0u64..1_000_000) {
        let v = random_flag(3, seed);
        let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xabc);
        let mut b = random_unitary(3, &mut rng);
        for i in 0..3 {
            for j in 0..i {
                b[(i, j)] = c(0.0, 0.0);
            }
            b[(i, i)] = c(0.5 + i as f64, 0.0);
        }
        let vb = FlagMatrix::new(v.matrix() * b).unwrap();
        let (p, pb) = (pluecker(&v), pluecker(&vb));
        for l in 1..3 {
            let (x, y) = (p.level(l), pb.level(l));
            let scale = y[0] / x[0];
            for (xi, yi) in x.iter().zip(&y) {
                prop_assert!((yi - xi * scale).norm() < 1e-11 * (1.0 + yi.norm()));
            }
        }
    }

    #[test]
    fn deformation_at_one_is_exact(seed in 0u64..1_000_000) {
        let v = random_flag(4, seed);
        prop_assert_eq!(deformed_pluecker(&v, c(1.0, 0.0)).unwrap(), pluecker(&v));
    }
}

#[test]
fn pluecker_json_shape() {
    let j = pluecker_json(&pluecker(&FlagMatrix::identity(3)));
    assert_eq!(j["1"]["1"], serde_json::json!([1.0, 0.0]));
    assert_eq!(j["2"]["13"], serde_json::json!([0.0, 0.0]));
}

#[test]
fn gc_csv_has_header() {
    let gc = gc_map(&FlagMatrix::identity(3), &[1.0, 1.0]).unwrap();
    let mut buf = Vec::new();
    write_gc_csv(&[gc], &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(
        text.starts_with("sample,lambda1_1,lambda2_1,lambda2_2,lambda3_1,lambda3_2,lambda3_3\n")
    );
}
