//! The `n = 3` degeneration family and its gradient-Hamiltonian flow.
//!
//! The total space is `{(z1, z2, t) : z1_1 z2_3 - z1_2 z2_2 + t z1_3 z2_1 = 0}` inside
//! `P^2 x P^2 x C`, where `z1 = (q_1, q_2, q_3)` and `z2 = (q_12, q_13, q_23)`. Fiber `t = 1`
//! is the flag manifold in its Plücker embedding, fiber `t = 0` the GC toric variety.
//!
//! Points keep unit-norm representatives in each factor. Tangent vectors are horizontal
//! (Hermitian-orthogonal to the representative), which identifies them with tangent
//! vectors of the projective factors. The metric is `a_l / pi` times the round metric on
//! factor `l`, so that each `P^2` has symplectic volume `a_l^2 / 2`, plus a flat metric on `C`.

mod bundle;
mod integrate;
mod io;

use std::f64::consts::PI;

use nalgebra::{Matrix3, Matrix4, SMatrix, SVector, Vector3};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::flag::{deformed_pluecker, FlagMatrix};

pub use bundle::{bargmann_holonomy, bargmann_holonomy_extrapolated, BundleElement};
pub use integrate::{FlowOptions, FrameTransport, StepRecord, Trajectory};
pub use io::{run_flow, write_trajectory_csv, FlowConfig, FlowReport};

pub type C = Complex64;
/// Tangent vector `(v1, v2, dt)` in ambient coordinates.
pub type Tangent = SVector<C, 7>;

const ZERO: C = C::new(0.0, 0.0);
pub const GRAD_GUARD: f64 = 1e-8;
pub const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyPoint {
    pub z1: Vector3<C>,
    pub z2: Vector3<C>,
    pub t: C,
}

impl FamilyPoint {
    /// Normalises both factors; fails on a zero factor.
    pub fn new(z1: Vector3<C>, z2: Vector3<C>, t: C) -> Result<Self> {
        let (n1, n2) = (z1.norm(), z2.norm());
        if n1 == 0.0 || n2 == 0.0 {
            return Err(invalid("homogeneous coordinates must be non-zero"));
        }
        Ok(Self {
            z1: z1 / C::new(n1, 0.0),
            z2: z2 / C::new(n2, 0.0),
            t,
        })
    }

    /// The point `[q(V, t)]` of the fiber over `t`.
    pub fn from_flag(v: &FlagMatrix, t: C) -> Result<Self> {
        if v.n() != 3 {
            return Err(invalid("the degeneration family is implemented for n = 3"));
        }
        let q = deformed_pluecker(v, t)?;
        let g = |s: &[usize]| q.get(s).expect("n = 3 coordinate");
        Self::new(
            Vector3::new(g(&[1]), g(&[2]), g(&[3])),
            Vector3::new(g(&[1, 2]), g(&[1, 3]), g(&[2, 3])),
            t,
        )
    }

    pub fn to_vector(&self) -> Tangent {
        let mut v = Tangent::zeros();
        v.fixed_rows_mut::<3>(0).copy_from(&self.z1);
        v.fixed_rows_mut::<3>(3).copy_from(&self.z2);
        v[6] = self.t;
        v
    }

    /// Unnormalised `self + h v` (intermediate stages of an integrator).
    pub fn shifted(&self, v: &Tangent, h: f64) -> Self {
        let hc = C::new(h, 0.0);
        Self {
            z1: self.z1 + v.fixed_rows::<3>(0) * hc,
            z2: self.z2 + v.fixed_rows::<3>(3) * hc,
            t: self.t + v[6] * hc,
        }
    }

    pub fn normalized(&self) -> Self {
        Self::new(self.z1, self.z2, self.t).expect("non-zero factors")
    }

    /// Homogeneous coordinates per factor (for holonomy computations).
    pub fn factors(&self) -> Vec<Vec<C>> {
        vec![
            self.z1.iter().copied().collect(),
            self.z2.iter().copied().collect(),
        ]
    }

    /// Gauge-invariant distance: per factor, the norm of the difference after aligning the
    /// phase of `other` with `self`; combined with `|t - t'|` by maximum.
    pub fn distance(&self, other: &Self) -> f64 {
        let d = |a: &Vector3<C>, b: &Vector3<C>| {
            let (a, b) = (a / C::new(a.norm(), 0.0), b / C::new(b.norm(), 0.0));
            let ip = b.dotc(&a);
            let ph = if ip.norm() == 0.0 {
                C::new(1.0, 0.0)
            } else {
                ip / ip.norm()
            };
            (a - b * ph).norm()
        };
        d(&self.z1, &other.z1)
            .max(d(&self.z2, &other.z2))
            .max((self.t - other.t).norm())
    }
}

/// The family with symplectic weights `a = (a_1, a_2)` and flat weight on the base.
#[derive(Clone, Debug, PartialEq)]
pub struct Family {
    pub a: [f64; 2],
    pub t_weight: f64,
}

impl Family {
    pub fn new(a: [f64; 2]) -> Result<Self> {
        Self::with_base_weight(a, 1.0)
    }

    pub fn with_base_weight(a: [f64; 2], t_weight: f64) -> Result<Self> {
        if a.iter().any(|&x| !(x > 0.0)) || !(t_weight > 0.0) {
            return Err(invalid("metric weights must be positive"));
        }
        Ok(Self { a, t_weight })
    }

    /// The same family with every metric weight multiplied by `c2`.
    pub fn scaled(&self, c2: f64) -> Result<Self> {
        Self::with_base_weight([self.a[0] * c2, self.a[1] * c2], self.t_weight * c2)
    }

    /// Metric weights of the seven ambient coordinates (unit representatives).
    pub fn weights(&self) -> [f64; 7] {
        let (w1, w2) = (self.a[0] / PI, self.a[1] / PI);
        [w1, w1, w1, w2, w2, w2, self.t_weight]
    }

    fn sqrt_weights(&self) -> [f64; 7] {
        self.weights().map(f64::sqrt)
    }

    /// `f(z1, z2, t) = z1_1 z2_3 - z1_2 z2_2 + t z1_3 z2_1`.
    pub fn relation(&self, x: &FamilyPoint) -> C {
        x.z1[0] * x.z2[2] - x.z1[1] * x.z2[1] + x.t * x.z1[2] * x.z2[0]
    }

    /// Holomorphic differential of the relation, `(d/dz1, d/dz2, d/dt)`.
    pub fn relation_differential(&self, x: &FamilyPoint) -> Tangent {
        let (z1, z2, t) = (&x.z1, &x.z2, x.t);
        Tangent::from_column_slice(&[
            z2[2],
            -z2[1],
            t * z2[0],
            t * z1[2],
            -z1[1],
            z1[0],
            z1[2] * z2[0],
        ])
    }

    /// Constraint rows in metric-normalised coordinates `u_k = sqrt(w_k) v_k`:
    /// horizontality in each factor, the linearised relation and optionally `dt = 0`.
    fn constraints<const R: usize>(&self, x: &FamilyPoint) -> SMatrix<C, R, 7> {
        let s = self.sqrt_weights();
        let df = self.relation_differential(x);
        let mut c = SMatrix::<C, R, 7>::zeros();
        for i in 0..3 {
            c[(0, i)] = x.z1[i].conj() / s[i];
            c[(1, 3 + i)] = x.z2[i].conj() / s[3 + i];
        }
        for k in 0..7 {
            c[(2, k)] = df[k] / s[k];
        }
        if R == 4 {
            c[(3, 6)] = C::new(1.0 / s[6], 0.0);
        }
        c
    }

    fn to_u(&self, v: &Tangent) -> Tangent {
        let s = self.sqrt_weights();
        Tangent::from_fn(|k, _| v[k] * s[k])
    }

    fn to_ambient(&self, u: &Tangent) -> Tangent {
        let s = self.sqrt_weights();
        Tangent::from_fn(|k, _| u[k] / s[k])
    }

    /// Metric `Re sum_k w_k conj(u_k) v_k` at a point with unit representatives.
    pub fn metric(&self, u: &Tangent, v: &Tangent) -> f64 {
        let w = self.weights();
        (0..7).map(|k| w[k] * (u[k].conj() * v[k]).re).sum()
    }

    /// Kähler form `Im sum_k w_k conj(u_k) v_k`.
    pub fn omega(&self, u: &Tangent, v: &Tangent) -> f64 {
        let w = self.weights();
        (0..7).map(|k| w[k] * (u[k].conj() * v[k]).im).sum()
    }

    fn check_rank(cc: &Matrix3<C>) -> Result<()> {
        let ev = nalgebra::SymmetricEigen::new(*cc).eigenvalues;
        let smallest = ev
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
            .sqrt();
        if smallest < RANK_TOL {
            Err(Error::RankDrop { sigma: smallest })
        } else {
            Ok(())
        }
    }

    /// Orthogonal projection onto the tangent space of the total space (`fiber = false`) or
    /// of the fiber (`fiber = true`). Expects unit representatives.
    pub fn project(&self, x: &FamilyPoint, v: &Tangent, fiber: bool) -> Result<Tangent> {
        let u = self.to_u(v);
        let pu = if fiber {
            let c = self.constraints::<4>(x);
            let cc: Matrix4<C> = c * c.adjoint();
            let sol = cc
                .cholesky()
                .ok_or(Error::RankDrop { sigma: 0.0 })?
                .solve(&(c * u));
            u - c.adjoint() * sol
        } else {
            let c = self.constraints::<3>(x);
            let cc: Matrix3<C> = c * c.adjoint();
            let Some(ch) = cc.cholesky() else {
                Self::check_rank(&cc)?;
                return Err(Error::RankDrop { sigma: 0.0 });
            };
            u - c.adjoint() * ch.solve(&(c * u))
        };
        Ok(self.to_ambient(&pu))
    }

    /// Gradient of `Re t` on the total space, in ambient coordinates.
    pub fn grad_re_t(&self, x: &FamilyPoint) -> Result<Tangent> {
        let mut g = Tangent::zeros();
        g[6] = C::new(1.0 / self.t_weight, 0.0);
        self.project(x, &g, false)
    }

    /// `Z = -grad Re f / |grad Re f|^2`, horizontal in each factor. Defined for
    /// unnormalised representatives by homogeneity.
    pub fn grad_ham_field(&self, x: &FamilyPoint) -> Result<Tangent> {
        let (n1, n2) = (x.z1.norm(), x.z2.norm());
        let unit = FamilyPoint {
            z1: x.z1 / C::new(n1, 0.0),
            z2: x.z2 / C::new(n2, 0.0),
            t: x.t,
        };
        let c = self.constraints::<3>(&unit);
        let cc: Matrix3<C> = c * c.adjoint();
        let Some(ch) = cc.cholesky() else {
            Self::check_rank(&cc)?;
            return Err(Error::RankDrop { sigma: 0.0 });
        };
        let s = self.sqrt_weights();
        let mut g = Tangent::zeros();
        g[6] = C::new(1.0 / s[6], 0.0);
        let pg = g - c.adjoint() * ch.solve(&(c * g));
        let norm2 = pg.norm_squared();
        if norm2.sqrt() < GRAD_GUARD {
            return Err(Error::DegenerateGradient { norm: norm2.sqrt() });
        }
        let mut z = self.to_ambient(&(-pg / C::new(norm2, 0.0)));
        for i in 0..3 {
            z[i] *= n1;
            z[3 + i] *= n2;
        }
        Ok(z)
    }

    fn null_space<const R: usize>(&self, x: &FamilyPoint) -> Result<Vec<Tangent>> {
        let c = self.constraints::<R>(x);
        let mut padded = SMatrix::<C, 7, 7>::zeros();
        padded.fixed_rows_mut::<R>(0).copy_from(&c);
        let svd = padded.svd(false, true);
        let vt = svd.v_t.expect("requested V^T");
        let mut idx: Vec<usize> = (0..7).collect();
        idx.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let sigma_r = svd.singular_values[idx[R - 1]];
        if sigma_r < RANK_TOL {
            return Err(Error::RankDrop { sigma: sigma_r });
        }
        Ok(idx[R..]
            .iter()
            .map(|&k| vt.row(k).adjoint().into_owned())
            .collect())
    }

    fn real_basis(&self, complex: Vec<Tangent>) -> Vec<Tangent> {
        let i = C::new(0.0, 1.0);
        complex
            .into_iter()
            .flat_map(|u| [self.to_ambient(&u), self.to_ambient(&(u * i))])
            .collect()
    }

    /// Metric-orthonormal real basis of the tangent space of the total space (dimension 8).
    pub fn tangent_space(&self, x: &FamilyPoint) -> Result<Vec<Tangent>> {
        Ok(self.real_basis(self.null_space::<3>(x)?))
    }

    /// Metric-orthonormal real basis of the tangent space of the fiber (dimension 6).
    pub fn fiber_tangent_space(&self, x: &FamilyPoint) -> Result<Vec<Tangent>> {
        Ok(self.real_basis(self.null_space::<4>(x)?))
    }

    /// Moves `x` back onto the fiber over `x.t` by Gauss-Newton on the relation.
    pub fn retract(
        &self,
        x: &FamilyPoint,
        tol: f64,
        max_iter: usize,
    ) -> Result<(FamilyPoint, f64)> {
        let mut p = x.normalized();
        for _ in 0..max_iter {
            let f = self.relation(&p);
            if f.norm() <= tol {
                return Ok((p, f.norm()));
            }
            let df = self.relation_differential(&p);
            let gz: f64 = (0..6).map(|k| df[k].norm_sqr()).sum();
            if gz == 0.0 {
                return Err(Error::RankDrop { sigma: 0.0 });
            }
            let scale = -f / C::new(gz, 0.0);
            let mut step = Tangent::zeros();
            for k in 0..6 {
                step[k] = df[k].conj() * scale;
            }
            p = p.shifted(&step, 1.0).normalized();
        }
        let r = self.relation(&p).norm();
        if r <= tol * 10.0 {
            Ok((p, r))
        } else {
            Err(Error::NoConvergence {
                solver: "fiber retraction",
                iterations: max_iter,
                residual: r,
            })
        }
    }

    /// The `U(3)` moment matrix `a_1 P(z1) + a_2 P(z2)` of the ambient point.
    pub fn moment_matrix(&self, x: &FamilyPoint) -> nalgebra::DMatrix<C> {
        crate::flag::ambient_moment_matrix(3, &x.factors(), &self.a).expect("n = 3 levels")
    }

    /// Torus moment coordinates `(x_1, x_2, x_3, x_4)` of the ambient point in
    /// `a_1 Delta^2 x a_2 Delta^2`: the weighted moduli of `q_1, q_2, q_12, q_13`.
    pub fn torus_moment(&self, x: &FamilyPoint) -> [f64; 4] {
        let (n1, n2) = (x.z1.norm_squared(), x.z2.norm_squared());
        [
            self.a[0] * x.z1[0].norm_sqr() / n1,
            self.a[0] * x.z1[1].norm_sqr() / n1,
            self.a[1] * x.z2[0].norm_sqr() / n2,
            self.a[1] * x.z2[1].norm_sqr() / n2,
        ]
    }

    /// GC coordinates `(lambda_1^1, lambda_2^1, lambda_2^2)` of the ambient moment matrix.
    /// They are conserved by the flow, since `U(2) x T^3` preserves every fiber.
    pub fn gc_invariants(&self, x: &FamilyPoint) -> [f64; 3] {
        let gc = crate::flag::gc_from_hermitian(&self.moment_matrix(x));
        [gc.rows[0][0], gc.rows[1][0], gc.rows[1][1]]
    }

    /// `i^{-1}` applied to the GC-torus moment of the ambient point:
    /// `(x_1 + x_3 + x_4, x_1 + x_2 + a_2, x_3)`. Agrees with `gc_invariants` on the toric fiber.
    pub fn toric_gc(&self, x: &FamilyPoint) -> [f64; 3] {
        let m = self.torus_moment(x);
        [m[0] + m[2] + m[3], m[0] + m[1] + self.a[1], m[2]]
    }
}

/// Zero tangent vector.
pub fn zero_tangent() -> Tangent {
    Tangent::from_element(ZERO)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flag::random_flag;

    fn point(seed: u64, t: f64) -> (Family, FamilyPoint) {
        let fam = Family::new([1.0, 1.0]).unwrap();
        let x = FamilyPoint::from_flag(&random_flag(3, seed), C::new(t, 0.0)).unwrap();
        (fam, x)
    }

    #[test]
    fn flag_points_lie_on_fiber() {
        for seed in 0..10 {
            let (fam, x) = point(seed, 0.7);
            assert!(fam.relation(&x).norm() < 1e-14);
        }
    }

    #[test]
    fn tangent_basis_is_orthonormal_and_tangent() {
        let (fam, x) = point(1, 1.0);
        let basis = fam.tangent_space(&x).unwrap();
        assert_eq!(basis.len(), 8);
        let df = fam.relation_differential(&x);
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let g = fam.metric(u, v);
                assert!((g - f64::from(u8::from(i == j))).abs() < 1e-12);
            }
            assert!((df.transpose() * u)[0].norm() < 1e-12);
            assert!(x.z1.dotc(&u.fixed_rows::<3>(0).into_owned()).norm() < 1e-12);
            assert!(x.z2.dotc(&u.fixed_rows::<3>(3).into_owned()).norm() < 1e-12);
        }
        assert_eq!(fam.fiber_tangent_space(&x).unwrap().len(), 6);
    }

    #[test]
    fn field_moves_t_at_unit_speed() {
        let (fam, x) = point(2, 1.0);
        let z = fam.grad_ham_field(&x).unwrap();
        assert!((z[6].re + 1.0).abs() < 1e-12);
        assert!(z[6].im.abs() < 1e-12);
    }
}
