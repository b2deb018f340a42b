//! Prequantum line bundle `O(a_1, a_2)` with its Chern connection, in the frame given by the
//! unit representatives. Transport between nearby points uses the phase of the Hermitian
//! overlap, which is exactly unitary.

use std::f64::consts::PI;

use nalgebra::Vector3;

use super::{Family, FamilyPoint, FlowOptions, Tangent, C};
use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct BundleElement {
    pub base: FamilyPoint,
    /// Value on the unit representative of the base point.
    pub value: C,
}

impl BundleElement {
    pub fn norm(&self) -> f64 {
        self.value.norm()
    }
}

fn overlap_phase(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C>().arg()
}

/// Discrete holonomy of a closed polygon of points, each given by its homogeneous
/// coordinates per factor, in the bundle with weights `a`.
pub fn bargmann_holonomy(points: &[Vec<Vec<C>>], a: &[f64]) -> C {
    let n = points.len();
    let mut phase = 0.0;
    for k in 0..n {
        let (p, q) = (&points[k], &points[(k + 1) % n]);
        for (l, w) in a.iter().enumerate() {
            phase += w * overlap_phase(&p[l], &q[l]);
        }
    }
    C::from_polar(1.0, phase)
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

/// Richardson extrapolation of the polygon holonomy from all points and every other point.
pub fn bargmann_holonomy_extrapolated(points: &[Vec<Vec<C>>], a: &[f64]) -> Result<C> {
    if points.len() < 4 || !points.len().is_multiple_of(2) {
        return Err(invalid(
            "extrapolated holonomy needs an even number of at least 4 points",
        ));
    }
    let fine = bargmann_holonomy(points, a).arg();
    let coarse: Vec<_> = points.iter().step_by(2).cloned().collect();
    let coarse = bargmann_holonomy(&coarse, a).arg();
    let d = wrap(fine - coarse);
    Ok(C::from_polar(1.0, fine + d / 3.0))
}

impl Family {
    /// Parallel transport factor from `from` to a nearby point `to` in the unit frame.
    pub fn transport_factor(&self, from: &FamilyPoint, to: &FamilyPoint) -> C {
        let phase = self.a[0] * from.z1.dotc(&to.z1).arg() + self.a[1] * from.z2.dotc(&to.z2).arg();
        C::from_polar(1.0, phase)
    }

    /// Transports `e` along a discretised path starting at `e.base`.
    pub fn parallel_transport(&self, e: &BundleElement, path: &[FamilyPoint]) -> BundleElement {
        let mut cur = e.clone();
        for p in path {
            let f = self.transport_factor(&cur.base, p);
            cur = BundleElement {
                base: p.clone(),
                value: cur.value * f,
            };
        }
        cur
    }

    /// Transports `e` along the flow of `Z` for time `tau`.
    pub fn transport_along_flow(
        &self,
        e: &BundleElement,
        tau: f64,
        opts: &FlowOptions,
    ) -> Result<BundleElement> {
        let n = (tau.abs() / opts.h).ceil() as usize;
        let mut cur = e.clone();
        for _ in 0..n {
            let (next, _) = self.rk4_step(&cur.base, tau / n as f64, opts)?;
            cur = self.parallel_transport(&cur, std::slice::from_ref(&next));
        }
        Ok(cur)
    }

    /// Holonomy of a closed loop of points (even count, extrapolated in the resolution).
    pub fn loop_holonomy(&self, points: &[FamilyPoint]) -> Result<C> {
        let pts: Vec<_> = points.iter().map(FamilyPoint::factors).collect();
        bargmann_holonomy_extrapolated(&pts, &self.a)
    }

    /// Closed loop `theta -> retract(x + r cos(theta) u + r sin(theta) v)` inside the fiber.
    pub fn fiber_loop(
        &self,
        x: &FamilyPoint,
        u: &Tangent,
        v: &Tangent,
        r: f64,
        points: usize,
        opts: &FlowOptions,
    ) -> Result<Vec<FamilyPoint>> {
        (0..points)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / points as f64;
                let d = u * C::new(r * th.cos(), 0.0) + v * C::new(r * th.sin(), 0.0);
                let mut p = x.shifted(&d, 1.0);
                p.t = x.t;
                Ok(self.retract(&p, opts.retract_tol, opts.retract_max_iter)?.0)
            })
            .collect()
    }

    /// Orbit of `x` under the circle `theta -> diag(e^{2 pi i k_j theta})` of the torus `T^3`.
    pub fn torus_loop(&self, x: &FamilyPoint, k: [i64; 3], points: usize) -> Vec<FamilyPoint> {
        (0..points)
            .map(|s| {
                let th = 2.0 * PI * s as f64 / points as f64;
                let e = |w: i64| C::from_polar(1.0, w as f64 * th);
                FamilyPoint {
                    z1: Vector3::new(x.z1[0] * e(k[0]), x.z1[1] * e(k[1]), x.z1[2] * e(k[2])),
                    z2: Vector3::new(
                        x.z2[0] * e(k[0] + k[1]),
                        x.z2[1] * e(k[0] + k[2]),
                        x.z2[2] * e(k[1] + k[2]),
                    ),
                    t: x.t,
                }
            })
            .collect()
    }
}
