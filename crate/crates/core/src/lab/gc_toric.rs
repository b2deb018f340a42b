//! The GC toric variety `V_0` for `n = 3` inside `P^2 x P^2`, in the coordinates of the ambient
//! moment polytope `a_1 Delta^2 x a_2 Delta^2`.
//!
//! Ambient moment coordinates are `x = (x_1, x_2, x_3, x_4)`, the weighted moduli of
//! `q_1, q_2, q_12, q_13`. The affine torus coordinates are
//! `w = (q_1/q_3, q_2/q_3, q_12/q_23, q_13/q_23)`, and `V_0` is `w_1 = w_2 w_4`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::flow::{Family, FamilyPoint, C};
use crate::polytope::{gc_polytope, pluecker_polytope, DelzantPolytope, LatticeBasis};
use crate::toric::{sigma_m_complex, Quadratic, SymplecticPotential};

pub const SLICE_TOL: f64 = 1e-12;
const SLICE_MAX_ITER: usize = 100;

/// Restriction `iota^*` from the ambient torus to the GC torus in these coordinates.
const IOTA: [[i64; 4]; 3] = [[1, 0, 1, 1], [1, 1, 0, 0], [0, 0, 1, 0]];

#[derive(Clone, Debug)]
pub struct GcToric {
    a: [i64; 2],
    ambient: DelzantPolytope,
    gc: DelzantPolytope,
    basis: LatticeBasis,
    kernel: [i64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlicePoint {
    pub x: [f64; 4],
    pub iterations: usize,
    pub residual: f64,
}

impl GcToric {
    pub fn new(a: [i64; 2]) -> Result<Self> {
        if a.iter().any(|&v| v <= 0) {
            return Err(invalid("weights must be positive"));
        }
        let iota: Vec<Vec<i64>> = IOTA.iter().map(|r| r.to_vec()).collect();
        let basis = LatticeBasis::new(&iota)?;
        if !basis.is_surjective() {
            return Err(invalid("restriction does not map onto the GC lattice"));
        }
        let k = basis.kernel();
        if k.len() != 1 {
            return Err(invalid("expected a rank-one kernel"));
        }
        // Orient the generator so that it starts with a positive entry.
        let sign = if k[0].iter().find(|&&v| v != 0).copied().unwrap_or(1) < 0 {
            -1
        } else {
            1
        };
        let kernel = [
            k[0][0] * sign,
            k[0][1] * sign,
            k[0][2] * sign,
            k[0][3] * sign,
        ];
        Ok(Self {
            a,
            ambient: pluecker_polytope(3, &a)?,
            gc: gc_polytope(3, &a)?,
            basis,
            kernel,
        })
    }

    pub fn a(&self) -> [i64; 2] {
        self.a
    }

    pub fn ambient(&self) -> &DelzantPolytope {
        &self.ambient
    }

    pub fn gc_polytope(&self) -> &DelzantPolytope {
        &self.gc
    }

    pub fn iota(&self) -> Vec<Vec<i64>> {
        IOTA.iter().map(|r| r.to_vec()).collect()
    }

    /// Generator of `ker iota^*`, the exponent vector of the binomial `w_1 = w_2 w_4`.
    pub fn kernel(&self) -> [i64; 4] {
        self.kernel
    }

    /// Unimodular basis adapted to `iota^*`: its last column spans the kernel.
    pub fn adapted_basis(&self) -> &LatticeBasis {
        &self.basis
    }

    pub fn family(&self) -> Family {
        Family::new([self.a[0] as f64, self.a[1] as f64]).expect("positive weights")
    }

    pub fn restrict(&self, x: &[f64]) -> [f64; 3] {
        IOTA.map(|r| r.iter().zip(x).map(|(&c, &v)| c as f64 * v).sum())
    }

    /// The identification `i`: GC coordinates to the image of `iota^*`.
    pub fn gc_to_restricted(&self, p: &[f64]) -> [f64; 3] {
        [p[0], p[1] - self.a[1] as f64, p[2]]
    }

    pub fn restricted_to_gc(&self, q: &[f64]) -> [f64; 3] {
        [q[0], q[1] + self.a[1] as f64, q[2]]
    }

    /// Ambient lattice points over the GC lattice point `p`.
    pub fn lifts(&self, p: &[i64]) -> Result<Vec<Vec<i64>>> {
        if p.len() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: p.len(),
            });
        }
        let target = self.gc_to_restricted(&p.iter().map(|&v| v as f64).collect::<Vec<_>>());
        Ok(self
            .ambient
            .lattice_points()?
            .into_iter()
            .filter(|x| {
                let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
                self.restrict(&xf) == target
            })
            .collect())
    }

    /// Ambient potential `g_can + s * nu(iota^* x)` with `nu = 1/2 p^T Q p`.
    pub fn potential(&self, s: f64, nu: Quadratic) -> Result<SymplecticPotential> {
        SymplecticPotential::with_deformer(self.ambient.clone(), s, self.iota(), Arc::new(nu))
    }

    fn particular(&self, p: &[f64]) -> [f64; 4] {
        // With iota^* u = h lower triangular unimodular, x = u[:, :3] h^{-1} i(p).
        let q = self.gc_to_restricted(p);
        let h = &self.basis.h;
        let mut y = [0.0; 3];
        for i in 0..3 {
            let acc: f64 = (0..i).map(|j| h[i][j] as f64 * y[j]).sum();
            y[i] = (q[i] - acc) / h[i][i] as f64;
        }
        let u = &self.basis.u;
        std::array::from_fn(|r| (0..3).map(|c| u[r][c] as f64 * y[c]).sum())
    }

    fn kernel_derivatives(&self, x: &[f64; 4]) -> (f64, f64) {
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for (f, l) in self.ambient.facets.iter().zip(self.ambient.facet_values(x)) {
            let c: f64 = f
                .normal
                .iter()
                .zip(&self.kernel)
                .map(|(&r, &k)| (r * k) as f64)
                .sum();
            if c != 0.0 {
                d1 += 0.5 * c * (l.ln() + 1.0);
                d2 += 0.5 * c * c / l;
            }
        }
        (d1, d2)
    }

    /// Derivative of `g_can` along the kernel direction; zero exactly on the slice.
    pub fn slice_residual(&self, x: &[f64; 4]) -> f64 {
        self.kernel_derivatives(x).0.abs()
    }

    /// The point of the moment image of `V_0` over the interior GC point `p`, by safeguarded
    /// Newton on the convex one-dimensional reduced problem along `ker iota^*`.
    pub fn slice(&self, p: &[f64]) -> Result<SlicePoint> {
        if p.len() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: p.len(),
            });
        }
        let x0 = self.particular(p);
        let at =
            |tau: f64| -> [f64; 4] { std::array::from_fn(|i| x0[i] + tau * self.kernel[i] as f64) };
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (f, l) in self
            .ambient
            .facets
            .iter()
            .zip(self.ambient.facet_values(&x0))
        {
            let c: f64 = f
                .normal
                .iter()
                .zip(&self.kernel)
                .map(|(&r, &k)| (r * k) as f64)
                .sum();
            if c > 0.0 {
                lo = lo.max(-l / c);
            } else if c < 0.0 {
                hi = hi.min(-l / c);
            } else if l <= 0.0 {
                return Err(Error::OutsideInterior { min_facet_value: l });
            }
        }
        if !(hi - lo > 1e-12) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::OutsideInterior {
                min_facet_value: hi - lo,
            });
        }
        let mut tau = 0.5 * (lo + hi);
        for it in 0..SLICE_MAX_ITER {
            let (d1, d2) = self.kernel_derivatives(&at(tau));
            if d1.abs() < SLICE_TOL {
                return Ok(SlicePoint {
                    x: at(tau),
                    iterations: it,
                    residual: d1.abs(),
                });
            }
            if d1 > 0.0 {
                hi = tau;
            } else {
                lo = tau;
            }
            let newton = tau - d1 / d2;
            tau = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        let x = at(tau);
        Err(Error::NoConvergence {
            solver: "subvariety slice",
            iterations: SLICE_MAX_ITER,
            residual: self.slice_residual(&x),
        })
    }

    /// Closed form of the slice: `x_3 = lambda_2^2`, `x_1 = A B / (lambda_2^1 - lambda_2^2)` with
    /// `A = lambda_1^1 - lambda_2^2`, `B = lambda_2^1 - a_2`.
    pub fn slice_closed_form(&self, p: &[f64]) -> [f64; 4] {
        let a2 = self.a[1] as f64;
        let (aa, bb) = (p[0] - p[2], p[1] - a2);
        let x1 = aa * bb / (p[1] - p[2]);
        [x1, bb - x1, p[2], aa - x1]
    }

    /// Point of `V_0` with ambient moment `x` (on the slice) and GC-torus angles
    /// `(theta_2, theta_3, theta_4)` in turns; `q_1` carries `theta_2 + theta_4`.
    pub fn v0_point(&self, x: &[f64; 4], angles: [f64; 3]) -> Result<FamilyPoint> {
        let (a1, a2) = (self.a[0] as f64, self.a[1] as f64);
        let r = |v: f64, a: f64| (v.max(0.0) / a).sqrt();
        let e = |turns: f64| C::from_polar(1.0, 2.0 * PI * turns);
        let [t2, t3, t4] = angles;
        FamilyPoint::new(
            Vector3::new(
                e(t2 + t4) * r(x[0], a1),
                e(t2) * r(x[1], a1),
                C::new(r(a1 - x[0] - x[1], a1), 0.0),
            ),
            Vector3::new(
                e(t3) * r(x[2], a2),
                e(t4) * r(x[3], a2),
                C::new(r(a2 - x[2] - x[3], a2), 0.0),
            ),
            C::new(0.0, 0.0),
        )
    }

    /// Affine torus coordinates `w` of an ambient point.
    pub fn w_coords(&self, y: &FamilyPoint) -> [C; 4] {
        [
            y.z1[0] / y.z1[2],
            y.z1[1] / y.z1[2],
            y.z2[0] / y.z2[2],
            y.z2[1] / y.z2[2],
        ]
    }

    /// Largest relative discrepancy `|sigma^m - sigma^m'| / max(1, |sigma^m|)` over `samples`
    /// random points of `V_0` built from random interior GC points and angles.
    pub fn section_discrepancy(
        &self,
        m: &[i64],
        m2: &[i64],
        samples: usize,
        seed: u64,
    ) -> Result<f64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let top = [(self.a[0] + self.a[1]) as f64, self.a[1] as f64, 0.0];
        let mut worst: f64 = 0.0;
        let mut taken = 0;
        while taken < samples {
            let p = [
                rng.random_range(top[2]..top[0]),
                rng.random_range(top[1]..top[0]),
                rng.random_range(top[2]..top[1]),
            ];
            let margin = 0.05;
            if !(p[1] - p[0] > margin && p[0] - p[2] > margin) {
                continue;
            }
            let x = self.slice(&p)?.x;
            let angles = [rng.random(), rng.random(), rng.random()];
            let y = self.v0_point(&x, angles)?;
            let w = self.w_coords(&y);
            let guard = (w[0] - w[1] * w[3]).norm() / w[0].norm().max(1e-300);
            if guard > 1e-10 {
                return Err(invalid(format!(
                    "sample off V_0: relation residual {guard:e}"
                )));
            }
            let s1 = sigma_m_complex(m, &w)?;
            let s2 = sigma_m_complex(m2, &w)?;
            worst = worst.max((s1 - s2).norm() / s1.norm().max(1.0));
            taken += 1;
        }
        Ok(worst)
    }
}
