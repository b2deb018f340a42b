//! RK4 integration of `Z` with retraction, and transport of fiber frames.

use serde::{Deserialize, Serialize};

use super::{Family, FamilyPoint, Tangent, C};
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    pub h: f64,
    pub retract_tol: f64,
    pub retract_max_iter: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            h: 1e-3,
            retract_tol: 1e-12,
            retract_max_iter: 20,
        }
    }
}

impl FlowOptions {
    pub fn with_step(h: f64) -> Self {
        Self {
            h,
            ..Self::default()
        }
    }
}

/// Integrator for the linearised flow acting on frames.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameTransport {
    /// Heun's method on the variational equation (second order).
    #[default]
    Heun,
    /// Classical RK4 on the variational equation, with the base point at half steps.
    Rk4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub t: C,
    pub residual: f64,
    pub f_deviation: f64,
    pub pairing_drift: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub end: FamilyPoint,
    pub frame: Vec<Tangent>,
    pub records: Vec<StepRecord>,
}

impl Trajectory {
    pub fn max_pairing_drift(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.pairing_drift)
            .fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.records.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

fn step_count(tau: f64, h: f64) -> Result<usize> {
    if !(h > 0.0) || !tau.is_finite() {
        return Err(invalid("flow needs a positive step and finite time"));
    }
    Ok((tau.abs() / h).ceil() as usize)
}

impl Family {
    /// One RK4 step of length `h` (signed) followed by retraction onto the fiber.
    pub fn rk4_step(
        &self,
        x: &FamilyPoint,
        h: f64,
        opts: &FlowOptions,
    ) -> Result<(FamilyPoint, f64)> {
        let k1 = self.grad_ham_field(x)?;
        let k2 = self.grad_ham_field(&x.shifted(&k1, h / 2.0))?;
        let k3 = self.grad_ham_field(&x.shifted(&k2, h / 2.0))?;
        let k4 = self.grad_ham_field(&x.shifted(&k3, h))?;
        let incr = (k1 + (k2 + k3) * C::new(2.0, 0.0) + k4) / C::new(6.0, 0.0);
        let next = x.shifted(&incr, h);
        self.retract(&next, opts.retract_tol, opts.retract_max_iter)
    }

    /// Flows `x` for time `tau` (negative values run backwards).
    pub fn flow(&self, x: &FamilyPoint, tau: f64, opts: &FlowOptions) -> Result<FamilyPoint> {
        let n = step_count(tau, opts.h)?;
        let mut p = x.clone();
        for _ in 0..n {
            p = self.rk4_step(&p, tau / n as f64, opts)?.0;
        }
        Ok(p)
    }

    /// Central finite-difference derivative of `Z` at `x` in direction `u`.
    pub fn field_jvp(&self, x: &FamilyPoint, u: &Tangent) -> Result<Tangent> {
        let nu = u.norm();
        if nu == 0.0 {
            return Ok(Tangent::zeros());
        }
        let eps = 1e-6 * (1.0 + x.to_vector().norm()) / nu;
        let plus = self.grad_ham_field(&x.shifted(u, eps))?;
        let minus = self.grad_ham_field(&x.shifted(u, -eps))?;
        Ok((plus - minus) / C::new(2.0 * eps, 0.0))
    }

    fn pairing_matrix(&self, frame: &[Tangent]) -> Vec<f64> {
        frame
            .iter()
            .flat_map(|u| frame.iter().map(move |v| self.omega(u, v)))
            .collect()
    }

    /// Flows `x` for time `tau` and pushes `frame` (tangent to the fiber) forward by the
    /// linearised flow. Each record carries the pairing drift against the initial frame.
    pub fn transport_frame(
        &self,
        x: &FamilyPoint,
        frame: &[Tangent],
        tau: f64,
        opts: &FlowOptions,
        method: FrameTransport,
    ) -> Result<Trajectory> {
        let n = step_count(tau, opts.h)?;
        let h = if n == 0 { 0.0 } else { tau / n as f64 };
        let mut p = x.clone();
        let mut vecs = frame
            .iter()
            .map(|u| self.project(&p, u, true))
            .collect::<Result<Vec<_>>>()?;
        let omega0 = self.pairing_matrix(&vecs);
        let f0 = x.t;
        let mut records = Vec::with_capacity(n);
        let hc = C::new(h, 0.0);
        for step in 1..=n {
            let (next, residual) = self.rk4_step(&p, h, opts)?;
            let mid = if method == FrameTransport::Rk4 {
                Some(self.rk4_step(&p, h / 2.0, opts)?.0)
            } else {
                None
            };
            let mut advanced = Vec::with_capacity(vecs.len());
            for u in &vecs {
                let v = match &mid {
                    None => {
                        let k1 = self.field_jvp(&p, u)?;
                        let k2 = self.field_jvp(&next, &(u + k1 * hc))?;
                        u + (k1 + k2) * (hc / 2.0)
                    }
                    Some(m) => {
                        let half = hc / 2.0;
                        let k1 = self.field_jvp(&p, u)?;
                        let k2 = self.field_jvp(m, &(u + k1 * half))?;
                        let k3 = self.field_jvp(m, &(u + k2 * half))?;
                        let k4 = self.field_jvp(&next, &(u + k3 * hc))?;
                        u + (k1 + (k2 + k3) * C::new(2.0, 0.0) + k4) * (hc / 6.0)
                    }
                };
                advanced.push(self.project(&next, &v, true)?);
            }
            vecs = advanced;
            p = next;
            let drift = self
                .pairing_matrix(&vecs)
                .iter()
                .zip(&omega0)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            records.push(StepRecord {
                step,
                t: p.t,
                residual,
                f_deviation: (p.t - (f0 - C::new(h * step as f64, 0.0))).norm(),
                pairing_drift: drift,
            });
        }
        Ok(Trajectory {
            end: p,
            frame: vecs,
            records,
        })
    }
}
