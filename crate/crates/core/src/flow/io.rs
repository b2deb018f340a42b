//! Flow run configuration, report and trajectory log.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{Family, FamilyPoint, FlowOptions, FrameTransport, StepRecord, C};
use crate::error::{invalid, Error, Result};
use crate::flag::random_flag;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowConfig {
    pub a: Vec<f64>,
    pub t_start: f64,
    pub t_end: f64,
    pub h: f64,
    pub seed: u64,
    pub n_frames: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            a: vec![1.0, 1.0],
            t_start: 1.0,
            t_end: 0.5,
            h: 1e-3,
            seed: 0,
            n_frames: 6,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if self.a.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: self.a.len(),
            });
        }
        if !(self.h > 0.0) || self.n_frames > 6 {
            return Err(invalid("need h > 0 and at most 6 frame vectors"));
        }
        if !(self.t_start > 0.0 && self.t_end > 0.0) {
            return Err(invalid("the flow is run between regular fibers t > 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowReport {
    pub config: FlowConfig,
    pub steps: usize,
    pub t_final: [f64; 2],
    /// `|f(end) - (f(start) - tau)|`.
    pub f_deviation: f64,
    pub max_residual: f64,
    /// Largest `|Re Z(f) + 1|` and `|Im Z(f)|` sampled along the trajectory.
    pub z_re_f_error: f64,
    pub z_im_f_error: f64,
    pub pairing_drift: f64,
    /// Drift of the conserved GC coordinates of the ambient moment matrix.
    pub gc_drift: f64,
    /// Distance between the GC values at the start and the toric identification at the end.
    pub phi_approx_distance: f64,
    #[serde(skip)]
    pub records: Vec<StepRecord>,
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn run_flow(cfg: &FlowConfig) -> Result<FlowReport> {
    cfg.validate()?;
    let fam = Family::new([cfg.a[0], cfg.a[1]])?;
    let x0 = FamilyPoint::from_flag(&random_flag(3, cfg.seed), C::new(cfg.t_start, 0.0))?;
    let frame: Vec<_> = fam
        .fiber_tangent_space(&x0)?
        .into_iter()
        .take(cfg.n_frames)
        .collect();
    let tau = cfg.t_start - cfg.t_end;
    let opts = FlowOptions::with_step(cfg.h);
    let traj = fam.transport_frame(&x0, &frame, tau, &opts, FrameTransport::Heun)?;
    // Z(f) sampled at every tenth step along the integrated path, replayed cheaply.
    let mut z_re: f64 = 0.0;
    let mut z_im: f64 = 0.0;
    let n = traj.records.len();
    let mut p = x0.clone();
    for k in 0..=n {
        if k % 10 == 0 || k == n {
            let z = fam.grad_ham_field(&p)?;
            z_re = z_re.max((z[6].re + 1.0).abs());
            z_im = z_im.max(z[6].im.abs());
        }
        if k < n {
            p = fam.rk4_step(&p, tau / n as f64, &opts)?.0;
        }
    }
    let end = &traj.end;
    let gc0 = fam.gc_invariants(&x0);
    Ok(FlowReport {
        config: cfg.clone(),
        steps: n,
        t_final: [end.t.re, end.t.im],
        f_deviation: (end.t - C::new(cfg.t_end, 0.0)).norm(),
        max_residual: traj.max_residual(),
        z_re_f_error: z_re,
        z_im_f_error: z_im,
        pairing_drift: traj.max_pairing_drift(),
        gc_drift: max_abs_diff(&gc0, &fam.gc_invariants(end)),
        phi_approx_distance: max_abs_diff(&gc0, &fam.toric_gc(end)),
        records: traj.records,
    })
}

pub fn write_trajectory_csv<W: Write>(records: &[StepRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| invalid(format!("csv: {e}"));
    w.write_record(["step", "t", "residual", "f_deviation", "pairing_drift_max"])
        .map_err(io)?;
    for r in records {
        w.write_record([
            r.step.to_string(),
            format!("{:.16e}", r.t.re),
            format!("{:.16e}", r.residual),
            format!("{:.16e}", r.f_deviation),
            format!("{:.16e}", r.pairing_drift),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| invalid(format!("io: {e}")))?;
    Ok(())
}
