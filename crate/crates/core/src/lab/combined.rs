//! Flow-backed experiments on the `n = 3` family: the GC/torus moment consistency check and
//! the combined deformation-plus-degeneration concentration experiment.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gc_toric::GcToric;
use super::schedule::Schedule;
use crate::error::{invalid, Error, Result};
use crate::flag::{gc_map, random_flag_stream};
use crate::flow::{BundleElement, Family, FamilyPoint, FlowOptions, C};
use crate::toric::{
    section_log_density, LogMoments, PolytopeGrid, Quadratic, QuadratureOptions, TestFn,
};

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GcTorusCheck {
    pub t_small: f64,
    pub max_discrepancy: f64,
    pub discrepancies: Vec<f64>,
    /// Largest drift of the flow-invariant GC coordinates of the ambient moment matrix.
    pub conserved_drift: f64,
}

/// Flows `samples` random flags from `t = 1` through each value of `ts` (decreasing, in
/// `(0, 1]`) and compares the GC values at the start with the identified torus moment.
pub fn gc_vs_torus_trend(
    a: [f64; 2],
    ts: &[f64],
    samples: usize,
    seed: u64,
    h: f64,
) -> Result<Vec<GcTorusCheck>> {
    if ts.windows(2).any(|w| w[1] >= w[0]) || ts.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
        return Err(invalid("t values must be decreasing within (0, 1]"));
    }
    let fam = Family::new(a)?;
    let opts = FlowOptions::with_step(h);
    let per_sample: Vec<Vec<(f64, f64)>> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let v = random_flag_stream(3, seed, k);
            let gc = gc_map(&v, &a)?.to_point();
            let mut x = FamilyPoint::from_flag(&v, C::new(1.0, 0.0))?;
            let mut out = Vec::with_capacity(ts.len());
            for &t in ts {
                x = fam.flow(&x, x.t.re - t, &opts)?;
                out.push((
                    max_abs_diff(&gc, &fam.toric_gc(&x)),
                    max_abs_diff(&gc, &fam.gc_invariants(&x)),
                ));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(ts
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let discrepancies: Vec<f64> = per_sample.iter().map(|s| s[i].0).collect();
            GcTorusCheck {
                t_small: t,
                max_discrepancy: discrepancies.iter().copied().fold(0.0, f64::max),
                conserved_drift: per_sample.iter().map(|s| s[i].1).fold(0.0, f64::max),
                discrepancies,
            }
        })
        .collect())
}

pub fn gc_vs_torus_moment_check(
    a: [f64; 2],
    t_small: f64,
    samples: usize,
    seed: u64,
    h: f64,
) -> Result<GcTorusCheck> {
    if !(t_small > 0.0 && t_small <= 0.2) {
        return Err(invalid("t_small must lie in (0, 0.2]"));
    }
    Ok(gc_vs_torus_trend(a, &[t_small], samples, seed, h)?.remove(0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub n0: usize,
    pub rel_tol: f64,
    pub max_points: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            n0: 32,
            rel_tol: 1e-4,
            max_points: 1 << 21,
        }
    }
}

impl QuadratureConfig {
    pub fn options(&self) -> QuadratureOptions {
        QuadratureOptions {
            n0: self.n0,
            rel_tol: self.rel_tol,
            max_points: self.max_points,
            graded: true,
            ..QuadratureOptions::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub n: usize,
    pub a: Vec<i64>,
    /// Interior GC lattice point.
    pub m: Vec<i64>,
    /// Ambient lattice point over `m`; the first lift is used when absent.
    pub lift: Option<Vec<i64>>,
    /// Matrix of the quadratic deformer `nu` on GC coordinates.
    pub nu: Vec<Vec<f64>>,
    pub s_grid: Vec<f64>,
    pub eps: f64,
    pub schedule: Schedule,
    /// Chebyshev nodes per axis for the interpolated flow displacement.
    pub nodes: usize,
    /// Samples of the GC-torus angle not generated by the diagonal torus.
    pub angles: usize,
    pub h: f64,
    pub quadrature: QuadratureConfig,
    pub seed: u64,
    pub bundle_checks: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 3,
            a: vec![2, 2],
            m: vec![2, 3, 1],
            lift: None,
            nu: vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
            s_grid: vec![0.0, 5.0, 10.0, 20.0, 40.0],
            eps: 0.3,
            schedule: Schedule::default(),
            nodes: 8,
            angles: 4,
            h: 5e-3,
            quadrature: QuadratureConfig::default(),
            seed: 0,
            bundle_checks: 4,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n != 3 {
            return Err(invalid("the combined experiment is implemented for n = 3"));
        }
        if self.a.len() != 2 || self.m.len() != 3 {
            return Err(invalid(
                "need a = (a_1, a_2) and a GC point with three coordinates",
            ));
        }
        if self.s_grid.is_empty()
            || self.s_grid[0] < 0.0
            || self.s_grid.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(invalid(
                "s grid must be non-empty, non-negative and increasing",
            ));
        }
        if !(self.eps > 0.0) || !(self.h > 0.0) || self.nodes < 2 || self.angles == 0 {
            return Err(invalid("need eps > 0, h > 0, nodes >= 2 and angles >= 1"));
        }
        if self.bundle_checks > 10 {
            return Err(invalid("at most 10 bundle spot checks"));
        }
        self.schedule.validate()
    }

    fn nu(&self) -> Result<Quadratic> {
        let rows = self.nu.len();
        if rows != 3 || self.nu.iter().any(|r| r.len() != 3) {
            return Err(invalid("nu must be a 3x3 matrix"));
        }
        Quadratic::new(nalgebra::DMatrix::from_fn(3, 3, |i, j| self.nu[i][j]))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombinedRow {
    pub s: f64,
    pub t: f64,
    pub outside_mass: f64,
    /// Pairings with the test functions; the first (`one`) is the density normalised on the
    /// coarse grid and integrated on the fine grid, so it measures normalisation error.
    pub pairings: Vec<f64>,
    pub log_l1: f64,
    pub quadrature_rel_error: f64,
    /// Same quantities for the toric fiber `t = 0` at the same `s`.
    pub toric_outside_mass: f64,
    pub toric_pairings: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombinedReport {
    pub config: ExperimentConfig,
    pub lift: Vec<i64>,
    pub kernel: [i64; 4],
    pub adapted_basis: Vec<Vec<i64>>,
    pub test_names: Vec<String>,
    pub rows: Vec<CombinedRow>,
    pub failed_flows: usize,
    pub incomplete: bool,
    pub bundle_norm_drift: f64,
    pub bundle_holonomy_drift: f64,
}

impl CombinedReport {
    pub fn outside_mass_strictly_decreasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].outside_mass < w[0].outside_mass)
    }
}

fn chebyshev_nodes(k: usize) -> (Vec<f64>, Vec<f64>) {
    (0..k)
        .map(|i| {
            let th = PI * (2 * i + 1) as f64 / (2 * k) as f64;
            (
                0.5 * (1.0 - th.cos()),
                if i % 2 == 0 { th.sin() } else { -th.sin() },
            )
        })
        .unzip()
}

fn barycentric(nodes: &[f64], weights: &[f64], u: f64) -> Vec<f64> {
    if let Some(i) = nodes.iter().position(|&x| x == u) {
        let mut c = vec![0.0; nodes.len()];
        c[i] = 1.0;
        return c;
    }
    let mut c: Vec<f64> = nodes
        .iter()
        .zip(weights)
        .map(|(&x, &w)| w / (u - x))
        .collect();
    let s: f64 = c.iter().sum();
    c.iter_mut().for_each(|v| *v /= s);
    c
}

/// Tensor Chebyshev interpolant of vector data on the unit cube.
struct Interpolant {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Values indexed `[flat node][component]`, flat index `i0 * k^2 + i1 * k + i2`.
    values: Vec<[f64; 4]>,
}

impl Interpolant {
    fn eval(&self, u: &[f64]) -> [f64; 4] {
        let k = self.nodes.len();
        let c: Vec<Vec<f64>> = u
            .iter()
            .map(|&v| barycentric(&self.nodes, &self.weights, v))
            .collect();
        let mut out = [0.0; 4];
        for i0 in 0..k {
            for i1 in 0..k {
                let w01 = c[0][i0] * c[1][i1];
                for (i2, c2) in c[2].iter().enumerate() {
                    let w = w01 * c2;
                    let v = &self.values[(i0 * k + i1) * k + i2];
                    for (o, x) in out.iter_mut().zip(v) {
                        *o += w * x;
                    }
                }
            }
        }
        out
    }
}

fn log_mean_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + (v.iter().map(|x| (x - m).exp()).sum::<f64>() / v.len() as f64).ln()
}

fn normalised_pairings(m: &LogMoments) -> Vec<f64> {
    let mut out = vec![(m.log_total - m.log_total_coarse).exp()];
    out.extend_from_slice(&m.ratios[2..]);
    out
}

pub fn combined_experiment(cfg: &ExperimentConfig) -> Result<CombinedReport> {
    cfg.validate()?;
    let gct = GcToric::new([cfg.a[0], cfg.a[1]])?;
    let m_gc: Vec<f64> = cfg.m.iter().map(|&v| v as f64).collect();
    if !gct.gc_polytope().contains(&m_gc, true)? {
        return Err(invalid("m must be an interior GC lattice point"));
    }
    let lifts = gct.lifts(&cfg.m)?;
    let lift = match &cfg.lift {
        Some(l) if lifts.contains(l) => l.clone(),
        Some(_) => return Err(invalid("lift does not lie over m")),
        None => lifts
            .first()
            .cloned()
            .ok_or_else(|| invalid("m has no ambient lift"))?,
    };
    let lift_f: Vec<f64> = lift.iter().map(|&v| v as f64).collect();
    let nu = cfg.nu()?;
    let fam = gct.family();
    let grid = PolytopeGrid::new(gct.gc_polytope())?;
    let opts = cfg.quadrature.options();
    let flow_opts = FlowOptions::with_step(cfg.h);

    let t_of_s: Vec<f64> = cfg
        .s_grid
        .iter()
        .map(|&s| cfg.schedule.t(s))
        .collect::<Result<_>>()?;
    let mut checkpoints: Vec<f64> = t_of_s.iter().copied().filter(|&t| t > 0.0).collect();
    checkpoints.sort_by(f64::total_cmp);
    checkpoints.dedup();

    // Flow every interpolation node and angle from V_0 up through the checkpoints.
    let k = cfg.nodes;
    let (nodes, weights) = chebyshev_nodes(k);
    let node_u: Vec<[f64; 3]> = (0..k * k * k)
        .map(|f| [nodes[f / (k * k)], nodes[(f / k) % k], nodes[f % k]])
        .collect();
    let psis: Vec<f64> = (0..cfg.angles)
        .map(|j| j as f64 / cfg.angles as f64)
        .collect();
    // disp[node][angle][checkpoint]
    let flows: Vec<(Vec<Vec<[f64; 4]>>, usize)> = node_u
        .par_iter()
        .map(|u| {
            let (p, _) = grid.from_cube(u);
            let zero = vec![vec![[0.0; 4]; checkpoints.len()]; psis.len()];
            let Ok(x0) = gct.slice(&p).map(|s| s.x) else {
                return (zero, psis.len());
            };
            let mut failed = 0;
            let mut out = zero;
            for (j, &psi) in psis.iter().enumerate() {
                let Ok(mut y) = gct.v0_point(&x0, [0.0, psi, 0.0]) else {
                    failed += 1;
                    continue;
                };
                for (c, &t) in checkpoints.iter().enumerate() {
                    match fam.flow(&y, y.t.re - t, &flow_opts) {
                        Ok(next) => {
                            y = next;
                            let xm = fam.torus_moment(&y);
                            out[j][c] = std::array::from_fn(|i| xm[i] - x0[i]);
                        }
                        Err(_) => {
                            failed += 1;
                            break;
                        }
                    }
                }
            }
            (out, failed)
        })
        .collect();
    let failed_flows: usize = flows.iter().map(|f| f.1).sum();
    let interpolants: Vec<Vec<Interpolant>> = (0..checkpoints.len())
        .map(|c| {
            (0..psis.len())
                .map(|j| Interpolant {
                    nodes: nodes.clone(),
                    weights: weights.clone(),
                    values: flows.iter().map(|f| f.0[j][c]).collect(),
                })
                .collect()
        })
        .collect();

    let eps = cfg.eps;
    let m_ref = &m_gc;
    let one = |_: &[f64]| 1.0;
    let l11 = |p: &[f64]| p[0];
    let dist2 = |p: &[f64]| {
        p.iter()
            .zip(m_ref)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
    };
    let outside = |p: &[f64]| f64::from(u8::from(dist2(p).sqrt() > eps));
    let tests: [TestFn; 4] = [&outside, &one, &l11, &dist2];
    let test_names = vec!["one".to_string(), "lambda1_1".into(), "dist2".into()];

    let mut rows = Vec::with_capacity(cfg.s_grid.len());
    for (&s, &t) in cfg.s_grid.iter().zip(&t_of_s) {
        let g = gct.potential(s, nu.clone())?;
        let toric = |p: &[f64]| match gct.slice(p) {
            Ok(sp) => section_log_density(&g, &lift_f, &sp.x).unwrap_or(f64::NEG_INFINITY),
            Err(_) => f64::NEG_INFINITY,
        };
        let base = grid.log_moments(&toric, &tests, &opts)?;
        let flowed = if t > 0.0 {
            let c = checkpoints
                .iter()
                .position(|&v| v == t)
                .expect("checkpoint present");
            let interp = &interpolants[c];
            let f = |p: &[f64]| {
                let Ok(sp) = gct.slice(p) else {
                    return f64::NEG_INFINITY;
                };
                let u = grid.to_cube(p);
                let vals: Vec<f64> = interp
                    .iter()
                    .map(|ip| {
                        let d = ip.eval(&u);
                        let x: [f64; 4] = std::array::from_fn(|i| sp.x[i] + d[i]);
                        section_log_density(&g, &lift_f, &x).unwrap_or(f64::NEG_INFINITY)
                    })
                    .collect();
                log_mean_exp(&vals)
            };
            grid.log_moments(&f, &tests, &opts)?
        } else {
            base.clone()
        };
        rows.push(CombinedRow {
            s,
            t,
            outside_mass: flowed.ratios[0],
            pairings: normalised_pairings(&flowed),
            log_l1: flowed.log_total,
            quadrature_rel_error: flowed.rel_error,
            toric_outside_mass: base.ratios[0],
            toric_pairings: normalised_pairings(&base),
        });
    }

    let (bundle_norm_drift, bundle_holonomy_drift) =
        bundle_spot_check(&gct, &fam, &grid, &node_u, &checkpoints, cfg, &flow_opts)?;
    Ok(CombinedReport {
        config: cfg.clone(),
        lift,
        kernel: gct.kernel(),
        adapted_basis: gct.adapted_basis().u.clone(),
        test_names,
        rows,
        failed_flows,
        incomplete: failed_flows > 0,
        bundle_norm_drift,
        bundle_holonomy_drift,
    })
}

/// Transports a unit bundle element along the flow from `V_0` to the largest checkpoint on a
/// few nodes; returns the norm drift and the change in holonomy of the `lambda_1^1` circle.
fn bundle_spot_check(
    gct: &GcToric,
    fam: &Family,
    grid: &PolytopeGrid,
    node_u: &[[f64; 3]],
    checkpoints: &[f64],
    cfg: &ExperimentConfig,
    opts: &FlowOptions,
) -> Result<(f64, f64)> {
    let Some(&t_max) = checkpoints.last() else {
        return Ok((0.0, 0.0));
    };
    let mut idx: Vec<usize> = (0..node_u.len()).collect();
    idx.shuffle(&mut ChaCha20Rng::seed_from_u64(cfg.seed));
    let results: Vec<(f64, f64)> = idx
        .into_iter()
        .take(cfg.bundle_checks)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&i| {
            let (p, _) = grid.from_cube(&node_u[i]);
            let y0 = gct.v0_point(&gct.slice(&p)?.x, [0.0, 0.0, 0.0])?;
            let e = BundleElement {
                base: y0.clone(),
                value: C::new(1.0, 0.0),
            };
            let moved = fam.transport_along_flow(&e, -t_max, opts)?;
            let h0 = fam.loop_holonomy(&fam.torus_loop(&y0, [1, 0, 0], 128))?;
            let h1 = fam.loop_holonomy(&fam.torus_loop(&moved.base, [1, 0, 0], 128))?;
            Ok(((moved.norm() - 1.0).abs(), (h0 - h1).norm()))
        })
        .collect::<Result<_>>()
        .map_err(|e: Error| e)?;
    Ok(results
        .iter()
        .fold((0.0, 0.0), |acc, r| (acc.0.max(r.0), acc.1.max(r.1))))
}
