//! Delta-concentration of normalised monomial sections on a toric manifold.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::toric::{
    delta_pairings, outside_mass, restricted_distance, section_log_density, PolytopeGrid,
    QuadratureOptions, SymplecticPotential, TestFn,
};

/// Extreme eigenvalues of `Hess nu` at `iota^* m`.
pub fn deformer_eigen_range(g: &SymplecticPotential, m: &[f64]) -> (f64, f64) {
    let h = g.deformer().hessian(&g.restrict(m));
    let ev = nalgebra::SymmetricEigen::new(h).eigenvalues;
    (ev.min(), ev.max())
}

/// Sharp quadratic constants: `C_1 = lambda_min / 2`, `C_2 = lambda_max / 2`.
pub fn concentration_constants(g: &SymplecticPotential, m: &[f64]) -> (f64, f64) {
    let (lo, hi) = deformer_eigen_range(g, m);
    (0.5 * lo, 0.5 * hi)
}

/// Predicted exponential decay rate in `s` of the mass outside the `eps`-ball.
pub fn slope_target(g: &SymplecticPotential, m: &[f64], eps: f64) -> f64 {
    -2.0 * PI * concentration_constants(g, m).0 * eps * eps
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupEstimate {
    pub value: f64,
    /// Supremum of the pointwise bound `-alpha_m <= nu(iota^* m) - C_1 |iota^* x - iota^* m|^2`.
    pub bound: f64,
    pub points_outside: usize,
}

/// Maximum of the L1-normalised density over midpoint-grid nodes outside the `eps`-ball.
pub fn concentration_sup(
    g: &SymplecticPotential,
    m: &[f64],
    eps: f64,
    nodes_per_axis: usize,
    opts: &QuadratureOptions,
) -> Result<SupEstimate> {
    if eps <= 0.0 || nodes_per_axis == 0 {
        return Err(invalid("need eps > 0 and a non-empty grid"));
    }
    let log_l1 = crate::toric::l1_norm(g, m, opts)?.log_total;
    let g0 = g.with_s(0.0);
    let grid = PolytopeGrid::new(g.polytope())?;
    let d = grid.dim();
    let (c1, _) = concentration_constants(g, m);
    let nu_m = g.deformer().value(&g.restrict(m));
    let mut best = f64::NEG_INFINITY;
    let mut bound = f64::NEG_INFINITY;
    let mut count = 0;
    let total = nodes_per_axis.pow(d as u32);
    let mut u = vec![0.0; d];
    for flat in 0..total {
        let mut r = flat;
        for uk in u.iter_mut() {
            *uk = ((r % nodes_per_axis) as f64 + 0.5) / nodes_per_axis as f64;
            r /= nodes_per_axis;
        }
        let (x, _) = grid.from_cube(&u);
        let dist = restricted_distance(g, m, &x);
        if dist <= eps {
            continue;
        }
        count += 1;
        best = best.max(section_log_density(g, m, &x)? - log_l1);
        let b = section_log_density(&g0, m, &x)? + 2.0 * PI * g.s() * (nu_m - c1 * dist * dist);
        bound = bound.max(b - log_l1);
    }
    if count == 0 {
        return Err(invalid("no grid node outside the ball"));
    }
    Ok(SupEstimate {
        value: best.exp(),
        bound: bound.exp(),
        points_outside: count,
    })
}

/// `int phi |sigma^m| / int |sigma^m|`.
pub fn delta_pairing(
    g: &SymplecticPotential,
    m: &[f64],
    phi: TestFn,
    opts: &QuadratureOptions,
) -> Result<f64> {
    Ok(delta_pairings(g, m, &[phi], opts)?.ratios[0])
}

/// Least-squares slope and intercept of `ln y` against `s`, over positive finite `y`.
pub fn fit_log_slope(s: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = s
        .iter()
        .zip(y)
        .filter(|(_, &v)| v > 0.0 && v.is_finite())
        .map(|(&a, &b)| (a, b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (ms, ml) = (
        pts.iter().map(|p| p.0).sum::<f64>() / n,
        pts.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let sxx: f64 = pts.iter().map(|p| (p.0 - ms).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - ms) * (p.1 - ml)).sum();
    let slope = sxy / sxx;
    Some((slope, ml - slope * ms))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub s: f64,
    pub outside_mass: f64,
    pub sup_outside: f64,
    pub sup_bound: f64,
    pub pairings: Vec<f64>,
    pub log_l1: f64,
    pub quadrature_rel_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub m: Vec<f64>,
    pub eps: f64,
    pub test_names: Vec<String>,
    pub rows: Vec<ConcentrationRow>,
    /// Fitted `d ln(outside mass) / ds` over rows with `s > 0`.
    pub slope: Option<f64>,
    pub slope_target: f64,
}

impl ConcentrationReport {
    pub fn outside_mass_non_increasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].outside_mass <= w[0].outside_mass)
    }
}

/// Options for the outside-mass ratio: a discontinuous test converges at first order, so
/// the grid is refined on the ratio as well.
pub fn outside_mass_options(base: &QuadratureOptions) -> QuadratureOptions {
    QuadratureOptions {
        ratio_rel_tol: base.ratio_rel_tol.min(1e-3),
        ..*base
    }
}

/// Runs the toric concentration experiment over an increasing `s` grid.
pub fn concentration_report(
    base: &SymplecticPotential,
    m: &[f64],
    eps: f64,
    s_grid: &[f64],
    tests: &[(String, TestFn)],
    sup_nodes: usize,
    opts: &QuadratureOptions,
) -> Result<ConcentrationReport> {
    if s_grid.windows(2).any(|w| w[1] <= w[0]) || s_grid.first().is_some_and(|&s| s < 0.0) {
        return Err(invalid("s grid must be increasing and non-negative"));
    }
    if !base.polytope().contains(m, true)? {
        return Err(Error::OutsideInterior {
            min_facet_value: 0.0,
        });
    }
    let fns: Vec<TestFn> = tests.iter().map(|t| t.1).collect();
    let mass_opts = outside_mass_options(opts);
    let mut rows = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let g = base.with_s(s);
        let moments = delta_pairings(&g, m, &fns, opts)?;
        let sup = concentration_sup(&g, m, eps, sup_nodes, opts)?;
        rows.push(ConcentrationRow {
            s,
            outside_mass: outside_mass(&g, m, eps, &mass_opts)?,
            sup_outside: sup.value,
            sup_bound: sup.bound,
            pairings: moments.ratios,
            log_l1: moments.log_total,
            quadrature_rel_error: moments.rel_error,
        });
    }
    let (s, mass): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.s > 0.0)
        .map(|r| (r.s, r.outside_mass))
        .unzip();
    Ok(ConcentrationReport {
        m: m.to_vec(),
        eps,
        test_names: tests.iter().map(|t| t.0.clone()).collect(),
        slope: fit_log_slope(&s, &mass).map(|f| f.0),
        slope_target: slope_target(base, m, eps),
        rows,
    })
}
