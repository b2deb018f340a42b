//! Toric Kähler geometry on a Delzant polytope: symplectic potentials, the complex
//! coordinates they induce, monomial sections, their norms and the holonomy of the
//! prequantum connection.

mod coords;
mod holonomy;
mod potential;
mod quadrature;
mod sections;

use std::io::Write;

pub use coords::{
    complex_to_moment, moment_to_complex, solve_gradient, ComplexCoord, NEWTON_MAX_ITER, NEWTON_TOL,
};
pub use holonomy::{holonomy, is_bohr_sommerfeld, loop_holonomy, BS_TOL};
pub use potential::{DeformerSpec, PotentialSpec, Quadratic, SmoothFunction, SymplecticPotential};
pub use quadrature::{LogMoments, PolytopeGrid, QuadratureOptions, TestFn};
pub use sections::{
    alpha_m, section_log_density, section_log_density_direct, sigma_m_complex, sigma_m_homogeneous,
};

use crate::error::{invalid, Result};

/// `log int_Delta |sigma^m|` with the torus factor normalised to one.
pub fn l1_norm(g: &SymplecticPotential, m: &[f64], opts: &QuadratureOptions) -> Result<LogMoments> {
    g.check_dim(m)?;
    let grid = PolytopeGrid::new(g.polytope())?;
    let f = |x: &[f64]| section_log_density(g, m, x).unwrap_or(f64::NEG_INFINITY);
    grid.log_moments(&f, &[], opts)
}

/// Distance between `iota^* x` and `iota^* m`.
pub fn restricted_distance(g: &SymplecticPotential, m: &[f64], x: &[f64]) -> f64 {
    let (a, b) = (g.restrict(x), g.restrict(m));
    a.iter()
        .zip(&b)
        .map(|(u, v)| (u - v).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Pairings `int phi |sigma^m| / int |sigma^m|` for several test functions at once.
pub fn delta_pairings(
    g: &SymplecticPotential,
    m: &[f64],
    tests: &[TestFn],
    opts: &QuadratureOptions,
) -> Result<LogMoments> {
    g.check_dim(m)?;
    let grid = PolytopeGrid::new(g.polytope())?;
    let f = |x: &[f64]| section_log_density(g, m, x).unwrap_or(f64::NEG_INFINITY);
    grid.log_moments(&f, tests, opts)
}

/// Fraction of the L1 mass of `sigma^m` outside the `eps`-ball around `iota^* m`.
pub fn outside_mass(
    g: &SymplecticPotential,
    m: &[f64],
    eps: f64,
    opts: &QuadratureOptions,
) -> Result<f64> {
    if eps <= 0.0 {
        return Err(invalid("eps must be positive"));
    }
    let outside = |x: &[f64]| f64::from(u8::from(restricted_distance(g, m, x) > eps));
    Ok(delta_pairings(g, m, &[&outside], opts)?.ratios[0])
}

/// Writes `x_1..x_d, log_density, density` rows for the given points.
pub fn write_density_csv<W: Write>(
    g: &SymplecticPotential,
    m: &[f64],
    points: &[Vec<f64>],
    w: W,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let err = |e: csv::Error| invalid(e.to_string());
    let mut header = g.polytope().labels.clone();
    header.push("log_density".into());
    header.push("density".into());
    out.write_record(&header).map_err(err)?;
    for x in points {
        let l = section_log_density(g, m, x)?;
        let mut row: Vec<String> = x.iter().map(|v| format!("{v:.16e}")).collect();
        row.push(format!("{l:.16e}"));
        row.push(format!("{:.16e}", l.exp()));
        out.write_record(&row).map_err(err)?;
    }
    out.flush().map_err(|e| invalid(e.to_string()))
}
