use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Subcommand};
use gcq_core::lab::{concentration_report, write_concentration_csv, ConcentrationReport};
use gcq_core::polytope::{gc_polytope, interval, io, pluecker_polytope, simplex, DelzantPolytope};
use gcq_core::toric::{
    section_log_density, PolytopeGrid, Quadratic, QuadratureOptions, SymplecticPotential, TestFn,
};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::config::{load, parse_list, Overrides};
use crate::error::{usage, CliResult};
use crate::manifest::Run;

type Coordinate = Box<dyn Fn(&[f64]) -> f64 + Sync>;

#[derive(Subcommand)]
pub enum ToricCmd {
    /// Outside-mass and pairings of the normalised section over an s grid.
    Concentrate(ConcentrateArgs),
}

#[derive(Args)]
pub struct ConcentrateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `lo..hi`, `simplex:DIM:SCALE`, `gc:N:A1,A2,..`, `pluecker:N:A1,..` or `file:PATH`.
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long, value_parser = parse_list::<f64>)]
    pub m: Option<std::vec::Vec<f64>>,
    #[arg(long, value_parser = parse_list::<f64>)]
    pub s: Option<std::vec::Vec<f64>>,
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToricQuadrature {
    pub n0: usize,
    pub rel_tol: f64,
    pub max_points: usize,
}

impl Default for ToricQuadrature {
    fn default() -> Self {
        let d = QuadratureOptions::default();
        Self {
            n0: d.n0,
            rel_tol: d.rel_tol,
            max_points: d.max_points,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConcentrateConfig {
    pub delta: String,
    pub m: Vec<f64>,
    pub s: Vec<f64>,
    pub eps: f64,
    /// Symmetric positive definite matrix of the quadratic deformer; identity when absent.
    pub nu: Option<Vec<Vec<f64>>>,
    /// Integral restriction matrix applied before the deformer; identity when absent.
    pub restriction: Option<Vec<Vec<i64>>>,
    /// Grid nodes per axis for the supremum estimate.
    pub sup_nodes: usize,
    /// Nodes per axis of the density profile written for one- and two-dimensional polytopes.
    pub profile_nodes: usize,
    pub quadrature: ToricQuadrature,
}

impl Default for ConcentrateConfig {
    fn default() -> Self {
        Self {
            delta: "0..3".into(),
            m: vec![1.0],
            s: vec![0.0, 10.0, 20.0, 40.0],
            eps: 0.3,
            nu: None,
            restriction: None,
            sup_nodes: 64,
            profile_nodes: 200,
            quadrature: ToricQuadrature::default(),
        }
    }
}

fn ints(s: &str) -> CliResult<Vec<i64>> {
    parse_list::<i64>(s).map_err(usage)
}

pub fn parse_delta(spec: &str) -> CliResult<DelzantPolytope> {
    let bad = || usage(format!("cannot parse polytope {spec:?}"));
    if let Some(path) = spec.strip_prefix("file:") {
        let text =
            std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {path}: {e}")))?;
        return Ok(io::from_json(&text)?);
    }
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo = lo.trim().parse().map_err(|_| bad())?;
        let hi = hi.trim().parse().map_err(|_| bad())?;
        return Ok(interval(lo, hi)?);
    }
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["simplex", d, k] => Ok(simplex(
            d.parse().map_err(|_| bad())?,
            k.parse().map_err(|_| bad())?,
        )?),
        ["gc", n, a] => Ok(gc_polytope(n.parse().map_err(|_| bad())?, &ints(a)?)?),
        ["pluecker", n, a] => Ok(pluecker_polytope(n.parse().map_err(|_| bad())?, &ints(a)?)?),
        _ => Err(bad()),
    }
}

fn potential(cfg: &ConcentrateConfig) -> CliResult<SymplecticPotential> {
    let p = parse_delta(&cfg.delta)?;
    p.check_delzant()?;
    let d = p.dim;
    let restriction = cfg.restriction.clone().unwrap_or_else(|| {
        (0..d)
            .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
            .collect()
    });
    let k = restriction.len();
    let nu = match &cfg.nu {
        None => Quadratic::identity(k),
        Some(rows) => {
            if rows.len() != k || rows.iter().any(|r| r.len() != k) {
                return Err(usage(format!("nu must be a {k}x{k} matrix")));
            }
            Quadratic::new(DMatrix::from_fn(k, k, |i, j| rows[i][j]))?
        }
    };
    Ok(SymplecticPotential::with_deformer(
        p,
        0.0,
        restriction,
        Arc::new(nu),
    )?)
}

/// Gnuplot data: one block per `s` (separated by two blank lines) of the L1-normalised
/// density; two-dimensional polytopes are written as scan lines for `splot`.
fn density_profile(
    g: &SymplecticPotential,
    r: &ConcentrationReport,
    nodes: usize,
) -> CliResult<Option<String>> {
    let d = g.dim();
    if d > 2 || nodes == 0 {
        return Ok(None);
    }
    let grid = PolytopeGrid::new(g.polytope())?;
    let mut out = String::new();
    for row in &r.rows {
        let gs = g.with_s(row.s);
        writeln!(out, "# s = {:.16e}", row.s).expect("string write");
        let lines = if d == 1 { 1 } else { nodes };
        for i in 0..lines {
            for j in 0..nodes {
                let mut u = vec![(j as f64 + 0.5) / nodes as f64];
                if d == 2 {
                    u.insert(0, (i as f64 + 0.5) / nodes as f64);
                }
                let (x, _) = grid.from_cube(&u);
                let l = section_log_density(&gs, &r.m, &x)?;
                let coords: Vec<String> = x.iter().map(|v| format!("{v:.16e}")).collect();
                writeln!(out, "{} {:.16e}", coords.join(" "), (l - row.log_l1).exp())
                    .expect("string write");
            }
            if d == 2 {
                out.push('\n');
            }
        }
        out.push_str("\n\n");
    }
    Ok(Some(out))
}

pub fn run(cmd: &ToricCmd, out: &Path) -> CliResult<Vec<String>> {
    let ToricCmd::Concentrate(args) = cmd;
    let mut o = Overrides::default();
    o.set("delta", args.delta.clone())
        .set("m", args.m.clone())
        .set("s", args.s.clone())
        .set("eps", args.eps);
    let cfg: ConcentrateConfig = load(args.config.as_deref(), o, false)?;
    let g = potential(&cfg)?;
    let opts = QuadratureOptions {
        n0: cfg.quadrature.n0,
        rel_tol: cfg.quadrature.rel_tol,
        max_points: cfg.quadrature.max_points,
        ..QuadratureOptions::default()
    };
    let coords: Vec<Coordinate> = (0..g.dim())
        .map(|i| Box::new(move |x: &[f64]| x[i]) as Coordinate)
        .collect();
    let tests: Vec<(String, TestFn)> = g
        .polytope()
        .labels
        .iter()
        .cloned()
        .zip(coords.iter().map(|f| &**f as TestFn))
        .collect();
    let r = concentration_report(&g, &cfg.m, cfg.eps, &cfg.s, &tests, cfg.sup_nodes, &opts)?;

    let mut run = Run::new(out, "toric concentrate")?;
    let mut csv = Vec::new();
    write_concentration_csv(&r, &mut csv)?;
    run.write("concentration.csv", &csv)?;
    if let Some(text) = density_profile(&g, &r, cfg.profile_nodes)? {
        run.write("density.dat", text.as_bytes())?;
    }
    run.check(
        "outside_mass_non_increasing",
        r.outside_mass_non_increasing(),
    );
    let excess = r
        .rows
        .iter()
        .map(|row| (row.sup_outside - row.sup_bound) / row.sup_bound.abs().max(f64::MIN_POSITIVE))
        .fold(f64::NEG_INFINITY, f64::max);
    run.check_le("sup_outside_within_pointwise_bound", excess, 1e-12);
    run.write_json(
        "summary.json",
        &serde_json::json!({
            "config": cfg,
            "slope": r.slope,
            "slope_target": r.slope_target,
            "checks": run.checks(),
            "report": r,
        }),
    )?;
    match r.slope {
        Some(sl) => println!("slope={sl:.6} target={:.6}", r.slope_target),
        None => println!("slope=none target={:.6}", r.slope_target),
    }
    run.finish(&cfg, vec![])
}
