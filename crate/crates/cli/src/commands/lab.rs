use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use gcq_core::lab::{
    calibrate_adaptive, combined_experiment, gc_vs_torus_trend, write_combined_csv,
    ExperimentConfig, GcToric, SLICE_TOL,
};
use serde::{Deserialize, Serialize};

use crate::config::{load, parse_list, Overrides};
use crate::error::{usage, CliResult};
use crate::manifest::Run;

#[derive(Subcommand)]
pub enum LabCmd {
    /// Flowed sections on the flag manifold against the toric baseline over an s grid.
    Combined(CombinedArgs),
    /// Discrepancy between GC values and the torus moment after flowing to small t.
    GcCheck(GcCheckArgs),
    /// Build an adaptive schedule from measured GC/torus discrepancies.
    Calibrate(GcCheckArgs),
    /// Point of the toric fiber over a GC point.
    Slice(SliceArgs),
}

#[derive(Args)]
pub struct CombinedArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_list::<f64>)]
    pub s: Option<std::vec::Vec<f64>>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub angles: Option<usize>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args)]
pub struct GcCheckArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_list::<f64>)]
    pub a: Option<std::vec::Vec<f64>>,
    /// Decreasing values of t in (0, 1].
    #[arg(long, value_parser = parse_list::<f64>)]
    pub t: Option<std::vec::Vec<f64>>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub h: Option<f64>,
}

#[derive(Args, Serialize)]
pub struct SliceArgs {
    #[arg(long, value_parser = parse_list::<i64>)]
    pub a: std::vec::Vec<i64>,
    /// GC point `lambda1_1,lambda2_1,lambda2_2`.
    #[arg(long, value_parser = parse_list::<f64>)]
    pub p: std::vec::Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GcCheckConfig {
    pub a: [f64; 2],
    pub t: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub h: f64,
    /// Windows of the adaptive schedule (calibration only).
    pub windows: usize,
}

impl Default for GcCheckConfig {
    fn default() -> Self {
        Self {
            a: [1.0, 1.0],
            t: vec![0.5, 0.1, 0.02],
            samples: 20,
            seed: 0,
            h: 1e-3,
            windows: 4,
        }
    }
}

pub fn run(cmd: &LabCmd, out: &Path) -> CliResult<Vec<String>> {
    match cmd {
        LabCmd::Combined(args) => combined(args, out),
        LabCmd::GcCheck(args) => gc_check(args, out, false),
        LabCmd::Calibrate(args) => gc_check(args, out, true),
        LabCmd::Slice(args) => slice(args, out),
    }
}

fn combined(args: &CombinedArgs, out: &Path) -> CliResult<Vec<String>> {
    let mut o = Overrides::default();
    o.set("s_grid", args.s.clone())
        .set("eps", args.eps)
        .set("nodes", args.nodes)
        .set("angles", args.angles)
        .set("h", args.h)
        .set("seed", args.seed);
    let cfg: ExperimentConfig = load(args.config.as_deref(), o, true)?;
    let r = combined_experiment(&cfg)?;

    let mut run = Run::new(out, "lab combined")?;
    let mut csv = Vec::new();
    write_combined_csv(&r, &mut csv)?;
    run.write("combined.csv", &csv)?;
    run.write_json("report.json", &r)?;
    run.check("flows_complete", !r.incomplete);
    run.check(
        "outside_mass_strictly_decreasing",
        r.outside_mass_strictly_decreasing(),
    );
    let one = r
        .rows
        .iter()
        .map(|row| (row.pairings[0] - 1.0).abs())
        .fold(0.0, f64::max);
    run.check_le("unit_pairing_error", one, 1e-3);
    for row in &r.rows {
        println!(
            "s={:.3} t={:.6e} outside_mass={:.6e} toric={:.6e}",
            row.s, row.t, row.outside_mass, row.toric_outside_mass
        );
    }
    run.finish(&cfg, vec![cfg.seed])
}

fn gc_check(args: &GcCheckArgs, out: &Path, calibrate: bool) -> CliResult<Vec<String>> {
    let a = match &args.a {
        Some(v) if v.len() == 2 => Some([v[0], v[1]]),
        Some(_) => return Err(usage("--a takes two weights")),
        None => None,
    };
    let mut o = Overrides::default();
    o.set("a", a)
        .set("t", args.t.clone())
        .set("samples", args.samples)
        .set("seed", args.seed)
        .set("h", args.h);
    let cfg: GcCheckConfig = load(args.config.as_deref(), o, true)?;
    let rows = gc_vs_torus_trend(cfg.a, &cfg.t, cfg.samples, cfg.seed, cfg.h)?;

    let name = if calibrate {
        "lab calibrate"
    } else {
        "lab gc-check"
    };
    let mut run = Run::new(out, name)?;
    let mut csv = String::from("t,max_discrepancy,conserved_drift\n");
    for r in &rows {
        csv.push_str(&format!(
            "{:.16e},{:.16e},{:.16e}\n",
            r.t_small, r.max_discrepancy, r.conserved_drift
        ));
        println!("t={:.6e} discrepancy={:.6e}", r.t_small, r.max_discrepancy);
    }
    run.write("gc_check.csv", csv.as_bytes())?;
    run.write_json("report.json", &rows)?;
    let drift = rows.iter().map(|r| r.conserved_drift).fold(0.0, f64::max);
    run.check_le("conserved_gc_drift", drift, 1e-9);
    if calibrate {
        let measured: Vec<f64> = rows.iter().map(|r| r.max_discrepancy).collect();
        let cal = calibrate_adaptive(&cfg.t, &measured, cfg.windows)?;
        run.write_json("schedule.json", &cal.schedule)?;
        run.write_json("calibration.json", &cal)?;
        run.check("all_windows_met", cal.unmet.is_empty());
    } else {
        run.check(
            "discrepancy_decreasing",
            rows.windows(2)
                .all(|w| w[1].max_discrepancy < w[0].max_discrepancy),
        );
    }
    run.finish(&cfg, vec![cfg.seed])
}

fn slice(args: &SliceArgs, out: &Path) -> CliResult<Vec<String>> {
    let a: [i64; 2] = args
        .a
        .as_slice()
        .try_into()
        .map_err(|_| usage("--a takes two weights"))?;
    if args.p.len() != 3 {
        return Err(usage("--p takes three GC coordinates"));
    }
    let gct = GcToric::new(a)?;
    if !gct.gc_polytope().contains(&args.p, false)? {
        return Err(usage("--p lies outside the GC polytope"));
    }
    let sp = gct.slice(&args.p)?;
    let mut run = Run::new(out, "lab slice")?;
    run.write_json("slice.json", &sp)?;
    run.check_le("slice_residual", sp.residual, SLICE_TOL);
    println!(
        "x={} iterations={} residual={:.3e}",
        sp.x.iter()
            .map(|v| format!("{v:.16e}"))
            .collect::<Vec<_>>()
            .join(","),
        sp.iterations,
        sp.residual
    );
    run.finish(args, vec![])
}
