use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use gcq_core::flow::{run_flow, write_trajectory_csv, FlowConfig};

use crate::config::{load, parse_list, Overrides};
use crate::error::CliResult;
use crate::manifest::Run;

#[derive(Subcommand)]
pub enum FlowCmd {
    /// Integrate the gradient-Hamiltonian flow between two fibers of the n = 3 family.
    Run(RunArgs),
}

#[derive(Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_list::<f64>)]
    pub a: Option<std::vec::Vec<f64>>,
    /// Starting fiber.
    #[arg(long)]
    pub t1: Option<f64>,
    /// Target fiber.
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of fiber tangent vectors transported alongside (at most 6).
    #[arg(long)]
    pub frames: Option<usize>,
}

pub fn run(cmd: &FlowCmd, out: &Path) -> CliResult<Vec<String>> {
    let FlowCmd::Run(args) = cmd;
    let mut o = Overrides::default();
    o.set("a", args.a.clone())
        .set("t_start", args.t1)
        .set("t_end", args.t0)
        .set("h", args.h)
        .set("seed", args.seed)
        .set("n_frames", args.frames);
    let cfg: FlowConfig = load(args.config.as_deref(), o, true)?;
    let report = run_flow(&cfg)?;

    let mut run = Run::new(out, "flow run")?;
    let mut csv = Vec::new();
    write_trajectory_csv(&report.records, &mut csv)?;
    run.write("trajectory.csv", &csv)?;
    run.write_json("report.json", &report)?;
    run.check_le("f_deviation", report.f_deviation, 1e-6);
    run.check_le("constraint_residual", report.max_residual, 1e-10);
    run.check_le("z_re_f_error", report.z_re_f_error, 1e-8);
    run.check_le("z_im_f_error", report.z_im_f_error, 1e-8);
    run.check_le("pairing_drift", report.pairing_drift, 1e-6);
    run.check_le("gc_invariant_drift", report.gc_drift, 1e-9);
    println!(
        "steps={} f_deviation={:.3e} pairing_drift={:.3e} gc_drift={:.3e}",
        report.steps, report.f_deviation, report.pairing_drift, report.gc_drift
    );
    run.finish(&cfg, vec![cfg.seed])
}
