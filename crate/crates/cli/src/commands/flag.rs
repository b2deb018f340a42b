use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use gcq_core::flag::{
    deformed_pluecker, deformed_relation_n3, gc_map, pluecker_json, random_flag_stream,
    relation_scale_n3, write_gc_csv,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{load, parse_list, Overrides};
use crate::error::{usage, CliResult};
use crate::manifest::Run;

#[derive(Subcommand)]
pub enum FlagCmd {
    /// Random flags: GC values, (deformed) Pluecker coordinates and their checks.
    Sample(SampleArgs),
}

#[derive(Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse_list::<f64>)]
    pub a: Option<std::vec::Vec<f64>>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Deformation parameter `re,im` for the Pluecker coordinates.
    #[arg(long, value_parser = parse_list::<f64>)]
    pub t: Option<std::vec::Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleConfig {
    pub n: usize,
    pub a: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub t: [f64; 2],
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            n: 3,
            a: vec![1.0, 1.0],
            samples: 100,
            seed: 0,
            t: [1.0, 0.0],
        }
    }
}

pub fn run(cmd: &FlagCmd, out: &Path) -> CliResult<Vec<String>> {
    let FlagCmd::Sample(args) = cmd;
    let t_flag = match &args.t {
        Some(v) if v.len() == 1 => Some([v[0], 0.0]),
        Some(v) if v.len() == 2 => Some([v[0], v[1]]),
        Some(_) => return Err(usage("--t takes `re` or `re,im`")),
        None => None,
    };
    let mut o = Overrides::default();
    o.set("n", args.n)
        .set("a", args.a.clone())
        .set("samples", args.samples)
        .set("seed", args.seed)
        .set("t", t_flag);
    let cfg: SampleConfig = load(args.config.as_deref(), o, true)?;
    if cfg.n < 2 || cfg.a.len() != cfg.n - 1 || cfg.a.iter().any(|&x| !(x > 0.0)) {
        return Err(usage("need n >= 2 and n - 1 positive weights"));
    }
    let t = Complex64::new(cfg.t[0], cfg.t[1]);
    // Top row of the GC pattern: partial sums of the weights from the right.
    let top: Vec<f64> = (0..cfg.n)
        .map(|i| cfg.a[i.min(cfg.a.len())..].iter().sum())
        .collect();

    let rows: Vec<_> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|k| -> CliResult<_> {
            let v = random_flag_stream(cfg.n, cfg.seed, k);
            let gc = gc_map(&v, &cfg.a)?;
            let q = deformed_pluecker(&v, t)?;
            let rel = if cfg.n == 3 {
                deformed_relation_n3(&q, t)?.norm()
                    / relation_scale_n3(&q, t).max(f64::MIN_POSITIVE)
            } else {
                0.0
            };
            Ok((gc, pluecker_json(&q), rel))
        })
        .collect::<CliResult<_>>()?;

    let spectrum = rows
        .iter()
        .flat_map(|r| r.0.spectrum().iter().zip(&top).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    let interlacing = rows
        .iter()
        .map(|r| r.0.interlacing_violation())
        .fold(0.0, f64::max);
    let relation = rows.iter().map(|r| r.2).fold(0.0, f64::max);

    let mut run = Run::new(out, "flag sample")?;
    let gcs: Vec<_> = rows.iter().map(|r| r.0.clone()).collect();
    let mut csv = Vec::new();
    write_gc_csv(&gcs, &mut csv)?;
    run.write("gc.csv", &csv)?;
    run.write_json(
        "pluecker.json",
        &rows.iter().map(|r| &r.1).collect::<Vec<_>>(),
    )?;
    run.check_le("moment_spectrum_error", spectrum, 1e-10);
    run.check_le("interlacing_violation", interlacing, 1e-10);
    if cfg.n == 3 {
        run.check_le("deformed_relation_residual", relation, 1e-12);
    }
    println!("samples={} spectrum_error={spectrum:.3e} interlacing={interlacing:.3e} relation={relation:.3e}", cfg.samples);
    run.finish(&cfg, vec![cfg.seed])
}
