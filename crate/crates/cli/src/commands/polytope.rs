use std::path::Path;

use clap::{Args, Subcommand, ValueEnum};
use gcq_core::polytope::{gc_polytope, io, pluecker_polytope, weyl_dim, DelzantPolytope};
use serde::Serialize;

use crate::config::parse_list;
use crate::error::{usage, CliResult};
use crate::manifest::Run;

#[derive(Subcommand)]
pub enum PolytopeCmd {
    /// Write the polytope as JSON together with its lattice points.
    Gen(PolytopeArgs),
    /// Count lattice points and compare with the Weyl dimension.
    Count(PolytopeArgs),
    /// Write the lattice points as CSV.
    Lattice(PolytopeArgs),
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// The Gelfand-Cetlin polytope.
    Gc,
    /// The product of simplices that is the moment image of the Pluecker embedding.
    Pluecker,
}

#[derive(Args, Serialize)]
pub struct PolytopeArgs {
    #[arg(long)]
    pub n: usize,
    /// Positive weights a_1,...,a_{n-1}.
    #[arg(long, value_parser = parse_list::<i64>)]
    pub a: std::vec::Vec<i64>,
    #[arg(long, value_enum, default_value = "gc")]
    pub kind: Kind,
}

#[derive(Serialize)]
struct CountSummary {
    lattice: usize,
    weyl: Option<u128>,
    matches: Option<bool>,
}

fn build(args: &PolytopeArgs) -> CliResult<DelzantPolytope> {
    if args.a.iter().any(|&x| x <= 0) {
        return Err(usage("weights in --a must be positive"));
    }
    Ok(match args.kind {
        Kind::Gc => gc_polytope(args.n, &args.a)?,
        Kind::Pluecker => pluecker_polytope(args.n, &args.a)?,
    })
}

pub fn run(cmd: &PolytopeCmd, out: &Path) -> CliResult<Vec<String>> {
    let (name, args) = match cmd {
        PolytopeCmd::Gen(a) => ("polytope gen", a),
        PolytopeCmd::Count(a) => ("polytope count", a),
        PolytopeCmd::Lattice(a) => ("polytope lattice", a),
    };
    let p = build(args)?;
    let pts = p.lattice_points()?;
    let mut run = Run::new(out, name)?;
    // The Weyl dimension counts lattice points of the GC polytope only.
    let weyl = match args.kind {
        Kind::Gc => {
            let top: Vec<i64> = (0..args.n)
                .map(|i| args.a[i.min(args.a.len())..].iter().sum())
                .collect();
            Some(weyl_dim(&top)?)
        }
        Kind::Pluecker => None,
    };
    let matches = weyl.map(|w| w == pts.len() as u128);
    match cmd {
        PolytopeCmd::Gen(_) => {
            run.write("polytope.json", format!("{}\n", io::to_json(&p)).as_bytes())?;
            write_lattice(&mut run, &p, &pts)?;
        }
        PolytopeCmd::Lattice(_) => write_lattice(&mut run, &p, &pts)?,
        PolytopeCmd::Count(_) => run.write_json(
            "count.json",
            &CountSummary {
                lattice: pts.len(),
                weyl,
                matches,
            },
        )?,
    }
    match (weyl, matches) {
        (Some(w), Some(m)) => {
            println!("lattice={} weyl={w} match={m}", pts.len());
            run.check("lattice_equals_weyl_dimension", m);
        }
        _ => println!("lattice={}", pts.len()),
    }
    run.finish(args, vec![])
}

fn write_lattice(run: &mut Run, p: &DelzantPolytope, pts: &[Vec<i64>]) -> CliResult<()> {
    let mut buf = Vec::new();
    io::write_lattice_csv(&p.labels, pts, &mut buf)?;
    run.write("lattice.csv", &buf)
}
