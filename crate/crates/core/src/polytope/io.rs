//! JSON and CSV forms of polytopes and lattice point lists.

use std::io::Write;

use super::DelzantPolytope;
use crate::error::{invalid, Result};

pub fn to_json(p: &DelzantPolytope) -> String {
    serde_json::to_string_pretty(p).expect("polytope serializes")
}

pub fn from_json(s: &str) -> Result<DelzantPolytope> {
    let p: DelzantPolytope = serde_json::from_str(s).map_err(|e| invalid(e.to_string()))?;
    p.validated()
}

/// Lattice points as CSV with the coordinate labels as header.
pub fn write_lattice_csv<W: Write>(labels: &[String], points: &[Vec<i64>], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let io_err = |e: csv::Error| invalid(e.to_string());
    out.write_record(labels).map_err(io_err)?;
    for p in points {
        out.write_record(p.iter().map(|x| x.to_string()))
            .map_err(io_err)?;
    }
    out.flush().map_err(|e| invalid(e.to_string()))?;
    Ok(())
}
