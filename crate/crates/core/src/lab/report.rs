//! CSV writers for experiment reports (one row per cell).

use std::io::Write;

use super::{CombinedReport, ConcentrationReport};
use crate::error::{invalid, Result};

fn f(v: f64) -> String {
    format!("{v:.16e}")
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| invalid(format!("io: {e}")))
}

pub fn write_concentration_csv<W: Write>(r: &ConcentrationReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| invalid(format!("csv: {e}"));
    let mut header = vec!["s", "outside_mass", "sup_outside", "sup_bound", "log_l1"]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
    header.extend(r.test_names.iter().map(|n| format!("pairing_{n}")));
    w.write_record(&header).map_err(err)?;
    for row in &r.rows {
        let mut rec = vec![
            f(row.s),
            f(row.outside_mass),
            f(row.sup_outside),
            f(row.sup_bound),
            f(row.log_l1),
        ];
        rec.extend(row.pairings.iter().map(|&v| f(v)));
        w.write_record(&rec).map_err(err)?;
    }
    finish(w)
}

pub fn write_combined_csv<W: Write>(r: &CombinedReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| invalid(format!("csv: {e}"));
    let mut header: Vec<String> = ["s", "t", "outside_mass", "toric_outside_mass", "log_l1"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(r.test_names.iter().map(|n| format!("pairing_{n}")));
    header.extend(r.test_names.iter().map(|n| format!("toric_pairing_{n}")));
    w.write_record(&header).map_err(err)?;
    for row in &r.rows {
        let mut rec = vec![
            f(row.s),
            f(row.t),
            f(row.outside_mass),
            f(row.toric_outside_mass),
            f(row.log_l1),
        ];
        rec.extend(row.pairings.iter().map(|&v| f(v)));
        rec.extend(row.toric_pairings.iter().map(|&v| f(v)));
        w.write_record(&rec).map_err(err)?;
    }
    finish(w)
}
