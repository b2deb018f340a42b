//! Serialised forms: Plücker JSON and GC CSV.

use std::collections::BTreeMap;
use std::io::Write;

use super::{index_label, GcValues, PlueckerCoords};
use crate::error::{invalid, Result};

/// `{level: {index set: [re, im]}}`.
pub fn pluecker_json(p: &PlueckerCoords) -> serde_json::Value {
    let mut out = BTreeMap::new();
    for (l, level) in p.levels.iter().enumerate() {
        let entries: BTreeMap<String, [f64; 2]> = level
            .iter()
            .map(|(set, z)| (index_label(set, p.n), [z.re, z.im]))
            .collect();
        out.insert((l + 1).to_string(), entries);
    }
    serde_json::to_value(out).expect("plain maps serialize")
}

/// One row per sample: `sample, lambda1_1, ..., lambda{n}_{n}` (top row included).
pub fn write_gc_csv<W: Write>(samples: &[GcValues], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let err = |e: csv::Error| invalid(e.to_string());
    let Some(first) = samples.first() else {
        return out.flush().map_err(|e| invalid(e.to_string()));
    };
    let mut header = vec!["sample".to_string()];
    for (l, row) in first.rows.iter().enumerate() {
        header.extend((1..=row.len()).map(|j| format!("lambda{}_{}", l + 1, j)));
    }
    out.write_record(&header).map_err(err)?;
    for (k, s) in samples.iter().enumerate() {
        let mut row = vec![k.to_string()];
        row.extend(s.rows.iter().flatten().map(|v| format!("{v:.16e}")));
        out.write_record(&row).map_err(err)?;
    }
    out.flush().map_err(|e| invalid(e.to_string()))
}
