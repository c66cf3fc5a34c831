//! Bit-stable CSV and JSON writers.
//!
//! Floats in CSV are written with 17 significant digits in scientific
//! notation; JSON uses the shortest representation that round-trips. Lines
//! end in `\n`.

use std::io::{self, Write};

use serde::Serialize;

use crate::hierarchy::HierarchyLevel;

/// `{:.16e}`: 17 significant digits, round-trip exact.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Columns `n,k,delta` with 1-based `n`.
pub fn emit_level_csv<W: Write>(level: &HierarchyLevel, mut w: W) -> io::Result<()> {
    writeln!(w, "n,k,delta")?;
    for (i, (k, d)) in level.values().iter().zip(level.deltas()).enumerate() {
        writeln!(w, "{},{},{}", i + 1, fmt_f64(*k), fmt_f64(d))?;
    }
    Ok(())
}

/// One row of a staircase comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaircaseSample {
    pub k: f64,
    pub exact: f64,
    pub expansion: f64,
    pub average: f64,
}

/// Columns `k,N_exact,N_expansion,N_average`.
pub fn emit_staircase_samples<W: Write>(samples: &[StaircaseSample], mut w: W) -> io::Result<()> {
    writeln!(w, "k,N_exact,N_expansion,N_average")?;
    for s in samples {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_f64(s.k),
            fmt_f64(s.exact),
            fmt_f64(s.expansion),
            fmt_f64(s.average)
        )?;
    }
    Ok(())
}

/// Pretty JSON followed by a newline.
pub fn emit_report_json<T: Serialize, W: Write>(value: &T, mut w: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value).map_err(io::Error::other)?;
    writeln!(w)
}

/// Sequence values, one per line, same float format as the CSV files.
pub fn emit_values<W: Write>(values: &[f64], mut w: W) -> io::Result<()> {
    for v in values {
        writeln!(w, "{}", fmt_f64(*v))?;
    }
    Ok(())
}
