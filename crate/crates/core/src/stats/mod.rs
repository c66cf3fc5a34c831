//! Fluctuation statistics of hierarchy levels and histograms.

mod difference;

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hierarchy::HierarchyLevel;
use crate::sequence::deltas_of;

pub use difference::{
    complexity_index, difference, exp_order, poly_degree, ComplexityIndex, ExpOrder,
    FiniteSymbolSequence, PolyDegree,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("need at least {min} values, got {len}")]
    TooShort { len: usize, min: usize },
    #[error("no samples")]
    EmptyInput,
    #[error("bin count must be at least 1")]
    InvalidBins,
    #[error("histogram range must be finite with lo < hi")]
    InvalidRange,
    #[error("operation needs a cyclic sequence with a modulus")]
    RequiresModulus,
    #[error("symbol {value} at index {index} outside [0, {modulus})")]
    SymbolOutOfRange {
        index: usize,
        value: i64,
        modulus: u64,
    },
    #[error("modulus must be positive")]
    ZeroModulus,
}

fn require_pair(level: &HierarchyLevel) -> Result<(), StatsError> {
    if level.len() < 2 {
        return Err(StatsError::TooShort {
            len: level.len(),
            min: 2,
        });
    }
    Ok(())
}

/// Nearest-neighbour spacings `s_n = k_{n+1} − k_n`.
pub fn spacings(level: &HierarchyLevel) -> Result<Vec<f64>, StatsError> {
    require_pair(level)?;
    Ok(level.values().windows(2).map(|w| w[1] - w[0]).collect())
}

/// `ξ_n = (δ_{n+1} + δ_n)/2`.
pub fn xi_statistic(level: &HierarchyLevel) -> Result<Vec<f64>, StatsError> {
    require_pair(level)?;
    Ok(deltas_of(level.values())
        .windows(2)
        .map(|w| 0.5 * (w[0] + w[1]))
        .collect())
}

/// Population variance.
pub fn variance(xs: &[f64]) -> f64 {
    let s = crate::numeric::std_dev(xs);
    s * s
}

/// Wigner surmise `(π s/2) e^{−π s²/4}`.
pub fn wigner_reference(s: f64) -> f64 {
    0.5 * PI * s * (-0.25 * PI * s * s).exp()
}

/// Uniform-bin histogram normalised by the total sample count, so samples
/// outside the range lower the integral below 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub normalized_density: Vec<f64>,
    /// Number of samples, including those outside the range.
    pub total: usize,
}

impl Histogram {
    pub fn bin_count(&self) -> usize {
        self.counts.len()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.bin_edges
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]))
            .collect()
    }

    /// `Σ density · width`.
    pub fn integral(&self) -> f64 {
        self.bin_edges
            .windows(2)
            .zip(&self.normalized_density)
            .map(|(w, d)| d * (w[1] - w[0]))
            .sum()
    }

    /// `max_i |density_i − f(center_i)|`.
    pub fn sup_distance<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.centers()
            .iter()
            .zip(&self.normalized_density)
            .map(|(&c, &d)| (d - f(c)).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with header `bin_left,bin_right,count,density`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "bin_left,bin_right,count,density")?;
        for (i, c) in self.counts.iter().enumerate() {
            writeln!(
                w,
                "{:.16e},{:.16e},{},{:.16e}",
                self.bin_edges[i],
                self.bin_edges[i + 1],
                c,
                self.normalized_density[i]
            )?;
        }
        Ok(())
    }
}

/// Histogram over `range`, or `[min, max]` of the data when `None`.
///
/// Bins are half-open except the last, which includes its right edge. A
/// degenerate data range `min = max` is widened to `min ± ½`.
pub fn histogram(
    values: &[f64],
    bins: usize,
    range: Option<(f64, f64)>,
) -> Result<Histogram, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    if bins == 0 {
        return Err(StatsError::InvalidBins);
    }
    let (lo, hi) = match range {
        Some(r) => r,
        None => {
            let (lo, hi) = crate::numeric::min_max(values);
            if lo == hi {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        }
    };
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(StatsError::InvalidRange);
    }
    let width = (hi - lo) / bins as f64;
    let bin_edges: Vec<f64> = (0..=bins)
        .map(|i| if i == bins { hi } else { lo + i as f64 * width })
        .collect();
    let mut counts = vec![0u64; bins];
    for &x in values {
        if !(lo..=hi).contains(&x) {
            continue;
        }
        let i = (((x - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let total = values.len();
    let normalized_density = counts
        .iter()
        .zip(bin_edges.windows(2))
        .map(|(&c, w)| c as f64 / (total as f64 * (w[1] - w[0])))
        .collect();
    Ok(Histogram {
        bin_edges,
        counts,
        normalized_density,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::adaptive_simpson;

    fn level(v: &[f64]) -> HierarchyLevel {
        HierarchyLevel::new(0, v.to_vec()).unwrap()
    }

    #[test]
    fn spacing_and_xi() {
        assert_eq!(spacings(&level(&[1.0, 2.0, 3.0])).unwrap(), vec![1.0, 1.0]);
        // δ = {0.2, −0.2}
        let xi = xi_statistic(&level(&[1.2, 1.8])).unwrap();
        assert!(xi[0].abs() < 1e-15);
        let xi = xi_statistic(&level(&[1.3, 2.3, 3.3])).unwrap();
        assert!(xi.iter().all(|x| (x - 0.3).abs() < 1e-12));
        assert!(spacings(&level(&[1.0])).is_err());
    }

    #[test]
    fn single_sample_histogram() {
        let h = histogram(&[0.5], 1, None).unwrap();
        assert_eq!(h.counts, vec![1]);
        let w = h.bin_edges[1] - h.bin_edges[0];
        assert_eq!(h.normalized_density, vec![1.0 / w]);
    }

    #[test]
    fn out_of_range_mass_is_excluded() {
        let h = histogram(&[0.5, 1.5, 2.5, 9.0], 3, Some((0.0, 3.0))).unwrap();
        assert_eq!(h.counts, vec![1, 1, 1]);
        assert!((h.integral() - 0.75).abs() < 1e-15);
        let h = histogram(&[0.0, 3.0], 3, Some((0.0, 3.0))).unwrap();
        assert_eq!(h.counts, vec![1, 0, 1]);
        assert!((h.integral() - 1.0).abs() < 1e-15);
        assert!(matches!(
            histogram(&[], 3, None),
            Err(StatsError::EmptyInput)
        ));
    }

    #[test]
    fn wigner_surmise() {
        assert_eq!(wigner_reference(0.0), 0.0);
        let mass = adaptive_simpson(wigner_reference, 0.0, 12.0, 1e-12).unwrap();
        assert!((mass - 1.0).abs() < 1e-6);
        let mode = (2.0 / PI).sqrt();
        let eps = 1e-4;
        assert!(wigner_reference(mode) > wigner_reference(mode - eps));
        assert!(wigner_reference(mode) > wigner_reference(mode + eps));
    }

    #[test]
    fn histogram_csv_header() {
        let h = histogram(&[0.5, 1.5], 2, Some((0.0, 2.0))).unwrap();
        let mut out = Vec::new();
        h.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("bin_left,bin_right,count,density\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
