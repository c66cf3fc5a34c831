//! Bond scattering operator, eigenphases and the momentum spectrum.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{GraphError, QuantumGraph};
use crate::sequence::SpectralSequence;

const TWO_PI: f64 = 2.0 * PI;

/// Width below which a bracketed eigenvalue is considered located.
pub const SPECTRUM_TOL: f64 = 1e-10;

/// Roots closer than this are one degenerate level.
const MERGE_TOL: f64 = 4.0 * SPECTRUM_TOL;

/// Eigenphases closer than this to 0 mod 2π are treated as sitting at 0.
const ZERO_PHASE: f64 = 1e-9;

/// Largest tolerated distance of the phase-sum count from an integer.
const COUNT_RESIDUAL: f64 = 1e-6;

/// Kirchhoff scattering matrix of a vertex of valence `d`:
/// `σ_ij = 2/d − δ_ij`.
///
/// # Panics
///
/// If `valence` is zero.
pub fn vertex_scattering(valence: usize) -> DMatrix<f64> {
    assert!(valence >= 1, "valence must be at least 1");
    let t = 2.0 / valence as f64;
    DMatrix::from_fn(valence, valence, |i, j| if i == j { t - 1.0 } else { t })
}

/// Real orthogonal `S` over directed bonds, `S[e, d]` = amplitude `d → e`.
pub(crate) fn bond_scattering(g: &QuantumGraph) -> DMatrix<f64> {
    let n = g.directed_count();
    DMatrix::from_fn(n, n, |e, d| g.transition(d, e))
}

/// `U(k) = S·D(k)` with `D = diag(e^{ikL_d})`.
pub fn bond_evolution(g: &QuantumGraph, k: f64) -> DMatrix<Complex64> {
    let s = bond_scattering(g);
    evolution_from(&s, g, k)
}

fn evolution_from(s: &DMatrix<f64>, g: &QuantumGraph, k: f64) -> DMatrix<Complex64> {
    let phases: Vec<Complex64> = (0..g.directed_count())
        .map(|d| Complex64::from_polar(1.0, k * g.directed_length(d)))
        .collect();
    DMatrix::from_fn(s.nrows(), s.ncols(), |e, d| phases[d] * s[(e, d)])
}

/// Spectrum rotations tried in turn; a real or conjugate-symmetric input can
/// stall the shifted QR iteration, a generic rotation breaks that symmetry.
const ROTATIONS: [f64; 4] = [0.713_713_7, 2.094_211, 4.312_337, 5.5];
const SCHUR_MAX_ITER: usize = 10_000;

fn phases_of(u: DMatrix<Complex64>, k: f64) -> Result<Vec<f64>, GraphError> {
    for theta in ROTATIONS {
        let r = u.map(|z| z * Complex64::from_polar(1.0, theta));
        let Some(schur) = r.try_schur(f64::EPSILON, SCHUR_MAX_ITER) else {
            continue;
        };
        let Some(ev) = schur.eigenvalues() else {
            continue;
        };
        let mut out: Vec<f64> = ev
            .iter()
            .map(|z| (z.arg() - theta).rem_euclid(TWO_PI))
            .collect();
        out.sort_by(f64::total_cmp);
        return Ok(out);
    }
    Err(GraphError::Eigen(k))
}

/// Eigenphases of `U(k)` in `[0, 2π)`, ascending.
pub fn eigenphases(g: &QuantumGraph, k: f64) -> Result<Vec<f64>, GraphError> {
    phases_of(bond_evolution(g, k), k)
}

/// `Σ φ_j` of `S` with phases at 0 taken as 0 (they move up as `k` grows).
pub(crate) fn phase_sum_at_zero(g: &QuantumGraph) -> Result<f64, GraphError> {
    let s = bond_scattering(g).map(|x| Complex64::new(x, 0.0));
    Ok(phases_of(s, 0.0)?
        .iter()
        .map(|&p| {
            if p < ZERO_PHASE || TWO_PI - p < ZERO_PHASE {
                0.0
            } else {
                p
            }
        })
        .sum())
}

/// Spectral counting function of one graph.
///
/// Every eigenphase of `U(k)` moves up with `k` and `det U(k) = det S·e^{2iL0k}`,
/// so the number of eigenphases that passed through 0 mod 2π on `(0, k]` is
///
/// ```text
/// N(k) = (2 L0 k + Φ(0⁺) − Φ(k)) / 2π,    Φ = Σ_j (φ_j mod 2π)
/// ```
///
/// which needs no tracking between sample points.
#[derive(Debug, Clone)]
pub struct PhaseCounter<'g> {
    graph: &'g QuantumGraph,
    s: DMatrix<f64>,
    phi0: f64,
}

impl<'g> PhaseCounter<'g> {
    pub fn new(graph: &'g QuantumGraph) -> Result<Self, GraphError> {
        Ok(Self {
            graph,
            s: bond_scattering(graph),
            phi0: phase_sum_at_zero(graph)?,
        })
    }

    /// `N(k)`; errors if the phase sum is not within 1e-6 of an integer.
    pub fn count(&self, k: f64) -> Result<u64, GraphError> {
        if !(k.is_finite() && k >= 0.0) {
            return Err(GraphError::BadMomentum(k));
        }
        if k == 0.0 {
            return Ok(0);
        }
        let phases = phases_of(evolution_from(&self.s, self.graph, k), k)?;
        let phi: f64 = phases.iter().sum();
        let raw = (2.0 * self.graph.total_length() * k + self.phi0 - phi) / TWO_PI;
        let n = raw.round();
        if (raw - n).abs() > COUNT_RESIDUAL || n < 0.0 {
            return Err(GraphError::TrackingLoss {
                k,
                residual: raw - n,
            });
        }
        Ok(n as u64)
    }

    /// Eigenvalues in `(0, k_max]` with multiplicities.
    ///
    /// The count is sampled on a grid of step `π/(8 L_max)`, so no eigenphase
    /// moves more than `π/8` per step, and every cell where it jumps is split
    /// until the bracket is narrower than [`SPECTRUM_TOL`].
    pub fn spectrum(&self, k_max: f64) -> Result<(Vec<f64>, Vec<u32>), GraphError> {
        if !(k_max.is_finite() && k_max > 0.0) {
            return Err(GraphError::BadMomentum(k_max));
        }
        let step = PI / (8.0 * self.graph.max_length());
        let cells = (k_max / step).ceil() as usize;
        let mut roots = Vec::new();
        let mut mult = Vec::new();
        let (mut a, mut na) = (0.0, 0u64);
        for i in 1..=cells {
            let b = (i as f64 * step).min(k_max);
            let nb = self.count(b)?;
            self.split(a, b, na, nb, &mut roots, &mut mult)?;
            a = b;
            na = nb;
        }
        Ok((roots, mult))
    }

    fn split(
        &self,
        a: f64,
        b: f64,
        na: u64,
        nb: u64,
        roots: &mut Vec<f64>,
        mult: &mut Vec<u32>,
    ) -> Result<(), GraphError> {
        if nb == na {
            return Ok(());
        }
        if nb < na {
            return Err(GraphError::TrackingLoss {
                k: b,
                residual: nb as f64 - na as f64,
            });
        }
        let m = 0.5 * (a + b);
        if b - a <= SPECTRUM_TOL || m <= a || m >= b {
            let jump = (nb - na) as u32;
            // A degenerate level on a grid point is bracketed from both sides.
            match (roots.last_mut(), mult.last_mut()) {
                (Some(r), Some(c)) if m - *r <= MERGE_TOL => {
                    *r = (*r * f64::from(*c) + m * f64::from(jump)) / f64::from(*c + jump);
                    *c += jump;
                }
                _ => {
                    roots.push(m);
                    mult.push(jump);
                }
            }
            return Ok(());
        }
        let nm = self.count(m)?;
        self.split(a, m, na, nm, roots, mult)?;
        self.split(m, b, nm, nb, roots, mult)
    }
}

/// `N(k)`, the number of eigenvalues in `(0, k]` counted with multiplicity.
pub fn counting_function(g: &QuantumGraph, k: f64) -> Result<u64, GraphError> {
    PhaseCounter::new(g)?.count(k)
}

/// All eigenvalues in `(0, k_max]`, degenerate ones stored once with their
/// multiplicity.
pub fn compute_spectrum(g: &QuantumGraph, k_max: f64) -> Result<SpectralSequence, GraphError> {
    let (roots, mult) = PhaseCounter::new(g)?.spectrum(k_max)?;
    Ok(SpectralSequence::with_multiplicities(
        roots,
        mult,
        format!("graph spectrum, k_max = {k_max}"),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
        let p = u.adjoint() * u;
        let n = p.nrows();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| {
                let id = if i == j { 1.0 } else { 0.0 };
                (p[(i, j)] - Complex64::new(id, 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn vertex_matrices() {
        assert_eq!(vertex_scattering(1)[(0, 0)], 1.0);
        let s2 = vertex_scattering(2);
        assert_eq!((s2[(0, 0)], s2[(0, 1)]), (0.0, 1.0));
        let s4 = vertex_scattering(4);
        assert_eq!((s4[(0, 0)], s4[(0, 1)]), (-0.5, 0.5));
        for d in 1..8 {
            let s = vertex_scattering(d);
            let p = s.transpose() * &s;
            assert!((p - DMatrix::identity(d, d)).amax() < 1e-15);
        }
    }

    #[test]
    fn evolution_is_unitary() {
        let g = QuantumGraph::complete4([1.03, 0.87, 1.21, 0.94, 1.12, 0.79]).unwrap();
        assert!(unitarity_defect(&bond_evolution(&g, 0.0)) < 1e-12);
        for k in [0.3, 7.7, 123.456] {
            assert!(unitarity_defect(&bond_evolution(&g, k)) < 1e-12);
        }
    }

    #[test]
    fn box_counting() {
        let g = QuantumGraph::single_bond(PI).unwrap();
        assert_eq!(counting_function(&g, 3.5).unwrap(), 3);
        assert_eq!(counting_function(&g, 0.0).unwrap(), 0);
        assert!((g.staircase_offset().unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn box_spectrum() {
        let g = QuantumGraph::single_bond(1.0).unwrap();
        let s = compute_spectrum(&g, 20.0).unwrap();
        assert_eq!(s.len(), 6);
        for (i, k) in s.values().iter().enumerate() {
            assert!((k - (i + 1) as f64 * PI).abs() < 1e-9);
        }
    }

    #[test]
    fn transparent_vertex_chain() {
        let g = QuantumGraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let s = compute_spectrum(&g, 10.0).unwrap();
        let want: Vec<f64> = (1..=6).map(|n| n as f64 * PI / 2.0).collect();
        assert_eq!(s.len(), want.len());
        for (k, w) in s.values().iter().zip(want) {
            assert!((k - w).abs() < 1e-9);
        }
    }

    #[test]
    fn equilateral_star_has_degenerate_levels() {
        // Three equal arms: the antisymmetric arm modes at (n+½)π/L are doubly
        // degenerate.
        let g = QuantumGraph::from_edges(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        let s = compute_spectrum(&g, 5.0).unwrap();
        let i = s
            .values()
            .iter()
            .position(|&k| (k - PI / 2.0).abs() < 1e-8)
            .unwrap();
        assert_eq!(s.multiplicity(i), 2);
    }

    #[test]
    fn degenerate_level_on_grid_point_is_merged() {
        // 3π/2 is exactly a scan grid point for unit arms.
        let g = QuantumGraph::from_edges(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        let s = compute_spectrum(&g, 7.0).unwrap();
        let i = s
            .values()
            .iter()
            .position(|&k| (k - 1.5 * PI).abs() < 1e-8)
            .unwrap();
        assert_eq!(s.multiplicity(i), 2);
        assert!((s.values()[i + 1] - 1.5 * PI).abs() > 1e-3);
    }
}
