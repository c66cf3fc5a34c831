//! Periodic orbits on the directed-bond graph and the graph trace formula.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spectrum::bond_scattering;
use super::{GraphError, QuantumGraph};
use crate::sequence::CountingModel;
use crate::trace::{Harmonic, StaircaseExpansion, Truncation};

pub const DEFAULT_MAX_ORBITS: u64 = 10_000_000;
/// Default amplitude prefactor of the graph trace formula,
/// `N_osc(k) = norm · Im Σ_p A_p/m e^{i L_p k}`.
pub const GRAPH_AMPLITUDE_NORM: f64 = 1.0 / PI;

/// Degree cap of the characteristic polynomial used by [`cycle_expansion`].
const MAX_CYCLE_DEGREE: u64 = 400_000;
/// Harmonics of the cycle expansion below this magnitude are dropped.
const CYCLE_COEFF_FLOOR: f64 = 1e-12;

/// A periodic orbit: primitive directed-bond cycle traversed `repetition`
/// times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    /// Primitive cycle in canonical (lexicographically least) rotation.
    pub bonds: Vec<usize>,
    pub repetition: u32,
    /// `m · L_prim`.
    pub length: f64,
    /// `A_prim^m`, the product of scattering amplitudes along the orbit.
    pub amplitude: Complex64,
}

impl PeriodicOrbit {
    pub fn primitive_length(&self) -> f64 {
        self.length / f64::from(self.repetition)
    }

    /// Checks that consecutive bonds connect head to tail, cyclically, and
    /// that the stored length matches the traversed bonds.
    pub fn is_closed(&self, g: &QuantumGraph) -> bool {
        let n = self.bonds.len();
        let linked = (0..n).all(|i| g.head(self.bonds[i]) == g.tail(self.bonds[(i + 1) % n]));
        let prim: f64 = self.bonds.iter().map(|&d| g.directed_length(d)).sum();
        linked
            && (prim * f64::from(self.repetition) - self.length).abs()
                <= 1e-12 * self.length.max(1.0)
    }
}

/// Work caps of [`enumerate_orbits_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitLimits {
    /// Maximum number of orbits, repetitions included.
    pub max_orbits: u64,
    /// Maximum number of search steps.
    pub max_steps: u64,
}

impl Default for OrbitLimits {
    fn default() -> Self {
        Self {
            max_orbits: DEFAULT_MAX_ORBITS,
            max_steps: 2_000_000_000,
        }
    }
}

/// Whether `w` is strictly smaller than each of its proper rotations.
fn is_lyndon(w: &[usize]) -> bool {
    let n = w.len();
    let (mut i, mut j) = (0, 1);
    while j < n && w[i] <= w[j] {
        if w[i] < w[j] {
            i = 0;
        } else {
            i += 1;
        }
        j += 1;
    }
    i == 0 && j == n
}

/// All periodic orbits with length ≤ `length_cutoff`, default caps.
pub fn enumerate_orbits(
    g: &QuantumGraph,
    length_cutoff: f64,
) -> Result<Vec<PeriodicOrbit>, GraphError> {
    enumerate_orbits_with(g, length_cutoff, OrbitLimits::default())
}

/// Depth-first search over closed walks of the directed-bond graph.
///
/// Walks start at their smallest bond and only visit bonds not below it; a
/// closed walk is kept when it is a Lyndon word, which picks exactly one
/// rotation of every primitive cycle. Transitions with zero amplitude are
/// never taken. Time-reversed partners are distinct orbits. Output is sorted by
/// length, then by bond code.
pub fn enumerate_orbits_with(
    g: &QuantumGraph,
    length_cutoff: f64,
    limits: OrbitLimits,
) -> Result<Vec<PeriodicOrbit>, GraphError> {
    if !(length_cutoff > 0.0 && length_cutoff.is_finite()) {
        return Err(GraphError::BadMomentum(length_cutoff));
    }
    let n = g.directed_count();
    let succ: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|d| {
            (0..n)
                .filter_map(|e| {
                    let t = g.transition(d, e);
                    (t != 0.0).then_some((e, t))
                })
                .collect()
        })
        .collect();
    let len = |d: usize| g.directed_length(d);
    let slack = 1e-12 * length_cutoff;

    let mut out = Vec::new();
    let mut steps = 0u64;
    let mut path: Vec<usize> = Vec::new();
    // Stack frames: (bond, cumulative length, cumulative amplitude, next successor slot).
    let mut stack: Vec<(usize, f64, f64, usize)> = Vec::new();
    for s in 0..n {
        if len(s) > length_cutoff + slack {
            continue;
        }
        path.clear();
        path.push(s);
        stack.clear();
        stack.push((s, len(s), 1.0, 0));
        while let Some(top) = stack.last_mut() {
            let (d, l, a, slot) = *top;
            if slot == 0 {
                if let Some(&(_, t)) = succ[d].iter().find(|&&(e, _)| e == s) {
                    if is_lyndon(&path) {
                        let amp = a * t;
                        let mut m = 1u32;
                        while f64::from(m) * l <= length_cutoff + slack {
                            out.push(PeriodicOrbit {
                                bonds: path.clone(),
                                repetition: m,
                                length: f64::from(m) * l,
                                amplitude: Complex64::new(amp.powi(m as i32), 0.0),
                            });
                            if out.len() as u64 > limits.max_orbits {
                                return Err(GraphError::CutoffTooLarge {
                                    cap: limits.max_orbits,
                                    what: "orbit count",
                                });
                            }
                            m += 1;
                        }
                    }
                }
            }
            let next = succ[d][slot..]
                .iter()
                .position(|&(e, _)| e >= s && l + len(e) <= length_cutoff + slack);
            match next {
                Some(off) => {
                    let (e, t) = succ[d][slot + off];
                    top.3 = slot + off + 1;
                    steps += 1;
                    if steps > limits.max_steps {
                        return Err(GraphError::CutoffTooLarge {
                            cap: limits.max_steps,
                            what: "search steps",
                        });
                    }
                    path.push(e);
                    stack.push((e, l + len(e), a * t, 0));
                }
                None => {
                    stack.pop();
                    path.pop();
                }
            }
        }
    }
    out.sort_by(|a, b| {
        a.length
            .total_cmp(&b.length)
            .then_with(|| a.bonds.cmp(&b.bonds))
    });
    Ok(out)
}

/// Smooth part `L0 k/π + c` of the graph staircase.
fn weyl_average(g: &QuantumGraph) -> Result<CountingModel, GraphError> {
    Ok(CountingModel::WeylLinear {
        total_length: g.total_length(),
        offset: g.staircase_offset()?,
    })
}

/// Trace-formula expansion from an orbit list, amplitude `A_p/(π m)`.
pub fn graph_expansion(
    g: &QuantumGraph,
    orbits: &[PeriodicOrbit],
) -> Result<StaircaseExpansion, GraphError> {
    graph_expansion_with_norm(g, orbits, GRAPH_AMPLITUDE_NORM)
}

/// As [`graph_expansion`] with amplitude `norm·A_p/m`.
pub fn graph_expansion_with_norm(
    g: &QuantumGraph,
    orbits: &[PeriodicOrbit],
    norm: f64,
) -> Result<StaircaseExpansion, GraphError> {
    let harmonics = orbits
        .iter()
        .map(|o| Harmonic::new(o.amplitude * (norm / f64::from(o.repetition)), o.length))
        .collect();
    let cutoff = orbits.iter().map(|o| o.length).fold(0.0, f64::max);
    Ok(StaircaseExpansion::new(
        weyl_average(g)?,
        harmonics,
        Truncation::OrbitLength { cutoff },
    )
    .expect("orbit harmonics are finite"))
}

/// Exact orbit sum up to `length_cutoff`, grouped by length.
///
/// For bond lengths that are integer multiples of a quantum `ℓ`, the orbit sum
/// equals the series of
///
/// ```text
/// −log det(I − S·Z(z)) = Σ_n tr(S Z)^n / n,   Z = diag(z^{L_d/ℓ}),  z = e^{ikℓ}
/// ```
///
/// The determinant is a real polynomial of degree `Σ_d L_d/ℓ`; its
/// coefficients are recovered by a discrete Fourier transform of values on the
/// unit circle and the logarithm series follows from the recurrence
/// `L f_L = L c_L − Σ_{i<L} (L − i) c_i f_{L−i}`. This reaches cutoffs far
/// beyond explicit enumeration, where orbit counts grow exponentially.
pub fn cycle_expansion(
    g: &QuantumGraph,
    length_cutoff: f64,
    norm: f64,
) -> Result<StaircaseExpansion, GraphError> {
    let (quantum, ints) = g.length_quantum().ok_or(GraphError::NoLengthQuantum)?;
    let degree: u64 = 2 * ints.iter().sum::<u64>();
    if degree > MAX_CYCLE_DEGREE {
        return Err(GraphError::DegreeTooLarge(degree));
    }
    let dmax = degree as usize;
    let dir_len: Vec<usize> = (0..g.directed_count())
        .map(|d| ints[d / 2] as usize)
        .collect();

    // Exponents reachable as Σ_b c_b L_b with c_b ∈ {0, 1, 2}.
    let mut reach = vec![false; dmax + 1];
    reach[0] = true;
    for &l in &ints {
        let l = l as usize;
        for x in (0..=dmax).rev() {
            if reach[x] {
                if x + l <= dmax {
                    reach[x + l] = true;
                }
                if x + 2 * l <= dmax {
                    reach[x + 2 * l] = true;
                }
            }
        }
    }
    let support: Vec<usize> = (1..=dmax).filter(|&i| reach[i]).collect();

    let s = bond_scattering(g);
    let n = s.nrows();
    let m = dmax + 1;
    let root = |j: usize| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
    let mut values = Vec::with_capacity(m);
    for j in 0..m {
        let zpow: Vec<Complex64> = dir_len.iter().map(|&l| root((j * l) % m)).collect();
        let a = DMatrix::from_fn(n, n, |e, d| {
            let id = if e == d { 1.0 } else { 0.0 };
            Complex64::new(id, 0.0) - zpow[d] * s[(e, d)]
        });
        values.push(a.lu().determinant());
    }
    let mut coeff = vec![0.0; dmax + 1];
    coeff[0] = 1.0;
    for &i in &support {
        let sum: Complex64 = values
            .iter()
            .enumerate()
            .map(|(j, v)| v * root((m - (i * j) % m) % m))
            .sum();
        coeff[i] = sum.re / m as f64;
    }

    let lmax = (length_cutoff / quantum * (1.0 + 1e-12)).floor() as usize;
    let mut f = vec![0.0; lmax + 1];
    for l in 1..=lmax {
        let mut acc = 0.0;
        for &i in support.iter().take_while(|&&i| i < l) {
            acc += (l - i) as f64 * coeff[i] * f[l - i];
        }
        let c = if l <= dmax { coeff[l] } else { 0.0 };
        f[l] = c - acc / l as f64;
    }
    let harmonics = f
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, v)| v.abs() >= CYCLE_COEFF_FLOOR)
        .map(|(l, v)| Harmonic::real(-norm * v, l as f64 * quantum))
        .collect();
    Ok(StaircaseExpansion::new(
        weyl_average(g)?,
        harmonics,
        Truncation::OrbitLength {
            cutoff: length_cutoff,
        },
    )
    .expect("cycle harmonics are finite"))
}

/// Sums orbit amplitudes `A_p/m` by length, for comparison with
/// [`cycle_expansion`]. Lengths are keyed in units of `quantum`.
pub fn orbit_sum_by_length(orbits: &[PeriodicOrbit], quantum: f64) -> BTreeMap<u64, f64> {
    let mut out = BTreeMap::new();
    for o in orbits {
        let key = (o.length / quantum).round() as u64;
        *out.entry(key).or_insert(0.0) += o.amplitude.re / f64::from(o.repetition);
    }
    out
}
