//! Metric quantum graphs with Kirchhoff vertices.
//!
//! Each undirected bond `b` joining `from` and `to` carries two directed bonds:
//! `2b` runs `from → to` and `2b + 1` runs back. Waves on directed bond `d`
//! pick up `e^{ikL_d}` and scatter at the head vertex into every outgoing
//! directed bond with amplitude `2/v − δ` (δ = 1 for backscattering).

mod orbits;
mod spectrum;

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use orbits::{
    cycle_expansion, enumerate_orbits, enumerate_orbits_with, graph_expansion,
    graph_expansion_with_norm, orbit_sum_by_length, OrbitLimits, PeriodicOrbit, DEFAULT_MAX_ORBITS,
    GRAPH_AMPLITUDE_NORM,
};
pub use spectrum::{
    bond_evolution, compute_spectrum, counting_function, eigenphases, vertex_scattering,
    PhaseCounter, SPECTRUM_TOL,
};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph needs at least one vertex and one bond")]
    Empty,
    #[error("bond {bond} references vertex {vertex}, graph has {count}")]
    BadVertex {
        bond: usize,
        vertex: usize,
        count: usize,
    },
    #[error("bond {0} length must be positive and finite")]
    BadLength(usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("unsupported boundary condition {0:?}")]
    Boundary(String),
    #[error("eigenphase count drifted from an integer at k = {k} (residual {residual})")]
    TrackingLoss { k: f64, residual: f64 },
    #[error("eigenvalue decomposition failed at k = {0}")]
    Eigen(f64),
    #[error("k must be finite and non-negative, got {0}")]
    BadMomentum(f64),
    #[error("orbit enumeration exceeds the cap of {cap} ({what})")]
    CutoffTooLarge { cap: u64, what: &'static str },
    #[error("bond lengths have no common decimal quantum")]
    NoLengthQuantum,
    #[error("cycle expansion needs polynomial degree {0}, above the supported limit")]
    DegreeTooLarge(u64),
    #[error(transparent)]
    Sequence(#[from] crate::sequence::SequenceError),
    #[error("invalid graph spec: {0}")]
    Spec(#[from] serde_json::Error),
    #[error("reading graph spec: {0}")]
    Io(#[from] std::io::Error),
}

/// Vertex matching condition. Only Kirchhoff (Neumann) is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    #[serde(alias = "neumann")]
    Kirchhoff,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bond {
    pub from: usize,
    pub to: usize,
    pub length: f64,
}

/// On-disk graph description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: usize,
    pub bonds: Vec<Bond>,
    #[serde(default)]
    pub boundary: Boundary,
}

/// A connected metric graph with positive bond lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumGraph {
    vertex_count: usize,
    bonds: Vec<Bond>,
    boundary: Boundary,
    total_length: f64,
    valence: Vec<usize>,
}

impl QuantumGraph {
    pub fn new(vertex_count: usize, bonds: Vec<Bond>) -> Result<Self, GraphError> {
        if vertex_count == 0 || bonds.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut valence = vec![0usize; vertex_count];
        let mut parent: Vec<usize> = (0..vertex_count).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (i, b) in bonds.iter().enumerate() {
            for v in [b.from, b.to] {
                if v >= vertex_count {
                    return Err(GraphError::BadVertex {
                        bond: i,
                        vertex: v,
                        count: vertex_count,
                    });
                }
            }
            if !(b.length > 0.0 && b.length.is_finite()) {
                return Err(GraphError::BadLength(i));
            }
            valence[b.from] += 1;
            valence[b.to] += 1;
            let (ra, rb) = (root(&mut parent, b.from), root(&mut parent, b.to));
            parent[ra] = rb;
        }
        let r0 = root(&mut parent, 0);
        if (0..vertex_count).any(|v| root(&mut parent, v) != r0) {
            return Err(GraphError::Disconnected);
        }
        let total_length = bonds.iter().map(|b| b.length).sum();
        Ok(Self {
            vertex_count,
            bonds,
            boundary: Boundary::Kirchhoff,
            total_length,
            valence,
        })
    }

    /// `(from, to, length)` triples.
    pub fn from_edges(
        vertex_count: usize,
        edges: &[(usize, usize, f64)],
    ) -> Result<Self, GraphError> {
        Self::new(
            vertex_count,
            edges
                .iter()
                .map(|&(from, to, length)| Bond { from, to, length })
                .collect(),
        )
    }

    pub fn from_spec(spec: GraphSpec) -> Result<Self, GraphError> {
        let mut g = Self::new(spec.vertices, spec.bonds)?;
        g.boundary = spec.boundary;
        Ok(g)
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        Self::from_spec(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, GraphError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            vertices: self.vertex_count,
            bonds: self.bonds.clone(),
            boundary: self.boundary,
        }
    }

    /// Interval `[0, L]`: one bond, two dead ends.
    pub fn single_bond(length: f64) -> Result<Self, GraphError> {
        Self::from_edges(2, &[(0, 1, length)])
    }

    /// Complete graph on four vertices; bonds in the order
    /// (0,1), (0,2), (0,3), (1,2), (1,3), (2,3).
    pub fn complete4(lengths: [f64; 6]) -> Result<Self, GraphError> {
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let edges: Vec<_> = pairs
            .iter()
            .zip(lengths)
            .map(|(&(a, b), l)| (a, b, l))
            .collect();
        Self::from_edges(4, &edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// `L0 = Σ_b L_b`.
    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn max_length(&self) -> f64 {
        self.bonds.iter().map(|b| b.length).fold(0.0, f64::max)
    }

    pub fn valence(&self, v: usize) -> usize {
        self.valence[v]
    }

    pub fn directed_count(&self) -> usize {
        2 * self.bonds.len()
    }

    pub fn tail(&self, d: usize) -> usize {
        let b = &self.bonds[d / 2];
        if d % 2 == 0 {
            b.from
        } else {
            b.to
        }
    }

    pub fn head(&self, d: usize) -> usize {
        self.tail(d ^ 1)
    }

    pub fn directed_length(&self, d: usize) -> f64 {
        self.bonds[d / 2].length
    }

    /// Scattering amplitude from directed bond `d` into `e`; zero unless
    /// `head(d) = tail(e)`.
    pub fn transition(&self, d: usize, e: usize) -> f64 {
        let v = self.head(d);
        if self.tail(e) != v {
            return 0.0;
        }
        let base = 2.0 / self.valence[v] as f64;
        if e == (d ^ 1) {
            base - 1.0
        } else {
            base
        }
    }

    /// Largest `ℓ = 10^{-p}·g` such that every bond length is an integer
    /// multiple of `ℓ`, with the integer lengths. Decimal places up to 9.
    pub fn length_quantum(&self) -> Option<(f64, Vec<u64>)> {
        for places in 0..=9 {
            let scale = 10f64.powi(places);
            let ints: Option<Vec<u64>> = self
                .bonds
                .iter()
                .map(|b| {
                    let x = b.length * scale;
                    let r = x.round();
                    ((x - r).abs() <= 1e-9 * x.max(1.0) && r >= 1.0).then_some(r as u64)
                })
                .collect();
            if let Some(ints) = ints {
                let g = ints.iter().copied().fold(0, gcd);
                let ints = ints.iter().map(|&n| n / g).collect();
                return Some((g as f64 / scale, ints));
            }
        }
        None
    }

    /// Constant `c` of the smooth staircase `L0 k/π + c`.
    pub fn staircase_offset(&self) -> Result<f64, GraphError> {
        let phi0 = spectrum::phase_sum_at_zero(self)?;
        Ok(phi0 / (2.0 * std::f64::consts::PI) - self.bonds.len() as f64)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
