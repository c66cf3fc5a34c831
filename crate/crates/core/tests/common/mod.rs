//! Shared fixtures and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use spectral_complexity::graph::QuantumGraph;
use spectral_complexity::SpectralSequence;

/// Bond lengths of the fixed fully connected 4-vertex test graph, in the
/// order (0,1), (0,2), (0,3), (1,2), (1,3), (2,3).
pub const K4_LENGTHS: [f64; 6] = [1.03, 0.87, 1.21, 0.94, 1.12, 0.79];

pub fn k4() -> QuantumGraph {
    QuantumGraph::complete4(K4_LENGTHS).unwrap()
}

pub fn zeta_zeros(n: usize) -> SpectralSequence {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/zeta_zeros_100k.txt");
    let text = std::fs::read_to_string(path).expect("zero table");
    let v: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .take(n)
        .map(|l| l.trim().parse().unwrap())
        .collect();
    assert_eq!(v.len(), n, "zero table too short");
    SpectralSequence::new(v, "zeta zeros").unwrap()
}

/// Bond evolution matrix built directly from the bond list, without the
/// library's directed-bond bookkeeping. Returns `(S, lengths)` so that
/// `U(k) = S · diag(e^{ikL})`.
pub fn oracle_scattering(
    vertices: usize,
    bonds: &[(usize, usize, f64)],
) -> (DMatrix<f64>, Vec<f64>) {
    // Directed bond list: (tail, head, length, reverse index).
    let mut dir = Vec::new();
    for (b, &(u, v, l)) in bonds.iter().enumerate() {
        dir.push((u, v, l, 2 * b + 1));
        dir.push((v, u, l, 2 * b));
    }
    let mut valence = vec![0usize; vertices];
    for &(u, v, _) in bonds {
        valence[u] += 1;
        valence[v] += 1;
    }
    let n = dir.len();
    let mut s = DMatrix::zeros(n, n);
    for (e, &(_, head_e, _, rev_e)) in dir.iter().enumerate() {
        for (d, &(tail_d, _, _, _)) in dir.iter().enumerate() {
            if tail_d == head_e {
                let back = if d == rev_e { 1.0 } else { 0.0 };
                s[(d, e)] = 2.0 / valence[head_e] as f64 - back;
            }
        }
    }
    (s, dir.iter().map(|x| x.2).collect())
}

/// Real secular function `Π sin(φ_j/2)` of `U(k)`, evaluated as
/// `det(I − U) · e^{−i arg det U / 2} / (−2i)^n` with the phase of `det U`
/// continued analytically in `k`.
pub struct SecularOracle {
    s: DMatrix<Complex64>,
    lengths: Vec<f64>,
    theta_s: f64,
}

impl SecularOracle {
    pub fn new(vertices: usize, bonds: &[(usize, usize, f64)]) -> Self {
        let (s, lengths) = oracle_scattering(vertices, bonds);
        let s = s.map(|x| Complex64::new(x, 0.0));
        let theta_s = s.clone().determinant().arg();
        Self {
            s,
            lengths,
            theta_s,
        }
    }

    pub fn eval(&self, k: f64) -> f64 {
        let n = self.lengths.len();
        let mut m = self.s.clone();
        for (j, l) in self.lengths.iter().enumerate() {
            let ph = Complex64::from_polar(1.0, k * l);
            for i in 0..n {
                m[(i, j)] *= -ph;
            }
        }
        for i in 0..n {
            m[(i, i)] += 1.0;
        }
        let det = m.determinant();
        let total: f64 = self.lengths.iter().sum();
        let phase = Complex64::from_polar(1.0, -0.5 * (self.theta_s + total * k));
        let norm = Complex64::new(0.0, -2.0).powu(n as u32);
        let v = det * phase / norm;
        v.re
    }

    /// Sign changes on a uniform grid of `step` in `(0, k_max]`, each refined
    /// by bisection to `1e-12`.
    pub fn roots(&self, k_max: f64, step: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut a = step * 0.5;
        let mut fa = self.eval(a);
        while a < k_max {
            let b = (a + step).min(k_max);
            let fb = self.eval(b);
            if fa == 0.0 {
                out.push(a);
            } else if fa * fb < 0.0 {
                let (mut lo, mut hi, mut flo) = (a, b, fa);
                while hi - lo > 1e-12 {
                    let mid = 0.5 * (lo + hi);
                    let fm = self.eval(mid);
                    if fm * flo <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                out.push(0.5 * (lo + hi));
            }
            a = b;
            fa = fb;
        }
        out
    }
}

pub fn k4_bonds() -> Vec<(usize, usize, f64)> {
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    pairs
        .iter()
        .zip(K4_LENGTHS)
        .map(|(&(u, v), l)| (u, v, l))
        .collect()
}

/// Number of periodic orbits (primitive cycles and their repetitions, each
/// counted once up to rotation) with length at most `cutoff`, found by
/// walking every closed path of the directed-bond transition graph and
/// weighting it by `1/p` with `p` its primitive period.
pub fn brute_force_orbit_count(vertices: usize, bonds: &[(usize, usize, f64)], cutoff: f64) -> u64 {
    let (s, lengths) = oracle_scattering(vertices, bonds);
    let n = lengths.len();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|e| (0..n).filter(|&d| s[(d, e)] != 0.0).collect())
        .collect();
    // Sum of 1/p over closed walks, kept exact as a count per period.
    let mut by_period = vec![0u64; 1];
    let mut path = Vec::new();
    for start in 0..n {
        path.clear();
        path.push(start);
        walk(
            start,
            lengths[start],
            cutoff,
            &succ,
            &lengths,
            &mut path,
            &mut by_period,
        );
    }
    by_period
        .iter()
        .enumerate()
        .skip(1)
        .map(|(p, &c)| {
            assert_eq!(c % p as u64, 0);
            c / p as u64
        })
        .sum()
}

fn walk(
    start: usize,
    len: f64,
    cutoff: f64,
    succ: &[Vec<usize>],
    lengths: &[f64],
    path: &mut Vec<usize>,
    by_period: &mut Vec<u64>,
) {
    let last = *path.last().unwrap();
    if succ[last].contains(&start) {
        let p = primitive_period(path);
        if by_period.len() <= p {
            by_period.resize(p + 1, 0);
        }
        by_period[p] += 1;
    }
    for &d in &succ[last] {
        let l = len + lengths[d];
        if l <= cutoff + 1e-9 {
            path.push(d);
            walk(start, l, cutoff, succ, lengths, path, by_period);
            path.pop();
        }
    }
}

fn primitive_period(w: &[usize]) -> usize {
    let n = w.len();
    (1..=n)
        .find(|&p| n % p == 0 && (0..n).all(|i| w[i] == w[(i + p) % n]))
        .unwrap()
}

/// Least-squares slope of `n` against `k_n`.
pub fn staircase_slope(k: &[f64]) -> f64 {
    let n = k.len() as f64;
    let mx = k.iter().sum::<f64>() / n;
    let my = (n + 1.0) / 2.0;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, x) in k.iter().enumerate() {
        sxy += (x - mx) * ((i + 1) as f64 - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub const TWO_PI: f64 = 2.0 * PI;
