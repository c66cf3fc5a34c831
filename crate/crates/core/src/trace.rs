//! Harmonic staircase expansions and eigenvalue reconstruction.
//!
//! A staircase expansion is a smooth counting model plus a finite set of
//! harmonics,
//!
//! ```text
//! N(k) = N̄(k) + Im Σ_p A_p e^{i L_p k}
//! ```
//!
//! Individual levels are recovered from it as first moments of `dN` over
//! intervals that each contain exactly one level.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hierarchy::HierarchyLevel;
use crate::numeric::{adaptive_simpson, CompensatedSum};
use crate::sequence::{CountingModel, SequenceError, SpectralSequence};

/// Tolerance of the adaptive quadrature used for `∫N̄` when no closed form
/// is used.
pub const AVERAGE_QUADRATURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("k = {0} outside the domain of the average model")]
    OutOfDomain(f64),
    #[error("integration interval [{a}, {b}] is empty or not finite")]
    InvalidInterval { a: f64, b: f64 },
    #[error("adaptive quadrature did not converge (estimate {estimate})")]
    QuadratureFailure { estimate: f64 },
    #[error("harmonic {0} has a non-positive length or non-finite amplitude")]
    InvalidHarmonic(usize),
    #[error("damping scale must be positive and finite, got {0}")]
    InvalidDamping(f64),
    #[error("staircase is not regular around level {n}: {reason}")]
    NotRegular { n: usize, reason: &'static str },
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// One term `A e^{iLk}` of an expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "HarmonicRepr", from = "HarmonicRepr")]
pub struct Harmonic {
    pub amplitude: Complex64,
    pub length: f64,
}

#[derive(Serialize, Deserialize)]
struct HarmonicRepr {
    re: f64,
    im: f64,
    length: f64,
}

impl From<Harmonic> for HarmonicRepr {
    fn from(h: Harmonic) -> Self {
        Self {
            re: h.amplitude.re,
            im: h.amplitude.im,
            length: h.length,
        }
    }
}

impl From<HarmonicRepr> for Harmonic {
    fn from(r: HarmonicRepr) -> Self {
        Self {
            amplitude: Complex64::new(r.re, r.im),
            length: r.length,
        }
    }
}

impl Harmonic {
    pub fn new(amplitude: Complex64, length: f64) -> Self {
        Self { amplitude, length }
    }

    pub fn real(amplitude: f64, length: f64) -> Self {
        Self::new(Complex64::new(amplitude, 0.0), length)
    }

    /// `Im(A e^{iLk})`.
    pub fn eval(&self, k: f64) -> f64 {
        let (s, c) = (self.length * k).sin_cos();
        self.amplitude.re * s + self.amplitude.im * c
    }

    /// `∫_a^b Im(A e^{iLk}) dk = Im[A(e^{iLb} − e^{iLa})/(iL)]`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        // A(e^{iLb} − e^{iLa})/(iL) has imaginary part
        // [−re(A)(cos Lb − cos La) + im(A)(sin Lb − sin La)]/L.
        let (sb, cb) = (self.length * b).sin_cos();
        let (sa, ca) = (self.length * a).sin_cos();
        (-self.amplitude.re * (cb - ca) + self.amplitude.im * (sb - sa)) / self.length
    }
}

/// How the harmonic list was cut off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Truncation {
    None,
    PrimeSum { prime_cutoff: u64, m_max: u32 },
    OrbitLength { cutoff: f64 },
    Custom { description: String },
}

/// `N̄(k) + Im Σ_p A_p e^{i L_p k}` with harmonics sorted by length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaircaseExpansion {
    average: CountingModel,
    harmonics: Vec<Harmonic>,
    truncation: Truncation,
    /// Gaussian length damping scale `Λ`: amplitudes are multiplied by
    /// `exp(−(L/Λ)²)`. Off unless set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    damping: Option<f64>,
}

impl StaircaseExpansion {
    pub fn new(
        average: CountingModel,
        mut harmonics: Vec<Harmonic>,
        truncation: Truncation,
    ) -> Result<Self, TraceError> {
        for (i, h) in harmonics.iter().enumerate() {
            let ok = h.length > 0.0
                && h.length.is_finite()
                && h.amplitude.re.is_finite()
                && h.amplitude.im.is_finite();
            if !ok {
                return Err(TraceError::InvalidHarmonic(i));
            }
        }
        harmonics.sort_by(|a, b| a.length.total_cmp(&b.length));
        Ok(Self {
            average,
            harmonics,
            truncation,
            damping: None,
        })
    }

    /// Pure average, no oscillating part.
    pub fn smooth(average: CountingModel) -> Self {
        Self {
            average,
            harmonics: Vec::new(),
            truncation: Truncation::None,
            damping: None,
        }
    }

    pub fn with_damping(mut self, scale: Option<f64>) -> Result<Self, TraceError> {
        if let Some(l) = scale {
            if !(l > 0.0 && l.is_finite()) {
                return Err(TraceError::InvalidDamping(l));
            }
        }
        self.damping = scale;
        Ok(self)
    }

    pub fn average(&self) -> &CountingModel {
        &self.average
    }

    pub fn harmonics(&self) -> &[Harmonic] {
        &self.harmonics
    }

    pub fn truncation(&self) -> &Truncation {
        &self.truncation
    }

    pub fn damping(&self) -> Option<f64> {
        self.damping
    }

    /// Keeps harmonics with `L ≤ cutoff`.
    pub fn truncated(&self, cutoff: f64) -> Self {
        let end = self.harmonics.partition_point(|h| h.length <= cutoff);
        Self {
            average: self.average.clone(),
            harmonics: self.harmonics[..end].to_vec(),
            truncation: Truncation::OrbitLength { cutoff },
            damping: self.damping,
        }
    }

    fn weight(&self, h: &Harmonic) -> f64 {
        match self.damping {
            Some(l) => (-(h.length / l).powi(2)).exp(),
            None => 1.0,
        }
    }

    fn check_domain(&self, k: f64) -> Result<(), TraceError> {
        if self.average.domain().contains(k) {
            Ok(())
        } else {
            Err(TraceError::OutOfDomain(k))
        }
    }

    /// Oscillating part `Im Σ A_p e^{i L_p k}` only.
    pub fn oscillating(&self, k: f64) -> f64 {
        self.harmonics
            .iter()
            .map(|h| self.weight(h) * h.eval(k))
            .collect::<CompensatedSum>()
            .value()
    }

    fn oscillating_integral(&self, a: f64, b: f64) -> f64 {
        self.harmonics
            .iter()
            .map(|h| self.weight(h) * h.integral(a, b))
            .collect::<CompensatedSum>()
            .value()
    }

    /// `∫_a^b N̄(k) dk`.
    pub fn average_integral(&self, a: f64, b: f64) -> Result<f64, TraceError> {
        average_integral(&self.average, a, b)
    }
}

/// `∫_a^b N̄(k) dk`: closed form for linear and polynomial models, adaptive
/// Simpson otherwise.
pub fn average_integral(model: &CountingModel, a: f64, b: f64) -> Result<f64, TraceError> {
    match model {
        CountingModel::WeylLinear {
            total_length,
            offset,
        } => Ok(total_length / PI * 0.5 * (b * b - a * a) + offset * (b - a)),
        CountingModel::PolynomialFit { coefficients, .. } => {
            let anti = |x: f64| {
                coefficients
                    .iter()
                    .enumerate()
                    .rev()
                    .fold(0.0, |acc, (i, &c)| acc * x + c / (i + 1) as f64)
                    * x
            };
            Ok(anti(b) - anti(a))
        }
        CountingModel::RiemannVonMangoldt | CountingModel::LocalSpacing => {
            adaptive_simpson(|x| model.eval_unchecked(x), a, b, AVERAGE_QUADRATURE_TOL).map_err(
                |e| TraceError::QuadratureFailure {
                    estimate: e.estimate,
                },
            )
        }
    }
}

/// A counting function that can be evaluated and integrated over `k`.
pub trait Staircase {
    fn count(&self, k: f64) -> Result<f64, TraceError>;
    /// `∫_a^b N(k) dk`.
    fn count_integral(&self, a: f64, b: f64) -> Result<f64, TraceError>;
}

impl Staircase for StaircaseExpansion {
    fn count(&self, k: f64) -> Result<f64, TraceError> {
        staircase_eval(self, k)
    }

    fn count_integral(&self, a: f64, b: f64) -> Result<f64, TraceError> {
        self.check_domain(a)?;
        self.check_domain(b)?;
        Ok(self.average_integral(a, b)? + self.oscillating_integral(a, b))
    }
}

/// Exact step counting function `N(k) = base + Σ_n m_n Θ(k − k_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepStaircase {
    jumps: Vec<f64>,
    weights: Vec<f64>,
    base: f64,
}

impl StepStaircase {
    pub fn new(seq: &SpectralSequence) -> Self {
        Self {
            jumps: seq.values().to_vec(),
            weights: (0..seq.len()).map(|i| seq.multiplicity(i) as f64).collect(),
            base: 0.0,
        }
    }

    pub fn from_jumps(jumps: Vec<f64>) -> Self {
        let weights = vec![1.0; jumps.len()];
        Self {
            jumps,
            weights,
            base: 0.0,
        }
    }
}

impl Staircase for StepStaircase {
    fn count(&self, k: f64) -> Result<f64, TraceError> {
        let end = self.jumps.partition_point(|&x| x <= k);
        Ok(self.base + self.weights[..end].iter().sum::<f64>())
    }

    fn count_integral(&self, a: f64, b: f64) -> Result<f64, TraceError> {
        let mut total = self.base * (b - a);
        for (&x, &w) in self.jumps.iter().zip(&self.weights) {
            if x < b {
                total += w * (b - x.max(a));
            }
        }
        Ok(total)
    }
}

/// `N̄(k) + Im Σ_p A_p e^{i L_p k}`, summed in ascending `L_p`.
pub fn staircase_eval(x: &StaircaseExpansion, k: f64) -> Result<f64, TraceError> {
    x.check_domain(k)?;
    Ok(x.average.eval_unchecked(k) + x.oscillating(k))
}

/// `∫_a^b k dN(k) = b N(b) − a N(a) − ∫_a^b N(k) dk`.
pub fn integral_k_dn<S: Staircase + ?Sized>(x: &S, a: f64, b: f64) -> Result<f64, TraceError> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(TraceError::InvalidInterval { a, b });
    }
    let nb = x.count(b)?;
    let na = x.count(a)?;
    Ok(b * nb - a * na - x.count_integral(a, b)?)
}

/// `∫_a^b k dN(k)` with the staircase pinned to `na` at `a` and `nb` at `b`:
/// `b·nb − a·na − ∫_a^b N(k) dk`.
///
/// When the separators are points where the true staircase takes known
/// integer values, this removes the truncation error of the boundary terms,
/// which would otherwise be amplified by `a` and `b`.
pub fn integral_k_dn_pinned<S: Staircase + ?Sized>(
    x: &S,
    a: f64,
    b: f64,
    na: f64,
    nb: f64,
) -> Result<f64, TraceError> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(TraceError::InvalidInterval { a, b });
    }
    Ok(b * nb - a * na - x.count_integral(a, b)?)
}

/// As [`reconstruct_levels`] with the staircase pinned to
/// `first_count + i` at separator `i`.
pub fn reconstruct_levels_pinned<S: Staircase + ?Sized>(
    x: &S,
    separators: &HierarchyLevel,
    first_count: f64,
) -> Result<Vec<f64>, TraceError> {
    let s = separators.values();
    if s.len() < 2 {
        return Err(SequenceError::TooShort {
            len: s.len(),
            min: 2,
        }
        .into());
    }
    s.windows(2)
        .enumerate()
        .map(|(i, w)| {
            let na = first_count + i as f64;
            integral_k_dn_pinned(x, w[0], w[1], na, na + 1.0)
        })
        .collect()
}

/// Applies [`integral_k_dn`] to each adjacent pair of `separators`.
///
/// Each interval is assumed to contain exactly one level; this is not checked.
pub fn reconstruct_spectrum<S: Staircase + ?Sized>(
    x: &S,
    separators: &HierarchyLevel,
) -> Result<SpectralSequence, TraceError> {
    Ok(SpectralSequence::new(
        reconstruct_levels(x, separators)?,
        "reconstructed",
    )?)
}

/// As [`reconstruct_spectrum`], without requiring the results to increase.
/// Useful for studying poorly converged expansions.
pub fn reconstruct_levels<S: Staircase + ?Sized>(
    x: &S,
    separators: &HierarchyLevel,
) -> Result<Vec<f64>, TraceError> {
    let s = separators.values();
    if s.len() < 2 {
        return Err(SequenceError::TooShort {
            len: s.len(),
            min: 2,
        }
        .into());
    }
    s.windows(2).map(|w| integral_k_dn(x, w[0], w[1])).collect()
}

/// Primes `p ≤ n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        out.push(p as u64);
        let mut q = p * p;
        while q <= n {
            composite[q] = true;
            q += p;
        }
    }
    out
}

/// Prime-sum expansion of the zeta-zero staircase:
/// `L = m ln p`, `A = −1/(π m p^{m/2})` for `p ≤ prime_cutoff`, `m ≤ m_max`.
pub fn riemann_expansion(prime_cutoff: u64, m_max: u32) -> StaircaseExpansion {
    let mut harmonics = Vec::new();
    for p in primes_up_to(prime_cutoff) {
        let lp = (p as f64).ln();
        for m in 1..=m_max {
            let mf = m as f64;
            let amp = -1.0 / (PI * mf * (p as f64).powf(0.5 * mf));
            harmonics.push(Harmonic::real(amp, mf * lp));
        }
    }
    StaircaseExpansion::new(
        CountingModel::RiemannVonMangoldt,
        harmonics,
        Truncation::PrimeSum {
            prime_cutoff,
            m_max,
        },
    )
    .expect("prime harmonics are finite")
}

/// Levels of a regular staircase from the periodic separators
/// `N̄ = n − 1 + γ − ½` and `N̄ = n + γ − ½`, for every `n` in `n_range`.
///
/// `gamma` defaults to ½, the lattice centred on the mean level positions.
/// The lattice separates a regular spectrum, so the staircase is pinned to
/// `n − 1` and `n` at the ends of interval `n`.
/// Fails with `NotRegular` when an interval does not hold exactly one level
/// of the expansion's staircase or the recovered level falls outside it.
pub fn regular_graph_spectrum(
    x: &StaircaseExpansion,
    n_range: RangeInclusive<usize>,
    gamma: Option<f64>,
) -> Result<SpectralSequence, TraceError> {
    let gamma = gamma.unwrap_or(0.5);
    let (lo, hi) = (*n_range.start(), *n_range.end());
    if lo == 0 || hi < lo {
        return Err(SequenceError::Degenerate("level range must be non-empty and 1-based").into());
    }
    let sep = |m: usize| x.average.invert(m as f64 + gamma - 1.5);
    let mut values = Vec::with_capacity(hi - lo + 1);
    let mut a = sep(lo)?;
    for n in lo..=hi {
        let b = sep(n + 1)?;
        let jump = x.count(b)? - x.count(a)?;
        if (jump - 1.0).abs() > 0.5 {
            return Err(TraceError::NotRegular {
                n,
                reason: "separator interval does not hold one level",
            });
        }
        let k = integral_k_dn_pinned(x, a, b, n as f64 - 1.0, n as f64)?;
        if !(a <= k && k <= b) {
            return Err(TraceError::NotRegular {
                n,
                reason: "reconstructed level outside its separator interval",
            });
        }
        values.push(k);
        a = b;
    }
    Ok(SpectralSequence::new(values, "regular")?)
}
