//! Spectral sequences, smooth counting models and unfolding.
//!
//! Indices are 1-based whenever they appear in a formula: the `n`-th value of
//! a sequence is stored at `values[n - 1]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{bisect_increasing, mean, BisectError, BISECTION_MAX_ITER};

/// Residual tolerance of [`CountingModel::invert`].
pub const INVERSION_TOL: f64 = 1e-10;

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SequenceError {
    #[error("value at index {0} breaks strict monotonicity")]
    NonMonotone(usize),
    #[error("value at index {0} is not finite")]
    NonFinite(usize),
    #[error("sequence too short: {len} values, need at least {min}")]
    TooShort { len: usize, min: usize },
    #[error("argument {value} outside model domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },
    #[error("sequence value at index {0} outside model domain")]
    IndexOutOfDomain(usize),
    #[error("target {0} outside the range of the counting model")]
    OutOfRange(f64),
    #[error("monotone inversion did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("counting model is not strictly increasing near {0}")]
    NonIncreasingModel(f64),
    #[error("sequence has degenerate values (multiplicity > 1) at index {0}")]
    Multiplicity(usize),
}

/// A strictly increasing list of eigenvalues (energies or momenta).
///
/// Degenerate eigenvalues are stored once, with the degeneracy recorded in
/// `multiplicities`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSequence {
    values: Vec<f64>,
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    multiplicities: Option<Vec<u32>>,
}

impl SpectralSequence {
    /// Validates `raw` as given; see [`validate_sequence`].
    pub fn new(raw: Vec<f64>, label: impl Into<String>) -> Result<Self, SequenceError> {
        check_strictly_increasing(&raw)?;
        Ok(Self {
            values: raw,
            label: label.into(),
            multiplicities: None,
        })
    }

    /// Distinct values with their degeneracies. All multiplicities must be ≥ 1.
    pub fn with_multiplicities(
        values: Vec<f64>,
        multiplicities: Vec<u32>,
        label: impl Into<String>,
    ) -> Result<Self, SequenceError> {
        check_strictly_increasing(&values)?;
        if multiplicities.len() != values.len() {
            return Err(SequenceError::Degenerate(
                "multiplicity list length mismatch",
            ));
        }
        if let Some(i) = multiplicities.iter().position(|&m| m == 0) {
            return Err(SequenceError::Multiplicity(i));
        }
        let multiplicities = if multiplicities.iter().all(|&m| m == 1) {
            None
        } else {
            Some(multiplicities)
        };
        Ok(Self {
            values,
            label: label.into(),
            multiplicities,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn multiplicities(&self) -> Option<&[u32]> {
        self.multiplicities.as_deref()
    }

    /// Multiplicity of the value stored at 0-based `i`.
    pub fn multiplicity(&self, i: usize) -> u32 {
        self.multiplicities.as_ref().map_or(1, |m| m[i])
    }

    /// Total number of eigenvalues counted with multiplicity.
    pub fn count_with_multiplicity(&self) -> usize {
        self.multiplicities
            .as_ref()
            .map_or(self.values.len(), |m| m.iter().map(|&x| x as usize).sum())
    }

    /// First `n` distinct values.
    pub fn truncated(&self, n: usize) -> Result<Self, SequenceError> {
        let n = n.min(self.values.len());
        let values = self.values[..n].to_vec();
        match &self.multiplicities {
            None => Self::new(values, self.label.clone()),
            Some(m) => Self::with_multiplicities(values, m[..n].to_vec(), self.label.clone()),
        }
    }

    /// Errors with the index of the first degenerate value, if any.
    pub fn require_simple(&self) -> Result<(), SequenceError> {
        match self
            .multiplicities
            .as_ref()
            .and_then(|m| m.iter().position(|&x| x > 1))
        {
            Some(i) => Err(SequenceError::Multiplicity(i)),
            None => Ok(()),
        }
    }

    /// Replaces each `m`-fold value `x` by `x, x + offset, ..., x + (m-1)·offset`.
    ///
    /// `offset` must be smaller than the gap to the next value.
    pub fn flatten_multiplicities(&self, offset: f64) -> Result<Self, SequenceError> {
        let Some(mult) = &self.multiplicities else {
            return Ok(self.clone());
        };
        let mut out = Vec::with_capacity(self.count_with_multiplicity());
        for (&x, &m) in self.values.iter().zip(mult) {
            for r in 0..m {
                out.push(x + f64::from(r) * offset);
            }
        }
        Self::new(out, self.label.clone())
    }
}

fn check_strictly_increasing(raw: &[f64]) -> Result<(), SequenceError> {
    if raw.len() < 2 {
        return Err(SequenceError::TooShort {
            len: raw.len(),
            min: 2,
        });
    }
    for (i, &x) in raw.iter().enumerate() {
        if !x.is_finite() {
            return Err(SequenceError::NonFinite(i));
        }
        if i > 0 && x <= raw[i - 1] {
            return Err(SequenceError::NonMonotone(i));
        }
    }
    Ok(())
}

/// Validates a raw list of eigenvalues. Indices in errors are 0-based
/// positions in `raw`.
pub fn validate_sequence(raw: &[f64], label: &str) -> Result<SpectralSequence, SequenceError> {
    SpectralSequence::new(raw.to_vec(), label)
}

/// Like [`validate_sequence`], but sorts finite input first when `allow_sort`
/// is set.
pub fn validate_sequence_sorted(
    raw: &[f64],
    label: &str,
    allow_sort: bool,
) -> Result<SpectralSequence, SequenceError> {
    if !allow_sort {
        return validate_sequence(raw, label);
    }
    if let Some(i) = raw.iter().position(|x| !x.is_finite()) {
        return Err(SequenceError::NonFinite(i));
    }
    let mut v = raw.to_vec();
    v.sort_by(f64::total_cmp);
    SpectralSequence::new(v, label)
}

/// Closed interval on which a counting model is defined and increasing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub const REAL_LINE: Domain = Domain {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn contains(&self, x: f64) -> bool {
        x.is_finite() && self.lo <= x && x <= self.hi
    }
}

/// Smooth average counting function `N̄`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CountingModel {
    /// `E/2π (ln(E/2π) − 1) + 7/8`, for zeta-zero heights.
    RiemannVonMangoldt,
    /// `total_length·k/π + offset`, the Weyl law of a metric graph.
    WeylLinear {
        total_length: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `Σ cᵢ xⁱ` on an explicit domain.
    PolynomialFit {
        coefficients: Vec<f64>,
        domain: Domain,
    },
    /// Antiderivative of the local zeta-zero density `ln(E/2π)/2π`.
    ///
    /// Unfolding with this model accumulates locally rescaled spacings
    /// `(γ_{n+1} − γ_n)·ln(γ_n/2π)/2π` instead of evaluating `N̄` pointwise.
    LocalSpacing,
}

impl CountingModel {
    pub fn weyl(total_length: f64) -> Self {
        CountingModel::WeylLinear {
            total_length,
            offset: 0.0,
        }
    }

    /// Polynomial model; checks monotonicity on 1000 sample points.
    pub fn polynomial(coefficients: Vec<f64>, domain: Domain) -> Result<Self, SequenceError> {
        if !(domain.lo.is_finite() && domain.hi.is_finite() && domain.lo < domain.hi) {
            return Err(SequenceError::Degenerate(
                "polynomial domain must be a finite interval",
            ));
        }
        let model = CountingModel::PolynomialFit {
            coefficients,
            domain,
        };
        let steps = 1000;
        let mut prev = model.eval_unchecked(domain.lo);
        for i in 1..=steps {
            let x = domain.lo + (domain.hi - domain.lo) * i as f64 / steps as f64;
            let y = model.eval_unchecked(x);
            if y <= prev {
                return Err(SequenceError::NonIncreasingModel(x));
            }
            prev = y;
        }
        Ok(model)
    }

    pub fn domain(&self) -> Domain {
        match self {
            CountingModel::RiemannVonMangoldt | CountingModel::LocalSpacing => Domain {
                lo: TWO_PI,
                hi: f64::INFINITY,
            },
            CountingModel::WeylLinear { .. } => Domain::REAL_LINE,
            CountingModel::PolynomialFit { domain, .. } => *domain,
        }
    }

    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        match self {
            CountingModel::RiemannVonMangoldt => {
                let u = x / TWO_PI;
                u * (u.ln() - 1.0) + 0.875
            }
            CountingModel::LocalSpacing => {
                let u = x / TWO_PI;
                u * (u.ln() - 1.0)
            }
            CountingModel::WeylLinear {
                total_length,
                offset,
            } => total_length * x / PI + offset,
            CountingModel::PolynomialFit { coefficients, .. } => {
                coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
            }
        }
    }

    /// `N̄(x)`.
    pub fn evaluate(&self, x: f64) -> Result<f64, SequenceError> {
        let d = self.domain();
        if !d.contains(x) {
            return Err(SequenceError::OutOfDomain {
                value: x,
                lo: d.lo,
                hi: d.hi,
            });
        }
        Ok(self.eval_unchecked(x))
    }

    /// Mean level density `dN̄/dx`.
    pub fn density(&self, x: f64) -> f64 {
        match self {
            CountingModel::RiemannVonMangoldt | CountingModel::LocalSpacing => {
                (x / TWO_PI).ln() / TWO_PI
            }
            CountingModel::WeylLinear { total_length, .. } => total_length / PI,
            CountingModel::PolynomialFit { coefficients, .. } => coefficients
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (i, &c)| acc * x + i as f64 * c),
        }
    }

    /// Solves `N̄(x) = y` by bracketing and bisection.
    pub fn invert(&self, y: f64) -> Result<f64, SequenceError> {
        if !y.is_finite() {
            return Err(SequenceError::OutOfRange(y));
        }
        let d = self.domain();
        let f = |x: f64| self.eval_unchecked(x);
        let lo = if d.lo.is_finite() {
            d.lo
        } else {
            expand_bracket(|x| f(x) <= y, -1.0, -1.0).ok_or(SequenceError::OutOfRange(y))?
        };
        let hi = if d.hi.is_finite() {
            d.hi
        } else {
            let start = lo.max(0.0) + 1.0;
            expand_bracket(|x| f(x) >= y, start, start).ok_or(SequenceError::OutOfRange(y))?
        };
        match bisect_increasing(f, y, lo, hi, INVERSION_TOL, BISECTION_MAX_ITER) {
            Ok(x) => Ok(x),
            Err(BisectError::NotBracketed) => Err(SequenceError::OutOfRange(y)),
            Err(BisectError::NoConvergence { iterations }) => {
                Err(SequenceError::NoConvergence(iterations))
            }
        }
    }
}

/// Moves `x` by doubling steps of sign `step` until `ok(x)` holds.
fn expand_bracket<P: Fn(f64) -> bool>(ok: P, mut x: f64, mut step: f64) -> Option<f64> {
    for _ in 0..2100 {
        if !x.is_finite() {
            return None;
        }
        if ok(x) {
            return Some(x);
        }
        x += step;
        step *= 2.0;
    }
    None
}

/// Convenience wrapper over [`CountingModel::evaluate`].
pub fn evaluate_average(model: &CountingModel, x: f64) -> Result<f64, SequenceError> {
    model.evaluate(x)
}

/// Convenience wrapper over [`CountingModel::invert`].
pub fn invert_average(model: &CountingModel, y: f64) -> Result<f64, SequenceError> {
    model.invert(y)
}

/// Unit-density sequence `k_n = n + δ_n` obtained from a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnfoldedSequence {
    values: Vec<f64>,
    deltas: Vec<f64>,
    source_label: String,
    model: CountingModel,
}

impl UnfoldedSequence {
    /// Wraps already-unfolded values (e.g. synthetic input).
    pub fn from_values(
        values: Vec<f64>,
        model: CountingModel,
        label: impl Into<String>,
    ) -> Result<Self, SequenceError> {
        check_strictly_increasing(&values)?;
        let deltas = deltas_of(&values);
        Ok(Self {
            values,
            deltas,
            source_label: label.into(),
            model,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `δ_n = k_n − n`, 1-based `n`.
    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn model(&self) -> &CountingModel {
        &self.model
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean_delta(&self) -> f64 {
        mean(&self.deltas)
    }

    /// Maps the unfolded values back to physical units through `N̄⁻¹(k − ½)`.
    pub fn refold(&self) -> Result<Vec<f64>, SequenceError> {
        self.values
            .iter()
            .map(|&k| self.model.invert(k - 0.5))
            .collect()
    }
}

pub(crate) fn deltas_of(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .enumerate()
        .map(|(i, &k)| k - (i + 1) as f64)
        .collect()
}

/// Unfolds `seq` to unit mean density: `k_n = N̄(E_n) + ½`.
///
/// The half shift moves staircase midpoints onto the integers so that the
/// fluctuations `δ_n` average to zero.
pub fn unfold(
    seq: &SpectralSequence,
    model: &CountingModel,
) -> Result<UnfoldedSequence, SequenceError> {
    let domain = model.domain();
    if let Some(i) = seq.values().iter().position(|&x| !domain.contains(x)) {
        return Err(SequenceError::IndexOutOfDomain(i));
    }
    let values: Vec<f64> = match model {
        CountingModel::LocalSpacing => {
            let v = seq.values();
            let mut out = Vec::with_capacity(v.len());
            let mut k = model.eval_unchecked(v[0]) + 0.5;
            out.push(k);
            for w in v.windows(2) {
                k += (w[1] - w[0]) * model.density(w[0]);
                out.push(k);
            }
            out
        }
        _ => seq
            .values()
            .iter()
            .map(|&x| model.eval_unchecked(x) + 0.5)
            .collect(),
    };
    if let Some(i) = values.windows(2).position(|w| w[1] <= w[0]) {
        return Err(SequenceError::NonMonotone(i + 1));
    }
    let deltas = deltas_of(&values);
    Ok(UnfoldedSequence {
        values,
        deltas,
        source_label: seq.label().to_owned(),
        model: model.clone(),
    })
}

/// Least-squares Weyl line `N̄(E) = L0·E/π + c` through the points
/// `(E_n, n − ½)`.
pub fn fit_linear_average(seq: &SpectralSequence) -> Result<CountingModel, SequenceError> {
    let v = seq.values();
    if v.len() < 10 {
        return Err(SequenceError::TooShort {
            len: v.len(),
            min: 10,
        });
    }
    let xs = v;
    let ys: Vec<f64> = (1..=v.len()).map(|n| n as f64 - 0.5).collect();
    let mx = mean(xs);
    let my = mean(&ys);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 || !sxx.is_finite() {
        return Err(SequenceError::Degenerate("zero variance input"));
    }
    let slope = sxy / sxx;
    if slope <= 0.0 {
        return Err(SequenceError::Degenerate("non-positive slope"));
    }
    Ok(CountingModel::WeylLinear {
        total_length: slope * PI,
        offset: my - slope * mx,
    })
}
