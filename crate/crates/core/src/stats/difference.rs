//! The difference operator `Δx(n) = x(n) − x(n+1)` on finite integer
//! sequences.
//!
//! Without a modulus, `Δ` drops the last element. With a modulus `M` the
//! sequence is read cyclically (`x(N+1) = x(1)`), values live in `Z/M`, and
//! `Δ` preserves the length, so every orbit `x, Δx, Δ²x, …` is eventually
//! periodic.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::StatsError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteSymbolSequence {
    symbols: Vec<i64>,
    modulus: Option<u64>,
}

impl FiniteSymbolSequence {
    /// Plain integer sequence.
    pub fn new(symbols: Vec<i64>) -> Self {
        Self {
            symbols,
            modulus: None,
        }
    }

    /// Cyclic sequence over `Z/M`; every symbol must lie in `[0, M)`.
    pub fn cyclic(symbols: Vec<i64>, modulus: u64) -> Result<Self, StatsError> {
        if modulus == 0 {
            return Err(StatsError::ZeroModulus);
        }
        if let Some(index) = symbols.iter().position(|&s| s < 0 || s as u64 >= modulus) {
            return Err(StatsError::SymbolOutOfRange {
                index,
                value: symbols[index],
                modulus,
            });
        }
        Ok(Self {
            symbols,
            modulus: Some(modulus),
        })
    }

    /// Digits of `text` as a cyclic sequence mod `modulus`, e.g. `"0101"`
    /// over `Z/2`. Non-digit characters are rejected.
    pub fn parse_digits(text: &str, modulus: u64) -> Result<Self, StatsError> {
        let mut symbols = Vec::with_capacity(text.len());
        for (index, c) in text.trim().chars().enumerate() {
            let value = c.to_digit(10).map(i64::from).unwrap_or(-1);
            if value < 0 {
                return Err(StatsError::SymbolOutOfRange {
                    index,
                    value,
                    modulus,
                });
            }
            symbols.push(value);
        }
        Self::cyclic(symbols, modulus)
    }

    /// `⌊scale·v⌋` of each value, reduced mod `modulus` when given.
    ///
    /// An explicit, exploratory discretisation for real-valued data such as
    /// level fluctuations.
    pub fn quantize(values: &[f64], scale: f64, modulus: Option<u64>) -> Result<Self, StatsError> {
        let raw: Vec<i64> = values.iter().map(|v| (v * scale).floor() as i64).collect();
        match modulus {
            None => Ok(Self::new(raw)),
            Some(m) => {
                if m == 0 {
                    return Err(StatsError::ZeroModulus);
                }
                Self::cyclic(raw.iter().map(|s| s.rem_euclid(m as i64)).collect(), m)
            }
        }
    }

    pub fn symbols(&self) -> &[i64] {
        &self.symbols
    }

    pub fn modulus(&self) -> Option<u64> {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.symbols.iter().all(|&s| s == 0)
    }
}

impl fmt::Display for FiniteSymbolSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let all_digits = self.symbols.iter().all(|s| (0..10).contains(s));
        let sep = if all_digits { "" } else { " " };
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// `Δx(n) = x(n) − x(n+1)`.
pub fn difference(x: &FiniteSymbolSequence) -> Result<FiniteSymbolSequence, StatsError> {
    let s = &x.symbols;
    if s.len() < 2 {
        return Err(StatsError::TooShort {
            len: s.len(),
            min: 2,
        });
    }
    let symbols = match x.modulus {
        None => s.windows(2).map(|w| w[0] - w[1]).collect(),
        Some(m) => {
            let n = s.len();
            (0..n)
                .map(|i| (s[i] - s[(i + 1) % n]).rem_euclid(m as i64))
                .collect()
        }
    };
    Ok(FiniteSymbolSequence {
        symbols,
        modulus: x.modulus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolyDegree {
    Degree(usize),
    NotPolynomial,
}

/// Smallest `l ≤ l_max` with `Δ^l x = 0`, reported as degree `l − 1`.
///
/// For plain sequences the search stops once `Δ^l x` would be empty, so a
/// length-`N` sequence can be recognised up to degree `N − 2`.
pub fn poly_degree(x: &FiniteSymbolSequence, l_max: usize) -> PolyDegree {
    let mut y = x.clone();
    for l in 1..=l_max {
        match difference(&y) {
            Ok(next) => y = next,
            Err(_) => return PolyDegree::NotPolynomial,
        }
        if y.is_empty() {
            return PolyDegree::NotPolynomial;
        }
        if y.is_zero() {
            return PolyDegree::Degree(l - 1);
        }
    }
    PolyDegree::NotPolynomial
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpOrder {
    Order(usize),
    NoOrder,
}

/// Smallest `q ≤ q_max` with `Δ^q x = x` (cyclic sequences only).
pub fn exp_order(x: &FiniteSymbolSequence, q_max: usize) -> Result<ExpOrder, StatsError> {
    if x.modulus.is_none() {
        return Err(StatsError::RequiresModulus);
    }
    let mut y = x.clone();
    for q in 1..=q_max {
        y = difference(&y)?;
        if y == *x {
            return Ok(ExpOrder::Order(q));
        }
    }
    Ok(ExpOrder::NoOrder)
}

/// Position of a cyclic sequence in the `Δ` dynamics: the orbit
/// `x, Δx, Δ²x, …` enters a cycle of length `order` after `tail` steps.
///
/// Sequences compare by order first, then by tail. A polynomial of degree `m`
/// has order 1 and tail `m + 1`; a sequence lying on a cycle has tail 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ComplexityIndex {
    pub order: usize,
    pub tail: usize,
}

impl ComplexityIndex {
    /// `tail − 1`: the polynomial degree of the transient part, −1 if none.
    pub fn degree(&self) -> i64 {
        self.tail as i64 - 1
    }
}

/// Iterates `Δ` until a sequence repeats. Cyclic sequences only; the state
/// space is finite, so this always terminates.
pub fn complexity_index(x: &FiniteSymbolSequence) -> Result<ComplexityIndex, StatsError> {
    if x.modulus.is_none() {
        return Err(StatsError::RequiresModulus);
    }
    let mut seen: HashMap<FiniteSymbolSequence, usize> = HashMap::new();
    let mut y = x.clone();
    let mut step = 0;
    loop {
        if let Some(&first) = seen.get(&y) {
            return Ok(ComplexityIndex {
                order: step - first,
                tail: first,
            });
        }
        let next = difference(&y)?;
        seen.insert(y, step);
        y = next;
        step += 1;
    }
}
