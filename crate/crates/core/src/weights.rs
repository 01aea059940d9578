//! Weight multiplicity series `uwt(x, t)` in `Z((t^-1))`.
//!
//! For a class in the Tate subring the series is read off the `L`-normal form:
//! the `L^k` coefficient contributes `|c_k|` at weight `2k`, and odd weights
//! vanish. The true invariant is an infimum over all representatives, so
//! every series produced here is an upper bound for it. Sums and products of
//! classes are bounded by sums and convolutions of their series.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_traits::{Signed, Zero};

use crate::catalog::{SymPoly, SymbolTable};
use crate::completed::CompletedClass;
use crate::error::Result;
use crate::lring::{write_terms, IntLaurent};

/// Non-negative multiplicities indexed by weight, bounded above.
///
/// With `floor = Some(f)` only weights `>= f` are known.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightSeries {
    mult: BTreeMap<i64, BigUint>,
    floor: Option<i64>,
    closed_form: Option<(IntLaurent, u32)>,
}

impl WeightSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The series `t^n`.
    pub fn monomial(n: i64) -> Self {
        Self::from_pairs([(n, 1u32)])
    }

    pub fn from_pairs<I, M>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (i64, M)>,
        M: Into<BigUint>,
    {
        let mut out = Self::zero();
        for (n, m) in pairs {
            out.add_at(n, m.into());
        }
        out
    }

    fn add_at(&mut self, n: i64, m: BigUint) {
        if m.is_zero() || self.floor.is_some_and(|f| n < f) {
            return;
        }
        *self.mult.entry(n).or_default() += m;
    }

    /// Expansion of `φ(t)/(t-1)^d` in `t^-1`, down to weight `floor`.
    pub fn from_closed_form(phi: &IntLaurent, d: u32, floor: i64) -> Self {
        let mut out = Self {
            mult: BTreeMap::new(),
            floor: Some(floor),
            closed_form: Some((phi.clone(), d)),
        };
        if let Some(top) = phi.degree() {
            for n in (floor..=top).rev() {
                let c = closed_form_coeff(phi, d, n);
                if c.is_negative() {
                    panic!("closed form needs non-negative φ");
                }
                out.add_at(n, c.magnitude().clone());
            }
        }
        out
    }

    pub fn closed_form(&self) -> Option<&(IntLaurent, u32)> {
        self.closed_form.as_ref()
    }

    pub fn floor(&self) -> Option<i64> {
        self.floor
    }

    pub fn with_floor(mut self, floor: i64) -> Self {
        let floor = self.floor.map_or(floor, |f| f.max(floor));
        self.mult.retain(|n, _| *n >= floor);
        self.floor = Some(floor);
        self
    }

    pub fn coeff(&self, n: i64) -> BigUint {
        self.mult.get(&n).cloned().unwrap_or_default()
    }

    pub fn top(&self) -> Option<i64> {
        self.mult.keys().next_back().copied()
    }

    /// Nonzero multiplicities in decreasing weight.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigUint)> + '_ {
        self.mult.iter().rev().map(|(n, m)| (*n, m))
    }

    pub fn scale(&self, c: &BigUint) -> Self {
        let mut out = Self {
            floor: self.floor,
            ..Self::default()
        };
        for (n, m) in &self.mult {
            out.add_at(*n, m * c);
        }
        out
    }

    /// Multiplication by `t^n`.
    pub fn shift(&self, n: i64) -> Self {
        Self {
            mult: self.mult.iter().map(|(k, m)| (k + n, m.clone())).collect(),
            floor: self.floor.map(|f| f + n),
            closed_form: None,
        }
    }

    /// Coefficientwise sum.
    pub fn add(&self, other: &Self) -> Self {
        let floor = match (self.floor, other.floor) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let mut out = Self {
            floor,
            ..Self::default()
        };
        for (n, m) in self.mult.iter().chain(&other.mult) {
            out.add_at(*n, m.clone());
        }
        out
    }

    /// Convolution; the floor propagates as for completed products.
    pub fn mul(&self, other: &Self) -> Self {
        let floor = match (self.floor, other.floor) {
            (None, None) => None,
            (fa, fb) => {
                let a = fa.zip(other.top()).map(|(f, t)| f + t);
                let b = fb.zip(self.top()).map(|(f, t)| f + t);
                match (a, b) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (Some(x), None) | (None, Some(x)) => Some(x),
                    (None, None) => Some(fa.unwrap_or(0) + fb.unwrap_or(0) - 1),
                }
            }
        };
        let mut out = Self {
            floor,
            ..Self::default()
        };
        for (n1, m1) in &self.mult {
            for (n2, m2) in &other.mult {
                out.add_at(n1 + n2, m1 * m2);
            }
        }
        out
    }

    /// Coefficientwise `self <= other` on the weights both sides know.
    pub fn le(&self, other: &Self) -> bool {
        let floor = match (self.floor, other.floor) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self.mult
            .iter()
            .filter(|(n, _)| floor.map_or(true, |f| **n >= f))
            .all(|(n, m)| *m <= other.coeff(*n))
    }
}

/// Coefficient of `t^n` in `φ(t)/(t-1)^d` expanded in `t^-1`.
fn closed_form_coeff(phi: &IntLaurent, d: u32, n: i64) -> BigInt {
    // 1/(t-1)^d = Σ_{i≥0} C(i+d-1, d-1) t^{-d-i}
    let mut acc = BigInt::zero();
    for (j, c) in phi.terms() {
        let m = n - j;
        let b = if d == 0 {
            BigInt::from(u8::from(m == 0))
        } else if m <= -(d as i64) {
            let i = (-m - d as i64) as u64;
            BigInt::from(binomial(i + d as u64 - 1, d as u64 - 1))
        } else {
            BigInt::zero()
        };
        acc += c * b;
    }
    acc
}

/// Surrogate weight series of an exact Laurent polynomial.
pub fn weight_series(x: &IntLaurent) -> WeightSeries {
    WeightSeries::from_pairs(x.terms().map(|(k, c)| (2 * k, c.magnitude().clone())))
}

/// Surrogate weight series of a truncated series; known down to weight `2·floor`.
pub fn weight_series_completed(x: &CompletedClass) -> WeightSeries {
    let ws = WeightSeries::from_pairs(x.terms().map(|(k, c)| (2 * k, c.magnitude().clone())));
    match x.floor() {
        Some(f) => ws.with_floor(2 * f),
        None => ws,
    }
}

/// Weight series of a series over the symbol ring; each symbol contributes its
/// declared weight series.
pub fn weight_series_symbolic(
    x: &CompletedClass<SymPoly>,
    table: &SymbolTable,
) -> Result<WeightSeries> {
    let mut acc = WeightSeries::zero();
    for (k, c) in x.terms() {
        acc = acc.add(&c.weight(table)?.shift(2 * k));
    }
    Ok(match x.floor() {
        Some(f) => acc.with_floor(2 * f),
        None => acc,
    })
}

/// Whether every represented multiplicity of `ws` is at most the matching
/// coefficient of `φ(t)/(t-1)^d`.
pub fn dominated_by(ws: &WeightSeries, phi: &IntLaurent, d: u32) -> bool {
    assert!(
        phi.terms().all(|(_, c)| !c.is_negative()),
        "φ must have non-negative coefficients"
    );
    ws.terms().all(|(n, m)| {
        if ws.floor.is_some_and(|f| n < f) {
            return true;
        }
        let bound = closed_form_coeff(phi, d, n);
        BigInt::from(m.clone()) <= bound
    })
}

/// Pointwise `max` of the known multiplicities.
pub fn coefficientwise_max(series: &[WeightSeries]) -> WeightSeries {
    let mut out = WeightSeries::zero();
    for s in series {
        for (n, m) in &s.mult {
            let slot = out.mult.entry(*n).or_default();
            if *m > *slot {
                *slot = m.clone();
            }
        }
    }
    out.floor = series.iter().filter_map(|s| s.floor).max();
    out
}

impl fmt::Display for WeightSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ints: Vec<(i64, BigInt)> = self
            .terms()
            .map(|(n, m)| (n, BigInt::from(m.clone())))
            .collect();
        if ints.is_empty() && self.floor.is_none() {
            return write!(f, "0");
        }
        if !ints.is_empty() {
            write_terms(f, "t", ints.iter().map(|(n, m)| (*n, m)))?;
        }
        if let Some(fl) = self.floor {
            if !ints.is_empty() {
                write!(f, " + ")?;
            }
            write!(f, "O(t^{})", fl - 1)?;
        }
        Ok(())
    }
}
