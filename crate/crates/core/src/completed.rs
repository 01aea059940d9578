//! The dimension-filtered completion: Laurent series in `L^-1` carrying an
//! explicit precision floor, and certified point counts of truncations.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::catalog::{MotivicClass, SymPoly};
use crate::error::{Error, Result};
use crate::lring::{IntLaurent, TateRational};

/// Coefficient ring of a [`CompletedClass`].
pub trait SeriesCoeff:
    Clone
    + PartialEq
    + fmt::Display
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + From<BigInt>
{
}

impl SeriesCoeff for BigInt {}
impl SeriesCoeff for SymPoly {}

/// A class known exactly at dimensions `>= floor`.
///
/// `floor == None` means the element is exact (no unknown tail). Terms below
/// the floor are never stored.
#[derive(Clone, PartialEq)]
pub struct CompletedClass<C = BigInt> {
    coeffs: BTreeMap<i64, C>,
    floor: Option<i64>,
}

impl<C: SeriesCoeff> CompletedClass<C> {
    pub fn exact_zero() -> Self {
        Self {
            coeffs: BTreeMap::new(),
            floor: None,
        }
    }

    /// Builds from `(dimension, coefficient)` pairs and a floor; terms below
    /// the floor are discarded.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, C)>, floor: Option<i64>) -> Self {
        let mut out = Self {
            coeffs: BTreeMap::new(),
            floor,
        };
        for (k, c) in terms {
            out.add_term(k, c);
        }
        out
    }

    fn add_term(&mut self, k: i64, c: C) {
        if self.floor.is_some_and(|f| k < f) || c.is_zero() {
            return;
        }
        let slot = self.coeffs.remove(&k).unwrap_or_else(C::zero);
        let sum = slot + c;
        if !sum.is_zero() {
            self.coeffs.insert(k, sum);
        }
    }

    pub fn floor(&self) -> Option<i64> {
        self.floor
    }

    pub fn is_exact(&self) -> bool {
        self.floor.is_none()
    }

    /// Largest index with nonzero coefficient; `None` stands for `-∞`.
    pub fn top(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coeff(&self, k: i64) -> C {
        self.coeffs.get(&k).cloned().unwrap_or_else(C::zero)
    }

    /// Represented terms in decreasing dimension.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> + '_ {
        self.coeffs.iter().rev().map(|(k, c)| (*k, c))
    }

    /// Raises the floor to `floor` (never lowers it) and drops the terms that
    /// fall below.
    pub fn truncate(&self, floor: i64) -> Self {
        let floor = self.floor.map_or(floor, |f| f.max(floor));
        Self::from_terms(self.coeffs.iter().map(|(k, c)| (*k, c.clone())), Some(floor))
    }

    /// Dimension of the represented class; `Ok(None)` is `-∞`.
    pub fn dim(&self) -> Result<Option<i64>> {
        match (self.top(), self.floor) {
            (Some(t), _) => Ok(Some(t)),
            (None, None) => Ok(None),
            (None, Some(f)) => Err(Error::PrecisionExhausted(f)),
        }
    }

    /// Multiplication by `L^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
            floor: self.floor.map(|f| f + k),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(
            self.coeffs.iter().map(|(k, x)| (*k, x.clone() * c.clone())),
            self.floor,
        )
    }

    pub fn map_coeffs<D: SeriesCoeff>(&self, f: impl Fn(&C) -> D) -> CompletedClass<D> {
        CompletedClass::from_terms(self.coeffs.iter().map(|(k, c)| (*k, f(c))), self.floor)
    }

    /// Point count of the represented terms plus a bound on the unknown tail.
    ///
    /// `eval` specialises a coefficient at `q`. The bound is conditional on
    /// `cert` holding for the whole series: it majorises
    /// `Σ_{k < floor} (C(2|k|)^d + D) q^k`.
    pub fn count_truncated_with(
        &self,
        q: u64,
        cert: &GrowthCertificate,
        eval: impl Fn(&C) -> Result<BigRational>,
    ) -> Result<(BigRational, BigRational)> {
        if q < 2 {
            return Err(Error::InvalidArgument(format!("q = {q} must be at least 2")));
        }
        let qr = BigRational::from_integer(q.into());
        let mut value = BigRational::zero();
        for (k, c) in &self.coeffs {
            value += eval(c)? * qr.pow(*k as i32);
        }
        let bound = match self.floor {
            None => BigRational::zero(),
            Some(f) => cert.tail_bound(q, f),
        };
        Ok((value, bound))
    }
}

impl CompletedClass<BigInt> {
    pub fn exact(x: &IntLaurent) -> Self {
        Self::from_terms(x.terms().map(|(e, c)| (e, c.clone())), None)
    }

    /// Expansion of a localised class in `L^-1`, exact at dimensions `>= floor`.
    ///
    /// Uses `1/(L^n - 1) = Σ_{e≥1} L^{-ne}`; the product of those geometric
    /// series is accumulated as an unbounded knapsack count.
    pub fn expand(x: &TateRational, floor: i64) -> Self {
        let den = x.den();
        if den.factors().is_empty() {
            return Self::exact(&x.num().shift(-(den.l_power() as i64))).truncate_if_needed(floor);
        }
        let shift = den.l_power() as i64;
        let Some(num_top) = x.num().degree() else {
            return Self::from_terms([], Some(floor));
        };
        // Coefficient at L^k is Σ_j num_j · p(j - shift - k), p the knapsack count.
        let depth = num_top - shift - floor;
        if depth < 0 {
            return Self::from_terms([], Some(floor));
        }
        let depth = depth as usize;
        let mut p = vec![BigInt::zero(); depth + 1];
        // Σ_{e≥1} u^{ne} = u^n · Σ_{e≥0} u^{ne}; start from u^{Σn}.
        let offset: u64 = den.factors().iter().sum();
        if (offset as usize) <= depth {
            p[offset as usize] = BigInt::one();
            for &n in den.factors() {
                let n = n as usize;
                for j in n..=depth {
                    let prev = p[j - n].clone();
                    p[j] += prev;
                }
            }
        }
        let mut out = Self {
            coeffs: BTreeMap::new(),
            floor: Some(floor),
        };
        for (j, c) in x.num().terms() {
            for (s, ps) in p.iter().enumerate() {
                if ps.is_zero() {
                    continue;
                }
                let k = j - shift - s as i64;
                if k < floor {
                    break;
                }
                out.add_term(k, c * ps);
            }
        }
        out
    }

    fn truncate_if_needed(self, floor: i64) -> Self {
        // Exact Laurent polynomials stay exact; callers asking for a floor get it
        // only when terms would actually be lost.
        match self.coeffs.keys().next() {
            Some(&low) if low < floor => self.truncate(floor),
            _ => self,
        }
    }

    pub fn count_truncated(
        &self,
        q: u64,
        cert: &GrowthCertificate,
    ) -> Result<(BigRational, BigRational)> {
        self.count_truncated_with(q, cert, |c| Ok(BigRational::from_integer(c.clone())))
    }
}

fn max_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) | (None, x) => x,
    }
}

impl<C: SeriesCoeff> CompletedClass<C> {
    fn combine(&self, rhs: &Self, negate: bool) -> Self {
        let floor = max_opt(self.floor, rhs.floor);
        let mut out = Self::from_terms(self.coeffs.iter().map(|(k, c)| (*k, c.clone())), floor);
        for (k, c) in &rhs.coeffs {
            out.add_term(*k, if negate { -c.clone() } else { c.clone() });
        }
        out
    }

    fn product(&self, rhs: &Self) -> Self {
        let exact_zero = |x: &Self| x.is_exact() && x.coeffs.is_empty();
        if exact_zero(self) || exact_zero(rhs) {
            return Self::exact_zero();
        }
        // Unknown tail of one factor times the top of the other.
        let floor = match (self.floor, rhs.floor) {
            (None, None) => None,
            (fa, fb) => {
                let ta = fa.and(rhs.top()).map(|t| fa.unwrap() + t);
                let tb = fb.and(self.top()).map(|t| fb.unwrap() + t);
                match max_opt(ta, tb) {
                    Some(f) => Some(f),
                    // Both sides are zero to precision.
                    None => Some(fa.unwrap_or(0) + fb.unwrap_or(0) - 1),
                }
            }
        };
        let mut out = Self {
            coeffs: BTreeMap::new(),
            floor,
        };
        for (k1, c1) in &self.coeffs {
            for (k2, c2) in &rhs.coeffs {
                out.add_term(k1 + k2, c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<C: SeriesCoeff> Add for &CompletedClass<C> {
    type Output = CompletedClass<C>;
    fn add(self, rhs: Self) -> CompletedClass<C> {
        self.combine(rhs, false)
    }
}

impl<C: SeriesCoeff> Sub for &CompletedClass<C> {
    type Output = CompletedClass<C>;
    fn sub(self, rhs: Self) -> CompletedClass<C> {
        self.combine(rhs, true)
    }
}

impl<C: SeriesCoeff> Mul for &CompletedClass<C> {
    type Output = CompletedClass<C>;
    fn mul(self, rhs: Self) -> CompletedClass<C> {
        self.product(rhs)
    }
}

impl<C: SeriesCoeff> Neg for &CompletedClass<C> {
    type Output = CompletedClass<C>;
    fn neg(self) -> CompletedClass<C> {
        CompletedClass {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c.clone())).collect(),
            floor: self.floor,
        }
    }
}

/// Dimension of an exact localised class; `None` is `-∞`.
pub fn dim_tate(x: &TateRational) -> Option<i64> {
    x.dim()
}

/// Expansion of a class with symbols: each `TateRational` coefficient is
/// expanded down to `L^floor` and multiplied by its symbol monomial.
pub fn expand_symbolic(x: &MotivicClass, floor: i64) -> CompletedClass<SymPoly> {
    let mut acc = CompletedClass::from_terms([], Some(floor));
    for (m, c) in x.terms() {
        let part = CompletedClass::expand(c, floor)
            .map_coeffs(|k| SymPoly::term(k.clone(), m.clone()));
        acc = &acc + &part;
    }
    acc
}

impl<C: SeriesCoeff> fmt::Display for CompletedClass<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let power = match k {
                1 => "L".to_string(),
                _ => format!("L^{k}"),
            };
            match (k, c.to_string().as_str()) {
                (0, s) => write!(f, "{s}")?,
                (_, "1") => write!(f, "{power}")?,
                (_, "-1") => write!(f, "-{power}")?,
                (_, s) => write!(f, "{s}*{power}")?,
            }
        }
        if let Some(fl) = self.floor {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "O(L^{})", fl - 1)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<C: SeriesCoeff> fmt::Debug for CompletedClass<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CompletedClass({self})")
    }
}

/// Caller-asserted growth: the count of the `L^k` coefficient is bounded by
/// `C·(2|k|)^d + D` for every `k` (dimension `k` carries weight `2k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrowthCertificate {
    pub c: u64,
    pub d: u32,
    pub big_d: u64,
}

impl GrowthCertificate {
    pub fn new(c: u64, d: u32, big_d: u64) -> Self {
        Self { c, d, big_d }
    }

    /// A certificate valid for the full expansion of `x`.
    ///
    /// With `x = N(L) L^-a / ∏_{i≤m} (L^{n_i} - 1)`, the `L^-s` coefficient of
    /// `∏ 1/(L^{n_i}-1)` counts solutions of `Σ n_i e_i = s` with `e_i ≥ 1`,
    /// at most `s^{m-1}`. Writing `M = max |j - a|` over the exponents of `N`
    /// gives `|c_k| ≤ |N|_1 · 2^{m-2} (M^{m-1} + |k|^{m-1})` for `m ≥ 2`, and
    /// `|c_k| ≤ |N|_1` for `m ≤ 1`.
    pub fn for_tate(x: &TateRational) -> Self {
        let norm = x.num().l1_norm();
        let norm: u64 = norm.try_into().expect("numerator norm fits in u64");
        let m = x.den().factors().len() as u32;
        if m <= 1 {
            return Self::new(norm, 0, 0);
        }
        let d = m - 1;
        let a = x.den().l_power() as i64;
        let big_m = x
            .num()
            .terms()
            .map(|(j, _)| (j - a).unsigned_abs())
            .max()
            .unwrap_or(0);
        let big_d = norm * (1u64 << (d - 1)) * big_m.pow(d);
        Self::new(norm, d, big_d)
    }

    /// `Σ_{k < floor} (C(2|k|)^d + D) q^k`, summed exactly.
    ///
    /// With `x = 1/q` and `S_i = Σ_{j≥0} j^i x^j`, the sum over `k ≤ -a` is
    /// `q^{-a} Σ_i binom(d, i) a^{d-i} S_i`, where
    /// `(1 - x) S_i = x Σ_{t<i} binom(i, t) S_t` and `S_0 = 1/(1 - x)`.
    /// Positive `k` are added term by term.
    pub fn tail_bound(&self, q: u64, floor: i64) -> BigRational {
        let qr = BigRational::from_integer(q.into());
        let k0 = floor - 1;
        let c = BigRational::from_integer(BigInt::from(self.c) * BigInt::from(2u32).pow(self.d));
        let big_d = BigRational::from_integer(self.big_d.into());
        c * power_sum(&qr, k0, self.d) + big_d * power_sum(&qr, k0, 0)
    }
}

/// `Σ_{k ≤ k0} |k|^d q^k` for `q > 1`.
fn power_sum(q: &BigRational, k0: i64, d: u32) -> BigRational {
    let one = BigRational::one();
    let x = q.recip();
    let mut s: Vec<BigRational> = vec![(&one - &x).recip()];
    for i in 1..=d as u64 {
        let inner: BigRational = (0..i)
            .map(|t| BigRational::from_integer(binomial(i, t)) * &s[t as usize])
            .sum();
        s.push(&x * inner / (&one - &x));
    }
    let top = k0.min(0);
    let a = BigInt::from(top.unsigned_abs());
    let neg: BigRational = (0..=d as u64)
        .map(|i| {
            BigRational::from_integer(binomial(d as u64, i) * a.pow(d - i as u32)) * &s[i as usize]
        })
        .sum();
    let mut total = neg * q.pow(top as i32);
    for k in 1..=k0 {
        total += BigRational::from_integer(BigInt::from(k).pow(d)) * q.pow(k as i32);
    }
    total
}

fn binomial(n: u64, k: u64) -> BigInt {
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use crate::lring::{class_gl, AdmissibleDenominator};

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn tail_bound_is_the_exact_sum() {
        for (cert, q, floor) in [
            (GrowthCertificate::new(1, 2, 3), 2u64, -5i64),
            (GrowthCertificate::new(2, 3, 0), 3, 4),
            (GrowthCertificate::new(0, 0, 1), 5, 0),
        ] {
            let qr = BigRational::from_integer(q.into());
            let partial: BigRational = (floor - 400..floor)
                .map(|k| {
                    let m = BigInt::from(cert.c) * BigInt::from(2 * k.unsigned_abs()).pow(cert.d)
                        + BigInt::from(cert.big_d);
                    BigRational::from_integer(m) * qr.pow(k as i32)
                })
                .sum();
            let bound = cert.tail_bound(q, floor);
            assert!(bound >= partial);
            assert!(&bound - &partial < r(1, 1_000_000_000_000));
        }
    }

    fn series(terms: &[(i64, i64)], floor: Option<i64>) -> CompletedClass {
        CompletedClass::from_terms(terms.iter().map(|&(k, c)| (k, BigInt::from(c))), floor)
    }

    #[test]
    fn expand_examples() {
        let x = TateRational::inv_l_power_minus_one(1);
        let e = CompletedClass::expand(&x, -4);
        assert_eq!(e, series(&[(-1, 1), (-2, 1), (-3, 1), (-4, 1)], Some(-4)));
        assert_eq!(e.to_string(), "L^-1 + L^-2 + L^-3 + L^-4 + O(L^-5)");

        let inv_l = TateRational::new(IntLaurent::one(), AdmissibleDenominator::new(1, vec![]));
        let e = CompletedClass::expand(&inv_l, -3);
        assert_eq!(e.top(), Some(-1));
        assert_eq!(e.coeff(-2), BigInt::zero());
        assert!(e.is_exact());

        let bgl2 = TateRational::from(class_gl(2)).inverse().unwrap();
        let e = CompletedClass::expand(&bgl2, -8);
        assert_eq!(e.top(), Some(-4));
        assert_eq!(e.coeff(-4), BigInt::one());
    }

    #[test]
    fn arithmetic_precision() {
        let a = series(&[(-1, 1)], Some(-2));
        let b = series(&[(-2, 1)], Some(-2));
        assert_eq!(&a + &b, series(&[(-1, 1), (-2, 1)], Some(-2)));
        let c = series(&[(-1, 1)], Some(-3));
        assert_eq!(&c * &c, series(&[(-2, 1)], Some(-4)));
        let inv = CompletedClass::expand(&TateRational::inv_l_power_minus_one(1), -6);
        let lm1 = CompletedClass::exact(&IntLaurent::l_power_minus_one(1));
        assert_eq!(&inv * &lm1, series(&[(0, 1)], Some(-5)));
    }

    #[test]
    fn dimension() {
        let x = CompletedClass::exact(&IntLaurent::from_terms([(3, 1), (1, 1)]));
        assert_eq!(x.dim().unwrap(), Some(3));
        assert_eq!(CompletedClass::<BigInt>::exact_zero().dim().unwrap(), None);
        assert!(matches!(
            CompletedClass::<BigInt>::from_terms([], Some(-3)).dim(),
            Err(Error::PrecisionExhausted(-3))
        ));
        for n in 1..=4 {
            let b = TateRational::from(class_gl(n)).inverse().unwrap();
            let e = CompletedClass::expand(&b, -(n as i64 * n as i64) - 2);
            assert_eq!(e.dim().unwrap(), Some(-(n as i64 * n as i64)));
            assert_eq!(dim_tate(&b), Some(-(n as i64 * n as i64)));
        }
    }

    #[test]
    fn count_examples() {
        let x = TateRational::inv_l_power_minus_one(1);
        let e = CompletedClass::expand(&x, -20);
        let (value, bound) = e.count_truncated(2, &GrowthCertificate::new(0, 0, 1)).unwrap();
        assert_eq!(value, BigRational::one() - r(1, 1 << 20));
        assert_eq!(bound, r(1, 1 << 20));
        let truth = BigRational::one();
        assert!((&value - &truth).abs() <= bound);

        let e = CompletedClass::expand(&x, -30);
        let (value, bound) = e.count_truncated(3, &GrowthCertificate::new(0, 0, 1)).unwrap();
        assert!((value - r(1, 2)).abs() <= bound);

        let sq = CompletedClass::exact(&IntLaurent::monomial(1, 2));
        let (value, bound) = sq.count_truncated(7, &GrowthCertificate::new(5, 3, 2)).unwrap();
        assert_eq!((value, bound), (r(49, 1), r(0, 1)));
    }

    #[test]
    fn tail_bound_dominates_brute_sum() {
        // Brute partial sums of Σ_{k<floor} (C(2|k|)^d + D) q^k to depth 400.
        for &(c, d, big_d) in &[(1u64, 0u32, 0u64), (2, 1, 3), (1, 2, 0), (3, 3, 7)] {
            let cert = GrowthCertificate::new(c, d, big_d);
            for q in [2u64, 3, 5] {
                for floor in [-30i64, -5, 0, 3] {
                    let qr = BigRational::from_integer(q.into());
                    let mut brute = BigRational::zero();
                    for k in (floor - 400)..floor {
                        let w = BigInt::from(c) * BigInt::from(2 * k.unsigned_abs()).pow(d) + big_d;
                        brute += BigRational::from_integer(w) * qr.pow(k as i32);
                    }
                    assert!(cert.tail_bound(q, floor) >= brute, "{cert:?} q={q} floor={floor}");
                }
            }
        }
    }
}
