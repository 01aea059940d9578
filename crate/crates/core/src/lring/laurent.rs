use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Integer Laurent polynomial in the Lefschetz class `L`.
///
/// Coefficients are stored sparsely, keyed by exponent, with no zero entries,
/// so structural equality is value equality.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntLaurent {
    coeffs: BTreeMap<i64, BigInt>,
}

impl IntLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    /// The class `L` itself.
    pub fn l() -> Self {
        Self::monomial(1, 1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: impl Into<BigInt>, exp: i64) -> Self {
        let mut out = Self::zero();
        out.add_term(exp, c.into());
        out
    }

    /// `L^n - 1`.
    pub fn l_power_minus_one(n: u64) -> Self {
        let mut out = Self::monomial(1, n as i64);
        out.add_term(0, BigInt::from(-1));
        out
    }

    /// Builds from `(exponent, coefficient)` pairs; repeated exponents are summed.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, c.into());
        }
        out
    }

    /// Dense constructor: `coeffs[i]` is the coefficient of `L^i`.
    pub fn from_dense<C: Into<BigInt> + Clone>(coeffs: &[C]) -> Self {
        Self::from_terms(coeffs.iter().cloned().enumerate().map(|(i, c)| (i as i64, c)))
    }

    pub(crate) fn add_term(&mut self, exp: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(exp).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.coeffs.get(&exp).cloned().unwrap_or_default()
    }

    /// Terms in increasing exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &BigInt)> + '_ {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Largest exponent with a nonzero coefficient.
    pub fn degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Smallest exponent with a nonzero coefficient.
    pub fn low_degree(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.coeffs.values().next_back()
    }

    /// Multiplication by `L^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    /// Gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> BigInt {
        self.coeffs.values().map(|c| c.abs()).sum()
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn eval(&self, q: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.coeffs {
            acc += BigRational::from_integer(c.clone()) * q.pow(*e as i32);
        }
        acc
    }

    /// Exact quotient `self / divisor`.
    ///
    /// Fails with [`Error::NotDivisible`] unless `self = divisor * c` for an
    /// integer Laurent polynomial `c`.
    pub fn divide_exact(&self, divisor: &IntLaurent) -> Result<IntLaurent> {
        let (Some(d_top), Some(d_low)) = (divisor.degree(), divisor.low_degree()) else {
            return Err(Error::NotDivisible("division by zero".into()));
        };
        let Some(a_low) = self.low_degree() else {
            return Ok(Self::zero());
        };
        let d_lead = divisor.leading_coeff().expect("nonzero divisor");
        let min_quot_exp = a_low - d_low;
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some(r_top) = rem.degree() {
            let exp = r_top - d_top;
            if exp < min_quot_exp {
                return Err(Error::NotDivisible(format!("{self} by {divisor}")));
            }
            let (c, r) = rem.leading_coeff().unwrap().div_rem(d_lead);
            if !r.is_zero() {
                return Err(Error::NotDivisible(format!("{self} by {divisor}")));
            }
            for (e, dc) in divisor.terms() {
                rem.add_term(e + exp, -(dc * &c));
            }
            quot.add_term(exp, c);
        }
        Ok(quot)
    }
}

impl From<i64> for IntLaurent {
    fn from(c: i64) -> Self {
        Self::constant(c)
    }
}

impl From<BigInt> for IntLaurent {
    fn from(c: BigInt) -> Self {
        Self::constant(c)
    }
}

impl<'a> Add<&'a IntLaurent> for &'a IntLaurent {
    type Output = IntLaurent;
    fn add(self, rhs: &'a IntLaurent) -> IntLaurent {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a IntLaurent> for &'a IntLaurent {
    type Output = IntLaurent;
    fn sub(self, rhs: &'a IntLaurent) -> IntLaurent {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, -c);
        }
        out
    }
}

impl<'a> Mul<&'a IntLaurent> for &'a IntLaurent {
    type Output = IntLaurent;
    fn mul(self, rhs: &'a IntLaurent) -> IntLaurent {
        let mut out = IntLaurent::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &IntLaurent {
    type Output = IntLaurent;
    fn neg(self) -> IntLaurent {
        IntLaurent {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<IntLaurent> for IntLaurent {
            type Output = IntLaurent;
            fn $m(self, rhs: IntLaurent) -> IntLaurent {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for IntLaurent {
    type Output = IntLaurent;
    fn neg(self) -> IntLaurent {
        -&self
    }
}

impl Zero for IntLaurent {
    fn zero() -> Self {
        IntLaurent::zero()
    }
    fn is_zero(&self) -> bool {
        IntLaurent::is_zero(self)
    }
}

impl One for IntLaurent {
    fn one() -> Self {
        IntLaurent::one()
    }
}

/// Writes `c*var^e` style terms in decreasing exponent order.
pub(crate) fn write_terms<'a>(
    f: &mut fmt::Formatter<'_>,
    var: &str,
    terms: impl Iterator<Item = (i64, &'a BigInt)>,
) -> fmt::Result {
    let mut first = true;
    for (e, c) in terms {
        let neg = c.is_negative();
        let abs = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        first = false;
        let unit = abs.is_one();
        match e {
            0 => write!(f, "{abs}")?,
            1 if unit => write!(f, "{var}")?,
            1 => write!(f, "{abs}*{var}")?,
            _ if unit => write!(f, "{var}^{e}")?,
            _ => write!(f, "{abs}*{var}^{e}")?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for IntLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, "L", self.terms().rev())
    }
}

impl fmt::Debug for IntLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntLaurent({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l() -> IntLaurent {
        IntLaurent::l()
    }

    #[test]
    fn arithmetic_examples() {
        let one = IntLaurent::one();
        assert_eq!(&(&l() - &one) + &one, l());
        let a = &l().pow(2) - &one;
        let b = &l().pow(2) - &l();
        assert_eq!((&a * &b).to_string(), "L^4 - L^3 - L^2 + L");
        assert!((-IntLaurent::zero()).is_zero());
    }

    #[test]
    fn exact_division() {
        let one = IntLaurent::one();
        let a = &l().pow(2) - &one;
        assert_eq!(a.divide_exact(&(&l() - &one)).unwrap(), &l() + &one);
        let b = &l().pow(2) + &one;
        assert!(matches!(
            b.divide_exact(&(&l() - &one)),
            Err(Error::NotDivisible(_))
        ));
        // Laurent exponents on both sides.
        let c = IntLaurent::from_terms([(-3, 2), (-1, 1)]);
        let d = IntLaurent::from_terms([(-1, 1), (2, 5)]);
        assert_eq!((&c * &d).divide_exact(&d).unwrap(), c);
        // non-unit leading coefficient that does not divide
        let e = IntLaurent::from_terms([(1, 3), (0, 1)]);
        assert!(e.divide_exact(&IntLaurent::from_terms([(1, 2)])).is_err());
    }

    #[test]
    fn display_forms() {
        assert_eq!(IntLaurent::zero().to_string(), "0");
        assert_eq!(IntLaurent::from_terms([(-2, -3), (0, 1)]).to_string(), "1 - 3*L^-2");
        assert_eq!(IntLaurent::from_terms([(1, -1)]).to_string(), "-L");
    }

    #[test]
    fn content_and_eval() {
        let p = IntLaurent::from_terms([(0, 4), (2, 6)]);
        assert_eq!(p.content(), BigInt::from(2));
        let q = BigRational::from_integer(BigInt::from(3));
        assert_eq!(p.eval(&q), BigRational::from_integer(BigInt::from(58)));
        let r = IntLaurent::monomial(1, -1);
        assert_eq!(
            r.eval(&q),
            BigRational::new(BigInt::from(1), BigInt::from(3))
        );
    }
}
