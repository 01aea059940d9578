use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{cyclotomic, is_invertible_localised, IntLaurent};
use crate::arith::divisors;
use crate::error::{Error, Result};

/// Element of the multiplicative set `L^a · ∏ (L^{n_i} - 1)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissibleDenominator {
    l_power: u32,
    factors: Vec<u64>,
}

impl AdmissibleDenominator {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn new(l_power: u32, mut factors: Vec<u64>) -> Self {
        assert!(factors.iter().all(|&n| n >= 1), "factor index must be positive");
        factors.sort_unstable();
        Self { l_power, factors }
    }

    pub fn l_power(&self) -> u32 {
        self.l_power
    }

    /// The indices `n` of the `(L^n - 1)` factors, ascending with repetition.
    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.l_power == 0 && self.factors.is_empty()
    }

    /// Total degree in `L`.
    pub fn degree(&self) -> i64 {
        self.l_power as i64 + self.factors.iter().sum::<u64>() as i64
    }

    pub fn expand(&self) -> IntLaurent {
        self.factors
            .iter()
            .fold(IntLaurent::monomial(1, self.l_power as i64), |acc, &n| {
                &acc * &IntLaurent::l_power_minus_one(n)
            })
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Self::new(self.l_power + other.l_power, factors)
    }

    /// Multiplicities of `Φ_d` in the product of the `(L^n - 1)` factors.
    fn cyclotomic_multiset(&self) -> BTreeMap<u64, u32> {
        let mut out = BTreeMap::new();
        for &n in &self.factors {
            for d in divisors(n) {
                *out.entry(d).or_insert(0) += 1;
            }
        }
        out
    }

    /// True when the denominator vanishes at `q`.
    pub fn vanishes_at(&self, q: &BigRational) -> bool {
        (self.l_power > 0 && q.is_zero())
            || self.factors.iter().any(|&n| q.pow(n as i32).is_one())
    }
}

impl fmt::Display for AdmissibleDenominator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.l_power {
            0 => {}
            1 => parts.push("L".to_string()),
            a => parts.push(format!("L^{a}")),
        }
        let mut i = 0;
        while i < self.factors.len() {
            let n = self.factors[i];
            let mult = self.factors[i..].iter().take_while(|&&m| m == n).count();
            let base = if n == 1 { "(L - 1)".to_string() } else { format!("(L^{n} - 1)") };
            parts.push(if mult == 1 { base } else { format!("{base}^{mult}") });
            i += mult;
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" * "))
        }
    }
}

/// Element of the localised ring: `num / den` with `den` admissible.
///
/// The stored form is canonical, so `==` is value equality. Canonicalisation
/// cancels every cyclotomic factor of the denominator that divides the
/// numerator exactly, then rebuilds the denominator greedily from the largest
/// remaining cyclotomic index, folding unused `Φ_d` cofactors back into the
/// numerator. All of it is exact division over the integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TateRational {
    num: IntLaurent,
    den: AdmissibleDenominator,
}

impl TateRational {
    pub fn new(num: IntLaurent, den: AdmissibleDenominator) -> Self {
        Self::canonicalize(num, den)
    }

    pub fn zero() -> Self {
        Self::from(IntLaurent::zero())
    }

    pub fn one() -> Self {
        Self::from(IntLaurent::one())
    }

    pub fn l() -> Self {
        Self::from(IntLaurent::l())
    }

    /// `1 / (L^n - 1)`.
    pub fn inv_l_power_minus_one(n: u64) -> Self {
        Self::new(IntLaurent::one(), AdmissibleDenominator::new(0, vec![n]))
    }

    pub fn num(&self) -> &IntLaurent {
        &self.num
    }

    pub fn den(&self) -> &AdmissibleDenominator {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    /// The polynomial itself when the denominator is trivial.
    pub fn as_laurent(&self) -> Option<&IntLaurent> {
        self.den.is_one().then_some(&self.num)
    }

    fn canonicalize(num: IntLaurent, den: AdmissibleDenominator) -> Self {
        let Some(low) = num.low_degree() else {
            return Self {
                num,
                den: AdmissibleDenominator::one(),
            };
        };
        let mut num = num.shift(-low);
        let l_exp = low - den.l_power as i64;
        let mut remaining = den.cyclotomic_multiset();
        for (&d, mult) in remaining.iter_mut().rev() {
            let phi = cyclotomic(d);
            while *mult > 0 {
                match num.divide_exact(&phi) {
                    Ok(q) => {
                        num = q;
                        *mult -= 1;
                    }
                    Err(_) => break,
                }
            }
        }
        remaining.retain(|_, m| *m > 0);
        let mut factors = Vec::new();
        while let Some((&top, _)) = remaining.iter().next_back() {
            factors.push(top);
            for d in divisors(top) {
                match remaining.get_mut(&d) {
                    Some(m) => {
                        *m -= 1;
                        if *m == 0 {
                            remaining.remove(&d);
                        }
                    }
                    None => num = &num * &cyclotomic(d),
                }
            }
        }
        let (num, l_power) = if l_exp >= 0 {
            (num.shift(l_exp), 0)
        } else {
            (num, (-l_exp) as u32)
        };
        Self {
            num,
            den: AdmissibleDenominator::new(l_power, factors),
        }
    }

    /// Multiplicative inverse, when the numerator is a unit of the localised ring.
    pub fn inverse(&self) -> Result<Self> {
        let unit = is_invertible_localised(&self.num)
            .ok_or_else(|| Error::NotInvertible(self.num.to_string()))?;
        // 1/Φ_n = (∏_{d|n, d<n} Φ_d) / (L^n - 1)
        let mut num = self.den.expand().scale(&BigInt::from(unit.sign));
        let mut factors = Vec::new();
        for &n in &unit.cyclotomic {
            for d in divisors(n).into_iter().filter(|&d| d < n) {
                num = &num * &cyclotomic(d);
            }
            factors.push(n);
        }
        Ok(Self::new(
            num.shift(-unit.l_power),
            AdmissibleDenominator::new(0, factors),
        ))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inverse()?)
    }

    pub fn pow(&self, n: i32) -> Result<Self> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut out = Self::one();
        for _ in 0..n.unsigned_abs() {
            out = &out * &base;
        }
        Ok(out)
    }

    /// Specialisation `L ↦ q`.
    pub fn eval(&self, q: &BigRational) -> Result<BigRational> {
        if self.den.vanishes_at(q) {
            return Err(Error::PoleAtQ(q.to_string()));
        }
        if q.is_zero() && self.num.low_degree().is_some_and(|e| e < 0) {
            return Err(Error::PoleAtQ(q.to_string()));
        }
        Ok(self.num.eval(q) / self.den.expand().eval(q))
    }

    pub fn eval_int(&self, q: u64) -> Result<BigRational> {
        self.eval(&BigRational::from_integer(BigInt::from(q)))
    }

    /// Dimension: degree of numerator minus degree of denominator (`None` for zero).
    pub fn dim(&self) -> Option<i64> {
        self.num.degree().map(|d| d - self.den.degree())
    }
}

impl From<IntLaurent> for TateRational {
    fn from(num: IntLaurent) -> Self {
        Self {
            num,
            den: AdmissibleDenominator::one(),
        }
    }
}

impl From<i64> for TateRational {
    fn from(c: i64) -> Self {
        Self::from(IntLaurent::constant(c))
    }
}

impl<'a> Add<&'a TateRational> for &'a TateRational {
    type Output = TateRational;
    fn add(self, rhs: &'a TateRational) -> TateRational {
        if self.den == rhs.den {
            return TateRational::new(&self.num + &rhs.num, self.den.clone());
        }
        let num = &(&self.num * &rhs.den.expand()) + &(&rhs.num * &self.den.expand());
        TateRational::new(num, self.den.mul(&rhs.den))
    }
}

impl<'a> Sub<&'a TateRational> for &'a TateRational {
    type Output = TateRational;
    fn sub(self, rhs: &'a TateRational) -> TateRational {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a TateRational> for &'a TateRational {
    type Output = TateRational;
    fn mul(self, rhs: &'a TateRational) -> TateRational {
        if self.is_zero() || rhs.is_zero() {
            return TateRational::zero();
        }
        TateRational::new(&self.num * &rhs.num, self.den.mul(&rhs.den))
    }
}

impl Neg for &TateRational {
    type Output = TateRational;
    fn neg(self) -> TateRational {
        TateRational {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for TateRational {
    type Output = TateRational;
    fn neg(self) -> TateRational {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<TateRational> for TateRational {
            type Output = TateRational;
            fn $m(self, rhs: TateRational) -> TateRational {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Zero for TateRational {
    fn zero() -> Self {
        TateRational::zero()
    }
    fn is_zero(&self) -> bool {
        TateRational::is_zero(self)
    }
}

impl One for TateRational {
    fn one() -> Self {
        TateRational::one()
    }
}

impl fmt::Display for TateRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.num_terms() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        let parts = self.den.factors.len() + usize::from(self.den.l_power > 0);
        if parts == 1 {
            write!(f, " / {}", self.den)
        } else {
            write!(f, " / ({})", self.den)
        }
    }
}

impl fmt::Debug for TateRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TateRational({self})")
    }
}

/// `{GL_n} = ∏_{i<n} (L^n - L^i)`.
pub fn class_gl(n: u32) -> IntLaurent {
    assert!(n >= 1, "GL_n needs n >= 1");
    let top = IntLaurent::monomial(1, n as i64);
    (0..n as i64).fold(IntLaurent::one(), |acc, i| {
        &acc * &(&top - &IntLaurent::monomial(1, i))
    })
}

/// `{SL_n} = {GL_n} / (L - 1)`, the determinant being a `G_m`-torsor.
pub fn class_sl(n: u32) -> IntLaurent {
    class_gl(n)
        .divide_exact(&IntLaurent::l_power_minus_one(1))
        .expect("L - 1 divides {GL_n}")
}

/// `{P^n} = (L^{n+1} - 1) / (L - 1)`.
pub fn class_projective(n: u32) -> IntLaurent {
    IntLaurent::from_terms((0..=n as i64).map(|i| (i, 1)))
}
