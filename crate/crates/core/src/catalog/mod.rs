//! Stack calculus over the localised ring: standard group classes, classifying
//! stacks of special groups, torsor and fibration rules, and the scripted
//! classes of `BΣ_2`, `BΣ_3` and the monomial groups `G_m^k ⋊ Σ_k`.

mod symbol;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::Zero;

pub use symbol::{Monomial, SymPoly, Symbol, SymbolCount, SymbolTable};

use crate::error::{Error, Result};
use crate::lring::{class_gl, class_sl, IntLaurent, TateRational};

/// Finite sum of `TateRational × (monomial in symbols)`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct MotivicClass {
    terms: BTreeMap<Monomial, TateRational>,
}

impl MotivicClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from(TateRational::one())
    }

    pub fn symbol(name: &str) -> Self {
        Self::term(TateRational::one(), Monomial::symbol(name))
    }

    pub fn term(c: TateRational, m: Monomial) -> Self {
        let mut out = Self::zero();
        out.add_term(m, c);
        out
    }

    fn add_term(&mut self, m: Monomial, c: TateRational) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&m) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &TateRational)> + '_ {
        self.terms.iter()
    }

    /// The coefficient of the empty monomial when no symbols occur.
    pub fn as_tate(&self) -> Option<TateRational> {
        match self.terms.len() {
            0 => Some(TateRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &TateRational) -> Self {
        let mut out = Self::zero();
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x * c);
        }
        out
    }

    /// Inverse of a single term whose coefficient is a unit and whose symbols
    /// are all declared invertible.
    pub fn inverse(&self, table: &SymbolTable) -> Result<Self> {
        if self.terms.len() != 1 {
            return Err(Error::NotInvertible(self.to_string()));
        }
        let (m, c) = self.terms.iter().next().unwrap();
        for (s, _) in m.factors() {
            if !table.get(s)?.invertible {
                return Err(Error::NotInvertible(format!("symbol {s}")));
            }
        }
        Ok(Self::term(c.inverse()?, m.inverse()))
    }

    /// Point count over `F_q` (symbols are looked up in `table`).
    pub fn count(&self, q: u64, table: &SymbolTable) -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            acc += c.eval_int(q)? * table.count_monomial(m, q)?;
        }
        Ok(acc)
    }

    /// Dimension: maximum over terms of `dim(coefficient) + Σ dim(symbol)`.
    pub fn dim(&self, table: &SymbolTable) -> Result<Option<i64>> {
        let mut best: Option<i64> = None;
        for (m, c) in &self.terms {
            if let Some(d) = c.dim() {
                let d = d + table.dimension_monomial(m)?;
                best = Some(best.map_or(d, |b| b.max(d)));
            }
        }
        Ok(best)
    }
}

impl From<TateRational> for MotivicClass {
    fn from(c: TateRational) -> Self {
        Self::term(c, Monomial::one())
    }
}

impl From<IntLaurent> for MotivicClass {
    fn from(c: IntLaurent) -> Self {
        Self::from(TateRational::from(c))
    }
}

impl<'a> Add<&'a MotivicClass> for &'a MotivicClass {
    type Output = MotivicClass;
    fn add(self, rhs: &'a MotivicClass) -> MotivicClass {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MotivicClass> for &'a MotivicClass {
    type Output = MotivicClass;
    fn sub(self, rhs: &'a MotivicClass) -> MotivicClass {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a MotivicClass> for &'a MotivicClass {
    type Output = MotivicClass;
    fn mul(self, rhs: &'a MotivicClass) -> MotivicClass {
        let mut out = MotivicClass::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MotivicClass {
    type Output = MotivicClass;
    fn neg(self) -> MotivicClass {
        MotivicClass {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for MotivicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.is_one() {
                    c.to_string()
                } else if c.is_one() {
                    m.to_string()
                } else {
                    format!("({c}) * {m}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for MotivicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MotivicClass({self})")
    }
}

/// The groups the catalog knows about.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Gl(u32),
    Sl(u32),
    Gm,
    Ga,
    Mu(u32),
    /// `G_m^k ⋊ Σ_k`, the normaliser of the diagonal torus in `GL_k`.
    Monomial(u32),
    Sigma(u32),
    /// An iterated extension; the class is the product of the pieces.
    Extension(Vec<GroupKind>),
}

impl GroupKind {
    /// Special groups: every torsor over a field is trivial, so torsors
    /// multiply classes. `GL_n`, `SL_n`, `G_m`, `G_a` and their extensions.
    pub fn is_special(&self) -> bool {
        match self {
            GroupKind::Gl(_) | GroupKind::Sl(_) | GroupKind::Gm | GroupKind::Ga => true,
            GroupKind::Extension(parts) => parts.iter().all(GroupKind::is_special),
            GroupKind::Mu(_) | GroupKind::Monomial(_) | GroupKind::Sigma(_) => false,
        }
    }

    fn class(&self) -> Option<IntLaurent> {
        Some(match self {
            GroupKind::Gl(n) => class_gl(*n),
            GroupKind::Sl(n) => class_sl(*n),
            GroupKind::Gm => class_gl(1),
            GroupKind::Ga => IntLaurent::l(),
            GroupKind::Extension(parts) => parts
                .iter()
                .map(GroupKind::class)
                .try_fold(IntLaurent::one(), |acc, c| c.map(|c| &acc * &c))?,
            GroupKind::Mu(_) | GroupKind::Monomial(_) | GroupKind::Sigma(_) => return None,
        })
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Gl(n) => write!(f, "GL({n})"),
            GroupKind::Sl(n) => write!(f, "SL({n})"),
            GroupKind::Gm => write!(f, "Gm"),
            GroupKind::Ga => write!(f, "Ga"),
            GroupKind::Mu(n) => write!(f, "Mu({n})"),
            GroupKind::Monomial(k) => write!(f, "Mon({k})"),
            GroupKind::Sigma(n) => write!(f, "Sigma({n})"),
            GroupKind::Extension(parts) => {
                let s: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "Ext({})", s.join(", "))
            }
        }
    }
}

/// A group together with its class (when it has one as a variety).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupDescriptor {
    pub kind: GroupKind,
    pub class: Option<MotivicClass>,
    pub special: bool,
}

impl GroupDescriptor {
    pub fn new(kind: GroupKind) -> Self {
        let special = kind.is_special();
        let class = kind.class().map(MotivicClass::from);
        Self {
            kind,
            class,
            special,
        }
    }

    pub fn gl(n: u32) -> Self {
        Self::new(GroupKind::Gl(n))
    }

    pub fn sl(n: u32) -> Self {
        Self::new(GroupKind::Sl(n))
    }

    pub fn gm() -> Self {
        Self::new(GroupKind::Gm)
    }

    fn special_class(&self) -> Result<&MotivicClass> {
        match (&self.class, self.special) {
            (Some(c), true) => Ok(c),
            _ => Err(Error::NotSpecial(self.kind.to_string())),
        }
    }
}

/// `{BG} = {G}^{-1}` for special `G`.
pub fn b_class(g: &GroupDescriptor) -> Result<MotivicClass> {
    let c = g.special_class()?;
    Ok(MotivicClass::from(
        c.as_tate().expect("group classes are rational in L").inverse()?,
    ))
}

/// Total space of a `G`-torsor over `base`: `{G}·{base}`.
pub fn torsor_total(g: &GroupDescriptor, base: &MotivicClass) -> Result<MotivicClass> {
    Ok(g.special_class()? * base)
}

/// Total space of a Zariski-locally trivial fibration with fibre `F`.
pub fn fibration_class(fibre: &MotivicClass, base: &MotivicClass) -> MotivicClass {
    fibre * base
}

/// A rank-`r` vector bundle over `base`: `L^r·{base}`.
pub fn vector_bundle(rank: u32, base: &MotivicClass) -> MotivicClass {
    &MotivicClass::from(IntLaurent::monomial(1, rank as i64)) * base
}

/// `{BH} = {G/H}·{BG}` for `H ⊂ G` with `G` special.
pub fn subgroup_bclass(g: &GroupDescriptor, quotient: &MotivicClass) -> Result<MotivicClass> {
    Ok(quotient * &b_class(g)?)
}

/// `{BΣ_n} = 1` for `n ∈ {2, 3}` (and trivially for `n ≤ 1`).
pub fn b_sigma(n: u32) -> Result<MotivicClass> {
    if n <= 3 {
        Ok(MotivicClass::one())
    } else {
        Err(Error::Unsupported(format!("{{BΣ_{n}}} is only scripted for n <= 3")))
    }
}

/// `{B(G_m^k ⋊ Σ_k)}` for `k ≤ 3`.
///
/// Stratify `V = A^k` by the number `j` of zero coordinates. The stratum with
/// `j` zeros is a single orbit with stabiliser `Σ_{k-j} × (G_m^j ⋊ Σ_j)`, and
/// the origin contributes `{BH}` itself, so
/// `(L^k - 1){BH_k} = Σ_{j<k} {BΣ_{k-j}}·{BH_j}` with `{BH_0} = 1`.
pub fn b_monomial(k: u32) -> Result<TateRational> {
    if !(1..=3).contains(&k) {
        return Err(Error::Unsupported(format!("monomial group with k = {k}")));
    }
    let mut classes = vec![TateRational::one()];
    for n in 1..=k {
        let mut strata = TateRational::zero();
        for j in 0..n {
            let sigma = b_sigma(n - j)?.as_tate().unwrap();
            strata = &strata + &(&sigma * &classes[j as usize]);
        }
        classes.push(&strata * &TateRational::inv_l_power_minus_one(n as u64));
    }
    Ok(classes.pop().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lring::{class_projective, AdmissibleDenominator};
    use num_bigint::BigInt;

    fn laurent(c: &[i64]) -> IntLaurent {
        IntLaurent::from_dense(c)
    }

    #[test]
    fn classifying_classes() {
        assert_eq!(
            b_class(&GroupDescriptor::gm()).unwrap().as_tate().unwrap(),
            TateRational::inv_l_power_minus_one(1)
        );
        let bgl2 = b_class(&GroupDescriptor::gl(2)).unwrap().as_tate().unwrap();
        assert_eq!(bgl2, TateRational::from(class_gl(2)).inverse().unwrap());
        let bsl2 = b_class(&GroupDescriptor::sl(2)).unwrap().as_tate().unwrap();
        assert_eq!(bsl2, TateRational::from(laurent(&[0, -1, 0, 1])).inverse().unwrap());
        assert!(matches!(
            b_class(&GroupDescriptor::new(GroupKind::Sigma(3))),
            Err(Error::NotSpecial(_))
        ));
        assert!(b_class(&GroupDescriptor::new(GroupKind::Monomial(2))).is_err());
        for n in 1..=4 {
            let g = GroupDescriptor::gl(n);
            let prod = &b_class(&g).unwrap() * g.class.as_ref().unwrap();
            assert_eq!(prod, MotivicClass::one());
        }
    }

    #[test]
    fn torsors_and_fibrations() {
        let p1 = MotivicClass::from(class_projective(1));
        let total = torsor_total(&GroupDescriptor::gm(), &p1).unwrap();
        assert_eq!(total, MotivicClass::from(laurent(&[-1, 0, 1])));
        let g = GroupDescriptor::gl(3);
        assert_eq!(torsor_total(&g, &b_class(&g).unwrap()).unwrap(), MotivicClass::one());
        let borel = GroupDescriptor::new(GroupKind::Extension(vec![GroupKind::Ga, GroupKind::Gm]));
        assert!(borel.special);
        assert_eq!(borel.class.clone().unwrap(), MotivicClass::from(laurent(&[0, -1, 1])));
        assert_eq!(fibration_class(&p1, &MotivicClass::one()), p1);
        let gl2 = GroupDescriptor::gl(2).class.unwrap();
        assert_eq!(fibration_class(&gl2, &p1), &gl2 * &p1);
        assert!(torsor_total(&GroupDescriptor::new(GroupKind::Mu(2)), &p1).is_err());
    }

    #[test]
    fn subgroup_formula() {
        let l2 = MotivicClass::from(IntLaurent::monomial(1, 2));
        let bn = subgroup_bclass(&GroupDescriptor::gl(2), &l2).unwrap().as_tate().unwrap();
        let expected = TateRational::new(IntLaurent::l(), AdmissibleDenominator::new(0, vec![1, 2]));
        assert_eq!(bn, expected);
        assert_eq!(
            bn.eval_int(2).unwrap(),
            BigRational::new(BigInt::from(2), BigInt::from(3))
        );
        let g = GroupDescriptor::gl(2);
        assert_eq!(subgroup_bclass(&g, &MotivicClass::one()).unwrap(), b_class(&g).unwrap());
        let mu = subgroup_bclass(&GroupDescriptor::gm(), &MotivicClass::from(class_gl(1))).unwrap();
        assert_eq!(mu, MotivicClass::one());
    }

    #[test]
    fn monomial_groups() {
        assert_eq!(b_monomial(1).unwrap(), TateRational::inv_l_power_minus_one(1));
        let bh2 = b_monomial(2).unwrap();
        let via_subgroup = subgroup_bclass(
            &GroupDescriptor::gl(2),
            &MotivicClass::from(IntLaurent::monomial(1, 2)),
        )
        .unwrap();
        assert_eq!(MotivicClass::from(bh2), via_subgroup);
        let bh3 = b_monomial(3).unwrap();
        let expected = TateRational::new(
            IntLaurent::monomial(1, 3),
            AdmissibleDenominator::new(0, vec![3, 1, 1]),
        )
        .checked_div(&TateRational::from(class_projective(1)))
        .unwrap();
        assert_eq!(bh3, expected);
        assert_eq!(
            bh3.eval_int(2).unwrap(),
            BigRational::new(BigInt::from(8), BigInt::from(21))
        );
        assert!(b_monomial(4).is_err());
        assert!(b_sigma(4).is_err());
        assert_eq!(b_sigma(3).unwrap(), MotivicClass::one());
    }

    #[test]
    fn vector_bundles() {
        let base = MotivicClass::from(class_projective(2));
        let e = vector_bundle(3, &base);
        assert_eq!(e.count(2, &SymbolTable::new()).unwrap(), BigRational::from_integer(56.into()));
    }
}
