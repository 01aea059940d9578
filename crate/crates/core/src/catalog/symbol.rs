//! Named classes that are not rational in `L` (for example `{Pic^0_C}`), and
//! the polynomial ring they generate.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::lring::TateRational;
use crate::weights::WeightSeries;

/// Product of symbols with integer exponents; the empty product is `1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(BTreeMap<String, i32>);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn symbol(name: &str) -> Self {
        Self(BTreeMap::from([(name.to_string(), 1)]))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> impl Iterator<Item = (&str, i32)> + '_ {
        self.0.iter().map(|(s, e)| (s.as_str(), *e))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.0.clone();
        for (s, e) in &other.0 {
            let entry = out.entry(s.clone()).or_insert(0);
            *entry += e;
            if *entry == 0 {
                out.remove(s);
            }
        }
        Self(out)
    }

    pub fn pow(&self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        Self(self.0.iter().map(|(s, e)| (s.clone(), e * n)).collect())
    }

    pub fn inverse(&self) -> Self {
        self.pow(-1)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(s, e)| if *e == 1 { s.clone() } else { format!("{s}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Integer polynomial in symbols: the coefficient ring of symbolic series.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SymPoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl SymPoly {
    pub fn term(c: impl Into<BigInt>, m: Monomial) -> Self {
        let mut out = Self::default();
        out.add_term(m, c.into());
        out
    }

    pub fn symbol(name: &str) -> Self {
        Self::term(1, Monomial::symbol(name))
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> + '_ {
        self.terms.iter()
    }

    /// Point count over `F_q`, evaluating each symbol through `table`.
    pub fn count(&self, table: &SymbolTable, q: u64) -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            acc += BigRational::from_integer(c.clone()) * table.count_monomial(m, q)?;
        }
        Ok(acc)
    }

    /// Upper bound for the weight series: `Σ |c| · ∏ uwt(symbol)`.
    pub fn weight(&self, table: &SymbolTable) -> Result<WeightSeries> {
        let mut acc = WeightSeries::zero();
        for (m, c) in &self.terms {
            let w = table.weight_monomial(m)?;
            acc = acc.add(&w.scale(&c.abs().to_biguint().unwrap()));
        }
        Ok(acc)
    }
}

impl From<BigInt> for SymPoly {
    fn from(c: BigInt) -> Self {
        Self::term(c, Monomial::one())
    }
}

impl Add for SymPoly {
    type Output = SymPoly;
    fn add(mut self, rhs: SymPoly) -> SymPoly {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Sub for SymPoly {
    type Output = SymPoly;
    fn sub(self, rhs: SymPoly) -> SymPoly {
        self + (-rhs)
    }
}

impl Neg for SymPoly {
    type Output = SymPoly;
    fn neg(self) -> SymPoly {
        SymPoly {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Mul for SymPoly {
    type Output = SymPoly;
    fn mul(self, rhs: SymPoly) -> SymPoly {
        let mut out = SymPoly::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Zero for SymPoly {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for SymPoly {
    fn one() -> Self {
        Self::from(BigInt::one())
    }
}

impl fmt::Display for SymPoly {
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
                    format!("{c}*{m}")
                }
            })
            .collect();
        if parts.len() == 1 {
            write!(f, "{}", parts[0])
        } else {
            write!(f, "({})", parts.join(" + "))
        }
    }
}

/// How a symbol's `F_q` point count is known.
#[derive(Clone, Debug, PartialEq)]
pub enum SymbolCount {
    /// Explicit values for finitely many `q`.
    Table(BTreeMap<u64, BigRational>),
    /// A rational function of `L`, specialised at `L = q`.
    ClosedForm(TateRational),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    pub name: String,
    pub dimension: i64,
    pub count: SymbolCount,
    pub weight: Option<WeightSeries>,
    /// Whether division by this symbol is permitted.
    pub invertible: bool,
}

impl Symbol {
    pub fn new(name: &str, dimension: i64, count: SymbolCount) -> Self {
        Self {
            name: name.to_string(),
            dimension,
            count,
            weight: None,
            invertible: false,
        }
    }

    pub fn with_weight(mut self, w: WeightSeries) -> Self {
        self.weight = Some(w);
        self
    }

    pub fn count_at(&self, q: u64) -> Result<BigRational> {
        match &self.count {
            SymbolCount::Table(t) => t.get(&q).cloned().ok_or_else(|| Error::MissingSymbolData {
                symbol: self.name.clone(),
                what: "point count at the requested q",
            }),
            SymbolCount::ClosedForm(x) => x.eval_int(q),
        }
    }
}

/// The declared symbols available to an evaluation.
#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    symbols: BTreeMap<String, Symbol>,
}

#[derive(Deserialize)]
struct ManifestFile {
    symbols: Vec<ManifestSymbol>,
}

#[derive(Deserialize)]
struct ManifestSymbol {
    name: String,
    dimension: i64,
    #[serde(default)]
    counts: Option<BTreeMap<String, String>>,
    #[serde(default)]
    closed_form: Option<String>,
    #[serde(default)]
    weights: Option<BTreeMap<String, u64>>,
    #[serde(default)]
    invertible: bool,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, sym: Symbol) {
        self.symbols.insert(sym.name.clone(), sym);
    }

    pub fn get(&self, name: &str) -> Result<&Symbol> {
        self.symbols
            .get(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.symbols.contains_key(name)
    }

    pub fn count_monomial(&self, m: &Monomial, q: u64) -> Result<BigRational> {
        let mut acc = BigRational::one();
        for (s, e) in m.factors() {
            let c = self.get(s)?.count_at(q)?;
            if e < 0 && c.is_zero() {
                return Err(Error::PoleAtQ(format!("{q} (symbol {s} counts zero)")));
            }
            acc *= c.pow(e);
        }
        Ok(acc)
    }

    pub fn dimension_monomial(&self, m: &Monomial) -> Result<i64> {
        m.factors()
            .map(|(s, e)| Ok(self.get(s)?.dimension * e as i64))
            .sum()
    }

    pub fn weight_monomial(&self, m: &Monomial) -> Result<WeightSeries> {
        let mut acc = WeightSeries::monomial(0);
        for (s, e) in m.factors() {
            let sym = self.get(s)?;
            let w = sym.weight.as_ref().ok_or_else(|| Error::MissingSymbolData {
                symbol: s.to_string(),
                what: "weight series",
            })?;
            if e < 0 {
                return Err(Error::Unsupported(format!(
                    "weight series of the inverse of symbol {s}"
                )));
            }
            for _ in 0..e {
                acc = acc.mul(w);
            }
        }
        Ok(acc)
    }

    /// Parses a JSON symbol manifest.
    ///
    /// ```json
    /// {"symbols": [{"name": "Pic", "dimension": 1,
    ///               "counts": {"2": "3", "3": "4"},
    ///               "weights": {"0": 1, "1": 2, "2": 1}}]}
    /// ```
    /// A symbol carries either `counts` (a table keyed by `q`) or
    /// `closed_form` (an expression in `L`, evaluated with `parse_closed`).
    pub fn from_manifest_str(
        text: &str,
        parse_closed: impl Fn(&str) -> Result<TateRational>,
    ) -> Result<Self> {
        let file: ManifestFile =
            serde_json::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
        let mut table = SymbolTable::new();
        for s in file.symbols {
            let count = match (s.counts, s.closed_form) {
                (Some(t), None) => {
                    let mut out = BTreeMap::new();
                    for (k, v) in t {
                        let q: u64 = k
                            .parse()
                            .map_err(|_| Error::Manifest(format!("bad q `{k}` for {}", s.name)))?;
                        let c: BigRational = v
                            .parse()
                            .map_err(|_| Error::Manifest(format!("bad count `{v}` for {}", s.name)))?;
                        out.insert(q, c);
                    }
                    SymbolCount::Table(out)
                }
                (None, Some(expr)) => SymbolCount::ClosedForm(parse_closed(&expr)?),
                _ => {
                    return Err(Error::Manifest(format!(
                        "symbol {} needs exactly one of `counts` or `closed_form`",
                        s.name
                    )))
                }
            };
            let mut sym = Symbol::new(&s.name, s.dimension, count);
            sym.invertible = s.invertible;
            if let Some(w) = s.weights {
                let mut ws = WeightSeries::zero();
                for (k, v) in w {
                    let n: i64 = k
                        .parse()
                        .map_err(|_| Error::Manifest(format!("bad weight `{k}` for {}", s.name)))?;
                    ws = ws.add(&WeightSeries::monomial(n).scale(&v.into()));
                }
                sym.weight = Some(ws);
            }
            table.insert(sym);
        }
        Ok(table)
    }

    pub fn from_manifest_file(
        path: &Path,
        parse_closed: impl Fn(&str) -> Result<TateRational>,
    ) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
        Self::from_manifest_str(&text, parse_closed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pic_table() -> SymbolTable {
        let mut t = SymbolTable::new();
        let counts = BTreeMap::from([(2u64, BigRational::from_integer(3.into()))]);
        t.insert(
            Symbol::new("Pic", 1, SymbolCount::Table(counts))
                .with_weight(WeightSeries::from_pairs([(0, 1u64), (1, 2), (2, 1)])),
        );
        t
    }

    #[test]
    fn polynomial_ring_ops() {
        let p = SymPoly::symbol("Pic");
        let two = SymPoly::from(BigInt::from(2));
        let x = (p.clone() + two.clone()) * (p.clone() - two);
        assert_eq!(x.to_string(), "(-4 + Pic^2)");
        assert!((p.clone() - p).is_zero());
    }

    #[test]
    fn counts_and_weights() {
        let t = pic_table();
        let x = SymPoly::term(2, Monomial::symbol("Pic")) + SymPoly::one();
        assert_eq!(x.count(&t, 2).unwrap(), BigRational::from_integer(7.into()));
        assert!(matches!(x.count(&t, 3), Err(Error::MissingSymbolData { .. })));
        assert_eq!(t.dimension_monomial(&Monomial::symbol("Pic").pow(2)).unwrap(), 2);
        let w = SymPoly::symbol("Pic").weight(&t).unwrap();
        assert_eq!(w.coeff(1), 2u32.into());
        assert!(SymPoly::symbol("Jac").count(&t, 2).is_err());
    }

    #[test]
    fn manifest_round() {
        let text = r#"{"symbols": [
            {"name": "Pic", "dimension": 1, "counts": {"2": "3", "3": "4"},
             "weights": {"0": 1, "1": 2, "2": 1}},
            {"name": "A", "dimension": 1, "closed_form": "L", "invertible": true}
        ]}"#;
        let t = SymbolTable::from_manifest_str(text, |_| Ok(TateRational::l())).unwrap();
        assert_eq!(t.get("Pic").unwrap().count_at(3).unwrap(), BigRational::from_integer(4.into()));
        assert_eq!(t.get("A").unwrap().count_at(5).unwrap(), BigRational::from_integer(5.into()));
        assert!(t.get("A").unwrap().invertible);
        let bad = r#"{"symbols": [{"name": "X", "dimension": 0}]}"#;
        assert!(SymbolTable::from_manifest_str(bad, |_| Ok(TateRational::l())).is_err());
    }
}
