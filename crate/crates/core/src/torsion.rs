//! The graded torsion ring `Gab[t, t^-1]` and its completion, and the refined
//! Euler characteristic at the level of integral cohomology descriptors.
//!
//! `Gab` is free on `1` and the classes `α(q, n) = {Z/q^n}`, with
//! `α(q, m)·α(q, n) = α(q, min(m, n))·(1 + t^-1)` and `α(q, m)·α(q', n) = 0`
//! for distinct primes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::arith::{factorize, is_prime};
use crate::error::{Error, Result};

/// `unit·1 + Σ mult·α(q, n)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TorsionModuleClass {
    unit: i64,
    alphas: BTreeMap<(u64, u32), i64>,
}

impl TorsionModuleClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit(m: i64) -> Self {
        Self {
            unit: m,
            alphas: BTreeMap::new(),
        }
    }

    /// `m·α(q, n)`.
    pub fn alpha(q: u64, n: u32, m: i64) -> Self {
        assert!(is_prime(q) && n >= 1, "α(q, n) needs q prime and n >= 1");
        let mut out = Self::zero();
        out.add_alpha(q, n, m);
        out
    }

    fn add_alpha(&mut self, q: u64, n: u32, m: i64) {
        if m == 0 {
            return;
        }
        let slot = self.alphas.entry((q, n)).or_insert(0);
        *slot += m;
        if *slot == 0 {
            self.alphas.remove(&(q, n));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.unit == 0 && self.alphas.is_empty()
    }

    pub fn unit_mult(&self) -> i64 {
        self.unit
    }

    pub fn alpha_mult(&self, q: u64, n: u32) -> i64 {
        self.alphas.get(&(q, n)).copied().unwrap_or(0)
    }

    pub fn alphas(&self) -> impl Iterator<Item = ((u64, u32), i64)> + '_ {
        self.alphas.iter().map(|(k, v)| (*k, *v))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.unit += other.unit;
        for ((q, n), m) in other.alphas() {
            out.add_alpha(q, n, m);
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            unit: -self.unit,
            alphas: self.alphas.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }

    /// Product, as `(degree 0 part, degree -1 part)`.
    pub fn mul(&self, other: &Self) -> (Self, Self) {
        let mut d0 = Self::unit(self.unit * other.unit);
        let mut d1 = Self::zero();
        for ((q, n), m) in other.alphas() {
            d0.add_alpha(q, n, self.unit * m);
        }
        for ((q, n), m) in self.alphas() {
            d0.add_alpha(q, n, m * other.unit);
            for ((q2, n2), m2) in other.alphas() {
                if q == q2 {
                    d0.add_alpha(q, n.min(n2), m * m2);
                    d1.add_alpha(q, n.min(n2), m * m2);
                }
            }
        }
        (d0, d1)
    }

    /// Drop every `α(q, ·)` with `q` outside `primes`.
    pub fn restrict_primes(&self, primes: &[u64]) -> Self {
        let mut out = self.clone();
        out.alphas.retain(|(q, _), _| primes.contains(q));
        out
    }
}

impl fmt::Display for TorsionModuleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.unit != 0 {
            parts.push(self.unit.to_string());
        }
        for ((q, n), m) in self.alphas() {
            parts.push(match m {
                1 => format!("a({q},{n})"),
                _ => format!("{m}*a({q},{n})"),
            });
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// `Σ_i x_i t^i` with support bounded above.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedTorsionSeries {
    grades: BTreeMap<i64, TorsionModuleClass>,
    floor: Option<i64>,
}

impl GradedTorsionSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::single(0, TorsionModuleClass::unit(1))
    }

    pub fn single(degree: i64, x: TorsionModuleClass) -> Self {
        let mut out = Self::zero();
        out.add_at(degree, &x);
        out
    }

    /// An integer Laurent polynomial `Σ c_i t^i`, embedded via `m ↦ m·1`.
    pub fn from_units<I: IntoIterator<Item = (i64, i64)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (i, c) in terms {
            out.add_at(i, &TorsionModuleClass::unit(c));
        }
        out
    }

    fn add_at(&mut self, degree: i64, x: &TorsionModuleClass) {
        if x.is_zero() || self.floor.is_some_and(|f| degree < f) {
            return;
        }
        let sum = self.grades.remove(&degree).unwrap_or_default().add(x);
        if !sum.is_zero() {
            self.grades.insert(degree, sum);
        }
    }

    pub fn with_floor(mut self, floor: i64) -> Self {
        let floor = self.floor.map_or(floor, |f| f.max(floor));
        self.grades.retain(|d, _| *d >= floor);
        self.floor = Some(floor);
        self
    }

    pub fn floor(&self) -> Option<i64> {
        self.floor
    }

    pub fn top(&self) -> Option<i64> {
        self.grades.keys().next_back().copied()
    }

    pub fn grade(&self, i: i64) -> TorsionModuleClass {
        self.grades.get(&i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.grades.is_empty()
    }

    /// Nonzero grades in decreasing degree.
    pub fn grades(&self) -> impl Iterator<Item = (i64, &TorsionModuleClass)> + '_ {
        self.grades.iter().rev().map(|(i, x)| (*i, x))
    }

    pub fn add(&self, other: &Self) -> Self {
        let floor = match (self.floor, other.floor) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let mut out = Self {
            floor,
            ..Self::default()
        };
        for (i, x) in self.grades.iter().chain(&other.grades) {
            out.add_at(*i, x);
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            grades: self.grades.iter().map(|(i, x)| (*i, x.neg())).collect(),
            floor: self.floor,
        }
    }

    /// Multiplication by `t^n`.
    pub fn shift(&self, n: i64) -> Self {
        Self {
            grades: self.grades.iter().map(|(i, x)| (i + n, x.clone())).collect(),
            floor: self.floor.map(|f| f + n),
        }
    }

    pub fn restrict_primes(&self, primes: &[u64]) -> Self {
        let mut out = Self {
            floor: self.floor,
            ..Self::default()
        };
        for (i, x) in &self.grades {
            out.add_at(*i, &x.restrict_primes(primes));
        }
        out
    }
}

/// Graded product; a truncated factor truncates the product at
/// `max(floor_a + top_b, floor_b + top_a)`.
pub fn torsion_mul(a: &GradedTorsionSeries, b: &GradedTorsionSeries) -> GradedTorsionSeries {
    let floor = match (a.floor, b.floor) {
        (None, None) => None,
        (fa, fb) => {
            let x = fa.zip(b.top()).map(|(f, t)| f + t);
            let y = fb.zip(a.top()).map(|(f, t)| f + t);
            match (x, y) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (Some(x), None) | (None, Some(x)) => Some(x),
                (None, None) => Some(fa.unwrap_or(0) + fb.unwrap_or(0) - 1),
            }
        }
    };
    let mut out = GradedTorsionSeries {
        floor,
        ..GradedTorsionSeries::default()
    };
    for (i, x) in &a.grades {
        for (j, y) in &b.grades {
            let (d0, d1) = x.mul(y);
            out.add_at(i + j, &d0);
            out.add_at(i + j - 1, &d1);
        }
    }
    out
}

/// Shift by the Tate twist `{Z(1)[2]}^m`: every degree moves by `-2m`.
pub fn tate_twist(x: &GradedTorsionSeries, m: i64) -> GradedTorsionSeries {
    x.shift(-2 * m)
}

/// Integral cohomology of one degree: free rank and a multiset of cyclic
/// primary summands `Z/q^n`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DegreeData {
    pub betti: u64,
    pub torsion: BTreeMap<(u64, u32), u64>,
}

/// Integral cohomology `H^i(X, Z)` for finitely many `i >= 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CohomologyDescriptor {
    degrees: BTreeMap<u32, DegreeData>,
}

impl CohomologyDescriptor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn point() -> Self {
        Self::new().with_betti(0, 1)
    }

    /// `P^n`: `Z` in every even degree up to `2n`.
    pub fn projective_space(n: u32) -> Self {
        (0..=n).fold(Self::new(), |d, i| d.with_betti(2 * i, 1))
    }

    pub fn with_betti(mut self, degree: u32, rank: u64) -> Self {
        self.degrees.entry(degree).or_default().betti += rank;
        self
    }

    /// Adds `mult` copies of `Z/q^n`.
    pub fn with_torsion(mut self, degree: u32, q: u64, n: u32, mult: u64) -> Self {
        assert!(is_prime(q) && n >= 1);
        *self
            .degrees
            .entry(degree)
            .or_default()
            .torsion
            .entry((q, n))
            .or_default() += mult;
        self
    }

    /// Adds a cyclic group `Z/m`, split into its primary parts.
    pub fn with_cyclic(mut self, degree: u32, m: u64) -> Self {
        for (p, e) in factorize(m) {
            self = self.with_torsion(degree, p, e, 1);
        }
        self
    }

    pub fn degree(&self, i: u32) -> DegreeData {
        self.degrees.get(&i).cloned().unwrap_or_default()
    }

    pub fn degrees(&self) -> impl Iterator<Item = (u32, &DegreeData)> + '_ {
        self.degrees.iter().map(|(i, d)| (*i, d))
    }

    /// Disjoint union.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, d) in other.degrees() {
            out = out.with_betti(i, d.betti);
            for ((q, n), m) in &d.torsion {
                out = out.with_torsion(i, *q, *n, *m);
            }
        }
        out
    }
}

/// Parses lines `i: rank, [q^n x mult, ...]`; `×` is accepted for `x`, the
/// bracket may be omitted or empty, and `#` starts a comment.
impl FromStr for CohomologyDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |line: &str, why: &str| Error::Manifest(format!("{why} in `{line}`"));
        let mut out = Self::new();
        for raw in s.lines() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (deg, rest) = line.split_once(':').ok_or_else(|| bad(line, "missing ':'"))?;
            let deg: u32 = deg.trim().parse().map_err(|_| bad(line, "bad degree"))?;
            let (rank, torsion) = match rest.split_once(',') {
                Some((r, t)) => (r, t.trim()),
                None => (rest, ""),
            };
            let rank: u64 = rank.trim().parse().map_err(|_| bad(line, "bad rank"))?;
            out = out.with_betti(deg, rank);
            let inner = torsion.trim_start_matches('[').trim_end_matches(']');
            for entry in inner.split(',').map(str::trim).filter(|e| !e.is_empty()) {
                let entry = entry.replace('×', "x");
                let (group, mult) = match entry.split_once('x') {
                    Some((g, m)) => (g.trim().to_string(), m.trim().parse().ok()),
                    None => (entry.trim().to_string(), Some(1)),
                };
                let (q, n) = match group.split_once('^') {
                    Some((q, n)) => (q.trim().parse().ok(), n.trim().parse().ok()),
                    None => (group.parse().ok(), Some(1)),
                };
                match (q, n, mult) {
                    (Some(q), Some(n), Some(m)) if is_prime(q) && n >= 1 => {
                        out = out.with_torsion(deg, q, n, m);
                    }
                    _ => return Err(bad(line, "bad torsion entry")),
                }
            }
        }
        Ok(out)
    }
}

/// Degree `i` carries `b_i·1 + Σ α(q, n)` over the torsion of `H^i`.
pub fn chi_g(x: &CohomologyDescriptor) -> GradedTorsionSeries {
    let mut out = GradedTorsionSeries::zero();
    for (i, d) in x.degrees() {
        let mut c = TorsionModuleClass::unit(d.betti as i64);
        for ((q, n), m) in &d.torsion {
            c.add_alpha(*q, *n, *m as i64);
        }
        out.add_at(i as i64, &c);
    }
    out
}

/// `(1 + s + ... + s^n)·chi_g(x)` with `s = t^2`: the cohomology a
/// projective bundle of relative dimension `n` over `x` would have.
pub fn projective_bundle_expected(x: &CohomologyDescriptor, n: u32) -> GradedTorsionSeries {
    let fibre = GradedTorsionSeries::from_units((0..=n as i64).map(|i| (2 * i, 1)));
    torsion_mul(&fibre, &chi_g(x))
}

/// True when `chi_g(p)` differs from `projective_bundle_expected(x, n)`, which
/// rules out `{P} = {P^n}·{X}`.
pub fn torsion_obstruction(x: &CohomologyDescriptor, p: &CohomologyDescriptor, n: u32) -> bool {
    chi_g(p) != projective_bundle_expected(x, n)
}

impl fmt::Display for GradedTorsionSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (i, x) in self.grades() {
            let simple = x.alphas.is_empty() || (x.unit == 0 && x.alphas.len() == 1);
            let body = if simple { x.to_string() } else { format!("({x})") };
            parts.push(match i {
                0 => body,
                1 => format!("{body}*t"),
                _ => format!("{body}*t^{i}"),
            });
        }
        if let Some(fl) = self.floor {
            parts.push(format!("O(t^{})", fl - 1));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}
