//! Harder–Narasimhan strata of `Bun_{SL_2}` over a curve: χ exponents,
//! stratum masses, the stratum series in the completed ring, and the closed
//! form it is checked against.
//!
//! The unstable `SL_2`-bundles with HN type `O(a)·L ⊕ O(-a)·L^{-1}`, `a ≥ 1`,
//! form a stratum of class `L^{-χ}·{Pic}·{BG_m}` with `χ = 2a + 1 - g`.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Deserialize;

use crate::arith::prime_power;
use crate::catalog::{SymPoly, Symbol, SymbolCount, SymbolTable};
use crate::completed::{CompletedClass, GrowthCertificate};
use crate::error::{Error, Result};
use crate::lring::IntLaurent;
use crate::weights::WeightSeries;

/// A smooth proper curve over `F_q`, given by the numerator of its zeta
/// function `Z(t) = P(t) / ((1 - t)(1 - q t))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveData {
    q: u64,
    g: u32,
    p: Vec<i64>,
}

#[derive(Deserialize)]
struct CurveManifest {
    q: u64,
    g: u32,
    #[serde(rename = "P")]
    p: Vec<i64>,
}

impl CurveData {
    /// Checks `deg P = 2g`, `P(0) = 1`, the functional equation
    /// `c_{2g-j} = q^{g-j} c_j` and `N_1 = c_1 + q + 1 ≥ 0`.
    pub fn new(q: u64, g: u32, p: Vec<i64>) -> Result<Self> {
        let bad = |why: String| Err(Error::InvalidCurve(why));
        if prime_power(q).is_none() {
            return bad(format!("q = {q} is not a prime power"));
        }
        if p.len() != 2 * g as usize + 1 {
            return bad(format!("P has {} coefficients, genus {g} needs {}", p.len(), 2 * g + 1));
        }
        if p[0] != 1 {
            return bad(format!("P(0) = {}, expected 1", p[0]));
        }
        let q = q as i128;
        for j in 0..g as usize {
            let lhs = p[2 * g as usize - j] as i128;
            let rhs = q.pow(g - j as u32) * p[j] as i128;
            if lhs != rhs {
                return bad(format!(
                    "functional equation fails at coefficient {}: {lhs} != q^{}*{}",
                    2 * g as usize - j,
                    g as usize - j,
                    p[j]
                ));
            }
        }
        if g > 0 && p[1] as i128 + q + 1 < 0 {
            return bad(format!("N_1 = {} is negative", p[1] as i128 + q + 1));
        }
        Ok(Self { q: q as u64, g, p })
    }

    pub fn projective_line(q: u64) -> Result<Self> {
        Self::new(q, 0, vec![1])
    }

    /// `{"q": 2, "g": 1, "P": [1, 0, 2]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let m: CurveManifest =
            serde_json::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
        Self::new(m.q, m.g, m.p)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn genus(&self) -> u32 {
        self.g
    }

    pub fn numerator(&self) -> &[i64] {
        &self.p
    }

    /// `P(1) = |Pic^0(F_q)|`.
    pub fn class_number(&self) -> i64 {
        self.p.iter().sum()
    }

    /// `Z(t)` at a rational point.
    pub fn zeta(&self, t: &BigRational) -> Result<BigRational> {
        let one = BigRational::one();
        let qr = BigRational::from_integer(self.q.into());
        let den = (&one - t) * (&one - &qr * t);
        if den.is_zero() {
            return Err(Error::PoleAtQ(format!("zeta function at t = {t}")));
        }
        let num = self
            .p
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, &c| acc * t + BigRational::from_integer(c.into()));
        Ok(num / den)
    }

    /// A symbol for `Pic^0`: dimension `g`, `P(1)` points over `F_q`, weight
    /// series `(1 + t)^{2g}`.
    pub fn pic_symbol(&self, name: &str) -> Symbol {
        let counts = BTreeMap::from([(self.q, BigRational::from_integer(self.class_number().into()))]);
        let weights = WeightSeries::from_pairs(
            (0..=2 * self.g).map(|i| (i as i64, num_integer::binomial(2 * self.g as u64, i as u64))),
        );
        Symbol::new(name, self.g as i64, SymbolCount::Table(counts)).with_weight(weights)
    }
}

/// A Harder–Narasimhan type for `SL_n`: ranks `d_i`, degrees `m_i` with
/// `Σ m_i = 0` and strictly decreasing slopes `m_i / d_i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct HNType {
    pub d: Vec<u32>,
    pub m: Vec<i64>,
}

impl HNType {
    pub fn new(d: Vec<u32>, m: Vec<i64>) -> Result<Self> {
        let bad = |why: &str| Err(Error::InvalidArgument(format!("HN type {d:?}, {m:?}: {why}")));
        if d.len() != m.len() || d.is_empty() {
            return bad("ranks and degrees must pair up");
        }
        if d.contains(&0) {
            return bad("ranks must be positive");
        }
        if m.iter().sum::<i64>() != 0 {
            return bad("degrees must sum to zero");
        }
        for i in 1..d.len() {
            if m[i - 1] * d[i] as i64 <= m[i] * d[i - 1] as i64 {
                return bad("slopes must strictly decrease");
            }
        }
        Ok(Self { d, m })
    }

    pub fn rank(&self) -> u32 {
        self.d.iter().sum()
    }

    pub fn chi(&self, g: u32) -> i64 {
        chi_exponent(&self.d, &self.m, g)
    }
}

/// `χ = Σ_{i<j} (d_j m_i - d_i m_j) + d_i d_j (1 - g)`.
pub fn chi_exponent(d: &[u32], m: &[i64], g: u32) -> i64 {
    let mut chi = 0;
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let (di, dj) = (d[i] as i64, d[j] as i64);
            chi += dj * m[i] - di * m[j] + di * dj * (1 - g as i64);
        }
    }
    chi
}

fn q_rat(curve: &CurveData) -> BigRational {
    BigRational::from_integer(curve.q.into())
}

/// Mass of the stratum of type `(a, -a)`: `P(1) q^{-(2a+1-g)} / (q - 1)`.
pub fn stratum_mass_sl2(a: u32, curve: &CurveData) -> Result<BigRational> {
    if a == 0 {
        return Err(Error::InvalidArgument("stratum index a must be >= 1".into()));
    }
    let q = q_rat(curve);
    let chi = 2 * a as i32 + 1 - curve.g as i32;
    Ok(BigRational::from_integer(curve.class_number().into()) * q.pow(-chi)
        / (q - BigRational::one()))
}

/// `Σ_{a≥1} stratum_mass_sl2(a) = P(1) q^{g-3} / ((q - 1)(1 - q^{-2}))`.
pub fn unstable_sum_sl2(curve: &CurveData) -> BigRational {
    let q = q_rat(curve);
    let one = BigRational::one();
    BigRational::from_integer(curve.class_number().into()) * q.pow(curve.g as i32 - 3)
        / ((&q - &one) * (&one - q.pow(-2)))
}

/// Total mass of `Bun_{SL_2}(F_q)`: `q^{3(g-1)} Z(q^{-2})`.
pub fn siegel_mass_sl2(curve: &CurveData) -> BigRational {
    let q = q_rat(curve);
    let z = curve.zeta(&q.pow(-2)).expect("q^-2 is not a pole");
    q.pow(3 * (curve.g as i32 - 1)) * z
}

/// `siegel_mass_sl2 - unstable_sum_sl2`, which must be positive.
pub fn semistable_mass_sl2(curve: &CurveData) -> Result<BigRational> {
    let m = siegel_mass_sl2(curve) - unstable_sum_sl2(curve);
    if !m.is_positive() {
        return Err(Error::NonPositive(format!("semistable mass {m}")));
    }
    Ok(m)
}

/// `Σ_{a≥1} L^{-(2a+1-g)}·{pic}·(L - 1)^{-1}` down to `L^floor`.
///
/// `pic` must have dimension `g`.
pub fn strata_series_sl2(g: u32, pic: &Symbol, floor: i64) -> Result<CompletedClass<SymPoly>> {
    if pic.dimension != g as i64 {
        return Err(Error::InvalidArgument(format!(
            "{} has dimension {}, expected the genus {g}",
            pic.name, pic.dimension
        )));
    }
    let mut coeffs: BTreeMap<i64, i64> = BTreeMap::new();
    let g = g as i64;
    for a in 1.. {
        let top = -(2 * a + 1 - g) - 1;
        if top < floor {
            break;
        }
        for k in floor..=top {
            *coeffs.entry(k).or_default() += 1;
        }
    }
    let sym = SymPoly::symbol(&pic.name);
    Ok(CompletedClass::from_terms(
        coeffs
            .into_iter()
            .map(|(k, n)| (k, SymPoly::from(BigInt::from(n)) * sym.clone())),
        Some(floor),
    ))
}

/// The `a`-th stratum class alone, expanded down to `L^floor`.
pub fn stratum_series_sl2(a: u32, g: u32, pic: &Symbol, floor: i64) -> CompletedClass<SymPoly> {
    let chi = 2 * a as i64 + 1 - g as i64;
    let sym = SymPoly::symbol(&pic.name);
    CompletedClass::from_terms((floor..=-chi - 1).map(|k| (k, sym.clone())), Some(floor))
}

/// Growth certificate for [`strata_series_sl2`]: the `L^k` coefficient
/// counts at most `(|k| + g)/2` strata, each with `P(1)` points.
pub fn strata_certificate(curve: &CurveData) -> GrowthCertificate {
    let h = curve.class_number().unsigned_abs();
    GrowthCertificate::new(h, 1, h * curve.g as u64)
}

/// Point count of a truncated stratum series and its tail bound.
pub fn count_strata_series(
    series: &CompletedClass<SymPoly>,
    curve: &CurveData,
    pic: &Symbol,
) -> Result<(BigRational, BigRational)> {
    let mut table = SymbolTable::new();
    table.insert(pic.clone());
    series.count_truncated_with(curve.q, &strata_certificate(curve), |c| c.count(&table, curve.q))
}

/// Dimension of the `a`-th stratum: `2g - 2a - 2`.
pub fn stratum_dimension(a: u32, g: u32) -> i64 {
    2 * g as i64 - 2 * a as i64 - 2
}

/// All unstable HN types of rank `n` (at least two pieces) with `χ ≤ c_max`,
/// with their χ.
pub fn hn_types(n: u32, g: u32, c_max: i64) -> Result<Vec<(HNType, i64)>> {
    if !(2..=4).contains(&n) || c_max.abs() > 200 {
        return Err(Error::BudgetExceeded(format!(
            "HN enumeration needs 2 <= n <= 4 and |c| <= 200, got n = {n}, c = {c_max}"
        )));
    }
    let mut out = Vec::new();
    for d in compositions(n) {
        if d.len() < 2 {
            continue;
        }
        let genus_part: i64 = (0..d.len())
            .flat_map(|i| (i + 1..d.len()).map(move |j| (i, j)))
            .map(|(i, j)| d[i] as i64 * d[j] as i64 * (1 - g as i64))
            .sum();
        // Every pairwise slope term is a positive integer, so the slope part
        // of χ is at most `budget`, and `0 < μ_1 ≤ budget`.
        let budget = c_max - genus_part;
        if budget < (d.len() * (d.len() - 1) / 2) as i64 {
            continue;
        }
        let mut m = Vec::with_capacity(d.len());
        extend_degrees(&d, &mut m, 0, budget, &mut |m, slope_part| {
            let t = HNType {
                d: d.clone(),
                m: m.to_vec(),
            };
            out.push((t, slope_part + genus_part));
        });
    }
    out.sort();
    Ok(out)
}

fn extend_degrees(
    d: &[u32],
    m: &mut Vec<i64>,
    partial: i64,
    budget: i64,
    emit: &mut dyn FnMut(&[i64], i64),
) {
    let i = m.len();
    let k = d.len();
    let pair = |m: &[i64], a: usize, b: usize| d[b] as i64 * m[a] - d[a] as i64 * m[b];
    let with = |m: &mut Vec<i64>, x: i64| -> Option<i64> {
        m.push(x);
        let added: i64 = (0..i).map(|a| pair(m, a, i)).sum();
        let slopes_ok = i == 0 || pair(m, i - 1, i) > 0;
        if slopes_ok && partial + added <= budget {
            Some(partial + added)
        } else {
            None
        }
    };
    if i == k - 1 {
        let last = -m.iter().sum::<i64>();
        if let Some(total) = with(m, last) {
            emit(m, total);
        }
        m.pop();
        return;
    }
    let (lo, hi) = if i == 0 {
        (1, d[0] as i64 * budget)
    } else {
        // d_i m_{i-1} - d_{i-1} m_i ∈ [1, budget]
        let (dp, di, mp) = (d[i - 1] as i64, d[i] as i64, m[i - 1]);
        let hi = (di * mp - 1).div_euclid(dp);
        let lo = -((budget - di * mp).div_euclid(dp));
        (lo, hi)
    };
    for x in lo..=hi {
        if let Some(p) = with(m, x) {
            extend_degrees(d, m, p, budget, emit);
        }
        m.pop();
    }
}

/// Ordered compositions of `n`.
fn compositions(n: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    (1..=n)
        .flat_map(|first| {
            compositions(n - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Number of unstable HN types of rank `n` with `χ = c`, by χ.
pub fn hn_type_histogram(n: u32, g: u32, c_max: i64) -> Result<BTreeMap<i64, u64>> {
    let mut hist = BTreeMap::new();
    for (_, chi) in hn_types(n, g, c_max)? {
        *hist.entry(chi).or_default() += 1;
    }
    Ok(hist)
}

/// Number of unstable HN types of rank `n` over a genus-`g` curve with `χ = c`.
pub fn hn_type_count(n: u32, g: u32, c: i64) -> Result<u64> {
    Ok(hn_type_histogram(n, g, c)?.get(&c).copied().unwrap_or(0))
}

/// `φ(t) = t^{2g-5}(1 + t)^{2g}`.
///
/// Stratum `a` has weight series `(1 + t)^{2g} t^{-2χ_a} / (t^2 - 1)`, which
/// sums over `a ≥ 1` to at most `φ(t)/(t - 1)^2`. Every partial sum over a
/// finite set of strata is therefore dominated by `(φ, 2)`, i.e. its weight
/// multiplicities grow at most linearly in `|n|`.
pub fn strata_weight_phi(g: u32) -> IntLaurent {
    let pic = IntLaurent::from_terms(
        (0..=2 * g).map(|i| (i as i64, num_integer::binomial(2 * g as i64, i as i64))),
    );
    pic.shift(2 * g as i64 - 5)
}
