use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::{One, Signed};

use super::IntLaurent;
use crate::arith::{divisors, euler_phi, mobius};

/// The cyclotomic polynomial `Φ_n(L)`, computed as `∏_{d|n} (L^d - 1)^{μ(n/d)}`.
pub fn cyclotomic(n: u64) -> IntLaurent {
    assert!(n >= 1, "cyclotomic index must be positive");
    static CACHE: OnceLock<Mutex<HashMap<u64, IntLaurent>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let mut num = IntLaurent::one();
    let mut den = IntLaurent::one();
    for d in divisors(n) {
        match mobius(n / d) {
            1 => num = &num * &IntLaurent::l_power_minus_one(d),
            -1 => den = &den * &IntLaurent::l_power_minus_one(d),
            _ => {}
        }
    }
    let phi = num.divide_exact(&den).expect("cyclotomic quotient is exact");
    cache.lock().unwrap().insert(n, phi.clone());
    phi
}

/// A certified unit of the localised ring: `sign · L^l_power · ∏ Φ_{n_i}(L)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitFactorization {
    pub sign: i8,
    pub l_power: i64,
    /// Cyclotomic indices with repetition, ascending.
    pub cyclotomic: Vec<u64>,
}

impl UnitFactorization {
    pub fn reconstruct(&self) -> IntLaurent {
        let mut out = IntLaurent::monomial(self.sign as i64, self.l_power);
        for &n in &self.cyclotomic {
            out = &out * &cyclotomic(n);
        }
        out
    }
}

/// Decides whether `f` is a unit once `L` and every `L^n - 1` are inverted.
///
/// The units are exactly `±L^a` times products of cyclotomic polynomials.
/// Because `φ(n) ≥ √(n/2)`, a cyclotomic factor of degree at most `deg f`
/// has index at most `2·deg(f)²`, so trial division over that range decides
/// the question. Returns `None` for a non-unit (including `f = 0`).
pub fn is_invertible_localised(f: &IntLaurent) -> Option<UnitFactorization> {
    let low = f.low_degree()?;
    let mut rest = f.shift(-low);
    let content = rest.content();
    if !content.is_one() {
        return None;
    }
    let sign = if rest.leading_coeff()?.is_negative() { -1 } else { 1 };
    if sign < 0 {
        rest = -rest;
    }
    // A product of cyclotomics has constant term ±1.
    if !rest.coeff(0).abs().is_one() {
        return None;
    }
    let deg = rest.degree().unwrap_or(0) as u64;
    let bound = 2 * deg * deg;
    let mut found = Vec::new();
    let mut n = 1u64;
    while n <= bound && rest.degree().unwrap_or(0) > 0 {
        let remaining = rest.degree().unwrap() as u64;
        if euler_phi(n) <= remaining {
            let phi = cyclotomic(n);
            while let Ok(q) = rest.divide_exact(&phi) {
                rest = q;
                found.push(n);
            }
        }
        n += 1;
    }
    // Every Φ_n is monic, so the leading coefficient stays +1 throughout.
    rest.is_one().then_some(UnitFactorization {
        sign,
        l_power: low,
        cyclotomic: found,
    })
}
