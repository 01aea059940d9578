//! Table-driven arithmetic in `F_{p^k}`.
//!
//! An element is the index `Σ c_i p^i` of its residue `Σ c_i x^i` modulo the
//! defining polynomial, so `F_p` sits inside every extension as `0..p`.

use std::fmt;

use crate::arith::{is_prime, prime_power};
use crate::error::{Error, Result};

pub type Elt = u32;

/// Largest field order we build tables for.
pub const MAX_ORDER: u64 = 1 << 12;

#[derive(Clone)]
pub struct FieldContext {
    p: u64,
    k: u32,
    q: u32,
    modulus: Vec<u64>,
    add: Vec<Elt>,
    mul: Vec<Elt>,
    neg: Vec<Elt>,
    inv: Vec<Elt>,
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldContext")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldContext {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FieldContext {}

fn digits(mut a: u64, p: u64, k: u32) -> Vec<u64> {
    (0..k)
        .map(|_| {
            let d = a % p;
            a /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u64], p: u64) -> u64 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Remainder of `a` modulo the monic `m` over `F_p` (coefficients low to high).
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let off = r.len() - dm;
            for (i, &c) in m[..dm].iter().enumerate() {
                r[off + i] = (r[off + i] + (p - c) * lead) % p;
            }
        }
    }
    r
}

fn is_irreducible(m: &[u64], p: u64) -> bool {
    let k = m.len() - 1;
    for d in 1..=k / 2 {
        for idx in 0..p.pow(d as u32) {
            let mut f = digits(idx, p, d as u32);
            f.push(1);
            if poly_rem(m, &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FieldContext {
    /// `F_{p^k}` defined by the least irreducible monic polynomial of degree
    /// `k`, where polynomials compare by their coefficient sequences from
    /// `x^{k-1}` down to the constant term.
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !is_prime(p) || k == 0 {
            return Err(Error::InvalidField(format!("p = {p}, k = {k}")));
        }
        let q = p.checked_pow(k).filter(|&q| q <= MAX_ORDER).ok_or_else(|| {
            Error::BudgetExceeded(format!("field of order {p}^{k} exceeds {MAX_ORDER}"))
        })?;
        let modulus = (0..q)
            .map(|idx| {
                let mut m = digits(idx, p, k);
                m.push(1);
                m
            })
            .find(|m| k == 1 || is_irreducible(m, p))
            .expect("irreducible polynomials exist in every degree");
        Ok(Self::with_modulus(p, modulus))
    }

    /// `F_q` for a prime power `q`.
    pub fn from_order(q: u64) -> Result<Self> {
        let (p, k) = prime_power(q).ok_or_else(|| Error::InvalidField(format!("q = {q}")))?;
        Self::new(p, k)
    }

    fn with_modulus(p: u64, modulus: Vec<u64>) -> Self {
        let k = (modulus.len() - 1) as u32;
        let q = p.pow(k) as usize;
        let ds: Vec<Vec<u64>> = (0..q as u64).map(|a| digits(a, p, k)).collect();
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            for b in a..q {
                let s: Vec<u64> = ds[a].iter().zip(&ds[b]).map(|(x, y)| (x + y) % p).collect();
                let mut prod = vec![0u64; 2 * k as usize - 1];
                for (i, x) in ds[a].iter().enumerate() {
                    for (j, y) in ds[b].iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let s = undigits(&s, p) as Elt;
                let m = undigits(&poly_rem(&prod, &modulus, p), p) as Elt;
                add[a * q + b] = s;
                add[b * q + a] = s;
                mul[a * q + b] = m;
                mul[b * q + a] = m;
            }
        }
        let mut neg = vec![0; q];
        let mut inv = vec![0; q];
        for a in 0..q {
            for b in 0..q {
                if add[a * q + b] == 0 {
                    neg[a] = b as Elt;
                }
                if mul[a * q + b] == 1 {
                    inv[a] = b as Elt;
                }
            }
        }
        Self {
            p,
            k,
            q: q as u32,
            modulus,
            add,
            mul,
            neg,
            inv,
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Defining polynomial, coefficients from the constant term up (monic).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = Elt> {
        0..self.q
    }

    #[inline]
    pub fn add(&self, a: Elt, b: Elt) -> Elt {
        self.add[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn mul(&self, a: Elt, b: Elt) -> Elt {
        self.mul[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn neg(&self, a: Elt) -> Elt {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elt, b: Elt) -> Elt {
        self.add(a, self.neg(b))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Elt) -> Option<Elt> {
        (a != 0).then(|| self.inv[a as usize])
    }

    pub fn pow(&self, a: Elt, mut e: u64) -> Elt {
        let (mut base, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// The image of an integer under `Z -> F_p`.
    pub fn from_int(&self, n: i64) -> Elt {
        n.rem_euclid(self.p as i64) as Elt
    }

    /// Table of `a ↦ a^{s}`; with `s = |F_q|` this is the `q`-power Frobenius.
    pub fn power_map(&self, s: u64) -> Vec<Elt> {
        self.elements().map(|a| self.pow(a, s)).collect()
    }

    /// Field embedding `self -> big`, as a table indexed by elements of `self`.
    /// The generator goes to the least root of the defining polynomial.
    pub fn embedding(&self, big: &FieldContext) -> Result<Vec<Elt>> {
        if self.p != big.p || big.k % self.k != 0 {
            return Err(Error::InvalidField(format!(
                "F_{} does not embed in F_{}",
                self.q, big.q
            )));
        }
        let eval = |x: Elt| {
            self.modulus
                .iter()
                .rev()
                .fold(0, |acc, &c| big.add(big.mul(acc, x), c as Elt))
        };
        let root = big.elements().find(|&x| eval(x) == 0).expect("splitting field");
        let powers: Vec<Elt> = (0..self.k).map(|i| big.pow(root, i as u64)).collect();
        Ok(self
            .elements()
            .map(|a| {
                digits(a as u64, self.p, self.k)
                    .iter()
                    .zip(&powers)
                    .fold(0, |acc, (&c, &r)| big.add(acc, big.mul(c as Elt, r)))
            })
            .collect())
    }
}
