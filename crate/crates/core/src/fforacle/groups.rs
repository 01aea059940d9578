//! Matrix-group counts and groupoid masses of finite quotient stacks.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::field::{Elt, FieldContext};
use super::{check_budget, MassResult};
use crate::error::{Error, Result};

/// Number of invertible `n × n` matrices over `F_q`, by enumeration.
pub fn gl_count(n: u32, q: u64) -> Result<u64> {
    let f = FieldContext::from_order(q)?;
    check_budget(q, n * n, "gl_count")?;
    let n = n as usize;
    let entries = n * n;
    let qq = f.order();
    let mut m = vec![0 as Elt; entries];
    let mut count = 0u64;
    loop {
        if full_rank(&f, &mut m.clone(), n) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == entries {
                return Ok(count);
            }
            m[i] += 1;
            if m[i] < qq {
                break;
            }
            m[i] = 0;
            i += 1;
        }
    }
}

fn full_rank(f: &FieldContext, m: &mut [Elt], n: usize) -> bool {
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| m[r * n + col] != 0) else {
            return false;
        };
        if piv != col {
            for c in 0..n {
                m.swap(piv * n + c, col * n + c);
            }
        }
        let inv = f.inv(m[col * n + col]).unwrap();
        for r in col + 1..n {
            let factor = f.mul(m[r * n + col], inv);
            if factor != 0 {
                for c in col..n {
                    let v = f.mul(factor, m[col * n + c]);
                    m[r * n + c] = f.sub(m[r * n + c], v);
                }
            }
        }
    }
    true
}

/// Which part of `V = A^k` to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stratum {
    All,
    /// Vectors with exactly `j` zero coordinates.
    ExactlyZeros(u32),
    Origin,
}

impl Stratum {
    fn contains(self, zeros: usize, k: usize) -> bool {
        match self {
            Stratum::All => true,
            Stratum::ExactlyZeros(j) => zeros == j as usize,
            Stratum::Origin => zeros == k,
        }
    }
}

/// Permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

/// Sorted cycle lengths.
pub fn cycle_type(p: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for s in 0..p.len() {
        let mut len = 0;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        if len > 0 {
            out.push(len);
        }
    }
    out.sort_unstable();
    out
}

/// Conjugacy classes of `Σ_n` as `(representative, |centraliser|)`, found by
/// brute force over the whole group.
pub fn conjugacy_classes(n: usize) -> Vec<(Vec<usize>, u64)> {
    let group = permutations(n);
    let mut classes: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for p in &group {
        classes.entry(cycle_type(p)).or_insert_with(|| p.clone());
    }
    classes
        .into_values()
        .map(|rep| {
            let c = group
                .iter()
                .filter(|g| compose(g, &rep) == compose(&rep, g))
                .count() as u64;
            (rep, c)
        })
        .collect()
}

/// `Σ_σ 1/|C(σ)|` over the conjugacy classes of `Σ_n`: the mass of `BΣ_n(F_q)`.
pub fn sigma_class_mass(n: usize) -> BigRational {
    conjugacy_classes(n)
        .into_iter()
        .map(|(_, c)| BigRational::new(1.into(), c.into()))
        .sum()
}

/// Mass of `[V_stratum / (G_m^k ⋊ Σ_k)](F_q)`.
///
/// For each conjugacy class `σ`, the twisted form has `F_q`-points
/// `{v ∈ V(F_{q^m}) : σ(v^{(q)}) = v}` where `m = ord σ`; these are found by
/// enumeration, as is the twisted torus (the fixed vectors with no zero
/// coordinate). The class contributes `|V_σ^stratum| / (|T_σ|·|C(σ)|)`.
pub fn monomial_quotient_mass(k: u32, q: u64, stratum: Stratum) -> Result<MassResult> {
    let start = Instant::now();
    let base = FieldContext::from_order(q)?;
    if let Stratum::ExactlyZeros(j) = stratum {
        if j > k {
            return Err(Error::InvalidArgument(format!("{j} zeros in dimension {k}")));
        }
    }
    let k = k as usize;
    let mut mass = BigRational::zero();
    for (sigma, centraliser) in conjugacy_classes(k) {
        let order = cycle_type(&sigma).into_iter().fold(1, num_integer::lcm) as u32;
        check_budget(q, order * k as u32, "monomial_quotient_mass")?;
        let big = FieldContext::new(base.characteristic(), base.degree() * order)?;
        let frob = big.power_map(q);
        let by_zeros = twisted_fixed_points(&big, &frob, &sigma);
        let torus = by_zeros[0];
        let hits: u64 = by_zeros
            .iter()
            .enumerate()
            .filter(|(z, _)| stratum.contains(*z, k))
            .map(|(_, c)| c)
            .sum();
        mass += BigRational::new(BigInt::from(hits), BigInt::from(torus) * centraliser);
    }
    let name = match stratum {
        Stratum::All => "all".to_string(),
        Stratum::ExactlyZeros(j) => format!("exactly {j} zeros"),
        Stratum::Origin => "origin".to_string(),
    };
    Ok(MassResult::new(
        mass,
        format!("twisted fixed points of monomial group, k = {k}, q = {q}, stratum {name}"),
        start,
    ))
}

/// Counts of `v ∈ V(F_{q^m})` with `v_{σ(i)} = v_i^q`, bucketed by number of
/// zero coordinates.
fn twisted_fixed_points(f: &FieldContext, frob: &[Elt], sigma: &[usize]) -> Vec<u64> {
    let k = sigma.len();
    let qq = f.order();
    let mut out = vec![0u64; k + 1];
    let mut v = vec![0 as Elt; k];
    loop {
        if (0..k).all(|i| v[sigma[i]] == frob[v[i] as usize]) {
            out[v.iter().filter(|&&x| x == 0).count()] += 1;
        }
        let mut i = 0;
        loop {
            if i == k {
                return out;
            }
            v[i] += 1;
            if v[i] < qq {
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

/// Mass of `[A^n / G_m](F_q)` with `G_m` scaling, summed over orbits as
/// `Σ 1/|Stab|`.
pub fn scaling_quotient_mass(n: u32, q: u64) -> Result<BigRational> {
    let f = FieldContext::from_order(q)?;
    check_budget(q, n, "scaling_quotient_mass")?;
    let qq = f.order() as u64;
    let units: Vec<Elt> = f.elements().skip(1).collect();
    let mut seen = vec![false; qq.pow(n) as usize];
    let index = |v: &[Elt]| v.iter().rev().fold(0u64, |a, &x| a * qq + x as u64) as usize;
    let mut mass = BigRational::zero();
    for start in 0..seen.len() {
        if seen[start] {
            continue;
        }
        let v: Vec<Elt> = (0..n)
            .map(|i| ((start as u64 / qq.pow(i)) % qq) as Elt)
            .collect();
        let mut stab = 0u64;
        for &u in &units {
            let w: Vec<Elt> = v.iter().map(|&x| f.mul(u, x)).collect();
            seen[index(&w)] = true;
            if w == v {
                stab += 1;
            }
        }
        mass += BigRational::new(1.into(), stab.into());
    }
    Ok(mass)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn general_linear_counts() {
        assert_eq!(gl_count(2, 2).unwrap(), 6);
        assert_eq!(gl_count(3, 2).unwrap(), 168);
        assert_eq!(gl_count(2, 3).unwrap(), 48);
        assert_eq!(gl_count(2, 4).unwrap(), 180);
        for q in [2, 3, 4, 5, 7] {
            assert_eq!(gl_count(1, q).unwrap(), q - 1);
        }
        assert!(matches!(gl_count(4, 5), Err(Error::BudgetExceeded(_))));
        assert!(gl_count(2, 6).is_err());
    }

    #[test]
    fn symmetric_groups() {
        assert_eq!(permutations(3).len(), 6);
        let classes = conjugacy_classes(3);
        let cents: Vec<u64> = classes.iter().map(|c| c.1).collect();
        assert_eq!(cents, vec![6, 2, 3]);
        for n in 1..=5 {
            assert_eq!(sigma_class_mass(n), r(1, 1));
        }
    }

    #[test]
    fn monomial_masses_at_two() {
        let all = monomial_quotient_mass(3, 2, Stratum::All).unwrap();
        assert_eq!(all.value, r(64, 21));
        assert_eq!(monomial_quotient_mass(3, 2, Stratum::Origin).unwrap().value, r(8, 21));
        assert_eq!(
            monomial_quotient_mass(3, 2, Stratum::ExactlyZeros(0)).unwrap().value,
            r(1, 1)
        );
        assert_eq!(monomial_quotient_mass(1, 3, Stratum::Origin).unwrap().value, r(1, 2));
        assert_eq!(monomial_quotient_mass(2, 2, Stratum::Origin).unwrap().value, r(2, 3));
        assert!(monomial_quotient_mass(2, 2, Stratum::ExactlyZeros(3)).is_err());
    }

    #[test]
    fn strata_partition_and_scaling() {
        for q in [2u64, 3, 4] {
            for k in 1..=3u32 {
                let all = monomial_quotient_mass(k, q, Stratum::All).unwrap().value;
                let origin = monomial_quotient_mass(k, q, Stratum::Origin).unwrap().value;
                let mut parts = origin.clone();
                for j in 0..k {
                    parts += monomial_quotient_mass(k, q, Stratum::ExactlyZeros(j)).unwrap().value;
                }
                assert_eq!(parts, all);
                assert_eq!(&origin * BigRational::from_integer(q.pow(k).into()), all);
            }
        }
    }

    #[test]
    fn special_quotients_follow_lang() {
        for q in [2u64, 3, 4, 5] {
            for n in 0..=3 {
                let lang = r(q.pow(n) as i64, q as i64 - 1);
                assert_eq!(scaling_quotient_mass(n, q).unwrap(), lang);
            }
        }
    }
}
