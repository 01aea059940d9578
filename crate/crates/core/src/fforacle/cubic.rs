//! Plane cubics over `F_q`: singularity tests and the census of smooth ones.

use std::collections::HashSet;
use std::fmt;
use std::time::Instant;

use num_rational::BigRational;
use rayon::prelude::*;

use super::field::{Elt, FieldContext};
use super::groups::gl_count;
use super::{worker_pool, MassResult};
use crate::error::{Error, Result};

/// Exponents of `x, y, z` for each coefficient slot.
pub const MONOMIALS: [[u8; 3]; 10] = [
    [3, 0, 0],
    [2, 1, 0],
    [2, 0, 1],
    [1, 2, 0],
    [1, 1, 1],
    [1, 0, 2],
    [0, 3, 0],
    [0, 2, 1],
    [0, 1, 2],
    [0, 0, 3],
];

const NAMES: [&str; 10] = [
    "x^3", "x^2*y", "x^2*z", "x*y^2", "x*y*z", "x*z^2", "y^3", "y^2*z", "y*z^2", "z^3",
];

/// Largest `q` the census accepts.
pub const CENSUS_MAX_Q: u64 = 7;

fn slot(e: [u8; 3]) -> usize {
    MONOMIALS.iter().position(|m| *m == e).unwrap()
}

/// A ternary cubic form; coefficients are elements of the ambient `F_q`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct CubicForm {
    pub coeffs: [Elt; 10],
}

impl CubicForm {
    pub fn new(coeffs: [Elt; 10]) -> Self {
        Self { coeffs }
    }

    /// Sum of `c·monomial` with coefficients reduced into the prime field.
    pub fn from_terms(f: &FieldContext, terms: &[([u8; 3], i64)]) -> Self {
        let mut coeffs = [0; 10];
        for (e, c) in terms {
            let i = slot(*e);
            coeffs[i] = f.add(coeffs[i], f.from_int(*c));
        }
        Self { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// The multiple whose first nonzero coefficient is 1.
    pub fn normalised(&self, f: &FieldContext) -> Self {
        match self.coeffs.iter().find(|&&c| c != 0) {
            None => *self,
            Some(&lead) => {
                let inv = f.inv(lead).unwrap();
                Self {
                    coeffs: self.coeffs.map(|c| f.mul(c, inv)),
                }
            }
        }
    }
}

impl fmt::Display for CubicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .zip(NAMES)
            .filter(|(c, _)| **c != 0)
            .map(|(c, n)| if *c == 1 { n.to_string() } else { format!("{c}*{n}") })
            .collect();
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// `[F, ∂F/∂x, ∂F/∂y, ∂F/∂z]` at `pt`, computed in `f` with coefficients `c`.
fn value_and_gradient(f: &FieldContext, c: &[Elt; 10], pt: [Elt; 3]) -> [Elt; 4] {
    let pows: Vec<[Elt; 4]> = pt
        .iter()
        .map(|&v| [1, v, f.mul(v, v), f.mul(v, f.mul(v, v))])
        .collect();
    let mut out = [0; 4];
    for (i, e) in MONOMIALS.iter().enumerate() {
        if c[i] == 0 {
            continue;
        }
        let m: Elt = (0..3).fold(1, |acc, v| f.mul(acc, pows[v][e[v] as usize]));
        out[0] = f.add(out[0], f.mul(c[i], m));
        for v in 0..3 {
            if e[v] == 0 {
                continue;
            }
            let d = (0..3).fold(f.from_int(e[v] as i64), |acc, w| {
                let k = if w == v { e[w] - 1 } else { e[w] };
                f.mul(acc, pows[w][k as usize])
            });
            out[v + 1] = f.add(out[v + 1], f.mul(c[i], d));
        }
    }
    out
}

/// Representatives of `P^2(F)`.
fn projective_points(f: &FieldContext) -> Vec<[Elt; 3]> {
    let mut pts = vec![[1, 0, 0]];
    for x in f.elements() {
        pts.push([x, 1, 0]);
    }
    for x in f.elements() {
        for y in f.elements() {
            pts.push([x, y, 1]);
        }
    }
    pts
}

/// Coefficients (in `s^3, s^2 t, s t^2, t^3`) of a product of linear forms in `s, t`.
fn binary_product(f: &FieldContext, factors: &[[Elt; 2]]) -> Vec<Elt> {
    let mut acc = vec![1];
    for l in factors {
        let mut next = vec![0; acc.len() + 1];
        for (i, &a) in acc.iter().enumerate() {
            next[i] = f.add(next[i], f.mul(a, l[0]));
            next[i + 1] = f.add(next[i + 1], f.mul(a, l[1]));
        }
        acc = next;
    }
    acc
}

struct Extension {
    field: FieldContext,
    embed: Vec<Elt>,
}

/// Precomputed data for singularity tests over one base field.
pub struct CubicOracle {
    base: FieldContext,
    extensions: [Extension; 2],
    /// For each rational point, the functionals `c ↦ [F, F_x, F_y, F_z](pt)`.
    point_maps: Vec<[[Elt; 10]; 4]>,
    /// For each rational line, the map from `c` to the binary cubic `F|_ℓ`.
    line_maps: Vec<[[Elt; 10]; 4]>,
    norm_forms: HashSet<[Elt; 10]>,
}

impl CubicOracle {
    pub fn new(q: u64) -> Result<Self> {
        let base = FieldContext::from_order(q)?;
        let (p, k) = (base.characteristic(), base.degree());
        let ext = |m: u32| -> Result<Extension> {
            let field = FieldContext::new(p, k * m)?;
            let embed = base.embedding(&field)?;
            Ok(Extension { field, embed })
        };
        let extensions = [ext(2)?, ext(3)?];
        let unit = |i: usize| {
            let mut c = [0; 10];
            c[i] = 1;
            c
        };
        let pts = projective_points(&base);
        let point_maps = pts
            .iter()
            .map(|&pt| {
                let mut m = [[0; 10]; 4];
                for i in 0..10 {
                    let v = value_and_gradient(&base, &unit(i), pt);
                    for r in 0..4 {
                        m[r][i] = v[r];
                    }
                }
                m
            })
            .collect();
        let line_maps = projective_points(&base)
            .into_iter()
            .map(|l| {
                let on: Vec<[Elt; 3]> = pts
                    .iter()
                    .filter(|pt| {
                        (0..3).fold(0, |acc, v| base.add(acc, base.mul(l[v], pt[v]))) == 0
                    })
                    .take(2)
                    .copied()
                    .collect();
                let mut m = [[0; 10]; 4];
                for (i, e) in MONOMIALS.iter().enumerate() {
                    let mut factors = Vec::new();
                    for v in 0..3 {
                        for _ in 0..e[v] {
                            factors.push([on[0][v], on[1][v]]);
                        }
                    }
                    for (r, c) in binary_product(&base, &factors).into_iter().enumerate() {
                        m[r][i] = c;
                    }
                }
                m
            })
            .collect();
        let mut oracle = Self {
            base,
            extensions,
            point_maps,
            line_maps,
            norm_forms: HashSet::new(),
        };
        oracle.norm_forms = oracle.conjugate_line_triples();
        Ok(oracle)
    }

    pub fn field(&self) -> &FieldContext {
        &self.base
    }

    /// Normalised products `ℓ·ℓ^σ·ℓ^{σ²}` over lines `ℓ` of `P^2(F_{q^3})`
    /// not defined over `F_q`.
    fn conjugate_line_triples(&self) -> HashSet<[Elt; 10]> {
        let ext = &self.extensions[1];
        let big = &ext.field;
        let q = self.base.order() as u64;
        let frob = big.power_map(q);
        let mut back = vec![Elt::MAX; big.order() as usize];
        for (a, &b) in ext.embed.iter().enumerate() {
            back[b as usize] = a as Elt;
        }
        let mut out = HashSet::new();
        for l in projective_points(big) {
            let l1 = l.map(|c| frob[c as usize]);
            if l1 == l {
                continue;
            }
            let l2 = l1.map(|c| frob[c as usize]);
            let mut prod = [0; 10];
            for (i, &a) in l.iter().enumerate() {
                for (j, &b) in l1.iter().enumerate() {
                    let ab = big.mul(a, b);
                    if ab == 0 {
                        continue;
                    }
                    for (k, &c) in l2.iter().enumerate() {
                        let mut e = [0u8; 3];
                        e[i] += 1;
                        e[j] += 1;
                        e[k] += 1;
                        let s = slot(e);
                        prod[s] = big.add(prod[s], big.mul(ab, c));
                    }
                }
            }
            let form = CubicForm::new(prod.map(|c| back[c as usize]));
            debug_assert!(form.coeffs.iter().all(|&c| c != Elt::MAX));
            out.insert(form.normalised(&self.base).coeffs);
        }
        out
    }

    /// Number of forms in the norm-form set (up to scaling).
    pub fn norm_form_count(&self) -> usize {
        self.norm_forms.len()
    }

    /// Whether `F` has a singular point in `P^2(F_{q^k})` for some `k ≤ 3`,
    /// by scanning every point of `P^2(F_{q^2})` and `P^2(F_{q^3})`.
    pub fn singular_exhaustive(&self, form: &CubicForm) -> bool {
        self.extensions.iter().any(|ext| {
            let f = &ext.field;
            let c = form.coeffs.map(|x| ext.embed[x as usize]);
            let singular_at = |pt: [Elt; 3]| value_and_gradient(f, &c, pt).iter().all(|&v| v == 0);
            if singular_at([1, 0, 0]) || f.elements().any(|x| singular_at([x, 1, 0])) {
                return true;
            }
            // Affine chart z = 1 with F(x, y, 1) = ((a x + b) x + c) x + d.
            f.elements().any(|y| {
                let y2 = f.mul(y, y);
                let y3 = f.mul(y2, y);
                let b = f.add(f.mul(c[1], y), c[2]);
                let cc = f.add(f.add(f.mul(c[3], y2), f.mul(c[4], y)), c[5]);
                let d = f.add(
                    f.add(f.mul(c[6], y3), f.mul(c[7], y2)),
                    f.add(f.mul(c[8], y), c[9]),
                );
                f.elements().any(|x| {
                    let v = f.add(f.mul(f.add(f.mul(f.add(f.mul(c[0], x), b), x), cc), x), d);
                    v == 0 && singular_at([x, y, 1])
                })
            })
        })
    }

    /// Same answer as [`singular_exhaustive`](Self::singular_exhaustive), via
    /// rational singular points, rational linear factors and the norm-form set.
    pub fn singular_fast(&self, form: &CubicForm) -> bool {
        let f = &self.base;
        let apply = |row: &[Elt; 10]| {
            row.iter()
                .zip(&form.coeffs)
                .fold(0, |acc, (&a, &c)| f.add(acc, f.mul(a, c)))
        };
        if form.is_zero() {
            return true;
        }
        if self.point_maps.iter().any(|m| m.iter().all(|row| apply(row) == 0)) {
            return true;
        }
        if self.norm_forms.contains(&form.normalised(f).coeffs) {
            return true;
        }
        self.line_maps.iter().any(|m| m.iter().all(|row| apply(row) == 0))
    }

    /// Number of nonzero forms over `F_q` that define smooth curves.
    pub fn smooth_count(&self) -> u64 {
        let f = &self.base;
        let q = f.order() as usize;
        // Normalised forms: leading slot `lead` is 1, earlier slots are 0. Work
        // is split on the leading slot and the next two coefficients.
        let chunks: Vec<(usize, usize)> = (0..10)
            .flat_map(|lead| {
                let free = 9 - lead;
                let split = q.pow(free.min(2) as u32);
                (0..split).map(move |s| (lead, s))
            })
            .collect();
        let per_chunk = |&(lead, s): &(usize, usize)| -> u64 {
            let free = 9 - lead;
            let fixed = free.min(2);
            let mut coeffs = [0 as Elt; 10];
            coeffs[lead] = 1;
            for i in 0..fixed {
                coeffs[lead + 1 + i] = ((s / q.pow(i as u32)) % q) as Elt;
            }
            let rest = lead + 1 + fixed;
            let mut smooth = 0u64;
            loop {
                if !self.singular_fast(&CubicForm::new(coeffs)) {
                    smooth += 1;
                }
                let mut i = rest;
                loop {
                    if i == 10 {
                        return smooth;
                    }
                    coeffs[i] += 1;
                    if (coeffs[i] as usize) < q {
                        break;
                    }
                    coeffs[i] = 0;
                    i += 1;
                }
            }
        };
        let normalised: u64 = worker_pool().install(|| chunks.par_iter().map(per_chunk).sum());
        normalised * (q as u64 - 1)
    }
}

/// Number of nonzero cubic forms over `F_q` defining smooth plane curves.
pub fn smooth_cubic_count(q: u64) -> Result<u64> {
    if q > CENSUS_MAX_Q {
        return Err(Error::BudgetExceeded(format!(
            "cubic census needs q <= {CENSUS_MAX_Q}, got {q}"
        )));
    }
    Ok(CubicOracle::new(q)?.smooth_count())
}

/// Mass of the moduli stack of smooth plane cubics:
/// `smooth_cubic_count(q) / |GL_3(F_q)|`.
pub fn mass_m13(q: u64) -> Result<MassResult> {
    let start = Instant::now();
    let smooth = smooth_cubic_count(q)?;
    let gl3 = gl_count(3, q)?;
    Ok(MassResult::new(
        BigRational::new(smooth.into(), gl3.into()),
        format!("smooth cubic census {smooth} / |GL_3(F_{q})| {gl3}"),
        start,
    ))
}
