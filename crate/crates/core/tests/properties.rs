use proptest::prelude::*;

use kstack::completed::{CompletedClass, GrowthCertificate};
use kstack::expr::{parse, Expr, Group};
use kstack::lring::{cyclotomic, is_invertible_localised, AdmissibleDenominator, IntLaurent, TateRational};
use kstack::torsion::{chi_g, torsion_mul, CohomologyDescriptor, GradedTorsionSeries, TorsionModuleClass};
use kstack::weights::weight_series;

fn laurent(lo: i64, len: usize, bound: i64) -> impl Strategy<Value = IntLaurent> {
    (lo..=lo + 2, prop::collection::vec(-bound..=bound, 0..=len))
        .prop_map(|(lo, cs)| IntLaurent::from_terms(cs.into_iter().enumerate().map(|(i, c)| (lo + i as i64, c))))
}

fn tate() -> impl Strategy<Value = TateRational> {
    (laurent(-2, 4, 4), 0u32..=2, prop::collection::vec(1u64..=6, 0..=3))
        .prop_map(|(num, a, f)| TateRational::new(num, AdmissibleDenominator::new(a, f)))
}

fn expr() -> impl Strategy<Value = Expr> {
    let group = prop_oneof![
        (1u32..4).prop_map(Group::Gl),
        (1u32..4).prop_map(Group::Sl),
        Just(Group::Gm),
        Just(Group::Ga),
        (1u32..5).prop_map(Group::Mu),
        (1u32..4).prop_map(Group::Sigma),
        (1u32..4).prop_map(Group::Mon),
    ];
    let leaf = prop_oneof![
        Just(Expr::L),
        (0u32..20).prop_map(|n| Expr::Int(n.into())),
        (1u32..4).prop_map(Expr::Gl),
        (1u32..4).prop_map(Expr::Sl),
        (0u32..4).prop_map(Expr::Proj),
        Just(Expr::Gm),
        Just(Expr::Ga),
        (1u32..4).prop_map(Expr::Mu),
        (1u32..4).prop_map(Expr::Sigma),
        group.prop_map(Expr::B),
        prop::sample::select(vec!["X", "Pic", "y_2"]).prop_map(|s| Expr::Symbol(s.into())),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let b = |e: Expr| Box::new(e);
        prop_oneof![
            inner.clone().prop_map(move |a| Expr::Neg(b(a))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Sub(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Mul(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Div(b(x), b(y))),
            (inner, -3i64..4).prop_map(move |(x, n)| Expr::Pow(b(x), n)),
        ]
    })
}

proptest! {
    #[test]
    fn printing_then_parsing_is_identity(e in expr()) {
        let text = e.to_string();
        prop_assert_eq!(parse(&text).unwrap(), e, "{}", text);
    }

    #[test]
    fn localised_ring_axioms(x in tate(), y in tate(), z in tate()) {
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&(&x - &y) + &y, x.clone());
    }

    #[test]
    fn specialisation_is_a_ring_map(x in tate(), y in tate(), q in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let (a, b) = (x.eval_int(q).unwrap(), y.eval_int(q).unwrap());
        prop_assert_eq!((&x * &y).eval_int(q).unwrap(), &a * &b);
        prop_assert_eq!((&x + &y).eval_int(q).unwrap(), a + b);
    }

    #[test]
    fn units_are_l_powers_times_cyclotomics(a in -5i64..=5, ns in prop::collection::vec(1u64..=30, 0..5), x in tate()) {
        let mut f = IntLaurent::monomial(1, a);
        for n in &ns {
            f = &f * &cyclotomic(*n);
        }
        let u = is_invertible_localised(&f).expect("unit");
        prop_assert_eq!(u.reconstruct(), f.clone());
        let inv = TateRational::from(f).inverse().unwrap();
        prop_assert_eq!(&(&x * &inv) * &TateRational::from(u.reconstruct()), x);
    }

    #[test]
    fn expansion_respects_products(x in tate(), y in tate(), floor in -25i64..-5) {
        let (ex, ey) = (CompletedClass::expand(&x, floor), CompletedClass::expand(&y, floor));
        let prod = &ex * &ey;
        match prod.floor() {
            Some(f) => prop_assert_eq!(prod, CompletedClass::expand(&(&x * &y), f).truncate(f)),
            None => prop_assert_eq!(prod, CompletedClass::expand(&(&x * &y), floor)),
        }
    }

    #[test]
    fn deeper_expansion_only_appends(x in tate(), floor in -20i64..0, extra in 1i64..10) {
        let shallow = CompletedClass::expand(&x, floor);
        let deep = CompletedClass::expand(&x, floor - extra);
        if shallow.is_exact() {
            prop_assert_eq!(deep, shallow);
        } else {
            prop_assert_eq!(deep.truncate(floor), shallow);
        }
    }

    #[test]
    fn truncated_counts_bracket_the_exact_count(x in tate(), q in prop::sample::select(vec![2u64, 3, 5]), depth in 10i64..40) {
        let series = CompletedClass::expand(&x, -depth);
        let cert = GrowthCertificate::for_tate(&x);
        let (value, bound) = series.count_truncated(q, &cert).unwrap();
        let exact = x.eval_int(q).unwrap();
        let gap = if exact > value { &exact - &value } else { &value - &exact };
        prop_assert!(gap <= bound);
    }

    #[test]
    fn weights_are_sub_additive_and_sub_multiplicative(x in laurent(-4, 6, 9), y in laurent(-4, 6, 9), k in -6i64..6) {
        let (wx, wy) = (weight_series(&x), weight_series(&y));
        prop_assert!(weight_series(&(&x + &y)).le(&wx.add(&wy)));
        prop_assert!(weight_series(&(&x * &y)).le(&wx.mul(&wy)));
        prop_assert_eq!(weight_series(&x.shift(k)), wx.shift(2 * k));
    }
}

// Künneth oracle: cochain complexes of free modules, cohomology through a
// Smith normal form.

/// A cochain complex: `dims[k]` generators in degree `k`, `d[k]` the matrix of
/// `C^k -> C^{k+1}` (rows index `C^{k+1}`).
#[derive(Clone, Debug)]
struct Complex {
    dims: Vec<usize>,
    d: Vec<Vec<Vec<i64>>>,
}

impl Complex {
    /// `H^i = Z^b ⊕ ⊕ Z/m` realised by `Z --m--> Z` in degrees `i-1, i`.
    fn from_cohomology(groups: &[(usize, Vec<u64>)]) -> Self {
        let top = groups.len() + 1;
        let mut dims = vec![0usize; top];
        let mut edges = Vec::new();
        for (i, (b, tors)) in groups.iter().enumerate() {
            dims[i] += b;
            for &m in tors {
                edges.push((i - 1, dims[i - 1], dims[i], m as i64));
                dims[i - 1] += 1;
                dims[i] += 1;
            }
        }
        let mut d: Vec<Vec<Vec<i64>>> = (0..top)
            .map(|k| vec![vec![0; dims[k]]; if k + 1 < top { dims[k + 1] } else { 0 }])
            .collect();
        for (k, src, dst, m) in edges {
            d[k][dst][src] = m;
        }
        Self { dims, d }
    }

    fn tensor(&self, other: &Self) -> Self {
        let n = self.dims.len() + other.dims.len() - 1;
        let mut index = vec![Vec::new(); n];
        for p in 0..self.dims.len() {
            for q in 0..other.dims.len() {
                for a in 0..self.dims[p] {
                    for b in 0..other.dims[q] {
                        index[p + q].push((p, q, a, b));
                    }
                }
            }
        }
        let dims: Vec<usize> = index.iter().map(Vec::len).collect();
        let pos = |k: usize, t: (usize, usize, usize, usize)| index[k].iter().position(|&u| u == t).unwrap();
        let mut d = Vec::new();
        for k in 0..n {
            let rows = if k + 1 < n { dims[k + 1] } else { 0 };
            let mut m = vec![vec![0i64; dims[k]]; rows];
            for (col, &(p, q, a, b)) in index[k].iter().enumerate() {
                if p + 1 < self.dims.len() {
                    for (a2, row) in self.d[p].iter().enumerate() {
                        if row[a] != 0 {
                            m[pos(k + 1, (p + 1, q, a2, b))][col] += row[a];
                        }
                    }
                }
                if q + 1 < other.dims.len() {
                    let sign = if p % 2 == 0 { 1 } else { -1 };
                    for (b2, row) in other.d[q].iter().enumerate() {
                        if row[b] != 0 {
                            m[pos(k + 1, (p, q + 1, a, b2))][col] += sign * row[b];
                        }
                    }
                }
            }
            d.push(m);
        }
        Self { dims, d }
    }

    fn cohomology(&self) -> CohomologyDescriptor {
        let mut out = CohomologyDescriptor::new();
        for k in 0..self.dims.len() {
            let out_factors = smith(&self.d[k]);
            let in_factors = if k == 0 { Vec::new() } else { smith(&self.d[k - 1]) };
            let free = self.dims[k] - out_factors.len() - in_factors.len();
            if free > 0 {
                out = out.with_betti(k as u32, free as u64);
            }
            for e in in_factors.into_iter().filter(|&e| e > 1) {
                out = out.with_cyclic(k as u32, e as u64);
            }
        }
        out
    }
}

/// Nonzero invariant factors.
fn smith(m: &[Vec<i64>]) -> Vec<i64> {
    let mut a: Vec<Vec<i64>> = m.to_vec();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pr, pc)) = (t..rows)
            .flat_map(|r| (t..cols).map(move |c| (r, c)))
            .filter(|&(r, c)| a[r][c] != 0)
            .min_by_key(|&(r, c)| a[r][c].abs())
        else {
            break;
        };
        a.swap(t, pr);
        for row in a.iter_mut() {
            row.swap(t, pc);
        }
        let mut clean = true;
        for r in t + 1..rows {
            let f = a[r][t] / a[t][t];
            for c in t..cols {
                a[r][c] -= f * a[t][c];
            }
            clean &= a[r][t] == 0;
        }
        for c in t + 1..cols {
            let f = a[t][c] / a[t][t];
            for r in t..rows {
                a[r][c] -= f * a[r][t];
            }
            clean &= a[t][c] == 0;
        }
        if !clean {
            continue;
        }
        if let Some((r, _)) = (t + 1..rows)
            .flat_map(|r| (t + 1..cols).map(move |c| (r, c)))
            .find(|&(r, c)| a[r][c] % a[t][t] != 0)
        {
            for c in t..cols {
                a[t][c] += a[r][c];
            }
            continue;
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

fn cohomology_groups() -> impl Strategy<Value = Vec<(usize, Vec<u64>)>> {
    (1usize..=3).prop_flat_map(|n| {
        prop::collection::vec((0usize..=2, prop::collection::vec(2u64..=9, 0..=2)), n).prop_map(|mut g| {
            g[0].1.clear();
            g
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chi_g_is_multiplicative_against_kunneth(x in cohomology_groups(), y in cohomology_groups()) {
        let (cx, cy) = (Complex::from_cohomology(&x), Complex::from_cohomology(&y));
        let prod = cx.tensor(&cy).cohomology();
        let predicted = torsion_mul(&chi_g(&cx.cohomology()), &chi_g(&cy.cohomology()));
        prop_assert_eq!(chi_g(&prod), predicted);
    }

    #[test]
    fn chi_g_is_additive(x in cohomology_groups(), y in cohomology_groups()) {
        let (dx, dy) = (Complex::from_cohomology(&x).cohomology(), Complex::from_cohomology(&y).cohomology());
        prop_assert_eq!(chi_g(&dx.disjoint_union(&dy)), chi_g(&dx).add(&chi_g(&dy)));
    }

    #[test]
    fn torsion_product_is_associative(
        parts in prop::collection::vec((-3i64..=3, -2i64..=2, prop::sample::select(vec![2u64, 3, 5]), 1u32..=4, -2i64..=2), 3..=6)
    ) {
        let series: Vec<GradedTorsionSeries> = parts
            .chunks(2)
            .map(|c| {
                c.iter().fold(GradedTorsionSeries::zero(), |acc, &(i, u, p, e, m)| {
                    let x = TorsionModuleClass::unit(u).add(&TorsionModuleClass::alpha(p, e, m));
                    acc.add(&GradedTorsionSeries::single(i, x))
                })
            })
            .collect();
        let (a, b) = (&series[0], &series[1]);
        let c = series.get(2).cloned().unwrap_or_else(GradedTorsionSeries::one);
        prop_assert_eq!(torsion_mul(&torsion_mul(a, b), &c), torsion_mul(a, &torsion_mul(b, &c)));
        prop_assert_eq!(torsion_mul(a, b), torsion_mul(b, a));
        prop_assert_eq!(torsion_mul(a, &GradedTorsionSeries::one()), a.clone());
    }
}

#[test]
fn smith_normal_form_examples() {
    assert_eq!(smith(&[vec![2, 4], vec![6, 8]]), vec![2, 4]);
    assert_eq!(smith(&[vec![3]]), vec![3]);
    assert_eq!(smith(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
    assert!(smith(&[vec![0, 0]]).is_empty());
}

#[test]
fn kunneth_oracle_on_lens_like_complexes() {
    // H^0 = Z, H^1 = Z/2. Degree 1 of the square gets H^0 ⊗ H^1 twice and
    // Tor(H^1, H^1) once; degree 2 gets H^1 ⊗ H^1.
    let c = Complex::from_cohomology(&[(1, vec![]), (0, vec![2])]);
    let sq = c.tensor(&c).cohomology();
    assert_eq!(sq.degree(0).betti, 1);
    assert_eq!(sq.degree(1).torsion.get(&(2, 1)), Some(&3));
    assert_eq!(sq.degree(2).torsion.get(&(2, 1)), Some(&1));
    let t = TorsionModuleClass::alpha(2, 1, 1);
    assert_eq!(t.mul(&t).1, t);
}
