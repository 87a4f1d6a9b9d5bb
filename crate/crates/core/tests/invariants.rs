use proptest::prelude::*;

use superatlas::atlas::{build_projective_superspace, pi_action_field, quotient_atlas, standard_pi_symmetry};
use superatlas::cohomology::{bott_dim, bott_table, kunneth, DimTable};
use superatlas::criteria::{builtin_rules, catalog, FactDb};
use superatlas::homological::{decompose, monomials_of_degree, HomologicalField};
use superatlas::linebundle::standard_cocycles;
use superatlas::rational::q;
use superatlas::superalgebra::RingHom;
use superatlas::{Monomial, Parity, Ring, RingDescriptor, SuperMatrix, SuperPoly};

type Coeffs = Vec<(i64, usize)>;

fn coeffs() -> impl Strategy<Value = Coeffs> {
    proptest::collection::vec((-6i64..=6, 0usize..1000), 0..7)
}

fn basis(ring: &Ring, max_degree: usize, parity: Option<Parity>) -> Vec<Monomial> {
    let parities: Vec<Parity> = parity.map_or(vec![Parity::Even, Parity::Odd], |p| vec![p]);
    (0..=max_degree).flat_map(|d| parities.iter().flat_map(move |&p| monomials_of_degree(ring, d, p))).collect()
}

fn build(ring: &Ring, monos: &[Monomial], c: &Coeffs) -> SuperPoly {
    SuperPoly::from_terms(ring, c.iter().map(|(k, i)| (monos[i % monos.len()].clone(), q(*k))).collect::<Vec<_>>())
}

fn small_ring() -> Ring {
    RingDescriptor::polynomial(&["x", "y"], &["a", "b", "c"]).unwrap()
}

fn sign(p: Parity, r: Parity) -> i64 {
    if p == Parity::Odd && r == Parity::Odd {
        -1
    } else {
        1
    }
}

fn p12_chart() -> (Ring, HomologicalField, SuperPoly) {
    let p = build_projective_superspace(1, 2).unwrap();
    let v = pi_action_field(&p, &standard_pi_symmetry(2)).unwrap();
    let qa = quotient_atlas(&p, &v, 1).unwrap();
    let field = v.fields[0].clone();
    (field.ring().clone(), field, qa.charts[0].witness.clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative_and_distributive(a in coeffs(), b in coeffs(), c in coeffs()) {
        let r = small_ring();
        let m = basis(&r, 2, None);
        let (f, g, h) = (build(&r, &m, &a), build(&r, &m, &b), build(&r, &m, &c));
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
    }

    #[test]
    fn homogeneous_elements_supercommute(a in coeffs(), b in coeffs(), pa in any::<bool>(), pb in any::<bool>()) {
        let r = small_ring();
        let par = |odd: bool| if odd { Parity::Odd } else { Parity::Even };
        let f = build(&r, &basis(&r, 2, Some(par(pa))), &a);
        let g = build(&r, &basis(&r, 2, Some(par(pb))), &b);
        let swapped = (&g * &f).scale_int(sign(par(pa), par(pb)));
        prop_assert_eq!(&f * &g, swapped);
        if pa {
            prop_assert!((&f * &f).is_zero());
        }
    }

    #[test]
    fn ring_homomorphisms_are_multiplicative(a in coeffs(), b in coeffs(), imgs in proptest::collection::vec(coeffs(), 5)) {
        let r = small_ring();
        let even = basis(&r, 2, Some(Parity::Even));
        let odd = basis(&r, 2, Some(Parity::Odd));
        let images: Vec<SuperPoly> = imgs
            .iter()
            .enumerate()
            .map(|(i, c)| if i < 2 { build(&r, &even, c) } else { build(&r, &odd, c) })
            .collect();
        let phi = RingHom::new(&r, &r, images).unwrap();
        let all = basis(&r, 2, None);
        let (f, g) = (build(&r, &all, &a), build(&r, &all, &b));
        prop_assert_eq!(phi.apply(&(&f * &g)).unwrap(), &phi.apply(&f).unwrap() * &phi.apply(&g).unwrap());
    }

    #[test]
    fn berezinian_is_multiplicative(c in proptest::collection::vec(-4i64..=4, 16)) {
        let r = RingDescriptor::new(&["x", "y"], &["a", "b", "c", "d"], &["x", "y"]).unwrap();
        let v = |n: &str| SuperPoly::var(&r, n);
        let k = |i: usize| if c[i] == 0 { q(1) } else { q(c[i]) };
        let par = vec![Parity::Even, Parity::Odd];
        let matrix = |o: usize| {
            let rows = vec![
                vec![&v("x").scale(&k(o)) + &(&v("a") * &v("b")).scale(&q(c[o + 1])), &v("a").scale(&q(c[o + 2])) + &(&v("x") * &v("c")).scale(&q(c[o + 3]))],
                vec![&v("b").scale(&q(c[o + 4])) + &v("d").scale(&q(c[o + 5])), &v("y").scale(&k(o + 6)) + &(&v("c") * &v("d")).scale(&q(c[o + 7]))],
            ];
            SuperMatrix::new(&r, rows, par.clone(), par.clone()).unwrap()
        };
        let (m, n) = (matrix(0), matrix(8));
        let product = m.try_mul(&n).unwrap();
        prop_assert_eq!(product.berezinian().unwrap(), &m.berezinian().unwrap() * &n.berezinian().unwrap());
    }

    #[test]
    fn homological_field_squares_to_zero(a in coeffs()) {
        let (r, v, _) = p12_chart();
        let f = build(&r, &basis(&r, 3, None), &a);
        prop_assert!(v.derive(&v.derive(&f).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn decomposition_recomposes(a in coeffs()) {
        let (r, v, theta) = p12_chart();
        let f = build(&r, &basis(&r, 3, None), &a);
        let (inv, coef) = decompose(&v, &theta, &f).unwrap();
        prop_assert!(v.derive(&inv).unwrap().is_zero());
        prop_assert!(v.derive(&coef).unwrap().is_zero());
        prop_assert_eq!(&inv + &(&coef * &theta), f);
    }

    #[test]
    fn cocycle_powers_add(a in -3i64..=3, b in -3i64..=3) {
        let p = build_projective_superspace(1, 1).unwrap();
        let la = standard_cocycles(&p, a).unwrap();
        let lb = standard_cocycles(&p, b).unwrap();
        let lab = standard_cocycles(&p, a + b).unwrap();
        prop_assert_eq!(la.tensor(&lb).unwrap().transitions, lab.transitions);
    }

    #[test]
    fn bott_tables_obey_serre_duality(n in 1usize..=3, j in 0usize..=3, m in -5i64..=5) {
        prop_assume!(j <= n);
        for qd in 0..=n {
            prop_assert_eq!(bott_dim(n, j, m, qd), bott_dim(n, n - j, -m, n - qd));
        }
    }

    #[test]
    fn kunneth_is_symmetric(n1 in 1usize..=2, n2 in 1usize..=2, m1 in -3i64..=3, m2 in -3i64..=3) {
        let (a, b) = (bott_table(n1, 0, m1), bott_table(n2, 0, m2));
        let ab: DimTable = kunneth(&a, &b).unwrap();
        prop_assert_eq!(ab.clone(), kunneth(&b, &a).unwrap());
        prop_assert_eq!(ab.euler_characteristic(Parity::Even), a.euler_characteristic(Parity::Even) * b.euler_characteristic(Parity::Even));
    }

    #[test]
    fn rule_closure_ignores_fact_order(seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut facts: Vec<_> = catalog().into_iter().flat_map(|e| e.facts).collect();
        let close = |facts: &[superatlas::criteria::Fact]| {
            let mut db = FactDb::new();
            for f in facts {
                db.add_fact(f.clone()).unwrap();
            }
            db.apply_rules(&builtin_rules()).unwrap();
            db.facts().map(|f| (f.space.clone(), f.predicate.clone())).collect::<std::collections::BTreeSet<_>>()
        };
        let reference = close(&facts);
        facts.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(close(&facts), reference);
    }
}
