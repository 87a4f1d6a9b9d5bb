//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report lines always reach the
//! terminal. The process exits nonzero when any criterion fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use superatlas::atlas::{
    build_cy_truncation, build_projective_superspace, build_supergrassmannian, global_freeness, iso_check,
    pi_action_field, product, product_fields, quotient_atlas, standard_pi_symmetry, truncate_atlas, Atlas, AtlasKind,
    GlobalField, GlobalFreeness,
};
use superatlas::cohomology::{bott_dim, cech_cohomology, h1_vanishing_report, CechWindow, SheafKind};
use superatlas::criteria::{catalog, run_catalog, AssertedTopic, Fact, Provenance};
use superatlas::homological::{decompose, ker_im_dims, monomials_of_degree, GradedSlice, HomologicalField};
use superatlas::linebundle::{connection_solve, curvature, exterior_product, standard_cocycles, ConnectionResult, VConnection};
use superatlas::oracle::{cech_p1, cech_p2_forms};
use superatlas::rational::q;
use superatlas::{Monomial, Parity, Ring, RingDescriptor, SuperPoly};

const SECOND: Duration = Duration::from_secs(1);
const MINUTE: Duration = Duration::from_secs(60);

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: superatlas::Error) -> String {
    e.to_string()
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    f()?;
    let spent = start.elapsed();
    ensure(spent <= limit, || format!("took {spent:.2?}, limit {limit:?}"))
}

fn pi_projective(m: usize) -> (Atlas, GlobalField) {
    let p = build_projective_superspace(m, m + 1).unwrap();
    let v = pi_action_field(&p, &standard_pi_symmetry(m + 1)).unwrap();
    (p, v)
}

fn pi_grassmannian(a: usize, b: usize, n: usize) -> (Atlas, GlobalField) {
    let g = build_supergrassmannian(a, b, n, n).unwrap();
    let v = pi_action_field(&g, &standard_pi_symmetry(n)).unwrap();
    (g, v)
}

fn random_element(ring: &Ring, max_degree: usize, rng: &mut ChaCha8Rng) -> SuperPoly {
    let monos: Vec<Monomial> = (0..=max_degree)
        .flat_map(|d| [Parity::Even, Parity::Odd].into_iter().flat_map(move |p| monomials_of_degree(ring, d, p)))
        .collect();
    let mut terms = Vec::new();
    for m in monos {
        if rng.gen_bool(0.3) {
            terms.push((m, q(rng.gen_range(-9..=9))));
        }
    }
    SuperPoly::from_terms(ring, terms)
}

fn random_odd(ring: &Ring, max_degree: usize, rng: &mut ChaCha8Rng) -> SuperPoly {
    let monos: Vec<Monomial> = (0..=max_degree).flat_map(|d| monomials_of_degree(ring, d, Parity::Odd)).collect();
    SuperPoly::from_terms(ring, monos.into_iter().map(|m| (m, q(rng.gen_range(-5..=5)))).collect::<Vec<_>>())
}

fn freeness_verdict(a: usize, b: usize, n: usize, expect_free: bool) -> Outcome {
    let (g, v) = pi_grassmannian(a, b, n);
    match global_freeness(&g, &v, 3).map_err(err)? {
        GlobalFreeness::Free { witnesses } => {
            ensure(expect_free, || format!("G({a}|{b},{n}|{n}) reported free"))?;
            for (i, theta) in witnesses.iter().enumerate() {
                let one = SuperPoly::one(v.fields[i].ring());
                let image = v.fields[i].derive(theta).map_err(err)?;
                ensure(image == one, || format!("chart {i}: v({theta}) = {image}"))?;
            }
            Ok(())
        }
        GlobalFreeness::NotFree { chart, point } => {
            ensure(!expect_free, || format!("G({a}|{b},{n}|{n}) reported not free"))?;
            let field = &v.fields[chart];
            for image in field.derivation().images() {
                let at = image.reduced_part().eval_reduced(&point);
                ensure(at == Some(q(0)), || format!("reduced image {image} is {at:?} at {point:?}"))?;
            }
            Ok(())
        }
        GlobalFreeness::Undecided { chart, bound } => Err(format!("chart {chart} undecided at bound {bound}")),
    }
}

fn criterion_1() -> Outcome {
    timed(SECOND, || {
        freeness_verdict(1, 0, 2, true)?;
        freeness_verdict(1, 0, 3, true)?;
        freeness_verdict(1, 1, 2, false)
    })?;
    timed(10 * MINUTE, || freeness_verdict(2, 1, 4, true))
}

fn criterion_2() -> Outcome {
    timed(SECOND, || {
        let r = RingDescriptor::polynomial(&["z"], &["t"]).map_err(err)?;
        let v = HomologicalField::from_named(&r, &[("z", SuperPoly::var(&r, "t"))]).map_err(err)?;
        for d in 0..=8 {
            let even = ker_im_dims(&v, d, Parity::Even).map_err(err)?;
            ensure((even.ker, even.im) == (1, 0), || format!("even slice {d}: {even:?}"))?;
            let odd_len = GradedSlice::new(&r, d, Parity::Odd).len();
            let odd = ker_im_dims(&v, d, Parity::Odd).map_err(err)?;
            ensure((odd.ker, odd.im) == (odd_len, odd_len), || format!("odd slice {d}: {odd:?}, {odd_len} monomials"))?;
        }
        Ok(())
    })
}

fn criterion_3() -> Outcome {
    timed(10 * SECOND, || {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in [1, 2] {
            let (p, v) = pi_projective(m);
            let qa = quotient_atlas(&p, &v, 1).map_err(err)?;
            for (i, chart) in qa.charts.iter().enumerate() {
                let field = &v.fields[i];
                for g in &chart.generators {
                    let vg = field.derive(&g.element).map_err(err)?;
                    ensure(vg.is_zero(), || format!("P^{{{m}|{}}} chart {i}: v({}) = {vg}", m + 1, g.name))?;
                }
                for _ in 0..100 {
                    let f = random_element(field.ring(), 4, &mut rng);
                    let (a, b) = decompose(field, &chart.witness, &f).map_err(err)?;
                    ensure(field.derive(&a).map_err(err)?.is_zero() && field.derive(&b).map_err(err)?.is_zero(), || {
                        format!("non-invariant parts for {f}")
                    })?;
                    let back = &a + &(&b * &chart.witness);
                    ensure(back == f, || format!("{f} recomposed to {back}"))?;
                }
            }
        }
        Ok(())
    })
}

fn criterion_4() -> Outcome {
    timed(2 * MINUTE, || {
        let (p, v) = pi_projective(2);
        let qa = quotient_atlas(&p, &v, 1).map_err(err)?;
        let y = qa.concrete().map_err(err)?;
        ensure(y.n_charts() == 3, || format!("{} charts", y.n_charts()))?;
        y.verify().map_err(err)?;
        let t = cech_cohomology(y, SheafKind::Structure, CechWindow::radius(4)).map_err(err)?;
        ensure(t.is_stable(), || "window not stable".into())?;
        ensure(t.dim(1, Parity::Odd) == 1, || format!("dim H¹(O⁻) = {}", t.dim(1, Parity::Odd)))
    })
}

fn criterion_5() -> Outcome {
    timed(MINUTE, || {
        let mut discrepancies = Vec::new();
        for m in -4i64..=4 {
            for j in 0..=2usize {
                let p1 = match j {
                    0 => cech_p1(m).map_err(err)?,
                    1 => cech_p1(m - 2).map_err(err)?,
                    _ => (0, 0),
                };
                for (qd, got) in [p1.0, p1.1].into_iter().enumerate() {
                    if bott_dim(1, j, m, qd) != got {
                        discrepancies.push(format!("P¹ j={j} m={m} q={qd}"));
                    }
                }
                let p2 = cech_p2_forms(j, m).map_err(err)?;
                for qd in 0..=2 {
                    let got = p2.get(qd).copied().unwrap_or(0);
                    if bott_dim(2, j, m, qd) != got {
                        discrepancies.push(format!("P² j={j} m={m} q={qd}"));
                    }
                }
            }
        }
        ensure(discrepancies.is_empty(), || discrepancies.join(", "))
    })
}

fn criterion_6() -> Outcome {
    timed(10 * SECOND, || {
        for n in 2..=4 {
            let r = h1_vanishing_report(n, (0, 0));
            ensure(r.h1_o_vanishes && r.h1_n_vanishes, || format!("n={n}: H¹ does not vanish"))?;
            for row in &r.rows {
                ensure(row.table.total(1) == 0, || format!("n={n}: piece k={} has H¹ ≠ 0", row.k))?;
            }
        }
        Ok(())
    })
}

fn criterion_7() -> Outcome {
    timed(10 * SECOND, || {
        let g = build_supergrassmannian(1, 1, 2, 2).map_err(err)?;
        let plain = cech_cohomology(&g, SheafKind::Structure, CechWindow::radius(3)).map_err(err)?;
        ensure(plain.is_stable() && plain.total(1) == 0, || format!("untwisted H¹ = {}", plain.total(1)))?;
        let ber = standard_cocycles(&g, 1).map_err(err)?;
        let twisted = cech_cohomology(&g, SheafKind::Twisted(&ber), CechWindow::radius(3)).map_err(err)?;
        ensure(twisted.is_stable() && twisted.total(1) == 2, || format!("twisted H¹ = {}", twisted.total(1)))
    })
}

fn found(x: &Atlas, l: &superatlas::linebundle::LineCocycle, v: &GlobalField) -> Result<VConnection, String> {
    match connection_solve(x, l, v, 1).map_err(err)? {
        ConnectionResult::Found { connection, global_odd } if global_odd.is_empty() => Ok(connection),
        ConnectionResult::Found { .. } => Err("global odd functions make the curvature ambiguous".into()),
        ConnectionResult::NoneUpTo { bound } => Err(format!("no connection up to degree {bound}")),
    }
}

fn criterion_8() -> Outcome {
    timed(MINUTE, || {
        let (p, v) = pi_projective(1);
        for n in -5i64..=5 {
            let l = standard_cocycles(&p, n).map_err(err)?;
            let c = curvature(&p, &v, &found(&p, &l, &v)?).map_err(err)?;
            let k = c.constant().ok_or_else(|| format!("O({n}): curvature not constant"))?;
            ensure(&k * &k == q(n * n), || format!("O({n}): curvature {k}"))?;
        }
        let pp = product(&p, &p).map_err(err)?;
        let vv = product_fields(&p, &p, &pp, Some(&v), Some(&v)).map_err(err)?;
        for n1 in -3i64..=3 {
            for n2 in -3i64..=3 {
                let l1 = standard_cocycles(&p, n1).map_err(err)?;
                let l2 = standard_cocycles(&p, n2).map_err(err)?;
                let l = exterior_product(&p, &p, &pp, &l1, &l2).map_err(err)?;
                let c = curvature(&pp, &vv, &found(&pp, &l, &vv)?).map_err(err)?;
                let k = c.constant().ok_or_else(|| format!("O({n1})⊠O({n2}): curvature not constant"))?;
                ensure((k == q(0)) == (n1 + n2 == 0), || format!("O({n1})⊠O({n2}): curvature {k}"))?;
            }
        }
        Ok(())
    })
}

fn single_chart(x: &Atlas, v: &GlobalField) -> (Atlas, GlobalField) {
    let a = Atlas::new("chart", AtlasKind::Custom, vec![x.chart(0).clone()], BTreeMap::new()).unwrap();
    let va = GlobalField::new(&a, vec![v.fields[0].clone()]).unwrap();
    (a, va)
}

fn criterion_9() -> Outcome {
    timed(10 * SECOND, || {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let spaces = [pi_projective(1), pi_projective(2), pi_grassmannian(1, 0, 2), pi_grassmannian(1, 1, 2)];
        for (s, (x, v)) in spaces.iter().enumerate() {
            let (a, va) = single_chart(x, v);
            let ring = a.chart(0).ring.clone();
            for _ in 0..100 {
                let base = VConnection { forms: vec![random_odd(&ring, 2, &mut rng)] };
                let phi = random_odd(&ring, 2, &mut rng);
                let shifted = VConnection { forms: vec![&base.forms[0] + &phi] };
                let before = curvature(&a, &va, &base).map_err(err)?;
                let after = curvature(&a, &va, &shifted).map_err(err)?;
                let expected = va.fields[0].derive(&phi).map_err(err)?;
                let moved = &after.local[0] - &before.local[0];
                ensure(moved == expected, || format!("space {s}: shift {phi} moved curvature by {moved}"))?;
            }
        }
        Ok(())
    })
}

fn criterion_10() -> Outcome {
    timed(5 * MINUTE, || {
        let (p, v) = pi_projective(2);
        let qa = quotient_atlas(&p, &v, 1).map_err(err)?;
        let t = truncate_atlas(qa.concrete().map_err(err)?, 3).map_err(err)?;
        let cy = build_cy_truncation(2, &q(1)).map_err(err)?;
        let r = iso_check(&t, &cy, 3).map_err(err)?;
        ensure(r.is_iso(), || format!("{r:?}"))
    })
}

fn criterion_11() -> Outcome {
    timed(5 * MINUTE, || {
        let outcomes = run_catalog(false).map_err(err)?;
        let entries = catalog();
        for (o, e) in outcomes.iter().zip(&entries) {
            ensure(o.passed(), || format!("{} {}: verdict or replay failed", o.claim, o.space))?;
            let v = o.verdict.as_ref().ok_or_else(|| format!("{}: no verdict", o.space))?;
            let text = v.to_string();
            for leaf in v.trace.leaves() {
                if let Provenance::Asserted { citation } = &leaf.provenance {
                    ensure(text.contains(&format!("ASSERTED: “{}”", citation.text)), || {
                        format!("{}: asserted premise not labeled", o.space)
                    })?;
                }
            }
            if !e.stretch {
                ensure(o.recomputed.iter().all(|(_, r)| *r == Some(true)), || format!("{}: a premise was skipped", o.space))?;
            }
        }
        Ok(())
    })
}

fn criterion_12() -> Outcome {
    let topics = [
        AssertedTopic::GrassmannianNonProjective,
        AssertedTopic::GrassmannianPicard,
        AssertedTopic::FlagFibration,
        AssertedTopic::SerreDuality,
    ];
    let facts: Vec<Fact> = catalog().into_iter().flat_map(|e| e.facts).collect();
    let mut seen = Vec::new();
    let mut asserted_keys = Vec::new();
    for f in &facts {
        match &f.provenance {
            Provenance::Asserted { citation } => {
                if let Some(t) = citation.topic {
                    seen.push(t);
                    asserted_keys.push((f.space.clone(), f.predicate.clone()));
                }
            }
            Provenance::Computed { assumes, .. } => seen.extend(assumes.iter().filter_map(|c| c.topic)),
            Provenance::Derived { .. } => {}
        }
    }
    for t in topics {
        ensure(seen.contains(&t), || format!("{t:?} is not cited anywhere"))?;
    }
    for f in &facts {
        if matches!(f.provenance, Provenance::Computed { .. }) {
            let key = (f.space.clone(), f.predicate.clone());
            ensure(!asserted_keys.contains(&key), || format!("{}({}) is also computed", f.predicate, f.space))?;
        }
    }
    for o in run_catalog(false).map_err(err)? {
        let Some(v) = o.verdict else { continue };
        for leaf in v.trace.leaves() {
            let key = (leaf.space.clone(), leaf.predicate.clone());
            if asserted_keys.contains(&key) {
                ensure(matches!(leaf.provenance, Provenance::Asserted { .. }), || {
                    format!("{}: {} enters as a computed premise", o.space, leaf.predicate)
                })?;
            }
        }
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("freeness dichotomy on supergrassmannians", criterion_1),
        ("kernel and image slices of θ∂z", criterion_2),
        ("decompose and recompose on chart rings", criterion_3),
        ("Π-projective plane as a certified quotient", criterion_4),
        ("Bott formula against the Čech oracle", criterion_5),
        ("H¹ vanishing on G(1|1,n|n)", criterion_6),
        ("Ber-twisted H¹ on G(1|1,2|2)", criterion_7),
        ("curvature of O(n) and flat products", criterion_8),
        ("gauge covariance of curvature", criterion_9),
        ("truncation isomorphism", criterion_10),
        ("catalog regression", criterion_11),
        ("asserted topics stay asserted", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let spent = start.elapsed();
        match outcome {
            Ok(()) => println!("PASS {:>2} {name} ({spent:.2?})", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({spent:.2?}): {e}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
