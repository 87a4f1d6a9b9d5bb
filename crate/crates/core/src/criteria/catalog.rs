use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{
    builtin_rules, verdict, AssertedTopic, Check, Citation, Fact, FactDb, Outcome, Predicate, Provenance, SpaceSpec,
    Verdict,
};
use crate::error::Result;

/// An expected verdict together with the facts it should follow from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub space: String,
    pub claim: Predicate,
    pub citation: String,
    pub facts: Vec<Fact>,
    /// Recomputing the premises is too slow for a routine run.
    pub stretch: bool,
    /// Some premise of the verdict can be computed here.
    pub computed_route: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogOutcome {
    pub space: String,
    pub claim: Predicate,
    pub verdict: Option<Verdict>,
    pub replayed: bool,
    /// Each computed premise with its rerun result, `None` when skipped.
    pub recomputed: Vec<(String, Option<bool>)>,
    pub asserted_only: bool,
}

impl CatalogOutcome {
    pub fn passed(&self) -> bool {
        self.verdict.is_some() && self.replayed && self.recomputed.iter().all(|(_, r)| *r != Some(false))
    }
}

fn computed(check: Check) -> Provenance {
    Provenance::computed(check)
}

fn computed_with(check: Check, scale: Option<&str>, assumes: Vec<Citation>) -> Provenance {
    Provenance::Computed { check, scale: scale.map(str::to_string), assumes }
}

fn asserted(text: &str) -> Provenance {
    Provenance::asserted(text)
}

fn asserted_on(text: &str, topic: AssertedTopic) -> Provenance {
    Provenance::Asserted { citation: Citation::on(text, topic) }
}

fn fact(space: &str, p: Predicate, prov: Provenance) -> Fact {
    Fact::new(space, p, prov)
}

fn grassmannian_11(n: usize) -> CatalogEntry {
    let space = format!("G(1|1,{n}|{n})");
    CatalogEntry {
        space: space.clone(),
        claim: Predicate::NotPiProjective,
        citation: format!("G(1|1,{n}|{n}) is not Π-projective"),
        facts: vec![
            fact(
                &space,
                Predicate::NonProjective,
                asserted_on("We know that X is not projective", AssertedTopic::GrassmannianNonProjective),
            ),
            fact(&space, Predicate::H1OMinusZero, computed(Check::GrassmannianH1Vanishes { n })),
        ],
        stretch: false,
        computed_route: true,
    }
}

fn diagonal_quotient(m: usize, n: usize, stretch: bool) -> CatalogEntry {
    let space = format!("(P^{{{}|{m}}}×P^{{{}|{n}}})/A^{{0|1}}", m - 1, n - 1);
    let mut facts = vec![
        fact(&space, Predicate::H0OPlusIsK, computed(Check::DiagonalQuotientH0IsK { m, n })),
        fact(
            &space,
            Predicate::ExistsTorsorProjectiveTotal,
            computed_with(
                Check::DiagonalTorsor { m, n },
                None,
                vec![Citation::new("a product of projective superspaces is projective")],
            ),
        ),
        fact(&space, Predicate::ExistsTorsorH1MapZero, computed(Check::ProductH1MinusZero { m, n })),
    ];
    if m >= 3 && n >= 3 {
        facts.push(fact(
            &space,
            Predicate::NonProjective,
            asserted("the quotient contains P²_Π as a sub-superscheme"),
        ));
    }
    CatalogEntry {
        space,
        claim: Predicate::PiProjective,
        citation: "the quotient is Π-projective".into(),
        facts,
        stretch,
        computed_route: true,
    }
}

fn pi_plane_facts(space: &str, scale: Option<&str>) -> Vec<Fact> {
    vec![
        fact(space, Predicate::H0OPlusIsK, computed_with(Check::PiQuotientH0IsK { m: 2 }, scale, vec![])),
        fact(
            space,
            Predicate::ExistsTorsorProjectiveTotal,
            computed_with(Check::PiTorsor { space: SpaceSpec::Projective { m: 2, n: 3 } }, scale, vec![]),
        ),
        fact(
            space,
            Predicate::ExistsTorsorH1MapZero,
            computed_with(Check::CechH1Zero { space: SpaceSpec::Projective { m: 2, n: 3 } }, scale, vec![]),
        ),
    ]
}

fn g214_facts() -> Vec<Fact> {
    let y = "G(2|1,4|4)/A^{0|1}";
    vec![
        fact(
            y,
            Predicate::PicTrivial,
            computed_with(
                Check::PiDescentObstructed { m: 1, range: 3 },
                Some("curvature obstruction checked on P^{1|2}; the full G(2|1,4|4) run is a stretch"),
                vec![
                    Citation::on(
                        "every line bundle on X=G(2|1,4|4) is isomorphic to Ber(S)^n",
                        AssertedTopic::GrassmannianPicard,
                    ),
                    Citation::new("there is a v-connection ∇ on Ber(S) with curvature 1"),
                ],
            ),
        ),
        fact(y, Predicate::H0OPlusIsK, asserted("H⁰(Y,O)⁺ embeds in H⁰(G(2|1,4|4),O)⁺ = k")),
        fact(
            y,
            Predicate::H1OMinusDimAtMostOne,
            asserted_on(
                "Since H¹(X,O)=0 (via the P^{1|1}-fibration F(1|1,2|1,n|n)→G(2|1,n|n))",
                AssertedTopic::FlagFibration,
            ),
        ),
        fact(
            y,
            Predicate::TorsorTotalNonProjective,
            asserted_on("X is not projective", AssertedTopic::GrassmannianNonProjective),
        ),
    ]
}

fn pi_plane_square_facts() -> Vec<Fact> {
    let y = "P²_Π×P²_Π";
    vec![
        fact(
            y,
            Predicate::PicTrivial,
            computed_with(
                Check::PiDescentObstructed { m: 2, range: 3 },
                None,
                vec![
                    Citation::new("the natural map Pic(X)×Pic(Y)→Pic(X×Y) is an isomorphism"),
                    Citation::new("Pic(P²_Π)=0"),
                ],
            ),
        ),
        fact(y, Predicate::H0OPlusIsK, computed(Check::PiPlaneProductH0IsK)),
        fact(
            y,
            Predicate::EveryTorsorNonProjective,
            computed_with(
                Check::DiagonalFlatIffBalanced { range: 3 },
                Some("descent criterion checked on P^{1|2}×P^{1|2}"),
                vec![
                    Citation::new(
                        "The total space of any A^{0|1}-torsor over P²_Π×P²_Π is isomorphic to either P^{2|3}×P²_Π or to the quotient P^{2|3}×P^{2|3}",
                    ),
                    Citation::new("Since P²_Π is not projective"),
                ],
            ),
        ),
    ]
}

/// The expected verdicts, each with its premises.
pub fn catalog() -> Vec<CatalogEntry> {
    let mut out = vec![grassmannian_11(2), grassmannian_11(3), grassmannian_11(4)];
    out.push(diagonal_quotient(2, 2, false));
    out.push(diagonal_quotient(3, 3, true));
    out.push(CatalogEntry {
        space: "P²_Π".into(),
        claim: Predicate::PiProjective,
        citation: "the quotient is the Π-projective space".into(),
        facts: pi_plane_facts("P²_Π", None),
        stretch: false,
        computed_route: true,
    });
    for (a, n, stretch) in [(1usize, 3usize, false), (2, 4, true)] {
        let space = format!("G({a}|0,{n}|{n})/A^{{0|1}}");
        let projective = Citation::new("G(a|0,n|n) is projective since the restriction of Ber(U) to the reduced space G(a,n) is ample");
        let torsor = fact(
            &space,
            Predicate::ExistsTorsorProjectiveTotal,
            computed_with(Check::PiTorsor { space: SpaceSpec::Grassmannian { a, b: 0, m: n, n } }, None, vec![projective]),
        );
        let facts = if a == 1 {
            vec![
                fact(
                    &space,
                    Predicate::H0OPlusIsK,
                    computed_with(Check::PiQuotientH0IsK { m: n - 1 }, Some("on the isomorphic model P^{2|3}"), vec![]),
                ),
                torsor,
                fact(
                    &space,
                    Predicate::ExistsTorsorH1MapZero,
                    computed(Check::CechH1Zero { space: SpaceSpec::Grassmannian { a, b: 0, m: n, n } }),
                ),
            ]
        } else {
            vec![
                fact(&space, Predicate::H0OPlusIsK, asserted("H⁰(X,O)⁺=k for the connected proper quotient")),
                torsor,
                fact(
                    &space,
                    Predicate::ExistsTorsorH1MapZero,
                    asserted("It is easy to check H¹(G(a|0,n|n),O)=0 for n≥a+2"),
                ),
            ]
        };
        out.push(CatalogEntry {
            space,
            claim: Predicate::PiProjective,
            citation: "the quotient G(a|0,n|n)/A^{0|1} is Π-projective".into(),
            facts,
            stretch,
            computed_route: true,
        });
    }
    let xsv = "X(S,V,c₁(L))";
    out.push(CatalogEntry {
        space: xsv.into(),
        claim: Predicate::NotOneOneEmbeddable,
        citation: "is not 1|1-embeddable".into(),
        facts: vec![
            fact(xsv, Predicate::PicTrivial, asserted("no line bundle on S extends to O_X^+")),
            fact(xsv, Predicate::H1OMinusZero, asserted("by assumption we have H¹(X,O_X^−)=0")),
        ],
        stretch: false,
        computed_route: false,
    });
    out.push(CatalogEntry {
        space: "G(2|1,4|4)/A^{0|1}".into(),
        claim: Predicate::NotOneOneEmbeddable,
        citation: "the quotient Y=G(2|1,4|4)/A^{0|1} is not 1|1-embeddable".into(),
        facts: g214_facts(),
        stretch: false,
        computed_route: true,
    });
    let mut cor = g214_facts();
    cor.push(fact(
        "G(2|1,4|4)/A^{0|1}",
        Predicate::ClosedSubschemeOf("G(3|2,5|5)/A^{0|1}".into()),
        asserted("This embedding induces a closed embedding of the quotients"),
    ));
    out.push(CatalogEntry {
        space: "G(3|2,5|5)/A^{0|1}".into(),
        claim: Predicate::NotOneOneEmbeddable,
        citation: "For n>a>1 and n≥4, the quotient G(a|a−1,n|n)/A^{0|1} is not 1|1-embeddable".into(),
        facts: cor,
        stretch: false,
        computed_route: true,
    });
    out.push(CatalogEntry {
        space: "P²_Π×P²_Π".into(),
        claim: Predicate::NotOneOneEmbeddable,
        citation: "P²_Π×P²_Π is not 1|1-embeddable".into(),
        facts: pi_plane_square_facts(),
        stretch: false,
        computed_route: true,
    });
    let mut prod = pi_plane_square_facts();
    prod.push(fact(
        "P²_Π×P²_Π",
        Predicate::ClosedSubschemeOf("G(1|1,3|3)×G(1|1,3|3)".into()),
        asserted("the closed embedding of P²_Π into G(1|1,3|3)"),
    ));
    out.push(CatalogEntry {
        space: "G(1|1,3|3)×G(1|1,3|3)".into(),
        claim: Predicate::NotOneOneEmbeddable,
        citation: "G(1|1,m|m)×G(1|1,n|n) is not 1|1-embeddable for m≥3, n≥3".into(),
        facts: prod,
        stretch: false,
        computed_route: true,
    });
    let xs = "X(S,Ω¹_S,c₁(L))";
    let mut cy = pi_plane_facts("Pⁿ_Π", Some("n = 2"));
    cy.push(fact(
        "X(Pⁿ,c₁(O(1)))",
        Predicate::ClosedSubschemeOf("Pⁿ_Π".into()),
        computed_with(
            Check::TruncationIso,
            Some("n = 2"),
            vec![Citation::new("obtained by replacing the structure sheaf with O/N³")],
        ),
    ));
    cy.push(fact(
        xs,
        Predicate::ClosedSubschemeOf("X(Pⁿ,c₁(O(1)))".into()),
        asserted("Then X(S,c₁(L)) embeds into X(Pⁿ,c₁(O(1)))"),
    ));
    cy.push(fact(
        xs,
        Predicate::ExistsTorsorProjectiveTotal,
        asserted_on(
            "the Serre duality pairing H¹(S,V)⊗Ext¹(V,ω_S)→H²(S,ω_S) is nondegenerate",
            AssertedTopic::SerreDuality,
        ),
    ));
    out.push(CatalogEntry {
        space: xs.into(),
        claim: Predicate::PiProjective,
        citation: "the supervariety X(S,V,c₁(L)) is Π-projective".into(),
        facts: cy,
        stretch: false,
        computed_route: true,
    });
    out
}

fn check_key(c: &Check) -> String {
    serde_json::to_string(c).expect("checks serialize")
}

/// Closes every entry, replays its trace and reruns its computed premises.
/// Stretch entries are closed and replayed but their checks are skipped
/// unless `include_stretch` is set.
pub fn run_catalog(include_stretch: bool) -> Result<Vec<CatalogOutcome>> {
    let rules = builtin_rules();
    let mut cache: HashMap<String, bool> = HashMap::new();
    let mut out = Vec::new();
    for entry in catalog() {
        let mut db = FactDb::new();
        for f in &entry.facts {
            db.add_fact(f.clone())?;
        }
        db.apply_rules(&rules)?;
        let verdict = match verdict(&db, &entry.space, &entry.claim)? {
            Outcome::Proved(v) => Some(v),
            Outcome::Undetermined => None,
        };
        let replayed = match &verdict {
            Some(v) => v.replay(&rules)?,
            None => false,
        };
        let mut recomputed = Vec::new();
        for f in &entry.facts {
            if let Provenance::Computed { check, .. } = &f.provenance {
                let r = if entry.stretch && !include_stretch {
                    None
                } else {
                    let key = check_key(check);
                    let value = match cache.get(&key) {
                        Some(v) => *v,
                        None => {
                            let v = check.run()?;
                            cache.insert(key, v);
                            v
                        }
                    };
                    Some(value)
                };
                recomputed.push((format!("{}({}): {}", f.predicate, f.space, check.describe()), r));
            }
        }
        let asserted_only = verdict.as_ref().is_some_and(|v| v.asserted_only());
        out.push(CatalogOutcome { space: entry.space, claim: entry.claim, verdict, replayed, recomputed, asserted_only });
    }
    Ok(out)
}

/// The union of all catalog facts, closed under the rules.
pub fn catalog_closure() -> Result<FactDb> {
    let mut db = FactDb::new();
    for entry in catalog() {
        for f in entry.facts {
            db.add_fact(f)?;
        }
    }
    db.apply_rules(&builtin_rules())?;
    Ok(db)
}
