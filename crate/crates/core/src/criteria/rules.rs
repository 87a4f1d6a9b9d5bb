use serde::{Deserialize, Serialize};

use super::{Fact, FactDb, Predicate, Provenance};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RuleShape {
    /// All premises on one space give the conclusion on that space.
    Local { premises: Vec<Predicate>, conclusion: Predicate },
    /// `P(X)` and `closed-subscheme-of(Y)(X)` give `P(Y)`.
    Upward { property: Predicate },
    /// `P(Y)` and `closed-subscheme-of(Y)(X)` give `P(X)`.
    Downward { property: Predicate },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub name: String,
    pub shape: RuleShape,
    pub citation: String,
}

impl Rule {
    fn local(name: &str, premises: Vec<Predicate>, conclusion: Predicate, citation: &str) -> Self {
        Rule { name: name.into(), shape: RuleShape::Local { premises, conclusion }, citation: citation.into() }
    }

    pub fn premises(&self) -> Vec<Predicate> {
        match &self.shape {
            RuleShape::Local { premises, .. } => premises.clone(),
            RuleShape::Upward { property } | RuleShape::Downward { property } => vec![property.clone()],
        }
    }

    pub fn conclusion(&self) -> &Predicate {
        match &self.shape {
            RuleShape::Local { conclusion, .. } => conclusion,
            RuleShape::Upward { property } | RuleShape::Downward { property } => property,
        }
    }

    fn derived(&self, space: &str, conclusion: &Predicate, premises: Vec<(String, Predicate)>) -> Fact {
        Fact::new(space, conclusion.clone(), Provenance::Derived { rule: self.name.clone(), premises })
    }

    /// Conclusions this rule draws from the database, including ones
    /// already present.
    pub fn fire(&self, db: &FactDb) -> Vec<Fact> {
        let mut out = Vec::new();
        match &self.shape {
            RuleShape::Local { premises, conclusion } => {
                for space in db.spaces() {
                    if premises.iter().all(|p| db.holds(&space, p)) {
                        let cited = premises.iter().map(|p| (space.clone(), p.clone())).collect();
                        out.push(self.derived(&space, conclusion, cited));
                    }
                }
            }
            RuleShape::Upward { property } | RuleShape::Downward { property } => {
                let upward = matches!(self.shape, RuleShape::Upward { .. });
                for f in db.facts() {
                    let Predicate::ClosedSubschemeOf(big) = &f.predicate else { continue };
                    let small = &f.space;
                    let (from, to) = if upward { (small, big) } else { (big, small) };
                    if db.holds(from, property) {
                        let cited = vec![(from.clone(), property.clone()), (small.clone(), f.predicate.clone())];
                        out.push(self.derived(to, property, cited));
                    }
                }
            }
        }
        out
    }
}

/// The implications the engine knows, each with its citation anchor.
pub fn builtin_rules() -> Vec<Rule> {
    use Predicate::*;
    vec![
        Rule::local("R1", vec![Projective], PiProjective, "every projective superscheme is Π-projective"),
        Rule::local(
            "R2",
            vec![H0OPlusIsK, ExistsTorsorProjectiveTotal, ExistsTorsorH1MapZero],
            PiProjective,
            "Then X is Π-projective",
        ),
        Rule::local("R3", vec![NonProjective, H1OMinusZero], NotPiProjective, "then X is not Π-projective"),
        Rule::local("R4", vec![PicTrivial, H1OMinusZero], NotOneOneEmbeddable, "Then X is not 1|1-embeddable"),
        Rule::local(
            "R5",
            vec![H1LMinusZeroForAllL, NonProjective],
            NotOneOneEmbeddable,
            "Then X is not 1|1-embeddable",
        ),
        Rule::local(
            "R6",
            vec![PicTrivial, H0OPlusIsK, H1OMinusDimAtMostOne, TorsorTotalNonProjective],
            NotOneOneEmbeddable,
            "has dimension ≤ 1",
        ),
        Rule {
            name: "R7".into(),
            shape: RuleShape::Upward { property: NotOneOneEmbeddable },
            citation: "This embedding induces a closed embedding of the quotients".into(),
        },
        Rule::local(
            "R8",
            vec![PiProjective],
            ExistsTorsorProjectiveTotal,
            "there exists an A^{0|1}-torsor over X whose total space is projective",
        ),
        Rule::local(
            "R9",
            vec![OneOneEmbeddable],
            ExistsFibrationProjectiveTotal,
            "an A^{0|1}-fibration over X whose total space is projective",
        ),
        Rule::local(
            "R10",
            vec![PicTrivial, H0OPlusIsK, EveryTorsorNonProjective],
            NotOneOneEmbeddable,
            "it remains to check that A^{0|1}-torsors over Y are not projective",
        ),
        Rule {
            name: "R11".into(),
            shape: RuleShape::Downward { property: PiProjective },
            citation: "embeds into X(Pⁿ,c₁(O(1))), hence it is Π-projective".into(),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_are_cited_and_named_in_order() {
        let rules = builtin_rules();
        let names: Vec<&str> = rules.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, ["R1", "R2", "R3", "R4", "R5", "R6", "R7", "R8", "R9", "R10", "R11"]);
        assert!(rules.iter().all(|r| !r.citation.trim().is_empty()));
    }

    #[test]
    fn r4_fires_on_its_premises() {
        let mut db = FactDb::new();
        db.add_fact(Fact::new("X", Predicate::PicTrivial, Provenance::asserted("Pic(X)=0"))).unwrap();
        db.add_fact(Fact::new("X", Predicate::H1OMinusZero, Provenance::asserted("H¹(X,O)^−=0"))).unwrap();
        let r4 = builtin_rules().into_iter().find(|r| r.name == "R4").unwrap();
        let out = r4.fire(&db);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].predicate, Predicate::NotOneOneEmbeddable);
    }

    #[test]
    fn closed_subschemes_pass_properties_the_right_way() {
        let mut db = FactDb::new();
        db.add_fact(Fact::new("X", Predicate::ClosedSubschemeOf("Y".into()), Provenance::asserted("X ⊂ Y"))).unwrap();
        db.add_fact(Fact::new("X", Predicate::NotOneOneEmbeddable, Provenance::asserted("a"))).unwrap();
        db.add_fact(Fact::new("Y", Predicate::PiProjective, Provenance::asserted("b"))).unwrap();
        db.apply_rules(&builtin_rules()).unwrap();
        assert!(db.holds("Y", &Predicate::NotOneOneEmbeddable));
        assert!(db.holds("X", &Predicate::PiProjective));
        assert!(!db.holds("Y", &Predicate::OneOneEmbeddable));
    }
}
