//! Forward chaining over provenance-tagged facts about superschemes.
//!
//! Facts are atoms `predicate(space)`. Each one records where it came from:
//! a computation that can be rerun, a cited statement, or a rule applied to
//! earlier facts. Closing a database under the rules yields verdicts whose
//! proof trees bottom out in computed or asserted leaves.

mod catalog;
mod checks;
mod rules;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use catalog::{catalog, catalog_closure, run_catalog, CatalogEntry, CatalogOutcome};
pub use checks::{Check, SpaceSpec};
pub use rules::{builtin_rules, Rule, RuleShape};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Predicate {
    Projective,
    NonProjective,
    PicTrivial,
    H1OMinusZero,
    H1OMinusDimAtMostOne,
    H0OPlusIsK,
    H1LMinusZeroForAllL,
    ExistsTorsorProjectiveTotal,
    ExistsTorsorH1MapZero,
    /// The torsor singled out by the hypotheses has a non-projective total space.
    TorsorTotalNonProjective,
    /// No `A^{0|1}`-torsor over the space has a projective total space.
    EveryTorsorNonProjective,
    ExistsFibrationProjectiveTotal,
    /// The space is a closed subscheme of the named one.
    ClosedSubschemeOf(String),
    PiProjective,
    NotPiProjective,
    OneOneEmbeddable,
    NotOneOneEmbeddable,
    GrassmannianEmbeddable,
}

const NAMES: [(Predicate, &str); 17] = [
    (Predicate::Projective, "projective"),
    (Predicate::NonProjective, "non-projective"),
    (Predicate::PicTrivial, "Pic-trivial"),
    (Predicate::H1OMinusZero, "H1-O-minus-zero"),
    (Predicate::H1OMinusDimAtMostOne, "H1-O-minus-dim≤1"),
    (Predicate::H0OPlusIsK, "H0-O-plus-is-k"),
    (Predicate::H1LMinusZeroForAllL, "H1-L-minus-zero-for-all-L"),
    (Predicate::ExistsTorsorProjectiveTotal, "exists-torsor-projective-total"),
    (Predicate::ExistsTorsorH1MapZero, "exists-torsor-H1-map-zero"),
    (Predicate::TorsorTotalNonProjective, "torsor-total-non-projective"),
    (Predicate::EveryTorsorNonProjective, "every-torsor-non-projective"),
    (Predicate::ExistsFibrationProjectiveTotal, "exists-fibration-projective-total"),
    (Predicate::PiProjective, "Pi-projective"),
    (Predicate::NotPiProjective, "not-Pi-projective"),
    (Predicate::OneOneEmbeddable, "1|1-embeddable"),
    (Predicate::NotOneOneEmbeddable, "not-1|1-embeddable"),
    (Predicate::GrassmannianEmbeddable, "grassmannian-embeddable"),
];

impl Predicate {
    /// The predicate that may not hold together with this one.
    pub fn negation(&self) -> Option<Predicate> {
        use Predicate::*;
        Some(match self {
            Projective => NonProjective,
            NonProjective => Projective,
            PiProjective => NotPiProjective,
            NotPiProjective => PiProjective,
            OneOneEmbeddable => NotOneOneEmbeddable,
            NotOneOneEmbeddable => OneOneEmbeddable,
            ExistsTorsorProjectiveTotal => EveryTorsorNonProjective,
            EveryTorsorNonProjective => ExistsTorsorProjectiveTotal,
            _ => return None,
        })
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Predicate::ClosedSubschemeOf(y) = self {
            return write!(f, "closed-subscheme-of({y})");
        }
        let name = NAMES.iter().find(|(p, _)| p == self).map(|(_, n)| *n).expect("every predicate is named");
        f.write_str(name)
    }
}

impl FromStr for Predicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(y) = s.strip_prefix("closed-subscheme-of(").and_then(|r| r.strip_suffix(')')) {
            return Ok(Predicate::ClosedSubschemeOf(y.to_string()));
        }
        let alt = s.replace("<=1", "≤1");
        NAMES
            .iter()
            .find(|(_, n)| *n == alt)
            .map(|(p, _)| p.clone())
            .ok_or_else(|| Error::Parse(format!("unknown predicate {s:?}")))
    }
}

/// Results that stay out of reach at desk scale; they only ever enter as
/// citations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AssertedTopic {
    GrassmannianNonProjective,
    GrassmannianPicard,
    FlagFibration,
    SerreDuality,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Citation {
    pub text: String,
    pub topic: Option<AssertedTopic>,
}

impl Citation {
    pub fn new(text: &str) -> Self {
        Citation { text: text.to_string(), topic: None }
    }

    pub fn on(text: &str, topic: AssertedTopic) -> Self {
        Citation { text: text.to_string(), topic: Some(topic) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    /// `scale` describes a reduced-size instance standing in for the named
    /// space; `assumes` lists cited inputs the computation relies on.
    Computed { check: Check, scale: Option<String>, assumes: Vec<Citation> },
    Asserted { citation: Citation },
    Derived { rule: String, premises: Vec<(String, Predicate)> },
}

impl Provenance {
    pub fn computed(check: Check) -> Self {
        Provenance::Computed { check, scale: None, assumes: Vec::new() }
    }

    pub fn asserted(text: &str) -> Self {
        Provenance::Asserted { citation: Citation::new(text) }
    }

    fn label(&self) -> String {
        match self {
            Provenance::Computed { check, scale, assumes } => {
                let mut s = format!("computed: {} [{}]", check.describe(), check.module());
                if let Some(sc) = scale {
                    s.push_str(&format!(" at reduced scale ({sc})"));
                }
                for a in assumes {
                    s.push_str(&format!(" assuming “{}”", a.text));
                }
                s
            }
            Provenance::Asserted { citation } => format!("ASSERTED: “{}”", citation.text),
            Provenance::Derived { rule, .. } => format!("derived by {rule}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact {
    pub space: String,
    pub predicate: Predicate,
    pub provenance: Provenance,
}

impl Fact {
    pub fn new(space: &str, predicate: Predicate, provenance: Provenance) -> Self {
        Fact { space: space.to_string(), predicate, provenance }
    }

    fn key(&self) -> (String, Predicate) {
        (self.space.clone(), self.predicate.clone())
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})  [{}]", self.predicate, self.space, self.provenance.label())
    }
}

/// Facts keyed by `(space, predicate)`; the first provenance recorded for a
/// key is kept.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Fact>", try_from = "Vec<Fact>")]
pub struct FactDb {
    facts: BTreeMap<(String, Predicate), Fact>,
}

impl FactDb {
    pub fn new() -> Self {
        FactDb::default()
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn facts(&self) -> impl Iterator<Item = &Fact> {
        self.facts.values()
    }

    pub fn get(&self, space: &str, predicate: &Predicate) -> Option<&Fact> {
        self.facts.get(&(space.to_string(), predicate.clone()))
    }

    pub fn holds(&self, space: &str, predicate: &Predicate) -> bool {
        self.get(space, predicate).is_some()
    }

    /// Adds a fact, refusing one that contradicts the database. Returns
    /// whether the fact was new.
    pub fn add_fact(&mut self, fact: Fact) -> Result<bool> {
        if let Some(neg) = fact.predicate.negation() {
            if let Some(other) = self.get(&fact.space, &neg) {
                return Err(Error::Inconsistent(format!("{fact}\n  contradicts\n{other}")));
            }
        }
        if self.facts.contains_key(&fact.key()) {
            return Ok(false);
        }
        self.facts.insert(fact.key(), fact);
        Ok(true)
    }

    pub fn spaces(&self) -> BTreeSet<String> {
        self.facts.keys().map(|(s, _)| s.clone()).collect()
    }

    /// Every clash between a predicate and its negation.
    pub fn consistency_check(&self) -> Result<()> {
        for fact in self.facts.values() {
            if let Some(neg) = fact.predicate.negation() {
                if let Some(other) = self.get(&fact.space, &neg) {
                    return Err(Error::Inconsistent(format!("{fact}\n  contradicts\n{other}")));
                }
            }
        }
        Ok(())
    }

    /// Applies the rules until nothing new follows. Returns the number of
    /// passes.
    pub fn apply_rules(&mut self, rules: &[Rule]) -> Result<usize> {
        self.consistency_check()?;
        let mut passes = 0;
        loop {
            passes += 1;
            let mut fresh = Vec::new();
            for rule in rules {
                fresh.extend(rule.fire(self));
            }
            let mut changed = false;
            for f in fresh {
                changed |= self.add_fact(f)?;
            }
            self.consistency_check()?;
            if !changed {
                return Ok(passes);
            }
        }
    }

    fn tree(&self, space: &str, predicate: &Predicate, depth: usize) -> Result<ProofNode> {
        if depth > 64 {
            return Err(Error::Inconsistent("proof trace is cyclic".into()));
        }
        let fact = self
            .get(space, predicate)
            .ok_or_else(|| Error::Inconsistent(format!("trace cites missing fact {predicate}({space})")))?;
        let children = match &fact.provenance {
            Provenance::Derived { premises, .. } => {
                premises.iter().map(|(s, p)| self.tree(s, p, depth + 1)).collect::<Result<_>>()?
            }
            _ => Vec::new(),
        };
        Ok(ProofNode { fact: fact.clone(), children })
    }
}

impl From<FactDb> for Vec<Fact> {
    fn from(db: FactDb) -> Self {
        db.facts.into_values().collect()
    }
}

impl TryFrom<Vec<Fact>> for FactDb {
    type Error = Error;

    fn try_from(facts: Vec<Fact>) -> Result<Self> {
        let mut db = FactDb::new();
        for f in facts {
            db.add_fact(f)?;
        }
        Ok(db)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofNode {
    pub fact: Fact,
    pub children: Vec<ProofNode>,
}

impl ProofNode {
    /// The computed and asserted facts the proof rests on.
    pub fn leaves(&self) -> Vec<&Fact> {
        if self.children.is_empty() {
            return vec![&self.fact];
        }
        self.children.iter().flat_map(|c| c.leaves()).collect()
    }

    /// Rule applications, deepest first.
    pub fn steps(&self) -> Vec<&Fact> {
        let mut out: Vec<&Fact> = self.children.iter().flat_map(|c| c.steps()).collect();
        if !self.children.is_empty() {
            out.push(&self.fact);
        }
        out
    }

    fn render(&self, depth: usize, out: &mut String) {
        out.push_str(&"  ".repeat(depth));
        out.push_str(&self.fact.to_string());
        out.push('\n');
        for c in &self.children {
            c.render(depth + 1, out);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub space: String,
    pub claim: Predicate,
    pub trace: ProofNode,
}

impl Verdict {
    pub fn asserted_only(&self) -> bool {
        self.trace.leaves().iter().all(|f| matches!(f.provenance, Provenance::Asserted { .. }))
    }

    /// Closes a fresh database holding only the leaves of the trace and
    /// checks that the claim comes out again.
    pub fn replay(&self, rules: &[Rule]) -> Result<bool> {
        let mut db = FactDb::new();
        for leaf in self.trace.leaves() {
            db.add_fact(leaf.clone())?;
        }
        db.apply_rules(rules)?;
        Ok(db.holds(&self.space, &self.claim))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.trace.render(0, &mut s);
        f.write_str(&s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Proved(Verdict),
    Undetermined,
}

pub fn verdict(db: &FactDb, space: &str, claim: &Predicate) -> Result<Outcome> {
    if !db.holds(space, claim) {
        return Ok(Outcome::Undetermined);
    }
    let trace = db.tree(space, claim, 0)?;
    Ok(Outcome::Proved(Verdict { space: space.to_string(), claim: claim.clone(), trace }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicate_names_round_trip() {
        for (p, n) in NAMES.iter() {
            assert_eq!(p.to_string(), *n);
            assert_eq!(&n.parse::<Predicate>().unwrap(), p);
        }
        let c = Predicate::ClosedSubschemeOf("P²_Π".into());
        assert_eq!(c.to_string().parse::<Predicate>().unwrap(), c);
        assert_eq!("H1-O-minus-dim<=1".parse::<Predicate>().unwrap(), Predicate::H1OMinusDimAtMostOne);
    }

    #[test]
    fn empty_db_is_undetermined() {
        let db = FactDb::new();
        assert_eq!(verdict(&db, "X", &Predicate::PiProjective).unwrap(), Outcome::Undetermined);
    }

    #[test]
    fn grassmannian_example_goes_through_r3() {
        let mut db = FactDb::new();
        db.add_fact(Fact::new("G(1|1,2|2)", Predicate::NonProjective, Provenance::asserted("we know that X is not projective")))
            .unwrap();
        db.add_fact(Fact::new("G(1|1,2|2)", Predicate::H1OMinusZero, Provenance::computed(Check::GrassmannianH1Vanishes { n: 2 })))
            .unwrap();
        let rules = builtin_rules();
        db.apply_rules(&rules).unwrap();
        let Outcome::Proved(v) = verdict(&db, "G(1|1,2|2)", &Predicate::NotPiProjective).unwrap() else {
            panic!("no verdict")
        };
        assert!(matches!(&v.trace.fact.provenance, Provenance::Derived { rule, .. } if rule == "R3"));
        assert!(v.replay(&rules).unwrap());
        assert!(!v.asserted_only());
        let text = v.to_string();
        assert!(text.contains("ASSERTED") && text.contains("computed"));
    }

    #[test]
    fn contradictions_are_refused_with_both_sources() {
        let mut db = FactDb::new();
        db.add_fact(Fact::new("X", Predicate::Projective, Provenance::asserted("a"))).unwrap();
        let err = db.add_fact(Fact::new("X", Predicate::NonProjective, Provenance::asserted("b"))).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("“a”") && msg.contains("“b”"), "{msg}");
    }

    #[test]
    fn closure_only_grows_and_is_idempotent() {
        let mut db = FactDb::new();
        db.add_fact(Fact::new("X", Predicate::Projective, Provenance::asserted("a"))).unwrap();
        let rules = builtin_rules();
        let before: Vec<Fact> = db.facts().cloned().collect();
        db.apply_rules(&rules).unwrap();
        assert!(before.iter().all(|f| db.facts().any(|g| g == f)));
        assert!(db.holds("X", &Predicate::PiProjective));
        assert!(db.holds("X", &Predicate::ExistsTorsorProjectiveTotal));
        let snapshot = db.clone();
        assert_eq!(db.apply_rules(&rules).unwrap(), 1);
        assert_eq!(db, snapshot);
    }

    #[test]
    fn db_serializes() {
        let mut db = FactDb::new();
        db.add_fact(Fact::new("X", Predicate::ClosedSubschemeOf("Y".into()), Provenance::asserted("c"))).unwrap();
        let s = serde_json::to_string(&db).unwrap();
        assert_eq!(serde_json::from_str::<FactDb>(&s).unwrap(), db);
    }
}
