//! Materialization-based structural reasoner. Computes the closure of
//! asserted facts under atomic subsumption, role hierarchy, and role
//! transitivity, then evaluates concept expressions set-theoretically
//! over that closure. Negation is closed-world complement over the
//! individual set.
//!
//! Complex GCIs (any side non-atomic) do not participate in
//! materialization; they are only consulted for clash detection when
//! shaped `X ⊓ Y ⊑ ⊥`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::dl::{
    reflexive_transitive_closure, Assertion, ConceptExpr, DlError, KnowledgeBase, RoleAxiom,
    RoleExpr, Signature,
};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("knowledge base is inconsistent ({} clash{})", .0.len(), if .0.len() == 1 { "" } else { "es" })]
    Inconsistent(Vec<Clash>),
    #[error(transparent)]
    Name(#[from] DlError),
}

/// A detected contradiction. Each clash cites the axiom pattern involved
/// and at least one witnessing individual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Clash {
    /// `left ⊓ right ⊑ ⊥` with `individual` in both extensions.
    Disjointness {
        left: String,
        right: String,
        individual: String,
    },
    /// `Fun(role)` with `individual` having two or more successors.
    Functionality {
        role: String,
        individual: String,
        successors: Vec<String>,
    },
}

impl Clash {
    pub fn kind(&self) -> &'static str {
        match self {
            Clash::Disjointness { .. } => "disjointness",
            Clash::Functionality { .. } => "functionality",
        }
    }
}

impl fmt::Display for Clash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clash::Disjointness {
                left,
                right,
                individual,
            } => write!(
                f,
                "disjointness clash: `{individual}` falls under both `{left}` and `{right}` (SubClassOf(({left} and {right}) Bottom))"
            ),
            Clash::Functionality {
                role,
                individual,
                successors,
            } => write!(
                f,
                "functionality clash: `{role}` is functional but `{individual}` has successors {}",
                successors.join(", ")
            ),
        }
    }
}

/// The closure of a knowledge base's asserted facts, immutable once
/// built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaterializedKB {
    memberships: BTreeMap<String, BTreeSet<String>>,
    role_extensions: BTreeMap<String, BTreeSet<(String, String)>>,
    subclass_closure: BTreeMap<String, BTreeSet<String>>,
    subrole_closure: BTreeMap<String, BTreeSet<String>>,
    individuals: BTreeSet<String>,
    signature: Signature,
    clashes: Vec<Clash>,
}

impl MaterializedKB {
    pub fn individuals(&self) -> &BTreeSet<String> {
        &self.individuals
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// Individuals in concept `name`'s materialized extension.
    pub fn members(&self, name: &str) -> Option<&BTreeSet<String>> {
        self.memberships.get(name)
    }

    /// Materialized pair extension of role `name`.
    pub fn role_pairs(&self, name: &str) -> Option<&BTreeSet<(String, String)>> {
        self.role_extensions.get(name)
    }

    pub fn memberships(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.memberships
    }

    pub fn role_extensions(&self) -> &BTreeMap<String, BTreeSet<(String, String)>> {
        &self.role_extensions
    }

    /// `true` when the materialization entails concept membership.
    pub fn entails_member(&self, concept: &str, individual: &str) -> bool {
        self.memberships
            .get(concept)
            .is_some_and(|set| set.contains(individual))
    }

    /// `true` when the materialization entails the role assertion.
    pub fn entails_pair(&self, role: &str, subject: &str, object: &str) -> bool {
        self.role_extensions.get(role).is_some_and(|set| {
            set.contains(&(subject.to_string(), object.to_string()))
        })
    }

    /// Clashes detected against the knowledge base this closure was
    /// built from.
    pub fn clashes(&self) -> &[Clash] {
        &self.clashes
    }
}

/// Compute the least fixpoint of the asserted facts under (i) atomic
/// subsumption propagation, (ii) role-hierarchy propagation, and (iii)
/// transitive closure for every transitive role.
pub fn materialize(kb: &KnowledgeBase) -> MaterializedKB {
    let subclass_edges: Vec<(String, String)> = kb
        .tbox
        .iter()
        .filter_map(|gci| match (&gci.sub, &gci.sup) {
            (ConceptExpr::Atomic(sub), ConceptExpr::Atomic(sup)) => {
                Some((sub.clone(), sup.clone()))
            }
            _ => None,
        })
        .collect();
    let subclass_closure =
        reflexive_transitive_closure(&kb.signature.concepts, &subclass_edges);

    let subrole_edges: Vec<(String, String)> = kb
        .rbox
        .iter()
        .filter_map(|axiom| match axiom {
            RoleAxiom::SubRoleOf { sub, sup } => Some((sub.clone(), sup.clone())),
            _ => None,
        })
        .collect();
    let subrole_closure = reflexive_transitive_closure(&kb.signature.roles, &subrole_edges);

    // Concept memberships: asserted atomic memberships propagated to all
    // superclasses. The closure is precomputed, so one pass suffices.
    let mut memberships: BTreeMap<String, BTreeSet<String>> = kb
        .signature
        .concepts
        .iter()
        .map(|c| (c.clone(), BTreeSet::new()))
        .collect();
    for assertion in &kb.abox {
        if let Assertion::Class {
            concept: ConceptExpr::Atomic(name),
            individual,
        } = assertion
        {
            for sup in &subclass_closure[name] {
                memberships
                    .get_mut(sup)
                    .expect("closure ranges over signature concepts")
                    .insert(individual.clone());
            }
        }
    }

    // Role extensions: asserted pairs, closed under the role hierarchy
    // and transitivity. Hierarchy propagation and transitive closure
    // feed each other, so iterate to a fixpoint.
    let mut role_extensions: BTreeMap<String, BTreeSet<(String, String)>> = kb
        .signature
        .roles
        .iter()
        .map(|r| (r.clone(), BTreeSet::new()))
        .collect();
    for assertion in &kb.abox {
        if let Assertion::Role {
            role,
            subject,
            object,
        } = assertion
        {
            role_extensions
                .get_mut(role)
                .expect("signature covers asserted roles")
                .insert((subject.clone(), object.clone()));
        }
    }
    let transitive_roles: BTreeSet<String> = kb
        .rbox
        .iter()
        .filter_map(|axiom| match axiom {
            RoleAxiom::Transitive(r) => Some(r.clone()),
            _ => None,
        })
        .collect();
    loop {
        let mut changed = false;
        for sub in kb.signature.roles.iter() {
            let pairs = role_extensions[sub].clone();
            for sup in &subrole_closure[sub] {
                if sup == sub {
                    continue;
                }
                let target = role_extensions.get_mut(sup).expect("signature role");
                for pair in &pairs {
                    changed |= target.insert(pair.clone());
                }
            }
        }
        for role in &transitive_roles {
            let pairs = role_extensions.get_mut(role).expect("signature role");
            let new_pairs = transitive_step(pairs);
            for pair in new_pairs {
                changed |= pairs.insert(pair);
            }
        }
        if !changed {
            break;
        }
    }

    let mut mkb = MaterializedKB {
        memberships,
        role_extensions,
        subclass_closure,
        subrole_closure,
        individuals: kb.signature.individuals.clone(),
        signature: kb.signature.clone(),
        clashes: Vec::new(),
    };
    mkb.clashes = detect_clashes(&mkb, kb);
    mkb
}

fn transitive_step(pairs: &BTreeSet<(String, String)>) -> Vec<(String, String)> {
    let mut by_head: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (x, y) in pairs {
        by_head.entry(x).or_default().push(y);
    }
    let mut derived = Vec::new();
    for (x, y) in pairs {
        if let Some(zs) = by_head.get(y.as_str()) {
            for z in zs {
                let pair = (x.clone(), z.to_string());
                if !pairs.contains(&pair) {
                    derived.push(pair);
                }
            }
        }
    }
    derived
}

/// Report every clash of the two recognized patterns: a disjointness GCI
/// `X ⊓ Y ⊑ ⊥` (X, Y atomic) with an individual in both materialized
/// extensions, and a functional role with an individual holding two or
/// more distinct successors.
pub fn detect_clashes(mkb: &MaterializedKB, kb: &KnowledgeBase) -> Vec<Clash> {
    let mut clashes = Vec::new();
    for gci in &kb.tbox {
        let (left, right) = match (&gci.sub, &gci.sup) {
            (ConceptExpr::Conjunction(l, r), ConceptExpr::Bottom) => match (&**l, &**r) {
                (ConceptExpr::Atomic(l), ConceptExpr::Atomic(r)) => (l, r),
                _ => continue,
            },
            _ => continue,
        };
        if let (Some(ls), Some(rs)) = (mkb.members(left), mkb.members(right)) {
            for individual in ls.intersection(rs) {
                clashes.push(Clash::Disjointness {
                    left: left.clone(),
                    right: right.clone(),
                    individual: individual.clone(),
                });
            }
        }
    }
    for axiom in &kb.rbox {
        let role = match axiom {
            RoleAxiom::Functional(r) => r,
            _ => continue,
        };
        let Some(pairs) = mkb.role_pairs(role) else {
            continue;
        };
        let mut successors: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (x, y) in pairs {
            successors.entry(x).or_default().push(y);
        }
        for (individual, succ) in successors {
            if succ.len() >= 2 {
                clashes.push(Clash::Functionality {
                    role: role.clone(),
                    individual: individual.to_string(),
                    successors: succ.iter().map(|s| s.to_string()).collect(),
                });
            }
        }
    }
    clashes
}

fn pairs_of(role: &RoleExpr, mkb: &MaterializedKB) -> BTreeSet<(String, String)> {
    match role {
        RoleExpr::Atomic(name) => mkb.role_pairs(name).cloned().unwrap_or_default(),
        RoleExpr::Inverse(name) => mkb
            .role_pairs(name)
            .map(|pairs| pairs.iter().map(|(x, y)| (y.clone(), x.clone())).collect())
            .unwrap_or_default(),
        RoleExpr::Universal => {
            let mut pairs = BTreeSet::new();
            for x in &mkb.individuals {
                for y in &mkb.individuals {
                    pairs.insert((x.clone(), y.clone()));
                }
            }
            pairs
        }
    }
}

fn eval(c: &ConceptExpr, mkb: &MaterializedKB) -> BTreeSet<String> {
    match c {
        ConceptExpr::Atomic(name) => mkb.members(name).cloned().unwrap_or_default(),
        ConceptExpr::Top => mkb.individuals.clone(),
        ConceptExpr::Bottom => BTreeSet::new(),
        ConceptExpr::Negation(inner) => {
            let inner = eval(inner, mkb);
            mkb.individuals.difference(&inner).cloned().collect()
        }
        ConceptExpr::Conjunction(l, r) => {
            let l = eval(l, mkb);
            let r = eval(r, mkb);
            l.intersection(&r).cloned().collect()
        }
        ConceptExpr::Disjunction(l, r) => {
            let l = eval(l, mkb);
            let r = eval(r, mkb);
            l.union(&r).cloned().collect()
        }
        ConceptExpr::Existential(role, filler) => {
            let filler = eval(filler, mkb);
            let pairs = pairs_of(role, mkb);
            mkb.individuals
                .iter()
                .filter(|x| {
                    pairs
                        .iter()
                        .any(|(h, t)| h == *x && filler.contains(t))
                })
                .cloned()
                .collect()
        }
        ConceptExpr::Universal(role, filler) => {
            let filler = eval(filler, mkb);
            let pairs = pairs_of(role, mkb);
            mkb.individuals
                .iter()
                .filter(|x| {
                    pairs
                        .iter()
                        .all(|(h, t)| h != *x || filler.contains(t))
                })
                .cloned()
                .collect()
        }
        ConceptExpr::AtLeast(n, role, filler) => {
            let counts = successor_counts(role, &eval(filler, mkb), mkb);
            mkb.individuals
                .iter()
                .filter(|x| counts.get(*x).copied().unwrap_or(0) >= *n as usize)
                .cloned()
                .collect()
        }
        ConceptExpr::AtMost(n, role, filler) => {
            let counts = successor_counts(role, &eval(filler, mkb), mkb);
            mkb.individuals
                .iter()
                .filter(|x| counts.get(*x).copied().unwrap_or(0) <= *n as usize)
                .cloned()
                .collect()
        }
        ConceptExpr::Nominal(name) => {
            let mut set = BTreeSet::new();
            if mkb.individuals.contains(name) {
                set.insert(name.clone());
            }
            set
        }
    }
}

fn successor_counts(
    role: &RoleExpr,
    filler: &BTreeSet<String>,
    mkb: &MaterializedKB,
) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for (x, y) in pairs_of(role, mkb) {
        if filler.contains(&y) {
            *counts.entry(x).or_insert(0) += 1;
        }
    }
    counts
}

/// Evaluate `c` over the materialized interpretation. In strict mode the
/// call refuses when any clash was detected, mirroring reasoners that
/// halt on inconsistent input.
pub fn oracle_retrieve(
    c: &ConceptExpr,
    mkb: &MaterializedKB,
    strict: bool,
) -> Result<BTreeSet<String>, OracleError> {
    if strict && !mkb.clashes.is_empty() {
        return Err(OracleError::Inconsistent(mkb.clashes.clone()));
    }
    mkb.signature.check_concept(c)?;
    Ok(eval(c, mkb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dl::{parse_concept, parse_kb, Gci};

    fn names(set: &BTreeSet<String>) -> Vec<&str> {
        set.iter().map(String::as_str).collect()
    }

    #[test]
    fn subsumption_propagates_memberships() {
        let kb = parse_kb("SubClassOf(A B)\nClassAssertion(A a)").unwrap();
        let mkb = materialize(&kb);
        assert!(mkb.entails_member("B", "a"));
        assert!(mkb.entails_member("A", "a"));
    }

    #[test]
    fn transitivity_closes_role_extension() {
        let kb = parse_kb(
            "TransitiveObjectProperty(r)\nObjectPropertyAssertion(r a b)\nObjectPropertyAssertion(r b c)",
        )
        .unwrap();
        let mkb = materialize(&kb);
        assert!(mkb.entails_pair("r", "a", "c"));
    }

    #[test]
    fn role_hierarchy_propagates_pairs() {
        let kb = parse_kb("SubObjectPropertyOf(r s)\nObjectPropertyAssertion(r a b)").unwrap();
        let mkb = materialize(&kb);
        assert!(mkb.entails_pair("s", "a", "b"));
        assert!(!mkb.entails_pair("s", "b", "a"));
    }

    #[test]
    fn hierarchy_and_transitivity_interact() {
        // Pairs flow from r up into transitive s, which then closes.
        let kb = parse_kb(
            "SubObjectPropertyOf(r s)\nTransitiveObjectProperty(s)\nObjectPropertyAssertion(r a b)\nObjectPropertyAssertion(r b c)",
        )
        .unwrap();
        let mkb = materialize(&kb);
        assert!(mkb.entails_pair("s", "a", "c"));
        assert!(!mkb.entails_pair("r", "a", "c"));
    }

    fn incomplete_knows() -> KnowledgeBase {
        parse_kb(
            "ClassAssertion(Person Bob)\nClassAssertion(Person Paul)\nClassAssertion(Person Ani)\nObjectPropertyAssertion(knows Bob Paul)\nObjectPropertyAssertion(knows Ani Joe)",
        )
        .unwrap()
    }

    #[test]
    fn person_extension_misses_untyped_individual() {
        let mkb = materialize(&incomplete_knows());
        let ext = oracle_retrieve(&parse_concept("Person").unwrap(), &mkb, false).unwrap();
        assert_eq!(names(&ext), vec!["Ani", "Bob", "Paul"]);
    }

    #[test]
    fn existential_over_incomplete_fixture() {
        // Brute-force reading of the five assertions: only Bob has a
        // knows-successor with an asserted Person type.
        let mkb = materialize(&incomplete_knows());
        let ext =
            oracle_retrieve(&parse_concept("knows some Person").unwrap(), &mkb, false).unwrap();
        assert_eq!(names(&ext), vec!["Bob"]);
    }

    fn inconsistent_abc() -> KnowledgeBase {
        parse_kb(
            "SubClassOf(C A)\nSubClassOf(C B)\nSubClassOf((A and B) Bottom)\nClassAssertion(C a)",
        )
        .unwrap()
    }

    #[test]
    fn strict_mode_refuses_inconsistent_kb() {
        let mkb = materialize(&inconsistent_abc());
        let err = oracle_retrieve(&parse_concept("A").unwrap(), &mkb, true).unwrap_err();
        assert!(matches!(err, OracleError::Inconsistent(ref clashes) if clashes.len() == 1));
        // Non-strict evaluation still answers.
        let ext = oracle_retrieve(&parse_concept("A").unwrap(), &mkb, false).unwrap();
        assert_eq!(names(&ext), vec!["a"]);
    }

    #[test]
    fn disjointness_clash_cites_witness() {
        let mkb = materialize(&inconsistent_abc());
        assert_eq!(
            mkb.clashes(),
            &[Clash::Disjointness {
                left: "A".into(),
                right: "B".into(),
                individual: "a".into(),
            }]
        );
    }

    #[test]
    fn functionality_clash_on_two_successors() {
        let kb = parse_kb(
            "FunctionalObjectProperty(r)\nObjectPropertyAssertion(r a b)\nObjectPropertyAssertion(r a c)",
        )
        .unwrap();
        let mkb = materialize(&kb);
        assert_eq!(mkb.clashes().len(), 1);
        assert_eq!(mkb.clashes()[0].kind(), "functionality");
    }

    #[test]
    fn clash_free_kb_reports_nothing() {
        let kb = parse_kb("SubClassOf((A and B) Bottom)\nClassAssertion(A a)").unwrap();
        assert!(materialize(&kb).clashes().is_empty());
    }

    #[test]
    fn complex_gcis_do_not_materialize() {
        let kb = parse_kb("SubClassOf((A and B) C)\nClassAssertion(A a)\nClassAssertion(B a)")
            .unwrap();
        let mkb = materialize(&kb);
        assert!(!mkb.entails_member("C", "a"));
    }

    #[test]
    fn fixpoint_is_idempotent() {
        let kb = parse_kb(
            "SubClassOf(A B)\nSubObjectPropertyOf(r s)\nTransitiveObjectProperty(s)\nClassAssertion(A a)\nObjectPropertyAssertion(r a b)\nObjectPropertyAssertion(r b c)",
        )
        .unwrap();
        let mkb = materialize(&kb);
        // Recast the closure as an explicit KB and materialize again.
        let mut abox = Vec::new();
        for (concept, members) in mkb.memberships() {
            for m in members {
                abox.push(Assertion::Class {
                    concept: ConceptExpr::atomic(concept.clone()),
                    individual: m.clone(),
                });
            }
        }
        for (role, pairs) in mkb.role_extensions() {
            for (x, y) in pairs {
                abox.push(Assertion::Role {
                    role: role.clone(),
                    subject: x.clone(),
                    object: y.clone(),
                });
            }
        }
        let recast = KnowledgeBase::new(kb.tbox.clone(), kb.rbox.clone(), abox).unwrap();
        let again = materialize(&recast);
        assert_eq!(again.memberships(), mkb.memberships());
        assert_eq!(again.role_extensions(), mkb.role_extensions());
    }

    #[test]
    fn adding_assertions_is_monotone() {
        let base = parse_kb("SubClassOf(A B)\nClassAssertion(A a)").unwrap();
        let mut extended = base.clone();
        extended.abox.push(Assertion::Class {
            concept: ConceptExpr::atomic("A"),
            individual: "b".into(),
        });
        extended.signature.individuals.insert("b".into());
        let before = materialize(&base);
        let after = materialize(&extended);
        for (concept, members) in before.memberships() {
            assert!(members.is_subset(&after.memberships()[concept]));
        }
    }

    #[test]
    fn universal_and_cardinality_semantics() {
        let kb = parse_kb(
            "ClassAssertion(A b)\nClassAssertion(A c)\nObjectPropertyAssertion(r a b)\nObjectPropertyAssertion(r a c)\nObjectPropertyAssertion(r d e)",
        )
        .unwrap();
        let mkb = materialize(&kb);
        let at_least_2 = oracle_retrieve(&parse_concept("r min 2 A").unwrap(), &mkb, false).unwrap();
        assert_eq!(names(&at_least_2), vec!["a"]);
        // d's only successor e is not in A, everyone else has no
        // successors at all.
        let only_a = oracle_retrieve(&parse_concept("r only A").unwrap(), &mkb, false).unwrap();
        assert_eq!(names(&only_a), vec!["a", "b", "c", "e"]);
        let inv = oracle_retrieve(
            &parse_concept("inverse(r) some Top").unwrap(),
            &mkb,
            false,
        )
        .unwrap();
        assert_eq!(names(&inv), vec!["b", "c", "e"]);
    }

    #[test]
    fn unknown_name_is_reported() {
        let kb = parse_kb("ClassAssertion(A a)").unwrap();
        let mkb = materialize(&kb);
        let err = oracle_retrieve(&parse_concept("Missing").unwrap(), &mkb, false).unwrap_err();
        assert!(matches!(err, OracleError::Name(_)));
    }

    #[test]
    fn disjointness_only_matches_the_syntactic_pattern() {
        // A ⊑ ⊥ is not the recognized shape; no clash is reported.
        let kb = KnowledgeBase::new(
            vec![Gci {
                sub: ConceptExpr::atomic("A"),
                sup: ConceptExpr::Bottom,
            }],
            vec![],
            vec![Assertion::Class {
                concept: ConceptExpr::atomic("A"),
                individual: "a".into(),
            }],
        )
        .unwrap();
        assert!(materialize(&kb).clashes().is_empty());
    }
}
