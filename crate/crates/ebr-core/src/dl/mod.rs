//! Core data model for knowledge bases: concept expressions, role
//! expressions, axioms, signatures, and the textual `.dl` syntax.
//!
//! Concepts use an infix Manchester-like surface grammar (`not`, `and`,
//! `or`, `some`, `only`, `min`, `max`, `{o}`, `Top`, `Bottom`,
//! `inverse(r)`, `U`); axioms use a functional line-based form
//! (`SubClassOf(...)`, `ClassAssertion(...)`, ...). See [`parser`] and
//! [`render`].

mod parser;
mod render;

pub use parser::{parse_concept, parse_kb};
pub use render::{render_assertion, render_concept, render_gci, render_kb, render_role_axiom};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// What kind of vocabulary entry a name is. The three kinds are disjoint:
/// a name used as a concept may not also be used as a role or individual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameKind {
    Concept,
    Role,
    Individual,
}

impl fmt::Display for NameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NameKind::Concept => write!(f, "concept"),
            NameKind::Role => write!(f, "role"),
            NameKind::Individual => write!(f, "individual"),
        }
    }
}

#[derive(Debug, Error)]
pub enum DlError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("name `{name}` used both as {first} and as {second}")]
    NameKindConflict {
        name: String,
        first: NameKind,
        second: NameKind,
    },
    #[error("unknown {kind} name `{name}`")]
    UnknownName { kind: NameKind, name: String },
}

/// A role expression: a named role, the inverse of a named role, or the
/// universal role `U`. Double inversion is normalized away at parse time,
/// so `inverse(inverse(r))` is never representable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RoleExpr {
    Atomic(String),
    Inverse(String),
    Universal,
}

impl RoleExpr {
    pub fn atomic(name: impl Into<String>) -> Self {
        RoleExpr::Atomic(name.into())
    }

    pub fn inverse(name: impl Into<String>) -> Self {
        RoleExpr::Inverse(name.into())
    }

    /// The underlying role name, if any (`None` for the universal role).
    pub fn name(&self) -> Option<&str> {
        match self {
            RoleExpr::Atomic(n) | RoleExpr::Inverse(n) => Some(n),
            RoleExpr::Universal => None,
        }
    }
}

/// A concept expression over the constructors of an expressive DL with
/// nominals, inverse roles, and qualified cardinality restrictions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConceptExpr {
    Atomic(String),
    Top,
    Bottom,
    Negation(Box<ConceptExpr>),
    Conjunction(Box<ConceptExpr>, Box<ConceptExpr>),
    Disjunction(Box<ConceptExpr>, Box<ConceptExpr>),
    Existential(RoleExpr, Box<ConceptExpr>),
    Universal(RoleExpr, Box<ConceptExpr>),
    AtLeast(u32, RoleExpr, Box<ConceptExpr>),
    AtMost(u32, RoleExpr, Box<ConceptExpr>),
    Nominal(String),
}

impl ConceptExpr {
    pub fn atomic(name: impl Into<String>) -> Self {
        ConceptExpr::Atomic(name.into())
    }

    pub fn nominal(name: impl Into<String>) -> Self {
        ConceptExpr::Nominal(name.into())
    }

    pub fn negation(self) -> Self {
        ConceptExpr::Negation(Box::new(self))
    }

    pub fn and(self, other: ConceptExpr) -> Self {
        ConceptExpr::Conjunction(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: ConceptExpr) -> Self {
        ConceptExpr::Disjunction(Box::new(self), Box::new(other))
    }

    pub fn some(role: RoleExpr, filler: ConceptExpr) -> Self {
        ConceptExpr::Existential(role, Box::new(filler))
    }

    pub fn only(role: RoleExpr, filler: ConceptExpr) -> Self {
        ConceptExpr::Universal(role, Box::new(filler))
    }

    pub fn at_least(n: u32, role: RoleExpr, filler: ConceptExpr) -> Self {
        ConceptExpr::AtLeast(n, role, Box::new(filler))
    }

    pub fn at_most(n: u32, role: RoleExpr, filler: ConceptExpr) -> Self {
        ConceptExpr::AtMost(n, role, Box::new(filler))
    }

    /// Walk the expression, reporting every name together with the kind
    /// its syntactic position implies.
    pub fn visit_names(&self, visit: &mut impl FnMut(&str, NameKind)) {
        match self {
            ConceptExpr::Atomic(name) => visit(name, NameKind::Concept),
            ConceptExpr::Top | ConceptExpr::Bottom => {}
            ConceptExpr::Negation(c) => c.visit_names(visit),
            ConceptExpr::Conjunction(l, r) | ConceptExpr::Disjunction(l, r) => {
                l.visit_names(visit);
                r.visit_names(visit);
            }
            ConceptExpr::Existential(role, c) | ConceptExpr::Universal(role, c) => {
                if let Some(name) = role.name() {
                    visit(name, NameKind::Role);
                }
                c.visit_names(visit);
            }
            ConceptExpr::AtLeast(_, role, c) | ConceptExpr::AtMost(_, role, c) => {
                if let Some(name) = role.name() {
                    visit(name, NameKind::Role);
                }
                c.visit_names(visit);
            }
            ConceptExpr::Nominal(name) => visit(name, NameKind::Individual),
        }
    }
}

impl fmt::Display for ConceptExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_concept(self))
    }
}

impl fmt::Display for RoleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoleExpr::Atomic(name) => write!(f, "{name}"),
            RoleExpr::Inverse(name) => write!(f, "inverse({name})"),
            RoleExpr::Universal => write!(f, "U"),
        }
    }
}

/// Outermost-constructor tag, used to bucket benchmark rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstructorClass {
    Atomic,
    Negation,
    Conjunction,
    Disjunction,
    Existential,
    Universal,
    MinRestriction,
    MaxRestriction,
    Nominal,
    Top,
    Bottom,
}

impl ConstructorClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstructorClass::Atomic => "atomic",
            ConstructorClass::Negation => "negation",
            ConstructorClass::Conjunction => "conjunction",
            ConstructorClass::Disjunction => "disjunction",
            ConstructorClass::Existential => "existential",
            ConstructorClass::Universal => "universal",
            ConstructorClass::MinRestriction => "min-restriction",
            ConstructorClass::MaxRestriction => "max-restriction",
            ConstructorClass::Nominal => "nominal",
            ConstructorClass::Top => "top",
            ConstructorClass::Bottom => "bottom",
        }
    }
}

impl fmt::Display for ConstructorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tag of the outermost constructor of a concept expression.
pub fn constructor_class(c: &ConceptExpr) -> ConstructorClass {
    match c {
        ConceptExpr::Atomic(_) => ConstructorClass::Atomic,
        ConceptExpr::Top => ConstructorClass::Top,
        ConceptExpr::Bottom => ConstructorClass::Bottom,
        ConceptExpr::Negation(_) => ConstructorClass::Negation,
        ConceptExpr::Conjunction(..) => ConstructorClass::Conjunction,
        ConceptExpr::Disjunction(..) => ConstructorClass::Disjunction,
        ConceptExpr::Existential(..) => ConstructorClass::Existential,
        ConceptExpr::Universal(..) => ConstructorClass::Universal,
        ConceptExpr::AtLeast(..) => ConstructorClass::MinRestriction,
        ConceptExpr::AtMost(..) => ConstructorClass::MaxRestriction,
        ConceptExpr::Nominal(_) => ConstructorClass::Nominal,
    }
}

/// A general concept inclusion `sub ⊑ sup`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gci {
    pub sub: ConceptExpr,
    pub sup: ConceptExpr,
}

/// Role axioms: role hierarchy, transitivity, functionality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoleAxiom {
    SubRoleOf { sub: String, sup: String },
    Transitive(String),
    Functional(String),
}

/// ABox assertions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Assertion {
    Class {
        concept: ConceptExpr,
        individual: String,
    },
    Role {
        role: String,
        subject: String,
        object: String,
    },
}

/// The vocabulary of a knowledge base, partitioned into the three
/// pairwise-disjoint name kinds. Sets are ordered, so iteration is
/// deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: BTreeSet<String>,
    pub roles: BTreeSet<String>,
    pub individuals: BTreeSet<String>,
}

impl Signature {
    pub fn kind_of(&self, name: &str) -> Option<NameKind> {
        if self.concepts.contains(name) {
            Some(NameKind::Concept)
        } else if self.roles.contains(name) {
            Some(NameKind::Role)
        } else if self.individuals.contains(name) {
            Some(NameKind::Individual)
        } else {
            None
        }
    }

    /// Record `name` as `kind`, rejecting cross-kind reuse.
    pub fn declare(&mut self, name: &str, kind: NameKind) -> Result<(), DlError> {
        match self.kind_of(name) {
            Some(existing) if existing != kind => Err(DlError::NameKindConflict {
                name: name.to_string(),
                first: existing,
                second: kind,
            }),
            _ => {
                let set = match kind {
                    NameKind::Concept => &mut self.concepts,
                    NameKind::Role => &mut self.roles,
                    NameKind::Individual => &mut self.individuals,
                };
                set.insert(name.to_string());
                Ok(())
            }
        }
    }

    /// Check that every name in `c` is declared with the kind its
    /// position requires.
    pub fn check_concept(&self, c: &ConceptExpr) -> Result<(), DlError> {
        let mut result = Ok(());
        c.visit_names(&mut |name, kind| {
            if result.is_err() {
                return;
            }
            match self.kind_of(name) {
                Some(found) if found == kind => {}
                Some(found) => {
                    result = Err(DlError::NameKindConflict {
                        name: name.to_string(),
                        first: found,
                        second: kind,
                    });
                }
                None => {
                    result = Err(DlError::UnknownName {
                        kind,
                        name: name.to_string(),
                    });
                }
            }
        });
        result
    }
}

/// A knowledge base: concept inclusions (TBox), role axioms (RBox),
/// assertions (ABox), and the signature collecting every referenced name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub tbox: Vec<Gci>,
    pub rbox: Vec<RoleAxiom>,
    pub abox: Vec<Assertion>,
    pub signature: Signature,
}

impl KnowledgeBase {
    /// Assemble a knowledge base from axiom lists, auto-collecting the
    /// signature. Fails on cross-kind name reuse.
    pub fn new(
        tbox: Vec<Gci>,
        rbox: Vec<RoleAxiom>,
        abox: Vec<Assertion>,
    ) -> Result<Self, DlError> {
        let mut kb = KnowledgeBase {
            tbox,
            rbox,
            abox,
            signature: Signature::default(),
        };
        kb.recollect_signature()?;
        Ok(kb)
    }

    fn recollect_signature(&mut self) -> Result<(), DlError> {
        let mut sig = Signature::default();
        for gci in &self.tbox {
            declare_concept_names(&mut sig, &gci.sub)?;
            declare_concept_names(&mut sig, &gci.sup)?;
        }
        for axiom in &self.rbox {
            match axiom {
                RoleAxiom::SubRoleOf { sub, sup } => {
                    sig.declare(sub, NameKind::Role)?;
                    sig.declare(sup, NameKind::Role)?;
                }
                RoleAxiom::Transitive(r) | RoleAxiom::Functional(r) => {
                    sig.declare(r, NameKind::Role)?;
                }
            }
        }
        for assertion in &self.abox {
            match assertion {
                Assertion::Class {
                    concept,
                    individual,
                } => {
                    declare_concept_names(&mut sig, concept)?;
                    sig.declare(individual, NameKind::Individual)?;
                }
                Assertion::Role {
                    role,
                    subject,
                    object,
                } => {
                    sig.declare(role, NameKind::Role)?;
                    sig.declare(subject, NameKind::Individual)?;
                    sig.declare(object, NameKind::Individual)?;
                }
            }
        }
        self.signature = sig;
        Ok(())
    }
}

fn declare_concept_names(sig: &mut Signature, c: &ConceptExpr) -> Result<(), DlError> {
    let mut result = Ok(());
    c.visit_names(&mut |name, kind| {
        if result.is_ok() {
            result = sig.declare(name, kind);
        }
    });
    result
}

/// Reflexive-transitive closure of a set of edges over `nodes`:
/// `closure[n]` contains `n` itself and everything reachable from it.
pub(crate) fn reflexive_transitive_closure(
    nodes: &BTreeSet<String>,
    edges: &[(String, String)],
) -> BTreeMap<String, BTreeSet<String>> {
    let mut successors: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (from, to) in edges {
        successors.entry(from).or_default().push(to);
    }
    let mut closure = BTreeMap::new();
    for node in nodes {
        let mut reached: BTreeSet<String> = BTreeSet::new();
        let mut stack = vec![node.as_str()];
        while let Some(current) = stack.pop() {
            if reached.insert(current.to_string()) {
                if let Some(next) = successors.get(current) {
                    stack.extend(next.iter().copied());
                }
            }
        }
        closure.insert(node.clone(), reached);
    }
    closure
}

/// A role `s` is simple when no transitive role sits at or below it in
/// the role hierarchy.
pub fn is_simple_role(s: &str, kb: &KnowledgeBase) -> Result<bool, DlError> {
    if !kb.signature.roles.contains(s) {
        return Err(DlError::UnknownName {
            kind: NameKind::Role,
            name: s.to_string(),
        });
    }
    let edges: Vec<(String, String)> = kb
        .rbox
        .iter()
        .filter_map(|axiom| match axiom {
            RoleAxiom::SubRoleOf { sub, sup } => Some((sub.clone(), sup.clone())),
            _ => None,
        })
        .collect();
    let closure = reflexive_transitive_closure(&kb.signature.roles, &edges);
    let transitive: BTreeSet<&String> = kb
        .rbox
        .iter()
        .filter_map(|axiom| match axiom {
            RoleAxiom::Transitive(r) => Some(r),
            _ => None,
        })
        .collect();
    // r is subsumed by s when s is in r's upward closure.
    for r in &kb.signature.roles {
        if transitive.contains(r) && closure[r].contains(s) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Role names appearing under a cardinality restriction in `c` that are
/// not simple in `kb`. Cardinalities over non-simple roles are outside
/// the usual DL restrictions; callers emit a warning and proceed.
pub fn non_simple_cardinality_roles(c: &ConceptExpr, kb: &KnowledgeBase) -> Vec<String> {
    let mut found = BTreeSet::new();
    collect_cardinality_roles(c, &mut found);
    found
        .into_iter()
        .filter(|r| matches!(is_simple_role(r, kb), Ok(false)))
        .collect()
}

fn collect_cardinality_roles(c: &ConceptExpr, out: &mut BTreeSet<String>) {
    match c {
        ConceptExpr::AtLeast(_, role, filler) | ConceptExpr::AtMost(_, role, filler) => {
            if let Some(name) = role.name() {
                out.insert(name.to_string());
            }
            collect_cardinality_roles(filler, out);
        }
        ConceptExpr::Negation(inner) => collect_cardinality_roles(inner, out),
        ConceptExpr::Conjunction(l, r) | ConceptExpr::Disjunction(l, r) => {
            collect_cardinality_roles(l, out);
            collect_cardinality_roles(r, out);
        }
        ConceptExpr::Existential(_, filler) | ConceptExpr::Universal(_, filler) => {
            collect_cardinality_roles(filler, out);
        }
        _ => {}
    }
}
