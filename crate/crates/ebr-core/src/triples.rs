//! Indexed triple graphs extracted from knowledge bases, plus an
//! IRI-only N-Triples reader and writer.
//!
//! Extraction keeps exactly the taxonomic forms: `C(a)` with atomic `C`
//! becomes `(a, rdf:type, C)`, `r(a, b)` becomes `(a, r, b)`, atomic
//! `C ⊑ D` becomes `(C, rdfs:subClassOf, D)`, and `r ⊑ s` becomes
//! `(r, rdfs:subPropertyOf, s)`. Everything else (complex concepts,
//! transitivity, functionality) stays out of the graph.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::dl::{Assertion, ConceptExpr, KnowledgeBase, RoleAxiom};

pub const RDF_TYPE: &str = "rdf:type";
pub const RDFS_SUBCLASS_OF: &str = "rdfs:subClassOf";
pub const RDFS_SUBPROPERTY_OF: &str = "rdfs:subPropertyOf";

pub const RDF_TYPE_IRI: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDFS_SUBCLASS_OF_IRI: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
pub const RDFS_SUBPROPERTY_OF_IRI: &str = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
}

/// One directed labeled edge, with ids into the owning graph's
/// vocabularies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub head: usize,
    pub relation: usize,
    pub tail: usize,
}

/// A de-duplicated triple set over lexicographically ordered entity and
/// relation vocabularies, indexed by (head, relation) and (relation,
/// tail). Immutable after construction.
#[derive(Debug, Clone)]
pub struct TripleGraph {
    entities: Vec<String>,
    relations: Vec<String>,
    entity_index: HashMap<String, usize>,
    relation_index: HashMap<String, usize>,
    triples: BTreeSet<Triple>,
    tails_by_head_relation: HashMap<(usize, usize), Vec<usize>>,
    heads_by_relation_tail: HashMap<(usize, usize), Vec<usize>>,
}

impl PartialEq for TripleGraph {
    fn eq(&self, other: &Self) -> bool {
        self.entities == other.entities
            && self.relations == other.relations
            && self.triples == other.triples
    }
}

impl Eq for TripleGraph {}

impl TripleGraph {
    /// Build a graph whose vocabularies are exactly the names occurring
    /// in `triples`.
    pub fn from_named_triples<'a>(
        triples: impl IntoIterator<Item = (&'a str, &'a str, &'a str)> + Clone,
    ) -> Self {
        let mut entities = BTreeSet::new();
        let mut relations = BTreeSet::new();
        for (h, r, t) in triples.clone() {
            entities.insert(h.to_string());
            entities.insert(t.to_string());
            relations.insert(r.to_string());
        }
        Self::with_vocab(entities, relations, triples)
            .expect("vocabulary collected from the triples themselves")
    }

    /// Build a graph over explicit vocabularies, which may contain
    /// entries no triple touches.
    pub fn with_vocab<'a>(
        entities: BTreeSet<String>,
        relations: BTreeSet<String>,
        triples: impl IntoIterator<Item = (&'a str, &'a str, &'a str)>,
    ) -> Result<Self, GraphError> {
        let entities: Vec<String> = entities.into_iter().collect();
        let relations: Vec<String> = relations.into_iter().collect();
        let entity_index: HashMap<String, usize> = entities
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        let relation_index: HashMap<String, usize> = relations
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        let mut set = BTreeSet::new();
        for (h, r, t) in triples {
            let head = *entity_index
                .get(h)
                .ok_or_else(|| GraphError::UnknownEntity(h.to_string()))?;
            let relation = *relation_index
                .get(r)
                .ok_or_else(|| GraphError::UnknownRelation(r.to_string()))?;
            let tail = *entity_index
                .get(t)
                .ok_or_else(|| GraphError::UnknownEntity(t.to_string()))?;
            set.insert(Triple {
                head,
                relation,
                tail,
            });
        }
        let mut tails_by_head_relation: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut heads_by_relation_tail: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for triple in &set {
            tails_by_head_relation
                .entry((triple.head, triple.relation))
                .or_default()
                .push(triple.tail);
            heads_by_relation_tail
                .entry((triple.relation, triple.tail))
                .or_default()
                .push(triple.head);
        }
        Ok(TripleGraph {
            entities,
            relations,
            entity_index,
            relation_index,
            triples: set,
            tails_by_head_relation,
            heads_by_relation_tail,
        })
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn relations(&self) -> &[String] {
        &self.relations
    }

    pub fn entity_id(&self, name: &str) -> Option<usize> {
        self.entity_index.get(name).copied()
    }

    pub fn relation_id(&self, name: &str) -> Option<usize> {
        self.relation_index.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn triples(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn named_triples(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.triples.iter().map(|t| {
            (
                self.entities[t.head].as_str(),
                self.relations[t.relation].as_str(),
                self.entities[t.tail].as_str(),
            )
        })
    }

    pub fn tails(&self, head: usize, relation: usize) -> &[usize] {
        self.tails_by_head_relation
            .get(&(head, relation))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn heads(&self, relation: usize, tail: usize) -> &[usize] {
        self.heads_by_relation_tail
            .get(&(relation, tail))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

/// Convert a knowledge base into its triple graph.
///
/// The entity vocabulary covers every individual and concept name in the
/// signature (so retrieval targets always have ids, even when untouched
/// by any triple) plus role names that occur as `rdfs:subPropertyOf`
/// endpoints. The relation vocabulary is all role names plus the three
/// builtin predicates. Both are sorted, so ids are reproducible.
pub fn extract_triples(kb: &KnowledgeBase) -> TripleGraph {
    let mut entities: BTreeSet<String> = kb.signature.individuals.clone();
    entities.extend(kb.signature.concepts.iter().cloned());
    let mut relations: BTreeSet<String> = kb.signature.roles.clone();
    relations.insert(RDF_TYPE.to_string());
    relations.insert(RDFS_SUBCLASS_OF.to_string());
    relations.insert(RDFS_SUBPROPERTY_OF.to_string());

    let mut named: Vec<(String, String, String)> = Vec::new();
    for gci in &kb.tbox {
        if let (ConceptExpr::Atomic(sub), ConceptExpr::Atomic(sup)) = (&gci.sub, &gci.sup) {
            named.push((sub.clone(), RDFS_SUBCLASS_OF.to_string(), sup.clone()));
        }
    }
    for axiom in &kb.rbox {
        if let RoleAxiom::SubRoleOf { sub, sup } = axiom {
            entities.insert(sub.clone());
            entities.insert(sup.clone());
            named.push((sub.clone(), RDFS_SUBPROPERTY_OF.to_string(), sup.clone()));
        }
    }
    for assertion in &kb.abox {
        match assertion {
            Assertion::Class {
                concept: ConceptExpr::Atomic(name),
                individual,
            } => named.push((individual.clone(), RDF_TYPE.to_string(), name.clone())),
            Assertion::Class { .. } => {}
            Assertion::Role {
                role,
                subject,
                object,
            } => named.push((subject.clone(), role.clone(), object.clone())),
        }
    }
    TripleGraph::with_vocab(
        entities,
        relations,
        named.iter().map(|(h, r, t)| (h.as_str(), r.as_str(), t.as_str())),
    )
    .expect("extraction vocabulary covers every emitted triple")
}

fn predicate_iri(relation: &str, base: &str) -> String {
    match relation {
        RDF_TYPE => RDF_TYPE_IRI.to_string(),
        RDFS_SUBCLASS_OF => RDFS_SUBCLASS_OF_IRI.to_string(),
        RDFS_SUBPROPERTY_OF => RDFS_SUBPROPERTY_OF_IRI.to_string(),
        other => format!("{base}#{other}"),
    }
}

/// Serialize to N-Triples with IRI terms only. Local names are attached
/// to `base` with a `#`; builtin predicates expand to their standard
/// namespaces. Lines are sorted lexicographically.
pub fn export_ntriples(graph: &TripleGraph, base: &str) -> String {
    let mut lines: Vec<String> = graph
        .named_triples()
        .map(|(h, r, t)| {
            format!(
                "<{base}#{h}> <{pred}> <{base}#{t}> .",
                pred = predicate_iri(r, base)
            )
        })
        .collect();
    lines.sort();
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

fn local_name(iri: &str) -> &str {
    if let Some(pos) = iri.rfind('#') {
        &iri[pos + 1..]
    } else if let Some(pos) = iri.rfind('/') {
        &iri[pos + 1..]
    } else {
        iri
    }
}

fn predicate_name(iri: &str) -> &str {
    match iri {
        RDF_TYPE_IRI => RDF_TYPE,
        RDFS_SUBCLASS_OF_IRI => RDFS_SUBCLASS_OF,
        RDFS_SUBPROPERTY_OF_IRI => RDFS_SUBPROPERTY_OF,
        other => local_name(other),
    }
}

fn parse_iri_term(token: &str, line: usize) -> Result<&str, GraphError> {
    if token.starts_with('"') {
        return Err(GraphError::Malformed {
            line,
            msg: "literal terms are not supported".into(),
        });
    }
    if token.starts_with("_:") {
        return Err(GraphError::Malformed {
            line,
            msg: "blank-node terms are not supported".into(),
        });
    }
    token
        .strip_prefix('<')
        .and_then(|t| t.strip_suffix('>'))
        .ok_or_else(|| GraphError::Malformed {
            line,
            msg: format!("expected IRI term, found `{token}`"),
        })
}

/// Parse an IRI-only N-Triples document. Local names are recovered by
/// stripping everything up to the final `#` (or `/`).
pub fn import_ntriples(text: &str) -> Result<TripleGraph, GraphError> {
    let mut named: Vec<(String, String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            [_, _, _, "."] => {
                tokens.pop();
            }
            [_, _, last] if last.ends_with('.') => {
                let trimmed = &last[..last.len() - 1];
                let n = tokens.len();
                tokens[n - 1] = trimmed;
            }
            _ => {
                return Err(GraphError::Malformed {
                    line: line_no,
                    msg: "expected `<s> <p> <o> .`".into(),
                })
            }
        }
        let subject = parse_iri_term(tokens[0], line_no)?;
        let predicate = parse_iri_term(tokens[1], line_no)?;
        let object = parse_iri_term(tokens[2], line_no)?;
        named.push((
            local_name(subject).to_string(),
            predicate_name(predicate).to_string(),
            local_name(object).to_string(),
        ));
    }
    Ok(TripleGraph::from_named_triples(
        named.iter().map(|(h, r, t)| (h.as_str(), r.as_str(), t.as_str())),
    ))
}
