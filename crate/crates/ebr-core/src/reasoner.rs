//! Set-valued evaluation of concept expressions against a link
//! predictor: a triple counts as true when its predicted probability
//! clears the threshold γ, and the concept constructors become set
//! operations over the candidate individuals.
//!
//! Universal restrictions are evaluated through the complement rewriting
//! `∀r.C ≡ ¬∃r.¬C`. Existentials and cardinalities batch tail scoring
//! per head instead of issuing point queries.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::dl::{ConceptExpr, RoleExpr};
use crate::kge::{sigmoid, EmbeddingModel, Scalar};
use crate::oracle::MaterializedKB;
use crate::triples::RDF_TYPE;

#[derive(Debug, Error)]
pub enum RetrieveError {
    #[error("name `{0}` is not in the predictor vocabulary")]
    UnknownName(String),
    #[error("gamma must lie strictly between 0 and 1, got {0}")]
    InvalidGamma(f64),
}

/// Anything that can assign truth probabilities to triples.
pub trait Predictor {
    /// Truth probability of `(head, relation, tail)`, in `[0, 1]`.
    fn predict(&self, head: &str, relation: &str, tail: &str) -> Result<f64, RetrieveError>;

    /// Probabilities of `(head, relation, t)` for each `t` in `tails`.
    /// Implementations with a batched scoring path override this.
    fn predict_tails(
        &self,
        head: &str,
        relation: &str,
        tails: &[String],
    ) -> Result<Vec<f64>, RetrieveError> {
        tails
            .iter()
            .map(|t| self.predict(head, relation, t))
            .collect()
    }
}

impl<F: Scalar> Predictor for EmbeddingModel<F> {
    fn predict(&self, head: &str, relation: &str, tail: &str) -> Result<f64, RetrieveError> {
        let h = self
            .entity_id(head)
            .ok_or_else(|| RetrieveError::UnknownName(head.to_string()))?;
        let r = self
            .relation_id(relation)
            .ok_or_else(|| RetrieveError::UnknownName(relation.to_string()))?;
        let t = self
            .entity_id(tail)
            .ok_or_else(|| RetrieveError::UnknownName(tail.to_string()))?;
        Ok(self
            .predict(h, r, t)
            .expect("ids resolved from the vocabulary")
            .into_f64())
    }

    fn predict_tails(
        &self,
        head: &str,
        relation: &str,
        tails: &[String],
    ) -> Result<Vec<f64>, RetrieveError> {
        let h = self
            .entity_id(head)
            .ok_or_else(|| RetrieveError::UnknownName(head.to_string()))?;
        let r = self
            .relation_id(relation)
            .ok_or_else(|| RetrieveError::UnknownName(relation.to_string()))?;
        // One (head, relation) combination for the whole sweep; each
        // tail is then a single row pass, identical to `predict`.
        let combined = self.combined(h, r);
        tails
            .iter()
            .map(|tail| {
                let t = self
                    .entity_id(tail)
                    .ok_or_else(|| RetrieveError::UnknownName(tail.to_string()))?;
                Ok(sigmoid(self.score_combined(&combined, t)).into_f64())
            })
            .collect()
    }
}

/// An idealized predictor answering from a materialized fact set:
/// probability 1 for entailed facts, 0 otherwise. Bridges the symbolic
/// and neural semantics exactly, which makes it the test oracle for the
/// evaluator.
#[derive(Debug, Clone)]
pub struct PerfectPredictor {
    memberships: BTreeMap<String, BTreeSet<String>>,
    role_pairs: BTreeMap<String, BTreeSet<(String, String)>>,
}

impl PerfectPredictor {
    pub fn from_materialized(mkb: &MaterializedKB) -> Self {
        PerfectPredictor {
            memberships: mkb.memberships().clone(),
            role_pairs: mkb.role_extensions().clone(),
        }
    }
}

impl Predictor for PerfectPredictor {
    fn predict(&self, head: &str, relation: &str, tail: &str) -> Result<f64, RetrieveError> {
        let holds = if relation == RDF_TYPE {
            self.memberships
                .get(tail)
                .is_some_and(|members| members.contains(head))
        } else {
            self.role_pairs.get(relation).is_some_and(|pairs| {
                pairs.contains(&(head.to_string(), tail.to_string()))
            })
        };
        Ok(if holds { 1.0 } else { 0.0 })
    }
}

/// The candidate individuals retrieval draws from, together with the
/// probability threshold γ ∈ (0, 1).
#[derive(Debug, Clone)]
pub struct NeuralDomain {
    candidates: Vec<String>,
    gamma: f64,
}

impl NeuralDomain {
    pub fn new(candidates: Vec<String>, gamma: f64) -> Result<Self, RetrieveError> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(RetrieveError::InvalidGamma(gamma));
        }
        let mut candidates = candidates;
        candidates.sort();
        candidates.dedup();
        Ok(NeuralDomain { candidates, gamma })
    }

    pub fn candidates(&self) -> &[String] {
        &self.candidates
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn full_set(&self) -> BTreeSet<String> {
        self.candidates.iter().cloned().collect()
    }
}

/// Individuals in the extension of `c` under the thresholded predictor.
pub fn retrieve(
    c: &ConceptExpr,
    predictor: &dyn Predictor,
    dom: &NeuralDomain,
) -> Result<BTreeSet<String>, RetrieveError> {
    match c {
        ConceptExpr::Atomic(name) => {
            let mut out = BTreeSet::new();
            for x in &dom.candidates {
                if predictor.predict(x, RDF_TYPE, name)? >= dom.gamma {
                    out.insert(x.clone());
                }
            }
            Ok(out)
        }
        ConceptExpr::Top => Ok(dom.full_set()),
        ConceptExpr::Bottom => Ok(BTreeSet::new()),
        ConceptExpr::Negation(inner) => {
            let inner = retrieve(inner, predictor, dom)?;
            Ok(dom
                .candidates
                .iter()
                .filter(|x| !inner.contains(*x))
                .cloned()
                .collect())
        }
        ConceptExpr::Conjunction(l, r) => {
            let l = retrieve(l, predictor, dom)?;
            let r = retrieve(r, predictor, dom)?;
            Ok(l.intersection(&r).cloned().collect())
        }
        ConceptExpr::Disjunction(l, r) => {
            let l = retrieve(l, predictor, dom)?;
            let r = retrieve(r, predictor, dom)?;
            Ok(l.union(&r).cloned().collect())
        }
        ConceptExpr::Existential(role, filler) => {
            let filler = retrieve(filler, predictor, dom)?;
            let counts = successor_counts(role, &filler, predictor, dom)?;
            Ok(dom
                .candidates
                .iter()
                .filter(|x| counts.get(*x).copied().unwrap_or(0) >= 1)
                .cloned()
                .collect())
        }
        ConceptExpr::Universal(role, filler) => {
            // The printed semantics define ∀r.C as ¬∃r.¬C; evaluate the
            // rewriting literally.
            let rewritten = ConceptExpr::some(role.clone(), filler.as_ref().clone().negation())
                .negation();
            retrieve(&rewritten, predictor, dom)
        }
        ConceptExpr::AtLeast(n, role, filler) => {
            let filler = retrieve(filler, predictor, dom)?;
            let counts = successor_counts(role, &filler, predictor, dom)?;
            Ok(dom
                .candidates
                .iter()
                .filter(|x| counts.get(*x).copied().unwrap_or(0) >= *n as usize)
                .cloned()
                .collect())
        }
        ConceptExpr::AtMost(n, role, filler) => {
            let filler = retrieve(filler, predictor, dom)?;
            let counts = successor_counts(role, &filler, predictor, dom)?;
            Ok(dom
                .candidates
                .iter()
                .filter(|x| counts.get(*x).copied().unwrap_or(0) <= *n as usize)
                .cloned()
                .collect())
        }
        ConceptExpr::Nominal(name) => {
            let mut out = BTreeSet::new();
            if dom.candidates.iter().any(|x| x == name) {
                out.insert(name.clone());
            }
            Ok(out)
        }
    }
}

/// For each candidate `x`, how many members of `targets` are reachable
/// through `role` under the thresholded predictor. Atomic roles batch
/// tails per head; inverse roles batch per target, swapping arguments.
fn successor_counts(
    role: &RoleExpr,
    targets: &BTreeSet<String>,
    predictor: &dyn Predictor,
    dom: &NeuralDomain,
) -> Result<BTreeMap<String, usize>, RetrieveError> {
    let target_list: Vec<String> = targets.iter().cloned().collect();
    let mut counts = BTreeMap::new();
    match role {
        RoleExpr::Atomic(name) => {
            for x in &dom.candidates {
                let probs = predictor.predict_tails(x, name, &target_list)?;
                let count = probs.iter().filter(|&&p| p >= dom.gamma).count();
                counts.insert(x.clone(), count);
            }
        }
        RoleExpr::Inverse(name) => {
            // (x, y) ∈ (r⁻¹)ᴺ iff (y, x) ∈ rᴺ.
            for y in &target_list {
                let probs = predictor.predict_tails(y, name, &dom.candidates)?;
                for (x, &p) in dom.candidates.iter().zip(&probs) {
                    if p >= dom.gamma {
                        *counts.entry(x.clone()).or_insert(0) += 1;
                    }
                }
            }
        }
        RoleExpr::Universal => {
            for x in &dom.candidates {
                counts.insert(x.clone(), target_list.len());
            }
        }
    }
    Ok(counts)
}

/// The thresholded pair extension of a role over `dom × dom`.
pub fn role_pairs(
    role: &RoleExpr,
    predictor: &dyn Predictor,
    dom: &NeuralDomain,
) -> Result<BTreeSet<(String, String)>, RetrieveError> {
    match role {
        RoleExpr::Atomic(name) => {
            let mut pairs = BTreeSet::new();
            for x in &dom.candidates {
                let probs = predictor.predict_tails(x, name, &dom.candidates)?;
                for (y, &p) in dom.candidates.iter().zip(&probs) {
                    if p >= dom.gamma {
                        pairs.insert((x.clone(), y.clone()));
                    }
                }
            }
            Ok(pairs)
        }
        RoleExpr::Inverse(name) => Ok(role_pairs(&RoleExpr::atomic(name.clone()), predictor, dom)?
            .into_iter()
            .map(|(x, y)| (y, x))
            .collect()),
        RoleExpr::Universal => {
            let mut pairs = BTreeSet::new();
            for x in &dom.candidates {
                for y in &dom.candidates {
                    pairs.insert((x.clone(), y.clone()));
                }
            }
            Ok(pairs)
        }
    }
}
