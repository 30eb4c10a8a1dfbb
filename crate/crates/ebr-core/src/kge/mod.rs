//! Knowledge-graph embedding models: trilinear complex-product,
//! multiplicative, and translational scorers over learned per-entity and
//! per-relation parameter rows, with a sigmoid link predictor on top.
//!
//! All numerics are generic over the scalar type; the crate root exports
//! `f64` aliases, which the CLI and harness use throughout.

mod io;
mod train;

pub use io::{load_model, save_model, vocab_fingerprint, MODEL_FORMAT_VERSION};
pub use train::{
    loss_and_grad, train, train_with_progress, Gradients, LabeledTriple, OptimizerKind,
    TrainConfig,
};

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssignOps};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KgeError {
    #[error("entity id {0} out of vocabulary")]
    EntityOutOfVocab(usize),
    #[error("relation id {0} out of vocabulary")]
    RelationOutOfVocab(usize),
    #[error("name `{0}` is not in the model vocabulary")]
    NameOutOfVocab(String),
    #[error("training graph is empty")]
    EmptyGraph,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite {what} at epoch {epoch}; training aborted")]
    NonFinite { what: &'static str, epoch: usize },
    #[error("model file version {found}, expected {expected}")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("malformed model file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Scalar type the embedding math runs over.
pub trait Scalar:
    Float + FromPrimitive + NumAssignOps + fmt::Debug + Default + Send + Sync + 'static
{
    fn scalar_from(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite f64 converts to any float scalar")
    }

    fn into_f64(self) -> f64 {
        self.to_f64().expect("float scalar converts to f64")
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + NumAssignOps + fmt::Debug + Default + Send + Sync + 'static
{
}

/// Which scoring function a model uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScorerKind {
    /// Real part of the trilinear product of head, relation, and the
    /// complex conjugate of the tail.
    Complex,
    /// Elementwise triple product Σᵢ xᵢ rᵢ yᵢ.
    DistMult,
    /// Negative Euclidean distance −‖x + r − y‖₂.
    TransE,
}

impl ScorerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScorerKind::Complex => "complex",
            ScorerKind::DistMult => "distmult",
            ScorerKind::TransE => "transe",
        }
    }

    /// Reals per parameter row: the complex scorer stores real and
    /// imaginary halves.
    pub fn row_width(self, dim: usize) -> usize {
        match self {
            ScorerKind::Complex => 2 * dim,
            ScorerKind::DistMult | ScorerKind::TransE => dim,
        }
    }
}

impl fmt::Display for ScorerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScorerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "complex" => Ok(ScorerKind::Complex),
            "distmult" => Ok(ScorerKind::DistMult),
            "transe" => Ok(ScorerKind::TransE),
            other => Err(format!(
                "unknown scorer `{other}` (expected complex, distmult, or transe)"
            )),
        }
    }
}

pub fn sigmoid<F: Scalar>(score: F) -> F {
    F::one() / (F::one() + (-score).exp())
}

/// An embedding model: scorer identity, dimension, vocabularies, and one
/// parameter row per entity and relation. Frozen models are read-only
/// and safe to score from any number of threads.
#[derive(Debug, Clone)]
pub struct EmbeddingModel<F: Scalar> {
    scorer: ScorerKind,
    dim: usize,
    entities: Vec<String>,
    relations: Vec<String>,
    entity_index: HashMap<String, usize>,
    relation_index: HashMap<String, usize>,
    entity_params: Vec<F>,
    relation_params: Vec<F>,
    vocab_fingerprint: String,
}

impl<F: Scalar> EmbeddingModel<F> {
    /// Build a model from explicit parameter rows (flat, row-major, one
    /// row of `scorer.row_width(dim)` reals per vocabulary entry).
    pub fn from_params(
        scorer: ScorerKind,
        dim: usize,
        entities: Vec<String>,
        relations: Vec<String>,
        entity_params: Vec<F>,
        relation_params: Vec<F>,
    ) -> Result<Self, KgeError> {
        let width = scorer.row_width(dim);
        if entity_params.len() != entities.len() * width {
            return Err(KgeError::Format(format!(
                "entity parameter count {} does not match {} rows of width {}",
                entity_params.len(),
                entities.len(),
                width
            )));
        }
        if relation_params.len() != relations.len() * width {
            return Err(KgeError::Format(format!(
                "relation parameter count {} does not match {} rows of width {}",
                relation_params.len(),
                relations.len(),
                width
            )));
        }
        let entity_index = entities
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        let relation_index = relations
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        let vocab_fingerprint = vocab_fingerprint(&entities, &relations);
        Ok(EmbeddingModel {
            scorer,
            dim,
            entities,
            relations,
            entity_index,
            relation_index,
            entity_params,
            relation_params,
            vocab_fingerprint,
        })
    }

    pub fn scorer(&self) -> ScorerKind {
        self.scorer
    }

    pub fn dim(&self) -> usize {
        self.dim
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

    pub fn vocab_fingerprint(&self) -> &str {
        &self.vocab_fingerprint
    }

    pub fn row_width(&self) -> usize {
        self.scorer.row_width(self.dim)
    }

    pub fn entity_params(&self) -> &[F] {
        &self.entity_params
    }

    pub fn relation_params(&self) -> &[F] {
        &self.relation_params
    }

    pub(crate) fn params_mut(&mut self) -> (&mut [F], &mut [F]) {
        (&mut self.entity_params, &mut self.relation_params)
    }

    pub(crate) fn entity_row(&self, id: usize) -> &[F] {
        let width = self.row_width();
        &self.entity_params[id * width..(id + 1) * width]
    }

    pub(crate) fn relation_row(&self, id: usize) -> &[F] {
        let width = self.row_width();
        &self.relation_params[id * width..(id + 1) * width]
    }

    fn check_ids(&self, head: usize, relation: usize, tail: usize) -> Result<(), KgeError> {
        if head >= self.entities.len() {
            return Err(KgeError::EntityOutOfVocab(head));
        }
        if tail >= self.entities.len() {
            return Err(KgeError::EntityOutOfVocab(tail));
        }
        if relation >= self.relations.len() {
            return Err(KgeError::RelationOutOfVocab(relation));
        }
        Ok(())
    }

    /// Fold the head and relation rows into the per-tail combination:
    /// the complex product x∘r, the elementwise product, or the
    /// translation x + r. Scoring a tail against this combination is a
    /// single pass over the tail row, so scoring all tails is one
    /// matrix-vector sweep.
    pub(crate) fn combined(&self, head: usize, relation: usize) -> Vec<F> {
        let x = self.entity_row(head);
        let r = self.relation_row(relation);
        match self.scorer {
            ScorerKind::Complex => {
                let d = self.dim;
                let mut out = vec![F::zero(); 2 * d];
                for i in 0..d {
                    out[i] = x[i] * r[i] - x[d + i] * r[d + i];
                    out[d + i] = x[i] * r[d + i] + x[d + i] * r[i];
                }
                out
            }
            ScorerKind::DistMult => x.iter().zip(r).map(|(&a, &b)| a * b).collect(),
            ScorerKind::TransE => x.iter().zip(r).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub(crate) fn score_combined(&self, combined: &[F], tail: usize) -> F {
        let y = self.entity_row(tail);
        match self.scorer {
            ScorerKind::Complex => {
                let d = self.dim;
                let mut acc = F::zero();
                for i in 0..d {
                    acc = acc + combined[i] * y[i] + combined[d + i] * y[d + i];
                }
                acc
            }
            ScorerKind::DistMult => {
                let mut acc = F::zero();
                for i in 0..self.dim {
                    acc = acc + combined[i] * y[i];
                }
                acc
            }
            ScorerKind::TransE => {
                let mut acc = F::zero();
                for i in 0..self.dim {
                    let diff = combined[i] - y[i];
                    acc = acc + diff * diff;
                }
                -acc.sqrt()
            }
        }
    }

    /// Raw score of one triple.
    pub fn score(&self, head: usize, relation: usize, tail: usize) -> Result<F, KgeError> {
        self.check_ids(head, relation, tail)?;
        let combined = self.combined(head, relation);
        Ok(self.score_combined(&combined, tail))
    }

    /// Scores of `(head, relation, t)` for every entity `t`, computed by
    /// combining `(head, relation)` once and sweeping the entity matrix.
    /// Entry `t` equals `score(head, relation, t)` exactly.
    pub fn score_all_tails(&self, head: usize, relation: usize) -> Result<Vec<F>, KgeError> {
        if head >= self.entities.len() {
            return Err(KgeError::EntityOutOfVocab(head));
        }
        if relation >= self.relations.len() {
            return Err(KgeError::RelationOutOfVocab(relation));
        }
        let combined = self.combined(head, relation);
        Ok((0..self.entities.len())
            .map(|t| self.score_combined(&combined, t))
            .collect())
    }

    /// Truth probability: sigmoid of the raw score.
    pub fn predict(&self, head: usize, relation: usize, tail: usize) -> Result<F, KgeError> {
        Ok(sigmoid(self.score(head, relation, tail)?))
    }

    /// Whether this model was trained over the given vocabularies.
    pub fn matches_vocab(&self, entities: &[String], relations: &[String]) -> bool {
        self.vocab_fingerprint == vocab_fingerprint(entities, relations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model_with(
        scorer: ScorerKind,
        dim: usize,
        n_entities: usize,
        n_relations: usize,
        entity_params: Vec<f64>,
        relation_params: Vec<f64>,
    ) -> EmbeddingModel<f64> {
        let entities = (0..n_entities).map(|i| format!("e{i}")).collect();
        let relations = (0..n_relations).map(|i| format!("r{i}")).collect();
        EmbeddingModel::from_params(scorer, dim, entities, relations, entity_params, relation_params)
            .unwrap()
    }

    #[test]
    fn complex_zero_model_scores_zero() {
        let m = model_with(ScorerKind::Complex, 2, 3, 1, vec![0.0; 12], vec![0.0; 4]);
        assert_eq!(m.score(0, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn complex_real_unit_case() {
        // d=1, x = 1+0i, r = 1+0i, y = 1+0i.
        let m = model_with(
            ScorerKind::Complex,
            1,
            1,
            1,
            vec![1.0, 0.0],
            vec![1.0, 0.0],
        );
        assert_eq!(m.score(0, 0, 0).unwrap(), 1.0);
    }

    #[test]
    fn complex_imaginary_case() {
        // x = 0+1i, r = 0+1i, y = 1+0i: Re(i · i · conj(1)) = −1.
        let m = model_with(
            ScorerKind::Complex,
            1,
            2,
            1,
            vec![0.0, 1.0, 1.0, 0.0],
            vec![0.0, 1.0],
        );
        assert_eq!(m.score(0, 0, 1).unwrap(), -1.0);
    }

    #[test]
    fn distmult_and_transe_hand_cases() {
        let m = model_with(
            ScorerKind::DistMult,
            2,
            2,
            1,
            vec![1.0, 2.0, 3.0, 4.0],
            vec![0.5, 0.25],
        );
        // Σ x·r·y = 1·0.5·3 + 2·0.25·4 = 3.5
        assert_eq!(m.score(0, 0, 1).unwrap(), 3.5);

        let m = model_with(
            ScorerKind::TransE,
            2,
            2,
            1,
            vec![1.0, 0.0, 1.0, 1.0],
            vec![0.0, 1.0],
        );
        // x + r = (1,1) = y, distance 0.
        assert_eq!(m.score(0, 0, 1).unwrap(), 0.0);
        // Against itself: ‖(1,1)−(1,0)‖ = 1.
        assert_eq!(m.score(0, 0, 0).unwrap(), -1.0);
    }

    #[test]
    fn score_all_tails_matches_pointwise_exactly() {
        for scorer in [ScorerKind::Complex, ScorerKind::DistMult, ScorerKind::TransE] {
            let width = scorer.row_width(3);
            let entity_params: Vec<f64> = (0..5 * width)
                .map(|i| ((i * 37 % 19) as f64 - 9.0) / 7.0)
                .collect();
            let relation_params: Vec<f64> = (0..2 * width)
                .map(|i| ((i * 23 % 17) as f64 - 8.0) / 5.0)
                .collect();
            let m = model_with(scorer, 3, 5, 2, entity_params, relation_params);
            for h in 0..5 {
                for r in 0..2 {
                    let all = m.score_all_tails(h, r).unwrap();
                    assert_eq!(all.len(), 5);
                    for (t, &s) in all.iter().enumerate() {
                        assert_eq!(s, m.score(h, r, t).unwrap(), "{scorer} ({h},{r},{t})");
                    }
                }
            }
        }
    }

    #[test]
    fn complex_with_zero_imaginary_equals_distmult() {
        let dim = 4;
        let reals: Vec<f64> = (0..3 * dim).map(|i| (i as f64) * 0.1 - 0.5).collect();
        let rel_reals: Vec<f64> = (0..2 * dim).map(|i| (i as f64) * 0.07 - 0.2).collect();
        let mut complex_entities = Vec::new();
        for row in reals.chunks(dim) {
            complex_entities.extend_from_slice(row);
            complex_entities.extend(std::iter::repeat(0.0).take(dim));
        }
        let mut complex_relations = Vec::new();
        for row in rel_reals.chunks(dim) {
            complex_relations.extend_from_slice(row);
            complex_relations.extend(std::iter::repeat(0.0).take(dim));
        }
        let cm = model_with(ScorerKind::Complex, dim, 3, 2, complex_entities, complex_relations);
        let dm = model_with(ScorerKind::DistMult, dim, 3, 2, reals, rel_reals);
        for h in 0..3 {
            for r in 0..2 {
                for t in 0..3 {
                    let a = cm.score(h, r, t).unwrap();
                    let b = dm.score(h, r, t).unwrap();
                    assert!((a - b).abs() <= 1e-12, "({h},{r},{t}): {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn predict_is_sigmoid_of_score() {
        let m = model_with(ScorerKind::Complex, 1, 2, 1, vec![0.0; 4], vec![0.0; 2]);
        assert_eq!(m.predict(0, 0, 1).unwrap(), 0.5);
        assert!(sigmoid(50.0_f64) > 1.0 - 1e-9);
        for x in [-3.0_f64, -0.7, 0.0, 1.3, 8.0] {
            assert!((sigmoid(-x) - (1.0 - sigmoid(x))).abs() < 1e-15);
        }
        // Strictly increasing in the score.
        let mut last = f64::NEG_INFINITY;
        for s in (-20..=20).map(|i| i as f64 * 0.5) {
            let p = sigmoid(s);
            assert!(p > last);
            last = p;
        }
    }

    #[test]
    fn out_of_vocab_ids_error() {
        let m = model_with(ScorerKind::DistMult, 1, 2, 1, vec![0.0; 2], vec![0.0; 1]);
        assert!(matches!(m.score(2, 0, 0), Err(KgeError::EntityOutOfVocab(2))));
        assert!(matches!(m.score(0, 1, 0), Err(KgeError::RelationOutOfVocab(1))));
        assert!(matches!(m.score(0, 0, 9), Err(KgeError::EntityOutOfVocab(9))));
    }

    #[test]
    fn single_entity_vocabulary() {
        let m = model_with(ScorerKind::DistMult, 2, 1, 1, vec![0.0; 2], vec![0.0; 2]);
        assert_eq!(m.score_all_tails(0, 0).unwrap().len(), 1);
    }

    #[test]
    fn f32_models_score_too() {
        let entities = vec!["a".to_string(), "b".to_string()];
        let relations = vec!["r".to_string()];
        let m: EmbeddingModel<f32> = EmbeddingModel::from_params(
            ScorerKind::Complex,
            1,
            entities,
            relations,
            vec![1.0, 0.0, 1.0, 0.0],
            vec![1.0, 0.0],
        )
        .unwrap();
        assert_eq!(m.score(0, 0, 1).unwrap(), 1.0f32);
    }
}
