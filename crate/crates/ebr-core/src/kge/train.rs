//! Negative-sampling trainer: binary cross-entropy over asserted triples
//! plus uniformly corrupted negatives, optimized with Adam or SGD.
//! Everything is driven by one seeded RNG stream and a fixed iteration
//! order, so identical inputs give bit-identical parameters.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{sigmoid, EmbeddingModel, KgeError, Scalar, ScorerKind};
use crate::triples::{Triple, TripleGraph};

/// Training hyperparameters. The graph and model identity (scorer,
/// dimension) are passed to [`train`] separately.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub negatives_per_positive: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub optimizer: OptimizerKind,
    pub init_scale: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 256,
            learning_rate: 0.01,
            negatives_per_positive: 8,
            batch_size: 512,
            seed: 42,
            optimizer: OptimizerKind::Adam,
            init_scale: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizerKind {
    Adam,
    Sgd,
}

impl TrainConfig {
    fn validate(&self) -> Result<(), KgeError> {
        if self.epochs == 0 {
            return Err(KgeError::InvalidConfig("epochs must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(KgeError::InvalidConfig("learning rate must be > 0".into()));
        }
        if self.negatives_per_positive == 0 {
            return Err(KgeError::InvalidConfig(
                "negatives per positive must be >= 1".into(),
            ));
        }
        if self.batch_size == 0 {
            return Err(KgeError::InvalidConfig("batch size must be >= 1".into()));
        }
        if !(self.init_scale > 0.0) {
            return Err(KgeError::InvalidConfig("init scale must be > 0".into()));
        }
        Ok(())
    }
}

/// One training example: a triple with a truth label.
#[derive(Debug, Clone, Copy)]
pub struct LabeledTriple {
    pub head: usize,
    pub relation: usize,
    pub tail: usize,
    pub positive: bool,
}

/// Dense gradients laid out exactly like the model parameters.
#[derive(Debug, Clone)]
pub struct Gradients<F> {
    pub entity_params: Vec<F>,
    pub relation_params: Vec<F>,
}

const LOG_CLAMP: f64 = 1e-12;

/// Mean binary cross-entropy over the batch and its analytic gradient.
/// Probabilities are clamped at `1e-12` inside the logarithms, so the
/// loss never reaches −∞; the gradient is the exact `σ(s) − y` of the
/// unclamped objective.
pub fn loss_and_grad<F: Scalar>(
    model: &EmbeddingModel<F>,
    batch: &[LabeledTriple],
) -> Result<(F, Gradients<F>), KgeError> {
    let mut grads = Gradients {
        entity_params: vec![F::zero(); model.entity_params().len()],
        relation_params: vec![F::zero(); model.relation_params().len()],
    };
    if batch.is_empty() {
        return Ok((F::zero(), grads));
    }
    let clamp_lo = F::scalar_from(LOG_CLAMP);
    let clamp_hi = F::one() - clamp_lo;
    let inv_n = F::one() / F::scalar_from(batch.len() as f64);
    let mut loss = F::zero();
    let width = model.row_width();
    let d = model.dim();
    // Per-item score partials; head and tail may be the same entity, so
    // the scratch rows are folded into the dense gradient afterwards.
    let mut gx = vec![F::zero(); width];
    let mut gr = vec![F::zero(); width];
    let mut gy = vec![F::zero(); width];
    for item in batch {
        let score = model.score(item.head, item.relation, item.tail)?;
        let p = sigmoid(score);
        let p_clamped = p.max(clamp_lo).min(clamp_hi);
        let y = if item.positive { F::one() } else { F::zero() };
        loss = loss
            - (y * p_clamped.ln() + (F::one() - y) * (F::one() - p_clamped).ln()) * inv_n;
        // d(mean loss)/d(score) for this item.
        let dscore = (p - y) * inv_n;

        let x = model.entity_row(item.head);
        let r = model.relation_row(item.relation);
        let y_row = model.entity_row(item.tail);
        gx.iter_mut().for_each(|g| *g = F::zero());
        gr.iter_mut().for_each(|g| *g = F::zero());
        gy.iter_mut().for_each(|g| *g = F::zero());
        match model.scorer() {
            ScorerKind::Complex => {
                for i in 0..d {
                    let (xr, xi) = (x[i], x[d + i]);
                    let (rr, ri) = (r[i], r[d + i]);
                    let (yr, yi) = (y_row[i], y_row[d + i]);
                    gx[i] = dscore * (rr * yr + ri * yi);
                    gx[d + i] = dscore * (rr * yi - ri * yr);
                    gr[i] = dscore * (xr * yr + xi * yi);
                    gr[d + i] = dscore * (xr * yi - xi * yr);
                    gy[i] = dscore * (xr * rr - xi * ri);
                    gy[d + i] = dscore * (xr * ri + xi * rr);
                }
            }
            ScorerKind::DistMult => {
                for i in 0..d {
                    gx[i] = dscore * r[i] * y_row[i];
                    gr[i] = dscore * x[i] * y_row[i];
                    gy[i] = dscore * x[i] * r[i];
                }
            }
            ScorerKind::TransE => {
                let norm = -score;
                if norm > F::zero() {
                    for i in 0..d {
                        let v = (x[i] + r[i] - y_row[i]) / norm;
                        gx[i] = -(dscore * v);
                        gr[i] = -(dscore * v);
                        gy[i] = dscore * v;
                    }
                }
                // At ‖x + r − y‖ = 0 the distance is not differentiable;
                // use the zero subgradient.
            }
        }
        for i in 0..width {
            grads.entity_params[item.head * width + i] += gx[i];
            grads.relation_params[item.relation * width + i] += gr[i];
            grads.entity_params[item.tail * width + i] += gy[i];
        }
    }
    Ok((loss, grads))
}

struct Adam<F> {
    m_entity: Vec<F>,
    v_entity: Vec<F>,
    m_relation: Vec<F>,
    v_relation: Vec<F>,
    step: i32,
    beta1: F,
    beta2: F,
    epsilon: F,
}

impl<F: Scalar> Adam<F> {
    fn new(n_entity: usize, n_relation: usize) -> Self {
        Adam {
            m_entity: vec![F::zero(); n_entity],
            v_entity: vec![F::zero(); n_entity],
            m_relation: vec![F::zero(); n_relation],
            v_relation: vec![F::zero(); n_relation],
            step: 0,
            beta1: F::scalar_from(0.9),
            beta2: F::scalar_from(0.999),
            epsilon: F::scalar_from(1e-8),
        }
    }

    fn update(&mut self, lr: F, params: (&mut [F], &mut [F]), grads: &Gradients<F>) {
        self.step += 1;
        let correction1 = F::one() - self.beta1.powi(self.step);
        let correction2 = F::one() - self.beta2.powi(self.step);
        let (entity, relation) = params;
        Self::update_block(
            entity,
            &grads.entity_params,
            &mut self.m_entity,
            &mut self.v_entity,
            lr,
            self.beta1,
            self.beta2,
            self.epsilon,
            correction1,
            correction2,
        );
        Self::update_block(
            relation,
            &grads.relation_params,
            &mut self.m_relation,
            &mut self.v_relation,
            lr,
            self.beta1,
            self.beta2,
            self.epsilon,
            correction1,
            correction2,
        );
    }

    #[allow(clippy::too_many_arguments)]
    fn update_block(
        params: &mut [F],
        grads: &[F],
        m: &mut [F],
        v: &mut [F],
        lr: F,
        beta1: F,
        beta2: F,
        epsilon: F,
        correction1: F,
        correction2: F,
    ) {
        for i in 0..params.len() {
            let g = grads[i];
            m[i] = beta1 * m[i] + (F::one() - beta1) * g;
            v[i] = beta2 * v[i] + (F::one() - beta2) * g * g;
            let m_hat = m[i] / correction1;
            let v_hat = v[i] / correction2;
            params[i] = params[i] - lr * m_hat / (v_hat.sqrt() + epsilon);
        }
    }
}

fn sgd_update<F: Scalar>(lr: F, params: (&mut [F], &mut [F]), grads: &Gradients<F>) {
    let (entity, relation) = params;
    for (p, g) in entity.iter_mut().zip(&grads.entity_params) {
        *p = *p - lr * *g;
    }
    for (p, g) in relation.iter_mut().zip(&grads.relation_params) {
        *p = *p - lr * *g;
    }
}

const MAX_CORRUPTION_ATTEMPTS: usize = 100;

fn sample_negative(
    positive: Triple,
    entity_count: usize,
    graph: &TripleGraph,
    rng: &mut ChaCha8Rng,
) -> Triple {
    let mut candidate = positive;
    for _ in 0..MAX_CORRUPTION_ATTEMPTS {
        let corrupt_head = rng.random_bool(0.5);
        let replacement = rng.random_range(0..entity_count);
        candidate = if corrupt_head {
            Triple {
                head: replacement,
                ..positive
            }
        } else {
            Triple {
                tail: replacement,
                ..positive
            }
        };
        if !graph.contains(&candidate) {
            return candidate;
        }
    }
    // Tiny graphs can exhaust false candidates; accept a possibly-true
    // corruption after the attempt cap.
    candidate
}

/// Train an embedding model on the graph. See [`train_with_progress`]
/// for per-epoch loss reporting.
pub fn train<F: Scalar>(
    graph: &TripleGraph,
    scorer: ScorerKind,
    dim: usize,
    cfg: &TrainConfig,
) -> Result<EmbeddingModel<F>, KgeError> {
    train_with_progress(graph, scorer, dim, cfg, |_, _| {})
}

/// Train, invoking `progress(epoch, mean_loss)` after every epoch.
/// Epochs are numbered from 1.
pub fn train_with_progress<F: Scalar>(
    graph: &TripleGraph,
    scorer: ScorerKind,
    dim: usize,
    cfg: &TrainConfig,
    mut progress: impl FnMut(usize, f64),
) -> Result<EmbeddingModel<F>, KgeError> {
    cfg.validate()?;
    if dim == 0 {
        return Err(KgeError::InvalidConfig("dimension must be >= 1".into()));
    }
    if graph.is_empty() {
        return Err(KgeError::EmptyGraph);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let width = scorer.row_width(dim);
    let entity_count = graph.entity_count();
    let relation_count = graph.relation_count();
    let mut init = |count: usize| -> Vec<F> {
        (0..count)
            .map(|_| F::scalar_from(rng.random_range(-cfg.init_scale..cfg.init_scale)))
            .collect()
    };
    let entity_params = init(entity_count * width);
    let relation_params = init(relation_count * width);
    let mut model = EmbeddingModel::from_params(
        scorer,
        dim,
        graph.entities().to_vec(),
        graph.relations().to_vec(),
        entity_params,
        relation_params,
    )?;

    let positives: Vec<Triple> = graph.triples().copied().collect();
    let mut adam = Adam::<F>::new(model.entity_params().len(), model.relation_params().len());
    let lr = F::scalar_from(cfg.learning_rate);

    let mut order: Vec<usize> = (0..positives.len()).collect();
    let mut batch: Vec<LabeledTriple> = Vec::new();
    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0f64;
        let mut epoch_items = 0usize;
        for chunk in order.chunks(cfg.batch_size) {
            batch.clear();
            for &idx in chunk {
                let positive = positives[idx];
                batch.push(LabeledTriple {
                    head: positive.head,
                    relation: positive.relation,
                    tail: positive.tail,
                    positive: true,
                });
                for _ in 0..cfg.negatives_per_positive {
                    let negative = sample_negative(positive, entity_count, graph, &mut rng);
                    batch.push(LabeledTriple {
                        head: negative.head,
                        relation: negative.relation,
                        tail: negative.tail,
                        positive: false,
                    });
                }
            }
            let (loss, grads) = loss_and_grad(&model, &batch)?;
            let loss = loss.into_f64();
            if !loss.is_finite() {
                return Err(KgeError::NonFinite {
                    what: "loss",
                    epoch,
                });
            }
            match cfg.optimizer {
                OptimizerKind::Adam => adam.update(lr, model.params_mut(), &grads),
                OptimizerKind::Sgd => sgd_update(lr, model.params_mut(), &grads),
            }
            if model
                .entity_params()
                .iter()
                .chain(model.relation_params())
                .any(|p| !p.is_finite())
            {
                return Err(KgeError::NonFinite {
                    what: "parameters",
                    epoch,
                });
            }
            epoch_loss += loss * batch.len() as f64;
            epoch_items += batch.len();
        }
        progress(epoch, epoch_loss / epoch_items as f64);
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triples::TripleGraph;

    fn toy_graph() -> TripleGraph {
        TripleGraph::from_named_triples(vec![
            ("a", "r", "b"),
            ("b", "r", "c"),
            ("a", "s", "c"),
            ("c", "s", "a"),
        ])
    }

    #[test]
    fn zero_model_bce_is_ln2() {
        let entities = vec!["a".to_string(), "b".to_string()];
        let relations = vec!["r".to_string()];
        let model: EmbeddingModel<f64> = EmbeddingModel::from_params(
            ScorerKind::Complex,
            2,
            entities,
            relations,
            vec![0.0; 8],
            vec![0.0; 4],
        )
        .unwrap();
        let batch = vec![LabeledTriple {
            head: 0,
            relation: 0,
            tail: 1,
            positive: true,
        }];
        let (loss, _) = loss_and_grad(&model, &batch).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn duplicated_batch_keeps_mean_loss() {
        let graph = toy_graph();
        let model: EmbeddingModel<f64> =
            train(&graph, ScorerKind::Complex, 2, &TrainConfig { epochs: 3, ..Default::default() })
                .unwrap();
        let batch: Vec<LabeledTriple> = graph
            .triples()
            .map(|t| LabeledTriple {
                head: t.head,
                relation: t.relation,
                tail: t.tail,
                positive: true,
            })
            .collect();
        let mut doubled = batch.clone();
        doubled.extend(batch.iter().copied());
        let (single, _) = loss_and_grad(&model, &batch).unwrap();
        let (double, _) = loss_and_grad(&model, &doubled).unwrap();
        assert!((single - double).abs() < 1e-12);
    }

    #[test]
    fn training_is_deterministic() {
        let graph = toy_graph();
        let cfg = TrainConfig {
            epochs: 20,
            ..Default::default()
        };
        let a: EmbeddingModel<f64> = train(&graph, ScorerKind::Complex, 4, &cfg).unwrap();
        let b: EmbeddingModel<f64> = train(&graph, ScorerKind::Complex, 4, &cfg).unwrap();
        assert_eq!(a.entity_params(), b.entity_params());
        assert_eq!(a.relation_params(), b.relation_params());
        // A different seed moves the parameters.
        let c: EmbeddingModel<f64> = train(
            &graph,
            ScorerKind::Complex,
            4,
            &TrainConfig {
                seed: 7,
                ..cfg.clone()
            },
        )
        .unwrap();
        assert_ne!(a.entity_params(), c.entity_params());
    }

    #[test]
    fn empty_graph_is_rejected() {
        let graph = TripleGraph::from_named_triples(Vec::<(&str, &str, &str)>::new());
        let result: Result<EmbeddingModel<f64>, _> =
            train(&graph, ScorerKind::Complex, 4, &TrainConfig::default());
        assert!(matches!(result, Err(KgeError::EmptyGraph)));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let graph = toy_graph();
        for cfg in [
            TrainConfig { epochs: 0, ..Default::default() },
            TrainConfig { learning_rate: 0.0, ..Default::default() },
            TrainConfig { negatives_per_positive: 0, ..Default::default() },
            TrainConfig { batch_size: 0, ..Default::default() },
            TrainConfig { init_scale: 0.0, ..Default::default() },
        ] {
            let result: Result<EmbeddingModel<f64>, _> =
                train(&graph, ScorerKind::Complex, 4, &cfg);
            assert!(matches!(result, Err(KgeError::InvalidConfig(_))));
        }
        let result: Result<EmbeddingModel<f64>, _> =
            train(&graph, ScorerKind::Complex, 0, &TrainConfig::default());
        assert!(matches!(result, Err(KgeError::InvalidConfig(_))));
    }

    #[test]
    fn one_and_eight_negatives_both_converge() {
        let graph = toy_graph();
        for negatives in [1usize, 8] {
            let mut losses = Vec::new();
            let cfg = TrainConfig {
                epochs: 60,
                negatives_per_positive: negatives,
                ..Default::default()
            };
            let _: EmbeddingModel<f64> =
                train_with_progress(&graph, ScorerKind::Complex, 8, &cfg, |_, loss| {
                    losses.push(loss)
                })
                .unwrap();
            assert!(losses.iter().all(|l| l.is_finite()));
            assert!(losses.last().unwrap() < losses.first().unwrap());
        }
    }
}
