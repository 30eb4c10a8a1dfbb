//! Robustness tooling: seeded KB corruption (noise injection and axiom
//! removal), random concept sampling stratified over the constructor
//! classes, Jaccard scoring, and a benchmark runner that compares neural
//! retrieval against the symbolic ground truth and emits a CSV report.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dl::{
    constructor_class, non_simple_cardinality_roles, render_concept, Assertion, ConceptExpr,
    ConstructorClass, DlError, KnowledgeBase, RoleExpr, Signature,
};
use crate::oracle::{materialize, oracle_retrieve, MaterializedKB, OracleError};
use crate::reasoner::{retrieve, NeuralDomain, Predictor, RetrieveError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("ratio must lie in [0, 1], got {0}")]
    InvalidRatio(f64),
    #[error("corruption spec mode does not match the requested operation ({0})")]
    ModeMismatch(&'static str),
    #[error("candidate space exhausted after {0} rejected draws; the knowledge base is saturated")]
    ExhaustedCandidates(usize),
    #[error("degenerate signature: {0}")]
    DegenerateSignature(String),
    #[error(transparent)]
    Retrieve(#[from] RetrieveError),
    #[error(transparent)]
    Name(#[from] DlError),
}

/// Jaccard similarity `|a ∩ b| / |a ∪ b|`, defined as 1 when both sets
/// are empty.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let intersection = a.intersection(b).count();
    let union = a.union(b).count();
    intersection as f64 / union as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorruptionMode {
    Noise,
    Remove,
}

/// How to corrupt a knowledge base: the mode, the fraction ν of the ABox
/// to touch, and the RNG seed.
#[derive(Debug, Clone)]
pub struct CorruptionSpec {
    pub mode: CorruptionMode,
    pub ratio: f64,
    pub seed: u64,
}

impl CorruptionSpec {
    fn validate(&self) -> Result<(), HarnessError> {
        if !(0.0..=1.0).contains(&self.ratio) || self.ratio.is_nan() {
            return Err(HarnessError::InvalidRatio(self.ratio));
        }
        Ok(())
    }
}

/// Half-away-from-zero rounding of `ratio · count`.
fn scaled_count(ratio: f64, count: usize) -> usize {
    (ratio * count as f64).round() as usize
}

const MAX_REJECTED_DRAWS: usize = 10_000;

/// Add `round(ν·|ABox|)` assertions sampled uniformly from all atomic
/// class assertions and all role assertions over the signature,
/// rejecting anything the clean KB's materialization already entails
/// (such candidates would not be false) and anything already injected.
/// TBox, RBox, and signature are untouched.
pub fn inject_noise(
    kb: &KnowledgeBase,
    spec: &CorruptionSpec,
) -> Result<KnowledgeBase, HarnessError> {
    if spec.mode != CorruptionMode::Noise {
        return Err(HarnessError::ModeMismatch("expected noise mode"));
    }
    spec.validate()?;
    let additions = scaled_count(spec.ratio, kb.abox.len());
    let mut result = kb.clone();
    if additions == 0 {
        return Ok(result);
    }
    let mkb = materialize(kb);
    let concepts: Vec<&String> = kb.signature.concepts.iter().collect();
    let individuals: Vec<&String> = kb.signature.individuals.iter().collect();
    let roles: Vec<&String> = kb.signature.roles.iter().collect();
    let class_space = concepts.len() * individuals.len();
    let property_space = roles.len() * individuals.len() * individuals.len();
    let total = class_space + property_space;
    if total == 0 {
        return Err(HarnessError::ExhaustedCandidates(0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut taken: HashSet<usize> = HashSet::new();
    let mut rejected = 0usize;
    while taken.len() < additions {
        if rejected >= MAX_REJECTED_DRAWS {
            return Err(HarnessError::ExhaustedCandidates(rejected));
        }
        let draw = rng.random_range(0..total);
        if taken.contains(&draw) {
            rejected += 1;
            continue;
        }
        let (assertion, entailed) = if draw < class_space {
            let concept = concepts[draw / individuals.len()];
            let individual = individuals[draw % individuals.len()];
            (
                Assertion::Class {
                    concept: ConceptExpr::atomic(concept.clone()),
                    individual: individual.clone(),
                },
                mkb.entails_member(concept, individual),
            )
        } else {
            let v = draw - class_space;
            let per_role = individuals.len() * individuals.len();
            let role = roles[v / per_role];
            let rest = v % per_role;
            let subject = individuals[rest / individuals.len()];
            let object = individuals[rest % individuals.len()];
            (
                Assertion::Role {
                    role: role.clone(),
                    subject: subject.clone(),
                    object: object.clone(),
                },
                mkb.entails_pair(role, subject, object),
            )
        };
        if entailed {
            rejected += 1;
            continue;
        }
        taken.insert(draw);
        result.abox.push(assertion);
    }
    Ok(result)
}

/// Remove `round(ν·|ABox|)` assertions uniformly without replacement.
/// TBox and RBox are untouched, and the signature keeps every original
/// name so retrieval domains stay stable under corruption.
pub fn remove_axioms(
    kb: &KnowledgeBase,
    spec: &CorruptionSpec,
) -> Result<KnowledgeBase, HarnessError> {
    if spec.mode != CorruptionMode::Remove {
        return Err(HarnessError::ModeMismatch("expected remove mode"));
    }
    spec.validate()?;
    let mut removals = scaled_count(spec.ratio, kb.abox.len());
    if removals > kb.abox.len() {
        log::warn!(
            "requested {removals} removals from an ABox of {}; clamping",
            kb.abox.len()
        );
        removals = kb.abox.len();
    }
    let mut result = kb.clone();
    if removals == 0 {
        return Ok(result);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut indices = rand::seq::index::sample(&mut rng, kb.abox.len(), removals).into_vec();
    indices.sort_unstable_by(|a, b| b.cmp(a));
    for idx in indices {
        result.abox.remove(idx);
    }
    Ok(result)
}

/// How many concepts to sample, how deep they may nest, and the seed.
#[derive(Debug, Clone)]
pub struct SampleSpec {
    pub count: usize,
    pub max_depth: usize,
    pub seed: u64,
}

const ROOT_CLASSES: [ConstructorClass; 9] = [
    ConstructorClass::Atomic,
    ConstructorClass::Negation,
    ConstructorClass::Conjunction,
    ConstructorClass::Disjunction,
    ConstructorClass::Existential,
    ConstructorClass::Universal,
    ConstructorClass::MinRestriction,
    ConstructorClass::MaxRestriction,
    ConstructorClass::Nominal,
];

const RESAMPLE_ATTEMPTS: usize = 20;

struct ConceptSampler<'a> {
    concepts: Vec<&'a String>,
    roles: Vec<&'a String>,
    individuals: Vec<&'a String>,
    rng: ChaCha8Rng,
}

impl<'a> ConceptSampler<'a> {
    fn concept_name(&mut self) -> String {
        self.concepts[self.rng.random_range(0..self.concepts.len())].clone()
    }

    fn individual_name(&mut self) -> String {
        self.individuals[self.rng.random_range(0..self.individuals.len())].clone()
    }

    fn role(&mut self) -> RoleExpr {
        let name = self.roles[self.rng.random_range(0..self.roles.len())].clone();
        if self.rng.random_range(0..4) == 3 {
            RoleExpr::Inverse(name)
        } else {
            RoleExpr::Atomic(name)
        }
    }

    fn leaf(&mut self) -> ConceptExpr {
        if self.rng.random_range(0..20) == 0 {
            ConceptExpr::Nominal(self.individual_name())
        } else {
            ConceptExpr::Atomic(self.concept_name())
        }
    }

    fn generate(&mut self, budget: usize) -> ConceptExpr {
        if budget == 0 {
            return self.leaf();
        }
        let class = ROOT_CLASSES[self.rng.random_range(0..ROOT_CLASSES.len())];
        self.generate_class(class, budget)
    }

    fn generate_class(&mut self, class: ConstructorClass, budget: usize) -> ConceptExpr {
        let child_budget = budget.saturating_sub(1);
        match class {
            ConstructorClass::Atomic => ConceptExpr::Atomic(self.concept_name()),
            ConstructorClass::Nominal => ConceptExpr::Nominal(self.individual_name()),
            ConstructorClass::Negation => self.generate(child_budget).negation(),
            ConstructorClass::Conjunction => {
                self.generate(child_budget).and(self.generate(child_budget))
            }
            ConstructorClass::Disjunction => {
                self.generate(child_budget).or(self.generate(child_budget))
            }
            ConstructorClass::Existential => {
                ConceptExpr::some(self.role(), self.generate(child_budget))
            }
            ConstructorClass::Universal => {
                ConceptExpr::only(self.role(), self.generate(child_budget))
            }
            ConstructorClass::MinRestriction => {
                let n = self.rng.random_range(1..=3);
                ConceptExpr::at_least(n, self.role(), self.generate(child_budget))
            }
            ConstructorClass::MaxRestriction => {
                let n = self.rng.random_range(1..=3);
                ConceptExpr::at_most(n, self.role(), self.generate(child_budget))
            }
            ConstructorClass::Top | ConstructorClass::Bottom => {
                unreachable!("Top/Bottom are never sampled at a constructor root")
            }
        }
    }
}

/// Draw `spec.count` concept expressions, cycling the root constructor
/// through the nine benchmark classes so every class is covered evenly.
/// Trivial candidates, whose oracle extension over `mkb` is empty or the
/// whole individual set (either way one side of the complement is
/// everything), are resampled up to 20 times, then kept.
pub fn sample_concepts(
    sig: &Signature,
    mkb: &MaterializedKB,
    spec: &SampleSpec,
) -> Result<Vec<ConceptExpr>, HarnessError> {
    if sig.concepts.is_empty() || sig.roles.is_empty() || sig.individuals.is_empty() {
        return Err(HarnessError::DegenerateSignature(
            "concept sampling needs at least one concept, role, and individual name".into(),
        ));
    }
    if spec.max_depth == 0 {
        return Err(HarnessError::DegenerateSignature(
            "max depth must be at least 1".into(),
        ));
    }
    let mut sampler = ConceptSampler {
        concepts: sig.concepts.iter().collect(),
        roles: sig.roles.iter().collect(),
        individuals: sig.individuals.iter().collect(),
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
    };
    let domain_size = mkb.individuals().len();
    let mut out = Vec::with_capacity(spec.count);
    for i in 0..spec.count {
        let class = ROOT_CLASSES[i % ROOT_CLASSES.len()];
        let mut candidate = sampler.generate_class(class, spec.max_depth);
        for _ in 0..RESAMPLE_ATTEMPTS {
            let size = oracle_extension(&candidate, mkb)?.len();
            if size > 0 && size < domain_size {
                break;
            }
            candidate = sampler.generate_class(class, spec.max_depth);
        }
        out.push(candidate);
    }
    Ok(out)
}

fn oracle_extension(
    c: &ConceptExpr,
    mkb: &MaterializedKB,
) -> Result<BTreeSet<String>, HarnessError> {
    match oracle_retrieve(c, mkb, false) {
        Ok(set) => Ok(set),
        Err(OracleError::Name(e)) => Err(HarnessError::Name(e)),
        Err(OracleError::Inconsistent(_)) => {
            unreachable!("non-strict oracle retrieval never refuses")
        }
    }
}

/// One benchmark row: the concept, its constructor class, the oracle and
/// neural extension sizes, their Jaccard similarity, and the neural
/// retrieval's wall-clock time. `oracle_size`/`jaccard` are `None` when
/// the strict oracle refused the (inconsistent) ground-truth KB.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub concept: String,
    pub class: ConstructorClass,
    pub oracle_size: Option<usize>,
    pub neural_size: usize,
    pub jaccard: Option<f64>,
    pub millis: f64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    /// Mean Jaccard per constructor class over the scored rows, as
    /// `(class, scored-row count, mean)`.
    pub fn per_class(&self) -> Vec<(ConstructorClass, usize, f64)> {
        let mut sums: BTreeMap<ConstructorClass, (usize, f64)> = BTreeMap::new();
        for row in &self.rows {
            if let Some(j) = row.jaccard {
                let entry = sums.entry(row.class).or_insert((0, 0.0));
                entry.0 += 1;
                entry.1 += j;
            }
        }
        sums.into_iter()
            .map(|(class, (n, sum))| (class, n, sum / n as f64))
            .collect()
    }

    /// Mean Jaccard over all scored rows; `None` when every row was
    /// refused.
    pub fn overall_mean(&self) -> Option<f64> {
        let scored: Vec<f64> = self.rows.iter().filter_map(|r| r.jaccard).collect();
        if scored.is_empty() {
            None
        } else {
            Some(scored.iter().sum::<f64>() / scored.len() as f64)
        }
    }

    /// Mean Jaccard over the scored rows of one constructor class.
    pub fn class_mean(&self, class: ConstructorClass) -> Option<f64> {
        self.per_class()
            .into_iter()
            .find(|(c, _, _)| *c == class)
            .map(|(_, _, mean)| mean)
    }

    /// Render the report as CSV: one row per concept, then the per-class
    /// and overall aggregates as `#agg,` comment lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("concept,class,oracle_size,neural_size,jaccard,millis\n");
        for row in &self.rows {
            let oracle = row
                .oracle_size
                .map(|n| n.to_string())
                .unwrap_or_else(|| "refused".into());
            let jaccard = row
                .jaccard
                .map(|j| format!("{j:.6}"))
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{:.3}\n",
                csv_field(&row.concept),
                row.class,
                oracle,
                row.neural_size,
                jaccard,
                row.millis
            ));
        }
        for (class, n, mean) in self.per_class() {
            out.push_str(&format!("#agg,{class},{n},{mean:.6}\n"));
        }
        if let Some(mean) = self.overall_mean() {
            let n = self.rows.iter().filter(|r| r.jaccard.is_some()).count();
            out.push_str(&format!("#agg,overall,{n},{mean:.6}\n"));
        }
        out
    }
}

fn csv_field(text: &str) -> String {
    if text.contains(',') || text.contains('"') || text.contains('\n') {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// Benchmark options. `clean_kb` supplies the uncorrupted KB whose
/// materialization serves as ground truth when `kb` itself is corrupted;
/// without it the ground truth is `kb`'s own materialization.
pub struct BenchOptions<'a> {
    pub gamma: f64,
    pub sample: SampleSpec,
    pub strict_oracle: bool,
    pub clean_kb: Option<&'a KnowledgeBase>,
}

/// Sample concepts, retrieve each with both the ground-truth oracle and
/// the neural evaluator, and score the agreement.
pub fn run_benchmark(
    kb: &KnowledgeBase,
    predictor: &dyn Predictor,
    opts: &BenchOptions,
) -> Result<BenchReport, HarnessError> {
    let clean = opts.clean_kb.unwrap_or(kb);
    let mkb = materialize(clean);
    let concepts = sample_concepts(&kb.signature, &mkb, &opts.sample)?;
    let dom = NeuralDomain::new(
        kb.signature.individuals.iter().cloned().collect(),
        opts.gamma,
    )?;
    let mut warned: BTreeSet<String> = BTreeSet::new();
    let mut rows = Vec::with_capacity(concepts.len());
    for concept in &concepts {
        for role in non_simple_cardinality_roles(concept, kb) {
            if warned.insert(role.clone()) {
                log::warn!(
                    "role `{role}` is not simple but appears in a cardinality restriction; \
                     retrieval proceeds"
                );
            }
        }
        let oracle_result = match oracle_retrieve(concept, &mkb, opts.strict_oracle) {
            Ok(set) => Some(set),
            Err(OracleError::Inconsistent(_)) => None,
            Err(OracleError::Name(e)) => return Err(HarnessError::Name(e)),
        };
        let start = Instant::now();
        let neural = retrieve(concept, predictor, &dom)?;
        let millis = start.elapsed().as_secs_f64() * 1e3;
        let jaccard_value = oracle_result.as_ref().map(|oracle| jaccard(&neural, oracle));
        rows.push(BenchRow {
            concept: render_concept(concept),
            class: constructor_class(concept),
            oracle_size: oracle_result.map(|s| s.len()),
            neural_size: neural.len(),
            jaccard: jaccard_value,
            millis,
        });
    }
    Ok(BenchReport { rows })
}
