//! End-to-end training quality on the bundled family fixture: exhaustive
//! AUC over every candidate triple, and the per-epoch loss trend.

use ebr_core::fixtures::{load_fixture, FAMILY_SMALL};
use ebr_core::kge::{train_with_progress, ScorerKind, TrainConfig};
use ebr_core::triples::{extract_triples, Triple};
use ebr_core::Model;

#[test]
fn complex_d32_separates_positives_exhaustively() {
    let kb = load_fixture(FAMILY_SMALL).unwrap();
    let graph = extract_triples(&kb);
    let mut losses = Vec::new();
    let model: Model = train_with_progress(
        &graph,
        ScorerKind::Complex,
        32,
        &TrainConfig::default(),
        |_, loss| losses.push(loss),
    )
    .unwrap();

    // Mean loss decreases over any 25-epoch window (soft check: a small
    // slack absorbs plateau oscillation).
    assert_eq!(losses.len(), 256);
    for i in 0..losses.len() - 25 {
        assert!(
            losses[i + 25] <= losses[i] + 0.02,
            "loss rose over window starting at epoch {i}: {} -> {}",
            losses[i],
            losses[i + 25]
        );
    }

    // Exhaustive scoring of every |E|²·|R| candidate triple.
    let mut positive_scores = Vec::new();
    let mut negative_scores = Vec::new();
    for h in 0..graph.entity_count() {
        for r in 0..graph.relation_count() {
            let scores = model.score_all_tails(h, r).unwrap();
            for (t, &s) in scores.iter().enumerate() {
                if graph.contains(&Triple { head: h, relation: r, tail: t }) {
                    positive_scores.push(s);
                } else {
                    negative_scores.push(s);
                }
            }
        }
    }
    let mut above = 0usize;
    let mut ties = 0usize;
    for &p in &positive_scores {
        for &n in &negative_scores {
            if p > n {
                above += 1;
            } else if p == n {
                ties += 1;
            }
        }
    }
    let auc = (above as f64 + 0.5 * ties as f64)
        / (positive_scores.len() as f64 * negative_scores.len() as f64);
    println!(
        "AUC {auc:.4} over {} positives / {} negatives",
        positive_scores.len(),
        negative_scores.len()
    );
    assert!(auc > 0.95, "AUC {auc}");

    // Every asserted triple scores above the mean non-asserted score.
    let negative_mean: f64 =
        negative_scores.iter().sum::<f64>() / negative_scores.len() as f64;
    let min_positive = positive_scores.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(
        min_positive > negative_mean,
        "min positive {min_positive} vs negative mean {negative_mean}"
    );
}
