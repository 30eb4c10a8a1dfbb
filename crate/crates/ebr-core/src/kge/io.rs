//! Model persistence: a single JSON document holding the scorer
//! identity, dimension, vocabularies, parameter rows (as `f64`), and a
//! fingerprint of the training vocabulary. The encoding is deterministic,
//! so identical models serialize to identical bytes.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{EmbeddingModel, KgeError, Scalar, ScorerKind};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    scorer: String,
    dim: usize,
    entities: Vec<String>,
    relations: Vec<String>,
    entity_params: Vec<Vec<f64>>,
    relation_params: Vec<Vec<f64>>,
    vocab_fingerprint: String,
}

/// FNV-1a (64-bit) over the sorted entity names, a NUL separator, then
/// the sorted relation names, each name followed by a newline. Rendered
/// as 16 lowercase hex digits.
pub fn vocab_fingerprint(entities: &[String], relations: &[String]) -> String {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    let mut feed = |bytes: &[u8]| {
        for &b in bytes {
            hash ^= u64::from(b);
            hash = hash.wrapping_mul(PRIME);
        }
    };
    let mut sorted_entities: Vec<&String> = entities.iter().collect();
    sorted_entities.sort();
    for name in sorted_entities {
        feed(name.as_bytes());
        feed(b"\n");
    }
    feed(b"\0");
    let mut sorted_relations: Vec<&String> = relations.iter().collect();
    sorted_relations.sort();
    for name in sorted_relations {
        feed(name.as_bytes());
        feed(b"\n");
    }
    format!("{hash:016x}")
}

fn rows_to_f64<F: Scalar>(params: &[F], width: usize) -> Vec<Vec<f64>> {
    params
        .chunks(width)
        .map(|row| row.iter().map(|&p| p.into_f64()).collect())
        .collect()
}

pub fn save_model<F: Scalar>(model: &EmbeddingModel<F>, path: &Path) -> Result<(), KgeError> {
    let width = model.row_width();
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        scorer: model.scorer().to_string(),
        dim: model.dim(),
        entities: model.entities().to_vec(),
        relations: model.relations().to_vec(),
        entity_params: rows_to_f64(model.entity_params(), width),
        relation_params: rows_to_f64(model.relation_params(), width),
        vocab_fingerprint: model.vocab_fingerprint().to_string(),
    };
    let mut text = serde_json::to_string(&file).map_err(|e| KgeError::Format(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_model<F: Scalar>(path: &Path) -> Result<EmbeddingModel<F>, KgeError> {
    let text = std::fs::read_to_string(path)?;
    let file: ModelFile =
        serde_json::from_str(&text).map_err(|e| KgeError::Format(e.to_string()))?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(KgeError::VersionMismatch {
            found: file.format_version,
            expected: MODEL_FORMAT_VERSION,
        });
    }
    let scorer = ScorerKind::from_str(&file.scorer).map_err(KgeError::Format)?;
    let width = scorer.row_width(file.dim);
    let flatten = |rows: Vec<Vec<f64>>, what: &str| -> Result<Vec<F>, KgeError> {
        let mut flat = Vec::with_capacity(rows.len() * width);
        for row in &rows {
            if row.len() != width {
                return Err(KgeError::Format(format!(
                    "{what} row has {} values, expected {width}",
                    row.len()
                )));
            }
            flat.extend(row.iter().map(|&v| F::scalar_from(v)));
        }
        Ok(flat)
    };
    let entity_params = flatten(file.entity_params, "entity")?;
    let relation_params = flatten(file.relation_params, "relation")?;
    let model = EmbeddingModel::from_params(
        scorer,
        file.dim,
        file.entities,
        file.relations,
        entity_params,
        relation_params,
    )?;
    if model.vocab_fingerprint() != file.vocab_fingerprint {
        log::warn!(
            "model file fingerprint {} does not match its vocabulary ({}); the file may have been edited",
            file.vocab_fingerprint,
            model.vocab_fingerprint()
        );
    }
    Ok(model)
}
