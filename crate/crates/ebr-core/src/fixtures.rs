//! Bundled desk-scale knowledge bases, embedded from `fixtures/*.dl`
//! and used by tests, the acceptance suite, and CLI examples.

use thiserror::Error;

use crate::dl::{parse_kb, DlError, KnowledgeBase};

pub const FATHER: &str = "father";
pub const FAMILY_SMALL: &str = "family-small";
pub const INCONSISTENT_ABC: &str = "inconsistent-abc";
pub const INCOMPLETE_KNOWS: &str = "incomplete-knows";

pub const FIXTURE_NAMES: [&str; 4] = [FATHER, FAMILY_SMALL, INCONSISTENT_ABC, INCOMPLETE_KNOWS];

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("unknown fixture `{0}` (expected one of: father, family-small, inconsistent-abc, incomplete-knows)")]
    Unknown(String),
    #[error(transparent)]
    Parse(#[from] DlError),
}

/// The raw `.dl` text of a bundled fixture.
pub fn fixture_text(name: &str) -> Result<&'static str, FixtureError> {
    match name {
        FATHER => Ok(include_str!("../fixtures/father.dl")),
        FAMILY_SMALL => Ok(include_str!("../fixtures/family-small.dl")),
        INCONSISTENT_ABC => Ok(include_str!("../fixtures/inconsistent-abc.dl")),
        INCOMPLETE_KNOWS => Ok(include_str!("../fixtures/incomplete-knows.dl")),
        other => Err(FixtureError::Unknown(other.to_string())),
    }
}

/// Parse a bundled fixture by name.
pub fn load_fixture(name: &str) -> Result<KnowledgeBase, FixtureError> {
    Ok(parse_kb(fixture_text(name)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dl::parse_concept;
    use crate::oracle::{materialize, oracle_retrieve};

    #[test]
    fn unknown_fixture_is_an_error() {
        assert!(matches!(
            load_fixture("nope"),
            Err(FixtureError::Unknown(_))
        ));
    }

    #[test]
    fn father_statistics() {
        let kb = load_fixture(FATHER).unwrap();
        assert_eq!(kb.signature.individuals.len(), 6);
        assert_eq!(kb.signature.concepts.len(), 4);
        assert_eq!(kb.signature.roles.len(), 1);
        assert_eq!(kb.tbox.len(), 3);
        assert_eq!(kb.abox.len(), 4);
        // Father ⊑ Male ⊑ Person closes over two steps.
        let mkb = materialize(&kb);
        assert!(mkb.entails_member("Person", "stefan"));
        assert!(mkb.clashes().is_empty());
    }

    #[test]
    fn family_small_statistics() {
        let kb = load_fixture(FAMILY_SMALL).unwrap();
        assert_eq!(kb.signature.individuals.len(), 40);
        assert_eq!(kb.signature.concepts.len(), 10);
        assert_eq!(kb.signature.roles.len(), 4);
        let mkb = materialize(&kb);
        assert!(mkb.clashes().is_empty());
        for concept in &kb.signature.concepts {
            assert!(
                !mkb.members(concept).unwrap().is_empty(),
                "{concept} has an empty extension"
            );
        }
    }

    #[test]
    fn family_small_abox_is_closure_complete() {
        // Materialization derives nothing beyond the asserted facts, so
        // the triple graph seen by the trainer carries the full ground
        // truth.
        let kb = load_fixture(FAMILY_SMALL).unwrap();
        let mkb = materialize(&kb);
        let mut asserted_memberships = 0;
        let mut asserted_pairs = 0;
        for assertion in &kb.abox {
            match assertion {
                crate::dl::Assertion::Class { .. } => asserted_memberships += 1,
                crate::dl::Assertion::Role { .. } => asserted_pairs += 1,
            }
        }
        let derived_memberships: usize =
            mkb.memberships().values().map(|s| s.len()).sum();
        let derived_pairs: usize = mkb.role_extensions().values().map(|s| s.len()).sum();
        assert_eq!(derived_memberships, asserted_memberships);
        assert_eq!(derived_pairs, asserted_pairs);
    }

    #[test]
    fn inconsistent_abc_has_exactly_one_disjointness_clash() {
        let kb = load_fixture(INCONSISTENT_ABC).unwrap();
        let mkb = materialize(&kb);
        assert_eq!(mkb.clashes().len(), 1);
        assert_eq!(mkb.clashes()[0].kind(), "disjointness");
    }

    #[test]
    fn incomplete_knows_misses_joe() {
        let kb = load_fixture(INCOMPLETE_KNOWS).unwrap();
        let mkb = materialize(&kb);
        let ext = oracle_retrieve(&parse_concept("Person").unwrap(), &mkb, false).unwrap();
        let names: Vec<&str> = ext.iter().map(String::as_str).collect();
        assert_eq!(names, vec!["Ani", "Bob", "Paul"]);
    }

    #[test]
    fn every_fixture_parses_extracts_and_materializes() {
        for name in FIXTURE_NAMES {
            let kb = load_fixture(name).unwrap();
            let graph = crate::triples::extract_triples(&kb);
            assert!(graph.entity_count() > 0, "{name}");
            materialize(&kb);
        }
    }
}
