//! Property tests for the textual surfaces: concept render/parse,
//! knowledge-base render/parse, and N-Triples export/import.

use proptest::prelude::*;

use ebr_core::dl::{parse_concept, parse_kb, render_concept, render_kb, ConceptExpr, RoleExpr};
use ebr_core::triples::{export_ntriples, import_ntriples, TripleGraph};

fn name_strategy() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["Alpha", "Beta", "Gamma", "Delta"]).prop_map(str::to_string)
}

fn role_strategy() -> impl Strategy<Value = RoleExpr> {
    prop_oneof![
        prop::sample::select(vec!["r", "s", "t"]).prop_map(|n| RoleExpr::atomic(n)),
        prop::sample::select(vec!["r", "s", "t"]).prop_map(|n| RoleExpr::inverse(n)),
        Just(RoleExpr::Universal),
    ]
}

fn concept_strategy() -> impl Strategy<Value = ConceptExpr> {
    let leaf = prop_oneof![
        name_strategy().prop_map(ConceptExpr::Atomic),
        Just(ConceptExpr::Top),
        Just(ConceptExpr::Bottom),
        prop::sample::select(vec!["ada", "bob", "cyd"])
            .prop_map(|n| ConceptExpr::nominal(n)),
    ];
    leaf.prop_recursive(4, 64, 4, |inner| {
        prop_oneof![
            inner.clone().prop_map(|c| c.negation()),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
            (role_strategy(), inner.clone())
                .prop_map(|(role, c)| ConceptExpr::some(role, c)),
            (role_strategy(), inner.clone())
                .prop_map(|(role, c)| ConceptExpr::only(role, c)),
            (0u32..5, role_strategy(), inner.clone())
                .prop_map(|(n, role, c)| ConceptExpr::at_least(n, role, c)),
            (0u32..5, role_strategy(), inner)
                .prop_map(|(n, role, c)| ConceptExpr::at_most(n, role, c)),
        ]
    })
}

proptest! {
    #[test]
    fn concept_render_parse_round_trip(concept in concept_strategy()) {
        let text = render_concept(&concept);
        let reparsed = parse_concept(&text)
            .unwrap_or_else(|e| panic!("`{text}` failed to reparse: {e}"));
        prop_assert_eq!(reparsed, concept);
    }

    #[test]
    fn ntriples_round_trip(
        triples in prop::collection::btree_set(
            (
                prop::sample::select(vec!["a", "b", "c", "d", "Klass"]),
                prop::sample::select(vec!["r", "s", "rdf:type", "rdfs:subClassOf"]),
                prop::sample::select(vec!["a", "b", "c", "d", "Klass"]),
            ),
            0..12,
        )
    ) {
        let graph = TripleGraph::from_named_triples(
            triples.iter().map(|(h, r, t)| (*h, *r, *t)),
        );
        let text = export_ntriples(&graph, "http://example.org/kb");
        let back = import_ntriples(&text).unwrap();
        prop_assert_eq!(back, graph);
    }
}

#[test]
fn fixed_corpus_precedence() {
    for (text, expected) in [
        (
            "A and B or C",
            ConceptExpr::atomic("A")
                .and(ConceptExpr::atomic("B"))
                .or(ConceptExpr::atomic("C")),
        ),
        (
            "A or B and C",
            ConceptExpr::atomic("A")
                .or(ConceptExpr::atomic("B").and(ConceptExpr::atomic("C"))),
        ),
        (
            "not A and B",
            ConceptExpr::atomic("A").negation().and(ConceptExpr::atomic("B")),
        ),
        (
            "r some A and B",
            ConceptExpr::some(RoleExpr::atomic("r"), ConceptExpr::atomic("A"))
                .and(ConceptExpr::atomic("B")),
        ),
        (
            "r some s only A",
            ConceptExpr::some(
                RoleExpr::atomic("r"),
                ConceptExpr::only(RoleExpr::atomic("s"), ConceptExpr::atomic("A")),
            ),
        ),
        (
            "not r min 2 A or B",
            ConceptExpr::at_least(2, RoleExpr::atomic("r"), ConceptExpr::atomic("A"))
                .negation()
                .or(ConceptExpr::atomic("B")),
        ),
    ] {
        assert_eq!(parse_concept(text).unwrap(), expected, "{text}");
    }
}

#[test]
fn kb_document_round_trip() {
    let doc = "\
SubClassOf(Father Male)
SubClassOf((Male and Female) Bottom)
SubObjectPropertyOf(hasChild hasDescendant)
TransitiveObjectProperty(hasDescendant)
FunctionalObjectProperty(married)
ClassAssertion(Person ada)
ClassAssertion((hasChild some Person) bob)
ClassAssertion(({ada}) cyd)
ObjectPropertyAssertion(hasChild ada bob)
";
    let kb = parse_kb(doc).unwrap();
    let rendered = render_kb(&kb);
    assert_eq!(parse_kb(&rendered).unwrap(), kb);
    assert_eq!(rendered, doc.replace("({ada})", "{ada}"));
}
