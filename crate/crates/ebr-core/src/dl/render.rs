//! Textual rendering of concepts and axioms. Rendering is the inverse
//! of parsing: `parse_concept(render_concept(c)) == c` for every
//! expression, and `render_kb` emits documents `parse_kb` accepts.

use super::{Assertion, ConceptExpr, Gci, KnowledgeBase, RoleAxiom};

// Binding strength: disjunction < conjunction < unary < primary.
const LEVEL_OR: u8 = 0;
const LEVEL_AND: u8 = 1;
const LEVEL_UNARY: u8 = 2;
const LEVEL_PRIMARY: u8 = 3;

fn level(c: &ConceptExpr) -> u8 {
    match c {
        ConceptExpr::Disjunction(..) => LEVEL_OR,
        ConceptExpr::Conjunction(..) => LEVEL_AND,
        ConceptExpr::Negation(..)
        | ConceptExpr::Existential(..)
        | ConceptExpr::Universal(..)
        | ConceptExpr::AtLeast(..)
        | ConceptExpr::AtMost(..) => LEVEL_UNARY,
        ConceptExpr::Atomic(_)
        | ConceptExpr::Top
        | ConceptExpr::Bottom
        | ConceptExpr::Nominal(_) => LEVEL_PRIMARY,
    }
}

fn write_expr(c: &ConceptExpr, min_level: u8, out: &mut String) {
    if level(c) < min_level {
        out.push('(');
        write_expr(c, LEVEL_OR, out);
        out.push(')');
        return;
    }
    match c {
        ConceptExpr::Atomic(name) => out.push_str(name),
        ConceptExpr::Top => out.push_str("Top"),
        ConceptExpr::Bottom => out.push_str("Bottom"),
        ConceptExpr::Nominal(name) => {
            out.push('{');
            out.push_str(name);
            out.push('}');
        }
        ConceptExpr::Negation(inner) => {
            out.push_str("not ");
            write_expr(inner, LEVEL_UNARY, out);
        }
        ConceptExpr::Conjunction(l, r) => {
            write_expr(l, LEVEL_AND, out);
            out.push_str(" and ");
            write_expr(r, LEVEL_AND + 1, out);
        }
        ConceptExpr::Disjunction(l, r) => {
            write_expr(l, LEVEL_OR, out);
            out.push_str(" or ");
            write_expr(r, LEVEL_OR + 1, out);
        }
        ConceptExpr::Existential(role, filler) => {
            out.push_str(&role.to_string());
            out.push_str(" some ");
            write_expr(filler, LEVEL_UNARY, out);
        }
        ConceptExpr::Universal(role, filler) => {
            out.push_str(&role.to_string());
            out.push_str(" only ");
            write_expr(filler, LEVEL_UNARY, out);
        }
        ConceptExpr::AtLeast(n, role, filler) => {
            out.push_str(&role.to_string());
            out.push_str(&format!(" min {n} "));
            write_expr(filler, LEVEL_UNARY, out);
        }
        ConceptExpr::AtMost(n, role, filler) => {
            out.push_str(&role.to_string());
            out.push_str(&format!(" max {n} "));
            write_expr(filler, LEVEL_UNARY, out);
        }
    }
}

/// Render a concept in the infix grammar, with the minimal parentheses
/// needed for an exact parse round-trip.
pub fn render_concept(c: &ConceptExpr) -> String {
    let mut out = String::new();
    write_expr(c, LEVEL_OR, &mut out);
    out
}

/// A concept in axiom-argument position: atomic-like concepts are bare,
/// anything else is wrapped in parentheses.
fn render_axiom_concept(c: &ConceptExpr) -> String {
    if level(c) == LEVEL_PRIMARY {
        render_concept(c)
    } else {
        format!("({})", render_concept(c))
    }
}

pub fn render_gci(gci: &Gci) -> String {
    format!(
        "SubClassOf({} {})",
        render_axiom_concept(&gci.sub),
        render_axiom_concept(&gci.sup)
    )
}

pub fn render_role_axiom(axiom: &RoleAxiom) -> String {
    match axiom {
        RoleAxiom::SubRoleOf { sub, sup } => format!("SubObjectPropertyOf({sub} {sup})"),
        RoleAxiom::Transitive(r) => format!("TransitiveObjectProperty({r})"),
        RoleAxiom::Functional(r) => format!("FunctionalObjectProperty({r})"),
    }
}

pub fn render_assertion(assertion: &Assertion) -> String {
    match assertion {
        Assertion::Class {
            concept,
            individual,
        } => format!(
            "ClassAssertion({} {individual})",
            render_axiom_concept(concept)
        ),
        Assertion::Role {
            role,
            subject,
            object,
        } => format!("ObjectPropertyAssertion({role} {subject} {object})"),
    }
}

/// Serialize a knowledge base to `.dl` text: TBox, then RBox, then ABox,
/// in stored order. Parsing the result yields the same axiom multiset.
pub fn render_kb(kb: &KnowledgeBase) -> String {
    let mut lines = Vec::new();
    lines.extend(kb.tbox.iter().map(render_gci));
    lines.extend(kb.rbox.iter().map(render_role_axiom));
    lines.extend(kb.abox.iter().map(render_assertion));
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}
