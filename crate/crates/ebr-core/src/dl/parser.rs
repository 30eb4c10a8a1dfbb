//! Lexer and recursive-descent parser for concept expressions and the
//! line-based `.dl` knowledge-base format.
//!
//! Concept grammar (binding strength increases downward):
//!
//! ```text
//! or-expr     := and-expr ("or" and-expr)*
//! and-expr    := unary ("and" unary)*
//! unary       := "not" unary | restriction | primary
//! restriction := role ("some" | "only") unary
//!              | role ("min" | "max") INT unary
//! role        := NAME | "inverse" "(" role ")" | "U"
//! primary     := NAME | "Top" | "Bottom" | "{" NAME "}" | "(" or-expr ")"
//! ```
//!
//! Names are `[A-Za-z_][A-Za-z0-9_]*`; the keywords `not and or some only
//! min max inverse Top Bottom U` are reserved. Nested `inverse(...)` is
//! accepted and normalized: an even number of inversions yields the
//! atomic role.

use super::{
    Assertion, ConceptExpr, DlError, Gci, KnowledgeBase, NameKind, RoleAxiom, RoleExpr, Signature,
};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Int(u32),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Not,
    And,
    Or,
    Some,
    Only,
    Min,
    Max,
    Inverse,
    Top,
    Bottom,
    UniversalRole,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("name `{n}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Not => "`not`".into(),
            Tok::And => "`and`".into(),
            Tok::Or => "`or`".into(),
            Tok::Some => "`some`".into(),
            Tok::Only => "`only`".into(),
            Tok::Min => "`min`".into(),
            Tok::Max => "`max`".into(),
            Tok::Inverse => "`inverse`".into(),
            Tok::Top => "`Top`".into(),
            Tok::Bottom => "`Bottom`".into(),
            Tok::UniversalRole => "`U`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> DlError {
    DlError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

struct LexOutput {
    tokens: Vec<Token>,
    end_line: usize,
    end_col: usize,
}

fn lex(text: &str, start_line: usize) -> Result<LexOutput, DlError> {
    let mut tokens = Vec::new();
    let mut line = start_line;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        let tok_line = line;
        let tok_col = col;
        let tok = match c {
            '(' => {
                chars.next();
                col += 1;
                Tok::LParen
            }
            ')' => {
                chars.next();
                col += 1;
                Tok::RParen
            }
            '{' => {
                chars.next();
                col += 1;
                Tok::LBrace
            }
            '}' => {
                chars.next();
                col += 1;
                Tok::RBrace
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let value: u32 = digits.parse().map_err(|_| {
                    syntax(tok_line, tok_col, format!("cardinality `{digits}` too large"))
                })?;
                Tok::Int(value)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        word.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                match word.as_str() {
                    "not" => Tok::Not,
                    "and" => Tok::And,
                    "or" => Tok::Or,
                    "some" => Tok::Some,
                    "only" => Tok::Only,
                    "min" => Tok::Min,
                    "max" => Tok::Max,
                    "inverse" => Tok::Inverse,
                    "Top" => Tok::Top,
                    "Bottom" => Tok::Bottom,
                    "U" => Tok::UniversalRole,
                    _ => Tok::Name(word),
                }
            }
            other => {
                return Err(syntax(
                    tok_line,
                    tok_col,
                    format!("unexpected character `{other}`"),
                ))
            }
        };
        tokens.push(Token {
            tok,
            line: tok_line,
            col: tok_col,
        });
    }
    Ok(LexOutput {
        tokens,
        end_line: line,
        end_col: col,
    })
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end_line: usize,
    end_col: usize,
}

impl Parser {
    fn new(lexed: LexOutput) -> Self {
        Parser {
            tokens: lexed.tokens,
            pos: 0,
            end_line: lexed.end_line,
            end_col: lexed.end_col,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn next(&mut self) -> Option<Token> {
        let token = self.tokens.get(self.pos).cloned();
        if token.is_some() {
            self.pos += 1;
        }
        token
    }

    fn expect(&mut self, want: Tok) -> Result<(), DlError> {
        let (line, col) = self.here();
        match self.next() {
            Some(t) if t.tok == want => Ok(()),
            Some(t) => Err(syntax(
                t.line,
                t.col,
                format!("expected {}, found {}", want.describe(), t.tok.describe()),
            )),
            None => Err(syntax(
                line,
                col,
                format!("expected {}, found end of input", want.describe()),
            )),
        }
    }

    fn expect_name(&mut self, what: &str) -> Result<String, DlError> {
        let (line, col) = self.here();
        match self.next() {
            Some(Token {
                tok: Tok::Name(n), ..
            }) => Ok(n),
            Some(t) => Err(syntax(
                t.line,
                t.col,
                format!("expected {what}, found {}", t.tok.describe()),
            )),
            None => Err(syntax(line, col, format!("expected {what}, found end of input"))),
        }
    }

    fn expect_end(&mut self) -> Result<(), DlError> {
        match self.next() {
            None => Ok(()),
            Some(t) => Err(syntax(
                t.line,
                t.col,
                format!("unexpected trailing {}", t.tok.describe()),
            )),
        }
    }

    fn or_expr(&mut self) -> Result<ConceptExpr, DlError> {
        let mut left = self.and_expr()?;
        while self.peek() == Some(&Tok::Or) {
            self.next();
            let right = self.and_expr()?;
            left = left.or(right);
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> Result<ConceptExpr, DlError> {
        let mut left = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.next();
            let right = self.unary()?;
            left = left.and(right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<ConceptExpr, DlError> {
        let (line, col) = self.here();
        match self.peek() {
            Some(Tok::Not) => {
                self.next();
                Ok(self.unary()?.negation())
            }
            Some(Tok::Inverse) | Some(Tok::UniversalRole) => {
                let role = self.role()?;
                self.restriction(role)
            }
            Some(Tok::Name(_)) => {
                // A name is a role when a restriction keyword follows,
                // otherwise an atomic concept.
                let name = self.expect_name("name")?;
                match self.peek() {
                    Some(Tok::Some) | Some(Tok::Only) | Some(Tok::Min) | Some(Tok::Max) => {
                        self.restriction(RoleExpr::Atomic(name))
                    }
                    _ => Ok(ConceptExpr::Atomic(name)),
                }
            }
            _ => self.primary(line, col),
        }
    }

    fn restriction(&mut self, role: RoleExpr) -> Result<ConceptExpr, DlError> {
        let (line, col) = self.here();
        match self.next() {
            Some(Token { tok: Tok::Some, .. }) => Ok(ConceptExpr::some(role, self.unary()?)),
            Some(Token { tok: Tok::Only, .. }) => Ok(ConceptExpr::only(role, self.unary()?)),
            Some(Token { tok: Tok::Min, .. }) => {
                let n = self.cardinality()?;
                Ok(ConceptExpr::at_least(n, role, self.unary()?))
            }
            Some(Token { tok: Tok::Max, .. }) => {
                let n = self.cardinality()?;
                Ok(ConceptExpr::at_most(n, role, self.unary()?))
            }
            Some(t) => Err(syntax(
                t.line,
                t.col,
                format!(
                    "expected `some`, `only`, `min`, or `max` after role, found {}",
                    t.tok.describe()
                ),
            )),
            None => Err(syntax(line, col, "expected restriction keyword after role")),
        }
    }

    fn cardinality(&mut self) -> Result<u32, DlError> {
        let (line, col) = self.here();
        match self.next() {
            Some(Token { tok: Tok::Int(n), .. }) => Ok(n),
            Some(t) => Err(syntax(
                t.line,
                t.col,
                format!("expected cardinality, found {}", t.tok.describe()),
            )),
            None => Err(syntax(line, col, "expected cardinality, found end of input")),
        }
    }

    fn role(&mut self) -> Result<RoleExpr, DlError> {
        let (line, col) = self.here();
        match self.next() {
            Some(Token {
                tok: Tok::Name(n), ..
            }) => Ok(RoleExpr::Atomic(n)),
            Some(Token {
                tok: Tok::UniversalRole,
                ..
            }) => Ok(RoleExpr::Universal),
            Some(Token {
                tok: Tok::Inverse,
                line,
                col,
            }) => {
                self.expect(Tok::LParen)?;
                let inner = self.role()?;
                self.expect(Tok::RParen)?;
                // Normalize double inversion away.
                match inner {
                    RoleExpr::Atomic(n) => Ok(RoleExpr::Inverse(n)),
                    RoleExpr::Inverse(n) => Ok(RoleExpr::Atomic(n)),
                    RoleExpr::Universal => {
                        Err(syntax(line, col, "the universal role has no inverse"))
                    }
                }
            }
            Some(t) => Err(syntax(
                t.line,
                t.col,
                format!("expected role, found {}", t.tok.describe()),
            )),
            None => Err(syntax(line, col, "expected role, found end of input")),
        }
    }

    fn primary(&mut self, line: usize, col: usize) -> Result<ConceptExpr, DlError> {
        match self.next() {
            Some(Token {
                tok: Tok::Name(n), ..
            }) => Ok(ConceptExpr::Atomic(n)),
            Some(Token { tok: Tok::Top, .. }) => Ok(ConceptExpr::Top),
            Some(Token {
                tok: Tok::Bottom, ..
            }) => Ok(ConceptExpr::Bottom),
            Some(Token {
                tok: Tok::LBrace, ..
            }) => {
                let name = self.expect_name("individual name")?;
                self.expect(Tok::RBrace)?;
                Ok(ConceptExpr::Nominal(name))
            }
            Some(Token {
                tok: Tok::LParen, ..
            }) => {
                let inner = self.or_expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some(t) => Err(syntax(
                t.line,
                t.col,
                format!("expected concept, found {}", t.tok.describe()),
            )),
            None => Err(syntax(line, col, "expected concept, found end of input")),
        }
    }

    /// A concept in axiom-argument position: a bare primary, or any
    /// expression wrapped in parentheses.
    fn axiom_concept(&mut self) -> Result<ConceptExpr, DlError> {
        let (line, col) = self.here();
        self.primary(line, col)
    }
}

/// Parse a concept expression.
pub fn parse_concept(text: &str) -> Result<ConceptExpr, DlError> {
    let mut parser = Parser::new(lex(text, 1)?);
    let concept = parser.or_expr()?;
    parser.expect_end()?;
    Ok(concept)
}

/// Parse a `.dl` document: one axiom per line, `#` starts a comment.
/// The returned knowledge base preserves the document's axiom multiset
/// and collects the signature, rejecting cross-kind name reuse.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, DlError> {
    let mut kb = KnowledgeBase::default();
    let mut sig = Signature::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        if line.trim().is_empty() {
            continue;
        }
        parse_axiom_line(line, line_no, &mut kb, &mut sig)?;
    }
    kb.signature = sig;
    Ok(kb)
}

fn parse_axiom_line(
    line: &str,
    line_no: usize,
    kb: &mut KnowledgeBase,
    sig: &mut Signature,
) -> Result<(), DlError> {
    let mut parser = Parser::new(lex(line, line_no)?);
    let head = parser.expect_name("axiom keyword")?;
    parser.expect(Tok::LParen)?;
    match head.as_str() {
        "SubClassOf" => {
            let sub = parser.axiom_concept()?;
            let sup = parser.axiom_concept()?;
            parser.expect(Tok::RParen)?;
            parser.expect_end()?;
            declare_concept(sig, &sub, line_no)?;
            declare_concept(sig, &sup, line_no)?;
            kb.tbox.push(Gci { sub, sup });
        }
        "SubObjectPropertyOf" => {
            let sub = parser.expect_name("role name")?;
            let sup = parser.expect_name("role name")?;
            parser.expect(Tok::RParen)?;
            parser.expect_end()?;
            declare(sig, &sub, NameKind::Role, line_no)?;
            declare(sig, &sup, NameKind::Role, line_no)?;
            kb.rbox.push(RoleAxiom::SubRoleOf { sub, sup });
        }
        "TransitiveObjectProperty" => {
            let role = parser.expect_name("role name")?;
            parser.expect(Tok::RParen)?;
            parser.expect_end()?;
            declare(sig, &role, NameKind::Role, line_no)?;
            kb.rbox.push(RoleAxiom::Transitive(role));
        }
        "FunctionalObjectProperty" => {
            let role = parser.expect_name("role name")?;
            parser.expect(Tok::RParen)?;
            parser.expect_end()?;
            declare(sig, &role, NameKind::Role, line_no)?;
            kb.rbox.push(RoleAxiom::Functional(role));
        }
        "ClassAssertion" => {
            let concept = parser.axiom_concept()?;
            let individual = parser.expect_name("individual name")?;
            parser.expect(Tok::RParen)?;
            parser.expect_end()?;
            declare_concept(sig, &concept, line_no)?;
            declare(sig, &individual, NameKind::Individual, line_no)?;
            kb.abox.push(Assertion::Class {
                concept,
                individual,
            });
        }
        "ObjectPropertyAssertion" => {
            let role = parser.expect_name("role name")?;
            let subject = parser.expect_name("individual name")?;
            let object = parser.expect_name("individual name")?;
            parser.expect(Tok::RParen)?;
            parser.expect_end()?;
            declare(sig, &role, NameKind::Role, line_no)?;
            declare(sig, &subject, NameKind::Individual, line_no)?;
            declare(sig, &object, NameKind::Individual, line_no)?;
            kb.abox.push(Assertion::Role {
                role,
                subject,
                object,
            });
        }
        other => {
            return Err(syntax(
                line_no,
                1,
                format!("unknown axiom keyword `{other}`"),
            ))
        }
    }
    Ok(())
}

fn declare(sig: &mut Signature, name: &str, kind: NameKind, _line: usize) -> Result<(), DlError> {
    sig.declare(name, kind)
}

fn declare_concept(sig: &mut Signature, c: &ConceptExpr, line: usize) -> Result<(), DlError> {
    let mut result = Ok(());
    c.visit_names(&mut |name, kind| {
        if result.is_ok() {
            result = declare(sig, name, kind, line);
        }
    });
    result
}
