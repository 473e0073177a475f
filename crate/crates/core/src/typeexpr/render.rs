//! Canonical text form of type expressions and its parser.
//!
//! ```text
//! expr  := term ( "|" term )*
//! term  := "Any" | atom | "seq[" expr "]" | "tuple[" expr ", ...]"
//!        | "tuple[" expr ( "," expr )* "]" | "map[" expr "," expr "]"
//!        | "pred:" ident | "(" expr ")"
//! ```
//!
//! A union nested directly inside another union is parenthesised so that
//! rendering stays injective on structure.

use std::collections::BTreeMap;

use super::{Node, Predicate, TypeExpr, TypeExprError, RESERVED};
use crate::typeexpr::AtomKind;

pub(crate) fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn render(e: &TypeExpr) -> String {
    let mut out = String::new();
    write_expr(e, &mut out);
    out
}

fn write_expr(e: &TypeExpr, out: &mut String) {
    match e.node() {
        Node::Any => out.push_str("Any"),
        Node::Atom(k) => out.push_str(k.name()),
        Node::Pred(p) => {
            out.push_str("pred:");
            out.push_str(p.name());
        }
        Node::Union(alts) => {
            for (i, a) in alts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" | ");
                }
                if matches!(a.node(), Node::Union(_)) {
                    out.push('(');
                    write_expr(a, out);
                    out.push(')');
                } else {
                    write_expr(a, out);
                }
            }
        }
        Node::Seq(el) => {
            out.push_str("seq[");
            write_expr(el, out);
            out.push(']');
        }
        Node::VarSeq(el) => {
            out.push_str("tuple[");
            write_expr(el, out);
            out.push_str(", ...]");
        }
        Node::FixedSeq(els) => {
            out.push_str("tuple[");
            for (i, el) in els.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(el, out);
            }
            out.push(']');
        }
        Node::Map(k, v) => {
            out.push_str("map[");
            write_expr(k, out);
            out.push_str(", ");
            write_expr(v, out);
            out.push(']');
        }
    }
}

/// Name-to-predicate lookup used when parsing `pred:` terms.
#[derive(Clone, Debug, Default)]
pub struct PredicateRegistry {
    preds: BTreeMap<String, Predicate>,
}

impl PredicateRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `p` under its own name, replacing any previous entry.
    pub fn register(&mut self, p: Predicate) -> &mut Self {
        self.preds.insert(p.name().to_owned(), p);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Predicate> {
        self.preds.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.preds.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("unexpected {found} at offset {offset}, expected {expected}")]
    Unexpected {
        offset: usize,
        found: String,
        expected: &'static str,
    },
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error(transparent)]
    Invalid(#[from] TypeExprError),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Pipe,
    Colon,
    Ellipsis,
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = s.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\n' => {
                i += 1;
                continue;
            }
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'|' => Tok::Pipe,
            b':' => Tok::Colon,
            b'.' if s[i..].starts_with("...") => {
                out.push((i, Tok::Ellipsis));
                i += 3;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(s[start..i].to_owned())));
                continue;
            }
            _ => {
                return Err(ParseError::Unexpected {
                    offset: i,
                    found: format!("{:?}", s[i..].chars().next().unwrap_or('?')),
                    expected: "a type expression",
                })
            }
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    registry: &'a PredicateRegistry,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        match self.toks.get(self.pos) {
            Some((offset, t)) => ParseError::Unexpected {
                offset: *offset,
                found: format!("{t:?}"),
                expected,
            },
            None => ParseError::Unexpected {
                offset: self.end,
                found: "end of input".into(),
                expected,
            },
        }
    }

    fn expect(&mut self, t: Tok, what: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn expr(&mut self) -> Result<TypeExpr, ParseError> {
        let mut alts = vec![self.term()?];
        while self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            alts.push(self.term()?);
        }
        if alts.len() == 1 {
            Ok(alts.pop().unwrap())
        } else {
            Ok(TypeExpr::union(alts)?)
        }
    }

    fn term(&mut self) -> Result<TypeExpr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "Any" => Ok(TypeExpr::any()),
                    "seq" => {
                        self.expect(Tok::LBracket, "'['")?;
                        let el = self.expr()?;
                        self.expect(Tok::RBracket, "']'")?;
                        Ok(TypeExpr::seq(el))
                    }
                    "map" => {
                        self.expect(Tok::LBracket, "'['")?;
                        let k = self.expr()?;
                        self.expect(Tok::Comma, "','")?;
                        let v = self.expr()?;
                        self.expect(Tok::RBracket, "']'")?;
                        Ok(TypeExpr::map(k, v))
                    }
                    "tuple" => {
                        self.expect(Tok::LBracket, "'['")?;
                        let mut els = vec![self.expr()?];
                        while self.peek() == Some(&Tok::Comma) {
                            self.pos += 1;
                            if self.peek() == Some(&Tok::Ellipsis) {
                                self.pos += 1;
                                self.expect(Tok::RBracket, "']'")?;
                                if els.len() != 1 {
                                    return Err(self.unexpected("a single element before '...'"));
                                }
                                return Ok(TypeExpr::var_seq(els.pop().unwrap()));
                            }
                            els.push(self.expr()?);
                        }
                        self.expect(Tok::RBracket, "']'")?;
                        Ok(TypeExpr::fixed_seq(els)?)
                    }
                    "pred" => {
                        self.expect(Tok::Colon, "':'")?;
                        match self.peek().cloned() {
                            Some(Tok::Ident(p)) => {
                                self.pos += 1;
                                self.registry
                                    .get(&p)
                                    .cloned()
                                    .map(TypeExpr::pred)
                                    .ok_or(ParseError::UnknownPredicate(p))
                            }
                            _ => Err(self.unexpected("a predicate name")),
                        }
                    }
                    other if RESERVED.contains(&other) => Err(self.unexpected("a type expression")),
                    other => Ok(TypeExpr::atom(AtomKind::from_name(other))),
                }
            }
            _ => Err(self.unexpected("a type expression")),
        }
    }
}

/// Parses the canonical text form produced by [`TypeExpr::render`].
pub fn parse(s: &str, registry: &PredicateRegistry) -> Result<TypeExpr, ParseError> {
    let mut p = Parser {
        toks: lex(s)?,
        pos: 0,
        end: s.len(),
        registry,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.unexpected("end of input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typeexpr::Predicate;

    fn reg() -> (PredicateRegistry, Predicate) {
        let sym = Predicate::from_fn("_sym", "symmetric", |_| true);
        let mut r = PredicateRegistry::new();
        r.register(sym.clone());
        (r, sym)
    }

    #[test]
    fn canonical_renderings() {
        assert_eq!(TypeExpr::any().render(), "Any");
        let u = TypeExpr::union(vec![TypeExpr::text(), TypeExpr::seq(TypeExpr::text())]).unwrap();
        assert_eq!(u.render(), "text | seq[text]");
        let (_, sym) = reg();
        assert_eq!(TypeExpr::pred(sym).render(), "pred:_sym");
        assert_eq!(TypeExpr::var_seq(TypeExpr::real()).render(), "tuple[real, ...]");
        assert_eq!(
            TypeExpr::fixed_seq(vec![TypeExpr::real(), TypeExpr::integer()])
                .unwrap()
                .render(),
            "tuple[real, integer]"
        );
        assert_eq!(
            TypeExpr::map(TypeExpr::text(), TypeExpr::any()).render(),
            "map[text, Any]"
        );
    }

    #[test]
    fn nested_union_is_parenthesised() {
        let inner = TypeExpr::union(vec![TypeExpr::integer(), TypeExpr::real()]).unwrap();
        let outer = TypeExpr::union(vec![TypeExpr::text(), inner]).unwrap();
        assert_eq!(outer.render(), "text | (integer | real)");
        let flat = TypeExpr::union(vec![TypeExpr::text(), TypeExpr::integer(), TypeExpr::real()]).unwrap();
        assert_ne!(outer.render(), flat.render());
    }

    #[test]
    fn parse_inverts_render() {
        let (r, _) = reg();
        for s in [
            "Any",
            "text | seq[text] | tuple[text, ...]",
            "map[text, seq[tuple[real, integer]]]",
            "pred:_sym | none",
            "text | (integer | real)",
            "image",
        ] {
            assert_eq!(parse(s, &r).unwrap().render(), s);
        }
    }

    #[test]
    fn parse_errors() {
        let (r, _) = reg();
        assert_eq!(parse("pred:nope", &r), Err(ParseError::UnknownPredicate("nope".into())));
        assert!(parse("seq[", &r).is_err());
        assert!(parse("text text", &r).is_err());
        assert!(parse("tuple[]", &r).is_err());
        assert!(parse("text | text", &r).is_err());
        assert!(parse("tuple[a, b, ...]", &r).is_err());
        assert!(parse("seq", &r).is_err());
    }
}
