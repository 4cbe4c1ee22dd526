//! Rule files.
//!
//! ```text
//! system ::= stmt*
//! stmt   ::= atom ( "<-" atom ( "," atom )* )? "."
//! atom   ::= IDENT "(" word ")"
//! word   ::= ( SYM )* ( "x" | "eps" )?
//! ```
//!
//! `#` starts a comment running to the end of the line. `x` is the rule
//! variable and may only end a word; `eps` (or nothing) is the empty word.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::rule::{Provenance, Rule, RuleError, RuleKey};
use crate::syntax::{Atom, Pattern, Signature, SignatureError, Symbol, Tail, Word};
use crate::system::System;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("rule matches no alternating pushdown template: {0}")]
    Shape(String),
    #[error("premise {0} occurs twice")]
    DuplicatePremise(String),
    #[error("rule repeats the rule on line {0}")]
    DuplicateRule(usize),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Arrow,
    Comma,
    Dot,
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let pos = Pos {
                line: lineno + 1,
                col: i + 1,
            };
            let c = chars[i];
            match c {
                c if c.is_whitespace() => i += 1,
                '(' => {
                    out.push((Tok::LParen, pos));
                    i += 1;
                }
                ')' => {
                    out.push((Tok::RParen, pos));
                    i += 1;
                }
                ',' => {
                    out.push((Tok::Comma, pos));
                    i += 1;
                }
                '.' => {
                    out.push((Tok::Dot, pos));
                    i += 1;
                }
                '<' if chars.get(i + 1) == Some(&'-') => {
                    out.push((Tok::Arrow, pos));
                    i += 2;
                }
                c if c.is_ascii_alphanumeric() || c == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
                }
                other => {
                    return Err(ParseError {
                        line: pos.line,
                        col: pos.col,
                        kind: ParseErrorKind::Syntax(format!("unexpected character `{other}`")),
                    })
                }
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    end: Pos,
}

struct RawRule {
    pos: Pos,
    conclusion: (Pattern, Pos),
    premises: Vec<(Pattern, Pos)>,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        let toks = lex(text)?;
        // Just past the last character.
        let line = 1 + text.matches('\n').count();
        let col = 1 + text.rsplit('\n').next().unwrap_or("").chars().count();
        Ok(Parser {
            toks,
            i: 0,
            end: Pos { line, col },
        })
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.i).map(|t| t.1).unwrap_or(self.end)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let p = self.pos();
        ParseError {
            line: p.line,
            col: p.col,
            kind: ParseErrorKind::Syntax(msg.into()),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn pattern(&mut self) -> Result<(Pattern, Pos), ParseError> {
        let pos = self.pos();
        let name = match self.peek() {
            Some(Tok::Ident(n)) => n.clone(),
            _ => return Err(self.err("expected a predicate name")),
        };
        if name == "x" || name == "eps" {
            return Err(self.err(format!("`{name}` cannot be a predicate")));
        }
        self.i += 1;
        self.expect(Tok::LParen, "`(`")?;
        let mut symbols = Vec::new();
        let mut tail = Tail::Ground;
        let mut closed = false;
        while let Some(Tok::Ident(s)) = self.peek() {
            if closed {
                return Err(self.err("`x` and `eps` must end the word"));
            }
            match s.as_str() {
                "x" => {
                    tail = Tail::Var;
                    closed = true;
                }
                "eps" => {
                    if !symbols.is_empty() {
                        return Err(self.err("`eps` must stand alone"));
                    }
                    closed = true;
                }
                _ => symbols.push(Symbol::new(s)),
            }
            self.i += 1;
        }
        self.expect(Tok::RParen, "`)`")?;
        let word = Word::from_symbols(symbols);
        let pattern = match tail {
            Tail::Var => Pattern::var(name.as_str(), word),
            Tail::Ground => Pattern::ground(name.as_str(), word),
        };
        Ok((pattern, pos))
    }

    fn rules(&mut self) -> Result<Vec<RawRule>, ParseError> {
        let mut out = Vec::new();
        while self.peek().is_some() {
            let pos = self.pos();
            let conclusion = self.pattern()?;
            let mut premises = Vec::new();
            if self.peek() == Some(&Tok::Arrow) {
                self.i += 1;
                premises.push(self.pattern()?);
                while self.peek() == Some(&Tok::Comma) {
                    self.i += 1;
                    premises.push(self.pattern()?);
                }
            }
            self.expect(Tok::Dot, "`.` or `<-`")?;
            out.push(RawRule {
                pos,
                conclusion,
                premises,
            });
        }
        Ok(out)
    }
}

fn at(pos: Pos, kind: impl Into<ParseErrorKind>) -> ParseError {
    ParseError {
        line: pos.line,
        col: pos.col,
        kind: kind.into(),
    }
}

fn infer_signature(raw: &[RawRule]) -> Result<Signature, ParseError> {
    let mut preds = BTreeSet::new();
    let mut syms = BTreeSet::new();
    for r in raw {
        for (p, _) in std::iter::once(&r.conclusion).chain(&r.premises) {
            preds.insert(p.predicate.clone());
            syms.extend(p.prefix.symbols().iter().cloned());
        }
    }
    let pos = raw
        .first()
        .map(|r| r.pos)
        .unwrap_or(Pos { line: 1, col: 1 });
    Signature::new(preds, syms).map_err(|e| at(pos, e))
}

/// Options for [`parse_with`].
#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    /// Require every rule to be one of the alternating pushdown templates.
    pub require_aps: bool,
    /// Use this signature instead of inferring one from the rules.
    pub signature: Option<Signature>,
}

/// Parses an alternating pushdown system; rules get ids `r1`, `r2`, ... in
/// file order.
pub fn parse_system(text: &str) -> Result<System, ParseError> {
    parse_with(
        text,
        &ParseOptions {
            require_aps: true,
            signature: None,
        },
    )
}

/// Parses any rule file in the one-variable language, without the template
/// check.
pub fn parse_rules(text: &str) -> Result<System, ParseError> {
    parse_with(text, &ParseOptions::default())
}

pub fn parse_with(text: &str, opts: &ParseOptions) -> Result<System, ParseError> {
    let raw = Parser::new(text)?.rules()?;
    let signature = match &opts.signature {
        Some(sig) => sig.clone(),
        None => infer_signature(&raw)?,
    };
    let mut seen: HashMap<RuleKey, usize> = HashMap::new();
    let mut rules = Vec::with_capacity(raw.len());
    for (n, r) in raw.into_iter().enumerate() {
        let mut distinct = BTreeSet::new();
        for (p, pos) in &r.premises {
            if !distinct.insert(p.clone()) {
                return Err(at(*pos, ParseErrorKind::DuplicatePremise(p.to_string())));
            }
        }
        for (p, pos) in std::iter::once(&r.conclusion).chain(&r.premises) {
            signature.check_pattern(p).map_err(|e| at(*pos, e))?;
        }
        let rule = Rule::new(
            format!("r{}", n + 1),
            r.conclusion.0,
            r.premises.into_iter().map(|(p, _)| p).collect(),
            Provenance::Primitive,
        )
        .map_err(|e| at(r.pos, e))?;
        if opts.require_aps && !rule.is_aps_shaped() {
            return Err(at(r.pos, ParseErrorKind::Shape(rule.to_string())));
        }
        if let Some(&line) = seen.get(&rule.key()) {
            return Err(at(r.pos, ParseErrorKind::DuplicateRule(line)));
        }
        seen.insert(rule.key(), r.pos.line);
        rules.push(rule);
    }
    // duplicates and signature were checked above
    Ok(System::new(signature, rules).expect("validated rules"))
}

/// Parses a closed atom such as `P(a a)`, `P(eps)` or `P()`.
pub fn parse_atom(text: &str) -> Result<Atom, ParseError> {
    let mut parser = Parser::new(text)?;
    let (pattern, pos) = parser.pattern()?;
    if parser.peek().is_some() {
        return Err(parser.err("trailing input after atom"));
    }
    if pattern.tail == Tail::Var {
        return Err(at(
            pos,
            ParseErrorKind::Syntax("atoms are closed; `x` is not allowed".into()),
        ));
    }
    Ok(Atom::new(pattern.predicate, pattern.prefix))
}

/// Canonical text of a system: one rule per line, in system order.
pub fn print_system(system: &System) -> String {
    print_system_annotated(system, |_| None)
}

/// Like [`print_system`], with an optional trailing comment per rule.
pub fn print_system_annotated(
    system: &System,
    mut note: impl FnMut(&Rule) -> Option<String>,
) -> String {
    let mut out = String::new();
    for rule in system.rules() {
        let _ = write!(out, "{rule}");
        if let Some(n) = note(rule) {
            let _ = write!(out, "  # {n}");
        }
        out.push('\n');
    }
    out
}
