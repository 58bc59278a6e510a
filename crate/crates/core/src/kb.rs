//! Knowledge bases: identified axioms, the text format, and signatures.
//!
//! One axiom per line, `ID[@origin]: FORMULA`. Operators are `~`, `&`, `|`,
//! `->` and `<->` (binding from tightest to loosest); `->` and `<->` associate
//! to the right, `&` and `|` to the left. `#` starts a comment.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{ConstructorCounts, Formula};

/// Where an axiom came from; consumed by prior profiles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    #[serde(rename = "component-1")]
    Component1,
    #[serde(rename = "component-2")]
    Component2,
    Alignment,
    #[default]
    Other,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Component1 => "component-1",
            Origin::Component2 => "component-2",
            Origin::Alignment => "alignment",
            Origin::Other => "other",
        }
    }
}

impl FromStr for Origin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "component-1" => Ok(Origin::Component1),
            "component-2" => Ok(Origin::Component2),
            "alignment" => Ok(Origin::Alignment),
            "other" => Ok(Origin::Other),
            _ => Err(format!("unknown origin `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Axiom {
    pub id: String,
    pub formula: Formula,
    pub origin: Origin,
}

impl Axiom {
    pub fn new(id: impl Into<String>, formula: Formula) -> Self {
        Axiom {
            id: id.into(),
            formula,
            origin: Origin::Other,
        }
    }

    pub fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = origin;
        self
    }

    pub fn constructor_counts(&self) -> ConstructorCounts {
        self.formula.constructor_counts()
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)?;
        if self.origin != Origin::Other {
            write!(f, "@{}", self.origin.as_str())?;
        }
        write!(f, ": {}", self.formula)
    }
}

pub fn count_constructors(ax: &Axiom) -> ConstructorCounts {
    ax.constructor_counts()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: duplicate axiom id `{id}`")]
    DuplicateId { id: String, line: usize },
}

impl KbError {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        KbError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}

/// An ordered list of axioms with unique ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    axioms: Vec<Axiom>,
    index: HashMap<String, usize>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_axioms<I: IntoIterator<Item = Axiom>>(axioms: I) -> Result<Self, KbError> {
        let mut kb = KnowledgeBase::new();
        for (i, ax) in axioms.into_iter().enumerate() {
            kb.push(ax).map_err(|id| KbError::DuplicateId { id, line: i + 1 })?;
        }
        Ok(kb)
    }

    /// Appends an axiom; returns the offending id if it is already present.
    pub fn push(&mut self, ax: Axiom) -> Result<usize, String> {
        if self.index.contains_key(&ax.id) {
            return Err(ax.id);
        }
        let pos = self.axioms.len();
        self.index.insert(ax.id.clone(), pos);
        self.axioms.push(ax);
        Ok(pos)
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn axioms(&self) -> &[Axiom] {
        &self.axioms
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Axiom> {
        self.axioms.iter()
    }

    pub fn get(&self, id: &str) -> Option<&Axiom> {
        self.index.get(id).map(|&i| &self.axioms[i])
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.axioms.iter().map(|a| &a.formula)
    }

    /// Atoms occurring in any axiom.
    pub fn signature(&self) -> BTreeSet<String> {
        let mut atoms = BTreeSet::new();
        for ax in &self.axioms {
            ax.formula.collect_atoms(&mut atoms);
        }
        atoms.into_iter().map(str::to_owned).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for ax in &self.axioms {
            out.push_str(&ax.to_string());
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for KnowledgeBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn signature(kb: &KnowledgeBase) -> BTreeSet<String> {
    kb.signature()
}

/// Parses the KB text format.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, KbError> {
    let mut kb = KnowledgeBase::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        if let Some(ax) = parse_axiom_line(raw, line)? {
            kb.push(ax).map_err(|id| KbError::DuplicateId { id, line })?;
        }
    }
    Ok(kb)
}

pub(crate) fn strip_comment(raw: &str) -> &str {
    match raw.find('#') {
        Some(i) => &raw[..i],
        None => raw,
    }
}

fn is_id_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.')
}

/// Parses one `ID[@origin]: FORMULA` line; blank and comment-only lines yield `None`.
pub(crate) fn parse_axiom_line(raw: &str, line: usize) -> Result<Option<Axiom>, KbError> {
    let body = strip_comment(raw);
    if body.trim().is_empty() {
        return Ok(None);
    }
    let colon = body
        .find(':')
        .ok_or_else(|| KbError::syntax(line, 1, "expected `ID: FORMULA`"))?;
    let head = &body[..colon];
    let head_col = head.len() - head.trim_start().len() + 1;
    let head = head.trim();
    let (id, origin) = match head.split_once('@') {
        Some((id, origin)) => {
            let origin = origin.trim().parse::<Origin>().map_err(|m| {
                KbError::syntax(line, head_col + id.len() + 1, m)
            })?;
            (id.trim(), origin)
        }
        None => (head, Origin::Other),
    };
    if id.is_empty() || !id.chars().all(is_id_char) {
        return Err(KbError::syntax(line, head_col, format!("invalid axiom id `{id}`")));
    }
    let formula = parse_formula_at(&body[colon + 1..], line, colon + 2)?;
    Ok(Some(Axiom {
        id: id.to_owned(),
        formula,
        origin,
    }))
}

/// Parses a single formula.
pub fn parse_formula(text: &str) -> Result<Formula, KbError> {
    parse_formula_at(text, 1, 1)
}

pub(crate) fn parse_formula_at(text: &str, line: usize, column: usize) -> Result<Formula, KbError> {
    let tokens = tokenize(text, line, column)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        line,
        end_col: column + text.chars().count(),
    };
    let f = parser.iff()?;
    if let Some(tok) = parser.tokens.get(parser.pos) {
        return Err(KbError::syntax(
            line,
            tok.column,
            format!("unexpected {}", tok.kind.describe()),
        ));
    }
    Ok(f)
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Ident(String),
    Not,
    And,
    Or,
    Arrow,
    DoubleArrow,
    LParen,
    RParen,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("atom `{s}`"),
            TokenKind::Not => "`~`".into(),
            TokenKind::And => "`&`".into(),
            TokenKind::Or => "`|`".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::DoubleArrow => "`<->`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    column: usize,
}

fn tokenize(text: &str, line: usize, column: usize) -> Result<Vec<Token>, KbError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = column + i;
        let kind = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '~' => TokenKind::Not,
            '&' => TokenKind::And,
            '|' => TokenKind::Or,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                TokenKind::Arrow
            }
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                i += 2;
                TokenKind::DoubleArrow
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i + 1 < chars.len() && (chars[i + 1].is_alphanumeric() || chars[i + 1] == '_') {
                    i += 1;
                }
                TokenKind::Ident(chars[start..=i].iter().collect())
            }
            other => {
                return Err(KbError::syntax(line, col, format!("unexpected character `{other}`")));
            }
        };
        tokens.push(Token { kind, column: col });
        i += 1;
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn error_here(&self, message: impl Into<String>) -> KbError {
        let column = self.tokens.get(self.pos).map_or(self.end_col, |t| t.column);
        KbError::syntax(self.line, column, message)
    }

    fn iff(&mut self) -> Result<Formula, KbError> {
        let lhs = self.implication()?;
        if self.peek() == Some(&TokenKind::DoubleArrow) {
            self.pos += 1;
            let rhs = self.iff()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, KbError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&TokenKind::Arrow) {
            self.pos += 1;
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, KbError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&TokenKind::Or) {
            self.pos += 1;
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, KbError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&TokenKind::And) {
            self.pos += 1;
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, KbError> {
        match self.peek().cloned() {
            Some(TokenKind::Not) => {
                self.pos += 1;
                Ok(self.unary()?.negated())
            }
            Some(TokenKind::LParen) => {
                let open = self.tokens[self.pos].column;
                self.pos += 1;
                let inner = self.iff()?;
                if self.peek() != Some(&TokenKind::RParen) {
                    let mut err = self.error_here("unbalanced parenthesis: expected `)`");
                    if let KbError::Syntax { message, .. } = &mut err {
                        message.push_str(&format!(" to close `(` at column {open}"));
                    }
                    return Err(err);
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(TokenKind::Ident(name)) => {
                self.pos += 1;
                Ok(Formula::Atom(name))
            }
            Some(other) => Err(self.error_here(format!("unexpected {}", other.describe()))),
            None => Err(self.error_here("unexpected end of formula")),
        }
    }
}
