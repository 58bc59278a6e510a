//! Diagnosis problem instances `⟨O, B, P, N⟩` with consistency as the only
//! requirement, and their section-based file format.
//!
//! ```text
//! [O]
//! ax1: phd -> researcher
//! [B]
//! s: phdstudent
//! [P]
//! student; phd
//! [N]
//! deptmember
//! ```
//!
//! `[O]` and `[B]` hold KB lines. `[P]` and `[N]` hold one test case per line,
//! its formulas separated by `;`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::Formula;
use crate::kb::{parse_axiom_line, parse_formula_at, strip_comment, KbError, KnowledgeBase};

/// A test case: a set of formulas that must (P) or must not (N) be entailed.
pub type TestCase = Vec<Formula>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiagnosisProblem {
    pub o: KnowledgeBase,
    pub b: KnowledgeBase,
    pub p: Vec<TestCase>,
    pub n: Vec<TestCase>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DpiError {
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error("line {line}: unknown section `{name}`")]
    UnknownSection { name: String, line: usize },
    #[error("line {line}: content before the first section header")]
    MissingSection { line: usize },
    #[error("line {line}: empty test case")]
    EmptyTestCase { line: usize },
}

impl DiagnosisProblem {
    pub fn new(o: KnowledgeBase, b: KnowledgeBase) -> Self {
        DiagnosisProblem {
            o,
            b,
            p: Vec::new(),
            n: Vec::new(),
        }
    }

    /// Atoms of O, B, P and N.
    pub fn signature(&self) -> BTreeSet<String> {
        let mut atoms: BTreeSet<&str> = BTreeSet::new();
        for f in self.o.formulas().chain(self.b.formulas()) {
            f.collect_atoms(&mut atoms);
        }
        for f in self.p.iter().chain(&self.n).flatten() {
            f.collect_atoms(&mut atoms);
        }
        atoms.into_iter().map(str::to_owned).collect()
    }

    /// `B ∪ ⋃P`.
    pub fn background(&self) -> Vec<&Formula> {
        self.b.formulas().chain(self.p.iter().flatten()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("[O]\n");
        out.push_str(&self.o.to_text());
        out.push_str("[B]\n");
        out.push_str(&self.b.to_text());
        for (name, cases) in [("P", &self.p), ("N", &self.n)] {
            let _ = writeln!(out, "[{name}]");
            for case in cases {
                let parts: Vec<String> = case.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "{}", parts.join("; "));
            }
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    O,
    B,
    P,
    N,
}

pub fn parse_dpi(text: &str) -> Result<DiagnosisProblem, DpiError> {
    let mut dpi = DiagnosisProblem::default();
    let mut section = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let body = strip_comment(raw);
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = Some(match name.trim() {
                "O" => Section::O,
                "B" => Section::B,
                "P" => Section::P,
                "N" => Section::N,
                other => {
                    return Err(DpiError::UnknownSection {
                        name: other.to_owned(),
                        line,
                    })
                }
            });
            continue;
        }
        match section {
            None => return Err(DpiError::MissingSection { line }),
            Some(s @ (Section::O | Section::B)) => {
                let kb = if s == Section::O { &mut dpi.o } else { &mut dpi.b };
                if let Some(ax) = parse_axiom_line(raw, line)? {
                    kb.push(ax).map_err(|id| KbError::DuplicateId { id, line })?;
                }
            }
            Some(s @ (Section::P | Section::N)) => {
                let mut case = Vec::new();
                let mut offset = 0;
                for part in body.split(';') {
                    if !part.trim().is_empty() {
                        case.push(parse_formula_at(part, line, offset + 1)?);
                    }
                    offset += part.chars().count() + 1;
                }
                if case.is_empty() {
                    return Err(DpiError::EmptyTestCase { line });
                }
                if s == Section::P {
                    dpi.p.push(case);
                } else {
                    dpi.n.push(case);
                }
            }
        }
    }
    // Axiom ids are unique across O and B so diagnoses and reports stay unambiguous.
    for ax in dpi.b.iter() {
        if dpi.o.get(&ax.id).is_some() {
            return Err(KbError::DuplicateId {
                id: ax.id.clone(),
                line: 0,
            }
            .into());
        }
    }
    Ok(dpi)
}
