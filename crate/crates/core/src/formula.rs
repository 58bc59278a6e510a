//! Propositional formulas and their constructor statistics.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Index};

use serde::{Deserialize, Serialize};

/// A propositional formula over named atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn negated(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(lhs: Formula, rhs: Formula) -> Self {
        Formula::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Self {
        Formula::Or(Box::new(lhs), Box::new(rhs))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Self {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Self {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    /// `atom` or `~atom`.
    pub fn literal(name: impl Into<String>, positive: bool) -> Self {
        let atom = Formula::atom(name);
        if positive {
            atom
        } else {
            atom.negated()
        }
    }

    /// Left-nested conjunction of `parts`; `None` for an empty iterator.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Option<Self> {
        parts.into_iter().reduce(Formula::and)
    }

    /// Returns `(atom, polarity)` when the formula is an atom or a negated atom.
    pub fn as_literal(&self) -> Option<(&str, bool)> {
        match self {
            Formula::Atom(name) => Some((name, true)),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom(name) => Some((name, false)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn collect_atoms<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Formula::Atom(name) => {
                out.insert(name);
            }
            Formula::Not(inner) => inner.collect_atoms(out),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub fn constructor(&self) -> Option<Constructor> {
        match self {
            Formula::Atom(_) => None,
            Formula::Not(_) => Some(Constructor::Not),
            Formula::And(..) => Some(Constructor::And),
            Formula::Or(..) => Some(Constructor::Or),
            Formula::Implies(..) => Some(Constructor::Implies),
            Formula::Iff(..) => Some(Constructor::Iff),
        }
    }

    /// Occurrences of each constructor type in the formula tree.
    pub fn constructor_counts(&self) -> ConstructorCounts {
        let mut counts = ConstructorCounts::default();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if let Some(c) = f.constructor() {
                counts.0[c as usize] += 1;
            }
            match f {
                Formula::Atom(_) => {}
                Formula::Not(inner) => stack.push(inner),
                Formula::And(l, r)
                | Formula::Or(l, r)
                | Formula::Implies(l, r)
                | Formula::Iff(l, r) => {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        counts
    }

    /// Evaluates the formula under `value`, which assigns every atom a truth value.
    pub fn eval(&self, value: &impl Fn(&str) -> bool) -> bool {
        match self {
            Formula::Atom(name) => value(name),
            Formula::Not(inner) => !inner.eval(value),
            Formula::And(l, r) => l.eval(value) && r.eval(value),
            Formula::Or(l, r) => l.eval(value) || r.eval(value),
            Formula::Implies(l, r) => !l.eval(value) || r.eval(value),
            Formula::Iff(l, r) => l.eval(value) == r.eval(value),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(_) => 5,
            Formula::Atom(_) => 6,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, operand: &Formula, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({operand})")
    } else {
        write!(f, "{operand}")
    }
}

// Printing follows the parser's precedence and associativity so that the
// rendered text parses back to the identical tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = self.precedence();
        match self {
            Formula::Atom(name) => f.write_str(name),
            Formula::Not(inner) => {
                f.write_str("~")?;
                write_operand(f, inner, inner.precedence() < prec)
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
                let right_assoc = matches!(self, Formula::Implies(..) | Formula::Iff(..));
                let op = match self {
                    Formula::And(..) => "&",
                    Formula::Or(..) => "|",
                    Formula::Implies(..) => "->",
                    _ => "<->",
                };
                let lp = l.precedence();
                let rp = r.precedence();
                write_operand(f, l, lp < prec || (lp == prec && right_assoc))?;
                write!(f, " {op} ")?;
                write_operand(f, r, rp < prec || (rp == prec && !right_assoc))
            }
        }
    }
}

/// The constructor types of the propositional language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constructor {
    Not = 0,
    And = 1,
    Or = 2,
    Implies = 3,
    Iff = 4,
}

impl Constructor {
    pub const ALL: [Constructor; 5] = [
        Constructor::Not,
        Constructor::And,
        Constructor::Or,
        Constructor::Implies,
        Constructor::Iff,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Constructor::Not => "~",
            Constructor::And => "&",
            Constructor::Or => "|",
            Constructor::Implies => "->",
            Constructor::Iff => "<->",
        }
    }
}

/// Occurrence count per constructor type.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ConstructorCounts(pub [u32; 5]);

impl ConstructorCounts {
    pub fn get(&self, c: Constructor) -> u32 {
        self.0[c as usize]
    }

    pub fn with(mut self, c: Constructor, n: u32) -> Self {
        self.0[c as usize] = n;
        self
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Index<Constructor> for ConstructorCounts {
    type Output = u32;

    fn index(&self, c: Constructor) -> &u32 {
        &self.0[c as usize]
    }
}

impl Add for ConstructorCounts {
    type Output = ConstructorCounts;

    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        self
    }
}

/// An atom with a polarity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub atom: String,
    pub positive: bool,
}

impl Literal {
    pub fn new(atom: impl Into<String>, positive: bool) -> Self {
        Literal {
            atom: atom.into(),
            positive,
        }
    }

    pub fn complement(&self) -> Self {
        Literal::new(self.atom.clone(), !self.positive)
    }

    pub fn to_formula(&self) -> Formula {
        Formula::literal(self.atom.clone(), self.positive)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            f.write_str(&self.atom)
        } else {
            write!(f, "~{}", self.atom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Formula {
        Formula::atom(n)
    }

    #[test]
    fn counts_of_atom_are_zero() {
        assert_eq!(a("p").constructor_counts(), ConstructorCounts::default());
    }

    #[test]
    fn counts_of_negated_conjunction() {
        let f = Formula::and(a("p"), a("q")).negated();
        let c = f.constructor_counts();
        assert_eq!(c[Constructor::Not], 1);
        assert_eq!(c[Constructor::And], 1);
        assert_eq!(c.total(), 2);
    }

    #[test]
    fn counts_of_nested_implications() {
        // (p -> q) & (q -> ~r)
        let f = Formula::and(
            Formula::implies(a("p"), a("q")),
            Formula::implies(a("q"), a("r").negated()),
        );
        let c = f.constructor_counts();
        assert_eq!(
            c,
            ConstructorCounts::default()
                .with(Constructor::Implies, 2)
                .with(Constructor::And, 1)
                .with(Constructor::Not, 1)
        );
    }

    #[test]
    fn display_respects_associativity() {
        let left = Formula::implies(Formula::implies(a("p"), a("q")), a("r"));
        assert_eq!(left.to_string(), "(p -> q) -> r");
        let right = Formula::implies(a("p"), Formula::implies(a("q"), a("r")));
        assert_eq!(right.to_string(), "p -> q -> r");
        let and = Formula::and(a("p"), Formula::and(a("q"), a("r")));
        assert_eq!(and.to_string(), "p & (q & r)");
        assert_eq!(Formula::and(a("p"), a("q")).negated().to_string(), "~(p & q)");
        assert_eq!(a("p").negated().negated().to_string(), "~~p");
    }

    #[test]
    fn literal_view() {
        assert_eq!(a("p").as_literal(), Some(("p", true)));
        assert_eq!(a("p").negated().as_literal(), Some(("p", false)));
        assert_eq!(a("p").negated().negated().as_literal(), None);
    }
}
