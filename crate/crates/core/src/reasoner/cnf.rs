//! Clausal form of formulas.
//!
//! Small formulas are distributed directly into CNF. Larger ones fall back to a
//! polarity-aware definitional encoding with auxiliary variables numbered from
//! [`AUX_BASE`]; the caller renames those per formula instance.

use super::sat::Lit;
use crate::formula::Formula;

pub(crate) const AUX_BASE: u32 = 1 << 28;
const DISTRIBUTION_LIMIT: usize = 32;

enum Nnf {
    Lit(Lit),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
}

fn push_flat(into: &mut Vec<Nnf>, node: Nnf, conjunctive: bool) {
    match node {
        Nnf::And(parts) if conjunctive => into.extend(parts),
        Nnf::Or(parts) if !conjunctive => into.extend(parts),
        other => into.push(other),
    }
}

fn junction(conjunctive: bool, a: Nnf, b: Nnf) -> Nnf {
    let mut parts = Vec::new();
    push_flat(&mut parts, a, conjunctive);
    push_flat(&mut parts, b, conjunctive);
    if conjunctive {
        Nnf::And(parts)
    } else {
        Nnf::Or(parts)
    }
}

fn nnf(f: &Formula, positive: bool, atom: &mut impl FnMut(&str) -> u32) -> Nnf {
    match f {
        Formula::Atom(name) => Nnf::Lit(Lit::new(atom(name), positive)),
        Formula::Not(inner) => nnf(inner, !positive, atom),
        Formula::And(l, r) => {
            let (a, b) = (nnf(l, positive, atom), nnf(r, positive, atom));
            junction(positive, a, b)
        }
        Formula::Or(l, r) => {
            let (a, b) = (nnf(l, positive, atom), nnf(r, positive, atom));
            junction(!positive, a, b)
        }
        Formula::Implies(l, r) => {
            let (a, b) = (nnf(l, !positive, atom), nnf(r, positive, atom));
            junction(!positive, a, b)
        }
        Formula::Iff(l, r) => {
            // positive: (~l | r) & (l | ~r); negative: (l | r) & (~l | ~r)
            let first = junction(false, nnf(l, false, atom), nnf(r, positive, atom));
            let second = junction(false, nnf(l, true, atom), nnf(r, !positive, atom));
            junction(true, first, second)
        }
    }
}

fn distribute(node: &Nnf) -> Option<Vec<Vec<Lit>>> {
    match node {
        Nnf::Lit(l) => Some(vec![vec![*l]]),
        Nnf::And(parts) => {
            let mut out = Vec::new();
            for p in parts {
                out.extend(distribute(p)?);
                if out.len() > DISTRIBUTION_LIMIT {
                    return None;
                }
            }
            Some(out)
        }
        Nnf::Or(parts) => {
            let mut acc: Vec<Vec<Lit>> = vec![Vec::new()];
            for p in parts {
                let sub = distribute(p)?;
                if acc.len() * sub.len() > DISTRIBUTION_LIMIT {
                    return None;
                }
                acc = acc
                    .iter()
                    .flat_map(|a| {
                        sub.iter().map(move |s| {
                            let mut c = a.clone();
                            c.extend(s);
                            c
                        })
                    })
                    .collect();
            }
            Some(acc)
        }
    }
}

fn define(node: &Nnf, aux: &mut u32, out: &mut Vec<Vec<Lit>>) -> Lit {
    match node {
        Nnf::Lit(l) => *l,
        Nnf::And(parts) => {
            let x = Lit::new(AUX_BASE + *aux, true);
            *aux += 1;
            for p in parts {
                let child = define(p, aux, out);
                out.push(vec![x.negate(), child]);
            }
            x
        }
        Nnf::Or(parts) => {
            let x = Lit::new(AUX_BASE + *aux, true);
            *aux += 1;
            let mut clause = vec![x.negate()];
            for p in parts {
                clause.push(define(p, aux, out));
            }
            out.push(clause);
            x
        }
    }
}

/// Drops tautologies and repeated literals.
fn normalize(clauses: Vec<Vec<Lit>>) -> Vec<Vec<Lit>> {
    clauses
        .into_iter()
        .filter_map(|mut c| {
            c.sort_unstable();
            c.dedup();
            let tautology = c.windows(2).any(|w| w[0].var() == w[1].var());
            (!tautology).then_some(c)
        })
        .collect()
}

/// Clauses for `f` plus the number of auxiliary variables they use.
pub(crate) fn clausify(f: &Formula, atom: &mut impl FnMut(&str) -> u32) -> (Vec<Vec<Lit>>, u32) {
    let root = nnf(f, true, atom);
    if let Some(clauses) = distribute(&root) {
        return (normalize(clauses), 0);
    }
    let mut out = Vec::new();
    let mut aux = 0;
    let roots = match root {
        Nnf::And(parts) => parts,
        other => vec![other],
    };
    for r in &roots {
        match distribute(r) {
            Some(clauses) => out.extend(clauses),
            None => {
                let top = define(r, &mut aux, &mut out);
                out.push(vec![top]);
            }
        }
    }
    (normalize(out), aux)
}
