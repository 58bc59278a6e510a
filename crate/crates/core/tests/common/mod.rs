//! Exhaustive truth-table reference used to cross-check the reasoner, the
//! conflict and diagnosis search, and query classification.
#![allow(dead_code)]

use proptest::prelude::*;
use rand::Rng;
use riodbg_core::{Axiom, DiagnosisProblem, Diagnosis, Formula, KnowledgeBase, Literal};

pub const ATOMS: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

/// All assignments over the atoms of a problem, evaluated once.
pub struct Table {
    atoms: Vec<String>,
    rows: Vec<u32>,
}

impl Table {
    pub fn new<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Self {
        let mut atoms = std::collections::BTreeSet::new();
        for f in formulas {
            atoms.extend(f.atoms().into_iter().map(str::to_owned));
        }
        let atoms: Vec<String> = atoms.into_iter().collect();
        assert!(atoms.len() <= 16, "truth table too large");
        Table { rows: (0..1u32 << atoms.len()).collect(), atoms }
    }

    pub fn for_dpi(dpi: &DiagnosisProblem) -> Self {
        let all: Vec<&Formula> = dpi
            .o
            .formulas()
            .chain(dpi.b.formulas())
            .chain(dpi.p.iter().flatten())
            .chain(dpi.n.iter().flatten())
            .collect();
        Table::new(all)
    }

    fn holds(&self, row: u32, f: &Formula) -> bool {
        f.eval(&|name: &str| match self.atoms.iter().position(|a| a == name) {
            Some(k) => row >> k & 1 == 1,
            None => false,
        })
    }

    /// Rows satisfying every formula.
    pub fn models(&self, kb: &[&Formula]) -> Vec<u32> {
        self.rows.iter().copied().filter(|&row| kb.iter().all(|f| self.holds(row, f))).collect()
    }

    pub fn consistent(&self, kb: &[&Formula]) -> bool {
        !self.models(kb).is_empty()
    }

    /// Formulas mentioning atoms outside the table are evaluated with those
    /// atoms false, which is only sound when the table covers them.
    pub fn entails(&self, kb: &[&Formula], goal: &Formula) -> bool {
        self.models(kb).iter().all(|&row| self.holds(row, goal))
    }

    /// Literals over the table's atoms true in every model.
    pub fn entailed_literals(&self, kb: &[&Formula]) -> Vec<Literal> {
        let models = self.models(kb);
        let mut out = Vec::new();
        for (k, atom) in self.atoms.iter().enumerate() {
            for positive in [true, false] {
                if models.iter().all(|&row| (row >> k & 1 == 1) == positive) {
                    out.push(Literal::new(atom.clone(), positive));
                }
            }
        }
        out.sort();
        out
    }
}

/// Truth-table view of a DPI with one bit per axiom of O.
pub struct DpiTable {
    /// Per model of `B ∪ ⋃P`: the O axioms it satisfies and the N cases it
    /// satisfies in full.
    rows: Vec<(u64, u64)>,
    o_len: usize,
    n_len: usize,
}

impl DpiTable {
    pub fn new(dpi: &DiagnosisProblem) -> Self {
        let t = Table::for_dpi(dpi);
        assert!(dpi.o.len() <= 64 && dpi.n.len() <= 64);
        let background: Vec<&Formula> = dpi.background();
        let rows = t
            .models(&background)
            .into_iter()
            .map(|row| {
                let o = dpi.o.formulas().enumerate().filter(|(_, f)| t.holds(row, f)).fold(0, |m, (i, _)| m | 1 << i);
                let n = dpi
                    .n
                    .iter()
                    .enumerate()
                    .filter(|(_, case)| case.iter().all(|f| t.holds(row, f)))
                    .fold(0, |m, (i, _)| m | 1 << i);
                (o, n)
            })
            .collect();
        DpiTable { rows, o_len: dpi.o.len(), n_len: dpi.n.len() }
    }

    fn kept(&self, removed: u64) -> u64 {
        !removed & ((1u64 << self.o_len) - 1)
    }

    /// `(O \ removed) ∪ B ∪ ⋃P` is consistent and entails no case of N.
    pub fn is_diagnosis_mask(&self, removed: u64) -> bool {
        let kept = self.kept(removed);
        let models: Vec<u64> = self.rows.iter().filter(|(o, _)| o & kept == kept).map(|(_, n)| *n).collect();
        if models.is_empty() {
            return false;
        }
        // Each negative case needs a model where it fails.
        (0..self.n_len).all(|j| models.iter().any(|n| n >> j & 1 == 0))
    }

    pub fn is_diagnosis(&self, d: &Diagnosis) -> bool {
        self.is_diagnosis_mask(mask(d))
    }

    pub fn background_ok(&self) -> bool {
        self.is_diagnosis_mask((1u64 << self.o_len) - 1)
    }

    /// Every subset-minimal diagnosis, in increasing mask order.
    pub fn minimal_diagnoses(&self) -> Vec<Diagnosis> {
        let all = 1u64 << self.o_len;
        let diag: Vec<bool> = (0..all).map(|m| self.is_diagnosis_mask(m)).collect();
        (0..all)
            .filter(|&m| diag[m as usize] && (0..self.o_len).all(|i| m >> i & 1 == 0 || !diag[(m & !(1 << i)) as usize]))
            .map(|m| Diagnosis::new((0..self.o_len).filter(|i| m >> i & 1 == 1).collect()))
            .collect()
    }
}

pub fn mask(d: &Diagnosis) -> u64 {
    d.indices().iter().fold(0, |m, &i| m | 1 << i)
}

/// Random formula over the first `atoms` atom names, at most `depth` deep.
pub fn random_formula(rng: &mut impl Rng, atoms: usize, depth: u32) -> Formula {
    let leaf = |rng: &mut dyn rand::RngCore| {
        let name = ATOMS[rng.random_range(0..atoms)];
        Formula::literal(name, rng.random_bool(0.7))
    };
    if depth == 0 || rng.random_bool(0.3) {
        return leaf(rng);
    }
    let lhs = random_formula(rng, atoms, depth - 1);
    let rhs = random_formula(rng, atoms, depth - 1);
    match rng.random_range(0..6) {
        0 => Formula::and(lhs, rhs),
        1 => Formula::or(lhs, rhs),
        2 => Formula::iff(lhs, rhs),
        3 => lhs.negated(),
        _ => Formula::implies(lhs, rhs),
    }
}

/// A random DPI with `1..=max_axioms` axioms over at most `max_atoms` atoms;
/// the background may be invalid.
pub fn random_dpi(rng: &mut impl Rng, max_axioms: usize, max_atoms: usize) -> DiagnosisProblem {
    let atoms = rng.random_range(2..=max_atoms);
    let o_len = rng.random_range(1..=max_axioms);
    let lit = |rng: &mut dyn rand::RngCore| Formula::literal(ATOMS[rng.random_range(0..atoms)], rng.random_bool(0.6));
    let b_len = rng.random_range(1..=2);
    let facts: Vec<Formula> = (0..b_len).map(|_| lit(rng)).collect();
    // Implications mostly fire from literals derivable so far, so that
    // derivations branch and meet their own complements.
    let mut reachable = facts.clone();
    let o = KnowledgeBase::from_axioms((0..o_len).map(|i| {
        let f = match rng.random_range(0..10) {
            0..=6 => {
                let lhs = if rng.random_bool(0.8) { reachable[rng.random_range(0..reachable.len())].clone() } else { lit(rng) };
                let rhs = if rng.random_bool(0.25) {
                    let target = reachable[rng.random_range(0..reachable.len())].clone();
                    match target {
                        Formula::Not(inner) => *inner,
                        other => other.negated(),
                    }
                } else {
                    lit(rng)
                };
                reachable.push(rhs.clone());
                Formula::implies(lhs, rhs)
            }
            7 => lit(rng),
            _ => random_formula(rng, atoms, 2),
        };
        Axiom::new(format!("ax{}", i + 1), f)
    }))
    .expect("distinct ids");
    let b = KnowledgeBase::from_axioms(facts.into_iter().enumerate().map(|(i, f)| Axiom::new(format!("b{}", i + 1), f)))
        .expect("distinct ids");
    let mut dpi = DiagnosisProblem::new(o, b);
    let case = |rng: &mut dyn rand::RngCore| {
        let len = rng.random_range(1..=2);
        (0..len).map(|_| Formula::literal(ATOMS[rng.random_range(0..atoms)], rng.random_bool(0.6))).collect::<Vec<_>>()
    };
    for _ in 0..rng.random_range(0..=1) {
        dpi.p.push(case(rng));
    }
    for _ in 0..rng.random_range(0..=2) {
        dpi.n.push(case(rng));
    }
    dpi
}

/// Proptest strategy for formulas over `atoms` atoms.
pub fn formula(atoms: usize) -> impl Strategy<Value = Formula> {
    let leaf = (0..atoms, any::<bool>()).prop_map(|(k, pos)| Formula::literal(ATOMS[k], pos));
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::negated),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::implies(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Formula::iff(l, r)),
        ]
    })
}

/// Proptest strategy for DPIs, driven by a seed for [`random_dpi`].
pub fn dpi(max_axioms: usize, max_atoms: usize) -> impl Strategy<Value = DiagnosisProblem> {
    any::<u64>().prop_map(move |seed| {
        use rand::SeedableRng;
        random_dpi(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed), max_axioms, max_atoms)
    })
}
