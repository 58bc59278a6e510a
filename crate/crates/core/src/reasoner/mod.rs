//! Propositional consistency and entailment.
//!
//! [`Reasoner`] interns formulas, compiles each once to clauses, and caches
//! consistency verdicts per formula set. The free functions wrap a throwaway
//! reasoner for one-off checks.

mod cnf;
mod sat;

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::formula::{Formula, Literal};
use cnf::AUX_BASE;
use sat::Lit;

/// Handle of a formula interned in a [`Reasoner`].
pub type FormulaId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReasonerError {
    #[error("the axiom set is inconsistent, so every literal would be entailed")]
    Inconsistent,
}

struct Compiled {
    clauses: Vec<Vec<Lit>>,
    aux: u32,
}

/// Number of SAT searches run and cache hits served.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReasonerStats {
    pub sat_calls: u64,
    pub cache_hits: u64,
}

/// A truth assignment over the reasoner's atoms.
#[derive(Clone, Debug)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    fn value(&self, var: u32) -> bool {
        self.values.get(var as usize).copied().unwrap_or(false)
    }
}

#[derive(Default)]
pub struct Reasoner {
    atom_index: HashMap<String, u32>,
    atom_names: Vec<String>,
    formula_index: HashMap<Formula, FormulaId>,
    formulas: Vec<Formula>,
    compiled: Vec<Compiled>,
    formula_atoms: Vec<Vec<u32>>,
    consistency: HashMap<Vec<FormulaId>, bool>,
    stats: ReasonerStats,
}

impl Reasoner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stats(&self) -> ReasonerStats {
        self.stats
    }

    pub fn intern(&mut self, f: &Formula) -> FormulaId {
        if let Some(&id) = self.formula_index.get(f) {
            return id;
        }
        let mut atom_index = std::mem::take(&mut self.atom_index);
        let mut atom_names = std::mem::take(&mut self.atom_names);
        let (clauses, aux) = cnf::clausify(f, &mut |name| {
            if let Some(&v) = atom_index.get(name) {
                return v;
            }
            let v = atom_names.len() as u32;
            atom_names.push(name.to_owned());
            atom_index.insert(name.to_owned(), v);
            v
        });
        self.atom_index = atom_index;
        self.atom_names = atom_names;
        let mut atoms: Vec<u32> = f.atoms().into_iter().map(|a| self.atom_index[a]).collect();
        atoms.sort_unstable();
        let id = self.formulas.len() as FormulaId;
        self.formulas.push(f.clone());
        self.compiled.push(Compiled { clauses, aux });
        self.formula_atoms.push(atoms);
        self.formula_index.insert(f.clone(), id);
        id
    }

    pub fn intern_all<'a>(&mut self, fs: impl IntoIterator<Item = &'a Formula>) -> Vec<FormulaId> {
        fs.into_iter().map(|f| self.intern(f)).collect()
    }

    pub fn formula(&self, id: FormulaId) -> &Formula {
        &self.formulas[id as usize]
    }

    fn key(ids: &[FormulaId]) -> Vec<FormulaId> {
        let mut key = ids.to_vec();
        key.sort_unstable();
        key.dedup();
        key
    }

    /// Runs the solver on the sorted, deduplicated set `key`.
    fn solve(&mut self, key: &[FormulaId]) -> Option<Model> {
        self.stats.sat_calls += 1;
        let mut compact: HashMap<u32, u32> = HashMap::new();
        let mut next = 0u32;
        let mut clauses = Vec::new();
        for &id in key {
            let c = &self.compiled[id as usize];
            let aux_base = next;
            next += c.aux;
            for clause in &c.clauses {
                let mapped = clause
                    .iter()
                    .map(|l| {
                        let v = l.var();
                        let var = if v >= AUX_BASE {
                            aux_base + (v - AUX_BASE)
                        } else {
                            *compact.entry(v).or_insert_with(|| {
                                next += 1;
                                next - 1
                            })
                        };
                        Lit::new(var, l.is_positive())
                    })
                    .collect();
                clauses.push(mapped);
            }
        }
        let assignment = sat::solve(next as usize, &clauses)?;
        let mut values = vec![false; self.atom_names.len()];
        for (global, local) in compact {
            values[global as usize] = assignment[local as usize];
        }
        Some(Model { values })
    }

    fn model_of_key(&mut self, key: Vec<FormulaId>) -> Option<Model> {
        if self.consistency.get(&key) == Some(&false) {
            self.stats.cache_hits += 1;
            return None;
        }
        let model = self.solve(&key);
        self.consistency.insert(key, model.is_some());
        model
    }

    /// Whether the conjunction of `ids` is satisfiable.
    pub fn is_consistent(&mut self, ids: &[FormulaId]) -> bool {
        let key = Self::key(ids);
        if let Some(&known) = self.consistency.get(&key) {
            self.stats.cache_hits += 1;
            return known;
        }
        let verdict = self.solve(&key).is_some();
        self.consistency.insert(key, verdict);
        verdict
    }

    /// A satisfying assignment of `ids`, if any.
    pub fn model(&mut self, ids: &[FormulaId]) -> Option<Model> {
        self.model_of_key(Self::key(ids))
    }

    /// Whether `premises ⊨ conclusion`.
    pub fn entails(&mut self, premises: &[FormulaId], conclusion: &Formula) -> bool {
        let negated = self.intern(&conclusion.clone().negated());
        let mut set = premises.to_vec();
        set.push(negated);
        !self.is_consistent(&set)
    }

    /// [`Reasoner::entails`] for an interned conclusion.
    pub fn entails_id(&mut self, premises: &[FormulaId], conclusion: FormulaId) -> bool {
        let f = self.formulas[conclusion as usize].clone();
        self.entails(premises, &f)
    }

    /// Whether `premises` entail every formula in `conclusions`.
    pub fn entails_all<'a>(
        &mut self,
        premises: &[FormulaId],
        conclusions: impl IntoIterator<Item = &'a Formula>,
    ) -> bool {
        conclusions.into_iter().all(|c| self.entails(premises, c))
    }

    /// All literals over `over` entailed by `premises`.
    ///
    /// One model fixes the only polarity each atom can be entailed with; every
    /// counter-model found while refuting a candidate also discards the other
    /// candidates it falsifies.
    pub fn entailed_literals<'a>(
        &mut self,
        premises: &[FormulaId],
        over: impl IntoIterator<Item = &'a str>,
    ) -> Result<BTreeSet<Literal>, ReasonerError> {
        let key = Self::key(premises);
        let model = self.model_of_key(key.clone()).ok_or(ReasonerError::Inconsistent)?;
        let mentioned: BTreeSet<u32> = key
            .iter()
            .flat_map(|&id| self.formula_atoms[id as usize].iter().copied())
            .collect();
        let mut candidates: Vec<(String, u32, bool, bool)> = Vec::new();
        for name in over {
            // Atoms absent from the premises are unconstrained.
            let Some(&var) = self.atom_index.get(name) else { continue };
            if mentioned.contains(&var) {
                candidates.push((name.to_owned(), var, model.value(var), true));
            }
        }
        let mut entailed = BTreeSet::new();
        for i in 0..candidates.len() {
            if !candidates[i].3 {
                continue;
            }
            let (name, _, positive, _) = candidates[i].clone();
            let refutation = self.intern(&Formula::literal(name.clone(), !positive));
            let mut set = key.clone();
            set.push(refutation);
            match self.model(&set) {
                None => {
                    entailed.insert(Literal::new(name, positive));
                }
                Some(counter) => {
                    for c in candidates.iter_mut().skip(i) {
                        if counter.value(c.1) != c.2 {
                            c.3 = false;
                        }
                    }
                }
            }
        }
        Ok(entailed)
    }
}

pub fn is_consistent<'a>(axioms: impl IntoIterator<Item = &'a Formula>) -> bool {
    let mut r = Reasoner::new();
    let ids = r.intern_all(axioms);
    r.is_consistent(&ids)
}

pub fn entails<'a>(
    axioms: impl IntoIterator<Item = &'a Formula>,
    conjecture: impl IntoIterator<Item = &'a Formula>,
) -> bool {
    let mut r = Reasoner::new();
    let ids = r.intern_all(axioms);
    r.entails_all(&ids, conjecture)
}

pub fn entailed_literals<'a>(
    axioms: impl IntoIterator<Item = &'a Formula>,
    over: impl IntoIterator<Item = &'a str>,
) -> Result<BTreeSet<Literal>, ReasonerError> {
    let mut r = Reasoner::new();
    let ids = r.intern_all(axioms);
    r.entailed_literals(&ids, over)
}
