//! Diagnoses, fault priors, minimal conflicts and the leading-diagnosis search.

mod hstree;
mod priors;
mod quickxplain;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dpi::DiagnosisProblem;
use crate::formula::Formula;
use crate::kb::KnowledgeBase;
use crate::reasoner::{FormulaId, Reasoner};

pub use hstree::{hstree_diagnoses, leading_diagnoses, ConflictStore};
pub use priors::{axiom_fault_prob, diagnosis_prob, parse_priors, AxiomProbs, FaultPriors, PriorError, P_MAX, P_MIN};
pub use quickxplain::{quickxplain, quickxplain_formulas};

/// A set of axioms of O, stored as sorted positions in the KB.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Diagnosis(Vec<usize>);

impl Diagnosis {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Diagnosis(indices)
    }

    pub fn empty() -> Self {
        Diagnosis(Vec::new())
    }

    /// Resolves axiom ids against `o`; `None` if an id is unknown.
    pub fn from_ids<S: AsRef<str>>(o: &KnowledgeBase, ids: &[S]) -> Option<Self> {
        ids.iter()
            .map(|id| o.position(id.as_ref()))
            .collect::<Option<Vec<_>>>()
            .map(Diagnosis::new)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    pub fn is_subset(&self, other: &Diagnosis) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    pub fn ids<'a>(&self, o: &'a KnowledgeBase) -> Vec<&'a str> {
        self.0.iter().map(|&i| o.axioms()[i].id.as_str()).collect()
    }

    /// `[ax1, ax5]`
    pub fn render(&self, o: &KnowledgeBase) -> String {
        format!("[{}]", self.ids(o).join(", "))
    }

    pub(crate) fn with(&self, index: usize) -> Diagnosis {
        let mut next = self.0.clone();
        if let Err(pos) = next.binary_search(&index) {
            next.insert(pos, index);
        }
        Diagnosis(next)
    }

    pub(crate) fn without(&self, index: usize) -> Diagnosis {
        Diagnosis(self.0.iter().copied().filter(|&i| i != index).collect())
    }
}

impl fmt::Display for Diagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagnosisError {
    #[error("the background B together with the positive test cases is inconsistent")]
    InconsistentBackground,
    #[error("negative test case #{index} is already entailed by the background and positive test cases")]
    NegativeEntailedByBackground { index: usize },
}

/// A DPI with every formula interned in a reasoner.
pub struct CompiledDpi {
    pub o: Vec<FormulaId>,
    /// `B ∪ ⋃P`
    pub background: Vec<FormulaId>,
    /// One `~(n1 & ... & nk)` per negative test case.
    pub negations: Vec<FormulaId>,
}

impl CompiledDpi {
    pub fn new(r: &mut Reasoner, dpi: &DiagnosisProblem) -> Self {
        let o = r.intern_all(dpi.o.formulas());
        let background = r.intern_all(dpi.background());
        let negations = dpi
            .n
            .iter()
            .map(|case| {
                let conj = Formula::conjunction(case.iter().cloned()).expect("test cases are nonempty");
                r.intern(&conj.negated())
            })
            .collect();
        CompiledDpi { o, background, negations }
    }

    /// `O*_d = (O \ d) ∪ B ∪ ⋃P`
    pub fn o_star(&self, d: &Diagnosis) -> Vec<FormulaId> {
        let mut out: Vec<FormulaId> = self
            .o
            .iter()
            .enumerate()
            .filter(|(i, _)| !d.contains(*i))
            .map(|(_, &id)| id)
            .collect();
        out.extend_from_slice(&self.background);
        out
    }

    /// Checks that some diagnosis exists at all.
    pub fn check_background(&self, r: &mut Reasoner) -> Result<(), DiagnosisError> {
        if !r.is_consistent(&self.background) {
            return Err(DiagnosisError::InconsistentBackground);
        }
        for (index, &neg) in self.negations.iter().enumerate() {
            let mut set = self.background.clone();
            set.push(neg);
            if !r.is_consistent(&set) {
                return Err(DiagnosisError::NegativeEntailedByBackground { index });
            }
        }
        Ok(())
    }

    /// Whether removing `d` makes O comply with consistency and every negative test case.
    pub fn is_diagnosis(&self, r: &mut Reasoner, d: &Diagnosis) -> bool {
        let mut kb = self.o_star(d);
        if !r.is_consistent(&kb) {
            return false;
        }
        for &neg in &self.negations {
            kb.push(neg);
            let ok = r.is_consistent(&kb);
            kb.pop();
            if !ok {
                return false;
            }
        }
        true
    }

    /// Diagnosis with no diagnosis as proper subset. Diagnosis-hood is upward
    /// closed, so dropping single axioms suffices.
    pub fn is_minimal_diagnosis(&self, r: &mut Reasoner, d: &Diagnosis) -> bool {
        self.is_diagnosis(r, d) && d.indices().iter().all(|&i| !self.is_diagnosis(r, &d.without(i)))
    }
}
