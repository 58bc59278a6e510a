//! Uniform-cost hitting-set tree over minimal conflicts.
//!
//! A node's path set `H` costs `Σ_{ax∈H} ln((1−p)/p)`, so lower cost means
//! higher prior probability. Weights of very likely faults are negative and
//! adding them lowers the cost; nodes are therefore ordered by the bound
//! `Σ_{w<0} w + Σ_{ax∈H} max(w, 0)`, which never decreases along a path and
//! never exceeds the cost of any superset. A node whose set is a diagnosis is
//! re-queued under its exact cost and accepted when popped, if minimal.
//!
//! Ties go to the lexicographically smaller set of KB positions.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};

use super::quickxplain::quickxplain;
use super::{AxiomProbs, CompiledDpi, Diagnosis, DiagnosisError};
use crate::dpi::DiagnosisProblem;
use crate::reasoner::{FormulaId, Reasoner};

/// Minimal conflicts found so far, reusable across calls on the same O.
///
/// A store belongs to one [`Reasoner`]. When the test cases change, stored
/// conflicts are minimized again against the new background before reuse.
#[derive(Clone, Debug, Default)]
pub struct ConflictStore {
    conflicts: Vec<Vec<usize>>,
    background: Vec<FormulaId>,
    negations: Vec<FormulaId>,
}

impl ConflictStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn conflicts(&self) -> &[Vec<usize>] {
        &self.conflicts
    }

    fn add(&mut self, conflict: Vec<usize>) {
        if !self.conflicts.contains(&conflict) {
            self.conflicts.push(conflict);
        }
    }

    fn disjoint_from(&self, h: &Diagnosis) -> Option<&Vec<usize>> {
        self.conflicts.iter().find(|c| c.iter().all(|&i| !h.contains(i)))
    }

    fn refresh(&mut self, r: &mut Reasoner, c: &CompiledDpi) -> Result<(), DiagnosisError> {
        if self.background == c.background && self.negations == c.negations {
            return Ok(());
        }
        let old = std::mem::take(&mut self.conflicts);
        for conflict in old {
            let ids: Vec<FormulaId> = conflict.iter().map(|&i| c.o[i]).collect();
            if let Some(min) = conflict_within(r, c, &ids)? {
                self.add(min.into_iter().map(|p| conflict[p]).collect());
            }
        }
        self.background = c.background.clone();
        self.negations = c.negations.clone();
        Ok(())
    }
}

/// A minimal conflict inside `candidates`: inconsistent with `B ∪ ⋃P`, or
/// entailing some negative test case. Positions into `candidates`.
fn conflict_within(
    r: &mut Reasoner,
    c: &CompiledDpi,
    candidates: &[FormulaId],
) -> Result<Option<Vec<usize>>, DiagnosisError> {
    if let Some(found) = quickxplain(r, &c.background, candidates)? {
        return Ok(Some(found));
    }
    for &neg in &c.negations {
        let mut background = c.background.clone();
        background.push(neg);
        if let Some(found) = quickxplain(r, &background, candidates)? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

struct Entry {
    key: f64,
    goal: bool,
    set: Diagnosis,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Expansions precede goals at equal key so that every equal-cost
    // diagnosis is queued before the first one is accepted.
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .total_cmp(&other.key)
            .then(self.goal.cmp(&other.goal))
            .then_with(|| self.set.cmp(&other.set))
    }
}

struct Costs {
    weights: Vec<f64>,
    negative_sum: f64,
}

impl Costs {
    fn new(pax: &AxiomProbs) -> Self {
        let weights: Vec<f64> = (0..pax.len()).map(|i| pax.weight(i)).collect();
        let negative_sum = weights.iter().filter(|w| **w < 0.0).sum();
        Costs { weights, negative_sum }
    }

    fn exact(&self, h: &Diagnosis) -> f64 {
        h.indices().iter().map(|&i| self.weights[i]).sum()
    }

    fn bound(&self, h: &Diagnosis) -> f64 {
        self.negative_sum + h.indices().iter().map(|&i| self.weights[i].max(0.0)).sum::<f64>()
    }
}

/// Up to `n` most probable minimal diagnoses of `dpi` (`usize::MAX` for all),
/// most probable first. Diagnoses in `previous` that are still diagnoses are
/// kept and the set is refilled from the search.
pub fn hstree_diagnoses(
    r: &mut Reasoner,
    dpi: &DiagnosisProblem,
    n: usize,
    pax: &AxiomProbs,
    previous: &[Diagnosis],
    store: &mut ConflictStore,
) -> Result<Vec<Diagnosis>, DiagnosisError> {
    assert_eq!(pax.len(), dpi.o.len(), "one prior per axiom of O");
    let c = CompiledDpi::new(r, dpi);
    c.check_background(r)?;
    store.refresh(r, &c)?;
    let costs = Costs::new(pax);

    let mut accepted: Vec<Diagnosis> = Vec::new();
    for d in previous {
        if !accepted.contains(d) && c.is_diagnosis(r, d) {
            accepted.push(d.clone());
        }
    }
    accepted.sort_by(|a, b| costs.exact(a).total_cmp(&costs.exact(b)).then_with(|| a.cmp(b)));
    accepted.truncate(n);

    let covered = |accepted: &[Diagnosis], h: &Diagnosis| accepted.iter().any(|a| a.is_subset(h));
    let mut heap = BinaryHeap::new();
    let mut visited: HashSet<Diagnosis> = HashSet::new();
    let root = Diagnosis::empty();
    heap.push(Reverse(Entry { key: costs.bound(&root), goal: false, set: root }));

    while accepted.len() < n {
        let Some(Reverse(entry)) = heap.pop() else { break };
        let h = entry.set;
        if covered(&accepted, &h) {
            continue;
        }
        if entry.goal {
            if h.indices().iter().all(|&i| !c.is_diagnosis(r, &h.without(i))) {
                accepted.push(h);
            }
            continue;
        }
        if !visited.insert(h.clone()) {
            continue;
        }
        let conflict = match store.disjoint_from(&h) {
            Some(known) => known.clone(),
            None => {
                let rest: Vec<usize> = (0..c.o.len()).filter(|&i| !h.contains(i)).collect();
                let ids: Vec<FormulaId> = rest.iter().map(|&i| c.o[i]).collect();
                match conflict_within(r, &c, &ids)? {
                    Some(found) => {
                        let conflict: Vec<usize> = found.into_iter().map(|p| rest[p]).collect();
                        store.add(conflict.clone());
                        conflict
                    }
                    None => {
                        heap.push(Reverse(Entry { key: costs.exact(&h), goal: true, set: h }));
                        continue;
                    }
                }
            }
        };
        for &i in &conflict {
            let child = h.with(i);
            if !visited.contains(&child) && !covered(&accepted, &child) {
                heap.push(Reverse(Entry { key: costs.bound(&child), goal: false, set: child }));
            }
        }
    }

    accepted.sort_by(|a, b| costs.exact(a).total_cmp(&costs.exact(b)).then_with(|| a.cmp(b)));
    Ok(accepted)
}

/// [`hstree_diagnoses`] with a fresh reasoner and no previous diagnoses.
pub fn leading_diagnoses(
    dpi: &DiagnosisProblem,
    n: usize,
    pax: &AxiomProbs,
) -> Result<Vec<Diagnosis>, DiagnosisError> {
    hstree_diagnoses(&mut Reasoner::new(), dpi, n, pax, &[], &mut ConflictStore::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnosis::tests::EXAMPLE1_DPI;
    use crate::dpi::parse_dpi;
    use crate::kb::parse_formula;

    fn singles(indices: &[usize]) -> Vec<Diagnosis> {
        indices.iter().map(|&i| Diagnosis::new(vec![i])).collect()
    }

    fn uniform(len: usize) -> AxiomProbs {
        AxiomProbs::from_raw(vec![0.01; len])
    }

    fn example3() -> AxiomProbs {
        AxiomProbs::from_raw(vec![0.001, 0.001, 0.001, 0.001, 0.1, 0.15])
    }

    #[test]
    fn example1_minimal_diagnoses() {
        let dpi = parse_dpi(EXAMPLE1_DPI).unwrap();
        let found = leading_diagnoses(&dpi, 9, &uniform(6)).unwrap();
        assert_eq!(found, singles(&[0, 1, 2, 3, 4, 5]));
    }

    #[test]
    fn consistent_dpi_yields_empty_diagnosis() {
        let dpi = parse_dpi("[O]\na: p -> q\n[B]\nb: p\n").unwrap();
        assert_eq!(leading_diagnoses(&dpi, 9, &uniform(1)).unwrap(), vec![Diagnosis::empty()]);
    }

    #[test]
    fn example3_priors_rank_leading_pair() {
        let dpi = parse_dpi(EXAMPLE1_DPI).unwrap();
        let found = leading_diagnoses(&dpi, 2, &example3()).unwrap();
        assert_eq!(found, singles(&[5, 4]));
        let all = leading_diagnoses(&dpi, usize::MAX, &example3()).unwrap();
        assert_eq!(all, singles(&[5, 4, 0, 1, 2, 3]));
    }

    #[test]
    fn negative_test_cases_prune() {
        let mut dpi = parse_dpi(EXAMPLE1_DPI).unwrap();
        // Keeping researcher unentailed forces ax1 or ax5 out.
        dpi.n.push(vec![parse_formula("researcher").unwrap()]);
        let found = leading_diagnoses(&dpi, usize::MAX, &uniform(6)).unwrap();
        assert_eq!(found, singles(&[0, 4]));
    }

    #[test]
    fn likely_faults_with_negative_weights() {
        // Both axioms very likely faulty: the non-minimal {a, b} is cheaper
        // than either singleton but must not be returned.
        let dpi = parse_dpi("[O]\na: p\nb: ~p\n").unwrap();
        let pax = AxiomProbs::from_raw(vec![0.9, 0.8]);
        assert_eq!(leading_diagnoses(&dpi, 9, &pax).unwrap(), singles(&[0, 1]));
    }

    #[test]
    fn retains_previous_and_reuses_conflicts() {
        let mut dpi = parse_dpi(EXAMPLE1_DPI).unwrap();
        let mut r = Reasoner::new();
        let mut store = ConflictStore::new();
        let first = hstree_diagnoses(&mut r, &dpi, 2, &example3(), &[], &mut store).unwrap();
        assert_eq!(first, singles(&[5, 4]));
        assert_eq!(store.conflicts(), &[vec![0, 1, 2, 3, 4, 5]]);
        // deptemployee is true: eliminates the diagnoses cutting the chain to it.
        dpi.p.push(vec![parse_formula("deptemployee").unwrap()]);
        let second = hstree_diagnoses(&mut r, &dpi, 3, &example3(), &first, &mut store).unwrap();
        assert_eq!(second, singles(&[5, 2, 3]));
        assert!(store.conflicts().contains(&vec![2, 3, 5]));
    }

    #[test]
    fn rejects_unrepairable_dpi() {
        let dpi = parse_dpi("[O]\na: q\n[B]\nb: p\n[N]\np\n").unwrap();
        assert_eq!(
            leading_diagnoses(&dpi, 9, &uniform(1)),
            Err(DiagnosisError::NegativeEntailedByBackground { index: 0 })
        );
    }
}
