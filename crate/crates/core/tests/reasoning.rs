//! Reasoner, QuickXPlain, HS-Tree and query classification against
//! exhaustive truth tables.

mod common;

use common::{DpiTable, Table};
use proptest::prelude::*;
use riodbg_core::diagnosis::CompiledDpi;
use riodbg_core::query::{generate_queries_with, partition_with};
use riodbg_core::{
    hstree_diagnoses, leading_diagnoses, quickxplain, AxiomProbs, Block, ConflictStore, Formula, QueryOptions,
    Reasoner,
};

fn refs(fs: &[Formula]) -> Vec<&Formula> {
    fs.iter().collect()
}

fn uniform(len: usize) -> AxiomProbs {
    AxiomProbs::from_raw(vec![0.05; len])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn consistency_and_entailment_match_truth_tables(
        kb in prop::collection::vec(common::formula(5), 0..6),
        goal in common::formula(5),
    ) {
        let mut all = refs(&kb);
        all.push(&goal);
        let t = Table::new(all);
        let mut r = Reasoner::new();
        let ids = r.intern_all(&kb);
        prop_assert_eq!(r.is_consistent(&ids), t.consistent(&refs(&kb)));
        prop_assert_eq!(r.entails(&ids, &goal), t.entails(&refs(&kb), &goal));
    }

    #[test]
    fn entailment_is_monotone(
        kb in prop::collection::vec(common::formula(4), 0..5),
        extra in prop::collection::vec(common::formula(4), 0..3),
        goal in common::formula(4),
    ) {
        let mut r = Reasoner::new();
        let small = r.intern_all(&kb);
        let mut large = small.clone();
        large.extend(r.intern_all(&extra));
        if r.entails(&small, &goal) {
            prop_assert!(r.entails(&large, &goal));
        }
    }

    #[test]
    fn entailed_literals_match_truth_tables(kb in prop::collection::vec(common::formula(5), 1..6)) {
        let t = Table::new(refs(&kb));
        let mut r = Reasoner::new();
        let ids = r.intern_all(&kb);
        let atoms: Vec<&str> = common::ATOMS[..5].to_vec();
        match r.entailed_literals(&ids, atoms.iter().copied()) {
            Ok(found) => {
                prop_assert!(t.consistent(&refs(&kb)));
                // Atoms missing from the KB are entailed in neither polarity.
                let expected = t.entailed_literals(&refs(&kb));
                prop_assert_eq!(found.into_iter().collect::<Vec<_>>(), expected);
            }
            Err(_) => prop_assert!(!t.consistent(&refs(&kb))),
        }
    }

    #[test]
    fn quickxplain_returns_minimal_conflicts(
        background in prop::collection::vec(common::formula(4), 0..3),
        candidates in prop::collection::vec(common::formula(4), 1..8),
    ) {
        let mut all = refs(&background);
        all.extend(refs(&candidates));
        let t = Table::new(all.clone());
        let mut r = Reasoner::new();
        let b = r.intern_all(&background);
        let c = r.intern_all(&candidates);
        match quickxplain(&mut r, &b, &c) {
            Err(_) => prop_assert!(!t.consistent(&refs(&background))),
            Ok(None) => prop_assert!(t.consistent(&all)),
            Ok(Some(conflict)) => {
                let with = |skip: Option<usize>| {
                    let mut kb = refs(&background);
                    kb.extend(conflict.iter().filter(|&&i| Some(i) != skip).map(|&i| &candidates[i]));
                    kb
                };
                prop_assert!(!t.consistent(&with(None)));
                for &i in &conflict {
                    prop_assert!(t.consistent(&with(Some(i))), "dropping {} keeps the conflict", i);
                }
            }
        }
    }

}

// Random DPIs are often consistent; more cases keep the conflicting ones
// well represented.
proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn hstree_finds_exactly_the_minimal_diagnoses(dpi in common::dpi(8, 6)) {
        let table = DpiTable::new(&dpi);
        let pax = uniform(dpi.o.len());
        match leading_diagnoses(&dpi, usize::MAX, &pax) {
            Err(_) => prop_assert!(!table.background_ok()),
            Ok(mut found) => {
                found.sort();
                let mut expected = table.minimal_diagnoses();
                expected.sort();
                prop_assert_eq!(found, expected);
            }
        }
    }

    #[test]
    fn hstree_orders_by_prior_and_truncates(dpi in common::dpi(8, 6), raw in prop::collection::vec(0.001f64..0.999, 8), n in 1usize..5) {
        let pax = AxiomProbs::from_raw(raw[..dpi.o.len()].to_vec());
        let Ok(all) = leading_diagnoses(&dpi, usize::MAX, &pax) else { return Ok(()) };
        let top = leading_diagnoses(&dpi, n, &pax).unwrap();
        let cost = |d: &riodbg_core::Diagnosis| -riodbg_core::diagnosis_prob(d, &pax).ln();
        prop_assert_eq!(top.len(), all.len().min(n));
        for w in all.windows(2) {
            prop_assert!(cost(&w[0]) <= cost(&w[1]) + 1e-9);
        }
        // The truncated search returns a most probable prefix, up to ties.
        let cutoff = all.get(n - 1).map(cost);
        for d in &top {
            prop_assert!(all.contains(d));
            if let Some(cutoff) = cutoff {
                prop_assert!(cost(d) <= cutoff + 1e-9);
            }
        }
    }

    #[test]
    fn reused_conflicts_do_not_change_results(dpi in common::dpi(8, 6), case in common::formula(3)) {
        let pax = uniform(dpi.o.len());
        let mut r = Reasoner::new();
        let mut store = ConflictStore::new();
        let Ok(first) = hstree_diagnoses(&mut r, &dpi, usize::MAX, &pax, &[], &mut store) else { return Ok(()) };
        let mut next = dpi.clone();
        next.n.push(vec![case]);
        let reused = hstree_diagnoses(&mut r, &next, usize::MAX, &pax, &first, &mut store);
        let fresh = leading_diagnoses(&next, usize::MAX, &pax);
        match (reused, fresh) {
            (Ok(mut a), Ok(mut b)) => {
                a.sort();
                b.sort();
                prop_assert_eq!(a, b);
            }
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }

    #[test]
    fn catalog_partitions_reverify(dpi in common::dpi(8, 6), implications in any::<bool>()) {
        let pax = uniform(dpi.o.len());
        let Ok(diagnoses) = leading_diagnoses(&dpi, 9, &pax) else { return Ok(()) };
        let mut r = Reasoner::new();
        let opts = QueryOptions { implications };
        let catalog = generate_queries_with(&mut r, &dpi, &diagnoses, &opts).unwrap();
        let t = Table::for_dpi(&dpi);
        let c = CompiledDpi::new(&mut r, &dpi);
        let mut seen = std::collections::BTreeSet::new();
        for q in &catalog {
            prop_assert!(!q.axioms.is_empty());
            prop_assert!(!q.partition.dx.is_empty() && !q.partition.dnx.is_empty());
            prop_assert_eq!(q.partition.len(), diagnoses.len());
            prop_assert!(seen.insert(q.partition.clone()), "duplicate partition");
            for (i, d) in diagnoses.iter().enumerate() {
                let star = riodbg_core::query::o_star(&dpi, d);
                let mut joint = refs(&star);
                joint.extend(refs(&q.axioms));
                let expected = if q.axioms.iter().all(|x| t.entails(&refs(&star), x)) {
                    Block::Dx
                } else if !t.consistent(&joint) {
                    Block::Dnx
                } else {
                    Block::Dz
                };
                prop_assert_eq!(q.partition.block_of(i), Some(expected));
            }
            let ids = r.intern_all(&q.axioms);
            prop_assert_eq!(&partition_with(&mut r, &c, &diagnoses, &ids), &q.partition);
        }
    }
}
