//! Text round trips and constructor statistics.

mod common;

use proptest::prelude::*;
use riodbg_core::{parse_dpi, parse_formula, parse_kb, Axiom, Constructor, Formula, KnowledgeBase};

proptest! {
    #[test]
    fn formula_text_round_trips(f in common::formula(5)) {
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn kb_text_round_trips(fs in prop::collection::vec(common::formula(4), 0..6)) {
        let kb = KnowledgeBase::from_axioms(fs.into_iter().enumerate().map(|(i, f)| Axiom::new(format!("ax{i}"), f))).unwrap();
        prop_assert_eq!(parse_kb(&kb.to_text()).unwrap(), kb);
    }

    #[test]
    fn dpi_text_round_trips(dpi in common::dpi(6, 5)) {
        prop_assert_eq!(parse_dpi(&dpi.to_text()).unwrap(), dpi);
    }

    #[test]
    fn constructor_counts_are_additive(l in common::formula(4), r in common::formula(4)) {
        let sum = l.constructor_counts() + r.constructor_counts();
        let cases = [
            (Formula::and(l.clone(), r.clone()), Constructor::And),
            (Formula::or(l.clone(), r.clone()), Constructor::Or),
            (Formula::implies(l.clone(), r.clone()), Constructor::Implies),
            (Formula::iff(l.clone(), r.clone()), Constructor::Iff),
        ];
        for (f, c) in cases {
            let counts = f.constructor_counts();
            prop_assert_eq!(counts, sum.with(c, sum.get(c) + 1));
            prop_assert_eq!(counts.total(), sum.total() + 1);
        }
        let neg = l.clone().negated().constructor_counts();
        prop_assert_eq!(neg.get(Constructor::Not), l.constructor_counts().get(Constructor::Not) + 1);
    }
}
