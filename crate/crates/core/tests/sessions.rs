//! Session loop properties under simulated oracles.

mod common;

use std::collections::BTreeMap;

use common::DpiTable;
use proptest::prelude::*;
use riodbg_core::session::StepOutcome;
use riodbg_core::{
    run_session, Answer, DiagnosisProblem, FaultPriors, Session, SessionConfig, SessionError,
    SimulatedOracle, StrategyKind,
};

fn strategy() -> impl Strategy<Value = StrategyKind> {
    prop::sample::select(StrategyKind::ALL.to_vec())
}

fn config(dpi: &DiagnosisProblem, kind: StrategyKind, raw: &[f64], n: usize, sigma: f64) -> SessionConfig {
    let probs: BTreeMap<String, f64> = dpi.o.iter().zip(raw).map(|(ax, &p)| (ax.id.clone(), p)).collect();
    let mut config = SessionConfig::new(kind, FaultPriors::Axiom { probs, default: None });
    config.n = n;
    config.sigma = sigma;
    config
}

/// A conflicting DPI, one of its minimal diagnoses as target, and priors.
fn scenario() -> impl Strategy<Value = (DiagnosisProblem, usize, Vec<f64>)> {
    (common::dpi(9, 6), any::<prop::sample::Index>(), prop::collection::vec(0.001f64..0.5, 9)).prop_filter_map(
        "needs at least two minimal diagnoses",
        |(dpi, pick, raw)| {
            let table = DpiTable::new(&dpi);
            if !table.background_ok() {
                return None;
            }
            let all = table.minimal_diagnoses();
            (all.len() >= 2).then(|| {
                let target = pick.index(all.len());
                (dpi, target, raw)
            })
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn stepping_replays_run_session((dpi, target, raw) in scenario(), kind in strategy(), n in 2usize..6) {
        let target = DpiTable::new(&dpi).minimal_diagnoses().swap_remove(target);
        let config = config(&dpi, kind, &raw, n, 0.85);
        let mut oracle = SimulatedOracle::for_dpi(&dpi, &target);
        let reference = match run_session(dpi.clone(), config.clone(), &mut oracle) {
            Ok((_, trace)) => trace,
            Err(failure) => failure.trace,
        };
        let mut again = SimulatedOracle::for_dpi(&dpi, &target);
        let repeat = match run_session(dpi.clone(), config.clone(), &mut again) {
            Ok((_, trace)) => trace,
            Err(failure) => failure.trace,
        };
        prop_assert_eq!(repeat.to_jsonl_untimed(), reference.to_jsonl_untimed());

        let answers: Vec<Answer> = reference.rounds.iter().map(|r| r.answer).collect();
        let Ok(mut session) = Session::start(dpi, config) else { return Ok(()) };
        for answer in answers {
            let id = session.pending().expect("pending query").id;
            match session.step(id, answer) {
                Ok(StepOutcome::Accepted(_)) | Err(_) => break,
                Ok(StepOutcome::Query(_)) => {}
            }
        }
        prop_assert_eq!(session.trace().to_jsonl_untimed(), reference.to_jsonl_untimed());
        // Whatever is accepted satisfies every accumulated test case.
        if let Some(found) = session.result() {
            prop_assert!(DpiTable::new(session.dpi()).is_diagnosis(found));
        }
    }

    #[test]
    fn simulated_oracle_keeps_the_target((dpi, target, raw) in scenario(), kind in strategy(), n in 2usize..6) {
        let target = DpiTable::new(&dpi).minimal_diagnoses().swap_remove(target);
        // With sigma = 1 only a single remaining diagnosis stops the loop.
        let config = config(&dpi, kind, &raw, n, 1.0);
        let mut oracle = SimulatedOracle::for_dpi(&dpi, &target);
        let (p0, n0) = (dpi.p.len(), dpi.n.len());
        let mut session = match Session::start(dpi, config) {
            Ok(session) => session,
            Err(failure) => {
                prop_assert!(matches!(failure.error, SessionError::EmptyCatalog(_)), "{}", failure);
                return Ok(());
            }
        };
        loop {
            prop_assert!(DpiTable::new(session.dpi()).is_diagnosis(&target));
            if let Some(found) = session.result() {
                prop_assert_eq!(found, &target);
                prop_assert_eq!(session.history().len(), session.trace().queries());
                let added = session.dpi().p.len() + session.dpi().n.len() - p0 - n0;
                prop_assert!(added <= session.trace().queries());
                break;
            }
            let pending = session.pending().unwrap().clone();
            let answer = riodbg_core::Oracle::answer(&mut oracle, &pending.query.axioms);
            match session.step(pending.id, answer) {
                Ok(_) => {}
                // Literal queries cannot always separate the remaining diagnoses.
                Err(SessionError::EmptyCatalog(_)) => break,
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }
}
