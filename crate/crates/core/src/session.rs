//! The interactive debugging loop.
//!
//! Each round computes the leading diagnoses and their probabilities, builds
//! the query catalog, and asks the selected query. The answer becomes a
//! positive or negative test case; RIO then adapts its cautiousness. The
//! session accepts once the best diagnosis leads the runner-up by `σ`, or the
//! last answer eliminated nothing.
//!
//! [`Session`] is re-entrant (one [`Session::step`] per answer) so that the
//! CLI and the HTTP service drive the same state machine as [`run_session`].

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnosis::{
    diagnosis_prob, hstree_diagnoses, AxiomProbs, CompiledDpi, ConflictStore, Diagnosis, DiagnosisError,
    FaultPriors, PriorError,
};
use crate::dpi::{DiagnosisProblem, TestCase};
use crate::formula::Formula;
use crate::kb::KnowledgeBase;
use crate::query::{generate_queries_with, partition_with, Partition, Query, QueryError, QueryOptions};
use crate::reasoner::{FormulaId, Reasoner};
use crate::strategy::{
    elimination_rate, normalize, select_query, update_cautiousness, Answer, CautiousnessState, StrategyError,
    StrategyKind,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub strategy: StrategyKind,
    /// Leading-diagnosis cap.
    pub n: usize,
    /// Acceptance threshold on `p1 − p2`.
    pub sigma: f64,
    pub cautiousness: CautiousnessState,
    pub priors: FaultPriors,
    /// Seed for callers that randomize around a session; the loop itself is deterministic.
    pub seed: u64,
    #[serde(default)]
    pub query_options: QueryOptions,
}

impl SessionConfig {
    /// `n = 9`, `σ = 0.85`, `c = 0.25` in `[0, 4/9]`, `ε = ¼`.
    pub fn new(strategy: StrategyKind, priors: FaultPriors) -> Self {
        SessionConfig {
            strategy,
            n: 9,
            sigma: 0.85,
            cautiousness: CautiousnessState { c: 0.25, c_min: 0.0, c_max: 4.0 / 9.0, epsilon: 0.25 },
            priors,
            seed: 0,
            query_options: QueryOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error(transparent)]
    Priors(#[from] PriorError),
    #[error(transparent)]
    Diagnosis(#[from] DiagnosisError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error("no query separates the {0} remaining diagnoses")]
    EmptyCatalog(usize),
    #[error("every leading diagnosis has probability zero")]
    ZeroMass,
    #[error("oracle answers are inconsistent: {0}")]
    InconsistentOracle(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("the session has no pending query")]
    NoPendingQuery,
    #[error("query {got} is stale; the pending query is {expected}")]
    StaleQuery { expected: u64, got: u64 },
}

impl From<StrategyError> for SessionError {
    fn from(e: StrategyError) -> Self {
        match e {
            StrategyError::ZeroMass => SessionError::ZeroMass,
            StrategyError::EmptyCatalog => SessionError::EmptyCatalog(0),
            StrategyError::InvalidCautiousness(m) => SessionError::InvalidConfig(m),
        }
    }
}

/// A session error together with the rounds completed before it.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{error} (after {} queries)", trace.rounds.len())]
pub struct SessionFailure {
    pub error: SessionError,
    pub trace: SessionTrace,
}

/// Answers queries about the intended knowledge base.
pub trait Oracle {
    fn answer(&mut self, query: &[Formula]) -> Answer;
}

impl<F: FnMut(&[Formula]) -> Answer> Oracle for F {
    fn answer(&mut self, query: &[Formula]) -> Answer {
        self(query)
    }
}

/// Answers `t` iff `(O \ D_t) ∪ B ⊨ X`.
pub struct SimulatedOracle {
    reasoner: Reasoner,
    kb: Vec<FormulaId>,
}

impl SimulatedOracle {
    pub fn new(o: &KnowledgeBase, b: &KnowledgeBase, target: &Diagnosis) -> Self {
        let mut reasoner = Reasoner::new();
        let kept = o.formulas().enumerate().filter(|(i, _)| !target.contains(*i)).map(|(_, f)| f);
        let kb = reasoner.intern_all(kept.chain(b.formulas()));
        SimulatedOracle { reasoner, kb }
    }

    /// Treats the DPI's positive test cases as part of the intended KB:
    /// answers `t` iff `(O \ D_t) ∪ B ∪ ⋃P ⊨ X`.
    pub fn for_dpi(dpi: &DiagnosisProblem, target: &Diagnosis) -> Self {
        let mut oracle = SimulatedOracle::new(&dpi.o, &dpi.b, target);
        let cases = oracle.reasoner.intern_all(dpi.p.iter().flatten());
        oracle.kb.extend(cases);
        oracle
    }
}

impl Oracle for SimulatedOracle {
    fn answer(&mut self, query: &[Formula]) -> Answer {
        Answer::from_bool(self.reasoner.entails_all(&self.kb, query))
    }
}

pub fn simulated_oracle(o: &KnowledgeBase, b: &KnowledgeBase, target: &Diagnosis) -> SimulatedOracle {
    SimulatedOracle::new(o, b, target)
}

/// Appends `x` to P on `t`, to N on `f`; an identical test case is not repeated.
pub fn apply_answer(dpi: &DiagnosisProblem, x: &[Formula], answer: Answer) -> DiagnosisProblem {
    let mut next = dpi.clone();
    let cases = match answer {
        Answer::Yes => &mut next.p,
        Answer::No => &mut next.n,
    };
    if !cases.iter().any(|c| c.as_slice() == x) {
        cases.push(x.to_vec());
    }
    next
}

/// An answered query and the test-case counts in force when it was asked.
#[derive(Clone, Debug, PartialEq)]
pub struct HistoryEntry {
    pub axioms: TestCase,
    pub answer: Answer,
    pub p_len: usize,
    pub n_len: usize,
}

/// Eq.-(1) priors of `diagnoses`, Bayes-conditioned on every recorded answer
/// (each query's partition re-derived against the test cases of its time),
/// then normalized.
pub fn recompute_probabilities(
    r: &mut Reasoner,
    dpi: &DiagnosisProblem,
    diagnoses: &[Diagnosis],
    pax: &AxiomProbs,
    history: &[HistoryEntry],
) -> Result<Vec<f64>, SessionError> {
    let mut weights: Vec<f64> = diagnoses.iter().map(|d| diagnosis_prob(d, pax)).collect();
    for h in history {
        let prefix = DiagnosisProblem {
            o: dpi.o.clone(),
            b: dpi.b.clone(),
            p: dpi.p[..h.p_len].to_vec(),
            n: dpi.n[..h.n_len].to_vec(),
        };
        let c = CompiledDpi::new(r, &prefix);
        let x = r.intern_all(&h.axioms);
        let partition = partition_with(r, &c, diagnoses, &x);
        for (i, w) in weights.iter_mut().enumerate() {
            let agree = match h.answer {
                Answer::Yes => &partition.dx,
                Answer::No => &partition.dnx,
            };
            if partition.dz.contains(&i) {
                *w *= 0.5;
            } else if !agree.contains(&i) {
                *w = 0.0;
            }
        }
    }
    normalize(&weights).map_err(|_| SessionError::ZeroMass)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopDecision {
    Continue,
    Accept,
}

/// Accept when `p1 − p2 ≥ σ` (`p2 = 0` for a single diagnosis) or the last
/// answer eliminated nothing.
pub fn stop_check(probs: &[f64], elim_rate: f64, sigma: f64) -> StopDecision {
    let mut sorted = probs.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let p1 = sorted.first().copied().unwrap_or(0.0);
    let p2 = sorted.get(1).copied().unwrap_or(0.0);
    if p1 - p2 >= sigma || elim_rate == 0.0 {
        StopDecision::Accept
    } else {
        StopDecision::Continue
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosisProbability {
    pub diagnosis: Vec<String>,
    pub p: f64,
}

/// One answered query.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub query_id: u64,
    pub query_axioms: Vec<String>,
    /// `[|DX|, |DNX|, |D∅|]`
    pub partition: [usize; 3],
    pub catalog_size: usize,
    /// Leading diagnoses with probabilities when the query was asked.
    pub probs: Vec<DiagnosisProbability>,
    pub c_before: f64,
    pub c_after: f64,
    pub answer: Answer,
    pub elim_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_react_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepted: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SessionTrace {
    pub rounds: Vec<RoundRecord>,
    pub accepted: Option<Vec<String>>,
    pub debug_ms: f64,
}

impl SessionTrace {
    /// One JSON object per round.
    pub fn to_jsonl(&self) -> String {
        self.render(true)
    }

    /// [`SessionTrace::to_jsonl`] without wall-clock fields, for comparisons.
    pub fn to_jsonl_untimed(&self) -> String {
        self.render(false)
    }

    fn render(&self, timing: bool) -> String {
        let mut out = String::new();
        for round in &self.rounds {
            let mut r = round.clone();
            if !timing {
                r.t_react_ms = None;
            }
            out.push_str(&serde_json::to_string(&r).expect("trace records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn queries(&self) -> usize {
        self.rounds.len()
    }

    pub fn react_ms_mean(&self) -> f64 {
        let times: Vec<f64> = self.rounds.iter().filter_map(|r| r.t_react_ms).collect();
        if times.is_empty() {
            0.0
        } else {
            times.iter().sum::<f64>() / times.len() as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SessionStatus {
    AwaitingAnswer,
    Accepted,
    Failed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PendingQuery {
    pub id: u64,
    pub query: Query,
    pub catalog_size: usize,
    react_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StepOutcome {
    Query(PendingQuery),
    Accepted(Diagnosis),
}

pub struct Session {
    config: SessionConfig,
    dpi: DiagnosisProblem,
    pax: AxiomProbs,
    reasoner: Reasoner,
    store: ConflictStore,
    diagnoses: Vec<Diagnosis>,
    probs: Vec<f64>,
    cautiousness: CautiousnessState,
    history: Vec<HistoryEntry>,
    pending: Option<PendingQuery>,
    status: SessionStatus,
    result: Option<Diagnosis>,
    error: Option<SessionError>,
    trace: SessionTrace,
    next_query_id: u64,
    started: Instant,
}

impl Session {
    pub fn start(dpi: DiagnosisProblem, config: SessionConfig) -> Result<Session, SessionFailure> {
        let fail = |error: SessionError| SessionFailure { error, trace: SessionTrace::default() };
        let started = Instant::now();
        if config.n == 0 {
            return Err(fail(SessionError::InvalidConfig("n must be at least 1".into())));
        }
        if !(config.sigma > 0.0 && config.sigma <= 1.0) {
            return Err(fail(SessionError::InvalidConfig("sigma must lie in (0, 1]".into())));
        }
        let k = config.cautiousness;
        CautiousnessState::new(k.c, k.c_min, k.c_max, k.epsilon).map_err(|e| fail(e.into()))?;
        let pax = AxiomProbs::new(&dpi.o, &config.priors).map_err(|e| fail(e.into()))?;
        let mut session = Session {
            cautiousness: config.cautiousness,
            config,
            dpi,
            pax,
            reasoner: Reasoner::new(),
            store: ConflictStore::new(),
            diagnoses: Vec::new(),
            probs: Vec::new(),
            history: Vec::new(),
            pending: None,
            status: SessionStatus::AwaitingAnswer,
            result: None,
            error: None,
            trace: SessionTrace::default(),
            next_query_id: 1,
            started,
        };
        session.refresh_diagnoses().map_err(fail)?;
        if session.diagnoses.len() == 1 {
            session.accept();
        } else {
            session.prepare_query(started).map_err(fail)?;
        }
        Ok(session)
    }

    fn refresh_diagnoses(&mut self) -> Result<(), SessionError> {
        let previous = std::mem::take(&mut self.diagnoses);
        self.diagnoses = hstree_diagnoses(
            &mut self.reasoner,
            &self.dpi,
            self.config.n,
            &self.pax,
            &previous,
            &mut self.store,
        )?;
        self.probs = recompute_probabilities(&mut self.reasoner, &self.dpi, &self.diagnoses, &self.pax, &self.history)?;
        Ok(())
    }

    fn prepare_query(&mut self, since: Instant) -> Result<(), SessionError> {
        let catalog =
            generate_queries_with(&mut self.reasoner, &self.dpi, &self.diagnoses, &self.config.query_options)?;
        if catalog.is_empty() {
            return Err(SessionError::EmptyCatalog(self.diagnoses.len()));
        }
        let chosen = select_query(self.config.strategy, &catalog, &self.probs, &self.cautiousness)?;
        let catalog_size = catalog.len();
        let query = catalog.into_iter().nth(chosen).expect("selection is in range");
        self.pending = Some(PendingQuery {
            id: self.next_query_id,
            query,
            catalog_size,
            react_ms: since.elapsed().as_secs_f64() * 1e3,
        });
        self.next_query_id += 1;
        Ok(())
    }

    fn accept(&mut self) {
        let best = (0..self.probs.len())
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if self.probs[b] >= self.probs[i] => Some(b),
                _ => Some(i),
            })
            .expect("at least one diagnosis");
        let diagnosis = self.diagnoses[best].clone();
        let ids: Vec<String> = diagnosis.ids(&self.dpi.o).into_iter().map(str::to_owned).collect();
        if let Some(last) = self.trace.rounds.last_mut() {
            last.accepted = Some(ids.clone());
        }
        self.trace.accepted = Some(ids);
        self.trace.debug_ms = self.started.elapsed().as_secs_f64() * 1e3;
        self.result = Some(diagnosis);
        self.status = SessionStatus::Accepted;
        self.pending = None;
    }

    fn fail(&mut self, error: SessionError) -> SessionError {
        self.status = SessionStatus::Failed;
        self.pending = None;
        self.error = Some(error.clone());
        self.trace.debug_ms = self.started.elapsed().as_secs_f64() * 1e3;
        error
    }

    /// Feeds the answer to the pending query `query_id`.
    pub fn step(&mut self, query_id: u64, answer: Answer) -> Result<StepOutcome, SessionError> {
        let since = Instant::now();
        let Some(pending) = self.pending.clone() else {
            return Err(SessionError::NoPendingQuery);
        };
        if pending.id != query_id {
            return Err(SessionError::StaleQuery { expected: pending.id, got: query_id });
        }
        match self.advance(&pending, answer, since) {
            Ok(outcome) => Ok(outcome),
            Err(e) => Err(self.fail(e)),
        }
    }

    fn advance(&mut self, pending: &PendingQuery, answer: Answer, since: Instant) -> Result<StepOutcome, SessionError> {
        let x = &pending.query.axioms;
        if let Some(prev) = self.history.iter().find(|h| &h.axioms == x) {
            if prev.answer != answer {
                return Err(SessionError::InconsistentOracle(format!(
                    "query {} answered both ways",
                    pending.query.rendered().join(", ")
                )));
            }
        }
        let entry = HistoryEntry { axioms: x.clone(), answer, p_len: self.dpi.p.len(), n_len: self.dpi.n.len() };
        let next = apply_answer(&self.dpi, x, answer);
        {
            let c = CompiledDpi::new(&mut self.reasoner, &next);
            if let Err(e) = c.check_background(&mut self.reasoner) {
                return Err(SessionError::InconsistentOracle(e.to_string()));
            }
        }
        self.dpi = next;
        self.history.push(entry);

        let partition: &Partition = &pending.query.partition;
        let size_d = self.diagnoses.len();
        let elim = elimination_rate(partition, answer, size_d);
        let c_before = self.cautiousness.c;
        if self.config.strategy == StrategyKind::Rio {
            self.cautiousness = update_cautiousness(&self.cautiousness, partition, answer, size_d);
        }
        let (dx, dnx, dz) = partition.sizes();
        let probs = self
            .diagnoses
            .iter()
            .zip(&self.probs)
            .map(|(d, &p)| DiagnosisProbability {
                diagnosis: d.ids(&self.dpi.o).into_iter().map(str::to_owned).collect(),
                p,
            })
            .collect();
        self.trace.rounds.push(RoundRecord {
            round: self.trace.rounds.len() + 1,
            query_id: pending.id,
            query_axioms: pending.query.rendered(),
            partition: [dx, dnx, dz],
            catalog_size: pending.catalog_size,
            probs,
            c_before,
            c_after: self.cautiousness.c,
            answer,
            elim_rate: elim,
            t_react_ms: Some(pending.react_ms),
            accepted: None,
        });
        self.pending = None;

        self.refresh_diagnoses()?;
        let stop = self.diagnoses.len() == 1 || stop_check(&self.probs, elim, self.config.sigma) == StopDecision::Accept;
        if stop {
            self.accept();
            return Ok(StepOutcome::Accepted(self.result.clone().expect("accepted")));
        }
        self.prepare_query(since)?;
        Ok(StepOutcome::Query(self.pending.clone().expect("prepared")))
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn dpi(&self) -> &DiagnosisProblem {
        &self.dpi
    }

    pub fn status(&self) -> &SessionStatus {
        &self.status
    }

    pub fn pending(&self) -> Option<&PendingQuery> {
        self.pending.as_ref()
    }

    pub fn diagnoses(&self) -> &[Diagnosis] {
        &self.diagnoses
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn cautiousness(&self) -> &CautiousnessState {
        &self.cautiousness
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    pub fn result(&self) -> Option<&Diagnosis> {
        self.result.as_ref()
    }

    pub fn error(&self) -> Option<&SessionError> {
        self.error.as_ref()
    }

    pub fn trace(&self) -> &SessionTrace {
        &self.trace
    }

    pub fn axiom_probs(&self) -> &AxiomProbs {
        &self.pax
    }
}

/// Runs a session to completion against `oracle`.
pub fn run_session(
    dpi: DiagnosisProblem,
    config: SessionConfig,
    oracle: &mut dyn Oracle,
) -> Result<(Diagnosis, SessionTrace), SessionFailure> {
    let mut session = Session::start(dpi, config)?;
    loop {
        if let Some(d) = session.result() {
            return Ok((d.clone(), session.trace().clone()));
        }
        let pending = session.pending().expect("an unfinished session has a pending query").clone();
        let answer = oracle.answer(&pending.query.axioms);
        if let Err(error) = session.step(pending.id, answer) {
            return Err(SessionFailure { error, trace: session.trace().clone() });
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::dpi::parse_dpi;
    use crate::kb::parse_formula;

    const EXAMPLE1_DPI: &str = "\
[O]
ax1: phd -> researcher
ax2: researcher -> deptemployee
ax3: phdstudent -> student
ax4: student -> ~deptmember
ax5: phdstudent -> phd
ax6: deptemployee -> deptmember
[B]
s: phdstudent
";

    fn f(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    fn example3_priors() -> FaultPriors {
        let probs = [("ax1", 0.001), ("ax2", 0.001), ("ax3", 0.001), ("ax4", 0.001), ("ax5", 0.1), ("ax6", 0.15)];
        FaultPriors::Axiom {
            probs: probs.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>(),
            default: None,
        }
    }

    fn example3_config(strategy: StrategyKind) -> SessionConfig {
        SessionConfig {
            sigma: 1.0,
            cautiousness: CautiousnessState { c: 0.4, c_min: 0.0, c_max: 0.5, epsilon: 0.25 },
            ..SessionConfig::new(strategy, example3_priors())
        }
    }

    #[test]
    fn simulated_oracle_examples() {
        let dpi = parse_dpi(EXAMPLE1_DPI).unwrap();
        let mut oracle = simulated_oracle(&dpi.o, &dpi.b, &Diagnosis::new(vec![1]));
        assert_eq!(oracle.answer(&[f("researcher"), f("student")]), Answer::Yes);
        assert_eq!(oracle.answer(&[f("deptmember")]), Answer::No);
        assert_eq!(oracle.answer(&[f("phdstudent")]), Answer::Yes);
    }

    #[test]
    fn apply_answer_routes_test_cases() {
        let dpi = parse_dpi(EXAMPLE1_DPI).unwrap();
        let x = vec![f("phd")];
        let yes = apply_answer(&dpi, &x, Answer::Yes);
        assert_eq!(yes.p, vec![x.clone()]);
        let no = apply_answer(&dpi, &x, Answer::No);
        assert_eq!(no.n, vec![x.clone()]);
        assert_eq!(apply_answer(&yes, &x, Answer::Yes), yes);
    }

    #[test]
    fn stop_check_examples() {
        assert_eq!(stop_check(&[0.95, 0.05], 0.5, 0.85), StopDecision::Accept);
        assert_eq!(stop_check(&[0.5, 0.5], 0.5, 0.85), StopDecision::Continue);
        assert_eq!(stop_check(&[0.5, 0.5], 0.0, 0.85), StopDecision::Accept);
        assert_eq!(stop_check(&[1.0], 0.5, 0.85), StopDecision::Accept);
    }

    #[test]
    fn probabilities_without_and_with_history() {
        let dpi = parse_dpi(EXAMPLE1_DPI).unwrap();
        let six: Vec<Diagnosis> = (0..6).map(|i| Diagnosis::new(vec![i])).collect();
        let pax = AxiomProbs::new(&dpi.o, &example3_priors()).unwrap();
        let mut r = Reasoner::new();
        let probs = recompute_probabilities(&mut r, &dpi, &six, &pax, &[]).unwrap();
        assert!((probs[5] - 0.6052100161550888).abs() < 1e-12);
        assert!((probs[4] - 0.3810581583198708).abs() < 1e-12);
        // phd (t) rules out D5; the negative case rules out D6 and leaves the
        // four equi-prior singletons.
        let neg = vec![f("deptemployee"), f("~deptmember"), f("student")];
        let history = [
            HistoryEntry { axioms: vec![f("phd")], answer: Answer::Yes, p_len: 0, n_len: 0 },
            HistoryEntry { axioms: neg.clone(), answer: Answer::No, p_len: 1, n_len: 0 },
        ];
        let mut later = dpi.clone();
        later.p.push(vec![f("phd")]);
        later.n.push(neg);
        let probs = recompute_probabilities(&mut r, &later, &six, &pax, &history).unwrap();
        assert!(probs[..4].iter().all(|p| (p - 0.25).abs() < 1e-12), "{probs:?}");
        assert_eq!(&probs[4..], &[0.0, 0.0]);
    }

    #[test]
    fn consistent_kb_needs_no_queries() {
        let dpi = parse_dpi("[O]\na: p -> q\n[B]\nb: p\n").unwrap();
        let priors = FaultPriors::Axiom { probs: BTreeMap::new(), default: Some(0.01) };
        let mut never = |_: &[Formula]| -> Answer { panic!("no query expected") };
        let (d, trace) = run_session(dpi, SessionConfig::new(StrategyKind::Rio, priors), &mut never).unwrap();
        assert!(d.is_empty());
        assert_eq!(trace.queries(), 0);
    }

    #[test]
    fn example3_rio_finds_target_in_three_queries() {
        let dpi = parse_dpi(EXAMPLE1_DPI).unwrap();
        let target = Diagnosis::new(vec![1]);
        let mut oracle = simulated_oracle(&dpi.o, &dpi.b, &target);
        let (d, trace) = run_session(dpi, example3_config(StrategyKind::Rio), &mut oracle).unwrap();
        assert_eq!(d, target);
        assert_eq!(trace.queries(), 3);
        assert!((trace.rounds[0].c_after - 7.0 / 30.0).abs() < 1e-12);
    }

    #[test]
    fn example3_ent_needs_more_queries() {
        let dpi = parse_dpi(EXAMPLE1_DPI).unwrap();
        let target = Diagnosis::new(vec![1]);
        let mut oracle = simulated_oracle(&dpi.o, &dpi.b, &target);
        let (d, trace) = run_session(dpi, example3_config(StrategyKind::Ent), &mut oracle).unwrap();
        assert_eq!(d, target);
        // ENT opens with the high-risk {D6} split. After the fourth answer the
        // refilled leading set holds [ax2] and the newly minimal [ax4, ax6],
        // which costs one more query.
        assert_eq!(trace.rounds[0].partition, [1, 5, 0]);
        assert_eq!(trace.queries(), 5);
        assert_eq!(trace.rounds[4].probs[1].diagnosis, vec!["ax4", "ax6"]);
    }

    #[test]
    fn step_guards() {
        let dpi = parse_dpi(EXAMPLE1_DPI).unwrap();
        let mut s = Session::start(dpi, example3_config(StrategyKind::Rio)).unwrap();
        let id = s.pending().unwrap().id;
        assert_eq!(s.step(id + 7, Answer::Yes), Err(SessionError::StaleQuery { expected: id, got: id + 7 }));
        let mut oracle = simulated_oracle(&s.dpi().o.clone(), &s.dpi().b.clone(), &Diagnosis::new(vec![1]));
        while let Some(p) = s.pending().cloned() {
            s.step(p.id, oracle.answer(&p.query.axioms)).unwrap();
        }
        assert_eq!(s.status(), &SessionStatus::Accepted);
        assert_eq!(s.step(id, Answer::Yes), Err(SessionError::NoPendingQuery));
    }

    #[test]
    fn arbitrary_answers_still_converge() {
        // Every answer keeps some leading diagnosis valid, so even a
        // constant oracle ends with a diagnosis of the final problem.
        let dpi = parse_dpi(EXAMPLE1_DPI).unwrap();
        for answer in [Answer::Yes, Answer::No] {
            let constant = |_: &[Formula]| answer;
            let mut s = Session::start(dpi.clone(), example3_config(StrategyKind::Spl)).unwrap();
            while let Some(p) = s.pending().cloned() {
                s.step(p.id, constant(&p.query.axioms)).unwrap();
            }
            let d = s.result().unwrap().clone();
            let mut r = Reasoner::new();
            let c = CompiledDpi::new(&mut r, s.dpi());
            assert!(c.is_minimal_diagnosis(&mut r, &d));
            assert_eq!(s.dpi().p.len() + s.dpi().n.len(), s.trace().queries());
        }
    }

    #[test]
    fn empty_catalog_is_reported() {
        // Neither diagnosis entails a literal, so literal queries cannot separate them.
        let dpi = parse_dpi("[O]\na: p <-> q\nb: p <-> ~q\n").unwrap();
        let priors = FaultPriors::Axiom { probs: BTreeMap::new(), default: Some(0.1) };
        let config = SessionConfig::new(StrategyKind::Rio, priors);
        let err = Session::start(dpi.clone(), config.clone()).err().unwrap();
        assert_eq!(err.error, SessionError::EmptyCatalog(2));
        let with_implications = SessionConfig { query_options: QueryOptions { implications: true }, ..config };
        let mut oracle = simulated_oracle(&dpi.o, &dpi.b, &Diagnosis::new(vec![1]));
        let (d, trace) = run_session(dpi, with_implications, &mut oracle).unwrap();
        assert_eq!(d, Diagnosis::new(vec![1]));
        assert_eq!(trace.queries(), 1);
    }
}
