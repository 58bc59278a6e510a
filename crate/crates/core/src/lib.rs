//! Interactive debugging of faulty propositional knowledge bases.
//!
//! The pipeline: a [`DiagnosisProblem`] yields minimal diagnoses
//! ([`diagnosis`]), queries that discriminate between them ([`query`]), a
//! selection strategy picks one ([`strategy`]), and a [`session`] feeds oracle
//! answers back as test cases until one diagnosis is accepted.

pub mod diagnosis;
pub mod dpi;
pub mod formula;
pub mod kb;
pub mod query;
pub mod reasoner;
pub mod session;
pub mod strategy;

pub use dpi::{parse_dpi, DiagnosisProblem, DpiError, TestCase};
pub use formula::{Constructor, ConstructorCounts, Formula, Literal};
pub use kb::{count_constructors, parse_formula, parse_kb, signature, Axiom, KbError, KnowledgeBase, Origin};
pub use reasoner::{FormulaId, Reasoner, ReasonerError};
pub use diagnosis::{
    axiom_fault_prob, diagnosis_prob, hstree_diagnoses, leading_diagnoses, quickxplain, AxiomProbs, ConflictStore,
    Diagnosis, DiagnosisError, FaultPriors,
};
pub use query::{generate_queries, Block, Partition, Query, QueryCatalog, QueryError, QueryOptions};
pub use strategy::{select_query, Answer, CautiousnessState, StrategyError, StrategyKind};
pub use session::{run_session, simulated_oracle, Oracle, Session, SessionConfig, SessionError, SessionFailure, SessionTrace, SimulatedOracle};
