//! Fault probabilities of axioms and diagnoses.
//!
//! Priors file format, one entry per line (`#` comments):
//!
//! ```text
//! ax1 0.001      # per-axiom probability
//! * 0.01         # default for axioms not listed
//! -> 0.01        # constructor probability (constructor mode)
//! ```
//!
//! A file is either all constructor entries or all axiom entries.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Diagnosis;
use crate::formula::{Constructor, ConstructorCounts};
use crate::kb::KnowledgeBase;

pub const P_MIN: f64 = 1e-6;
pub const P_MAX: f64 = 1.0 - 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultPriors {
    /// `p_t` per constructor type.
    Constructor(BTreeMap<Constructor, f64>),
    /// Direct per-axiom probabilities, with an optional fallback.
    Axiom {
        probs: BTreeMap<String, f64>,
        default: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PriorError {
    #[error("probability {value} for `{key}` is outside [0, 1]")]
    OutOfRange { key: String, value: f64 },
    #[error("no prior for axiom `{0}`")]
    Missing(String),
    #[error("every axiom has fault probability 0")]
    AllZero,
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// `p(ax) = 1 − ∏_t (1 − p_t)^{n(t)}`
pub fn axiom_fault_prob(counts: &ConstructorCounts, pt: &BTreeMap<Constructor, f64>) -> f64 {
    let keep: f64 = Constructor::ALL
        .iter()
        .map(|&c| (1.0 - pt.get(&c).copied().unwrap_or(0.0)).powi(counts.get(c) as i32))
        .product();
    1.0 - keep
}

/// Clamped fault probability per axiom of O, indexed by KB position.
#[derive(Clone, Debug, PartialEq)]
pub struct AxiomProbs(Vec<f64>);

impl AxiomProbs {
    pub fn new(o: &KnowledgeBase, priors: &FaultPriors) -> Result<Self, PriorError> {
        let check = |key: &str, value: f64| {
            if (0.0..=1.0).contains(&value) {
                Ok(value)
            } else {
                Err(PriorError::OutOfRange { key: key.to_owned(), value })
            }
        };
        let raw = match priors {
            FaultPriors::Constructor(pt) => {
                for (c, &v) in pt {
                    check(c.symbol(), v)?;
                }
                o.iter().map(|ax| axiom_fault_prob(&ax.constructor_counts(), pt)).collect::<Vec<_>>()
            }
            FaultPriors::Axiom { probs, default } => o
                .iter()
                .map(|ax| match probs.get(&ax.id).or(default.as_ref()) {
                    Some(&v) => check(&ax.id, v),
                    None => Err(PriorError::Missing(ax.id.clone())),
                })
                .collect::<Result<Vec<_>, _>>()?,
        };
        if !raw.is_empty() && raw.iter().all(|&p| p == 0.0) {
            return Err(PriorError::AllZero);
        }
        Ok(Self::from_raw(raw))
    }

    /// Clamps `raw` into `[P_MIN, P_MAX]`.
    pub fn from_raw(raw: Vec<f64>) -> Self {
        AxiomProbs(raw.into_iter().map(|p| p.clamp(P_MIN, P_MAX)).collect())
    }

    pub fn get(&self, index: usize) -> f64 {
        self.0[index]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Multiplies every probability by `factor`, then clamps.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_raw(self.0.iter().map(|p| p * factor).collect())
    }

    /// `ln((1 − p) / p)`: the cost of declaring the axiom faulty.
    pub(crate) fn weight(&self, index: usize) -> f64 {
        let p = self.0[index];
        ((1.0 - p) / p).ln()
    }
}

/// `p(D) = ∏_{ax ∈ D} p(ax) · ∏_{ax ∈ O \ D} (1 − p(ax))`, unnormalized.
pub fn diagnosis_prob(d: &Diagnosis, pax: &AxiomProbs) -> f64 {
    (0..pax.len())
        .map(|i| if d.contains(i) { pax.get(i) } else { 1.0 - pax.get(i) })
        .product()
}

pub fn parse_priors(text: &str) -> Result<FaultPriors, PriorError> {
    let mut constructors = BTreeMap::new();
    let mut axioms = BTreeMap::new();
    let mut default = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let syntax = |message: &str| PriorError::Syntax { line, message: message.to_owned() };
        let mut parts = body.split_whitespace();
        let (Some(key), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(syntax("expected `KEY PROBABILITY`"));
        };
        let value: f64 = value.parse().map_err(|_| syntax("probability is not a number"))?;
        if !(0.0..=1.0).contains(&value) {
            return Err(PriorError::OutOfRange { key: key.to_owned(), value });
        }
        if let Some(c) = Constructor::ALL.iter().find(|c| c.symbol() == key) {
            constructors.insert(*c, value);
        } else if key == "*" {
            default = Some(value);
        } else {
            axioms.insert(key.to_owned(), value);
        }
        if !constructors.is_empty() && (default.is_some() || !axioms.is_empty()) {
            return Err(syntax("constructor and axiom priors cannot be mixed"));
        }
    }
    if constructors.is_empty() {
        Ok(FaultPriors::Axiom { probs: axioms, default })
    } else {
        Ok(FaultPriors::Constructor(constructors))
    }
}
