//! Query scoring and selection: split-in-half, entropy, and risk optimization.
//!
//! Probabilities are slices aligned with the leading-diagnosis list; a
//! [`Partition`] refers to positions in the same list. Scores renormalize per
//! answer branch, so unnormalized inputs are fine.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::query::{Partition, Query};

/// Scores within this relative distance of the best one count as ties.
pub const SCORE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Spl,
    Ent,
    Rio,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [StrategyKind::Spl, StrategyKind::Ent, StrategyKind::Rio];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::Spl => "spl",
            StrategyKind::Ent => "ent",
            StrategyKind::Rio => "rio",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "spl" => Ok(StrategyKind::Spl),
            "ent" => Ok(StrategyKind::Ent),
            "rio" => Ok(StrategyKind::Rio),
            _ => Err(format!("unknown strategy `{s}` (expected spl, ent or rio)")),
        }
    }
}

/// The oracle's verdict on a query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Answer {
    #[serde(rename = "t", alias = "yes", alias = "true")]
    Yes,
    #[serde(rename = "f", alias = "no", alias = "false")]
    No,
}

impl Answer {
    pub fn from_bool(yes: bool) -> Self {
        if yes {
            Answer::Yes
        } else {
            Answer::No
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Answer::Yes => "t",
            Answer::No => "f",
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("the answer eliminates every diagnosis with nonzero probability")]
    ZeroMass,
    #[error("no query is available")]
    EmptyCatalog,
    #[error("invalid cautiousness settings: {0}")]
    InvalidCautiousness(String),
}

/// `||DX| − |DNX|| + |D∅|`
pub fn sc_split(p: &Partition) -> f64 {
    let (dx, dnx, dz) = p.sizes();
    (dx.abs_diff(dnx) + dz) as f64
}

fn mass(probs: &[f64], block: &[usize]) -> f64 {
    block.iter().map(|&i| probs[i]).sum()
}

/// `p(u = t) = p(DX) + ½ p(D∅)`, relative to the total mass of `probs`.
pub fn p_yes(p: &Partition, probs: &[f64]) -> f64 {
    let total: f64 = probs.iter().sum();
    (mass(probs, &p.dx) + 0.5 * mass(probs, &p.dz)) / total
}

/// `p(a | D)`: 1 for the agreeing block, 0 for the eliminated one, ½ for `D∅`.
fn likelihood(p: &Partition, i: usize, answer: Answer) -> f64 {
    let (agree, reject) = match answer {
        Answer::Yes => (&p.dx, &p.dnx),
        Answer::No => (&p.dnx, &p.dx),
    };
    if agree.contains(&i) {
        1.0
    } else if reject.contains(&i) {
        0.0
    } else if p.dz.contains(&i) {
        0.5
    } else {
        // Diagnoses outside the partition are unaffected.
        1.0
    }
}

/// Bayes update of `probs` on `answer`, normalized.
pub fn posterior(probs: &[f64], p: &Partition, answer: Answer) -> Result<Vec<f64>, StrategyError> {
    let weighted: Vec<f64> = probs.iter().enumerate().map(|(i, &pr)| pr * likelihood(p, i, answer)).collect();
    normalize(&weighted)
}

pub fn normalize(values: &[f64]) -> Result<Vec<f64>, StrategyError> {
    let total: f64 = values.iter().sum();
    if !total.is_finite() || total <= 0.0 {
        return Err(StrategyError::ZeroMass);
    }
    Ok(values.iter().map(|v| v / total).collect())
}

fn entropy(weights: impl Iterator<Item = f64> + Clone) -> f64 {
    let total: f64 = weights.clone().sum();
    if total <= 0.0 {
        return 0.0;
    }
    weights
        .filter(|&w| w > 0.0)
        .map(|w| {
            let q = w / total;
            -q * q.log2()
        })
        .sum()
}

/// Expected posterior entropy `Σ_a p(u=a) · H(D | u=a)`, with `0·log 0 = 0`.
pub fn sc_ent(p: &Partition, probs: &[f64]) -> f64 {
    let yes = p_yes(p, probs);
    let branch = |answer: Answer| {
        entropy((0..probs.len()).map(move |i| probs[i] * likelihood(p, i, answer)))
    };
    let mut score = 0.0;
    if yes > 0.0 {
        score += yes * branch(Answer::Yes);
    }
    if yes < 1.0 {
        score += (1.0 - yes) * branch(Answer::No);
    }
    score
}

/// `min(|DX|, |DNX|) / |D|`
pub fn query_cautiousness(p: &Partition, size_d: usize) -> f64 {
    p.dx.len().min(p.dnx.len()) as f64 / size_d as f64
}

/// `|DNX| / |D|` on `t`, `|DX| / |D|` on `f`.
pub fn elimination_rate(p: &Partition, answer: Answer, size_d: usize) -> f64 {
    let eliminated = match answer {
        Answer::Yes => p.dnx.len(),
        Answer::No => p.dx.len(),
    };
    eliminated as f64 / size_d as f64
}

/// The learned cautiousness `c ∈ [c_min, c_max]` and the step damping `ε`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CautiousnessState {
    pub c: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub epsilon: f64,
}

impl CautiousnessState {
    pub fn new(c: f64, c_min: f64, c_max: f64, epsilon: f64) -> Result<Self, StrategyError> {
        let bad = |m: &str| Err(StrategyError::InvalidCautiousness(m.to_owned()));
        if !(0.0..=0.5).contains(&c_min) || !(0.0..=0.5).contains(&c_max) || c_min > c_max {
            return bad("need 0 <= c_min <= c_max <= 0.5");
        }
        if !(c_min..=c_max).contains(&c) {
            return bad("c must lie within [c_min, c_max]");
        }
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return bad("epsilon must lie in (0, 1/2)");
        }
        Ok(CautiousnessState { c, c_min, c_max, epsilon })
    }
}

/// Comparison slack for `c(X) < c`: cautiousness values are ratios `k/|D|`.
const RISK_SLACK: f64 = 1e-12;

/// `c(X) < c`
pub fn is_high_risk(p: &Partition, state: &CautiousnessState, size_d: usize) -> bool {
    query_cautiousness(p, size_d) < state.c - RISK_SLACK
}

/// `c(X) = ⌊|D|/2⌋ / |D|`, the largest cautiousness any query can have.
pub fn is_no_risk(p: &Partition, size_d: usize) -> bool {
    p.dx.len().min(p.dnx.len()) == size_d / 2
}

/// `c ← clamp(c + 2(c_max − c_min)(⌊|D|/2 − ε⌋/|D| − e), c_min, c_max)`
pub fn update_cautiousness(
    state: &CautiousnessState,
    p: &Partition,
    answer: Answer,
    size_d: usize,
) -> CautiousnessState {
    let n = size_d as f64;
    let adj = (n / 2.0 - state.epsilon).floor() / n - elimination_rate(p, answer, size_d);
    let c_adj = 2.0 * (state.c_max - state.c_min) * adj;
    CautiousnessState { c: (state.c + c_adj).clamp(state.c_min, state.c_max), ..*state }
}

/// Lowest score; near-ties go to the smaller query, then the
/// lexicographically first sorted rendering.
fn argmin(catalog: &[Query], candidates: &[usize], score: impl Fn(&Query) -> f64) -> Option<usize> {
    let scored: Vec<(usize, f64)> = candidates.iter().map(|&i| (i, score(&catalog[i]))).collect();
    let best = scored.iter().map(|&(_, s)| s).min_by(f64::total_cmp)?;
    let tolerance = SCORE_TOLERANCE * best.abs().max(1.0);
    scored
        .into_iter()
        .filter(|&(_, s)| s - best <= tolerance)
        .map(|(i, _)| i)
        .min_by_key(|&i| (catalog[i].axioms.len(), catalog[i].rendered()))
}

/// Position in `catalog` of the query chosen by `kind`.
pub fn select_query(
    kind: StrategyKind,
    catalog: &[Query],
    probs: &[f64],
    state: &CautiousnessState,
) -> Result<usize, StrategyError> {
    let all: Vec<usize> = (0..catalog.len()).collect();
    let ent = |q: &Query| sc_ent(&q.partition, probs);
    let pick = match kind {
        StrategyKind::Spl => argmin(catalog, &all, |q| sc_split(&q.partition)),
        StrategyKind::Ent => argmin(catalog, &all, ent),
        StrategyKind::Rio => {
            let best = argmin(catalog, &all, ent).ok_or(StrategyError::EmptyCatalog)?;
            let size_d = probs.len();
            if !is_high_risk(&catalog[best].partition, state, size_d) {
                Some(best)
            } else {
                let safe: Vec<usize> = all
                    .iter()
                    .copied()
                    .filter(|&i| !is_high_risk(&catalog[i].partition, state, size_d))
                    .collect();
                let guard = |i: usize| catalog[i].partition.dx.len().min(catalog[i].partition.dnx.len());
                match safe.iter().map(|&i| guard(i)).min() {
                    None => Some(best),
                    Some(least) => {
                        let least_cautious: Vec<usize> = safe.into_iter().filter(|&i| guard(i) == least).collect();
                        argmin(catalog, &least_cautious, ent)
                    }
                }
            }
        }
    };
    pick.ok_or(StrategyError::EmptyCatalog)
}
