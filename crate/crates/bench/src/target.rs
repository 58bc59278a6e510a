//! Choosing the target diagnosis a simulated oracle answers for.

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use riodbg_core::diagnosis::CompiledDpi;
use riodbg_core::{leading_diagnoses, AxiomProbs, Diagnosis, DiagnosisError, Origin, Reasoner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::AlignedInstance;
use crate::profile::PriorProfile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetMode {
    /// The incorrect alignment axioms, reduced to a minimum diagnosis if needed.
    FromReference,
    /// Among the `k` most probable minimal diagnoses under the GOOD profile,
    /// the one with the most non-alignment axioms.
    Adversarial(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TargetError {
    #[error("the incorrect alignment axioms contain no diagnosis")]
    NoDiagnosis,
    #[error(transparent)]
    Diagnosis(#[from] DiagnosisError),
    #[error(transparent)]
    Priors(#[from] riodbg_core::diagnosis::PriorError),
}

pub fn fix_target(instance: &AlignedInstance, mode: TargetMode, seed: u64) -> Result<Diagnosis, TargetError> {
    match mode {
        TargetMode::FromReference => from_reference(instance, seed),
        TargetMode::Adversarial(k) => adversarial(instance, k),
    }
}

fn from_reference(instance: &AlignedInstance, seed: u64) -> Result<Diagnosis, TargetError> {
    let dpi = instance.dpi();
    let incorrect = Diagnosis::from_ids(&dpi.o, &instance.incorrect_ids()).expect("alignment axioms are in O");
    let mut r = Reasoner::new();
    let c = CompiledDpi::new(&mut r, &dpi);
    c.check_background(&mut r)?;
    if incorrect.is_empty() || !c.is_diagnosis(&mut r, &incorrect) {
        return Err(TargetError::NoDiagnosis);
    }
    if c.is_minimal_diagnosis(&mut r, &incorrect) {
        return Ok(incorrect);
    }
    // Smallest diagnoses inside the incorrect set, one picked uniformly.
    let items = incorrect.indices();
    for size in 1..items.len() {
        let found: Vec<Diagnosis> = subsets(items, size)
            .into_iter()
            .map(Diagnosis::new)
            .filter(|d| c.is_diagnosis(&mut r, d))
            .collect();
        if let Some(d) = found.choose(&mut ChaCha8Rng::seed_from_u64(seed)) {
            return Ok(d.clone());
        }
    }
    unreachable!("a non-minimal diagnosis has a smaller diagnosis inside it")
}

fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], size - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn adversarial(instance: &AlignedInstance, k: usize) -> Result<Diagnosis, TargetError> {
    let dpi = instance.dpi();
    let pax = AxiomProbs::new(&dpi.o, &PriorProfile::Good.priors(instance))?;
    let leading = leading_diagnoses(&dpi, k, &pax)?;
    let origin_axioms = |d: &Diagnosis| d.indices().iter().filter(|&&i| dpi.o.axioms()[i].origin != Origin::Alignment).count();
    // Leading diagnoses come most probable first; ties keep the earlier one.
    let best = leading.iter().rev().max_by_key(|d| origin_axioms(d));
    match best {
        Some(d) if !d.is_empty() => Ok(d.clone()),
        _ => Err(TargetError::NoDiagnosis),
    }
}
