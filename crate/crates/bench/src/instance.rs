//! Synthetic aligned instances: two implication-chain KBs, an alignment
//! between them, and one seeded fact.
//!
//! Side 2 holds one active chain `s → x1 → … → ~w` whose head `s` is the
//! fact. Each incorrect correspondence links an atom of the active chain to
//! the head of a side-1 chain, and a correct bridge maps the end of that
//! chain to `w`, closing a refutation cycle. Remaining correct links never
//! leave the active chain, so the reference alignment alone stays consistent.

use std::fmt;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riodbg_core::reasoner::is_consistent;
use riodbg_core::{Axiom, DiagnosisProblem, Formula, KnowledgeBase, Origin};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Direction of a correspondence between an atom of kb1 and one of kb2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// atom₁ → atom₂
    #[serde(rename = "->")]
    Forward,
    /// atom₂ → atom₁
    #[serde(rename = "<-")]
    Backward,
    #[serde(rename = "<->")]
    Equivalent,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Forward => "->",
            Relation::Backward => "<-",
            Relation::Equivalent => "<->",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "->" | "→" => Ok(Relation::Forward),
            "<-" | "←" => Ok(Relation::Backward),
            "<->" | "↔" => Ok(Relation::Equivalent),
            _ => Err(format!("unknown relation `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correspondence {
    pub atom1: String,
    pub atom2: String,
    pub relation: Relation,
    pub confidence: f64,
    /// Part of the reference alignment.
    pub correct: bool,
}

impl Correspondence {
    /// The axiom this correspondence contributes to the merged KB.
    pub fn formula(&self) -> Formula {
        let (a1, a2) = (Formula::atom(&self.atom1), Formula::atom(&self.atom2));
        match self.relation {
            Relation::Forward => Formula::implies(a1, a2),
            Relation::Backward => Formula::implies(a2, a1),
            Relation::Equivalent => Formula::iff(a1, a2),
        }
    }
}

/// Sizes for [`generate_instance`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    /// Axioms of kb1 and kb2.
    pub side_axioms: [usize; 2],
    /// Chains per side.
    pub chains: usize,
    /// Incorrect correspondences.
    pub incorrect: usize,
    /// Correct correspondences besides the bridges.
    pub correct: usize,
}

impl InstanceSpec {
    /// Two axioms per side, one chain each, one incorrect link: the shape of
    /// the running example.
    pub fn small() -> Self {
        InstanceSpec { side_axioms: [2, 2], chains: 1, incorrect: 1, correct: 0 }
    }

    /// A seeded spec with roughly 40 to 80 merged axioms.
    pub fn desk(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        InstanceSpec {
            side_axioms: [rng.random_range(18..=30), rng.random_range(18..=30)],
            chains: rng.random_range(3..=4),
            incorrect: rng.random_range(1..=3),
            correct: rng.random_range(3..=8),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("invalid sizes: {0}")]
    InvalidSpec(String),
    #[error("no valid instance after {0} attempts")]
    Exhausted(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlignedInstance {
    pub id: String,
    pub kb1: KnowledgeBase,
    pub kb2: KnowledgeBase,
    pub alignment: Vec<Correspondence>,
    /// The seeded assertions.
    pub facts: KnowledgeBase,
    /// `kb1 ∪ kb2 ∪ N(alignment)`, alignment axioms named `m1…mk`.
    pub merged: KnowledgeBase,
}

impl AlignedInstance {
    /// Assembles an instance; the merged KB is derived from the parts.
    pub fn new(
        id: impl Into<String>,
        kb1: KnowledgeBase,
        kb2: KnowledgeBase,
        alignment: Vec<Correspondence>,
        facts: KnowledgeBase,
    ) -> Result<Self, String> {
        let mut merged = KnowledgeBase::new();
        let tagged = |kb: &KnowledgeBase, origin: Origin| -> Vec<Axiom> {
            kb.iter().map(|ax| ax.clone().with_origin(origin)).collect()
        };
        for ax in tagged(&kb1, Origin::Component1).into_iter().chain(tagged(&kb2, Origin::Component2)) {
            merged.push(ax).map_err(|id| format!("duplicate axiom id `{id}`"))?;
        }
        for (i, c) in alignment.iter().enumerate() {
            let ax = Axiom::new(alignment_id(i), c.formula()).with_origin(Origin::Alignment);
            merged.push(ax).map_err(|id| format!("duplicate axiom id `{id}`"))?;
        }
        Ok(AlignedInstance { id: id.into(), kb1, kb2, alignment, facts, merged })
    }

    pub fn dpi(&self) -> DiagnosisProblem {
        DiagnosisProblem::new(self.merged.clone(), self.facts.clone())
    }

    /// Ids of the merged axioms produced by incorrect correspondences.
    pub fn incorrect_ids(&self) -> Vec<String> {
        self.alignment.iter().enumerate().filter(|(_, c)| !c.correct).map(|(i, _)| alignment_id(i)).collect()
    }

    /// `kb1 ∪ kb2 ∪ N(reference) ∪ facts` is consistent.
    pub fn reference_consistent(&self) -> bool {
        let incorrect = self.incorrect_ids();
        let kept = self.merged.iter().filter(|ax| !incorrect.contains(&ax.id)).map(|ax| &ax.formula);
        is_consistent(kept.chain(self.facts.formulas()))
    }

    /// `merged ∪ facts` is inconsistent.
    pub fn merged_inconsistent(&self) -> bool {
        !is_consistent(self.merged.formulas().chain(self.facts.formulas()))
    }
}

pub fn alignment_id(index: usize) -> String {
    format!("m{}", index + 1)
}

const ATTEMPTS: usize = 16;

/// A seeded instance satisfying the alignment invariants.
pub fn generate_instance(spec: &InstanceSpec, seed: u64) -> Result<AlignedInstance, GenerateError> {
    let [n1, n2] = spec.side_axioms;
    if spec.chains == 0 || spec.incorrect == 0 || n1 < spec.chains || n2 < spec.chains {
        return Err(GenerateError::InvalidSpec(format!(
            "need chains >= 1, incorrect >= 1, kb1 >= chains and kb2 >= chains axioms; got {spec:?}"
        )));
    }
    for attempt in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64 * 0x9e37_79b9_7f4a_7c15));
        let instance = build(spec, seed, &mut rng);
        if instance.merged_inconsistent() && instance.reference_consistent() {
            return Ok(instance);
        }
    }
    Err(GenerateError::Exhausted(ATTEMPTS))
}

/// Splits `total` links into `parts` chain lengths differing by at most one.
fn chain_lengths(total: usize, parts: usize) -> Vec<usize> {
    (0..parts).map(|i| total / parts + usize::from(i < total % parts)).collect()
}

fn build(spec: &InstanceSpec, seed: u64, rng: &mut ChaCha8Rng) -> AlignedInstance {
    let [n1, n2] = spec.side_axioms;
    let w = "b_w".to_owned();

    // Side 1: chains a{c}_0 → … → a{c}_{len}.
    let mut kb1 = KnowledgeBase::new();
    let mut side1: Vec<Vec<String>> = Vec::new();
    for (c, len) in chain_lengths(n1, spec.chains).into_iter().enumerate() {
        let atoms: Vec<String> = (0..=len).map(|j| format!("a{c}_{j}")).collect();
        for pair in atoms.windows(2) {
            let id = format!("o1_{}", kb1.len() + 1);
            let _ = kb1.push(Axiom::new(id, Formula::implies(Formula::atom(&pair[0]), Formula::atom(&pair[1]))));
        }
        side1.push(atoms);
    }

    // Side 2: chain 0 is active and ends in ~w; the rest end positive.
    let mut kb2 = KnowledgeBase::new();
    let mut side2: Vec<Vec<String>> = Vec::new();
    for (c, len) in chain_lengths(n2, spec.chains).into_iter().enumerate() {
        let active = c == 0;
        let atoms: Vec<String> = (0..len + usize::from(!active)).map(|j| format!("b{c}_{j}")).collect();
        for pair in atoms.windows(2) {
            let id = format!("o2_{}", kb2.len() + 1);
            let _ = kb2.push(Axiom::new(id, Formula::implies(Formula::atom(&pair[0]), Formula::atom(&pair[1]))));
        }
        if active {
            let last = atoms.last().expect("active chain has atoms");
            let id = format!("o2_{}", kb2.len() + 1);
            let _ = kb2.push(Axiom::new(id, Formula::implies(Formula::atom(last), Formula::atom(&w).negated())));
        }
        side2.push(atoms);
    }
    let active = side2[0].clone();

    let mut alignment = Vec::new();
    let incorrect_v = |rng: &mut ChaCha8Rng| rng.random_range(0.3..0.9);
    let correct_v = |rng: &mut ChaCha8Rng| rng.random_range(0.5..1.0);

    // Incorrect links into side-1 chains, the first one from the fact itself;
    // each targeted chain gets a bridge to w.
    let mut targets: Vec<usize> = (0..side1.len()).collect();
    targets.shuffle(rng);
    let mut bridged = Vec::new();
    for k in 0..spec.incorrect {
        let chain = targets[k % targets.len()];
        let source = if k == 0 { 0 } else { rng.random_range(0..active.len()) };
        alignment.push(Correspondence {
            atom1: side1[chain][0].clone(),
            atom2: active[source].clone(),
            relation: Relation::Backward,
            confidence: incorrect_v(rng),
            correct: false,
        });
        if !bridged.contains(&chain) {
            bridged.push(chain);
            alignment.push(Correspondence {
                atom1: side1[chain].last().expect("chains are nonempty").clone(),
                atom2: w.clone(),
                relation: Relation::Forward,
                confidence: correct_v(rng),
                correct: true,
            });
        }
    }

    // Extra correct links never start on the active chain.
    let side1_atoms: Vec<&String> = side1.iter().flatten().collect();
    let inactive: Vec<&String> = side2[1..].iter().flatten().collect();
    for _ in 0..spec.correct {
        let a1 = (*side1_atoms.choose(rng).expect("side 1 has atoms")).clone();
        let (a2, relation) = match inactive.choose(rng) {
            Some(&b) if rng.random_bool(0.5) => (b.clone(), Relation::Backward),
            Some(&b) => (b.clone(), Relation::Forward),
            // Without inactive chains, point into the active chain instead.
            None => ((*active.choose(rng).expect("active chain has atoms")).clone(), Relation::Forward),
        };
        let duplicate = alignment.iter().any(|c: &Correspondence| c.atom1 == a1 && c.atom2 == a2);
        if !duplicate {
            alignment.push(Correspondence { atom1: a1, atom2: a2, relation, confidence: correct_v(rng), correct: true });
        }
    }
    alignment.shuffle(rng);
    // The running example lists the incorrect link before its bridge.
    if spec.incorrect == 1 && spec.correct == 0 {
        alignment.sort_by_key(|c| c.correct);
    }

    let facts = KnowledgeBase::from_axioms([Axiom::new("s", Formula::atom(&active[0]))]).expect("one fact");
    AlignedInstance::new(format!("inst-{seed}"), kb1, kb2, alignment, facts).expect("generated ids are distinct")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rendered(instance: &AlignedInstance, rename: &[(&str, &str)]) -> Vec<(Origin, String)> {
        let mut out: Vec<(Origin, String)> = instance
            .merged
            .iter()
            .map(|ax| {
                let mut text = ax.formula.to_string();
                // Longest names first so that prefixes do not clash.
                let mut pairs = rename.to_vec();
                pairs.sort_by_key(|(from, _)| std::cmp::Reverse(from.len()));
                for (from, to) in pairs {
                    text = text.replace(from, to);
                }
                (ax.origin, text)
            })
            .collect();
        out.sort();
        out
    }

    #[test]
    fn small_spec_is_the_running_example() {
        let inst = generate_instance(&InstanceSpec::small(), 7).unwrap();
        let rename = [
            ("a0_0", "phd"),
            ("a0_1", "researcher"),
            ("a0_2", "deptemployee"),
            ("b0_0", "phdstudent"),
            ("b0_1", "student"),
            ("b_w", "deptmember"),
        ];
        let mut expected = vec![
            (Origin::Component1, "phd -> researcher".to_owned()),
            (Origin::Component1, "researcher -> deptemployee".to_owned()),
            (Origin::Component2, "phdstudent -> student".to_owned()),
            (Origin::Component2, "student -> ~deptmember".to_owned()),
            (Origin::Alignment, "phdstudent -> phd".to_owned()),
            (Origin::Alignment, "deptemployee -> deptmember".to_owned()),
        ];
        expected.sort();
        assert_eq!(rendered(&inst, &rename), expected);
        assert_eq!(inst.facts.axioms()[0].formula, Formula::atom("b0_0"));
        assert_eq!(inst.incorrect_ids(), vec!["m1"]);
    }

    #[test]
    fn invariants_hold_across_seeds() {
        for seed in 0..20 {
            let spec = InstanceSpec::desk(seed);
            let inst = generate_instance(&spec, seed).unwrap();
            assert!(inst.merged_inconsistent());
            assert!(inst.reference_consistent());
            assert_eq!(inst.merged.len(), inst.kb1.len() + inst.kb2.len() + inst.alignment.len());
            assert!((40..=80).contains(&inst.merged.len()), "{} axioms", inst.merged.len());
        }
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let spec = InstanceSpec::desk(3);
        assert_eq!(generate_instance(&spec, 3).unwrap(), generate_instance(&spec, 3).unwrap());
    }

    #[test]
    fn rejects_degenerate_sizes() {
        let spec = InstanceSpec { incorrect: 0, ..InstanceSpec::small() };
        assert!(matches!(generate_instance(&spec, 0), Err(GenerateError::InvalidSpec(_))));
    }

    #[test]
    fn relations_round_trip() {
        for r in [Relation::Forward, Relation::Backward, Relation::Equivalent] {
            assert_eq!(r.as_str().parse::<Relation>(), Ok(r));
        }
    }
}
