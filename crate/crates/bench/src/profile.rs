//! Prior profiles over merged KBs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use riodbg_core::{FaultPriors, KnowledgeBase, Origin};
use serde::{Deserialize, Serialize};

use crate::instance::AlignedInstance;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorProfile {
    /// 0.001 for KB axioms, `1 − v` for alignment axioms.
    Good,
    /// 0.01 for KB axioms, 0.001 for alignment axioms.
    Misleading,
    Custom(BTreeMap<String, f64>),
}

impl PriorProfile {
    pub fn name(&self) -> &'static str {
        match self {
            PriorProfile::Good => "good",
            PriorProfile::Misleading => "misleading",
            PriorProfile::Custom(_) => "custom",
        }
    }

    /// Per-axiom priors for the merged KB of `instance`.
    pub fn priors(&self, instance: &AlignedInstance) -> FaultPriors {
        let confidence: BTreeMap<String, f64> = instance
            .alignment
            .iter()
            .enumerate()
            .map(|(i, c)| (crate::instance::alignment_id(i), c.confidence))
            .collect();
        self.priors_for(&instance.merged, &confidence)
    }

    /// Per-axiom priors for any origin-tagged KB; `confidence` maps alignment
    /// axiom ids to their matcher confidence.
    pub fn priors_for(&self, kb: &KnowledgeBase, confidence: &BTreeMap<String, f64>) -> FaultPriors {
        let probs = match self {
            PriorProfile::Custom(map) => map.clone(),
            _ => kb
                .iter()
                .map(|ax| {
                    let p = match (self, ax.origin) {
                        (PriorProfile::Good, Origin::Alignment) => 1.0 - confidence.get(&ax.id).copied().unwrap_or(0.5),
                        (PriorProfile::Good, _) => 0.001,
                        (_, Origin::Alignment) => 0.001,
                        _ => 0.01,
                    };
                    (ax.id.clone(), p)
                })
                .collect(),
        };
        FaultPriors::Axiom { probs, default: None }
    }
}

impl fmt::Display for PriorProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PriorProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "good" => Ok(PriorProfile::Good),
            "misleading" => Ok(PriorProfile::Misleading),
            _ => Err(format!("unknown prior profile `{s}` (expected good or misleading)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_instance, InstanceSpec};

    #[test]
    fn profiles_follow_origins() {
        let inst = generate_instance(&InstanceSpec::small(), 1).unwrap();
        let FaultPriors::Axiom { probs, .. } = PriorProfile::Good.priors(&inst) else { panic!() };
        assert_eq!(probs["o1_1"], 0.001);
        assert_eq!(probs["o2_2"], 0.001);
        assert!((probs["m1"] - (1.0 - inst.alignment[0].confidence)).abs() < 1e-15);
        let FaultPriors::Axiom { probs, .. } = PriorProfile::Misleading.priors(&inst) else { panic!() };
        assert_eq!((probs["o1_1"], probs["m1"], probs["m2"]), (0.01, 0.001, 0.001));
    }
}
