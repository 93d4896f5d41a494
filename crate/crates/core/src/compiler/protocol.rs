//! Bench protocol derived from an encoding plan.

use std::fmt;

use crate::scalar::Scalar;

use super::EncodingPlan;

pub const MIX_VOLUME: &str = "0.1 ml";
pub const MIX_CONCENTRATION: &str = "0.1 µg/µl";
pub const INCUBATION_CELSIUS: u32 = 37;
pub const LIGASE: &str = "T4 DNA ligase";
pub const GEL_REFERENCE: &str = "2.5-3% agarose, TAE buffer, 10 bp ladder in the last well, stop when the tracking dye has run 2/3 of the gel";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixStep {
    /// Every motif strand tag at per-path concentration 1.
    pub species: Vec<String>,
    /// Threshold strand tag and its ratio.
    pub thresholds: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TubeStep {
    pub label: String,
    pub option: String,
    pub enzymes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolPlan {
    pub mix: MixStep,
    pub ligation: String,
    pub split_count: usize,
    pub tubes: Vec<TubeStep>,
    pub incubation_celsius: u32,
    pub pcr_cycles: u32,
    pub primers: (String, String),
    pub purification: String,
    pub gel: String,
}

impl ProtocolPlan {
    pub fn new<T: Scalar>(plan: &EncodingPlan<T>, cycles: u32) -> Self {
        let mut species = Vec::new();
        let mut thresholds = Vec::new();
        for role in super::Role::all(plan.option_count(), plan.outcome_count()) {
            match role {
                super::Role::Threshold(_, j) => {
                    thresholds.push((role.tag(), plan.threshold_ratios[j].to_fraction_string()))
                }
                _ => species.push(role.tag()),
            }
        }
        let tubes = plan
            .tube_schedule
            .iter()
            .enumerate()
            .map(|(i, enzymes)| TubeStep {
                label: format!("TT{}", i + 1),
                option: plan.option_labels[i].clone(),
                enzymes: enzymes.iter().map(|e| e.name().to_string()).collect(),
            })
            .collect();
        Self {
            mix: MixStep { species, thresholds },
            ligation: LIGASE.to_string(),
            split_count: plan.option_count(),
            tubes,
            incubation_celsius: INCUBATION_CELSIUS,
            pcr_cycles: cycles,
            primers: (plan.primers().forward.sequence(), plan.primers().reverse.sequence()),
            purification: "column purification of full-length PCR product".to_string(),
            gel: GEL_REFERENCE.to_string(),
        }
    }
}

impl fmt::Display for ProtocolPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "1. Mix {MIX_VOLUME} at {MIX_CONCENTRATION} of each strand:")?;
        writeln!(f, "   {}", self.mix.species.join(" "))?;
        writeln!(f, "   thresholds (relative to one path share):")?;
        for (tag, ratio) in &self.mix.thresholds {
            writeln!(f, "   {tag} {ratio}")?;
        }
        writeln!(f, "2. Anneal, then add {} and ligate.", self.ligation)?;
        writeln!(f, "3. Split equally into {} tubes.", self.split_count)?;
        writeln!(f, "4. Digest at {} °C:", self.incubation_celsius)?;
        for t in &self.tubes {
            let enzymes = if t.enzymes.is_empty() {
                "(none)".to_string()
            } else {
                t.enzymes.join(", ")
            };
            writeln!(f, "   {} ({}): {enzymes}", t.label, t.option)?;
        }
        writeln!(
            f,
            "5. PCR, {} cycles, primers 5'-{}-3' and 5'-{}-3'.",
            self.pcr_cycles, self.primers.0, self.primers.1
        )?;
        writeln!(f, "6. Purify: {}.", self.purification)?;
        writeln!(f, "7. Gel: {}.", self.gel)
    }
}
