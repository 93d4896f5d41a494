//! Decision matrix → DNA encoding. Threshold ratios, probability section
//! lengths, enzyme assignment, per-tube digestion schedule, concrete
//! sequences, primers and the bands the gel should show.

pub mod enzymes;
pub mod fixture;
pub mod generate;
pub mod motif;
pub mod protocol;
pub mod sequences;
pub mod validate;

use std::fmt;

use serde_json::{json, Value};

use crate::decision::{DecisionError, DecisionMatrix};
use crate::fasta::write_fasta;
use crate::scalar::Scalar;
use crate::strand::{RecognitionSite, Strand};

pub use enzymes::EnzymeLibrary;
pub use fixture::FixtureError;
pub use generate::{generate_sequences, GenerateError};
pub use motif::{Role, Structure, BASE_LENGTH, DOMAIN_LEN};
pub use protocol::ProtocolPlan;
pub use sequences::{ConstructError, PrimerPair, SequenceSet};
pub use validate::{validate_sequences, Violation, ViolationKind};

/// Smallest length difference between probability sections.
pub const DEFAULT_RESOLUTION: usize = 9;
/// Middle section of the most probable outcome.
pub const FIRST_MIDDLE: usize = 7;
/// Longest middle section that still fits the ladder.
pub const MAX_MIDDLE: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("probability {0} outside [0, 1]")]
    OutOfRange(String),
    #[error("{outcomes} outcomes cannot be spaced {resolution} bp apart within {MAX_MIDDLE} bp")]
    Unresolvable { outcomes: usize, resolution: usize },
    #[error("enzyme library has {available} entries, {needed} needed")]
    LibraryExhausted { needed: usize, available: usize },
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Fixture(#[from] FixtureError),
}

/// `R = 1 − p`: fraction of a chance node's strand the threshold removes.
pub fn threshold_ratio<T: Scalar>(p: &T) -> Result<T, CompileError> {
    if *p < T::zero() || *p > T::one() {
        return Err(CompileError::OutOfRange(p.to_fraction_string()));
    }
    Ok(T::one() - p.clone())
}

/// Middle-section lengths by probability rank: the most probable outcome gets
/// 7 bp and each next rank `max(2·prev + 2, prev + resolution)`, giving
/// 7, 16, 34, 70, 142 at the default resolution. Ties rank in declaration order.
pub fn probability_lengths<T: Scalar>(probabilities: &[T], resolution: usize) -> Result<Vec<usize>, CompileError> {
    let mut order: Vec<usize> = (0..probabilities.len()).collect();
    // stable sort keeps declaration order among equal probabilities
    order.sort_by(|&a, &b| {
        probabilities[b]
            .partial_cmp(&probabilities[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut lengths = vec![0; probabilities.len()];
    let mut current = FIRST_MIDDLE;
    for (rank, &j) in order.iter().enumerate() {
        if rank > 0 {
            current = (2 * current + 2).max(current + resolution);
        }
        if current > MAX_MIDDLE {
            return Err(CompileError::Unresolvable {
                outcomes: probabilities.len(),
                resolution,
            });
        }
        lengths[j] = current;
    }
    Ok(lengths)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnzymeAssignment {
    pub options: Vec<RecognitionSite>,
    pub outcomes: Vec<RecognitionSite>,
}

/// Options take the first library entries, outcomes the next ones.
pub fn assign_enzymes<T: Scalar>(
    matrix: &DecisionMatrix<T>,
    library: &EnzymeLibrary,
) -> Result<EnzymeAssignment, CompileError> {
    let n = matrix.option_count();
    let m = matrix.outcome_count();
    if n + m > library.len() {
        return Err(CompileError::LibraryExhausted {
            needed: n + m,
            available: library.len(),
        });
    }
    let all = library.as_slice();
    Ok(EnzymeAssignment {
        options: all[..n].to_vec(),
        outcomes: all[n..n + m].to_vec(),
    })
}

/// Enzymes for tube `i`: every other option's enzyme, then the enzyme of
/// each outcome that is unfavorable under option `i`.
pub fn tube_schedule<T: Scalar>(matrix: &DecisionMatrix<T>, assignment: &EnzymeAssignment) -> Vec<Vec<RecognitionSite>> {
    matrix
        .options
        .iter()
        .enumerate()
        .map(|(i, option)| {
            let mut tube: Vec<RecognitionSite> = assignment
                .options
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, e)| e.clone())
                .collect();
            tube.extend(
                assignment
                    .outcomes
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| !option.is_favorable(*j))
                    .map(|(_, e)| e.clone()),
            );
            tube
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictedBand<T> {
    pub outcome: usize,
    pub length: usize,
    /// `P_j · D` with `D` the common probability denominator.
    pub intensity: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompileOptions {
    pub library: EnzymeLibrary,
    pub seed: u64,
    pub fixture: bool,
    pub resolution: usize,
    pub cycles: u32,
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self {
            library: EnzymeLibrary::standard(),
            seed: 0,
            fixture: false,
            resolution: DEFAULT_RESOLUTION,
            cycles: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodingPlan<T> {
    pub option_labels: Vec<String>,
    pub outcome_labels: Vec<String>,
    pub probabilities: Vec<T>,
    pub threshold_ratios: Vec<T>,
    pub middle_lengths: Vec<usize>,
    pub base_length: usize,
    pub library: EnzymeLibrary,
    pub option_enzymes: Vec<RecognitionSite>,
    pub outcome_enzymes: Vec<RecognitionSite>,
    pub tube_schedule: Vec<Vec<RecognitionSite>>,
    /// Common probability denominator `D`.
    pub scale: T,
    pub predicted_bands: Vec<Vec<PredictedBand<T>>>,
    pub seed: u64,
    pub sequences: SequenceSet,
}

impl<T: Scalar> EncodingPlan<T> {
    pub fn option_count(&self) -> usize {
        self.option_labels.len()
    }

    pub fn outcome_count(&self) -> usize {
        self.outcome_labels.len()
    }

    pub fn primers(&self) -> &PrimerPair {
        &self.sequences.primers
    }

    pub fn construct_length(&self, outcome: usize) -> usize {
        self.base_length + self.middle_lengths[outcome]
    }

    /// Outcome whose construct length is nearest to `length` within
    /// `tolerance` bp.
    pub fn outcome_for_length(&self, length: usize, tolerance: usize) -> Option<usize> {
        (0..self.outcome_count())
            .map(|j| (self.construct_length(j).abs_diff(length), j))
            .filter(|(d, _)| *d <= tolerance)
            .min()
            .map(|(_, j)| j)
    }

    pub fn is_fixture(&self) -> bool {
        !self.sequences.fixture_roles.is_empty()
    }

    pub fn strands(&self) -> Vec<Strand> {
        let mut out = self.sequences.tagged_strands();
        out.push(self.primers().forward.clone());
        out.push(self.primers().reverse.clone());
        out
    }

    pub fn to_fasta(&self) -> String {
        write_fasta(&self.strands())
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_sequences(&self.sequences)
    }

    pub fn to_json(&self) -> Value {
        let names = |v: &[RecognitionSite]| v.iter().map(|e| e.name().to_string()).collect::<Vec<_>>();
        let outcomes: Vec<Value> = (0..self.outcome_count())
            .map(|j| {
                json!({
                    "label": self.outcome_labels[j],
                    "probability": self.probabilities[j].to_fraction_string(),
                    "threshold_ratio": self.threshold_ratios[j].to_fraction_string(),
                    "middle_length": self.middle_lengths[j],
                    "construct_length": self.construct_length(j),
                    "enzyme": self.outcome_enzymes[j].name(),
                })
            })
            .collect();
        let options: Vec<Value> = (0..self.option_count())
            .map(|i| {
                json!({
                    "label": self.option_labels[i],
                    "enzyme": self.option_enzymes[i].name(),
                    "tube_enzymes": names(&self.tube_schedule[i]),
                    "predicted_bands": self.predicted_bands[i]
                        .iter()
                        .map(|b| json!({
                            "outcome": self.outcome_labels[b.outcome],
                            "length_bp": b.length,
                            "relative_intensity": b.intensity.to_fraction_string(),
                        }))
                        .collect::<Vec<_>>(),
                })
            })
            .collect();
        let strands: serde_json::Map<String, Value> = self
            .sequences
            .tagged_strands()
            .into_iter()
            .map(|s| (s.tag().unwrap_or_default().to_string(), Value::String(s.sequence())))
            .collect();
        json!({
            "base_length": self.base_length,
            "scale": self.scale.to_fraction_string(),
            "seed": self.seed,
            "fixture": self.is_fixture(),
            "outcomes": outcomes,
            "options": options,
            "primers": {
                "forward": self.primers().forward.sequence(),
                "reverse": self.primers().reverse.sequence(),
            },
            "strands": strands,
        })
    }
}

impl<T: Scalar> fmt::Display for EncodingPlan<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {}{}", self.seed, if self.is_fixture() { ", fixture sequences" } else { "" })?;
        writeln!(f, "outcomes (base {} bp, scale {}):", self.base_length, self.scale.to_fraction_string())?;
        for j in 0..self.outcome_count() {
            writeln!(
                f,
                "  {}: p {} threshold {} middle {} bp construct {} bp enzyme {}",
                self.outcome_labels[j],
                self.probabilities[j].to_fraction_string(),
                self.threshold_ratios[j].to_fraction_string(),
                self.middle_lengths[j],
                self.construct_length(j),
                self.outcome_enzymes[j].name()
            )?;
        }
        writeln!(f, "options:")?;
        for i in 0..self.option_count() {
            let tube: Vec<&str> = self.tube_schedule[i].iter().map(|e| e.name()).collect();
            let bands: Vec<String> = self.predicted_bands[i]
                .iter()
                .map(|b| format!("{} bp x{}", b.length, b.intensity.to_fraction_string()))
                .collect();
            writeln!(
                f,
                "  {}: enzyme {} tube [{}] bands [{}]",
                self.option_labels[i],
                self.option_enzymes[i].name(),
                tube.join(", "),
                bands.join(", ")
            )?;
        }
        writeln!(f, "primers: {} / {}", self.primers().forward.sequence(), self.primers().reverse.sequence())
    }
}

/// Full compilation of a validated copy of `matrix`.
pub fn compile<T: Scalar>(
    matrix: &DecisionMatrix<T>,
    options: &CompileOptions,
) -> Result<(EncodingPlan<T>, ProtocolPlan), CompileError> {
    let matrix = matrix.clone().validate()?;
    let probabilities = matrix.probabilities();
    let threshold_ratios = probabilities
        .iter()
        .map(threshold_ratio)
        .collect::<Result<Vec<_>, _>>()?;
    let middle_lengths = probability_lengths(&probabilities, options.resolution)?;
    let assignment = assign_enzymes(&matrix, &options.library)?;
    let schedule = tube_schedule(&matrix, &assignment);
    let mut sequences = generate_sequences(&assignment.options, &assignment.outcomes, &middle_lengths, options.seed)?;
    if options.fixture {
        fixture::overlay_fixture(&mut sequences)?;
    }
    let scale = T::common_scale(&probabilities);
    let predicted_bands = matrix
        .options
        .iter()
        .map(|option| {
            (0..matrix.outcome_count())
                .filter(|&j| option.is_favorable(j))
                .map(|j| PredictedBand {
                    outcome: j,
                    length: BASE_LENGTH + middle_lengths[j],
                    intensity: probabilities[j].clone() * scale.clone(),
                })
                .collect()
        })
        .collect();
    let plan = EncodingPlan {
        option_labels: matrix.options.iter().map(|o| o.label.clone()).collect(),
        outcome_labels: matrix.outcomes.iter().map(|o| o.label.clone()).collect(),
        probabilities,
        threshold_ratios,
        middle_lengths,
        base_length: BASE_LENGTH,
        library: options.library.clone(),
        option_enzymes: assignment.options,
        outcome_enzymes: assignment.outcomes,
        tube_schedule: schedule,
        scale,
        predicted_bands,
        seed: options.seed,
        sequences,
    };
    let protocol = ProtocolPlan::new(&plan, options.cycles);
    Ok((plan, protocol))
}

/// Compiles for simulation. A fixture encoding that fails validation cannot
/// assemble every path, so it is replaced by the generated encoding of the
/// same seed and the reason is returned alongside.
pub fn compile_runnable<T: Scalar>(
    matrix: &DecisionMatrix<T>,
    options: &CompileOptions,
) -> Result<(EncodingPlan<T>, ProtocolPlan, Option<String>), CompileError> {
    let (plan, protocol) = compile(matrix, options)?;
    if !plan.is_fixture() {
        return Ok((plan, protocol, None));
    }
    let violations = plan.validate();
    if violations.is_empty() {
        return Ok((plan, protocol, None));
    }
    let note = format!(
        "fixture sequences fail {} validation check(s); simulating the generated encoding for seed {} instead",
        violations.len(),
        options.seed
    );
    let generated = CompileOptions {
        fixture: false,
        ..options.clone()
    };
    let (plan, protocol) = compile(matrix, &generated)?;
    Ok((plan, protocol, Some(note)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::big;
    use crate::Rational;

    fn canonical() -> DecisionMatrix<Rational> {
        DecisionMatrix::ball_game()
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold_ratio(&big(4, 9)).unwrap(), big(5, 9));
        assert_eq!(threshold_ratio(&big(1, 1)).unwrap(), big(0, 1));
        assert_eq!(threshold_ratio(&big(0, 1)).unwrap(), big(1, 1));
        assert!(matches!(threshold_ratio(&big(3, 2)), Err(CompileError::OutOfRange(_))));
        assert!(matches!(threshold_ratio(&big(-1, 2)), Err(CompileError::OutOfRange(_))));
    }

    #[test]
    fn length_examples() {
        let p = [big(4, 9), big(3, 9), big(2, 9)];
        assert_eq!(probability_lengths(&p, 9).unwrap(), vec![7, 16, 34]);
        assert_eq!(probability_lengths(&[big(1, 1)], 9).unwrap(), vec![7]);
        assert_eq!(probability_lengths(&[big(1, 2), big(1, 2)], 9).unwrap(), vec![7, 16]);
        assert_eq!(probability_lengths(&[big(1, 9), big(8, 9)], 9).unwrap(), vec![16, 7]);
        let five = vec![big(1, 5); 5];
        assert_eq!(probability_lengths(&five, 9).unwrap(), vec![7, 16, 34, 70, 142]);
        let six = vec![big(1, 6); 6];
        assert!(matches!(probability_lengths(&six, 9), Err(CompileError::Unresolvable { .. })));
    }

    #[test]
    fn canonical_enzymes() {
        let a = assign_enzymes(&canonical(), &EnzymeLibrary::standard()).unwrap();
        let names = |v: &[RecognitionSite]| v.iter().map(|e| e.name().to_string()).collect::<Vec<_>>();
        assert_eq!(names(&a.options), ["PvuII", "HpaI", "StuI"]);
        assert_eq!(names(&a.outcomes), ["PmlI", "EcoRV", "ScaI"]);
        let sched = tube_schedule(&canonical(), &a);
        assert_eq!(names(&sched[0]), ["HpaI", "StuI", "ScaI"]);
        assert_eq!(names(&sched[1]), ["PvuII", "StuI", "EcoRV"]);
        assert_eq!(names(&sched[2]), ["PvuII", "HpaI", "PmlI"]);
    }

    #[test]
    fn library_exhaustion() {
        let mut m = canonical();
        m.options.push(crate::decision::DecisionOption::with_favorable("option 4", 3, &[0]));
        assert_eq!(
            assign_enzymes(&m, &EnzymeLibrary::standard()),
            Err(CompileError::LibraryExhausted { needed: 7, available: 6 })
        );
        let single = DecisionMatrix::<Rational>::new(
            vec![crate::decision::Outcome { label: "x".into(), probability: big(1, 1) }],
            vec![crate::decision::DecisionOption::with_favorable("a", 1, &[0])],
            crate::decision::Utilities::binary(),
        );
        let a = assign_enzymes(&single, &EnzymeLibrary::standard()).unwrap();
        assert_eq!(a.options[0].name(), "PvuII");
        assert_eq!(a.outcomes[0].name(), "HpaI");
        assert!(tube_schedule(&single, &a)[0].is_empty());
    }

    #[test]
    fn canonical_predicted_bands() {
        let (plan, protocol) = compile(&canonical(), &CompileOptions::default()).unwrap();
        let bands = |i: usize| {
            plan.predicted_bands[i]
                .iter()
                .map(|b| (b.length, b.intensity.clone()))
                .collect::<Vec<_>>()
        };
        assert_eq!(bands(0), vec![(147, big(4, 1)), (156, big(3, 1))]);
        assert_eq!(bands(1), vec![(147, big(4, 1)), (174, big(2, 1))]);
        assert_eq!(bands(2), vec![(156, big(3, 1)), (174, big(2, 1))]);
        assert_eq!(plan.threshold_ratios, vec![big(5, 9), big(6, 9), big(7, 9)]);
        assert!(plan.validate().is_empty());
        assert_eq!(protocol.tubes.len(), 3);
    }

    #[test]
    fn option_without_favorable_outcomes_has_no_bands() {
        let mut m = canonical();
        m.options[2] = crate::decision::DecisionOption::with_favorable("option 3", 3, &[]);
        let (plan, _) = compile(&m, &CompileOptions::default()).unwrap();
        assert!(plan.predicted_bands[2].is_empty());
    }

    #[test]
    fn fixture_is_loaded_verbatim() {
        let opts = CompileOptions {
            fixture: true,
            ..CompileOptions::default()
        };
        let (plan, _) = compile(&canonical(), &opts).unwrap();
        let fasta = plan.to_fasta();
        assert!(fasta.contains(">O_1\nTCTGACTCAGCTGAGATCCA\n"));
        let violations = plan.validate();
        assert!(violations
            .iter()
            .any(|v| v.kind == ViolationKind::SiteCount && v.detail.contains("u_1") && v.detail.contains("CACGTG")));
        let (runnable, _, note) = compile_runnable(&canonical(), &opts).unwrap();
        assert!(note.is_some());
        assert!(runnable.validate().is_empty());
    }

    #[test]
    fn duplicated_option_is_reported() {
        let (mut plan, _) = compile(&canonical(), &CompileOptions::default()).unwrap();
        let o1 = plan.sequences.strands[&Role::Option(0)].clone();
        plan.sequences.strands.insert(Role::Option(1), o1);
        let v = plan.validate();
        assert!(v.iter().any(|v| v.kind == ViolationKind::UnintendedWindow));
    }
}
