//! Concrete sequences of an encoding: one structure per motif role, the
//! domain layout it was built from, primers, and full-construct assembly.

use std::collections::{BTreeMap, BTreeSet};

use crate::strand::{reverse_complement_bases, Base, Duplex, RecognitionSite, Strand, StrandError};

use super::motif::{Layout, Role, Structure};

/// PCR primers, both written 5'→3'. `forward` equals the first bases of
/// the choice-node top strand; `reverse` is the reverse complement of the
/// last bases of the termination-node top strand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimerPair {
    pub forward: Strand,
    pub reverse: Strand,
}

impl PrimerPair {
    pub fn from_ends(head: &[Base], tail: &[Base]) -> Result<Self, StrandError> {
        Ok(Self {
            forward: Strand::tagged(head.to_vec(), "primer.forward")?,
            reverse: Strand::tagged(reverse_complement_bases(tail), "primer.reverse")?,
        })
    }

    /// True when both primers find their binding sites at the two ends of
    /// the duplex: the forward primer on the bottom strand's 3' end and the
    /// reverse primer on the top strand's 3' end.
    pub fn amplifies(&self, duplex: &Duplex) -> bool {
        let (start, end) = duplex.paired_span();
        let (ext_start, ext_end) = duplex.extent();
        start == ext_start
            && end == ext_end
            && duplex.top().bases().starts_with(self.forward.bases())
            && duplex.bottom().bases().starts_with(self.reverse.bases())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstructError {
    #[error("role {0} missing from the encoding")]
    MissingRole(Role),
    #[error("path O_{option}/P_{outcome} does not anneal: {source}")]
    Unpaired {
        option: usize,
        outcome: usize,
        source: StrandError,
    },
    #[error("path O_{option}/P_{outcome} leaves single-stranded ends")]
    NotBlunt { option: usize, outcome: usize },
}

/// Strands of an encoding together with everything needed to check them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceSet {
    pub options: usize,
    pub outcomes: usize,
    pub strands: BTreeMap<Role, Structure>,
    pub layouts: BTreeMap<Role, (Layout, Option<Layout>)>,
    /// Roles whose strands were loaded verbatim rather than generated.
    pub fixture_roles: BTreeSet<Role>,
    pub middle_lengths: Vec<usize>,
    pub option_sites: Vec<RecognitionSite>,
    pub outcome_sites: Vec<RecognitionSite>,
    pub primers: PrimerPair,
}

impl SequenceSet {
    pub fn get(&self, role: Role) -> Result<&Structure, ConstructError> {
        self.strands.get(&role).ok_or(ConstructError::MissingRole(role))
    }

    /// Every component strand, tagged, in role order.
    pub fn tagged_strands(&self) -> Vec<Strand> {
        self.strands
            .iter()
            .flat_map(|(role, s)| s.tagged_strands(*role))
            .collect()
    }

    /// Top strand of the path construct with the column span of each top
    /// piece: `Z`, `O_i`, `P_j`, `u_j`, `T`.
    pub fn construct_top(
        &self,
        option: usize,
        outcome: usize,
    ) -> Result<(Vec<Base>, Vec<(Role, usize, usize)>), ConstructError> {
        let pieces = [
            Role::Choice,
            Role::Option(option),
            Role::Probability(outcome),
            Role::Utility(outcome),
            Role::Termination,
        ];
        let mut top = Vec::new();
        let mut spans = Vec::new();
        for role in pieces {
            let s = self.get(role)?.top();
            spans.push((role, top.len(), top.len() + s.len()));
            top.extend_from_slice(s.bases());
        }
        Ok((top, spans))
    }

    /// Ligated, fully paired construct for path `(option, outcome)`.
    pub fn construct(&self, option: usize, outcome: usize) -> Result<Duplex, ConstructError> {
        let (top, _) = self.construct_top(option, outcome)?;
        let bottom_pieces: [(Role, bool); 7] = [
            (Role::Termination, true),
            (Role::TerminationEdge(outcome), false),
            (Role::ProbabilityEdge(outcome), false),
            (Role::Probability(outcome), true),
            (Role::Chance(option, outcome), false),
            (Role::ChoiceEdge(option), false),
            (Role::Choice, true),
        ];
        let mut bottom = Vec::new();
        for (role, from_duplex) in bottom_pieces {
            let st = self.get(role)?;
            let s = if from_duplex {
                st.bottom().ok_or(ConstructError::MissingRole(role))?
            } else {
                st.top()
            };
            bottom.extend_from_slice(s.bases());
        }
        let tag = format!("construct O_{}/P_{}", option + 1, outcome + 1);
        let unpaired = |source| ConstructError::Unpaired {
            option,
            outcome,
            source,
        };
        let top = Strand::tagged(top, tag.clone()).map_err(unpaired)?;
        let bottom = Strand::tagged(bottom, tag).map_err(unpaired)?;
        let duplex = Duplex::new(top, bottom, 0).map_err(unpaired)?;
        if !duplex.is_blunt() {
            return Err(ConstructError::NotBlunt { option, outcome });
        }
        Ok(duplex)
    }
}
