//! The encoding motif: which strands exist for a problem, how each strand is
//! assembled from 10-nt domains, and how a full choice-to-termination
//! construct is laid out.
//!
//! Construct geometry for the path through option `i` and outcome `j`
//! (top strand, 5'→3'):
//!
//! ```text
//!  Z0 Z1 Z2 Z3 | OH_i OT_i | S_j  M_j  E_j | UH_j UT_j | T0 T1 T2 T3
//!  `-- Z top --'  `- O_i -'  `-- P_j top --'  `- u_j --'  `-- T top --'
//! ```
//!
//! The bottom strand is tiled by `Z bottom (Z0 Z1)*`, `E_sO_i (Z2 Z3 OH_i)*`,
//! `E_OP_ij (OT_i S_j)*`, `P_j bottom (M_j)*`, `E_Pu_j (E_j UH_j)*`,
//! `E_uT_j (UT_j T0 T1)*` and `T bottom (T2 T3)*`, so every construct is a
//! blunt duplex of `BASE_LENGTH + middle_j` base pairs.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::strand::{reverse_complement_bases, Base, Duplex, Strand, StrandError};

pub const DOMAIN_LEN: usize = 10;

/// Length of a full construct without the probability middle section.
pub const BASE_LENGTH: usize = 4 * DOMAIN_LEN + 2 * DOMAIN_LEN + 2 * DOMAIN_LEN + 2 * DOMAIN_LEN + 4 * DOMAIN_LEN;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Role {
    /// `Z`, double stranded.
    Choice,
    /// `O_i`.
    Option(usize),
    /// `E_{s,O_i}`.
    ChoiceEdge(usize),
    /// `E_{O_i,P_j}`, the chance node.
    Chance(usize, usize),
    /// `P_j`, double stranded with two sticky ends.
    Probability(usize),
    /// `E_{P_j,u(x_j)}`.
    ProbabilityEdge(usize),
    /// `u(x_j)`.
    Utility(usize),
    /// `E_{u(x_j),T}`.
    TerminationEdge(usize),
    /// `T`, double stranded.
    Termination,
    /// Threshold strand sequestering chance node `(i, j)`.
    Threshold(usize, usize),
}

impl Role {
    pub fn tag(&self) -> String {
        match *self {
            Role::Choice => "Z".into(),
            Role::Option(i) => format!("O_{}", i + 1),
            Role::ChoiceEdge(i) => format!("E_sO_{}", i + 1),
            Role::Chance(i, j) => format!("E_O{}_P{}", i + 1, j + 1),
            Role::Probability(j) => format!("P_{}", j + 1),
            Role::ProbabilityEdge(j) => format!("E_P{}_u{}", j + 1, j + 1),
            Role::Utility(j) => format!("u_{}", j + 1),
            Role::TerminationEdge(j) => format!("E_u{}_T", j + 1),
            Role::Termination => "T".into(),
            Role::Threshold(i, j) => format!("Th_O{}_P{}", i + 1, j + 1),
        }
    }

    pub fn is_double(&self) -> bool {
        matches!(self, Role::Choice | Role::Probability(_) | Role::Termination)
    }

    /// Every role of an `options × outcomes` motif, in canonical order.
    pub fn all(options: usize, outcomes: usize) -> Vec<Role> {
        let mut roles = vec![Role::Choice];
        roles.extend((0..options).map(Role::Option));
        roles.extend((0..options).map(Role::ChoiceEdge));
        for i in 0..options {
            roles.extend((0..outcomes).map(move |j| Role::Chance(i, j)));
        }
        roles.extend((0..outcomes).map(Role::Probability));
        roles.extend((0..outcomes).map(Role::ProbabilityEdge));
        roles.extend((0..outcomes).map(Role::Utility));
        roles.extend((0..outcomes).map(Role::TerminationEdge));
        roles.push(Role::Termination);
        for i in 0..options {
            roles.extend((0..outcomes).map(move |j| Role::Threshold(i, j)));
        }
        roles
    }

    /// Roles joined into the construct for path `(i, j)`, thresholds excluded.
    pub fn path(option: usize, outcome: usize) -> [Role; 9] {
        [
            Role::Choice,
            Role::ChoiceEdge(option),
            Role::Option(option),
            Role::Chance(option, outcome),
            Role::Probability(outcome),
            Role::ProbabilityEdge(outcome),
            Role::Utility(outcome),
            Role::TerminationEdge(outcome),
            Role::Termination,
        ]
    }

    /// Number of choice-to-termination paths the role takes part in.
    pub fn multiplicity(&self, options: usize, outcomes: usize) -> usize {
        match self {
            Role::Choice | Role::Termination => options * outcomes,
            Role::Option(_) | Role::ChoiceEdge(_) => outcomes,
            Role::Probability(_)
            | Role::ProbabilityEdge(_)
            | Role::Utility(_)
            | Role::TerminationEdge(_) => options,
            Role::Chance(..) | Role::Threshold(..) => 1,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum StrandPart {
    Top,
    Bottom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum DomainId {
    Choice(u8),
    OptionHead(usize),
    OptionTail(usize),
    StickyLeft(usize),
    Middle(usize),
    StickyRight(usize),
    UtilityHead(usize),
    UtilityTail(usize),
    ThresholdTail(usize),
    Termination(u8),
    /// A whole strand whose internal structure is unknown (loaded verbatim).
    Opaque(Role, StrandPart),
}

impl fmt::Display for DomainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DomainId::Choice(k) => write!(f, "z{k}"),
            DomainId::OptionHead(i) => write!(f, "oh{}", i + 1),
            DomainId::OptionTail(i) => write!(f, "ot{}", i + 1),
            DomainId::StickyLeft(j) => write!(f, "s{}", j + 1),
            DomainId::Middle(j) => write!(f, "m{}", j + 1),
            DomainId::StickyRight(j) => write!(f, "e{}", j + 1),
            DomainId::UtilityHead(j) => write!(f, "uh{}", j + 1),
            DomainId::UtilityTail(j) => write!(f, "ut{}", j + 1),
            DomainId::ThresholdTail(j) => write!(f, "h{}", j + 1),
            DomainId::Termination(k) => write!(f, "t{k}"),
            DomainId::Opaque(role, StrandPart::Top) => write!(f, "[{role}]"),
            DomainId::Opaque(role, StrandPart::Bottom) => write!(f, "[{role}.bottom]"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sense {
    Plus,
    Minus,
}

impl Sense {
    pub fn flip(self) -> Sense {
        match self {
            Sense::Plus => Sense::Minus,
            Sense::Minus => Sense::Plus,
        }
    }
}

/// Domains of one strand in 5'→3' order.
pub type Layout = Vec<(DomainId, Sense)>;

fn plus(ids: &[DomainId]) -> Layout {
    ids.iter().map(|d| (*d, Sense::Plus)).collect()
}

/// Reverse complement of a plus-sense domain run.
fn minus(ids: &[DomainId]) -> Layout {
    ids.iter().rev().map(|d| (*d, Sense::Minus)).collect()
}

/// Template layouts `(top, bottom)` of a role; `bottom` only for duplex roles.
pub fn template_layout(role: Role) -> (Layout, Option<Layout>) {
    use DomainId as D;
    match role {
        Role::Choice => (
            plus(&[D::Choice(0), D::Choice(1), D::Choice(2), D::Choice(3)]),
            Some(minus(&[D::Choice(0), D::Choice(1)])),
        ),
        Role::Option(i) => (plus(&[D::OptionHead(i), D::OptionTail(i)]), None),
        Role::ChoiceEdge(i) => (minus(&[D::Choice(2), D::Choice(3), D::OptionHead(i)]), None),
        Role::Chance(i, j) => (minus(&[D::OptionTail(i), D::StickyLeft(j)]), None),
        Role::Probability(j) => (
            plus(&[D::StickyLeft(j), D::Middle(j), D::StickyRight(j)]),
            Some(minus(&[D::Middle(j)])),
        ),
        Role::ProbabilityEdge(j) => (minus(&[D::StickyRight(j), D::UtilityHead(j)]), None),
        Role::Utility(j) => (plus(&[D::UtilityHead(j), D::UtilityTail(j)]), None),
        Role::TerminationEdge(j) => (
            minus(&[D::UtilityTail(j), D::Termination(0), D::Termination(1)]),
            None,
        ),
        Role::Termination => (
            plus(&[D::Termination(0), D::Termination(1), D::Termination(2), D::Termination(3)]),
            Some(minus(&[D::Termination(2), D::Termination(3)])),
        ),
        Role::Threshold(i, j) => (
            plus(&[D::OptionTail(i), D::StickyLeft(j), D::ThresholdTail(j)]),
            None,
        ),
    }
}

pub fn domain_len(id: DomainId, middle_lengths: &[usize]) -> usize {
    match id {
        DomainId::Middle(j) => middle_lengths[j],
        _ => DOMAIN_LEN,
    }
}

pub fn layout_len(layout: &Layout, middle_lengths: &[usize]) -> usize {
    layout.iter().map(|(d, _)| domain_len(*d, middle_lengths)).sum()
}

/// Concatenates domain sequences according to a layout.
pub fn realize(layout: &Layout, domains: &BTreeMap<DomainId, Vec<Base>>) -> Vec<Base> {
    let mut out = Vec::new();
    for (id, sense) in layout {
        let seq = &domains[id];
        match sense {
            Sense::Plus => out.extend_from_slice(seq),
            Sense::Minus => out.extend(reverse_complement_bases(seq)),
        }
    }
    out
}

/// A role's physical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Structure {
    Single(Strand),
    Double(Duplex),
}

impl Structure {
    pub fn top(&self) -> &Strand {
        match self {
            Structure::Single(s) => s,
            Structure::Double(d) => d.top(),
        }
    }

    pub fn bottom(&self) -> Option<&Strand> {
        match self {
            Structure::Single(_) => None,
            Structure::Double(d) => Some(d.bottom()),
        }
    }

    pub fn part(&self, part: StrandPart) -> Option<&Strand> {
        match part {
            StrandPart::Top => Some(self.top()),
            StrandPart::Bottom => self.bottom(),
        }
    }

    /// Component strands tagged for export: `X` for single strands,
    /// `X.top`/`X.bottom` for duplexes.
    pub fn tagged_strands(&self, role: Role) -> Vec<Strand> {
        match self {
            Structure::Single(s) => vec![s.retagged(role.tag())],
            Structure::Double(d) => vec![
                d.top().retagged(format!("{}.top", role.tag())),
                d.bottom().retagged(format!("{}.bottom", role.tag())),
            ],
        }
    }
}

/// Builds the structure of a role from domain sequences.
pub fn build_structure(
    role: Role,
    domains: &BTreeMap<DomainId, Vec<Base>>,
) -> Result<Structure, StrandError> {
    let (top_layout, bottom_layout) = template_layout(role);
    let top = Strand::tagged(realize(&top_layout, domains), role.tag())?;
    match bottom_layout {
        None => Ok(Structure::Single(top)),
        Some(bottom_layout) => {
            let bottom = Strand::tagged(realize(&bottom_layout, domains), role.tag())?;
            // Z pairs at its 5' end, P after the left sticky end, T at its 3' end
            let offset = match role {
                Role::Choice => 0,
                Role::Probability(_) => DOMAIN_LEN as i64,
                Role::Termination => 2 * DOMAIN_LEN as i64,
                _ => unreachable!("single-stranded role"),
            };
            Ok(Structure::Double(Duplex::new(top, bottom, offset)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_length_is_140() {
        assert_eq!(BASE_LENGTH, 140);
    }

    #[test]
    fn role_count() {
        assert_eq!(Role::all(3, 3).len(), 1 + 3 + 3 + 9 + 3 * 4 + 1 + 9);
    }

    #[test]
    fn tags() {
        assert_eq!(Role::Option(0).tag(), "O_1");
        assert_eq!(Role::Chance(1, 2).tag(), "E_O2_P3");
        assert_eq!(Role::Threshold(0, 0).tag(), "Th_O1_P1");
    }

    #[test]
    fn construct_tiling_adds_up() {
        let m = [7usize];
        let top: usize = [Role::Choice, Role::Option(0), Role::Probability(0), Role::Utility(0), Role::Termination]
            .iter()
            .map(|r| layout_len(&template_layout(*r).0, &m))
            .sum();
        let bottom: usize = [
            template_layout(Role::Choice).1.unwrap(),
            template_layout(Role::ChoiceEdge(0)).0,
            template_layout(Role::Chance(0, 0)).0,
            template_layout(Role::Probability(0)).1.unwrap(),
            template_layout(Role::ProbabilityEdge(0)).0,
            template_layout(Role::TerminationEdge(0)).0,
            template_layout(Role::Termination).1.unwrap(),
        ]
        .iter()
        .map(|l| layout_len(l, &m))
        .sum();
        assert_eq!(top, BASE_LENGTH + 7);
        assert_eq!(bottom, BASE_LENGTH + 7);
    }
}
