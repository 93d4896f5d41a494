//! The literal strands of the worked example's design figure, covering the
//! path through option 1 and outcome R. Strands printed 3'→5' in the figure
//! are stored here reversed so every sequence reads 5'→3'.

use crate::strand::{anneal, Duplex, Strand, StrandError};

use super::motif::{template_layout, DomainId, Layout, Role, Sense, StrandPart, Structure};
use super::sequences::{PrimerPair, SequenceSet};

pub const Z_TOP: &str = "GGACCGACACACAAAGACCTCTCATTCTCTGAGTAGCCG";
/// Printed 3'→5'.
pub const Z_BOTTOM_PRINTED: &str = "CCTGGCTGTGTGTTTCTGGA";
pub const OPTION_1: &str = "TCTGACTCAGCTGAGATCCA";
pub const P_R_TOP: &str = "ACATCAGGAGTACGTGAATCCCTTC";
/// Printed 3'→5'.
pub const P_R_BOTTOM_PRINTED: &str = "CATGCAC";
pub const U_R: &str = "CCGACAAACAGGTGGCTACAC";
pub const T_TOP: &str = "TGGTCTCGCCAAGGAAAATTCCGTAGATGGTCGCTCACAA";
/// Printed 3'→5'.
pub const T_BOTTOM_PRINTED: &str = "GGCATCTACCAGCGAGTGT";
/// Edge strands, all printed 3'→5'.
pub const E_S_O1_PRINTED: &str = "GAGTAAGGAGACTCATCGGCAGACTGAGTC";
pub const E_O1_PR_PRINTED: &str = "GACTCTAGGTTGTAGTGCCT";
pub const E_PR_UR_PRINTED: &str = "TTAGGGAAGGGGCTGTTGTG";
pub const E_UR_T_PRINTED: &str = "CACCGATGTGACCAGAGCGGTTCTTTTAA";
pub const THRESHOLD_R: &str = "CTGAGATCCAGTTAGCAGGTCAATCGTCCA";

fn reversed(printed: &str) -> Strand {
    Strand::lit(&printed.chars().rev().collect::<String>())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FixtureError {
    #[error("fixture needs at least one option and one outcome")]
    TooSmall,
    #[error("fixture strands of {0} do not anneal")]
    NoDuplex(Role),
    #[error(transparent)]
    Strand(#[from] StrandError),
}

fn duplex(role: Role, top: &str, bottom_printed: &str) -> Result<Structure, FixtureError> {
    let top = Strand::lit(top).retagged(role.tag());
    let bottom = reversed(bottom_printed).retagged(role.tag());
    let d: Duplex = anneal(&top, &bottom, 6)?.ok_or(FixtureError::NoDuplex(role))?;
    Ok(Structure::Double(d))
}

/// The figure's structures keyed by the role they play.
pub fn fixture_structures() -> Result<Vec<(Role, Structure)>, FixtureError> {
    let single = |role: Role, s: Strand| (role, Structure::Single(s.retagged(role.tag())));
    Ok(vec![
        (Role::Choice, duplex(Role::Choice, Z_TOP, Z_BOTTOM_PRINTED)?),
        single(Role::Option(0), Strand::lit(OPTION_1)),
        single(Role::ChoiceEdge(0), reversed(E_S_O1_PRINTED)),
        single(Role::Chance(0, 0), reversed(E_O1_PR_PRINTED)),
        (Role::Probability(0), duplex(Role::Probability(0), P_R_TOP, P_R_BOTTOM_PRINTED)?),
        single(Role::ProbabilityEdge(0), reversed(E_PR_UR_PRINTED)),
        single(Role::Utility(0), Strand::lit(U_R)),
        single(Role::TerminationEdge(0), reversed(E_UR_T_PRINTED)),
        (Role::Termination, duplex(Role::Termination, T_TOP, T_BOTTOM_PRINTED)?),
        single(Role::Threshold(0, 0), Strand::lit(THRESHOLD_R)),
    ])
}

fn fits(structure: &Structure, layout: &(Layout, Option<Layout>), middle_lengths: &[usize], role: Role) -> bool {
    use super::motif::{layout_len, DOMAIN_LEN};
    let top_ok = structure.top().len() == layout_len(&layout.0, middle_lengths);
    let bottom_ok = match (structure, &layout.1) {
        (Structure::Single(_), None) => true,
        (Structure::Double(d), Some(bl)) => {
            let expected = match role {
                Role::Probability(_) => DOMAIN_LEN as i64,
                Role::Termination => 2 * DOMAIN_LEN as i64,
                _ => 0,
            };
            d.bottom().len() == layout_len(bl, middle_lengths) && d.offset() == expected
        }
        _ => false,
    };
    top_ok && bottom_ok
}

fn opaque(role: Role, double: bool) -> (Layout, Option<Layout>) {
    (
        vec![(DomainId::Opaque(role, StrandPart::Top), Sense::Plus)],
        double.then(|| vec![(DomainId::Opaque(role, StrandPart::Bottom), Sense::Plus)]),
    )
}

/// Replaces the path (1, R) strands of `set` with the figure's literals.
/// Literals that do not fit the motif template keep an opaque layout so the
/// validator reports them instead of misreading their domains.
pub fn overlay_fixture(set: &mut SequenceSet) -> Result<(), FixtureError> {
    if set.options == 0 || set.outcomes == 0 {
        return Err(FixtureError::TooSmall);
    }
    for (role, structure) in fixture_structures()? {
        let template = template_layout(role);
        let layout = if fits(&structure, &template, &set.middle_lengths, role) {
            template
        } else {
            opaque(role, role.is_double())
        };
        set.strands.insert(role, structure);
        set.layouts.insert(role, layout);
        set.fixture_roles.insert(role);
    }
    let head = &set.strands[&Role::Choice].top().bases()[..10];
    let t = set.strands[&Role::Termination].top().bases();
    let tail = &t[t.len() - 10..];
    set.primers = PrimerPair::from_ends(head, tail)?;
    Ok(())
}
