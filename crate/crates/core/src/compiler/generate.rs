//! Seeded sequence generation. Domains are sampled with bounded GC content,
//! site halves are pinned into the option and utility domains, and any
//! domain implicated by a validation failure is resampled until the set is
//! clean or the round budget runs out.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::strand::{Base, RecognitionSite};

use super::motif::{build_structure, template_layout, DomainId, Role, DOMAIN_LEN};
use super::sequences::{PrimerPair, SequenceSet};
use super::validate::{validate_sequences, SITE_OFFSET};

pub const MAX_ROUNDS: usize = 2000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenerateError {
    #[error("sequence search exhausted for seed {seed}: {constraint}")]
    GenerationFailed { seed: u64, constraint: String },
    #[error("site {0} does not fit a {DOMAIN_LEN}-nt domain pair at offset {SITE_OFFSET}")]
    SiteGeometry(String),
}

/// Bases fixed inside a domain by an embedded recognition site.
fn pinned(id: DomainId, option_sites: &[RecognitionSite], outcome_sites: &[RecognitionSite]) -> Vec<(usize, Base)> {
    let (site, head) = match id {
        DomainId::OptionHead(i) => (&option_sites[i], true),
        DomainId::OptionTail(i) => (&option_sites[i], false),
        DomainId::UtilityHead(j) => (&outcome_sites[j], true),
        DomainId::UtilityTail(j) => (&outcome_sites[j], false),
        _ => return Vec::new(),
    };
    site.site()
        .iter()
        .enumerate()
        .filter_map(|(k, &b)| {
            let pos = SITE_OFFSET + k;
            match (head, pos < DOMAIN_LEN) {
                (true, true) => Some((pos, b)),
                (false, false) => Some((pos - DOMAIN_LEN, b)),
                _ => None,
            }
        })
        .collect()
}

fn gc_bounds(len: usize) -> (usize, usize) {
    ((2 * len).div_ceil(5), (3 * len) / 5)
}

fn sample_domain(rng: &mut ChaCha8Rng, len: usize, fixed: &[(usize, Base)]) -> Vec<Base> {
    let (lo, hi) = gc_bounds(len);
    loop {
        let mut seq: Vec<Base> = (0..len).map(|_| Base::ALL[rng.gen_range(0..4)]).collect();
        for &(p, b) in fixed {
            seq[p] = b;
        }
        let gc = seq.iter().filter(|b| b.is_gc()).count();
        if (lo..=hi).contains(&gc) {
            return seq;
        }
    }
}

pub(crate) fn domain_ids(options: usize, outcomes: usize) -> Vec<DomainId> {
    let mut ids: Vec<DomainId> = (0..4).map(DomainId::Choice).collect();
    for i in 0..options {
        ids.push(DomainId::OptionHead(i));
        ids.push(DomainId::OptionTail(i));
    }
    for j in 0..outcomes {
        ids.extend([
            DomainId::StickyLeft(j),
            DomainId::Middle(j),
            DomainId::StickyRight(j),
            DomainId::UtilityHead(j),
            DomainId::UtilityTail(j),
            DomainId::ThresholdTail(j),
        ]);
    }
    ids.extend((0..4).map(DomainId::Termination));
    ids
}

/// Assembles strands, layouts and primers from a domain assignment.
pub(crate) fn assemble_set(
    options: usize,
    outcomes: usize,
    domains: &BTreeMap<DomainId, Vec<Base>>,
    middle_lengths: &[usize],
    option_sites: &[RecognitionSite],
    outcome_sites: &[RecognitionSite],
) -> SequenceSet {
    let mut strands = BTreeMap::new();
    let mut layouts = BTreeMap::new();
    for role in Role::all(options, outcomes) {
        let structure = build_structure(role, domains).expect("template layouts pair by construction");
        strands.insert(role, structure);
        layouts.insert(role, template_layout(role));
    }
    let primers = PrimerPair::from_ends(
        &domains[&DomainId::Choice(0)],
        &domains[&DomainId::Termination(3)],
    )
    .expect("domains are non-empty");
    SequenceSet {
        options,
        outcomes,
        strands,
        layouts,
        fixture_roles: BTreeSet::new(),
        middle_lengths: middle_lengths.to_vec(),
        option_sites: option_sites.to_vec(),
        outcome_sites: outcome_sites.to_vec(),
        primers,
    }
}

/// Generates a clean sequence set, deterministic in `seed`.
pub fn generate_sequences(
    option_sites: &[RecognitionSite],
    outcome_sites: &[RecognitionSite],
    middle_lengths: &[usize],
    seed: u64,
) -> Result<SequenceSet, GenerateError> {
    let options = option_sites.len();
    let outcomes = outcome_sites.len();
    for site in option_sites.iter().chain(outcome_sites) {
        if SITE_OFFSET + site.len() > 2 * DOMAIN_LEN || SITE_OFFSET + site.len() <= DOMAIN_LEN {
            return Err(GenerateError::SiteGeometry(site.name().to_string()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len_of = |id: DomainId| match id {
        DomainId::Middle(j) => middle_lengths[j],
        _ => DOMAIN_LEN,
    };
    let mut domains: BTreeMap<DomainId, Vec<Base>> = BTreeMap::new();
    for id in domain_ids(options, outcomes) {
        let fixed = pinned(id, option_sites, outcome_sites);
        domains.insert(id, sample_domain(&mut rng, len_of(id), &fixed));
    }
    let mut last = String::new();
    for _ in 0..MAX_ROUNDS {
        let set = assemble_set(options, outcomes, &domains, middle_lengths, option_sites, outcome_sites);
        let violations = validate_sequences(&set);
        let Some(first) = violations.first() else {
            return Ok(set);
        };
        last = first.to_string();
        let mut resample = BTreeSet::new();
        for v in &violations {
            match v.domains.choose(&mut rng) {
                Some(&id) => {
                    resample.insert(id);
                }
                None => {
                    return Err(GenerateError::GenerationFailed {
                        seed,
                        constraint: v.to_string(),
                    })
                }
            }
        }
        for id in resample {
            let fixed = pinned(id, option_sites, outcome_sites);
            domains.insert(id, sample_domain(&mut rng, len_of(id), &fixed));
        }
    }
    Err(GenerateError::GenerationFailed { seed, constraint: last })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::enzymes::EnzymeLibrary;

    fn canonical_sites() -> (Vec<RecognitionSite>, Vec<RecognitionSite>) {
        let lib = EnzymeLibrary::standard();
        let all = lib.as_slice();
        (all[..3].to_vec(), all[3..6].to_vec())
    }

    #[test]
    fn canonical_seed_zero_is_clean() {
        let (o, u) = canonical_sites();
        let set = generate_sequences(&o, &u, &[7, 16, 34], 0).unwrap();
        assert!(validate_sequences(&set).is_empty());
        for (i, site) in ["CAGCTG", "GTTAAC", "AGGCCT"].iter().enumerate() {
            let top = set.strands[&Role::Option(i)].top();
            assert_eq!(top.len(), 20);
            assert_eq!(top.sequence()[7..13], **site);
        }
    }

    #[test]
    fn same_seed_same_sequences() {
        let (o, u) = canonical_sites();
        let a = generate_sequences(&o, &u, &[7, 16, 34], 11).unwrap();
        let b = generate_sequences(&o, &u, &[7, 16, 34], 11).unwrap();
        assert_eq!(a, b);
        let c = generate_sequences(&o, &u, &[7, 16, 34], 12).unwrap();
        assert_ne!(a.strands, c.strands);
    }

    #[test]
    fn gc_bounds_match_fraction_limits() {
        assert_eq!(gc_bounds(10), (4, 6));
        assert_eq!(gc_bounds(7), (3, 4));
        assert_eq!(gc_bounds(16), (7, 9));
    }

    #[test]
    fn constructs_have_motif_length() {
        let (o, u) = canonical_sites();
        let set = generate_sequences(&o, &u, &[7, 16, 34], 3).unwrap();
        for (j, m) in [7usize, 16, 34].iter().enumerate() {
            let d = set.construct(0, j).unwrap();
            assert_eq!(d.len(), 140 + m);
            assert!(set.primers.amplifies(&d));
        }
    }
}
