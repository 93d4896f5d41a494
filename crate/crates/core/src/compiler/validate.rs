//! Static checks over an encoding's strands.
//!
//! Every 10-mer window of every strand is labelled with the domain pieces it
//! was designed from. A window and its reverse complement share a canonical
//! key; two windows with the same key must carry the same label, otherwise
//! some pair of strands can hybridize where the motif does not intend it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::strand::{Base, RecognitionSite, Strand};

use super::motif::{domain_len, DomainId, Layout, Role, Sense, StrandPart, Structure, DOMAIN_LEN};
use super::sequences::SequenceSet;

pub const WINDOW: usize = 10;
/// Offset of a designed recognition site inside its 20-nt host strand.
pub const SITE_OFFSET: usize = 7;
pub const GC_MIN: (usize, usize) = (2, 5);
pub const GC_MAX: (usize, usize) = (3, 5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ViolationKind {
    /// Two windows share a sequence (or are complementary) without being designed to.
    UnintendedWindow,
    /// A window is its own reverse complement.
    SelfComplementary,
    /// An assigned site occurs outside its designed locus in a full construct.
    StraySite,
    /// A designed site does not occur exactly once in its host strand.
    SiteCount,
    /// GC fraction outside [0.4, 0.6].
    GcContent,
    /// Strand lengths or duplex offsets do not match the motif.
    Geometry,
    /// The same domain reads differently in two strands.
    InconsistentDomain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
    /// Domains whose resampling may clear the violation.
    pub domains: Vec<DomainId>,
}

impl Violation {
    fn new(kind: ViolationKind, detail: String, domains: impl IntoIterator<Item = DomainId>) -> Self {
        let domains: BTreeSet<DomainId> = domains.into_iter().collect();
        Self {
            kind,
            detail,
            domains: domains.into_iter().collect(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.detail)
    }
}

/// Per-base annotation: domain, sense, coordinate in the domain's plus strand.
type Annotation = (DomainId, Sense, usize);

/// Labelled piece of a window: domain, sense, plus-strand range.
type Segment = (DomainId, Sense, usize, usize);

fn piece_len(id: DomainId, strand_len: usize, middle_lengths: &[usize]) -> usize {
    match id {
        DomainId::Opaque(..) => strand_len,
        _ => domain_len(id, middle_lengths),
    }
}

fn annotate(layout: &Layout, strand_len: usize, middle_lengths: &[usize]) -> Option<Vec<Annotation>> {
    let mut out = Vec::with_capacity(strand_len);
    for &(id, sense) in layout {
        let len = piece_len(id, strand_len, middle_lengths);
        for k in 0..len {
            let coord = match sense {
                Sense::Plus => k,
                Sense::Minus => len - 1 - k,
            };
            out.push((id, sense, coord));
        }
    }
    (out.len() == strand_len).then_some(out)
}

fn label(ann: &[Annotation]) -> Vec<Segment> {
    let mut segs: Vec<Segment> = Vec::new();
    for &(id, sense, c) in ann {
        match segs.last_mut() {
            Some(last) if last.0 == id && last.1 == sense => {
                last.2 = last.2.min(c);
                last.3 = last.3.max(c + 1);
            }
            _ => segs.push((id, sense, c, c + 1)),
        }
    }
    segs
}

fn pack(bases: impl Iterator<Item = Base>) -> u64 {
    bases.fold(0, |acc, b| (acc << 2) | b.code())
}

fn describe(label: &[Segment]) -> String {
    label
        .iter()
        .map(|(id, sense, lo, hi)| {
            let s = match sense {
                Sense::Plus => "",
                Sense::Minus => "*",
            };
            format!("{id}{s}[{lo}..{hi}]")
        })
        .collect::<Vec<_>>()
        .join("+")
}

/// Strands of the set with their tag, annotation (None if the strand does
/// not match its layout) and whether they were loaded verbatim.
struct Indexed<'a> {
    tag: String,
    strand: &'a Strand,
    annotation: Option<Vec<Annotation>>,
    fixture: bool,
}

fn index(set: &SequenceSet) -> Vec<Indexed<'_>> {
    let mut out = Vec::new();
    for (role, structure) in &set.strands {
        let Some((top_layout, bottom_layout)) = set.layouts.get(role) else {
            continue;
        };
        let fixture = set.fixture_roles.contains(role);
        let parts = [
            (StrandPart::Top, Some(top_layout)),
            (StrandPart::Bottom, bottom_layout.as_ref()),
        ];
        for (part, layout) in parts {
            let (Some(strand), Some(layout)) = (structure.part(part), layout) else {
                continue;
            };
            let tag = match (structure, part) {
                (Structure::Single(_), _) => role.tag(),
                (Structure::Double(_), StrandPart::Top) => format!("{role}.top"),
                (Structure::Double(_), StrandPart::Bottom) => format!("{role}.bottom"),
            };
            out.push(Indexed {
                tag,
                strand,
                annotation: annotate(layout, strand.len(), &set.middle_lengths),
                fixture,
            });
        }
    }
    out
}

fn check_geometry(set: &SequenceSet, strands: &[Indexed<'_>], out: &mut Vec<Violation>) {
    for s in strands {
        if s.annotation.is_none() {
            out.push(Violation::new(
                ViolationKind::Geometry,
                format!("{} has length {} which does not fit its layout", s.tag, s.strand.len()),
                [],
            ));
        }
    }
    for (role, (top, bottom)) in &set.layouts {
        let opaque = top.iter().any(|(d, _)| matches!(d, DomainId::Opaque(..)));
        if opaque {
            out.push(Violation::new(
                ViolationKind::Geometry,
                format!("{role} does not follow the motif template"),
                [],
            ));
        }
        if let (Some(Structure::Double(d)), Some(_), false) = (set.strands.get(role), bottom, opaque) {
            let expected = match role {
                Role::Probability(_) => DOMAIN_LEN as i64,
                Role::Termination => 2 * DOMAIN_LEN as i64,
                _ => 0,
            };
            if d.offset() != expected {
                out.push(Violation::new(
                    ViolationKind::Geometry,
                    format!("{role} bottom strand pairs at offset {} instead of {expected}", d.offset()),
                    [],
                ));
            }
        }
    }
    for i in 0..set.options {
        for j in 0..set.outcomes {
            if let Err(e) = set.construct(i, j) {
                out.push(Violation::new(ViolationKind::Geometry, e.to_string(), []));
            }
        }
    }
}

fn check_domains(strands: &[Indexed<'_>], out: &mut Vec<Violation>) {
    let mut seen: BTreeMap<(DomainId, usize), (Base, &str)> = BTreeMap::new();
    let mut reported = BTreeSet::new();
    for s in strands {
        let Some(ann) = &s.annotation else { continue };
        for (&(id, sense, coord), &b) in ann.iter().zip(s.strand.bases()) {
            if matches!(id, DomainId::Opaque(..)) {
                continue;
            }
            let plus = match sense {
                Sense::Plus => b,
                Sense::Minus => b.complement(),
            };
            match seen.get(&(id, coord)) {
                None => {
                    seen.insert((id, coord), (plus, &s.tag));
                }
                Some(&(prev, first)) if prev != plus && reported.insert(id) => {
                    out.push(Violation::new(
                        ViolationKind::InconsistentDomain,
                        format!("domain {id} reads differently in {first} and {} (position {coord})", s.tag),
                        [id],
                    ));
                }
                Some(_) => {}
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum WindowLabel {
    /// Per-base annotation in canonical orientation.
    Designed(Vec<Annotation>),
    /// Window of a strand that does not fit its layout; unique to its position.
    Loose(String, usize),
}

impl WindowLabel {
    fn flipped(self) -> Self {
        match self {
            WindowLabel::Designed(a) => {
                WindowLabel::Designed(a.into_iter().rev().map(|(id, sense, c)| (id, sense.flip(), c)).collect())
            }
            loose => loose,
        }
    }

    /// Two windows built in register from at least one common designed base
    /// inherit their identity from the design; whatever else coincides is
    /// shorter than a window.
    fn related(&self, other: &Self) -> bool {
        match (self, other) {
            (WindowLabel::Designed(a), WindowLabel::Designed(b)) => a
                .iter()
                .zip(b)
                .any(|(x, y)| x == y && !matches!(x.0, DomainId::Opaque(..))),
            (a, b) => a == b,
        }
    }

    fn describe(&self) -> String {
        match self {
            WindowLabel::Designed(a) => describe(&label(a)),
            WindowLabel::Loose(..) => "unlabelled".into(),
        }
    }

    fn domains(&self) -> Vec<DomainId> {
        match self {
            WindowLabel::Designed(a) => a
                .iter()
                .map(|x| x.0)
                .filter(|d| !matches!(d, DomainId::Opaque(..)))
                .collect(),
            WindowLabel::Loose(..) => Vec::new(),
        }
    }
}

fn check_windows(strands: &[Indexed<'_>], out: &mut Vec<Violation>) {
    let mut seen: HashMap<u64, (WindowLabel, String, usize)> = HashMap::new();
    let mut reported: BTreeSet<u64> = BTreeSet::new();
    for s in strands {
        let bases = s.strand.bases();
        if bases.len() < WINDOW {
            continue;
        }
        for p in 0..=bases.len() - WINDOW {
            let w = &bases[p..p + WINDOW];
            let fwd = pack(w.iter().copied());
            let rev = pack(w.iter().rev().map(|b| b.complement()));
            let raw = match &s.annotation {
                Some(ann) => WindowLabel::Designed(ann[p..p + WINDOW].to_vec()),
                None => WindowLabel::Loose(s.tag.clone(), p),
            };
            if fwd == rev {
                if reported.insert(fwd) {
                    out.push(Violation::new(
                        ViolationKind::SelfComplementary,
                        format!("{}[{p}..{}] is its own reverse complement", s.tag, p + WINDOW),
                        raw.domains(),
                    ));
                }
                continue;
            }
            let (key, lab) = if fwd < rev { (fwd, raw) } else { (rev, raw.flipped()) };
            match seen.get(&key) {
                None => {
                    seen.insert(key, (lab, s.tag.clone(), p));
                }
                Some((prev, tag, q)) => {
                    if !prev.related(&lab) && reported.insert(key) {
                        let mut domains = prev.domains();
                        domains.extend(lab.domains());
                        out.push(Violation::new(
                            ViolationKind::UnintendedWindow,
                            format!(
                                "{tag}[{q}..{}] ({}) and {}[{p}..{}] ({}) share a 10-mer",
                                q + WINDOW,
                                prev.describe(),
                                s.tag,
                                p + WINDOW,
                                lab.describe()
                            ),
                            domains,
                        ));
                    }
                }
            }
        }
    }
}

/// Domains covering each position of a path's construct top strand.
fn construct_annotation(set: &SequenceSet, option: usize, outcome: usize) -> Option<(Vec<Base>, Vec<Annotation>, Vec<(Role, usize, usize)>)> {
    let (top, spans) = set.construct_top(option, outcome).ok()?;
    let mut ann = Vec::with_capacity(top.len());
    for &(role, start, end) in &spans {
        let layout = &set.layouts.get(&role)?.0;
        match annotate(layout, end - start, &set.middle_lengths) {
            Some(a) => ann.extend(a),
            None => ann.extend(std::iter::repeat_n((DomainId::Opaque(role, StrandPart::Top), Sense::Plus, 0), end - start)),
        }
    }
    Some((top, ann, spans))
}

fn occurrences(haystack: &[Base], needle: &[Base]) -> Vec<usize> {
    if needle.is_empty() || haystack.len() < needle.len() {
        return Vec::new();
    }
    (0..=haystack.len() - needle.len())
        .filter(|&p| &haystack[p..p + needle.len()] == needle)
        .collect()
}

fn check_stray_sites(set: &SequenceSet, out: &mut Vec<Violation>) {
    let mut reported = BTreeSet::new();
    for i in 0..set.options {
        for j in 0..set.outcomes {
            let Some((top, ann, spans)) = construct_annotation(set, i, j) else {
                continue;
            };
            let host_start = |role: Role| spans.iter().find(|s| s.0 == role).map(|s| s.1);
            let designed: Vec<(&RecognitionSite, Option<usize>)> = set
                .option_sites
                .iter()
                .enumerate()
                .map(|(k, site)| (site, (k == i).then(|| host_start(Role::Option(i))).flatten()))
                .chain(
                    set.outcome_sites
                        .iter()
                        .enumerate()
                        .map(|(k, site)| (site, (k == j).then(|| host_start(Role::Utility(j))).flatten())),
                )
                .collect();
            for (site, host) in designed {
                let locus = host.map(|h| h + SITE_OFFSET);
                for p in occurrences(&top, site.site()) {
                    if Some(p) == locus {
                        continue;
                    }
                    let domains: Vec<DomainId> = ann[p..p + site.len()]
                        .iter()
                        .map(|a| a.0)
                        .filter(|d| !matches!(d, DomainId::Opaque(..)))
                        .collect();
                    if reported.insert((site.name().to_string(), domains.clone())) {
                        out.push(Violation::new(
                            ViolationKind::StraySite,
                            format!(
                                "{} site {} at column {p} of construct O_{}/P_{}",
                                site.name(),
                                crate::strand::bases_to_string(site.site()),
                                i + 1,
                                j + 1
                            ),
                            domains,
                        ));
                    }
                }
            }
        }
    }
}

fn check_site_counts(set: &SequenceSet, out: &mut Vec<Violation>) {
    let hosts = set
        .option_sites
        .iter()
        .enumerate()
        .map(|(i, s)| (Role::Option(i), s, [DomainId::OptionHead(i), DomainId::OptionTail(i)]))
        .chain(
            set.outcome_sites
                .iter()
                .enumerate()
                .map(|(j, s)| (Role::Utility(j), s, [DomainId::UtilityHead(j), DomainId::UtilityTail(j)])),
        );
    for (role, site, domains) in hosts {
        let Some(structure) = set.strands.get(&role) else { continue };
        let found = occurrences(structure.top().bases(), site.site());
        if found.len() != 1 {
            out.push(Violation::new(
                ViolationKind::SiteCount,
                format!(
                    "{role} contains the {} site {} {} times instead of once",
                    site.name(),
                    crate::strand::bases_to_string(site.site()),
                    found.len()
                ),
                domains,
            ));
        } else if found[0] != SITE_OFFSET {
            out.push(Violation::new(
                ViolationKind::SiteCount,
                format!("{role} carries the {} site at offset {} instead of {SITE_OFFSET}", site.name(), found[0]),
                domains,
            ));
        }
    }
}

fn check_gc(strands: &[Indexed<'_>], out: &mut Vec<Violation>) {
    for s in strands.iter().filter(|s| !s.fixture) {
        let gc = s.strand.bases().iter().filter(|b| b.is_gc()).count();
        let n = s.strand.len();
        if gc * GC_MIN.1 < GC_MIN.0 * n || gc * GC_MAX.1 > GC_MAX.0 * n {
            let domains: Vec<DomainId> = s
                .annotation
                .iter()
                .flatten()
                .map(|a| a.0)
                .filter(|d| !matches!(d, DomainId::Opaque(..)))
                .collect();
            out.push(Violation::new(
                ViolationKind::GcContent,
                format!("{} has GC {gc}/{n}", s.tag),
                domains,
            ));
        }
    }
}

/// Checks (a) window uniqueness, (b) stray sites in constructs, (c) site
/// counts in host strands, (d) GC content, plus geometry and domain
/// consistency. An empty result means the encoding is clean.
pub fn validate_sequences(set: &SequenceSet) -> Vec<Violation> {
    let strands = index(set);
    let mut out = Vec::new();
    check_geometry(set, &strands, &mut out);
    check_domains(&strands, &mut out);
    check_windows(&strands, &mut out);
    check_stray_sites(set, &mut out);
    check_site_counts(set, &mut out);
    check_gc(&strands, &mut out);
    out
}
