//! Nucleotide strands, annealed duplexes, recognition sites and blunt
//! cleavage.
//!
//! Coordinates: a duplex is drawn with its top strand 5'→3' from left to
//! right starting at column 0. The bottom strand is drawn antiparallel
//! (3'→5' left to right) and its leftmost base sits at column `offset`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StrandError {
    #[error("invalid base {0:?}")]
    InvalidBase(char),
    #[error("empty strand")]
    Empty,
    #[error("strands mismatch at column {0}")]
    Mismatch(i64),
    #[error("strands do not overlap")]
    NoOverlap,
    #[error("two distinct maximal alignments with {0} paired bases")]
    AmbiguousAlignment(usize),
    #[error("recognition site {0:?} is not palindromic")]
    NotPalindromic(String),
    #[error("cut offset {offset} outside site of length {len}")]
    CutOffset { offset: usize, len: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Base {
    A,
    C,
    G,
    T,
}

impl Base {
    pub const ALL: [Base; 4] = [Base::A, Base::C, Base::G, Base::T];

    pub fn complement(self) -> Base {
        match self {
            Base::A => Base::T,
            Base::T => Base::A,
            Base::C => Base::G,
            Base::G => Base::C,
        }
    }

    pub fn is_gc(self) -> bool {
        matches!(self, Base::G | Base::C)
    }

    pub fn from_char(c: char) -> Result<Base, StrandError> {
        match c.to_ascii_uppercase() {
            'A' => Ok(Base::A),
            'C' => Ok(Base::C),
            'G' => Ok(Base::G),
            'T' => Ok(Base::T),
            _ => Err(StrandError::InvalidBase(c)),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Base::A => 'A',
            Base::C => 'C',
            Base::G => 'G',
            Base::T => 'T',
        }
    }

    /// 2-bit code, used for packing windows.
    pub fn code(self) -> u64 {
        self as u64
    }
}

pub fn parse_bases(text: &str) -> Result<Vec<Base>, StrandError> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(Base::from_char)
        .collect()
}

pub fn bases_to_string(bases: &[Base]) -> String {
    bases.iter().map(|b| b.to_char()).collect()
}

pub fn complement_bases(bases: &[Base]) -> Vec<Base> {
    bases.iter().map(|b| b.complement()).collect()
}

pub fn reverse_complement_bases(bases: &[Base]) -> Vec<Base> {
    bases.iter().rev().map(|b| b.complement()).collect()
}

pub fn gc_fraction(bases: &[Base]) -> f64 {
    if bases.is_empty() {
        return 0.0;
    }
    bases.iter().filter(|b| b.is_gc()).count() as f64 / bases.len() as f64
}

/// A nonempty single strand read 5'→3', with an optional role tag that is
/// fixed at construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Strand {
    bases: Vec<Base>,
    tag: Option<String>,
}

impl Strand {
    pub fn new(bases: Vec<Base>) -> Result<Self, StrandError> {
        if bases.is_empty() {
            return Err(StrandError::Empty);
        }
        Ok(Self { bases, tag: None })
    }

    pub fn tagged(bases: Vec<Base>, tag: impl Into<String>) -> Result<Self, StrandError> {
        let mut s = Self::new(bases)?;
        s.tag = Some(tag.into());
        Ok(s)
    }

    /// Parses a literal; panics on invalid input. Meant for constants.
    pub fn lit(text: &str) -> Self {
        text.parse().expect("valid strand literal")
    }

    pub fn bases(&self) -> &[Base] {
        &self.bases
    }

    pub fn tag(&self) -> Option<&str> {
        self.tag.as_deref()
    }

    /// Same bases under a new tag (a new strand, the original is untouched).
    pub fn retagged(&self, tag: impl Into<String>) -> Self {
        Self {
            bases: self.bases.clone(),
            tag: Some(tag.into()),
        }
    }

    pub fn untagged(&self) -> Self {
        Self {
            bases: self.bases.clone(),
            tag: None,
        }
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn gc_fraction(&self) -> f64 {
        gc_fraction(&self.bases)
    }

    pub fn sequence(&self) -> String {
        bases_to_string(&self.bases)
    }

    pub fn contains(&self, motif: &[Base]) -> bool {
        !motif.is_empty() && self.bases.windows(motif.len()).any(|w| w == motif)
    }

    /// Start positions of every occurrence of `motif`.
    pub fn occurrences(&self, motif: &[Base]) -> Vec<usize> {
        if motif.is_empty() || motif.len() > self.bases.len() {
            return Vec::new();
        }
        self.bases
            .windows(motif.len())
            .enumerate()
            .filter(|(_, w)| *w == motif)
            .map(|(i, _)| i)
            .collect()
    }
}

impl FromStr for Strand {
    type Err = StrandError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strand::new(parse_bases(s)?)
    }
}

impl fmt::Display for Strand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.sequence())
    }
}

/// Position-wise complement: the partner strand as it is written aligned
/// underneath the input, i.e. read 3'→5'.
pub fn complement(strand: &Strand) -> Strand {
    Strand {
        bases: complement_bases(&strand.bases),
        tag: strand.tag.clone(),
    }
}

/// The partner strand read 5'→3'.
pub fn reverse_complement(strand: &Strand) -> Strand {
    Strand {
        bases: reverse_complement_bases(&strand.bases),
        tag: strand.tag.clone(),
    }
}

/// Two antiparallel strands paired over a contiguous window.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Duplex {
    top: Strand,
    bottom: Strand,
    offset: i64,
}

impl Duplex {
    /// Builds the duplex, checking every aligned column pairs.
    pub fn new(top: Strand, bottom: Strand, offset: i64) -> Result<Self, StrandError> {
        let d = Self { top, bottom, offset };
        let (start, end) = d.paired_span();
        if start >= end {
            return Err(StrandError::NoOverlap);
        }
        for col in start..end {
            let t = d.top_base(col).expect("column within top");
            let b = d.bottom_base(col).expect("column within bottom");
            if t.complement() != b {
                return Err(StrandError::Mismatch(col));
            }
        }
        Ok(d)
    }

    /// Fully paired blunt duplex of a strand with its reverse complement.
    pub fn from_top(top: Strand) -> Self {
        let bottom = reverse_complement(&top);
        Self {
            top,
            bottom,
            offset: 0,
        }
    }

    pub fn top(&self) -> &Strand {
        &self.top
    }

    pub fn bottom(&self) -> &Strand {
        &self.bottom
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    fn top_range(&self) -> (i64, i64) {
        (0, self.top.len() as i64)
    }

    fn bottom_range(&self) -> (i64, i64) {
        (self.offset, self.offset + self.bottom.len() as i64)
    }

    /// Columns `[start, end)` where both strands are present.
    pub fn paired_span(&self) -> (i64, i64) {
        let (ts, te) = self.top_range();
        let (bs, be) = self.bottom_range();
        (ts.max(bs), te.min(be))
    }

    /// Columns `[start, end)` covered by either strand.
    pub fn extent(&self) -> (i64, i64) {
        let (ts, te) = self.top_range();
        let (bs, be) = self.bottom_range();
        (ts.min(bs), te.max(be))
    }

    pub fn paired_len(&self) -> usize {
        let (s, e) = self.paired_span();
        (e - s).max(0) as usize
    }

    /// Length in base pairs, overhangs included.
    pub fn len(&self) -> usize {
        let (s, e) = self.extent();
        (e - s) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Single-stranded bases at the left and right ends.
    pub fn overhangs(&self) -> (usize, usize) {
        let (ps, pe) = self.paired_span();
        let (es, ee) = self.extent();
        ((ps - es) as usize, (ee - pe) as usize)
    }

    pub fn is_blunt(&self) -> bool {
        self.overhangs() == (0, 0)
    }

    pub fn top_base(&self, col: i64) -> Option<Base> {
        usize::try_from(col).ok().and_then(|c| self.top.bases.get(c).copied())
    }

    /// Bottom base drawn at `col`.
    pub fn bottom_base(&self, col: i64) -> Option<Base> {
        let rel = col - self.offset;
        if rel < 0 || rel >= self.bottom.len() as i64 {
            return None;
        }
        let idx = self.bottom.len() as i64 - 1 - rel;
        Some(self.bottom.bases[idx as usize])
    }

    /// Top-strand bases of the paired window.
    pub fn paired_top(&self) -> &[Base] {
        let (s, e) = self.paired_span();
        &self.top.bases[s as usize..e as usize]
    }

    /// The same molecule drawn with its strands exchanged.
    pub fn swapped(&self) -> Duplex {
        let offset = self.top.len() as i64 - self.offset - self.bottom.len() as i64;
        Duplex {
            top: self.bottom.clone(),
            bottom: self.top.clone(),
            offset,
        }
    }

    /// Sub-duplex of columns `[from, to)`; either strand may be absent from
    /// part of the window but both must keep at least one base.
    fn slice(&self, from: i64, to: i64, tag: &str) -> Duplex {
        let (ts, te) = self.top_range();
        let (bs, be) = self.bottom_range();
        let t0 = from.max(ts);
        let t1 = to.min(te);
        let b0 = from.max(bs);
        let b1 = to.min(be);
        let top_bases = self.top.bases[t0 as usize..t1 as usize].to_vec();
        // bottom stored 5'→3', i.e. reversed relative to columns
        let bl = self.bottom.len() as i64;
        let lo = (bl - (b1 - self.offset)) as usize;
        let hi = (bl - (b0 - self.offset)) as usize;
        let bottom_bases = self.bottom.bases[lo..hi].to_vec();
        Duplex {
            top: Strand {
                bases: top_bases,
                tag: Some(tag.to_string()),
            },
            bottom: Strand {
                bases: bottom_bases,
                tag: Some(tag.to_string()),
            },
            offset: b0 - t0,
        }
    }
}

/// Recognition sequence of a blunt-cutting restriction enzyme.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RecognitionSite {
    name: String,
    site: Vec<Base>,
    cut_offset: usize,
}

impl RecognitionSite {
    pub fn new(name: impl Into<String>, site: &str, cut_offset: usize) -> Result<Self, StrandError> {
        let bases = parse_bases(site)?;
        if bases.is_empty() {
            return Err(StrandError::Empty);
        }
        if reverse_complement_bases(&bases) != bases {
            return Err(StrandError::NotPalindromic(site.to_string()));
        }
        if cut_offset == 0 || cut_offset >= bases.len() {
            return Err(StrandError::CutOffset {
                offset: cut_offset,
                len: bases.len(),
            });
        }
        Ok(Self {
            name: name.into(),
            site: bases,
            cut_offset,
        })
    }

    /// Palindromic site cut in the middle.
    pub fn blunt(name: impl Into<String>, site: &str) -> Result<Self, StrandError> {
        let len = site.trim().len();
        Self::new(name, site, len / 2)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn site(&self) -> &[Base] {
        &self.site
    }

    pub fn cut_offset(&self) -> usize {
        self.cut_offset
    }

    pub fn len(&self) -> usize {
        self.site.len()
    }

    pub fn is_empty(&self) -> bool {
        self.site.is_empty()
    }
}

/// Finds the unique maximal perfect-complement alignment of two strands.
///
/// `b` is laid antiparallel under `a`; every candidate offset whose whole
/// overlap pairs is scored by overlap length.
pub fn anneal(a: &Strand, b: &Strand, min_overlap: usize) -> Result<Option<Duplex>, StrandError> {
    let min_overlap = min_overlap.max(1);
    let la = a.len() as i64;
    let lb = b.len() as i64;
    let mut best: Option<(usize, i64)> = None;
    let mut tied = false;
    for offset in (1 - lb)..la {
        let start = offset.max(0);
        let end = la.min(offset + lb);
        let overlap = (end - start) as usize;
        if overlap < min_overlap {
            continue;
        }
        let pairs = (start..end).all(|col| {
            let t = a.bases[col as usize];
            let bi = (lb - 1 - (col - offset)) as usize;
            t.complement() == b.bases[bi]
        });
        if !pairs {
            continue;
        }
        match best {
            Some((len, _)) if overlap < len => {}
            Some((len, _)) if overlap == len => tied = true,
            _ => {
                best = Some((overlap, offset));
                tied = false;
            }
        }
    }
    match best {
        None => Ok(None),
        Some((len, _)) if tied => Err(StrandError::AmbiguousAlignment(len)),
        Some((_, offset)) => Duplex::new(a.clone(), b.clone(), offset).map(Some),
    }
}

/// Columns where the site starts, restricted to the double-stranded window.
pub fn find_sites(duplex: &Duplex, site: &RecognitionSite) -> Vec<i64> {
    let (start, _) = duplex.paired_span();
    let paired = duplex.paired_top();
    if site.len() > paired.len() {
        return Vec::new();
    }
    paired
        .windows(site.len())
        .enumerate()
        .filter(|(_, w)| *w == site.site())
        .map(|(i, _)| start + i as i64)
        .collect()
}

/// Severs the duplex at every recognition site. New ends are blunt and
/// every fragment is tagged `waste-fragment`.
pub fn cut(duplex: &Duplex, site: &RecognitionSite) -> Vec<Duplex> {
    let cuts: Vec<i64> = find_sites(duplex, site)
        .into_iter()
        .map(|p| p + site.cut_offset() as i64)
        .collect();
    cut_at(duplex, &cuts)
}

/// Blunt cuts at the given columns (each strictly inside the paired window).
pub fn cut_at(duplex: &Duplex, columns: &[i64]) -> Vec<Duplex> {
    if columns.is_empty() {
        return vec![duplex.clone()];
    }
    let mut cols = columns.to_vec();
    cols.sort_unstable();
    cols.dedup();
    let (es, ee) = duplex.extent();
    let mut bounds = vec![es];
    bounds.extend(cols);
    bounds.push(ee);
    bounds
        .windows(2)
        .map(|w| duplex.slice(w[0], w[1], "waste-fragment"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const OPTION_ONE: &str = "TCTGACTCAGCTGAGATCCA";

    fn pvuii() -> RecognitionSite {
        RecognitionSite::blunt("PvuII", "CAGCTG").unwrap()
    }

    #[test]
    fn complement_matches_choice_node_bottom_row() {
        let top = Strand::lit("GGACCGACAC");
        assert_eq!(complement(&top).sequence(), "CCTGGCTGTG");
        assert_eq!(complement(&Strand::lit("AAAA")).sequence(), "TTTT");
    }

    #[test]
    fn reverse_complements() {
        assert_eq!(reverse_complement(&Strand::lit("CAGCTG")).sequence(), "CAGCTG");
        assert_eq!(reverse_complement(&Strand::lit("ACGT")).sequence(), "ACGT");
        assert_eq!(reverse_complement(&Strand::lit("AAC")).sequence(), "GTT");
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!("ACGN".parse::<Strand>(), Err(StrandError::InvalidBase('N')));
        assert_eq!("".parse::<Strand>(), Err(StrandError::Empty));
        assert!(matches!(
            RecognitionSite::blunt("x", "GAATTT"),
            Err(StrandError::NotPalindromic(_))
        ));
    }

    #[test]
    fn tag_is_kept_by_complement() {
        let s = Strand::tagged(parse_bases("ACG").unwrap(), "O_1").unwrap();
        assert_eq!(complement(&s).tag(), Some("O_1"));
        assert_eq!(s.retagged("x").tag(), Some("x"));
        assert_eq!(s.tag(), Some("O_1"));
    }

    #[test]
    fn chance_node_edge_pairs_with_option_rear() {
        // printed 3'→5' in the motif table; stored 5'→3'
        let edge: Strand = "GACTCTAGGTTGTAGTGCCT".chars().rev().collect::<String>().parse().unwrap();
        let option = Strand::lit(OPTION_ONE);
        let d = anneal(&option, &edge, 5).unwrap().unwrap();
        assert_eq!(d.paired_len(), 10);
        assert_eq!(d.offset(), 10);
        assert_eq!(d.overhangs(), (10, 10));
        assert_eq!(bases_to_string(d.paired_top()), "CTGAGATCCA");
    }

    #[test]
    fn anneal_without_partner() {
        let a = Strand::lit("AAAAAAAAAA");
        let b = Strand::lit("AAAAAAAAAA");
        assert_eq!(anneal(&a, &b, 3).unwrap(), None);
    }

    #[test]
    fn anneal_full_complement_is_blunt() {
        let a = Strand::lit(OPTION_ONE);
        let d = anneal(&a, &reverse_complement(&a), 10).unwrap().unwrap();
        assert!(d.is_blunt());
        assert_eq!(d.len(), 20);
    }

    #[test]
    fn anneal_reports_ambiguity() {
        // ACAC pairs with GTGT at two shifts of equal length
        let a = Strand::lit("ACACAC");
        let b = Strand::lit("GTGT");
        assert!(anneal(&a, &b, 4).is_err());
    }

    #[test]
    fn finds_pvuii_in_option_one() {
        let d = Duplex::from_top(Strand::lit(OPTION_ONE));
        assert_eq!(find_sites(&d, &pvuii()), vec![7]);
        let empty = Duplex::from_top(Strand::lit("AAAAAAAAAAAA"));
        assert!(find_sites(&empty, &pvuii()).is_empty());
    }

    #[test]
    fn ignores_sites_in_overhangs() {
        // CAGCTG sits in the single-stranded left overhang
        let top = Strand::lit("CAGCTGAAACCCGGGTTT");
        let paired_part = Strand::lit("AAACCCGGGTTT");
        let d = Duplex::new(top, reverse_complement(&paired_part), 6).unwrap();
        assert_eq!(d.overhangs(), (6, 0));
        assert!(find_sites(&d, &pvuii()).is_empty());
    }

    #[test]
    fn option_duplex_cuts_into_two_blunt_halves() {
        let d = Duplex::from_top(Strand::lit(OPTION_ONE));
        let parts = cut(&d, &pvuii());
        assert_eq!(parts.len(), 2);
        for p in &parts {
            assert_eq!(p.len(), 10);
            assert!(p.is_blunt());
            assert_eq!(p.top().tag(), Some("waste-fragment"));
        }
        assert_eq!(parts[0].top().sequence(), "TCTGACTCAG");
        assert_eq!(parts[1].top().sequence(), "CTGAGATCCA");
        assert_eq!(parts[1].bottom().sequence(), "TGGATCTCAG");
    }

    #[test]
    fn cut_without_site_returns_input() {
        let d = Duplex::from_top(Strand::lit("ACGTACGTAAAA"));
        assert_eq!(cut(&d, &pvuii()), vec![d]);
    }

    #[test]
    fn cut_keeps_overhangs_on_outer_fragments() {
        let inner = Strand::lit("GGGCAGCTGTTT");
        let top = Strand::lit("AAGGGCAGCTGTTT");
        let mut bottom_bases = parse_bases("GG").unwrap();
        bottom_bases.extend(reverse_complement(&inner).bases());
        let d = Duplex::new(top, Strand::new(bottom_bases).unwrap(), 2).unwrap();
        assert_eq!(d.overhangs(), (2, 2));
        assert_eq!(d.len(), 16);
        let parts = cut(&d, &pvuii());
        assert_eq!(parts.len(), 2);
        assert_eq!(parts.iter().map(Duplex::len).sum::<usize>(), d.len());
        assert_eq!(parts[0].overhangs(), (2, 0));
        assert_eq!(parts[1].overhangs(), (0, 2));
        assert_eq!(parts[0].top().sequence(), "AAGGGCAG");
        assert_eq!(parts[1].bottom().sequence(), "GGAAACAG");
    }

    #[test]
    fn swapped_duplex_mirrors_sites() {
        let top = Strand::lit("ATCAGCTGAAGGCCTAC");
        let d = Duplex::from_top(top);
        let hits = find_sites(&d, &pvuii());
        let swapped = d.swapped();
        let mirrored: Vec<i64> = find_sites(&swapped, &pvuii())
            .into_iter()
            .map(|p| d.len() as i64 - p - 6)
            .collect();
        assert_eq!(hits, mirrored);
    }
}
