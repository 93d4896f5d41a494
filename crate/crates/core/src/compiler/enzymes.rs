//! Blunt-cutting restriction enzymes available to the encoder.

use std::collections::BTreeSet;

use crate::strand::{RecognitionSite, StrandError};

/// The six enzymes of the worked example, options first then outcomes.
pub const STANDARD_ENZYMES: [(&str, &str); 6] = [
    ("PvuII", "CAGCTG"),
    ("HpaI", "GTTAAC"),
    ("StuI", "AGGCCT"),
    ("PmlI", "CACGTG"),
    ("EcoRV", "GATATC"),
    ("ScaI", "AGTACT"),
];

/// Further palindromic 6-bp cutters with a mid-site blunt cut.
pub const EXTRA_ENZYMES: [(&str, &str); 10] = [
    ("SmaI", "CCCGGG"),
    ("NruI", "TCGCGA"),
    ("SnaBI", "TACGTA"),
    ("FspI", "TGCGCA"),
    ("MscI", "TGGCCA"),
    ("SspI", "AATATT"),
    ("ZraI", "GACGTC"),
    ("AfeI", "AGCGCT"),
    ("NaeI", "GCCGGC"),
    ("Eco53kI", "GAGCTC"),
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LibraryError {
    #[error("duplicate enzyme name {0:?}")]
    DuplicateName(String),
    #[error("duplicate recognition site for {0:?}")]
    DuplicateSite(String),
    #[error("site of {0:?} is not a palindromic blunt cutter")]
    NotBlunt(String),
    #[error(transparent)]
    Site(#[from] StrandError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnzymeLibrary {
    enzymes: Vec<RecognitionSite>,
}

impl EnzymeLibrary {
    pub fn new(enzymes: Vec<RecognitionSite>) -> Result<Self, LibraryError> {
        let mut names = BTreeSet::new();
        let mut sites = BTreeSet::new();
        for e in &enzymes {
            if !names.insert(e.name().to_string()) {
                return Err(LibraryError::DuplicateName(e.name().to_string()));
            }
            if !sites.insert(e.site().to_vec()) {
                return Err(LibraryError::DuplicateSite(e.name().to_string()));
            }
            if e.len() % 2 != 0 || e.cut_offset() != e.len() / 2 {
                return Err(LibraryError::NotBlunt(e.name().to_string()));
            }
        }
        Ok(Self { enzymes })
    }

    pub fn from_table(table: &[(&str, &str)]) -> Result<Self, LibraryError> {
        let sites = table
            .iter()
            .map(|(name, site)| RecognitionSite::blunt(*name, site))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(sites)
    }

    /// PvuII, HpaI, StuI, PmlI, EcoRV, ScaI.
    pub fn standard() -> Self {
        Self::from_table(&STANDARD_ENZYMES).expect("static table is valid")
    }

    /// The standard six followed by ten more blunt cutters (room for 5 × 5 problems
    /// and beyond).
    pub fn extended() -> Self {
        let mut table = STANDARD_ENZYMES.to_vec();
        table.extend_from_slice(&EXTRA_ENZYMES);
        Self::from_table(&table).expect("static table is valid")
    }

    pub fn len(&self) -> usize {
        self.enzymes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.enzymes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RecognitionSite> {
        self.enzymes.iter()
    }

    pub fn get(&self, name: &str) -> Option<&RecognitionSite> {
        self.enzymes.iter().find(|e| e.name() == name)
    }

    pub fn as_slice(&self) -> &[RecognitionSite] {
        &self.enzymes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_libraries_are_valid() {
        assert_eq!(EnzymeLibrary::standard().len(), 6);
        assert_eq!(EnzymeLibrary::extended().len(), 16);
        for e in EnzymeLibrary::extended().iter() {
            assert_eq!(e.cut_offset(), 3);
        }
    }

    #[test]
    fn rejects_duplicates() {
        assert_eq!(
            EnzymeLibrary::from_table(&[("A", "CAGCTG"), ("A", "GTTAAC")]),
            Err(LibraryError::DuplicateName("A".into()))
        );
        assert_eq!(
            EnzymeLibrary::from_table(&[("A", "CAGCTG"), ("B", "CAGCTG")]),
            Err(LibraryError::DuplicateSite("B".into()))
        );
    }

    #[test]
    fn rejects_offset_cutters() {
        let site = RecognitionSite::new("Odd", "CAGCTG", 1).unwrap();
        assert_eq!(
            EnzymeLibrary::new(vec![site]),
            Err(LibraryError::NotBlunt("Odd".into()))
        );
    }
}
