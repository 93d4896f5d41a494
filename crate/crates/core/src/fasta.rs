//! FASTA export and import of strand sets. One record per strand, the role
//! tag as identifier, the sequence on a single unwrapped line.

use crate::strand::{Strand, StrandError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FastaError {
    #[error("line {line}: sequence data before the first header")]
    MissingHeader { line: usize },
    #[error("line {line}: record {id:?} has no sequence")]
    EmptyRecord { line: usize, id: String },
    #[error("line {line}: {source}")]
    Sequence { line: usize, source: StrandError },
}

pub fn write_fasta<'a>(strands: impl IntoIterator<Item = &'a Strand>) -> String {
    let mut out = String::new();
    for s in strands {
        out.push('>');
        out.push_str(s.tag().unwrap_or(""));
        out.push('\n');
        out.push_str(&s.sequence());
        out.push('\n');
    }
    out
}

pub fn parse_fasta(text: &str) -> Result<Vec<Strand>, FastaError> {
    let mut records: Vec<(usize, String, String)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if let Some(id) = line.strip_prefix('>') {
            records.push((line_no, id.to_string(), String::new()));
        } else if line.trim().is_empty() {
            continue;
        } else {
            let rec = records
                .last_mut()
                .ok_or(FastaError::MissingHeader { line: line_no })?;
            rec.2.push_str(line.trim());
        }
    }
    records
        .into_iter()
        .map(|(line, id, seq)| {
            if seq.is_empty() {
                return Err(FastaError::EmptyRecord { line, id });
            }
            let strand: Strand = seq
                .parse()
                .map_err(|source| FastaError::Sequence { line, source })?;
            Ok(if id.is_empty() {
                strand
            } else {
                strand.retagged(id)
            })
        })
        .collect()
}
