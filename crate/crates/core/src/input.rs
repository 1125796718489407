//! Reading texts from raw byte files and FASTA-like collections.

use thiserror::Error;

use crate::oracle::{TextBuffer, TextError, SENTINEL, SEPARATOR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputFormat {
    /// FASTA when the first non-blank byte is `>`, raw otherwise.
    #[default]
    Auto,
    Raw,
    Fasta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SentinelMode {
    /// Append the sentinel unless present.
    #[default]
    Auto,
    /// The input must already end with a valid sentinel.
    Strict,
}

#[derive(Debug, Error)]
pub enum InputError {
    #[error("FASTA input holds no sequence records")]
    NoRecords,
    #[error("record {record} contains reserved byte {byte:#04x}")]
    ReservedByte { record: usize, byte: u8 },
    #[error(transparent)]
    Text(#[from] TextError),
}

/// Sequence records of a FASTA file; whitespace inside sequences is dropped.
pub fn parse_fasta(bytes: &[u8]) -> Vec<Vec<u8>> {
    let mut records: Vec<Vec<u8>> = Vec::new();
    for line in bytes.split(|&c| c == b'\n') {
        if line.first() == Some(&b'>') {
            records.push(Vec::new());
            continue;
        }
        let seq = line.iter().copied().filter(|c| !c.is_ascii_whitespace());
        match records.last_mut() {
            Some(rec) => rec.extend(seq),
            // Sequence before any header: treat as an unnamed record.
            None => {
                let rec: Vec<u8> = seq.collect();
                if !rec.is_empty() {
                    records.push(rec);
                }
            }
        }
    }
    records
}

fn is_fasta(bytes: &[u8]) -> bool {
    bytes.iter().find(|c| !c.is_ascii_whitespace()) == Some(&b'>')
}

/// Records joined by the separator, terminated by the sentinel.
pub fn collection_text(records: &[Vec<u8>]) -> Result<TextBuffer, InputError> {
    if records.is_empty() {
        return Err(InputError::NoRecords);
    }
    for (record, seq) in records.iter().enumerate() {
        if let Some(&byte) = seq.iter().find(|&&c| c == SENTINEL || c == SEPARATOR) {
            return Err(InputError::ReservedByte { record, byte });
        }
    }
    Ok(TextBuffer::from_records(records)?)
}

pub fn load_text(
    bytes: Vec<u8>,
    format: InputFormat,
    sentinel: SentinelMode,
) -> Result<TextBuffer, InputError> {
    let fasta = match format {
        InputFormat::Fasta => true,
        InputFormat::Raw => false,
        InputFormat::Auto => is_fasta(&bytes),
    };
    if fasta {
        return collection_text(&parse_fasta(&bytes));
    }
    Ok(match sentinel {
        SentinelMode::Auto => TextBuffer::with_sentinel(bytes)?,
        SentinelMode::Strict => TextBuffer::new(bytes)?,
    })
}
