//! Binary index format.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic    8 bytes  "KMEMIDX1"
//! version  u32
//! n        u64
//! r        u64
//! sections text, move rows, pi, phi rows, phi^-1 rows, k-tables
//! ```
//!
//! Every section is `u64 payload length | payload | u32 CRC32(payload)`.
//! Table fields are u64 words; the text section holds raw bytes. The
//! k-table section is `u64 count` followed by `u64 k | u64 entries |
//! entries x (b, offset, best_lcp)` per table, in increasing `k`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::index::KmemIndex;
use crate::kmem::{KEntry, KTable};
use crate::oracle::{TextBuffer, TextError};
use crate::phi::{PhiInvRow, PhiInvTable, PhiRow, PhiTable};
use crate::rlbwt::{MoveRow, MoveTable};

pub const MAGIC: &[u8; 8] = b"KMEMIDX1";
pub const FORMAT_VERSION: u32 = 1;

const SECTIONS: [&str; 6] = ["text", "move", "pi", "phi", "phi_inv", "ktables"];

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("not an index file (bad magic)")]
    BadMagic,
    #[error("index format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("checksum mismatch in {section} section (stored {stored:#010x}, computed {computed:#010x})")]
    ChecksumMismatch {
        section: &'static str,
        stored: u32,
        computed: u32,
    },
    #[error("index truncated while reading {0}")]
    Truncated(&'static str),
    #[error("malformed index: {0}")]
    Malformed(String),
    #[error("stored text is invalid: {0}")]
    Text(#[from] TextError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn u64(&mut self, v: usize) {
        self.buf.extend_from_slice(&(v as u64).to_le_bytes());
    }

    fn section(&mut self, payload: Vec<u8>) {
        self.u64(payload.len());
        let crc = crc32fast::hash(&payload);
        self.buf.extend_from_slice(&payload);
        self.u32(crc);
    }
}

fn words(values: impl IntoIterator<Item = usize>) -> Vec<u8> {
    values
        .into_iter()
        .flat_map(|v| (v as u64).to_le_bytes())
        .collect()
}

pub fn serialize(index: &KmemIndex) -> Vec<u8> {
    let mut w = Writer { buf: MAGIC.to_vec() };
    w.u32(FORMAT_VERSION);
    w.u64(index.n());
    w.u64(index.r());

    w.section(index.text().as_bytes().to_vec());
    w.section(words(index.move_table().rows().iter().flat_map(|row| {
        [
            row.head,
            row.sa_head,
            row.tail,
            row.sa_tail,
            row.run_char as usize,
            row.mu,
            row.finger,
        ]
    })));
    w.section(words(index.move_table().pi().iter().copied()));
    w.section(words(
        index
            .phi()
            .rows()
            .iter()
            .flat_map(|row| [row.sa_head, row.sa_tail, row.lcp_head, row.finger]),
    ));
    w.section(words(
        index
            .phi_inv()
            .rows()
            .iter()
            .flat_map(|row| [row.sa_head, row.sa_tail, row.finger]),
    ));
    let mut kt = vec![index.ktables().len()];
    for (&k, table) in index.ktables() {
        kt.push(k);
        kt.push(table.entries().len());
        kt.extend(table.entries().iter().flat_map(|e| [e.b, e.offset, e.best_lcp]));
    }
    w.section(words(kt));
    w.buf
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, what: &'static str) -> Result<&'a [u8], FormatError> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&end| end <= self.bytes.len())
            .ok_or(FormatError::Truncated(what))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self, what: &'static str) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &'static str) -> Result<usize, FormatError> {
        let v = u64::from_le_bytes(self.take(8, what)?.try_into().unwrap());
        usize::try_from(v).map_err(|_| FormatError::Malformed(format!("{what} value {v} overflows")))
    }

    fn section(&mut self, what: &'static str) -> Result<&'a [u8], FormatError> {
        let len = self.u64(what)?;
        let payload = self.take(len, what)?;
        let stored = self.u32(what)?;
        let computed = crc32fast::hash(payload);
        if stored != computed {
            return Err(FormatError::ChecksumMismatch {
                section: what,
                stored,
                computed,
            });
        }
        Ok(payload)
    }
}

fn malformed(msg: impl Into<String>) -> FormatError {
    FormatError::Malformed(msg.into())
}

fn read_words(payload: &[u8], what: &str) -> Result<Vec<usize>, FormatError> {
    if !payload.len().is_multiple_of(8) {
        return Err(malformed(format!(
            "{what} section is not a whole number of words"
        )));
    }
    payload
        .chunks_exact(8)
        .map(|c| {
            let v = u64::from_le_bytes(c.try_into().unwrap());
            usize::try_from(v).map_err(|_| malformed(format!("{what} value {v} overflows")))
        })
        .collect()
}

fn rows_of<const W: usize>(payload: &[u8], r: usize, what: &str) -> Result<Vec<[usize; W]>, FormatError> {
    let values = read_words(payload, what)?;
    if Some(values.len()) != r.checked_mul(W) {
        return Err(malformed(format!(
            "{what} section holds {} words, expected {}",
            values.len(),
            r.saturating_mul(W)
        )));
    }
    Ok(values.chunks_exact(W).map(|c| c.try_into().unwrap()).collect())
}

pub fn deserialize(bytes: &[u8]) -> Result<KmemIndex, FormatError> {
    let mut rd = Reader { bytes, pos: 0 };
    if rd.take(MAGIC.len(), "magic").map_err(|_| FormatError::BadMagic)? != MAGIC {
        return Err(FormatError::BadMagic);
    }
    let version = rd.u32("version")?;
    if version != FORMAT_VERSION {
        return Err(FormatError::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let n = rd.u64("header")?;
    let r = rd.u64("header")?;
    if r == 0 || r > n {
        return Err(malformed(format!("run count {r} out of range for length {n}")));
    }
    let [s_text, s_move, s_pi, s_phi, s_inv, s_kt] = SECTIONS;

    let text = TextBuffer::new(rd.section(s_text)?.to_vec())?;
    if text.len() != n {
        return Err(malformed(format!(
            "text length {} but header says {n}",
            text.len()
        )));
    }

    let move_rows = rows_of::<7>(rd.section(s_move)?, r, s_move)?
        .into_iter()
        .map(|[head, sa_head, tail, sa_tail, c, mu, finger]| MoveRow {
            head,
            sa_head,
            tail,
            sa_tail,
            run_char: c as u8,
            mu,
            finger,
        })
        .collect::<Vec<_>>();
    let pi = read_words(rd.section(s_pi)?, s_pi)?;
    if pi.len() != r {
        return Err(malformed("pi length differs from r"));
    }
    check_move_table(&move_rows, &pi, n)?;

    let phi_rows = rows_of::<4>(rd.section(s_phi)?, r, s_phi)?
        .into_iter()
        .map(|[sa_head, sa_tail, lcp_head, finger]| PhiRow {
            sa_head,
            sa_tail,
            lcp_head,
            finger,
        })
        .collect::<Vec<_>>();
    let inv_rows = rows_of::<3>(rd.section(s_inv)?, r, s_inv)?
        .into_iter()
        .map(|[sa_head, sa_tail, finger]| PhiInvRow {
            sa_head,
            sa_tail,
            finger,
        })
        .collect::<Vec<_>>();
    let in_range = |v: usize| v < n;
    if !phi_rows
        .iter()
        .all(|p| in_range(p.sa_head) && in_range(p.sa_tail) && p.finger < r)
        || !inv_rows
            .iter()
            .all(|p| in_range(p.sa_head) && in_range(p.sa_tail) && p.finger < r)
    {
        return Err(malformed("phi table entry out of range"));
    }

    let kt = read_words(rd.section(s_kt)?, s_kt)?;
    let ktables = read_ktables(&kt)?;

    if rd.pos != bytes.len() {
        return Err(malformed(format!("{} trailing bytes", bytes.len() - rd.pos)));
    }

    Ok(KmemIndex::from_parts(
        text,
        MoveTable::from_parts(move_rows, pi, n),
        PhiTable::from_rows(phi_rows),
        PhiInvTable::from_rows(inv_rows),
        ktables,
    ))
}

fn check_move_table(rows: &[MoveRow], pi: &[usize], n: usize) -> Result<(), FormatError> {
    let r = rows.len();
    if r == 0 {
        return Err(malformed("move table is empty"));
    }
    if rows[0].head != 0 || rows[r - 1].tail != n - 1 {
        return Err(malformed("move table does not cover the BWT"));
    }
    for (j, row) in rows.iter().enumerate() {
        if row.head > row.tail
            || row.sa_head >= n
            || row.sa_tail >= n
            || row.mu >= n
            || row.finger >= r
            || (j + 1 < r && rows[j + 1].head != row.tail + 1)
        {
            return Err(malformed(format!("move row {j} is inconsistent")));
        }
    }
    let mut seen = vec![false; r];
    for &p in pi {
        if p >= r || std::mem::replace(&mut seen[p], true) {
            return Err(malformed("pi is not a permutation"));
        }
    }
    Ok(())
}

fn read_ktables(words: &[usize]) -> Result<BTreeMap<usize, KTable>, FormatError> {
    let mut it = words.iter().copied();
    let mut next = |what: &str| {
        it.next()
            .ok_or_else(|| malformed(format!("k-table section ends inside {what}")))
    };
    let count = next("count")?;
    let mut tables = BTreeMap::new();
    for _ in 0..count {
        let k = next("header")?;
        let len = next("header")?;
        let mut entries = Vec::with_capacity(len.min(words.len()));
        for _ in 0..len {
            entries.push(KEntry {
                b: next("entry")?,
                offset: next("entry")?,
                best_lcp: next("entry")?,
            });
        }
        if k == 0 || !entries.windows(2).all(|w| w[0].b < w[1].b) {
            return Err(malformed(format!("k-table for k = {k} is invalid")));
        }
        if tables.insert(k, KTable::from_entries(k, entries)).is_some() {
            return Err(malformed(format!("duplicate k-table for k = {k}")));
        }
    }
    if next("padding").is_ok() {
        return Err(malformed("k-table section has trailing words"));
    }
    Ok(tables)
}

pub fn write_index(index: &KmemIndex, path: impl AsRef<Path>) -> Result<(), FormatError> {
    fs::write(path, serialize(index))?;
    Ok(())
}

pub fn read_index(path: impl AsRef<Path>) -> Result<KmemIndex, FormatError> {
    deserialize(&fs::read(path)?)
}
