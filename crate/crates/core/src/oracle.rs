//! Brute-force reference computations over a plain text.
//!
//! Everything here works directly on the uncompressed text and its full
//! suffix array. The index is built from these arrays, and the test suites
//! use them as ground truth for every compressed query.

use std::cmp::Ordering;

use thiserror::Error;

use crate::rlbwt::Mem;

/// Terminator appended by [`TextBuffer::with_sentinel`].
pub const SENTINEL: u8 = 0x00;

/// Separator placed between records of a multi-sequence collection.
pub const SEPARATOR: u8 = 0x01;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TextError {
    #[error("text is empty, so it has no sentinel")]
    SentinelAbsent,
    #[error("text must hold a sentinel plus at least one symbol (got length {0})")]
    TooShort(usize),
    #[error(
        "sentinel {sentinel:#04x} is not the smallest symbol ({smaller:#04x} occurs at position {position})"
    )]
    SentinelNotMinimal {
        sentinel: u8,
        smaller: u8,
        position: usize,
    },
    #[error("sentinel {sentinel:#04x} occurs again at position {position}")]
    SentinelDuplicated { sentinel: u8, position: usize },
}

/// A text whose last symbol is a unique, strictly smallest sentinel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextBuffer {
    bytes: Vec<u8>,
}

impl TextBuffer {
    /// Validates an already terminated text.
    pub fn new(bytes: Vec<u8>) -> Result<Self, TextError> {
        let Some((&sentinel, body)) = bytes.split_last() else {
            return Err(TextError::SentinelAbsent);
        };
        if body.is_empty() {
            return Err(TextError::TooShort(bytes.len()));
        }
        for (position, &c) in body.iter().enumerate() {
            match c.cmp(&sentinel) {
                Ordering::Greater => {}
                Ordering::Equal => return Err(TextError::SentinelDuplicated { sentinel, position }),
                Ordering::Less => {
                    return Err(TextError::SentinelNotMinimal {
                        sentinel,
                        smaller: c,
                        position,
                    })
                }
            }
        }
        Ok(Self { bytes })
    }

    /// Appends [`SENTINEL`] unless the bytes already contain one, then
    /// validates.
    pub fn with_sentinel(mut bytes: Vec<u8>) -> Result<Self, TextError> {
        if !bytes.contains(&SENTINEL) {
            bytes.push(SENTINEL);
        }
        Self::new(bytes)
    }

    /// Joins records with [`SEPARATOR`] and terminates the result with
    /// [`SENTINEL`].
    pub fn from_records<I, R>(records: I) -> Result<Self, TextError>
    where
        I: IntoIterator<Item = R>,
        R: AsRef<[u8]>,
    {
        let mut bytes = Vec::new();
        for (idx, record) in records.into_iter().enumerate() {
            if idx > 0 {
                bytes.push(SEPARATOR);
            }
            bytes.extend_from_slice(record.as_ref());
        }
        bytes.push(SENTINEL);
        Self::new(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    /// Always false: a valid text holds at least two symbols.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sentinel(&self) -> u8 {
        self.bytes[self.bytes.len() - 1]
    }

    /// Number of distinct symbols, sentinel included.
    pub fn alphabet_size(&self) -> usize {
        let mut seen = [false; 256];
        for &c in &self.bytes {
            seen[c as usize] = true;
        }
        seen.iter().filter(|&&s| s).count()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

/// Suffix array, inverse suffix array, BWT and LCP array of one text.
#[derive(Debug, Clone)]
pub struct OracleBundle {
    pub text: TextBuffer,
    pub sa: Vec<usize>,
    pub isa: Vec<usize>,
    pub bwt: Vec<u8>,
    /// `lcp[j]` is the longest common prefix of the suffixes at ranks
    /// `j - 1` and `j`; `lcp[0] = 0`.
    pub lcp: Vec<usize>,
}

impl OracleBundle {
    pub fn build(text: &TextBuffer) -> Self {
        let t = text.as_bytes();
        let n = t.len();
        let sa = suffix_array(t);
        let mut isa = vec![0; n];
        for (rank, &pos) in sa.iter().enumerate() {
            isa[pos] = rank;
        }
        let bwt = sa.iter().map(|&p| t[(p + n - 1) % n]).collect();
        let lcp = kasai_lcp(t, &sa, &isa);
        Self {
            text: text.clone(),
            sa,
            isa,
            bwt,
            lcp,
        }
    }

    pub fn len(&self) -> usize {
        self.sa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sa.is_empty()
    }

    /// `LF(q)`, read off the full arrays.
    pub fn lf(&self, q: usize) -> usize {
        let n = self.len();
        self.isa[(self.sa[q] + n - 1) % n]
    }

    /// `PLCP[x] = LCP[ISA[x]]`.
    pub fn plcp(&self, x: usize) -> usize {
        self.lcp[self.isa[x]]
    }

    /// Number of maximal runs in the BWT.
    pub fn runs(&self) -> usize {
        1 + self.bwt.windows(2).filter(|w| w[0] != w[1]).count()
    }

    pub fn direct_lce(&self) -> DirectLce<'_> {
        DirectLce::new(self.text.as_bytes())
    }

    pub fn rmq_lce(&self) -> RmqLce<'_> {
        RmqLce::new(self)
    }

    /// Matching statistics by scanning every suffix for every pattern
    /// position. Among equally long matches the suffix of smallest rank wins,
    /// so unmatched positions report `sa[0]`.
    pub fn matching_statistics(&self, pattern: &[u8]) -> MatchingStatistics {
        let t = self.text.as_bytes();
        let entries = (0..pattern.len())
            .map(|i| {
                let mut best = MsEntry {
                    pos: self.sa[0],
                    len: 0,
                };
                for &pos in &self.sa {
                    let len = common_prefix(&t[pos..], &pattern[i..]);
                    if len > best.len {
                        best = MsEntry { pos, len };
                    }
                }
                best
            })
            .collect();
        MatchingStatistics { entries }
    }
}

/// Prefix-doubling suffix array construction, `O(n log^2 n)`.
pub fn suffix_array(text: &[u8]) -> Vec<usize> {
    let n = text.len();
    let mut sa: Vec<usize> = (0..n).collect();
    let mut rank: Vec<usize> = text.iter().map(|&c| c as usize).collect();
    let mut next = vec![0; n];
    if n < 2 {
        return sa;
    }
    let mut len = 1;
    loop {
        {
            let key = |i: usize| (rank[i], if i + len < n { rank[i + len] + 1 } else { 0 });
            sa.sort_unstable_by_key(|&i| key(i));
            next[sa[0]] = 0;
            for w in 1..n {
                next[sa[w]] = next[sa[w - 1]] + usize::from(key(sa[w - 1]) < key(sa[w]));
            }
        }
        std::mem::swap(&mut rank, &mut next);
        if rank[sa[n - 1]] == n - 1 {
            break;
        }
        len *= 2;
    }
    sa
}

/// Suffix array by directly sorting suffix slices. Quadratic on repetitive
/// input; only meant as a cross-check.
pub fn naive_suffix_array(text: &[u8]) -> Vec<usize> {
    let mut sa: Vec<usize> = (0..text.len()).collect();
    sa.sort_by(|&a, &b| text[a..].cmp(&text[b..]));
    sa
}

fn kasai_lcp(text: &[u8], sa: &[usize], isa: &[usize]) -> Vec<usize> {
    let n = text.len();
    let mut lcp = vec![0; n];
    let mut h = 0usize;
    for i in 0..n {
        let rank = isa[i];
        if rank == 0 {
            h = 0;
            continue;
        }
        let j = sa[rank - 1];
        while i + h < n && j + h < n && text[i + h] == text[j + h] {
            h += 1;
        }
        lcp[rank] = h;
        h = h.saturating_sub(1);
    }
    lcp
}

pub fn common_prefix(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Longest common extension of two text suffixes.
pub trait LceProvider {
    fn lce(&self, a: usize, b: usize) -> usize;
}

/// LCE by symbol-by-symbol comparison.
#[derive(Debug, Clone, Copy)]
pub struct DirectLce<'a> {
    text: &'a [u8],
}

impl<'a> DirectLce<'a> {
    pub fn new(text: &'a [u8]) -> Self {
        Self { text }
    }
}

impl LceProvider for DirectLce<'_> {
    fn lce(&self, a: usize, b: usize) -> usize {
        common_prefix(&self.text[a..], &self.text[b..])
    }
}

/// Constant-time LCE through the inverse suffix array and a sparse-table
/// range minimum over the LCP array.
#[derive(Debug, Clone)]
pub struct RmqLce<'a> {
    isa: &'a [usize],
    rmq: SparseTable,
}

impl<'a> RmqLce<'a> {
    pub fn new(oracle: &'a OracleBundle) -> Self {
        Self {
            isa: &oracle.isa,
            rmq: SparseTable::new(&oracle.lcp),
        }
    }
}

impl LceProvider for RmqLce<'_> {
    fn lce(&self, a: usize, b: usize) -> usize {
        if a == b {
            return self.isa.len() - a;
        }
        let (lo, hi) = {
            let (ra, rb) = (self.isa[a], self.isa[b]);
            (ra.min(rb), ra.max(rb))
        };
        self.rmq.min(lo + 1..hi + 1)
    }
}

/// `O(1)` range minimum with `O(n log n)` words.
#[derive(Debug, Clone)]
pub struct SparseTable {
    levels: Vec<Vec<usize>>,
}

impl SparseTable {
    pub fn new(values: &[usize]) -> Self {
        let mut levels = vec![values.to_vec()];
        let mut width = 1;
        while 2 * width <= values.len() {
            let prev = levels.last().unwrap();
            let level = (0..=values.len() - 2 * width)
                .map(|i| prev[i].min(prev[i + width]))
                .collect();
            levels.push(level);
            width *= 2;
        }
        Self { levels }
    }

    /// Minimum over a non-empty half-open range.
    pub fn min(&self, range: std::ops::Range<usize>) -> usize {
        assert!(range.start < range.end, "empty range");
        let level = (range.end - range.start).ilog2() as usize;
        let row = &self.levels[level];
        row[range.start].min(row[range.end - (1 << level)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MsEntry {
    pub pos: usize,
    pub len: usize,
}

/// One `(pos, len)` pair per pattern position.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MatchingStatistics {
    pub entries: Vec<MsEntry>,
}

impl MatchingStatistics {
    pub fn lens(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.len).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Occurrences of `needle` in `text`, counted by a full scan.
pub fn count_occurrences(text: &[u8], needle: &[u8]) -> usize {
    if needle.is_empty() {
        return text.len() + 1;
    }
    text.windows(needle.len()).filter(|w| *w == needle).count()
}

/// All maximal substrings of `pattern` occurring at least `k` times in
/// `text`, sorted by start.
///
/// For each pattern position the match length against every text position
/// is tabulated, so the count of any `pattern[i..i + len]` is a scan over
/// that row. Only two rows are kept at a time.
pub fn brute_kmems(text: &[u8], pattern: &[u8], k: usize) -> Vec<Mem> {
    assert!(k >= 1, "k must be at least 1");
    let n = text.len();
    let m = pattern.len();
    let count = |row: &[usize], len: usize| row.iter().filter(|&&l| l >= len).count();
    let longest = |row: &[usize]| {
        let mut len = 0;
        while count(row, len + 1) >= k {
            len += 1;
        }
        len
    };

    let mut out = Vec::new();
    // `ext[t]` = length of the common prefix of text[t..] and pattern[i..].
    let mut ext_next = vec![0usize; n + 1];
    let mut pending: Option<(usize, usize, Vec<usize>)> = None;
    for i in (0..m).rev() {
        let mut ext = vec![0usize; n + 1];
        for t in 0..n {
            if text[t] == pattern[i] {
                ext[t] = 1 + ext_next[t + 1];
            }
        }
        // `pending` is position i + 1, whose left neighbour is now known.
        if let Some((start, len, row)) = pending.take() {
            let right_max = start + len == m || count(&row, len + 1) < k;
            let left_max = count(&ext, len + 1) < k;
            if len > 0 && left_max && right_max {
                out.push(Mem { start, len });
            }
        }
        let len = longest(&ext);
        pending = Some((i, len, ext.clone()));
        ext_next = ext;
    }
    if let Some((start, len, row)) = pending {
        let right_max = start + len == m || count(&row, len + 1) < k;
        if len > 0 && right_max {
            out.push(Mem { start, len });
        }
    }
    out.reverse();
    out
}

/// Length of the longest prefix of `pattern[i..]` occurring at least `k`
/// times in `text`, for every `i`.
pub fn brute_k_lengths(text: &[u8], pattern: &[u8], k: usize) -> Vec<usize> {
    (0..pattern.len())
        .map(|i| {
            let mut len = 0;
            while i + len < pattern.len() && count_occurrences(text, &pattern[i..i + len + 1]) >= k {
                len += 1;
            }
            len
        })
        .collect()
}
