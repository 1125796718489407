//! Run-length BWT move table, LF steps and matching statistics.
//!
//! One row per maximal BWT run stores the run boundaries, the SA samples at
//! both ends, the run symbol and the sorted LF images of the run heads
//! (`mu`) with the run covering each image (`finger`). An LF step is then
//! `q' = mu(pi(j)) + q - head(j)` followed by a short exponential search for
//! the row of `q'` starting at `finger(pi(j))`.

use crate::oracle::{LceProvider, MatchingStatistics, MsEntry, OracleBundle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveRow {
    pub head: usize,
    pub sa_head: usize,
    pub tail: usize,
    pub sa_tail: usize,
    pub run_char: u8,
    /// Row is in `pi` order: `mu(pi(j)) = LF(head(j))`.
    pub mu: usize,
    /// Row whose run covers `mu`.
    pub finger: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveTable {
    rows: Vec<MoveRow>,
    pi: Vec<usize>,
    n: usize,
    rows_by_char: Vec<Vec<usize>>,
}

/// A maximal exact match `pattern[start..start + len]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mem {
    pub start: usize,
    pub len: usize,
}

/// Rolling state of a backward matching-statistics scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchState {
    /// Pattern index.
    pub i: usize,
    /// BWT position (suffix rank).
    pub q: usize,
    /// Matched length of `pattern[i..]` against the suffix at `q`.
    pub ell: usize,
    /// `SA[q]`.
    pub sa_q: usize,
    /// Row whose run covers `q`.
    pub j: usize,
}

/// Result of moving a [`MatchState`] one symbol to the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Advance {
    /// The repositioned state at the old index, when the symbol under `q`
    /// did not match.
    pub replaced: Option<MatchState>,
    /// The state at the new index.
    pub next: MatchState,
    /// The symbol does not occur in the text; `next` restarted with `ell = 0`.
    pub restarted: bool,
}

impl MoveTable {
    pub fn build(oracle: &OracleBundle) -> Self {
        let n = oracle.len();
        let bwt = &oracle.bwt;

        let mut heads = vec![0];
        heads.extend((1..n).filter(|&q| bwt[q] != bwt[q - 1]));
        let r = heads.len();

        let mut rows: Vec<MoveRow> = heads
            .iter()
            .enumerate()
            .map(|(j, &head)| {
                let tail = heads.get(j + 1).map_or(n - 1, |&h| h - 1);
                MoveRow {
                    head,
                    sa_head: oracle.sa[head],
                    tail,
                    sa_tail: oracle.sa[tail],
                    run_char: bwt[head],
                    mu: 0,
                    finger: 0,
                }
            })
            .collect();

        // Stable sort of row indices by run symbol.
        let mut order: Vec<usize> = (0..r).collect();
        order.sort_by_key(|&j| rows[j].run_char);
        let mut pi = vec![0; r];
        for (p, &j) in order.iter().enumerate() {
            pi[j] = p;
        }

        let mu: Vec<usize> = order.iter().map(|&j| oracle.lf(rows[j].head)).collect();
        debug_assert!(mu.windows(2).all(|w| w[0] < w[1]));
        for (p, &value) in mu.iter().enumerate() {
            rows[p].mu = value;
            rows[p].finger = heads.partition_point(|&h| h <= value) - 1;
        }

        Self::from_parts(rows, pi, n)
    }

    /// Assembles a table from stored rows, deriving the per-symbol row lists.
    pub fn from_parts(rows: Vec<MoveRow>, pi: Vec<usize>, n: usize) -> Self {
        let mut rows_by_char = vec![Vec::new(); 256];
        for (j, row) in rows.iter().enumerate() {
            rows_by_char[row.run_char as usize].push(j);
        }
        Self {
            rows,
            pi,
            n,
            rows_by_char,
        }
    }

    pub fn rows(&self) -> &[MoveRow] {
        &self.rows
    }

    pub fn row(&self, j: usize) -> &MoveRow {
        &self.rows[j]
    }

    pub fn pi(&self) -> &[usize] {
        &self.pi
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.rows.len()
    }

    /// Rows whose run symbol is `c`, in increasing order.
    pub fn rows_with(&self, c: u8) -> &[usize] {
        &self.rows_by_char[c as usize]
    }

    /// Row covering `q`, by binary search over the heads.
    pub fn row_of(&self, q: usize) -> usize {
        debug_assert!(q < self.n);
        self.rows.partition_point(|row| row.head <= q) - 1
    }

    /// Row covering `q`, searching forward from `hint`, which must satisfy
    /// `head(hint) <= q`.
    pub fn run_predecessor(&self, q: usize, hint: usize) -> usize {
        assert!(
            q < self.n && self.rows[hint].head <= q,
            "hint row {hint} starts after position {q}"
        );
        let r = self.rows.len();
        let mut lo = hint;
        let mut step = 1;
        let hi = loop {
            let probe = lo + step;
            if probe >= r {
                break r;
            }
            if self.rows[probe].head <= q {
                lo = probe;
                step *= 2;
            } else {
                break probe;
            }
        };
        lo + self.rows[lo..hi].partition_point(|row| row.head <= q) - 1
    }

    pub fn bwt_access(&self, q: usize) -> u8 {
        self.rows[self.row_of(q)].run_char
    }

    pub fn is_run_endpoint(&self, q: usize) -> bool {
        let row = &self.rows[self.row_of(q)];
        q == row.head || q == row.tail
    }

    /// `SA[q]` for a run endpoint `q`.
    pub fn endpoint_sample(&self, q: usize) -> Option<usize> {
        let row = &self.rows[self.row_of(q)];
        if q == row.head {
            Some(row.sa_head)
        } else if q == row.tail {
            Some(row.sa_tail)
        } else {
            None
        }
    }

    /// `LF(q)` given the row `j` covering `q`.
    pub fn lf_in_row(&self, q: usize, j: usize) -> usize {
        let row = &self.rows[j];
        debug_assert!(row.head <= q && q <= row.tail);
        self.rows[self.pi[j]].mu + q - row.head
    }

    pub fn lf(&self, q: usize) -> usize {
        self.lf_in_row(q, self.row_of(q))
    }

    /// The state at pattern index `i` with nothing matched, parked on the
    /// last run tail.
    pub fn initial_state(&self, i: usize) -> MatchState {
        let j = self.rows.len() - 1;
        let row = &self.rows[j];
        MatchState {
            i,
            q: row.tail,
            ell: 0,
            sa_q: row.sa_tail,
            j,
        }
    }

    /// A state with nothing matched at a chosen run endpoint.
    pub fn state_at_endpoint(&self, i: usize, q: usize) -> Option<MatchState> {
        let sa_q = self.endpoint_sample(q)?;
        Some(MatchState {
            i,
            q,
            ell: 0,
            sa_q,
            j: self.row_of(q),
        })
    }

    /// One LF step; the run symbol at `s.q` must be the symbol being
    /// prepended.
    pub fn lf_step(&self, s: &MatchState) -> MatchState {
        assert!(s.i > 0, "cannot step left of pattern index 0");
        let target = &self.rows[self.pi[s.j]];
        let q = target.mu + s.q - self.rows[s.j].head;
        MatchState {
            i: s.i - 1,
            q,
            ell: s.ell + 1,
            sa_q: (s.sa_q + self.n - 1) % self.n,
            j: self.run_predecessor(q, target.finger),
        }
    }

    /// Moves `s` to the nearest run endpoint whose symbol is `c`: the tail
    /// of the last such row above `s.j` or the head of the first such row
    /// below, whichever shares the longer extension with `SA[s.q]`. Ties go
    /// to the row above. `None` when `c` does not occur in the text.
    pub fn reposition<L: LceProvider + ?Sized>(&self, s: &MatchState, c: u8, lce: &L) -> Option<MatchState> {
        debug_assert_ne!(self.rows[s.j].run_char, c);
        let candidates = self.rows_with(c);
        let split = candidates.partition_point(|&j| j < s.j);
        let above = split.checked_sub(1).map(|idx| {
            let j = candidates[idx];
            let row = &self.rows[j];
            (lce.lce(s.sa_q, row.sa_tail), row.tail, row.sa_tail, j)
        });
        let below = candidates.get(split).map(|&j| {
            let row = &self.rows[j];
            (lce.lce(s.sa_q, row.sa_head), row.head, row.sa_head, j)
        });
        let (ext, q, sa_q, j) = match (above, below) {
            (Some(a), Some(b)) => {
                if a.0 >= b.0 {
                    a
                } else {
                    b
                }
            }
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => return None,
        };
        Some(MatchState {
            i: s.i,
            q,
            ell: ext.min(s.ell),
            sa_q,
            j,
        })
    }

    /// Extends `s` by the symbol `c = pattern[s.i - 1]`.
    pub fn advance<L: LceProvider + ?Sized>(&self, s: &MatchState, c: u8, lce: &L) -> Advance {
        if self.rows[s.j].run_char == c {
            return Advance {
                replaced: None,
                next: self.lf_step(s),
                restarted: false,
            };
        }
        match self.reposition(s, c, lce) {
            Some(moved) => Advance {
                replaced: Some(moved),
                next: self.lf_step(&moved),
                restarted: false,
            },
            None => Advance {
                replaced: None,
                next: self.initial_state(s.i - 1),
                restarted: true,
            },
        }
    }

    /// Matching statistics of `pattern`, starting from [`Self::initial_state`].
    pub fn matching_statistics<L: LceProvider + ?Sized>(
        &self,
        pattern: &[u8],
        lce: &L,
    ) -> MatchingStatistics {
        let states = self.match_states(pattern, lce, self.initial_state(pattern.len()), |_| {});
        MatchingStatistics {
            entries: states
                .iter()
                .map(|s| MsEntry {
                    pos: s.sa_q,
                    len: s.ell,
                })
                .collect(),
        }
    }

    /// The state at every pattern index, before any repositioning at that
    /// index. `observe` sees every state the scan passes through, including
    /// repositioned ones.
    pub fn match_states<L, F>(
        &self,
        pattern: &[u8],
        lce: &L,
        start: MatchState,
        mut observe: F,
    ) -> Vec<MatchState>
    where
        L: LceProvider + ?Sized,
        F: FnMut(&MatchState),
    {
        let m = pattern.len();
        assert_eq!(start.i, m, "scan starts past the end of the pattern");
        let mut states = Vec::with_capacity(m);
        let mut state = start;
        observe(&state);
        for i in (0..m).rev() {
            let step = self.advance(&state, pattern[i], lce);
            if let Some(moved) = &step.replaced {
                observe(moved);
            }
            state = step.next;
            observe(&state);
            states.push(state);
        }
        states.reverse();
        states
    }

    /// `true` iff `BWT[lo..=hi]` lies in one run of symbol `c`.
    pub fn interval_uniform(&self, lo: usize, hi: usize, c: u8) -> bool {
        debug_assert!(lo <= hi && hi < self.n);
        let row = &self.rows[self.row_of(lo)];
        row.run_char == c && row.tail >= hi
    }

    /// First run tail in `[lo, hi]` whose run symbol is `c`.
    pub fn run_end_in_interval(&self, lo: usize, hi: usize, c: u8) -> Option<usize> {
        debug_assert!(lo <= hi);
        self.rows[self.row_of(lo)..]
            .iter()
            .take_while(|row| row.head <= hi)
            .find(|row| row.run_char == c && row.tail <= hi)
            .map(|row| row.tail)
    }
}

/// Starts of maximal matches from per-position match lengths: position `i`
/// starts one iff `i = 0` or `lens[i - 1] <= lens[i]`. Zero-length entries
/// are dropped.
pub fn mems_from_lens(lens: &[usize]) -> Vec<Mem> {
    lens.iter()
        .enumerate()
        .filter(|&(i, &len)| len > 0 && (i == 0 || lens[i - 1] <= len))
        .map(|(start, &len)| Mem { start, len })
        .collect()
}
