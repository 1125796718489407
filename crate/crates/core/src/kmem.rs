//! k-MEM queries.
//!
//! Both query paths run the matching-statistics scan from right to left and
//! track, for every pattern position `i`, a length-`k` SA interval
//! `[s_i, s_i + k - 1]` around the current rank whose minimum internal LCP
//! `L_i` is as large as possible. `min(ell_i, L_i)` is then the length of the
//! longest prefix of `pattern[i..]` occurring at least `k` times, and k-MEMs
//! start wherever that value does not grow when moving one position left.
//!
//! The slow path extracts the LCP window around every rank with `phi`
//! (`O(k log n)` per symbol). The fast path reuses the window through LF when
//! the BWT is uniform over it and otherwise jumps to a run endpoint whose
//! best window was precomputed (`O(log n)` per symbol).

use std::collections::VecDeque;

use crate::index::KmemIndex;
use crate::oracle::LceProvider;
use crate::phi::{extract_window, occurrence_interval, sa_range};
use crate::rlbwt::{MatchState, Mem};

/// Stand-in for an unconstrained window minimum (k = 1).
pub const UNBOUNDED: usize = usize::MAX;

/// Best length-`k` window containing rank `q`: the window start `s` in
/// `[max(q - k + 1, 0), min(q, n - k)]` maximizing the minimum of
/// `LCP[s + 1..=s + k - 1]`, smallest `s` on ties. `lcp_vals[t]` holds
/// `LCP[lo_rank + t + 1]`.
pub fn best_k_window(lcp_vals: &[usize], lo_rank: usize, q: usize, k: usize, n: usize) -> (usize, usize) {
    assert!(k >= 1);
    if k == 1 {
        return (q, UNBOUNDED);
    }
    if n < k {
        return (0, 0);
    }
    let first = q.saturating_sub(k - 1);
    let last = q.min(n - k);
    assert!(first >= lo_rank, "window does not reach rank {first}");
    let lcp = |rank: usize| lcp_vals[rank - lo_rank - 1];

    let mut best: Option<(usize, usize)> = None;
    let mut minima: VecDeque<usize> = VecDeque::with_capacity(k);
    for rank in first + 1..=last + k - 1 {
        while minima.back().is_some_and(|&b| lcp(b) >= lcp(rank)) {
            minima.pop_back();
        }
        minima.push_back(rank);
        if rank + 1 >= first + k {
            let s = rank + 1 - k;
            while minima.front().is_some_and(|&f| f <= s) {
                minima.pop_front();
            }
            let value = lcp(*minima.front().unwrap());
            if best.is_none_or(|(_, v)| value > v) {
                best = Some((s, value));
            }
        }
    }
    best.expect("at least one window start")
}

/// Precomputed best window for the LF image of one run endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KEntry {
    /// BWT position of a run head or tail.
    pub b: usize,
    /// The window starts `offset` ranks above `LF(b)`.
    pub offset: usize,
    /// Minimum LCP inside that window.
    pub best_lcp: usize,
}

/// One [`KEntry`] per run endpoint, sorted by position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KTable {
    k: usize,
    entries: Vec<KEntry>,
}

impl KTable {
    pub fn from_entries(k: usize, entries: Vec<KEntry>) -> Self {
        Self { k, entries }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &[KEntry] {
        &self.entries
    }

    pub fn lookup(&self, b: usize) -> Option<&KEntry> {
        self.entries
            .binary_search_by_key(&b, |e| e.b)
            .ok()
            .map(|idx| &self.entries[idx])
    }
}

/// State of a k-MEM scan at one pattern position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMatchState {
    pub base: MatchState,
    /// Minimum LCP inside the current window.
    pub best_lcp: usize,
    /// Start rank of the current window; `None` right after a restart.
    pub window_start: Option<usize>,
}

impl KMatchState {
    pub fn min_len(&self) -> usize {
        self.base.ell.min(self.best_lcp)
    }
}

/// A reported k-MEM with the window that witnesses its `k` occurrences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMemHit {
    pub mem: Mem,
    pub window_start: usize,
    /// Rank inside the window and its SA value.
    pub anchor: (usize, usize),
}

/// One position of a query trace. Positions appear from `m` down to `0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRow {
    pub i: usize,
    pub q: usize,
    pub sa_q: usize,
    pub ell: usize,
    pub bwt_q: u8,
    /// State after repositioning at this position, with its BWT symbol.
    pub replaced: Option<(MatchState, u8)>,
    /// `LCP[q - k + 2..=q + k - 1]` (clamped), slow path only.
    pub lcp_window: Option<Vec<usize>>,
    pub best_lcp: Option<usize>,
    pub min_len: Option<usize>,
    pub window_start: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryStats {
    /// Fast path: window carried over by LF.
    pub uniform_steps: usize,
    /// Symbol under `q` matched without moving.
    pub direct_steps: usize,
    pub repositions: usize,
    /// Fast path: `q` moved to a run end inside a mixed window.
    pub run_end_jumps: usize,
    /// Of those, jumps that had to use the head of `q`'s own run.
    pub head_fallbacks: usize,
    /// Symbol absent from the text.
    pub restarts: usize,
    pub window_extractions: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryOutput {
    pub hits: Vec<KMemHit>,
    /// `min(ell_i, L_i)` for `i = 0..m`.
    pub stream: Vec<usize>,
    pub trace: Option<Vec<TraceRow>>,
    pub stats: QueryStats,
}

impl QueryOutput {
    pub fn mems(&self) -> Vec<Mem> {
        self.hits.iter().map(|h| h.mem).collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryOptions {
    /// Run endpoint to start from instead of the last run tail.
    pub seed: Option<usize>,
    pub trace: bool,
}

/// Turns the right-to-left stream of `min(ell_i, L_i)` into k-MEMs as soon
/// as each left boundary is settled.
#[derive(Default)]
struct Emitter {
    pending: Option<(usize, usize, usize, (usize, usize))>,
    hits: Vec<KMemHit>,
}

impl Emitter {
    fn push(&mut self, i: usize, len: usize, window_start: usize, anchor: (usize, usize)) {
        if let Some(prev) = self.pending.take() {
            if len <= prev.1 {
                self.emit(prev);
            }
        }
        self.pending = Some((i, len, window_start, anchor));
    }

    fn emit(&mut self, (start, len, window_start, anchor): (usize, usize, usize, (usize, usize))) {
        if len > 0 {
            self.hits.push(KMemHit {
                mem: Mem { start, len },
                window_start,
                anchor,
            });
        }
    }

    fn finish(mut self) -> Vec<KMemHit> {
        if let Some(prev) = self.pending.take() {
            self.emit(prev);
        }
        self.hits.reverse();
        self.hits
    }
}

fn trace_row(index: &KmemIndex, s: &MatchState) -> TraceRow {
    TraceRow {
        i: s.i,
        q: s.q,
        sa_q: s.sa_q,
        ell: s.ell,
        bwt_q: index.move_table().row(s.j).run_char,
        replaced: None,
        lcp_window: None,
        best_lcp: None,
        min_len: None,
        window_start: None,
    }
}

impl KmemIndex {
    fn start_state(&self, m: usize, opts: &QueryOptions) -> MatchState {
        let table = self.move_table();
        match opts.seed {
            Some(q) => table
                .state_at_endpoint(m, q)
                .unwrap_or_else(|| panic!("seed {q} is not a run endpoint")),
            None => table.initial_state(m),
        }
    }

    /// Plain MEMs from the matching statistics.
    pub fn mems(&self, pattern: &[u8]) -> Vec<KMemHit> {
        let table = self.move_table();
        let states = table.match_states(pattern, &self.lce(), table.initial_state(pattern.len()), |_| {});
        let mut emitter = Emitter::default();
        for s in states.iter().rev() {
            emitter.push(s.i, s.ell, s.q, (s.q, s.sa_q));
        }
        emitter.finish()
    }

    pub fn kmems_slow(&self, pattern: &[u8], k: usize) -> Vec<Mem> {
        self.run_slow(pattern, k, &QueryOptions::default()).mems()
    }

    pub fn kmems_fast(&self, table: &KTable, pattern: &[u8]) -> Vec<Mem> {
        self.run_fast(table, pattern, &QueryOptions::default()).mems()
    }

    /// k-MEMs with `k` given at query time.
    pub fn run_slow(&self, pattern: &[u8], k: usize, opts: &QueryOptions) -> QueryOutput {
        assert!(k >= 1, "k must be at least 1");
        let n = self.n();
        let m = pattern.len();
        let table = self.move_table();
        let lce = self.lce();
        let mut stats = QueryStats::default();
        let mut stream = vec![0; m];
        let mut emitter = Emitter::default();

        let mut state = self.start_state(m, opts);
        let mut trace = opts.trace.then(|| vec![trace_row(self, &state)]);
        for i in (0..m).rev() {
            let step = table.advance(&state, pattern[i], &lce);
            match (&step.replaced, step.restarted) {
                (_, true) => stats.restarts += 1,
                (Some(moved), _) => {
                    stats.repositions += 1;
                    if let Some(rows) = trace.as_mut() {
                        let c = table.row(moved.j).run_char;
                        rows.last_mut().unwrap().replaced = Some((*moved, c));
                    }
                }
                (None, _) => stats.direct_steps += 1,
            }
            state = step.next;

            let window = extract_window(self.phi(), self.phi_inv(), n, state.q, state.sa_q, k);
            stats.window_extractions += 1;
            let (s, best_lcp) = best_k_window(&window.lcp_vals, window.lo_rank, state.q, k, n);
            let len = state.ell.min(best_lcp);
            stream[i] = len;
            emitter.push(i, len, s, (state.q, state.sa_q));

            if let Some(rows) = trace.as_mut() {
                let mut row = trace_row(self, &state);
                row.lcp_window = Some(window.lcp_vals);
                row.best_lcp = Some(best_lcp);
                row.min_len = Some(len);
                row.window_start = Some(s);
                rows.push(row);
            }
        }

        QueryOutput {
            hits: emitter.finish(),
            stream,
            trace,
            stats,
        }
    }

    /// k-MEMs with the precomputed table for `k`.
    pub fn run_fast(&self, ktable: &KTable, pattern: &[u8], opts: &QueryOptions) -> QueryOutput {
        let k = ktable.k();
        let n = self.n();
        let m = pattern.len();
        if n < k {
            return QueryOutput {
                stream: vec![0; m],
                trace: opts.trace.then(Vec::new),
                ..QueryOutput::default()
            };
        }
        let table = self.move_table();
        let lce = self.lce();
        let mut stats = QueryStats::default();
        let mut stream = vec![0; m];
        let mut emitter = Emitter::default();

        let mut state = KMatchState {
            base: self.start_state(m, opts),
            best_lcp: 0,
            window_start: None,
        };
        let mut trace = opts.trace.then(|| vec![trace_row(self, &state.base)]);
        for i in (0..m).rev() {
            let c = pattern[i];
            let uniform = state
                .window_start
                .is_some_and(|s| table.interval_uniform(s, s + k - 1, c));
            let mut replaced = None;
            let mut restarted = false;
            if uniform {
                stats.uniform_steps += 1;
                let s = state.window_start.unwrap();
                state = KMatchState {
                    base: table.lf_step(&state.base),
                    best_lcp: state.best_lcp.saturating_add(1),
                    window_start: Some(table.lf(s)),
                };
            } else {
                let mut cur = state.base;
                if table.row(cur.j).run_char != c {
                    match table.reposition(&cur, c, &lce) {
                        Some(moved) => {
                            stats.repositions += 1;
                            cur = moved;
                            replaced = Some(moved);
                        }
                        None => {
                            stats.restarts += 1;
                            restarted = true;
                            state = KMatchState {
                                base: table.initial_state(i),
                                best_lcp: 0,
                                window_start: None,
                            };
                        }
                    }
                } else if !table.is_run_endpoint(cur.q) {
                    stats.run_end_jumps += 1;
                    let s = state
                        .window_start
                        .expect("states off a run endpoint carry a window");
                    let b = table.run_end_in_interval(s, s + k - 1, c).unwrap_or_else(|| {
                        // The run of q continues past the window, so its head
                        // lies inside it.
                        stats.head_fallbacks += 1;
                        let head = table.row(cur.j).head;
                        debug_assert!(head >= s);
                        head
                    });
                    let sa_b = table.endpoint_sample(b).expect("b is a run endpoint");
                    cur = MatchState {
                        i: cur.i,
                        q: b,
                        ell: lce.lce(cur.sa_q, sa_b).min(cur.ell),
                        sa_q: sa_b,
                        j: table.row_of(b),
                    };
                    replaced = Some(cur);
                } else {
                    stats.direct_steps += 1;
                }

                if !restarted {
                    let entry = ktable
                        .lookup(cur.q)
                        .expect("every run endpoint has a precomputed entry");
                    let base = table.lf_step(&cur);
                    state = KMatchState {
                        window_start: Some(base.q - entry.offset),
                        best_lcp: entry.best_lcp,
                        base,
                    };
                }
            }

            if let (Some(rows), Some(moved)) = (trace.as_mut(), replaced) {
                let c = table.row(moved.j).run_char;
                rows.last_mut().unwrap().replaced = Some((moved, c));
            }

            let len = match state.window_start {
                Some(_) => state.min_len(),
                None => 0,
            };
            stream[i] = len;
            let s = state.window_start.unwrap_or(state.base.q);
            emitter.push(i, len, s, (state.base.q, state.base.sa_q));

            if let Some(rows) = trace.as_mut() {
                let mut row = trace_row(self, &state.base);
                if state.window_start.is_some() {
                    row.best_lcp = Some(state.best_lcp);
                    row.min_len = Some(len);
                    row.window_start = state.window_start;
                }
                rows.push(row);
            }
        }

        QueryOutput {
            hits: emitter.finish(),
            stream,
            trace,
            stats,
        }
    }

    /// Best window around `LF(b)` for every run endpoint `b`.
    pub fn precompute_k_table(&self, k: usize) -> KTable {
        assert!(k >= 1, "k must be at least 1");
        let n = self.n();
        let table = self.move_table();
        let mut entries = Vec::with_capacity(2 * table.r());
        for (j, row) in table.rows().iter().enumerate() {
            let endpoints = [(row.head, row.sa_head), (row.tail, row.sa_tail)];
            let count = if row.head == row.tail { 1 } else { 2 };
            for &(b, sa_b) in &endpoints[..count] {
                let lf_b = table.lf_in_row(b, j);
                let (s, best_lcp) = if k == 1 {
                    (lf_b, UNBOUNDED)
                } else if n < k {
                    (0, 0)
                } else {
                    let sa_lf = (sa_b + n - 1) % n;
                    let w = extract_window(self.phi(), self.phi_inv(), n, lf_b, sa_lf, k);
                    best_k_window(&w.lcp_vals, w.lo_rank, lf_b, k, n)
                };
                entries.push(KEntry {
                    b,
                    offset: lf_b - s,
                    best_lcp,
                });
            }
        }
        KTable::from_entries(k, entries)
    }

    /// `SA[s..s + k]`. `anchor` is a known `(rank, SA[rank])` to walk from;
    /// without one the nearest run endpoint sample is used.
    pub fn report_occurrences(&self, s: usize, anchor: Option<(usize, usize)>, k: usize) -> Vec<usize> {
        assert!(k >= 1 && s + k <= self.n());
        let (q, sa_q) = match anchor {
            Some((q, sa_q)) if s <= q && q < s + k => (q, sa_q),
            _ => {
                let row = self.move_table().row(self.move_table().row_of(s));
                if s - row.head <= row.tail.saturating_sub(s + k - 1) {
                    (row.head, row.sa_head)
                } else {
                    (row.tail, row.sa_tail)
                }
            }
        };
        sa_range(self.phi(), self.phi_inv(), q, sa_q, s, s + k - 1)
    }

    /// Every occurrence of the match reported by `hit`, ascending.
    pub fn all_occurrences(&self, hit: &KMemHit) -> Vec<usize> {
        let (q, sa_q) = hit.anchor;
        let mut occ = occurrence_interval(self.phi(), self.phi_inv(), self.n(), q, sa_q, hit.mem.len);
        occ.sort_unstable();
        occ
    }
}
