//! `phi`, `phi^-1` and permuted-LCP access from per-run SA samples.
//!
//! Each BWT run head contributes the pair `(SA[head], SA[head - 1])`. Sorted
//! by the first component the pairs answer `phi(x) = SA[ISA[x] - 1]`; sorted
//! by the second they answer `phi^-1`. Inside a BWT run `phi` shifts by the
//! same offset as its argument and `PLCP` shifts by the negated offset, so
//! the predecessor sample of `x` determines both.

use crate::oracle::OracleBundle;
use crate::rlbwt::MoveTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhiRow {
    pub sa_head: usize,
    /// `SA` at the rank just above the run head.
    pub sa_tail: usize,
    /// `PLCP[sa_head]`.
    pub lcp_head: usize,
    /// Row holding the predecessor of `sa_tail` in the `sa_head` column.
    pub finger: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhiInvRow {
    pub sa_head: usize,
    pub sa_tail: usize,
    /// Row holding the predecessor of `sa_head` in the `sa_tail` column.
    pub finger: usize,
}

/// Rows sorted by `sa_head`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiTable {
    rows: Vec<PhiRow>,
}

/// Rows sorted by `sa_tail`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiInvTable {
    rows: Vec<PhiInvRow>,
}

/// Result of one `phi` or `phi^-1` lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhiStep {
    pub value: usize,
    /// Row used for the lookup.
    pub row: usize,
    /// Where the search for the next lookup may start.
    pub next_hint: usize,
}

/// `SA` and `LCP` around one rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaWindow {
    pub center_rank: usize,
    pub lo_rank: usize,
    /// `sa_vals[t] = SA[lo_rank + t]`.
    pub sa_vals: Vec<usize>,
    /// `lcp_vals[t] = LCP[lo_rank + t + 1]`.
    pub lcp_vals: Vec<usize>,
}

impl SaWindow {
    pub fn hi_rank(&self) -> usize {
        self.lo_rank + self.sa_vals.len() - 1
    }

    pub fn sa_at(&self, rank: usize) -> usize {
        self.sa_vals[rank - self.lo_rank]
    }

    pub fn lcp_at(&self, rank: usize) -> usize {
        self.lcp_vals[rank - self.lo_rank - 1]
    }
}

/// Forward galloping search for the last index in `hint..len` whose key is
/// at most `x`; `key(hint) <= x` is required.
fn gallop(len: usize, hint: usize, x: usize, key: impl Fn(usize) -> usize) -> usize {
    debug_assert!(key(hint) <= x);
    let mut lo = hint;
    let mut step = 1;
    let mut hi = len;
    while lo + step < len {
        if key(lo + step) <= x {
            lo += step;
            step *= 2;
        } else {
            hi = lo + step;
            break;
        }
    }
    // Binary search for the last key <= x in [lo, hi).
    let (mut a, mut b) = (lo, hi);
    while b - a > 1 {
        let mid = a + (b - a) / 2;
        if key(mid) <= x {
            a = mid;
        } else {
            b = mid;
        }
    }
    a
}

pub fn build_phi_tables(oracle: &OracleBundle, table: &MoveTable) -> (PhiTable, PhiInvTable) {
    let r = table.r();
    let rows = table.rows();
    let pairs: Vec<(usize, usize, usize)> = (0..r)
        .map(|j| {
            let prev = &rows[(j + r - 1) % r];
            let head = rows[j].head;
            let lcp = if head == 0 { 0 } else { oracle.lcp[head] };
            (rows[j].sa_head, prev.sa_tail, lcp)
        })
        .collect();

    let mut by_head = pairs.clone();
    by_head.sort_unstable_by_key(|p| p.0);
    let heads: Vec<usize> = by_head.iter().map(|p| p.0).collect();
    let phi_rows = by_head
        .iter()
        .map(|&(sa_head, sa_tail, lcp_head)| PhiRow {
            sa_head,
            sa_tail,
            lcp_head,
            finger: heads.partition_point(|&h| h <= sa_tail) - 1,
        })
        .collect();

    let mut by_tail = pairs;
    by_tail.sort_unstable_by_key(|p| p.1);
    let tails: Vec<usize> = by_tail.iter().map(|p| p.1).collect();
    let inv_rows = by_tail
        .iter()
        .map(|&(sa_head, sa_tail, _)| PhiInvRow {
            sa_head,
            sa_tail,
            finger: tails.partition_point(|&t| t <= sa_head) - 1,
        })
        .collect();

    (PhiTable { rows: phi_rows }, PhiInvTable { rows: inv_rows })
}

impl PhiTable {
    pub fn from_rows(rows: Vec<PhiRow>) -> Self {
        Self { rows }
    }

    pub fn rows(&self) -> &[PhiRow] {
        &self.rows
    }

    /// Row whose `sa_head` is the predecessor of `x`.
    pub fn predecessor(&self, x: usize, hint: Option<usize>) -> usize {
        match hint {
            Some(h) => gallop(self.rows.len(), h, x, |j| self.rows[j].sa_head),
            None => self.rows.partition_point(|row| row.sa_head <= x) - 1,
        }
    }

    /// `phi(x) = SA[ISA[x] - 1]`; meaningless when `ISA[x] = 0`.
    pub fn phi(&self, x: usize, hint: Option<usize>) -> PhiStep {
        let row = self.predecessor(x, hint);
        let r = &self.rows[row];
        PhiStep {
            value: r.sa_tail + x - r.sa_head,
            row,
            next_hint: r.finger,
        }
    }

    /// `PLCP[x]`, given the predecessor row of `x`.
    pub fn plcp(&self, x: usize, row: usize) -> usize {
        let r = &self.rows[row];
        debug_assert!(r.sa_head <= x && x <= r.sa_head + r.lcp_head);
        r.lcp_head + r.sa_head - x
    }

    pub fn plcp_of(&self, x: usize) -> usize {
        self.plcp(x, self.predecessor(x, None))
    }
}

impl PhiInvTable {
    pub fn from_rows(rows: Vec<PhiInvRow>) -> Self {
        Self { rows }
    }

    pub fn rows(&self) -> &[PhiInvRow] {
        &self.rows
    }

    pub fn predecessor(&self, x: usize, hint: Option<usize>) -> usize {
        match hint {
            Some(h) => gallop(self.rows.len(), h, x, |j| self.rows[j].sa_tail),
            None => self.rows.partition_point(|row| row.sa_tail <= x) - 1,
        }
    }

    /// `phi^-1(x) = SA[ISA[x] + 1]`; meaningless when `ISA[x] = n - 1`.
    pub fn phi_inv(&self, x: usize, hint: Option<usize>) -> PhiStep {
        let row = self.predecessor(x, hint);
        let r = &self.rows[row];
        PhiStep {
            value: r.sa_head + x - r.sa_tail,
            row,
            next_hint: r.finger,
        }
    }
}

/// `SA[q - k + 1..=q + k - 1]` and `LCP[q - k + 2..=q + k - 1]`, clamped to
/// the array, from `SA[q]` alone.
pub fn extract_window(
    phi: &PhiTable,
    phi_inv: &PhiInvTable,
    n: usize,
    q: usize,
    sa_q: usize,
    k: usize,
) -> SaWindow {
    assert!(k >= 1 && q < n);
    let lo = q.saturating_sub(k - 1);
    let hi = (q + k - 1).min(n - 1);

    let mut up = Vec::with_capacity(q - lo);
    let mut up_lcp = Vec::with_capacity(q - lo);
    let (mut x, mut hint) = (sa_q, None);
    for _ in lo..q {
        let step = phi.phi(x, hint);
        up_lcp.push(phi.plcp(x, step.row));
        up.push(step.value);
        x = step.value;
        hint = Some(step.next_hint);
    }

    let mut sa_vals: Vec<usize> = up.into_iter().rev().collect();
    sa_vals.push(sa_q);
    let mut lcp_vals: Vec<usize> = up_lcp.into_iter().rev().collect();

    let (mut x, mut hint) = (sa_q, None);
    for _ in q..hi {
        let step = phi_inv.phi_inv(x, hint);
        x = step.value;
        hint = Some(step.next_hint);
        sa_vals.push(x);
        lcp_vals.push(phi.plcp_of(x));
    }

    SaWindow {
        center_rank: q,
        lo_rank: lo,
        sa_vals,
        lcp_vals,
    }
}

/// `SA[lo..=hi]` by walking `phi`/`phi^-1` from a known `SA[anchor]`.
pub fn sa_range(
    phi: &PhiTable,
    phi_inv: &PhiInvTable,
    anchor: usize,
    sa_anchor: usize,
    lo: usize,
    hi: usize,
) -> Vec<usize> {
    let first = lo.min(anchor);
    let last = hi.max(anchor);
    let mut vals = vec![0; last - first + 1];
    vals[anchor - first] = sa_anchor;
    let (mut x, mut hint) = (sa_anchor, None);
    for rank in (first..anchor).rev() {
        let step = phi.phi(x, hint);
        x = step.value;
        hint = Some(step.next_hint);
        vals[rank - first] = x;
    }
    let (mut x, mut hint) = (sa_anchor, None);
    for rank in anchor + 1..=last {
        let step = phi_inv.phi_inv(x, hint);
        x = step.value;
        hint = Some(step.next_hint);
        vals[rank - first] = x;
    }
    vals[lo - first..=hi - first].to_vec()
}

/// Every text position whose suffix shares at least `len` symbols with the
/// suffix at rank `anchor`, in rank order.
pub fn occurrence_interval(
    phi: &PhiTable,
    phi_inv: &PhiInvTable,
    n: usize,
    anchor: usize,
    sa_anchor: usize,
    len: usize,
) -> Vec<usize> {
    let mut above = Vec::new();
    let (mut x, mut rank, mut hint) = (sa_anchor, anchor, None);
    while rank > 0 {
        let step = phi.phi(x, hint);
        if phi.plcp(x, step.row) < len {
            break;
        }
        x = step.value;
        hint = Some(step.next_hint);
        rank -= 1;
        above.push(x);
    }
    let mut out: Vec<usize> = above.into_iter().rev().collect();
    out.push(sa_anchor);
    let (mut x, mut rank, mut hint) = (sa_anchor, anchor, None);
    while rank + 1 < n {
        let step = phi_inv.phi_inv(x, hint);
        if phi.plcp_of(step.value) < len {
            break;
        }
        x = step.value;
        hint = Some(step.next_hint);
        rank += 1;
        out.push(x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_text;

    fn example() -> (OracleBundle, PhiTable, PhiInvTable) {
        let o = OracleBundle::build(&example_text());
        let m = MoveTable::build(&o);
        let (p, pi) = build_phi_tables(&o, &m);
        (o, p, pi)
    }

    #[test]
    fn example_rows() {
        let (_, p, pi) = example();
        assert_eq!(
            p.rows()[9],
            PhiRow {
                sa_head: 18,
                sa_tail: 10,
                lcp_head: 11,
                finger: 7
            }
        );
        assert_eq!(
            pi.rows()[3],
            PhiInvRow {
                sa_head: 18,
                sa_tail: 10,
                finger: 4
            }
        );
        let mut a: Vec<(usize, usize)> = p.rows().iter().map(|r| (r.sa_head, r.sa_tail)).collect();
        let mut b: Vec<(usize, usize)> = pi.rows().iter().map(|r| (r.sa_head, r.sa_tail)).collect();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }

    #[test]
    fn example_phi_chain() {
        let (_, p, _) = example();
        let first = p.phi(24, None);
        assert_eq!((first.value, first.row, first.next_hint), (16, 9, 7));
        assert_eq!(p.plcp(24, first.row), 5);
        let second = p.phi(16, Some(first.next_hint));
        assert_eq!((second.value, second.row), (7, 8));
        assert_eq!(p.plcp(16, second.row), 2);
        assert_eq!(p.plcp(18, 9), 11);
    }

    #[test]
    fn example_phi_inv_chain() {
        let (_, _, pi) = example();
        let first = pi.phi_inv(7, None);
        assert_eq!((first.value, first.row, first.next_hint), (16, 1, 3));
        let second = pi.phi_inv(16, Some(first.next_hint));
        assert_eq!((second.value, second.row, second.next_hint), (24, 3, 4));
        assert_eq!(pi.predecessor(24, Some(4)), 6);
    }

    #[test]
    fn full_sweeps() {
        let (o, p, pi) = example();
        let n = o.len();
        for j in 1..n {
            assert_eq!(p.phi(o.sa[j], None).value, o.sa[j - 1]);
        }
        for j in 0..n - 1 {
            assert_eq!(pi.phi_inv(o.sa[j], None).value, o.sa[j + 1]);
        }
        for x in 0..n {
            assert_eq!(p.plcp_of(x), o.plcp(x));
        }
    }

    #[test]
    fn example_window() {
        let (o, p, pi) = example();
        let w = extract_window(&p, &pi, o.len(), 6, 4, 3);
        assert_eq!(w.lo_rank, 4);
        assert_eq!(w.lcp_vals, vec![0, 1, 5, 8]);
        assert_eq!(w.sa_vals, o.sa[4..9].to_vec());
        let single = extract_window(&p, &pi, o.len(), 6, 4, 1);
        assert_eq!(single.sa_vals, vec![4]);
        assert!(single.lcp_vals.is_empty());
    }

    #[test]
    fn windows_spanning_whole_array() {
        let (o, p, pi) = example();
        let n = o.len();
        for q in 0..n {
            let w = extract_window(&p, &pi, n, q, o.sa[q], n);
            assert_eq!(w.lo_rank, 0);
            assert_eq!(w.sa_vals, o.sa);
            assert_eq!(w.lcp_vals, o.lcp[1..].to_vec());
        }
    }

    #[test]
    fn occurrence_interval_of_short_match() {
        let (o, p, pi) = example();
        let t = o.text.as_bytes();
        // "GAT" occurs at five positions.
        let q = o.isa[0];
        let mut occ = occurrence_interval(&p, &pi, o.len(), q, 0, 3);
        occ.sort_unstable();
        let want: Vec<usize> = (0..t.len() - 2).filter(|&i| &t[i..i + 3] == b"GAT").collect();
        assert_eq!(occ, want);
        assert_eq!(
            sa_range(&p, &pi, q, 0, q - 2, q + 1),
            o.sa[q - 2..=q + 1].to_vec()
        );
    }
}
