//! The complete index: text, move table, phi tables and precomputed
//! k-tables.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::kmem::KTable;
use crate::oracle::{DirectLce, OracleBundle, TextBuffer, TextError};
use crate::phi::{build_phi_tables, PhiInvTable, PhiTable};
use crate::rlbwt::MoveTable;

#[derive(Debug, Clone, PartialEq)]
pub struct KmemIndex {
    text: TextBuffer,
    move_table: MoveTable,
    phi: PhiTable,
    phi_inv: PhiInvTable,
    ktables: BTreeMap<usize, KTable>,
    stats: BuildStats,
}

/// Sizes of the built structures. The `*_bits` fields are the sizes of a
/// bit-packed encoding; the index itself stores fixed-width words.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildStats {
    pub n: usize,
    pub r: usize,
    pub sigma: usize,
    pub move_table_bits: f64,
    pub phi_bits: f64,
    pub phi_inv_bits: f64,
    /// Bytes the tables take as stored (u64 words), text excluded.
    pub stored_table_bytes: usize,
    pub text_bytes: usize,
    pub ktables: BTreeMap<usize, usize>,
}

impl BuildStats {
    fn compute(text: &TextBuffer, move_table: &MoveTable, ktables: &BTreeMap<usize, KTable>) -> Self {
        let n = text.len();
        let r = move_table.r();
        let sigma = text.alphabet_size();
        let (nf, rf, sf) = (n as f64, r as f64, sigma as f64);
        let lg = |x: f64| x.log2().max(0.0);
        let word = std::mem::size_of::<u64>();
        let kt_words: usize = ktables.values().map(|t| 2 + 3 * t.entries().len()).sum();
        Self {
            n,
            r,
            sigma,
            move_table_bits: 2.0 * rf * lg(nf / rf) + 2.0 * rf * lg(nf) + rf * lg(sf) + 2.0 * rf,
            phi_bits: 3.0 * rf * lg(nf / rf) + rf * lg(rf),
            phi_inv_bits: 2.0 * rf * lg(nf / rf) + rf * lg(rf),
            // move rows (7) + pi (1) + phi rows (4) + phi^-1 rows (3).
            stored_table_bytes: word * (15 * r + kt_words),
            text_bytes: n,
            ktables: ktables.iter().map(|(&k, t)| (k, t.entries().len())).collect(),
        }
    }
}

impl KmemIndex {
    /// Builds every table from the full suffix array of `text`; the suffix
    /// array itself is dropped afterwards.
    pub fn build(text: TextBuffer) -> Self {
        let oracle = OracleBundle::build(&text);
        Self::from_oracle(&oracle)
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Result<Self, TextError> {
        Ok(Self::build(TextBuffer::with_sentinel(bytes)?))
    }

    pub fn from_oracle(oracle: &OracleBundle) -> Self {
        let move_table = MoveTable::build(oracle);
        let (phi, phi_inv) = build_phi_tables(oracle, &move_table);
        Self::from_parts(oracle.text.clone(), move_table, phi, phi_inv, BTreeMap::new())
    }

    pub fn from_parts(
        text: TextBuffer,
        move_table: MoveTable,
        phi: PhiTable,
        phi_inv: PhiInvTable,
        ktables: BTreeMap<usize, KTable>,
    ) -> Self {
        let stats = BuildStats::compute(&text, &move_table, &ktables);
        Self {
            text,
            move_table,
            phi,
            phi_inv,
            ktables,
            stats,
        }
    }

    pub fn text(&self) -> &TextBuffer {
        &self.text
    }

    pub fn n(&self) -> usize {
        self.text.len()
    }

    pub fn r(&self) -> usize {
        self.move_table.r()
    }

    pub fn move_table(&self) -> &MoveTable {
        &self.move_table
    }

    pub fn phi(&self) -> &PhiTable {
        &self.phi
    }

    pub fn phi_inv(&self) -> &PhiInvTable {
        &self.phi_inv
    }

    pub fn stats(&self) -> &BuildStats {
        &self.stats
    }

    /// LCE over the stored text.
    pub fn lce(&self) -> DirectLce<'_> {
        DirectLce::new(self.text.as_bytes())
    }

    pub fn ktables(&self) -> &BTreeMap<usize, KTable> {
        &self.ktables
    }

    pub fn ktable(&self, k: usize) -> Option<&KTable> {
        self.ktables.get(&k)
    }

    /// Precomputes and stores the table for `k`. Returns `false` when one
    /// was already present.
    pub fn add_ktable(&mut self, k: usize) -> bool {
        if self.ktables.contains_key(&k) {
            return false;
        }
        let table = self.precompute_k_table(k);
        self.ktables.insert(k, table);
        self.stats = BuildStats::compute(&self.text, &self.move_table, &self.ktables);
        true
    }
}
