//! Compressed index answering k-MEM queries: the maximal substrings of a
//! pattern that occur at least `k` times in an indexed text.
//!
//! The index is a run-length BWT move table extended with per-run `phi` and
//! `phi^-1` tables that give sequential access to the LCP array. Queries with
//! `k` chosen at query time use [`KmemIndex::run_slow`]; with a table
//! precomputed for a fixed `k` ([`KmemIndex::add_ktable`]) they use
//! [`KmemIndex::run_fast`].
//!
//! ```
//! use kmem_index::{KmemIndex, Mem};
//!
//! let index = KmemIndex::from_bytes(b"GATTACAT\x01GATACAT\x01GATTAGAT".to_vec()).unwrap();
//! let hits = index.kmems_slow(b"GATTA", 2);
//! assert_eq!(hits, vec![Mem { start: 0, len: 5 }]);
//! ```

pub mod fixtures;
pub mod index;
pub mod input;
pub mod io;
pub mod kmem;
pub mod oracle;
pub mod phi;
pub mod rlbwt;

pub use index::{BuildStats, KmemIndex};
pub use io::{deserialize, read_index, serialize, write_index, FormatError};
pub use kmem::{best_k_window, KEntry, KMatchState, KMemHit, KTable, QueryOptions, QueryOutput, UNBOUNDED};
pub use oracle::{brute_kmems, LceProvider, OracleBundle, TextBuffer, TextError};
pub use phi::{build_phi_tables, extract_window, PhiInvTable, PhiTable, SaWindow};
pub use rlbwt::{mems_from_lens, MatchState, Mem, MoveRow, MoveTable};
