//! The running example text used by the golden tests.
//!
//! `$` and `#` are remapped to `0x00` and `0x01` so that byte order gives
//! `$ < # < A < C < G < T`.

use crate::oracle::{TextBuffer, SENTINEL, SEPARATOR};

pub const EXAMPLE_TEXT: &str = "GATTACAT#AGATACAT#GATACAT#GATTAGAT#GATTAGATA$";

pub const EXAMPLE_PATTERN: &[u8] = b"TAGATTACATTA";

/// Maps `$` to the sentinel and `#` to the record separator.
pub fn remap(s: &str) -> Vec<u8> {
    s.bytes()
        .map(|c| match c {
            b'$' => SENTINEL,
            b'#' => SEPARATOR,
            other => other,
        })
        .collect()
}

/// Inverse of [`remap`], for printing.
pub fn display_symbol(c: u8) -> char {
    match c {
        SENTINEL => '$',
        SEPARATOR => '#',
        other => other as char,
    }
}

pub fn example_text() -> TextBuffer {
    TextBuffer::new(remap(EXAMPLE_TEXT)).expect("fixture text is terminated")
}
