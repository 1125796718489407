#![allow(dead_code)]

use std::collections::BTreeSet;

use kmem_index::{Mem, TextBuffer};
use rand::rngs::StdRng;
use rand::Rng;

pub const LETTERS: &[u8] = b"ACGTNX";

/// A terminated text over `sigma` letters: either uniform noise or mutated
/// copies of a short seed, which keeps the run count low.
pub fn random_text(rng: &mut StdRng, max_len: usize) -> (TextBuffer, usize) {
    let sigma = rng.gen_range(2..=6);
    let len = rng.gen_range(1..max_len);
    let alphabet = &LETTERS[..sigma];
    let body: Vec<u8> = if rng.gen_bool(0.5) {
        (0..len).map(|_| alphabet[rng.gen_range(0..sigma)]).collect()
    } else {
        let seed_len = rng.gen_range(1..=len.clamp(1, 40));
        let seed: Vec<u8> = (0..seed_len).map(|_| alphabet[rng.gen_range(0..sigma)]).collect();
        let mut body = Vec::with_capacity(len);
        while body.len() < len {
            for &c in &seed {
                body.push(if rng.gen_bool(0.05) {
                    alphabet[rng.gen_range(0..sigma)]
                } else {
                    c
                });
            }
        }
        body.truncate(len);
        body
    };
    (TextBuffer::with_sentinel(body).unwrap(), sigma)
}

/// A pattern that is either a mutated piece of the text or random letters,
/// sometimes including one letter the text lacks.
pub fn random_pattern(rng: &mut StdRng, text: &TextBuffer, sigma: usize, max_len: usize) -> Vec<u8> {
    let body = &text.as_bytes()[..text.len() - 1];
    let len = rng.gen_range(1..=max_len);
    let extra = (sigma + 1).min(LETTERS.len());
    if rng.gen_bool(0.6) {
        let start = rng.gen_range(0..body.len());
        let mut p: Vec<u8> = body[start..].iter().copied().cycle().take(len).collect();
        for c in p.iter_mut() {
            if rng.gen_bool(0.1) {
                *c = LETTERS[rng.gen_range(0..extra)];
            }
        }
        p
    } else {
        (0..len).map(|_| LETTERS[rng.gen_range(0..extra)]).collect()
    }
}

pub fn as_set(mems: &[Mem]) -> BTreeSet<(usize, usize)> {
    mems.iter().map(|m| (m.start, m.len)).collect()
}
