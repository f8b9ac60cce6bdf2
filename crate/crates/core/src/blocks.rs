//! Exact combinatorics of trader-type words.
//!
//! A word acts on quotes through the product of its atomic maps, the first
//! element acting first. A word is a periodic block when that product is the
//! identity. It is minimal when no proper contiguous sub-word is periodic,
//! and irreducible when it contains no periodic block at all.
//!
//! Everything here works off prefix products `P_0 = I, P_k = S_k ... S_1`. The
//! sub-word `i+1..=j` is periodic exactly when `P_j = P_i`.

use std::collections::HashMap;

use num_rational::BigRational;
use rayon::prelude::*;
use thiserror::Error;

use crate::domain::{atomic_matrix, AtomicMap, TraderType};

/// Trader types in time order.
pub type TypeSequence = Vec<TraderType>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error("the word {0} is not a periodic block")]
    NotPeriodic(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockReport {
    pub is_periodic: bool,
    pub is_minimal: bool,
    pub product: AtomicMap<BigRational>,
    /// What is left after deleting periodic blocks.
    pub reduction: TypeSequence,
}

/// Space-separated labels, e.g. `BL SM`.
pub fn format_word(seq: &[TraderType]) -> String {
    seq.iter().map(|t| t.label()).collect::<Vec<_>>().join(" ")
}

fn atomic_maps(alpha: &BigRational) -> [AtomicMap<BigRational>; 4] {
    TraderType::ALL.map(|ty| atomic_matrix(ty, alpha))
}

fn prefix_products(seq: &[TraderType], maps: &[AtomicMap<BigRational>; 4]) -> Vec<AtomicMap<BigRational>> {
    let mut out = Vec::with_capacity(seq.len() + 1);
    out.push(AtomicMap::identity());
    for ty in seq {
        let next = maps[ty.index() - 1].then_after(out.last().expect("starts with the identity"));
        out.push(next);
    }
    out
}

/// `S_n ... S_2 S_1` for the word `(t_1, ..., t_n)`.
pub fn sequence_matrix(seq: &[TraderType], alpha: &BigRational) -> AtomicMap<BigRational> {
    let maps = atomic_maps(alpha);
    seq.iter()
        .fold(AtomicMap::identity(), |acc, ty| maps[ty.index() - 1].then_after(&acc))
}

/// Whether the product of the word is exactly the identity. The empty word
/// counts as (trivially) periodic.
pub fn is_periodic_block(seq: &[TraderType], alpha: &BigRational) -> bool {
    sequence_matrix(seq, alpha).is_identity()
}

/// Whether a periodic word has no proper contiguous periodic sub-word.
///
/// The empty word is not a minimal block.
pub fn is_minimal_periodic_block(seq: &[TraderType], alpha: &BigRational) -> Result<bool, BlockError> {
    let prefixes = prefix_products(seq, &atomic_maps(alpha));
    let n = seq.len();
    if !prefixes[n].is_identity() {
        return Err(BlockError::NotPeriodic(format_word(seq)));
    }
    if n == 0 {
        return Ok(false);
    }
    // P_0 .. P_{n-1} pairwise distinct; P_n = P_0 is the block itself
    let mut seen = HashMap::with_capacity(n);
    for p in &prefixes[..n] {
        if seen.insert(p, ()).is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Shortest periodic sub-word of length at most `max_len`, leftmost among
/// the shortest, as a half-open index range.
fn shortest_block(
    seq: &[TraderType],
    maps: &[AtomicMap<BigRational>; 4],
    max_len: usize,
) -> Option<(usize, usize)> {
    let prefixes = prefix_products(seq, maps);
    let mut last_seen: HashMap<&AtomicMap<BigRational>, usize> = HashMap::new();
    let mut best: Option<(usize, usize)> = None;
    for (j, p) in prefixes.iter().enumerate() {
        if let Some(&i) = last_seen.get(p) {
            let len = j - i;
            if len <= max_len && best.is_none_or(|(bi, bj)| len < bj - bi) {
                best = Some((i, j));
            }
        }
        last_seen.insert(p, j);
    }
    best
}

/// Delete periodic blocks until none of length `<= max_block_len` is left.
///
/// Each round removes the shortest such block, the leftmost one on ties.
pub fn reduce_sequence(seq: &[TraderType], alpha: &BigRational, max_block_len: usize) -> TypeSequence {
    let maps = atomic_maps(alpha);
    let mut word = seq.to_vec();
    while let Some((i, j)) = shortest_block(&word, &maps, max_block_len) {
        word.drain(i..j);
    }
    word
}

pub fn is_irreducible(seq: &[TraderType], alpha: &BigRational, max_block_len: usize) -> bool {
    shortest_block(seq, &atomic_maps(alpha), max_block_len).is_none()
}

pub fn block_report(seq: &[TraderType], alpha: &BigRational, max_block_len: usize) -> BlockReport {
    let product = sequence_matrix(seq, alpha);
    let is_periodic = product.is_identity();
    let is_minimal = is_periodic && is_minimal_periodic_block(seq, alpha).unwrap_or(false);
    BlockReport {
        is_periodic,
        is_minimal,
        product,
        reduction: reduce_sequence(seq, alpha, max_block_len),
    }
}

struct Search<'a> {
    maps: &'a [AtomicMap<BigRational>; 4],
    max_len: usize,
    word: Vec<TraderType>,
    /// `P_0 .. P_k` for the current word of length `k`.
    prefixes: Vec<AtomicMap<BigRational>>,
    /// (limit-type count) - (market-type count); determinants force 0 on return.
    balance: i64,
    found: Vec<TypeSequence>,
}

impl Search<'_> {
    fn extend(&mut self) {
        let k = self.word.len();
        if k == self.max_len {
            return;
        }
        for ty in TraderType::ALL {
            let balance = self.balance + if ty.is_limit() { 1 } else { -1 };
            // the remaining letters must be able to cancel the determinant
            if balance.unsigned_abs() as usize > self.max_len - k - 1 {
                continue;
            }
            let next = self.maps[ty.index() - 1].then_after(&self.prefixes[k]);
            if next.is_identity() {
                let mut block = self.word.clone();
                block.push(ty);
                self.found.push(block);
                continue;
            }
            // a repeated prefix product encloses a proper periodic sub-word
            if self.prefixes[1..].contains(&next) {
                continue;
            }
            self.word.push(ty);
            self.prefixes.push(next);
            let saved = std::mem::replace(&mut self.balance, balance);
            self.extend();
            self.balance = saved;
            self.prefixes.pop();
            self.word.pop();
        }
    }
}

/// Every minimal periodic block of length `<= max_len`, by exhaustive
/// depth-first search, split over the first letter.
///
/// Output is sorted by length, then lexicographically in `BL < BM < SL < SM`.
pub fn enumerate_minimal_blocks(alpha: &BigRational, max_len: usize) -> Vec<TypeSequence> {
    let maps = atomic_maps(alpha);
    let mut blocks: Vec<TypeSequence> = TraderType::ALL
        .par_iter()
        .map(|&first| {
            if max_len < 2 {
                return Vec::new();
            }
            let mut search = Search {
                maps: &maps,
                max_len,
                word: vec![first],
                prefixes: vec![AtomicMap::identity(), maps[first.index() - 1].clone()],
                balance: if first.is_limit() { 1 } else { -1 },
                found: Vec::new(),
            };
            search.extend();
            search.found
        })
        .flatten()
        .collect();
    blocks.sort_by(|x, y| {
        x.len()
            .cmp(&y.len())
            .then_with(|| x.iter().map(|t| t.index()).cmp(y.iter().map(|t| t.index())))
    });
    blocks.dedup();
    blocks
}
