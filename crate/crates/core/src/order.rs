//! Order-statistics helpers for relative-rank streams.

use alloc::vec;
use alloc::vec::Vec;

/// Binary indexed tree of counts over `1..=len`.
#[derive(Clone, Debug)]
pub struct Fenwick {
    tree: Vec<u32>,
}

impl Fenwick {
    pub fn new(len: usize) -> Self {
        Fenwick { tree: vec![0; len + 1] }
    }

    pub fn add(&mut self, index: usize) {
        let mut i = index;
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Number of inserted indices in `1..=index`.
    pub fn prefix(&self, index: usize) -> usize {
        let mut i = index;
        let mut s = 0usize;
        while i > 0 {
            s += self.tree[i] as usize;
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// Relative ranks (1 = best so far) of an arrival sequence of true indices.
pub fn relative_ranks(permutation: &[usize]) -> Vec<usize> {
    let mut seen = Fenwick::new(permutation.len());
    permutation
        .iter()
        .map(|&b| {
            let better = seen.prefix(b - 1);
            seen.add(b);
            better + 1
        })
        .collect()
}

const BLOCK: usize = 512;

#[derive(Clone, Debug, Default)]
struct Block {
    items: Vec<bool>,
    marked: usize,
}

/// The observed best-to-worst order of all arrivals so far, where some
/// arrivals carry a mark (red boys, boys forwarded to an inner policy, ...).
///
/// Arrivals are inserted at the position given by their relative rank; the
/// structure answers "how many marked arrivals are better than position p".
/// Stored as a list of bounded blocks, so both operations are `O(sqrt(len))`.
#[derive(Clone, Debug, Default)]
pub struct MarkedOrder {
    blocks: Vec<Block>,
    len: usize,
}

impl MarkedOrder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Inserts at 0-based `position` (0 = best). Panics if `position > len`.
    pub fn insert(&mut self, position: usize, marked: bool) {
        assert!(position <= self.len, "position {position} beyond {}", self.len);
        if self.blocks.is_empty() {
            self.blocks.push(Block::default());
        }
        let mut rest = position;
        let mut bi = 0;
        while bi + 1 < self.blocks.len() && rest > self.blocks[bi].items.len() {
            rest -= self.blocks[bi].items.len();
            bi += 1;
        }
        let block = &mut self.blocks[bi];
        block.items.insert(rest, marked);
        block.marked += usize::from(marked);
        self.len += 1;
        if block.items.len() > 2 * BLOCK {
            let tail = block.items.split_off(BLOCK);
            let tail_marked = tail.iter().filter(|&&m| m).count();
            block.marked -= tail_marked;
            self.blocks.insert(bi + 1, Block { items: tail, marked: tail_marked });
        }
    }

    /// Marked entries among positions `0..position`.
    pub fn marked_before(&self, position: usize) -> usize {
        let mut rest = position;
        let mut count = 0;
        for block in &self.blocks {
            if rest >= block.items.len() {
                rest -= block.items.len();
                count += block.marked;
            } else {
                count += block.items[..rest].iter().filter(|&&m| m).count();
                break;
            }
        }
        count
    }
}
