//! Canonical Huffman codes over byte-sized alphabets.
//!
//! Construction is deterministic: the two lightest nodes are merged first,
//! ties broken by the smallest symbol each node contains. Code values are
//! then reassigned canonically from the lengths, ordered by `(length, symbol)`,
//! so a table is fully described by its `(symbol, length)` pairs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::layout::{self, word};

/// Longest code length accepted when loading a table.
pub const MAX_CODE_LEN: u8 = 127;

/// Per-symbol occurrence counts for symbols `0..=255`.
#[derive(Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: [u64; 256],
}

impl Default for Histogram {
    fn default() -> Self {
        Self { counts: [0; 256] }
    }
}

impl std::fmt::Debug for Histogram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.iter()).finish()
    }
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn of(symbols: &[u8]) -> Self {
        let mut h = Self::new();
        for &s in symbols {
            h.counts[s as usize] += 1;
        }
        h
    }

    pub fn get(&self, symbol: u8) -> u64 {
        self.counts[symbol as usize]
    }

    pub fn add(&mut self, symbol: u8, count: u64) {
        self.counts[symbol as usize] += count;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Number of symbols with a nonzero count.
    pub fn distinct(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// `(symbol, count)` for every symbol with a nonzero count, ascending.
    pub fn iter(&self) -> impl Iterator<Item = (u8, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(s, &c)| (s as u8, c))
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }
}

impl FromIterator<(u8, u64)> for Histogram {
    fn from_iter<I: IntoIterator<Item = (u8, u64)>>(iter: I) -> Self {
        let mut h = Self::new();
        for (s, c) in iter {
            h.add(s, c);
        }
        h
    }
}

/// Zeroth-order empirical entropy in bits per symbol.
pub fn empirical_entropy_h0(freqs: &Histogram) -> Result<f64> {
    let n = freqs.total();
    if n == 0 {
        return Err(Error::invalid("entropy of an empty histogram"));
    }
    let n = n as f64;
    Ok(freqs
        .iter()
        .map(|(_, c)| {
            let p = c as f64 / n;
            p * (n / c as f64).log2()
        })
        .sum())
}

/// A code word: `len` bits of `bits`, most significant first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Code {
    pub len: u8,
    pub bits: u128,
}

impl Code {
    /// Bit `d` (0 = first) of the code word.
    #[inline]
    pub fn bit(&self, d: u8) -> bool {
        (self.bits >> (self.len - 1 - d)) & 1 == 1
    }
}

const NO_SLOT: u16 = u16::MAX;

/// Canonical code table. Symbols with a code are numbered by *slot*, their
/// rank in `(length, symbol)` order.
#[derive(Clone, PartialEq, Eq)]
pub struct CodeTable {
    slots: [u16; 256],
    /// Symbols sorted by `(length, symbol)`.
    order: Vec<u8>,
    /// Codes in slot order.
    codes: Vec<Code>,
    total_symbols: u64,
}

impl std::fmt::Debug for CodeTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.order.iter().zip(&self.codes)).finish()
    }
}

impl CodeTable {
    /// Builds the canonical Huffman code for the nonzero entries of `freqs`.
    pub fn build(freqs: &Histogram) -> Result<Self> {
        let symbols: Vec<(u8, u64)> = freqs.iter().collect();
        if symbols.is_empty() {
            return Err(Error::invalid("Huffman code over an empty frequency map"));
        }
        let lengths = huffman_lengths(&symbols);
        let pairs: Vec<(u8, u8)> = symbols.iter().map(|&(s, _)| s).zip(lengths).collect();
        Self::from_lengths(&pairs, freqs.total())
    }

    /// Assigns canonical codes to the given `(symbol, length)` pairs.
    pub fn from_lengths(pairs: &[(u8, u8)], total_symbols: u64) -> Result<Self> {
        let mut sorted = pairs.to_vec();
        sorted.sort_unstable_by_key(|&(s, len)| (len, s));
        let mut seen = [false; 256];
        if pairs
            .iter()
            .any(|&(s, _)| std::mem::replace(&mut seen[s as usize], true))
        {
            return Err(Error::invalid("duplicate symbol in code lengths"));
        }
        match sorted.len() {
            0 => {}
            1 => {
                if sorted[0].1 != 0 {
                    return Err(Error::invalid("single-symbol code must have length 0"));
                }
            }
            _ => {
                if sorted.iter().any(|&(_, len)| len == 0 || len > MAX_CODE_LEN) {
                    return Err(Error::invalid("code length out of range"));
                }
                if !kraft_is_complete(sorted.iter().map(|p| p.1)) {
                    return Err(Error::invalid("code lengths violate Kraft equality"));
                }
            }
        }
        let mut slots = [NO_SLOT; 256];
        let mut codes = Vec::with_capacity(sorted.len());
        let mut next = 0u128;
        let mut prev_len = sorted.first().map_or(0, |p| p.1);
        for (slot, &(s, len)) in sorted.iter().enumerate() {
            next <<= len - prev_len;
            slots[s as usize] = slot as u16;
            codes.push(Code { len, bits: next });
            next += 1;
            prev_len = len;
        }
        Ok(Self {
            slots,
            codes,
            order: sorted.iter().map(|p| p.0).collect(),
            total_symbols,
        })
    }

    #[inline]
    pub fn code(&self, symbol: u8) -> Option<Code> {
        self.slot(symbol).map(|k| self.codes[k])
    }

    #[inline]
    pub fn slot(&self, symbol: u8) -> Option<usize> {
        match self.slots[symbol as usize] {
            NO_SLOT => None,
            k => Some(k as usize),
        }
    }

    /// Codes in slot order.
    pub fn codes(&self) -> &[Code] {
        &self.codes
    }

    pub fn sigma_effective(&self) -> usize {
        self.order.len()
    }

    pub fn total_symbols(&self) -> u64 {
        self.total_symbols
    }

    /// Symbols in canonical `(length, symbol)` order.
    pub fn symbols(&self) -> &[u8] {
        &self.order
    }

    pub fn max_len(&self) -> u8 {
        self.codes.last().map_or(0, |c| c.len)
    }

    /// `Σ freq(c) · len(c)`: the number of bits needed to encode `freqs`.
    pub fn encoded_bits(&self, freqs: &Histogram) -> u64 {
        freqs
            .iter()
            .map(|(s, c)| c * self.code(s).map_or(0, |code| code.len as u64))
            .sum()
    }

    /// Mean code length weighted by `freqs`.
    pub fn expected_len(&self, freqs: &Histogram) -> f64 {
        self.encoded_bits(freqs) as f64 / freqs.total() as f64
    }

    pub(crate) fn write_words(&self, out: &mut Vec<u64>) {
        out.push(self.order.len() as u64);
        for (&s, code) in self.order.iter().zip(&self.codes) {
            out.push(s as u64);
            out.push(code.len as u64);
        }
    }

    /// Parses a table written by [`write_words`](Self::write_words), returning
    /// it and the index just past it.
    pub(crate) fn read_words(buf: &[u64], at: usize, total_symbols: u64) -> Result<(Self, usize)> {
        let count = word(buf, at)?;
        if count > 256 {
            return Err(Error::corrupt(format!("code table with {count} symbols")));
        }
        let mut pairs = Vec::with_capacity(count as usize);
        for k in 0..count as usize {
            let s = word(buf, at + 1 + 2 * k)?;
            let len = word(buf, at + 2 + 2 * k)?;
            if s > 255 || len > MAX_CODE_LEN as u64 {
                return Err(Error::corrupt("code table entry out of range"));
            }
            pairs.push((s as u8, len as u8));
        }
        let table =
            Self::from_lengths(&pairs, total_symbols).map_err(|e| Error::corrupt(format!("code table: {e}")))?;
        if table.order.iter().zip(&pairs).any(|(&s, p)| s != p.0) {
            return Err(Error::corrupt("code table not in canonical order"));
        }
        Ok((table, at + 1 + 2 * count as usize))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Vec::new();
        self.write_words(&mut w);
        layout::words_to_bytes(&w)
    }

    pub fn from_bytes(bytes: &[u8], total_symbols: u64) -> Result<Self> {
        let w = layout::bytes_to_words(bytes)?;
        let (table, end) = Self::read_words(&w, 0, total_symbols)?;
        if end != w.len() {
            return Err(Error::corrupt("trailing bytes after code table"));
        }
        Ok(table)
    }
}

/// Checks `Σ 2^-len == 1` exactly.
pub fn kraft_is_complete<I: IntoIterator<Item = u8>>(lengths: I) -> bool {
    let one = 1u128 << MAX_CODE_LEN;
    let mut sum = 0u128;
    for len in lengths {
        if len > MAX_CODE_LEN {
            return false;
        }
        match sum.checked_add(1u128 << (MAX_CODE_LEN - len)) {
            Some(s) if s <= one => sum = s,
            _ => return false,
        }
    }
    sum == one
}

/// Huffman code lengths for `symbols` (sorted by symbol, all counts > 0).
fn huffman_lengths(symbols: &[(u8, u64)]) -> Vec<u8> {
    if symbols.len() == 1 {
        return vec![0];
    }
    // Leaves are nodes 0..k; merged nodes are appended.
    let mut parent: Vec<usize> = vec![usize::MAX; symbols.len()];
    let mut heap: BinaryHeap<Reverse<(u64, u8, usize)>> = symbols
        .iter()
        .enumerate()
        .map(|(id, &(s, c))| Reverse((c, s, id)))
        .collect();
    while heap.len() > 1 {
        let Reverse((w1, s1, a)) = heap.pop().unwrap();
        let Reverse((w2, s2, b)) = heap.pop().unwrap();
        let id = parent.len();
        parent.push(usize::MAX);
        parent[a] = id;
        parent[b] = id;
        heap.push(Reverse((w1 + w2, s1.min(s2), id)));
    }
    // Parents always have larger ids, so depths resolve walking downwards.
    let mut depth = vec![0u8; parent.len()];
    for id in (0..parent.len()).rev() {
        if parent[id] != usize::MAX {
            depth[id] = depth[parent[id]] + 1;
        }
    }
    depth.truncate(symbols.len());
    depth
}
