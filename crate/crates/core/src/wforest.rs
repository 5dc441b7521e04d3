//! Wavelet forests: fixed-length blocks, one Huffman-shaped wavelet tree per
//! block, and the rank of every alphabet symbol at the start of each block.
//!
//! Each block's rank row is stored directly in front of its tree so that a
//! rank query touches a single block section:
//!
//! ```text
//! word 0        "WFWF", version, alphabet bits
//! word 1        n
//! word 2        block length in symbols
//! word 3        block count K
//! K words       byte offset of each block section
//! K sections    rank row (2^bits words), then the block's "WFWT" tree section
//! ```

use std::ops::Range;

use crate::alphabet::AlphabetBits;
use crate::error::{Error, Result};
use crate::huffman::Histogram;
use crate::layout::{self, tag_word, word, FORMAT_VERSION};
use crate::probe::{word_offset, NoProbe, Probe};
use crate::sequence::SequenceIndex;
use crate::wtree::{encode_tree, TreeRef, TreeShape};

pub(crate) const MAGIC: &[u8; 4] = b"WFWF";
const HEADER_WORDS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Block {
    row_at: usize,
    tree_at: usize,
    shape: TreeShape,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveletForest {
    buf: Vec<u64>,
    alphabet: AlphabetBits,
    n: u64,
    block_len: u64,
    blocks: Vec<Block>,
    totals: Histogram,
}

impl WaveletForest {
    /// Splits `text` into blocks of `block_len` symbols (the last may be
    /// shorter) and builds a tree per block from that block's histogram.
    pub fn build(text: &[u8], block_len: u64, alphabet: AlphabetBits) -> Result<Self> {
        if block_len == 0 {
            return Err(Error::invalid("block length must be at least 1 symbol"));
        }
        if let Some(p) = text.iter().position(|&s| !alphabet.contains(s)) {
            return Err(Error::invalid(format!(
                "symbol {} at position {} does not fit in {alphabet} bits",
                text[p],
                p + 1
            )));
        }
        let sigma = alphabet.sigma();
        let chunk = usize::try_from(block_len).unwrap_or(usize::MAX);
        let n_blocks = text.len().div_ceil(chunk);
        let mut buf = vec![
            tag_word(MAGIC, FORMAT_VERSION, alphabet.get()),
            text.len() as u64,
            block_len,
            n_blocks as u64,
        ];
        buf.resize(HEADER_WORDS + n_blocks, 0);
        let mut running = vec![0u64; sigma];
        for (k, block) in text.chunks(chunk).enumerate() {
            buf[HEADER_WORDS + k] = word_offset(buf.len());
            buf.extend_from_slice(&running);
            encode_tree(block, alphabet, &mut buf)?;
            for &s in block {
                running[s as usize] += 1;
            }
        }
        Self::from_words(buf)
    }

    pub(crate) fn from_words(buf: Vec<u64>) -> Result<Self> {
        let (version, bits) = layout::check_tag(word(&buf, 0)?, MAGIC)?;
        if version != FORMAT_VERSION {
            return Err(Error::corrupt(format!("unsupported forest version {version}")));
        }
        let alphabet = AlphabetBits::new(bits).map_err(|e| Error::corrupt(e.to_string()))?;
        let sigma = alphabet.sigma();
        let n = word(&buf, 1)?;
        let block_len = word(&buf, 2)?;
        let n_blocks = word(&buf, 3)?;
        if block_len == 0 {
            return Err(Error::corrupt("zero block length"));
        }
        if n_blocks != n.div_ceil(block_len) {
            return Err(Error::corrupt("block count does not match n and block length"));
        }
        let n_blocks = layout::to_index(n_blocks, "block count")?;
        let mut at = HEADER_WORDS
            .checked_add(n_blocks)
            .ok_or_else(|| Error::corrupt("block count overflow"))?;
        let mut blocks = Vec::with_capacity(n_blocks);
        let mut totals = Histogram::new();
        for k in 0..n_blocks {
            if word(&buf, HEADER_WORDS + k)? != word_offset(at) {
                return Err(Error::corrupt(format!("block {k} offset mismatch")));
            }
            let row_at = at;
            let tree_at = row_at + sigma;
            if tree_at > buf.len() {
                return Err(Error::corrupt("forest truncated"));
            }
            for (c, &r) in buf[row_at..tree_at].iter().enumerate() {
                if r != totals.get(c as u8) {
                    return Err(Error::corrupt(format!("rank row {k} entry {c} mismatch")));
                }
            }
            let shape = TreeShape::parse(&buf, tree_at)?;
            if shape.alphabet() != alphabet {
                return Err(Error::corrupt(format!("block {k} alphabet mismatch")));
            }
            let expected = if k + 1 < n_blocks {
                block_len
            } else {
                n - block_len * (n_blocks as u64 - 1)
            };
            if shape.len() != expected {
                return Err(Error::corrupt(format!("block {k} has wrong length")));
            }
            for (c, count) in shape.histogram().iter() {
                totals.add(c, count);
            }
            at = tree_at + shape.section_words();
            blocks.push(Block { row_at, tree_at, shape });
        }
        if at != buf.len() {
            return Err(Error::corrupt("trailing bytes after wavelet forest"));
        }
        Ok(Self {
            buf,
            alphabet,
            n,
            block_len,
            blocks,
            totals,
        })
    }

    #[inline]
    fn tree(&self, k: usize) -> TreeRef<'_> {
        let b = &self.blocks[k];
        TreeRef {
            buf: &self.buf,
            base: b.tree_at,
            shape: &b.shape,
        }
    }

    /// Block index and in-block position of `1 <= i <= n`.
    #[inline]
    fn locate(&self, i: u64) -> (usize, u64) {
        let k = (i - 1) / self.block_len;
        (k as usize, i - k * self.block_len)
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn alphabet(&self) -> AlphabetBits {
        self.alphabet
    }

    /// Symbols per block.
    pub fn block_len(&self) -> u64 {
        self.block_len
    }

    /// Block length in bytes of raw `alphabet`-bit data, rounded up.
    pub fn block_bytes(&self) -> u64 {
        (self.block_len * self.alphabet.get() as u64).div_ceil(8)
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn count(&self, c: u8) -> u64 {
        self.totals.get(c)
    }

    /// Occurrences of every symbol before block `k`.
    pub fn rank_row(&self, k: usize) -> &[u64] {
        let at = self.blocks[k].row_at;
        &self.buf[at..at + self.alphabet.sigma()]
    }

    /// Symbol histogram of block `k`.
    pub fn block_histogram(&self, k: usize) -> Histogram {
        self.blocks[k].shape.histogram()
    }

    /// Bytes before the first block section.
    pub fn header_bytes(&self) -> u64 {
        word_offset(HEADER_WORDS + self.blocks.len())
    }

    /// Byte range of block `k`'s section: its rank row and its tree.
    pub fn block_extent(&self, k: usize) -> Range<u64> {
        let b = &self.blocks[k];
        word_offset(b.row_at)..word_offset(b.tree_at + b.shape.section_words())
    }

    /// Byte range of block `k`'s rank row.
    pub fn rank_row_extent(&self, k: usize) -> Range<u64> {
        let b = &self.blocks[k];
        word_offset(b.row_at)..word_offset(b.tree_at)
    }

    /// Byte range of block `k`'s tree section.
    pub fn tree_extent(&self, k: usize) -> Range<u64> {
        let b = &self.blocks[k];
        word_offset(b.tree_at)..word_offset(b.tree_at + b.shape.section_words())
    }

    /// Total bytes of all rank rows.
    pub fn rank_table_bytes(&self) -> u64 {
        (self.blocks.len() * self.alphabet.sigma()) as u64 * 8
    }

    pub fn size_bytes(&self) -> u64 {
        self.buf.len() as u64 * 8
    }

    pub fn access(&self, i: u64) -> Result<u8> {
        self.access_probed(i, &mut NoProbe)
    }

    pub fn rank(&self, c: u8, i: u64) -> Result<u64> {
        self.rank_probed(c, i, &mut NoProbe)
    }

    pub fn select(&self, c: u8, j: u64) -> Result<u64> {
        self.select_probed(c, j, &mut NoProbe)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        layout::words_to_bytes(&self.buf)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::from_words(layout::bytes_to_words(bytes)?)
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.buf
    }
}

impl SequenceIndex for WaveletForest {
    fn len(&self) -> u64 {
        self.n
    }

    fn alphabet(&self) -> AlphabetBits {
        self.alphabet
    }

    fn count(&self, c: u8) -> u64 {
        self.totals.get(c)
    }

    fn size_bytes(&self) -> u64 {
        WaveletForest::size_bytes(self)
    }

    /// Reads only the block's tree; rank rows are never consulted.
    #[inline]
    fn access_probed<P: Probe>(&self, i: u64, probe: &mut P) -> Result<u8> {
        if i == 0 || i > self.n {
            return Err(Error::range(i, 1, self.n));
        }
        let (k, local) = self.locate(i);
        Ok(self.tree(k).access_raw(local, probe))
    }

    #[inline]
    fn rank_probed<P: Probe>(&self, c: u8, i: u64, probe: &mut P) -> Result<u64> {
        if i > self.n {
            return Err(Error::range(i, 0, self.n));
        }
        if i == 0 || !self.alphabet.contains(c) {
            return Ok(0);
        }
        let (k, local) = self.locate(i);
        let at = self.blocks[k].row_at + c as usize;
        probe.touch(word_offset(at));
        Ok(self.buf[at] + self.tree(k).rank_raw(c, local, probe))
    }

    fn select_probed<P: Probe>(&self, c: u8, j: u64, probe: &mut P) -> Result<u64> {
        let available = self.totals.get(c);
        if j == 0 || j > available {
            return Err(Error::NotFound {
                what: format!("symbol {c}"),
                ordinal: j,
                available,
            });
        }
        let mut read_row = |k: usize| {
            let at = self.blocks[k].row_at + c as usize;
            probe.touch(word_offset(at));
            self.buf[at]
        };
        // Largest block whose starting rank is below j; block 0 starts at 0.
        let (mut lo, mut hi) = (0usize, self.blocks.len());
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if read_row(mid) < j {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let before = read_row(lo);
        let tree = self.tree(lo);
        let slot = tree
            .shape
            .slot(c)
            .expect("block located by rank row contains the symbol");
        let pos = tree.select_raw(slot, j - before, probe);
        Ok(lo as u64 * self.block_len + pos)
    }
}
