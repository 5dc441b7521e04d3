//! Plain (uncompressed) bitvectors with rank and select support.
//!
//! Positions are 1-based. `rank1(i)` counts set bits in positions `1..=i`,
//! with `rank1(0) = 0`; `select1(j)` returns the position of the `j`-th set
//! bit. The zero-bit variants are symmetric.
//!
//! A bitvector lives in its canonical layout, a run of 64-bit words:
//!
//! ```text
//! word 0       "WFBV" magic, zero padded
//! word 1       length in bits
//! words        ceil(len / 64) packed data words, bit i at word (i-1)/64, bit (i-1)%64
//! rank dir     len/512 + 1 cumulative popcounts, one per superblock boundary
//! sel1 count   followed by the positions of set bits 1, 8193, 16385, ...
//! sel0 count   followed by the positions of clear bits 1, 8193, 16385, ...
//! ```
//!
//! [`BitVector`] owns such a run. [`BitVectorView`] borrows one embedded in a
//! larger buffer, which is how wavelet trees keep all their nodes contiguous.

use crate::error::{Error, Result};
use crate::layout::{self, tag_word, word};
use crate::probe::{word_offset, NoProbe, Probe};

pub const SUPERBLOCK_BITS: u64 = 512;
pub const SELECT_SAMPLE_RATE: u64 = 8192;

const WORDS_PER_SUPERBLOCK: usize = (SUPERBLOCK_BITS / 64) as usize;
const MAGIC: &[u8; 4] = b"WFBV";
const HEADER_WORDS: usize = 2;

/// Growable bit buffer used while constructing bitvectors.
#[derive(Debug, Default, Clone)]
pub struct BitBuf {
    words: Vec<u64>,
    len: u64,
}

impl BitBuf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: u64) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(64) as usize),
            len: 0,
        }
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        let off = self.len % 64;
        if off == 0 {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().unwrap() |= 1 << off;
        }
        self.len += 1;
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl FromIterator<bool> for BitBuf {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut b = BitBuf::new();
        for bit in iter {
            b.push(bit);
        }
        b
    }
}

/// Location and sizes of one bitvector section inside a word buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct BvLayout {
    pub base: usize,
    pub len: u64,
    pub ones: u64,
    n_words: usize,
    n_sel1: usize,
    n_sel0: usize,
}

impl BvLayout {
    #[inline]
    fn words_at(&self) -> usize {
        self.base + HEADER_WORDS
    }

    #[inline]
    fn dir_at(&self) -> usize {
        self.words_at() + self.n_words
    }

    #[inline]
    fn n_dir(&self) -> usize {
        (self.len / SUPERBLOCK_BITS) as usize + 1
    }

    #[inline]
    fn sel1_at(&self) -> usize {
        self.dir_at() + self.n_dir() + 1
    }

    #[inline]
    fn sel0_at(&self) -> usize {
        self.sel1_at() + self.n_sel1 + 1
    }

    #[inline]
    pub fn count(&self, bit: bool) -> u64 {
        if bit {
            self.ones
        } else {
            self.len - self.ones
        }
    }

    pub fn total_words(&self) -> usize {
        self.sel0_at() + self.n_sel0 - self.base
    }

    /// Word range of the packed data words.
    pub fn data_words(&self) -> std::ops::Range<usize> {
        self.words_at()..self.dir_at()
    }

    pub fn rebased(mut self, base: usize) -> Self {
        self.base = base;
        self
    }

    /// Parses and validates a section starting at `buf[base]`.
    pub fn parse(buf: &[u64], base: usize) -> Result<Self> {
        layout::check_tag(word(buf, base)?, MAGIC)?;
        let len = word(buf, base + 1)?;
        let n_words = layout::to_index(len.div_ceil(64), "bitvector word count")?;
        let mut l = BvLayout {
            base,
            len,
            ones: 0,
            n_words,
            n_sel1: 0,
            n_sel0: 0,
        };
        let dir_end = l
            .dir_at()
            .checked_add(l.n_dir())
            .filter(|&e| e < buf.len())
            .ok_or_else(|| Error::corrupt("bitvector truncated"))?;
        let data = &buf[l.words_at()..l.dir_at()];
        if !len.is_multiple_of(64) {
            let last = data[n_words - 1];
            if last >> (len % 64) != 0 {
                return Err(Error::corrupt("bits set beyond bitvector length"));
            }
        }
        let mut expected = 0u64;
        for (k, &stored) in buf[l.dir_at()..dir_end].iter().enumerate() {
            if stored != expected {
                return Err(Error::corrupt(format!("rank directory entry {k} mismatch")));
            }
            let chunk = data.iter().skip(k * WORDS_PER_SUPERBLOCK).take(WORDS_PER_SUPERBLOCK);
            expected += chunk.map(|w| w.count_ones() as u64).sum::<u64>();
        }
        l.ones = expected;
        l.n_sel1 = layout::to_index(word(buf, dir_end)?, "select sample count")?;
        if l.n_sel1 as u64 != l.ones.div_ceil(SELECT_SAMPLE_RATE) {
            return Err(Error::corrupt("select-1 sample count mismatch"));
        }
        let sel0_count_at = l
            .sel1_at()
            .checked_add(l.n_sel1)
            .ok_or_else(|| Error::corrupt("bitvector truncated"))?;
        l.n_sel0 = layout::to_index(word(buf, sel0_count_at)?, "select sample count")?;
        if l.n_sel0 as u64 != (len - l.ones).div_ceil(SELECT_SAMPLE_RATE) {
            return Err(Error::corrupt("select-0 sample count mismatch"));
        }
        if l.sel0_at() + l.n_sel0 > buf.len() {
            return Err(Error::corrupt("bitvector truncated"));
        }
        let view = BitVectorView { buf, l };
        for bit in [true, false] {
            let (at, n) = if bit {
                (l.sel1_at(), l.n_sel1)
            } else {
                (l.sel0_at(), l.n_sel0)
            };
            for s in 0..n {
                let ordinal = s as u64 * SELECT_SAMPLE_RATE + 1;
                let pos = buf[at + s];
                if pos == 0 || pos > len || view.bit_raw(pos) != bit || view.rank_raw(bit, pos, &mut NoProbe) != ordinal
                {
                    return Err(Error::corrupt("select sample mismatch"));
                }
            }
        }
        Ok(l)
    }
}

/// Appends the canonical section for `len` bits packed in `data` to `out`.
///
/// `data` must hold exactly `ceil(len / 64)` words with zero padding.
pub(crate) fn encode_section(data: &[u64], len: u64, out: &mut Vec<u64>) -> BvLayout {
    debug_assert_eq!(data.len() as u64, len.div_ceil(64));
    let base = out.len();
    out.push(tag_word(MAGIC, 0, 0));
    out.push(len);
    out.extend_from_slice(data);

    let n_dir = (len / SUPERBLOCK_BITS) as usize + 1;
    let mut acc = 0u64;
    for k in 0..n_dir {
        out.push(acc);
        let chunk = data.iter().skip(k * WORDS_PER_SUPERBLOCK).take(WORDS_PER_SUPERBLOCK);
        acc += chunk.map(|w| w.count_ones() as u64).sum::<u64>();
    }
    let ones = acc;

    let sel1 = select_samples(data, len, true);
    out.push(sel1.len() as u64);
    out.extend_from_slice(&sel1);
    let sel0 = select_samples(data, len, false);
    out.push(sel0.len() as u64);
    out.extend_from_slice(&sel0);

    BvLayout {
        base,
        len,
        ones,
        n_words: data.len(),
        n_sel1: sel1.len(),
        n_sel0: sel0.len(),
    }
}

fn select_samples(data: &[u64], len: u64, bit: bool) -> Vec<u64> {
    let mut samples = Vec::new();
    let mut seen = 0u64;
    let mut next = 1u64;
    for (w, &raw) in data.iter().enumerate() {
        let mut word = if bit { raw } else { !raw };
        let valid = (len - w as u64 * 64).min(64);
        if valid < 64 {
            word &= (1u64 << valid) - 1;
        }
        let pc = word.count_ones() as u64;
        while next <= seen + pc {
            let in_word = select_in_word(word, next - seen);
            samples.push(w as u64 * 64 + in_word as u64 + 1);
            next += SELECT_SAMPLE_RATE;
        }
        seen += pc;
    }
    samples
}

/// 0-based index of the `r`-th (1-based) set bit of `w`.
#[inline]
fn select_in_word(mut w: u64, r: u64) -> u32 {
    debug_assert!(r >= 1 && r <= w.count_ones() as u64);
    for _ in 1..r {
        w &= w - 1;
    }
    w.trailing_zeros()
}

/// A borrowed bitvector section.
#[derive(Debug, Clone, Copy)]
pub struct BitVectorView<'a> {
    buf: &'a [u64],
    l: BvLayout,
}

impl<'a> BitVectorView<'a> {
    pub(crate) fn new(buf: &'a [u64], l: BvLayout) -> Self {
        Self { buf, l }
    }

    pub fn len(&self) -> u64 {
        self.l.len
    }

    pub fn is_empty(&self) -> bool {
        self.l.len == 0
    }

    pub fn count_ones(&self) -> u64 {
        self.l.ones
    }

    pub fn count_zeros(&self) -> u64 {
        self.l.len - self.l.ones
    }

    fn count(&self, bit: bool) -> u64 {
        if bit {
            self.count_ones()
        } else {
            self.count_zeros()
        }
    }

    pub fn access(&self, i: u64) -> Result<bool> {
        if i == 0 || i > self.l.len {
            return Err(Error::range(i, 1, self.l.len));
        }
        Ok(self.bit_raw(i))
    }

    pub fn rank1(&self, i: u64) -> Result<u64> {
        self.check_rank(i)?;
        Ok(self.rank_raw(true, i, &mut NoProbe))
    }

    pub fn rank0(&self, i: u64) -> Result<u64> {
        self.check_rank(i)?;
        Ok(self.rank_raw(false, i, &mut NoProbe))
    }

    pub fn select1(&self, j: u64) -> Result<u64> {
        self.select(true, j)
    }

    pub fn select0(&self, j: u64) -> Result<u64> {
        self.select(false, j)
    }

    fn select(&self, bit: bool, j: u64) -> Result<u64> {
        let available = self.count(bit);
        if j == 0 || j > available {
            return Err(Error::NotFound {
                what: format!("bit {}", bit as u8),
                ordinal: j,
                available,
            });
        }
        Ok(self.select_raw(bit, j, &mut NoProbe))
    }

    fn check_rank(&self, i: u64) -> Result<()> {
        if i > self.l.len {
            return Err(Error::range(i, 0, self.l.len));
        }
        Ok(())
    }

    #[inline]
    fn bit_raw(&self, i: u64) -> bool {
        let pos = i - 1;
        (self.buf[self.l.words_at() + (pos / 64) as usize] >> (pos % 64)) & 1 == 1
    }

    /// Rank of `bit` over positions `1..=i`. Requires `i <= len`.
    #[inline]
    pub(crate) fn rank_raw<P: Probe>(&self, bit: bool, i: u64, probe: &mut P) -> u64 {
        let sb = (i / SUPERBLOCK_BITS) as usize;
        let dir = self.l.dir_at() + sb;
        probe.touch(word_offset(dir));
        let mut ones = self.buf[dir];
        let words = self.l.words_at();
        let last = words + (i / 64) as usize;
        for w in words + sb * WORDS_PER_SUPERBLOCK..last {
            probe.touch(word_offset(w));
            ones += self.buf[w].count_ones() as u64;
        }
        let rem = i % 64;
        if rem != 0 {
            probe.touch(word_offset(last));
            ones += (self.buf[last] & ((1u64 << rem) - 1)).count_ones() as u64;
        }
        if bit {
            ones
        } else {
            i - ones
        }
    }

    /// Reads bit `i` and returns it together with its rank among equal bits
    /// in `1..=i`. Requires `1 <= i <= len`.
    #[inline]
    pub(crate) fn access_rank_raw<P: Probe>(&self, i: u64, probe: &mut P) -> (bool, u64) {
        let pos = i - 1;
        let sb = (pos / SUPERBLOCK_BITS) as usize;
        let dir = self.l.dir_at() + sb;
        probe.touch(word_offset(dir));
        let mut ones = self.buf[dir];
        let words = self.l.words_at();
        let target = words + (pos / 64) as usize;
        for w in words + sb * WORDS_PER_SUPERBLOCK..target {
            probe.touch(word_offset(w));
            ones += self.buf[w].count_ones() as u64;
        }
        probe.touch(word_offset(target));
        let word = self.buf[target];
        let off = pos % 64;
        let bit = (word >> off) & 1 == 1;
        let mask = if off == 63 { !0 } else { (1u64 << (off + 1)) - 1 };
        ones += (word & mask).count_ones() as u64;
        if bit {
            (true, ones)
        } else {
            (false, i - ones)
        }
    }

    #[inline]
    fn dir_count<P: Probe>(&self, bit: bool, k: usize, probe: &mut P) -> u64 {
        let at = self.l.dir_at() + k;
        probe.touch(word_offset(at));
        let ones = self.buf[at];
        if bit {
            ones
        } else {
            k as u64 * SUPERBLOCK_BITS - ones
        }
    }

    /// Position of the `j`-th `bit`. Requires `1 <= j <= count(bit)`.
    pub(crate) fn select_raw<P: Probe>(&self, bit: bool, j: u64, probe: &mut P) -> u64 {
        let (samples_at, n_samples) = if bit {
            (self.l.sel1_at(), self.l.n_sel1)
        } else {
            (self.l.sel0_at(), self.l.n_sel0)
        };
        let s = ((j - 1) / SELECT_SAMPLE_RATE) as usize;
        probe.touch(word_offset(samples_at + s));
        let sampled = self.buf[samples_at + s];
        let mut lo = ((sampled - 1) / SUPERBLOCK_BITS) as usize;
        let mut hi = if s + 1 < n_samples {
            probe.touch(word_offset(samples_at + s + 1));
            let next = self.buf[samples_at + s + 1];
            (((next - 1) / SUPERBLOCK_BITS) as usize + 1).min(self.l.n_dir())
        } else {
            self.l.n_dir()
        };
        // Largest superblock k in [lo, hi) whose starting count is below j.
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.dir_count(bit, mid, probe) < j {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut remaining = j - self.dir_count(bit, lo, probe);
        let words = self.l.words_at();
        let mut w = words + lo * WORDS_PER_SUPERBLOCK;
        loop {
            probe.touch(word_offset(w));
            let raw = self.buf[w];
            let word = if bit { raw } else { !raw };
            let pc = word.count_ones() as u64;
            if pc >= remaining {
                return (w - words) as u64 * 64 + select_in_word(word, remaining) as u64 + 1;
            }
            remaining -= pc;
            w += 1;
        }
    }
}

/// An owned bitvector in canonical layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitVector {
    buf: Vec<u64>,
    l: BvLayout,
}

impl BitVector {
    /// Builds from `len` bits packed LSB-first into `words`.
    pub fn from_words(words: &[u64], len: u64) -> Result<Self> {
        if words.len() as u64 != len.div_ceil(64) {
            return Err(Error::invalid(format!(
                "{} words cannot hold exactly {len} bits",
                words.len()
            )));
        }
        let mut data = words.to_vec();
        if !len.is_multiple_of(64) {
            *data.last_mut().unwrap() &= (1u64 << (len % 64)) - 1;
        }
        let mut buf = Vec::new();
        let l = encode_section(&data, len, &mut buf);
        Ok(Self { buf, l })
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let b: BitBuf = bits.into_iter().collect();
        Self::from(&b)
    }

    pub fn view(&self) -> BitVectorView<'_> {
        BitVectorView::new(&self.buf, self.l)
    }

    pub fn len(&self) -> u64 {
        self.l.len
    }

    pub fn is_empty(&self) -> bool {
        self.l.len == 0
    }

    pub fn count_ones(&self) -> u64 {
        self.l.ones
    }

    pub fn access(&self, i: u64) -> Result<bool> {
        self.view().access(i)
    }

    pub fn rank1(&self, i: u64) -> Result<u64> {
        self.view().rank1(i)
    }

    pub fn rank0(&self, i: u64) -> Result<u64> {
        self.view().rank0(i)
    }

    pub fn select1(&self, j: u64) -> Result<u64> {
        self.view().select1(j)
    }

    pub fn select0(&self, j: u64) -> Result<u64> {
        self.view().select0(j)
    }

    /// The packed data words (bit `i` at word `(i-1)/64`, bit `(i-1)%64`).
    pub fn data_words(&self) -> &[u64] {
        &self.buf[self.l.data_words()]
    }

    /// Cumulative popcount at each 512-bit superblock boundary.
    pub fn rank_directory(&self) -> &[u64] {
        &self.buf[self.l.dir_at()..self.l.dir_at() + self.l.n_dir()]
    }

    /// Positions of set bits 1, 8193, 16385, ...
    pub fn select1_samples(&self) -> &[u64] {
        &self.buf[self.l.sel1_at()..self.l.sel1_at() + self.l.n_sel1]
    }

    /// Positions of clear bits 1, 8193, 16385, ...
    pub fn select0_samples(&self) -> &[u64] {
        &self.buf[self.l.sel0_at()..self.l.sel0_at() + self.l.n_sel0]
    }

    pub fn size_bytes(&self) -> u64 {
        self.buf.len() as u64 * 8
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        layout::words_to_bytes(&self.buf)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let buf = layout::bytes_to_words(bytes)?;
        let l = BvLayout::parse(&buf, 0)?;
        if l.total_words() != buf.len() {
            return Err(Error::corrupt("trailing bytes after bitvector"));
        }
        Ok(Self { buf, l })
    }
}

impl From<&BitBuf> for BitVector {
    fn from(b: &BitBuf) -> Self {
        let mut buf = Vec::new();
        let l = encode_section(&b.words, b.len, &mut buf);
        Self { buf, l }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::TouchTrace;
    use proptest::prelude::*;

    fn bits(s: &str) -> BitVector {
        BitVector::from_bits(s.chars().map(|c| c == '1'))
    }

    struct Naive(Vec<bool>);

    impl Naive {
        fn rank(&self, bit: bool, i: u64) -> u64 {
            self.0[..i as usize].iter().filter(|&&b| b == bit).count() as u64
        }
        fn select(&self, bit: bool, j: u64) -> Option<u64> {
            self.0
                .iter()
                .enumerate()
                .filter(|(_, &b)| b == bit)
                .nth(j as usize - 1)
                .map(|(p, _)| p as u64 + 1)
        }
    }

    #[test]
    fn empty_vector() {
        let bv = BitVector::from_bits([]);
        assert_eq!(bv.len(), 0);
        assert_eq!(bv.rank1(0).unwrap(), 0);
        assert!(matches!(bv.access(1), Err(Error::OutOfRange { .. })));
        assert!(matches!(bv.rank1(1), Err(Error::OutOfRange { .. })));
        assert!(matches!(bv.select1(1), Err(Error::NotFound { .. })));
        assert!(matches!(bv.select0(1), Err(Error::NotFound { .. })));
        assert_eq!(bv.rank_directory(), &[0]);
    }

    #[test]
    fn packs_lsb_first() {
        let bv = bits("10110");
        assert_eq!(bv.len(), 5);
        assert_eq!(bv.data_words(), &[0b01101]);
    }

    #[test]
    fn small_queries() {
        let bv = bits("10110");
        assert!(bv.access(1).unwrap());
        assert!(!bv.access(2).unwrap());
        assert!(bv.access(6).is_err());
        assert!(bv.access(0).is_err());
        assert_eq!(bv.rank1(0).unwrap(), 0);
        assert_eq!(bv.rank1(3).unwrap(), 2);
        assert_eq!(bv.rank1(5).unwrap(), 3);
        assert_eq!(bv.rank0(5).unwrap(), 2);
        assert!(bv.rank1(6).is_err());
        assert_eq!(bv.select1(2).unwrap(), 3);
        assert!(matches!(bv.select1(4), Err(Error::NotFound { .. })));
        assert!(bv.select1(0).is_err());
        assert_eq!(bv.select0(1).unwrap(), 2);
        assert_eq!(bv.select0(2).unwrap(), 5);
    }

    #[test]
    fn rank_directory_counts_superblocks() {
        let bv = BitVector::from_bits(std::iter::repeat_n(true, 600));
        assert_eq!(bv.rank_directory(), &[0, 512]);
        assert_eq!(bv.select1_samples(), &[1]);
        assert!(bv.select0_samples().is_empty());
    }

    #[test]
    fn select_samples_every_8192nd() {
        let n = 3 * 8192 + 10;
        let bv = BitVector::from_bits((0..n).map(|i| i % 2 == 0));
        assert_eq!(bv.select1_samples(), &[1, 16385]);
        assert_eq!(bv.select0_samples(), &[2, 16386]);
        for j in [1, 8192, 8193, 8194, 12000, (n as u64).div_ceil(2)] {
            assert_eq!(bv.select1(j).unwrap(), 2 * j - 1);
        }
    }

    #[test]
    fn sparse_vector_select_crosses_many_superblocks() {
        let n = 200_000u64;
        let bv = BitVector::from_bits((0..n).map(|i| i % 5000 == 4999));
        for j in 1..=bv.count_ones() {
            assert_eq!(bv.select1(j).unwrap(), j * 5000);
        }
        assert_eq!(bv.select0(1).unwrap(), 1);
        assert_eq!(bv.select0(4999).unwrap(), 4999);
        assert_eq!(bv.select0(5000).unwrap(), 5001);
    }

    #[test]
    fn from_words_masks_padding() {
        let bv = BitVector::from_words(&[u64::MAX], 3).unwrap();
        assert_eq!(bv.count_ones(), 3);
        assert_eq!(bv.data_words(), &[0b111]);
        assert!(BitVector::from_words(&[0, 0], 64).is_err());
    }

    #[test]
    fn serialization_layout() {
        let bv = bits("10110");
        let bytes = bv.to_bytes();
        assert_eq!(&bytes[..4], b"WFBV");
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 5);
        // header, 1 data word, 1 directory entry, 2 select sections with one sample each
        assert_eq!(bytes.len(), 8 * (2 + 1 + 1 + 2 + 2));
        assert_eq!(bytes.len() as u64, bv.size_bytes());
        let back = BitVector::from_bytes(&bytes).unwrap();
        assert_eq!(back, bv);
        assert_eq!(back.to_bytes(), bytes);
    }

    #[test]
    fn rejects_corrupt_bytes() {
        let bv = BitVector::from_bits((0..1000).map(|i| i % 3 == 0));
        let good = bv.to_bytes();
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(BitVector::from_bytes(&bad), Err(Error::Corrupt(_))));
        assert!(BitVector::from_bytes(&good[..good.len() - 8]).is_err());
        assert!(BitVector::from_bytes(&good[..good.len() - 3]).is_err());
        let mut bad = good.clone();
        bad[16] ^= 0x02; // flip a data bit so the directory no longer matches
        assert!(BitVector::from_bytes(&bad).is_err());
    }

    #[test]
    fn probed_rank_matches_and_touches_directory_first() {
        let bv = BitVector::from_bits((0..2000).map(|i| i % 7 < 3));
        let v = bv.view();
        let mut t = TouchTrace::new();
        let r = v.rank_raw(true, 1300, &mut t);
        assert_eq!(r, bv.rank1(1300).unwrap());
        // directory entry for superblock 2, then words 16..20 of the data section
        let dir_at = 2 + 32 + 2;
        assert_eq!(t.offsets[0], 8 * dir_at as u64);
        assert_eq!(
            t.offsets[1..],
            [(2 + 16) * 8, (2 + 17) * 8, (2 + 18) * 8, (2 + 19) * 8, (2 + 20) * 8]
        );
        let mut t = TouchTrace::new();
        assert_eq!(v.rank_raw(true, 0, &mut t), 0);
    }

    fn check_against_naive(bits: Vec<bool>) {
        let naive = Naive(bits.clone());
        let bv = BitVector::from_bits(bits.iter().copied());
        let v = bv.view();
        let n = bits.len() as u64;
        let ones = naive.rank(true, n);
        assert_eq!(bv.count_ones(), ones);
        for i in 0..=n {
            let r1 = bv.rank1(i).unwrap();
            assert_eq!(r1, naive.rank(true, i));
            assert_eq!(r1 + bv.rank0(i).unwrap(), i);
            if i >= 1 {
                assert_eq!(bv.access(i).unwrap(), bits[i as usize - 1]);
                let (b, r) = v.access_rank_raw(i, &mut NoProbe);
                assert_eq!(b, bits[i as usize - 1]);
                assert_eq!(r, naive.rank(b, i));
            }
        }
        for j in 1..=ones {
            let p = bv.select1(j).unwrap();
            assert_eq!(Some(p), naive.select(true, j));
            assert_eq!(bv.rank1(p).unwrap(), j);
        }
        for j in 1..=(n - ones) {
            assert_eq!(Some(bv.select0(j).unwrap()), naive.select(false, j));
        }
        assert!(bv.select1(ones + 1).is_err());
        assert!(bv.select0(n - ones + 1).is_err());
    }

    #[test]
    fn random_vectors_match_linear_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for &(n, density) in &[(100_000usize, 0.5), (100_000, 0.01), (100_000, 0.99), (70_000, 0.2)] {
            let bits: Vec<bool> = (0..n).map(|_| rng.gen_bool(density)).collect();
            check_against_naive(bits);
        }
    }

    proptest! {
        #[test]
        fn prop_matches_naive(bits in proptest::collection::vec(any::<bool>(), 0..3000)) {
            check_against_naive(bits);
        }

        #[test]
        fn prop_rank_monotone(bits in proptest::collection::vec(any::<bool>(), 1..2000)) {
            let bv = BitVector::from_bits(bits.iter().copied());
            let mut prev = 0;
            for i in 0..=bv.len() {
                let r = bv.rank1(i).unwrap();
                prop_assert!(r == prev || r == prev + 1);
                prev = r;
            }
        }

        #[test]
        fn prop_bytes_roundtrip(bits in proptest::collection::vec(any::<bool>(), 0..20_000)) {
            let bv = BitVector::from_bits(bits.iter().copied());
            let bytes = bv.to_bytes();
            prop_assert_eq!(BitVector::from_bytes(&bytes).unwrap().to_bytes(), bytes);
        }
    }
}
