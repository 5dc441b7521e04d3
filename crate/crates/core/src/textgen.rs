//! Deterministic pseudo-random datasets and their symbol interpretations.
//!
//! Bytes come from the splitmix64 stream, so a `(seed, length)` pair names a
//! dataset exactly on every platform. The same bytes can be read as 1-, 2-,
//! 3-, 4- or 8-bit symbols.

use std::io::{self, Write};

use crate::alphabet::AlphabetBits;
use crate::error::{Error, Result};

/// The splitmix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..bound` as `⌊u · bound / 2^64⌋`.
    #[inline]
    pub fn next_below(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}

/// Raw pseudo-random bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub raw: Vec<u8>,
    pub seed: u64,
}

impl Dataset {
    pub fn n_bytes(&self) -> usize {
        self.raw.len()
    }
}

/// `n_bytes` bytes of the splitmix64 stream for `seed`, each output word
/// emitted little-endian and the last one truncated.
pub fn gen_bytes(seed: u64, n_bytes: usize) -> Dataset {
    let mut raw = Vec::with_capacity(n_bytes);
    let mut rng = SplitMix64::new(seed);
    while raw.len() < n_bytes {
        let word = rng.next_u64().to_le_bytes();
        let take = (n_bytes - raw.len()).min(8);
        raw.extend_from_slice(&word[..take]);
    }
    Dataset { raw, seed }
}

/// Streams the same bytes as [`gen_bytes`] into `out`.
pub fn write_bytes<W: Write>(seed: u64, n_bytes: u64, out: &mut W) -> io::Result<()> {
    const CHUNK_WORDS: u64 = 1 << 13;
    let mut rng = SplitMix64::new(seed);
    let mut left = n_bytes;
    let mut chunk = Vec::with_capacity(CHUNK_WORDS as usize * 8);
    while left > 0 {
        chunk.clear();
        while left > 0 && chunk.len() < chunk.capacity() {
            let word = rng.next_u64().to_le_bytes();
            let take = left.min(8) as usize;
            chunk.extend_from_slice(&word[..take]);
            left -= take as u64;
        }
        out.write_all(&chunk)?;
    }
    Ok(())
}

/// A byte stream read as fixed-width symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    pub symbols: Vec<u8>,
    pub alphabet: AlphabetBits,
}

impl SymbolSequence {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Reads consecutive `alphabet`-bit groups, bytes in order and bits within a
/// byte least significant first. Bits left over at the end are dropped.
pub fn reinterpret(raw: &[u8], alphabet: AlphabetBits) -> SymbolSequence {
    let width = alphabet.get() as u32;
    let n = raw.len() * 8 / width as usize;
    let mask = (1u32 << width) - 1;
    let symbols = if 8 % width == 0 {
        let per_byte = 8 / width;
        raw.iter()
            .flat_map(|&b| (0..per_byte).map(move |k| ((b as u32 >> (k * width)) & mask) as u8))
            .collect()
    } else {
        let mut out = Vec::with_capacity(n);
        let mut acc = 0u32;
        let mut held = 0u32;
        for &b in raw {
            acc |= (b as u32) << held;
            held += 8;
            while held >= width {
                out.push((acc & mask) as u8);
                acc >>= width;
                held -= width;
            }
        }
        out
    };
    debug_assert_eq!(symbols.len(), n);
    SymbolSequence { symbols, alphabet }
}

/// Inverse of [`reinterpret`] for widths dividing 8.
pub fn pack_symbols(seq: &SymbolSequence) -> Result<Vec<u8>> {
    let width = seq.alphabet.get() as usize;
    if 8 % width != 0 {
        return Err(Error::invalid(format!(
            "cannot pack {width}-bit symbols into whole bytes"
        )));
    }
    let per_byte = 8 / width;
    Ok(seq
        .symbols
        .chunks(per_byte)
        .map(|g| g.iter().enumerate().fold(0u8, |b, (k, &s)| b | (s << (k * width))))
        .collect())
}

/// `count` pseudo-random 1-based positions in a text of length `n`.
pub fn gen_query_positions(seed: u64, count: usize, n: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::invalid("query positions over an empty text"));
    }
    let mut rng = SplitMix64::new(seed);
    Ok((0..count).map(|_| (rng.next_below(n) + 1).clamp(1, n)).collect())
}

/// Salt separating the symbol stream of rank queries from the position stream.
const RANK_SYMBOL_SALT: u64 = 0x5241_4E4B_5359_4D42;

/// `count` `(symbol, position)` rank queries: positions from
/// [`gen_query_positions`], symbols uniform over the alphabet from a second
/// splitmix64 stream seeded with `seed ^ RANK_SYMBOL_SALT`.
pub fn gen_rank_queries(seed: u64, count: usize, n: u64, alphabet: AlphabetBits) -> Result<Vec<(u8, u64)>> {
    let positions = gen_query_positions(seed, count, n)?;
    let mut rng = SplitMix64::new(seed ^ RANK_SYMBOL_SALT);
    Ok(positions
        .into_iter()
        .map(|p| (rng.next_below(alphabet.sigma() as u64) as u8, p))
        .collect())
}

/// Salt for the pattern symbol stream.
const PATTERN_SALT: u64 = 0x5041_5454_4552_4E53;

/// `count` patterns of `len` symbols drawn uniformly from the alphabet.
pub fn gen_patterns(seed: u64, count: usize, len: usize, alphabet: AlphabetBits) -> Result<Vec<Vec<u8>>> {
    if len == 0 {
        return Err(Error::invalid("pattern length must be at least 1"));
    }
    let mut rng = SplitMix64::new(seed ^ PATTERN_SALT);
    let sigma = alphabet.sigma() as u64;
    Ok((0..count)
        .map(|_| (0..len).map(|_| rng.next_below(sigma) as u8).collect())
        .collect())
}
