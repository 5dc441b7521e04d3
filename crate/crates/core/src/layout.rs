//! Shared helpers for the canonical serialized layout.
//!
//! Every structure serializes to a sequence of 64-bit little-endian words and
//! keeps exactly that sequence in memory, so a word index `w` in a structure's
//! buffer is byte offset `8 * w` in its file.

use crate::error::{Error, Result};

pub(crate) const FORMAT_VERSION: u8 = 1;

/// Packs a 4-byte magic and two single-byte fields into one header word.
pub(crate) const fn tag_word(magic: &[u8; 4], version: u8, extra: u8) -> u64 {
    u64::from_le_bytes([magic[0], magic[1], magic[2], magic[3], version, extra, 0, 0])
}

pub(crate) fn check_tag(word: u64, magic: &[u8; 4]) -> Result<(u8, u8)> {
    let b = word.to_le_bytes();
    if &b[..4] != magic {
        return Err(Error::corrupt(format!(
            "expected magic {:?}, found {:?}",
            String::from_utf8_lossy(magic),
            String::from_utf8_lossy(&b[..4])
        )));
    }
    if b[6] != 0 || b[7] != 0 {
        return Err(Error::corrupt("nonzero padding in header word"));
    }
    Ok((b[4], b[5]))
}

pub(crate) fn words_to_bytes(words: &[u64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(words.len() * 8);
    for w in words {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out
}

pub(crate) fn bytes_to_words(bytes: &[u8]) -> Result<Vec<u64>> {
    if !bytes.len().is_multiple_of(8) {
        return Err(Error::corrupt(format!("length {} is not a multiple of 8", bytes.len())));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

/// Reads `buf[at]`, failing with a corrupt-data error past the end.
pub(crate) fn word(buf: &[u64], at: usize) -> Result<u64> {
    buf.get(at)
        .copied()
        .ok_or_else(|| Error::corrupt(format!("truncated at word {at}")))
}

pub(crate) fn to_index(v: u64, what: &str) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::corrupt(format!("{what} {v} does not fit in memory")))
}
