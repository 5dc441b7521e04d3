//! The query interface shared by wavelet trees and forests.

use std::path::Path;

use crate::alphabet::AlphabetBits;
use crate::error::{Error, Result};
use crate::probe::{NoProbe, Probe};
use crate::wforest::{self, WaveletForest};
use crate::wtree::{self, WaveletTree};

/// access/rank/select over a symbol sequence, with 1-based positions.
///
/// The `*_probed` variants report every word they read to a [`Probe`]; the
/// plain variants run the same code with a no-op probe.
pub trait SequenceIndex {
    fn len(&self) -> u64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn alphabet(&self) -> AlphabetBits;

    /// Total occurrences of `c`.
    fn count(&self, c: u8) -> u64;

    /// Size of the canonical layout in bytes.
    fn size_bytes(&self) -> u64;

    fn access_probed<P: Probe>(&self, i: u64, probe: &mut P) -> Result<u8>;

    fn rank_probed<P: Probe>(&self, c: u8, i: u64, probe: &mut P) -> Result<u64>;

    fn select_probed<P: Probe>(&self, c: u8, j: u64, probe: &mut P) -> Result<u64>;

    fn access(&self, i: u64) -> Result<u8> {
        self.access_probed(i, &mut NoProbe)
    }

    fn rank(&self, c: u8, i: u64) -> Result<u64> {
        self.rank_probed(c, i, &mut NoProbe)
    }

    fn select(&self, c: u8, j: u64) -> Result<u64> {
        self.select_probed(c, j, &mut NoProbe)
    }
}

/// A structure whose canonical layout can be embedded in a larger file.
pub trait Section: Sized {
    fn section_words(&self) -> &[u64];

    fn from_section_words(words: Vec<u64>) -> Result<Self>;
}

impl Section for WaveletTree {
    fn section_words(&self) -> &[u64] {
        self.words()
    }

    fn from_section_words(words: Vec<u64>) -> Result<Self> {
        Self::from_words(words)
    }
}

impl Section for WaveletForest {
    fn section_words(&self) -> &[u64] {
        self.words()
    }

    fn from_section_words(words: Vec<u64>) -> Result<Self> {
        Self::from_words(words)
    }
}

impl Section for Structure {
    fn section_words(&self) -> &[u64] {
        self.words()
    }

    fn from_section_words(words: Vec<u64>) -> Result<Self> {
        Self::from_words(words)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StructureKind {
    Tree,
    Forest,
}

impl StructureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StructureKind::Tree => "tree",
            StructureKind::Forest => "forest",
        }
    }
}

impl std::fmt::Display for StructureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Either structure, as loaded from a file.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Structure {
    Tree(WaveletTree),
    Forest(WaveletForest),
}

impl Structure {
    pub fn kind(&self) -> StructureKind {
        match self {
            Structure::Tree(_) => StructureKind::Tree,
            Structure::Forest(_) => StructureKind::Forest,
        }
    }

    /// Raw-data bytes per forest block, 0 for a tree.
    pub fn block_bytes(&self) -> u64 {
        match self {
            Structure::Tree(_) => 0,
            Structure::Forest(f) => f.block_bytes(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            Structure::Tree(t) => t.to_bytes(),
            Structure::Forest(f) => f.to_bytes(),
        }
    }

    /// Loads a "WFWT" or "WFWF" file, dispatching on its magic.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        match bytes.get(..4) {
            Some(m) if m == wtree::MAGIC => WaveletTree::from_bytes(bytes).map(Structure::Tree),
            Some(m) if m == wforest::MAGIC => WaveletForest::from_bytes(bytes).map(Structure::Forest),
            _ => Err(Error::corrupt("not a wavelet tree or forest file")),
        }
    }

    pub(crate) fn from_words(words: Vec<u64>) -> Result<Self> {
        match words.first().map(|w| &w.to_le_bytes()[..4] == wtree::MAGIC) {
            Some(true) => WaveletTree::from_words(words).map(Structure::Tree),
            _ => WaveletForest::from_words(words).map(Structure::Forest),
        }
    }

    pub(crate) fn words(&self) -> &[u64] {
        match self {
            Structure::Tree(t) => t.words(),
            Structure::Forest(f) => f.words(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }
}

impl From<WaveletTree> for Structure {
    fn from(t: WaveletTree) -> Self {
        Structure::Tree(t)
    }
}

impl From<WaveletForest> for Structure {
    fn from(f: WaveletForest) -> Self {
        Structure::Forest(f)
    }
}

macro_rules! dispatch {
    ($self:ident, $s:ident => $e:expr) => {
        match $self {
            Structure::Tree($s) => $e,
            Structure::Forest($s) => $e,
        }
    };
}

impl SequenceIndex for Structure {
    fn len(&self) -> u64 {
        dispatch!(self, s => SequenceIndex::len(s))
    }

    fn alphabet(&self) -> AlphabetBits {
        dispatch!(self, s => SequenceIndex::alphabet(s))
    }

    fn count(&self, c: u8) -> u64 {
        dispatch!(self, s => SequenceIndex::count(s, c))
    }

    fn size_bytes(&self) -> u64 {
        dispatch!(self, s => SequenceIndex::size_bytes(s))
    }

    #[inline]
    fn access_probed<P: Probe>(&self, i: u64, probe: &mut P) -> Result<u8> {
        dispatch!(self, s => s.access_probed(i, probe))
    }

    #[inline]
    fn rank_probed<P: Probe>(&self, c: u8, i: u64, probe: &mut P) -> Result<u64> {
        dispatch!(self, s => s.rank_probed(c, i, probe))
    }

    fn select_probed<P: Probe>(&self, c: u8, j: u64, probe: &mut P) -> Result<u64> {
        dispatch!(self, s => s.select_probed(c, j, probe))
    }
}
