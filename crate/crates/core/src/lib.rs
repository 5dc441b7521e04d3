//! Wavelet trees and wavelet forests over rank/select bitvectors.
//!
//! A [`WaveletTree`] is Huffman-shaped over the whole text. A
//! [`WaveletForest`] splits the text into fixed-length blocks, gives each
//! block its own tree and stores per-block cumulative symbol counts, so each
//! query stays inside one block's bytes. Both answer access/rank/select
//! through [`SequenceIndex`], and both can report the byte offsets a query
//! reads via a [`Probe`].

mod alphabet;
mod error;
mod layout;
mod probe;
mod sequence;

pub mod bench;
pub mod bitvec;
pub mod fmindex;
pub mod huffman;
pub mod textgen;
pub mod wforest;
pub mod wtree;

pub use alphabet::AlphabetBits;
pub use bitvec::{BitBuf, BitVector, BitVectorView};
pub use error::{Error, Result};
pub use fmindex::{build_bwt, Bwt, FmIndex};
pub use huffman::{empirical_entropy_h0, Code, CodeTable, Histogram};
pub use probe::{NoProbe, Probe, TouchCounter, TouchTrace};
pub use sequence::{Section, SequenceIndex, Structure, StructureKind};
pub use wforest::WaveletForest;
pub use wtree::WaveletTree;
