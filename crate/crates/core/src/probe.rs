//! Hooks for recording which words a query reads.
//!
//! Query paths are generic over [`Probe`]. Production calls use [`NoProbe`],
//! which compiles away; the locality profiler passes a [`TouchTrace`].

/// Receives the byte offset of every word a query reads.
pub trait Probe {
    fn touch(&mut self, byte_offset: u64);
}

/// Discards every touch.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoProbe;

impl Probe for NoProbe {
    #[inline(always)]
    fn touch(&mut self, _byte_offset: u64) {}
}

/// Ordered byte offsets, one per word read, into a structure's canonical layout.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct TouchTrace {
    pub offsets: Vec<u64>,
}

impl TouchTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

impl Probe for TouchTrace {
    #[inline]
    fn touch(&mut self, byte_offset: u64) {
        self.offsets.push(byte_offset);
    }
}

/// Counts touches without storing them.
#[derive(Debug, Default, Clone, Copy)]
pub struct TouchCounter(pub u64);

impl Probe for TouchCounter {
    #[inline]
    fn touch(&mut self, _byte_offset: u64) {
        self.0 += 1;
    }
}

#[inline(always)]
pub(crate) fn word_offset(word_index: usize) -> u64 {
    (word_index as u64) * 8
}
