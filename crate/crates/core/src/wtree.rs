//! Huffman-shaped wavelet trees.
//!
//! The tree's shape is the canonical Huffman code of the text's histogram:
//! code bit 0 routes left, bit 1 routes right. Internal nodes are numbered in
//! breadth-first order and their bitvectors are stored back to back in one
//! buffer, which is also the serialized form:
//!
//! ```text
//! word 0        "WFWT", version, alphabet bits
//! word 1        n
//! code table    count, then (symbol, length) pairs in (length, symbol) order
//! node count    m
//! m words       byte offset of each node's bitvector section
//! m sections    node bitvectors in breadth-first order
//! ```
//!
//! Node offsets and trace offsets are relative to the start of this section.

use std::collections::VecDeque;
use std::ops::Range;

use crate::alphabet::AlphabetBits;
use crate::bitvec::{encode_section, BitBuf, BitVectorView, BvLayout};
use crate::error::{Error, Result};
use crate::huffman::{CodeTable, Histogram};
use crate::layout::{self, tag_word, word, FORMAT_VERSION};
use crate::probe::{NoProbe, Probe};
use crate::sequence::SequenceIndex;

pub(crate) const MAGIC: &[u8; 4] = b"WFWT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Child {
    Node(u32),
    /// Leaf holding the symbol with this code-table slot.
    Leaf(u16),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    bv: BvLayout,
    children: [Child; 2],
    parent: Option<(u32, bool)>,
}

/// Node topology implied by a complete prefix code.
struct Topology {
    children: Vec<[Child; 2]>,
    parents: Vec<Option<(u32, bool)>>,
    /// Parent node and side of each slot's leaf.
    leaf_parent: Vec<(u32, bool)>,
}

fn topology(table: &CodeTable) -> Topology {
    let k = table.sigma_effective();
    let mut topo = Topology {
        children: Vec::new(),
        parents: Vec::new(),
        leaf_parent: Vec::new(),
    };
    if k < 2 {
        return topo;
    }
    let codes = table.codes();
    topo.leaf_parent = vec![(0, false); k];
    topo.children.push([Child::Leaf(0); 2]);
    topo.parents.push(None);
    let mut queue = VecDeque::from([(0u32, 0u8, (0..k).collect::<Vec<usize>>())]);
    while let Some((id, depth, slots)) = queue.pop_front() {
        let (right, left): (Vec<usize>, Vec<usize>) = slots.into_iter().partition(|&s| codes[s].bit(depth));
        for (side, group) in [(false, left), (true, right)] {
            // A complete code never leaves a side empty.
            debug_assert!(!group.is_empty());
            let child = if group.len() == 1 {
                topo.leaf_parent[group[0]] = (id, side);
                Child::Leaf(group[0] as u16)
            } else {
                let cid = topo.children.len() as u32;
                topo.children.push([Child::Leaf(0); 2]);
                topo.parents.push(Some((id, side)));
                queue.push_back((cid, depth + 1, group));
                Child::Node(cid)
            };
            topo.children[id as usize][side as usize] = child;
        }
    }
    topo
}

/// Query-side description of one tree section. Offsets are relative to the
/// section start so the same shape works standalone or inside a forest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct TreeShape {
    alphabet: AlphabetBits,
    n: u64,
    table: CodeTable,
    nodes: Vec<Node>,
    /// Occurrences per code-table slot.
    counts: Vec<u64>,
    leaf_parent: Vec<(u32, bool)>,
    data_at: usize,
    section_words: usize,
}

/// Appends a tree section for `text` to `out`.
pub(crate) fn encode_tree(text: &[u8], alphabet: AlphabetBits, out: &mut Vec<u64>) -> Result<()> {
    if let Some(p) = text.iter().position(|&s| !alphabet.contains(s)) {
        return Err(Error::invalid(format!(
            "symbol {} at position {} does not fit in {alphabet} bits",
            text[p],
            p + 1
        )));
    }
    let n = text.len() as u64;
    let hist = Histogram::of(text);
    let table = if text.is_empty() {
        CodeTable::from_lengths(&[], 0)?
    } else {
        CodeTable::build(&hist)?
    };
    let topo = topology(&table);

    // Root-to-leaf (node, bit) path of every symbol.
    let mut paths: Vec<Vec<(u32, bool)>> = vec![Vec::new(); 256];
    let mut node_len = vec![0u64; topo.children.len()];
    if !topo.children.is_empty() {
        for (slot, (&sym, code)) in table.symbols().iter().zip(table.codes()).enumerate() {
            let mut node = 0u32;
            for d in 0..code.len {
                let bit = code.bit(d);
                paths[sym as usize].push((node, bit));
                node_len[node as usize] += hist.get(sym);
                if let Child::Node(c) = topo.children[node as usize][bit as usize] {
                    node = c;
                } else {
                    debug_assert_eq!(d + 1, code.len);
                    debug_assert_eq!(topo.leaf_parent[slot], (node, bit));
                }
            }
        }
    }
    let mut bits: Vec<BitBuf> = node_len.iter().map(|&l| BitBuf::with_capacity(l)).collect();
    if !bits.is_empty() {
        for &s in text {
            for &(node, bit) in &paths[s as usize] {
                bits[node as usize].push(bit);
            }
        }
    }

    let base = out.len();
    out.push(tag_word(MAGIC, FORMAT_VERSION, alphabet.get()));
    out.push(n);
    table.write_words(out);
    out.push(bits.len() as u64);
    let offsets_at = out.len();
    out.resize(offsets_at + bits.len(), 0);
    for (k, b) in bits.iter().enumerate() {
        out[offsets_at + k] = ((out.len() - base) * 8) as u64;
        encode_section(b.words(), b.len(), out);
    }
    Ok(())
}

impl TreeShape {
    /// Parses and validates the tree section starting at `buf[base]`.
    pub(crate) fn parse(buf: &[u64], base: usize) -> Result<Self> {
        let (version, bits) = layout::check_tag(word(buf, base)?, MAGIC)?;
        if version != FORMAT_VERSION {
            return Err(Error::corrupt(format!("unsupported tree version {version}")));
        }
        let alphabet = AlphabetBits::new(bits).map_err(|e| Error::corrupt(e.to_string()))?;
        let n = word(buf, base + 1)?;
        let (table, mut at) = CodeTable::read_words(buf, base + 2, n)?;
        if table.symbols().iter().any(|&s| !alphabet.contains(s)) {
            return Err(Error::corrupt("code table symbol outside the alphabet"));
        }
        if (n == 0) != (table.sigma_effective() == 0) {
            return Err(Error::corrupt("code table does not match text length"));
        }
        let topo = topology(&table);
        let m = word(buf, at)?;
        if m != topo.children.len() as u64 {
            return Err(Error::corrupt(format!(
                "expected {} nodes, found {m}",
                topo.children.len()
            )));
        }
        at += 1;
        let offsets_at = at;
        at += m as usize;
        let data_at = at;
        let mut nodes = Vec::with_capacity(m as usize);
        for k in 0..m as usize {
            if word(buf, offsets_at + k)? != ((at - base) * 8) as u64 {
                return Err(Error::corrupt(format!("node {k} offset mismatch")));
            }
            let l = BvLayout::parse(buf, at)?;
            at += l.total_words();
            nodes.push(Node {
                bv: l.rebased(l.base - base),
                children: topo.children[k],
                parent: topo.parents[k],
            });
        }
        if let Some(root) = nodes.first() {
            if root.bv.len != n {
                return Err(Error::corrupt("root length differs from n"));
            }
        }
        for (k, node) in nodes.iter().enumerate() {
            if let Some((p, side)) = node.parent {
                if node.bv.len != nodes[p as usize].bv.count(side) {
                    return Err(Error::corrupt(format!("node {k} length mismatch")));
                }
            }
        }
        let counts: Vec<u64> = match table.sigma_effective() {
            0 => Vec::new(),
            1 => vec![n],
            _ => topo
                .leaf_parent
                .iter()
                .map(|&(p, side)| nodes[p as usize].bv.count(side))
                .collect(),
        };
        if counts.contains(&0) {
            return Err(Error::corrupt("code for a symbol that never occurs"));
        }
        Ok(Self {
            alphabet,
            n,
            table,
            nodes,
            counts,
            leaf_parent: topo.leaf_parent,
            data_at: data_at - base,
            section_words: at - base,
        })
    }

    pub(crate) fn len(&self) -> u64 {
        self.n
    }

    pub(crate) fn alphabet(&self) -> AlphabetBits {
        self.alphabet
    }

    pub(crate) fn slot(&self, c: u8) -> Option<usize> {
        self.table.slot(c)
    }

    pub(crate) fn section_words(&self) -> usize {
        self.section_words
    }

    pub(crate) fn count(&self, c: u8) -> u64 {
        self.table.slot(c).map_or(0, |k| self.counts[k])
    }

    pub(crate) fn histogram(&self) -> Histogram {
        self.table
            .symbols()
            .iter()
            .zip(&self.counts)
            .map(|(&s, &c)| (s, c))
            .collect()
    }
}

/// A tree section inside some word buffer.
#[derive(Clone, Copy)]
pub(crate) struct TreeRef<'a> {
    pub buf: &'a [u64],
    pub base: usize,
    pub shape: &'a TreeShape,
}

impl<'a> TreeRef<'a> {
    #[inline]
    fn bv(&self, node: u32) -> BitVectorView<'a> {
        let l = self.shape.nodes[node as usize].bv;
        BitVectorView::new(self.buf, l.rebased(self.base + l.base))
    }

    /// Symbol at `i`. Requires `1 <= i <= n`.
    #[inline]
    pub fn access_raw<P: Probe>(&self, i: u64, probe: &mut P) -> u8 {
        let shape = self.shape;
        if shape.nodes.is_empty() {
            return shape.table.symbols()[0];
        }
        let mut node = 0u32;
        let mut pos = i;
        loop {
            let (bit, r) = self.bv(node).access_rank_raw(pos, probe);
            match shape.nodes[node as usize].children[bit as usize] {
                Child::Leaf(slot) => return shape.table.symbols()[slot as usize],
                Child::Node(c) => {
                    node = c;
                    pos = r;
                }
            }
        }
    }

    /// Occurrences of `c` in `1..=i`. Requires `i <= n`.
    #[inline]
    pub fn rank_raw<P: Probe>(&self, c: u8, i: u64, probe: &mut P) -> u64 {
        let shape = self.shape;
        let Some(slot) = shape.table.slot(c) else {
            return 0;
        };
        if i == 0 || shape.nodes.is_empty() {
            return i;
        }
        let code = shape.table.codes()[slot];
        let mut node = 0u32;
        let mut pos = i;
        for d in 0..code.len {
            let bit = code.bit(d);
            pos = self.bv(node).rank_raw(bit, pos, probe);
            if pos == 0 {
                return 0;
            }
            if let Child::Node(next) = shape.nodes[node as usize].children[bit as usize] {
                node = next;
            }
        }
        pos
    }

    /// Position of the `j`-th `c`. Requires `1 <= j <= count(c)`.
    pub fn select_raw<P: Probe>(&self, slot: usize, j: u64, probe: &mut P) -> u64 {
        let shape = self.shape;
        if shape.nodes.is_empty() {
            return j;
        }
        let (mut node, mut bit) = shape.leaf_parent[slot];
        let mut pos = j;
        loop {
            pos = self.bv(node).select_raw(bit, pos, probe);
            match shape.nodes[node as usize].parent {
                Some((p, b)) => {
                    node = p;
                    bit = b;
                }
                None => return pos,
            }
        }
    }

    pub fn access<P: Probe>(&self, i: u64, probe: &mut P) -> Result<u8> {
        if i == 0 || i > self.shape.n {
            return Err(Error::range(i, 1, self.shape.n));
        }
        Ok(self.access_raw(i, probe))
    }

    pub fn rank<P: Probe>(&self, c: u8, i: u64, probe: &mut P) -> Result<u64> {
        if i > self.shape.n {
            return Err(Error::range(i, 0, self.shape.n));
        }
        Ok(self.rank_raw(c, i, probe))
    }

    pub fn select<P: Probe>(&self, c: u8, j: u64, probe: &mut P) -> Result<u64> {
        let available = self.shape.count(c);
        match self.shape.table.slot(c) {
            Some(slot) if j >= 1 && j <= available => Ok(self.select_raw(slot, j, probe)),
            _ => Err(Error::NotFound {
                what: format!("symbol {c}"),
                ordinal: j,
                available,
            }),
        }
    }
}

/// A Huffman-shaped wavelet tree over a byte-symbol text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveletTree {
    buf: Vec<u64>,
    shape: TreeShape,
}

impl WaveletTree {
    /// Builds the tree for `text`; every symbol must be below `2^alphabet`.
    pub fn build(text: &[u8], alphabet: AlphabetBits) -> Result<Self> {
        let mut buf = Vec::new();
        encode_tree(text, alphabet, &mut buf)?;
        let shape = TreeShape::parse(&buf, 0)?;
        Ok(Self { buf, shape })
    }

    fn tree(&self) -> TreeRef<'_> {
        TreeRef {
            buf: &self.buf,
            base: 0,
            shape: &self.shape,
        }
    }

    pub fn len(&self) -> u64 {
        self.shape.n
    }

    pub fn is_empty(&self) -> bool {
        self.shape.n == 0
    }

    pub fn alphabet(&self) -> AlphabetBits {
        self.shape.alphabet
    }

    pub fn code_table(&self) -> &CodeTable {
        &self.shape.table
    }

    pub fn histogram(&self) -> Histogram {
        self.shape.histogram()
    }

    pub fn count(&self, c: u8) -> u64 {
        self.shape.count(c)
    }

    pub fn node_count(&self) -> usize {
        self.shape.nodes.len()
    }

    /// Bitvector of internal node `k` (breadth-first numbering, root is 0).
    pub fn node_bitvector(&self, k: usize) -> BitVectorView<'_> {
        BitVectorView::new(&self.buf, self.shape.nodes[k].bv)
    }

    /// Byte offset of each node's bitvector section.
    pub fn node_offsets(&self) -> Vec<u64> {
        self.shape.nodes.iter().map(|n| n.bv.base as u64 * 8).collect()
    }

    /// Total bits over all node bitvectors.
    pub fn data_bits(&self) -> u64 {
        self.shape.nodes.iter().map(|n| n.bv.len).sum()
    }

    /// Byte range occupied by node bitvector sections.
    pub fn data_extent(&self) -> Range<u64> {
        self.shape.data_at as u64 * 8..self.shape.section_words as u64 * 8
    }

    /// Bytes before the first node section.
    pub fn header_bytes(&self) -> u64 {
        self.shape.data_at as u64 * 8
    }

    pub fn size_bytes(&self) -> u64 {
        self.buf.len() as u64 * 8
    }

    pub fn access(&self, i: u64) -> Result<u8> {
        self.tree().access(i, &mut NoProbe)
    }

    pub fn rank(&self, c: u8, i: u64) -> Result<u64> {
        self.tree().rank(c, i, &mut NoProbe)
    }

    pub fn select(&self, c: u8, j: u64) -> Result<u64> {
        self.tree().select(c, j, &mut NoProbe)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        layout::words_to_bytes(&self.buf)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::from_words(layout::bytes_to_words(bytes)?)
    }

    pub(crate) fn from_words(buf: Vec<u64>) -> Result<Self> {
        let shape = TreeShape::parse(&buf, 0)?;
        if shape.section_words != buf.len() {
            return Err(Error::corrupt("trailing bytes after wavelet tree"));
        }
        Ok(Self { buf, shape })
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.buf
    }
}

impl SequenceIndex for WaveletTree {
    fn len(&self) -> u64 {
        self.shape.n
    }

    fn alphabet(&self) -> AlphabetBits {
        self.shape.alphabet
    }

    fn count(&self, c: u8) -> u64 {
        self.shape.count(c)
    }

    fn size_bytes(&self) -> u64 {
        WaveletTree::size_bytes(self)
    }

    fn access_probed<P: Probe>(&self, i: u64, probe: &mut P) -> Result<u8> {
        self.tree().access(i, probe)
    }

    fn rank_probed<P: Probe>(&self, c: u8, i: u64, probe: &mut P) -> Result<u64> {
        self.tree().rank(c, i, probe)
    }

    fn select_probed<P: Probe>(&self, c: u8, j: u64, probe: &mut P) -> Result<u64> {
        self.tree().select(c, j, probe)
    }
}
