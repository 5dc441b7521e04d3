//! A counting-only FM-index over the BWT, with either wavelet structure as
//! the rank backend.
//!
//! The sentinel is the symbol `2^bits`, smaller than every text symbol. The
//! backend cannot hold it (texts use all `2^bits` values), so the backend
//! stores symbol 0 at the sentinel's row and rank of 0 is corrected using the
//! recorded sentinel row.

use crate::alphabet::AlphabetBits;
use crate::error::{Error, Result};
use crate::layout::{self, tag_word, word, FORMAT_VERSION};
use crate::probe::{NoProbe, Probe};
use crate::sequence::{Section, SequenceIndex};
use crate::wforest::WaveletForest;
use crate::wtree::WaveletTree;

const MAGIC: &[u8; 4] = b"WFFM";
const HEADER_WORDS: usize = 3;

struct Shifted<'a, P> {
    inner: &'a mut P,
    by: u64,
}

impl<P: Probe> Probe for Shifted<'_, P> {
    #[inline]
    fn touch(&mut self, byte_offset: u64) {
        self.inner.touch(byte_offset + self.by);
    }
}

/// Burrows-Wheeler transform of `text` followed by the sentinel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bwt {
    /// Last column of the sorted rotations; the sentinel is `2^bits`.
    pub transformed: Vec<u16>,
    /// Row holding the unrotated text, i.e. the sentinel's position.
    pub primary_index: u64,
    pub alphabet: AlphabetBits,
}

impl Bwt {
    pub fn sentinel(&self) -> u16 {
        self.alphabet.sigma() as u16
    }

    /// The BWT with the sentinel replaced by symbol 0, as stored in a backend.
    pub fn backend_symbols(&self) -> Vec<u8> {
        let sentinel = self.sentinel();
        self.transformed
            .iter()
            .map(|&s| if s == sentinel { 0 } else { s as u8 })
            .collect()
    }

    /// Recovers the text by LF-walking the transform.
    pub fn invert(&self) -> Vec<u8> {
        let len = self.transformed.len();
        let sigma = self.alphabet.sigma() + 1;
        // Sentinel sorts first: map it to 0 and shift the rest up by one.
        let key = |s: u16| if s == self.sentinel() { 0 } else { s as usize + 1 };
        let mut starts = vec![0usize; sigma + 1];
        for &s in &self.transformed {
            starts[key(s) + 1] += 1;
        }
        for c in 0..sigma {
            starts[c + 1] += starts[c];
        }
        let mut seen = vec![0usize; sigma];
        let lf: Vec<usize> = self
            .transformed
            .iter()
            .map(|&s| {
                let k = key(s);
                seen[k] += 1;
                starts[k] + seen[k] - 1
            })
            .collect();
        let mut out = vec![0u8; len.saturating_sub(1)];
        let mut row = 0usize;
        for slot in out.iter_mut().rev() {
            *slot = self.transformed[row] as u8;
            row = lf[row];
        }
        out
    }
}

/// Suffix array of `text` + sentinel by prefix doubling.
fn suffix_array(text: &[u8]) -> Vec<usize> {
    let len = text.len() + 1;
    let mut rank: Vec<usize> = text.iter().map(|&s| s as usize + 1).chain([0]).collect();
    let mut sa: Vec<usize> = (0..len).collect();
    let mut next = vec![0usize; len];
    let mut k = 1;
    loop {
        let key = |i: usize| (rank[i], if i + k < len { rank[i + k] + 1 } else { 0 });
        sa.sort_unstable_by_key(|&i| key(i));
        next[sa[0]] = 0;
        for w in 1..len {
            next[sa[w]] = next[sa[w - 1]] + (key(sa[w]) != key(sa[w - 1])) as usize;
        }
        std::mem::swap(&mut rank, &mut next);
        if rank[sa[len - 1]] == len - 1 || k >= len {
            return sa;
        }
        k *= 2;
    }
}

/// BWT of `text` + sentinel.
pub fn build_bwt(text: &[u8], alphabet: AlphabetBits) -> Result<Bwt> {
    if text.is_empty() {
        return Err(Error::invalid("BWT of an empty text"));
    }
    if let Some(p) = text.iter().position(|&s| !alphabet.contains(s)) {
        return Err(Error::invalid(format!(
            "symbol {} at position {} does not fit in {alphabet} bits",
            text[p],
            p + 1
        )));
    }
    let sentinel = alphabet.sigma() as u16;
    let sa = suffix_array(text);
    let mut primary_index = 0;
    let transformed = sa
        .iter()
        .enumerate()
        .map(|(row, &i)| {
            if i == 0 {
                primary_index = row as u64;
                sentinel
            } else {
                text[i - 1] as u16
            }
        })
        .collect();
    Ok(Bwt {
        transformed,
        primary_index,
        alphabet,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FmIndex<B> {
    backend: B,
    /// `c_array[c]` = BWT symbols smaller than `c` (sentinel included);
    /// the last entry is `n + 1`.
    c_array: Vec<u64>,
    n: u64,
    primary_index: u64,
    alphabet: AlphabetBits,
}

impl FmIndex<WaveletTree> {
    pub fn with_tree(text: &[u8], alphabet: AlphabetBits) -> Result<Self> {
        let bwt = build_bwt(text, alphabet)?;
        let backend = WaveletTree::build(&bwt.backend_symbols(), alphabet)?;
        Self::new(&bwt, backend)
    }
}

impl FmIndex<WaveletForest> {
    pub fn with_forest(text: &[u8], alphabet: AlphabetBits, block_len: u64) -> Result<Self> {
        let bwt = build_bwt(text, alphabet)?;
        let backend = WaveletForest::build(&bwt.backend_symbols(), block_len, alphabet)?;
        Self::new(&bwt, backend)
    }
}

impl<B: SequenceIndex> FmIndex<B> {
    /// Wraps a backend built over [`Bwt::backend_symbols`].
    pub fn new(bwt: &Bwt, backend: B) -> Result<Self> {
        if backend.len() != bwt.transformed.len() as u64 || backend.alphabet() != bwt.alphabet {
            return Err(Error::invalid("backend does not match the BWT"));
        }
        Self::assemble(backend, bwt.primary_index)
    }

    fn assemble(backend: B, primary_index: u64) -> Result<Self> {
        let alphabet = backend.alphabet();
        let len = backend.len();
        if len == 0 || primary_index >= len {
            return Err(Error::invalid("sentinel row outside the BWT"));
        }
        if backend.access(primary_index + 1)? != 0 {
            return Err(Error::invalid(
                "backend does not hold the placeholder at the sentinel row",
            ));
        }
        let mut c_array = Vec::with_capacity(alphabet.sigma() + 1);
        let mut acc = 1u64;
        for c in 0..alphabet.sigma() {
            c_array.push(acc);
            acc += backend.count(c as u8) - (c == 0) as u64;
        }
        c_array.push(acc);
        Ok(Self {
            backend,
            c_array,
            n: len - 1,
            primary_index,
            alphabet,
        })
    }

    pub fn backend(&self) -> &B {
        &self.backend
    }

    /// Indexed text length (the BWT has one more row).
    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn primary_index(&self) -> u64 {
        self.primary_index
    }

    pub fn c_array(&self) -> &[u64] {
        &self.c_array
    }

    /// Occurrences of text symbol `c` in BWT rows `0..i`.
    #[inline]
    fn occ<P: Probe>(&self, c: u8, i: u64, probe: &mut P) -> Result<u64> {
        let r = self.backend.rank_probed(c, i, probe)?;
        Ok(r - (c == 0 && self.primary_index < i) as u64)
    }

    /// Row of the rotation that starts one symbol earlier.
    pub fn lf_step(&self, row: u64) -> Result<u64> {
        if row > self.n {
            return Err(Error::range(row, 0, self.n));
        }
        if row == self.primary_index {
            return Ok(0);
        }
        let c = self.backend.access(row + 1)?;
        Ok(self.c_array[c as usize] + self.occ(c, row + 1, &mut NoProbe)? - 1)
    }

    /// Number of occurrences of `pattern` in the text.
    pub fn count(&self, pattern: &[u8]) -> Result<u64> {
        self.count_probed(pattern, &mut NoProbe)
    }

    /// Bytes before the backend section in the serialized form.
    pub fn header_bytes(&self) -> u64 {
        (HEADER_WORDS + self.c_array.len()) as u64 * 8
    }

    pub fn size_bytes(&self) -> u64 {
        self.header_bytes() + self.backend.size_bytes()
    }

    /// Backward search, two backend rank queries per pattern symbol until the
    /// interval empties. Touches are reported against the serialized
    /// FM-index, so backend offsets are shifted past the header.
    pub fn count_probed<P: Probe>(&self, pattern: &[u8], probe: &mut P) -> Result<u64> {
        if pattern.is_empty() {
            return Err(Error::invalid("empty pattern"));
        }
        let mut shifted = Shifted {
            inner: probe,
            by: self.header_bytes(),
        };
        let (mut lo, mut hi) = (0u64, self.n + 1);
        for &c in pattern.iter().rev() {
            if !self.alphabet.contains(c) {
                return Ok(0);
            }
            shifted.inner.touch(((HEADER_WORDS + c as usize) * 8) as u64);
            let base = self.c_array[c as usize];
            lo = base + self.occ(c, lo, &mut shifted)?;
            hi = base + self.occ(c, hi, &mut shifted)?;
            if lo >= hi {
                return Ok(0);
            }
        }
        Ok(hi - lo)
    }
}

impl<B: SequenceIndex + Section> FmIndex<B> {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = vec![
            tag_word(MAGIC, FORMAT_VERSION, self.alphabet.get()),
            self.n,
            self.primary_index,
        ];
        w.extend_from_slice(&self.c_array);
        w.extend_from_slice(self.backend.section_words());
        layout::words_to_bytes(&w)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let w = layout::bytes_to_words(bytes)?;
        let (version, bits) = layout::check_tag(word(&w, 0)?, MAGIC)?;
        if version != FORMAT_VERSION {
            return Err(Error::corrupt(format!("unsupported FM-index version {version}")));
        }
        let alphabet = AlphabetBits::new(bits).map_err(|e| Error::corrupt(e.to_string()))?;
        let n = word(&w, 1)?;
        let primary_index = word(&w, 2)?;
        let backend_at = HEADER_WORDS + alphabet.sigma() + 1;
        if w.len() < backend_at {
            return Err(Error::corrupt("FM-index truncated"));
        }
        let stored_c = w[HEADER_WORDS..backend_at].to_vec();
        let backend = B::from_section_words(w[backend_at..].to_vec())?;
        if backend.len() != n + 1 || backend.alphabet() != alphabet {
            return Err(Error::corrupt("FM-index backend does not match header"));
        }
        let fm = Self::assemble(backend, primary_index).map_err(|e| Error::corrupt(e.to_string()))?;
        if fm.c_array != stored_c {
            return Err(Error::corrupt("C array does not match backend counts"));
        }
        Ok(fm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::Structure;
    use std::cell::Cell;

    fn bits8() -> AlphabetBits {
        AlphabetBits::new(8).unwrap()
    }

    /// Rotation-sorting oracle, sentinel written as `$`.
    fn naive_bwt(text: &[u8]) -> (String, u64) {
        let mut t: Vec<i32> = text.iter().map(|&s| s as i32).collect();
        t.push(-1);
        let mut rots: Vec<Vec<i32>> = (0..t.len()).map(|i| [&t[i..], &t[..i]].concat()).collect();
        rots.sort();
        let primary = rots.iter().position(|r| r[0] == t[0] && r == &t).unwrap() as u64;
        let s = rots
            .iter()
            .map(|r| match *r.last().unwrap() {
                -1 => '$',
                c => c as u8 as char,
            })
            .collect();
        (s, primary)
    }

    fn render(bwt: &Bwt) -> String {
        bwt.transformed
            .iter()
            .map(|&s| if s == bwt.sentinel() { '$' } else { s as u8 as char })
            .collect()
    }

    fn naive_count(text: &[u8], pattern: &[u8]) -> u64 {
        if pattern.len() > text.len() {
            return 0;
        }
        text.windows(pattern.len()).filter(|w| *w == pattern).count() as u64
    }

    #[test]
    fn abracadabra_bwt() {
        let bwt = build_bwt(b"abracadabra", bits8()).unwrap();
        assert_eq!(render(&bwt), "ard$rcaaaabb");
        assert_eq!(naive_bwt(b"abracadabra"), ("ard$rcaaaabb".to_string(), 3));
        assert_eq!(bwt.primary_index, 3);
        assert_eq!(bwt.invert(), b"abracadabra");
    }

    #[test]
    fn tiny_bwts() {
        let bwt = build_bwt(b"aa", bits8()).unwrap();
        assert_eq!(render(&bwt), "aa$");
        assert_eq!(bwt.transformed.iter().filter(|&&s| s == bwt.sentinel()).count(), 1);
        let bwt = build_bwt(b"a", bits8()).unwrap();
        assert_eq!(render(&bwt), "a$");
        assert!(matches!(build_bwt(b"", bits8()), Err(Error::InvalidInput(_))));
        assert!(build_bwt(&[9], AlphabetBits::new(3).unwrap()).is_err());
    }

    #[test]
    fn bwt_matches_rotation_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for bits in AlphabetBits::all() {
            for len in [1usize, 2, 5, 40, 300] {
                let text: Vec<u8> = (0..len).map(|_| rng.gen_range(0..bits.sigma().min(3)) as u8).collect();
                let bwt = build_bwt(&text, bits).unwrap();
                let (expected, primary) = naive_bwt(&text);
                let got: String = bwt
                    .transformed
                    .iter()
                    .map(|&s| if s == bwt.sentinel() { '$' } else { s as u8 as char })
                    .collect();
                assert_eq!(got, expected);
                assert_eq!(bwt.primary_index, primary);
                assert_eq!(bwt.invert(), text);
            }
        }
    }

    #[test]
    fn lf_walk_spells_text_backwards() {
        let text = b"abracadabra";
        let fm = FmIndex::with_tree(text, bits8()).unwrap();
        let bwt = build_bwt(text, bits8()).unwrap();
        let mut row = fm.lf_step(fm.primary_index()).unwrap();
        let mut spelled = Vec::new();
        for _ in 0..text.len() {
            spelled.push(bwt.transformed[row as usize] as u8);
            row = fm.lf_step(row).unwrap();
        }
        spelled.reverse();
        assert_eq!(spelled, text);
        assert_eq!(row, fm.primary_index());
        assert!(matches!(fm.lf_step(12), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn lf_is_one_cycle() {
        for text in [&b"aa"[..], b"abracadabra", b"mississippi"] {
            let fm = FmIndex::with_forest(text, bits8(), 2).unwrap();
            let mut seen = vec![false; text.len() + 1];
            let mut row = 0;
            for _ in 0..=text.len() {
                assert!(!seen[row as usize]);
                seen[row as usize] = true;
                row = fm.lf_step(row).unwrap();
            }
            assert_eq!(row, 0);
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn count_examples() {
        let text = b"abracadabra";
        let fm = FmIndex::with_tree(text, bits8()).unwrap();
        assert_eq!(fm.count(b"abra").unwrap(), 2);
        assert_eq!(fm.count(b"z").unwrap(), 0);
        assert_eq!(fm.count(text).unwrap(), 1);
        assert_eq!(fm.count(b"a").unwrap(), 5);
        assert!(fm.count(b"").is_err());
        assert_eq!(fm.c_array()[b'a' as usize], 1);
        assert_eq!(*fm.c_array().last().unwrap(), 12);
        let two = FmIndex::with_tree(&[0, 1, 3], AlphabetBits::new(2).unwrap()).unwrap();
        assert_eq!(two.count(&[4]).unwrap(), 0);
        assert_eq!(two.count(&[0]).unwrap(), 1);
    }

    /// Counts backend rank calls.
    struct Counting<B> {
        inner: B,
        ranks: Cell<u64>,
    }

    impl<B: SequenceIndex> SequenceIndex for Counting<B> {
        fn len(&self) -> u64 {
            self.inner.len()
        }
        fn alphabet(&self) -> AlphabetBits {
            self.inner.alphabet()
        }
        fn count(&self, c: u8) -> u64 {
            self.inner.count(c)
        }
        fn size_bytes(&self) -> u64 {
            self.inner.size_bytes()
        }
        fn access_probed<P: Probe>(&self, i: u64, probe: &mut P) -> Result<u8> {
            self.inner.access_probed(i, probe)
        }
        fn rank_probed<P: Probe>(&self, c: u8, i: u64, probe: &mut P) -> Result<u64> {
            self.ranks.set(self.ranks.get() + 1);
            self.inner.rank_probed(c, i, probe)
        }
        fn select_probed<P: Probe>(&self, c: u8, j: u64, probe: &mut P) -> Result<u64> {
            self.inner.select_probed(c, j, probe)
        }
    }

    #[test]
    fn two_rank_queries_per_symbol() {
        let text = b"abracadabra";
        let bwt = build_bwt(text, bits8()).unwrap();
        let inner = WaveletTree::build(&bwt.backend_symbols(), bits8()).unwrap();
        let fm = FmIndex::new(
            &bwt,
            Counting {
                inner,
                ranks: Cell::new(0),
            },
        )
        .unwrap();
        assert_eq!(fm.count(b"abra").unwrap(), 2);
        assert_eq!(fm.backend().ranks.get(), 8);
        fm.backend().ranks.set(0);
        // "q" empties the interval on the first step
        assert_eq!(fm.count(b"abraq").unwrap(), 0);
        assert_eq!(fm.backend().ranks.get(), 2);
        fm.backend().ranks.set(0);
        // "dd": 'd' matches, then "dd" empties on step two
        assert_eq!(fm.count(b"dd").unwrap(), 0);
        assert_eq!(fm.backend().ranks.get(), 4);
    }

    #[test]
    fn random_texts_match_naive_and_backends_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(17);
        for bits in AlphabetBits::all() {
            let sigma = bits.sigma().min(4);
            let text: Vec<u8> = (0..3000).map(|_| rng.gen_range(0..sigma) as u8).collect();
            let tree = FmIndex::with_tree(&text, bits).unwrap();
            let forests: Vec<_> = [1u64, 7, 100, 5000]
                .iter()
                .map(|&b| FmIndex::with_forest(&text, bits, b).unwrap())
                .collect();
            for _ in 0..200 {
                let m = rng.gen_range(1..=8);
                let start = rng.gen_range(0..text.len() - m);
                let pattern: Vec<u8> = if rng.gen_bool(0.5) {
                    text[start..start + m].to_vec()
                } else {
                    (0..m).map(|_| rng.gen_range(0..sigma) as u8).collect()
                };
                let expected = naive_count(&text, &pattern);
                assert_eq!(tree.count(&pattern).unwrap(), expected);
                for f in &forests {
                    assert_eq!(f.count(&pattern).unwrap(), expected);
                }
            }
        }
    }

    #[test]
    fn count_trace_stays_inside_file() {
        use crate::probe::TouchTrace;
        let fm = FmIndex::with_forest(b"abracadabra", bits8(), 4).unwrap();
        let mut trace = TouchTrace::new();
        assert_eq!(fm.count_probed(b"abra", &mut trace).unwrap(), 2);
        assert!(trace.offsets.iter().all(|&o| o < fm.size_bytes()));
        assert_eq!(trace.offsets[0], (HEADER_WORDS as u64 + b'a' as u64) * 8);
        assert!(trace.offsets.iter().filter(|&&o| o >= fm.header_bytes()).count() > 0);
    }

    #[test]
    fn serialization_roundtrip() {
        let text = b"mississippi";
        let tree = FmIndex::with_tree(text, bits8()).unwrap();
        let bytes = tree.to_bytes();
        assert_eq!(&bytes[..4], b"WFFM");
        let back = FmIndex::<WaveletTree>::from_bytes(&bytes).unwrap();
        assert_eq!(back, tree);
        assert_eq!(back.to_bytes(), bytes);
        let any = FmIndex::<Structure>::from_bytes(&bytes).unwrap();
        assert_eq!(any.count(b"ssi").unwrap(), 2);

        let forest = FmIndex::with_forest(text, bits8(), 4).unwrap();
        let bytes = forest.to_bytes();
        let any = FmIndex::<Structure>::from_bytes(&bytes).unwrap();
        assert!(matches!(any.backend(), Structure::Forest(_)));
        assert_eq!(any.to_bytes(), bytes);
        assert!(FmIndex::<WaveletTree>::from_bytes(&bytes).is_err());

        assert_eq!(any.size_bytes(), bytes.len() as u64);

        let mut bad = bytes.clone();
        bad[16] ^= 1; // primary index
        assert!(FmIndex::<Structure>::from_bytes(&bad).is_err());
    }
}
