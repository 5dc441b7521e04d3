//! Batch timing and locality profiling.
//!
//! Timings wrap a whole query batch in one monotonic clock reading. The
//! locality profiler reruns single queries with a [`TouchTrace`] and reduces
//! each trace to the number of distinct `g`-byte regions it reads and the
//! byte span between its lowest and highest read.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::OpenOptions;
use std::hint::black_box;
use std::io::Write;
use std::num::NonZeroU64;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::fmindex::FmIndex;
use crate::probe::{Probe, TouchTrace};
use crate::sequence::{SequenceIndex, Structure, StructureKind};

/// Cache-line and page granularities.
pub const DEFAULT_GRANULARITIES: [u64; 2] = [64, 4096];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QueryKind {
    Access,
    Rank,
    Count,
}

impl QueryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            QueryKind::Access => "access",
            QueryKind::Rank => "rank",
            QueryKind::Count => "count",
        }
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QueryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "access" => Ok(QueryKind::Access),
            "rank" => Ok(QueryKind::Rank),
            "count" => Ok(QueryKind::Count),
            _ => Err(Error::invalid(format!("unknown query kind {s:?}"))),
        }
    }
}

/// One timed pass over a query batch.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub structure: StructureKind,
    pub alphabet_bits: u8,
    /// Raw-data bytes per block, 0 for a tree.
    pub block_bytes: u64,
    pub n_symbols: u64,
    pub query_kind: QueryKind,
    pub queries: u64,
    pub repeat: u32,
    pub total_ns: u64,
    pub ns_per_query: f64,
    pub struct_bytes: u64,
    pub checksum: u64,
}

/// Static description of the structure a batch ran against.
#[derive(Debug, Clone, Copy)]
struct Subject {
    structure: StructureKind,
    alphabet_bits: u8,
    block_bytes: u64,
    n_symbols: u64,
    struct_bytes: u64,
}

impl Subject {
    fn of(s: &Structure) -> Self {
        Self {
            structure: s.kind(),
            alphabet_bits: s.alphabet().get(),
            block_bytes: s.block_bytes(),
            n_symbols: s.len(),
            struct_bytes: s.size_bytes(),
        }
    }

    fn result(self, kind: QueryKind, queries: usize, repeat: u32, total_ns: u64, checksum: u64) -> BenchResult {
        BenchResult {
            structure: self.structure,
            alphabet_bits: self.alphabet_bits,
            block_bytes: self.block_bytes,
            n_symbols: self.n_symbols,
            query_kind: kind,
            queries: queries as u64,
            repeat,
            total_ns,
            ns_per_query: if queries == 0 {
                0.0
            } else {
                total_ns as f64 / queries as f64
            },
            struct_bytes: self.struct_bytes,
            checksum,
        }
    }
}

fn check_repeats(repeats: u32) -> Result<()> {
    if repeats == 0 {
        return Err(Error::invalid("repeats must be at least 1"));
    }
    Ok(())
}

fn timed<F: FnMut() -> Result<u64>>(mut batch: F) -> Result<(u64, u64)> {
    let start = Instant::now();
    let checksum = black_box(batch()?);
    let ns = start.elapsed().as_nanos().min(u64::MAX as u128) as u64;
    Ok((ns, checksum))
}

/// Times `repeats` passes of access queries; the checksum is the wrapping sum
/// of returned symbols.
pub fn run_access_bench(s: &Structure, positions: &[u64], repeats: u32) -> Result<Vec<BenchResult>> {
    check_repeats(repeats)?;
    let subject = Subject::of(s);
    (0..repeats)
        .map(|r| {
            let (ns, sum) = match s {
                Structure::Tree(t) => timed(|| access_batch(t, positions)),
                Structure::Forest(f) => timed(|| access_batch(f, positions)),
            }?;
            Ok(subject.result(QueryKind::Access, positions.len(), r, ns, sum))
        })
        .collect()
}

fn access_batch<S: SequenceIndex>(s: &S, positions: &[u64]) -> Result<u64> {
    let mut sum = 0u64;
    for &i in positions {
        sum = sum.wrapping_add(s.access(black_box(i))? as u64);
    }
    Ok(sum)
}

/// Times `repeats` passes of `(symbol, position)` rank queries; the checksum
/// is the wrapping sum of answers.
pub fn run_rank_bench(s: &Structure, queries: &[(u8, u64)], repeats: u32) -> Result<Vec<BenchResult>> {
    check_repeats(repeats)?;
    let subject = Subject::of(s);
    (0..repeats)
        .map(|r| {
            let (ns, sum) = match s {
                Structure::Tree(t) => timed(|| rank_batch(t, queries)),
                Structure::Forest(f) => timed(|| rank_batch(f, queries)),
            }?;
            Ok(subject.result(QueryKind::Rank, queries.len(), r, ns, sum))
        })
        .collect()
}

fn rank_batch<S: SequenceIndex>(s: &S, queries: &[(u8, u64)]) -> Result<u64> {
    let mut sum = 0u64;
    for &(c, i) in queries {
        sum = sum.wrapping_add(s.rank(black_box(c), black_box(i))?);
    }
    Ok(sum)
}

/// Times `repeats` passes of FM-index pattern counts; the checksum is the
/// wrapping sum of counts. `struct_bytes` is the whole FM-index.
pub fn run_count_bench(fm: &FmIndex<Structure>, patterns: &[Vec<u8>], repeats: u32) -> Result<Vec<BenchResult>> {
    check_repeats(repeats)?;
    let subject = Subject {
        n_symbols: fm.len(),
        struct_bytes: fm.size_bytes(),
        ..Subject::of(fm.backend())
    };
    (0..repeats)
        .map(|r| {
            let (ns, sum) = timed(|| {
                let mut sum = 0u64;
                for p in patterns {
                    sum = sum.wrapping_add(fm.count(black_box(p))?);
                }
                Ok(sum)
            })?;
            Ok(subject.result(QueryKind::Count, patterns.len(), r, ns, sum))
        })
        .collect()
}

/// A single query to profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Query {
    Access(u64),
    Rank(u8, u64),
    Select(u8, u64),
}

/// Runs `query` through the production path with a recording probe. Returns
/// the answer and the byte offsets read, in order.
pub fn profile_query<S: SequenceIndex>(s: &S, query: Query) -> Result<(u64, TouchTrace)> {
    let mut trace = TouchTrace::new();
    let answer = run_query(s, query, &mut trace)?;
    Ok((answer, trace))
}

/// Runs `query` against `s`, reporting reads to `probe`.
pub fn run_query<S: SequenceIndex, P: Probe>(s: &S, query: Query, probe: &mut P) -> Result<u64> {
    match query {
        Query::Access(i) => s.access_probed(i, probe).map(u64::from),
        Query::Rank(c, i) => s.rank_probed(c, i, probe),
        Query::Select(c, j) => s.select_probed(c, j, probe),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalityProfile {
    pub granularity: u64,
    pub distinct_regions: u64,
    pub span: u64,
}

pub fn summarize_locality(trace: &TouchTrace, granularity: NonZeroU64) -> LocalityProfile {
    let g = granularity.get();
    let mut regions: Vec<u64> = trace.offsets.iter().map(|&o| o / g).collect();
    regions.sort_unstable();
    regions.dedup();
    let span = match (trace.offsets.iter().min(), trace.offsets.iter().max()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => 0,
    };
    LocalityProfile {
        granularity: g,
        distinct_regions: regions.len() as u64,
        span,
    }
}

/// Mean locality of a query batch at one granularity.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalityRow {
    pub structure: StructureKind,
    pub alphabet_bits: u8,
    pub block_bytes: u64,
    pub granularity: u64,
    pub mean_distinct_regions: f64,
    pub mean_span_bytes: f64,
    pub queries: u64,
}

/// Profiles each query once and averages the profiles per granularity.
pub fn profile_locality(s: &Structure, queries: &[Query], granularities: &[NonZeroU64]) -> Result<Vec<LocalityRow>> {
    let traces = queries.iter().map(|&q| profile_query(s, q).map(|(_, t)| t));
    average_locality(Subject::of(s), traces, granularities)
}

/// As [`profile_locality`] for FM-index pattern counts; offsets are into the
/// serialized FM-index.
pub fn profile_count_locality(
    fm: &FmIndex<Structure>,
    patterns: &[Vec<u8>],
    granularities: &[NonZeroU64],
) -> Result<Vec<LocalityRow>> {
    let traces = patterns.iter().map(|p| {
        let mut trace = TouchTrace::new();
        fm.count_probed(p, &mut trace).map(|_| trace)
    });
    average_locality(Subject::of(fm.backend()), traces, granularities)
}

fn average_locality(
    subject: Subject,
    traces: impl Iterator<Item = Result<TouchTrace>>,
    granularities: &[NonZeroU64],
) -> Result<Vec<LocalityRow>> {
    let mut regions = vec![0u64; granularities.len()];
    let mut spans = 0u64;
    let mut queries = 0u64;
    for trace in traces {
        let trace = trace?;
        for (acc, &g) in regions.iter_mut().zip(granularities) {
            *acc += summarize_locality(&trace, g).distinct_regions;
        }
        spans += summarize_locality(&trace, NonZeroU64::MIN).span;
        queries += 1;
    }
    let mean = |total: u64| {
        if queries == 0 {
            0.0
        } else {
            total as f64 / queries as f64
        }
    };
    Ok(granularities
        .iter()
        .zip(regions)
        .map(|(&g, r)| LocalityRow {
            structure: subject.structure,
            alphabet_bits: subject.alphabet_bits,
            block_bytes: subject.block_bytes,
            granularity: g.get(),
            mean_distinct_regions: mean(r),
            mean_span_bytes: mean(spans),
            queries,
        })
        .collect())
}

/// Tree-over-forest slowdown for one forest configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Ratio {
    pub alphabet_bits: u8,
    pub query_kind: QueryKind,
    pub block_bytes: u64,
    /// Mean tree ns/query divided by mean forest ns/query.
    pub tree_over_forest: f64,
}

/// Divides the mean tree time by each forest's mean time, per alphabet and
/// query kind.
pub fn ratio_table(results: &[BenchResult]) -> Vec<Ratio> {
    let mut means: BTreeMap<(u8, QueryKind, StructureKind, u64), (f64, u32)> = BTreeMap::new();
    for r in results {
        let e = means
            .entry((r.alphabet_bits, r.query_kind, r.structure, r.block_bytes))
            .or_default();
        e.0 += r.ns_per_query;
        e.1 += 1;
    }
    let mean = |(sum, k): (f64, u32)| sum / k as f64;
    means
        .iter()
        .filter(|((_, _, kind, _), _)| *kind == StructureKind::Forest)
        .filter_map(|(&(bits, q, _, block), &forest)| {
            let tree = *means.get(&(bits, q, StructureKind::Tree, 0))?;
            Some(Ratio {
                alphabet_bits: bits,
                query_kind: q,
                block_bytes: block,
                tree_over_forest: mean(tree) / mean(forest),
            })
        })
        .collect()
}

/// A row type with a fixed CSV header.
pub trait CsvRow {
    const HEADER: &'static [&'static str];

    fn fields(&self) -> Vec<String>;
}

impl CsvRow for BenchResult {
    const HEADER: &'static [&'static str] = &[
        "structure",
        "alphabet_bits",
        "block_bytes",
        "n_symbols",
        "query_kind",
        "queries",
        "repeat",
        "total_ns",
        "ns_per_query",
        "struct_bytes",
        "checksum",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.structure.to_string(),
            self.alphabet_bits.to_string(),
            self.block_bytes.to_string(),
            self.n_symbols.to_string(),
            self.query_kind.to_string(),
            self.queries.to_string(),
            self.repeat.to_string(),
            self.total_ns.to_string(),
            format!("{:.3}", self.ns_per_query),
            self.struct_bytes.to_string(),
            self.checksum.to_string(),
        ]
    }
}

impl CsvRow for LocalityRow {
    const HEADER: &'static [&'static str] = &[
        "structure",
        "alphabet_bits",
        "block_bytes",
        "granularity",
        "mean_distinct_regions",
        "mean_span_bytes",
        "queries",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.structure.to_string(),
            self.alphabet_bits.to_string(),
            self.block_bytes.to_string(),
            self.granularity.to_string(),
            format!("{:.4}", self.mean_distinct_regions),
            format!("{:.2}", self.mean_span_bytes),
            self.queries.to_string(),
        ]
    }
}

/// Renders rows as CSV text, optionally preceded by the header.
pub fn render_csv<R: CsvRow>(rows: &[R], header: bool) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::invalid(format!("CSV encoding failed: {e}"));
    if header {
        w.write_record(R::HEADER).map_err(csv_err)?;
    }
    for r in rows {
        w.write_record(r.fields()).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Writes rows to `path` in a single write. With `append`, rows go after the
/// existing content and the header is written only if the file is empty.
pub fn emit_csv<R: CsvRow>(rows: &[R], path: impl AsRef<Path>, append: bool) -> Result<()> {
    let path = path.as_ref();
    let mut file = OpenOptions::new()
        .create(true)
        .write(true)
        .append(append)
        .truncate(!append)
        .open(path)?;
    let header = !append || file.metadata()?.len() == 0;
    file.write_all(&render_csv(rows, header)?)?;
    Ok(())
}
