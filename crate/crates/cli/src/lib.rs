//! The `wforest` command line: generate datasets, build structures, benchmark
//! them and sweep over alphabet widths and block sizes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::num::NonZeroU64;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use wavelet_forest::bench::{self, BenchResult, LocalityRow, Query, QueryKind};
use wavelet_forest::textgen::{self, reinterpret};
use wavelet_forest::{AlphabetBits, FmIndex, SequenceIndex, Structure, WaveletForest, WaveletTree};

#[derive(Debug, Parser)]
#[command(
    name = "wforest",
    version,
    about = "Wavelet trees and wavelet forests: build, query, benchmark"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write pseudo-random bytes to a file.
    Gen(GenArgs),
    /// Build a wavelet tree, wavelet forest or FM-index from a byte file.
    Build(BuildArgs),
    /// Time queries against a built structure.
    Bench(BenchArgs),
    /// Build and benchmark the tree and every forest for each alphabet width.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StructureArg {
    Tree,
    Forest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QueryArg {
    Access,
    Rank,
    Count,
}

impl From<QueryArg> for QueryKind {
    fn from(q: QueryArg) -> Self {
        match q {
            QueryArg::Access => QueryKind::Access,
            QueryArg::Rank => QueryKind::Rank,
            QueryArg::Count => QueryKind::Count,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of bytes; accepts suffixes KB, MB, GB (powers of 1000).
    #[arg(long, value_parser = parse_size)]
    pub bytes: u64,
    /// Destination file.
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Raw byte file to index.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Bits per symbol: 1, 2, 3, 4 or 8.
    #[arg(long, value_parser = parse_alphabet)]
    pub alphabet_bits: AlphabetBits,
    #[arg(long, value_enum)]
    pub structure: StructureArg,
    /// Raw-data bytes per forest block; required for forests only.
    #[arg(long, value_parser = parse_size)]
    pub block_bytes: Option<u64>,
    /// Index the BWT of the input with an FM-index over the chosen structure.
    #[arg(long)]
    pub fm: bool,
    /// Destination file.
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct QueryOpts {
    /// Queries per repeat.
    #[arg(long, default_value_t = 10_000)]
    pub queries: usize,
    /// Query generator seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Timed passes over the query list.
    #[arg(long, default_value_t = 3)]
    pub repeats: u32,
    /// Locality granularity in bytes; repeatable.
    #[arg(long = "granularity", value_parser = parse_granularity, default_values_t = default_granularities())]
    pub granularities: Vec<NonZeroU64>,
    /// Append timing rows to this CSV file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Append locality rows to this CSV file.
    #[arg(long)]
    pub locality_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Structure file written by `build`.
    #[arg(short, long)]
    pub input: PathBuf,
    /// access and rank need a tree or forest file, count an FM-index file.
    #[arg(long, value_enum, default_value_t = QueryArg::Access)]
    pub query_kind: QueryArg,
    /// Pattern length for count queries.
    #[arg(long, default_value_t = 4)]
    pub pattern_len: usize,
    #[command(flatten)]
    pub opts: QueryOpts,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Raw byte file to index.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Comma-separated alphabet widths.
    #[arg(long = "alphabet-bits", value_delimiter = ',', value_parser = parse_alphabet,
          default_value = "1,2,3,4,8")]
    pub alphabet_bits: Vec<AlphabetBits>,
    /// Comma-separated forest block sizes in bytes; empty for tree only.
    #[arg(long, value_delimiter = ',', value_parser = parse_size, num_args = 0..)]
    pub block_bytes_list: Vec<u64>,
    #[arg(long, value_enum, default_value_t = QueryArg::Access)]
    pub query_kind: QueryArg,
    #[command(flatten)]
    pub opts: QueryOpts,
}

fn default_granularities() -> Vec<NonZeroU64> {
    bench::DEFAULT_GRANULARITIES
        .iter()
        .map(|&g| NonZeroU64::new(g).expect("nonzero"))
        .collect()
}

fn parse_alphabet(s: &str) -> std::result::Result<AlphabetBits, String> {
    s.trim().parse().map_err(|e: wavelet_forest::Error| e.to_string())
}

fn parse_granularity(s: &str) -> std::result::Result<NonZeroU64, String> {
    let g = parse_size(s)?;
    NonZeroU64::new(g).ok_or_else(|| "granularity must be at least 1 byte".to_string())
}

/// Parses a byte count such as `4096`, `0.05MB` or `2 GB`; units are powers of
/// 1000.
pub fn parse_size(s: &str) -> std::result::Result<u64, String> {
    let t = s.trim();
    let split = t.find(|c: char| c.is_ascii_alphabetic()).unwrap_or(t.len());
    let (num, unit) = (t[..split].trim(), t[split..].trim());
    let scale: u64 = match unit.to_ascii_uppercase().as_str() {
        "" | "B" => 1,
        "KB" => 1_000,
        "MB" => 1_000_000,
        "GB" => 1_000_000_000,
        _ => return Err(format!("unknown size unit {unit:?} in {s:?}")),
    };
    if let Ok(v) = num.parse::<u64>() {
        return v.checked_mul(scale).ok_or_else(|| format!("size {s:?} overflows"));
    }
    let v: f64 = num.parse().map_err(|_| format!("invalid size {s:?}"))?;
    let bytes = (v * scale as f64).round();
    if !(0.0..=u64::MAX as f64).contains(&bytes) || (v * scale as f64 - bytes).abs() > 1e-6 {
        return Err(format!("size {s:?} is not a whole number of bytes"));
    }
    Ok(bytes as u64)
}

/// Symbols per block for a block of `block_bytes` raw bytes.
pub fn block_len(block_bytes: u64, alphabet: AlphabetBits) -> Result<u64> {
    ensure!(block_bytes > 0, "block size must be at least 1 byte");
    Ok((block_bytes.saturating_mul(8) / alphabet.get() as u64).max(1))
}

pub fn run(cli: Cli) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Gen(a) => {
            cmd_gen(a.seed, a.bytes, &a.output)?;
            writeln!(out, "wrote {} bytes to {}", a.bytes, a.output.display())?;
        }
        Command::Build(a) => {
            let bytes = cmd_build(&a)?;
            writeln!(out, "struct_bytes={bytes}")?;
        }
        Command::Bench(a) => {
            let (results, locality) = cmd_bench(&a)?;
            report(&mut out, &results, &locality, a.opts.csv.is_none())?;
        }
        Command::Sweep(a) => {
            let (results, locality) = cmd_sweep(&a)?;
            report(&mut out, &results, &locality, a.opts.csv.is_none())?;
            for r in bench::ratio_table(&results) {
                writeln!(
                    out,
                    "ratio alphabet_bits={} block_bytes={} {}: tree/forest = {:.3}",
                    r.alphabet_bits, r.block_bytes, r.query_kind, r.tree_over_forest
                )?;
            }
        }
    }
    Ok(())
}

fn report(out: &mut impl Write, results: &[BenchResult], locality: &[LocalityRow], as_csv: bool) -> Result<()> {
    if as_csv {
        out.write_all(&bench::render_csv(results, true)?)?;
    } else {
        for r in results {
            writeln!(
                out,
                "{} bits={} block_bytes={} {} repeat={} ns/query={:.1} checksum={}",
                r.structure, r.alphabet_bits, r.block_bytes, r.query_kind, r.repeat, r.ns_per_query, r.checksum
            )?;
        }
    }
    for l in locality {
        writeln!(
            out,
            "locality {} bits={} block_bytes={} g={}: regions={:.3} span={:.0}",
            l.structure, l.alphabet_bits, l.block_bytes, l.granularity, l.mean_distinct_regions, l.mean_span_bytes
        )?;
    }
    Ok(())
}

pub fn cmd_gen(seed: u64, bytes: u64, output: &Path) -> Result<()> {
    let file = File::create(output).with_context(|| format!("cannot create {}", output.display()))?;
    let mut w = BufWriter::new(file);
    textgen::write_bytes(seed, bytes, &mut w)?;
    w.flush()?;
    Ok(())
}

fn read_input(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn build_structure(
    symbols: &[u8],
    alphabet: AlphabetBits,
    structure: StructureArg,
    block_bytes: Option<u64>,
) -> Result<Structure> {
    Ok(match (structure, block_bytes) {
        (StructureArg::Tree, None) => WaveletTree::build(symbols, alphabet)?.into(),
        (StructureArg::Forest, Some(b)) => WaveletForest::build(symbols, block_len(b, alphabet)?, alphabet)?.into(),
        (StructureArg::Tree, Some(_)) => bail!("--block-bytes applies to forests only"),
        (StructureArg::Forest, None) => bail!("--block-bytes is required for a forest"),
    })
}

/// Builds and saves the requested structure; returns its size in bytes.
pub fn cmd_build(a: &BuildArgs) -> Result<u64> {
    if a.block_bytes == Some(0) {
        bail!("block size must be at least 1 byte");
    }
    let seq = reinterpret(&read_input(&a.input)?, a.alphabet_bits);
    let bytes = if a.fm {
        let bwt = wavelet_forest::build_bwt(&seq.symbols, seq.alphabet)?;
        let backend = build_structure(&bwt.backend_symbols(), seq.alphabet, a.structure, a.block_bytes)?;
        FmIndex::new(&bwt, backend)?.to_bytes()
    } else {
        build_structure(&seq.symbols, seq.alphabet, a.structure, a.block_bytes)?.to_bytes()
    };
    std::fs::write(&a.output, &bytes).with_context(|| format!("cannot write {}", a.output.display()))?;
    Ok(bytes.len() as u64)
}

enum Loaded {
    Plain(Structure),
    Fm(FmIndex<Structure>),
}

fn load(path: &Path) -> Result<Loaded> {
    let bytes = read_input(path)?;
    let what = || format!("cannot load {}", path.display());
    if bytes.starts_with(b"WFFM") {
        Ok(Loaded::Fm(FmIndex::from_bytes(&bytes).with_context(what)?))
    } else {
        Ok(Loaded::Plain(Structure::from_bytes(&bytes).with_context(what)?))
    }
}

/// Timing and locality rows for one structure under one query kind.
fn bench_structure(s: &Structure, kind: QueryKind, opts: &QueryOpts) -> Result<(Vec<BenchResult>, Vec<LocalityRow>)> {
    ensure!(opts.repeats >= 1, "--repeats must be at least 1");
    let want_locality = opts.locality_csv.is_some();
    if s.is_empty() {
        ensure!(opts.queries == 0, "cannot query an empty structure");
    }
    let positions = if s.is_empty() {
        Vec::new()
    } else {
        textgen::gen_query_positions(opts.seed, opts.queries, s.len())?
    };
    match kind {
        QueryKind::Access => {
            let results = bench::run_access_bench(s, &positions, opts.repeats)?;
            let locality = if want_locality {
                let qs: Vec<Query> = positions.iter().map(|&i| Query::Access(i)).collect();
                bench::profile_locality(s, &qs, &opts.granularities)?
            } else {
                Vec::new()
            };
            Ok((results, locality))
        }
        QueryKind::Rank => {
            let queries = if s.is_empty() {
                Vec::new()
            } else {
                textgen::gen_rank_queries(opts.seed, opts.queries, s.len(), s.alphabet())?
            };
            let results = bench::run_rank_bench(s, &queries, opts.repeats)?;
            let locality = if want_locality {
                let qs: Vec<Query> = queries.iter().map(|&(c, i)| Query::Rank(c, i)).collect();
                bench::profile_locality(s, &qs, &opts.granularities)?
            } else {
                Vec::new()
            };
            Ok((results, locality))
        }
        QueryKind::Count => bail!("count queries need an FM-index file (build with --fm)"),
    }
}

fn write_rows(opts: &QueryOpts, results: &[BenchResult], locality: &[LocalityRow]) -> Result<()> {
    if let Some(p) = &opts.csv {
        bench::emit_csv(results, p, true).with_context(|| format!("cannot write {}", p.display()))?;
    }
    if let Some(p) = &opts.locality_csv {
        bench::emit_csv(locality, p, true).with_context(|| format!("cannot write {}", p.display()))?;
    }
    Ok(())
}

pub fn cmd_bench(a: &BenchArgs) -> Result<(Vec<BenchResult>, Vec<LocalityRow>)> {
    let kind = QueryKind::from(a.query_kind);
    let (results, locality) = match (load(&a.input)?, kind) {
        (Loaded::Plain(s), _) => bench_structure(&s, kind, &a.opts)?,
        (Loaded::Fm(fm), QueryKind::Count) => {
            ensure!(a.opts.repeats >= 1, "--repeats must be at least 1");
            let patterns = textgen::gen_patterns(a.opts.seed, a.opts.queries, a.pattern_len, fm.backend().alphabet())?;
            let results = bench::run_count_bench(&fm, &patterns, a.opts.repeats)?;
            let locality = if a.opts.locality_csv.is_some() {
                bench::profile_count_locality(&fm, &patterns, &a.opts.granularities)?
            } else {
                Vec::new()
            };
            (results, locality)
        }
        (Loaded::Fm(_), _) => bail!("{kind} queries need a tree or forest file, not an FM-index"),
    };
    write_rows(&a.opts, &results, &locality)?;
    Ok((results, locality))
}

/// Benchmarks the tree and one forest per block size for every alphabet width.
/// Rows are written only after every configuration has run.
pub fn cmd_sweep(a: &SweepArgs) -> Result<(Vec<BenchResult>, Vec<LocalityRow>)> {
    let kind = QueryKind::from(a.query_kind);
    ensure!(kind != QueryKind::Count, "sweeps support access and rank queries");
    ensure!(!a.alphabet_bits.is_empty(), "--alphabet-bits needs at least one width");
    ensure!(!a.block_bytes_list.contains(&0), "block size must be at least 1 byte");
    let raw = read_input(&a.input)?;
    let mut results = Vec::new();
    let mut locality = Vec::new();
    for &alphabet in &a.alphabet_bits {
        let seq = reinterpret(&raw, alphabet);
        let mut run = |s: Structure| -> Result<()> {
            let (r, l) = bench_structure(&s, kind, &a.opts)?;
            results.extend(r);
            locality.extend(l);
            Ok(())
        };
        run(build_structure(&seq.symbols, alphabet, StructureArg::Tree, None)?)?;
        for &b in &a.block_bytes_list {
            run(build_structure(&seq.symbols, alphabet, StructureArg::Forest, Some(b))?)?;
        }
    }
    write_rows(&a.opts, &results, &locality)?;
    Ok((results, locality))
}
