use std::path::Path;
use std::process::{Command, Output};

use wavelet_forest::textgen::{gen_bytes, reinterpret};
use wavelet_forest::{AlphabetBits, SequenceIndex, Structure, WaveletTree};

fn wforest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wforest")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = wforest(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fail(args: &[&str]) -> String {
    let out = wforest(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "diagnostic: {err}");
    err
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Data rows of a CSV file, header dropped.
fn rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("structure,alphabet_bits,block_bytes"));
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn gen_matches_library_and_repeats() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.bin");
    let b = dir.path().join("b.bin");
    ok(&["gen", "--seed", "0", "--bytes", "8", "-o", s(&a)]);
    assert_eq!(std::fs::read(&a).unwrap(), gen_bytes(0, 8).raw);
    ok(&["gen", "--seed", "5", "--bytes", "100KB", "-o", s(&a)]);
    ok(&["gen", "--seed", "5", "--bytes", "100000", "-o", s(&b)]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    ok(&["gen", "--bytes", "0", "-o", s(&a)]);
    assert!(std::fs::read(&a).unwrap().is_empty());
}

#[test]
fn built_tree_answers_like_in_memory() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.bin");
    let tree = dir.path().join("t.wt");
    ok(&["gen", "--seed", "3", "--bytes", "5000", "-o", s(&data)]);
    let out = ok(&[
        "build",
        "-i",
        s(&data),
        "--alphabet-bits",
        "3",
        "--structure",
        "tree",
        "-o",
        s(&tree),
    ]);
    let loaded = Structure::load(&tree).unwrap();
    assert!(out.contains(&format!("struct_bytes={}", loaded.size_bytes())));
    let seq = reinterpret(&gen_bytes(3, 5000).raw, AlphabetBits::new(3).unwrap());
    let mem = WaveletTree::build(&seq.symbols, seq.alphabet).unwrap();
    for i in (1..=loaded.len()).step_by(97) {
        assert_eq!(loaded.access(i).unwrap(), mem.access(i).unwrap());
        assert_eq!(loaded.rank(5, i).unwrap(), mem.rank(5, i).unwrap());
    }
    assert_eq!(loaded.to_bytes(), mem.to_bytes());
}

#[test]
fn huge_block_gives_one_block() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.bin");
    let forest = dir.path().join("f.wf");
    ok(&["gen", "--seed", "1", "--bytes", "3000", "-o", s(&data)]);
    ok(&[
        "build",
        "-i",
        s(&data),
        "--alphabet-bits",
        "4",
        "--structure",
        "forest",
        "--block-bytes",
        "1MB",
        "-o",
        s(&forest),
    ]);
    let Structure::Forest(f) = Structure::load(&forest).unwrap() else {
        panic!("not a forest")
    };
    assert_eq!(f.block_count(), 1);
    assert_eq!(f.block_bytes(), 1_000_000);
}

#[test]
fn usage_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.bin");
    let out = dir.path().join("o");
    ok(&["gen", "--bytes", "100", "-o", s(&data)]);
    let base = ["build", "-i", s(&data), "-o", s(&out)];
    let with = |extra: &[&'static str]| [&base[..], extra].concat();
    fail(&with(&[
        "--alphabet-bits",
        "8",
        "--structure",
        "forest",
        "--block-bytes",
        "0",
    ]));
    fail(&with(&["--alphabet-bits", "8", "--structure", "forest"]));
    fail(&with(&[
        "--alphabet-bits",
        "8",
        "--structure",
        "tree",
        "--block-bytes",
        "10",
    ]));
    fail(&with(&["--alphabet-bits", "6", "--structure", "tree"]));
    assert!(!out.exists());
    let err = fail(&["bench", "-i", s(&data)]);
    assert!(err.contains("corrupt"), "{err}");
    fail(&["bench", "-i", s(&dir.path().join("missing"))]);
    fail(&["sweep", "-i", s(&data), "--block-bytes-list", "0"]);
}

#[test]
fn bench_rows_and_checksums() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.bin");
    let tree = dir.path().join("t.wt");
    let forest = dir.path().join("f.wf");
    let csv = dir.path().join("r.csv");
    ok(&["gen", "--seed", "9", "--bytes", "20000", "-o", s(&data)]);
    ok(&[
        "build",
        "-i",
        s(&data),
        "--alphabet-bits",
        "2",
        "--structure",
        "tree",
        "-o",
        s(&tree),
    ]);
    ok(&[
        "build",
        "-i",
        s(&data),
        "--alphabet-bits",
        "2",
        "--structure",
        "forest",
        "--block-bytes",
        "1000",
        "-o",
        s(&forest),
    ]);

    ok(&[
        "bench",
        "-i",
        s(&tree),
        "--queries",
        "0",
        "--repeats",
        "2",
        "--csv",
        s(&csv),
    ]);
    let r = rows(&csv);
    assert_eq!(r.len(), 2);
    assert!(r.iter().all(|row| row[5] == "0" && row[10] == "0"));

    std::fs::remove_file(&csv).unwrap();
    for kind in ["access", "rank"] {
        for file in [&tree, &tree, &forest] {
            ok(&[
                "bench",
                "-i",
                s(file),
                "--query-kind",
                kind,
                "--queries",
                "500",
                "--seed",
                "4",
                "--csv",
                s(&csv),
            ]);
        }
    }
    let r = rows(&csv);
    assert_eq!(r.len(), 2 * 3 * 3);
    for half in r.chunks(9) {
        assert!(half.iter().all(|row| row[10] == half[0][10]));
    }
    assert_ne!(r[0][10], r[9][10]);
}

#[test]
fn fm_count_bench() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.bin");
    let fm_tree = dir.path().join("t.fm");
    let fm_forest = dir.path().join("f.fm");
    let csv = dir.path().join("r.csv");
    ok(&["gen", "--seed", "2", "--bytes", "4000", "-o", s(&data)]);
    ok(&[
        "build",
        "-i",
        s(&data),
        "--alphabet-bits",
        "1",
        "--structure",
        "tree",
        "--fm",
        "-o",
        s(&fm_tree),
    ]);
    ok(&[
        "build",
        "-i",
        s(&data),
        "--alphabet-bits",
        "1",
        "--structure",
        "forest",
        "--block-bytes",
        "100",
        "--fm",
        "-o",
        s(&fm_forest),
    ]);
    for f in [&fm_tree, &fm_forest] {
        ok(&[
            "bench",
            "-i",
            s(f),
            "--query-kind",
            "count",
            "--queries",
            "300",
            "--pattern-len",
            "6",
            "--csv",
            s(&csv),
        ]);
    }
    let r = rows(&csv);
    assert_eq!(r.len(), 6);
    assert!(r.iter().all(|row| row[4] == "count" && row[10] == r[0][10]));
    // 300 patterns of 6 bits over 32000 bits: every pattern occurs
    assert!(r[0][10].parse::<u64>().unwrap() > 300);
    fail(&["bench", "-i", s(&fm_tree), "--query-kind", "access"]);
}

#[test]
fn sweep_grid() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.bin");
    let csv = dir.path().join("r.csv");
    let loc = dir.path().join("l.csv");
    ok(&["gen", "--seed", "6", "--bytes", "30000", "-o", s(&data)]);
    let out = ok(&[
        "sweep",
        "-i",
        s(&data),
        "--alphabet-bits",
        "8",
        "--block-bytes-list",
        "1000,5KB,0.01MB",
        "--queries",
        "200",
        "--repeats",
        "2",
        "--csv",
        s(&csv),
        "--locality-csv",
        s(&loc),
    ]);
    let r = rows(&csv);
    assert_eq!(r.len(), 4 * 2);
    let blocks: Vec<&str> = r.iter().map(|row| row[2].as_str()).collect();
    assert_eq!(blocks, ["0", "0", "1000", "1000", "5000", "5000", "10000", "10000"]);
    assert!(r.iter().all(|row| row[10] == r[0][10]));
    assert_eq!(out.lines().filter(|l| l.starts_with("ratio")).count(), 3);
    assert_eq!(rows(&loc).len(), 4 * 2);

    std::fs::remove_file(&csv).unwrap();
    ok(&[
        "sweep",
        "-i",
        s(&data),
        "--alphabet-bits",
        "1,4",
        "--queries",
        "50",
        "--repeats",
        "1",
        "--csv",
        s(&csv),
    ]);
    let r = rows(&csv);
    assert_eq!(r.len(), 2);
    assert!(r.iter().all(|row| row[0] == "tree"));
}
