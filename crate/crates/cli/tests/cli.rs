use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kmem_index::fixtures::{example_text, EXAMPLE_TEXT};
use kmem_index::{read_index, write_index, KmemIndex, TextBuffer, UNBOUNDED};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tempfile::TempDir;

const EXAMPLE_FASTA: &str = ">g1\nGATTACAT\n>g2\nAGATACAT\n>g3\nGATACAT\n>g4\nGATTAGAT\n>g5\nGATTAGATA\n";

fn kmem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kmem"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Fixture {
    dir: TempDir,
    index: PathBuf,
}

impl Fixture {
    fn example() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let fasta = dir.path().join("example.fa");
        fs::write(&fasta, EXAMPLE_FASTA).unwrap();
        let index = dir.path().join("example.kmi");
        let out = kmem(&["build", "-i", path_str(&fasta), "-o", path_str(&index)]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        Self { dir, index }
    }

    fn file(&self, name: &str, contents: &[u8]) -> PathBuf {
        let p = self.dir.path().join(name);
        fs::write(&p, contents).unwrap();
        p
    }

    fn query(&self, patterns: &Path, extra: &[&str]) -> Output {
        let mut args = vec!["query", "-x", path_str(&self.index), "-p", path_str(patterns)];
        args.extend_from_slice(extra);
        kmem(&args)
    }
}

#[test]
fn build_writes_index_and_stats() {
    let fx = Fixture::example();
    assert_eq!(read_index(&fx.index).unwrap(), KmemIndex::build(example_text()));
    let stats: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(fx.dir.path().join("example.kmi.stats.json")).unwrap())
            .unwrap();
    assert_eq!(stats["n"], 45);
    assert_eq!(stats["r"], 14);
    assert_eq!(stats["sigma"], 6);
}

#[test]
fn build_is_deterministic_and_accepts_raw_text() {
    let fx = Fixture::example();
    let again = fx.dir.path().join("again.kmi");
    let fasta = fx.dir.path().join("example.fa");
    assert_eq!(
        code(&kmem(&["build", "-i", path_str(&fasta), "-o", path_str(&again)])),
        0
    );
    assert_eq!(fs::read(&fx.index).unwrap(), fs::read(&again).unwrap());

    let raw = fx.file("example.raw", &kmem_index::fixtures::remap(EXAMPLE_TEXT));
    let from_raw = fx.dir.path().join("raw.kmi");
    let out = kmem(&[
        "build",
        "-i",
        path_str(&raw),
        "-o",
        path_str(&from_raw),
        "--sentinel",
        "strict",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read(&fx.index).unwrap(), fs::read(&from_raw).unwrap());
}

#[test]
fn build_rejects_bad_input() {
    let fx = Fixture::example();
    let out_path = fx.dir.path().join("x.kmi");
    let empty = fx.file("empty", b"");
    let out = kmem(&["build", "-i", path_str(&empty), "-o", path_str(&out_path)]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());

    let unterminated = fx.file("plain", b"GATTACA");
    let out = kmem(&[
        "build",
        "-i",
        path_str(&unterminated),
        "-o",
        path_str(&out_path),
        "--sentinel",
        "strict",
    ]);
    assert_eq!(code(&out), 2);

    let missing = fx.dir.path().join("missing");
    assert_eq!(
        code(&kmem(&[
            "build",
            "-i",
            path_str(&missing),
            "-o",
            path_str(&out_path)
        ])),
        2
    );
    assert_eq!(code(&kmem(&["build", "-i", path_str(&empty)])), 1);
    assert_eq!(
        code(&kmem(&[
            "build",
            "-i",
            path_str(&empty),
            "-o",
            "x",
            "--sentinel",
            "maybe"
        ])),
        1
    );
}

#[test]
fn precompute_adds_tables_idempotently() {
    let fx = Fixture::example();
    let idx = path_str(&fx.index);
    assert_eq!(code(&kmem(&["precompute", "-x", idx, "-k", "3"])), 0);
    let first = fs::read(&fx.index).unwrap();
    let index = read_index(&fx.index).unwrap();
    let e = index.ktable(3).unwrap().lookup(22).unwrap();
    assert_eq!((e.offset, e.best_lcp), (0, 5));

    assert_eq!(code(&kmem(&["precompute", "-x", idx, "-k", "3"])), 0);
    assert_eq!(fs::read(&fx.index).unwrap(), first);

    let k1 = fx.dir.path().join("k1.kmi");
    assert_eq!(
        code(&kmem(&["precompute", "-x", idx, "-k", "1", "-o", path_str(&k1)])),
        0
    );
    let index = read_index(&k1).unwrap();
    assert!(index
        .ktable(1)
        .unwrap()
        .entries()
        .iter()
        .all(|e| e.best_lcp == UNBOUNDED));
    assert!(index.ktable(3).is_some());
    assert_eq!(fs::read(&fx.index).unwrap(), first);

    assert_eq!(code(&kmem(&["precompute", "-x", idx, "-k", "0"])), 1);
    assert_eq!(
        code(&kmem(&[
            "precompute",
            "-x",
            path_str(&fx.dir.path().join("example.fa")),
            "-k",
            "2"
        ])),
        2
    );
}

#[test]
fn example_queries() {
    let fx = Fixture::example();
    let pats = fx.file("p.txt", b"TAGATTACATTA\n");
    let out = fx.query(&pats, &["-k", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "1\t0\t2\n1\t1\t4\n1\t2\t5\n1\t5\t5\n1\t8\t4\n");

    let out = fx.query(&pats, &["-k", "1"]);
    assert_eq!(stdout(&out), "1\t0\t5\n1\t2\t8\n1\t8\t4\n");
    assert_eq!(stdout(&fx.query(&pats, &["--mems"])), stdout(&out));

    let out = fx.query(&pats, &["-k", "3", "--occurrences"]);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[3], "1\t5\t5\t3,12,20");
    assert_eq!(rows[4], "1\t8\t4\t1,27,36");
}

#[test]
fn fast_and_slow_output_identical() {
    let fx = Fixture::example();
    assert_eq!(
        code(&kmem(&["precompute", "-x", path_str(&fx.index), "-k", "3"])),
        0
    );
    let pats = fx.file("p.txt", b"TAGATTACATTA\nGATTAGATTACA\nCATCAT\nGATNNTAC\n\nA\n");
    let fast = fx.query(&pats, &["-k", "3", "--occurrences"]);
    let slow = fx.query(&pats, &["-k", "3", "--occurrences", "--force-slow"]);
    assert_eq!(code(&fast), 0);
    assert_eq!(fast.stdout, slow.stdout);

    let json = fx.query(&pats, &["-k", "3", "--json", "--stream"]);
    let reports: Vec<serde_json::Value> = stdout(&json)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(reports.len(), 6);
    assert_eq!(reports[0]["path"], "fast");
    assert_eq!(
        reports[0]["stream"],
        serde_json::json!([2, 4, 5, 4, 3, 5, 4, 3, 4, 3, 2, 1])
    );
    let slow_json = fx.query(&pats, &["-k", "3", "--json", "--force-slow"]);
    let first: serde_json::Value = serde_json::from_str(stdout(&slow_json).lines().next().unwrap()).unwrap();
    assert_eq!(first["path"], "slow");
    assert_eq!(first["matches"], reports[0]["matches"]);
}

#[test]
fn sentinel_lines_are_skipped_with_warning() {
    let fx = Fixture::example();
    let pats = fx.file("p.txt", b"GAT\nGA\x00T\nTACAT\r\n");
    let out = fx.query(&pats, &["-k", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "1\t0\t3\n3\t0\t5\n");
    assert!(String::from_utf8_lossy(&out.stderr).contains("pattern 2"));
}

#[test]
fn usage_errors() {
    let fx = Fixture::example();
    let pats = fx.file("p.txt", b"GAT\n");
    assert_eq!(code(&fx.query(&pats, &[])), 1);
    assert_eq!(code(&fx.query(&pats, &["-k", "2", "--mems"])), 1);
    assert_eq!(code(&fx.query(&pats, &["-k", "0"])), 1);
    assert_eq!(code(&fx.query(&pats, &["-k", "2", "--stream"])), 1);
    assert_eq!(code(&kmem(&["frobnicate"])), 1);
    assert_eq!(code(&kmem(&["--help"])), 0);
}

#[test]
fn verify_passes_on_random_patterns() {
    let mut rng = StdRng::seed_from_u64(5);
    let dir = tempfile::tempdir().unwrap();
    let base: Vec<u8> = (0..60).map(|_| b"ACGT"[rng.gen_range(0..4)]).collect();
    let mut body = Vec::new();
    for _ in 0..8 {
        body.extend(base.iter().map(|&c| {
            if rng.gen_bool(0.05) {
                b"ACGT"[rng.gen_range(0..4)]
            } else {
                c
            }
        }));
    }
    let input = dir.path().join("t.txt");
    fs::write(&input, &body).unwrap();
    let index = dir.path().join("t.kmi");
    assert_eq!(
        code(&kmem(&["build", "-i", path_str(&input), "-o", path_str(&index)])),
        0
    );
    assert_eq!(code(&kmem(&["precompute", "-x", path_str(&index), "-k", "4"])), 0);

    let mut lines = Vec::new();
    for _ in 0..100 {
        let len = rng.gen_range(1..40);
        let s = rng.gen_range(0..body.len() - len);
        let mut p = body[s..s + len].to_vec();
        if rng.gen_bool(0.3) {
            p[rng.gen_range(0..len)] = b"ACGTN"[rng.gen_range(0..5)];
        }
        lines.extend(p);
        lines.push(b'\n');
    }
    let pats = dir.path().join("p.txt");
    fs::write(&pats, &lines).unwrap();
    for extra in [
        &["-k", "4"][..],
        &["-k", "4", "--force-slow"],
        &["-k", "2"],
        &["--mems"],
    ] {
        let mut args = vec!["query", "-x", path_str(&index), "-p", path_str(&pats), "--verify"];
        args.extend_from_slice(extra);
        let out = kmem(&args);
        assert_eq!(
            code(&out),
            0,
            "{extra:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn verify_reports_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    // Tables of one text stored next to a different text of the same length.
    let good = KmemIndex::build(TextBuffer::with_sentinel(b"ACGTACGTAC".to_vec()).unwrap());
    let other = TextBuffer::with_sentinel(b"TTTTTTTTTT".to_vec()).unwrap();
    let bad = KmemIndex::from_parts(
        other,
        good.move_table().clone(),
        good.phi().clone(),
        good.phi_inv().clone(),
        BTreeMap::new(),
    );
    let index = dir.path().join("bad.kmi");
    write_index(&bad, &index).unwrap();
    let pats = dir.path().join("p.txt");
    fs::write(&pats, b"ACGT\n").unwrap();
    let out = kmem(&[
        "query",
        "-x",
        path_str(&index),
        "-p",
        path_str(&pats),
        "-k",
        "2",
        "--verify",
    ]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bench_reports_every_k() {
    let out = kmem(&[
        "bench", "--block", "200", "--copies", "10", "--count", "10", "--length", "50", "--ks", "1,3,9",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.ends_with("\ttrue")));
    assert_eq!(code(&kmem(&["bench", "--ks", "0"])), 1);
}
