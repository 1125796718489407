use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kmem_index::input::{load_text, InputFormat, SentinelMode};
use kmem_index::{brute_kmems, read_index, write_index, KMemHit, KmemIndex, Mem, QueryOptions, TextBuffer};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "kmem",
    version,
    about = "Find k-MEMs of patterns in a run-length BWT index"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index from a raw or FASTA text.
    Build(BuildArgs),
    /// Precompute the fast-query table for one k.
    Precompute(PrecomputeArgs),
    /// Report MEMs or k-MEMs of each pattern line.
    Query(QueryArgs),
    /// Print per-character query cost of both query paths for several k.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SentinelArg {
    Auto,
    Strict,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Auto,
    Raw,
    Fasta,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// `auto` appends a 0x00 terminator when none is present; `strict`
    /// requires the input to end with a unique smallest byte.
    #[arg(long, value_enum, default_value = "auto")]
    sentinel: SentinelArg,
    #[arg(long, value_enum, default_value = "auto")]
    format: FormatArg,
}

#[derive(Args)]
struct PrecomputeArgs {
    #[arg(short = 'x', long)]
    index: PathBuf,
    #[arg(short, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Output path; defaults to rewriting the index in place.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(short = 'x', long)]
    index: PathBuf,
    /// One pattern per line; `-` reads standard input.
    #[arg(short, long)]
    patterns: PathBuf,
    #[arg(short, value_parser = clap::value_parser!(u64).range(1..), conflicts_with = "mems")]
    k: Option<u64>,
    /// Plain maximal exact matches.
    #[arg(long)]
    mems: bool,
    /// Append every text position of each match.
    #[arg(long)]
    occurrences: bool,
    /// JSON lines instead of TSV.
    #[arg(long)]
    json: bool,
    /// Check each result against a brute-force scan of the text.
    #[arg(long)]
    verify: bool,
    /// Use the query-time-k path even when a precomputed table exists.
    #[arg(long)]
    force_slow: bool,
    /// Include the per-position match lengths in the JSON report.
    #[arg(long, requires = "json")]
    stream: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Index to benchmark; a synthetic repetitive text is used otherwise.
    #[arg(short = 'x', long)]
    index: Option<PathBuf>,
    /// Pattern file; random substrings of the text are used otherwise.
    #[arg(short, long)]
    patterns: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32")]
    ks: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 150)]
    length: usize,
    /// Synthetic text: block length and number of mutated copies.
    #[arg(long, default_value_t = 2000)]
    block: usize,
    #[arg(long, default_value_t = 50)]
    copies: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

enum Failure {
    Usage(String),
    Data(anyhow::Error),
    Mismatch(usize),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Precompute(a) => cmd_precompute(a),
        Command::Query(a) => cmd_query(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Mismatch(count)) => {
            eprintln!("verification failed for {count} pattern(s)");
            ExitCode::from(3)
        }
    }
}

fn stats_path(index: &Path) -> PathBuf {
    let mut name = index.as_os_str().to_owned();
    name.push(".stats.json");
    PathBuf::from(name)
}

fn save(index: &KmemIndex, path: &Path) -> anyhow::Result<()> {
    write_index(index, path).with_context(|| format!("writing {}", path.display()))?;
    let stats = serde_json::to_string_pretty(index.stats())?;
    let sp = stats_path(path);
    fs::write(&sp, stats + "\n").with_context(|| format!("writing {}", sp.display()))?;
    Ok(())
}

fn load(path: &Path) -> anyhow::Result<KmemIndex> {
    read_index(path).with_context(|| format!("reading index {}", path.display()))
}

fn cmd_build(a: BuildArgs) -> CmdResult {
    let bytes = fs::read(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let format = match a.format {
        FormatArg::Auto => InputFormat::Auto,
        FormatArg::Raw => InputFormat::Raw,
        FormatArg::Fasta => InputFormat::Fasta,
    };
    let sentinel = match a.sentinel {
        SentinelArg::Auto => SentinelMode::Auto,
        SentinelArg::Strict => SentinelMode::Strict,
    };
    let text =
        load_text(bytes, format, sentinel).with_context(|| format!("invalid input {}", a.input.display()))?;
    let index = KmemIndex::build(text);
    save(&index, &a.output)?;
    let s = index.stats();
    eprintln!(
        "built {}: n = {}, r = {}, sigma = {}",
        a.output.display(),
        s.n,
        s.r,
        s.sigma
    );
    Ok(())
}

fn cmd_precompute(a: PrecomputeArgs) -> CmdResult {
    let k = usize::try_from(a.k).map_err(|_| Failure::Usage(format!("k = {} is too large", a.k)))?;
    let mut index = load(&a.index)?;
    let added = index.add_ktable(k);
    let out = a.output.as_ref().unwrap_or(&a.index);
    save(&index, out)?;
    let entries = index.ktable(k).map_or(0, |t| t.entries().len());
    let verb = if added { "added" } else { "kept existing" };
    eprintln!(
        "{verb} table for k = {k} ({entries} entries) in {}",
        out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct MatchReport {
    start: usize,
    len: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    occurrences: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct QueryReport {
    id: usize,
    k: usize,
    path: &'static str,
    matches: Vec<MatchReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stream: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verified: Option<bool>,
    micros: u128,
}

enum Line<'a> {
    Pattern(usize, &'a [u8]),
    Skipped(usize),
}

fn pattern_lines(bytes: &[u8], sentinel: u8) -> Vec<Line<'_>> {
    let mut lines: Vec<&[u8]> = bytes.split(|&c| c == b'\n').collect();
    if lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    }
    lines
        .into_iter()
        .enumerate()
        .map(|(idx, line)| {
            let line = line.strip_suffix(b"\r").unwrap_or(line);
            if line.contains(&sentinel) {
                Line::Skipped(idx + 1)
            } else {
                Line::Pattern(idx + 1, line)
            }
        })
        .collect()
}

fn read_patterns(path: &Path) -> anyhow::Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin()
            .read_to_end(&mut buf)
            .context("reading patterns from stdin")?;
        Ok(buf)
    } else {
        fs::read(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn cmd_query(a: QueryArgs) -> CmdResult {
    let k = match (a.k, a.mems) {
        (Some(k), false) => {
            usize::try_from(k).map_err(|_| Failure::Usage(format!("k = {k} is too large")))?
        }
        (None, true) => 1,
        (None, false) => return Err(Failure::Usage("give -k <K> or --mems".into())),
        (Some(_), true) => unreachable!("rejected by the parser"),
    };
    let index = load(&a.index)?;
    let raw = read_patterns(&a.patterns)?;
    let lines = pattern_lines(&raw, index.text().sentinel());
    let ktable = if a.mems || a.force_slow {
        None
    } else {
        index.ktable(k)
    };
    let path = match (a.mems, ktable) {
        (true, _) => "mems",
        (false, Some(_)) => "fast",
        (false, None) => "slow",
    };

    let reports: Vec<Option<(QueryReport, Option<Vec<Mem>>)>> = lines
        .par_iter()
        .map(|line| {
            let Line::Pattern(id, pattern) = *line else {
                return None;
            };
            let t0 = Instant::now();
            let (hits, stream): (Vec<KMemHit>, Option<Vec<usize>>) = if a.mems {
                let hits = index.mems(pattern);
                let stream = a.stream.then(|| {
                    index
                        .move_table()
                        .matching_statistics(pattern, &index.lce())
                        .lens()
                });
                (hits, stream)
            } else {
                let out = match ktable {
                    Some(t) => index.run_fast(t, pattern, &QueryOptions::default()),
                    None => index.run_slow(pattern, k, &QueryOptions::default()),
                };
                (out.hits, a.stream.then_some(out.stream))
            };
            let matches: Vec<MatchReport> = hits
                .iter()
                .map(|h| MatchReport {
                    start: h.mem.start,
                    len: h.mem.len,
                    occurrences: a.occurrences.then(|| index.all_occurrences(h)),
                })
                .collect();
            let micros = t0.elapsed().as_micros();
            let mismatch = a.verify.then(|| {
                let want = brute_kmems(index.text().as_bytes(), pattern, k);
                let got: Vec<Mem> = hits.iter().map(|h| h.mem).collect();
                (got != want).then_some(want)
            });
            let report = QueryReport {
                id,
                k,
                path,
                matches,
                stream,
                verified: mismatch.as_ref().map(|m| m.is_none()),
                micros,
            };
            Some((report, mismatch.flatten()))
        })
        .collect();

    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let mut mismatches = 0;
    for (line, report) in lines.iter().zip(reports) {
        if let Line::Skipped(id) = line {
            eprintln!("warning: pattern {id} contains the sentinel byte; skipped");
            continue;
        }
        let (report, mismatch) = report.expect("every pattern line has a report");
        if let Some(want) = mismatch {
            mismatches += 1;
            let want: Vec<(usize, usize)> = want.iter().map(|m| (m.start, m.len)).collect();
            eprintln!("mismatch on pattern {}: brute force gives {want:?}", report.id);
        }
        write_report(&mut out, &report, a.json).context("writing output")?;
    }
    out.flush().context("writing output")?;
    if mismatches > 0 {
        return Err(Failure::Mismatch(mismatches));
    }
    Ok(())
}

fn write_report(out: &mut impl Write, report: &QueryReport, json: bool) -> anyhow::Result<()> {
    if json {
        serde_json::to_writer(&mut *out, report)?;
        writeln!(out)?;
        return Ok(());
    }
    for m in &report.matches {
        write!(out, "{}\t{}\t{}", report.id, m.start, m.len)?;
        if let Some(occ) = &m.occurrences {
            let list: Vec<String> = occ.iter().map(usize::to_string).collect();
            write!(out, "\t{}", list.join(","))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn synthetic_text(rng: &mut StdRng, block: usize, copies: usize) -> Vec<u8> {
    let acgt = b"ACGT";
    let base: Vec<u8> = (0..block).map(|_| acgt[rng.gen_range(0..4)]).collect();
    let mut body = Vec::with_capacity(block * copies);
    for _ in 0..copies {
        body.extend(base.iter().map(|&c| {
            if rng.gen_bool(0.01) {
                acgt[rng.gen_range(0..4)]
            } else {
                c
            }
        }));
    }
    body
}

fn cmd_bench(a: BenchArgs) -> CmdResult {
    if a.ks.contains(&0) {
        return Err(Failure::Usage("every k must be at least 1".into()));
    }
    let mut rng = StdRng::seed_from_u64(a.seed);
    let mut index = match &a.index {
        Some(p) => load(p)?,
        None => {
            let body = synthetic_text(&mut rng, a.block.max(1), a.copies.max(1));
            KmemIndex::build(TextBuffer::with_sentinel(body).map_err(|e| anyhow!(e))?)
        }
    };
    let sentinel = index.text().sentinel();
    let patterns: Vec<Vec<u8>> = match &a.patterns {
        Some(p) => pattern_lines(&read_patterns(p)?, sentinel)
            .into_iter()
            .filter_map(|l| match l {
                Line::Pattern(_, p) if !p.is_empty() => Some(p.to_vec()),
                _ => None,
            })
            .collect(),
        None => {
            let body = &index.text().as_bytes()[..index.n() - 1];
            let len = a.length.clamp(1, body.len());
            (0..a.count)
                .map(|_| {
                    let s = rng.gen_range(0..=body.len() - len);
                    body[s..s + len].to_vec()
                })
                .collect()
        }
    };
    let chars: usize = patterns.iter().map(Vec::len).sum();
    if chars == 0 {
        return Err(Failure::Data(anyhow!("no pattern characters to benchmark")));
    }

    println!(
        "n = {}, r = {}, patterns = {}, characters = {chars}",
        index.n(),
        index.r(),
        patterns.len()
    );
    println!("k\tslow_ns_per_char\tfast_ns_per_char\tkmems\tagree");
    for &k in &a.ks {
        index.add_ktable(k);
        let t0 = Instant::now();
        let slow: Vec<Vec<Mem>> = patterns.iter().map(|p| index.kmems_slow(p, k)).collect();
        let slow_ns = t0.elapsed().as_nanos() as f64 / chars as f64;
        let table = index.ktable(k).expect("table just added");
        let t1 = Instant::now();
        let fast: Vec<Vec<Mem>> = patterns.iter().map(|p| index.kmems_fast(table, p)).collect();
        let fast_ns = t1.elapsed().as_nanos() as f64 / chars as f64;
        let found: usize = slow.iter().map(Vec::len).sum();
        println!("{k}\t{slow_ns:.0}\t{fast_ns:.0}\t{found}\t{}", slow == fast);
    }
    Ok(())
}
