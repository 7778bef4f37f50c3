//! The `trisurf` command line tool.
//!
//! Exit codes: 0 success, 1 runtime or I/O failure (including a rejected
//! `verify`), 2 usage error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::catalog::{summary_line, Catalog, RealizationStatus, RunManifest};
use crate::classify::{
    catalog_order, classify_surface, deduplicate, deduplicate_indexed, orientability, type_counts, TopologicalType,
};
use crate::complex::{parse_complexes, verify_surface, TriangleSet};
use crate::enumerate::{EnumerationConfig, Enumerator, Order, Partition};
use crate::realize::{
    is_embedding, parse_coordinates, random_realize, recycle_with_perturbation, shrink, to_off, write_coordinates,
    CoordinateAssignment, Provenance, RealizationConfig, RealizationResult,
};

#[derive(Debug, Parser)]
#[command(name = "trisurf", version, about = "Enumerate, classify and realize triangulated surfaces")]
pub struct Cli {
    /// Catalog directory to read from or write to
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Suppress summaries on standard error
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate all surfaces with n vertices
    Enumerate(EnumerateArgs),
    /// Deduplicate and classify surfaces from a file
    Classify(ClassifyArgs),
    /// Search for geometric realizations in 3-space
    Realize(RealizeArgs),
    /// Check coordinates against a triangle list
    Verify(VerifyArgs),
    /// Counts by n and type from a catalog
    Report(ReportArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct EnumerateArgs {
    /// Number of vertices
    #[arg(long, value_parser = clap::value_parser!(u32).range(4..=64))]
    pub n: u32,

    /// Search order: lex or mixed
    #[arg(long, default_value = "lex")]
    pub order: Order,

    /// Emit every surface the search finds, without removing relabeled copies
    #[arg(long)]
    pub raw: bool,

    /// Run only part i of m of the search tree (e.g. 0/4)
    #[arg(long)]
    pub partition: Option<Partition>,

    /// Output file (default: standard output)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    /// Input file, one triangle list per line
    #[arg(long = "in")]
    pub input: PathBuf,

    /// Write a JSON report here
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// Write canonical forms here (default: standard output)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct RealizeArgs {
    /// Input file, one triangle list per line; without it, catalog entries
    /// selected by --n and --type are used
    #[arg(long = "in")]
    pub input: Option<PathBuf>,

    /// Select catalog entries with this many vertices
    #[arg(long)]
    pub n: Option<usize>,

    /// Select catalog entries of this type (e.g. T2, M(2,+), M2p)
    #[arg(long = "type")]
    pub surface_type: Option<String>,

    /// Side length k of the coordinate cube {0..k-1}^3
    #[arg(long, default_value_t = 32768)]
    pub cube: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Fresh tries per surface
    #[arg(long, default_value_t = 1_000_000)]
    pub max_tries: u64,

    /// Reuse successful coordinates (and perturbations of them) for the rest
    #[arg(long)]
    pub recycle: bool,

    /// Perturbation radius used when recycling
    #[arg(long, default_value_t = 8)]
    pub delta: u64,

    /// Perturbations tried per pool entry when recycling
    #[arg(long, default_value_t = 16)]
    pub perturb_attempts: u64,

    /// Reduce coordinates of every realization
    #[arg(long)]
    pub shrink: bool,

    /// Directory for coordinate and OFF files
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Triangle list as FILE:LINE (1-based line)
    #[arg(long)]
    pub complex: String,

    /// Coordinate file
    #[arg(long)]
    pub coords: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    /// Write the report as JSON here
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// Parses arguments, runs, and maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

pub fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Enumerate(a) => run_enumerate(cli, a),
        Command::Classify(a) => run_classify(cli, a),
        Command::Realize(a) => run_realize(cli, a),
        Command::Verify(a) => run_verify(a),
        Command::Report(a) => run_report(cli, a),
    }
}

fn open_catalog(cli: &Cli) -> anyhow::Result<Option<Catalog>> {
    cli.catalog
        .as_ref()
        .map(|p| Catalog::open(p).with_context(|| format!("opening catalog {}", p.display())))
        .transpose()
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn manifest(cli: &Cli, command: &str, config: impl Serialize, seeds: Vec<u64>, start: Instant, counts: BTreeMap<String, usize>) -> anyhow::Result<RunManifest> {
    Ok(RunManifest {
        command: command.into(),
        config: serde_json::to_value(config)?,
        seeds,
        version: env!("CARGO_PKG_VERSION").into(),
        threads: cli.threads.unwrap_or_else(rayon::current_num_threads),
        wall_time_secs: start.elapsed().as_secs_f64(),
        counts,
    })
}

fn run_enumerate(cli: &Cli, a: &EnumerateArgs) -> anyhow::Result<ExitCode> {
    let start = Instant::now();
    let n = a.n as usize;
    let mut config = EnumerationConfig::new(n, a.order)?;
    config.emit_duplicates = a.raw;
    config.partition = a.partition;
    let raw = Enumerator::new(config)?.candidates();

    let (text, summary, counts) = if a.raw {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for c in &raw {
            *counts.entry(classify_surface(c).name()).or_default() += 1;
        }
        let text: String = raw.iter().map(|c| format!("{c}\n")).collect();
        let mut summary: Vec<String> = counts.iter().map(|(t, c)| format!("{t}:{c}")).collect();
        summary.push(format!("total:{}", raw.len()));
        (text, summary.join(" "), counts)
    } else {
        let mut records = deduplicate(raw);
        catalog_order(&mut records, a.order);
        if let Some(cat) = open_catalog(cli)? {
            if a.partition.is_some() {
                bail!("--partition output is incomplete and cannot be stored in a catalog");
            }
            cat.store(n, &records)?;
        }
        let text: String = records.iter().map(|r| format!("{}\n", r.complex)).collect();
        let counts = type_counts(&records).into_iter().map(|(t, c)| (t.name(), c)).collect();
        (text, summary_line(&records), counts)
    };
    emit(a.out.as_deref(), &text)?;
    if let Some(cat) = open_catalog(cli)? {
        cat.append_manifest(&manifest(cli, "enumerate", a, vec![], start, counts)?)?;
    }
    if !cli.quiet {
        eprintln!("{summary} wall:{:.3}s", start.elapsed().as_secs_f64());
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct TypeReport {
    #[serde(rename = "type")]
    name: String,
    count: usize,
    /// input line of the first member of each class
    lines: Vec<usize>,
}

#[derive(Serialize)]
struct ClassifyReport {
    by_n: BTreeMap<usize, Vec<TypeReport>>,
    totals: BTreeMap<usize, usize>,
}

fn read_complexes(path: &Path) -> anyhow::Result<Vec<(usize, TriangleSet)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let list = parse_complexes(&text, None).with_context(|| format!("parsing {}", path.display()))?;
    for (line, c) in &list {
        if !verify_surface(c) {
            bail!("{}:{line}: not a closed connected surface", path.display());
        }
    }
    Ok(list)
}

fn run_classify(cli: &Cli, a: &ClassifyArgs) -> anyhow::Result<ExitCode> {
    let start = Instant::now();
    let input = read_complexes(&a.input)?;
    let mut by_n: BTreeMap<usize, Vec<(usize, TriangleSet)>> = BTreeMap::new();
    for (line, c) in input {
        by_n.entry(c.n()).or_default().push((line, c));
    }
    let catalog = open_catalog(cli)?;
    let mut report = ClassifyReport { by_n: BTreeMap::new(), totals: BTreeMap::new() };
    let mut text = String::new();
    let mut all_counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut summaries = Vec::new();
    for (n, items) in by_n {
        let lines: Vec<usize> = items.iter().map(|(l, _)| *l).collect();
        let mut sorted = deduplicate_indexed(items.into_iter().map(|(_, c)| c));
        sorted.sort_by(|x, y| x.1.complex.cmp(&y.1.complex));
        let mut types: Vec<TypeReport> = Vec::new();
        for (i, r) in &sorted {
            let name = r.topology.name();
            let line = lines[*i];
            match types.iter_mut().find(|t| t.name == name) {
                Some(t) => {
                    t.count += 1;
                    t.lines.push(line);
                }
                None => types.push(TypeReport { name: name.clone(), count: 1, lines: vec![line] }),
            }
            *all_counts.entry(name).or_default() += 1;
            text.push_str(&format!("{}\n", r.complex));
        }
        types.sort_by_key(|t| TopologicalType::parse(&t.name).map(|x| x.sort_key()).unwrap_or((true, u32::MAX)));
        let recs: Vec<_> = sorted.into_iter().map(|(_, r)| r).collect();
        summaries.push(format!("n={n} {}", summary_line(&recs)));
        if let Some(cat) = &catalog {
            cat.store(n, &recs)?;
        }
        report.totals.insert(n, recs.len());
        report.by_n.insert(n, types);
    }
    emit(a.out.as_deref(), &text)?;
    if let Some(p) = &a.report {
        fs::write(p, serde_json::to_string_pretty(&report)? + "\n").with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(cat) = &catalog {
        cat.append_manifest(&manifest(cli, "classify", a, vec![], start, all_counts)?)?;
    }
    if !cli.quiet {
        for s in summaries {
            eprintln!("{s}");
        }
        eprintln!("wall:{:.3}s", start.elapsed().as_secs_f64());
    }
    Ok(ExitCode::SUCCESS)
}

struct Target {
    label: String,
    complex: TriangleSet,
    /// catalog entry name
    entry: Option<String>,
}

fn realize_targets(cli: &Cli, a: &RealizeArgs) -> anyhow::Result<Vec<Target>> {
    if let Some(input) = &a.input {
        let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("surface").to_string();
        return Ok(read_complexes(input)?
            .into_iter()
            .map(|(line, complex)| Target { label: format!("{stem}_{line}"), complex, entry: None })
            .collect());
    }
    let cat = open_catalog(cli)?.ok_or_else(|| anyhow!("realize needs --in or --catalog"))?;
    let wanted = a.surface_type.as_deref().map(TopologicalType::parse).transpose()?;
    let index = cat.load_index()?;
    let mut out = Vec::new();
    for e in &index.entries {
        if a.n.is_some_and(|n| n != e.n) || wanted.is_some_and(|t| t != e.topology) || !e.topology.orientable {
            continue;
        }
        out.push(Target { label: e.name.clone(), complex: cat.complex(e)?, entry: Some(e.name.clone()) });
    }
    Ok(out)
}

fn run_realize(cli: &Cli, a: &RealizeArgs) -> anyhow::Result<ExitCode> {
    let start = Instant::now();
    let targets = realize_targets(cli, a)?;
    let catalog = open_catalog(cli)?;
    if let Some(d) = &a.out_dir {
        fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    let base = RealizationConfig {
        cube_side: a.cube,
        seed: a.seed,
        max_tries: a.max_tries,
        delta: a.delta,
        recycle: a.recycle,
        stream: 0,
    };
    base.validate()?;

    let mut results: Vec<Option<RealizationResult>> = vec![None; targets.len()];
    let mut tries: Vec<u64> = vec![0; targets.len()];
    for (i, t) in targets.iter().enumerate() {
        if !orientability(&t.complex) {
            eprintln!("{}: non-orientable, skipped", t.label);
            continue;
        }
        let cfg = RealizationConfig { stream: i as u64, ..base.clone() };
        results[i] = random_realize(&t.complex, &cfg)?;
        tries[i] = results[i].as_ref().map_or(a.max_tries, |r| r.tries_used);
    }
    if a.recycle {
        let pool: Vec<CoordinateAssignment> = results.iter().flatten().map(|r| r.coords.clone()).collect();
        for (i, t) in targets.iter().enumerate() {
            if results[i].is_some() || !orientability(&t.complex) {
                continue;
            }
            let cfg = RealizationConfig { stream: (targets.len() + i) as u64, ..base.clone() };
            if let Some(r) = recycle_with_perturbation(&t.complex, &pool, &cfg, a.perturb_attempts) {
                tries[i] += r.tries_used;
                results[i] = Some(r);
            }
        }
    }

    let mut index = match &catalog {
        Some(c) => Some(c.load_index()?),
        None => None,
    };
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for (i, t) in targets.iter().enumerate() {
        let Some(r) = &mut results[i] else {
            *counts.entry("unrealized".into()).or_default() += 1;
            println!("{}: unrealized after {} tries", t.label, tries[i]);
            if let (Some(cat), Some(idx), Some(name)) = (&catalog, index.as_mut(), &t.entry) {
                cat.set_unrealized(idx, name, tries[i])?;
            }
            continue;
        };
        if a.shrink {
            let s = shrink(&t.complex, &r.coords);
            if s != r.coords {
                r.coords = s;
                r.provenance = Provenance::Shrunk;
            }
        }
        debug_assert!(is_embedding(&t.complex, &r.coords));
        *counts.entry(r.provenance.to_string()).or_default() += 1;
        println!("{}: {} tries={} max-norm={}", t.label, r.provenance, tries[i], r.coords.max_norm());
        if let Some(d) = &a.out_dir {
            fs::write(d.join(format!("{}.txt", t.label)), write_coordinates(&r.coords))?;
            fs::write(d.join(format!("{}.off", t.label)), to_off(&t.complex, &r.coords)?)?;
        }
        if let (Some(cat), Some(idx), Some(name)) = (&catalog, index.as_mut(), &t.entry) {
            cat.set_realized(idx, name, &r.coords, r.provenance, tries[i])?;
        }
    }
    if let (Some(cat), Some(idx)) = (&catalog, &index) {
        cat.save_index(idx)?;
        cat.append_manifest(&manifest(cli, "realize", a, vec![a.seed], start, counts.clone())?)?;
    }
    if !cli.quiet {
        let parts: Vec<String> = counts.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        eprintln!("{} total:{} wall:{:.3}s", parts.join(" "), targets.len(), start.elapsed().as_secs_f64());
    }
    Ok(ExitCode::SUCCESS)
}

fn run_verify(a: &VerifyArgs) -> anyhow::Result<ExitCode> {
    let (file, line) = a
        .complex
        .rsplit_once(':')
        .and_then(|(f, l)| Some((f, l.parse::<usize>().ok()?)))
        .ok_or_else(|| anyhow!("--complex must look like FILE:LINE"))?;
    let text = fs::read_to_string(file).with_context(|| format!("reading {file}"))?;
    let body = text
        .lines()
        .nth(line.checked_sub(1).ok_or_else(|| anyhow!("lines start at 1"))?)
        .ok_or_else(|| anyhow!("{file} has no line {line}"))?;
    let c = TriangleSet::parse_line(body, None, line).with_context(|| format!("parsing {file}:{line}"))?;
    let coords_text = fs::read_to_string(&a.coords).with_context(|| format!("reading {}", a.coords.display()))?;
    let coords = parse_coordinates(&coords_text).with_context(|| format!("parsing {}", a.coords.display()))?;
    if !verify_surface(&c) {
        println!("rejected: {file}:{line} is not a closed connected surface");
        return Ok(ExitCode::from(1));
    }
    if coords.n() != c.n() {
        println!("rejected: {} points for {} vertices", coords.n(), c.n());
        return Ok(ExitCode::from(1));
    }
    if is_embedding(&c, &coords) {
        println!("ok: embedding in general position");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("rejected: self-intersection or degenerate position");
        Ok(ExitCode::from(1))
    }
}

fn run_report(cli: &Cli, a: &ReportArgs) -> anyhow::Result<ExitCode> {
    let cat = open_catalog(cli)?.ok_or_else(|| anyhow!("report needs --catalog"))?;
    let problems = cat.validate()?;
    if !problems.is_empty() {
        for p in &problems {
            eprintln!("{p}");
        }
        bail!("catalog has {} problem(s)", problems.len());
    }
    let report = cat.report()?;
    print!("{}", report.table());
    let index = cat.load_index()?;
    let realized = index
        .entries
        .iter()
        .filter(|e| matches!(e.realization, RealizationStatus::Realized { .. }))
        .count();
    if realized > 0 && !cli.quiet {
        eprintln!("realized entries: {realized}");
    }
    if let Some(p) = &a.json {
        fs::write(p, serde_json::to_string_pretty(&report)? + "\n").with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}
