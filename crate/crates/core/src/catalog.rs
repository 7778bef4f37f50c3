//! On-disk catalog of classified surfaces.
//!
//! Layout under the root directory:
//!
//! ```text
//! index.json          one entry per surface
//! n{n}_{type}.txt     canonical triangle lists, one per line
//! coords/{name}.txt   coordinates of realized entries
//! manifests.jsonl     one line per run
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classify::{heawood_min_vertices, type_counts, InvariantKey, SurfaceRecord, TopologicalType};
use crate::complex::{parse_complexes, verify_surface, TriangleSet};
use crate::error::{Error, Result};
use crate::realize::{write_coordinates, CoordinateAssignment, Provenance};

const INDEX: &str = "index.json";
const MANIFESTS: &str = "manifests.jsonl";
const COORDS: &str = "coords";

/// Realization state of one entry.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RealizationStatus {
    #[default]
    Unattempted,
    Realized {
        provenance: Provenance,
        tries: u64,
        coords_file: String,
    },
    Unrealized {
        tries: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    /// `manifold_<type>_<n>_<ordinal>`
    pub name: String,
    pub n: usize,
    /// 1-based position among all surfaces with this `n`
    pub ordinal: usize,
    pub file: String,
    /// 1-based line in `file`
    pub line: usize,
    #[serde(rename = "type")]
    pub topology: TopologicalType,
    pub key: InvariantKey,
    pub automorphism_order: u64,
    pub neighborly: bool,
    #[serde(default)]
    pub realization: RealizationStatus,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Index {
    pub entries: Vec<IndexEntry>,
}

/// What one CLI invocation did; enough to replay it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub version: String,
    pub threads: usize,
    pub wall_time_secs: f64,
    pub counts: BTreeMap<String, usize>,
}

/// Counts per `n` and type plus the first `n` at which each type occurs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    /// n -> (type name -> count), types in catalog order
    pub counts: BTreeMap<usize, Vec<(String, usize)>>,
    pub totals: BTreeMap<usize, usize>,
    /// type name -> (first n, lower bound from the Heawood formula)
    pub first_appearance: Vec<(String, usize, usize)>,
}

impl Report {
    pub fn table(&self) -> String {
        let mut out = String::new();
        for (n, row) in &self.counts {
            let cells: Vec<String> = row.iter().map(|(t, c)| format!("{t}:{c}")).collect();
            out.push_str(&format!("n={n:<3} {}  total:{}\n", cells.join(" "), self.totals[n]));
        }
        if !self.first_appearance.is_empty() {
            out.push_str("first appearance:\n");
            for (t, n, bound) in &self.first_appearance {
                out.push_str(&format!("  {t:<8} n={n:<3} heawood={bound}\n"));
            }
        }
        out
    }
}

pub fn surface_file_name(n: usize, t: &TopologicalType) -> String {
    format!("n{n}_{}.txt", t.slug())
}

pub fn entry_name(t: &TopologicalType, n: usize, ordinal: usize) -> String {
    format!("manifold_{}_{n}_{ordinal}", t.slug())
}

#[derive(Clone, Debug)]
pub struct Catalog {
    root: PathBuf,
}

impl Catalog {
    /// Opens (and creates if needed) a catalog directory.
    pub fn open(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        fs::create_dir_all(&root)?;
        Ok(Catalog { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    pub fn load_index(&self) -> Result<Index> {
        let p = self.path(INDEX);
        if !p.exists() {
            return Ok(Index::default());
        }
        let text = fs::read_to_string(&p)?;
        serde_json::from_str(&text).map_err(|e| Error::Catalog(format!("{}: {e}", p.display())))
    }

    pub fn save_index(&self, index: &Index) -> Result<()> {
        let mut text = serde_json::to_string_pretty(index)?;
        text.push('\n');
        write_atomic(&self.path(INDEX), text.as_bytes())
    }

    /// Replaces all entries with this `n` by `records` (already in catalog
    /// order). Realization states survive for entries whose name and file
    /// line are unchanged.
    pub fn store(&self, n: usize, records: &[SurfaceRecord]) -> Result<Vec<IndexEntry>> {
        let mut index = self.load_index()?;
        let old: HashMap<String, IndexEntry> = index
            .entries
            .iter()
            .filter(|e| e.n == n)
            .map(|e| (e.name.clone(), e.clone()))
            .collect();
        // stale files of this n
        for e in old.values() {
            let p = self.path(&e.file);
            if p.exists() {
                fs::remove_file(p)?;
            }
        }

        let mut files: BTreeMap<String, String> = BTreeMap::new();
        let mut entries = Vec::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if r.complex.n() != n {
                return Err(Error::Catalog(format!("record {} has n = {}, expected {n}", i + 1, r.complex.n())));
            }
            let file = surface_file_name(n, &r.topology);
            let body = files.entry(file.clone()).or_default();
            body.push_str(&r.complex.to_string());
            body.push('\n');
            let line = body.lines().count();
            let name = entry_name(&r.topology, n, i + 1);
            let realization = old
                .get(&name)
                .filter(|e| e.file == file && e.line == line && e.key == r.key)
                .map(|e| e.realization.clone())
                .unwrap_or_default();
            entries.push(IndexEntry {
                name,
                n,
                ordinal: i + 1,
                file,
                line,
                topology: r.topology,
                key: r.key.clone(),
                automorphism_order: r.automorphism_order,
                neighborly: r.neighborly,
                realization,
            });
        }
        for (file, body) in &files {
            write_atomic(&self.path(file), body.as_bytes())?;
        }
        index.entries.retain(|e| e.n != n);
        index.entries.extend(entries.iter().cloned());
        index.entries.sort_by_key(|e| (e.n, e.ordinal));
        self.save_index(&index)?;
        Ok(entries)
    }

    /// Reads the complex of an entry from its surface file.
    pub fn complex(&self, e: &IndexEntry) -> Result<TriangleSet> {
        let text = fs::read_to_string(self.path(&e.file))?;
        let line = text
            .lines()
            .nth(e.line - 1)
            .ok_or_else(|| Error::Catalog(format!("{}: {} has no line {}", e.name, e.file, e.line)))?;
        TriangleSet::parse_line(line, Some(e.n), e.line)
    }

    /// Writes coordinates for an entry and records the realization.
    pub fn set_realized(
        &self,
        index: &mut Index,
        name: &str,
        coords: &CoordinateAssignment,
        provenance: Provenance,
        tries: u64,
    ) -> Result<()> {
        fs::create_dir_all(self.path(COORDS))?;
        let rel = format!("{COORDS}/{name}.txt");
        write_atomic(&self.path(&rel), write_coordinates(coords).as_bytes())?;
        let e = find_mut(index, name)?;
        e.realization = RealizationStatus::Realized {
            provenance,
            tries,
            coords_file: rel,
        };
        Ok(())
    }

    pub fn set_unrealized(&self, index: &mut Index, name: &str, tries: u64) -> Result<()> {
        find_mut(index, name)?.realization = RealizationStatus::Unrealized { tries };
        Ok(())
    }

    pub fn append_manifest(&self, m: &RunManifest) -> Result<()> {
        let mut f = fs::OpenOptions::new().create(true).append(true).open(self.path(MANIFESTS))?;
        writeln!(f, "{}", serde_json::to_string(m)?)?;
        Ok(())
    }

    pub fn manifests(&self) -> Result<Vec<RunManifest>> {
        let p = self.path(MANIFESTS);
        if !p.exists() {
            return Ok(Vec::new());
        }
        fs::read_to_string(p)?
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(Error::from))
            .collect()
    }

    /// Problems found in the catalog, one message per offending entry or
    /// file. Empty means the catalog is consistent.
    pub fn validate(&self) -> Result<Vec<String>> {
        let index = self.load_index()?;
        let mut problems = Vec::new();
        let mut per_file: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
        let mut parsed: HashMap<&str, Vec<(usize, TriangleSet)>> = HashMap::new();
        for e in &index.entries {
            per_file.entry(&e.file).or_default().0 += 1;
            if !parsed.contains_key(e.file.as_str()) {
                let p = self.path(&e.file);
                match fs::read_to_string(&p).map_err(Error::from).and_then(|t| parse_complexes(&t, Some(e.n))) {
                    Ok(v) => {
                        per_file.get_mut(e.file.as_str()).expect("inserted").1 = v.len();
                        parsed.insert(&e.file, v);
                    }
                    Err(err) => {
                        problems.push(format!("{}: cannot read {}: {err}", e.name, e.file));
                        parsed.insert(&e.file, Vec::new());
                    }
                }
            }
            let Some((_, c)) = parsed[e.file.as_str()].iter().find(|(l, _)| *l == e.line) else {
                problems.push(format!("{}: {} has no line {}", e.name, e.file, e.line));
                continue;
            };
            if !verify_surface(c) {
                problems.push(format!("{}: not a closed connected surface", e.name));
            } else if InvariantKey::of(c) != e.key {
                problems.push(format!("{}: invariant key does not match the stored complex", e.name));
            }
            if let RealizationStatus::Realized { coords_file, .. } = &e.realization {
                if !self.path(coords_file).exists() {
                    problems.push(format!("{}: missing coordinate file {coords_file}", e.name));
                }
            }
        }
        for (file, (indexed, lines)) in per_file {
            if indexed != lines {
                problems.push(format!("{file}: {indexed} index entries but {lines} lines"));
            }
        }
        Ok(problems)
    }

    pub fn report(&self) -> Result<Report> {
        Ok(report_from(&self.load_index()?.entries))
    }
}

/// Counts by `n` and type.
pub fn report_from(entries: &[IndexEntry]) -> Report {
    let mut by_n: BTreeMap<usize, Vec<TopologicalType>> = BTreeMap::new();
    for e in entries {
        by_n.entry(e.n).or_default().push(e.topology);
    }
    let mut report = Report::default();
    let mut first: Vec<(TopologicalType, usize)> = Vec::new();
    for (n, types) in by_n {
        let mut row: Vec<(TopologicalType, usize)> = Vec::new();
        for t in &types {
            match row.iter_mut().find(|(x, _)| x == t) {
                Some((_, c)) => *c += 1,
                None => row.push((*t, 1)),
            }
            if !first.iter().any(|(x, _)| x == t) {
                first.push((*t, n));
            }
        }
        row.sort_by_key(|(t, _)| t.sort_key());
        report.totals.insert(n, types.len());
        report.counts.insert(n, row.into_iter().map(|(t, c)| (t.name(), c)).collect());
    }
    first.sort_by_key(|(t, _)| t.sort_key());
    report.first_appearance = first
        .into_iter()
        .map(|(t, n)| (t.name(), n, heawood_min_vertices(&t)))
        .collect();
    report
}

/// `S2:14 T2:7 RP2:16 K2:6 total:43`
pub fn summary_line(records: &[SurfaceRecord]) -> String {
    let mut parts: Vec<String> = type_counts(records).iter().map(|(t, c)| format!("{t}:{c}")).collect();
    parts.push(format!("total:{}", records.len()));
    parts.join(" ")
}

fn find_mut<'a>(index: &'a mut Index, name: &str) -> Result<&'a mut IndexEntry> {
    index
        .entries
        .iter_mut()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Catalog(format!("no entry named {name}")))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
