//! File formats: NDJSON networks and draws, JSON label summaries, CSV traces
//! and metrics, and a directory-of-edge-lists importer.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{NsbmError, Result};
use crate::model::{Draw, Network, NetworkCollection, TraceRow};
use crate::netcore::Adjacency;

/// One line of a network file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkRecord {
    pub id: String,
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub z_true: Option<usize>,
    #[serde(default)]
    pub xi_true: Option<Vec<usize>>,
}

impl From<&Network> for NetworkRecord {
    fn from(net: &Network) -> Self {
        NetworkRecord {
            id: net.id.clone(),
            n: net.n(),
            edges: net.adj.edges().map(|(s, t)| [s, t]).collect(),
            z_true: net.z_true,
            xi_true: net.xi_true.clone(),
        }
    }
}

impl TryFrom<NetworkRecord> for Network {
    type Error = NsbmError;

    fn try_from(rec: NetworkRecord) -> Result<Self> {
        let adj = Adjacency::from_edges(rec.n, rec.edges.iter().map(|e| (e[0], e[1])))?;
        Ok(Network {
            id: rec.id,
            adj,
            z_true: rec.z_true,
            xi_true: rec.xi_true,
        })
    }
}

// Parses one JSON value per non-blank line, tagging errors with the line number.
fn read_ndjson<T, R>(reader: R, what: &str) -> Result<Vec<T>>
where
    T: for<'de> Deserialize<'de>,
    R: Read,
{
    let mut out = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line)
            .map_err(|e| NsbmError::Parse(format!("{what} line {}: {e}", i + 1)))?;
        out.push(value);
    }
    Ok(out)
}

fn write_ndjson<T: Serialize, W: Write>(items: impl IntoIterator<Item = T>, writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    for item in items {
        serde_json::to_writer(&mut w, &item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_networks<R: Read>(reader: R) -> Result<NetworkCollection> {
    let records: Vec<NetworkRecord> = read_ndjson(reader, "network file")?;
    if records.is_empty() {
        return Err(NsbmError::Empty("network file has no records".into()));
    }
    let networks = records
        .into_iter()
        .map(Network::try_from)
        .collect::<Result<Vec<_>>>()?;
    NetworkCollection::new(networks)
}

pub fn write_networks<W: Write>(data: &NetworkCollection, writer: W) -> Result<()> {
    write_ndjson(data.networks().iter().map(NetworkRecord::from), writer)
}

pub fn read_networks_file(path: &Path) -> Result<NetworkCollection> {
    read_networks(File::open(path)?)
}

/// Reads every regular file of `dir` (sorted by name) as one network with
/// one `s t` pair per line. Blank lines and `#` comments are skipped; the
/// node count is one more than the largest index.
pub fn read_edgelist_dir(dir: &Path) -> Result<NetworkCollection> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.is_file());
    paths.sort();
    if paths.is_empty() {
        return Err(NsbmError::Empty(format!("no edge-list files in {}", dir.display())));
    }
    let networks = paths
        .iter()
        .map(|path| {
            let text = fs::read_to_string(path)?;
            let id = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            let adj = parse_edgelist(&text).map_err(|e| match e {
                NsbmError::Parse(m) => NsbmError::Parse(format!("{}: {m}", path.display())),
                other => other,
            })?;
            Ok(Network::new(id, adj))
        })
        .collect::<Result<Vec<_>>>()?;
    NetworkCollection::new(networks)
}

pub fn parse_edgelist(text: &str) -> Result<Adjacency> {
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace().map(str::parse::<usize>);
        match (fields.next(), fields.next(), fields.next()) {
            (Some(Ok(s)), Some(Ok(t)), None) => edges.push((s, t)),
            _ => return Err(NsbmError::Parse(format!("line {}: expected two node indices", i + 1))),
        }
    }
    let n = edges.iter().map(|&(s, t)| s.max(t) + 1).max().unwrap_or(0);
    Adjacency::from_edges(n, edges)
}

pub fn read_draws<R: Read>(reader: R) -> Result<Vec<Draw>> {
    read_ndjson(reader, "samples file")
}

pub fn write_draws<W: Write>(draws: &[Draw], writer: W) -> Result<()> {
    write_ndjson(draws, writer)
}

/// Point estimate written by `summarize`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelsRecord {
    pub run_id: String,
    pub z: Vec<usize>,
    pub xi: Vec<Vec<usize>>,
}

pub fn read_labels<R: Read>(reader: R) -> Result<LabelsRecord> {
    serde_json::from_reader(BufReader::new(reader))
        .map_err(|e| NsbmError::Parse(format!("labels file: {e}")))
}

pub fn write_labels<W: Write>(labels: &LabelsRecord, writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    serde_json::to_writer(&mut w, labels)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub const TRACE_HEADER: [&str; 7] = [
    "iter",
    "log_density",
    "occupied_classes",
    "mean_occupied_communities",
    "z_nmi",
    "xi_nmi",
    "elapsed_ms",
];

/// Trace CSV; missing values are empty fields.
pub fn write_trace<W: Write>(rows: &[TraceRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TRACE_HEADER)?;
    for r in rows {
        w.write_record([
            r.iter.to_string(),
            r.log_density.to_string(),
            r.occupied_classes.to_string(),
            r.mean_occupied_communities.to_string(),
            opt(r.z_nmi),
            opt(r.xi_nmi),
            opt(r.elapsed_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One line of the metrics CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub run_id: String,
    pub z_nmi: f64,
    pub mean_xi_nmi: f64,
}

pub fn write_metrics<W: Write>(rows: &[MetricsRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["run_id", "z_nmi", "mean_xi_nmi"])?;
    for r in rows {
        w.write_record([r.run_id.clone(), r.z_nmi.to_string(), r.mean_xi_nmi.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
