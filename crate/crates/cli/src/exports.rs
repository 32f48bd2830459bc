//! File exports. Every writer is deterministic: byte-identical output for
//! identical inputs. Tabular artifacts honor the `--format` flag (CSV or
//! JSON rows); reports and listings are always JSON.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Result;
use serde::Serialize;

use tempograph::clustering::{ClusterAssignment, ClusterProfile, Dendrogram, KSelection, Volumes};
use tempograph::event_graph::{ComponentSet, DtScanRecord, EventGraph, TemporalComponent};
use tempograph::events::{NetworkSummary, TemporalNetwork};
use tempograph::features::{feature_names, ComponentFeatures, FeatureVector};
use tempograph::motifs::{motif_names, MotifBase};
use tempograph::null_model::EnsembleStats;

use crate::compare::CompareReport;
use crate::config::PipelineConfig;
use crate::intervals::IntervalComponent;
use crate::pca::PcaReport;

/// Format of tabular exports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// One table cell; renders to CSV text or a JSON value.
#[derive(Clone, Debug)]
pub enum Cell {
    U(u64),
    F(f64),
    S(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::U(v) => v.to_string(),
            Cell::F(v) => format!("{v}"),
            Cell::S(v) => v.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::U(v) => serde_json::Value::from(*v),
            Cell::F(v) => serde_json::Number::from_f64(*v)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::S(v) => serde_json::Value::from(v.clone()),
        }
    }
}

fn write_table(
    dir: &Path,
    stem: &str,
    format: OutputFormat,
    header: &[String],
    rows: &[Vec<Cell>],
) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.{}", format.extension()));
    let mut out = BufWriter::new(File::create(&path)?);
    match format {
        OutputFormat::Csv => {
            writeln!(out, "{}", header.join(","))?;
            for row in rows {
                let rendered: Vec<String> = row.iter().map(Cell::csv).collect();
                writeln!(out, "{}", rendered.join(","))?;
            }
        }
        OutputFormat::Json => {
            let objects: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    let map: serde_json::Map<String, serde_json::Value> = header
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::json))
                        .collect();
                    serde_json::Value::Object(map)
                })
                .collect();
            serde_json::to_writer_pretty(&mut out, &objects)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(path)
}

fn write_json<T: Serialize>(dir: &Path, stem: &str, value: &T) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.json"));
    let mut out = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(path)
}

pub fn write_summary(dir: &Path, summary: &NetworkSummary) -> Result<PathBuf> {
    write_json(dir, "summary", summary)
}

/// Normalized re-serialization of the parsed events.
pub fn write_events(dir: &Path, network: &TemporalNetwork) -> Result<PathBuf> {
    let path = dir.join("events.csv");
    let mut out = BufWriter::new(File::create(&path)?);
    network.write_csv(&mut out)?;
    out.flush()?;
    Ok(path)
}

pub fn write_event_graph(
    dir: &Path,
    network: &TemporalNetwork,
    graph: &EventGraph,
    format: OutputFormat,
) -> Result<PathBuf> {
    let header =
        ["pred", "succ", "iet", "motif"].map(str::to_string).to_vec();
    let rows: Vec<Vec<Cell>> = graph
        .edges
        .iter()
        .map(|edge| {
            vec![
                Cell::U(edge.pred.0 as u64),
                Cell::U(edge.succ.0 as u64),
                Cell::F(edge.iet),
                Cell::S(edge.motif.map(|m| m.name(network.colors())).unwrap_or_default()),
            ]
        })
        .collect();
    write_table(dir, "event_graph", format, &header, &rows)
}

#[derive(Serialize)]
struct ComponentRecord {
    id: usize,
    n_events: usize,
    duration: f64,
    start: f64,
    end: f64,
    events: Vec<u32>,
}

#[derive(Serialize)]
struct ComponentListing {
    delta_t: f64,
    min_events: usize,
    n_components: usize,
    residual: tempograph::event_graph::Residual,
    components: Vec<ComponentRecord>,
}

pub fn write_components(
    dir: &Path,
    network: &TemporalNetwork,
    set: &ComponentSet,
    delta_t: f64,
    min_events: usize,
) -> Result<PathBuf> {
    let components = set
        .components
        .iter()
        .enumerate()
        .map(|(id, component)| {
            let (start, end) = component.time_range(network).unwrap_or((0.0, 0.0));
            ComponentRecord {
                id,
                n_events: component.n_events(),
                duration: component.duration(network),
                start,
                end,
                events: component.events.iter().map(|e| e.0).collect(),
            }
        })
        .collect();
    let listing = ComponentListing {
        delta_t,
        min_events,
        n_components: set.components.len(),
        residual: set.residual,
        components,
    };
    write_json(dir, "components", &listing)
}

pub fn write_scan(dir: &Path, records: &[DtScanRecord], format: OutputFormat) -> Result<PathBuf> {
    let header = ["delta_t", "n_components", "n_filtered", "largest"].map(str::to_string).to_vec();
    let rows: Vec<Vec<Cell>> = records
        .iter()
        .map(|r| {
            vec![
                Cell::F(r.delta_t),
                Cell::U(r.n_components as u64),
                Cell::U(r.n_filtered as u64),
                Cell::U(r.largest as u64),
            ]
        })
        .collect();
    write_table(dir, "dt_scan", format, &header, &rows)
}

/// Feature matrix: descriptors first, then the unit-length embedding in the
/// frozen feature order. This is the input contract for clustering and for
/// external tools.
pub fn write_features(
    dir: &Path,
    stem: &str,
    network: &TemporalNetwork,
    ids: &[usize],
    features: &[ComponentFeatures],
    vectors: &[FeatureVector],
    format: OutputFormat,
) -> Result<PathBuf> {
    let mut header = ["component_id", "n_nodes", "n_events", "duration", "edge_density"]
        .map(str::to_string)
        .to_vec();
    header.extend(feature_names(network.colors()));
    let rows: Vec<Vec<Cell>> = ids
        .iter()
        .zip(features.iter().zip(vectors))
        .map(|(&id, (f, v))| {
            let mut row = vec![
                Cell::U(id as u64),
                Cell::U(f.summary.n_nodes as u64),
                Cell::U(f.summary.n_events as u64),
                Cell::F(f.summary.duration),
                Cell::F(f.summary.edge_density),
            ];
            row.extend(v.as_slice().iter().map(|&value| Cell::F(value)));
            row
        })
        .collect();
    write_table(dir, stem, format, &header, &rows)
}

/// Raw motif prevalences per component, one column per canonical label.
pub fn write_motifs(
    dir: &Path,
    network: &TemporalNetwork,
    ids: &[usize],
    features: &[ComponentFeatures],
    format: OutputFormat,
) -> Result<PathBuf> {
    let mut header = vec!["component_id".to_string()];
    header.extend(motif_names(network.colors()));
    let rows: Vec<Vec<Cell>> = ids
        .iter()
        .zip(features)
        .map(|(&id, f)| {
            let mut row = vec![Cell::U(id as u64)];
            row.extend(f.prevalence.iter().map(|&p| Cell::F(p)));
            row
        })
        .collect();
    write_table(dir, "motifs", format, &header, &rows)
}

pub fn write_dendrogram(dir: &Path, dendrogram: &Dendrogram) -> Result<PathBuf> {
    write_json(dir, "dendrogram", dendrogram)
}

pub fn write_assignments(
    dir: &Path,
    ids: &[usize],
    assignment: &ClusterAssignment,
    format: OutputFormat,
) -> Result<PathBuf> {
    let header = ["component_id", "cluster"].map(str::to_string).to_vec();
    let rows: Vec<Vec<Cell>> = ids
        .iter()
        .zip(&assignment.labels)
        .map(|(&id, &label)| vec![Cell::U(id as u64), Cell::U(label as u64)])
        .collect();
    write_table(dir, "assignments", format, &header, &rows)
}

pub fn write_silhouette(dir: &Path, selection: &KSelection, format: OutputFormat) -> Result<PathBuf> {
    let header = ["k", "mean_silhouette"].map(str::to_string).to_vec();
    let rows: Vec<Vec<Cell>> = selection
        .profile
        .iter()
        .map(|&(k, score)| vec![Cell::U(k as u64), Cell::F(score)])
        .collect();
    write_table(dir, "silhouette", format, &header, &rows)
}

/// Cluster profile in a feature-rows-by-cluster-columns layout, motif
/// prevalences combined over colors.
pub fn write_profiles(dir: &Path, profile: &ClusterProfile, format: OutputFormat) -> Result<PathBuf> {
    let mut header = vec!["feature".to_string()];
    header.extend(profile.clusters.iter().map(|c| format!("cluster_{}", c.cluster)));

    let mut rows: Vec<Vec<Cell>> = Vec::new();
    let mut push_row = |name: &str, values: Vec<f64>| {
        let mut row = vec![Cell::S(name.to_string())];
        row.extend(values.into_iter().map(Cell::F));
        rows.push(row);
    };
    push_row("n_components", profile.clusters.iter().map(|c| c.n_components as f64).collect());
    push_row("n_nodes", profile.clusters.iter().map(|c| c.mean_nodes).collect());
    push_row("n_events", profile.clusters.iter().map(|c| c.mean_events).collect());
    push_row("duration", profile.clusters.iter().map(|c| c.mean_duration).collect());
    push_row("edge_density", profile.clusters.iter().map(|c| c.mean_edge_density).collect());
    for (i, base) in MotifBase::ALL.iter().enumerate() {
        push_row(
            &format!("motif_AB{}", base.second_letters()),
            profile.clusters.iter().map(|c| c.motif_prevalence_by_base[i]).collect(),
        );
    }
    push_row("motif_entropy", profile.clusters.iter().map(|c| c.motif_entropy).collect());
    push_row("iet_entropy", profile.clusters.iter().map(|c| c.iet_entropy).collect());
    push_row("imbalance_in_in", profile.clusters.iter().map(|c| c.imbalance_in_in).collect());
    push_row("imbalance_out_in", profile.clusters.iter().map(|c| c.imbalance_out_in).collect());
    push_row("imbalance_out_out", profile.clusters.iter().map(|c| c.imbalance_out_out).collect());
    push_row("clustering", profile.clusters.iter().map(|c| c.clustering).collect());
    push_row("reciprocity", profile.clusters.iter().map(|c| c.reciprocity).collect());
    push_row("activity", profile.clusters.iter().map(|c| c.activity).collect());

    write_table(dir, "profiles", format, &header, &rows)
}

pub fn write_volumes(dir: &Path, volumes: &Volumes, format: OutputFormat) -> Result<PathBuf> {
    let mut header = ["bin_index", "bin_start", "total"].map(str::to_string).to_vec();
    header.extend((0..volumes.k).map(|c| format!("cluster_{c}")));
    header.push("residual".to_string());
    let rows: Vec<Vec<Cell>> = volumes
        .bins
        .iter()
        .map(|bin| {
            let mut row =
                vec![Cell::U(bin.index as u64), Cell::F(bin.start), Cell::U(bin.total)];
            row.extend(bin.fractions().into_iter().map(Cell::F));
            row
        })
        .collect();
    write_table(dir, "volumes", format, &header, &rows)
}

/// Rows `(rank, event time)` for the `top_n` components with the most
/// events inside the window. Rank 1 is the largest within the window.
pub fn barcode_rows(
    network: &TemporalNetwork,
    components: &[TemporalComponent],
    window: (f64, f64),
    top_n: usize,
) -> tempograph::error::Result<Vec<(usize, f64)>> {
    if top_n == 0 {
        return Err(tempograph::error::Error::InvalidParameter(
            "barcode top_n must be >= 1".to_string(),
        ));
    }
    let (start, end) = window;
    let mut counted: Vec<(usize, Vec<f64>)> = components
        .iter()
        .enumerate()
        .map(|(index, component)| {
            let times: Vec<f64> = component
                .events
                .iter()
                .map(|&id| network.event(id).time)
                .filter(|&t| t >= start && t <= end)
                .collect();
            (index, times)
        })
        .filter(|(_, times)| !times.is_empty())
        .collect();
    counted.sort_by_key(|(index, times)| (std::cmp::Reverse(times.len()), *index));
    let mut rows = Vec::new();
    for (rank, (_, times)) in counted.into_iter().take(top_n).enumerate() {
        for time in times {
            rows.push((rank + 1, time));
        }
    }
    Ok(rows)
}

pub fn write_barcode(dir: &Path, rows: &[(usize, f64)], format: OutputFormat) -> Result<PathBuf> {
    let header = ["rank", "time"].map(str::to_string).to_vec();
    let table: Vec<Vec<Cell>> =
        rows.iter().map(|&(rank, time)| vec![Cell::U(rank as u64), Cell::F(time)]).collect();
    write_table(dir, "barcode", format, &header, &table)
}

pub fn write_pca(dir: &Path, report: &PcaReport) -> Result<PathBuf> {
    write_json(dir, "pca", report)
}

pub fn write_ensemble(dir: &Path, stats: &EnsembleStats) -> Result<PathBuf> {
    write_json(dir, "ensemble", stats)
}

#[derive(Serialize)]
struct IntervalListing<'a> {
    width: f64,
    offset: f64,
    static_sub_components: bool,
    n_units: usize,
    units: &'a [IntervalComponent],
}

pub fn write_intervals(
    dir: &Path,
    units: &[IntervalComponent],
    width: f64,
    offset: f64,
    static_sub_components: bool,
) -> Result<PathBuf> {
    write_json(
        dir,
        "intervals",
        &IntervalListing { width, offset, static_sub_components, n_units: units.len(), units },
    )
}

pub fn write_compare(dir: &Path, report: &CompareReport) -> Result<PathBuf> {
    write_json(dir, "compare", report)
}

#[derive(Serialize)]
struct Artifact {
    name: String,
    path: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config_hash: String,
    seed: u64,
    config: &'a PipelineConfig,
    artifacts: Vec<Artifact>,
}

/// Provenance record listing every artifact with the config hash and seed.
pub fn write_manifest(
    dir: &Path,
    config: &PipelineConfig,
    artifacts: &[(String, PathBuf)],
) -> Result<PathBuf> {
    let manifest = Manifest {
        tool: "tempograph",
        version: env!("CARGO_PKG_VERSION"),
        config_hash: config.hash(),
        seed: config.seed,
        config,
        artifacts: artifacts
            .iter()
            .map(|(name, path)| Artifact {
                name: name.clone(),
                path: path
                    .file_name()
                    .map(|f| f.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string()),
            })
            .collect(),
    };
    write_json(dir, "manifest", &manifest)
}
