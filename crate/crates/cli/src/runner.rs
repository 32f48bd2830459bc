//! End-to-end orchestration shared by the `run` command and the individual
//! subcommands. Every stage is a pure function of (input, config), so
//! repeated runs produce byte-identical artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use tempograph::clustering::{
    cluster_profile, cluster_volumes, cut, select_k, ward_linkage, ClusterAssignment,
    Dendrogram, DistanceMatrix, KSelection,
};
use tempograph::event_graph::{build_event_graph, components, ComponentSet, EventGraph};
use tempograph::events::{ParseReport, TemporalNetwork};
use tempograph::features::{extract_all, feature_names, ComponentFeatures, FeatureVector};
use tempograph::null_model::{ensemble_run, EnsembleParams};

use crate::compare::compare_decompositions;
use crate::config::PipelineConfig;
use crate::exports::{self, OutputFormat};
use crate::pca::pca;

/// Parse an input file, choosing CSV or JSONL by extension.
pub fn load_network(path: &Path, config: &PipelineConfig) -> Result<(TemporalNetwork, ParseReport)> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let reader = std::io::BufReader::new(file);
    let options = config.parse_options();
    let is_jsonl = path
        .extension()
        .map(|e| matches!(e.to_string_lossy().as_ref(), "jsonl" | "ndjson" | "json"))
        .unwrap_or(false);
    let parsed = if is_jsonl {
        TemporalNetwork::parse_jsonl(reader, &options)
    } else {
        TemporalNetwork::parse_csv(reader, &options)
    };
    parsed.with_context(|| format!("parsing {}", path.display()))
}

/// Components decomposed at the configured threshold.
pub fn decompose(graph: &EventGraph, config: &PipelineConfig) -> Result<ComponentSet> {
    Ok(components(graph, config.delta_t, config.min_events)?)
}

/// Embeddings of every component that carries at least one motif-labeled
/// edge. Returns the indices (into the component list) that were embedded.
pub struct FeatureStage {
    pub ids: Vec<usize>,
    pub features: Vec<ComponentFeatures>,
    pub vectors: Vec<FeatureVector>,
    pub skipped: usize,
}

pub fn feature_stage(
    network: &TemporalNetwork,
    set: &ComponentSet,
    config: &PipelineConfig,
) -> Result<FeatureStage> {
    let params = config.embed_params();
    let ids: Vec<usize> = set
        .components
        .iter()
        .enumerate()
        .filter(|(_, c)| c.has_motif_edges())
        .map(|(i, _)| i)
        .collect();
    let embeddable: Vec<_> = ids.iter().map(|&i| set.components[i].clone()).collect();
    let features = extract_all(network, &embeddable, &params)?;
    let vectors: Vec<FeatureVector> = features.iter().map(|f| f.vector()).collect();
    let skipped = set.components.len() - ids.len();
    Ok(FeatureStage { ids, features, vectors, skipped })
}

/// Feature extraction plus hierarchy, cluster-count selection, and the flat
/// assignment. Clustering is skipped (with a warning) when there are too few
/// embeddable components for the configured k range.
pub struct ClusterStage {
    pub stage: FeatureStage,
    pub dendrogram: Option<Dendrogram>,
    pub selection: Option<KSelection>,
    pub assignment: Option<ClusterAssignment>,
    pub warnings: Vec<String>,
}

pub fn cluster_stage(
    network: &TemporalNetwork,
    set: &ComponentSet,
    config: &PipelineConfig,
    forced_k: Option<usize>,
) -> Result<ClusterStage> {
    let stage = feature_stage(network, set, config)?;
    let mut warnings = Vec::new();
    if stage.skipped > 0 {
        warnings.push(format!("{} component(s) without motif edges skipped", stage.skipped));
    }
    let n = stage.vectors.len();
    let k_max = config.k_max.min(n.saturating_sub(1));
    if n < 3 || config.k_min > k_max {
        warnings.push(format!(
            "clustering skipped: {n} embeddable component(s) cannot support k >= {}",
            config.k_min
        ));
        return Ok(ClusterStage { stage, dendrogram: None, selection: None, assignment: None, warnings });
    }
    let dist = DistanceMatrix::from_vectors(&stage.vectors)?;
    let dendrogram = ward_linkage(&dist)?;
    let selection = select_k(
        &stage.vectors,
        &dendrogram,
        config.k_min,
        k_max,
        config.silhouette_method(),
    )?;
    let k = match forced_k {
        Some(k) => k,
        None => selection.best_k,
    };
    let assignment = cut(&dendrogram, k)?;
    Ok(ClusterStage {
        stage,
        dendrogram: Some(dendrogram),
        selection: Some(selection),
        assignment: Some(assignment),
        warnings,
    })
}

/// Artifacts written by a pipeline run.
pub struct RunOutcome {
    pub artifacts: Vec<(String, PathBuf)>,
    pub warnings: Vec<String>,
}

impl RunOutcome {
    fn record(&mut self, name: &str, path: PathBuf) {
        self.artifacts.push((name.to_string(), path));
    }
}

/// The full pipeline: summary, event graph, components, features, motifs,
/// clustering, profiles, volumes, PCA, barcode, optional shuffle ensemble,
/// comparison, and the manifest.
pub fn run_pipeline(
    network: &TemporalNetwork,
    config: &PipelineConfig,
    out_dir: &Path,
    format: OutputFormat,
    with_ensemble: bool,
) -> Result<RunOutcome> {
    fs::create_dir_all(out_dir)?;
    let mut outcome = RunOutcome { artifacts: Vec::new(), warnings: Vec::new() };

    outcome.record("summary", exports::write_summary(out_dir, &network.summarize())?);
    if network.is_empty() {
        anyhow::bail!("input network is empty");
    }

    let graph = build_event_graph(network);
    outcome.record("event_graph", exports::write_event_graph(out_dir, network, &graph, format)?);

    let set = decompose(&graph, config)?;
    outcome.record(
        "components",
        exports::write_components(out_dir, network, &set, config.delta_t, config.min_events)?,
    );

    let span = network.time_span().expect("nonempty network");
    let barcode = exports::barcode_rows(network, &set.components, span, config.barcode_top)?;
    outcome.record("barcode", exports::write_barcode(out_dir, &barcode, format)?);

    let clustered = cluster_stage(network, &set, config, None)?;
    outcome.warnings.extend(clustered.warnings.iter().cloned());
    let stage = &clustered.stage;
    outcome.record(
        "features",
        exports::write_features(
            out_dir, "features", network, &stage.ids, &stage.features, &stage.vectors, format,
        )?,
    );
    outcome.record(
        "motifs",
        exports::write_motifs(out_dir, network, &stage.ids, &stage.features, format)?,
    );

    if let (Some(dendrogram), Some(selection), Some(assignment)) =
        (&clustered.dendrogram, &clustered.selection, &clustered.assignment)
    {
        outcome.record("dendrogram", exports::write_dendrogram(out_dir, dendrogram)?);
        outcome.record("silhouette", exports::write_silhouette(out_dir, selection, format)?);
        outcome.record(
            "assignments",
            exports::write_assignments(out_dir, &stage.ids, assignment, format)?,
        );
        let profile = cluster_profile(&stage.features, assignment)?;
        outcome.record("profiles", exports::write_profiles(out_dir, &profile, format)?);
        let member_components: Vec<_> =
            stage.ids.iter().map(|&i| set.components[i].clone()).collect();
        let volumes =
            cluster_volumes(network, &member_components, assignment, config.volume_bin_width)?;
        outcome.record("volumes", exports::write_volumes(out_dir, &volumes, format)?);
    } else {
        // no clustering: every event is residual, but the series still ships
        let empty = ClusterAssignment { labels: Vec::new(), k: 0 };
        let volumes = cluster_volumes(network, &[], &empty, config.volume_bin_width)?;
        outcome.record("volumes", exports::write_volumes(out_dir, &volumes, format)?);
    }

    if stage.vectors.len() >= 2 {
        let rows: Vec<Vec<f64>> =
            stage.vectors.iter().map(|v| v.as_slice().to_vec()).collect();
        let dim = rows[0].len();
        let names = feature_names(network.colors());
        let report = pca(&rows, config.pca_components.min(dim), 3, Some(&names))?;
        outcome.record("pca", exports::write_pca(out_dir, &report)?);
    } else {
        outcome.warnings.push("pca skipped: fewer than 2 embedded components".to_string());
    }

    match compare_decompositions(network, &graph, config) {
        Ok(report) => {
            outcome.record("compare", exports::write_compare(out_dir, &report)?);
        }
        Err(error) => outcome.warnings.push(format!("comparison skipped: {error}")),
    }

    if with_ensemble {
        let stats = ensemble_run(
            network,
            &EnsembleParams {
                n_replicates: config.ensemble_size,
                delta_t: config.delta_t,
                min_events: config.min_events,
                n_bins: config.n_bins,
                base_seed: config.seed,
            },
        )?;
        outcome.record("ensemble", exports::write_ensemble(out_dir, &stats)?);
    }

    let manifest = exports::write_manifest(out_dir, config, &outcome.artifacts)?;
    outcome.record("manifest", manifest);
    Ok(outcome)
}
