//! Head-to-head comparison of the temporal-component decomposition against
//! fixed-width intervals and their static sub-components: silhouette
//! profiles per decomposition plus spanning fractions at several widths.

use serde::Serialize;

use tempograph::clustering::{select_k, ward_linkage, DistanceMatrix};
use tempograph::error::{Error, Result};
use tempograph::event_graph::{components, EventGraph, TemporalComponent};
use tempograph::events::TemporalNetwork;
use tempograph::features::{embed, EmbedParams, FeatureVector};

use crate::config::PipelineConfig;
use crate::intervals::{interval_decompose, spanning_fraction, units_as_components};

/// Clustering quality of one decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub label: String,
    /// Units at or above `min_events`.
    pub n_units: usize,
    /// Units that could be embedded (at least one motif-labeled edge).
    pub n_embedded: usize,
    pub best_k: Option<usize>,
    pub best_silhouette: Option<f64>,
    /// `(k, mean silhouette)` rows.
    pub profile: Vec<(usize, f64)>,
    pub warning: Option<String>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SpanningEntry {
    pub width: f64,
    pub fraction: f64,
}

/// Full comparison report.
#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub interval_width: f64,
    pub temporal: DecompositionReport,
    pub intervals: DecompositionReport,
    pub interval_static: DecompositionReport,
    /// Spanning fractions of the temporal components at three widths:
    /// four minutes, the chosen interval width, and twenty minutes.
    pub spanning: Vec<SpanningEntry>,
}

fn embed_units(
    network: &TemporalNetwork,
    units: Vec<TemporalComponent>,
    min_events: usize,
    params: &EmbedParams,
) -> Result<(usize, Vec<FeatureVector>)> {
    let kept: Vec<&TemporalComponent> =
        units.iter().filter(|u| u.n_events() >= min_events).collect();
    let n_units = kept.len();
    let vectors = kept
        .iter()
        .filter(|u| u.has_motif_edges())
        .map(|u| embed(network, u, params))
        .collect::<Result<Vec<_>>>()?;
    Ok((n_units, vectors))
}

fn report_for(
    label: &str,
    n_units: usize,
    vectors: &[FeatureVector],
    config: &PipelineConfig,
) -> DecompositionReport {
    let n = vectors.len();
    let k_max = config.k_max.min(n.saturating_sub(1));
    if n < 3 || config.k_min > k_max {
        return DecompositionReport {
            label: label.to_string(),
            n_units,
            n_embedded: n,
            best_k: None,
            best_silhouette: None,
            profile: Vec::new(),
            warning: Some(format!("{n} embeddable units: too few to cluster")),
        };
    }
    let selection = DistanceMatrix::from_vectors(vectors)
        .and_then(|dist| ward_linkage(&dist))
        .and_then(|dendrogram| {
            select_k(vectors, &dendrogram, config.k_min, k_max, config.silhouette_method())
        });
    match selection {
        Ok(selection) => {
            let best = selection.profile.iter().find(|(k, _)| *k == selection.best_k).copied();
            DecompositionReport {
                label: label.to_string(),
                n_units,
                n_embedded: n,
                best_k: Some(selection.best_k),
                best_silhouette: best.map(|(_, score)| score),
                profile: selection.profile,
                warning: None,
            }
        }
        Err(error) => DecompositionReport {
            label: label.to_string(),
            n_units,
            n_embedded: n,
            best_k: None,
            best_silhouette: None,
            profile: Vec::new(),
            warning: Some(error.to_string()),
        },
    }
}

/// Interval width to use when the config leaves it unset: the mean duration
/// of the temporal components.
pub fn default_interval_width(
    network: &TemporalNetwork,
    temporal: &[TemporalComponent],
) -> Option<f64> {
    if temporal.is_empty() {
        return None;
    }
    let mean =
        temporal.iter().map(|c| c.duration(network)).sum::<f64>() / temporal.len() as f64;
    Some(mean.max(1.0))
}

/// Run all three decompositions and assemble the comparison.
pub fn compare_decompositions(
    network: &TemporalNetwork,
    graph: &EventGraph,
    config: &PipelineConfig,
) -> Result<CompareReport> {
    let params = config.embed_params();
    let temporal_set = components(graph, config.delta_t, config.min_events)?;
    let mean_duration = default_interval_width(network, &temporal_set.components)
        .ok_or(Error::EmptyInput("no temporal components to derive an interval width from"))?;
    let width = config.interval_width.unwrap_or(mean_duration);

    // four minutes, the mean component duration, and twenty minutes
    let spanning = [240.0, mean_duration, 1200.0]
        .into_iter()
        .map(|w| {
            Ok(SpanningEntry {
                width: w,
                fraction: spanning_fraction(network, &temporal_set.components, w, config.interval_offset)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let (n_temporal, temporal_vectors) =
        embed_units(network, temporal_set.components, config.min_events, &params)?;
    let temporal = report_for("temporal_components", n_temporal, &temporal_vectors, config);

    let whole_units = units_as_components(
        graph,
        &interval_decompose(network, width, config.interval_offset, false)?,
    );
    let (n_whole, whole_vectors) = embed_units(network, whole_units, config.min_events, &params)?;
    let intervals = report_for("intervals", n_whole, &whole_vectors, config);

    let static_units = units_as_components(
        graph,
        &interval_decompose(network, width, config.interval_offset, true)?,
    );
    let (n_static, static_vectors) =
        embed_units(network, static_units, config.min_events, &params)?;
    let interval_static = report_for("interval_static_components", n_static, &static_vectors, config);

    Ok(CompareReport { interval_width: width, temporal, intervals, interval_static, spanning })
}
