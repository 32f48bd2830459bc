//! Scale-invariant features of a temporal component and the unit-length
//! embedding assembled from them.
//!
//! Feature order is frozen: the `6*c^2` motif prevalences in canonical
//! order, then normalized motif entropy, normalized inter-event-time
//! entropy, the three degree imbalances mapped to `[0,1]`, clustering
//! coefficient, reciprocity, and transformed activity. That gives
//! `6*c^2 + 8` dimensions (32 at two colors), finally rescaled to unit
//! Euclidean length.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::event_graph::{threshold, EventGraph, TemporalComponent};
use crate::events::{EventId, NodeId, TemporalNetwork};
use crate::motifs::MotifDistribution;

/// Duration floor (seconds) applied when computing activity, so that
/// simultaneous-event components keep a finite rate.
pub const DURATION_FLOOR: f64 = 1.0;

/// Binary directed graph aggregated from a component's events.
#[derive(Clone, Debug)]
pub struct AggregatedGraph {
    nodes: Vec<NodeId>,
    /// Directed dense-index pairs, sorted, deduplicated, no self-loops.
    edges: Vec<(usize, usize)>,
    in_degree: Vec<usize>,
    out_degree: Vec<usize>,
}

impl AggregatedGraph {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Directed edges as dense node indices.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.binary_search(&(from, to)).is_ok()
    }

    /// Build directly from directed label pairs (used by tests and oracles).
    /// Self-loop pairs register their node but contribute no edge.
    pub fn from_pairs(pairs: &[(u32, u32)]) -> AggregatedGraph {
        let mut nodes: Vec<NodeId> = pairs.iter().flat_map(|&(u, v)| [NodeId(u), NodeId(v)]).collect();
        nodes.sort_unstable();
        nodes.dedup();
        let index: HashMap<NodeId, usize> =
            nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut edges: Vec<(usize, usize)> = pairs
            .iter()
            .filter(|&&(u, v)| u != v)
            .map(|&(u, v)| (index[&NodeId(u)], index[&NodeId(v)]))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let mut graph = AggregatedGraph {
            nodes,
            edges,
            in_degree: Vec::new(),
            out_degree: Vec::new(),
        };
        graph.recompute_degrees();
        graph
    }

    fn recompute_degrees(&mut self) {
        self.in_degree = vec![0; self.nodes.len()];
        self.out_degree = vec![0; self.nodes.len()];
        for &(u, v) in &self.edges {
            self.out_degree[u] += 1;
            self.in_degree[v] += 1;
        }
    }

    /// Undirected neighbor sets (direction ignored, no self-loops).
    fn undirected_neighbors(&self) -> Vec<HashSet<usize>> {
        let mut neighbors = vec![HashSet::new(); self.nodes.len()];
        for &(u, v) in &self.edges {
            neighbors[u].insert(v);
            neighbors[v].insert(u);
        }
        neighbors
    }
}

/// Which degree an imbalance compares on each side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degree {
    In,
    Out,
}

/// Size descriptors of a component. These depend on component scale and are
/// reported alongside the embedding, never inside it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComponentSummary {
    pub n_nodes: usize,
    pub n_events: usize,
    /// Lifetime in seconds, `max t - min t` (raw, no floor).
    pub duration: f64,
    /// Directed edge density of the aggregated graph; zero when fewer than
    /// two nodes.
    pub edge_density: f64,
}

/// Everything measured on one component: raw feature values plus their
/// normalized forms and the size descriptors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentFeatures {
    /// Motif prevalences in canonical order (already in `[0,1]`).
    pub prevalence: Vec<f64>,
    /// Motif entropy in bits and its `[0,1]` normalization.
    pub motif_entropy: f64,
    pub motif_entropy_norm: f64,
    /// Inter-event-time entropy in bits and its `[0,1]` normalization.
    pub iet_entropy: f64,
    pub iet_entropy_norm: f64,
    /// Raw degree imbalances in `[-1,1]`.
    pub imbalance_in_in: f64,
    pub imbalance_out_in: f64,
    pub imbalance_out_out: f64,
    pub clustering: f64,
    pub reciprocity: f64,
    /// Events per second (duration floored at [`DURATION_FLOOR`]).
    pub activity: f64,
    /// `1 - exp(-activity)`.
    pub activity_norm: f64,
    pub summary: ComponentSummary,
}

impl ComponentFeatures {
    /// Assemble the unit-length embedding in the frozen feature order.
    pub fn vector(&self) -> FeatureVector {
        let mut values = self.prevalence.clone();
        values.push(self.motif_entropy_norm);
        values.push(self.iet_entropy_norm);
        values.push((self.imbalance_in_in + 1.0) / 2.0);
        values.push((self.imbalance_out_in + 1.0) / 2.0);
        values.push((self.imbalance_out_out + 1.0) / 2.0);
        values.push(self.clustering);
        values.push(self.reciprocity);
        values.push(self.activity_norm);
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        debug_assert!(norm > 0.0);
        for value in &mut values {
            *value /= norm;
        }
        FeatureVector { values }
    }
}

/// A unit-length embedding of one component.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    /// Wrap raw values (used by tests and by callers embedding external
    /// data); no normalization is applied.
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn euclidean_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &FeatureVector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }
}

/// Embedding dimension for a color count: `6*c^2 + 8`.
pub fn embedding_dim(n_colors: usize) -> usize {
    6 * n_colors * n_colors + 8
}

/// Column names in the frozen feature order.
pub fn feature_names(colors: &[String]) -> Vec<String> {
    let mut names = crate::motifs::motif_names(colors);
    names.extend(
        [
            "motif_entropy",
            "iet_entropy",
            "imbalance_in_in",
            "imbalance_out_in",
            "imbalance_out_out",
            "clustering",
            "reciprocity",
            "activity",
        ]
        .map(str::to_string),
    );
    names
}

/// Parameters of the embedding.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EmbedParams {
    /// Number of equal-width inter-event-time bins over `[0, delta_t]`.
    pub n_bins: usize,
    /// Threshold the component was extracted at; bounds the bin domain.
    pub delta_t: f64,
}

/// Binary aggregation of a component: an edge u→v exists iff some event
/// (u,v,t) occurred. Self-loop events contribute their node but no edge.
pub fn aggregate(network: &TemporalNetwork, component: &TemporalComponent) -> AggregatedGraph {
    let pairs: Vec<(u32, u32)> = component
        .events
        .iter()
        .map(|&id| {
            let event = network.event(id);
            (event.source.0, event.target.0)
        })
        .collect();
    AggregatedGraph::from_pairs(&pairs)
}

/// Shannon entropy (bits) of a motif distribution and its normalization by
/// `log2(6*c^2)`.
pub fn motif_entropy(dist: &MotifDistribution) -> (f64, f64) {
    let entropy = shannon_entropy(&dist.prevalences());
    let max_entropy = (dist.counts().len() as f64).log2();
    (entropy, entropy / max_entropy)
}

fn shannon_entropy(probabilities: &[f64]) -> f64 {
    -probabilities.iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()).sum::<f64>()
}

/// Entropy (bits) of the component's inter-event times discretised into
/// `n_bins` equal-width bins over `[0, delta_t]`, and its normalization by
/// `log2(n_bins)`.
///
/// Values at or above `delta_t` land in the last bin; for components
/// extracted at `delta_t` this never widens a bin, and it keeps interval
/// units (whose edges are not thresholded) on the same code path.
pub fn iet_entropy(component: &TemporalComponent, n_bins: usize, delta_t: f64) -> Result<(f64, f64)> {
    if n_bins < 2 {
        return Err(Error::InvalidParameter("n_bins must be >= 2".to_string()));
    }
    if !delta_t.is_finite() || delta_t <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "delta_t {delta_t} must be finite and positive for binning"
        )));
    }
    if component.edges.is_empty() {
        return Err(Error::NoEdges);
    }
    let width = delta_t / n_bins as f64;
    let mut counts = vec![0u64; n_bins];
    for edge in &component.edges {
        let bin = ((edge.iet / width) as usize).min(n_bins - 1);
        counts[bin] += 1;
    }
    let total = component.edges.len() as f64;
    let probabilities: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
    let entropy = shannon_entropy(&probabilities);
    Ok((entropy, entropy / (n_bins as f64).log2()))
}

/// Normalized mean difference between the `alpha`-degree of edge sources and
/// the `beta`-degree of edge targets, in `[-1,1]`. Zero when every per-edge
/// difference vanishes.
pub fn degree_imbalance(graph: &AggregatedGraph, alpha: Degree, beta: Degree) -> Result<f64> {
    if graph.edges.is_empty() {
        return Err(Error::NoEdges);
    }
    let degree = |which: Degree, node: usize| -> f64 {
        match which {
            Degree::In => graph.in_degree[node] as f64,
            Degree::Out => graph.out_degree[node] as f64,
        }
    };
    let mut sum = 0.0;
    let mut max_abs: f64 = 0.0;
    for &(u, v) in &graph.edges {
        let diff = degree(alpha, u) - degree(beta, v);
        sum += diff;
        max_abs = max_abs.max(diff.abs());
    }
    if max_abs == 0.0 {
        return Ok(0.0);
    }
    Ok(sum / graph.edges.len() as f64 / max_abs)
}

/// Global transitivity of the undirected view: `3 * triangles / connected
/// triples`. Zero when no connected triples exist.
pub fn clustering_coefficient(graph: &AggregatedGraph) -> f64 {
    let neighbors = graph.undirected_neighbors();
    let mut triples = 0u64;
    let mut closed = 0u64;
    for adjacent in &neighbors {
        let k = adjacent.len() as u64;
        triples += k * k.saturating_sub(1) / 2;
        // Closed pairs centered at this node.
        let list: Vec<usize> = adjacent.iter().copied().collect();
        for i in 0..list.len() {
            for j in (i + 1)..list.len() {
                if neighbors[list[i]].contains(&list[j]) {
                    closed += 1;
                }
            }
        }
    }
    if triples == 0 {
        0.0
    } else {
        closed as f64 / triples as f64
    }
}

/// Fraction of directed edges whose reverse edge also exists.
pub fn reciprocity(graph: &AggregatedGraph) -> Result<f64> {
    if graph.edges.is_empty() {
        return Err(Error::NoEdges);
    }
    let reciprocated =
        graph.edges.iter().filter(|&&(u, v)| graph.has_edge(v, u)).count();
    Ok(reciprocated as f64 / graph.edges.len() as f64)
}

/// Directed edge density `m / (N * (N - 1))`.
pub fn edge_density(graph: &AggregatedGraph) -> Result<f64> {
    let n = graph.n_nodes();
    if n < 2 {
        return Err(Error::InvalidParameter("edge density needs at least 2 nodes".to_string()));
    }
    Ok(graph.n_edges() as f64 / (n as f64 * (n as f64 - 1.0)))
}

/// Events per second over the floored duration, and `1 - exp(-rate)`.
pub fn activity(network: &TemporalNetwork, component: &TemporalComponent) -> (f64, f64) {
    let duration = component.duration(network).max(DURATION_FLOOR);
    let rate = component.n_events() as f64 / duration;
    (rate, 1.0 - (-rate).exp())
}

/// Size descriptors: event count, node count, raw duration, edge density.
pub fn summary_stats(network: &TemporalNetwork, component: &TemporalComponent) -> ComponentSummary {
    let graph = aggregate(network, component);
    ComponentSummary {
        n_nodes: graph.n_nodes(),
        n_events: component.n_events(),
        duration: component.duration(network),
        edge_density: edge_density(&graph).unwrap_or(0.0),
    }
}

/// Measure every feature of a component. Requires at least one motif-labeled
/// edge.
pub fn extract(
    network: &TemporalNetwork,
    component: &TemporalComponent,
    params: &EmbedParams,
) -> Result<ComponentFeatures> {
    let dist = MotifDistribution::from_component(network, component)?;
    let graph = aggregate(network, component);
    let (motif_entropy_bits, motif_entropy_norm) = motif_entropy(&dist);
    let (iet_bits, iet_norm) = iet_entropy(component, params.n_bins, params.delta_t)?;
    let (rate, rate_norm) = activity(network, component);
    Ok(ComponentFeatures {
        prevalence: dist.prevalences(),
        motif_entropy: motif_entropy_bits,
        motif_entropy_norm,
        iet_entropy: iet_bits,
        iet_entropy_norm: iet_norm,
        imbalance_in_in: degree_imbalance(&graph, Degree::In, Degree::In)?,
        imbalance_out_in: degree_imbalance(&graph, Degree::Out, Degree::In)?,
        imbalance_out_out: degree_imbalance(&graph, Degree::Out, Degree::Out)?,
        clustering: clustering_coefficient(&graph),
        reciprocity: reciprocity(&graph)?,
        activity: rate,
        activity_norm: rate_norm,
        summary: ComponentSummary {
            n_nodes: graph.n_nodes(),
            n_events: component.n_events(),
            duration: component.duration(network),
            edge_density: edge_density(&graph).unwrap_or(0.0),
        },
    })
}

/// Embed one component as a unit-length vector.
pub fn embed(
    network: &TemporalNetwork,
    component: &TemporalComponent,
    params: &EmbedParams,
) -> Result<FeatureVector> {
    Ok(extract(network, component, params)?.vector())
}

/// Measure all components in parallel, preserving order. Every component
/// must be embeddable (use [`TemporalComponent::has_motif_edges`] to filter
/// beforehand).
pub fn extract_all(
    network: &TemporalNetwork,
    components: &[TemporalComponent],
    params: &EmbedParams,
) -> Result<Vec<ComponentFeatures>> {
    components.par_iter().map(|c| extract(network, c, params)).collect()
}

/// Embedding of the whole network treated as a single pseudo-component
/// containing every event and every `delta_t`-thresholded edge.
pub fn complete_features(
    network: &TemporalNetwork,
    graph: &EventGraph,
    params: &EmbedParams,
) -> Result<ComponentFeatures> {
    if network.is_empty() {
        return Err(Error::EmptyInput("network"));
    }
    let component = TemporalComponent {
        events: (0..network.n_events()).map(|i| EventId(i as u32)).collect(),
        edges: threshold(graph, params.delta_t)?,
        delta_t: params.delta_t,
    };
    extract(network, &component, params)
}

/// Unit-length form of [`complete_features`].
pub fn complete_vector(
    network: &TemporalNetwork,
    graph: &EventGraph,
    params: &EmbedParams,
) -> Result<FeatureVector> {
    Ok(complete_features(network, graph, params)?.vector())
}
