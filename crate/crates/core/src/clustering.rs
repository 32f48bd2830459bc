//! Ward hierarchy over component embeddings, silhouette-based selection of
//! the cluster count, cluster profiles, and per-cluster event volumes.
//!
//! Ward linkage runs on squared Euclidean distances through the
//! Lance-Williams recurrence; reported merge heights are square-rooted.
//! Ties break toward the lexicographically smallest cluster-id pair, so runs
//! are reproducible and match a naive full-scan implementation exactly.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::event_graph::TemporalComponent;
use crate::events::TemporalNetwork;
use crate::features::{ComponentFeatures, FeatureVector};

/// Symmetric pairwise distances with zero diagonal, stored condensed.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    n: usize,
    condensed: Vec<f64>,
}

impl DistanceMatrix {
    /// Euclidean distances between all vector pairs.
    pub fn from_vectors(vectors: &[FeatureVector]) -> Result<DistanceMatrix> {
        let n = vectors.len();
        if let Some(first) = vectors.first() {
            for v in vectors {
                if v.dim() != first.dim() {
                    return Err(Error::DimensionMismatch { expected: first.dim(), found: v.dim() });
                }
            }
        }
        let condensed: Vec<f64> = (0..n.saturating_sub(1))
            .into_par_iter()
            .flat_map_iter(|i| {
                let row: Vec<f64> = ((i + 1)..n)
                    .map(|j| vectors[i].distance(&vectors[j]).expect("dims checked"))
                    .collect();
                row
            })
            .collect();
        Ok(DistanceMatrix { n, condensed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        i * (self.n - 1) - i * (i + 1) / 2 + j - 1
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else if i < j {
            self.condensed[self.offset(i, j)]
        } else {
            self.condensed[self.offset(j, i)]
        }
    }
}

/// One agglomeration step. `left < right` are cluster ids: leaves are
/// `0..n`, the cluster formed by step `m` gets id `n + m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    /// Square root of the Ward (squared-distance) merge cost.
    pub height: f64,
    /// Size of the merged cluster.
    pub size: usize,
}

/// A stepwise dendrogram of `n_leaves - 1` merges.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Dendrogram {
    pub n_leaves: usize,
    pub merges: Vec<Merge>,
}

#[derive(Clone, Copy)]
struct Candidate {
    d2: f64,
    slot: usize,
}

/// Ward agglomeration via the Lance-Williams recurrence with cached nearest
/// neighbors. The neighbor cache is exact for Ward because merging two
/// clusters never brings a third closer than its current nearest neighbor.
pub fn ward_linkage(dist: &DistanceMatrix) -> Result<Dendrogram> {
    let n = dist.n();
    if n < 2 {
        return Err(Error::InvalidParameter("ward linkage needs at least 2 observations".to_string()));
    }

    // Working squared distances, slot-addressed.
    let mut sq = vec![0.0f64; n * (n - 1) / 2];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist.get(i, j);
            sq[condensed_index(n, i, j)] = d * d;
        }
    }
    let mut active: Vec<bool> = vec![true; n];
    let mut id_of: Vec<usize> = (0..n).collect();
    let mut size: Vec<usize> = vec![1; n];

    // Pair ordering key: (squared distance, low id, high id).
    let key = |d2: f64, s: usize, t: usize, id_of: &[usize]| -> (f64, usize, usize) {
        let (a, b) = (id_of[s].min(id_of[t]), id_of[s].max(id_of[t]));
        (d2, a, b)
    };
    let key_less = |a: (f64, usize, usize), b: (f64, usize, usize)| -> bool {
        a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)).is_lt()
    };
    let scan_nn = |s: usize, active: &[bool], sq: &[f64], id_of: &[usize]| -> Option<Candidate> {
        let mut best: Option<Candidate> = None;
        for t in 0..n {
            if t == s || !active[t] {
                continue;
            }
            let d2 = sq[condensed_index(n, s.min(t), s.max(t))];
            let replace = match best {
                None => true,
                Some(current) => {
                    key_less(key(d2, s, t, id_of), key(current.d2, s, current.slot, id_of))
                }
            };
            if replace {
                best = Some(Candidate { d2, slot: t });
            }
        }
        best
    };

    let mut nn: Vec<Option<Candidate>> = (0..n).map(|s| scan_nn(s, &active, &sq, &id_of)).collect();
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..n - 1 {
        // Global best pair by (distance, id pair).
        let mut best_slot: Option<usize> = None;
        for s in 0..n {
            if !active[s] {
                continue;
            }
            let candidate = nn[s].expect("active slot has a neighbor");
            let better = match best_slot {
                None => true,
                Some(bs) => {
                    let current: Candidate = nn[bs].unwrap();
                    key_less(
                        key(candidate.d2, s, candidate.slot, &id_of),
                        key(current.d2, bs, current.slot, &id_of),
                    )
                }
            };
            if better {
                best_slot = Some(s);
            }
        }
        let a = best_slot.expect("at least two active clusters");
        let candidate = nn[a].unwrap();
        let b = candidate.slot;
        let d2_ab = candidate.d2;

        let (left, right) = (id_of[a].min(id_of[b]), id_of[a].max(id_of[b]));
        let merged_size = size[a] + size[b];
        merges.push(Merge { left, right, height: d2_ab.max(0.0).sqrt(), size: merged_size });

        let keep = a.min(b);
        let drop = a.max(b);
        let (sz_a, sz_b) = (size[a] as f64, size[b] as f64);
        for t in 0..n {
            if t == a || t == b || !active[t] {
                continue;
            }
            let sz_t = size[t] as f64;
            let d2_at = sq[condensed_index(n, a.min(t), a.max(t))];
            let d2_bt = sq[condensed_index(n, b.min(t), b.max(t))];
            let updated = ((sz_a + sz_t) * d2_at + (sz_b + sz_t) * d2_bt - sz_t * d2_ab)
                / (sz_a + sz_b + sz_t);
            sq[condensed_index(n, keep.min(t), keep.max(t))] = updated;
        }

        active[drop] = false;
        nn[drop] = None;
        size[keep] = merged_size;
        id_of[keep] = n + step;

        if step + 1 < n - 1 {
            nn[keep] = scan_nn(keep, &active, &sq, &id_of);
            for s in 0..n {
                if s == keep || !active[s] {
                    continue;
                }
                if let Some(candidate) = nn[s] {
                    if candidate.slot == a || candidate.slot == b {
                        nn[s] = scan_nn(s, &active, &sq, &id_of);
                    }
                }
            }
        }
    }

    Ok(Dendrogram { n_leaves: n, merges })
}

#[inline]
fn condensed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (n - 1) - i * (i + 1) / 2 + j - 1
}

/// A flat clustering: one label in `0..k` per observation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub k: usize,
}

/// The `k` clusters obtained by undoing the last `k - 1` merges. Labels are
/// assigned in order of first appearance over observation indices.
pub fn cut(dendrogram: &Dendrogram, k: usize) -> Result<ClusterAssignment> {
    let n = dendrogram.n_leaves;
    if k < 1 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let mut uf = crate::union_find::UnionFind::new(n);
    // representative leaf per cluster id
    let mut rep: Vec<usize> = (0..n).collect();
    for merge in &dendrogram.merges[..n - k] {
        let left_rep = rep[merge.left];
        let right_rep = rep[merge.right];
        uf.union(left_rep, right_rep);
        rep.push(left_rep);
    }
    let mut labels = vec![usize::MAX; n];
    let mut next = 0usize;
    let mut label_of_root: HashMap<usize, usize> = HashMap::new();
    for (leaf, label) in labels.iter_mut().enumerate() {
        let root = uf.find(leaf);
        *label = *label_of_root.entry(root).or_insert_with(|| {
            let assigned = next;
            next += 1;
            assigned
        });
    }
    debug_assert_eq!(next, k);
    Ok(ClusterAssignment { labels, k })
}

/// How silhouette distances are measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SilhouetteMethod {
    /// Distance to cluster centroids (the default used throughout).
    Centroid,
    /// Classic mean pairwise distances (singletons score zero).
    MeanPairwise,
}

/// Per-sample silhouette scores and their mean.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SilhouetteReport {
    pub scores: Vec<f64>,
    pub mean: f64,
}

/// Silhouette of an assignment: `s(i) = (d_inter - d_intra) /
/// max(d_intra, d_inter)`, with distances taken to cluster centroids by
/// default.
pub fn silhouette(
    vectors: &[FeatureVector],
    assignment: &ClusterAssignment,
    method: SilhouetteMethod,
) -> Result<SilhouetteReport> {
    let n = vectors.len();
    if assignment.labels.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: assignment.labels.len() });
    }
    let k = assignment.k;
    if k < 2 {
        return Err(Error::KOutOfRange { k, n });
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &label) in assignment.labels.iter().enumerate() {
        if label >= k {
            return Err(Error::InvalidParameter(format!("label {label} out of range")));
        }
        members[label].push(i);
    }
    if members.iter().any(|m| m.is_empty()) {
        return Err(Error::InvalidParameter("every cluster must be nonempty".to_string()));
    }
    let dim = vectors.first().map(|v| v.dim()).unwrap_or(0);

    let scores: Vec<f64> = match method {
        SilhouetteMethod::Centroid => {
            let mut centroids = vec![vec![0.0f64; dim]; k];
            for (cluster, member_list) in members.iter().enumerate() {
                for &i in member_list {
                    for (c, v) in centroids[cluster].iter_mut().zip(vectors[i].as_slice()) {
                        *c += v;
                    }
                }
                let count = member_list.len() as f64;
                for c in centroids[cluster].iter_mut() {
                    *c /= count;
                }
            }
            let dist_to = |i: usize, cluster: usize| -> f64 {
                vectors[i]
                    .as_slice()
                    .iter()
                    .zip(&centroids[cluster])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            };
            (0..n)
                .map(|i| {
                    let own = assignment.labels[i];
                    let intra = dist_to(i, own);
                    let inter = (0..k)
                        .filter(|&c| c != own)
                        .map(|c| dist_to(i, c))
                        .min_by(|a, b| a.total_cmp(b))
                        .expect("k >= 2");
                    let denom = intra.max(inter);
                    if denom > 0.0 {
                        (inter - intra) / denom
                    } else {
                        0.0
                    }
                })
                .collect()
        }
        SilhouetteMethod::MeanPairwise => (0..n)
            .map(|i| {
                let own = assignment.labels[i];
                if members[own].len() == 1 {
                    return 0.0;
                }
                let mean_dist = |list: &[usize]| -> f64 {
                    let sum: f64 = list
                        .iter()
                        .filter(|&&j| j != i)
                        .map(|&j| vectors[i].distance(&vectors[j]).expect("dims checked"))
                        .sum();
                    sum / list.iter().filter(|&&j| j != i).count() as f64
                };
                let a = mean_dist(&members[own]);
                let b = (0..k)
                    .filter(|&c| c != own)
                    .map(|c| mean_dist(&members[c]))
                    .min_by(|x, y| x.total_cmp(y))
                    .expect("k >= 2");
                let denom = a.max(b);
                if denom > 0.0 {
                    (b - a) / denom
                } else {
                    0.0
                }
            })
            .collect(),
    };

    let mean = scores.iter().sum::<f64>() / n as f64;
    Ok(SilhouetteReport { scores, mean })
}

/// Mean silhouette per candidate `k` and the argmax (ties go to smaller k).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KSelection {
    pub best_k: usize,
    /// `(k, mean silhouette)` rows in ascending `k`.
    pub profile: Vec<(usize, f64)>,
}

/// Evaluate silhouette across `k_min..=k_max` cuts of the dendrogram.
pub fn select_k(
    vectors: &[FeatureVector],
    dendrogram: &Dendrogram,
    k_min: usize,
    k_max: usize,
    method: SilhouetteMethod,
) -> Result<KSelection> {
    let n = vectors.len();
    if k_min > k_max {
        return Err(Error::EmptyInput("k range"));
    }
    if k_min < 2 || k_max > n.saturating_sub(1) {
        return Err(Error::InvalidParameter(format!(
            "k range {k_min}..={k_max} must lie within [2, {}]",
            n.saturating_sub(1)
        )));
    }
    let profile: Vec<(usize, f64)> = (k_min..=k_max)
        .into_par_iter()
        .map(|k| {
            let assignment = cut(dendrogram, k)?;
            let report = silhouette(vectors, &assignment, method)?;
            Ok((k, report.mean))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best_k = profile[0].0;
    let mut best_score = profile[0].1;
    for &(k, score) in &profile[1..] {
        if score > best_score {
            best_k = k;
            best_score = score;
        }
    }
    Ok(KSelection { best_k, profile })
}

/// Per-cluster means of the raw (pre-normalization) features and the size
/// descriptors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterStats {
    pub cluster: usize,
    pub n_components: usize,
    pub mean_nodes: f64,
    pub mean_events: f64,
    pub mean_duration: f64,
    pub mean_edge_density: f64,
    /// Mean prevalence per canonical colored motif.
    pub motif_prevalence: Vec<f64>,
    /// Mean prevalence per base pattern, colors combined.
    pub motif_prevalence_by_base: Vec<f64>,
    pub motif_entropy: f64,
    pub iet_entropy: f64,
    pub imbalance_in_in: f64,
    pub imbalance_out_in: f64,
    pub imbalance_out_out: f64,
    pub clustering: f64,
    pub reciprocity: f64,
    pub activity: f64,
}

/// Cluster-by-cluster feature averages.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterProfile {
    pub clusters: Vec<ClusterStats>,
}

/// Average the raw features of each cluster's members.
pub fn cluster_profile(
    features: &[ComponentFeatures],
    assignment: &ClusterAssignment,
) -> Result<ClusterProfile> {
    if features.len() != assignment.labels.len() {
        return Err(Error::DimensionMismatch {
            expected: features.len(),
            found: assignment.labels.len(),
        });
    }
    if features.is_empty() {
        return Err(Error::EmptyInput("features"));
    }
    let motif_dim = features[0].prevalence.len();
    let n_colors = ((motif_dim / 6) as f64).sqrt().round() as usize;
    let mut clusters = Vec::with_capacity(assignment.k);
    for cluster in 0..assignment.k {
        let member_indices: Vec<usize> = assignment
            .labels
            .iter()
            .enumerate()
            .filter(|(_, &label)| label == cluster)
            .map(|(i, _)| i)
            .collect();
        let count = member_indices.len() as f64;
        let mean_of = |f: &dyn Fn(&ComponentFeatures) -> f64| -> f64 {
            member_indices.iter().map(|&i| f(&features[i])).sum::<f64>() / count
        };
        let mut motif_prevalence = vec![0.0; motif_dim];
        for &i in &member_indices {
            for (acc, v) in motif_prevalence.iter_mut().zip(&features[i].prevalence) {
                *acc += v;
            }
        }
        for v in motif_prevalence.iter_mut() {
            *v /= count;
        }
        let mut by_base = vec![0.0; 6];
        for (index, &value) in motif_prevalence.iter().enumerate() {
            by_base[index / (n_colors * n_colors)] += value;
        }
        clusters.push(ClusterStats {
            cluster,
            n_components: member_indices.len(),
            mean_nodes: mean_of(&|f| f.summary.n_nodes as f64),
            mean_events: mean_of(&|f| f.summary.n_events as f64),
            mean_duration: mean_of(&|f| f.summary.duration),
            mean_edge_density: mean_of(&|f| f.summary.edge_density),
            motif_prevalence,
            motif_prevalence_by_base: by_base,
            motif_entropy: mean_of(&|f| f.motif_entropy),
            iet_entropy: mean_of(&|f| f.iet_entropy),
            imbalance_in_in: mean_of(&|f| f.imbalance_in_in),
            imbalance_out_in: mean_of(&|f| f.imbalance_out_in),
            imbalance_out_out: mean_of(&|f| f.imbalance_out_out),
            clustering: mean_of(&|f| f.clustering),
            reciprocity: mean_of(&|f| f.reciprocity),
            activity: mean_of(&|f| f.activity),
        });
    }
    Ok(ClusterProfile { clusters })
}

/// Event counts per time bin, split by cluster, with everything not in a
/// clustered component tallied as the residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeBin {
    pub index: usize,
    pub start: f64,
    pub cluster_counts: Vec<u64>,
    pub residual: u64,
    pub total: u64,
}

/// Cluster volumes over time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Volumes {
    pub origin: f64,
    pub bin_width: f64,
    pub k: usize,
    pub bins: Vec<VolumeBin>,
}

impl VolumeBin {
    /// Per-cluster fractions followed by the residual fraction; they sum to
    /// one on occupied bins.
    pub fn fractions(&self) -> Vec<f64> {
        let total = self.total as f64;
        let mut out: Vec<f64> = self
            .cluster_counts
            .iter()
            .map(|&c| if self.total == 0 { 0.0 } else { c as f64 / total })
            .collect();
        out.push(if self.total == 0 { 0.0 } else { self.residual as f64 / total });
        out
    }
}

/// Bin all network events by time and attribute them to the cluster of their
/// component (or to the residual).
pub fn cluster_volumes(
    network: &TemporalNetwork,
    components: &[TemporalComponent],
    assignment: &ClusterAssignment,
    bin_width: f64,
) -> Result<Volumes> {
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(Error::InvalidParameter(format!("bin_width {bin_width} must be positive")));
    }
    if components.len() != assignment.labels.len() {
        return Err(Error::DimensionMismatch {
            expected: components.len(),
            found: assignment.labels.len(),
        });
    }
    let Some((t_min, t_max)) = network.time_span() else {
        return Ok(Volumes { origin: 0.0, bin_width, k: assignment.k, bins: Vec::new() });
    };
    let n_bins = ((t_max - t_min) / bin_width).floor() as usize + 1;

    let mut event_cluster: Vec<Option<usize>> = vec![None; network.n_events()];
    for (component, &label) in components.iter().zip(&assignment.labels) {
        for &event in &component.events {
            event_cluster[event.index()] = Some(label);
        }
    }

    let mut bins: Vec<VolumeBin> = (0..n_bins)
        .map(|index| VolumeBin {
            index,
            start: t_min + index as f64 * bin_width,
            cluster_counts: vec![0; assignment.k],
            residual: 0,
            total: 0,
        })
        .collect();
    for event in network.events() {
        let bin = (((event.time - t_min) / bin_width).floor() as usize).min(n_bins - 1);
        bins[bin].total += 1;
        match event_cluster[event.id.index()] {
            Some(cluster) => bins[bin].cluster_counts[cluster] += 1,
            None => bins[bin].residual += 1,
        }
    }
    Ok(Volumes { origin: t_min, bin_width, k: assignment.k, bins })
}
