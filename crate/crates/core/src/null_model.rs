//! Time-shuffled null models and the component-diversity statistic.
//!
//! A replicate permutes the event times uniformly at random while keeping
//! the (source, target, color) sequence fixed, destroying temporal
//! correlations but preserving the static structure exactly. The diversity
//! of a decomposition is the mean distance of its component embeddings from
//! the whole-network embedding; comparing the observed diversity against a
//! shuffled ensemble yields a z-score.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::event_graph::{build_event_graph, components};
use crate::events::TemporalNetwork;
use crate::features::{complete_vector, embed, EmbedParams, FeatureVector};

/// A time-shuffled copy of a network, tagged with the seed that made it.
#[derive(Clone, Debug)]
pub struct ShuffledReplicate {
    pub network: TemporalNetwork,
    pub seed: u64,
}

/// Permute event times uniformly at random over the fixed
/// (source, target, color) sequence, then re-sort and re-index.
/// Deterministic given the seed; label tables are carried over unchanged.
pub fn time_shuffle(network: &TemporalNetwork, seed: u64) -> ShuffledReplicate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut times: Vec<f64> = network.events().iter().map(|e| e.time).collect();
    times.shuffle(&mut rng);
    let events = network
        .events()
        .iter()
        .zip(times)
        .map(|(event, time)| crate::events::Event { time, ..*event })
        .collect();
    let network = TemporalNetwork::from_parts(
        events,
        network.nodes().to_vec(),
        network.colors().to_vec(),
    );
    ShuffledReplicate { network, seed }
}

/// Mean distance of component embeddings from the complete embedding.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiversityScore(pub f64);

/// `(1/|C|) * sum_c |x_c - x*|`.
pub fn diversity(vectors: &[FeatureVector], complete: &FeatureVector) -> Result<DiversityScore> {
    if vectors.is_empty() {
        return Err(Error::EmptyInput("component vectors"));
    }
    let sum: f64 = vectors
        .iter()
        .map(|v| v.distance(complete))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .sum();
    Ok(DiversityScore(sum / vectors.len() as f64))
}

/// Derive the seed of replicate `index` from the base seed. Injective in
/// `index` for a fixed base, so replicate streams never collide.
pub fn derive_seed(base_seed: u64, index: usize) -> u64 {
    splitmix64(base_seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Ensemble configuration.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EnsembleParams {
    pub n_replicates: usize,
    pub delta_t: f64,
    pub min_events: usize,
    pub n_bins: usize,
    pub base_seed: u64,
}

/// What one decomposition run measures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecompositionStats {
    pub diversity: f64,
    /// Components at or above `min_events`.
    pub n_components: usize,
    pub mean_events_per_component: f64,
    pub mean_component_duration: f64,
}

/// [`DecompositionStats`] for one replicate, tagged with its seed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReplicateStats {
    pub seed: u64,
    #[serde(flatten)]
    pub stats: DecompositionStats,
}

/// Ensemble summary: per-replicate scores, their mean and standard
/// deviation, the observed value, and the z-score.
#[derive(Clone, Debug, Serialize)]
pub struct EnsembleStats {
    pub params: EnsembleParams,
    pub observed: DecompositionStats,
    pub replicates: Vec<ReplicateStats>,
    pub ensemble_mean: f64,
    /// Sample standard deviation of replicate diversities.
    pub ensemble_std: f64,
    /// `(observed - mean) / std`; absent when the ensemble is degenerate
    /// (zero standard deviation).
    pub z_score: Option<f64>,
}

/// Decompose, embed, and score one network.
pub fn decomposition_stats(
    network: &TemporalNetwork,
    delta_t: f64,
    min_events: usize,
    n_bins: usize,
) -> Result<DecompositionStats> {
    let graph = build_event_graph(network);
    let params = EmbedParams { n_bins, delta_t };
    let set = components(&graph, delta_t, min_events)?;
    let embeddable: Vec<_> =
        set.components.iter().filter(|c| c.has_motif_edges()).collect();
    if embeddable.is_empty() {
        return Err(Error::EmptyInput("no embeddable components"));
    }
    let vectors = embeddable
        .iter()
        .map(|component| embed(network, component, &params))
        .collect::<Result<Vec<_>>>()?;
    let complete = complete_vector(network, &graph, &params)?;
    let diversity_score = diversity(&vectors, &complete)?;

    let n = set.components.len();
    let mean_events =
        set.components.iter().map(|c| c.n_events() as f64).sum::<f64>() / n as f64;
    let mean_duration =
        set.components.iter().map(|c| c.duration(network)).sum::<f64>() / n as f64;
    Ok(DecompositionStats {
        diversity: diversity_score.0,
        n_components: n,
        mean_events_per_component: mean_events,
        mean_component_duration: mean_duration,
    })
}

/// Run the observed network and `n_replicates` time-shuffled replicates
/// through the decomposition, and score the observed diversity against the
/// ensemble.
pub fn ensemble_run(network: &TemporalNetwork, params: &EnsembleParams) -> Result<EnsembleStats> {
    if params.n_replicates < 2 {
        return Err(Error::InvalidParameter("n_replicates must be >= 2".to_string()));
    }
    let observed =
        decomposition_stats(network, params.delta_t, params.min_events, params.n_bins)?;

    let replicates: Vec<ReplicateStats> = (0..params.n_replicates)
        .into_par_iter()
        .map(|index| {
            let seed = derive_seed(params.base_seed, index);
            let replicate = time_shuffle(network, seed);
            let stats = decomposition_stats(
                &replicate.network,
                params.delta_t,
                params.min_events,
                params.n_bins,
            )?;
            Ok(ReplicateStats { seed, stats })
        })
        .collect::<Result<Vec<_>>>()?;

    let diversities: Vec<f64> = replicates.iter().map(|r| r.stats.diversity).collect();
    let mean = diversities.iter().sum::<f64>() / diversities.len() as f64;
    let variance = diversities.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>()
        / (diversities.len() - 1) as f64;
    let std = variance.sqrt();
    let z_score = if std > 0.0 { Some((observed.diversity - mean) / std) } else { None };

    Ok(EnsembleStats {
        params: *params,
        observed,
        replicates,
        ensemble_mean: mean,
        ensemble_std: std,
        z_score,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::{EventRecord, ParseOptions};
    use crate::features::aggregate;
    use crate::synth;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn sorted_times(network: &TemporalNetwork) -> Vec<f64> {
        let mut times: Vec<f64> = network.events().iter().map(|e| e.time).collect();
        times.sort_by(f64::total_cmp);
        times
    }

    fn triple_multiset(network: &TemporalNetwork) -> HashMap<(u32, u32, u16), usize> {
        let mut counts = HashMap::new();
        for event in network.events() {
            *counts.entry((event.source.0, event.target.0, event.color.0)).or_insert(0) += 1;
        }
        counts
    }

    #[test]
    fn shuffle_single_event_is_identity() {
        let (net, _) = TemporalNetwork::from_records(
            vec![EventRecord { source: "a".into(), target: "b".into(), time: 4.0, color: None }],
            &ParseOptions::default(),
        )
        .unwrap();
        let replicate = time_shuffle(&net, 1);
        assert_eq!(replicate.network, net);
    }

    #[test]
    fn shuffle_is_deterministic() {
        let net = synth::uniform_random(8, 200, 12, 2, 500.0);
        let a = time_shuffle(&net, 77);
        let b = time_shuffle(&net, 77);
        assert_eq!(a.network, b.network);
        let c = time_shuffle(&net, 78);
        assert_ne!(c.network, a.network);
    }

    #[test]
    fn shuffle_preserves_static_aggregate() {
        let net = synth::uniform_random(9, 300, 10, 2, 500.0);
        let replicate = time_shuffle(&net, 5);
        let whole = |n: &TemporalNetwork| {
            let all = crate::event_graph::TemporalComponent {
                events: (0..n.n_events() as u32).map(crate::events::EventId).collect(),
                edges: vec![],
                delta_t: f64::INFINITY,
            };
            aggregate(n, &all)
        };
        let original = whole(&net);
        let shuffled = whole(&replicate.network);
        assert_eq!(original.nodes(), shuffled.nodes());
        assert_eq!(original.edges(), shuffled.edges());
    }

    #[test]
    fn diversity_arithmetic() {
        let complete = FeatureVector::new(vec![0.0, 0.0]);
        let at = |d: f64| FeatureVector::new(vec![d, 0.0]);
        assert_eq!(
            diversity(std::slice::from_ref(&complete), &complete).unwrap(),
            DiversityScore(0.0)
        );
        assert_eq!(diversity(&[at(0.7)], &complete).unwrap(), DiversityScore(0.7));
        let two = diversity(&[at(0.6), at(0.8)], &complete).unwrap();
        assert!((two.0 - 0.7).abs() < 1e-15);
        assert!(diversity(&[], &complete).is_err());
    }

    #[test]
    fn derived_seeds_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for base in [0u64, 42, u64::MAX] {
            seen.clear();
            for index in 0..10_000 {
                assert!(seen.insert(derive_seed(base, index)));
            }
        }
    }

    #[test]
    fn ensemble_smoke_and_z_zero() {
        // Shuffled replicates scatter burst times over the whole span, so
        // give them a loose threshold and small size filter to keep every
        // replicate embeddable.
        let net = synth::planted_regimes(3, &synth::RegimeConfig::default());
        let params = EnsembleParams {
            n_replicates: 4,
            delta_t: 60.0,
            min_events: 2,
            n_bins: 10,
            base_seed: 11,
        };
        let stats = ensemble_run(&net, &params).unwrap();
        assert_eq!(stats.replicates.len(), 4);
        if let Some(z) = stats.z_score {
            assert_eq!(z, (stats.observed.diversity - stats.ensemble_mean) / stats.ensemble_std);
        }
        assert!(ensemble_run(&net, &EnsembleParams { n_replicates: 1, ..params }).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        /// node-pair, color, and time multisets survive shuffling exactly
        #[test]
        fn shuffle_invariants(seed in 0u64..200, n in 2usize..120) {
            let net = synth::uniform_random(seed, n, 8, 2, 300.0);
            let replicate = time_shuffle(&net, seed ^ 0xABCD);
            prop_assert_eq!(triple_multiset(&net), triple_multiset(&replicate.network));
            prop_assert_eq!(sorted_times(&net), sorted_times(&replicate.network));
            prop_assert_eq!(net.nodes(), replicate.network.nodes());
            prop_assert_eq!(net.colors(), replicate.network.colors());
        }
    }
}
