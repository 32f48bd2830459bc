//! Deterministic synthetic event streams and point clouds.
//!
//! Everything here is seeded and reproducible; the generators back the test
//! suites and are convenient for demos and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::events::{EventRecord, ParseOptions, TemporalNetwork};
use crate::features::FeatureVector;

fn color_label(index: usize) -> String {
    match index {
        0 => "m".to_string(),
        1 => "r".to_string(),
        other => format!("c{other}"),
    }
}

fn build(records: Vec<EventRecord>) -> TemporalNetwork {
    TemporalNetwork::from_records(records, &ParseOptions::default())
        .expect("synthetic records are valid")
        .0
}

/// Random events with uniform times over `[0, t_max)`.
pub fn uniform_random(
    seed: u64,
    n_events: usize,
    n_nodes: usize,
    n_colors: usize,
    t_max: f64,
) -> TemporalNetwork {
    assert!(n_nodes >= 2 && n_colors >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(n_events);
    for _ in 0..n_events {
        let source = rng.gen_range(0..n_nodes);
        let mut target = rng.gen_range(0..n_nodes);
        while target == source {
            target = rng.gen_range(0..n_nodes);
        }
        records.push(EventRecord {
            source: format!("n{source}"),
            target: format!("n{target}"),
            time: rng.gen_range(0.0..t_max),
            color: Some(color_label(rng.gen_range(0..n_colors))),
        });
    }
    build(records)
}

/// Random events arriving as a Poisson process at `rate` events per second.
pub fn poisson_stream(
    seed: u64,
    n_events: usize,
    n_nodes: usize,
    n_colors: usize,
    rate: f64,
) -> TemporalNetwork {
    assert!(n_nodes >= 2 && n_colors >= 1 && rate > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(n_events);
    let mut time = 0.0;
    for _ in 0..n_events {
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        time += -u.ln() / rate;
        let source = rng.gen_range(0..n_nodes);
        let mut target = rng.gen_range(0..n_nodes);
        while target == source {
            target = rng.gen_range(0..n_nodes);
        }
        records.push(EventRecord {
            source: format!("n{source}"),
            target: format!("n{target}"),
            time,
            color: Some(color_label(rng.gen_range(0..n_colors))),
        });
    }
    build(records)
}

/// Shape of the two planted behavioural regimes.
#[derive(Clone, Copy, Debug)]
pub struct RegimeConfig {
    /// Star bursts: a set of peripherals retweeting one hub in quick
    /// succession.
    pub n_stars: usize,
    pub star_peripherals: usize,
    pub star_gap: f64,
    /// Ping-pong chains: one pair exchanging messages back and forth.
    pub n_chains: usize,
    pub chain_events: usize,
    pub chain_gap: f64,
    /// Spacing between consecutive conversation starts.
    pub start_spacing: f64,
    /// Uniform jitter added to every conversation start.
    pub jitter: f64,
    /// Size of a shared pool of high-activity nodes that anchor the
    /// conversations round-robin; zero gives every conversation fresh
    /// nodes. Pool reuse is spaced `hub_pool` conversations apart, so the
    /// planted components stay pure while time-shuffled replicates blend.
    pub hub_pool: usize,
}

impl Default for RegimeConfig {
    fn default() -> Self {
        Self {
            n_stars: 30,
            star_peripherals: 12,
            star_gap: 3.0,
            n_chains: 30,
            chain_events: 12,
            chain_gap: 8.0,
            start_spacing: 60.0,
            jitter: 10.0,
            hub_pool: 0,
        }
    }
}

/// A stream with two planted behavioural regimes: star-retweet bursts and
/// reciprocated message chains, interleaved in time. Conversations use
/// disjoint nodes except for the optional shared anchor pool.
pub fn planted_regimes(seed: u64, config: &RegimeConfig) -> TemporalNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    let total = config.n_stars + config.n_chains;
    let mut stars_made = 0;
    let mut chains_made = 0;
    for k in 0..total {
        let start = k as f64 * config.start_spacing + rng.gen_range(0.0..config.jitter.max(1e-9));
        let anchor = if config.hub_pool > 0 {
            format!("pool{}", k % config.hub_pool)
        } else {
            format!("conv{k}")
        };
        let make_star = if stars_made < config.n_stars && chains_made < config.n_chains {
            k % 2 == 0
        } else {
            stars_made < config.n_stars
        };
        if make_star {
            stars_made += 1;
            // Peripheral i retweets the hub: information flows hub -> p_i.
            for i in 0..config.star_peripherals {
                records.push(EventRecord {
                    source: anchor.clone(),
                    target: format!("s{k}p{i}"),
                    time: start + i as f64 * config.star_gap,
                    color: Some("r".to_string()),
                });
            }
        } else {
            chains_made += 1;
            let partner = format!("c{k}b");
            for i in 0..config.chain_events {
                let (source, target) = if i % 2 == 0 {
                    (anchor.clone(), partner.clone())
                } else {
                    (partner.clone(), anchor.clone())
                };
                records.push(EventRecord {
                    source,
                    target,
                    time: start + i as f64 * config.chain_gap,
                    color: Some("m".to_string()),
                });
            }
        }
    }
    build(records)
}

/// Isotropic Gaussian point clouds around well-separated random centers.
/// Returns vectors in blob-major order together with their blob labels.
pub fn gaussian_blobs(
    seed: u64,
    n_blobs: usize,
    per_blob: usize,
    dim: usize,
    separation: f64,
    spread: f64,
) -> (Vec<FeatureVector>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(n_blobs);
    while centers.len() < n_blobs {
        let raw: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        let candidate: Vec<f64> = raw.iter().map(|v| v / norm * separation).collect();
        let far_enough = centers.iter().all(|c| {
            let d2: f64 = c.iter().zip(&candidate).map(|(a, b)| (a - b) * (a - b)).sum();
            d2.sqrt() >= separation
        });
        if far_enough {
            centers.push(candidate);
        }
    }

    let mut vectors = Vec::with_capacity(n_blobs * per_blob);
    let mut labels = Vec::with_capacity(n_blobs * per_blob);
    for (blob, center) in centers.iter().enumerate() {
        for _ in 0..per_blob {
            let point: Vec<f64> = center
                .iter()
                .map(|&c| c + spread * rng.sample::<f64, _>(StandardNormal))
                .collect();
            vectors.push(FeatureVector::new(point));
            labels.push(blob);
        }
    }
    (vectors, labels)
}

/// Random permutation of `0..n` (used to exercise order-independence).
pub fn permutation(seed: u64, n: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut rng);
    indices
}
