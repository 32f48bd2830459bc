//! Pipeline configuration: defaults, flat TOML config files, and hashing
//! for provenance.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use tempograph::clustering::SilhouetteMethod;
use tempograph::features::EmbedParams;

/// Every tunable of the pipeline. A config file is a flat TOML document with
/// these keys; command-line flags override file values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Inter-event-time threshold in seconds.
    pub delta_t: f64,
    /// Smallest component size that enters the analysis.
    pub min_events: usize,
    /// Inter-event-time histogram bins over `[0, delta_t]`.
    pub n_bins: usize,
    /// Cluster-count search range (inclusive).
    pub k_min: usize,
    pub k_max: usize,
    /// Fixed interval width in seconds; defaults to the mean component
    /// duration when absent.
    pub interval_width: Option<f64>,
    /// Offset added to the first event time when anchoring intervals.
    pub interval_offset: f64,
    /// Time-shuffled replicates per ensemble.
    pub ensemble_size: usize,
    /// Base seed; replicate seeds derive from it.
    pub seed: u64,
    /// Bin width (seconds) for cluster volumes over time.
    pub volume_bin_width: f64,
    /// Components plotted in the barcode export.
    pub barcode_top: usize,
    /// Principal components retained in the PCA report.
    pub pca_components: usize,
    /// Keep self-loop events (they are excluded from motif statistics).
    pub keep_self_loops: bool,
    /// Use the classic mean-pairwise silhouette instead of the
    /// centroid-based one.
    pub classic_silhouette: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            delta_t: 240.0,
            min_events: 5,
            n_bins: 10,
            k_min: 2,
            k_max: 30,
            interval_width: None,
            interval_offset: 0.0,
            ensemble_size: 200,
            seed: 42,
            volume_bin_width: 3600.0,
            barcode_top: 10,
            pca_components: 10,
            keep_self_loops: false,
            classic_silhouette: false,
        }
    }
}

impl PipelineConfig {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: PipelineConfig = toml::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        anyhow::ensure!(self.delta_t > 0.0, "delta_t must be positive");
        anyhow::ensure!(self.min_events >= 1, "min_events must be >= 1");
        anyhow::ensure!(self.n_bins >= 2, "n_bins must be >= 2");
        anyhow::ensure!(self.k_min >= 2 && self.k_min <= self.k_max, "need 2 <= k_min <= k_max");
        if let Some(width) = self.interval_width {
            anyhow::ensure!(width > 0.0, "interval_width must be positive");
        }
        anyhow::ensure!(self.ensemble_size >= 2, "ensemble_size must be >= 2");
        anyhow::ensure!(self.volume_bin_width > 0.0, "volume_bin_width must be positive");
        anyhow::ensure!(self.barcode_top >= 1, "barcode_top must be >= 1");
        anyhow::ensure!(self.pca_components >= 1, "pca_components must be >= 1");
        Ok(())
    }

    /// SHA-256 of the canonical TOML rendering, for the run manifest.
    pub fn hash(&self) -> String {
        let canonical = toml::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn embed_params(&self) -> EmbedParams {
        EmbedParams { n_bins: self.n_bins, delta_t: self.delta_t }
    }

    pub fn silhouette_method(&self) -> SilhouetteMethod {
        if self.classic_silhouette {
            SilhouetteMethod::MeanPairwise
        } else {
            SilhouetteMethod::Centroid
        }
    }

    pub fn parse_options(&self) -> tempograph::events::ParseOptions {
        tempograph::events::ParseOptions {
            keep_self_loops: self.keep_self_loops,
            ..Default::default()
        }
    }
}
