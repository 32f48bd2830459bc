//! `tempograph`: decompose a timestamped event stream into temporal
//! components, embed them with colored-motif and temporal statistics,
//! cluster the embeddings, and validate against time-shuffled null models.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tempograph::event_graph::{build_event_graph, dt_scan};
use tempograph::null_model::{ensemble_run, time_shuffle, EnsembleParams};

use tempograph_cli::compare::compare_decompositions;
use tempograph_cli::config::PipelineConfig;
use tempograph_cli::exports::{self, OutputFormat};
use tempograph_cli::intervals::{interval_decompose, spanning_fraction, units_as_components};
use tempograph_cli::pca::pca;
use tempograph_cli::runner::{self, cluster_stage, decompose, feature_stage, load_network};

#[derive(Parser)]
#[command(name = "tempograph", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalOpts,
}

#[derive(Args)]
struct GlobalOpts {
    /// Flat TOML config file; flags below override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory artifacts are written to.
    #[arg(long, global = true, default_value = "out")]
    output_dir: PathBuf,
    /// Format of tabular exports.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Worker threads (defaults to the available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Inter-event-time threshold in seconds.
    #[arg(long, global = true)]
    delta_t: Option<f64>,
    /// Smallest component size that enters the analysis.
    #[arg(long, global = true)]
    min_events: Option<usize>,
    /// Inter-event-time histogram bins.
    #[arg(long, global = true)]
    n_bins: Option<usize>,
    #[arg(long, global = true)]
    k_min: Option<usize>,
    #[arg(long, global = true)]
    k_max: Option<usize>,
    /// Fixed interval width in seconds (defaults to the mean component
    /// duration).
    #[arg(long, global = true)]
    interval_width: Option<f64>,
    /// Time-shuffled replicates per ensemble.
    #[arg(long, global = true)]
    ensemble_size: Option<usize>,
    /// Bin width in seconds for cluster volumes.
    #[arg(long, global = true)]
    bin_width: Option<f64>,
    /// Keep self-loop events (excluded from motif statistics).
    #[arg(long, global = true)]
    keep_self_loops: bool,
    /// Use the classic mean-pairwise silhouette.
    #[arg(long, global = true)]
    classic_silhouette: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate an event file; write the summary and the
    /// normalized event listing.
    Ingest { input: PathBuf },
    /// Build the event graph and export its edges.
    Build { input: PathBuf },
    /// Extract temporal components at the configured threshold.
    Components { input: PathBuf },
    /// Component statistics across a grid of thresholds.
    ScanDt {
        input: PathBuf,
        /// Comma-separated ascending thresholds in seconds; "inf" allowed.
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<String>,
    },
    /// Embed components and export the feature matrix and motif table.
    Features { input: PathBuf },
    /// Cluster components: dendrogram, silhouette profile, assignment.
    Cluster {
        input: PathBuf,
        /// Cut at this k instead of the silhouette argmax.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Per-cluster feature averages.
    Profile {
        input: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Cluster volumes over time.
    Volumes {
        input: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Time-shuffled ensemble and diversity z-score.
    ShuffleEnsemble {
        input: PathBuf,
        /// Override the configured ensemble size.
        #[arg(long)]
        replicates: Option<usize>,
        /// Also export each replicate's normalized event listing.
        #[arg(long)]
        export_replicates: bool,
    },
    /// Fixed-width interval decomposition.
    Intervals {
        input: PathBuf,
        /// Also split intervals into static sub-components.
        #[arg(long)]
        static_sub: bool,
    },
    /// Compare the temporal decomposition against interval decompositions.
    Compare { input: PathBuf },
    /// PCA of the component feature matrix.
    Pca {
        input: PathBuf,
        /// Principal components to retain.
        #[arg(long)]
        components: Option<usize>,
    },
    /// Barcode rows (component rank, event time) for a time window.
    Barcode {
        input: PathBuf,
        #[arg(long)]
        window_start: Option<f64>,
        #[arg(long)]
        window_end: Option<f64>,
        #[arg(long)]
        top: Option<usize>,
    },
    /// The whole pipeline end to end.
    Run {
        input: PathBuf,
        /// Include the (slow) shuffle ensemble.
        #[arg(long)]
        with_ensemble: bool,
    },
}

fn build_config(global: &GlobalOpts) -> Result<PipelineConfig> {
    let mut config = match &global.config {
        Some(path) => PipelineConfig::from_file(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(v) = global.seed {
        config.seed = v;
    }
    if let Some(v) = global.delta_t {
        config.delta_t = v;
    }
    if let Some(v) = global.min_events {
        config.min_events = v;
    }
    if let Some(v) = global.n_bins {
        config.n_bins = v;
    }
    if let Some(v) = global.k_min {
        config.k_min = v;
    }
    if let Some(v) = global.k_max {
        config.k_max = v;
    }
    if let Some(v) = global.interval_width {
        config.interval_width = Some(v);
    }
    if let Some(v) = global.ensemble_size {
        config.ensemble_size = v;
    }
    if let Some(v) = global.bin_width {
        config.volume_bin_width = v;
    }
    if global.keep_self_loops {
        config.keep_self_loops = true;
    }
    if global.classic_silhouette {
        config.classic_silhouette = true;
    }
    config.validate()?;
    Ok(config)
}

fn parse_grid(raw: &[String]) -> Result<Vec<f64>> {
    raw.iter()
        .map(|token| {
            let token = token.trim();
            if token.eq_ignore_ascii_case("inf") || token.eq_ignore_ascii_case("infinity") {
                Ok(f64::INFINITY)
            } else {
                token.parse::<f64>().with_context(|| format!("bad grid value {token:?}"))
            }
        })
        .collect()
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(threads) = cli.global.threads {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    let config = build_config(&cli.global)?;
    let out_dir = cli.global.output_dir.clone();
    std::fs::create_dir_all(&out_dir)?;
    let format = match cli.global.format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };

    match &cli.command {
        Command::Ingest { input } => {
            let (network, report) = load_network(input, &config)?;
            let summary = exports::write_summary(&out_dir, &network.summarize())?;
            let events = exports::write_events(&out_dir, &network)?;
            println!(
                "parsed {} events ({} self-loops skipped)",
                report.parsed, report.skipped_self_loops
            );
            println!("wrote {}", summary.display());
            println!("wrote {}", events.display());
        }
        Command::Build { input } => {
            let (network, _) = load_network(input, &config)?;
            let graph = build_event_graph(&network);
            let path = exports::write_event_graph(&out_dir, &network, &graph, format)?;
            println!("{} events, {} edges", graph.n_events, graph.edges.len());
            println!("wrote {}", path.display());
        }
        Command::Components { input } => {
            let (network, _) = load_network(input, &config)?;
            let graph = build_event_graph(&network);
            let set = decompose(&graph, &config)?;
            let path = exports::write_components(
                &out_dir, &network, &set, config.delta_t, config.min_events,
            )?;
            println!(
                "{} components with >= {} events ({} smaller with {} events in the residual)",
                set.components.len(),
                config.min_events,
                set.residual.n_components,
                set.residual.n_events
            );
            println!("wrote {}", path.display());
        }
        Command::ScanDt { input, grid } => {
            let (network, _) = load_network(input, &config)?;
            let graph = build_event_graph(&network);
            let records = dt_scan(&graph, &parse_grid(grid)?, config.min_events)?;
            let path = exports::write_scan(&out_dir, &records, format)?;
            println!("wrote {}", path.display());
        }
        Command::Features { input } => {
            let (network, _) = load_network(input, &config)?;
            let graph = build_event_graph(&network);
            let set = decompose(&graph, &config)?;
            let stage = feature_stage(&network, &set, &config)?;
            if stage.skipped > 0 {
                eprintln!("warning: {} component(s) without motif edges skipped", stage.skipped);
            }
            let features = exports::write_features(
                &out_dir, "features", &network, &stage.ids, &stage.features, &stage.vectors, format,
            )?;
            let motifs =
                exports::write_motifs(&out_dir, &network, &stage.ids, &stage.features, format)?;
            println!("embedded {} components", stage.vectors.len());
            println!("wrote {}", features.display());
            println!("wrote {}", motifs.display());
        }
        Command::Cluster { input, k } => {
            let (network, _) = load_network(input, &config)?;
            let graph = build_event_graph(&network);
            let set = decompose(&graph, &config)?;
            let clustered = cluster_stage(&network, &set, &config, *k)?;
            for warning in &clustered.warnings {
                eprintln!("warning: {warning}");
            }
            match (&clustered.dendrogram, &clustered.selection, &clustered.assignment) {
                (Some(dendrogram), Some(selection), Some(assignment)) => {
                    let d = exports::write_dendrogram(&out_dir, dendrogram)?;
                    let s = exports::write_silhouette(&out_dir, selection, format)?;
                    let a = exports::write_assignments(
                        &out_dir, &clustered.stage.ids, assignment, format,
                    )?;
                    println!(
                        "best k = {} (cut at k = {})",
                        selection.best_k, assignment.k
                    );
                    for path in [d, s, a] {
                        println!("wrote {}", path.display());
                    }
                }
                _ => println!("clustering skipped"),
            }
        }
        Command::Profile { input, k } => {
            let (network, _) = load_network(input, &config)?;
            let graph = build_event_graph(&network);
            let set = decompose(&graph, &config)?;
            let clustered = cluster_stage(&network, &set, &config, *k)?;
            let Some(assignment) = &clustered.assignment else {
                anyhow::bail!("too few components to cluster");
            };
            let profile =
                tempograph::clustering::cluster_profile(&clustered.stage.features, assignment)?;
            let path = exports::write_profiles(&out_dir, &profile, format)?;
            println!("wrote {}", path.display());
        }
        Command::Volumes { input, k } => {
            let (network, _) = load_network(input, &config)?;
            let graph = build_event_graph(&network);
            let set = decompose(&graph, &config)?;
            let clustered = cluster_stage(&network, &set, &config, *k)?;
            let Some(assignment) = &clustered.assignment else {
                anyhow::bail!("too few components to cluster");
            };
            let members: Vec<_> =
                clustered.stage.ids.iter().map(|&i| set.components[i].clone()).collect();
            let volumes = tempograph::clustering::cluster_volumes(
                &network, &members, assignment, config.volume_bin_width,
            )?;
            let path = exports::write_volumes(&out_dir, &volumes, format)?;
            println!("wrote {}", path.display());
        }
        Command::ShuffleEnsemble { input, replicates, export_replicates } => {
            let (network, _) = load_network(input, &config)?;
            let params = EnsembleParams {
                n_replicates: replicates.unwrap_or(config.ensemble_size),
                delta_t: config.delta_t,
                min_events: config.min_events,
                n_bins: config.n_bins,
                base_seed: config.seed,
            };
            let stats = ensemble_run(&network, &params)?;
            let path = exports::write_ensemble(&out_dir, &stats)?;
            match stats.z_score {
                Some(z) => println!(
                    "observed diversity {:.6} vs ensemble {:.6} +- {:.6} (z = {:.2})",
                    stats.observed.diversity, stats.ensemble_mean, stats.ensemble_std, z
                ),
                None => println!("degenerate ensemble: zero standard deviation"),
            }
            println!("wrote {}", path.display());
            if *export_replicates {
                // per-replicate feature matrices, reproduced from the seeds
                for (index, replicate) in stats.replicates.iter().enumerate() {
                    let shuffled = time_shuffle(&network, replicate.seed);
                    let shuffled_graph = build_event_graph(&shuffled.network);
                    let replicate_config = PipelineConfig {
                        delta_t: params.delta_t,
                        min_events: params.min_events,
                        n_bins: params.n_bins,
                        ..config.clone()
                    };
                    let set = decompose(&shuffled_graph, &replicate_config)?;
                    let stage = feature_stage(&shuffled.network, &set, &replicate_config)?;
                    let path = exports::write_features(
                        &out_dir,
                        &format!("replicate_{index:03}_features"),
                        &shuffled.network,
                        &stage.ids,
                        &stage.features,
                        &stage.vectors,
                        format,
                    )?;
                    println!("wrote {}", path.display());
                }
            }
        }
        Command::Intervals { input, static_sub } => {
            let (network, _) = load_network(input, &config)?;
            let graph = build_event_graph(&network);
            let width = match config.interval_width {
                Some(width) => width,
                None => {
                    let set = decompose(&graph, &config)?;
                    tempograph_cli::compare::default_interval_width(&network, &set.components)
                        .context("no components to derive the interval width from")?
                }
            };
            let units =
                interval_decompose(&network, width, config.interval_offset, *static_sub)?;
            let listing = exports::write_intervals(
                &out_dir, &units, width, config.interval_offset, *static_sub,
            )?;
            // embed the units through the standard feature path
            let unit_components = units_as_components(&graph, &units);
            let spanning_set = decompose(&graph, &config)?;
            let spanning = if spanning_set.components.is_empty() {
                None
            } else {
                Some(spanning_fraction(
                    &network, &spanning_set.components, width, config.interval_offset,
                )?)
            };
            println!("{} units at width {width}", units.len());
            if let Some(fraction) = spanning {
                println!(
                    "{:.1}% of temporal components span multiple intervals",
                    fraction * 100.0
                );
            }
            println!("wrote {}", listing.display());
            let embeddable: Vec<_> = unit_components
                .iter()
                .filter(|c| c.n_events() >= config.min_events && c.has_motif_edges())
                .cloned()
                .collect();
            if !embeddable.is_empty() {
                let params = config.embed_params();
                let features = tempograph::features::extract_all(&network, &embeddable, &params)?;
                let vectors: Vec<_> = features.iter().map(|f| f.vector()).collect();
                let ids: Vec<usize> = (0..features.len()).collect();
                let path = exports::write_features(
                    &out_dir, "interval_features", &network, &ids, &features, &vectors, format,
                )?;
                println!("wrote {}", path.display());
            }
        }
        Command::Compare { input } => {
            let (network, _) = load_network(input, &config)?;
            let graph = build_event_graph(&network);
            let report = compare_decompositions(&network, &graph, &config)?;
            let path = exports::write_compare(&out_dir, &report)?;
            let describe = |r: &tempograph_cli::compare::DecompositionReport| match (r.best_k, r.best_silhouette) {
                (Some(k), Some(score)) => format!("best k = {k}, silhouette = {score:.4}"),
                _ => "not clustered".to_string(),
            };
            println!("temporal components ({}): {}", report.temporal.n_embedded, describe(&report.temporal));
            println!("intervals ({}): {}", report.intervals.n_embedded, describe(&report.intervals));
            println!(
                "interval static components ({}): {}",
                report.interval_static.n_embedded,
                describe(&report.interval_static)
            );
            println!("wrote {}", path.display());
        }
        Command::Pca { input, components } => {
            let (network, _) = load_network(input, &config)?;
            let graph = build_event_graph(&network);
            let set = decompose(&graph, &config)?;
            let stage = feature_stage(&network, &set, &config)?;
            anyhow::ensure!(stage.vectors.len() >= 2, "pca needs at least 2 embedded components");
            let rows: Vec<Vec<f64>> = stage.vectors.iter().map(|v| v.as_slice().to_vec()).collect();
            let dim = rows[0].len();
            let names = tempograph::features::feature_names(network.colors());
            let n_components = components.unwrap_or(config.pca_components).min(dim);
            let report = pca(&rows, n_components, 3, Some(&names))?;
            let path = exports::write_pca(&out_dir, &report)?;
            let shown: Vec<String> = report
                .explained_variance_ratio
                .iter()
                .take(3)
                .map(|r| format!("{:.1}%", r * 100.0))
                .collect();
            println!("explained variance: {}", shown.join(", "));
            println!("wrote {}", path.display());
        }
        Command::Barcode { input, window_start, window_end, top } => {
            let (network, _) = load_network(input, &config)?;
            let graph = build_event_graph(&network);
            let set = decompose(&graph, &config)?;
            let span = network.time_span().context("empty network")?;
            let window = (window_start.unwrap_or(span.0), window_end.unwrap_or(span.1));
            let rows = exports::barcode_rows(
                &network, &set.components, window, top.unwrap_or(config.barcode_top),
            )?;
            let path = exports::write_barcode(&out_dir, &rows, format)?;
            println!("wrote {}", path.display());
        }
        Command::Run { input, with_ensemble } => {
            let (network, report) = load_network(input, &config)?;
            println!(
                "parsed {} events ({} self-loops skipped)",
                report.parsed, report.skipped_self_loops
            );
            let outcome =
                runner::run_pipeline(&network, &config, &out_dir, format, *with_ensemble)?;
            for warning in &outcome.warnings {
                eprintln!("warning: {warning}");
            }
            for (name, path) in &outcome.artifacts {
                println!("{name}: {}", path.display());
            }
        }
    }
    Ok(())
}
