//! Temporal-network decomposition and behavioural embedding.
//!
//! The pipeline implemented by this crate:
//!
//! 1. Ingest a stream of directed, instantaneous, colored events
//!    ([`events::TemporalNetwork`]).
//! 2. Build the event graph: a DAG whose nodes are events and whose edges
//!    link consecutive events sharing a participant, weighted by inter-event
//!    time ([`event_graph`]).
//! 3. Threshold edges at `delta_t` and extract weakly-connected temporal
//!    components.
//! 4. Classify every edge as a two-event colored motif ([`motifs`]) and embed
//!    each component in a scale-invariant feature space ([`features`]).
//! 5. Cluster the embeddings with Ward's method and pick the cluster count by
//!    a centroid silhouette score ([`clustering`]).
//! 6. Validate against time-shuffled null models ([`null_model`]).
//!
//! [`synth`] provides deterministic synthetic event streams used by the test
//! suites and handy for demos.

pub mod clustering;
pub mod error;
pub mod event_graph;
pub mod events;
pub mod features;
pub mod motifs;
pub mod null_model;
pub mod synth;
pub mod union_find;

pub use error::{Error, Result};
pub use event_graph::{
    build_event_graph, components, dt_scan, threshold, ComponentSet, EventGraph, EventGraphEdge,
    StreamingBuilder, TemporalComponent,
};
pub use events::{Event, EventRecord, ParseOptions, TemporalNetwork};
pub use features::{ComponentFeatures, ComponentSummary, EmbedParams, FeatureVector};
pub use motifs::{MotifBase, MotifDistribution, MotifLabel};
