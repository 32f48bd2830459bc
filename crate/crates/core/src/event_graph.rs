//! Event-graph construction and temporal decomposition.
//!
//! The event graph is a DAG whose nodes are events. For every network node,
//! each consecutive pair of events it participates in contributes a directed
//! edge weighted by the inter-event time. A pair reachable through both
//! shared nodes is stored once. Thresholding edge weights at `delta_t` and
//! taking weakly-connected components decomposes the event sequence into
//! temporal components.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::events::{ColorId, Event, EventId, NodeId, TemporalNetwork};
use crate::motifs::MotifLabel;
use crate::union_find::UnionFind;

/// A directed edge between two consecutive events of some node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EventGraphEdge {
    pub pred: EventId,
    pub succ: EventId,
    /// Inter-event time `t_succ - t_pred`, non-negative.
    pub iet: f64,
    /// Colored motif of the pair; `None` when either event is a self-loop.
    pub motif: Option<MotifLabel>,
}

/// The full (unthresholded) event graph.
///
/// Edges are stored sorted by `(pred, succ)`; event ids are topological.
#[derive(Clone, Debug, PartialEq)]
pub struct EventGraph {
    pub n_events: usize,
    pub edges: Vec<EventGraphEdge>,
}

/// A weakly-connected component of the thresholded event graph.
#[derive(Clone, Debug, PartialEq)]
pub struct TemporalComponent {
    /// Member event ids, ascending.
    pub events: Vec<EventId>,
    /// Member edges (all satisfy `iet <= delta_t`), in `(pred, succ)` order.
    pub edges: Vec<EventGraphEdge>,
    /// Threshold this component was extracted at.
    pub delta_t: f64,
}

impl TemporalComponent {
    pub fn n_events(&self) -> usize {
        self.events.len()
    }

    /// `(first, last)` event times within the component.
    pub fn time_range(&self, network: &TemporalNetwork) -> Option<(f64, f64)> {
        let first = self.events.first()?;
        let last = self.events.last()?;
        Some((network.event(*first).time, network.event(*last).time))
    }

    /// Lifetime `max t - min t` (zero for a singleton).
    pub fn duration(&self, network: &TemporalNetwork) -> f64 {
        self.time_range(network).map(|(a, b)| b - a).unwrap_or(0.0)
    }

    /// True when at least one edge carries a motif label, i.e. the component
    /// can be embedded.
    pub fn has_motif_edges(&self) -> bool {
        self.edges.iter().any(|e| e.motif.is_some())
    }
}

/// Components at or above the size threshold plus a tally of the rest.
#[derive(Clone, Debug)]
pub struct ComponentSet {
    /// Sorted by event count descending, then by first event id.
    pub components: Vec<TemporalComponent>,
    pub residual: Residual,
}

/// Components below `min_events`, counted but not returned.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Residual {
    pub n_components: usize,
    pub n_events: usize,
}

fn classify_pair(network_events: &[Event], pred: EventId, succ: EventId) -> EventGraphEdge {
    let e1 = &network_events[pred.index()];
    let e2 = &network_events[succ.index()];
    // Self-loop events participate in the graph but carry no motif.
    let motif = MotifLabel::classify(e1, e2).ok();
    EventGraphEdge { pred, succ, iet: e2.time - e1.time, motif }
}

/// Batch construction from per-node event sequences.
pub fn build_event_graph(network: &TemporalNetwork) -> EventGraph {
    let events = network.events();
    let mut sequences: Vec<Vec<EventId>> = vec![Vec::new(); network.n_nodes()];
    for event in events {
        sequences[event.source.index()].push(event.id);
        if event.target != event.source {
            sequences[event.target.index()].push(event.id);
        }
    }

    let mut pairs: Vec<(EventId, EventId)> = Vec::new();
    for sequence in &sequences {
        for window in sequence.windows(2) {
            pairs.push((window[0], window[1]));
        }
    }
    // A pair sharing both nodes is generated once per node; keep one edge.
    pairs.sort_unstable();
    pairs.dedup();

    let edges = pairs.into_iter().map(|(pred, succ)| classify_pair(events, pred, succ)).collect();
    EventGraph { n_events: events.len(), edges }
}

#[derive(Debug)]
struct Pending {
    time: f64,
    seq: u64,
    source: NodeId,
    target: NodeId,
    color: ColorId,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.time.total_cmp(&other.time).then(self.seq.cmp(&other.seq))
    }
}

/// Incremental construction over an ordered event feed.
///
/// Keeps only the last event per node, so each arrival costs a constant
/// number of map operations. Events must arrive in nondecreasing time order;
/// a bounded lateness window can be configured to absorb mild disorder, in
/// which case events are buffered and released once the watermark
/// (`max time seen - lateness`) passes them.
pub struct StreamingBuilder {
    lateness: f64,
    max_seen: f64,
    next_seq: u64,
    pending: BinaryHeap<Reverse<Pending>>,
    events: Vec<Event>,
    last_event: HashMap<NodeId, EventId>,
    edges: Vec<EventGraphEdge>,
}

impl StreamingBuilder {
    /// Strict builder: any event earlier than the latest seen is an error.
    pub fn new() -> Self {
        Self::with_lateness(0.0)
    }

    /// Builder that tolerates events up to `lateness` seconds behind the
    /// maximum time seen so far.
    pub fn with_lateness(lateness: f64) -> Self {
        Self {
            lateness: lateness.max(0.0),
            max_seen: f64::NEG_INFINITY,
            next_seq: 0,
            pending: BinaryHeap::new(),
            events: Vec::new(),
            last_event: HashMap::new(),
            edges: Vec::new(),
        }
    }

    /// Feed one event. Ids are assigned in emission (time) order.
    pub fn push(&mut self, source: NodeId, target: NodeId, time: f64, color: ColorId) -> Result<()> {
        if !time.is_finite() || time < 0.0 {
            return Err(Error::InvalidParameter(format!("event time {time} must be finite and >= 0")));
        }
        let watermark = self.watermark();
        if time < watermark {
            return Err(Error::OutOfOrder { index: self.next_seq as usize, time, watermark });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.pending.push(Reverse(Pending { time, seq, source, target, color }));
        if time > self.max_seen {
            self.max_seen = time;
        }
        let watermark = self.watermark();
        while let Some(Reverse(head)) = self.pending.peek() {
            if head.time <= watermark {
                let Reverse(next) = self.pending.pop().unwrap();
                self.emit(next);
            } else {
                break;
            }
        }
        Ok(())
    }

    fn watermark(&self) -> f64 {
        if self.max_seen == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max_seen - self.lateness
        }
    }

    fn emit(&mut self, pending: Pending) {
        let id = EventId(self.events.len() as u32);
        let event = Event {
            id,
            source: pending.source,
            target: pending.target,
            time: pending.time,
            color: pending.color,
        };
        self.events.push(event);

        let pred_source = self.last_event.get(&pending.source).copied();
        let pred_target = if pending.target == pending.source {
            None
        } else {
            self.last_event.get(&pending.target).copied()
        };
        if let Some(pred) = pred_source {
            self.edges.push(classify_pair(&self.events, pred, id));
        }
        if let Some(pred) = pred_target {
            // The same predecessor through both shared nodes yields one edge.
            if pred_source != Some(pred) {
                self.edges.push(classify_pair(&self.events, pred, id));
            }
        }
        self.last_event.insert(pending.source, id);
        self.last_event.insert(pending.target, id);
    }

    /// Flush any buffered events and return the finished graph.
    pub fn finish(mut self) -> EventGraph {
        while let Some(Reverse(next)) = self.pending.pop() {
            self.emit(next);
        }
        let mut edges = self.edges;
        edges.sort_unstable_by_key(|e| (e.pred, e.succ));
        EventGraph { n_events: self.events.len(), edges }
    }
}

impl Default for StreamingBuilder {
    fn default() -> Self {
        Self::new()
    }
}

/// Run the streaming construction over an already-sorted network.
/// Produces a graph identical to [`build_event_graph`].
pub fn build_streaming(network: &TemporalNetwork) -> Result<EventGraph> {
    let mut builder = StreamingBuilder::new();
    for event in network.events() {
        builder.push(event.source, event.target, event.time, event.color)?;
    }
    Ok(builder.finish())
}

/// Edges with inter-event time at most `delta_t`, in stored order.
pub fn threshold(graph: &EventGraph, delta_t: f64) -> Result<Vec<EventGraphEdge>> {
    if delta_t.is_nan() || delta_t <= 0.0 {
        return Err(Error::InvalidParameter(format!("delta_t {delta_t} must be positive")));
    }
    Ok(graph.edges.iter().filter(|e| e.iet <= delta_t).copied().collect())
}

/// Weakly-connected components of the `delta_t`-thresholded graph.
///
/// Components with fewer than `min_events` events are excluded from the
/// returned list and tallied in the residual. The list is sorted by event
/// count descending (ties by first event id).
pub fn components(graph: &EventGraph, delta_t: f64, min_events: usize) -> Result<ComponentSet> {
    if min_events < 1 {
        return Err(Error::InvalidParameter("min_events must be >= 1".to_string()));
    }
    let kept = threshold(graph, delta_t)?;
    let n = graph.n_events;
    let mut uf = UnionFind::new(n);
    for edge in &kept {
        uf.union(edge.pred.index(), edge.succ.index());
    }

    let mut member_events: HashMap<usize, Vec<EventId>> = HashMap::new();
    for i in 0..n {
        member_events.entry(uf.find(i)).or_default().push(EventId(i as u32));
    }
    let mut member_edges: HashMap<usize, Vec<EventGraphEdge>> = HashMap::new();
    for edge in kept {
        member_edges.entry(uf.find(edge.pred.index())).or_default().push(edge);
    }

    let mut all: Vec<TemporalComponent> = member_events
        .into_iter()
        .map(|(root, events)| TemporalComponent {
            events,
            edges: member_edges.remove(&root).unwrap_or_default(),
            delta_t,
        })
        .collect();
    all.sort_by_key(|c| (Reverse(c.events.len()), c.events[0]));

    let mut residual = Residual::default();
    let mut kept_components = Vec::new();
    for component in all {
        if component.events.len() >= min_events {
            kept_components.push(component);
        } else {
            residual.n_components += 1;
            residual.n_events += component.events.len();
        }
    }
    Ok(ComponentSet { components: kept_components, residual })
}

/// One row of a threshold scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DtScanRecord {
    pub delta_t: f64,
    /// Component count with no size filter (singletons included).
    pub n_components: usize,
    /// Component count at the scan's `min_events`.
    pub n_filtered: usize,
    /// Event count of the largest component.
    pub largest: usize,
}

/// Component statistics across an ascending grid of thresholds.
pub fn dt_scan(graph: &EventGraph, grid: &[f64], min_events: usize) -> Result<Vec<DtScanRecord>> {
    if grid.is_empty() {
        return Err(Error::EmptyInput("delta_t grid"));
    }
    for &value in grid {
        if value.is_nan() || value <= 0.0 {
            return Err(Error::InvalidParameter(format!("grid value {value} must be positive")));
        }
    }
    for window in grid.windows(2) {
        if window[0].total_cmp(&window[1]).is_ge() {
            return Err(Error::InvalidParameter("delta_t grid must be strictly ascending".to_string()));
        }
    }
    grid.iter()
        .map(|&delta_t| {
            let set = components(graph, delta_t, 1)?;
            let largest = set.components.first().map(|c| c.events.len()).unwrap_or(0);
            let n_filtered = set.components.iter().filter(|c| c.events.len() >= min_events).count();
            Ok(DtScanRecord { delta_t, n_components: set.components.len(), n_filtered, largest })
        })
        .collect()
}

/// Event counts of the weakly-connected components of the statically
/// aggregated network, descending. This is the `delta_t -> infinity` limit of
/// the temporal decomposition.
pub fn static_components(network: &TemporalNetwork) -> Vec<usize> {
    let mut uf = UnionFind::new(network.n_nodes());
    for event in network.events() {
        uf.union(event.source.index(), event.target.index());
    }
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for event in network.events() {
        *counts.entry(uf.find(event.source.index())).or_default() += 1;
    }
    let mut sizes: Vec<usize> = counts.into_values().collect();
    sizes.sort_unstable_by_key(|&s| Reverse(s));
    sizes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::{EventRecord, ParseOptions};
    use crate::motifs::MotifBase;

    pub(crate) fn network_from(rows: &[(&str, &str, f64)]) -> TemporalNetwork {
        let records = rows
            .iter()
            .map(|(s, t, time)| EventRecord {
                source: s.to_string(),
                target: t.to_string(),
                time: *time,
                color: None,
            })
            .collect::<Vec<_>>();
        TemporalNetwork::from_records(records, &ParseOptions::default()).unwrap().0
    }

    /// Three events: (a,b,1), (b,c,3), (a,b,5).
    fn three_event_network() -> TemporalNetwork {
        network_from(&[("a", "b", 1.0), ("b", "c", 3.0), ("a", "b", 5.0)])
    }

    #[test]
    fn batch_builds_expected_edges() {
        let net = three_event_network();
        let graph = build_event_graph(&net);
        let described: Vec<(u32, u32, f64, MotifBase)> = graph
            .edges
            .iter()
            .map(|e| (e.pred.0, e.succ.0, e.iet, e.motif.unwrap().base))
            .collect();
        assert_eq!(
            described,
            vec![
                (0, 1, 2.0, MotifBase::Abbc),
                (0, 2, 4.0, MotifBase::Abab),
                (1, 2, 2.0, MotifBase::Abca),
            ]
        );
    }

    #[test]
    fn single_event_and_disjoint_events() {
        let graph = build_event_graph(&network_from(&[("a", "b", 1.0)]));
        assert_eq!(graph.n_events, 1);
        assert!(graph.edges.is_empty());

        let graph = build_event_graph(&network_from(&[("a", "b", 1.0), ("c", "d", 2.0)]));
        assert!(graph.edges.is_empty());
    }

    #[test]
    fn repeated_pair_dedupes_parallel_edges() {
        let net = network_from(&[("a", "b", 1.0), ("a", "b", 2.0), ("a", "b", 3.0)]);
        let graph = build_event_graph(&net);
        let pairs: Vec<(u32, u32)> = graph.edges.iter().map(|e| (e.pred.0, e.succ.0)).collect();
        assert_eq!(pairs, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn streaming_equals_batch_on_examples() {
        for net in [
            three_event_network(),
            network_from(&[("a", "b", 1.0), ("a", "b", 2.0), ("a", "b", 3.0)]),
            network_from(&[("a", "b", 1.0)]),
            network_from(&[]),
        ] {
            assert_eq!(build_streaming(&net).unwrap(), build_event_graph(&net));
        }
    }

    #[test]
    fn streaming_first_event_emits_no_edge() {
        let mut builder = StreamingBuilder::new();
        builder.push(NodeId(0), NodeId(1), 1.0, ColorId(0)).unwrap();
        let graph = builder.finish();
        assert_eq!(graph.n_events, 1);
        assert!(graph.edges.is_empty());
    }

    #[test]
    fn streaming_rejects_out_of_order() {
        let mut builder = StreamingBuilder::new();
        builder.push(NodeId(0), NodeId(1), 5.0, ColorId(0)).unwrap();
        let err = builder.push(NodeId(1), NodeId(2), 4.0, ColorId(0)).unwrap_err();
        assert!(matches!(err, Error::OutOfOrder { .. }));
    }

    #[test]
    fn lateness_window_restores_order() {
        // Events arrive up to 4 seconds late; a window of 4.0 absorbs that.
        let net = network_from(&[("a", "b", 1.0), ("b", "c", 3.0), ("a", "b", 5.0), ("c", "d", 6.0)]);
        let mut builder = StreamingBuilder::with_lateness(4.0);
        let arrival = [2usize, 0, 1, 3]; // sorted-index arrival order
        for &i in &arrival {
            let e = net.event(EventId(i as u32));
            builder.push(e.source, e.target, e.time, e.color).unwrap();
        }
        assert_eq!(builder.finish(), build_event_graph(&net));

        // 1.0 arrives 4 seconds behind 5.0, beyond a window of 2.0.
        let mut strict = StreamingBuilder::with_lateness(2.0);
        let e = net.event(EventId(2));
        strict.push(e.source, e.target, e.time, e.color).unwrap();
        let e = net.event(EventId(0));
        assert!(matches!(
            strict.push(e.source, e.target, e.time, e.color),
            Err(Error::OutOfOrder { .. })
        ));
    }

    #[test]
    fn threshold_examples() {
        let graph = build_event_graph(&three_event_network());
        let kept = threshold(&graph, 3.0).unwrap();
        let pairs: Vec<(u32, u32)> = kept.iter().map(|e| (e.pred.0, e.succ.0)).collect();
        assert_eq!(pairs, vec![(0, 1), (1, 2)]);

        assert_eq!(threshold(&graph, f64::INFINITY).unwrap().len(), 3);
        assert!(threshold(&graph, 0.5).unwrap().is_empty());
        assert!(threshold(&graph, -1.0).is_err());
    }

    #[test]
    fn components_examples() {
        let graph = build_event_graph(&three_event_network());

        let set = components(&graph, 3.0, 1).unwrap();
        assert_eq!(set.components.len(), 1);
        assert_eq!(set.components[0].n_events(), 3);
        assert_eq!(set.components[0].edges.len(), 2);
        assert_eq!(set.residual, Residual::default());

        let set = components(&graph, 1.0, 1).unwrap();
        assert_eq!(set.components.len(), 3);
        assert!(set.components.iter().all(|c| c.n_events() == 1));

        let set = components(&graph, 3.0, 5).unwrap();
        assert!(set.components.is_empty());
        assert_eq!(set.residual, Residual { n_components: 1, n_events: 3 });
    }

    #[test]
    fn components_sorted_by_size() {
        let net = network_from(&[
            ("a", "b", 1.0),
            ("x", "y", 2.0),
            ("a", "b", 2.0),
            ("a", "c", 3.0),
        ]);
        let graph = build_event_graph(&net);
        let set = components(&graph, 10.0, 1).unwrap();
        let sizes: Vec<usize> = set.components.iter().map(|c| c.n_events()).collect();
        assert_eq!(sizes, vec![3, 1]);
    }

    #[test]
    fn dt_scan_example() {
        let graph = build_event_graph(&three_event_network());
        let records = dt_scan(&graph, &[1.0, 3.0, f64::INFINITY], 1).unwrap();
        let largest: Vec<usize> = records.iter().map(|r| r.largest).collect();
        assert_eq!(largest, vec![1, 3, 3]);
        let counts: Vec<usize> = records.iter().map(|r| r.n_components).collect();
        assert_eq!(counts, vec![3, 1, 1]);

        let single = build_event_graph(&network_from(&[("a", "b", 1.0)]));
        let records = dt_scan(&single, &[1.0, 2.0, 3.0], 1).unwrap();
        assert!(records.iter().all(|r| r.n_components == 1));

        assert!(dt_scan(&graph, &[], 1).is_err());
        assert!(dt_scan(&graph, &[3.0, 1.0], 1).is_err());
    }

    #[test]
    fn static_limit_matches_infinite_threshold() {
        let net = network_from(&[
            ("a", "b", 1.0),
            ("b", "c", 50.0),
            ("x", "y", 2.0),
            ("y", "x", 90.0),
            ("p", "q", 5.0),
        ]);
        let graph = build_event_graph(&net);
        let set = components(&graph, f64::INFINITY, 1).unwrap();
        let statics = static_components(&net);
        assert_eq!(set.components.len(), statics.len());
        let temporal_sizes: Vec<usize> = set.components.iter().map(|c| c.n_events()).collect();
        assert_eq!(temporal_sizes, statics);
    }

    #[test]
    fn self_loop_events_have_unlabeled_edges() {
        let records = vec![
            EventRecord { source: "a".into(), target: "a".into(), time: 1.0, color: None },
            EventRecord { source: "a".into(), target: "b".into(), time: 2.0, color: None },
        ];
        let options = ParseOptions { keep_self_loops: true, ..Default::default() };
        let (net, _) = TemporalNetwork::from_records(records, &options).unwrap();
        let graph = build_event_graph(&net);
        assert_eq!(graph.edges.len(), 1);
        assert!(graph.edges[0].motif.is_none());
    }
}
