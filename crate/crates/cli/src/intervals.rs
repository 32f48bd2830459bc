//! Fixed-width interval decomposition: the aggregation baseline the
//! temporal-component decomposition is compared against.
//!
//! Events are binned into half-open intervals `[k*w, (k+1)*w)` anchored at
//! the first event time (plus a configurable offset). Each interval —
//! optionally split further into the weakly-connected components of its
//! static aggregate — becomes a unit that runs through the same embedding
//! code path as a temporal component, with event-graph edges restricted to
//! pairs inside the unit.

use std::collections::HashMap;

use serde::Serialize;

use tempograph::error::{Error, Result};
use tempograph::event_graph::{EventGraph, TemporalComponent};
use tempograph::events::{EventId, TemporalNetwork};
use tempograph::union_find::UnionFind;

/// One unit of the interval decomposition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalComponent {
    /// Interval index, starting at zero for the earliest occupied interval.
    pub interval: usize,
    /// Static sub-component index within the interval, when requested.
    pub sub: Option<usize>,
    /// Member events, ascending.
    pub events: Vec<EventId>,
}

fn check_width(width: f64) -> Result<()> {
    if width.is_nan() || width <= 0.0 {
        return Err(Error::InvalidParameter(format!("interval width {width} must be positive")));
    }
    Ok(())
}

/// Bin events into fixed-width intervals; with `sub_components`, split each
/// interval into the weakly-connected components of its static aggregate.
/// Empty intervals produce no unit.
pub fn interval_decompose(
    network: &TemporalNetwork,
    width: f64,
    offset: f64,
    sub_components: bool,
) -> Result<Vec<IntervalComponent>> {
    check_width(width)?;
    let Some((t_min, _)) = network.time_span() else {
        return Ok(Vec::new());
    };
    let origin = t_min + offset;

    // raw indices may be negative when the offset pushes the origin forward
    let mut by_interval: HashMap<i64, Vec<EventId>> = HashMap::new();
    for event in network.events() {
        let index = if width.is_infinite() { 0 } else { ((event.time - origin) / width).floor() as i64 };
        by_interval.entry(index).or_default().push(event.id);
    }
    let mut raw_indices: Vec<i64> = by_interval.keys().copied().collect();
    raw_indices.sort_unstable();
    let base = raw_indices[0];

    let mut units = Vec::new();
    for raw in raw_indices {
        let interval = (raw - base) as usize;
        let mut events = by_interval.remove(&raw).unwrap();
        events.sort_unstable();
        if !sub_components {
            units.push(IntervalComponent { interval, sub: None, events });
            continue;
        }
        // split by weak connectivity of the interval's static aggregate
        let mut node_slot: HashMap<u32, usize> = HashMap::new();
        for &id in &events {
            let event = network.event(id);
            let next = node_slot.len();
            node_slot.entry(event.source.0).or_insert(next);
            let next = node_slot.len();
            node_slot.entry(event.target.0).or_insert(next);
        }
        let mut uf = UnionFind::new(node_slot.len());
        for &id in &events {
            let event = network.event(id);
            uf.union(node_slot[&event.source.0], node_slot[&event.target.0]);
        }
        let mut groups: HashMap<usize, Vec<EventId>> = HashMap::new();
        for &id in &events {
            let event = network.event(id);
            groups.entry(uf.find(node_slot[&event.source.0])).or_default().push(id);
        }
        let mut grouped: Vec<Vec<EventId>> = groups.into_values().collect();
        // deterministic sub order: by first event id
        grouped.sort_by_key(|g| g[0]);
        for (sub, events) in grouped.into_iter().enumerate() {
            units.push(IntervalComponent { interval, sub: Some(sub), events });
        }
    }
    Ok(units)
}

/// Attach the event-graph edges internal to each unit, yielding components
/// that run through the standard feature pipeline. Edges crossing unit
/// boundaries are discarded; no inter-event-time threshold is applied.
pub fn units_as_components(
    graph: &EventGraph,
    units: &[IntervalComponent],
) -> Vec<TemporalComponent> {
    let mut unit_of = vec![usize::MAX; graph.n_events];
    for (index, unit) in units.iter().enumerate() {
        for &event in &unit.events {
            unit_of[event.index()] = index;
        }
    }
    let mut edges_per_unit: Vec<Vec<tempograph::event_graph::EventGraphEdge>> =
        vec![Vec::new(); units.len()];
    for edge in &graph.edges {
        let pred_unit = unit_of[edge.pred.index()];
        if pred_unit != usize::MAX && pred_unit == unit_of[edge.succ.index()] {
            edges_per_unit[pred_unit].push(*edge);
        }
    }
    units
        .iter()
        .zip(edges_per_unit)
        .map(|(unit, edges)| TemporalComponent {
            events: unit.events.clone(),
            edges,
            delta_t: f64::INFINITY,
        })
        .collect()
}

/// Fraction of components whose first and last events land in different
/// intervals of width `width`.
pub fn spanning_fraction(
    network: &TemporalNetwork,
    components: &[TemporalComponent],
    width: f64,
    offset: f64,
) -> Result<f64> {
    check_width(width)?;
    if components.is_empty() {
        return Err(Error::EmptyInput("components"));
    }
    let origin = network.time_span().map(|(t_min, _)| t_min + offset).unwrap_or(0.0);
    let interval_of = |time: f64| -> i64 {
        if width.is_infinite() {
            0
        } else {
            ((time - origin) / width).floor() as i64
        }
    };
    let spanning = components
        .iter()
        .filter(|component| {
            component
                .time_range(network)
                .map(|(first, last)| interval_of(first) != interval_of(last))
                .unwrap_or(false)
        })
        .count();
    Ok(spanning as f64 / components.len() as f64)
}
