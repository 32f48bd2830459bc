//! Event data model and stream ingestion.
//!
//! Events are directed, instantaneous, colored interactions. A
//! [`TemporalNetwork`] is the validated, time-sorted sequence of events
//! together with interned node and color tables. It is immutable after
//! construction and safe to share across threads.

use std::collections::HashMap;
use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of a node label in [`TemporalNetwork::nodes`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

/// Dense index of a color label in [`TemporalNetwork::colors`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ColorId(pub u16);

/// Position of an event in time-sorted order (dense `0..n`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EventId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ColorId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EventId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One directed, instantaneous, colored interaction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub id: EventId,
    pub source: NodeId,
    pub target: NodeId,
    /// Seconds; non-negative and finite.
    pub time: f64,
    pub color: ColorId,
}

impl Event {
    #[inline]
    pub fn is_self_loop(&self) -> bool {
        self.source == self.target
    }

    /// True if the two events share at least one participant node.
    #[inline]
    pub fn shares_node(&self, other: &Event) -> bool {
        self.source == other.source
            || self.source == other.target
            || self.target == other.source
            || self.target == other.target
    }
}

/// A raw, unvalidated input record.
#[derive(Clone, Debug, PartialEq)]
pub struct EventRecord {
    pub source: String,
    pub target: String,
    pub time: f64,
    /// Absent records default to [`ParseOptions::default_color`].
    pub color: Option<String>,
}

/// Ingestion options.
#[derive(Clone, Debug)]
pub struct ParseOptions {
    /// Keep self-loop events instead of skipping them. Kept self-loops are
    /// excluded from motif classification downstream.
    pub keep_self_loops: bool,
    /// Color assigned to records without one.
    pub default_color: String,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self { keep_self_loops: false, default_color: "m".to_string() }
    }
}

/// Counters reported alongside a parsed network.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ParseReport {
    /// Events that made it into the network.
    pub parsed: usize,
    /// Self-loop records skipped (zero when `keep_self_loops` is set).
    pub skipped_self_loops: usize,
}

/// Per-color tally in a [`NetworkSummary`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColorCount {
    pub label: String,
    pub count: usize,
    pub fraction: f64,
}

/// Time extent of a network.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimeSpan {
    pub start: f64,
    pub end: f64,
    pub duration: f64,
}

/// Headline statistics for a network.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetworkSummary {
    pub n_events: usize,
    pub n_nodes: usize,
    pub colors: Vec<ColorCount>,
    /// Absent for an empty network.
    pub time_span: Option<TimeSpan>,
}

/// A validated, time-sorted event sequence with interned labels.
///
/// Invariants:
/// - events are sorted by `(time, input order)` (stable ties);
/// - event ids are dense `0..n` in that order;
/// - node ids index `nodes` in order of first appearance;
/// - color ids index `colors`, sorted lexicographically.
#[derive(Clone, Debug, PartialEq)]
pub struct TemporalNetwork {
    events: Vec<Event>,
    nodes: Vec<String>,
    colors: Vec<String>,
}

impl TemporalNetwork {
    /// Build a network from raw records: validate, stable-sort by time,
    /// assign dense ids, and intern labels.
    pub fn from_records<I>(records: I, options: &ParseOptions) -> Result<(Self, ParseReport)>
    where
        I: IntoIterator<Item = EventRecord>,
    {
        let numbered = records.into_iter().enumerate().map(|(i, r)| (i as u64 + 1, r));
        Self::from_numbered_records(numbered, options)
    }

    /// Like [`Self::from_records`] but with caller-supplied line numbers for
    /// error reporting.
    pub fn from_numbered_records<I>(records: I, options: &ParseOptions) -> Result<(Self, ParseReport)>
    where
        I: IntoIterator<Item = (u64, EventRecord)>,
    {
        let mut rows: Vec<EventRecord> = Vec::new();
        let mut report = ParseReport::default();

        for (line, record) in records {
            if record.source.is_empty() || record.target.is_empty() {
                return Err(Error::Record {
                    line,
                    message: "empty source or target".to_string(),
                });
            }
            if !record.time.is_finite() || record.time < 0.0 {
                return Err(Error::Record {
                    line,
                    message: format!("invalid time {:?} (must be finite and >= 0)", record.time),
                });
            }
            if record.source == record.target && !options.keep_self_loops {
                report.skipped_self_loops += 1;
                continue;
            }
            rows.push(record);
        }

        // Stable sort: equal timestamps keep input order, which provides the
        // strict total order used everywhere downstream.
        rows.sort_by(|a, b| a.time.total_cmp(&b.time));

        let mut node_index: HashMap<String, NodeId> = HashMap::new();
        let mut nodes: Vec<String> = Vec::new();
        let intern_node = |label: &str, nodes: &mut Vec<String>, map: &mut HashMap<String, NodeId>| {
            if let Some(&id) = map.get(label) {
                return id;
            }
            let id = NodeId(nodes.len() as u32);
            nodes.push(label.to_string());
            map.insert(label.to_string(), id);
            id
        };

        // Color ids follow the lexicographic order of observed labels so the
        // motif layout is stable for a given label set.
        let color_labels: Vec<String> = rows
            .iter()
            .map(|r| r.color.as_deref().unwrap_or(&options.default_color).to_string())
            .collect();
        let mut distinct_colors: Vec<String> = color_labels.clone();
        distinct_colors.sort();
        distinct_colors.dedup();
        let color_index: HashMap<&str, ColorId> = distinct_colors
            .iter()
            .enumerate()
            .map(|(i, label)| (label.as_str(), ColorId(i as u16)))
            .collect();

        let mut events = Vec::with_capacity(rows.len());
        for (i, record) in rows.iter().enumerate() {
            let source = intern_node(&record.source, &mut nodes, &mut node_index);
            let target = intern_node(&record.target, &mut nodes, &mut node_index);
            let color = color_index[color_labels[i].as_str()];
            events.push(Event { id: EventId(i as u32), source, target, time: record.time, color });
        }

        report.parsed = events.len();
        Ok((Self { events, nodes, colors: distinct_colors }, report))
    }

    /// Rebuild a network from already-interned events, keeping the label
    /// tables. Events are stable-sorted by time and re-indexed.
    pub(crate) fn from_parts(mut events: Vec<Event>, nodes: Vec<String>, colors: Vec<String>) -> Self {
        events.sort_by(|a, b| a.time.total_cmp(&b.time));
        for (i, event) in events.iter_mut().enumerate() {
            event.id = EventId(i as u32);
        }
        Self { events, nodes, colors }
    }

    /// Parse CSV with header `source,target,time[,color]`.
    pub fn parse_csv<R: Read>(reader: R, options: &ParseOptions) -> Result<(Self, ParseReport)> {
        let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);

        let headers = csv_reader
            .headers()
            .map_err(|e| Error::Record { line: 1, message: e.to_string() })?
            .clone();
        let position = |name: &str| headers.iter().position(|h| h.trim() == name);
        let (src_col, tgt_col, time_col) = match (position("source"), position("target"), position("time")) {
            (Some(s), Some(t), Some(m)) => (s, t, m),
            _ => {
                return Err(Error::Record {
                    line: 1,
                    message: format!("header must contain source,target,time (got {:?})", headers),
                })
            }
        };
        let color_col = position("color");

        let mut numbered = Vec::new();
        for row in csv_reader.into_records() {
            let row = row.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                Error::Record { line, message: e.to_string() }
            })?;
            let line = row.position().map(|p| p.line()).unwrap_or(0);
            let field = |col: usize| -> Result<&str> {
                row.get(col).ok_or_else(|| Error::Record {
                    line,
                    message: format!("missing column {}", col + 1),
                })
            };
            let time_raw = field(time_col)?.trim();
            let time: f64 = time_raw.parse().map_err(|_| Error::Record {
                line,
                message: format!("non-numeric time {:?}", time_raw),
            })?;
            let color = match color_col {
                Some(c) => row.get(c).map(|s| s.trim().to_string()).filter(|s| !s.is_empty()),
                None => None,
            };
            numbered.push((
                line,
                EventRecord {
                    source: field(src_col)?.trim().to_string(),
                    target: field(tgt_col)?.trim().to_string(),
                    time,
                    color,
                },
            ));
        }
        Self::from_numbered_records(numbered, options)
    }

    /// Parse JSONL: one object per line with keys `source`, `target`, `time`
    /// and optional `color`.
    pub fn parse_jsonl<R: BufRead>(reader: R, options: &ParseOptions) -> Result<(Self, ParseReport)> {
        #[derive(Deserialize)]
        struct JsonEvent {
            source: serde_json::Value,
            target: serde_json::Value,
            time: f64,
            #[serde(default)]
            color: Option<String>,
        }
        fn label(value: &serde_json::Value) -> String {
            match value {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            }
        }

        let mut numbered = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i as u64 + 1;
            let text = line?;
            if text.trim().is_empty() {
                continue;
            }
            let parsed: JsonEvent = serde_json::from_str(&text)
                .map_err(|e| Error::Record { line: line_no, message: e.to_string() })?;
            numbered.push((
                line_no,
                EventRecord {
                    source: label(&parsed.source),
                    target: label(&parsed.target),
                    time: parsed.time,
                    color: parsed.color,
                },
            ));
        }
        Self::from_numbered_records(numbered, options)
    }

    /// Serialize as CSV (`source,target,time,color`), one row per event in
    /// sorted order. Re-parsing the output reproduces this network exactly.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writeln!(writer, "source,target,time,color")?;
        for event in &self.events {
            writeln!(
                writer,
                "{},{},{},{}",
                self.nodes[event.source.index()],
                self.nodes[event.target.index()],
                event.time,
                self.colors[event.color.index()],
            )?;
        }
        Ok(())
    }

    /// Headline statistics: counts, color fractions, time span.
    pub fn summarize(&self) -> NetworkSummary {
        let n_events = self.events.len();
        let mut counts = vec![0usize; self.colors.len()];
        for event in &self.events {
            counts[event.color.index()] += 1;
        }
        let colors = self
            .colors
            .iter()
            .zip(&counts)
            .map(|(label, &count)| ColorCount {
                label: label.clone(),
                count,
                fraction: if n_events == 0 { 0.0 } else { count as f64 / n_events as f64 },
            })
            .collect();
        NetworkSummary {
            n_events,
            n_nodes: self.nodes.len(),
            colors,
            time_span: self.time_span().map(|(start, end)| TimeSpan {
                start,
                end,
                duration: end - start,
            }),
        }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn event(&self, id: EventId) -> &Event {
        &self.events[id.index()]
    }

    /// Node labels, indexed by [`NodeId`].
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    /// Color labels, indexed by [`ColorId`]; lexicographically sorted.
    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn n_events(&self) -> usize {
        self.events.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_colors(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// `(first, last)` event times, absent for an empty network.
    pub fn time_span(&self) -> Option<(f64, f64)> {
        match (self.events.first(), self.events.last()) {
            (Some(first), Some(last)) => Some((first.time, last.time)),
            _ => None,
        }
    }
}
