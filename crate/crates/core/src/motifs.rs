//! Two-event temporal motifs with event colors.
//!
//! Two consecutive events sharing a node form one of six base patterns,
//! determined only by the roles the shared node(s) play. With `c` event
//! colors each pattern splits into `c^2` colored variants, giving `6*c^2`
//! motifs. The canonical ordering (base pattern, then first color, then
//! second color) fixes the layout of the feature vectors downstream.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::event_graph::TemporalComponent;
use crate::events::{ColorId, Event, TemporalNetwork};

/// The six base patterns of an ordered adjacent event pair.
///
/// Letters name node roles: the first event is always A→B; the second event
/// reuses A/B for shared nodes and introduces C otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum MotifBase {
    /// Same ordered pair twice: A→B, A→B.
    Abab,
    /// Reply: A→B, B→A.
    Abba,
    /// Shared node is the source of both: A→B, A→C.
    Abac,
    /// Source of the first, target of the second: A→B, C→A.
    Abca,
    /// Target of the first, source of the second: A→B, B→C.
    Abbc,
    /// Shared node is the target of both: A→B, C→B.
    Abcb,
}

impl MotifBase {
    /// Canonical order used everywhere (feature layout, exports).
    pub const ALL: [MotifBase; 6] = [
        MotifBase::Abab,
        MotifBase::Abba,
        MotifBase::Abac,
        MotifBase::Abca,
        MotifBase::Abbc,
        MotifBase::Abcb,
    ];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            MotifBase::Abab => 0,
            MotifBase::Abba => 1,
            MotifBase::Abac => 2,
            MotifBase::Abca => 3,
            MotifBase::Abbc => 4,
            MotifBase::Abcb => 5,
        }
    }

    /// Role letters of the second event.
    pub fn second_letters(self) -> &'static str {
        match self {
            MotifBase::Abab => "AB",
            MotifBase::Abba => "BA",
            MotifBase::Abac => "AC",
            MotifBase::Abca => "CA",
            MotifBase::Abbc => "BC",
            MotifBase::Abcb => "CB",
        }
    }

    /// Classify an ordered adjacent pair by shared-node roles.
    ///
    /// Requires `(e1.time, e1.id) < (e2.time, e2.id)`, at least one shared
    /// node, and no self-loops. Both-nodes-shared pairs resolve to
    /// `Abab`/`Abba` before the single-shared-node cases.
    pub fn classify(e1: &Event, e2: &Event) -> Result<MotifBase> {
        if e1.is_self_loop() {
            return Err(Error::SelfLoop { event: e1.id.0 });
        }
        if e2.is_self_loop() {
            return Err(Error::SelfLoop { event: e2.id.0 });
        }
        if (e1.time, e1.id) >= (e2.time, e2.id) {
            return Err(Error::OrderViolation { first: e1.id.0, second: e2.id.0 });
        }
        let base = if e1.source == e2.source && e1.target == e2.target {
            MotifBase::Abab
        } else if e1.source == e2.target && e1.target == e2.source {
            MotifBase::Abba
        } else if e1.source == e2.source {
            MotifBase::Abac
        } else if e1.source == e2.target {
            MotifBase::Abca
        } else if e1.target == e2.source {
            MotifBase::Abbc
        } else if e1.target == e2.target {
            MotifBase::Abcb
        } else {
            return Err(Error::NotAdjacent { first: e1.id.0, second: e2.id.0 });
        };
        Ok(base)
    }
}

/// A colored motif: base pattern plus the colors of both events.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MotifLabel {
    pub base: MotifBase,
    /// Color of the earlier event.
    pub color1: ColorId,
    /// Color of the later event.
    pub color2: ColorId,
}

impl MotifLabel {
    /// Classify an adjacent ordered pair including colors.
    pub fn classify(e1: &Event, e2: &Event) -> Result<MotifLabel> {
        Ok(MotifLabel { base: MotifBase::classify(e1, e2)?, color1: e1.color, color2: e2.color })
    }

    /// Position in the canonical enumeration for `n_colors` colors.
    #[inline]
    pub fn index(self, n_colors: usize) -> usize {
        (self.base.index() * n_colors + self.color1.index()) * n_colors + self.color2.index()
    }

    /// Inverse of [`Self::index`].
    pub fn from_index(index: usize, n_colors: usize) -> MotifLabel {
        let color2 = index % n_colors;
        let rest = index / n_colors;
        let color1 = rest % n_colors;
        let base = MotifBase::ALL[rest / n_colors];
        MotifLabel { base, color1: ColorId(color1 as u16), color2: ColorId(color2 as u16) }
    }

    /// Canonical name: first-event letters, first color, second-event
    /// letters, second color (e.g. `ABmBAr`).
    pub fn name(self, colors: &[String]) -> String {
        format!(
            "AB{}{}{}",
            colors[self.color1.index()],
            self.base.second_letters(),
            colors[self.color2.index()],
        )
    }
}

/// All `6 * c^2` colored motifs in canonical order.
pub fn enumerate_motifs(n_colors: usize) -> Result<Vec<MotifLabel>> {
    if n_colors == 0 {
        return Err(Error::EmptyInput("color set"));
    }
    let mut labels = Vec::with_capacity(6 * n_colors * n_colors);
    for base in MotifBase::ALL {
        for color1 in 0..n_colors {
            for color2 in 0..n_colors {
                labels.push(MotifLabel {
                    base,
                    color1: ColorId(color1 as u16),
                    color2: ColorId(color2 as u16),
                });
            }
        }
    }
    Ok(labels)
}

/// Canonical column names for the motif block of the feature space.
pub fn motif_names(colors: &[String]) -> Vec<String> {
    enumerate_motifs(colors.len())
        .map(|labels| labels.into_iter().map(|l| l.name(colors)).collect())
        .unwrap_or_default()
}

/// Motif counts and prevalences over a component's event-graph edges.
#[derive(Clone, Debug, PartialEq)]
pub struct MotifDistribution {
    counts: Vec<u64>,
    total: u64,
    n_colors: usize,
}

impl MotifDistribution {
    /// Tally the classified edges of a component. Each edge is one motif
    /// instance; edges without a motif (self-loop events) are skipped.
    pub fn from_component(network: &TemporalNetwork, component: &TemporalComponent) -> Result<Self> {
        let n_colors = network.n_colors();
        let mut counts = vec![0u64; 6 * n_colors * n_colors];
        let mut total = 0u64;
        for edge in &component.edges {
            if let Some(label) = edge.motif {
                counts[label.index(n_colors)] += 1;
                total += 1;
            }
        }
        if total == 0 {
            return Err(Error::NoEdges);
        }
        Ok(Self { counts, total, n_colors })
    }

    /// Build directly from per-label counts in canonical order.
    pub fn from_counts(counts: Vec<u64>, n_colors: usize) -> Result<Self> {
        if counts.len() != 6 * n_colors * n_colors {
            return Err(Error::DimensionMismatch {
                expected: 6 * n_colors * n_colors,
                found: counts.len(),
            });
        }
        let total = counts.iter().sum();
        if total == 0 {
            return Err(Error::NoEdges);
        }
        Ok(Self { counts, total, n_colors })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn n_colors(&self) -> usize {
        self.n_colors
    }

    /// Fractions in canonical order; they sum to one.
    pub fn prevalences(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.total as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::{EventId, NodeId};
    use proptest::prelude::*;

    fn event(id: u32, source: u32, target: u32, time: f64, color: u16) -> Event {
        Event {
            id: EventId(id),
            source: NodeId(source),
            target: NodeId(target),
            time,
            color: ColorId(color),
        }
    }

    /// Independent role-letter oracle: assign A/B to the first event's
    /// endpoints and derive the second event's letters directly.
    fn letter_oracle(e1: &Event, e2: &Event) -> Option<&'static str> {
        let letter = |node: NodeId| -> char {
            if node == e1.source {
                'A'
            } else if node == e1.target {
                'B'
            } else {
                'C'
            }
        };
        let pattern = [letter(e2.source), letter(e2.target)];
        match pattern {
            ['A', 'B'] => Some("ABAB"),
            ['B', 'A'] => Some("ABBA"),
            ['A', 'C'] => Some("ABAC"),
            ['C', 'A'] => Some("ABCA"),
            ['B', 'C'] => Some("ABBC"),
            ['C', 'B'] => Some("ABCB"),
            ['C', 'C'] => None,
            other => panic!("unreachable pattern {other:?}"),
        }
    }

    fn base_name(base: MotifBase) -> String {
        format!("AB{}", base.second_letters())
    }

    #[test]
    fn classify_examples() {
        // (a,b,m) then (b,a,r) is a reply.
        let e1 = event(0, 0, 1, 1.0, 0);
        let e2 = event(1, 1, 0, 2.0, 1);
        let label = MotifLabel::classify(&e1, &e2).unwrap();
        assert_eq!(label.base, MotifBase::Abba);
        let colors = vec!["m".to_string(), "r".to_string()];
        assert_eq!(label.name(&colors), "ABmBAr");

        // Identical ordered pair.
        let e2 = event(1, 0, 1, 2.0, 0);
        let label = MotifLabel::classify(&e1, &e2).unwrap();
        assert_eq!(label.base, MotifBase::Abab);
        assert_eq!(label.name(&colors), "ABmABm");

        // Shared node is the target of both.
        let e1 = event(0, 0, 1, 1.0, 1);
        let e2 = event(1, 2, 1, 2.0, 0);
        let label = MotifLabel::classify(&e1, &e2).unwrap();
        assert_eq!(label.base, MotifBase::Abcb);
        assert_eq!(label.name(&colors), "ABrCBm");
    }

    #[test]
    fn classify_errors() {
        let e1 = event(0, 0, 1, 1.0, 0);
        let disjoint = event(1, 2, 3, 2.0, 0);
        assert!(matches!(
            MotifBase::classify(&e1, &disjoint),
            Err(Error::NotAdjacent { .. })
        ));
        let earlier = event(1, 1, 2, 0.5, 0);
        assert!(matches!(
            MotifBase::classify(&e1, &earlier),
            Err(Error::OrderViolation { .. })
        ));
        let self_loop = event(1, 1, 1, 2.0, 0);
        assert!(matches!(
            MotifBase::classify(&e1, &self_loop),
            Err(Error::SelfLoop { .. })
        ));
    }

    #[test]
    fn equal_times_ordered_by_id() {
        let e1 = event(0, 0, 1, 1.0, 0);
        let e2 = event(1, 0, 1, 1.0, 0);
        assert_eq!(MotifBase::classify(&e1, &e2).unwrap(), MotifBase::Abab);
        assert!(MotifBase::classify(&e2, &e1).is_err());
    }

    #[test]
    fn distribution_over_component_edges() {
        use crate::event_graph::{build_event_graph, components};
        use crate::events::{EventRecord, ParseOptions};

        let records = [("a", "b", 1.0), ("b", "c", 3.0), ("a", "b", 5.0)]
            .iter()
            .map(|(s, t, time)| EventRecord {
                source: s.to_string(),
                target: t.to_string(),
                time: *time,
                color: None,
            })
            .collect::<Vec<_>>();
        let (net, _) = crate::events::TemporalNetwork::from_records(records, &ParseOptions::default()).unwrap();
        let graph = build_event_graph(&net);
        let set = components(&graph, 3.0, 1).unwrap();
        let dist = MotifDistribution::from_component(&net, &set.components[0]).unwrap();
        let prevalences = dist.prevalences();
        // the two kept edges are ABBC and ABCA, half each (single color)
        assert_eq!(prevalences[MotifBase::Abbc.index()], 0.5);
        assert_eq!(prevalences[MotifBase::Abca.index()], 0.5);
        assert_eq!(prevalences.iter().sum::<f64>(), 1.0);

        // a uniform fixture across all 24 colored labels
        let uniform = MotifDistribution::from_counts(vec![2; 24], 2).unwrap();
        assert!(uniform.prevalences().iter().all(|&p| p == 1.0 / 24.0));

        // singleton components have no edges to tally
        let singles = components(&graph, 0.5, 1).unwrap();
        assert!(matches!(
            MotifDistribution::from_component(&net, &singles.components[0]),
            Err(Error::NoEdges)
        ));
    }

    #[test]
    fn enumeration_sizes_and_order() {
        assert_eq!(enumerate_motifs(1).unwrap().len(), 6);
        assert_eq!(enumerate_motifs(2).unwrap().len(), 24);
        assert_eq!(enumerate_motifs(3).unwrap().len(), 54);
        assert!(enumerate_motifs(0).is_err());

        let colors = vec!["m".to_string(), "r".to_string()];
        let names = motif_names(&colors);
        assert_eq!(names[0], "ABmABm");
        assert_eq!(names[1], "ABmABr");
        assert_eq!(names[2], "ABrABm");
        assert_eq!(names[3], "ABrABr");
        assert_eq!(names[4], "ABmBAm");
        assert_eq!(names[23], "ABrCBr");

        // Index round-trips through the canonical order.
        for (i, label) in enumerate_motifs(3).unwrap().into_iter().enumerate() {
            assert_eq!(label.index(3), i);
            assert_eq!(MotifLabel::from_index(i, 3), label);
        }
    }

    proptest! {
        /// classify agrees with the role-letter oracle on random adjacent
        /// pairs, and exactly one base pattern ever matches.
        #[test]
        fn classify_matches_letter_oracle(
            s1 in 0u32..5, t1 in 0u32..5, s2 in 0u32..5, t2 in 0u32..5,
        ) {
            prop_assume!(s1 != t1 && s2 != t2);
            let e1 = event(0, s1, t1, 1.0, 0);
            let e2 = event(1, s2, t2, 2.0, 0);
            match letter_oracle(&e1, &e2) {
                Some(expected) => {
                    let base = MotifBase::classify(&e1, &e2).unwrap();
                    prop_assert_eq!(base_name(base), expected.to_string());
                }
                None => prop_assert!(MotifBase::classify(&e1, &e2).is_err()),
            }
        }

        /// Motifs depend only on node roles, not identities.
        #[test]
        fn classify_invariant_under_relabeling(
            s1 in 0u32..4, t1 in 0u32..4, s2 in 0u32..4, t2 in 0u32..4,
            perm_seed in 0usize..24,
        ) {
            prop_assume!(s1 != t1 && s2 != t2);
            prop_assume!([s2, t2].iter().any(|n| *n == s1 || *n == t1));
            // Apply one of the 4! permutations of node ids 0..4.
            let mut perm = [0u32, 1, 2, 3];
            let mut seed = perm_seed;
            for i in (1..4).rev() {
                perm.swap(i, seed % (i + 1));
                seed /= i + 1;
            }
            let e1 = event(0, s1, t1, 1.0, 0);
            let e2 = event(1, s2, t2, 2.0, 0);
            let p1 = event(0, perm[s1 as usize], perm[t1 as usize], 1.0, 0);
            let p2 = event(1, perm[s2 as usize], perm[t2 as usize], 2.0, 0);
            prop_assert_eq!(
                MotifBase::classify(&e1, &e2).unwrap(),
                MotifBase::classify(&p1, &p2).unwrap()
            );
        }
    }
}
