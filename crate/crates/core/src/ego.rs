//! Egocentric conformance: for each user, the first-digit distribution of
//! their friends' own friend counts, scored against Benford and binned.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::digits::FsdHistogram;
use crate::error::{ConfigError, LookupError};
use crate::ingest::{DegreeKind, DegreeTable, Graph};
use crate::stats::{conformance_with, ConformanceReport, DEFAULT_CHI_WARN};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationThresholds {
    /// r at or above this is conformant.
    pub conformant_min: f64,
    /// r strictly below this is suspicious.
    pub suspicious_max: f64,
    /// Smallest ego that gets a report.
    pub min_degree: u64,
}

impl Default for ClassificationThresholds {
    fn default() -> Self {
        Self {
            conformant_min: 0.9,
            suspicious_max: 0.5,
            min_degree: 100,
        }
    }
}

impl ClassificationThresholds {
    pub fn new(conformant_min: f64, suspicious_max: f64, min_degree: u64) -> Result<Self, ConfigError> {
        let t = Self {
            conformant_min,
            suspicious_max,
            min_degree,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.suspicious_max.partial_cmp(&self.conformant_min) != Some(Ordering::Less) {
            return Err(ConfigError::new(format!(
                "suspicious threshold {} must be below conformant threshold {}",
                self.suspicious_max, self.conformant_min
            )));
        }
        if self.min_degree < 1 {
            return Err(ConfigError::new("min_degree must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bin {
    Suspicious,
    Intermediate,
    Conformant,
    Undefined,
}

/// Bins a correlation. Lower bound of the conformant bin is closed, upper
/// bound of the suspicious bin is open.
pub fn classify(r: Option<f64>, thresholds: &ClassificationThresholds) -> Bin {
    match r {
        None => Bin::Undefined,
        Some(r) if r >= thresholds.conformant_min => Bin::Conformant,
        Some(r) if r < thresholds.suspicious_max => Bin::Suspicious,
        Some(_) => Bin::Intermediate,
    }
}

/// Where friends' counts come from.
pub trait FriendDegrees {
    /// The friend's count, or `None` if the source has no record of it.
    fn friend_degree(&self, node: u64) -> Option<u64>;
}

/// Counts taken from the graph's own degree table.
#[derive(Debug, Clone, Copy)]
pub struct GraphDegrees<'a> {
    pub table: &'a DegreeTable,
    pub kind: DegreeKind,
}

impl FriendDegrees for GraphDegrees<'_> {
    fn friend_degree(&self, node: u64) -> Option<u64> {
        self.table
            .contains(node)
            .then(|| self.table.degree(node, self.kind))
    }
}

/// Counts from an external table, e.g. crawled following counts.
impl FriendDegrees for HashMap<u64, u64> {
    fn friend_degree(&self, node: u64) -> Option<u64> {
        self.get(&node).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EgoHistogram {
    pub hist: FsdHistogram,
    /// Friends with a degree record.
    pub ego_size: u64,
    /// Friends without one.
    pub missing: u64,
}

pub fn ego_histogram(
    graph: &Graph,
    degrees: &impl FriendDegrees,
    user: u64,
) -> Result<EgoHistogram, LookupError> {
    if !graph.contains(user) {
        return Err(LookupError::UnknownUser(user));
    }
    let mut out = EgoHistogram {
        hist: FsdHistogram::new(),
        ego_size: 0,
        missing: 0,
    };
    for &f in graph.friends(user) {
        match degrees.friend_degree(f) {
            Some(d) => {
                out.ego_size += 1;
                out.hist.accumulate(d);
            }
            None => out.missing += 1,
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgoReport {
    pub user: u64,
    pub ego_size: u64,
    pub missing: u64,
    pub hist: FsdHistogram,
    /// `None` when every friend had a zero count.
    pub report: Option<ConformanceReport>,
    pub bin: Bin,
}

impl EgoReport {
    pub fn pearson_r(&self) -> Option<f64> {
        self.report.as_ref().and_then(|r| r.pearson_r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgoOptions {
    pub thresholds: ClassificationThresholds,
    pub chi_warn: u64,
    /// Worker threads for the scan; results do not depend on it.
    pub threads: usize,
}

impl Default for EgoOptions {
    fn default() -> Self {
        Self {
            thresholds: ClassificationThresholds::default(),
            chi_warn: DEFAULT_CHI_WARN,
            threads: 1,
        }
    }
}

pub fn ego_report(
    graph: &Graph,
    degrees: &impl FriendDegrees,
    user: u64,
    opts: &EgoOptions,
) -> Result<EgoReport, LookupError> {
    let eh = ego_histogram(graph, degrees, user)?;
    let report = conformance_with(&eh.hist, opts.chi_warn).ok();
    let bin = classify(report.as_ref().and_then(|r| r.pearson_r), &opts.thresholds);
    Ok(EgoReport {
        user,
        ego_size: eh.ego_size,
        missing: eh.missing,
        hist: eh.hist,
        report,
        bin,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EgoSummary {
    /// Users considered (every node in the graph).
    pub users: u64,
    pub reported: u64,
    /// Users below `min_degree`.
    pub skipped: u64,
    pub conformant: u64,
    pub intermediate: u64,
    pub suspicious: u64,
    pub undefined: u64,
    /// Reported egos with a defined r; the denominator of both fractions.
    pub scored: u64,
    /// Share of scored egos with r >= conformant_min.
    pub fraction_conformant: f64,
    /// Share of scored egos with r < suspicious_max.
    pub fraction_suspicious: f64,
}

/// Ascending r, undefined last, ties by user id.
pub fn report_order(a: &EgoReport, b: &EgoReport) -> Ordering {
    match (a.pearson_r(), b.pearson_r()) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
    .then(a.user.cmp(&b.user))
}

/// Reports every user whose ego reaches `min_degree`, sorted by
/// [`report_order`], with per-bin totals.
pub fn scan_egos(
    graph: &Graph,
    degrees: &(impl FriendDegrees + Sync),
    opts: &EgoOptions,
) -> (Vec<EgoReport>, EgoSummary) {
    let users = graph.degrees().nodes();
    let threads = opts.threads.max(1).min(users.len().max(1));
    let chunk = users.len().div_ceil(threads).max(1);

    let scan = |ids: &[u64]| -> Vec<EgoReport> {
        ids.iter()
            .filter_map(|&u| {
                // Every id came from the graph's own node list.
                let r = ego_report(graph, degrees, u, opts).expect("known user");
                (r.ego_size >= opts.thresholds.min_degree).then_some(r)
            })
            .collect()
    };

    let mut reports: Vec<EgoReport> = if threads == 1 {
        scan(&users)
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = users.chunks(chunk).map(|c| s.spawn(move || scan(c))).collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("ego worker panicked"))
                .collect()
        })
    };
    reports.sort_by(report_order);

    let mut summary = EgoSummary {
        users: users.len() as u64,
        reported: reports.len() as u64,
        skipped: (users.len() - reports.len()) as u64,
        ..EgoSummary::default()
    };
    for r in &reports {
        match r.bin {
            Bin::Conformant => summary.conformant += 1,
            Bin::Intermediate => summary.intermediate += 1,
            Bin::Suspicious => summary.suspicious += 1,
            Bin::Undefined => summary.undefined += 1,
        }
    }
    summary.scored = summary.reported - summary.undefined;
    if summary.scored > 0 {
        let n = summary.scored as f64;
        summary.fraction_conformant = summary.conformant as f64 / n;
        summary.fraction_suspicious = summary.suspicious as f64 / n;
    }
    (reports, summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{build_synthetic_graph, EgoPlan, GraphPlan, Model};
    use proptest::prelude::*;

    fn graph_degrees(g: &Graph) -> GraphDegrees<'_> {
        GraphDegrees {
            table: g.degrees(),
            kind: DegreeKind::Out,
        }
    }

    #[test]
    fn friends_degrees_histogram() {
        let plan = GraphPlan {
            egos: vec![EgoPlan::explicit(vec![150, 23, 9, 1024])],
            seed: 0,
        };
        let g = build_synthetic_graph(&plan).unwrap().to_graph();
        let eh = ego_histogram(&g, &graph_degrees(&g), 0).unwrap();
        assert_eq!(eh.hist.counts(), &[2, 1, 0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(eh.ego_size, 4);
    }

    #[test]
    fn sink_user_and_unknown_user() {
        let g: Graph = [(1, 2)].into_iter().collect();
        let eh = ego_histogram(&g, &graph_degrees(&g), 2).unwrap();
        assert!(eh.hist.is_empty());
        assert_eq!(eh.ego_size, 0);
        assert_eq!(
            ego_histogram(&g, &graph_degrees(&g), 9),
            Err(LookupError::UnknownUser(9))
        );
    }

    #[test]
    fn zero_degree_friends_are_excluded_not_missing() {
        let g: Graph = [(1, 2), (1, 3), (3, 4)].into_iter().collect();
        let eh = ego_histogram(&g, &graph_degrees(&g), 1).unwrap();
        assert_eq!(eh.ego_size, 2);
        assert_eq!(eh.hist.excluded_zero(), 1);
        assert_eq!(eh.hist.count(1), 1);
    }

    #[test]
    fn external_degrees_track_missing() {
        let g: Graph = [(1, 2), (1, 3), (1, 4)].into_iter().collect();
        let ext = HashMap::from([(2, 40), (3, 0)]);
        let eh = ego_histogram(&g, &ext, 1).unwrap();
        assert_eq!(eh.ego_size, 2);
        assert_eq!(eh.missing, 1);
        assert_eq!(eh.hist.count(4), 1);
        assert_eq!(eh.hist.excluded_zero(), 1);
    }

    #[test]
    fn in_degree_mode() {
        let g: Graph = [(1, 2), (3, 2), (4, 2), (1, 3)].into_iter().collect();
        let d = GraphDegrees {
            table: g.degrees(),
            kind: DegreeKind::In,
        };
        let eh = ego_histogram(&g, &d, 1).unwrap();
        assert_eq!(eh.hist.count(3), 1);
        assert_eq!(eh.hist.count(1), 1);
    }

    #[test]
    fn classify_examples() {
        let t = ClassificationThresholds::default();
        assert_eq!(classify(Some(0.95), &t), Bin::Conformant);
        assert_eq!(classify(Some(0.9), &t), Bin::Conformant);
        assert_eq!(classify(Some(0.3), &t), Bin::Suspicious);
        assert_eq!(classify(Some(0.5), &t), Bin::Intermediate);
        assert_eq!(classify(Some(0.7), &t), Bin::Intermediate);
        assert_eq!(classify(None, &t), Bin::Undefined);
    }

    #[test]
    fn threshold_validation() {
        assert!(ClassificationThresholds::new(0.5, 0.5, 100).is_err());
        assert!(ClassificationThresholds::new(0.9, 0.5, 0).is_err());
        assert!(ClassificationThresholds::new(0.9, 0.5, 1).is_ok());
    }

    #[test]
    fn empty_graph_scan() {
        let g = Graph::new();
        let (reports, summary) = scan_egos(&g, &graph_degrees(&g), &EgoOptions::default());
        assert!(reports.is_empty());
        assert_eq!(summary, EgoSummary::default());
    }

    #[test]
    fn nobody_qualifies() {
        let g: Graph = [(1, 2), (1, 3), (2, 3)].into_iter().collect();
        let (reports, summary) = scan_egos(&g, &graph_degrees(&g), &EgoOptions::default());
        assert!(reports.is_empty());
        assert_eq!(summary.skipped, 3);
        assert_eq!(summary.users, 3);
    }

    #[test]
    fn fractions_count_only_scored_egos() {
        // User 0's single friend has degree 10 (r = 0.864, intermediate).
        // Users 1 and 2 only have friends of degree 0 and come out undefined.
        let g: Graph = [(0, 1), (1, 3), (2, 3), (1, 2)].into_iter().collect();
        let ext = HashMap::from([(1, 10), (2, 0), (3, 0)]);
        let opts = EgoOptions {
            thresholds: ClassificationThresholds::new(0.9, 0.5, 1).unwrap(),
            ..EgoOptions::default()
        };
        let (reports, s) = scan_egos(&g, &ext, &opts);
        assert_eq!(reports.len(), 3);
        assert_eq!((s.reported, s.undefined, s.scored), (3, 2, 1));
        assert_eq!((s.intermediate, s.fraction_conformant, s.fraction_suspicious), (1, 0.0, 0.0));
        assert_eq!(reports[2].bin, Bin::Undefined);

        let (_, s) = scan_egos(&g, &HashMap::from([(1, 10), (2, 0), (3, 5)]), &opts);
        // Users 1 and 2 now see digit 5 alone: r = -0.13, suspicious.
        assert_eq!((s.scored, s.suspicious), (3, 2));
        assert!((s.fraction_suspicious - 2.0 / 3.0).abs() < 1e-15);
    }

    // 301:176:125:97:79:67:58:51:46 is log10(1 + 1/d) to three places, so an
    // ego whose friends' degrees have exactly those first digits correlates
    // with r just short of 1.
    fn benford_multiset() -> Vec<u64> {
        let counts = [301u64, 176, 125, 97, 79, 67, 58, 51, 46];
        let mut v = Vec::new();
        for (i, &c) in counts.iter().enumerate() {
            v.extend(std::iter::repeat(i as u64 + 1).take(c as usize));
        }
        v
    }

    #[test]
    fn benford_proportional_ego_is_conformant() {
        let plan = GraphPlan {
            egos: vec![EgoPlan::explicit(benford_multiset())],
            seed: 0,
        };
        let g = build_synthetic_graph(&plan).unwrap().to_graph();
        let r = ego_report(&g, &graph_degrees(&g), 0, &EgoOptions::default()).unwrap();
        assert_eq!(r.bin, Bin::Conformant);
        assert!(r.pearson_r().unwrap() > 0.99999);
    }

    #[test]
    fn bot_egos_sort_first_and_threads_agree() {
        let mut egos = vec![EgoPlan::generated(100, Model::log_uniform(1, 1000)); 20];
        egos.extend(vec![EgoPlan::generated(100, Model::botnet_band(400, 600)); 3]);
        let g = build_synthetic_graph(&GraphPlan { egos, seed: 42 }).unwrap().to_graph();
        let d = graph_degrees(&g);
        let (seq, s1) = scan_egos(&g, &d, &EgoOptions::default());
        let (par, s2) = scan_egos(&g, &d, &EgoOptions { threads: 4, ..EgoOptions::default() });
        assert_eq!(seq, par);
        assert_eq!(s1, s2);
        let mut head: Vec<u64> = seq.iter().take(3).map(|r| r.user).collect();
        head.sort_unstable();
        assert_eq!(head, vec![20, 21, 22]);
        assert!(seq.iter().take(3).all(|r| r.bin == Bin::Suspicious));
        assert!(seq.iter().all(|r| r.ego_size >= 100));
    }

    #[test]
    fn scan_is_independent_of_edge_order() {
        let plan = GraphPlan {
            egos: vec![
                EgoPlan::generated(120, Model::log_uniform(1, 1000)),
                EgoPlan::generated(110, Model::botnet_band(400, 600)),
            ],
            seed: 3,
        };
        let sg = build_synthetic_graph(&plan).unwrap();
        let fwd = sg.to_graph();
        let mut edges: Vec<_> = sg.edges().collect();
        edges.reverse();
        let rev: Graph = edges.into_iter().collect();
        let opts = EgoOptions {
            thresholds: ClassificationThresholds::new(0.9, 0.5, 100).unwrap(),
            ..EgoOptions::default()
        };
        assert_eq!(
            scan_egos(&fwd, &graph_degrees(&fwd), &opts),
            scan_egos(&rev, &graph_degrees(&rev), &opts)
        );
    }

    proptest! {
        #[test]
        fn classify_monotone(r1 in -1.0f64..1.0, r2 in -1.0f64..1.0, c in 0.5f64..1.0, s in -1.0f64..0.5) {
            prop_assume!(s < c);
            let t = ClassificationThresholds { conformant_min: c, suspicious_max: s, min_degree: 1 };
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            prop_assert!(classify(Some(lo), &t) <= classify(Some(hi), &t));
        }
    }
}
