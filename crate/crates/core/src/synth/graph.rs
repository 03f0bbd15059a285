use std::collections::HashMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::{Model, ValueStream};
use crate::error::ConfigError;
use crate::ingest::Graph;
use crate::rng;

/// How one focal user's friends get their out-degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EgoPlan {
    /// `friends` friends whose degrees are drawn from `model`.
    Generated { friends: u64, model: Model },
    /// Friends with exactly these degrees.
    Explicit { degrees: Vec<u64> },
}

impl EgoPlan {
    pub fn generated(friends: u64, model: Model) -> Self {
        EgoPlan::Generated { friends, model }
    }

    pub fn explicit(degrees: Vec<u64>) -> Self {
        EgoPlan::Explicit { degrees }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphPlan {
    pub egos: Vec<EgoPlan>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
struct EgoLayout {
    user: u64,
    first_friend: u64,
    degrees: Vec<u64>,
}

/// A realized synthetic graph.
///
/// Node ids: focal users are `0..egos`, then every friend gets a fresh id,
/// then a shared pool of filler nodes. Friend `f` with degree `d` points at
/// the first `d` fillers, so fillers are sinks and friends' out-degrees are
/// exactly as planned.
#[derive(Debug, Clone)]
pub struct SyntheticGraph {
    egos: Vec<EgoLayout>,
    filler_base: u64,
    fillers: u64,
}

/// Realizes every ego's friend degrees. Per-ego draws use their own RNG
/// stream, so adding egos never changes the earlier ones.
pub fn build_synthetic_graph(plan: &GraphPlan) -> Result<SyntheticGraph, ConfigError> {
    let mut egos = Vec::with_capacity(plan.egos.len());
    let mut next_id = plan.egos.len() as u64;
    let mut fillers = 0u64;
    for (i, ego) in plan.egos.iter().enumerate() {
        let degrees: Vec<u64> = match ego {
            EgoPlan::Generated { friends, model } => {
                if *friends < 1 {
                    return Err(ConfigError::new(format!("ego {i}: friend count must be at least 1")));
                }
                model.validate()?;
                let stream = rng::STREAM_EGO_BASE + 2 * i as u64;
                ValueStream::new(model, *friends, plan.seed, stream).collect()
            }
            EgoPlan::Explicit { degrees } => {
                if degrees.is_empty() {
                    return Err(ConfigError::new(format!("ego {i}: friend count must be at least 1")));
                }
                degrees.clone()
            }
        };
        if let Some(pos) = degrees.iter().position(|&d| d == 0) {
            return Err(ConfigError::new(format!(
                "ego {i}: friend {pos} requested with degree 0"
            )));
        }
        fillers = fillers.max(degrees.iter().copied().max().unwrap_or(0));
        egos.push(EgoLayout {
            user: i as u64,
            first_friend: next_id,
            degrees,
        });
        next_id += egos.last().map_or(0, |e| e.degrees.len() as u64);
    }
    Ok(SyntheticGraph {
        egos,
        filler_base: next_id,
        fillers,
    })
}

impl SyntheticGraph {
    /// Focal user ids, in plan order.
    pub fn egos(&self) -> impl Iterator<Item = u64> + '_ {
        self.egos.iter().map(|e| e.user)
    }

    /// Realized friend degrees of the `i`-th ego.
    pub fn friend_degrees(&self, i: usize) -> &[u64] {
        &self.egos[i].degrees
    }

    pub fn edge_count(&self) -> u64 {
        self.egos
            .iter()
            .map(|e| e.degrees.len() as u64 + e.degrees.iter().sum::<u64>())
            .sum()
    }

    /// Every planned nonzero out-degree, keyed by node id.
    pub fn planned_out_degrees(&self) -> HashMap<u64, u64> {
        let mut m = HashMap::new();
        for e in &self.egos {
            m.insert(e.user, e.degrees.len() as u64);
            for (k, &d) in e.degrees.iter().enumerate() {
                m.insert(e.first_friend + k as u64, d);
            }
        }
        m
    }

    /// Ego-to-friend edges only.
    pub fn ego_edges(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.egos.iter().flat_map(|e| {
            (0..e.degrees.len() as u64).map(move |k| (e.user, e.first_friend + k))
        })
    }

    /// All edges: ego-to-friend edges first, then friend-to-filler edges.
    pub fn edges(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        let ego_edges = self.ego_edges();
        let base = self.filler_base;
        let friend_edges = self.egos.iter().flat_map(move |e| {
            e.degrees.iter().enumerate().flat_map(move |(k, &d)| {
                let f = e.first_friend + k as u64;
                (0..d).map(move |j| (f, base + j))
            })
        });
        ego_edges.chain(friend_edges)
    }

    /// Writes the edge list in the ingest format.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "# synthetic graph: {} egos, {} edges, fillers from {}",
            self.egos.len(),
            self.edge_count(),
            self.filler_base
        )?;
        for (s, d) in self.edges() {
            writeln!(out, "{s} {d}")?;
        }
        Ok(())
    }

    pub fn to_graph(&self) -> Graph {
        self.edges().collect()
    }

    /// Number of filler sink nodes.
    pub fn filler_count(&self) -> u64 {
        self.fillers
    }
}
