//! Reversible graph reductions and the preprocessing pipeline.

mod exclusion;
mod inclusion;
mod simple;
mod work;

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{prune_to_steiner_tree, Cost, EdgeId, Instance, SteinerTree, VertexId};

use work::WorkGraph;

/// Edge id inside the working copy. Ids below the original edge count are
/// the original edges.
pub type WorkEdgeId = usize;

/// One structural change, in the order it happened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduction {
    /// `edge` stands for the `replaces` edges together.
    EdgeIntroduced { edge: WorkEdgeId, replaces: Vec<WorkEdgeId> },
    /// `edge` is forced into the solution; `absorbed` merged into `into`.
    EdgeContracted {
        edge: WorkEdgeId,
        absorbed: VertexId,
        into: VertexId,
        cost: Cost,
    },
    VertexRemoved { vertex: VertexId, edges: Vec<WorkEdgeId> },
    EdgeRemoved { edge: WorkEdgeId },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("edge {0} does not exist in the reduced instance")]
    UnknownEdge(EdgeId),
    #[error("edge {0} has no provenance record")]
    NoProvenance(WorkEdgeId),
    #[error("expanded solution does not connect the terminals")]
    Disconnected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionLog {
    pub records: Vec<Reduction>,
    original_edges: usize,
    /// reduced edge id -> working edge id
    edge_map: Vec<WorkEdgeId>,
    /// reduced vertex id -> original vertex id
    vertex_map: Vec<VertexId>,
}

impl ReductionLog {
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    /// Original vertex behind a reduced vertex.
    pub fn original_vertex(&self, v: VertexId) -> VertexId {
        self.vertex_map[v]
    }

    /// Counts of each record kind: introduced, contracted, vertices removed, edges removed.
    pub fn summary(&self) -> [usize; 4] {
        let mut out = [0; 4];
        for r in &self.records {
            let i = match r {
                Reduction::EdgeIntroduced { .. } => 0,
                Reduction::EdgeContracted { .. } => 1,
                Reduction::VertexRemoved { .. } => 2,
                Reduction::EdgeRemoved { .. } => 3,
            };
            out[i] += 1;
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct OpStats {
    pub name: &'static str,
    pub runs: usize,
    pub changes: usize,
    pub vertices_removed: usize,
    pub edges_removed: usize,
}

#[derive(Debug, Clone)]
pub struct PreprocessResult {
    pub reduced: Instance,
    pub log: ReductionLog,
    /// Cost of all contracted edges.
    pub offset: Cost,
    pub stats: Vec<OpStats>,
}

#[derive(Debug, Clone)]
pub struct ReductionConfig {
    /// An operation stays active while each run changes at least this
    /// fraction of the current vertices or edges.
    pub threshold: f64,
    pub ntdk_max_degree: usize,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        ReductionConfig {
            threshold: 0.01,
            ntdk_max_degree: 4,
        }
    }
}

/// A working copy of an instance that individual reductions mutate.
#[derive(Debug, Clone)]
pub struct Reducer {
    work: WorkGraph,
    original_edges: usize,
}

impl Reducer {
    pub fn new(instance: &Instance) -> Self {
        Reducer {
            work: WorkGraph::new(instance),
            original_edges: instance.network().edge_count(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.work.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.work.edge_count()
    }

    pub fn terminal_count(&self) -> usize {
        self.work.terminal_count()
    }

    pub fn offset(&self) -> Cost {
        self.work.offset
    }

    /// The current instance; vertex and edge ids are compacted.
    pub fn current(&mut self) -> Instance {
        self.work.drop_stray_components();
        self.work.snapshot().instance
    }

    /// Contracts the edge `{u, v}` of the current working graph (original
    /// vertex ids), merging the endpoint of smaller degree into the other.
    /// Returns false when there is no such edge.
    pub fn contract_edge(&mut self, u: VertexId, v: VertexId) -> bool {
        if u >= self.work.alive.len() || v >= self.work.alive.len() {
            return false;
        }
        let Some(&e) = self.work.adj[u].get(&v) else {
            return false;
        };
        let absorbed = absorb_choice(&self.work, u, v);
        self.work.contract(e, absorbed);
        true
    }

    /// Degree tests and forced terminal edges, to a fixpoint.
    pub fn simple_reductions(&mut self) -> usize {
        simple::run(&mut self.work)
    }

    pub fn long_edge_test(&mut self) -> usize {
        self.finish_op(exclusion::long_edges)
    }

    pub fn steiner_distance_test(&mut self) -> usize {
        self.finish_op(exclusion::steiner_distance)
    }

    pub fn ntdk_test(&mut self, max_degree: usize) -> usize {
        self.finish_op(|w| exclusion::ntdk(w, max_degree))
    }

    /// Removes what dual-ascent bounds price above `upper_bound`, which must
    /// be the cost of a feasible tree of the current instance.
    pub fn dual_ascent_elimination(&mut self, upper_bound: Cost) -> usize {
        self.finish_op(|w| exclusion::dual_ascent_bounds(w, upper_bound))
    }

    /// Like [`Reducer::dual_ascent_elimination`] with the bound taken from the
    /// upper-bound heuristics.
    pub fn dual_ascent_elimination_auto(&mut self) -> usize {
        self.finish_op(|w| {
            let snap = w.snapshot();
            let root = crate::bounds::select_root(&snap.instance);
            let ub = crate::bounds::upper_bound_pipeline(&snap.instance, root).map(|t| t.cost());
            match ub {
                Ok(ub) => exclusion::dual_ascent_bounds(w, ub),
                Err(_) => 0,
            }
        })
    }

    pub fn short_links_test(&mut self) -> usize {
        self.finish_op(inclusion::short_links)
    }

    pub fn nearest_vertex_test(&mut self) -> usize {
        self.finish_op(inclusion::nearest_vertex)
    }

    fn finish_op(&mut self, op: impl FnOnce(&mut WorkGraph) -> usize) -> usize {
        if self.work.terminal_count() <= 1 {
            return 0;
        }
        let changes = op(&mut self.work);
        self.work.drop_stray_components();
        changes
    }

    pub fn finish(mut self) -> PreprocessResult {
        self.work.drop_stray_components();
        let snap = self.work.snapshot();
        PreprocessResult {
            reduced: snap.instance,
            offset: self.work.offset,
            log: ReductionLog {
                records: self.work.log,
                original_edges: self.original_edges,
                edge_map: snap.edges,
                vertex_map: snap.vertices,
            },
            stats: Vec::new(),
        }
    }
}

/// The endpoint to merge away: the one with fewer edges, on ties the larger id.
pub(crate) fn absorb_choice(w: &WorkGraph, u: VertexId, v: VertexId) -> VertexId {
    if (w.degree(u), v) < (w.degree(v), u) {
        u
    } else {
        v
    }
}

type Op = fn(&mut Reducer, &ReductionConfig) -> usize;

/// Runs the reductions until nothing useful is left to do.
pub fn run_pipeline(instance: &Instance, config: &ReductionConfig) -> PreprocessResult {
    let mut r = Reducer::new(instance);
    let ops: [(&'static str, Op); 6] = [
        ("long_edges", |r, _| r.long_edge_test()),
        ("steiner_distance", |r, _| r.steiner_distance_test()),
        ("ntdk", |r, c| r.ntdk_test(c.ntdk_max_degree)),
        ("dual_ascent", |r, _| r.dual_ascent_elimination_auto()),
        ("short_links", |r, _| r.short_links_test()),
        ("nearest_vertex", |r, _| r.nearest_vertex_test()),
    ];
    let mut stats: Vec<OpStats> = std::iter::once("simple")
        .chain(ops.iter().map(|o| o.0))
        .map(|name| OpStats {
            name,
            ..Default::default()
        })
        .collect();
    let mut active = [true; 6];

    let simple = |r: &mut Reducer, s: &mut OpStats| {
        let (v, e) = (r.vertex_count(), r.edge_count());
        let c = r.simple_reductions();
        s.runs += 1;
        s.changes += c;
        s.vertices_removed += v - r.vertex_count();
        s.edges_removed += e.saturating_sub(r.edge_count());
    };
    simple(&mut r, &mut stats[0]);

    while r.terminal_count() > 1 && active.iter().any(|&a| a) {
        let mut changed = false;
        for (i, (_, op)) in ops.iter().enumerate() {
            if !active[i] || r.terminal_count() <= 1 {
                continue;
            }
            let (v, e) = (r.vertex_count(), r.edge_count());
            let c = op(&mut r, config);
            let s = &mut stats[i + 1];
            s.runs += 1;
            s.changes += c;
            s.vertices_removed += v - r.vertex_count();
            s.edges_removed += e.saturating_sub(r.edge_count());
            let needed = ((v.min(e) as f64) * config.threshold).ceil().max(1.0) as usize;
            if c < needed {
                active[i] = false;
            }
            if c > 0 {
                changed = true;
                simple(&mut r, &mut stats[0]);
            }
        }
        if !changed {
            break;
        }
    }
    let mut out = r.finish();
    out.stats = stats;
    out
}

/// Maps a tree of the reduced instance back to the original instance by
/// replaying the log backwards.
pub fn unreduce(original: &Instance, result: &PreprocessResult, tree: &SteinerTree) -> Result<SteinerTree, ReduceError> {
    let log = &result.log;
    let mut edges: BTreeSet<WorkEdgeId> = BTreeSet::new();
    for &e in tree.edges() {
        edges.insert(*log.edge_map.get(e).ok_or(ReduceError::UnknownEdge(e))?);
    }
    for record in log.records.iter().rev() {
        match record {
            Reduction::EdgeIntroduced { edge, replaces } => {
                if edges.remove(edge) {
                    edges.extend(replaces.iter().copied());
                }
            }
            Reduction::EdgeContracted { edge, .. } => {
                edges.insert(*edge);
            }
            Reduction::VertexRemoved { .. } | Reduction::EdgeRemoved { .. } => {}
        }
    }
    if let Some(&e) = edges.iter().find(|&&e| e >= log.original_edges) {
        return Err(ReduceError::NoProvenance(e));
    }
    let network = original.network();
    let kept = prune_to_steiner_tree(network, edges, original.terminals()).ok_or(ReduceError::Disconnected)?;
    Ok(SteinerTree::new(network, kept, original.root_or_default()))
}
