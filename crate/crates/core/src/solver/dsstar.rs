use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::bounds::SteinerHeuristic;
use crate::graph::{prune_to_steiner_tree, Cost, EdgeId, Instance, SteinerTree, VertexId};

use super::{PruneState, SolveError, TerminalMask, TerminalOrder};

#[derive(Debug, Clone, Default)]
pub struct SearchConfig {
    pub pruning: bool,
    pub deadline: Option<Instant>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub expansions: u64,
    pub re_expansions: u64,
    pub insertions: u64,
    pub queue_peak: u64,
    pub prune_hits: u64,
    pub heuristic_evals: u64,
    pub heuristic_cache_hits: u64,
    pub wall_time_ms: u64,
}

/// How a tuple got its current cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Retrace {
    /// `(z, {z})` for a terminal `z`
    Start,
    /// extended from `(from, I)` over an edge
    Edge(VertexId, EdgeId),
    /// merged from `(u, I1)` and `(u, I2)`
    Merge(TerminalMask, TerminalMask),
}

#[derive(Debug, Clone)]
struct Label {
    cost: Cost,
    retrace: Retrace,
    expanded: bool,
    h: Option<Cost>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    key: Cost,
    size: u32,
    vertex: VertexId,
    mask: TerminalMask,
    cost: Cost,
}

// BinaryHeap is a max-heap: "greater" means popped first.
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .cmp(&self.key)
            .then(self.size.cmp(&other.size))
            .then(other.vertex.cmp(&self.vertex))
            .then(other.mask.cmp(&self.mask))
            .then(other.cost.cmp(&self.cost))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Best-first search over (vertex, terminal set) tuples.
///
/// Tuples that were already expanded may still improve when the heuristic
/// is not consistent; they are queued and expanded again.
pub struct DsStar<'a> {
    instance: &'a Instance,
    order: TerminalOrder,
    heuristic: &'a mut dyn SteinerHeuristic,
    prune: Option<PruneState>,
    deadline: Option<Instant>,
    labels: Vec<HashMap<TerminalMask, Label>>,
    expanded: Vec<Vec<TerminalMask>>,
    queue: BinaryHeap<Entry>,
    stats: SearchStats,
}

impl<'a> DsStar<'a> {
    pub fn new(
        instance: &'a Instance,
        root: VertexId,
        heuristic: &'a mut dyn SteinerHeuristic,
        config: &SearchConfig,
    ) -> Result<Self, SolveError> {
        let order = TerminalOrder::new(instance, root)?;
        let n = instance.network().vertex_count();
        let prune = config.pruning.then(|| PruneState::new(instance, order.clone()));
        Ok(DsStar {
            instance,
            order,
            heuristic,
            prune,
            deadline: config.deadline,
            labels: vec![HashMap::new(); n],
            expanded: vec![Vec::new(); n],
            queue: BinaryHeap::new(),
            stats: SearchStats::default(),
        })
    }

    pub fn order(&self) -> &TerminalOrder {
        &self.order
    }

    pub fn stats(&self) -> &SearchStats {
        &self.stats
    }

    /// Current tentative cost of `(u, I)`.
    pub fn cost(&self, u: VertexId, mask: TerminalMask) -> Option<Cost> {
        if mask.is_empty() {
            return Some(0);
        }
        self.labels[u].get(&mask).map(|l| l.cost)
    }

    pub fn is_expanded(&self, u: VertexId, mask: TerminalMask) -> bool {
        self.labels[u].get(&mask).is_some_and(|l| l.expanded)
    }

    /// Runs until the goal tuple is expanded and returns its cost.
    pub fn run(&mut self) -> Result<Cost, SolveError> {
        let started = Instant::now();
        let result = self.search();
        self.stats.wall_time_ms = started.elapsed().as_millis() as u64;
        self.stats.heuristic_cache_hits = self.heuristic.cache_hits();
        if let Some(p) = &self.prune {
            self.stats.prune_hits = p.hits;
        }
        result
    }

    fn search(&mut self) -> Result<Cost, SolveError> {
        let root = self.order.root();
        let goal = self.order.full();
        if goal.is_empty() {
            return Ok(0);
        }
        for (bit, &z) in self.order.others().to_vec().iter().enumerate() {
            self.relax(z, TerminalMask::single(bit), 0, Retrace::Start);
        }
        while let Some(entry) = self.queue.pop() {
            let (u, i) = (entry.vertex, entry.mask);
            let label = self.labels[u].get_mut(&i).expect("queued tuple has a label");
            if entry.cost > label.cost {
                continue;
            }
            let l = label.cost;
            if label.expanded {
                self.stats.re_expansions += 1;
            } else {
                label.expanded = true;
                self.expanded[u].push(i);
            }
            self.stats.expansions += 1;
            if self.stats.expansions.is_multiple_of(1024) {
                if let Some(d) = self.deadline {
                    if Instant::now() >= d {
                        return Err(SolveError::Timeout { incumbent: None });
                    }
                }
            }
            if u == root && i == goal {
                return Ok(l);
            }

            for idx in 0..self.expanded[u].len() {
                let j = self.expanded[u][idx];
                if !j.is_disjoint(i) {
                    continue;
                }
                let lj = self.labels[u][&j].cost;
                let joined = i.union(j);
                let new = l.saturating_add(lj);
                if self.improves(u, joined, new) {
                    let keep = match self.prune.as_mut() {
                        Some(p) => !p.prune_combine(u, i, j, new),
                        None => true,
                    };
                    self.set(u, joined, new, Retrace::Merge(i, j), keep);
                }
            }

            let network = self.instance.network();
            for &(v, e) in network.neighbors(u) {
                let new = l.saturating_add(network.edge(e).cost);
                self.relax(v, i, new, Retrace::Edge(u, e));
            }
        }
        Err(SolveError::Internal("queue exhausted before reaching the goal".into()))
    }

    fn improves(&self, u: VertexId, mask: TerminalMask, cost: Cost) -> bool {
        self.labels[u].get(&mask).is_none_or(|l| cost < l.cost)
    }

    fn relax(&mut self, v: VertexId, mask: TerminalMask, cost: Cost, retrace: Retrace) {
        if !self.improves(v, mask, cost) {
            return;
        }
        let keep = match self.prune.as_mut() {
            Some(p) => !p.prune(v, mask, cost),
            None => true,
        };
        self.set(v, mask, cost, retrace, keep);
    }

    /// Records an improvement; queues the tuple unless it was pruned.
    fn set(&mut self, v: VertexId, mask: TerminalMask, cost: Cost, retrace: Retrace, enqueue: bool) {
        let label = self.labels[v].entry(mask).or_insert(Label {
            cost,
            retrace,
            expanded: false,
            h: None,
        });
        debug_assert!(cost <= label.cost);
        label.cost = cost;
        label.retrace = retrace;
        if !enqueue {
            return;
        }
        let h = match label.h {
            Some(h) => h,
            None => {
                self.stats.heuristic_evals += 1;
                let rest = self.order.complement_with_root(mask);
                let h = self.heuristic.eval(v, rest);
                label.h = Some(h);
                h
            }
        };
        self.queue.push(Entry {
            key: cost.saturating_add(h),
            size: mask.len(),
            vertex: v,
            mask,
            cost,
        });
        self.stats.insertions += 1;
        self.stats.queue_peak = self.stats.queue_peak.max(self.queue.len() as u64);
    }

    /// Edges of the tree that the retrace records give for `(u, I)`.
    pub fn compute_smt(&self, u: VertexId, mask: TerminalMask) -> Result<Vec<EdgeId>, SolveError> {
        let mut edges = Vec::new();
        let mut seen: HashSet<(VertexId, TerminalMask)> = HashSet::new();
        let mut stack = vec![(u, mask)];
        while let Some((x, m)) = stack.pop() {
            if m.is_empty() || !seen.insert((x, m)) {
                continue;
            }
            let label = self.labels[x]
                .get(&m)
                .ok_or_else(|| SolveError::Internal(format!("no retrace record for vertex {x}")))?;
            match label.retrace {
                Retrace::Start => {}
                Retrace::Edge(from, e) => {
                    edges.push(e);
                    stack.push((from, m));
                }
                Retrace::Merge(a, b) => {
                    stack.push((x, a));
                    stack.push((x, b));
                }
            }
        }
        Ok(edges)
    }

    /// The finished tree for the goal tuple, with non-terminal leaves removed.
    pub fn tree(&self) -> Result<SteinerTree, SolveError> {
        let root = self.order.root();
        let edges = self.compute_smt(root, self.order.full())?;
        let network = self.instance.network();
        let edges = prune_to_steiner_tree(network, edges, self.instance.terminals())
            .ok_or_else(|| SolveError::Internal("retraced edges do not connect the terminals".into()))?;
        Ok(SteinerTree::new(network, edges, root))
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub cost: Cost,
    pub tree: SteinerTree,
    pub stats: SearchStats,
}

/// Runs the search to completion and retraces the tree.
pub fn ds_star(
    instance: &Instance,
    root: VertexId,
    heuristic: &mut dyn SteinerHeuristic,
    config: &SearchConfig,
) -> Result<SearchOutcome, SolveError> {
    let mut search = DsStar::new(instance, root, heuristic, config)?;
    let cost = search.run()?;
    let tree = search.tree()?;
    Ok(SearchOutcome {
        cost,
        tree,
        stats: search.stats().clone(),
    })
}

/// Deadline helper: `None` for no limit.
pub fn deadline_after(limit: Option<Duration>) -> Option<Instant> {
    limit.map(|d| Instant::now() + d)
}
