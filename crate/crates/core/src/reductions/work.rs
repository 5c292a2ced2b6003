use std::collections::BTreeMap;

use crate::graph::{Cost, Instance, Network, VertexId};

use super::{Reduction, WorkEdgeId};

#[derive(Debug, Clone)]
pub(crate) struct WorkEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub cost: Cost,
    pub alive: bool,
}

impl WorkEdge {
    pub fn other(&self, x: VertexId) -> VertexId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Mutable copy of an instance. Edge ids `0..m` are the original edges;
/// edges introduced later get fresh ids.
#[derive(Debug, Clone)]
pub(crate) struct WorkGraph {
    pub alive: Vec<bool>,
    pub adj: Vec<BTreeMap<VertexId, WorkEdgeId>>,
    pub edges: Vec<WorkEdge>,
    pub terminal: Vec<bool>,
    pub offset: Cost,
    pub log: Vec<Reduction>,
    live_vertices: usize,
    live_edges: usize,
    live_terminals: usize,
}

/// Compact instance built from the live part of a work graph.
#[derive(Debug, Clone)]
pub(crate) struct Snapshot {
    pub instance: Instance,
    /// compact vertex -> work vertex
    pub vertices: Vec<VertexId>,
    /// work vertex -> compact vertex
    pub index: Vec<Option<VertexId>>,
    /// compact edge -> work edge
    pub edges: Vec<WorkEdgeId>,
}

impl WorkGraph {
    pub fn new(instance: &Instance) -> Self {
        let network = instance.network();
        let n = network.vertex_count();
        let mut adj = vec![BTreeMap::new(); n];
        let mut edges = Vec::with_capacity(network.edge_count());
        for (id, e) in network.edges().iter().enumerate() {
            adj[e.u].insert(e.v, id);
            adj[e.v].insert(e.u, id);
            edges.push(WorkEdge {
                u: e.u,
                v: e.v,
                cost: e.cost,
                alive: true,
            });
        }
        let mut terminal = vec![false; n];
        for &t in instance.terminals() {
            terminal[t] = true;
        }
        WorkGraph {
            alive: vec![true; n],
            adj,
            edges,
            terminal,
            offset: 0,
            log: Vec::new(),
            live_vertices: n,
            live_edges: network.edge_count(),
            live_terminals: instance.terminals().len(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.live_vertices
    }

    pub fn edge_count(&self) -> usize {
        self.live_edges
    }

    pub fn terminal_count(&self) -> usize {
        self.live_terminals
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn edge(&self, e: WorkEdgeId) -> &WorkEdge {
        &self.edges[e]
    }

    pub fn live_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.alive.len()).filter(|&v| self.alive[v])
    }

    pub fn live_edges(&self) -> impl Iterator<Item = WorkEdgeId> + '_ {
        (0..self.edges.len()).filter(|&e| self.edges[e].alive)
    }

    /// Incident (neighbor, edge) pairs sorted by (cost, edge id).
    pub fn incident_by_cost(&self, v: VertexId) -> Vec<(VertexId, WorkEdgeId)> {
        let mut inc: Vec<(VertexId, WorkEdgeId)> = self.adj[v].iter().map(|(&w, &e)| (w, e)).collect();
        inc.sort_by_key(|&(_, e)| (self.edges[e].cost, e));
        inc
    }

    fn unlink(&mut self, e: WorkEdgeId) {
        let (u, v) = (self.edges[e].u, self.edges[e].v);
        self.edges[e].alive = false;
        self.adj[u].remove(&v);
        self.adj[v].remove(&u);
        self.live_edges -= 1;
    }

    pub fn remove_edge(&mut self, e: WorkEdgeId) {
        debug_assert!(self.edges[e].alive);
        self.unlink(e);
        self.log.push(Reduction::EdgeRemoved { edge: e });
    }

    pub fn remove_vertex(&mut self, v: VertexId) {
        debug_assert!(self.alive[v]);
        let incident: Vec<WorkEdgeId> = self.adj[v].values().copied().collect();
        for &e in &incident {
            self.unlink(e);
        }
        self.alive[v] = false;
        self.live_vertices -= 1;
        if self.terminal[v] {
            self.terminal[v] = false;
            self.live_terminals -= 1;
        }
        self.log.push(Reduction::VertexRemoved { vertex: v, edges: incident });
    }

    /// Adds `{u, v}` standing for the `replaces` edges. An existing parallel
    /// edge survives unless the new one is strictly cheaper. Returns whether
    /// the new edge was kept.
    pub fn introduce_edge(&mut self, u: VertexId, v: VertexId, cost: Cost, replaces: Vec<WorkEdgeId>) -> bool {
        debug_assert!(u != v && self.alive[u] && self.alive[v]);
        if let Some(&old) = self.adj[u].get(&v) {
            if self.edges[old].cost <= cost {
                return false;
            }
            self.remove_edge(old);
        }
        let id = self.edges.len();
        self.edges.push(WorkEdge {
            u: u.min(v),
            v: u.max(v),
            cost,
            alive: true,
        });
        self.adj[u].insert(v, id);
        self.adj[v].insert(u, id);
        self.live_edges += 1;
        self.log.push(Reduction::EdgeIntroduced { edge: id, replaces });
        true
    }

    /// Would `{u, v}` at `cost` survive next to an existing parallel edge?
    pub fn would_keep(&self, u: VertexId, v: VertexId, cost: Cost) -> bool {
        self.adj[u].get(&v).is_none_or(|&old| self.edges[old].cost > cost)
    }

    /// Contracts `e`, merging `absorbed` into the other endpoint.
    pub fn contract(&mut self, e: WorkEdgeId, absorbed: VertexId) {
        let edge = self.edges[e].clone();
        debug_assert!(edge.alive && (edge.u == absorbed || edge.v == absorbed));
        let keep = edge.other(absorbed);
        self.unlink(e);
        self.offset += edge.cost;
        self.log.push(Reduction::EdgeContracted {
            edge: e,
            absorbed,
            into: keep,
            cost: edge.cost,
        });
        let moved: Vec<(VertexId, WorkEdgeId)> = self.adj[absorbed].iter().map(|(&w, &f)| (w, f)).collect();
        for (w, f) in moved {
            let cost = self.edges[f].cost;
            self.unlink(f);
            if !self.introduce_edge(keep, w, cost, vec![f]) {
                self.log.push(Reduction::EdgeRemoved { edge: f });
            }
        }
        if self.terminal[absorbed] {
            self.terminal[absorbed] = false;
            if self.terminal[keep] {
                self.live_terminals -= 1;
            } else {
                self.terminal[keep] = true;
            }
        }
        self.alive[absorbed] = false;
        self.live_vertices -= 1;
    }

    /// Removes every component that holds no terminal.
    pub fn drop_stray_components(&mut self) -> usize {
        let n = self.alive.len();
        let mut seen = vec![false; n];
        let mut stack = Vec::new();
        for v in 0..n {
            if self.alive[v] && self.terminal[v] && !seen[v] {
                seen[v] = true;
                stack.push(v);
                while let Some(x) = stack.pop() {
                    for &w in self.adj[x].keys() {
                        if !seen[w] {
                            seen[w] = true;
                            stack.push(w);
                        }
                    }
                }
            }
        }
        let stray: Vec<VertexId> = (0..n).filter(|&v| self.alive[v] && !seen[v]).collect();
        for &v in &stray {
            self.remove_vertex(v);
        }
        stray.len()
    }

    pub fn snapshot(&self) -> Snapshot {
        let n = self.alive.len();
        let mut index = vec![None; n];
        let mut vertices = Vec::with_capacity(self.live_vertices);
        for v in self.live_vertices() {
            index[v] = Some(vertices.len());
            vertices.push(v);
        }
        let mut edges = Vec::with_capacity(self.live_edges);
        let mut list = Vec::with_capacity(self.live_edges);
        for e in self.live_edges() {
            let w = &self.edges[e];
            edges.push(e);
            list.push((index[w.u].unwrap(), index[w.v].unwrap(), w.cost));
        }
        let network = Network::from_edges(vertices.len(), list).expect("work graph stays simple");
        let terminals: Vec<VertexId> = vertices
            .iter()
            .enumerate()
            .filter(|&(_, &v)| self.terminal[v])
            .map(|(i, _)| i)
            .collect();
        let instance = Instance::new(network, terminals).expect("work graph keeps its terminals connected");
        Snapshot {
            instance,
            vertices,
            index,
            edges,
        }
    }
}
