//! Weighted undirected networks, Steiner instances and trees.
//!
//! Everything here is immutable once built. Vertices and edges are dense
//! 0-based indices; the `io` module keeps the mapping back to the labels
//! used in the input file.

mod bottleneck;
mod mst;
mod paths;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bottleneck::BottleneckOracle;
pub use mst::{dense_mst, minimum_spanning_tree, prune_to_steiner_tree, UnionFind};
pub use paths::{
    distance_network, multi_source_dijkstra, shortest_path_distances, voronoi_partition,
    ShortestPaths, VoronoiPartition,
};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type Cost = u64;

/// Instances whose summed edge cost exceeds this are rejected at build time.
pub const MAX_TOTAL_COST: Cost = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {0} is out of range")]
    InvalidVertex(VertexId),
    #[error("edge {{{0}, {1}}} has cost 0; costs must be positive")]
    ZeroCost(VertexId, VertexId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("total edge cost exceeds 2^62")]
    CostOverflow,
    #[error("empty vertex subset")]
    EmptySubset,
    #[error("instance has no terminals")]
    NoTerminals,
    #[error("root {0} is not a terminal")]
    RootNotTerminal(VertexId),
    #[error("network is disconnected")]
    Disconnected,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("edge set is not a tree")]
    NotATree,
    #[error("terminal {0} is not covered by the tree")]
    TerminalMissing(VertexId),
    #[error("edge {0} does not exist in the network")]
    UnknownEdge(EdgeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub cost: Cost,
}

impl Edge {
    /// The endpoint opposite to `x`.
    pub fn other(&self, x: VertexId) -> VertexId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Builds a [`Network`], merging parallel edges by keeping the cheapest.
#[derive(Debug, Clone)]
pub struct NetworkBuilder {
    vertex_count: usize,
    edges: Vec<Edge>,
    index: HashMap<(VertexId, VertexId), EdgeId>,
}

impl NetworkBuilder {
    pub fn new(vertex_count: usize) -> Self {
        NetworkBuilder {
            vertex_count,
            edges: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Adds `{u, v}`; returns the id of the (possibly pre-existing) edge.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId, cost: Cost) -> Result<EdgeId, GraphError> {
        for x in [u, v] {
            if x >= self.vertex_count {
                return Err(GraphError::InvalidVertex(x));
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if cost == 0 {
            return Err(GraphError::ZeroCost(u, v));
        }
        let key = (u.min(v), u.max(v));
        if let Some(&id) = self.index.get(&key) {
            let edge = &mut self.edges[id];
            edge.cost = edge.cost.min(cost);
            return Ok(id);
        }
        let id = self.edges.len();
        self.edges.push(Edge { u: key.0, v: key.1, cost });
        self.index.insert(key, id);
        Ok(id)
    }

    pub fn build(self) -> Result<Network, GraphError> {
        let mut total: Cost = 0;
        for e in &self.edges {
            total = total.checked_add(e.cost).ok_or(GraphError::CostOverflow)?;
            if total > MAX_TOTAL_COST {
                return Err(GraphError::CostOverflow);
            }
        }
        let mut adjacency = vec![Vec::new(); self.vertex_count];
        for (id, e) in self.edges.iter().enumerate() {
            adjacency[e.u].push((e.v, id));
            adjacency[e.v].push((e.u, id));
        }
        Ok(Network {
            adjacency,
            edges: self.edges,
            total_cost: total,
        })
    }
}

/// An undirected network with positive integer edge costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
    edges: Vec<Edge>,
    total_cost: Cost,
}

impl Network {
    pub fn from_edges(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId, Cost)>,
    ) -> Result<Network, GraphError> {
        let mut builder = NetworkBuilder::new(vertex_count);
        for (u, v, c) in edges {
            builder.add_edge(u, v, c)?;
        }
        builder.build()
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        let (a, b) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.adjacency[a].iter().find(|&&(w, _)| w == b).map(|&(_, id)| id)
    }

    /// Sum of all edge costs.
    pub fn total_cost(&self) -> Cost {
        self.total_cost
    }

    /// Distance surrogate for "unreachable": strictly larger than any path cost.
    pub fn infinity(&self) -> Cost {
        self.total_cost + 1
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::InvalidVertex(v))
        }
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count() == 0 {
            return true;
        }
        self.component_of(0).len() == self.vertex_count()
    }

    /// Vertices reachable from `start`, in BFS order.
    pub fn component_of(&self, start: VertexId) -> Vec<VertexId> {
        let mut seen = vec![false; self.vertex_count()];
        let mut order = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            head += 1;
            for &(y, _) in self.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    order.push(y);
                }
            }
        }
        order
    }

    pub fn cost_of(&self, edges: &[EdgeId]) -> Cost {
        edges.iter().map(|&e| self.edges[e].cost).sum()
    }
}

/// A network together with its terminal set and an optional root terminal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    network: Network,
    terminals: Vec<VertexId>,
    is_terminal: Vec<bool>,
    root: Option<VertexId>,
}

impl Instance {
    /// Terminals are sorted and deduplicated. The network must be connected.
    pub fn new(network: Network, terminals: impl IntoIterator<Item = VertexId>) -> Result<Instance, GraphError> {
        let mut terminals: Vec<VertexId> = terminals.into_iter().collect();
        terminals.sort_unstable();
        terminals.dedup();
        if terminals.is_empty() {
            return Err(GraphError::NoTerminals);
        }
        for &t in &terminals {
            network.check_vertex(t)?;
        }
        if !network.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let mut is_terminal = vec![false; network.vertex_count()];
        for &t in &terminals {
            is_terminal[t] = true;
        }
        Ok(Instance {
            network,
            terminals,
            is_terminal,
            root: None,
        })
    }

    pub fn with_root(mut self, root: VertexId) -> Result<Instance, GraphError> {
        self.network.check_vertex(root)?;
        if !self.is_terminal[root] {
            return Err(GraphError::RootNotTerminal(root));
        }
        self.root = Some(root);
        Ok(self)
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn terminals(&self) -> &[VertexId] {
        &self.terminals
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.is_terminal[v]
    }

    pub fn root(&self) -> Option<VertexId> {
        self.root
    }

    /// The designated root, or the smallest terminal.
    pub fn root_or_default(&self) -> VertexId {
        self.root.unwrap_or(self.terminals[0])
    }

    /// Same network, different terminal set.
    pub fn with_terminals(&self, terminals: impl IntoIterator<Item = VertexId>) -> Result<Instance, GraphError> {
        Instance::new(self.network.clone(), terminals)
    }
}

/// A rooted Steiner tree, stored as a sorted set of edge ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteinerTree {
    edges: Vec<EdgeId>,
    root: VertexId,
    cost: Cost,
}

impl SteinerTree {
    /// Caches the cost of `edges` in `network`. Validity is checked by [`validate_tree`].
    pub fn new(network: &Network, mut edges: Vec<EdgeId>, root: VertexId) -> SteinerTree {
        edges.sort_unstable();
        edges.dedup();
        let cost = edges
            .iter()
            .filter(|&&e| e < network.edge_count())
            .map(|&e| network.edge(e).cost)
            .sum();
        SteinerTree { edges, root, cost }
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn cost(&self) -> Cost {
        self.cost
    }

    /// Vertices spanned by the tree (the root alone for an empty edge set).
    pub fn vertices(&self, network: &Network) -> Vec<VertexId> {
        let mut vs: Vec<VertexId> = self
            .edges
            .iter()
            .flat_map(|&e| {
                let e = network.edge(e);
                [e.u, e.v]
            })
            .collect();
        vs.push(self.root);
        vs.sort_unstable();
        vs.dedup();
        vs
    }
}

/// Recomputes the cost of `tree` after checking that it is a tree of
/// `instance`'s network spanning every terminal.
pub fn validate_tree(instance: &Instance, tree: &SteinerTree) -> Result<Cost, TreeError> {
    let network = instance.network();
    let mut seen_edge = vec![false; network.edge_count()];
    for &e in tree.edges() {
        if e >= network.edge_count() {
            return Err(TreeError::UnknownEdge(e));
        }
        if seen_edge[e] {
            return Err(TreeError::NotATree);
        }
        seen_edge[e] = true;
    }
    let mut uf = UnionFind::new(network.vertex_count());
    let mut touched = vec![false; network.vertex_count()];
    for &e in tree.edges() {
        let edge = network.edge(e);
        if !uf.union(edge.u, edge.v) {
            return Err(TreeError::NotATree);
        }
        touched[edge.u] = true;
        touched[edge.v] = true;
    }
    if tree.root() >= network.vertex_count() {
        return Err(TreeError::NotATree);
    }
    touched[tree.root()] = true;
    let anchor = uf.find(tree.root());
    for v in 0..network.vertex_count() {
        if touched[v] && uf.find(v) != anchor {
            return Err(TreeError::NotATree);
        }
    }
    for &t in instance.terminals() {
        if !touched[t] {
            return Err(TreeError::TerminalMissing(t));
        }
    }
    if !instance.is_terminal(tree.root()) {
        return Err(TreeError::TerminalMissing(tree.root()));
    }
    Ok(network.cost_of(tree.edges()))
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn parallel_edges_keep_minimum() {
        let n = Network::from_edges(2, [(0, 1, 5), (1, 0, 3)]).unwrap();
        assert_eq!(n.edge_count(), 1);
        assert_eq!(n.edge(0).cost, 3);
        assert_eq!(n.total_cost(), 3);
    }

    #[test]
    fn builder_rejects_bad_edges() {
        assert_eq!(Network::from_edges(2, [(0, 1, 0)]), Err(GraphError::ZeroCost(0, 1)));
        assert_eq!(Network::from_edges(2, [(1, 1, 3)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(Network::from_edges(2, [(0, 2, 3)]), Err(GraphError::InvalidVertex(2)));
        assert_eq!(
            Network::from_edges(3, [(0, 1, 1 << 61), (1, 2, 1 << 61), (0, 2, 1)]),
            Err(GraphError::CostOverflow)
        );
    }

    #[test]
    fn instance_checks() {
        let n = Network::from_edges(3, [(0, 1, 1)]).unwrap();
        assert_eq!(Instance::new(n.clone(), [0]), Err(GraphError::Disconnected));
        let n = Network::from_edges(2, [(0, 1, 1)]).unwrap();
        assert_eq!(Instance::new(n.clone(), []), Err(GraphError::NoTerminals));
        assert_eq!(
            Instance::new(n, [0]).unwrap().with_root(1),
            Err(GraphError::RootNotTerminal(1))
        );
    }

    #[test]
    fn validate_path_tree() {
        let inst = path();
        let tree = SteinerTree::new(inst.network(), vec![0, 1], 0);
        assert_eq!(validate_tree(&inst, &tree), Ok(5));
    }

    #[test]
    fn validate_reports_missing_terminal() {
        let inst = star();
        let tree = SteinerTree::new(inst.network(), vec![0, 1], 1);
        assert_eq!(validate_tree(&inst, &tree), Err(TreeError::TerminalMissing(3)));
    }

    #[test]
    fn validate_rejects_cycle() {
        let inst = diamond();
        let tree = SteinerTree::new(inst.network(), vec![0, 1, 2, 3], 0);
        assert_eq!(validate_tree(&inst, &tree), Err(TreeError::NotATree));
    }

    #[test]
    fn validate_rejects_unknown_edge_and_forest() {
        let inst = diamond();
        let tree = SteinerTree::new(inst.network(), vec![0, 9], 0);
        assert_eq!(validate_tree(&inst, &tree), Err(TreeError::UnknownEdge(9)));
        // t1-x and y-t2 are disjoint
        let tree = SteinerTree::new(inst.network(), vec![0, 3], 0);
        assert_eq!(validate_tree(&inst, &tree), Err(TreeError::NotATree));
    }

    #[test]
    fn single_terminal_empty_tree_is_valid() {
        let inst = path().with_terminals([1]).unwrap();
        let tree = SteinerTree::new(inst.network(), vec![], 1);
        assert_eq!(validate_tree(&inst, &tree), Ok(0));
    }
}
