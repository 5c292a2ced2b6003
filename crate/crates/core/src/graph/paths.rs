use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{Cost, EdgeId, GraphError, Network, VertexId};

/// Result of a (multi-source) Dijkstra run.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    pub dist: Vec<Cost>,
    /// Predecessor vertex and connecting edge on a shortest path.
    pub pred: Vec<Option<(VertexId, EdgeId)>>,
    infinity: Cost,
}

impl ShortestPaths {
    pub fn reached(&self, v: VertexId) -> bool {
        self.dist[v] < self.infinity
    }

    /// Edges of the shortest path from the nearest source to `v`, walking backwards.
    pub fn path_edges(&self, mut v: VertexId) -> Vec<EdgeId> {
        let mut out = Vec::new();
        while let Some((p, e)) = self.pred[v] {
            out.push(e);
            v = p;
        }
        out
    }

    /// The source the shortest path to `v` starts from.
    pub fn origin(&self, mut v: VertexId) -> VertexId {
        while let Some((p, _)) = self.pred[v] {
            v = p;
        }
        v
    }
}

/// Dijkstra from several sources with initial offsets. When `allowed` is
/// given, only vertices flagged `true` are entered.
pub fn multi_source_dijkstra(
    network: &Network,
    sources: &[(VertexId, Cost)],
    allowed: Option<&[bool]>,
) -> ShortestPaths {
    let inf = network.infinity();
    let n = network.vertex_count();
    let mut dist = vec![inf; n];
    let mut pred = vec![None; n];
    let mut heap = BinaryHeap::new();
    for &(s, d) in sources {
        if d < dist[s] {
            dist[s] = d;
            heap.push(Reverse((d, s)));
        }
    }
    while let Some(Reverse((d, x))) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        for &(y, e) in network.neighbors(x) {
            if let Some(mask) = allowed {
                if !mask[y] {
                    continue;
                }
            }
            let nd = d + network.edge(e).cost;
            if nd < dist[y] {
                dist[y] = nd;
                pred[y] = Some((x, e));
                heap.push(Reverse((nd, y)));
            }
        }
    }
    ShortestPaths { dist, pred, infinity: inf }
}

/// `d_N(source, v)` for every vertex; unreachable vertices get [`Network::infinity`].
pub fn shortest_path_distances(network: &Network, source: VertexId) -> Result<Vec<Cost>, GraphError> {
    network.check_vertex(source)?;
    Ok(multi_source_dijkstra(network, &[(source, 0)], None).dist)
}

/// Complete network over `subset` (vertex `i` is `subset[i]`) with
/// shortest-path distances as costs. Unreachable pairs get no edge.
pub fn distance_network(network: &Network, subset: &[VertexId]) -> Result<Network, GraphError> {
    if subset.is_empty() {
        return Err(GraphError::EmptySubset);
    }
    for &v in subset {
        network.check_vertex(v)?;
    }
    let inf = network.infinity();
    let mut edges = Vec::new();
    for (i, &s) in subset.iter().enumerate() {
        let dist = multi_source_dijkstra(network, &[(s, 0)], None).dist;
        for (j, &t) in subset.iter().enumerate().skip(i + 1) {
            if dist[t] < inf && s != t {
                edges.push((i, j, dist[t]));
            }
        }
    }
    Network::from_edges(subset.len(), edges)
}

/// Nearest terminal of every vertex. Ties go to the smallest terminal id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoronoiPartition {
    pub base: Vec<Option<VertexId>>,
    pub dist: Vec<Cost>,
    /// Predecessor towards the base along a shortest path.
    pub pred: Vec<Option<(VertexId, EdgeId)>>,
}

pub fn voronoi_partition(network: &Network, terminals: &[VertexId]) -> Result<VoronoiPartition, GraphError> {
    if terminals.is_empty() {
        return Err(GraphError::EmptySubset);
    }
    for &t in terminals {
        network.check_vertex(t)?;
    }
    let n = network.vertex_count();
    let inf = network.infinity();
    let mut dist = vec![inf; n];
    let mut base: Vec<Option<VertexId>> = vec![None; n];
    let mut pred = vec![None; n];
    let mut heap = BinaryHeap::new();
    for &t in terminals {
        dist[t] = 0;
        base[t] = Some(t);
        heap.push(Reverse((0, t, t)));
    }
    // Keys are (distance, base); the lexicographic minimum settles first.
    while let Some(Reverse((d, b, x))) = heap.pop() {
        if d > dist[x] || base[x] != Some(b) {
            continue;
        }
        for &(y, e) in network.neighbors(x) {
            let nd = d + network.edge(e).cost;
            let better = match base[y] {
                None => true,
                Some(cur) => (nd, b) < (dist[y], cur),
            };
            if better {
                dist[y] = nd;
                base[y] = Some(b);
                pred[y] = Some((x, e));
                heap.push(Reverse((nd, b, y)));
            }
        }
    }
    Ok(VoronoiPartition { base, dist, pred })
}
