use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use super::{voronoi_partition, Cost, EdgeId, Instance, UnionFind, VertexId};

/// Over-approximates bottleneck Steiner distances.
///
/// Candidate walks are `u ~> z`, the terminal-MST path `z ~> z'`, then
/// `z' ~> v`, for the `k` nearest terminals `z` of `u` and `z'` of `v`,
/// plus the shortest path found by a bounded search between `u` and `v`.
/// Every candidate is a real walk, so its Steiner distance bounds the
/// true minimum from above: `upper(u, v) >= s(u, v)`.
#[derive(Debug, Clone)]
pub struct BottleneckOracle<'a> {
    instance: &'a Instance,
    term_index: Vec<Option<usize>>,
    /// `k` nearest terminals per vertex as (distance, terminal index), ascending.
    near: Vec<Vec<(Cost, usize)>>,
    /// Terminal MST rooted at terminal index 0: parent, cost of the parent edge, depth.
    parent: Vec<usize>,
    parent_cost: Vec<Cost>,
    depth: Vec<usize>,
    mst_max: Option<Cost>,
    mst_cost: Cost,
    search_limit: usize,
}

impl<'a> BottleneckOracle<'a> {
    pub const DEFAULT_K: usize = 3;
    pub const DEFAULT_SEARCH_LIMIT: usize = 128;

    pub fn new(instance: &'a Instance) -> Self {
        Self::with_params(instance, Self::DEFAULT_K, Self::DEFAULT_SEARCH_LIMIT)
    }

    pub fn with_params(instance: &'a Instance, k: usize, search_limit: usize) -> Self {
        let network = instance.network();
        let terminals = instance.terminals();
        let mut term_index = vec![None; network.vertex_count()];
        for (i, &t) in terminals.iter().enumerate() {
            term_index[t] = Some(i);
        }
        let near = k_nearest_terminals(instance, &term_index, k.max(1));

        // Voronoi links give an MST of the terminal distance network.
        let vor = voronoi_partition(network, terminals).expect("instance has terminals");
        let mut links: Vec<(Cost, usize, usize)> = Vec::new();
        for e in network.edges() {
            let (Some(bu), Some(bv)) = (vor.base[e.u], vor.base[e.v]) else {
                continue;
            };
            if bu != bv {
                let c = vor.dist[e.u] + e.cost + vor.dist[e.v];
                let (a, b) = (term_index[bu].unwrap(), term_index[bv].unwrap());
                links.push((c, a.min(b), a.max(b)));
            }
        }
        links.sort_unstable();
        let r = terminals.len();
        let mut uf = UnionFind::new(r);
        let mut adj: Vec<Vec<(usize, Cost)>> = vec![Vec::new(); r];
        let mut mst_max = None;
        let mut mst_cost = 0;
        for (c, a, b) in links {
            if uf.union(a, b) {
                adj[a].push((b, c));
                adj[b].push((a, c));
                mst_max = Some(mst_max.map_or(c, |m: Cost| m.max(c)));
                mst_cost += c;
            }
        }
        let mut parent = vec![usize::MAX; r];
        let mut parent_cost = vec![0; r];
        let mut depth = vec![0; r];
        let mut seen = vec![false; r];
        let mut stack = vec![0usize];
        seen[0] = true;
        parent[0] = 0;
        while let Some(x) = stack.pop() {
            for &(y, c) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = x;
                    parent_cost[y] = c;
                    depth[y] = depth[x] + 1;
                    stack.push(y);
                }
            }
        }

        BottleneckOracle {
            instance,
            term_index,
            near,
            parent,
            parent_cost,
            depth,
            mst_max,
            mst_cost,
            search_limit,
        }
    }

    /// Largest edge of the terminal MST; `None` for a single terminal.
    pub fn terminal_mst_max(&self) -> Option<Cost> {
        self.mst_max
    }

    pub fn terminal_mst_cost(&self) -> Cost {
        self.mst_cost
    }

    /// Maximum edge cost on the terminal-MST path between terminal indices.
    pub fn terminal_bottleneck(&self, mut a: usize, mut b: usize) -> Cost {
        let mut best = 0;
        if self.parent[a] == usize::MAX || self.parent[b] == usize::MAX {
            return self.instance.network().infinity();
        }
        while a != b {
            if self.depth[a] >= self.depth[b] {
                best = best.max(self.parent_cost[a]);
                a = self.parent[a];
            } else {
                best = best.max(self.parent_cost[b]);
                b = self.parent[b];
            }
        }
        best
    }

    /// Upper bound on `s(u, v)`; with `exclude_direct_edge` it bounds the
    /// restricted distance over walks avoiding the edge `{u, v}`.
    pub fn upper(&self, u: VertexId, v: VertexId, exclude_direct_edge: bool) -> Cost {
        if u == v {
            return 0;
        }
        let network = self.instance.network();
        let mut best = network.infinity();
        // Terminal routes may run over {u, v}, so they only serve the unrestricted bound.
        if !exclude_direct_edge {
            for &(du, zu) in &self.near[u] {
                for &(dv, zv) in &self.near[v] {
                    let c = du.max(dv).max(self.terminal_bottleneck(zu, zv));
                    best = best.min(c);
                }
            }
        }
        let skip = if exclude_direct_edge { network.find_edge(u, v) } else { None };
        if let Some(c) = self.direct_search(u, v, skip) {
            best = best.min(c);
        }
        best
    }

    /// Steiner distance of the shortest `u`-`v` path found within the search limit.
    fn direct_search(&self, u: VertexId, v: VertexId, skip: Option<EdgeId>) -> Option<Cost> {
        let network = self.instance.network();
        let mut dist: HashMap<VertexId, (Cost, Option<(VertexId, EdgeId)>)> = HashMap::new();
        let mut heap = BinaryHeap::new();
        dist.insert(u, (0, None));
        heap.push(Reverse((0, u)));
        let mut settled = 0;
        while let Some(Reverse((d, x))) = heap.pop() {
            if d > dist[&x].0 {
                continue;
            }
            if x == v {
                break;
            }
            settled += 1;
            if settled > self.search_limit {
                return None;
            }
            for &(y, e) in network.neighbors(x) {
                if Some(e) == skip {
                    continue;
                }
                let nd = d + network.edge(e).cost;
                let improve = dist.get(&y).is_none_or(|&(c, _)| nd < c);
                if improve {
                    dist.insert(y, (nd, Some((x, e))));
                    heap.push(Reverse((nd, y)));
                }
            }
        }
        dist.get(&v)?;
        // split the path at terminals and take the longest piece
        let mut best = 0;
        let mut segment = 0;
        let mut x = v;
        while let Some((p, e)) = dist[&x].1 {
            segment += network.edge(e).cost;
            if self.instance.is_terminal(p) && p != u {
                best = best.max(segment);
                segment = 0;
            }
            x = p;
        }
        Some(best.max(segment))
    }

    /// The nearest terminals of `v` as (distance, terminal), ascending.
    pub fn nearest_terminals(&self, v: VertexId) -> impl Iterator<Item = (Cost, VertexId)> + '_ {
        let terminals = self.instance.terminals();
        self.near[v].iter().map(move |&(d, i)| (d, terminals[i]))
    }

    pub fn is_terminal_index(&self, v: VertexId) -> Option<usize> {
        self.term_index[v]
    }
}

fn k_nearest_terminals(instance: &Instance, term_index: &[Option<usize>], k: usize) -> Vec<Vec<(Cost, usize)>> {
    let network = instance.network();
    let n = network.vertex_count();
    let mut near: Vec<Vec<(Cost, usize)>> = vec![Vec::new(); n];
    let mut heap = BinaryHeap::new();
    for &t in instance.terminals() {
        heap.push(Reverse((0, term_index[t].unwrap(), t)));
    }
    while let Some(Reverse((d, z, x))) = heap.pop() {
        if near[x].len() >= k || near[x].iter().any(|&(_, t)| t == z) {
            continue;
        }
        near[x].push((d, z));
        for &(y, e) in network.neighbors(x) {
            if near[y].len() < k && !near[y].iter().any(|&(_, t)| t == z) {
                heap.push(Reverse((d + network.edge(e).cost, z, y)));
            }
        }
    }
    near
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{Instance, Network};
    use super::*;

    #[test]
    fn path_bottleneck() {
        let inst = path();
        let o = BottleneckOracle::new(&inst);
        assert_eq!(o.upper(0, 2, false), 5);
        assert_eq!(o.terminal_mst_max(), Some(5));
    }

    #[test]
    fn k4_bottleneck_uses_intermediate_terminal() {
        let inst = k4();
        let o = BottleneckOracle::new(&inst);
        assert_eq!(o.upper(0, 3, false), 15);
        assert_eq!(o.terminal_mst_max(), Some(15));
        assert_eq!(o.terminal_mst_cost(), 27);
    }

    #[test]
    fn diamond_bottleneck() {
        let inst = diamond();
        let o = BottleneckOracle::new(&inst);
        assert_eq!(o.upper(0, 1, false), 2);
    }

    #[test]
    fn restricted_bound_avoids_the_edge() {
        // triangle u=0,v=1 (cost 5) and 0-2-1 (2+2); terminals 0,1
        let inst = Instance::new(Network::from_edges(3, [(0, 1, 5), (0, 2, 2), (2, 1, 2)]).unwrap(), [0, 1]).unwrap();
        let o = BottleneckOracle::new(&inst);
        assert_eq!(o.upper(0, 1, true), 4);
        // without the detour, only the edge itself remains
        let inst = Instance::new(Network::from_edges(2, [(0, 1, 5)]).unwrap(), [0, 1]).unwrap();
        let o = BottleneckOracle::new(&inst);
        assert_eq!(o.upper(0, 1, true), inst.network().infinity());
        assert_eq!(o.upper(0, 1, false), 5);
    }
}
