use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::bounds::{dual_ascent, reduced_distances};
use crate::graph::{dense_mst, BottleneckOracle, Cost, VertexId};

use super::work::WorkGraph;
use super::WorkEdgeId;

/// Vertices settled by the restricted path search before it gives up.
const RESTRICTED_SEARCH_LIMIT: usize = 128;

/// Removes edges longer than the largest edge of a terminal MST.
pub(crate) fn long_edges(w: &mut WorkGraph) -> usize {
    let snap = w.snapshot();
    let oracle = BottleneckOracle::new(&snap.instance);
    let Some(cmax) = oracle.terminal_mst_max() else {
        return 0;
    };
    let long: Vec<WorkEdgeId> = w.live_edges().filter(|&e| w.edge(e).cost > cmax).collect();
    for &e in &long {
        w.remove_edge(e);
    }
    long.len()
}

/// Removes edges beaten by a bottleneck Steiner distance: first every edge
/// strictly longer than the oracle's bound, then, one at a time on the live
/// graph, every edge at least as long as some path avoiding it.
pub(crate) fn steiner_distance(w: &mut WorkGraph) -> usize {
    let snap = w.snapshot();
    let oracle = BottleneckOracle::new(&snap.instance);
    let mut doomed = Vec::new();
    for (ce, &e) in snap.edges.iter().enumerate() {
        let edge = snap.instance.network().edge(ce);
        if edge.cost > oracle.upper(edge.u, edge.v, false) {
            doomed.push(e);
        }
    }
    drop(oracle);
    for &e in &doomed {
        w.remove_edge(e);
    }
    let mut removed = doomed.len();

    let candidates: Vec<WorkEdgeId> = w.live_edges().collect();
    for e in candidates {
        if !w.edge(e).alive {
            continue;
        }
        if let Some(s) = restricted_distance(w, e) {
            if w.edge(e).cost >= s {
                w.remove_edge(e);
                removed += 1;
            }
        }
    }
    removed
}

/// Steiner distance of the shortest path between the ends of `skip` that
/// avoids `skip`, if the bounded search finds one.
fn restricted_distance(w: &WorkGraph, skip: WorkEdgeId) -> Option<Cost> {
    let (u, v) = (w.edge(skip).u, w.edge(skip).v);
    let mut dist: HashMap<VertexId, (Cost, Option<(VertexId, WorkEdgeId)>)> = HashMap::new();
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
        if settled > RESTRICTED_SEARCH_LIMIT {
            return None;
        }
        for (&y, &f) in &w.adj[x] {
            if f == skip {
                continue;
            }
            let nd = d + w.edge(f).cost;
            if dist.get(&y).is_none_or(|&(c, _)| nd < c) {
                dist.insert(y, (nd, Some((x, f))));
                heap.push(Reverse((nd, y)));
            }
        }
    }
    dist.get(&v)?;
    let mut best = 0;
    let mut segment = 0;
    let mut x = v;
    while let Some((p, f)) = dist[&x].1 {
        segment += w.edge(f).cost;
        if w.terminal[p] && p != u {
            best = best.max(segment);
            segment = 0;
        }
        x = p;
    }
    Some(best.max(segment))
}

/// Replaces non-terminals of degree `3..=max_degree` that need at most two
/// tree edges in some optimum by bypass edges between their neighbors.
pub(crate) fn ntdk(w: &mut WorkGraph, max_degree: usize) -> usize {
    let snap = w.snapshot();
    let oracle = BottleneckOracle::new(&snap.instance);
    let mut replaced = 0;
    let vertices: Vec<VertexId> = w.live_vertices().collect();
    for u in vertices {
        if !w.alive[u] || w.terminal[u] {
            continue;
        }
        let deg = w.degree(u);
        if deg < 3 || deg > max_degree {
            continue;
        }
        // every vertex alive now was alive at snapshot time
        let nbrs: Vec<(VertexId, WorkEdgeId)> = w.adj[u].iter().map(|(&x, &e)| (x, e)).collect();
        let compact: Vec<VertexId> = nbrs.iter().map(|&(x, _)| snap.index[x].unwrap()).collect();
        let applicable = (0u32..(1 << deg)).filter(|s| s.count_ones() >= 3).all(|subset| {
            let picked: Vec<usize> = (0..deg).filter(|&i| subset >> i & 1 == 1).collect();
            let sum: Cost = picked.iter().map(|&i| w.edge(nbrs[i].1).cost).sum();
            let (_, mst) = dense_mst(picked.len(), |a, b| oracle.upper(compact[picked[a]], compact[picked[b]], false));
            sum >= mst
        });
        if !applicable {
            continue;
        }
        let mut bypasses = Vec::new();
        for i in 0..deg {
            for j in i + 1..deg {
                let cost = w.edge(nbrs[i].1).cost + w.edge(nbrs[j].1).cost;
                bypasses.push((nbrs[i].0, nbrs[j].0, cost, vec![nbrs[i].1, nbrs[j].1]));
            }
        }
        let kept = bypasses.iter().filter(|&&(a, b, c, _)| w.would_keep(a, b, c)).count();
        if kept > deg {
            continue;
        }
        w.remove_vertex(u);
        for (a, b, c, replaces) in bypasses {
            w.introduce_edge(a, b, c, replaces);
        }
        replaced += 1;
    }
    replaced
}

/// Removes vertices and edges whose dual-ascent lower bound exceeds
/// `upper_bound`.
pub(crate) fn dual_ascent_bounds(w: &mut WorkGraph, upper_bound: Cost) -> usize {
    let snap = w.snapshot();
    let inst = &snap.instance;
    let net = inst.network();
    let root = crate::bounds::select_root(inst);
    let Ok(da) = dual_ascent(inst, root, None) else {
        return 0;
    };
    let rest: Vec<VertexId> = inst.terminals().iter().copied().filter(|&t| t != root).collect();
    if rest.is_empty() {
        return 0;
    }
    let from_root = reduced_distances(net, &da.reduced, &[root], false);
    let to_rest = reduced_distances(net, &da.reduced, &rest, true);
    let lb = da.lower_bound;

    let mut removed = 0;
    let mut gone = vec![false; net.vertex_count()];
    for x in 0..net.vertex_count() {
        if inst.is_terminal(x) {
            continue;
        }
        if lb.saturating_add(from_root[x]).saturating_add(to_rest[x]) > upper_bound {
            gone[x] = true;
            w.remove_vertex(snap.vertices[x]);
            removed += 1;
        }
    }
    for (ce, edge) in net.edges().iter().enumerate() {
        if gone[edge.u] || gone[edge.v] {
            continue;
        }
        let via = |a: VertexId, b: VertexId| {
            from_root[a]
                .saturating_add(da.reduced_cost(net, a, ce))
                .saturating_add(to_rest[b])
        };
        let bound = lb.saturating_add(via(edge.u, edge.v).min(via(edge.v, edge.u)));
        if bound > upper_bound {
            w.remove_edge(snap.edges[ce]);
            removed += 1;
        }
    }
    removed
}
