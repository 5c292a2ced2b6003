use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::{
    multi_source_dijkstra, prune_to_steiner_tree, Cost, EdgeId, GraphError, Instance, Network, SteinerTree, VertexId,
};

use super::dual_ascent;

/// Grows a tree from `start` by repeatedly attaching the nearest terminal
/// along a shortest path, then strips non-terminal leaves. With `within`,
/// only those vertices may be used.
pub fn rsph(instance: &Instance, within: Option<&[VertexId]>, start: VertexId) -> Result<SteinerTree, GraphError> {
    let network = instance.network();
    network.check_vertex(start)?;
    let n = network.vertex_count();
    let allowed: Vec<bool> = match within {
        None => vec![true; n],
        Some(set) => {
            let mut flags = vec![false; n];
            for &v in set {
                network.check_vertex(v)?;
                flags[v] = true;
            }
            flags
        }
    };
    if !allowed[start] || instance.terminals().iter().any(|&t| !allowed[t]) {
        return Err(GraphError::Disconnected);
    }

    let inf = network.infinity();
    let mut in_tree = vec![false; n];
    let mut dist = vec![inf; n];
    let mut pred: Vec<Option<(VertexId, EdgeId)>> = vec![None; n];
    let mut edges = Vec::new();
    let mut pending: Vec<VertexId> = instance.terminals().iter().copied().filter(|&t| t != start).collect();
    let mut fresh = vec![start];

    loop {
        // distances to the tree only shrink as it grows
        let mut heap = BinaryHeap::new();
        for &v in &fresh {
            in_tree[v] = true;
            dist[v] = 0;
            pred[v] = None;
            heap.push(Reverse((0, v)));
        }
        while let Some(Reverse((d, x))) = heap.pop() {
            if d > dist[x] {
                continue;
            }
            for &(y, e) in network.neighbors(x) {
                if !allowed[y] {
                    continue;
                }
                let nd = d + network.edge(e).cost;
                if nd < dist[y] {
                    dist[y] = nd;
                    pred[y] = Some((x, e));
                    heap.push(Reverse((nd, y)));
                }
            }
        }
        let Some(pos) = (0..pending.len()).min_by_key(|&i| (dist[pending[i]], pending[i])) else {
            break;
        };
        let t = pending.swap_remove(pos);
        if dist[t] >= inf {
            return Err(GraphError::Disconnected);
        }
        fresh.clear();
        let mut x = t;
        while !in_tree[x] {
            fresh.push(x);
            let (p, e) = pred[x].expect("reached vertex has a predecessor");
            edges.push(e);
            x = p;
        }
    }

    let edges = prune_to_steiner_tree(network, edges, instance.terminals()).ok_or(GraphError::Disconnected)?;
    Ok(SteinerTree::new(network, edges, start))
}

/// Improves a tree by key-path exchange and key-vertex insertion until no
/// move helps. Never increases the cost.
pub fn local_search(instance: &Instance, tree: &SteinerTree) -> SteinerTree {
    let network = instance.network();
    let terminals = instance.terminals();
    let mut best: Vec<EdgeId> = tree.edges().to_vec();
    let mut best_cost = tree.cost();
    if let Some(e) = spanning_rebuild(network, &best, None, terminals) {
        let c = network.cost_of(&e);
        if c < best_cost {
            best = e;
            best_cost = c;
        }
    }
    loop {
        if let Some(e) = key_path_exchange(instance, &best) {
            best_cost = network.cost_of(&e);
            best = e;
            continue;
        }
        if let Some(e) = key_vertex_insertion(instance, &best, best_cost) {
            best_cost = network.cost_of(&e);
            best = e;
            continue;
        }
        break;
    }
    SteinerTree::new(network, best, tree.root())
}

fn tree_vertices(network: &Network, edges: &[EdgeId]) -> Vec<VertexId> {
    let mut vs: Vec<VertexId> = edges.iter().flat_map(|&e| [network.edge(e).u, network.edge(e).v]).collect();
    vs.sort_unstable();
    vs.dedup();
    vs
}

/// MST of the subgraph induced by the tree's vertices (plus `extra`), pruned.
fn spanning_rebuild(
    network: &Network,
    edges: &[EdgeId],
    extra: Option<VertexId>,
    terminals: &[VertexId],
) -> Option<Vec<EdgeId>> {
    let mut vs = tree_vertices(network, edges);
    if vs.is_empty() {
        return None;
    }
    vs.extend(extra);
    let mut flag = vec![false; network.vertex_count()];
    for &v in &vs {
        flag[v] = true;
    }
    let mut cand = Vec::new();
    for &v in &vs {
        for &(w, e) in network.neighbors(v) {
            if v < w && flag[w] {
                cand.push(e);
            }
        }
    }
    prune_to_steiner_tree(network, cand, terminals)
}

fn key_vertex_insertion(instance: &Instance, edges: &[EdgeId], cost: Cost) -> Option<Vec<EdgeId>> {
    let network = instance.network();
    let vs = tree_vertices(network, edges);
    let mut in_tree = vec![false; network.vertex_count()];
    for &v in &vs {
        in_tree[v] = true;
    }
    for v in 0..network.vertex_count() {
        if in_tree[v] {
            continue;
        }
        let links = network.neighbors(v).iter().filter(|&&(w, _)| in_tree[w]).count();
        if links < 2 {
            continue;
        }
        if let Some(e) = spanning_rebuild(network, edges, Some(v), instance.terminals()) {
            if network.cost_of(&e) < cost {
                return Some(e);
            }
        }
    }
    None
}

/// Replaces one key path (a tree path whose inner vertices are non-terminals
/// of tree degree 2) by a cheaper connection between the two remaining parts.
fn key_path_exchange(instance: &Instance, edges: &[EdgeId]) -> Option<Vec<EdgeId>> {
    let network = instance.network();
    let n = network.vertex_count();
    let mut adj: Vec<Vec<(VertexId, EdgeId)>> = vec![Vec::new(); n];
    for &e in edges {
        let edge = network.edge(e);
        adj[edge.u].push((edge.v, e));
        adj[edge.v].push((edge.u, e));
    }
    let is_key = |v: VertexId| instance.is_terminal(v) || adj[v].len() >= 3;
    let mut used = vec![false; network.edge_count()];
    for &start in &tree_vertices(network, edges) {
        if !is_key(start) {
            continue;
        }
        for &(first, e0) in &adj[start] {
            if used[e0] {
                continue;
            }
            // walk to the next key vertex
            let mut path = vec![e0];
            let mut inner = Vec::new();
            let (mut prev, mut x) = (start, first);
            while !is_key(x) {
                inner.push(x);
                let &(y, e) = adj[x].iter().find(|&&(y, _)| y != prev).expect("inner vertex has degree 2");
                path.push(e);
                prev = x;
                x = y;
            }
            for &e in &path {
                used[e] = true;
            }
            if let Some(better) = reconnect(instance, edges, &adj, &path, &inner, start) {
                return Some(better);
            }
        }
    }
    None
}

fn reconnect(
    instance: &Instance,
    edges: &[EdgeId],
    adj: &[Vec<(VertexId, EdgeId)>],
    path: &[EdgeId],
    inner: &[VertexId],
    start: VertexId,
) -> Option<Vec<EdgeId>> {
    let network = instance.network();
    let n = network.vertex_count();
    let path_cost = network.cost_of(path);
    let mut removed = vec![false; network.edge_count()];
    for &e in path {
        removed[e] = true;
    }
    // side A: what stays attached to `start`
    let mut side_a = vec![false; n];
    side_a[start] = true;
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for &(y, e) in &adj[x] {
            if !removed[e] && !side_a[y] {
                side_a[y] = true;
                stack.push(y);
            }
        }
    }
    let mut in_tree = vec![false; n];
    for &e in edges {
        in_tree[network.edge(e).u] = true;
        in_tree[network.edge(e).v] = true;
    }
    for &v in inner {
        in_tree[v] = false;
    }
    let allowed: Vec<bool> = (0..n).map(|v| !side_a[v]).collect();
    let sources: Vec<(VertexId, Cost)> = (0..n).filter(|&v| side_a[v]).map(|v| (v, 0)).collect();
    let sp = multi_source_dijkstra(network, &sources, Some(&allowed));
    // the first tree vertex outside A on the new path belongs to side B
    let target = (0..n)
        .filter(|&v| in_tree[v] && !side_a[v] && sp.reached(v))
        .min_by_key(|&v| (sp.dist[v], v))?;
    if sp.dist[target] >= path_cost {
        return None;
    }
    let mut out: Vec<EdgeId> = edges.iter().copied().filter(|&e| !removed[e]).collect();
    out.extend(sp.path_edges(target));
    let out = prune_to_steiner_tree(network, out, instance.terminals())?;
    (network.cost_of(&out) < network.cost_of(edges)).then_some(out)
}

/// Evenly spread picks of at most `limit` items, in order.
pub(crate) fn spread<T: Copy>(items: &[T], limit: usize) -> Vec<T> {
    if items.len() <= limit {
        return items.to_vec();
    }
    (0..limit).map(|i| items[i * items.len() / limit]).collect()
}

/// Best of several shortest-path-heuristic runs, then local search.
pub fn upper_bound_pipeline(instance: &Instance, root: VertexId) -> Result<SteinerTree, GraphError> {
    let network = instance.network();
    let mut best: Option<SteinerTree> = None;
    let mut consider = |t: SteinerTree| {
        if best.as_ref().is_none_or(|b| t.cost() < b.cost()) {
            best = Some(t);
        }
    };
    for &s in &spread(instance.terminals(), 16) {
        consider(rsph(instance, None, s)?);
    }
    let da = dual_ascent(instance, root, None)?;
    if let Ok(t) = rsph(instance, Some(&da.root_component), root) {
        consider(t);
    }
    let best = best.ok_or(GraphError::NoTerminals)?;
    let improved = local_search(instance, &best);
    Ok(SteinerTree::new(network, improved.edges().to_vec(), root))
}

/// Terminal whose dual ascent gives the largest bound; ties go to the
/// smallest id.
pub fn select_root(instance: &Instance) -> VertexId {
    let mut best: Option<(Cost, VertexId)> = None;
    for &t in &spread(instance.terminals(), 50) {
        let lb = dual_ascent(instance, t, None).map_or(0, |d| d.lower_bound);
        if best.is_none_or(|(b, _)| lb > b) {
            best = Some((lb, t));
        }
    }
    best.map_or(instance.root_or_default(), |(_, t)| t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::validate_tree;

    fn edge_set(inst: &Instance, pairs: &[(VertexId, VertexId)]) -> Vec<EdgeId> {
        let mut v: Vec<EdgeId> = pairs.iter().map(|&(a, b)| inst.network().find_edge(a, b).unwrap()).collect();
        v.sort();
        v
    }

    #[test]
    fn rsph_examples() {
        let inst = star();
        let t = rsph(&inst, None, 1).unwrap();
        assert_eq!(t.cost(), 9);
        assert_eq!(t.edges(), &[0, 1, 2]);
        assert_eq!(rsph(&path(), None, 0).unwrap().cost(), 5);
        let inst = k4();
        let t = rsph(&inst, None, 0).unwrap();
        assert_eq!(t.edges(), edge_set(&inst, &[(0, 1), (1, 2), (1, 3)]).as_slice());
        assert_eq!(t.cost(), 27);
    }

    #[test]
    fn rsph_restriction_must_hold_terminals() {
        assert_eq!(rsph(&path(), Some(&[0, 1]), 0).unwrap_err(), GraphError::Disconnected);
        assert_eq!(rsph(&diamond(), Some(&[0, 1, 3]), 0).unwrap().cost(), 6);
    }

    #[test]
    fn local_search_finds_shortcut() {
        let inst = diamond();
        let bad = SteinerTree::new(inst.network(), vec![2, 3], 0);
        assert_eq!(bad.cost(), 6);
        let t = local_search(&inst, &bad);
        assert_eq!(t.cost(), 2);
        assert_eq!(t.edges(), &[0, 1]);
        let again = local_search(&inst, &t);
        assert_eq!(again.cost(), 2);
    }

    #[test]
    fn pipeline_examples() {
        for (inst, want) in [(star(), 9), (k4(), 27), (path(), 5), (diamond(), 2)] {
            let root = inst.terminals()[0];
            let t = upper_bound_pipeline(&inst, root).unwrap();
            assert_eq!(t.cost(), want);
            assert_eq!(validate_tree(&inst, &t), Ok(want));
        }
    }

    #[test]
    fn root_selection() {
        assert_eq!(select_root(&path()), 0);
        assert_eq!(select_root(&path().with_terminals([1]).unwrap()), 1);
        let sym = Instance::new(Network::from_edges(4, [(0, 1, 3), (0, 2, 3), (0, 3, 3)]).unwrap(), [1, 2, 3]).unwrap();
        assert_eq!(select_root(&sym), 1);
    }
}
