use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::{Cost, EdgeId, GraphError, Instance, Network, VertexId};

/// Index of the arc that traverses edge `e` leaving `from`. Edge `e` yields
/// arc `2e` (from `edge.u` to `edge.v`) and arc `2e + 1` (the reverse).
pub fn arc_index(network: &Network, from: VertexId, e: EdgeId) -> usize {
    if network.edge(e).u == from {
        2 * e
    } else {
        2 * e + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualAscentResult {
    pub lower_bound: Cost,
    /// Reduced cost per arc, indexed as in [`arc_index`].
    pub reduced: Vec<Cost>,
    /// Vertices the root reaches over zero-cost arcs, ascending.
    pub root_component: Vec<VertexId>,
    pub root: VertexId,
}

impl DualAscentResult {
    pub fn reduced_cost(&self, network: &Network, from: VertexId, e: EdgeId) -> Cost {
        self.reduced[arc_index(network, from, e)]
    }

    /// Reduced-cost distances from the root along arc directions.
    pub fn distances_from_root(&self, network: &Network) -> Vec<Cost> {
        reduced_distances(network, &self.reduced, &[self.root], false)
    }
}

/// Dual ascent on the bidirected network. `subset` restricts the terminal
/// set (the root must belong to it); `None` uses all terminals.
pub fn dual_ascent(
    instance: &Instance,
    root: VertexId,
    subset: Option<&[VertexId]>,
) -> Result<DualAscentResult, GraphError> {
    let network = instance.network();
    network.check_vertex(root)?;
    let terminals: &[VertexId] = subset.unwrap_or(instance.terminals());
    for &t in terminals {
        network.check_vertex(t)?;
    }
    if !terminals.contains(&root) || !instance.is_terminal(root) {
        return Err(GraphError::RootNotTerminal(root));
    }
    let n = network.vertex_count();
    let mut reduced: Vec<Cost> = Vec::with_capacity(2 * network.edge_count());
    for e in network.edges() {
        reduced.push(e.cost);
        reduced.push(e.cost);
    }
    let mut active = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &t in terminals {
        if t != root && !active[t] {
            active[t] = true;
            heap.push(Reverse((network.degree(t), t)));
        }
    }

    let mut lower_bound: Cost = 0;
    let mut stamp = vec![0u32; n];
    let mut round = 0u32;
    let mut queue: Vec<VertexId> = Vec::new();
    let mut cut_arcs: Vec<usize> = Vec::new();

    while let Some(Reverse((key, z))) = heap.pop() {
        if !active[z] {
            continue;
        }
        // cut(z): vertices that reach z over zero-cost arcs
        round += 1;
        queue.clear();
        queue.push(z);
        stamp[z] = round;
        let mut hits_other = false;
        let mut i = 0;
        while i < queue.len() {
            let x = queue[i];
            i += 1;
            if x != z && (x == root || active[x]) {
                hits_other = true;
                break;
            }
            for &(y, e) in network.neighbors(x) {
                if stamp[y] != round && reduced[arc_index(network, y, e)] == 0 {
                    stamp[y] = round;
                    queue.push(y);
                }
            }
        }
        if hits_other {
            active[z] = false;
            continue;
        }
        cut_arcs.clear();
        let mut min_cost = Cost::MAX;
        for &x in &queue {
            for &(y, e) in network.neighbors(x) {
                if stamp[y] != round {
                    let a = arc_index(network, y, e);
                    cut_arcs.push(a);
                    min_cost = min_cost.min(reduced[a]);
                }
            }
        }
        if cut_arcs.is_empty() {
            // z cannot be reached from the root
            active[z] = false;
            continue;
        }
        // lazy selection: a stale, too small key yields to a cheaper cut
        if cut_arcs.len() > key {
            if let Some(&Reverse((next, _))) = heap.peek() {
                if next < cut_arcs.len() {
                    heap.push(Reverse((cut_arcs.len(), z)));
                    continue;
                }
            }
        }
        lower_bound += min_cost;
        for &a in &cut_arcs {
            reduced[a] -= min_cost;
        }
        heap.push(Reverse((cut_arcs.len(), z)));
    }

    let root_component = zero_reachable(network, &reduced, root);
    Ok(DualAscentResult {
        lower_bound,
        reduced,
        root_component,
        root,
    })
}

fn zero_reachable(network: &Network, reduced: &[Cost], root: VertexId) -> Vec<VertexId> {
    let mut seen = vec![false; network.vertex_count()];
    seen[root] = true;
    let mut stack = vec![root];
    while let Some(x) = stack.pop() {
        for &(y, e) in network.neighbors(x) {
            if !seen[y] && reduced[arc_index(network, x, e)] == 0 {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    (0..seen.len()).filter(|&v| seen[v]).collect()
}

/// Shortest paths under per-arc costs. With `reverse` false this is the
/// distance from the nearest source to each vertex; with `reverse` true it
/// is the distance from each vertex to the nearest source.
pub fn reduced_distances(network: &Network, reduced: &[Cost], sources: &[VertexId], reverse: bool) -> Vec<Cost> {
    let inf = network.infinity();
    let mut dist = vec![inf; network.vertex_count()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0;
        heap.push(Reverse((0, s)));
    }
    while let Some(Reverse((d, x))) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        for &(y, e) in network.neighbors(x) {
            let a = if reverse { arc_index(network, y, e) } else { arc_index(network, x, e) };
            let nd = d + reduced[a];
            if nd < dist[y] {
                dist[y] = nd;
                heap.push(Reverse((nd, y)));
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn path_and_star() {
        let r = dual_ascent(&path(), 2, None).unwrap();
        assert_eq!(r.lower_bound, 5);
        assert_eq!(r.root_component, vec![0, 1, 2]);
        let r = dual_ascent(&star(), 3, None).unwrap();
        assert_eq!(r.lower_bound, 9);
    }

    #[test]
    fn single_terminal() {
        let inst = path().with_terminals([1]).unwrap();
        let r = dual_ascent(&inst, 1, None).unwrap();
        assert_eq!(r.lower_bound, 0);
        assert_eq!(r.root_component, vec![1]);
    }

    #[test]
    fn root_must_be_terminal() {
        assert_eq!(dual_ascent(&path(), 1, None).unwrap_err(), GraphError::RootNotTerminal(1));
        assert_eq!(dual_ascent(&path(), 2, Some(&[0])).unwrap_err(), GraphError::RootNotTerminal(2));
    }

    #[test]
    fn reduced_costs_stay_in_range() {
        let inst = k4();
        let r = dual_ascent(&inst, 2, None).unwrap();
        assert!(r.lower_bound <= 27);
        for (e, edge) in inst.network().edges().iter().enumerate() {
            assert!(r.reduced[2 * e] <= edge.cost && r.reduced[2 * e + 1] <= edge.cost);
        }
        for &t in inst.terminals() {
            assert!(r.root_component.contains(&t));
        }
    }

    #[test]
    fn reverse_distances() {
        let inst = path();
        let costs: Vec<Cost> = vec![2, 1, 3, 0];
        // 0 -> 1 -> 2 costs 2 + 3; 2 -> 1 -> 0 costs 0 + 1
        assert_eq!(reduced_distances(inst.network(), &costs, &[0], false), vec![0, 2, 5]);
        assert_eq!(reduced_distances(inst.network(), &costs, &[0], true), vec![0, 1, 1]);
    }
}
