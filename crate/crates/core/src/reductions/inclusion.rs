use crate::graph::{voronoi_partition, BottleneckOracle, Cost, VertexId};

use super::absorb_choice;
use super::work::WorkGraph;
use super::WorkEdgeId;

/// Voronoi recomputations per call.
const SHORT_LINK_ROUNDS: usize = 256;

/// Contracts the cheapest link of a Voronoi region when the second cheapest
/// is long enough. The partition is rebuilt after every contraction.
pub(crate) fn short_links(w: &mut WorkGraph) -> usize {
    let mut contracted = 0;
    for _ in 0..SHORT_LINK_ROUNDS {
        if w.terminal_count() <= 1 {
            break;
        }
        let Some((e, absorbed)) = find_short_link(w) else {
            break;
        };
        w.contract(e, absorbed);
        contracted += 1;
    }
    contracted
}

fn find_short_link(w: &WorkGraph) -> Option<(WorkEdgeId, VertexId)> {
    let snap = w.snapshot();
    let net = snap.instance.network();
    let vor = voronoi_partition(net, snap.instance.terminals()).ok()?;
    // two cheapest links per region by (cost, edge id), with the inside endpoint
    let mut best: Vec<[Option<(Cost, usize, VertexId, VertexId)>; 2]> = vec![[None, None]; net.vertex_count()];
    for (ce, edge) in net.edges().iter().enumerate() {
        let (Some(bu), Some(bv)) = (vor.base[edge.u], vor.base[edge.v]) else {
            continue;
        };
        if bu == bv {
            continue;
        }
        for (z, inside, outside) in [(bu, edge.u, edge.v), (bv, edge.v, edge.u)] {
            let cand = Some((edge.cost, ce, inside, outside));
            let slot = &mut best[z];
            if slot[0].is_none_or(|b| (edge.cost, ce) < (b.0, b.1)) {
                slot[1] = slot[0];
                slot[0] = cand;
            } else if slot[1].is_none_or(|b| (edge.cost, ce) < (b.0, b.1)) {
                slot[1] = cand;
            }
        }
    }
    for &z in snap.instance.terminals() {
        let [Some((c1, ce, u, v)), Some((c2, ..))] = best[z] else {
            continue;
        };
        if c2 >= vor.dist[u] + c1 + vor.dist[v] {
            let (wu, wv) = (snap.vertices[u], snap.vertices[v]);
            return Some((snap.edges[ce], absorb_choice(w, wu, wv)));
        }
    }
    None
}

/// Contracts the cheapest edge of a terminal when its other edges are long
/// compared to the way on to a second terminal.
pub(crate) fn nearest_vertex(w: &mut WorkGraph) -> usize {
    let snap = w.snapshot();
    let oracle = BottleneckOracle::new(&snap.instance);
    // contracted endpoints; their snapshot data no longer applies
    let mut dirty = vec![false; w.alive.len()];
    let mut contracted = 0;
    let terminals: Vec<VertexId> = snap.instance.terminals().iter().map(|&t| snap.vertices[t]).collect();
    for z in terminals {
        if w.terminal_count() <= 1 {
            break;
        }
        if !w.alive[z] || dirty[z] || w.degree(z) < 2 {
            continue;
        }
        let inc = w.incident_by_cost(z);
        let (u, e1) = inc[0];
        let (v, e2) = inc[1];
        if dirty[u] || dirty[v] {
            continue;
        }
        let Some(iu) = snap.index[u] else { continue };
        let reach = oracle
            .nearest_terminals(iu)
            .map(|(d, t)| (d, snap.vertices[t]))
            .find(|&(_, t)| t != z && !dirty[t]);
        let Some((d, _)) = reach else { continue };
        let need = w.edge(e1).cost + d;
        let basic = w.edge(e2).cost >= need;
        let extended = !basic
            && !w.terminal[v]
            && w.adj[z]
                .values()
                .chain(w.adj[v].values())
                .filter(|&&e| e != e1 && e != e2)
                .all(|&e| w.edge(e).cost >= need);
        if basic || extended {
            let absorbed = absorb_choice(w, z, u);
            w.contract(e1, absorbed);
            dirty[z] = true;
            dirty[u] = true;
            contracted += 1;
        }
    }
    contracted
}
