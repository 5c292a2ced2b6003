use std::collections::VecDeque;

use crate::graph::VertexId;

use super::absorb_choice;
use super::work::WorkGraph;

/// Degree tests and terminal edge inclusions, to a fixpoint. Returns the
/// number of transformations applied.
pub(crate) fn run(w: &mut WorkGraph) -> usize {
    let mut changes = 0;
    let mut queued = vec![false; w.alive.len()];
    let mut queue: VecDeque<VertexId> = w.live_vertices().collect();
    for &v in &queue {
        queued[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        if !w.alive[v] || w.terminal_count() <= 1 {
            continue;
        }
        let touched = step(w, v);
        if touched.is_empty() {
            continue;
        }
        changes += 1;
        for x in touched {
            if w.alive[x] && !queued[x] {
                queued[x] = true;
                queue.push_back(x);
            }
        }
    }
    if w.terminal_count() == 1 {
        changes += strip_to_single_terminal(w);
    }
    changes
}

/// Applies the first applicable test at `v`; returns the vertices whose
/// neighborhood changed.
fn step(w: &mut WorkGraph, v: VertexId) -> Vec<VertexId> {
    let deg = w.degree(v);
    if !w.terminal[v] {
        match deg {
            0 | 1 => {
                let nbrs: Vec<VertexId> = w.adj[v].keys().copied().collect();
                w.remove_vertex(v);
                return nbrs;
            }
            2 => {
                let mut it = w.adj[v].iter().map(|(&x, &e)| (x, e));
                let (a, ea) = it.next().unwrap();
                let (b, eb) = it.next().unwrap();
                let cost = w.edge(ea).cost + w.edge(eb).cost;
                w.remove_vertex(v);
                w.introduce_edge(a, b, cost, vec![ea, eb]);
                return vec![a, b];
            }
            _ => return Vec::new(),
        }
    }
    if deg == 0 {
        return Vec::new();
    }
    if deg == 1 {
        let (&u, &e) = w.adj[v].iter().next().unwrap();
        let mut nbrs: Vec<VertexId> = w.adj[u].keys().copied().collect();
        w.contract(e, v);
        nbrs.push(u);
        return nbrs;
    }
    // minimum terminal edge: a cheapest edge that reaches another terminal
    let inc = w.incident_by_cost(v);
    let min = w.edge(inc[0].1).cost;
    let hit = inc
        .iter()
        .take_while(|&&(_, e)| w.edge(e).cost == min)
        .filter(|&&(u, _)| w.terminal[u])
        .min_by_key(|&&(_, e)| e)
        .copied();
    if let Some((u, e)) = hit {
        let absorbed = absorb_choice(w, v, u);
        let keep = if absorbed == u { v } else { u };
        let mut nbrs: Vec<VertexId> = w.adj[absorbed].keys().copied().collect();
        w.contract(e, absorbed);
        nbrs.push(keep);
        return nbrs;
    }
    Vec::new()
}

/// With a single terminal left, the optimum is the empty tree.
fn strip_to_single_terminal(w: &mut WorkGraph) -> usize {
    let rest: Vec<VertexId> = w.live_vertices().filter(|&v| !w.terminal[v]).collect();
    for &v in &rest {
        w.remove_vertex(v);
    }
    rest.len()
}
