use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::{prune_to_steiner_tree, Cost, EdgeId, Instance, Network, SteinerTree, VertexId};

use super::{SolveError, TerminalMask};

/// Largest terminal list the dynamic program accepts.
pub const DW_TERMINAL_CAP: usize = 25;

/// Minimum of `l(J) + l(I \ J)` over the non-empty strict subsets `J` of
/// `I`, with the minimizing `J`. Splits whose parts are unknown (`None`) are
/// skipped. Returns `None` for singletons.
pub fn combine_step(i: TerminalMask, mut l: impl FnMut(TerminalMask) -> Option<Cost>) -> Option<(Cost, TerminalMask)> {
    let low = i.iter().next()?;
    let rest = i.without(low);
    if rest.is_empty() {
        return None;
    }
    let mut best: Option<(Cost, TerminalMask)> = None;
    // J always holds the lowest bit, so each unordered split is seen once
    let splits = std::iter::once(TerminalMask::EMPTY).chain(rest.proper_subsets());
    for s in splits {
        let j = s.with(low);
        let k = i.difference(j);
        let (Some(a), Some(b)) = (l(j), l(k)) else {
            continue;
        };
        let c = a.saturating_add(b);
        if best.is_none_or(|(bc, _)| c < bc) {
            best = Some((c, j));
        }
    }
    best
}

/// Full Dreyfus-Wagner table over a terminal list: `best(u, I)` is the cost
/// of a Steiner minimal tree for the terminals in `I` plus `u`.
#[derive(Debug, Clone)]
pub struct DwTable {
    n: usize,
    terminals: Vec<VertexId>,
    /// combine value per (mask, vertex); `infinity` when undefined
    combined: Vec<Cost>,
    split: Vec<u32>,
    best: Vec<Cost>,
    pred: Vec<Option<(u32, u32)>>,
    infinity: Cost,
}

impl DwTable {
    pub fn build(network: &Network, terminals: &[VertexId]) -> Result<DwTable, SolveError> {
        if terminals.len() > DW_TERMINAL_CAP {
            return Err(SolveError::TooManyTerminals {
                count: terminals.len(),
                cap: DW_TERMINAL_CAP,
            });
        }
        for &t in terminals {
            network.check_vertex(t)?;
        }
        let n = network.vertex_count();
        let k = terminals.len();
        let masks = 1usize << k;
        let inf = network.infinity();
        let mut t = DwTable {
            n,
            terminals: terminals.to_vec(),
            combined: vec![inf; masks * n],
            split: vec![0; masks * n],
            best: vec![inf; masks * n],
            pred: vec![None; masks * n],
            infinity: inf,
        };
        // empty set: every vertex alone costs nothing
        for u in 0..n {
            t.best[u] = 0;
        }
        for m in 1..masks {
            let mask = TerminalMask::from_bits(m as u128);
            if mask.len() == 1 {
                let z = terminals[mask.iter().next().unwrap()];
                t.combined[m * n + z] = 0;
            } else {
                for u in 0..n {
                    let best = &t.best;
                    let found = combine_step(mask, |j| {
                        let c = best[j.bits() as usize * n + u];
                        (c < inf).then_some(c)
                    });
                    if let Some((c, j)) = found {
                        t.combined[m * n + u] = c;
                        t.split[m * n + u] = j.bits() as u32;
                    }
                }
            }
            t.propagate(network, m);
        }
        Ok(t)
    }

    /// `best(u, I) = min_v d(u, v) + combined(v, I)`, by Dijkstra seeded with
    /// the combine values.
    fn propagate(&mut self, network: &Network, m: usize) {
        let n = self.n;
        let base = m * n;
        let mut heap = BinaryHeap::new();
        for u in 0..n {
            let c = self.combined[base + u];
            if c < self.infinity {
                self.best[base + u] = c;
                heap.push(Reverse((c, u)));
            }
        }
        while let Some(Reverse((d, x))) = heap.pop() {
            if d > self.best[base + x] {
                continue;
            }
            for &(y, e) in network.neighbors(x) {
                let nd = d + network.edge(e).cost;
                if nd < self.best[base + y] {
                    self.best[base + y] = nd;
                    self.pred[base + y] = Some((x as u32, e as u32));
                    heap.push(Reverse((nd, y)));
                }
            }
        }
    }

    pub fn terminals(&self) -> &[VertexId] {
        &self.terminals
    }

    /// Mask over this table's terminal list; `None` if a vertex is not listed.
    pub fn mask_of(&self, vertices: &[VertexId]) -> Option<TerminalMask> {
        let mut m = TerminalMask::EMPTY;
        for v in vertices {
            m = m.with(self.terminals.iter().position(|t| t == v)?);
        }
        Some(m)
    }

    fn index(&self, u: VertexId, mask: TerminalMask) -> usize {
        debug_assert!(mask.bits() < 1u128 << self.terminals.len());
        mask.bits() as usize * self.n + u
    }

    /// `l*(u, I)`; `None` if unreachable.
    pub fn best(&self, u: VertexId, mask: TerminalMask) -> Option<Cost> {
        let c = self.best[self.index(u, mask)];
        (c < self.infinity).then_some(c)
    }

    /// The combine value `l(u, I)` before propagation; `None` for singletons
    /// other than at their own terminal.
    pub fn combined(&self, u: VertexId, mask: TerminalMask) -> Option<Cost> {
        let c = self.combined[self.index(u, mask)];
        (c < self.infinity).then_some(c)
    }

    /// Edges of a tree attaining `best(u, I)`.
    pub fn tree_edges(&self, network: &Network, u: VertexId, mask: TerminalMask) -> Result<Vec<EdgeId>, SolveError> {
        let mut out = Vec::new();
        let mut stack = vec![(u, mask)];
        while let Some((mut x, m)) = stack.pop() {
            if m.is_empty() {
                continue;
            }
            if self.best(x, m).is_none() {
                return Err(SolveError::Internal(format!("no tree for vertex {x}")));
            }
            while let Some((p, e)) = self.pred[self.index(x, m)] {
                out.push(e as EdgeId);
                x = p as VertexId;
            }
            if m.len() >= 2 {
                let j = TerminalMask::from_bits(self.split[self.index(x, m)] as u128);
                stack.push((x, j));
                stack.push((x, m.difference(j)));
            }
        }
        let mut keep: Vec<VertexId> = mask.iter().map(|b| self.terminals[b]).collect();
        keep.push(u);
        prune_to_steiner_tree(network, out, &keep)
            .ok_or_else(|| SolveError::Internal("retraced edges do not connect the terminals".into()))
    }
}

/// Exact solve by dynamic programming over all terminal subsets.
pub fn dreyfus_wagner(instance: &Instance, root: VertexId) -> Result<(Cost, SteinerTree), SolveError> {
    if root >= instance.network().vertex_count() || !instance.is_terminal(root) {
        return Err(SolveError::RootNotTerminal(root));
    }
    let network = instance.network();
    let others: Vec<VertexId> = instance.terminals().iter().copied().filter(|&t| t != root).collect();
    let table = DwTable::build(network, &others)?;
    let full = TerminalMask::full(others.len());
    let cost = table
        .best(root, full)
        .ok_or(SolveError::Graph(crate::graph::GraphError::Disconnected))?;
    let edges = table.tree_edges(network, root, full)?;
    Ok((cost, SteinerTree::new(network, edges, root)))
}
