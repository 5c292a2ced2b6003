use std::collections::HashMap;

use crate::graph::{dense_mst, shortest_path_distances, Cost, Instance, VertexId};
use crate::solver::{TerminalMask, TerminalOrder};

use super::dual_ascent;

/// Lower-bound oracle that guides the search.
///
/// `eval(u, set)` must not exceed the cost of a Steiner minimal tree for the
/// terminals of `set` plus `u`. `set` is a mask over the [`TerminalOrder`]
/// the heuristic was built for and always carries the root bit.
pub trait SteinerHeuristic {
    fn eval(&mut self, u: VertexId, set: TerminalMask) -> Cost;

    fn name(&self) -> &'static str;

    /// Evaluations answered from an internal cache.
    fn cache_hits(&self) -> u64 {
        0
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroHeuristic;

impl SteinerHeuristic for ZeroHeuristic {
    fn eval(&mut self, _u: VertexId, _set: TerminalMask) -> Cost {
        0
    }

    fn name(&self) -> &'static str {
        "zero"
    }
}

/// A deliberately inadmissible heuristic: a large constant everywhere except
/// for the root paired with the root-only set. Used to check that tests can
/// detect wrong answers.
#[derive(Debug, Clone)]
pub struct ConstantHeuristic {
    pub value: Cost,
    pub root: VertexId,
}

impl SteinerHeuristic for ConstantHeuristic {
    fn eval(&mut self, u: VertexId, set: TerminalMask) -> Cost {
        if u == self.root && set == TerminalMask::root() {
            0
        } else {
            self.value
        }
    }

    fn name(&self) -> &'static str {
        "constant"
    }
}

/// Half of (terminal MST + two cheapest attachments of `u`), rounded up.
#[derive(Debug, Clone)]
pub struct OneTreeHeuristic {
    order: TerminalOrder,
    /// distance rows: `rows[i]` for `others[i]`, the root row last
    rows: Vec<Vec<Cost>>,
    mst_cache: HashMap<TerminalMask, Cost>,
    hits: u64,
}

impl OneTreeHeuristic {
    pub fn new(instance: &Instance, order: TerminalOrder) -> Self {
        let network = instance.network();
        let rows = order
            .others()
            .iter()
            .chain(std::iter::once(&order.root()))
            .map(|&t| shortest_path_distances(network, t).expect("terminal in range"))
            .collect();
        OneTreeHeuristic {
            order,
            rows,
            mst_cache: HashMap::new(),
            hits: 0,
        }
    }

    fn row(&self, bit: usize) -> &[Cost] {
        if bit == TerminalMask::ROOT_BIT {
            self.rows.last().unwrap()
        } else {
            &self.rows[bit]
        }
    }

    fn mst(&mut self, set: TerminalMask) -> Cost {
        if let Some(&c) = self.mst_cache.get(&set) {
            self.hits += 1;
            return c;
        }
        let bits: Vec<usize> = set.iter().collect();
        let (_, c) = dense_mst(bits.len(), |i, j| self.row(bits[i])[self.order.terminal(bits[j])]);
        self.mst_cache.insert(set, c);
        c
    }
}

impl SteinerHeuristic for OneTreeHeuristic {
    fn eval(&mut self, u: VertexId, set: TerminalMask) -> Cost {
        // u stays in the set when it is a terminal: it attaches at distance 0
        let rest = set;
        let mut first = Cost::MAX;
        let mut second = Cost::MAX;
        for b in rest.iter() {
            let d = self.row(b)[u];
            if d < first {
                second = first;
                first = d;
            } else if d < second {
                second = d;
            }
        }
        let pair = if rest.len() == 1 { 2 * first } else { first + second };
        let c = self.mst(rest);
        (c + pair).div_ceil(2)
    }

    fn name(&self) -> &'static str {
        "onetree"
    }

    fn cache_hits(&self) -> u64 {
        self.hits
    }
}

/// Dual-ascent bound per terminal set plus the reduced-cost distance from
/// the root to `u`. One dual ascent per distinct set, cached.
#[derive(Debug, Clone)]
pub struct DualAscentHeuristic<'a> {
    instance: &'a Instance,
    order: TerminalOrder,
    cache: HashMap<TerminalMask, Vec<Cost>>,
    hits: u64,
}

impl<'a> DualAscentHeuristic<'a> {
    pub fn new(instance: &'a Instance, order: TerminalOrder) -> Self {
        DualAscentHeuristic {
            instance,
            order,
            cache: HashMap::new(),
            hits: 0,
        }
    }

    fn table(&self, set: TerminalMask) -> Vec<Cost> {
        let terminals: Vec<VertexId> = self.order.vertices(set.union(TerminalMask::root())).collect();
        let network = self.instance.network();
        let da = dual_ascent(self.instance, self.order.root(), Some(&terminals)).expect("root is a terminal");
        da.distances_from_root(network)
            .into_iter()
            .map(|d| da.lower_bound.saturating_add(d))
            .collect()
    }
}

impl SteinerHeuristic for DualAscentHeuristic<'_> {
    fn eval(&mut self, u: VertexId, set: TerminalMask) -> Cost {
        if let Some(t) = self.cache.get(&set) {
            self.hits += 1;
            return t[u];
        }
        let t = self.table(set);
        let c = t[u];
        self.cache.insert(set, t);
        c
    }

    fn name(&self) -> &'static str {
        "da"
    }

    fn cache_hits(&self) -> u64 {
        self.hits
    }
}
