use std::collections::HashMap;

use crate::graph::{shortest_path_distances, Cost, Instance, VertexId};

use super::{TerminalMask, TerminalOrder};

/// Upper bounds `U(J)` with witness sets `S(J)` used to discard tuples.
///
/// `U(J)` is the cost of some tree that spans `J` and reaches a terminal
/// outside `J`; the witnesses record which outside terminals such trees use.
#[derive(Debug, Clone)]
pub struct PruneState {
    order: TerminalOrder,
    /// `rows[i]` holds distances from `others[i]`; the root row is last
    rows: Vec<Vec<Cost>>,
    bounds: HashMap<TerminalMask, (Cost, TerminalMask)>,
    set_distance: HashMap<TerminalMask, (Cost, usize)>,
    pub hits: u64,
}

impl PruneState {
    pub fn new(instance: &Instance, order: TerminalOrder) -> Self {
        let network = instance.network();
        let rows = order
            .others()
            .iter()
            .chain(std::iter::once(&order.root()))
            .map(|&t| shortest_path_distances(network, t).expect("terminal in range"))
            .collect();
        PruneState {
            order,
            rows,
            bounds: HashMap::new(),
            set_distance: HashMap::new(),
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

    /// `U(J)` and `S(J)`, if set.
    pub fn bound(&self, j: TerminalMask) -> Option<(Cost, TerminalMask)> {
        self.bounds.get(&j).copied()
    }

    /// `sd(J, R \ J)` with the outside terminal attaining it.
    fn outside_distance(&mut self, j: TerminalMask) -> (Cost, usize) {
        if let Some(&v) = self.set_distance.get(&j) {
            return v;
        }
        let outside = self.order.complement_with_root(j);
        let mut best = (Cost::MAX, TerminalMask::ROOT_BIT);
        for a in j.iter() {
            for b in outside.iter() {
                let d = self.row(b)[self.order.terminal(a)];
                if d < best.0 {
                    best = (d, b);
                }
            }
        }
        self.set_distance.insert(j, best);
        best
    }

    /// `sd({v}, R \ J)` with the outside terminal attaining it.
    fn vertex_distance(&self, v: VertexId, j: TerminalMask) -> (Cost, usize) {
        let mut best = (Cost::MAX, TerminalMask::ROOT_BIT);
        for b in self.order.complement_with_root(j).iter() {
            let d = self.row(b)[v];
            if d < best.0 {
                best = (d, b);
            }
        }
        best
    }

    /// Tightens `U(J)` with the tuple `(v, J)` of cost `l` and reports
    /// whether the tuple can be dropped.
    pub fn prune(&mut self, v: VertexId, j: TerminalMask, l: Cost) -> bool {
        let by_set = self.outside_distance(j);
        let by_vertex = self.vertex_distance(v, j);
        let (d, witness) = if by_set.0 <= by_vertex.0 { by_set } else { by_vertex };
        let candidate = l.saturating_add(d);
        let entry = self.bounds.entry(j).or_insert((Cost::MAX, TerminalMask::EMPTY));
        if candidate < entry.0 {
            *entry = (candidate, TerminalMask::single(witness));
        }
        let pruned = l > entry.0;
        if pruned {
            self.hits += 1;
        }
        pruned
    }

    /// Merges the bounds of two disjoint sets when their witnesses allow it,
    /// then prunes `(u, J1 ∪ J2)` like [`PruneState::prune`].
    pub fn prune_combine(&mut self, u: VertexId, j1: TerminalMask, j2: TerminalMask, l: Cost) -> bool {
        let joined = j1.union(j2);
        if let (Some((u1, s1)), Some((u2, s2))) = (self.bound(j1), self.bound(j2)) {
            if s1.is_disjoint(j2) || s2.is_disjoint(j1) {
                let c = u1.saturating_add(u2);
                let witness = s1.union(s2).difference(joined);
                let entry = self.bounds.entry(joined).or_insert((Cost::MAX, TerminalMask::EMPTY));
                if c < entry.0 {
                    *entry = (c, witness);
                }
            }
        }
        self.prune(u, joined, l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    fn k4_state() -> (PruneState, TerminalOrder) {
        // root c; bits a=0, b=1, d=2
        let inst = k4();
        let order = TerminalOrder::new(&inst, 2).unwrap();
        (PruneState::new(&inst, order.clone()), order)
    }

    #[test]
    fn fresh_bound_does_not_prune() {
        let (mut p, order) = k4_state();
        let a = order.mask_of(&[0]);
        assert!(!p.prune(0, a, 0));
        assert_eq!(p.bound(a), Some((1, order.mask_of(&[1]))));
    }

    #[test]
    fn tight_bound_prunes() {
        let (mut p, order) = k4_state();
        let a = order.mask_of(&[0]);
        // (b, {a}) with l = 1 already touches the outside terminal b
        assert!(!p.prune(1, a, 1));
        assert_eq!(p.bound(a).unwrap().0, 1);
        assert!(p.prune(2, a, 12));
        assert_eq!(p.hits, 1);
    }

    #[test]
    fn combined_bound() {
        let (mut p, order) = k4_state();
        let (a, d) = (order.mask_of(&[0]), order.mask_of(&[3]));
        p.prune(1, a, 1);
        p.prune(3, d, 0);
        assert_eq!(p.bound(d), Some((15, order.mask_of(&[1]))));
        assert!(!p.prune_combine(1, a, d, 16));
        assert_eq!(p.bound(a.union(d)), Some((16, order.mask_of(&[1]))));
        assert!(p.prune_combine(0, a, d, 17));
    }

    #[test]
    fn overlapping_witnesses_do_not_combine() {
        let (mut p, order) = k4_state();
        let (a, b) = (order.mask_of(&[0]), order.mask_of(&[1]));
        // S({a}) = {b} and S({b}) = {a}
        p.prune(0, a, 0);
        p.prune(1, b, 0);
        assert_eq!(p.bound(a).unwrap().1, b);
        assert_eq!(p.bound(b).unwrap().1, a);
        p.prune_combine(0, a, b, 100);
        // only the plain rule applies: 100 + d(b, c)
        assert_eq!(p.bound(a.union(b)).unwrap().0, 111);
    }
}
