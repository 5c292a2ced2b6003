use std::fmt;

use crate::graph::{Instance, VertexId};

use super::SolveError;

/// Bit set over the non-root terminals (bits 0..127). Bit 127 is reserved
/// for the root, which only appears in heuristic queries and prune witnesses.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TerminalMask(u128);

impl TerminalMask {
    pub const CAPACITY: usize = 127;
    pub const ROOT_BIT: usize = 127;
    pub const EMPTY: TerminalMask = TerminalMask(0);

    pub fn single(bit: usize) -> Self {
        TerminalMask(1u128 << bit)
    }

    pub fn root() -> Self {
        Self::single(Self::ROOT_BIT)
    }

    /// Mask with bits `0..n` set.
    pub fn full(n: usize) -> Self {
        if n >= 128 {
            TerminalMask(u128::MAX)
        } else {
            TerminalMask((1u128 << n) - 1)
        }
    }

    pub fn from_bits(bits: u128) -> Self {
        TerminalMask(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(self, bit: usize) -> bool {
        self.0 >> bit & 1 == 1
    }

    pub fn union(self, other: Self) -> Self {
        TerminalMask(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        TerminalMask(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        TerminalMask(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn with(self, bit: usize) -> Self {
        TerminalMask(self.0 | 1u128 << bit)
    }

    pub fn without(self, bit: usize) -> Self {
        TerminalMask(self.0 & !(1u128 << bit))
    }

    /// Set bits in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let bit = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(bit)
        })
    }

    /// Non-empty strict subsets, in decreasing numeric order.
    pub fn proper_subsets(self) -> impl Iterator<Item = TerminalMask> {
        let full = self.0;
        let mut cur = full;
        std::iter::from_fn(move || {
            cur = cur.wrapping_sub(1) & full;
            if cur == 0 {
                None
            } else {
                Some(TerminalMask(cur))
            }
        })
    }
}

impl fmt::Debug for TerminalMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Frozen ordering of the terminals around a fixed root: bit `i` of a
/// [`TerminalMask`] is `others()[i]`.
#[derive(Debug, Clone)]
pub struct TerminalOrder {
    root: VertexId,
    others: Vec<VertexId>,
    bit_of: Vec<Option<usize>>,
}

impl TerminalOrder {
    pub fn new(instance: &Instance, root: VertexId) -> Result<Self, SolveError> {
        Self::with_capacity(instance, root, TerminalMask::CAPACITY)
    }

    pub fn with_capacity(instance: &Instance, root: VertexId, cap: usize) -> Result<Self, SolveError> {
        if root >= instance.network().vertex_count() || !instance.is_terminal(root) {
            return Err(SolveError::RootNotTerminal(root));
        }
        let others: Vec<VertexId> = instance.terminals().iter().copied().filter(|&t| t != root).collect();
        if others.len() > cap {
            return Err(SolveError::TooManyTerminals {
                count: others.len(),
                cap,
            });
        }
        let mut bit_of = vec![None; instance.network().vertex_count()];
        for (i, &t) in others.iter().enumerate() {
            bit_of[t] = Some(i);
        }
        Ok(TerminalOrder { root, others, bit_of })
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn others(&self) -> &[VertexId] {
        &self.others
    }

    pub fn bit_of(&self, v: VertexId) -> Option<usize> {
        self.bit_of[v]
    }

    /// All non-root terminals.
    pub fn full(&self) -> TerminalMask {
        TerminalMask::full(self.others.len())
    }

    pub fn terminal(&self, bit: usize) -> VertexId {
        if bit == TerminalMask::ROOT_BIT {
            self.root
        } else {
            self.others[bit]
        }
    }

    /// Vertices named by `mask`, root included when its bit is set.
    pub fn vertices(&self, mask: TerminalMask) -> impl Iterator<Item = VertexId> + '_ {
        mask.iter().map(move |b| self.terminal(b))
    }

    pub fn mask_of(&self, vertices: &[VertexId]) -> TerminalMask {
        let mut m = TerminalMask::EMPTY;
        for &v in vertices {
            if v == self.root {
                m = m.union(TerminalMask::root());
            } else if let Some(b) = self.bit_of[v] {
                m = m.with(b);
            }
        }
        m
    }

    /// `R \ I` for a search mask `I`: the remaining terminals plus the root.
    pub fn complement_with_root(&self, mask: TerminalMask) -> TerminalMask {
        self.full().difference(mask).union(TerminalMask::root())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn to_set(m: TerminalMask) -> BTreeSet<usize> {
        m.iter().collect()
    }

    #[test]
    fn subsets_of_three() {
        let m = TerminalMask::from_bits(0b1011);
        let subs: Vec<u128> = m.proper_subsets().map(|s| s.bits()).collect();
        assert_eq!(subs, vec![0b1010, 0b1001, 0b1000, 0b0011, 0b0010, 0b0001]);
        assert_eq!(TerminalMask::single(4).proper_subsets().count(), 0);
    }

    #[test]
    fn root_bit_is_separate() {
        let m = TerminalMask::full(127);
        assert!(!m.contains(TerminalMask::ROOT_BIT));
        assert_eq!(m.union(TerminalMask::root()).len(), 128);
    }

    proptest! {
        #[test]
        fn mask_ops_match_sets(a in any::<u128>(), b in any::<u128>()) {
            let (ma, mb) = (TerminalMask::from_bits(a), TerminalMask::from_bits(b));
            let (sa, sb) = (to_set(ma), to_set(mb));
            prop_assert_eq!(to_set(ma.union(mb)), sa.union(&sb).copied().collect::<BTreeSet<_>>());
            prop_assert_eq!(to_set(ma.difference(mb)), sa.difference(&sb).copied().collect::<BTreeSet<_>>());
            prop_assert_eq!(ma.is_subset_of(mb), sa.is_subset(&sb));
            prop_assert_eq!(ma.is_disjoint(mb), sa.is_disjoint(&sb));
            prop_assert_eq!(ma.len() as usize, sa.len());
        }
    }
}
