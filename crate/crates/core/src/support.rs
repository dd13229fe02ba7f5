//! Fixed-width state sets.

use std::fmt;

use fixedbitset::FixedBitSet;

/// A subset of the states of a model, stored as an `n`-wide bit vector.
///
/// Every set built for a given model has the same width, so equality and
/// hashing are plain set comparisons.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SupportSet {
    bits: FixedBitSet,
}

impl SupportSet {
    pub fn empty(width: usize) -> Self {
        Self {
            bits: FixedBitSet::with_capacity(width),
        }
    }

    pub fn full(width: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(width);
        bits.insert_range(..);
        Self { bits }
    }

    pub fn singleton(width: usize, state: usize) -> Self {
        let mut set = Self::empty(width);
        set.insert(state);
        set
    }

    pub fn from_states<I: IntoIterator<Item = usize>>(width: usize, states: I) -> Self {
        let mut set = Self::empty(width);
        for q in states {
            set.insert(q);
        }
        set
    }

    /// Builds the set whose members are the set bits of `mask` (bit `i` is state `i`).
    pub fn from_mask(width: usize, mask: u64) -> Self {
        Self::from_states(width, (0..width.min(64)).filter(|i| mask >> i & 1 == 1))
    }

    pub fn width(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, state: usize) {
        self.bits.insert(state);
    }

    pub fn remove(&mut self, state: usize) {
        self.bits.set(state, false);
    }

    pub fn contains(&self, state: usize) -> bool {
        self.bits.contains(state)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_subset(&self, other: &SupportSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn intersects(&self, other: &SupportSet) -> bool {
        !self.bits.is_disjoint(&other.bits)
    }

    pub fn union(&self, other: &SupportSet) -> SupportSet {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        Self { bits }
    }

    pub fn intersection(&self, other: &SupportSet) -> SupportSet {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        Self { bits }
    }

    pub fn difference(&self, other: &SupportSet) -> SupportSet {
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        Self { bits }
    }

    pub fn complement(&self) -> SupportSet {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        Self { bits }
    }

    pub fn union_with(&mut self, other: &SupportSet) {
        self.bits.union_with(&other.bits);
    }

    /// Members in ascending state order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `self`, largest cardinality first; ties in ascending
    /// order of their member bit masks. Only meant for small sets.
    pub fn subsets_by_decreasing_size(&self) -> Vec<SupportSet> {
        let members = self.to_vec();
        assert!(
            members.len() < 64,
            "subset enumeration over {} states",
            members.len()
        );
        let mut masks: Vec<u64> = (0..1u64 << members.len()).collect();
        masks.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
        masks
            .into_iter()
            .map(|mask| {
                SupportSet::from_states(
                    self.width(),
                    members
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, q)| *q),
                )
            })
            .collect()
    }
}

impl fmt::Debug for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = SupportSet::from_states(5, [0, 2, 4]);
        let b = SupportSet::from_states(5, [2, 3]);
        assert_eq!(a.union(&b).to_vec(), vec![0, 2, 3, 4]);
        assert_eq!(a.intersection(&b).to_vec(), vec![2]);
        assert_eq!(a.difference(&b).to_vec(), vec![0, 4]);
        assert_eq!(a.complement().to_vec(), vec![1, 3]);
        assert!(SupportSet::from_states(5, [2]).is_subset(&b));
        assert!(a.intersects(&b));
        assert!(!SupportSet::empty(5).intersects(&a));
        assert_eq!(SupportSet::full(3).len(), 3);
    }

    #[test]
    fn subsets_ordered_by_cardinality() {
        let s = SupportSet::from_states(4, [1, 3]);
        let subs: Vec<Vec<usize>> = s
            .subsets_by_decreasing_size()
            .iter()
            .map(|x| x.to_vec())
            .collect();
        assert_eq!(subs, vec![vec![1, 3], vec![1], vec![3], vec![]]);
    }
}
