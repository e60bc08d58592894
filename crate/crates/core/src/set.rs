//! Ground sets, subsets as bit-vectors, and normalized families of subsets.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_GROUND: usize = 16;

/// The finite ground set `{0, .., size - 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroundSet {
    size: u8,
}

impl GroundSet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Format("ground set must have at least one element".into()));
        }
        if size > MAX_GROUND {
            return Err(Error::BudgetExceeded(format!(
                "ground set of size {size} exceeds the limit of {MAX_GROUND}"
            )));
        }
        Ok(GroundSet { size: size as u8 })
    }

    pub fn size(self) -> usize {
        self.size as usize
    }

    pub fn full(self) -> Subset {
        Subset(((1u32 << self.size) - 1) as u16)
    }

    pub fn complement(self, s: Subset) -> Subset {
        Subset(!s.0 & self.full().0)
    }

    pub fn contains_subset(self, s: Subset) -> bool {
        s.0 & !self.full().0 == 0
    }

    /// All subsets in increasing numeric encoding, starting with the empty set.
    pub fn subsets(self) -> impl Iterator<Item = Subset> + Clone {
        (0..(1u32 << self.size)).map(|b| Subset(b as u16))
    }

    pub fn points(self) -> impl Iterator<Item = usize> + Clone {
        0..self.size()
    }

    /// Number of subsets, `2^n`.
    pub fn subset_count(self) -> usize {
        1 << self.size
    }
}

/// A subset of the ground set, bit `i` set iff element `i` is a member.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(u16);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_bits(bits: u16) -> Self {
        Subset(bits)
    }

    pub const fn bits(self) -> u16 {
        self.0
    }

    pub fn singleton(x: usize) -> Self {
        debug_assert!(x < MAX_GROUND);
        Subset(1 << x)
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Self {
        elements.into_iter().fold(Subset::EMPTY, |acc, x| acc.union(Subset::singleton(x)))
    }

    pub fn contains(self, x: usize) -> bool {
        x < MAX_GROUND && self.0 & (1 << x) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn meets(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    /// Smallest element, if any.
    pub fn min(self) -> Option<usize> {
        (!self.is_empty()).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn elements(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..MAX_GROUND).filter(move |&i| bits & (1 << i) != 0)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elements()).finish()
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.elements().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// A finite set of subsets. Members are kept sorted by numeric encoding and
/// deduplicated, so structural equality is set equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SetFamily(Vec<Subset>);

impl SetFamily {
    pub fn empty() -> Self {
        SetFamily(Vec::new())
    }

    pub fn new<I: IntoIterator<Item = Subset>>(members: I) -> Self {
        let mut v: Vec<Subset> = members.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        SetFamily(v)
    }

    /// Convenience constructor from element lists, e.g. `[[0, 1], [1, 2]]`.
    pub fn from_lists<I, J>(lists: I) -> Self
    where
        I: IntoIterator<Item = J>,
        J: IntoIterator<Item = usize>,
    {
        SetFamily::new(lists.into_iter().map(Subset::from_elements))
    }

    /// The family whose members are the subsets `s` with bit `s` of `mask` set.
    /// Only meaningful for ground sets with at most 6 elements.
    pub fn from_mask(mask: u64) -> Self {
        SetFamily((0..64u32).filter(|&s| mask & (1 << s) != 0).map(|s| Subset(s as u16)).collect())
    }

    /// Inverse of [`SetFamily::from_mask`]; `None` if a member is too large.
    pub fn to_mask(&self) -> Option<u64> {
        self.0.iter().try_fold(0u64, |acc, s| (s.0 < 64).then(|| acc | (1 << s.0)))
    }

    pub fn members(&self) -> &[Subset] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.0.binary_search(&s).is_ok()
    }

    pub fn index_of(&self, s: Subset) -> Option<usize> {
        self.0.binary_search(&s).ok()
    }

    pub fn union_all(&self) -> Subset {
        self.0.iter().fold(Subset::EMPTY, |acc, &s| acc.union(s))
    }

    pub fn is_subfamily_of(&self, other: &SetFamily) -> bool {
        self.0.iter().all(|&s| other.contains(s))
    }

    /// Set union of two families.
    pub fn merge(&self, other: &SetFamily) -> SetFamily {
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        SetFamily(out)
    }

    /// The members selected by `mask` (bit `i` picks the `i`-th member).
    pub fn subfamily(&self, mask: u32) -> SetFamily {
        SetFamily(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &s)| s)
                .collect(),
        )
    }

    /// `{X \ U : U in self}`.
    pub fn complement(&self, ground: GroundSet) -> SetFamily {
        SetFamily::new(self.0.iter().map(|&s| ground.complement(s)))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Subset> {
        self.0.iter()
    }

    /// Checks every member lives on `ground`.
    pub fn fits(&self, ground: GroundSet) -> bool {
        self.0.iter().all(|&s| ground.contains_subset(s))
    }

    pub fn to_lists(&self) -> Vec<Vec<usize>> {
        self.0.iter().map(|s| s.elements().collect()).collect()
    }
}

impl FromIterator<Subset> for SetFamily {
    fn from_iter<I: IntoIterator<Item = Subset>>(iter: I) -> Self {
        SetFamily::new(iter)
    }
}

impl<'a> IntoIterator for &'a SetFamily {
    type Item = &'a Subset;
    type IntoIter = std::slice::Iter<'a, Subset>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// Every family over `ground`, in increasing mask order. Only for `n <= 4`.
pub fn all_families(ground: GroundSet) -> Result<impl Iterator<Item = SetFamily>> {
    if ground.size() > 4 {
        return Err(Error::BudgetExceeded(format!(
            "enumerating all families over {} elements is infeasible (limit 4)",
            ground.size()
        )));
    }
    let count = 1u64 << ground.subset_count();
    Ok((0..count).map(SetFamily::from_mask))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_set_bounds() {
        assert!(GroundSet::new(0).is_err());
        assert!(matches!(GroundSet::new(17), Err(Error::BudgetExceeded(_))));
        let g = GroundSet::new(16).unwrap();
        assert_eq!(g.full().len(), 16);
        assert_eq!(g.complement(Subset::EMPTY), g.full());
    }

    #[test]
    fn family_normalizes() {
        let f = SetFamily::from_lists([vec![1, 2], vec![0, 1], vec![2, 1]]);
        assert_eq!(f.len(), 2);
        assert_eq!(f.to_lists(), vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(SetFamily::new(f.iter().copied()), f);
    }

    #[test]
    fn mask_round_trip() {
        for mask in 0..256u64 {
            let f = SetFamily::from_mask(mask);
            assert_eq!(f.to_mask(), Some(mask));
        }
        assert_eq!(all_families(GroundSet::new(2).unwrap()).unwrap().count(), 16);
        assert!(all_families(GroundSet::new(5).unwrap()).is_err());
    }

    #[test]
    fn merge_is_set_union() {
        let a = SetFamily::from_lists([vec![0], vec![2]]);
        let b = SetFamily::from_lists([vec![1], vec![2]]);
        assert_eq!(a.merge(&b), SetFamily::from_lists([vec![0], vec![1], vec![2]]));
        assert_eq!(a.merge(&SetFamily::empty()), a);
    }

    #[test]
    fn display() {
        let f = SetFamily::from_lists([vec![], vec![0, 2]]);
        assert_eq!(f.to_string(), "{{},{0,2}}");
    }
}
