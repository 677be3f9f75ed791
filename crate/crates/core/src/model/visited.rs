//! Open-addressing sets of packed lattice sites.
//!
//! A site is packed into an integer with one 16-bit field per coordinate, each
//! field holding `coord + 0x8000`. Moving one step is a single wrapping add of a
//! precomputed delta, the first coordinate is read off the low field, and no
//! packed site is ever zero, which frees zero to mark empty slots.

pub(crate) const FIELD_BITS: u32 = 16;
pub(crate) const BIAS: i64 = 1 << (FIELD_BITS - 1);
/// Walks longer than this may leave the representable coordinate range.
pub(crate) const MAX_PACKED_STEPS: usize = (BIAS - 1) as usize;

pub(crate) trait SiteKey: Copy + Eq + Default {
    const FIELDS: usize;
    fn mix(self) -> u64;
    fn wrapping_add(self, other: Self) -> Self;
    fn low_field(self) -> i64;
    fn unit(axis: usize) -> Self;
    fn packed_origin(d: usize) -> Self;
    fn negate(self) -> Self;
}

impl SiteKey for u64 {
    const FIELDS: usize = 4;

    #[inline(always)]
    fn mix(self) -> u64 {
        let x = self.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        x ^ (x >> 32)
    }

    #[inline(always)]
    fn wrapping_add(self, other: Self) -> Self {
        u64::wrapping_add(self, other)
    }

    #[inline(always)]
    fn low_field(self) -> i64 {
        (self & 0xffff) as i64
    }

    fn unit(axis: usize) -> Self {
        1u64 << (FIELD_BITS as usize * axis)
    }

    fn packed_origin(d: usize) -> Self {
        (0..d).map(|a| (BIAS as u64) << (FIELD_BITS as usize * a)).sum()
    }

    fn negate(self) -> Self {
        self.wrapping_neg()
    }
}

impl SiteKey for u128 {
    const FIELDS: usize = 8;

    #[inline(always)]
    fn mix(self) -> u64 {
        let folded = (self as u64) ^ ((self >> 64) as u64).rotate_left(23);
        folded.mix()
    }

    #[inline(always)]
    fn wrapping_add(self, other: Self) -> Self {
        u128::wrapping_add(self, other)
    }

    #[inline(always)]
    fn low_field(self) -> i64 {
        (self & 0xffff) as i64
    }

    fn unit(axis: usize) -> Self {
        1u128 << (FIELD_BITS as usize * axis)
    }

    fn packed_origin(d: usize) -> Self {
        (0..d).map(|a| (BIAS as u128) << (FIELD_BITS as usize * a)).sum()
    }

    fn negate(self) -> Self {
        self.wrapping_neg()
    }
}

/// Linear-probing hash set of nonzero packed sites, kept at most half full.
#[derive(Debug, Clone)]
pub(crate) struct PackedSet<K> {
    slots: Vec<K>,
    mask: usize,
    len: usize,
}

impl<K: SiteKey> PackedSet<K> {
    pub(crate) fn with_capacity(expected: usize) -> Self {
        let cap = (2 * expected.max(8)).next_power_of_two();
        PackedSet { slots: vec![K::default(); cap], mask: cap - 1, len: 0 }
    }

    #[cfg(test)]
    pub(crate) fn len(&self) -> usize {
        self.len
    }

    pub(crate) fn clear(&mut self) {
        if self.len > 0 {
            self.slots.fill(K::default());
            self.len = 0;
        }
    }

    /// Inserts `key`; returns `true` when it was not yet present.
    #[inline]
    pub(crate) fn insert(&mut self, key: K) -> bool {
        debug_assert!(key != K::default(), "zero is the empty-slot marker");
        let mut idx = key.mix() as usize & self.mask;
        loop {
            let slot = self.slots[idx];
            if slot == key {
                return false;
            }
            if slot == K::default() {
                self.slots[idx] = key;
                self.len += 1;
                if 2 * self.len > self.slots.len() {
                    self.grow();
                }
                return true;
            }
            idx = (idx + 1) & self.mask;
        }
    }

    #[cfg(test)]
    pub(crate) fn contains(&self, key: K) -> bool {
        let mut idx = key.mix() as usize & self.mask;
        loop {
            let slot = self.slots[idx];
            if slot == key {
                return true;
            }
            if slot == K::default() {
                return false;
            }
            idx = (idx + 1) & self.mask;
        }
    }

    fn grow(&mut self) {
        let old = std::mem::replace(&mut self.slots, vec![K::default(); 2 * (self.mask + 1)]);
        self.mask = self.slots.len() - 1;
        self.len = 0;
        for key in old.into_iter().filter(|k| *k != K::default()) {
            self.insert(key);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    #[test]
    fn origin_and_units() {
        let o = u64::packed_origin(2);
        assert_eq!(o, 0x8000_8000);
        assert_eq!(o.wrapping_add(u64::unit(0)).low_field() - BIAS, 1);
        assert_eq!(o.wrapping_add(u64::unit(0).negate()).low_field() - BIAS, -1);
        assert_eq!(u128::packed_origin(8).low_field(), BIAS);
    }

    proptest! {
        #[test]
        fn agrees_with_std_hashset(keys in proptest::collection::vec(1u64..500, 0..400)) {
            let mut fast = PackedSet::<u64>::with_capacity(4);
            let mut reference = HashSet::new();
            for k in keys {
                prop_assert_eq!(fast.insert(k), reference.insert(k));
            }
            prop_assert_eq!(fast.len(), reference.len());
            for k in 1u64..500 {
                prop_assert_eq!(fast.contains(k), reference.contains(&k));
            }
            fast.clear();
            prop_assert_eq!(fast.len(), 0);
            prop_assert!(!fast.contains(1));
        }
    }
}
