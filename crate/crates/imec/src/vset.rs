//! Vertex sets as 64-bit masks.

use std::fmt;
use std::ops::{BitAnd, BitAndAssign, BitOr, BitOrAssign, Sub, SubAssign};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct VSet(pub u64);

impl VSet {
    pub const EMPTY: VSet = VSet(0);

    pub fn single(v: usize) -> VSet {
        VSet(1 << v)
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> VSet {
        if n >= 64 {
            VSet(u64::MAX)
        } else {
            VSet((1u64 << n) - 1)
        }
    }

    pub fn from_slice(vs: &[usize]) -> VSet {
        vs.iter().copied().collect()
    }

    pub fn contains(self, v: usize) -> bool {
        v < 64 && self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1 << v;
    }

    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1 << v);
    }

    pub fn with(self, v: usize) -> VSet {
        VSet(self.0 | 1 << v)
    }

    pub fn without(self, v: usize) -> VSet {
        VSet(self.0 & !(1 << v))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: VSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: VSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Every subset of `self`, in increasing mask order (starting with the empty set).
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            cur: 0,
            done: false,
        }
    }
}

pub struct Iter(u64);

impl Iterator for Iter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }
}

pub struct Subsets {
    mask: u64,
    cur: u64,
    done: bool,
}

impl Iterator for Subsets {
    type Item = VSet;
    fn next(&mut self) -> Option<VSet> {
        if self.done {
            return None;
        }
        let out = VSet(self.cur);
        if self.cur == self.mask {
            self.done = true;
        } else {
            self.cur = (self.cur.wrapping_sub(self.mask)) & self.mask;
        }
        Some(out)
    }
}

impl FromIterator<usize> for VSet {
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> VSet {
        let mut s = VSet::EMPTY;
        for v in it {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for VSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl BitOr for VSet {
    type Output = VSet;
    fn bitor(self, o: VSet) -> VSet {
        VSet(self.0 | o.0)
    }
}
impl BitAnd for VSet {
    type Output = VSet;
    fn bitand(self, o: VSet) -> VSet {
        VSet(self.0 & o.0)
    }
}
impl Sub for VSet {
    type Output = VSet;
    fn sub(self, o: VSet) -> VSet {
        VSet(self.0 & !o.0)
    }
}
impl BitOrAssign for VSet {
    fn bitor_assign(&mut self, o: VSet) {
        self.0 |= o.0;
    }
}
impl BitAndAssign for VSet {
    fn bitand_assign(&mut self, o: VSet) {
        self.0 &= o.0;
    }
}
impl SubAssign for VSet {
    fn sub_assign(&mut self, o: VSet) {
        self.0 &= !o.0;
    }
}
