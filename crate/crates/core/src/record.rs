//! Fixed-width tuples and branch-free conditional assignment.

use serde::{Deserialize, Serialize};

/// Key reserved for dummy records. Real keys must be strictly smaller.
pub const DUMMY_KEY: u64 = u64::MAX;

/// Branch-free conditional assignment.
///
/// `x.cmov(&y, cond)` sets `x` to `y` when `cond` holds and leaves it
/// untouched otherwise, executing the same instruction sequence either way.
pub trait Cmov: Copy {
    fn cmov(&mut self, other: &Self, cond: bool);
}

#[inline(always)]
fn mask(cond: bool) -> u64 {
    (cond as u64).wrapping_neg()
}

impl Cmov for u64 {
    #[inline(always)]
    fn cmov(&mut self, other: &Self, cond: bool) {
        let m = mask(cond);
        *self = (*self & !m) | (*other & m);
    }
}

impl Cmov for usize {
    #[inline(always)]
    fn cmov(&mut self, other: &Self, cond: bool) {
        let m = mask(cond) as usize;
        *self = (*self & !m) | (*other & m);
    }
}

impl Cmov for bool {
    #[inline(always)]
    fn cmov(&mut self, other: &Self, cond: bool) {
        let m = cond as u8;
        let v = ((*self as u8) & !m.wrapping_neg()) | ((*other as u8) & m.wrapping_neg());
        *self = v != 0;
    }
}

impl<A: Cmov, B: Cmov> Cmov for (A, B) {
    #[inline(always)]
    fn cmov(&mut self, other: &Self, cond: bool) {
        self.0.cmov(&other.0, cond);
        self.1.cmov(&other.1, cond);
    }
}

/// An element the oblivious primitives can pad with and route.
///
/// The scratch slot is owned by the primitives: they may overwrite it.
pub trait Element: Cmov {
    fn dummy() -> Self;
    fn is_dummy(&self) -> bool;
    fn scratch(&self) -> u64;
    fn set_scratch(&mut self, v: u64);
}

/// One tuple of a distributed table, with every working column the
/// operators need.
///
/// `a` and `c` are opaque payload ids for the left (`A`) and right (`C`)
/// sides of a join, `key` is the join/sort key `B`. All other columns are
/// scratch state for the operators and are zero when unused.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Record {
    pub a: u64,
    pub key: u64,
    pub c: u64,
    /// `false` means the right payload is ⊥ (no match in a left-outer PK join).
    pub has_c: bool,
    /// Value being transferred by a PK join from the right side to the left.
    pub carry: u64,
    pub has_carry: bool,
    /// Z: 0 for the representative of a local key run, otherwise a distinct
    /// positive rank.
    pub inactive_rank: u64,
    /// I of the PK join: 1-based origin server, 0 for right-side rows.
    pub origin: u64,
    /// I of the alignment phase: 1-based rank inside the key group.
    pub group_rank: u64,
    /// T: 1-based destination server, 0 means "not routed".
    pub target: u64,
    /// L: 1-based global position (expansion) or alignment key (join).
    pub position: u64,
    /// P: 1-based position inside the destination server.
    pub slot: u64,
    /// D: repetition count for expansion.
    pub count: u64,
    pub deg_r: u64,
    pub deg_s: u64,
    /// J: global position of the first row of the key group.
    pub group_start: u64,
    pub scratch: u64,
    pub dummy: bool,
}

impl Default for Record {
    fn default() -> Self {
        Record::dummy()
    }
}

impl Record {
    const ZERO: Record = Record {
        a: 0,
        key: 0,
        c: 0,
        has_c: false,
        carry: 0,
        has_carry: false,
        inactive_rank: 0,
        origin: 0,
        group_rank: 0,
        target: 0,
        position: 0,
        slot: 0,
        count: 0,
        deg_r: 0,
        deg_s: 0,
        group_start: 0,
        scratch: 0,
        dummy: false,
    };

    /// Left-side row `(a, key)`.
    pub fn left(a: u64, key: u64) -> Self {
        debug_assert!(key != DUMMY_KEY);
        Record { a, key, ..Self::ZERO }
    }

    /// Right-side row `(key, c)`.
    pub fn right(key: u64, c: u64) -> Self {
        debug_assert!(key != DUMMY_KEY);
        Record {
            key,
            c,
            has_c: true,
            ..Self::ZERO
        }
    }

    /// Row `(x, d)` for expansion.
    pub fn counted(a: u64, key: u64, count: u64) -> Self {
        Record {
            count,
            ..Record::left(a, key)
        }
    }

    pub fn dummy() -> Self {
        Record {
            key: DUMMY_KEY,
            dummy: true,
            ..Self::ZERO
        }
    }

    pub fn is_real(&self) -> bool {
        !self.dummy
    }

    /// Payload triple of a join output row, `None` for dummies.
    pub fn joined(&self) -> Option<(u64, u64, Option<u64>)> {
        (!self.dummy).then(|| (self.a, self.key, self.has_c.then_some(self.c)))
    }
}

impl Cmov for Record {
    #[inline]
    fn cmov(&mut self, o: &Self, cond: bool) {
        self.a.cmov(&o.a, cond);
        self.key.cmov(&o.key, cond);
        self.c.cmov(&o.c, cond);
        self.has_c.cmov(&o.has_c, cond);
        self.carry.cmov(&o.carry, cond);
        self.has_carry.cmov(&o.has_carry, cond);
        self.inactive_rank.cmov(&o.inactive_rank, cond);
        self.origin.cmov(&o.origin, cond);
        self.group_rank.cmov(&o.group_rank, cond);
        self.target.cmov(&o.target, cond);
        self.position.cmov(&o.position, cond);
        self.slot.cmov(&o.slot, cond);
        self.count.cmov(&o.count, cond);
        self.deg_r.cmov(&o.deg_r, cond);
        self.deg_s.cmov(&o.deg_s, cond);
        self.group_start.cmov(&o.group_start, cond);
        self.scratch.cmov(&o.scratch, cond);
        self.dummy.cmov(&o.dummy, cond);
    }
}

impl Element for Record {
    fn dummy() -> Self {
        Record::dummy()
    }
    fn is_dummy(&self) -> bool {
        self.dummy
    }
    fn scratch(&self) -> u64 {
        self.scratch
    }
    fn set_scratch(&mut self, v: u64) {
        self.scratch = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cmov_scalars() {
        let mut x = 5u64;
        x.cmov(&9, true);
        assert_eq!(x, 9);
        let mut x = 5u64;
        x.cmov(&9, false);
        assert_eq!(x, 5);
        let mut b = false;
        b.cmov(&true, true);
        assert!(b);
        b.cmov(&false, false);
        assert!(b);
    }

    #[test]
    fn cmov_record_replaces_every_field() {
        let mut d = Record::dummy();
        let mut r = Record::right(7, 11);
        r.deg_r = 3;
        r.group_start = 99;
        d.cmov(&r, true);
        assert_eq!(d, r);
        let mut e = Record::dummy();
        e.cmov(&r, false);
        assert_eq!(e, Record::dummy());
    }
}
