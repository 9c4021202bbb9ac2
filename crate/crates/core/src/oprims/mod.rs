//! Standalone data-oblivious primitives.
//!
//! Every primitive here touches memory only through [`Slots`], and the
//! sequence of touched indices is a function of the buffer length and the
//! public parameters alone. Running a primitive over a [`TracedBuffer`]
//! records that sequence so it can be compared across inputs.

pub mod counters;
mod compact;
mod distribute;
mod partition;
mod scan;
mod sort;
mod trace;

pub use compact::{ocompact, ocompact_range};
pub use distribute::odistribute;
pub use partition::{opartition_quick, opartition_sort, split_buckets};
pub use scan::{scan_local, Direction, FillFirst, KeyValue, Keyed, Max, Min, ScanOperator, Sum};
pub use sort::{osort, osort_range};
pub use trace::{Access, AccessKind, Slots, TracedBuffer};

use crate::record::Cmov;

/// `dest <- src` if `cond`, else unchanged; same instruction stream either way.
#[inline]
pub fn cmove<T: Cmov>(cond: bool, dest: &mut T, src: &T) {
    counters::cmove();
    dest.cmov(src, cond);
}

/// Reads `i` and `j`, then writes both back, exchanged when `cond` holds.
#[inline]
pub(crate) fn cswap<T: Cmov, S: Slots<T> + ?Sized>(buf: &mut S, i: usize, j: usize, cond: bool) {
    let x = buf.read(i);
    let y = buf.read(j);
    let mut lo = x;
    let mut hi = y;
    lo.cmov(&y, cond);
    hi.cmov(&x, cond);
    counters::cmove();
    buf.write(i, lo);
    buf.write(j, hi);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::Record;

    #[test]
    fn cmove_definition() {
        let mut x = 5u64;
        cmove(true, &mut x, &9);
        assert_eq!(x, 9);
        let mut x = 5u64;
        cmove(false, &mut x, &9);
        assert_eq!(x, 5);
        let r = Record::left(3, 4);
        let mut d = Record::dummy();
        cmove(true, &mut d, &r);
        assert_eq!(d, r);
    }

    #[test]
    fn cswap_trace_independent_of_condition() {
        let mut a = TracedBuffer::new(vec![1u64, 2, 3]);
        let mut b = TracedBuffer::new(vec![1u64, 2, 3]);
        cswap(&mut a, 0, 2, true);
        cswap(&mut b, 0, 2, false);
        assert_eq!(a.trace(), b.trace());
        assert_eq!(a.as_slice(), &[3, 2, 1]);
        assert_eq!(b.as_slice(), &[1, 2, 3]);
    }
}
