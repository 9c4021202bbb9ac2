//! Order-preserving tight compaction in O(n log n) swaps.
//!
//! Offline recursive construction: a power-of-two block is compacted with a
//! cyclic offset by compacting both halves with derived offsets and then
//! merging them with one layer of conditional swaps. Arbitrary lengths split
//! into a short prefix and a power-of-two suffix.

use super::cswap;
use super::trace::Slots;
use crate::record::Cmov;

/// Moves every element whose mark is set in front of every unmarked one,
/// keeping the relative order of the marked elements. Returns the number
/// of marked elements.
pub fn ocompact<T, S>(buf: &mut S, marks: &[bool]) -> usize
where
    T: Cmov,
    S: Slots<T> + ?Sized,
{
    ocompact_range(buf, 0, marks)
}

/// Compacts `buf[lo..lo + marks.len()]`.
pub fn ocompact_range<T, S>(buf: &mut S, lo: usize, marks: &[bool]) -> usize
where
    T: Cmov,
    S: Slots<T> + ?Sized,
{
    assert!(lo + marks.len() <= buf.len(), "marks exceed buffer");
    let mut prefix = Vec::with_capacity(marks.len() + 1);
    prefix.push(0usize);
    let mut acc = 0usize;
    for &m in marks {
        acc += m as usize;
        prefix.push(acc);
    }
    let ctx = Ctx { prefix: &prefix, base: lo };
    ctx.compact(buf, 0, marks.len());
    acc
}

struct Ctx<'a> {
    prefix: &'a [usize],
    base: usize,
}

impl Ctx<'_> {
    fn count(&self, from: usize, to: usize) -> usize {
        self.prefix[to] - self.prefix[from]
    }

    fn compact<T: Cmov, S: Slots<T> + ?Sized>(&self, buf: &mut S, lo: usize, n: usize) {
        if n < 2 {
            return;
        }
        let n1 = 1usize << (usize::BITS - 1 - n.leading_zeros());
        let n2 = n - n1;
        let m = self.count(lo, lo + n2);
        self.compact(buf, lo, n2);
        self.compact_offset(buf, lo + n2, n1, (n1 - n2 + m) % n1);
        for i in 0..n2 {
            let a = self.base + lo + i;
            cswap(buf, a, a + n1, i >= m);
        }
    }

    /// Compacts the power-of-two block `[lo, lo + n)` so that the marked
    /// elements occupy the cyclic window starting at `z`.
    fn compact_offset<T: Cmov, S: Slots<T> + ?Sized>(
        &self,
        buf: &mut S,
        lo: usize,
        n: usize,
        z: usize,
    ) {
        if n < 2 {
            return;
        }
        if n == 2 {
            let left = self.count(lo, lo + 1) == 1;
            let right = self.count(lo + 1, lo + 2) == 1;
            let a = self.base + lo;
            cswap(buf, a, a + 1, (!left && right) != (z == 1));
            return;
        }
        let half = n / 2;
        let m = self.count(lo, lo + half);
        let zl = z % half;
        let zr = (z + m) % half;
        self.compact_offset(buf, lo, half, zl);
        self.compact_offset(buf, lo + half, half, zr);
        let s = (zl + m >= half) != (z >= half);
        for i in 0..half {
            let a = self.base + lo + i;
            cswap(buf, a, a + half, s != (i >= zr));
        }
    }
}
