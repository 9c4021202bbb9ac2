//! Oblivious partitioning into padded buckets.
//!
//! Both variants turn a buffer whose elements carry a target bucket in
//! `[1, p]` into `Σ caps` slots where bucket `j` occupies
//! `caps[0] + … + caps[j-1] ..` and holds exactly its real elements plus
//! dummies. They differ only in cost: the sort-based one is
//! `O(n log² n)`, the quicksort-style one `O(n log n log p)`.

use super::compact::ocompact_range;
use super::distribute::odistribute;
use super::sort::osort;
use super::trace::Slots;
use super::counters;
use crate::error::{Error, Result};
use crate::record::{Cmov, Element};

const NONE: u64 = u64::MAX;

fn overflow() -> Error {
    Error::PaddingOverflow {
        server: 0,
        stage: "partition".into(),
    }
}

/// Writes each element's bucket index (0-based) into its scratch slot,
/// turning real elements with target 0 into dummies. Returns whether a real
/// target exceeded `p`.
fn tag<T, S, F>(buf: &mut S, target: &F, p: usize, dummy_tag: u64) -> bool
where
    T: Element,
    S: Slots<T> + ?Sized,
    F: Fn(&T) -> usize,
{
    let mut bad = false;
    for i in 0..buf.len() {
        let mut x = buf.read(i);
        let t = target(&x) as u64;
        let routed = !x.is_dummy() & (t != 0) & (t <= p as u64);
        bad |= !x.is_dummy() & (t > p as u64);
        let mut key = dummy_tag;
        key.cmov(&t.wrapping_sub(1), routed);
        x.cmov(&T::dummy(), !routed);
        x.set_scratch(key);
        counters::cmove();
        buf.write(i, x);
    }
    bad
}

/// Branch-free lookup of `table[idx]` touching every entry.
fn select(table: &[u64], idx: u64) -> u64 {
    let mut out = 0u64;
    for (k, v) in table.iter().enumerate() {
        out.cmov(v, k as u64 == idx);
    }
    out
}

/// Sort-based partition: osort by bucket, rank inside each bucket by a
/// linear scan, then odistribute to `offset[bucket] + rank`.
pub fn opartition_sort<T, S, F>(buf: &mut S, target: F, caps: &[usize]) -> Result<()>
where
    T: Element,
    S: Slots<T> + ?Sized,
    F: Fn(&T) -> usize,
{
    let p = caps.len();
    let total: usize = caps.iter().sum();
    let bad = tag(buf, &target, p, NONE);
    osort(buf, |x: &T| x.scratch());

    let caps64: Vec<u64> = caps.iter().map(|&c| c as u64).collect();
    let mut offsets = Vec::with_capacity(p);
    let mut acc = 0u64;
    for &c in &caps64 {
        offsets.push(acc);
        acc += c;
    }

    let mut over = false;
    let mut prev = NONE;
    let mut rank = 0u64;
    for i in 0..buf.len() {
        let mut x = buf.read(i);
        let b = x.scratch();
        let real = b != NONE;
        let mut next = rank + 1;
        next.cmov(&1, b != prev);
        rank = next;
        prev = b;
        let cap = select(&caps64, b);
        let off = select(&offsets, b);
        let fits = rank <= cap;
        over |= real & !fits;
        let mut slot = 0u64;
        slot.cmov(&(off + rank), real & fits);
        counters::comparison();
        x.set_scratch(slot);
        buf.write(i, x);
    }
    odistribute(buf, |x: &T| x.scratch() as usize, total)?;
    if bad {
        return Err(Error::TargetOutOfRange { slots: p });
    }
    if over {
        return Err(overflow());
    }
    Ok(())
}

/// Quicksort-style partition: recursively split the bucket range at its
/// midpoint and move the left side's elements (topped up with dummies to
/// the left side's capacity) to the front with one compaction per level.
pub fn opartition_quick<T, S, F>(buf: &mut S, target: F, caps: &[usize]) -> Result<()>
where
    T: Element,
    S: Slots<T> + ?Sized,
    F: Fn(&T) -> usize,
{
    let p = caps.len();
    let total: usize = caps.iter().sum();
    let bad = tag(buf, &target, p, NONE);
    let mut over = false;

    let n = buf.len();
    if n > total {
        let mut marks = Vec::with_capacity(n);
        for i in 0..n {
            marks.push(buf.read(i).scratch() != NONE);
        }
        let reals = ocompact_range(buf, 0, &marks);
        over |= reals > total;
    }
    let mut filler = T::dummy();
    filler.set_scratch(NONE);
    buf.resize(total, filler);

    let mut offsets = Vec::with_capacity(p + 1);
    let mut acc = 0usize;
    offsets.push(0);
    for &c in caps {
        acc += c;
        offsets.push(acc);
    }
    if p > 0 {
        over |= split(buf, &offsets, 0, p);
    }
    if bad {
        return Err(Error::TargetOutOfRange { slots: p });
    }
    if over {
        return Err(overflow());
    }
    Ok(())
}

/// Arranges `buf[offsets[l]..offsets[r]]` into buckets `l..r`; returns the
/// overflow flag.
fn split<T, S>(buf: &mut S, offsets: &[usize], l: usize, r: usize) -> bool
where
    T: Element,
    S: Slots<T> + ?Sized,
{
    if r - l < 2 {
        return false;
    }
    let mid = l + (r - l) / 2;
    let lo = offsets[l];
    let n = offsets[r] - lo;
    let left_cap = (offsets[mid] - lo) as u64;

    let mut left_reals = 0u64;
    for i in 0..n {
        let b = buf.read(lo + i).scratch();
        left_reals += ((b != NONE) & (b < mid as u64)) as u64;
        counters::comparison();
    }
    let needed = left_cap.saturating_sub(left_reals);
    let mut taken = 0u64;
    let mut marks = Vec::with_capacity(n);
    for i in 0..n {
        let b = buf.read(lo + i).scratch();
        let dummy = b == NONE;
        let fill = dummy & (taken < needed);
        taken += fill as u64;
        marks.push((!dummy & (b < mid as u64)) | fill);
        counters::comparison();
    }
    let moved = ocompact_range(buf, lo, &marks) as u64;
    let over = moved != left_cap;
    let a = split(buf, offsets, l, mid);
    let b = split(buf, offsets, mid, r);
    over | a | b
}

/// Cuts a partitioned buffer into its buckets.
pub fn split_buckets<T>(buf: Vec<T>, caps: &[usize]) -> Vec<Vec<T>> {
    assert_eq!(buf.len(), caps.iter().sum::<usize>(), "buffer is not partitioned by caps");
    let mut out = Vec::with_capacity(caps.len());
    let mut it = buf.into_iter();
    for &c in caps {
        out.push(it.by_ref().take(c).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oprims::TracedBuffer;
    use crate::record::Record;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn item(a: u64, t: u64) -> Record {
        Record {
            target: t,
            ..Record::left(a, a)
        }
    }

    fn tgt(r: &Record) -> usize {
        r.target as usize
    }

    fn bucket_sets(buf: Vec<Record>, caps: &[usize]) -> Vec<Vec<u64>> {
        split_buckets(buf, caps)
            .into_iter()
            .map(|b| {
                let mut v: Vec<u64> = b.iter().filter(|r| r.is_real()).map(|r| r.a).collect();
                v.sort_unstable();
                v
            })
            .collect()
    }

    fn group_by(items: &[Record], p: usize) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new(); p];
        for r in items.iter().filter(|r| r.is_real() && r.target > 0) {
            out[r.target as usize - 1].push(r.a);
        }
        for v in &mut out {
            v.sort_unstable();
        }
        out
    }

    #[test]
    fn four_items_two_buckets() {
        let items = vec![item(1, 2), item(2, 1), item(3, 2), item(4, 1)];
        for quick in [false, true] {
            let mut v = items.clone();
            if quick {
                opartition_quick(&mut v, tgt, &[2, 2]).unwrap();
            } else {
                opartition_sort(&mut v, tgt, &[2, 2]).unwrap();
            }
            assert_eq!(bucket_sets(v, &[2, 2]), vec![vec![2, 4], vec![1, 3]]);
        }
    }

    #[test]
    fn degenerate_single_class() {
        let items: Vec<Record> = (0..5).map(|i| item(i, 1)).collect();
        for quick in [false, true] {
            let mut v = items.clone();
            let caps = [5, 5, 5];
            if quick {
                opartition_quick(&mut v, tgt, &caps).unwrap();
            } else {
                opartition_sort(&mut v, tgt, &caps).unwrap();
            }
            let b = split_buckets(v, &caps);
            assert!(b[0].iter().all(|r| r.is_real()));
            assert!(b[1].iter().chain(&b[2]).all(|r| r.is_dummy()));
        }
    }

    #[test]
    fn overflow_detected() {
        let items = vec![item(1, 1), item(2, 1), item(3, 1)];
        let mut v = items.clone();
        assert!(matches!(
            opartition_sort(&mut v, tgt, &[1, 1]),
            Err(Error::PaddingOverflow { .. })
        ));
        let mut v = items;
        assert!(matches!(
            opartition_quick(&mut v, tgt, &[1, 1]),
            Err(Error::PaddingOverflow { .. })
        ));
    }

    #[test]
    fn single_bucket_pads() {
        let mut v = vec![item(1, 1), item(2, 1)];
        opartition_quick(&mut v, tgt, &[4]).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(v.iter().filter(|r| r.is_real()).count(), 2);
    }

    #[test]
    fn quick_4096_p16_matches_group_by() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let p = 16;
        let items: Vec<Record> = (0..4096).map(|i| item(i, rng.random_range(1..=p as u64))).collect();
        let caps = vec![2 * 4096 / p; p];
        let mut v = items.clone();
        opartition_quick(&mut v, tgt, &caps).unwrap();
        assert_eq!(bucket_sets(v, &caps), group_by(&items, p));
    }

    #[test]
    fn traces_match_across_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = 4;
        let caps = vec![8; p];
        let a: Vec<Record> = (0..20).map(|i| item(i, rng.random_range(0..=p as u64))).collect();
        let b: Vec<Record> = (0..20).map(|i| item(i, 1 + (i % 4))).collect();
        let (mut ta, mut tb) = (TracedBuffer::new(a.clone()), TracedBuffer::new(b.clone()));
        opartition_quick(&mut ta, tgt, &caps).unwrap();
        opartition_quick(&mut tb, tgt, &caps).unwrap();
        assert_eq!(ta.trace(), tb.trace());
        let (mut ta, mut tb) = (TracedBuffer::new(a), TracedBuffer::new(b));
        opartition_sort(&mut ta, tgt, &caps).unwrap();
        opartition_sort(&mut tb, tgt, &caps).unwrap();
        assert_eq!(ta.trace(), tb.trace());
    }

    proptest! {
        #[test]
        fn quick_equals_sort(
            p in 1usize..9,
            targets in proptest::collection::vec(0u64..9, 0..80),
            slack in 0usize..4,
        ) {
            let items: Vec<Record> = targets
                .iter()
                .enumerate()
                .map(|(i, &t)| item(i as u64, t.min(p as u64)))
                .collect();
            let oracle = group_by(&items, p);
            let caps: Vec<usize> = oracle.iter().map(|b| b.len() + slack).collect();
            let mut a = items.clone();
            let mut b = items;
            opartition_sort(&mut a, tgt, &caps).unwrap();
            opartition_quick(&mut b, tgt, &caps).unwrap();
            prop_assert_eq!(bucket_sets(a, &caps), oracle.clone());
            prop_assert_eq!(bucket_sets(b, &caps), oracle);
        }
    }
}
