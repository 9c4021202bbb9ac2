//! Sequential scans under an associative operator.

use super::trace::Slots;
use super::counters;
use crate::record::{Cmov, Element};
use serde::{Deserialize, Serialize};
use std::marker::PhantomData;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Prefix,
    Suffix,
}

/// An associative operator with an identity element.
pub trait ScanOperator {
    type Value: Cmov;
    fn identity(&self) -> Self::Value;
    fn combine(&self, left: &Self::Value, right: &Self::Value) -> Self::Value;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Sum;

impl ScanOperator for Sum {
    type Value = u64;
    fn identity(&self) -> u64 {
        0
    }
    fn combine(&self, l: &u64, r: &u64) -> u64 {
        l.wrapping_add(*r)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Max;

impl ScanOperator for Max {
    type Value = u64;
    fn identity(&self) -> u64 {
        0
    }
    fn combine(&self, l: &u64, r: &u64) -> u64 {
        let mut out = *l;
        out.cmov(r, r > l);
        out
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Min;

impl ScanOperator for Min {
    type Value = u64;
    fn identity(&self) -> u64 {
        u64::MAX
    }
    fn combine(&self, l: &u64, r: &u64) -> u64 {
        let mut out = *l;
        out.cmov(r, r < l);
        out
    }
}

/// `l ⊕ r = r if l is a dummy else l`: a prefix scan carries the first
/// real element rightwards, a suffix scan carries the next real element
/// leftwards into every dummy.
pub struct FillFirst<T>(PhantomData<T>);

impl<T> FillFirst<T> {
    pub fn new() -> Self {
        FillFirst(PhantomData)
    }
}

impl<T> Default for FillFirst<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Element> ScanOperator for FillFirst<T> {
    type Value = T;
    fn identity(&self) -> T {
        T::dummy()
    }
    fn combine(&self, l: &T, r: &T) -> T {
        let mut out = *l;
        out.cmov(r, l.is_dummy());
        out
    }
}

/// Segment summary for scans whose running value resets when the key
/// changes.
///
/// `first`/`last` are the keys at the two ends of the segment, `uniform`
/// says whether the whole segment has a single key, and `value` aggregates
/// the run at the anchored end (the trailing run for prefix scans, the
/// leading run for suffix scans). `live = false` is the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyValue<V> {
    pub first: u64,
    pub last: u64,
    pub value: V,
    pub uniform: bool,
    pub live: bool,
}

impl<V: Copy> KeyValue<V> {
    pub fn new(key: u64, value: V) -> Self {
        KeyValue {
            first: key,
            last: key,
            value,
            uniform: true,
            live: true,
        }
    }
}

impl<V: Cmov> Cmov for KeyValue<V> {
    fn cmov(&mut self, o: &Self, cond: bool) {
        self.first.cmov(&o.first, cond);
        self.last.cmov(&o.last, cond);
        self.value.cmov(&o.value, cond);
        self.uniform.cmov(&o.uniform, cond);
        self.live.cmov(&o.live, cond);
    }
}

/// Lifts a value operator to [`KeyValue`] segments anchored at one end.
///
/// For sorted keys and a prefix anchor this is the familiar rule
/// `(k1,v1) ⊕ (k2,v2) = (k2, v1 ⊕ v2)` if `k1 = k2`, else `(k2, v2)`;
/// the suffix anchor is its mirror image.
#[derive(Clone, Copy, Debug)]
pub struct Keyed<O> {
    pub inner: O,
    pub anchor: Direction,
}

impl<O> Keyed<O> {
    pub fn prefix(inner: O) -> Self {
        Keyed {
            inner,
            anchor: Direction::Prefix,
        }
    }

    pub fn suffix(inner: O) -> Self {
        Keyed {
            inner,
            anchor: Direction::Suffix,
        }
    }
}

impl<O: ScanOperator> ScanOperator for Keyed<O> {
    type Value = KeyValue<O::Value>;

    fn identity(&self) -> Self::Value {
        KeyValue {
            first: 0,
            last: 0,
            value: self.inner.identity(),
            uniform: true,
            live: false,
        }
    }

    fn combine(&self, l: &Self::Value, r: &Self::Value) -> Self::Value {
        let joins = l.last == r.first;
        let merged = self.inner.combine(&l.value, &r.value);
        let mut value = merged;
        match self.anchor {
            Direction::Prefix => value.cmov(&r.value, !(r.uniform & joins)),
            Direction::Suffix => value.cmov(&l.value, !(l.uniform & joins)),
        }
        let mut out = KeyValue {
            first: l.first,
            last: r.last,
            value,
            uniform: l.uniform & r.uniform & joins,
            live: true,
        };
        out.cmov(r, !l.live);
        out.cmov(l, !r.live);
        out
    }
}

/// In-place scan: position `i` becomes `x_1 ⊕ … ⊕ x_i` (prefix) or
/// `x_i ⊕ … ⊕ x_n` (suffix). One read and one write per position.
pub fn scan_local<O, S>(buf: &mut S, direction: Direction, op: &O)
where
    O: ScanOperator,
    S: Slots<O::Value> + ?Sized,
{
    let n = buf.len();
    let mut acc = op.identity();
    match direction {
        Direction::Prefix => {
            for i in 0..n {
                let x = buf.read(i);
                acc = op.combine(&acc, &x);
                counters::cmove();
                buf.write(i, acc);
            }
        }
        Direction::Suffix => {
            for i in (0..n).rev() {
                let x = buf.read(i);
                acc = op.combine(&x, &acc);
                counters::cmove();
                buf.write(i, acc);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::Record;
    use proptest::prelude::*;

    #[test]
    fn prefix_sum_of_repetition_counts() {
        let mut v = vec![1u64, 3, 1, 0, 5, 2, 1, 1, 2];
        scan_local(&mut v, Direction::Prefix, &Sum);
        assert_eq!(v, vec![1, 4, 5, 5, 10, 12, 13, 14, 16]);
    }

    #[test]
    fn keyed_counter_resets() {
        let mut v: Vec<KeyValue<u64>> = [1, 1, 2].iter().map(|&k| KeyValue::new(k, 1)).collect();
        scan_local(&mut v, Direction::Prefix, &Keyed::prefix(Sum));
        let vals: Vec<u64> = v.iter().map(|kv| kv.value).collect();
        assert_eq!(vals, vec![1, 2, 1]);
    }

    #[test]
    fn keyed_suffix_max_spreads_group_count() {
        let mut v: Vec<KeyValue<u64>> = [(1, 1), (1, 2), (2, 1), (3, 1), (3, 2), (3, 3)]
            .iter()
            .map(|&(k, c)| KeyValue::new(k, c))
            .collect();
        scan_local(&mut v, Direction::Suffix, &Keyed::suffix(Max));
        let vals: Vec<u64> = v.iter().map(|kv| kv.value).collect();
        assert_eq!(vals, vec![2, 2, 1, 3, 3, 3]);
    }

    #[test]
    fn suffix_fill() {
        let mk = |a: Option<u64>| a.map_or(Record::dummy(), |a| Record::left(a, 0));
        let mut v: Vec<Record> = [None, Some(1), None, None, Some(2), None].into_iter().map(mk).collect();
        scan_local(&mut v, Direction::Suffix, &FillFirst::new());
        let got: Vec<Option<u64>> = v.iter().map(|r| r.is_real().then_some(r.a)).collect();
        assert_eq!(got, vec![Some(1), Some(1), Some(2), Some(2), Some(2), None]);
    }

    fn kv(x: (u64, u64, bool)) -> KeyValue<u64> {
        KeyValue {
            live: x.2,
            ..KeyValue::new(x.0, x.1)
        }
    }

    proptest! {
        #[test]
        fn keyed_operators_are_associative(
            a in (0u64..3, 0u64..100, any::<bool>()),
            b in (0u64..3, 0u64..100, any::<bool>()),
            c in (0u64..3, 0u64..100, any::<bool>()),
            suffix in any::<bool>(),
        ) {
            let (a, b, c) = (kv(a), kv(b), kv(c));
            let op = if suffix { Keyed::suffix(Sum) } else { Keyed::prefix(Sum) };
            let l = op.combine(&op.combine(&a, &b), &c);
            let r = op.combine(&a, &op.combine(&b, &c));
            prop_assert_eq!(l, r);
            let dir = if suffix { Direction::Suffix } else { Direction::Prefix };
            let op = Keyed { inner: Max, anchor: dir };
            prop_assert_eq!(op.combine(&op.combine(&a, &b), &c), op.combine(&a, &op.combine(&b, &c)));
        }

        #[test]
        fn keyed_scan_matches_sequential(keys in proptest::collection::vec(0u64..4, 0..60)) {
            let mut keys = keys;
            keys.sort_unstable();
            let mut v: Vec<KeyValue<u64>> = keys.iter().map(|&k| KeyValue::new(k, 1)).collect();
            scan_local(&mut v, Direction::Prefix, &Keyed::prefix(Sum));
            let mut run = 0;
            for i in 0..keys.len() {
                run = if i > 0 && keys[i] == keys[i - 1] { run + 1 } else { 1 };
                prop_assert_eq!(v[i].value, run);
            }
        }
    }
}
