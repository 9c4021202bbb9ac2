//! Bitonic sorting network for arbitrary lengths.
//!
//! The comparator sequence is fixed by the length alone. Lengths that are
//! not powers of two use the standard generalisation (split at `n/2`, merge
//! by the largest power of two below `n`), so no sentinel padding is needed.

use super::counters;
use super::trace::Slots;
use crate::record::Cmov;

/// Sorts `buf` ascending by `key`. Not stable.
pub fn osort<T, S, K, F>(buf: &mut S, key: F)
where
    T: Cmov,
    S: Slots<T> + ?Sized,
    K: Ord,
    F: Fn(&T) -> K,
{
    let n = buf.len();
    osort_range(buf, 0, n, &key);
}

/// Sorts `buf[lo..lo + n]`.
pub fn osort_range<T, S, K, F>(buf: &mut S, lo: usize, n: usize, key: &F)
where
    T: Cmov,
    S: Slots<T> + ?Sized,
    K: Ord,
    F: Fn(&T) -> K,
{
    sort(buf, lo, n, true, key);
}

fn sort<T, S, K, F>(buf: &mut S, lo: usize, n: usize, ascending: bool, key: &F)
where
    T: Cmov,
    S: Slots<T> + ?Sized,
    K: Ord,
    F: Fn(&T) -> K,
{
    if n > 1 {
        let m = n / 2;
        sort(buf, lo, m, !ascending, key);
        sort(buf, lo + m, n - m, ascending, key);
        merge(buf, lo, n, ascending, key);
    }
}

fn merge<T, S, K, F>(buf: &mut S, lo: usize, n: usize, ascending: bool, key: &F)
where
    T: Cmov,
    S: Slots<T> + ?Sized,
    K: Ord,
    F: Fn(&T) -> K,
{
    if n > 1 {
        let m = greatest_power_of_two_below(n);
        for i in lo..lo + n - m {
            compare_exchange(buf, i, i + m, ascending, key);
        }
        merge(buf, lo, m, ascending, key);
        merge(buf, lo + m, n - m, ascending, key);
    }
}

#[inline]
fn compare_exchange<T, S, K, F>(buf: &mut S, i: usize, j: usize, ascending: bool, key: &F)
where
    T: Cmov,
    S: Slots<T> + ?Sized,
    K: Ord,
    F: Fn(&T) -> K,
{
    let x = buf.read(i);
    let y = buf.read(j);
    let (kx, ky) = (key(&x), key(&y));
    let swap = if ascending { kx > ky } else { kx < ky };
    let mut lo = x;
    let mut hi = y;
    lo.cmov(&y, swap);
    hi.cmov(&x, swap);
    counters::comparison();
    buf.write(i, lo);
    buf.write(j, hi);
}

pub(crate) fn greatest_power_of_two_below(n: usize) -> usize {
    debug_assert!(n > 1);
    let mut k = 1;
    while k << 1 < n {
        k <<= 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oprims::TracedBuffer;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_cases() {
        let mut v = vec![3u64, 1, 2];
        osort(&mut v, |x| *x);
        assert_eq!(v, vec![1, 2, 3]);
        let mut v: Vec<u64> = (0..17).collect();
        osort(&mut v, |x| *x);
        assert_eq!(v, (0..17).collect::<Vec<_>>());
        let mut e: Vec<u64> = vec![];
        osort(&mut e, |x| *x);
        assert!(e.is_empty());
    }

    #[test]
    fn matches_reference_sort_on_256_random_keys() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v: Vec<u64> = (0..256).map(|_| rng.random_range(0..1000)).collect();
        let mut expected = v.clone();
        expected.sort_unstable();
        let mut got = v;
        osort(&mut got, |x| *x);
        assert_eq!(got, expected);
    }

    #[test]
    fn exhaustive_zero_one_principle_up_to_12() {
        // A comparator network sorts every input iff it sorts every 0/1 input.
        for n in 0..=12usize {
            for bits in 0u32..(1 << n) {
                let mut v: Vec<u64> = (0..n).map(|i| ((bits >> i) & 1) as u64).collect();
                osort(&mut v, |x| *x);
                assert!(v.windows(2).all(|w| w[0] <= w[1]), "n={n} bits={bits:b}");
            }
        }
    }

    #[test]
    fn trace_depends_only_on_length() {
        let mut a = TracedBuffer::new(vec![5u64, 1, 4, 2, 3, 9, 0]);
        let mut b = TracedBuffer::new(vec![0u64, 0, 0, 0, 0, 0, 0]);
        osort(&mut a, |x| *x);
        osort(&mut b, |x| *x);
        assert_eq!(a.trace(), b.trace());
    }

    proptest! {
        #[test]
        fn sorts_like_std(v in proptest::collection::vec(0u64..50, 0..200)) {
            let mut expected = v.clone();
            expected.sort_unstable();
            let mut got = v;
            osort(&mut got, |x| *x);
            prop_assert_eq!(got, expected);
        }
    }
}
