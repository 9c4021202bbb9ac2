//! Oblivious distribution of items to distinct target slots.

use super::sort::{greatest_power_of_two_below, osort};
use super::trace::Slots;
use super::{counters, cswap};
use crate::error::{Error, Result};
use crate::record::{Cmov, Element};

const UNROUTED: u64 = u64::MAX;

/// Places every real item with target `t >= 1` at slot `t` (1-based) of an
/// output of exactly `m` slots; every other slot holds a dummy.
///
/// Items that are dummies or whose target is 0 are dropped. The buffer is
/// sorted by target first, then routed with a fixed network of
/// `O(m log m)` conditional swaps. Errors are detected with an accumulated
/// flag and reported after the full pass.
pub fn odistribute<T, S, F>(buf: &mut S, target: F, m: usize) -> Result<()>
where
    T: Element,
    S: Slots<T> + ?Sized,
    F: Fn(&T) -> usize,
{
    let n = buf.len();
    let mut out_of_range = false;
    for i in 0..n {
        let mut x = buf.read(i);
        let t = target(&x) as u64;
        let routed = !x.is_dummy() & (t != 0);
        out_of_range |= routed & (t > m as u64);
        let mut key = UNROUTED;
        key.cmov(&t, routed);
        x.cmov(&T::dummy(), !routed);
        x.set_scratch(key);
        counters::cmove();
        buf.write(i, x);
    }
    osort(buf, |x: &T| x.scratch());

    let mut duplicate = false;
    let mut prev = UNROUTED;
    for i in 0..n {
        let x = buf.read(i);
        let key = x.scratch();
        duplicate |= (key != UNROUTED) & (key == prev);
        counters::comparison();
        prev = key;
    }

    // Routed items all sit in front after the sort; with distinct targets in
    // [1, m] at most m of them exist, so only dummies are cut here.
    let mut filler = T::dummy();
    filler.set_scratch(UNROUTED);
    buf.resize(m, filler);

    if m > 1 {
        let mut j = greatest_power_of_two_below(m);
        loop {
            for i in (0..m - j).rev() {
                let x = buf.read(i);
                let key = x.scratch();
                let go = (key != UNROUTED) & (key > (i + j) as u64);
                counters::comparison();
                cswap(buf, i, i + j, go);
            }
            if j == 1 {
                break;
            }
            j /= 2;
        }
    }

    if out_of_range {
        return Err(Error::TargetOutOfRange { slots: m });
    }
    if duplicate {
        return Err(Error::DuplicateTarget);
    }
    Ok(())
}
