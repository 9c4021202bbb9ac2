//! Access-trace equality across same-size inputs.

use super::{AuditVerdict, Witness};
use crate::cluster::{purpose, stream_seed};
use crate::oprims::{ocompact, odistribute, opartition_quick, opartition_sort, osort, Access, Slots, TracedBuffer};
use crate::record::Record;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Buckets used by the partition primitives under audit.
const BUCKETS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Primitive {
    Osort,
    Ocompact,
    Odistribute,
    OpartitionSort,
    OpartitionQuick,
    /// Negative control: textbook quicksort with data-dependent pivots.
    NaiveQuicksort,
}

impl Primitive {
    pub const OBLIVIOUS: [Primitive; 5] = [
        Primitive::Osort,
        Primitive::Ocompact,
        Primitive::Odistribute,
        Primitive::OpartitionSort,
        Primitive::OpartitionQuick,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Primitive::Osort => "osort",
            Primitive::Ocompact => "ocompact",
            Primitive::Odistribute => "odistribute",
            Primitive::OpartitionSort => "opartition-sort",
            Primitive::OpartitionQuick => "opartition-quick",
            Primitive::NaiveQuicksort => "naive-quicksort",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::OBLIVIOUS
            .into_iter()
            .chain([Primitive::NaiveQuicksort])
            .find(|p| p.name() == name)
    }
}

/// Runs `primitive` on `2 · trials` random inputs of length `size` and
/// checks that every access trace equals the first one.
pub fn check_comp_oblivious(primitive: Primitive, size: usize, trials: usize, seed: u64) -> AuditVerdict {
    let check_id = format!("comp-oblivious/{}/{}", primitive.name(), size);
    let traces: Vec<(Vec<Access>, Vec<Access>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, t, size, purpose::GENERATOR));
            (trace_of(primitive, size, &mut rng), trace_of(primitive, size, &mut rng))
        })
        .collect();
    let Some((reference, _)) = traces.first() else {
        return AuditVerdict::pass(&check_id, 0);
    };
    for (trial, (a, b)) in traces.iter().enumerate() {
        for other in [a, b] {
            if let Some(entry) = first_mismatch(reference, other) {
                return AuditVerdict::fail(
                    &check_id,
                    trials,
                    Witness::Trace {
                        trial,
                        entry,
                        left: reference.get(entry).copied(),
                        right: other.get(entry).copied(),
                    },
                );
            }
        }
    }
    AuditVerdict::pass(&check_id, trials)
}

fn first_mismatch(a: &[Access], b: &[Access]) -> Option<usize> {
    (0..a.len().max(b.len())).find(|&k| a.get(k) != b.get(k))
}

/// A random input: some dummies, random keys, random bucket targets.
fn input(size: usize, rng: &mut ChaCha8Rng) -> Vec<Record> {
    (0..size)
        .map(|i| {
            if rng.random_bool(0.2) {
                Record::dummy()
            } else {
                Record {
                    target: rng.random_range(1..=BUCKETS as u64),
                    ..Record::left(i as u64, rng.random_range(0..size as u64 + 1))
                }
            }
        })
        .collect()
}

fn trace_of(primitive: Primitive, size: usize, rng: &mut ChaCha8Rng) -> Vec<Access> {
    let mut data = input(size, rng);
    if primitive == Primitive::Odistribute {
        let mut slots: Vec<u64> = (1..=size as u64).collect();
        slots.shuffle(rng);
        for (r, t) in data.iter_mut().zip(slots) {
            r.target = t;
        }
    }
    let marks: Vec<bool> = (0..size).map(|_| rng.random_bool(0.5)).collect();
    let mut buf = TracedBuffer::new(data);
    let caps = [size; BUCKETS];
    let target = |r: &Record| r.target as usize;
    match primitive {
        Primitive::Osort => osort(&mut buf, |r: &Record| (r.dummy, r.key)),
        Primitive::Ocompact => {
            ocompact(&mut buf, &marks);
        }
        Primitive::Odistribute => odistribute(&mut buf, target, size).expect("distinct targets"),
        Primitive::OpartitionSort => opartition_sort(&mut buf, target, &caps).expect("caps hold everything"),
        Primitive::OpartitionQuick => opartition_quick(&mut buf, target, &caps).expect("caps hold everything"),
        Primitive::NaiveQuicksort => naive_quicksort(&mut buf, 0, size),
    }
    buf.into_parts().1
}

/// Lomuto quicksort on keys, branching on the data.
fn naive_quicksort<S: Slots<Record>>(buf: &mut S, lo: usize, hi: usize) {
    if hi - lo < 2 {
        return;
    }
    let pivot = buf.read(hi - 1).key;
    let mut store = lo;
    for i in lo..hi - 1 {
        let x = buf.read(i);
        if x.key < pivot {
            let y = buf.read(store);
            buf.write(store, x);
            buf.write(i, y);
            store += 1;
        }
    }
    let x = buf.read(hi - 1);
    let y = buf.read(store);
    buf.write(store, x);
    buf.write(hi - 1, y);
    naive_quicksort(buf, lo, store);
    naive_quicksort(buf, store + 1, hi);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitives_pass() {
        for prim in Primitive::OBLIVIOUS {
            for size in [16, 64] {
                let v = check_comp_oblivious(prim, size, 10, 7);
                assert!(v.passed, "{v:?}");
            }
        }
    }

    #[test]
    fn quicksort_control_fails() {
        let v = check_comp_oblivious(Primitive::NaiveQuicksort, 64, 10, 7);
        assert!(!v.passed);
        assert!(matches!(v.witness, Some(Witness::Trace { .. })));
    }

    #[test]
    fn naive_quicksort_sorts() {
        let mut v: Vec<Record> = [5, 3, 9, 1, 3].iter().map(|&k| Record::left(0, k)).collect();
        naive_quicksort(&mut v, 0, 5);
        assert_eq!(v.iter().map(|r| r.key).collect::<Vec<_>>(), vec![1, 3, 3, 5, 9]);
    }
}
