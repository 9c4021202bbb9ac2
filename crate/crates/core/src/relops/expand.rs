//! Expansion: repeat every record `count` times into `p·m` output slots.
//!
//! The prefix sum of the counts gives each record the global slot of its
//! last copy. The record travels to that slot's server (a random shuffle
//! first, so the padded shuffle by server stays small), is placed at its
//! local slot, and a suffix scan copies it into the empty slots before it.

use super::shuffle::shuffle_random_labeled;
use super::{at, layout, padded_exchange, scan_distributed, scan_records};
use crate::cluster::{Cluster, DistTable};
use crate::error::{Error, Result};
use crate::oprims::{counters, odistribute, Direction, FillFirst, Sum};
use crate::padding::pad_expansion;
use crate::record::{Cmov, Record};

/// Output slot `k` (1-based, `k ≤ Σ count`) holds the record whose copies
/// cover `k`; remaining slots up to `p·⌈M/p⌉` are dummies. Records with
/// count 0 vanish.
pub fn expand(cluster: &mut Cluster, mut table: DistTable, bound: u64) -> Result<DistTable> {
    let p = cluster.p();
    let m = layout::share(bound, p);
    let n: u64 = table.len() as u64;

    scan_records(
        cluster,
        &mut table,
        Direction::Prefix,
        &Sum,
        |r| {
            let mut d = 0u64;
            d.cmov(&r.count, r.is_real());
            d
        },
        |r, l| r.position = l,
    );
    let sum = table.rows().map(|r| r.position).max().unwrap_or(0);
    if sum > bound {
        return Err(Error::BoundExceeded { sum, bound });
    }

    cluster.local(&mut table.parts, |_, part| {
        let mm = m.max(1);
        for r in part.iter_mut() {
            let routed = r.is_real() & (r.count > 0) & (m > 0);
            let t = r.position.div_ceil(mm);
            r.target = t;
            r.slot = r.position - t.saturating_sub(1) * mm;
            r.cmov(&Record::dummy(), !routed);
            counters::cmove();
        }
    });

    let table = shuffle_random_labeled(cluster, table, "expand/sf0");
    let sizes = table.sizes();
    let plan = pad_expansion(&sizes, n, bound, p, cluster.sigma());
    let caps: Vec<Vec<usize>> = plan.bounds.iter().map(|&u| vec![u; p]).collect();
    let nominal = (p as u64 * m).min(n * p as u64);
    let DistTable { schema, parts } = table;
    let mut parts = padded_exchange(
        cluster,
        parts,
        |r: &Record| r.target as usize,
        &caps,
        "expand/sf1",
        nominal,
        Some(plan),
    )?;

    cluster.try_local(&mut parts, |i, part| {
        odistribute(part, |r: &Record| r.slot as usize, m as usize).map_err(|e| at(e, i, "expand/distribute"))
    })?;
    let mut parts = scan_distributed(cluster, parts, Direction::Suffix, &FillFirst::new());
    cluster.local(&mut parts, |_, part| {
        for r in part.iter_mut() {
            r.target = 0;
            r.position = 0;
            r.slot = 0;
            r.scratch = 0;
        }
    });
    Ok(DistTable { schema, parts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::ClusterConfig;
    use proptest::prelude::*;

    fn input(d: &[u64], p: usize) -> DistTable {
        let rows: Vec<Record> = d.iter().enumerate().map(|(i, &c)| Record::counted(i as u64 + 1, 0, c)).collect();
        DistTable::from_rows(vec!["X".into(), "D".into()], rows, p)
    }

    fn oracle(d: &[u64], slots: usize) -> Vec<Option<u64>> {
        let mut out: Vec<Option<u64>> = Vec::new();
        for (i, &c) in d.iter().enumerate() {
            out.extend(std::iter::repeat_n(Some(i as u64 + 1), c as usize));
        }
        out.resize(slots, None);
        out
    }

    fn slots(t: &DistTable) -> Vec<Option<u64>> {
        t.rows().map(|r| r.is_real().then_some(r.a)).collect()
    }

    #[test]
    fn worked_example() {
        let d = [1, 3, 1, 0, 5, 2, 1, 1, 2];
        let mut c = Cluster::new(ClusterConfig::new(3, 40, 5)).unwrap();
        let out = expand(&mut c, input(&d, 3), 18).unwrap();
        assert_eq!(out.sizes(), vec![6, 6, 6]);
        assert_eq!(slots(&out), oracle(&d, 18));
    }

    #[test]
    fn identity_expansion() {
        let d = [1u64; 10];
        let mut c = Cluster::new(ClusterConfig::new(2, 40, 5)).unwrap();
        let out = expand(&mut c, input(&d, 2), 10).unwrap();
        assert_eq!(slots(&out), (1..=10).map(Some).collect::<Vec<_>>());
    }

    #[test]
    fn bound_exceeded() {
        let mut c = Cluster::new(ClusterConfig::new(2, 40, 5)).unwrap();
        let err = expand(&mut c, input(&[3, 3], 2), 5).unwrap_err();
        assert_eq!(err, Error::BoundExceeded { sum: 6, bound: 5 });
    }

    #[test]
    fn zero_bound() {
        let mut c = Cluster::new(ClusterConfig::new(3, 40, 5)).unwrap();
        let out = expand(&mut c, input(&[0, 0], 3), 0).unwrap();
        assert!(out.is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn slot_exact(
            p in 1usize..6,
            d in proptest::collection::vec(0u64..6, 0..80),
            slack in 0u64..20,
            seed in any::<u64>(),
        ) {
            let bound = d.iter().sum::<u64>() + slack;
            let mut c = Cluster::new(ClusterConfig::new(p, 40, seed)).unwrap();
            let out = expand(&mut c, input(&d, p), bound).unwrap();
            let m = bound.div_ceil(p as u64) as usize;
            prop_assert!(out.parts.iter().all(|q| q.len() == m));
            prop_assert_eq!(slots(&out), oracle(&d, p * m));
        }
    }
}
