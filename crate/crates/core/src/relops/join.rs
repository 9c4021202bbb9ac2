//! General equi-join with a public output size.
//!
//! Both tables are sorted and annotated with the degrees of their keys on
//! both sides. `R` is expanded by `deg_s` and `S` by `deg_r` into the same
//! `p·m` slots, so each key group occupies the same global range in both.
//! Inside a group the copies of `S` are permuted by the alignment key so
//! that slot `k` of `R̄` and slot `k` of `S̄` form one output row.

use super::degrees::{compute_degrees, infer_output_size, Role};
use super::expand::expand;
use super::shuffle::shuffle_random_labeled;
use super::{layout, padded_exchange, scan_records, sort_distributed};
use crate::cluster::{Cluster, DistTable};
use crate::error::Result;
use crate::oprims::{counters, osort, Direction, KeyValue, Keyed, Min, Sum};
use crate::padding::pad_align;
use crate::record::{Cmov, Record};
use serde::{Deserialize, Serialize};

/// Output size bound of a join.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bound {
    /// Public bound `M ≥ |R ⋈ S|`.
    Given(u64),
    /// Use the exact join size, computed from the degrees.
    Infer,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinOutput {
    /// `p` partitions of `m = ⌈M/p⌉` rows `(a, key, c)`; dummies pad the tail.
    pub table: DistTable,
    /// The bound `M` actually used.
    pub bound: u64,
}

/// `R(A, B) ⋈ S(B, C)` on `B`.
pub fn join(cluster: &mut Cluster, left: DistTable, right: DistTable, bound: Bound) -> Result<JoinOutput> {
    let p = cluster.p();
    let left = sort_distributed(cluster, left, |r| r.key);
    let right = sort_distributed(cluster, right, |r| r.key);

    let mut r1 = compute_degrees(cluster, left, &right, Role::R)?;
    let bound = match bound {
        Bound::Given(m) => m,
        Bound::Infer => infer_output_size(cluster, &r1),
    };
    let mut s1 = compute_degrees(cluster, right, &r1, Role::S)?;

    cluster.local(&mut r1.parts, |_, part| part.iter_mut().for_each(|r| r.count = r.deg_s));
    cluster.local(&mut s1.parts, |_, part| part.iter_mut().for_each(|r| r.count = r.deg_r));
    let rbar = expand(cluster, r1, bound)?;
    let mut sbar = expand(cluster, s1, bound)?;
    let m = layout::share(bound, p);

    cluster.local(&mut sbar.parts, |i, part| {
        for (k, r) in part.iter_mut().enumerate() {
            r.position = i as u64 * m + k as u64 + 1;
        }
    });
    scan_records(
        cluster,
        &mut sbar,
        Direction::Prefix,
        &Keyed::prefix(Sum),
        |r| KeyValue::new(r.key, 1u64),
        |r, v| r.group_rank = v.value,
    );
    scan_records(
        cluster,
        &mut sbar,
        Direction::Prefix,
        &Keyed::prefix(Min),
        |r| KeyValue::new(r.key, r.position),
        |r, v| r.group_start = v.value,
    );
    cluster.local(&mut sbar.parts, |_, part| {
        for r in part.iter_mut() {
            let real = r.is_real();
            let mut l = r.position;
            let aligned = layout::alignment_key(r.group_rank.max(1), r.deg_r, r.deg_s, r.group_start);
            l.cmov(&aligned, real);
            r.position = l;
            r.target = l.div_ceil(m.max(1));
            counters::cmove();
        }
    });

    let sbar = shuffle_random_labeled(cluster, sbar, "align/sf0");
    let plan = pad_align(&sbar.sizes(), p, cluster.sigma()).limit(m as usize);
    let caps: Vec<Vec<usize>> = plan.bounds.iter().map(|&u| vec![u; p]).collect();
    let DistTable { parts, .. } = sbar;
    let mut sparts = padded_exchange(
        cluster,
        parts,
        |r: &Record| r.target as usize,
        &caps,
        "align/sf1",
        p as u64 * m,
        Some(plan),
    )?;
    cluster.local(&mut sparts, |_, part| {
        osort(part, |r: &Record| (r.dummy, r.position));
        part.resize(m as usize, Record::dummy());
    });

    let mut zipped: Vec<(Vec<Record>, Vec<Record>)> = rbar.parts.into_iter().zip(sparts).collect();
    let parts = cluster.local(&mut zipped, |_, (rs, ss)| {
        rs.iter()
            .zip(ss.iter())
            .map(|(a, b)| {
                let mut out = Record {
                    a: a.a,
                    key: a.key,
                    c: b.c,
                    has_c: true,
                    dummy: false,
                    ..Record::dummy()
                };
                out.cmov(&Record::dummy(), a.dummy | b.dummy);
                counters::cmove();
                out
            })
            .collect::<Vec<Record>>()
    });
    Ok(JoinOutput {
        table: DistTable {
            schema: vec!["A".into(), "B".into(), "C".into()],
            parts,
        },
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::ClusterConfig;
    use crate::relops::pk_join;
    use proptest::prelude::*;

    fn oracle(r: &[(u64, u64)], s: &[(u64, u64)]) -> Vec<(u64, u64, Option<u64>)> {
        let mut out = Vec::new();
        for &(a, b) in r {
            for &(b2, c) in s {
                if b == b2 {
                    out.push((a, b, Some(c)));
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn run(p: usize, r: &[(u64, u64)], s: &[(u64, u64)], bound: Bound, seed: u64) -> JoinOutput {
        let mut c = Cluster::new(ClusterConfig::new(p, 40, seed)).unwrap();
        join(&mut c, DistTable::left(r, p), DistTable::right(s, p), bound).unwrap()
    }

    fn rows(t: &DistTable) -> Vec<(u64, u64, Option<u64>)> {
        let mut v: Vec<_> = t.rows().filter_map(|r| r.joined()).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn many_to_many() {
        let r = [(1, 1), (2, 1)];
        let s = [(1, 10), (1, 20)];
        let out = run(2, &r, &s, Bound::Given(4), 1);
        assert_eq!(rows(&out.table), oracle(&r, &s));
        assert_eq!(out.table.sizes(), vec![2, 2]);
    }

    #[test]
    fn inferred_bound() {
        let r = [(1, 1), (2, 1), (3, 2)];
        let s = [(1, 10), (2, 20), (2, 21), (3, 30)];
        let out = run(2, &r, &s, Bound::Infer, 2);
        assert_eq!(out.bound, 4);
        assert_eq!(rows(&out.table), oracle(&r, &s));
    }

    #[test]
    fn pk_shaped_matches_pk_join() {
        let r: Vec<(u64, u64)> = (0..50).map(|i| (i, i % 13)).collect();
        let s: Vec<(u64, u64)> = (0..10).map(|k| (k, 100 + k)).collect();
        let out = run(3, &r, &s, Bound::Infer, 3);
        let mut c = Cluster::new(ClusterConfig::new(3, 40, 3)).unwrap();
        let pk = pk_join(&mut c, DistTable::left(&r, 3), DistTable::right(&s, 3)).unwrap();
        let mut matched: Vec<_> = pk.rows().filter_map(|r| r.joined()).filter(|t| t.2.is_some()).collect();
        matched.sort_unstable();
        assert_eq!(rows(&out.table), matched);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]
        #[test]
        fn matches_nested_loop(
            p in 1usize..6,
            r in proptest::collection::vec((0u64..1000, 0u64..12), 0..60),
            s in proptest::collection::vec((0u64..12, 0u64..1000), 0..60),
            slack in 0u64..10,
            given in any::<bool>(),
            seed in any::<u64>(),
        ) {
            let expected = oracle(&r, &s);
            let bound = if given { Bound::Given(expected.len() as u64 + slack) } else { Bound::Infer };
            let out = run(p, &r, &s, bound, seed);
            prop_assert_eq!(rows(&out.table), expected);
            let m = out.bound.div_ceil(p as u64) as usize;
            prop_assert!(out.table.parts.iter().all(|q| q.len() == m));
        }
    }
}
