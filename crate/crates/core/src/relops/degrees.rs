//! Join-key degrees and the exact output size.

use super::hasher::KeyHasher;
use super::{pk_join_carry, scan_records};
use crate::cluster::{purpose, stream_seed, Cluster, DistTable, RoundKind};
use crate::error::Result;
use crate::oprims::{counters, Direction, KeyValue, Keyed, Max, Sum};
use crate::record::{Cmov, Record};

/// Which side of the join the annotated table is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// Annotated table is `R`: its own degree goes to `deg_r`.
    R,
    /// Annotated table is `S`: its own degree goes to `deg_s`.
    S,
}

/// Writes `rank` (1-based position inside the key run) into `count` and
/// then spreads the run's last rank, the degree, over the whole run.
fn degree_scans(cluster: &mut Cluster, table: &mut DistTable) {
    scan_records(
        cluster,
        table,
        Direction::Prefix,
        &Keyed::prefix(Sum),
        |r| KeyValue::new(r.key, 1u64),
        |r, v| r.group_rank = v.value,
    );
    scan_records(
        cluster,
        table,
        Direction::Suffix,
        &Keyed::suffix(Max),
        |r| KeyValue::new(r.key, r.group_rank),
        |r, v| r.count = v.value,
    );
}

/// Annotates `table` with `deg_r` and `deg_s` of its join key. Both inputs
/// must be globally sorted by key (dummies last). Keys absent from `other`
/// get degree 0.
pub fn compute_degrees(cluster: &mut Cluster, table: DistTable, other: &DistTable, role: Role) -> Result<DistTable> {
    let mut own = table;
    degree_scans(cluster, &mut own);

    let mut rhs = other.clone();
    degree_scans(cluster, &mut rhs);
    // Keep only the last row of every key run (rank = degree), globally.
    cluster.local(&mut rhs.parts, |_, part| {
        for r in part.iter_mut() {
            let mut out = Record::dummy();
            let keep = r.is_real() & (r.group_rank == r.count);
            out.key.cmov(&r.key, keep);
            out.carry.cmov(&r.count, keep);
            out.has_carry.cmov(&true, keep);
            out.dummy.cmov(&false, keep);
            counters::cmove();
            *r = out;
        }
    });

    let router = KeyHasher::new(
        stream_seed(cluster.config().master_seed, cluster.next_round(), 0, purpose::HASH_SEED),
        cluster.p(),
    );
    let mut joined = pk_join_carry(cluster, own, rhs, &router)?;
    cluster.local(&mut joined.parts, |_, part| {
        for r in part.iter_mut() {
            let own_deg = r.count;
            let mut other_deg = 0u64;
            other_deg.cmov(&r.carry, r.has_carry);
            match role {
                Role::R => {
                    r.deg_r = own_deg;
                    r.deg_s = other_deg;
                }
                Role::S => {
                    r.deg_s = own_deg;
                    r.deg_r = other_deg;
                }
            }
            r.count = 0;
            r.group_rank = 0;
            r.carry = 0;
            r.has_carry = false;
        }
    });
    Ok(joined)
}

/// `Σ deg_s` over the real rows of a [`compute_degrees`] output for `R`,
/// which is the exact join size. Server 1 gathers the `p-1` local sums and
/// broadcasts the total.
pub fn infer_output_size(cluster: &mut Cluster, annotated: &DistTable) -> u64 {
    let p = cluster.p();
    let mut parts = annotated.parts.clone();
    let local = cluster.local(&mut parts, |_, part| {
        part.iter()
            .map(|r| {
                let mut d = 0u64;
                d.cmov(&r.deg_s, r.is_real());
                d
            })
            .sum::<u64>()
    });
    let mut out: Vec<Vec<Vec<u64>>> = vec![vec![Vec::new(); p]; p];
    for (i, s) in local.iter().enumerate().skip(1) {
        out[i][0].push(*s);
    }
    let inbox = cluster.exchange("size/gather", RoundKind::Fixed, 0, None, out);
    let total: u64 = local[0] + inbox[0].iter().sum::<u64>();
    let mut out: Vec<Vec<Vec<u64>>> = vec![vec![Vec::new(); p]; p];
    for msg in out[0].iter_mut().skip(1) {
        msg.push(total);
    }
    cluster.exchange("size/broadcast", RoundKind::Fixed, 0, None, out);
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::ClusterConfig;
    use crate::relops::sort_distributed;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn sorted(c: &mut Cluster, t: DistTable) -> DistTable {
        sort_distributed(c, t, |r| r.key)
    }

    fn degrees(p: usize, r: &[u64], s: &[u64], seed: u64) -> (Vec<(u64, u64, u64)>, u64) {
        let mut c = Cluster::new(ClusterConfig::new(p, 40, seed)).unwrap();
        let rt: Vec<(u64, u64)> = r.iter().enumerate().map(|(i, &k)| (i as u64, k)).collect();
        let st: Vec<(u64, u64)> = s.iter().enumerate().map(|(i, &k)| (k, i as u64)).collect();
        let rt = sorted(&mut c, DistTable::left(&rt, p));
        let st = sorted(&mut c, DistTable::right(&st, p));
        let out = compute_degrees(&mut c, rt, &st, Role::R).unwrap();
        let m = infer_output_size(&mut c, &out);
        let mut v: Vec<_> = out.real_rows().map(|r| (r.key, r.deg_r, r.deg_s)).collect();
        v.sort_unstable();
        (v, m)
    }

    #[test]
    fn small_example() {
        let (v, m) = degrees(2, &[1, 1, 2], &[1, 2, 2, 3], 3);
        assert_eq!(v, vec![(1, 2, 1), (1, 2, 1), (2, 1, 2)]);
        assert_eq!(m, 4);
    }

    #[test]
    fn single_match_and_absent_key() {
        assert_eq!(degrees(2, &[5], &[5], 1).0, vec![(5, 1, 1)]);
        let (v, m) = degrees(3, &[4, 6], &[5], 1);
        assert_eq!(v, vec![(4, 1, 0), (6, 1, 0)]);
        assert_eq!(m, 0);
    }

    #[test]
    fn pk_case_size_is_left_size() {
        let (_, m) = degrees(4, &[1, 2, 2, 3, 3, 3], &[1, 2, 3, 4], 2);
        assert_eq!(m, 6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]
        #[test]
        fn matches_counting_oracle(
            p in 1usize..6,
            r in proptest::collection::vec(0u64..15, 0..80),
            s in proptest::collection::vec(0u64..15, 0..80),
            seed in any::<u64>(),
        ) {
            let count = |v: &[u64]| {
                let mut h: HashMap<u64, u64> = HashMap::new();
                for &k in v {
                    *h.entry(k).or_default() += 1;
                }
                h
            };
            let (cr, cs) = (count(&r), count(&s));
            let mut expected: Vec<_> = r.iter().map(|k| (*k, cr[k], cs.get(k).copied().unwrap_or(0))).collect();
            expected.sort_unstable();
            let (got, m) = degrees(p, &r, &s, seed);
            prop_assert_eq!(got, expected);
            prop_assert_eq!(m, r.iter().map(|k| cs.get(k).copied().unwrap_or(0)).sum::<u64>());
        }
    }
}
