use super::hasher::KeyRouter;
use super::{layout, padded_exchange, total};
use crate::cluster::{purpose, Cluster, DistTable, RoundKind};
use crate::error::{Error, Result};
use crate::oprims::{counters, osort, Slots};
use crate::padding::pad_shuffle_by_key;
use crate::record::Record;

/// Sends every real record to server `target(r)` (1-based). Sender `i`
/// pads each of its `p` messages to `bounds[i]` elements.
pub fn shuffle<F>(cluster: &mut Cluster, table: DistTable, target: F, bounds: &[usize]) -> Result<DistTable>
where
    F: Fn(&Record) -> usize + Sync,
{
    let p = cluster.p();
    if bounds.len() != p {
        return Err(Error::InvalidConfig("one bound per sender".into()));
    }
    let caps: Vec<Vec<usize>> = bounds.iter().map(|&u| vec![u; p]).collect();
    let nominal = total(&table.parts);
    let parts = padded_exchange(cluster, table.parts, target, &caps, "shuffle", nominal, None)?;
    Ok(DistTable {
        schema: table.schema,
        parts,
    })
}

/// Sends every element (dummies included) to an independent uniform
/// server, grouping in the clear. Targets come from each server's seeded
/// stream in positional order, so message sizes never depend on values.
pub fn shuffle_random(cluster: &mut Cluster, table: DistTable) -> DistTable {
    shuffle_random_labeled(cluster, table, "shuffle-random")
}

pub(crate) fn shuffle_random_labeled(cluster: &mut Cluster, mut table: DistTable, label: &str) -> DistTable {
    let p = cluster.p();
    let nominal = total(&table.parts);
    let rngs: Vec<_> = (0..p).map(|i| cluster.rng(i, purpose::RANDOM_SHUFFLE)).collect();
    let outboxes = cluster.local(&mut table.parts, |i, part| {
        let mut rng = rngs[i].clone();
        let targets = layout::random_targets(&mut rng, part.len(), p);
        let mut out: Vec<Vec<Record>> = vec![Vec::new(); p];
        for (r, t) in std::mem::take(part).into_iter().zip(targets) {
            out[t].push(r);
        }
        out
    });
    let parts = cluster.exchange(label, RoundKind::Random, nominal, None, outboxes);
    DistTable {
        schema: table.schema,
        parts,
    }
}

/// Detects a repeated composite key among the real records of one
/// partition. Leaves the partition sorted by key.
pub(crate) fn has_duplicate_key<K>(part: &mut Vec<Record>, key: &K) -> bool
where
    K: Fn(&Record) -> (u64, u64),
{
    osort(part, |r: &Record| (r.dummy, key(r)));
    let mut dup = false;
    for j in 1..part.len() {
        let (a, b) = (part.read(j - 1), part.read(j));
        dup |= !a.dummy & !b.dummy & (key(&a) == key(&b));
        counters::comparison();
    }
    dup
}

/// Routes every real record to server `router(key(r))`, padded per the
/// shuffle-by-key bound. Keys must be distinct within each partition.
pub fn shuffle_by_key<K>(
    cluster: &mut Cluster,
    table: DistTable,
    key: K,
    router: &dyn KeyRouter,
) -> Result<DistTable>
where
    K: Fn(&Record) -> (u64, u64) + Sync,
{
    let DistTable { schema, parts } = table;
    let parts = shuffle_by_key_parts(cluster, parts, &key, router, "shuffle-by-key")?.0;
    Ok(DistTable { schema, parts })
}

/// Shuffle by key on raw partitions; also returns the bounds used.
pub(crate) fn shuffle_by_key_parts<K>(
    cluster: &mut Cluster,
    mut parts: Vec<Vec<Record>>,
    key: &K,
    router: &dyn KeyRouter,
    label: &str,
) -> Result<(Vec<Vec<Record>>, Vec<usize>)>
where
    K: Fn(&Record) -> (u64, u64) + Sync,
{
    let p = cluster.p();
    let dups = cluster.local(&mut parts, |_, part| has_duplicate_key(part, key));
    if let Some(server) = dups.iter().position(|&d| d) {
        return Err(Error::DuplicateLocalKey { server });
    }
    let sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
    let plan = pad_shuffle_by_key(&sizes, p, cluster.sigma());
    let bounds = plan.bounds.clone();
    let caps: Vec<Vec<usize>> = bounds.iter().map(|&u| vec![u; p]).collect();
    let target = |r: &Record| {
        let (k, z) = key(r);
        router.route(k, z)
    };
    let nominal = total(&parts);
    let parts = padded_exchange(cluster, parts, target, &caps, label, nominal, Some(plan))?;
    Ok((parts, bounds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::ClusterConfig;
    use crate::relops::{FnRouter, KeyHasher};
    use std::collections::HashMap;

    fn reals(t: &DistTable) -> Vec<Vec<u64>> {
        t.parts
            .iter()
            .map(|p| {
                let mut v: Vec<u64> = p.iter().filter(|r| r.is_real()).map(|r| r.a).collect();
                v.sort_unstable();
                v
            })
            .collect()
    }

    #[test]
    fn two_servers_unit_bounds() {
        let mut c = Cluster::new(ClusterConfig::new(2, 40, 1)).unwrap();
        let mk = |a: u64, t: u64| Record {
            target: t,
            ..Record::left(a, 0)
        };
        let t = DistTable {
            schema: vec![],
            parts: vec![vec![mk(1, 2), mk(2, 1)], vec![mk(3, 1), mk(4, 2)]],
        };
        let out = shuffle(&mut c, t, |r| r.target as usize, &[1, 1]).unwrap();
        assert_eq!(reals(&out), vec![vec![2, 3], vec![1, 4]]);
        assert_eq!(c.transcript().rounds[0].sizes, vec![vec![1, 1], vec![1, 1]]);
    }

    #[test]
    fn self_targets_stay_local_but_pad_everyone() {
        let mut c = Cluster::new(ClusterConfig::new(3, 40, 1)).unwrap();
        let parts: Vec<Vec<Record>> = (0..3u64)
            .map(|i| (0..4).map(|k| Record { target: i + 1, ..Record::left(10 * i + k, 0) }).collect())
            .collect();
        let t = DistTable { schema: vec![], parts };
        let out = shuffle(&mut c, t, |r| r.target as usize, &[4, 4, 4]).unwrap();
        assert_eq!(reals(&out)[1], vec![10, 11, 12, 13]);
        assert!(c.transcript().rounds[0].sizes.iter().flatten().all(|&s| s == 4));
    }

    #[test]
    fn random_instance_against_routing_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let p = 4;
        let rows: Vec<Record> = (0..400)
            .map(|a| Record { target: rng.random_range(1..=p as u64), ..Record::left(a, 0) })
            .collect();
        let mut oracle = vec![Vec::new(); p];
        for r in &rows {
            oracle[r.target as usize - 1].push(r.a);
        }
        let t = DistTable::from_rows(vec![], rows, p);
        let mut c = Cluster::new(ClusterConfig::new(p, 40, 1)).unwrap();
        let out = shuffle(&mut c, t, |r| r.target as usize, &[100; 4]).unwrap();
        for v in &mut oracle {
            v.sort_unstable();
        }
        assert_eq!(reals(&out), oracle);
    }

    #[test]
    fn overflow_reports_sender() {
        let mut c = Cluster::new(ClusterConfig::new(2, 40, 1)).unwrap();
        let t = DistTable {
            schema: vec![],
            parts: vec![vec![], vec![Record { target: 1, ..Record::left(1, 0) }; 3]],
        };
        let err = shuffle(&mut c, t, |r| r.target as usize, &[1, 1]).unwrap_err();
        assert_eq!(err, Error::PaddingOverflow { server: 1, stage: "shuffle".into() });
    }

    #[test]
    fn random_shuffle_single_server_keeps_contents() {
        let mut c = Cluster::new(ClusterConfig::new(1, 40, 9)).unwrap();
        let t = DistTable::left(&[(1, 1), (2, 2)], 1);
        let out = shuffle_random(&mut c, t);
        assert_eq!(reals(&out), vec![vec![1, 2]]);
    }

    #[test]
    fn random_shuffle_sizes_ignore_values() {
        let run = |off: u64| {
            let mut c = Cluster::new(ClusterConfig::new(4, 40, 77)).unwrap();
            let rows: Vec<(u64, u64)> = (0..100).map(|i| (i + off, i * off)).collect();
            shuffle_random(&mut c, DistTable::left(&rows, 4));
            c.into_transcript()
        };
        assert!(run(0).same_sizes(&run(1000)));
    }

    #[test]
    fn stub_router_co_location() {
        let route = FnRouter(|k: u64, _z: u64| if k == 2 || k == 3 { 1 } else { 2 });
        let mut c = Cluster::new(ClusterConfig::new(2, 40, 1)).unwrap();
        let t = DistTable::right(&[(1, 0), (2, 0), (3, 0), (4, 0)], 2);
        let out = shuffle_by_key(&mut c, t, |r| (r.key, 0), &route).unwrap();
        let keys: Vec<Vec<u64>> = out
            .parts
            .iter()
            .map(|p| {
                let mut v: Vec<u64> = p.iter().filter(|r| r.is_real()).map(|r| r.key).collect();
                v.sort_unstable();
                v
            })
            .collect();
        assert_eq!(keys, vec![vec![2, 3], vec![1, 4]]);
    }

    #[test]
    fn co_location_of_10k_keys() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let p = 4;
        let mut parts = vec![Vec::new(); p];
        for (i, part) in parts.iter_mut().enumerate() {
            let mut keys: Vec<u64> = (0..2500).map(|_| rng.random_range(0..4000)).collect();
            keys.sort_unstable();
            keys.dedup();
            part.extend(keys.into_iter().map(|k| Record::left(i as u64, k)));
        }
        let mut c = Cluster::new(ClusterConfig::new(p, 40, 3)).unwrap();
        let h = KeyHasher::new(5, p);
        let out = shuffle_by_key(&mut c, DistTable { schema: vec![], parts }, |r| (r.key, 0), &h).unwrap();
        let mut home: HashMap<u64, usize> = HashMap::new();
        for (s, part) in out.parts.iter().enumerate() {
            for r in part.iter().filter(|r| r.is_real()) {
                assert_eq!(*home.entry(r.key).or_insert(s), s);
                assert_eq!(s + 1, h.route(r.key, 0));
            }
        }
        assert!(home.len() > 1000);
    }

    #[test]
    fn duplicate_local_key_rejected() {
        let mut c = Cluster::new(ClusterConfig::new(2, 40, 1)).unwrap();
        let t = DistTable {
            schema: vec![],
            parts: vec![vec![Record::left(1, 5)], vec![Record::left(1, 5), Record::left(2, 5)]],
        };
        let err = shuffle_by_key(&mut c, t, |r| (r.key, 0), &KeyHasher::new(1, 2)).unwrap_err();
        assert_eq!(err, Error::DuplicateLocalKey { server: 1 });
    }
}
