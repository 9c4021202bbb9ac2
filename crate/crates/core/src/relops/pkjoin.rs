//! Join against a table whose key is unique (left-outer).
//!
//! Within each server one left row per key (the representative, rank 0)
//! is routed by key; the others get distinct positive ranks and therefore
//! hash to independent servers. Representatives pick up the right row's
//! value locally, travel back to their origin server through a shuffle
//! with the forward bounds transposed, and hand the value to the rest of
//! their local key run.

use super::hasher::{KeyHasher, KeyRouter};
use super::shuffle::shuffle_by_key_parts;
use super::{padded_exchange, total};
use crate::cluster::{purpose, stream_seed, Cluster, DistTable};
use crate::error::{Error, Result};
use crate::oprims::{counters, ocompact, osort, Slots};
use crate::record::{Cmov, Record};

/// `R ⋈ S` where `S.B` is a primary key: every left row gets `c` of the
/// matching right row, or `has_c = false` if none exists. The output stays
/// on the left row's server.
pub fn pk_join(cluster: &mut Cluster, left: DistTable, right: DistTable) -> Result<DistTable> {
    let router = KeyHasher::new(
        stream_seed(cluster.config().master_seed, cluster.next_round(), 0, purpose::HASH_SEED),
        cluster.p(),
    );
    pk_join_with(cluster, left, right, &router)
}

/// [`pk_join`] with an explicit key router.
pub fn pk_join_with(
    cluster: &mut Cluster,
    left: DistTable,
    mut right: DistTable,
    router: &dyn KeyRouter,
) -> Result<DistTable> {
    for r in right.parts.iter_mut().flatten() {
        r.carry = r.c;
        r.has_carry = r.has_c;
    }
    let mut out = pk_join_carry(cluster, left, right, router)?;
    for r in out.parts.iter_mut().flatten() {
        r.c = r.carry;
        r.has_c = r.has_carry;
        r.carry = 0;
        r.has_carry = false;
    }
    Ok(out)
}

/// Core of the PK join: moves `(carry, has_carry)` from right rows to the
/// left rows with the same key. Left rows without a partner end with
/// `has_carry = false`.
pub(crate) fn pk_join_carry(
    cluster: &mut Cluster,
    left: DistTable,
    right: DistTable,
    router: &dyn KeyRouter,
) -> Result<DistTable> {
    let p = cluster.p();
    let DistTable { schema, mut parts } = left;
    let home_sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
    let n1 = total(&parts);

    cluster.local(&mut parts, |i, part| {
        osort(part, |r: &Record| (r.dummy, r.key));
        for j in 0..part.len() {
            let mut cur = part.read(j);
            cur.origin = i as u64 + 1;
            cur.inactive_rank = 0;
            cur.carry = 0;
            cur.has_carry = false;
            if j > 0 {
                let prev = part.read(j - 1);
                cur.inactive_rank.cmov(&(j as u64), cur.key == prev.key);
                counters::comparison();
            }
            part.write(j, cur);
        }
    });

    let mut rparts = right.parts;
    cluster.local(&mut rparts, |_, part| {
        for r in part.iter_mut() {
            r.origin = 0;
            r.inactive_rank = 0;
        }
    });

    let (lparts, bounds) =
        shuffle_by_key_parts(cluster, parts, &|r: &Record| (r.key, r.inactive_rank), router, "pk/forward-left")?;
    let (rparts, _) = shuffle_by_key_parts(cluster, rparts, &|r: &Record| (r.key, 0), router, "pk/forward-right")
        .map_err(|e| match e {
            Error::DuplicateLocalKey { .. } => Error::DuplicatePrimaryKey,
            other => other,
        })?;

    let mut merged: Vec<Vec<Record>> = lparts
        .into_iter()
        .zip(rparts)
        .map(|(mut l, r)| {
            l.extend(r);
            l
        })
        .collect();
    // Every server received exactly this many left slots.
    let recv: usize = bounds.iter().sum();
    let dups = cluster.local(&mut merged, |_, v| {
        osort(v, |r: &Record| (r.dummy, r.key, r.origin != 0, r.inactive_rank));
        let mut dup = false;
        for j in 1..v.len() {
            let prev = v.read(j - 1);
            let mut cur = v.read(j);
            let same = !prev.dummy & !cur.dummy & (prev.key == cur.key);
            let take = same & (cur.origin != 0) & (cur.inactive_rank == 0);
            cur.carry.cmov(&prev.carry, take);
            cur.has_carry.cmov(&prev.has_carry, take);
            dup |= same & (prev.origin == 0) & (cur.origin == 0);
            counters::comparison();
            v.write(j, cur);
        }
        let marks: Vec<bool> = v.iter().map(|r| !r.dummy & (r.origin != 0)).collect();
        ocompact(v, &marks);
        v.truncate(recv);
        dup
    });
    if dups.iter().any(|&d| d) {
        return Err(Error::DuplicatePrimaryKey);
    }

    // Server j returns at most bounds[k] rows to origin k: that many arrived.
    let caps: Vec<Vec<usize>> = (0..p).map(|_| bounds.clone()).collect();
    let mut parts = padded_exchange(cluster, merged, |r: &Record| r.origin as usize, &caps, "pk/back", n1, None)?;

    cluster.local(&mut parts, |k, part| {
        osort(part, |r: &Record| (r.dummy, r.key, r.inactive_rank));
        for j in 1..part.len() {
            let prev = part.read(j - 1);
            let mut cur = part.read(j);
            let same = !cur.dummy & (prev.key == cur.key);
            cur.carry.cmov(&prev.carry, same);
            cur.has_carry.cmov(&prev.has_carry, same);
            counters::comparison();
            part.write(j, cur);
        }
        part.truncate(home_sizes[k]);
        for r in part.iter_mut() {
            r.origin = 0;
            r.inactive_rank = 0;
            r.target = 0;
            r.scratch = 0;
        }
    });
    Ok(DistTable { schema, parts })
}
