//! Column sort with servers as columns.
//!
//! Every partition is padded with sentinels to a common column length `r`
//! (`r ≥ 2(p-1)²`, `p | r`, `r` even), then the table goes through four
//! local sorts separated by the fixed permutations transpose, untranspose,
//! shift and unshift. The permutations are public, so every message size
//! is a function of `r` and `p`: `p·r`, `p·r`, `p·r/2`, `p·r/2`.

use super::layout;
use crate::cluster::{Cluster, DistTable, RoundKind};
use crate::oprims::osort;
use crate::record::Record;

type Keyed = (bool, u64);

fn sort_local<F: Fn(&Record) -> u64>(part: &mut Vec<Record>, key: &F) {
    osort(part, |r: &Record| -> Keyed { (r.dummy, key(r)) });
}

/// Sorts the table globally by `key`: afterwards every partition is sorted
/// and all keys on server `i` are at most all keys on server `i + 1`.
/// Dummies sort last. Partition sizes become `r, r, …, rest, 0, …`.
pub fn sort_distributed<F>(cluster: &mut Cluster, table: DistTable, key: F) -> DistTable
where
    F: Fn(&Record) -> u64 + Sync,
{
    let p = cluster.p();
    let DistTable { schema, mut parts } = table;
    let sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
    let n: usize = sizes.iter().sum();
    let r = layout::column_rows(&sizes);
    let half = r / 2;
    let nominal = n as u64;

    cluster.local(&mut parts, |_, part| {
        part.resize(r, Record::dummy());
        sort_local(part, &key);
    });

    // Transpose: row q of column c moves to column q mod p, row c·r/p + q/p.
    // Each receiver gets its rows already in row order.
    let out = cluster.local(&mut parts, |_, part| {
        let mut boxes: Vec<Vec<Record>> = vec![Vec::with_capacity(r / p); p];
        for (q, rec) in std::mem::take(part).into_iter().enumerate() {
            boxes[q % p].push(rec);
        }
        boxes
    });
    parts = cluster.exchange("sort/transpose", RoundKind::Fixed, nominal, None, out);
    cluster.local(&mut parts, |_, part| sort_local(part, &key));

    // Untranspose: row q of column c holds row-major index q·p + c, which
    // belongs to column (q·p + c) / r, row (q·p + c) mod r.
    let out = cluster.local(&mut parts, |c, part| {
        let mut boxes: Vec<Vec<(usize, Record)>> = vec![Vec::with_capacity(r / p); p];
        for (q, rec) in std::mem::take(part).into_iter().enumerate() {
            let idx = q * p + c;
            boxes[idx / r].push((idx % r, rec));
        }
        boxes
    });
    let inbox = cluster.exchange("sort/untranspose", RoundKind::Fixed, nominal, None, out);
    parts = inbox
        .into_iter()
        .map(|msgs| {
            let mut col = vec![Record::dummy(); r];
            for (row, rec) in msgs {
                col[row] = rec;
            }
            col
        })
        .collect();
    cluster.local(&mut parts, |_, part| sort_local(part, &key));

    // Shift down by r/2: the bottom half of column c becomes the top half of
    // column c + 1; the last server also holds the extra column p.
    let out = cluster.local(&mut parts, |c, part| {
        let bottom = part.split_off(half);
        let mut boxes: Vec<Vec<Record>> = vec![Vec::new(); p];
        boxes[(c + 1).min(p - 1)] = bottom;
        boxes
    });
    let inbox = cluster.exchange("sort/shift", RoundKind::Fixed, nominal / 2, None, out);
    // Server c now holds its top half in `parts[c]`; build shifted columns.
    let mut shifted: Vec<(Vec<Record>, Vec<Record>)> = Vec::with_capacity(p);
    let mut carried = inbox;
    for c in 0..p {
        let mut incoming = std::mem::take(&mut carried[c]);
        let mut extra = Vec::new();
        if c == p - 1 && p > 1 {
            // Receives from server p-2 first, then its own bottom half.
            extra = incoming.split_off(half);
        } else if p == 1 {
            extra = std::mem::take(&mut incoming);
        }
        let mut col = incoming;
        col.extend(std::mem::take(&mut parts[c]));
        shifted.push((col, extra));
    }
    let mut cols: Vec<Vec<Record>> = shifted.iter().map(|(c, _)| c.clone()).collect();
    let mut extras: Vec<Vec<Record>> = shifted.into_iter().map(|(_, e)| e).collect();
    cluster.local(&mut cols, |_, col| sort_local(col, &key));
    cluster.local(&mut extras, |_, col| sort_local(col, &key));

    // Unshift: the first half of shifted column c (c ≥ 1) returns to
    // column c - 1; the extra column returns to the last server.
    let out = cluster.local(&mut cols, |c, col| {
        let mut boxes: Vec<Vec<Record>> = vec![Vec::new(); p];
        if c > 0 {
            let rest = col.split_off(half);
            boxes[c - 1] = std::mem::replace(col, rest);
        }
        boxes
    });
    let mut out = out;
    let last = p - 1;
    out[last][last] = std::mem::take(&mut extras[last]);
    let inbox = cluster.exchange("sort/unshift", RoundKind::Fixed, nominal - nominal / 2, None, out);
    parts = cols
        .into_iter()
        .zip(inbox)
        .map(|(mut col, back)| {
            col.extend(back);
            col
        })
        .collect();

    let keep = layout::sorted_sizes(n, r, p);
    for (part, k) in parts.iter_mut().zip(keep) {
        part.truncate(k);
    }
    DistTable { schema, parts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::ClusterConfig;
    use proptest::prelude::*;

    fn run(p: usize, keys: &[u64]) -> (DistTable, u64) {
        let mut c = Cluster::new(ClusterConfig::new(p, 40, 1)).unwrap();
        let rows: Vec<(u64, u64)> = keys.iter().enumerate().map(|(i, &k)| (i as u64, k)).collect();
        let out = sort_distributed(&mut c, DistTable::left(&rows, p), |r| r.key);
        (out, c.transcript().comm_elements())
    }

    #[test]
    fn reversed_36_over_two_servers() {
        let keys: Vec<u64> = (1..=36).rev().collect();
        let (out, comm) = run(2, &keys);
        let got: Vec<u64> = out.rows().map(|r| r.key).collect();
        assert_eq!(got, (1..=36).collect::<Vec<_>>());
        assert_eq!(out.sizes(), vec![18, 18]);
        assert_eq!(comm, 3 * 36);
    }

    #[test]
    fn sorted_input_unchanged() {
        let keys: Vec<u64> = (0..40).collect();
        let (out, _) = run(4, &keys);
        assert_eq!(out.rows().map(|r| r.key).collect::<Vec<_>>(), keys);
    }

    #[test]
    fn single_server() {
        let (out, comm) = run(1, &[5, 3, 9, 1]);
        assert_eq!(out.rows().map(|r| r.key).collect::<Vec<_>>(), vec![1, 3, 5, 9]);
        assert_eq!(comm, 3 * 4);
    }

    proptest! {
        #[test]
        fn matches_reference_sort(p in 1usize..7, keys in proptest::collection::vec(0u64..500, 0..300)) {
            let (out, comm) = run(p, &keys);
            let mut expected = keys.clone();
            expected.sort_unstable();
            prop_assert_eq!(out.rows().map(|r| r.key).collect::<Vec<_>>(), expected);
            let r = layout::column_rows(&DistTable::left(&vec![(0, 0); keys.len()], p).sizes());
            prop_assert_eq!(comm, 3 * (p * r) as u64);
        }
    }
}
