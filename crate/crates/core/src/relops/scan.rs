//! Distributed prefix and suffix scans with `2(p-1)` elements of traffic.
//!
//! Prefix: servers `2..p` send their local totals to server 1, which sends
//! back to each server `i ≥ 2` the combined total of servers `1..i-1`.
//! Suffix scans mirror this with server `p` as the aggregator.

use crate::cluster::{Cluster, DistTable, RoundKind};
use crate::oprims::{counters, scan_local, Direction, ScanOperator};
use crate::record::Record;

/// Scans value partitions in partition order.
pub fn scan_distributed<O>(
    cluster: &mut Cluster,
    mut values: Vec<Vec<O::Value>>,
    direction: Direction,
    op: &O,
) -> Vec<Vec<O::Value>>
where
    O: ScanOperator + Sync,
    O::Value: Send + Sync,
{
    let p = cluster.p();
    let totals = cluster.local(&mut values, |_, vals| {
        scan_local(vals, direction, op);
        let edge = match direction {
            Direction::Prefix => vals.last(),
            Direction::Suffix => vals.first(),
        };
        edge.copied().unwrap_or_else(|| op.identity())
    });
    let hub = match direction {
        Direction::Prefix => 0,
        Direction::Suffix => p - 1,
    };

    let mut out: Vec<Vec<Vec<O::Value>>> = (0..p).map(|_| (0..p).map(|_| Vec::new()).collect()).collect();
    for (i, t) in totals.iter().enumerate() {
        if i != hub {
            out[i][hub].push(*t);
        }
    }
    let inbox = cluster.exchange("scan/partials", RoundKind::Fixed, 0, None, out);

    // The hub sees every total: its own plus the p-1 received ones.
    let mut seen = inbox.into_iter().nth(hub).unwrap_or_default().into_iter();
    let all: Vec<O::Value> = (0..p)
        .map(|i| if i == hub { totals[hub] } else { seen.next().expect("one total per server") })
        .collect();
    let mut offsets = vec![op.identity(); p];
    match direction {
        Direction::Prefix => {
            for i in 1..p {
                offsets[i] = op.combine(&offsets[i - 1], &all[i - 1]);
            }
        }
        Direction::Suffix => {
            for i in (0..p.saturating_sub(1)).rev() {
                offsets[i] = op.combine(&all[i + 1], &offsets[i + 1]);
            }
        }
    }
    let mut out: Vec<Vec<Vec<O::Value>>> = (0..p).map(|_| (0..p).map(|_| Vec::new()).collect()).collect();
    for (j, off) in offsets.iter().enumerate() {
        if j != hub {
            out[hub][j].push(*off);
        }
    }
    let inbox = cluster.exchange("scan/offsets", RoundKind::Fixed, 0, None, out);
    let received: Vec<O::Value> = inbox
        .into_iter()
        .enumerate()
        .map(|(j, msg)| if j == hub { op.identity() } else { msg[0] })
        .collect();

    cluster.local(&mut values, |j, vals| {
        let off = received[j];
        for v in vals.iter_mut() {
            *v = match direction {
                Direction::Prefix => op.combine(&off, v),
                Direction::Suffix => op.combine(v, &off),
            };
            counters::cmove();
        }
    });
    values
}

/// Scans a value extracted from every record and writes the result back.
pub fn scan_records<O, E, A>(
    cluster: &mut Cluster,
    table: &mut DistTable,
    direction: Direction,
    op: &O,
    extract: E,
    apply: A,
) where
    O: ScanOperator + Sync,
    O::Value: Send + Sync,
    E: Fn(&Record) -> O::Value + Sync,
    A: Fn(&mut Record, O::Value) + Sync,
{
    let values = cluster.local(&mut table.parts, |_, part| part.iter().map(&extract).collect());
    let values = scan_distributed(cluster, values, direction, op);
    let mut zipped: Vec<(Vec<Record>, Vec<O::Value>)> = std::mem::take(&mut table.parts).into_iter().zip(values).collect();
    cluster.local(&mut zipped, |_, (part, vals)| {
        for (r, v) in part.iter_mut().zip(vals.iter()) {
            apply(r, *v);
        }
    });
    table.parts = zipped.into_iter().map(|(p, _)| p).collect();
}
