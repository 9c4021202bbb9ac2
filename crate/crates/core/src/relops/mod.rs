//! Distributed oblivious operators.
//!
//! Every operator is a cluster program over [`DistTable<Record>`]: local
//! phases use only the primitives in [`crate::oprims`], and every exchange
//! has sizes that depend on public quantities (partition sizes, `p`, `σ`,
//! the output bound `M`) and the seeded random streams alone.
//!
//! [`DistTable<Record>`]: crate::cluster::DistTable

mod degrees;
mod expand;
mod hasher;
mod join;
pub mod layout;
mod pkjoin;
mod scan;
mod shuffle;
pub mod sim;
mod sort;

pub use degrees::{compute_degrees, infer_output_size, Role};
pub use expand::expand;
pub use hasher::{FnRouter, KeyHasher, KeyRouter};
pub use join::{join, Bound, JoinOutput};
pub use pkjoin::{pk_join, pk_join_with};
pub use scan::{scan_distributed, scan_records};
pub use shuffle::{shuffle, shuffle_by_key, shuffle_random};
pub use sim::{simulate_transcript, OperatorDescriptor};
pub use sort::sort_distributed;

pub(crate) use pkjoin::pk_join_carry;

use crate::cluster::{Cluster, RoundKind};
use crate::error::{Error, Result};
use crate::oprims::{opartition_quick, split_buckets};
use crate::padding::PaddingPlan;
use crate::record::Record;

/// Rewrites a primitive's overflow error with the server and stage.
fn at(e: Error, server: usize, stage: &str) -> Error {
    match e {
        Error::PaddingOverflow { .. } => Error::PaddingOverflow {
            server,
            stage: stage.to_string(),
        },
        other => other,
    }
}

/// Partitions every server's records by `target` into buckets of sizes
/// `caps[i]` (one per receiver) and exchanges them.
pub(crate) fn padded_exchange<F>(
    cluster: &mut Cluster,
    mut parts: Vec<Vec<Record>>,
    target: F,
    caps: &[Vec<usize>],
    label: &str,
    nominal: u64,
    plan: Option<PaddingPlan>,
) -> Result<Vec<Vec<Record>>>
where
    F: Fn(&Record) -> usize + Sync,
{
    let outboxes = cluster.try_local(&mut parts, |i, part| {
        opartition_quick(part, &target, &caps[i]).map_err(|e| at(e, i, label))?;
        Ok(split_buckets(std::mem::take(part), &caps[i]))
    })?;
    Ok(cluster.exchange(label, RoundKind::Padded, nominal, plan, outboxes))
}

fn total(parts: &[Vec<Record>]) -> u64 {
    parts.iter().map(|p| p.len() as u64).sum()
}
