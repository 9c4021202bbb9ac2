//! Transcript equality across same-size inputs.

use super::oracle::oracle_join_size;
use super::{AuditVerdict, Reference, Witness};
use crate::cluster::{purpose, stream_seed, Cluster, ClusterConfig, DistTable, RoundKind, Transcript};
use crate::error::{Error, Result};
use crate::oprims::{Direction, Sum};
use crate::record::Record;
use crate::relops::{self, Bound, KeyHasher, OperatorDescriptor, Role};
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Operators the transcript check knows how to drive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommOperator {
    ShuffleByKey,
    ShuffleRandom,
    Sort,
    PrefixScan,
    SuffixScan,
    PkJoin,
    ComputeDegrees,
    Expand,
    /// Join with the public bound of the size profile.
    Join,
    /// Join with the bound inferred from the data. Trials relabel the keys
    /// of one base instance, which keeps the output size fixed.
    JoinInfer,
    /// Negative control: routes by `key mod p` with no padding.
    LeakyShuffle,
}

impl CommOperator {
    pub const PADDED: [CommOperator; 10] = [
        CommOperator::ShuffleByKey,
        CommOperator::ShuffleRandom,
        CommOperator::Sort,
        CommOperator::PrefixScan,
        CommOperator::SuffixScan,
        CommOperator::PkJoin,
        CommOperator::ComputeDegrees,
        CommOperator::Expand,
        CommOperator::Join,
        CommOperator::JoinInfer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CommOperator::ShuffleByKey => "shuffle-by-key",
            CommOperator::ShuffleRandom => "shuffle-random",
            CommOperator::Sort => "sort",
            CommOperator::PrefixScan => "prefix-scan",
            CommOperator::SuffixScan => "suffix-scan",
            CommOperator::PkJoin => "pkjoin",
            CommOperator::ComputeDegrees => "compute-degrees",
            CommOperator::Expand => "expand",
            CommOperator::Join => "join",
            CommOperator::JoinInfer => "join-infer",
            CommOperator::LeakyShuffle => "leaky-shuffle",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::PADDED
            .into_iter()
            .chain([CommOperator::LeakyShuffle])
            .find(|o| o.name() == name)
            .ok_or_else(|| Error::UnknownOperator(name.to_string()))
    }
}

/// Public sizes every trial input shares.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeProfile {
    /// Partition sizes of the (left) input.
    pub left: Vec<usize>,
    /// Partition sizes of the right input, for two-table operators.
    pub right: Vec<usize>,
    /// `M` for expansion and joins with a given bound.
    pub bound: u64,
}

impl SizeProfile {
    /// Balanced sizes for `n1` and `n2` rows over `p` servers.
    pub fn balanced(p: usize, n1: usize, n2: usize, bound: u64) -> Self {
        let split = |n: usize| (0..p).map(|i| n / p + (i < n % p) as usize).collect();
        SizeProfile {
            left: split(n1),
            right: split(n2),
            bound,
        }
    }
}

/// Runs `operator` on `trials` random inputs with the profile's sizes, all
/// under `config`'s seed, and checks that every transcript equals the
/// first trial's and the simulator's.
pub fn check_comm_oblivious(
    operator: CommOperator,
    profile: &SizeProfile,
    trials: usize,
    config: &ClusterConfig,
    data_seed: u64,
) -> AuditVerdict {
    let check_id = format!("comm-oblivious/{}", operator.name());
    let p = config.servers;
    if config.validate().is_err() || profile.left.len() != p || profile.right.len() != p {
        return AuditVerdict::fail(
            &check_id,
            trials,
            Witness::Error {
                trial: 0,
                message: "size profile does not match the cluster".into(),
            },
        );
    }
    let base = (operator == CommOperator::JoinInfer).then(|| base_join(profile, data_seed));
    let runs: Vec<Result<(Transcript, u64)>> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(operator, profile, config, data_seed, t, base.as_ref()))
        .collect();

    let mut first: Option<&Transcript> = None;
    let mut reference: Option<Transcript> = None;
    for (trial, run) in runs.iter().enumerate() {
        let (transcript, bound) = match run {
            Ok(r) => r,
            Err(e) => {
                return AuditVerdict::fail(
                    &check_id,
                    trials,
                    Witness::Error {
                        trial,
                        message: e.to_string(),
                    },
                )
            }
        };
        match first {
            None => first = Some(transcript),
            Some(f) => {
                if let Some(divergence) = f.first_divergence(transcript) {
                    return AuditVerdict::fail(
                        &check_id,
                        trials,
                        Witness::Transcript {
                            trial,
                            against: Reference::FirstTrial,
                            divergence,
                        },
                    );
                }
            }
        }
        if reference.is_none() {
            let desc = descriptor(operator, profile, *bound);
            match relops::simulate_transcript(&profile.left, &desc, config) {
                Ok(s) => reference = Some(s),
                Err(e) => {
                    return AuditVerdict::fail(
                        &check_id,
                        trials,
                        Witness::Error {
                            trial,
                            message: e.to_string(),
                        },
                    )
                }
            }
        }
        if let Some(divergence) = reference.as_ref().and_then(|s| s.first_divergence(transcript)) {
            return AuditVerdict::fail(
                &check_id,
                trials,
                Witness::Transcript {
                    trial,
                    against: Reference::Simulator,
                    divergence,
                },
            );
        }
    }
    AuditVerdict::pass(&check_id, trials)
}

fn descriptor(operator: CommOperator, profile: &SizeProfile, bound: u64) -> OperatorDescriptor {
    let right_sizes = profile.right.clone();
    match operator {
        CommOperator::ShuffleByKey | CommOperator::LeakyShuffle => OperatorDescriptor::ShuffleByKey,
        CommOperator::ShuffleRandom => OperatorDescriptor::ShuffleRandom,
        CommOperator::Sort => OperatorDescriptor::Sort,
        CommOperator::PrefixScan => OperatorDescriptor::Scan {
            direction: Direction::Prefix,
        },
        CommOperator::SuffixScan => OperatorDescriptor::Scan {
            direction: Direction::Suffix,
        },
        CommOperator::PkJoin => OperatorDescriptor::PkJoin { right_sizes },
        CommOperator::ComputeDegrees => OperatorDescriptor::ComputeDegrees { other_sizes: right_sizes },
        CommOperator::Expand => OperatorDescriptor::Expand { bound },
        CommOperator::Join => OperatorDescriptor::Join {
            right_sizes,
            bound,
            inferred: false,
        },
        CommOperator::JoinInfer => OperatorDescriptor::Join {
            right_sizes,
            bound,
            inferred: true,
        },
    }
}

fn trial_rng(data_seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(data_seed, trial, 0, purpose::GENERATOR))
}

fn keys_from(rng: &mut ChaCha8Rng, n: usize, domain: u64) -> Vec<u64> {
    (0..n).map(|_| rng.random_range(1..=domain)).collect()
}

fn distinct_keys(rng: &mut ChaCha8Rng, n: usize, domain: usize) -> Vec<u64> {
    index::sample(rng, domain.max(n), n).into_iter().map(|k| k as u64 + 1).collect()
}

fn left_table(keys: &[u64], sizes: &[usize]) -> DistTable {
    let rows = keys.iter().enumerate().map(|(i, &k)| Record::left(i as u64, k)).collect();
    DistTable::with_sizes(vec!["A".into(), "B".into()], rows, sizes)
}

fn right_table(keys: &[u64], sizes: &[usize]) -> DistTable {
    let rows = keys.iter().enumerate().map(|(i, &k)| Record::right(k, i as u64)).collect();
    DistTable::with_sizes(vec!["B".into(), "C".into()], rows, sizes)
}

/// Join keys whose output stays within `bound`; widens the key domain
/// until a draw fits.
fn bounded_join_keys(rng: &mut ChaCha8Rng, n1: usize, n2: usize, bound: u64) -> (Vec<u64>, Vec<u64>) {
    let mut domain = rng.random_range(1..=(n1 + n2).max(1) as u64);
    loop {
        let l = keys_from(rng, n1, domain);
        let r = keys_from(rng, n2, domain);
        if oracle_join_size(&l, &r) <= bound {
            return (l, r);
        }
        domain = domain.saturating_mul(2);
    }
}

fn base_join(profile: &SizeProfile, data_seed: u64) -> (Vec<u64>, Vec<u64>) {
    let mut rng = trial_rng(data_seed, usize::MAX);
    let n1: usize = profile.left.iter().sum();
    let n2: usize = profile.right.iter().sum();
    let domain = rng.random_range(1..=(n1 + n2).max(1) as u64);
    (keys_from(&mut rng, n1, domain), keys_from(&mut rng, n2, domain))
}

/// Applies a random injective relabeling to the keys and shuffles rows.
fn relabel(rng: &mut ChaCha8Rng, base: &(Vec<u64>, Vec<u64>)) -> (Vec<u64>, Vec<u64>) {
    let mut distinct: Vec<u64> = base.0.iter().chain(&base.1).copied().collect();
    distinct.sort_unstable();
    distinct.dedup();
    let fresh = distinct_keys(rng, distinct.len(), 1 << 40);
    let map = |k: &u64| fresh[distinct.binary_search(k).unwrap()];
    let mut l: Vec<u64> = base.0.iter().map(map).collect();
    let mut r: Vec<u64> = base.1.iter().map(map).collect();
    l.shuffle(rng);
    r.shuffle(rng);
    (l, r)
}

fn run_trial(
    operator: CommOperator,
    profile: &SizeProfile,
    config: &ClusterConfig,
    data_seed: u64,
    trial: usize,
    base: Option<&(Vec<u64>, Vec<u64>)>,
) -> Result<(Transcript, u64)> {
    let mut rng = trial_rng(data_seed, trial);
    let mut cluster = Cluster::new(config.clone())?;
    let p = config.servers;
    let n1: usize = profile.left.iter().sum();
    let n2: usize = profile.right.iter().sum();
    let domain = rng.random_range(1..=(2 * n1).max(1) as u64);
    let mut bound = profile.bound;
    match operator {
        CommOperator::ShuffleByKey => {
            let t = left_table(&distinct_keys(&mut rng, n1, 4 * n1), &profile.left);
            let router = KeyHasher::new(stream_seed(config.master_seed, 0, 0, purpose::HASH_SEED), p);
            relops::shuffle_by_key(&mut cluster, t, |r| (r.key, 0), &router)?;
        }
        CommOperator::ShuffleRandom => {
            relops::shuffle_random(&mut cluster, left_table(&keys_from(&mut rng, n1, domain), &profile.left));
        }
        CommOperator::Sort => {
            relops::sort_distributed(&mut cluster, left_table(&keys_from(&mut rng, n1, domain), &profile.left), |r| r.key);
        }
        CommOperator::PrefixScan | CommOperator::SuffixScan => {
            let dir = if operator == CommOperator::PrefixScan {
                Direction::Prefix
            } else {
                Direction::Suffix
            };
            let mut t = left_table(&keys_from(&mut rng, n1, domain), &profile.left);
            relops::scan_records(&mut cluster, &mut t, dir, &Sum, |r| r.key, |r, v| r.position = v);
        }
        CommOperator::PkJoin => {
            let rk = distinct_keys(&mut rng, n2, 2 * n2 + 1);
            let lk = keys_from(&mut rng, n1, 2 * n2 as u64 + 1);
            relops::pk_join(&mut cluster, left_table(&lk, &profile.left), right_table(&rk, &profile.right))?;
        }
        CommOperator::ComputeDegrees => {
            let mut lk = keys_from(&mut rng, n1, domain);
            let mut rk = keys_from(&mut rng, n2, domain);
            lk.sort_unstable();
            rk.sort_unstable();
            let other = right_table(&rk, &profile.right);
            relops::compute_degrees(&mut cluster, left_table(&lk, &profile.left), &other, Role::R)?;
        }
        CommOperator::Expand => {
            let budget = rng.random_range(0..=bound);
            let mut cuts: Vec<u64> = (0..n1.saturating_sub(1)).map(|_| rng.random_range(0..=budget)).collect();
            cuts.push(0);
            cuts.push(budget);
            cuts.sort_unstable();
            let rows: Vec<Record> = cuts.windows(2).enumerate().map(|(i, w)| Record::counted(i as u64, 1, w[1] - w[0])).collect();
            let rows = if n1 == 0 { Vec::new() } else { rows };
            let t = DistTable::with_sizes(vec!["X".into(), "D".into()], rows, &profile.left);
            relops::expand(&mut cluster, t, bound)?;
        }
        CommOperator::Join => {
            let (lk, rk) = bounded_join_keys(&mut rng, n1, n2, bound);
            relops::join(&mut cluster, left_table(&lk, &profile.left), right_table(&rk, &profile.right), Bound::Given(bound))?;
        }
        CommOperator::JoinInfer => {
            let (lk, rk) = relabel(&mut rng, base.expect("base instance"));
            let out = relops::join(&mut cluster, left_table(&lk, &profile.left), right_table(&rk, &profile.right), Bound::Infer)?;
            bound = out.bound;
        }
        CommOperator::LeakyShuffle => {
            let mut t = left_table(&keys_from(&mut rng, n1, domain), &profile.left);
            let nominal = n1 as u64;
            let outboxes = cluster.local(&mut t.parts, |_, part| {
                let mut out: Vec<Vec<Record>> = vec![Vec::new(); p];
                for r in part.drain(..) {
                    out[(r.key % p as u64) as usize].push(r);
                }
                out
            });
            cluster.exchange("leaky-shuffle", RoundKind::Fixed, nominal, None, outboxes);
        }
    }
    Ok((cluster.into_transcript(), bound))
}
