//! Size-only mirror of the operators.
//!
//! Given the public partition sizes, `p`, `σ`, `M` and the master seed,
//! replays every round of an operator and records the message sizes it
//! would produce, without looking at any record. Random shuffles replay the
//! same positional draws from the same seeded streams as the real run.

use super::layout;
use crate::cluster::{purpose, stream_seed, ClusterConfig, Round, RoundKind, Transcript};
use crate::error::{Error, Result};
use crate::oprims::Direction;
use crate::padding::{pad_align, pad_expansion, pad_shuffle_by_key, PaddingPlan};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// An operator together with the public parameters its transcript needs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "operator", rename_all = "kebab-case")]
pub enum OperatorDescriptor {
    Shuffle { bounds: Vec<usize> },
    ShuffleRandom,
    ShuffleByKey,
    Sort,
    Scan { direction: Direction },
    PkJoin { right_sizes: Vec<usize> },
    ComputeDegrees { other_sizes: Vec<usize> },
    InferOutputSize,
    Expand { bound: u64 },
    /// `inferred` adds the two size-aggregation rounds; `bound` is the
    /// resulting public `M` either way.
    Join { right_sizes: Vec<usize>, bound: u64, inferred: bool },
}

impl OperatorDescriptor {
    /// Looks an operator up by its CLI name.
    pub fn named(name: &str, right_sizes: Vec<usize>, bound: u64) -> Result<Self> {
        Ok(match name {
            "shuffle-random" => Self::ShuffleRandom,
            "shuffle-by-key" => Self::ShuffleByKey,
            "sort" => Self::Sort,
            "prefix-scan" => Self::Scan { direction: Direction::Prefix },
            "suffix-scan" => Self::Scan { direction: Direction::Suffix },
            "pkjoin" | "pk-join" => Self::PkJoin { right_sizes },
            "compute-degrees" => Self::ComputeDegrees { other_sizes: right_sizes },
            "infer-output-size" => Self::InferOutputSize,
            "expand" => Self::Expand { bound },
            "join" => Self::Join { right_sizes, bound, inferred: false },
            "join-infer" => Self::Join { right_sizes, bound, inferred: true },
            other => return Err(Error::UnknownOperator(other.to_string())),
        })
    }
}

/// The transcript `descriptor` produces on partitions of size `sizes`.
pub fn simulate_transcript(sizes: &[usize], descriptor: &OperatorDescriptor, config: &ClusterConfig) -> Result<Transcript> {
    config.validate()?;
    if sizes.len() != config.servers {
        return Err(Error::InvalidConfig("one size per server".into()));
    }
    let mut s = Sim::new(config);
    let n = sizes.to_vec();
    match descriptor {
        OperatorDescriptor::Shuffle { bounds } => {
            if bounds.len() != config.servers {
                return Err(Error::InvalidConfig("one bound per sender".into()));
            }
            let caps: Vec<Vec<usize>> = bounds.iter().map(|&u| vec![u; s.p]).collect();
            s.padded("shuffle", &caps, total(&n), None);
        }
        OperatorDescriptor::ShuffleRandom => {
            s.random("shuffle-random", &n);
        }
        OperatorDescriptor::ShuffleByKey => {
            s.shuffle_by_key("shuffle-by-key", &n);
        }
        OperatorDescriptor::Sort => {
            s.sort(&n);
        }
        OperatorDescriptor::Scan { direction } => s.scan_dir(*direction),
        OperatorDescriptor::PkJoin { right_sizes } => s.pk_join(&n, right_sizes),
        OperatorDescriptor::ComputeDegrees { other_sizes } => s.compute_degrees(&n, other_sizes),
        OperatorDescriptor::InferOutputSize => s.infer(),
        OperatorDescriptor::Expand { bound } => {
            s.expand(&n, *bound);
        }
        OperatorDescriptor::Join { right_sizes, bound, inferred } => s.join(&n, right_sizes, *bound, *inferred),
    }
    Ok(s.transcript)
}

fn total(sizes: &[usize]) -> u64 {
    sizes.iter().map(|&s| s as u64).sum()
}

struct Sim {
    p: usize,
    sigma: u32,
    seed: u64,
    transcript: Transcript,
}

impl Sim {
    fn new(config: &ClusterConfig) -> Self {
        Sim {
            p: config.servers,
            sigma: config.sigma,
            seed: config.master_seed,
            transcript: Transcript::new(config.servers, config.element_width),
        }
    }

    fn push(&mut self, label: &str, kind: RoundKind, sizes: Vec<Vec<usize>>, nominal: u64, plan: Option<PaddingPlan>) {
        let index = self.transcript.rounds.len();
        self.transcript.push(Round {
            index,
            label: label.to_string(),
            kind,
            sizes,
            nominal,
            plan,
        });
    }

    /// Receiver sizes of a matrix.
    fn received(sizes: &[Vec<usize>]) -> Vec<usize> {
        let p = sizes.len();
        (0..p).map(|j| sizes.iter().map(|row| row[j]).sum()).collect()
    }

    fn padded(&mut self, label: &str, caps: &[Vec<usize>], nominal: u64, plan: Option<PaddingPlan>) -> Vec<usize> {
        let sizes = caps.to_vec();
        let out = Self::received(&sizes);
        self.push(label, RoundKind::Padded, sizes, nominal, plan);
        out
    }

    fn random(&mut self, label: &str, n: &[usize]) -> Vec<usize> {
        let round = self.transcript.rounds.len();
        let sizes: Vec<Vec<usize>> = n
            .iter()
            .enumerate()
            .map(|(i, &ni)| {
                let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(self.seed, round, i, purpose::RANDOM_SHUFFLE));
                let mut row = vec![0usize; self.p];
                for t in layout::random_targets(&mut rng, ni, self.p) {
                    row[t] += 1;
                }
                row
            })
            .collect();
        let out = Self::received(&sizes);
        self.push(label, RoundKind::Random, sizes, total(n), None);
        out
    }

    fn shuffle_by_key(&mut self, label: &str, n: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let plan = pad_shuffle_by_key(n, self.p, self.sigma);
        let bounds = plan.bounds.clone();
        let caps: Vec<Vec<usize>> = bounds.iter().map(|&u| vec![u; self.p]).collect();
        (self.padded(label, &caps, total(n), Some(plan)), bounds)
    }

    fn sort(&mut self, n: &[usize]) -> Vec<usize> {
        let p = self.p;
        let r = layout::column_rows(n);
        let nn = total(n);
        let full = vec![vec![r / p; p]; p];
        self.push("sort/transpose", RoundKind::Fixed, full.clone(), nn, None);
        self.push("sort/untranspose", RoundKind::Fixed, full, nn, None);
        let mut shift = vec![vec![0; p]; p];
        for (c, row) in shift.iter_mut().enumerate() {
            row[(c + 1).min(p - 1)] = r / 2;
        }
        self.push("sort/shift", RoundKind::Fixed, shift, nn / 2, None);
        let mut unshift = vec![vec![0; p]; p];
        for (c, row) in unshift.iter_mut().enumerate().skip(1) {
            row[c - 1] = r / 2;
        }
        unshift[p - 1][p - 1] = r / 2;
        self.push("sort/unshift", RoundKind::Fixed, unshift, nn - nn / 2, None);
        layout::sorted_sizes(nn as usize, r, p)
    }

    fn scan_with_hub(&mut self, hub: usize) {
        let p = self.p;
        let mut gather = vec![vec![0; p]; p];
        let mut scatter = vec![vec![0; p]; p];
        for i in (0..p).filter(|&i| i != hub) {
            gather[i][hub] = 1;
            scatter[hub][i] = 1;
        }
        self.push("scan/partials", RoundKind::Fixed, gather, 0, None);
        self.push("scan/offsets", RoundKind::Fixed, scatter, 0, None);
    }

    fn scan_dir(&mut self, direction: Direction) {
        match direction {
            Direction::Prefix => self.scan_with_hub(0),
            Direction::Suffix => self.scan_with_hub(self.p - 1),
        }
    }

    fn infer(&mut self) {
        let p = self.p;
        let mut gather = vec![vec![0; p]; p];
        let mut bcast = vec![vec![0; p]; p];
        for i in 1..p {
            gather[i][0] = 1;
            bcast[0][i] = 1;
        }
        self.push("size/gather", RoundKind::Fixed, gather, 0, None);
        self.push("size/broadcast", RoundKind::Fixed, bcast, 0, None);
    }

    fn pk_join(&mut self, left: &[usize], right: &[usize]) {
        let (_, bounds) = self.shuffle_by_key("pk/forward-left", left);
        self.shuffle_by_key("pk/forward-right", right);
        let caps: Vec<Vec<usize>> = (0..self.p).map(|_| bounds.clone()).collect();
        self.padded("pk/back", &caps, total(left), None);
    }

    fn compute_degrees(&mut self, own: &[usize], other: &[usize]) {
        for _ in 0..2 {
            self.scan_dir(Direction::Prefix);
            self.scan_dir(Direction::Suffix);
        }
        self.pk_join(own, other);
    }

    fn expand(&mut self, n: &[usize], bound: u64) -> Vec<usize> {
        let p = self.p;
        let m = layout::share(bound, p);
        let nn = total(n);
        self.scan_dir(Direction::Prefix);
        let after = self.random("expand/sf0", n);
        let plan = pad_expansion(&after, nn, bound, p, self.sigma);
        let caps: Vec<Vec<usize>> = plan.bounds.iter().map(|&u| vec![u; p]).collect();
        self.padded("expand/sf1", &caps, (p as u64 * m).min(nn * p as u64), Some(plan));
        self.scan_dir(Direction::Suffix);
        vec![m as usize; p]
    }

    fn join(&mut self, left: &[usize], right: &[usize], bound: u64, inferred: bool) {
        let p = self.p;
        let left = self.sort(left);
        let right = self.sort(right);
        self.compute_degrees(&left, &right);
        if inferred {
            self.infer();
        }
        self.compute_degrees(&right, &left);
        self.expand(&left, bound);
        let sbar = self.expand(&right, bound);
        let m = layout::share(bound, p);
        self.scan_dir(Direction::Prefix);
        self.scan_dir(Direction::Prefix);
        let after = self.random("align/sf0", &sbar);
        let plan = pad_align(&after, p, self.sigma).limit(m as usize);
        let caps: Vec<Vec<usize>> = plan.bounds.iter().map(|&u| vec![u; p]).collect();
        self.padded("align/sf1", &caps, p as u64 * m, Some(plan));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{Cluster, DistTable};
    use crate::relops::{self, Bound};
    use crate::record::Record;

    fn config(p: usize) -> ClusterConfig {
        ClusterConfig::new(p, 40, 99)
    }

    #[test]
    fn uniform_shuffle_by_key_sizes() {
        let t = simulate_transcript(&[1000; 4], &OperatorDescriptor::ShuffleByKey, &config(4)).unwrap();
        let u = crate::padding::shuffle_by_key_bound(1000, 4, 40).1;
        assert!(t.rounds[0].sizes.iter().flatten().all(|&s| s == u));
    }

    #[test]
    fn single_server_is_self_only() {
        let t = simulate_transcript(&[10], &OperatorDescriptor::Scan { direction: Direction::Prefix }, &config(1)).unwrap();
        assert!(t.entries().iter().all(|e| e.elements == 0 && e.sender == e.receiver));
    }

    #[test]
    fn unknown_name() {
        assert_eq!(
            OperatorDescriptor::named("hash-join", vec![], 0),
            Err(Error::UnknownOperator("hash-join".into()))
        );
    }

    #[test]
    fn mirrors_real_runs() {
        let p = 3;
        let r: Vec<(u64, u64)> = (0..40).map(|i| (i, i % 7)).collect();
        let s: Vec<(u64, u64)> = (0..25).map(|i| (i % 9, i)).collect();
        let rt = DistTable::left(&r, p);
        let st = DistTable::right(&s, p);

        let mut c = Cluster::new(config(p)).unwrap();
        let out = relops::join(&mut c, rt.clone(), st.clone(), Bound::Infer).unwrap();
        let desc = OperatorDescriptor::Join { right_sizes: st.sizes(), bound: out.bound, inferred: true };
        let sim = simulate_transcript(&rt.sizes(), &desc, &config(p)).unwrap();
        assert_eq!(c.transcript(), &sim);

        let mut c = Cluster::new(config(p)).unwrap();
        let counted = DistTable::from_rows(vec![], (0..9).map(|i| Record::counted(i, i, i % 3)).collect(), p);
        relops::expand(&mut c, counted.clone(), 12).unwrap();
        let sim = simulate_transcript(&counted.sizes(), &OperatorDescriptor::Expand { bound: 12 }, &config(p)).unwrap();
        assert_eq!(c.transcript(), &sim);
    }
}
