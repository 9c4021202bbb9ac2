//! Deterministic in-process simulation of a p-server cluster.
//!
//! Servers exchange owned buffers in rounds. Every exchange records a full
//! p×p matrix of message sizes, zero entries included, which is exactly
//! what a network observer sees.

mod report;
mod table;
mod transcript;

pub use report::{BoundCheck, CostReport, DatasetStats, Totals};
pub use table::DistTable;
pub use crate::relops::sim::{simulate_transcript, OperatorDescriptor};
pub use transcript::{Divergence, Round, RoundKind, Transcript, TranscriptEntry};

use crate::error::{Error, Result};
use crate::oprims::counters::{self, OpCounts};
use crate::padding::PaddingPlan;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Bytes per serialized record on the wire.
pub const DEFAULT_ELEMENT_WIDTH: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterConfig {
    pub servers: usize,
    pub sigma: u32,
    pub element_width: usize,
    pub master_seed: u64,
}

impl ClusterConfig {
    pub fn new(servers: usize, sigma: u32, master_seed: u64) -> Self {
        ClusterConfig {
            servers,
            sigma,
            element_width: DEFAULT_ELEMENT_WIDTH,
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.servers == 0 {
            return Err(Error::InvalidConfig("need at least one server".into()));
        }
        if self.sigma == 0 {
            return Err(Error::InvalidConfig("sigma must be at least 1".into()));
        }
        if self.element_width == 0 {
            return Err(Error::InvalidConfig("element width must be at least 1".into()));
        }
        Ok(())
    }
}

/// Purposes that select independent random streams.
pub mod purpose {
    pub const RANDOM_SHUFFLE: u64 = 1;
    pub const HASH_SEED: u64 = 2;
    pub const GENERATOR: u64 = 3;
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the stream owned by `(round, server, purpose)`.
pub fn stream_seed(master: u64, round: usize, server: usize, purpose: u64) -> u64 {
    let mut h = splitmix(master);
    for x in [round as u64, server as u64, purpose] {
        h = splitmix(h ^ x);
    }
    h
}

pub struct Cluster {
    config: ClusterConfig,
    transcript: Transcript,
    counters: Vec<OpCounts>,
}

impl Cluster {
    pub fn new(config: ClusterConfig) -> Result<Self> {
        config.validate()?;
        let p = config.servers;
        Ok(Cluster {
            transcript: Transcript::new(p, config.element_width),
            counters: vec![OpCounts::default(); p],
            config,
        })
    }

    pub fn p(&self) -> usize {
        self.config.servers
    }

    pub fn sigma(&self) -> u32 {
        self.config.sigma
    }

    pub fn config(&self) -> &ClusterConfig {
        &self.config
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn counters(&self) -> &[OpCounts] {
        &self.counters
    }

    /// Index the next exchange will get.
    pub fn next_round(&self) -> usize {
        self.transcript.rounds.len()
    }

    /// Random stream of `server` for the next round.
    pub fn rng(&self, server: usize, purpose: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(stream_seed(
            self.config.master_seed,
            self.next_round(),
            server,
            purpose,
        ))
    }

    /// Runs `f` on every server's local state (usually its partition) in
    /// parallel, charging the primitive operation counts to each server.
    pub fn local<S, R, F>(&mut self, parts: &mut [S], f: F) -> Vec<R>
    where
        S: Send,
        R: Send,
        F: Fn(usize, &mut S) -> R + Sync,
    {
        assert_eq!(parts.len(), self.p(), "one partition per server");
        let out: Vec<(R, OpCounts)> = parts
            .par_iter_mut()
            .enumerate()
            .map(|(i, part)| {
                let before = counters::snapshot();
                let r = f(i, part);
                (r, counters::snapshot().since(before))
            })
            .collect();
        out.into_iter()
            .enumerate()
            .map(|(i, (r, c))| {
                self.counters[i].add(c);
                r
            })
            .collect()
    }

    /// Like [`Cluster::local`] for fallible phases; the first error by
    /// server order wins.
    pub fn try_local<S, R, F>(&mut self, parts: &mut [S], f: F) -> Result<Vec<R>>
    where
        S: Send,
        R: Send,
        F: Fn(usize, &mut S) -> Result<R> + Sync,
    {
        self.local(parts, f).into_iter().collect()
    }

    /// All-pairs exchange: `outboxes[i][j]` goes from server `i` to server
    /// `j`; server `j` receives `outboxes[0][j] ++ … ++ outboxes[p-1][j]`.
    pub fn exchange<T>(
        &mut self,
        label: &str,
        kind: RoundKind,
        nominal: u64,
        plan: Option<PaddingPlan>,
        outboxes: Vec<Vec<Vec<T>>>,
    ) -> Vec<Vec<T>> {
        let p = self.p();
        assert_eq!(outboxes.len(), p, "one outbox set per server");
        let sizes: Vec<Vec<usize>> = outboxes
            .iter()
            .map(|row| {
                assert_eq!(row.len(), p, "one message per receiver");
                row.iter().map(Vec::len).collect()
            })
            .collect();
        self.transcript.push(Round {
            index: self.transcript.rounds.len(),
            label: label.to_string(),
            kind,
            sizes,
            nominal,
            plan,
        });
        let mut inboxes: Vec<Vec<T>> = (0..p).map(|_| Vec::new()).collect();
        for row in outboxes {
            for (j, msg) in row.into_iter().enumerate() {
                inboxes[j].extend(msg);
            }
        }
        inboxes
    }

    /// Cost ledger of everything run so far.
    pub fn report(&self, bound_formulas: Vec<BoundCheck>) -> CostReport {
        CostReport::new(&self.config, &self.transcript, &self.counters, bound_formulas)
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }
}

/// Maps server `i`'s partition to one outbox per receiver.
pub type Route<'a, T> = Box<dyn Fn(usize, Vec<T>) -> Vec<Vec<T>> + Sync + 'a>;

/// One round of a hand-written cluster program: every server maps its
/// partition to one outbox per receiver.
pub struct RoundSpec<'a, T> {
    pub label: String,
    pub route: Route<'a, T>,
}

impl<'a, T> RoundSpec<'a, T> {
    pub fn new(label: &str, route: impl Fn(usize, Vec<T>) -> Vec<Vec<T>> + Sync + 'a) -> Self {
        RoundSpec {
            label: label.to_string(),
            route: Box::new(route),
        }
    }
}

/// Runs a fixed program of routing rounds over `table`.
pub fn run_rounds<T: Send + Clone>(
    config: ClusterConfig,
    table: DistTable<T>,
    program: &[RoundSpec<'_, T>],
) -> Result<(DistTable<T>, Transcript, CostReport)> {
    let mut cluster = Cluster::new(config)?;
    let DistTable { schema, mut parts } = table;
    for round in program {
        let outboxes: Vec<Vec<Vec<T>>> = cluster.local(&mut parts, |i, part| (round.route)(i, std::mem::take(part)));
        parts = cluster.exchange(&round.label, RoundKind::Fixed, 0, None, outboxes);
    }
    let report = cluster.report(Vec::new());
    Ok((DistTable { schema, parts }, cluster.into_transcript(), report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_program() {
        let t = DistTable::from_rows(vec!["x".into()], vec![1u64, 2, 3], 2);
        let (out, tr, rep) = run_rounds(ClusterConfig::new(2, 40, 1), t, &[]).unwrap();
        assert_eq!(out.sizes(), vec![2, 1]);
        assert!(tr.rounds.is_empty());
        assert_eq!(rep.totals.comm_elements, 0);
    }

    #[test]
    fn single_message() {
        let t = DistTable {
            schema: vec!["x".into()],
            parts: vec![vec![1u64, 2, 3], vec![]],
        };
        let program = [RoundSpec::new("send", |i, part: Vec<u64>| {
            if i == 0 {
                vec![Vec::new(), part]
            } else {
                vec![Vec::new(), Vec::new()]
            }
        })];
        let (out, tr, rep) = run_rounds(ClusterConfig::new(2, 40, 1), t, &program).unwrap();
        assert_eq!(out.parts[1], vec![1, 2, 3]);
        let nonzero: Vec<_> = tr.entries().into_iter().filter(|e| e.elements > 0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!((nonzero[0].round, nonzero[0].sender, nonzero[0].receiver), (0, 0, 1));
        assert_eq!(nonzero[0].elements, 3);
        assert_eq!(nonzero[0].bytes, 3 * DEFAULT_ELEMENT_WIDTH as u64);
        assert_eq!(tr.entries().len(), 4);
        assert_eq!(rep.totals.comm_elements, 3);
    }

    #[test]
    fn streams_are_distinct() {
        let a = stream_seed(1, 0, 0, 1);
        assert_ne!(a, stream_seed(1, 1, 0, 1));
        assert_ne!(a, stream_seed(1, 0, 1, 1));
        assert_ne!(a, stream_seed(1, 0, 0, 2));
        assert_ne!(a, stream_seed(2, 0, 0, 1));
    }

    #[test]
    fn config_validation() {
        assert!(ClusterConfig::new(0, 40, 0).validate().is_err());
        assert!(ClusterConfig::new(1, 0, 0).validate().is_err());
        assert!(ClusterConfig::new(3, 40, 0).validate().is_ok());
    }
}
