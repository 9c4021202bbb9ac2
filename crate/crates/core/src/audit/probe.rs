//! Monte-Carlo estimate of the shuffle-by-key overflow probability.

use crate::cluster::{purpose, stream_seed, Cluster, ClusterConfig, DistTable};
use crate::error::Error;
use crate::record::Record;
use crate::relops::{self, KeyHasher, KeyRouter};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Which bucket bound the probe pads to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlackMode {
    /// The padding plan of the operator.
    Theorem,
    /// `⌈n_i/p⌉`: no slack at all, overflow expected.
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub servers: usize,
    /// Rows per server; all keys are distinct.
    pub per_server: usize,
    pub sigma: u32,
    pub trials: usize,
    pub seed: u64,
    pub mode: SlackMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    pub trials: usize,
    pub overflows: usize,
    pub rate: f64,
    /// Binomial standard error of `rate`.
    pub std_error: f64,
    /// `2^-σ`.
    pub budget: f64,
}

impl ProbeOutcome {
    /// Rate within the budget plus `k` standard errors. With zero observed
    /// overflows the estimated error is zero, so the bound is the budget.
    pub fn within(&self, k: f64) -> bool {
        self.rate <= self.budget + k * self.std_error
    }
}

/// Runs `shuffle_by_key` on distinct keys with a fresh hash seed per
/// trial and counts padding overflows.
pub fn failure_probe(cfg: &ProbeConfig) -> ProbeOutcome {
    let p = cfg.servers;
    let n = cfg.per_server;
    let overflows = (0..cfg.trials)
        .into_par_iter()
        .filter(|&t| {
            let config = ClusterConfig::new(p, cfg.sigma, stream_seed(cfg.seed, t, 0, purpose::GENERATOR));
            let mut cluster = Cluster::new(config).expect("valid probe config");
            let rows: Vec<Record> = (0..(p * n) as u64).map(|k| Record::left(k, k)).collect();
            let table = DistTable::with_sizes(vec!["A".into(), "B".into()], rows, &vec![n; p]);
            let hasher = KeyHasher::new(stream_seed(cfg.seed, t, 0, purpose::HASH_SEED), p);
            let result = match cfg.mode {
                SlackMode::Theorem => relops::shuffle_by_key(&mut cluster, table, |r| (r.key, 0), &hasher),
                SlackMode::Zero => relops::shuffle(&mut cluster, table, |r| hasher.route(r.key, 0), &vec![n.div_ceil(p); p]),
            };
            matches!(result, Err(Error::PaddingOverflow { .. }))
        })
        .count();
    let trials = cfg.trials.max(1) as f64;
    let rate = overflows as f64 / trials;
    ProbeOutcome {
        trials: cfg.trials,
        overflows,
        rate,
        std_error: (rate * (1.0 - rate) / trials).sqrt(),
        budget: 2f64.powi(-(cfg.sigma as i32)),
    }
}
