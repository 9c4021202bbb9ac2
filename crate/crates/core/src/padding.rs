//! Per-sender bucket bounds for the padded shuffles.
//!
//! Each plan holds the closed-form bound `U_i = ⌈(1 + c_i) · base_i⌉` and
//! the bound actually used by a shuffle, which is additionally capped by
//! the most a sender can ever put in one bucket (`n_i`, and `m` where each
//! receiver gets at most `m` elements). Capping never adds a failure case.

use serde::{Deserialize, Serialize};

/// Chernoff constant as printed (close to 3 ln 2).
pub const CHERNOFF: f64 = 2.08;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    ShuffleByKey,
    Expansion,
    Align,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaddingPlan {
    pub theorem: Theorem,
    pub p: usize,
    pub sigma: u32,
    /// Sender sizes `n_i` the plan was computed from.
    pub sizes: Vec<usize>,
    /// Total input size `N` (expansion only).
    pub total: Option<u64>,
    /// Output bound `M` (expansion only).
    pub output_bound: Option<u64>,
    pub slack: Vec<f64>,
    pub closed_form: Vec<usize>,
    pub bounds: Vec<usize>,
}

impl PaddingPlan {
    /// Caps every bound at `cap`.
    pub fn limit(mut self, cap: usize) -> Self {
        for b in &mut self.bounds {
            *b = (*b).min(cap);
        }
        self
    }

    /// Bucket capacities of sender `i` (one per receiver).
    pub fn caps(&self, i: usize) -> Vec<usize> {
        vec![self.bounds[i]; self.p]
    }

    /// Elements on the wire for one padded round.
    pub fn volume(&self) -> u64 {
        self.bounds.iter().map(|&u| (u * self.p) as u64).sum()
    }

    /// The worst-case slack over all senders.
    pub fn max_slack(&self) -> f64 {
        self.slack.iter().cloned().fold(0.0, f64::max)
    }
}

fn log2(p: usize) -> f64 {
    (p as f64).log2()
}

/// `c = √(2.08 · scale · (σ + 2 log₂ p) / n)`, 0 for empty senders.
pub fn slack(n: usize, p: usize, sigma: u32, scale: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (CHERNOFF * scale * (sigma as f64 + 2.0 * log2(p)) / n as f64).sqrt()
}

/// Scalar form of the shuffle-by-key bound: `(c, ⌈(1 + c) n / p⌉)`.
pub fn shuffle_by_key_bound(n: usize, p: usize, sigma: u32) -> (f64, usize) {
    let c = slack(n, p, sigma, p as f64);
    (c, ((1.0 + c) * n as f64 / p as f64).ceil() as usize)
}

/// Scalar form of the expansion bound for sender size `n`, total `N` and
/// per-server output `m`.
pub fn expansion_bound(n: usize, total: u64, m: u64, p: usize, sigma: u32) -> (f64, usize) {
    if m == 0 || total == 0 || n == 0 {
        return (0.0, 0);
    }
    let ratio = m as f64 / total as f64;
    let c = slack(n, p, sigma, (1.0 / ratio).max(1.0));
    (c, ((1.0 + c) * n as f64 * ratio.min(1.0)).ceil() as usize)
}

fn uniform(theorem: Theorem, sizes: &[usize], p: usize, sigma: u32) -> PaddingPlan {
    assert!(p >= 1, "need at least one server");
    let (slack, closed_form): (Vec<f64>, Vec<usize>) =
        sizes.iter().map(|&n| shuffle_by_key_bound(n, p, sigma)).unzip();
    let bounds = closed_form.iter().zip(sizes).map(|(&u, &n)| u.min(n)).collect();
    PaddingPlan {
        theorem,
        p,
        sigma,
        sizes: sizes.to_vec(),
        total: None,
        output_bound: None,
        slack,
        closed_form,
        bounds,
    }
}

/// Bounds for shuffling by a hashed key with locally distinct keys.
pub fn pad_shuffle_by_key(sizes: &[usize], p: usize, sigma: u32) -> PaddingPlan {
    uniform(Theorem::ShuffleByKey, sizes, p, sigma)
}

/// Bounds for the alignment shuffle; same formula as shuffle-by-key,
/// applied to the sizes after the preceding random shuffle.
pub fn pad_align(sizes: &[usize], p: usize, sigma: u32) -> PaddingPlan {
    uniform(Theorem::Align, sizes, p, sigma)
}

/// Bounds for the expansion shuffle by target server. `sizes` are the
/// sizes after the preceding random shuffle, `total` the input size `N`,
/// `bound` the output size `M` (per-server share `m = ⌈M/p⌉`).
pub fn pad_expansion(sizes: &[usize], total: u64, bound: u64, p: usize, sigma: u32) -> PaddingPlan {
    assert!(p >= 1, "need at least one server");
    let m = bound.div_ceil(p as u64);
    let (slack, closed_form): (Vec<f64>, Vec<usize>) = sizes
        .iter()
        .map(|&n| expansion_bound(n, total, m, p, sigma))
        .unzip();
    let bounds = closed_form
        .iter()
        .zip(sizes)
        .map(|(&u, &n)| u.min(n).min(m as usize))
        .collect();
    PaddingPlan {
        theorem: Theorem::Expansion,
        p,
        sigma,
        sizes: sizes.to_vec(),
        total: Some(total),
        output_bound: Some(bound),
        slack,
        closed_form,
        bounds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn frozen_shuffle_by_key_value() {
        let (c, u) = shuffle_by_key_bound(1_048_576, 16, 40);
        assert!((c - 0.03903).abs() < 5e-5, "{c}");
        assert_eq!(u, 68_094);
    }

    #[test]
    fn single_server() {
        let (c, u) = shuffle_by_key_bound(1000, 1, 40);
        assert!((c - (2.08f64 * 40.0 / 1000.0).sqrt()).abs() < 1e-12);
        assert_eq!(u, ((1.0 + c) * 1000.0).ceil() as usize);
        let plan = pad_shuffle_by_key(&[1000], 1, 40);
        assert_eq!(plan.bounds, vec![1000]);
    }

    #[test]
    fn frozen_expansion_value() {
        let (c, u) = expansion_bound(100, 1000, 10_000, 10, 40);
        assert!((c - 0.985).abs() < 5e-4, "{c}");
        assert_eq!(u, 199);
        let plan = pad_expansion(&[100; 10], 1000, 100_000, 10, 40);
        assert_eq!(plan.closed_form, vec![199; 10]);
        assert_eq!(plan.bounds, vec![100; 10]);
    }

    #[test]
    fn expansion_boundary_m_equals_n() {
        let (c, u) = expansion_bound(500, 4000, 4000, 8, 40);
        let expect = (2.08f64 * (40.0 + 6.0) / 500.0).sqrt();
        assert!((c - expect).abs() < 1e-12);
        assert_eq!(u, ((1.0 + expect) * 500.0).ceil() as usize);
    }

    #[test]
    fn frozen_align_value() {
        let plan = pad_align(&[65_536], 8, 40);
        assert!((plan.slack[0] - 0.1081).abs() < 5e-4);
        assert_eq!(plan.closed_form[0], 9_078);
        assert_eq!(
            pad_align(&[4096], 4, 40).closed_form,
            pad_shuffle_by_key(&[4096], 4, 40).closed_form
        );
    }

    #[test]
    fn doubling_sigma_scales_slack() {
        let (c1, _) = shuffle_by_key_bound(10_000, 8, 30);
        let (c2, _) = shuffle_by_key_bound(10_000, 8, 60);
        let ratio = ((60.0 + 6.0) / (30.0 + 6.0f64)).sqrt();
        assert!((c2 / c1 - ratio).abs() < 1e-12);
    }

    #[test]
    fn slack_vanishes_for_large_inputs() {
        let (c, u) = shuffle_by_key_bound(1 << 40, 4, 40);
        assert!(c < 1e-4);
        assert!((u as f64 / (1u64 << 38) as f64 - 1.0) < 1e-4);
    }

    #[test]
    fn empty_sender() {
        assert_eq!(shuffle_by_key_bound(0, 4, 40), (0.0, 0));
        assert_eq!(expansion_bound(10, 10, 0, 4, 40), (0.0, 0));
    }

    proptest! {
        #[test]
        fn monotone(n in 1usize..100_000, p in 1usize..64, sigma in 1u32..80) {
            let (c, u) = shuffle_by_key_bound(n, p, sigma);
            let (c_more, u_more) = shuffle_by_key_bound(n + 1, p, sigma);
            let (_, u_sigma) = shuffle_by_key_bound(n, p, sigma + 1);
            prop_assert!(c_more <= c);
            prop_assert!(u_more >= u);
            prop_assert!(u_sigma >= u);
            prop_assert!(u >= n.div_ceil(p));
        }
    }
}
