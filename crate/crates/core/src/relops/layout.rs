//! Public size arithmetic shared by the operators and the size simulator.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Uniform targets in `[0, p)` for `n` positions, drawn in order.
pub fn random_targets(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..p)).collect()
}

/// Column length of the column sort: at least the largest partition and
/// `2(p-1)²`, rounded up to a multiple of `p` and of 2.
pub fn column_rows(sizes: &[usize]) -> usize {
    let p = sizes.len();
    let need = sizes.iter().copied().max().unwrap_or(0).max(2 * (p - 1) * (p - 1)).max(1);
    let step = if p.is_multiple_of(2) { p } else { 2 * p };
    need.div_ceil(step) * step
}

/// Partition sizes after a column sort of `n` elements in columns of `r`.
pub fn sorted_sizes(n: usize, r: usize, p: usize) -> Vec<usize> {
    (0..p).map(|i| n.saturating_sub(i * r).min(r)).collect()
}

/// Per-server output share `m = ⌈M/p⌉`.
pub fn share(bound: u64, p: usize) -> u64 {
    bound.div_ceil(p as u64)
}

/// Alignment key of the `rank`-th (1-based) expanded copy inside a key
/// group with degrees `(d_r, d_s)` whose first global slot is `start`.
pub fn alignment_key(rank: u64, d_r: u64, d_s: u64, start: u64) -> u64 {
    let q = rank - 1;
    let d = d_r.max(1);
    q / d + (q % d) * d_s + start
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_geometry() {
        assert_eq!(column_rows(&[18, 18]), 18);
        assert_eq!(column_rows(&[5, 5, 5]), 12);
        assert_eq!(column_rows(&[100, 90, 90, 90]), 100);
        assert_eq!(column_rows(&[0]), 2);
        assert_eq!(sorted_sizes(10, 4, 4), vec![4, 4, 2, 0]);
    }

    #[test]
    fn alignment_is_a_bijection_per_group() {
        for d_r in 1..=12u64 {
            for d_s in 1..=12u64 {
                let mut seen = vec![false; (d_r * d_s) as usize];
                for rank in 1..=d_r * d_s {
                    let l = alignment_key(rank, d_r, d_s, 1) as usize - 1;
                    assert!(!seen[l]);
                    seen[l] = true;
                }
            }
        }
    }
}
