//! Centralized plaintext references. Nothing here touches the oblivious
//! code paths.

use std::collections::HashMap;

/// Nested-loop natural join of `R(A, B)` and `S(B, C)`, sorted.
pub fn oracle_join(left: &[(u64, u64)], right: &[(u64, u64)]) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    for &(a, b) in left {
        for &(b2, c) in right {
            if b == b2 {
                out.push((a, b, c));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Left-outer join against a primary-key right side, sorted. `None` marks
/// rows without a partner.
pub fn oracle_pk_join(left: &[(u64, u64)], right: &[(u64, u64)]) -> Vec<(u64, u64, Option<u64>)> {
    let mut out: Vec<_> = left
        .iter()
        .map(|&(a, b)| (a, b, right.iter().find(|&&(b2, _)| b2 == b).map(|&(_, c)| c)))
        .collect();
    out.sort_unstable();
    out
}

/// Size of the natural join through the degree-product identity.
pub fn oracle_join_size(left_keys: &[u64], right_keys: &[u64]) -> u64 {
    let dl = degrees(left_keys);
    let dr = degrees(right_keys);
    dl.iter().map(|(k, &d)| d * dr.get(k).copied().unwrap_or(0)).sum()
}

/// Multiplicity of every key.
pub fn degrees(keys: &[u64]) -> HashMap<u64, u64> {
    let mut m = HashMap::new();
    for &k in keys {
        *m.entry(k).or_insert(0) += 1;
    }
    m
}

/// `(deg_own, deg_other)` for every row of `own`, in order.
pub fn oracle_degrees(own: &[u64], other: &[u64]) -> Vec<(u64, u64)> {
    let a = degrees(own);
    let b = degrees(other);
    own.iter().map(|k| (a[k], b.get(k).copied().unwrap_or(0))).collect()
}

/// Every `(x, d)` repeated `d` times in input order, then `None` up to `bound`.
pub fn oracle_expand<X: Clone>(rows: &[(X, u64)], bound: u64) -> Vec<Option<X>> {
    let mut out: Vec<Option<X>> = rows
        .iter()
        .flat_map(|(x, d)| std::iter::repeat_n(Some(x.clone()), *d as usize))
        .collect();
    out.resize(bound as usize, None);
    out
}

/// Inclusive prefix sums.
pub fn oracle_prefix_sum(values: &[u64]) -> Vec<u64> {
    values
        .iter()
        .scan(0u64, |acc, &v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn join_basics() {
        assert_eq!(oracle_join(&[(7, 1)], &[(1, 9)]), vec![(7, 1, 9)]);
        assert!(oracle_join(&[(7, 1)], &[(2, 9)]).is_empty());
    }

    #[test]
    fn size_identity() {
        let l = [1, 1, 2, 5];
        let r = [1, 2, 2, 3];
        let lt: Vec<_> = l.iter().map(|&k| (0, k)).collect();
        let rt: Vec<_> = r.iter().map(|&k| (k, 0)).collect();
        assert_eq!(oracle_join(&lt, &rt).len() as u64, oracle_join_size(&l, &r));
        assert_eq!(oracle_join_size(&l, &r), 4);
    }

    #[test]
    fn expand_pads() {
        assert_eq!(oracle_expand(&[('x', 2), ('y', 0), ('z', 1)], 5), vec![Some('x'), Some('x'), Some('z'), None, None]);
    }

    #[test]
    fn pk_and_degrees() {
        assert_eq!(oracle_pk_join(&[(1, 4), (2, 5)], &[(4, 40)]), vec![(1, 4, Some(40)), (2, 5, None)]);
        assert_eq!(oracle_degrees(&[1, 1, 2], &[1, 2, 2, 3]), vec![(2, 1), (2, 1), (1, 2)]);
        assert_eq!(oracle_prefix_sum(&[1, 3, 1, 0]), vec![1, 4, 5, 5]);
    }
}
