use crate::record::Record;
use serde::{Deserialize, Serialize};

/// A table split across servers; partition `i` lives on server `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistTable<T = Record> {
    pub schema: Vec<String>,
    pub parts: Vec<Vec<T>>,
}

impl<T> DistTable<T> {
    /// Splits `rows` into `p` consecutive, as-equal-as-possible partitions
    /// (the first `N mod p` get one extra row).
    pub fn from_rows(schema: Vec<String>, rows: Vec<T>, p: usize) -> Self {
        assert!(p >= 1, "need at least one server");
        let n = rows.len();
        let (q, rem) = (n / p, n % p);
        let mut it = rows.into_iter();
        let parts = (0..p)
            .map(|i| it.by_ref().take(q + (i < rem) as usize).collect())
            .collect();
        DistTable { schema, parts }
    }

    /// Splits `rows` into consecutive partitions of the given sizes.
    pub fn with_sizes(schema: Vec<String>, rows: Vec<T>, sizes: &[usize]) -> Self {
        assert_eq!(rows.len(), sizes.iter().sum::<usize>(), "sizes must cover the rows");
        let mut it = rows.into_iter();
        let parts = sizes.iter().map(|&n| it.by_ref().take(n).collect()).collect();
        DistTable { schema, parts }
    }

    /// Public partition sizes `n_i`.
    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.parts.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn p(&self) -> usize {
        self.parts.len()
    }

    /// Appends empty partitions up to `p` servers.
    pub fn with_servers(mut self, p: usize) -> Self {
        while self.parts.len() < p {
            self.parts.push(Vec::new());
        }
        self
    }

    /// All rows in partition order.
    pub fn rows(&self) -> impl Iterator<Item = &T> {
        self.parts.iter().flatten()
    }
}

impl DistTable<Record> {
    pub fn real_rows(&self) -> impl Iterator<Item = &Record> {
        self.rows().filter(|r| r.is_real())
    }

    /// Left-side table `(A, B)`.
    pub fn left(rows: &[(u64, u64)], p: usize) -> Self {
        let rows = rows.iter().map(|&(a, b)| Record::left(a, b)).collect();
        DistTable::from_rows(vec!["A".into(), "B".into()], rows, p)
    }

    /// Right-side table `(B, C)`.
    pub fn right(rows: &[(u64, u64)], p: usize) -> Self {
        let rows = rows.iter().map(|&(b, c)| Record::right(b, c)).collect();
        DistTable::from_rows(vec!["B".into(), "C".into()], rows, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_split() {
        let t = DistTable::from_rows(vec![], (0..10u64).collect(), 3);
        assert_eq!(t.sizes(), vec![4, 3, 3]);
        assert_eq!(t.rows().copied().collect::<Vec<_>>(), (0..10).collect::<Vec<_>>());
        let t = DistTable::from_rows(vec![], Vec::<u64>::new(), 2);
        assert_eq!(t.sizes(), vec![0, 0]);
    }
}
