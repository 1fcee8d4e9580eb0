use serde::{Deserialize, Serialize};

/// Duplicate-free list of zero-based column indices.
///
/// Insertion order is kept because some producers (SPA, cluster selection)
/// emit indices in a meaningful order. Use [`IndexSet::sorted`] when only
/// membership matters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    /// Keeps the first occurrence of every index.
    pub fn from_iter_dedup(it: impl IntoIterator<Item = usize>) -> Self {
        let mut seen = std::collections::HashSet::new();
        Self(it.into_iter().filter(|i| seen.insert(*i)).collect())
    }

    /// `0..n`.
    pub fn full(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Returns false if `i` was already present.
    pub fn insert(&mut self, i: usize) -> bool {
        if self.0.contains(&i) {
            return false;
        }
        self.0.push(i);
        true
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn sorted(&self) -> IndexSet {
        let mut v = self.0.clone();
        v.sort_unstable();
        IndexSet(v)
    }

    /// Membership mask over `0..n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &i in &self.0 {
            m[i] = true;
        }
        m
    }

    /// Ascending list of `0..n` minus this set.
    pub fn complement(&self, n: usize) -> IndexSet {
        let m = self.mask(n);
        IndexSet((0..n).filter(|&i| !m[i]).collect())
    }

    /// Same members regardless of order.
    pub fn same_elements(&self, other: &IndexSet) -> bool {
        self.sorted() == other.sorted()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.iter().copied().max()
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Self::from_iter_dedup(iter)
    }
}

impl From<Vec<usize>> for IndexSet {
    fn from(v: Vec<usize>) -> Self {
        Self::from_iter_dedup(v)
    }
}

impl From<IndexSet> for Vec<usize> {
    fn from(s: IndexSet) -> Self {
        s.0
    }
}

impl<'a> IntoIterator for &'a IndexSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}
