//! Adjacency and label containers.
//!
//! Node indices are 0-based. Community labels are 1-based; label 0 marks a
//! node that has not been assigned to any community.

use crate::error::{Error, Result};

/// Symmetric 0/1 adjacency matrix with zero diagonal, stored densely row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    n: usize,
    entries: Vec<u8>,
}

impl AdjacencyMatrix {
    /// Graph on `n` nodes with no edges.
    pub fn empty(n: usize) -> Self {
        Self { n, entries: vec![0; n * n] }
    }

    pub fn from_edge_list(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut a = Self::empty(n);
        for &(i, j) in edges {
            a.insert_edge(i, j)?;
        }
        Ok(a)
    }

    /// Builds from a dense row-major 0/1 matrix, checking every invariant.
    pub fn from_dense(n: usize, entries: Vec<u8>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::LengthMismatch { left: entries.len(), right: n * n });
        }
        for i in 0..n {
            if entries[i * n + i] != 0 {
                return Err(Error::SelfLoop(i));
            }
            for j in 0..n {
                let v = entries[i * n + j];
                if v > 1 || v != entries[j * n + i] {
                    return Err(Error::Domain(format!(
                        "entry ({i}, {j}) is not a symmetric 0/1 value"
                    )));
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub(crate) fn insert_edge(&mut self, i: usize, j: usize) -> Result<()> {
        let n = self.n;
        for index in [i, j] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, n });
            }
        }
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        self.entries[i * n + j] = 1;
        self.entries[j * n + i] = 1;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u8] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Degree of every node.
    pub fn row_sums(&self) -> Vec<usize> {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|&v| v as usize).sum())
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.row_sums().iter().sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.get(i, j) == 1 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// The graph with node `i` and its incident edges removed; remaining
    /// nodes keep their relative order.
    pub fn exclude_node(&self, i: usize) -> Result<Self> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        if self.n < 2 {
            return Err(Error::Domain("cannot exclude a node from a 1-node graph".into()));
        }
        let m = self.n - 1;
        let mut entries = Vec::with_capacity(m * m);
        for r in (0..self.n).filter(|&r| r != i) {
            let row = self.row(r);
            entries.extend_from_slice(&row[..i]);
            entries.extend_from_slice(&row[i + 1..]);
        }
        Ok(Self { n: m, entries })
    }

    /// Relabels nodes: node `i` of the result is node `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::LengthMismatch { left: perm.len(), right: self.n });
        }
        let n = self.n;
        let mut entries = vec![0u8; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        Ok(Self { n, entries })
    }
}

/// Community assignment of every node, labels in `0..=k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabelVector {
    labels: Vec<usize>,
    k: usize,
}

impl LabelVector {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&label) = labels.iter().find(|&&l| l > k) {
            return Err(Error::LabelOutOfRange { label, k });
        }
        Ok(Self { labels, k })
    }

    /// Labels with `k` taken as the largest label present.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let k = labels.iter().copied().max().unwrap_or(0);
        Self { labels, k }
    }

    /// Contiguous blocks: `sizes[0]` nodes labeled 1, then `sizes[1]` labeled 2, ...
    pub fn from_sizes(sizes: &[usize]) -> Self {
        let labels = sizes
            .iter()
            .enumerate()
            .flat_map(|(u, &s)| std::iter::repeat_n(u + 1, s))
            .collect();
        Self { labels, k: sizes.len() }
    }

    pub fn unassigned(n: usize, k: usize) -> Self {
        Self { labels: vec![0; n], k }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
    }

    pub fn get(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// `sizes[u - 1]` is the number of nodes labeled `u`; label 0 is not counted.
    pub fn community_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            if l > 0 {
                sizes[l - 1] += 1;
            }
        }
        sizes
    }

    /// Applies `sigma` to every nonzero label: `u` becomes `sigma[u - 1]`.
    pub fn relabel(&self, sigma: &[usize]) -> Result<Self> {
        if sigma.len() != self.k {
            return Err(Error::LengthMismatch { left: sigma.len(), right: self.k });
        }
        let labels = self
            .labels
            .iter()
            .map(|&l| if l == 0 { 0 } else { sigma[l - 1] })
            .collect();
        Self::new(labels, self.k)
    }

    /// Labels reordered by a node permutation: entry `i` is entry `perm[i]` of `self`.
    pub fn permute_nodes(&self, perm: &[usize]) -> Self {
        Self { labels: perm.iter().map(|&p| self.labels[p]).collect(), k: self.k }
    }

    pub(crate) fn with_k(mut self, k: usize) -> Self {
        self.k = self.k.max(k);
        self
    }
}

/// `counts[u][v]` = number of nodes with truth label `u + 1` and estimate `v + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn new(truth: &LabelVector, estimate: &LabelVector) -> Result<Self> {
        if truth.len() != estimate.len() {
            return Err(Error::LengthMismatch { left: truth.len(), right: estimate.len() });
        }
        let k = truth.k().max(estimate.k());
        let mut counts = vec![vec![0; k]; k];
        for (&u, &v) in truth.labels().iter().zip(estimate.labels()) {
            if u > 0 && v > 0 {
                counts[u - 1][v - 1] += 1;
            }
        }
        Ok(Self { counts })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn edge_list_basics() {
        let a = AdjacencyMatrix::from_edge_list(3, &[]).unwrap();
        assert!(a.row_sums().iter().all(|&d| d == 0));

        let a = AdjacencyMatrix::from_edge_list(3, &[(0, 1)]).unwrap();
        assert_eq!(a.get(0, 1), 1);
        assert_eq!(a.get(1, 0), 1);
        assert_eq!(a.edge_count(), 1);
        assert_eq!(a.row_sums(), vec![1, 1, 0]);

        assert_eq!(AdjacencyMatrix::from_edge_list(2, &[(0, 0)]), Err(Error::SelfLoop(0)));
        assert_eq!(
            AdjacencyMatrix::from_edge_list(2, &[(0, 2)]),
            Err(Error::IndexOutOfRange { index: 2, n: 2 })
        );
        let dup = AdjacencyMatrix::from_edge_list(3, &[(0, 1), (1, 0), (0, 1)]).unwrap();
        assert_eq!(dup, AdjacencyMatrix::from_edge_list(3, &[(0, 1)]).unwrap());
    }

    #[test]
    fn complete_graph_degrees() {
        let edges: Vec<_> = (0..4).flat_map(|i| ((i + 1)..4).map(move |j| (i, j))).collect();
        let a = AdjacencyMatrix::from_edge_list(4, &edges).unwrap();
        assert_eq!(a.row_sums(), vec![3, 3, 3, 3]);
    }

    #[test]
    fn exclude_examples() {
        let a = AdjacencyMatrix::from_edge_list(2, &[(0, 1)]).unwrap();
        assert_eq!(a.exclude_node(0).unwrap(), AdjacencyMatrix::empty(1));

        let path = AdjacencyMatrix::from_edge_list(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.exclude_node(1).unwrap(), AdjacencyMatrix::empty(2));
        assert_eq!(path.exclude_node(0).unwrap(), AdjacencyMatrix::from_edge_list(2, &[(0, 1)]).unwrap());
        assert!(path.exclude_node(3).is_err());
    }

    #[test]
    fn community_sizes_examples() {
        let z = LabelVector::new(vec![1, 1, 2, 2], 2).unwrap();
        assert_eq!(z.community_sizes(), vec![2, 2]);
        let z = LabelVector::new(vec![0, 1, 1, 2], 2).unwrap();
        assert_eq!(z.community_sizes(), vec![2, 1]);
        let z = LabelVector::new(vec![3, 3, 3], 3).unwrap();
        assert_eq!(z.community_sizes(), vec![0, 0, 3]);
        assert!(LabelVector::new(vec![4], 3).is_err());
    }

    #[test]
    fn confusion_counts_only_assigned() {
        let z = LabelVector::new(vec![1, 1, 2, 2], 2).unwrap();
        let zh = LabelVector::new(vec![1, 0, 1, 2], 2).unwrap();
        let c = ConfusionMatrix::new(&z, &zh).unwrap();
        assert_eq!(c.counts, vec![vec![1, 0], vec![1, 1]]);
        assert_eq!(c.total(), 3);
    }

    fn arb_graph() -> impl Strategy<Value = AdjacencyMatrix> {
        (1usize..7).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                let mut a = AdjacencyMatrix::empty(n);
                let mut it = bits.into_iter();
                for i in 0..n {
                    for j in (i + 1)..n {
                        if it.next().unwrap() {
                            a.insert_edge(i, j).unwrap();
                        }
                    }
                }
                a
            })
        })
    }

    proptest! {
        #[test]
        fn edge_list_round_trip(a in arb_graph()) {
            let b = AdjacencyMatrix::from_edge_list(a.n(), &a.edges()).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert!(AdjacencyMatrix::from_dense(a.n(), a.entries.clone()).is_ok());
        }

        #[test]
        fn exclude_matches_degree_bookkeeping(a in arb_graph(), pick in 0usize..6) {
            prop_assume!(a.n() >= 2);
            let i = pick % a.n();
            let b = a.exclude_node(i).unwrap();
            let mut expected: Vec<usize> = a.row_sums();
            for (j, d) in expected.iter_mut().enumerate() {
                *d -= a.get(i, j) as usize;
            }
            expected.remove(i);
            prop_assert_eq!(b.row_sums(), expected);
            for r in 0..b.n() {
                prop_assert_eq!(b.get(r, r), 0);
                for c in 0..b.n() {
                    prop_assert_eq!(b.get(r, c), b.get(c, r));
                }
            }
        }
    }
}
