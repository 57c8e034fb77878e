//! Spectral initialization: degree trimming, rank-k approximation, L1 row
//! normalization and weighted k-medians on the normalized rows.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, LabelVector};
use crate::kmedians::{weighted_k_medians, KMediansConfig, KMediansResult};
use crate::linalg::{top_eigenpairs, EigenOptions, SymmetricMatrix};

/// Default multiplier for the data-driven trimming threshold.
pub const DEFAULT_C1: f64 = 5.0;

/// `T_tau(A)`: `A` with the rows and columns of over-degree nodes zeroed.
#[derive(Clone, Debug)]
pub struct TrimmedMatrix {
    pub matrix: SymmetricMatrix,
    pub trimmed: BTreeSet<usize>,
    pub tau: f64,
}

pub fn trim(a: &AdjacencyMatrix, tau: f64) -> TrimmedMatrix {
    let n = a.n();
    let degrees = a.row_sums();
    let trimmed: BTreeSet<usize> = (0..n).filter(|&i| degrees[i] as f64 > tau).collect();
    let mut matrix = SymmetricMatrix::zeros(n);
    for i in (0..n).filter(|i| !trimmed.contains(i)) {
        for (j, &v) in a.row(i).iter().enumerate() {
            if v == 1 && !trimmed.contains(&j) {
                matrix.set(i, j, 1.0);
            }
        }
    }
    TrimmedMatrix { matrix, trimmed, tau }
}

/// `c1` times the average degree, `c1 * (1/n) sum_{i != j} A_ij`.
pub fn default_tau(a: &AdjacencyMatrix, c1: f64) -> f64 {
    if a.n() == 0 {
        return 0.0;
    }
    c1 * (2 * a.edge_count()) as f64 / a.n() as f64
}

/// Best rank-`k` approximation in Frobenius norm and the eigenvalues kept.
#[derive(Clone, Debug)]
pub struct LowRankApprox {
    pub matrix: SymmetricMatrix,
    pub spectrum: Vec<f64>,
}

/// Keeps the `k` eigenpairs of largest `|lambda|`.
pub fn rank_k_approx(m: &SymmetricMatrix, k: usize) -> Result<LowRankApprox> {
    if k == 0 || k > m.n() {
        return Err(Error::Domain(format!("rank {k} outside [1, {}]", m.n())));
    }
    let pairs = top_eigenpairs(m, k, EigenOptions::default())?;
    let matrix = SymmetricMatrix::from_eigenpairs(m.n(), &pairs.values, &pairs.vectors);
    Ok(LowRankApprox { matrix, spectrum: pairs.values })
}

/// Rows of `P_hat` scaled to unit L1 norm, together with the L1 norms and
/// the set `S0` of rows treated as zero.
#[derive(Clone, Debug)]
pub struct NormalizedRows {
    pub s0: BTreeSet<usize>,
    /// Normalized rows for nodes outside `S0`, in node order.
    pub rows: Vec<Vec<f64>>,
    /// Node index of each entry of `rows`.
    pub nodes: Vec<usize>,
    /// `||P_hat_i||_1` of each entry of `rows`.
    pub weights: Vec<f64>,
}

/// Rows with L1 norm at most `1e-12 * n` go to `S0`.
pub fn normalize_rows_l1(p_hat: &SymmetricMatrix) -> NormalizedRows {
    let n = p_hat.n();
    let zeta = 1e-12 * n as f64;
    let mut out = NormalizedRows { s0: BTreeSet::new(), rows: vec![], nodes: vec![], weights: vec![] };
    for i in 0..n {
        let row = p_hat.row(i);
        let l1: f64 = row.iter().map(|x| x.abs()).sum();
        if l1 <= zeta {
            out.s0.insert(i);
        } else {
            out.rows.push(row.iter().map(|x| x / l1).collect());
            out.nodes.push(i);
            out.weights.push(l1);
        }
    }
    out
}

/// How the trimming threshold is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Threshold {
    /// Fixed `tau`.
    Fixed(f64),
    /// `c1` times the average degree.
    AverageDegree(f64),
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::AverageDegree(DEFAULT_C1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitConfig {
    pub threshold: Threshold,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for InitConfig {
    fn default() -> Self {
        Self { threshold: Threshold::default(), restarts: 10, max_iters: 100, seed: 0 }
    }
}

impl InitConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    fn kmedians(&self) -> KMediansConfig {
        KMediansConfig { restarts: self.restarts, max_iters: self.max_iters, seed: self.seed }
    }
}

/// Full output of the initialization pipeline.
#[derive(Clone, Debug)]
pub struct Initialization {
    pub labels: LabelVector,
    pub tau: f64,
    pub trimmed: BTreeSet<usize>,
    pub spectrum: Vec<f64>,
    /// Clustering of the nodes outside `S0`; `None` when every row is zero.
    pub clustering: Option<KMediansResult>,
}

/// trim, rank-k approximation, L1 normalization, weighted k-medians.
/// Nodes in `S0` keep label 0.
pub fn initialize(a: &AdjacencyMatrix, k: usize, config: &InitConfig) -> Result<LabelVector> {
    Ok(initialize_detailed(a, k, config)?.labels)
}

pub fn initialize_detailed(a: &AdjacencyMatrix, k: usize, config: &InitConfig) -> Result<Initialization> {
    let n = a.n();
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let tau = match config.threshold {
        Threshold::Fixed(t) => t,
        Threshold::AverageDegree(c1) => default_tau(a, c1),
    };
    let trimmed = trim(a, tau);
    let approx = rank_k_approx(&trimmed.matrix, k.min(n))?;
    let rows = normalize_rows_l1(&approx.matrix);
    let mut labels = vec![0usize; n];
    let clustering = if rows.rows.is_empty() {
        None
    } else {
        let result = weighted_k_medians(&rows.rows, &rows.weights, k, &config.kmedians())?;
        for (&node, &label) in rows.nodes.iter().zip(result.labels.labels()) {
            labels[node] = label;
        }
        Some(result)
    };
    Ok(Initialization {
        labels: LabelVector::new(labels, k)?,
        tau,
        trimmed: trimmed.trimmed,
        spectrum: approx.spectrum,
        clustering,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::misclassification;

    fn cliques(sizes: &[usize]) -> AdjacencyMatrix {
        let mut edges = vec![];
        let mut start = 0;
        for &s in sizes {
            for i in start..start + s {
                for j in (i + 1)..start + s {
                    edges.push((i, j));
                }
            }
            start += s;
        }
        AdjacencyMatrix::from_edge_list(start, &edges).unwrap()
    }

    #[test]
    fn trim_examples() {
        let a = cliques(&[4, 3]);
        let t = trim(&a, 10.0);
        assert!(t.trimmed.is_empty());
        for i in 0..7 {
            for j in 0..7 {
                assert_eq!(t.matrix.get(i, j), a.get(i, j) as f64);
            }
        }

        let star = AdjacencyMatrix::from_edge_list(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
        let t = trim(&star, 3.0);
        assert_eq!(t.trimmed, BTreeSet::from([0]));
        assert!(t.matrix.as_slice().iter().all(|&x| x == 0.0));

        let single = AdjacencyMatrix::from_edge_list(3, &[(0, 1)]).unwrap();
        assert_eq!(trim(&single, 0.0).trimmed, BTreeSet::from([0, 1]));
    }

    #[test]
    fn default_tau_examples() {
        assert_eq!(default_tau(&AdjacencyMatrix::empty(5), 5.0), 0.0);
        let k4 = cliques(&[4]);
        assert_eq!(default_tau(&k4, 5.0), 15.0);
        assert_eq!(default_tau(&k4, 10.0), 2.0 * default_tau(&k4, 5.0));
    }

    #[test]
    fn exact_rank_is_reproduced() {
        let a = cliques(&[5, 5]);
        let t = trim(&a, 100.0);
        // Rank of J - I blocks is full, but adding the diagonal back makes it rank 2.
        let mut m = t.matrix.clone();
        for i in 0..10 {
            m.set(i, i, 1.0);
        }
        let approx = rank_k_approx(&m, 2).unwrap();
        assert!(approx.matrix.frobenius_distance(&m) < 1e-9);
        let full = rank_k_approx(&t.matrix, 10).unwrap();
        assert!(full.matrix.frobenius_distance(&t.matrix) < 1e-9);
    }

    #[test]
    fn normalize_examples() {
        let zero = SymmetricMatrix::zeros(3);
        assert_eq!(normalize_rows_l1(&zero).s0.len(), 3);

        let m = SymmetricMatrix::from_row_major(2, vec![2.0, -2.0, -2.0, 2.0]).unwrap();
        let rows = normalize_rows_l1(&m);
        assert_eq!(rows.rows[0], vec![0.5, -0.5]);
        assert_eq!(rows.weights, vec![4.0, 4.0]);
        for r in &rows.rows {
            assert!((r.iter().map(|x| x.abs()).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn separated_cliques_are_recovered() {
        let a = cliques(&[10, 10]);
        let config = InitConfig { threshold: Threshold::Fixed(1e9), ..InitConfig::default() };
        let z = initialize(&a, 2, &config).unwrap();
        let truth = LabelVector::from_sizes(&[10, 10]);
        assert_eq!(misclassification(&z, &truth).unwrap().value, 0.0);
    }

    #[test]
    fn empty_graph_is_unassigned() {
        let z = initialize(&AdjacencyMatrix::empty(6), 2, &InitConfig::default()).unwrap();
        assert!(z.labels().iter().all(|&l| l == 0));
    }
}
