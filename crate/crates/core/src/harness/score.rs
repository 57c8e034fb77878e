//! SCORE baseline: ratios of leading eigenvectors clustered by k-means.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, LabelVector};
use crate::linalg::{top_eigenpairs, EigenOptions, SymmetricMatrix};
use crate::rng;

const RESTARTS: usize = 10;
const MAX_ITERS: usize = 100;
const LEADING_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansResult {
    /// Labels in `1..=k`.
    pub labels: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    pub inertia: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(x: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(x, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus<R: Rng>(points: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centers = vec![points[rng.random_range(0..n)].clone()];
    let mut dist: Vec<f64> = points.iter().map(|x| sq_dist(x, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in dist.iter().enumerate() {
                if target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        let c = points[pick].clone();
        for (d, x) in dist.iter_mut().zip(points) {
            *d = d.min(sq_dist(x, &c));
        }
        centers.push(c);
    }
    centers
}

fn lloyd(points: &[Vec<f64>], k: usize, mut centers: Vec<Vec<f64>>, max_iters: usize) -> KMeansResult {
    let dim = points[0].len();
    let mut labels: Vec<usize> = Vec::new();
    for _ in 0..max_iters.max(1) {
        let next: Vec<usize> = points.iter().map(|x| nearest(x, &centers).0 + 1).collect();
        if next == labels {
            break;
        }
        labels = next;
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (x, &l) in points.iter().zip(&labels) {
            counts[l - 1] += 1;
            for (s, v) in sums[l - 1].iter_mut().zip(x) {
                *s += v;
            }
        }
        for u in 0..k {
            if counts[u] > 0 {
                centers[u] = sums[u].iter().map(|s| s / counts[u] as f64).collect();
            }
        }
    }
    let inertia = points.iter().zip(&labels).map(|(x, &l)| sq_dist(x, &centers[l - 1])).sum();
    KMeansResult { labels, centers, inertia }
}

/// Lloyd's algorithm from k-means++ starts; the lowest inertia over `restarts`
/// runs wins, ties to the earliest run.
pub fn k_means(points: &[Vec<f64>], k: usize, restarts: usize, max_iters: usize, seed: u64) -> Result<KMeansResult> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let mut best: Option<KMeansResult> = None;
    for r in 0..restarts.max(1) {
        let mut g = rng::stream(seed, r as u64);
        let run = lloyd(points, k, plus_plus(points, k, &mut g), max_iters);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Ratio features `u_l(i) / u_1(i)`, `l = 2..k`, from the `k` eigenvectors of
/// `A` with largest `|lambda|`, clipped to `[-log n, log n]`, then k-means.
pub fn score_baseline(a: &AdjacencyMatrix, k: usize, seed: u64) -> Result<LabelVector> {
    let n = a.n();
    if k < 2 {
        return Err(Error::Domain(format!("SCORE needs k >= 2, got {k}")));
    }
    if n < k {
        return Err(Error::Domain(format!("SCORE needs at least k = {k} nodes, got {n}")));
    }
    let mut m = SymmetricMatrix::zeros(n);
    for (i, j) in a.edges() {
        m.set(i, j, 1.0);
        m.set(j, i, 1.0);
    }
    let pairs = top_eigenpairs(&m, k, EigenOptions::default())
        .map_err(|e| Error::DegenerateSpectrum(e.to_string()))?;
    let mut lead = pairs.vectors[0].clone();
    if lead.iter().sum::<f64>() < 0.0 {
        lead.iter_mut().for_each(|x| *x = -*x);
    }
    let clip = (n as f64).ln();
    let features: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            pairs.vectors[1..]
                .iter()
                .map(|u| {
                    let r = if lead[i].abs() < LEADING_TOL {
                        if u[i] == 0.0 {
                            0.0
                        } else {
                            clip * u[i].signum()
                        }
                    } else {
                        u[i] / lead[i]
                    };
                    r.clamp(-clip, clip)
                })
                .collect()
        })
        .collect();
    let clusters = k_means(&features, k, RESTARTS, MAX_ITERS, seed)?;
    LabelVector::new(clusters.labels, k)
}
