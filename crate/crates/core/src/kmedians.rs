//! Weighted k-medians under the L1 distance.
//!
//! Objective: `sum_i w_i ||x_i - c_{label(i)}||_1`. Local search alternates
//! nearest-center assignment with coordinate-wise weighted medians, from
//! several weighted farthest-point starts; the best run wins. On small
//! inputs every run is then polished by single-point moves.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::LabelVector;
use crate::rng;

/// Polishing runs when `n^2 * dim * k` stays below this.
const POLISH_BUDGET: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KMediansConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for KMediansConfig {
    fn default() -> Self {
        Self { restarts: 10, max_iters: 100, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KMediansResult {
    /// Labels in `1..=k`, one per input point.
    pub labels: LabelVector,
    pub centers: Vec<Vec<f64>>,
    pub objective: f64,
    /// Objective after every assignment step of the winning run.
    pub trace: Vec<f64>,
    /// Index of the winning restart.
    pub restart: usize,
}

pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Smallest value at which the cumulative weight reaches half the total.
/// `pairs` is reordered.
pub fn lower_weighted_median(pairs: &mut [(f64, f64)]) -> f64 {
    pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let mut acc = 0.0;
    for &(v, w) in pairs.iter() {
        acc += w;
        if 2.0 * acc >= total {
            return v;
        }
    }
    pairs.last().map_or(0.0, |p| p.0)
}

/// `sum_i w_i ||x_i - c_{label(i)}||_1` for 1-based labels.
pub fn objective(points: &[Vec<f64>], weights: &[f64], labels: &[usize], centers: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .zip(weights)
        .zip(labels)
        .map(|((x, w), &l)| w * l1_distance(x, &centers[l - 1]))
        .sum()
}

/// Coordinate-wise weighted medians of each cluster; empty clusters keep `previous`.
pub fn median_centers(
    points: &[Vec<f64>],
    weights: &[f64],
    labels: &[usize],
    k: usize,
    previous: Option<&[Vec<f64>]>,
) -> Vec<Vec<f64>> {
    let dim = points.first().map_or(0, Vec::len);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        members[l - 1].push(i);
    }
    let mut scratch = Vec::new();
    members
        .iter()
        .enumerate()
        .map(|(u, idx)| {
            if idx.is_empty() {
                return previous.map_or_else(|| vec![0.0; dim], |p| p[u].clone());
            }
            (0..dim)
                .map(|d| {
                    scratch.clear();
                    scratch.extend(idx.iter().map(|&i| (points[i][d], weights[i])));
                    lower_weighted_median(&mut scratch)
                })
                .collect()
        })
        .collect()
}

fn nearest(x: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = l1_distance(x, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn farthest_point_init<R: Rng>(points: &[Vec<f64>], weights: &[f64], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let total: f64 = weights.iter().sum();
    let mut target = rng.random::<f64>() * total;
    let mut first = points.len() - 1;
    for (i, &w) in weights.iter().enumerate() {
        if target < w {
            first = i;
            break;
        }
        target -= w;
    }
    let mut centers = vec![points[first].clone()];
    let mut dist: Vec<f64> = points.iter().map(|x| l1_distance(x, &centers[0])).collect();
    while centers.len() < k {
        let mut pick = 0;
        let mut best = f64::NEG_INFINITY;
        for (i, (&d, &w)) in dist.iter().zip(weights).enumerate() {
            if w * d > best {
                best = w * d;
                pick = i;
            }
        }
        let c = points[pick].clone();
        for (d, x) in dist.iter_mut().zip(points) {
            *d = d.min(l1_distance(x, &c));
        }
        centers.push(c);
    }
    centers
}

struct Run {
    labels: Vec<usize>,
    centers: Vec<Vec<f64>>,
    objective: f64,
    trace: Vec<f64>,
}

fn local_search(points: &[Vec<f64>], weights: &[f64], k: usize, max_iters: usize, mut centers: Vec<Vec<f64>>) -> Run {
    let mut labels: Vec<usize> = Vec::new();
    let mut trace = Vec::new();
    for _ in 0..max_iters.max(1) {
        let mut next = Vec::with_capacity(points.len());
        let mut obj = 0.0;
        for (x, &w) in points.iter().zip(weights) {
            let (c, d) = nearest(x, &centers);
            next.push(c + 1);
            obj += w * d;
        }
        trace.push(obj);
        if next == labels {
            break;
        }
        labels = next;
        centers = median_centers(points, weights, &labels, k, Some(&centers));
    }
    let objective = objective(points, weights, &labels, &centers);
    Run { labels, centers, objective, trace }
}

/// Moves single points between clusters while that lowers the objective,
/// then re-runs the local search from the resulting centers.
fn polish(points: &[Vec<f64>], weights: &[f64], k: usize, max_iters: usize, mut run: Run) -> Run {
    let n = points.len();
    for _ in 0..max_iters.max(1) {
        let mut labels = run.labels.clone();
        let mut best = run.objective;
        let mut sizes = vec![0usize; k];
        for &l in &labels {
            sizes[l - 1] += 1;
        }
        let mut moved = false;
        for i in 0..n {
            let from = labels[i];
            if sizes[from - 1] == 1 {
                continue;
            }
            for to in (1..=k).filter(|&c| c != from) {
                labels[i] = to;
                let centers = median_centers(points, weights, &labels, k, None);
                let obj = objective(points, weights, &labels, &centers);
                if obj < best - 1e-12 * best.abs().max(1.0) {
                    best = obj;
                    sizes[from - 1] -= 1;
                    sizes[to - 1] += 1;
                    moved = true;
                    break;
                }
                labels[i] = from;
            }
        }
        if !moved {
            break;
        }
        let centers = median_centers(points, weights, &labels, k, None);
        let mut next = local_search(points, weights, k, max_iters, centers);
        if next.objective >= run.objective {
            break;
        }
        let mut trace = std::mem::take(&mut run.trace);
        trace.append(&mut next.trace);
        next.trace = trace;
        run = next;
    }
    run
}

/// Approximate minimizer of the weighted k-medians objective.
pub fn weighted_k_medians(
    points: &[Vec<f64>],
    weights: &[f64],
    k: usize,
    config: &KMediansConfig,
) -> Result<KMediansResult> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if weights.len() != points.len() {
        return Err(Error::LengthMismatch { left: weights.len(), right: points.len() });
    }
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0)) {
        return Err(Error::Domain(format!("weights must be positive, found {w}")));
    }
    let n = points.len();
    let dim = points[0].len().max(1);
    let polished = n.saturating_mul(n).saturating_mul(dim).saturating_mul(k) <= POLISH_BUDGET;
    let runs: Vec<Run> = (0..config.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::stream(config.seed, r as u64);
            let centers = farthest_point_init(points, weights, k, &mut rng);
            let run = local_search(points, weights, k, config.max_iters, centers);
            if polished {
                polish(points, weights, k, config.max_iters, run)
            } else {
                run
            }
        })
        .collect();
    let (restart, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1.objective < a.1.objective { b } else { a })
        .expect("at least one restart");
    Ok(KMediansResult {
        labels: LabelVector::new(best.labels, k)?,
        centers: best.centers,
        objective: best.objective,
        trace: best.trace,
        restart,
    })
}
