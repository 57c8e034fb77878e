//! Refinement by normalized neighbor counts, its iterated form, and the
//! leave-one-out consensus procedure.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, LabelVector};
use crate::rng;
use crate::spectral::{initialize, InitConfig};

/// Rule used when several communities attain the maximal normalized count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieBreak {
    /// Keep the current label if it attains the maximum, else the smallest label.
    #[default]
    Incumbent,
    /// Always the smallest label.
    Smallest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefineConfig {
    pub iterations: usize,
    pub tie_break: TieBreak,
    /// Return the input unchanged instead of failing when every community is empty.
    pub keep_on_empty: bool,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self { iterations: 1, tie_break: TieBreak::Incumbent, keep_on_empty: false }
    }
}

impl RefineConfig {
    pub fn iterations(iterations: usize) -> Self {
        Self { iterations, ..Self::default() }
    }
}

fn check_input(a: &AdjacencyMatrix, z0: &LabelVector, k: usize) -> Result<()> {
    if z0.len() != a.n() {
        return Err(Error::LengthMismatch { left: z0.len(), right: a.n() });
    }
    if let Some(&label) = z0.labels().iter().find(|&&l| l > k) {
        return Err(Error::LabelOutOfRange { label, k });
    }
    Ok(())
}

/// Compares `c1 / s1` with `c2 / s2` exactly.
fn cmp_ratio(c1: usize, s1: usize, c2: usize, s2: usize) -> Ordering {
    (c1 * s2).cmp(&(c2 * s1))
}

/// Label maximizing `counts[u] / sizes[u]` over nonempty communities, or 0
/// when all are empty. `incumbent` wins ties when it attains the maximum.
fn argmax_normalized(counts: &[usize], sizes: &[usize], incumbent: usize) -> usize {
    let mut best = 0;
    if incumbent > 0 && sizes[incumbent - 1] > 0 {
        best = incumbent;
    }
    for u in 1..=sizes.len() {
        if sizes[u - 1] == 0 {
            continue;
        }
        if best == 0 || cmp_ratio(counts[u - 1], sizes[u - 1], counts[best - 1], sizes[best - 1]).is_gt() {
            best = u;
        }
    }
    best
}

/// `counts[u - 1] = sum_{j : labels(j) = u} row_j`.
fn neighbor_counts(row: &[u8], labels: &[usize], k: usize) -> Vec<usize> {
    let mut counts = vec![0usize; k];
    for (&a, &l) in row.iter().zip(labels) {
        if a == 1 && l > 0 {
            counts[l - 1] += 1;
        }
    }
    counts
}

fn refine_step(a: &AdjacencyMatrix, z0: &[usize], k: usize, tie_break: TieBreak) -> Vec<usize> {
    let mut sizes = vec![0usize; k];
    for &l in z0.iter().filter(|&&l| l > 0) {
        sizes[l - 1] += 1;
    }
    (0..a.n())
        .map(|i| {
            let counts = neighbor_counts(a.row(i), z0, k);
            let incumbent = match tie_break {
                TieBreak::Incumbent => z0[i],
                TieBreak::Smallest => 0,
            };
            argmax_normalized(&counts, &sizes, incumbent)
        })
        .collect()
}

/// One simultaneous update: every node moves to the community of `z0` with the
/// largest size-normalized neighbor count.
pub fn refine_once(a: &AdjacencyMatrix, z0: &LabelVector, k: usize) -> Result<LabelVector> {
    refine_with(a, z0, k, &RefineConfig::default())
}

/// `refine_once` repeated `iterations` times, stopping early at a fixed point.
pub fn refine_iterated(a: &AdjacencyMatrix, z0: &LabelVector, k: usize, iterations: usize) -> Result<LabelVector> {
    refine_with(a, z0, k, &RefineConfig::iterations(iterations))
}

pub fn refine_with(a: &AdjacencyMatrix, z0: &LabelVector, k: usize, config: &RefineConfig) -> Result<LabelVector> {
    check_input(a, z0, k)?;
    if config.iterations == 0 {
        return Err(Error::Config("refinement needs at least one iteration".into()));
    }
    if z0.labels().iter().all(|&l| l == 0) {
        return if config.keep_on_empty { Ok(z0.clone()) } else { Err(Error::NoCommunities) };
    }
    let mut current = z0.labels().to_vec();
    for _ in 0..config.iterations {
        let next = refine_step(a, &current, k, config.tie_break);
        if next == current {
            break;
        }
        current = next;
    }
    LabelVector::new(current, k)
}

/// Initialization followed by `iterations` rounds of refinement.
pub fn detect_practical(a: &AdjacencyMatrix, k: usize, config: &InitConfig, iterations: usize) -> Result<LabelVector> {
    let z0 = initialize(a, k, config)?;
    refine_iterated(a, &z0, k, iterations)
}

/// Seed of the initialization run that leaves out node `i`.
pub fn leave_one_out_seed(seed: u64, i: usize) -> u64 {
    rng::derive(rng::derive(seed, rng::tags::LEAVE_ONE_OUT), i as u64)
}

/// Labels of the run without node `i`, lifted to all `n` nodes: entry `j != i`
/// comes from the initialization on `A_{-i}` and entry `i` from the normalized
/// count of row `i` of `A`.
pub fn leave_one_out_labels(a: &AdjacencyMatrix, i: usize, k: usize, config: &InitConfig) -> Result<Vec<usize>> {
    let sub = a.exclude_node(i)?;
    let z = initialize(&sub, k, &config.with_seed(leave_one_out_seed(config.seed, i)))?;
    let mut labels = Vec::with_capacity(a.n());
    labels.extend_from_slice(&z.labels()[..i]);
    labels.push(0);
    labels.extend_from_slice(&z.labels()[i..]);
    let sizes = z.community_sizes();
    let counts = neighbor_counts(a.row(i), &labels, k);
    labels[i] = argmax_normalized(&counts, &sizes, 0);
    Ok(labels)
}

/// `argmax_u |{j : reference(j) = u} ∩ {j : run(j) = run(i)}|`, ties to the smallest `u`.
fn consensus_label(reference: &[usize], run: &[usize], i: usize, k: usize) -> usize {
    let target = run[i];
    let mut overlap = vec![0usize; k];
    for (&r, &l) in reference.iter().zip(run) {
        if l == target && r > 0 {
            overlap[r - 1] += 1;
        }
    }
    let mut best = 0;
    for u in 1..k {
        if overlap[u] > overlap[best] {
            best = u;
        }
    }
    best + 1
}

/// Leave-one-out initialization with per-node self assignment and consensus
/// against the run that leaves out node 0.
pub fn detect_provable(a: &AdjacencyMatrix, k: usize, config: &InitConfig) -> Result<LabelVector> {
    let n = a.n();
    if n < 3 {
        return Err(Error::Domain(format!("leave-one-out detection needs n >= 3, got {n}")));
    }
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let runs: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| leave_one_out_labels(a, i, k, config))
        .collect::<Result<_>>()?;
    consensus(&runs, k)
}

/// Consensus step over `n` lifted leave-one-out label vectors.
pub fn consensus(runs: &[Vec<usize>], k: usize) -> Result<LabelVector> {
    let reference = runs.first().ok_or(Error::EmptyInput)?;
    if reference.iter().all(|&l| l == 0) {
        return Err(Error::DegenerateReference);
    }
    let mut labels = Vec::with_capacity(runs.len());
    labels.push(reference[0]);
    for (i, run) in runs.iter().enumerate().skip(1) {
        labels.push(consensus_label(reference, run, i, k));
    }
    LabelVector::new(labels, k)
}
