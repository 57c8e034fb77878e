//! Exhaustive references for small problems: the constrained maximum
//! likelihood labeling and the exact weighted k-medians optimum.

use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, LabelVector};
use crate::kmedians::{median_centers, objective};
use crate::model::SpaceDescriptor;

/// Largest number of nodes or points accepted by the exhaustive searches.
pub const EXHAUSTIVE_MAX_N: usize = 12;

const SLACK: f64 = 1e-12;

/// Likelihood with `B_uu = p` and `B_uv = q`, known `theta`, and the size and
/// normalization constraints of the parameter space.
#[derive(Clone, Debug)]
pub struct MleProblem {
    pub a: AdjacencyMatrix,
    pub theta: Vec<f64>,
    pub p: f64,
    pub q: f64,
    pub k: usize,
    pub beta: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MleSolution {
    pub labels: LabelVector,
    pub log_likelihood: f64,
}

fn bernoulli_log(x: u8, prob: f64) -> f64 {
    if x == 1 {
        prob.ln()
    } else {
        (1.0 - prob).ln()
    }
}

impl MleProblem {
    fn check(&self) -> Result<()> {
        let n = self.a.n();
        if n > EXHAUSTIVE_MAX_N {
            return Err(Error::TooLarge { n, max: EXHAUSTIVE_MAX_N });
        }
        if self.theta.len() != n {
            return Err(Error::LengthMismatch { left: self.theta.len(), right: n });
        }
        SpaceDescriptor { p: self.p, q: self.q, k: self.k, beta: self.beta, delta: self.delta, alpha: None }.check()?;
        if self.k == 0 {
            return Err(Error::Domain("k must be at least 1".into()));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let t = self.theta[i] * self.theta[j];
                if !(t * self.p > 0.0 && t * self.p < 1.0) || !(t * self.q >= 0.0 && t * self.q < 1.0) {
                    return Err(Error::InvalidProbability { i, j, prob: t * self.p });
                }
            }
        }
        Ok(())
    }

    /// Per-pair log-likelihoods `(within, across)` for `i < j`, row-major.
    fn pair_terms(&self) -> Vec<(f64, f64)> {
        let n = self.a.n();
        let mut out = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                let t = self.theta[i] * self.theta[j];
                let x = self.a.get(i, j);
                out.push((bernoulli_log(x, t * self.p), bernoulli_log(x, t * self.q)));
            }
        }
        out
    }

    /// Log-likelihood of `z` (labels in `1..=k`).
    pub fn log_likelihood(&self, z: &LabelVector) -> Result<f64> {
        self.check()?;
        if z.len() != self.a.n() {
            return Err(Error::LengthMismatch { left: z.len(), right: self.a.n() });
        }
        Ok(evaluate(&self.pair_terms(), z.labels()))
    }

    /// Whether `z` satisfies the size bounds and the per-community mean-theta bounds.
    pub fn is_feasible(&self, z: &[usize]) -> bool {
        let n = self.a.n();
        let (lo, hi) = SpaceDescriptor { p: self.p, q: self.q, k: self.k, beta: self.beta, delta: self.delta, alpha: None }
            .size_bounds(n);
        let mut sizes = vec![0usize; self.k];
        let mut sums = vec![0.0; self.k];
        for (&l, &t) in z.iter().zip(&self.theta) {
            if l == 0 || l > self.k {
                return false;
            }
            sizes[l - 1] += 1;
            sums[l - 1] += t;
        }
        let sizes_ok = sizes.iter().all(|&s| s > 0 && s as f64 >= lo - SLACK && s as f64 <= hi + SLACK);
        sizes_ok
            && sizes
                .iter()
                .zip(&sums)
                .all(|(&s, &sum)| (sum / s as f64 - 1.0).abs() <= self.delta + SLACK)
    }
}

fn evaluate(terms: &[(f64, f64)], z: &[usize]) -> f64 {
    let n = z.len();
    let mut total = 0.0;
    let mut idx = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let (w, c) = terms[idx];
            total += if z[i] == z[j] { w } else { c };
            idx += 1;
        }
    }
    total
}

/// Advances `z` (entries in `1..=k`) to its lexicographic successor; false after the last.
fn next_assignment(z: &mut [usize], k: usize) -> bool {
    for pos in (0..z.len()).rev() {
        if z[pos] < k {
            z[pos] += 1;
            return true;
        }
        z[pos] = 1;
    }
    false
}

/// Maximum likelihood labeling over every feasible `z in [k]^n`; ties go to
/// the lexicographically smallest labeling.
pub fn mle_search(problem: &MleProblem) -> Result<LabelVector> {
    Ok(mle_search_detailed(problem)?.labels)
}

pub fn mle_search_detailed(problem: &MleProblem) -> Result<MleSolution> {
    problem.check()?;
    let n = problem.a.n();
    let terms = problem.pair_terms();
    let mut z = vec![1usize; n];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        if problem.is_feasible(&z) {
            let ll = evaluate(&terms, &z);
            let better = match &best {
                None => true,
                Some((b, _)) => ll > *b + SLACK * b.abs().max(1.0),
            };
            if better {
                best = Some((ll, z.clone()));
            }
        }
        if !next_assignment(&mut z, problem.k) {
            break;
        }
    }
    let (log_likelihood, labels) = best.ok_or(Error::Infeasible)?;
    Ok(MleSolution { labels: LabelVector::new(labels, problem.k)?, log_likelihood })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BruteKMedians {
    /// Labels in `1..=k`.
    pub labels: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    pub objective: f64,
}

/// Global optimum of the weighted k-medians objective over all `k^n` labelings.
pub fn k_medians_brute(points: &[Vec<f64>], weights: &[f64], k: usize) -> Result<BruteKMedians> {
    let n = points.len();
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::TooLarge { n, max: EXHAUSTIVE_MAX_N });
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if weights.len() != n {
        return Err(Error::LengthMismatch { left: weights.len(), right: n });
    }
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let mut z = vec![1usize; n];
    let mut best: Option<BruteKMedians> = None;
    loop {
        let centers = median_centers(points, weights, &z, k, None);
        let obj = objective(points, weights, &z, &centers);
        if best.as_ref().is_none_or(|b| obj < b.objective) {
            best = Some(BruteKMedians { labels: z.clone(), centers, objective: obj });
        }
        if !next_assignment(&mut z, k) {
            break;
        }
    }
    Ok(best.expect("at least one labeling"))
}
