//! Degree-corrected block model: parameters, sampling and parameter-space checks.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, LabelVector};
use crate::rng;

/// Slack for floating-point comparisons in the parameter-space checks.
const CHECK_SLACK: f64 = 1e-12;

/// Ground-truth `(theta, B, z)`; edge `(i, j)` appears with probability
/// `theta_i theta_j B[z(i)][z(j)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DcbmParams {
    theta: Vec<f64>,
    b: Vec<Vec<f64>>,
    z: LabelVector,
}

/// How edge probabilities above 1 are handled when sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ProbabilityPolicy {
    /// Fail with [`Error::InvalidProbability`].
    #[default]
    Strict,
    /// Cap at 1.
    Clamp,
}

impl DcbmParams {
    pub fn new(theta: Vec<f64>, b: Vec<Vec<f64>>, z: LabelVector) -> Result<Self> {
        let k = b.len();
        if theta.len() != z.len() {
            return Err(Error::LengthMismatch { left: theta.len(), right: z.len() });
        }
        if let Some(t) = theta.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(Error::Domain(format!("theta must be positive, found {t}")));
        }
        for (u, row) in b.iter().enumerate() {
            if row.len() != k {
                return Err(Error::Domain(format!("B row {u} has length {}, expected {k}", row.len())));
            }
            for (v, &x) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&x) {
                    return Err(Error::Domain(format!("B[{u}][{v}] = {x} outside [0, 1]")));
                }
                if x != b[v][u] {
                    return Err(Error::Domain("B must be symmetric".into()));
                }
            }
        }
        if let Some(&label) = z.labels().iter().find(|&&l| l == 0 || l > k) {
            return Err(Error::LabelOutOfRange { label, k });
        }
        let z = z.with_k(k);
        Ok(Self { theta, b, z })
    }

    /// Two-parameter block matrix: `p` on the diagonal, `q` elsewhere.
    pub fn planted(theta: Vec<f64>, p: f64, q: f64, z: LabelVector) -> Result<Self> {
        let k = z.k();
        let b = (0..k)
            .map(|u| (0..k).map(|v| if u == v { p } else { q }).collect())
            .collect();
        Self::new(theta, b, z)
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn k(&self) -> usize {
        self.b.len()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn b(&self) -> &[Vec<f64>] {
        &self.b
    }

    pub fn z(&self) -> &LabelVector {
        &self.z
    }

    /// `theta_i theta_j B[z(i)][z(j)]`.
    #[inline]
    pub fn edge_probability(&self, i: usize, j: usize) -> f64 {
        let (u, v) = (self.z.get(i) - 1, self.z.get(j) - 1);
        self.theta[i] * self.theta[j] * self.b[u][v]
    }

    /// Smallest diagonal and largest off-diagonal entry of `B`.
    pub fn p_q(&self) -> (f64, f64) {
        let k = self.k();
        let p = (0..k).map(|u| self.b[u][u]).fold(f64::INFINITY, f64::min);
        let q = (0..k)
            .flat_map(|u| (0..k).filter(move |&v| v != u).map(move |v| (u, v)))
            .map(|(u, v)| self.b[u][v])
            .fold(0.0, f64::max);
        (p, q)
    }
}

/// Draws `A` from the model. Pairs `(i, j)`, `i < j`, are visited in
/// lexicographic order; row `i` uses its own substream of `seed`.
pub fn sample_adjacency(params: &DcbmParams, seed: u64) -> Result<AdjacencyMatrix> {
    sample_adjacency_with(params, seed, ProbabilityPolicy::Strict)
}

pub fn sample_adjacency_with(
    params: &DcbmParams,
    seed: u64,
    policy: ProbabilityPolicy,
) -> Result<AdjacencyMatrix> {
    let n = params.n();
    let rows: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let mut hits = Vec::new();
            for j in (i + 1)..n {
                let mut prob = params.edge_probability(i, j);
                if !(0.0..=1.0).contains(&prob) {
                    match policy {
                        ProbabilityPolicy::Strict => {
                            return Err(Error::InvalidProbability { i, j, prob })
                        }
                        ProbabilityPolicy::Clamp => prob = prob.clamp(0.0, 1.0),
                    }
                }
                if r.random::<f64>() < prob {
                    hits.push(j);
                }
            }
            Ok(hits)
        })
        .collect::<Result<_>>()?;
    let mut a = AdjacencyMatrix::empty(n);
    for (i, hits) in rows.into_iter().enumerate() {
        for j in hits {
            a.insert_edge(i, j)?;
        }
    }
    Ok(a)
}

/// Bounds defining the parameter space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub p: f64,
    pub q: f64,
    pub k: usize,
    pub beta: f64,
    pub delta: f64,
    /// Cap on the diagonal of `B` relative to `p`.
    #[serde(default)]
    pub alpha: Option<f64>,
}

impl SpaceDescriptor {
    pub fn check(&self) -> Result<()> {
        if !(0.0 <= self.q && self.q < self.p && self.p <= 1.0) {
            return Err(Error::Domain(format!("need 0 <= q < p <= 1, got p = {}, q = {}", self.p, self.q)));
        }
        if self.beta < 1.0 || self.delta < 0.0 || self.alpha.is_some_and(|a| a < 1.0) {
            return Err(Error::Domain("need beta >= 1, delta >= 0, alpha >= 1".into()));
        }
        Ok(())
    }

    /// Allowed community sizes `[n/(beta k) - 1, beta n/k + 1]`.
    pub fn size_bounds(&self, n: usize) -> (f64, f64) {
        let (n, k) = (n as f64, self.k as f64);
        (n / (self.beta * k) - 1.0, self.beta * n / k + 1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub violations: Vec<String>,
}

/// Checks membership of `params` in the space described by `desc`.
pub fn validate_space(params: &DcbmParams, desc: &SpaceDescriptor) -> ValidationReport {
    let mut violations = Vec::new();
    let k = params.k();
    if k != desc.k {
        violations.push(format!("community count {k} differs from k = {}", desc.k));
    }
    if !(desc.q < desc.p) {
        violations.push(format!("q = {} is not below p = {}", desc.q, desc.p));
    }
    let sizes = params.z.community_sizes();
    let mut sums = vec![0.0; k];
    for (i, &t) in params.theta.iter().enumerate() {
        sums[params.z.get(i) - 1] += t;
    }
    for u in 0..k {
        if sizes[u] == 0 {
            violations.push(format!("community {} is empty", u + 1));
            continue;
        }
        let mean = sums[u] / sizes[u] as f64;
        if (mean - 1.0).abs() > desc.delta + CHECK_SLACK {
            violations.push(format!(
                "normalization: community {} has mean theta {mean:.6} outside [1 - {d}, 1 + {d}]",
                u + 1,
                d = desc.delta
            ));
        }
    }
    for u in 0..k {
        for v in 0..k {
            let x = params.b[u][v];
            if u == v && x < desc.p - CHECK_SLACK {
                violations.push(format!("connectivity: B[{u}][{u}] = {x} below p = {}", desc.p));
            }
            if u < v && x > desc.q + CHECK_SLACK {
                violations.push(format!("connectivity: B[{u}][{v}] = {x} above q = {}", desc.q));
            }
        }
        if let Some(alpha) = desc.alpha {
            if params.b[u][u] > alpha * desc.p + CHECK_SLACK {
                violations.push(format!("diagonal cap: B[{u}][{u}] exceeds alpha p = {}", alpha * desc.p));
            }
        }
    }
    let (lo, hi) = desc.size_bounds(params.n());
    for (u, &s) in sizes.iter().enumerate() {
        if (s as f64) < lo - CHECK_SLACK || (s as f64) > hi + CHECK_SLACK {
            violations.push(format!("size: community {} has {s} nodes outside [{lo:.3}, {hi:.3}]", u + 1));
        }
    }
    ValidationReport { pass: violations.is_empty(), violations }
}

/// Looks for a balanced partition whose block means of `theta` lie strictly
/// within `delta/4` of 1.
///
/// For `k = 2` the first block has `floor(n/2)` nodes; for `k >= 3` the two
/// smallest blocks have `floor(n/(beta k))` nodes and the rest share the
/// remainder evenly, sizes nondecreasing. The search is greedy (descending
/// theta, most under-filled block first) followed by at most `10 n`
/// improving swaps. A returned partition always satisfies the constraints;
/// `None` means none was found.
pub fn check_condition_n(theta: &[f64], k: usize, beta: f64, delta: f64) -> Option<Vec<Vec<usize>>> {
    let n = theta.len();
    if k < 2 || n < k || theta.iter().any(|&t| !(t > 0.0)) {
        return None;
    }
    let sizes = condition_n_sizes(n, k, beta)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| theta[b].total_cmp(&theta[a]).then(a.cmp(&b)));

    let mut block = vec![0usize; n];
    let mut sums = vec![0.0; k];
    let mut filled = vec![0usize; k];
    for &i in &order {
        // Block whose running sum exceeds its fill count the least.
        let u = (0..k)
            .filter(|&u| filled[u] < sizes[u])
            .min_by(|&a, &b| {
                let da = sums[a] - filled[a] as f64;
                let db = sums[b] - filled[b] as f64;
                da.total_cmp(&db).then(a.cmp(&b))
            })?;
        block[i] = u;
        sums[u] += theta[i];
        filled[u] += 1;
    }

    let cost = |sums: &[f64]| -> f64 {
        sums.iter().zip(&sizes).map(|(s, &m)| (s / m as f64 - 1.0).powi(2)).sum()
    };
    let satisfied = |sums: &[f64]| -> bool {
        sums.iter().zip(&sizes).all(|(s, &m)| (s / m as f64 - 1.0).abs() < delta / 4.0)
    };

    let mut swaps = 0;
    while !satisfied(&sums) && swaps < 10 * n {
        let current = cost(&sums);
        let mut improved = false;
        'scan: for a in 0..n {
            for b in (a + 1)..n {
                let (ua, ub) = (block[a], block[b]);
                if ua == ub {
                    continue;
                }
                let d = theta[b] - theta[a];
                let mut trial = sums.clone();
                trial[ua] += d;
                trial[ub] -= d;
                if cost(&trial) < current - 1e-15 {
                    block[a] = ub;
                    block[b] = ua;
                    sums = trial;
                    improved = true;
                    break 'scan;
                }
            }
        }
        if !improved {
            break;
        }
        swaps += 1;
    }

    // Recompute from scratch so the certificate does not depend on running sums.
    let mut parts = vec![Vec::new(); k];
    for (i, &u) in block.iter().enumerate() {
        parts[u].push(i);
    }
    let exact: Vec<f64> = parts.iter().map(|p| p.iter().map(|&i| theta[i]).sum()).collect();
    let sizes_ok = parts.iter().zip(&sizes).all(|(p, &s)| p.len() == s);
    (sizes_ok && satisfied(&exact)).then_some(parts)
}

fn condition_n_sizes(n: usize, k: usize, beta: f64) -> Option<Vec<usize>> {
    if k == 2 {
        return Some(vec![n / 2, n - n / 2]);
    }
    let m = (n as f64 / (beta * k as f64)).floor() as usize;
    if m == 0 || 2 * m > n {
        return None;
    }
    let rest = n - 2 * m;
    let others = k - 2;
    let mut sizes = vec![m, m];
    for u in 0..others {
        sizes.push(rest / others + usize::from(u >= others - rest % others));
    }
    (sizes[2] >= m).then_some(sizes)
}

/// `theta_i = |Z_i| + 1 - sd sqrt(2/pi)` with `Z_i ~ N(0, sd^2)`, so `E theta_i = 1`.
pub fn sample_theta_halfnormal(n: usize, sd: f64, seed: u64) -> Result<Vec<f64>> {
    if !(sd > 0.0) {
        return Err(Error::Domain(format!("sd must be positive, got {sd}")));
    }
    let shift = 1.0 - sd * (2.0 / std::f64::consts::PI).sqrt();
    let mut r = rng::rng_from(seed);
    Ok((0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut r);
            (sd * z).abs() + shift
        })
        .collect())
}

/// Pareto draws by inverse CDF: `theta = scale * U^(-1/shape)`, `U` uniform on (0, 1].
pub fn sample_theta_pareto(n: usize, shape: f64, scale: f64, seed: u64) -> Result<Vec<f64>> {
    if !(shape > 1.0 && scale > 0.0) {
        return Err(Error::Domain(format!("need shape > 1 and scale > 0, got {shape}, {scale}")));
    }
    let mut r = rng::rng_from(seed);
    Ok((0..n)
        .map(|_| {
            let u = 1.0 - r.random::<f64>();
            scale * u.powf(-1.0 / shape)
        })
        .collect())
}

/// Degree-correction law as written in parameter files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaSpec {
    Values(Vec<f64>),
    Law(ThetaLaw),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaLaw {
    Halfnormal { sd: f64 },
    Pareto { shape: f64, scale: f64 },
    Constant { value: f64 },
}

impl ThetaLaw {
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        match *self {
            ThetaLaw::Halfnormal { sd } => sample_theta_halfnormal(n, sd, seed),
            ThetaLaw::Pareto { shape, scale } => sample_theta_pareto(n, shape, scale, seed),
            ThetaLaw::Constant { value } => Ok(vec![value; n]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelSpec {
    Labels(Vec<usize>),
    Sizes { sizes: Vec<usize> },
}

/// JSON parameter file: `{n, k, theta, B, z, seed}` plus optional `beta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamFile {
    pub n: usize,
    pub k: usize,
    pub theta: ThetaSpec,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    pub z: LabelSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub beta: Option<f64>,
}

impl ParamFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Materializes `theta` (drawing it if given as a law) and `z`.
    pub fn resolve(&self) -> Result<DcbmParams> {
        let theta = match &self.theta {
            ThetaSpec::Values(v) => v.clone(),
            ThetaSpec::Law(law) => law.sample(self.n, rng::derive(self.seed, rng::tags::THETA))?,
        };
        let z = match &self.z {
            LabelSpec::Labels(l) => LabelVector::new(l.clone(), self.k)?,
            LabelSpec::Sizes { sizes } => {
                if sizes.len() != self.k {
                    return Err(Error::Config(format!("{} sizes for k = {}", sizes.len(), self.k)));
                }
                LabelVector::from_sizes(sizes)
            }
        };
        if theta.len() != self.n || z.len() != self.n {
            return Err(Error::Config(format!(
                "n = {} but theta has {} and z has {} entries",
                self.n,
                theta.len(),
                z.len()
            )));
        }
        if self.b.len() != self.k {
            return Err(Error::Config(format!("B has {} rows for k = {}", self.b.len(), self.k)));
        }
        DcbmParams::new(theta, self.b.clone(), z)
    }

    /// Seed for the graph draw.
    pub fn graph_seed(&self) -> u64 {
        rng::derive(self.seed, rng::tags::GRAPH)
    }
}
