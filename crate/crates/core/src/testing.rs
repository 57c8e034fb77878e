//! The two-point testing problem behind the error exponent.
//!
//! Under `H0` the first `m` observations are `Bernoulli(theta0 theta_i p)` and
//! the remaining `m1` are `Bernoulli(theta0 theta_i q)`; under `H1` the roles
//! of `p` and `q` are swapped.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::hellinger_gap;
use crate::rng;

const SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    H0,
    H1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    Counting,
    Lrt,
}

impl std::str::FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "counting" => Ok(TestKind::Counting),
            "lrt" => Ok(TestKind::Lrt),
            other => Err(Error::Config(format!("unknown test {other:?}, expected counting or lrt"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestingInstance {
    pub theta0: f64,
    pub theta: Vec<f64>,
    pub m: usize,
    pub m1: usize,
    pub p: f64,
    pub q: f64,
    pub delta: f64,
}

impl TestingInstance {
    pub fn new(theta0: f64, theta: Vec<f64>, m: usize, m1: usize, p: f64, q: f64, delta: f64) -> Result<Self> {
        let inst = Self { theta0, theta, m, m1, p, q, delta };
        inst.validate()?;
        Ok(inst)
    }

    /// `theta_i = 1` for every observation.
    pub fn homogeneous(theta0: f64, m: usize, m1: usize, p: f64, q: f64) -> Result<Self> {
        Self::new(theta0, vec![1.0; m + m1], m, m1, p, q, 0.0)
    }

    fn validate(&self) -> Result<()> {
        if self.theta.len() != self.m + self.m1 {
            return Err(Error::LengthMismatch { left: self.theta.len(), right: self.m + self.m1 });
        }
        if self.m == 0 || self.m1 == 0 {
            return Err(Error::Domain("both groups must be nonempty".into()));
        }
        if !(self.theta0 > 0.0) || self.theta.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::Domain("theta values must be positive".into()));
        }
        if !(0.0 <= self.q && self.q <= self.p && self.p <= 1.0) {
            return Err(Error::Domain(format!("need 0 <= q <= p <= 1, got p = {}, q = {}", self.p, self.q)));
        }
        for (name, group) in [("first", &self.theta[..self.m]), ("second", &self.theta[self.m..])] {
            let mean = group.iter().sum::<f64>() / group.len() as f64;
            if (mean - 1.0).abs() > self.delta + SLACK {
                return Err(Error::Domain(format!("{name} group has mean theta {mean} outside 1 +/- {}", self.delta)));
            }
        }
        if let Some(t) = self.theta.iter().find(|&&t| self.theta0 * t * self.p > 1.0) {
            return Err(Error::Domain(format!("theta0 * theta_i * p = {} exceeds 1", self.theta0 * t * self.p)));
        }
        Ok(())
    }

    /// Success probabilities under `H0` and `H1`.
    pub fn probabilities(&self) -> (Vec<f64>, Vec<f64>) {
        let h0 = (0..self.len()).map(|i| self.prob(i, true)).collect();
        let h1 = (0..self.len()).map(|i| self.prob(i, false)).collect();
        (h0, h1)
    }

    fn prob(&self, i: usize, null: bool) -> f64 {
        let first = i < self.m;
        let base = if first == null { self.p } else { self.q };
        self.theta0 * self.theta[i] * base
    }

    pub fn len(&self) -> usize {
        self.m + self.m1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Rejects `H0` when the first group's count is strictly below the second's;
/// unequal groups compare means.
pub fn counting_test(x: &[u8], m: usize, m1: usize) -> Result<Decision> {
    if x.len() != m + m1 {
        return Err(Error::LengthMismatch { left: x.len(), right: m + m1 });
    }
    let s1: usize = x[..m].iter().map(|&v| v as usize).sum();
    let s2: usize = x[m..].iter().map(|&v| v as usize).sum();
    let reject = if m == m1 { s1 < s2 } else { s1 * m1 < s2 * m };
    Ok(if reject { Decision::H1 } else { Decision::H0 })
}

/// Log-likelihood-ratio contributions of each observation.
#[derive(Clone, Debug)]
struct LogRatios {
    one: Vec<f64>,
    zero: Vec<f64>,
}

impl LogRatios {
    fn new(inst: &TestingInstance) -> Result<Self> {
        let (h0, h1) = inst.probabilities();
        if let Some(&p) = h0.iter().chain(&h1).find(|&&p| !(p > 0.0 && p < 1.0)) {
            return Err(Error::DegenerateProbability(p));
        }
        let one = h0.iter().zip(&h1).map(|(a, b)| b.ln() - a.ln()).collect();
        let zero = h0.iter().zip(&h1).map(|(a, b)| (1.0 - b).ln() - (1.0 - a).ln()).collect();
        Ok(Self { one, zero })
    }

    fn decide(&self, x: &[u8]) -> Decision {
        let mut stat = 0.0;
        let mut scale = 0.0;
        for (i, &v) in x.iter().enumerate() {
            let term = if v == 1 { self.one[i] } else { self.zero[i] };
            stat += term;
            scale += term.abs();
        }
        if stat > SLACK * scale {
            Decision::H1
        } else {
            Decision::H0
        }
    }
}

/// Rejects `H0` when the `H1` likelihood is strictly larger; near-ties keep `H0`.
pub fn likelihood_ratio_test(x: &[u8], inst: &TestingInstance) -> Result<Decision> {
    if x.len() != inst.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: inst.len() });
    }
    Ok(LogRatios::new(inst)?.decide(x))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorEstimate {
    /// Empirical Type I plus Type II error.
    pub error: f64,
    pub se: f64,
    pub type1: f64,
    pub type2: f64,
    pub reps: usize,
}

/// Monte-Carlo Type I + II error of `test` with `reps` draws under each hypothesis.
/// Replication `r` uses its own substream, so two tests run with the same seed
/// see identical samples.
pub fn simulate_errors(inst: &TestingInstance, test: TestKind, reps: usize, seed: u64) -> Result<ErrorEstimate> {
    if reps == 0 {
        return Err(Error::Config("reps must be at least 1".into()));
    }
    inst.validate()?;
    let lrt = match test {
        TestKind::Lrt => Some(LogRatios::new(inst)?),
        TestKind::Counting => None,
    };
    let (h0, h1) = inst.probabilities();
    let base = rng::derive(seed, rng::tags::TESTING);
    let decide = |x: &[u8]| match &lrt {
        Some(l) => l.decide(x),
        None => counting_test(x, inst.m, inst.m1).expect("length checked"),
    };
    let (false_reject, false_accept) = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut g = rng::stream(base, r as u64);
            let mut x = vec![0u8; inst.len()];
            for (v, &p) in x.iter_mut().zip(&h0) {
                *v = (g.random::<f64>() < p) as u8;
            }
            let e0 = (decide(&x) == Decision::H1) as usize;
            for (v, &p) in x.iter_mut().zip(&h1) {
                *v = (g.random::<f64>() < p) as u8;
            }
            let e1 = (decide(&x) == Decision::H0) as usize;
            (e0, e1)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = reps as f64;
    let (t1, t2) = (false_reject as f64 / n, false_accept as f64 / n);
    let se = (t1 * (1.0 - t1) / n + t2 * (1.0 - t2) / n).sqrt();
    Ok(ErrorEstimate { error: t1 + t2, se, type1: t1, type2: t2, reps })
}

/// `2 exp(-theta0 m (sqrt p - sqrt q)^2)`.
pub fn error_bound(theta0: f64, m: usize, p: f64, q: f64) -> f64 {
    2.0 * (-theta0 * m as f64 * hellinger_gap(p, q)).exp()
}
