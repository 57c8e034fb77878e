//! Per-method order statistics of the loss.

use serde::Serialize;

use super::{Method, RunResult};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub method: Method,
    /// Successful runs; failed runs are left out.
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub sd: f64,
}

/// Element at index `floor((n - 1) * p)` of the sorted sample.
fn order_statistic(sorted: &[f64], p: f64) -> f64 {
    sorted[((sorted.len() - 1) as f64 * p).floor() as usize]
}

impl Summary {
    pub fn from_losses(method: Method, losses: &[f64]) -> Result<Self> {
        if losses.is_empty() {
            return Err(Error::EmptyResults);
        }
        let mut sorted = losses.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mean = sorted.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (sorted.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            method,
            count: n,
            min: sorted[0],
            q1: order_statistic(&sorted, 0.25),
            median: order_statistic(&sorted, 0.5),
            q3: order_statistic(&sorted, 0.75),
            max: sorted[n - 1],
            mean,
            sd,
        })
    }
}

/// One summary per method, in order of first appearance.
pub fn summarize(results: &[RunResult]) -> Result<Vec<Summary>> {
    let mut methods: Vec<Method> = Vec::new();
    for r in results {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
    }
    let out: Vec<Summary> = methods
        .into_iter()
        .filter_map(|m| {
            let losses: Vec<f64> = results.iter().filter(|r| r.method == m).filter_map(|r| r.loss).collect();
            Summary::from_losses(m, &losses).ok()
        })
        .collect();
    if out.is_empty() {
        return Err(Error::EmptyResults);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_and_pair() {
        let s = Summary::from_losses(Method::Init, &[0.25]).unwrap();
        assert_eq!((s.min, s.q1, s.median, s.q3, s.max, s.mean, s.sd), (0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.0));
        let s = Summary::from_losses(Method::Init, &[1.0, 0.0]).unwrap();
        assert_eq!(s.median, 0.0);
        assert_eq!(s.mean, 0.5);
        assert_eq!(summarize(&[]), Err(Error::EmptyResults));
    }

    #[test]
    fn ten_rows() {
        let losses = [0.3, 0.1, 0.0, 0.5, 0.2, 0.9, 0.4, 0.7, 0.6, 0.8];
        let s = Summary::from_losses(Method::Score, &losses).unwrap();
        assert_eq!((s.q1, s.median, s.q3), (0.2, 0.4, 0.6));
        assert!((s.mean - 0.45).abs() < 1e-15);
        // sum of squared deviations = 0.825
        assert!((s.sd - (0.825f64 / 9.0).sqrt()).abs() < 1e-15);
    }
}
