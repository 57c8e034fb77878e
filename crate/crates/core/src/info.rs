//! Error exponents `I` and `J` and the divergence `J_t(p, q)`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Inputs shared by the exponent computations.
#[derive(Clone, Debug)]
pub struct ExponentInputs {
    pub theta: Vec<f64>,
    pub p: f64,
    pub q: f64,
    pub k: usize,
    pub beta: f64,
    /// Community sizes; required by [`exponent_j`].
    pub sizes: Option<Vec<usize>>,
}

/// `J_t(p, q) = 2 (t p + (1 - t) q - p^t q^(1 - t))`.
pub fn j_t(t: f64, p: f64, q: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("t = {t} is outside (0, 1)")));
    }
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("p = {p}, q = {q} must lie in [0, 1]")));
    }
    Ok(2.0 * (t * p + (1.0 - t) * q - geometric_mix(t, p, q)))
}

/// `p^t q^(1-t)` with `0^s = 0` for `s > 0`.
fn geometric_mix(t: f64, p: f64, q: f64) -> f64 {
    if p == 0.0 || q == 0.0 {
        0.0
    } else {
        p.powf(t) * q.powf(1.0 - t)
    }
}

/// `(sqrt p - sqrt q)^2`, equal to `J_{1/2}(p, q)`.
pub fn hellinger_gap(p: f64, q: f64) -> f64 {
    let d = p.sqrt() - q.sqrt();
    d * d
}

/// `f(x1, x2) = x1 p + x2 q - (x1 + x2) p^(x1/(x1+x2)) q^(x2/(x1+x2))`, i.e.
/// `(x1 + x2) / 2 * J_{x1/(x1+x2)}(p, q)`.
pub fn pair_divergence(x1: f64, x2: f64, p: f64, q: f64) -> f64 {
    let s = x1 + x2;
    x1 * p + x2 * q - s * geometric_mix(x1 / s, p, q)
}

/// `-log((1/n) sum_i exp(-theta_i * scale))`, evaluated with log-sum-exp.
fn neg_log_mean_exp(theta: &[f64], scale: f64) -> f64 {
    let n = theta.len() as f64;
    let exps: Vec<f64> = theta.iter().map(|t| -t * scale).collect();
    let max = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = exps.iter().map(|e| (e - max).exp()).sum();
    -(max + sum.ln() - n.ln())
}

fn check_inputs(inputs: &ExponentInputs) -> Result<()> {
    if !(inputs.p > inputs.q) {
        return Err(Error::Domain(format!("need p > q, got p = {}, q = {}", inputs.p, inputs.q)));
    }
    if inputs.k < 2 {
        return Err(Error::Domain(format!("need k >= 2, got {}", inputs.k)));
    }
    if inputs.theta.is_empty() {
        return Err(Error::Domain("theta is empty".into()));
    }
    if inputs.beta < 1.0 {
        return Err(Error::Domain(format!("need beta >= 1, got {}", inputs.beta)));
    }
    Ok(())
}

/// Minimax exponent `I`: the per-node scale is `n/2` when `k = 2` and
/// `n/(beta k)` otherwise.
pub fn exponent_i(inputs: &ExponentInputs) -> Result<f64> {
    check_inputs(inputs)?;
    let n = inputs.theta.len() as f64;
    let m = if inputs.k == 2 { n / 2.0 } else { n / (inputs.beta * inputs.k as f64) };
    Ok(neg_log_mean_exp(&inputs.theta, m * hellinger_gap(inputs.p, inputs.q)))
}

/// The two smallest community sizes and `t* = n_(1) / (n_(1) + n_(2))`.
pub fn t_star(sizes: &[usize]) -> Result<(usize, usize, f64)> {
    if sizes.len() < 2 {
        return Err(Error::Domain("need at least two community sizes".into()));
    }
    if let Some(&s) = sizes.iter().find(|&&s| s == 0) {
        return Err(Error::Domain(format!("community size {s} must be positive")));
    }
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    let (a, b) = (sorted[0], sorted[1]);
    Ok((a, b, a as f64 / (a + b) as f64))
}

/// Exponent `J` built from the two smallest community sizes.
pub fn exponent_j(inputs: &ExponentInputs) -> Result<f64> {
    check_inputs(inputs)?;
    let sizes = inputs
        .sizes
        .as_deref()
        .ok_or_else(|| Error::Domain("exponent J needs community sizes".into()))?;
    let (a, b, t) = t_star(sizes)?;
    let scale = (a + b) as f64 / 2.0 * j_t(t, inputs.p, inputs.q)?;
    Ok(neg_log_mean_exp(&inputs.theta, scale))
}

/// Everything the `info` command reports.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct InfoReport {
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub t_star: f64,
    pub j_t_star: f64,
}

pub fn info_report(inputs: &ExponentInputs) -> Result<InfoReport> {
    let sizes = inputs
        .sizes
        .as_deref()
        .ok_or_else(|| Error::Domain("info needs community sizes".into()))?;
    let (_, _, t) = t_star(sizes)?;
    Ok(InfoReport {
        i: exponent_i(inputs)?,
        j: exponent_j(inputs)?,
        t_star: t,
        j_t_star: j_t(t, inputs.p, inputs.q)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn inputs(theta: Vec<f64>, k: usize, sizes: Option<Vec<usize>>) -> ExponentInputs {
        ExponentInputs { theta, p: 0.1, q: 0.03, k, beta: 1.0, sizes }
    }

    #[test]
    fn j_t_examples() {
        for t in [0.1, 0.3, 0.5, 0.9] {
            assert!(j_t(t, 0.2, 0.2).unwrap().abs() < 1e-15);
        }
        let half = j_t(0.5, 0.1, 0.03).unwrap();
        assert!((half - hellinger_gap(0.1, 0.03)).abs() < 1e-15);
        // (sqrt(0.1) - sqrt(0.03))^2 = 0.13 - 2 sqrt(0.003)
        assert!((half - 0.020_455_488_498_966_78).abs() < 1e-12);
        assert!(j_t(0.0, 0.1, 0.03).is_err());
        assert!(j_t(1.0, 0.1, 0.03).is_err());
        assert_eq!(j_t(0.3, 0.1, 0.0).unwrap(), 2.0 * 0.3 * 0.1);
    }

    #[test]
    fn constant_theta_collapses() {
        let gap = hellinger_gap(0.1, 0.03);
        let i2 = exponent_i(&inputs(vec![1.0; 300], 2, None)).unwrap();
        assert_relative_eq!(i2, 150.0 * gap, max_relative = 1e-13);
        assert!((i2 - 3.068).abs() < 1e-3);
        let i3 = exponent_i(&inputs(vec![1.0; 300], 3, None)).unwrap();
        assert_relative_eq!(i3, 100.0 * gap, max_relative = 1e-13);
    }

    #[test]
    fn j_equal_sizes_matches_i() {
        let theta: Vec<f64> = (0..300).map(|i| 0.5 + (i % 7) as f64 * 0.2).collect();
        let inp = inputs(theta, 3, Some(vec![100, 100, 100]));
        assert_relative_eq!(exponent_j(&inp).unwrap(), exponent_i(&inp).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn j_unequal_sizes() {
        let inp = inputs(vec![1.0; 300], 2, Some(vec![100, 200]));
        let expected = 150.0 * j_t(1.0 / 3.0, 0.1, 0.03).unwrap();
        assert_relative_eq!(exponent_j(&inp).unwrap(), expected, max_relative = 1e-12);
        // 150 * J_{1/3}(0.1, 0.03) from a 30-digit evaluation
        assert!((expected - 2.555_785_760_328_506).abs() < 1e-12);
        assert!(exponent_j(&inputs(vec![1.0; 3], 2, Some(vec![0, 3]))).is_err());
    }

    #[test]
    fn large_exponents_do_not_underflow() {
        let inp = ExponentInputs { theta: vec![1.0; 10], p: 0.9, q: 0.01, k: 2, beta: 1.0, sizes: None };
        let mut big = inp.clone();
        big.theta = vec![5000.0; 10];
        let v = exponent_i(&big).unwrap();
        assert!(v.is_finite());
        assert_relative_eq!(v, 5000.0 * exponent_i(&inp).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut inp = inputs(vec![1.0; 4], 2, None);
        inp.q = 0.2;
        assert!(exponent_i(&inp).is_err());
    }
}
