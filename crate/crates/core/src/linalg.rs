//! Dense symmetric matrices and a truncated eigensolver.
//!
//! The solver is Lanczos with full reorthogonalization. When the Krylov
//! space becomes invariant it restarts from a fresh vector orthogonal to
//! the current basis, so repeated eigenvalues are still resolved. Ritz
//! values of the projected tridiagonal matrix come from an implicit QL
//! iteration.

use crate::error::{Error, Result};
use crate::rng::splitmix64;

/// Square row-major matrix; symmetric by construction where it matters.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::LengthMismatch { left: data.len(), right: n * n });
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// `sum_j lambda_j u_j u_j^T`.
    pub fn from_eigenpairs(n: usize, values: &[f64], vectors: &[Vec<f64>]) -> Self {
        let mut m = Self::zeros(n);
        for (lambda, u) in values.iter().zip(vectors) {
            for i in 0..n {
                let scaled = lambda * u[i];
                if scaled == 0.0 {
                    continue;
                }
                let row = &mut m.data[i * n..(i + 1) * n];
                for (r, &uj) in row.iter_mut().zip(u) {
                    *r += scaled * uj;
                }
            }
        }
        // Exact symmetry regardless of accumulation order.
        for i in 0..n {
            for j in 0..i {
                let avg = 0.5 * (m.get(i, j) + m.get(j, i));
                m.set(i, j, avg);
                m.set(j, i, avg);
            }
        }
        m
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Settings for [`top_eigenpairs`].
#[derive(Clone, Copy, Debug)]
pub struct EigenOptions {
    /// Residual tolerance relative to the spectral-norm estimate.
    pub tol: f64,
    /// Cap on Lanczos steps, expressed as a multiple of `n`.
    pub max_iter_factor: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter_factor: 100 }
    }
}

/// Eigenpairs ordered by decreasing `|lambda|`.
#[derive(Clone, Debug)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// The `k` eigenpairs of largest magnitude. Ties in `|lambda|` go to the
/// larger signed value, then to the lower Ritz index.
pub fn top_eigenpairs(m: &SymmetricMatrix, k: usize, opts: EigenOptions) -> Result<Eigenpairs> {
    let n = m.n();
    let k = k.min(n);
    if k == 0 {
        return Ok(Eigenpairs { values: vec![], vectors: vec![] });
    }
    let max_iter = opts.max_iter_factor.max(1) * n;
    let min_dim = n.min(2 * k + 20);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    // beta[j] couples basis[j] and basis[j + 1].
    let mut beta: Vec<f64> = Vec::new();
    let mut restart_counter = 0u64;
    let mut v = fresh_vector(n, &basis, &mut restart_counter)
        .ok_or(Error::NoConvergence { iterations: 0 })?;
    let mut w = vec![0.0; n];
    let mut scale = 0.0f64;
    let mut steps = 0usize;

    loop {
        steps += 1;
        if steps > max_iter {
            return Err(Error::NoConvergence { iterations: max_iter });
        }
        m.matvec(&v, &mut w);
        let a = dot(&v, &w);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= a * vi;
        }
        if let (Some(prev), Some(&b)) = (basis.last(), beta.last()) {
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= b * pi;
            }
        }
        basis.push(std::mem::take(&mut v));
        alpha.push(a);
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let b = norm(&w);
        scale = scale.max(a.abs() + b + beta.last().copied().unwrap_or(0.0));
        let dim = basis.len();

        let exhausted = dim == n;
        let check = exhausted || (dim >= min_dim && (dim - min_dim) % 5 == 0);
        if check {
            let (theta, s) = tridiagonal_eigen(&alpha, &beta)?;
            let order = magnitude_order(&theta);
            let wanted = &order[..k.min(dim)];
            let norm_est = theta.iter().fold(scale.max(f64::MIN_POSITIVE), |acc, t| acc.max(t.abs()));
            let converged = exhausted
                || (wanted.len() == k
                    && wanted.iter().all(|&j| (b * s[(dim - 1) * dim + j]).abs() <= opts.tol * norm_est));
            if converged {
                let values: Vec<f64> = wanted.iter().map(|&j| theta[j]).collect();
                let vectors = wanted
                    .iter()
                    .map(|&j| {
                        let mut u = vec![0.0; n];
                        for (r, q) in basis.iter().enumerate() {
                            let c = s[r * dim + j];
                            for (ui, qi) in u.iter_mut().zip(q) {
                                *ui += c * qi;
                            }
                        }
                        let len = norm(&u);
                        if len > 0.0 {
                            u.iter_mut().for_each(|x| *x /= len);
                        }
                        u
                    })
                    .collect();
                return Ok(Eigenpairs { values, vectors });
            }
        }

        if b <= 1e-12 * scale.max(f64::MIN_POSITIVE) || b == 0.0 {
            // Invariant subspace found; continue from an orthogonal vector.
            v = fresh_vector(n, &basis, &mut restart_counter)
                .ok_or(Error::NoConvergence { iterations: steps })?;
            beta.push(0.0);
        } else {
            v = w.iter().map(|x| x / b).collect();
            beta.push(b);
        }
    }
}

/// Deterministic pseudo-random unit vector orthogonal to `basis`.
fn fresh_vector(n: usize, basis: &[Vec<f64>], counter: &mut u64) -> Option<Vec<f64>> {
    for _ in 0..32 {
        *counter += 1;
        let mut state = splitmix64(0x5EED_0F_1A4C_205 ^ *counter);
        let mut v: Vec<f64> = (0..n)
            .map(|_| {
                state = splitmix64(state);
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        for _ in 0..2 {
            for q in basis {
                let c = dot(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let len = norm(&v);
        if len > 1e-8 {
            v.iter_mut().for_each(|x| *x /= len);
            return Some(v);
        }
    }
    None
}

/// Indices sorted by decreasing `|value|`, then decreasing value, then index.
fn magnitude_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .abs()
            .total_cmp(&values[a].abs())
            .then(values[b].total_cmp(&values[a]))
            .then(a.cmp(&b))
    });
    order
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off` (`off[i]` couples `i` and `i + 1`).
///
/// Returns eigenvalues and a row-major `m x m` matrix whose column `j` is
/// the eigenvector of value `j`. Implicit QL with Wilkinson-type shifts.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; m];
    e[..m.saturating_sub(1)].copy_from_slice(&off[..m.saturating_sub(1)]);
    let mut z = vec![0.0; m * m];
    for i in 0..m {
        z[i * m + i] = 1.0;
    }
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..m {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut mm = l;
        while mm < m {
            if e[mm].abs() <= eps * tst1 {
                break;
            }
            mm += 1;
        }
        if mm > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NoConvergence { iterations: iter });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[mm];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..mm).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in 0..m {
                        let zi1 = z[row * m + i + 1];
                        let zi = z[row * m + i];
                        z[row * m + i + 1] = s * zi + c * zi1;
                        z[row * m + i] = c * zi - s * zi1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok((d, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};

    fn random_symmetric(n: usize, seed: u64) -> SymmetricMatrix {
        let mut state = seed;
        let mut m = SymmetricMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                state = splitmix64(state);
                let v = (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        m
    }

    fn dense_spectrum(m: &SymmetricMatrix) -> Vec<f64> {
        let d = DMatrix::from_row_slice(m.n(), m.n(), m.as_slice());
        let mut v: Vec<f64> = SymmetricEigen::new(d).eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
        v
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let diag = [2.0, -1.0, 0.5, 3.0, 0.0];
        let off = [1.0, 0.3, -2.0, 0.7];
        let (vals, vecs) = tridiagonal_eigen(&diag, &off).unwrap();
        let mut full = SymmetricMatrix::zeros(5);
        for i in 0..5 {
            full.set(i, i, diag[i]);
            if i < 4 {
                full.set(i, i + 1, off[i]);
                full.set(i + 1, i, off[i]);
            }
        }
        for j in 0..5 {
            let u: Vec<f64> = (0..5).map(|r| vecs[r * 5 + j]).collect();
            let mut mu = vec![0.0; 5];
            full.matvec(&u, &mut mu);
            for r in 0..5 {
                assert!((mu[r] - vals[j] * u[r]).abs() < 1e-12);
            }
        }
        let mut sorted = vals.clone();
        sorted.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
        let dense = dense_spectrum(&full);
        for (a, b) in sorted.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn top_pairs_match_dense_solver() {
        for (n, k, seed) in [(10, 3, 1), (30, 2, 2), (50, 5, 3), (7, 7, 4)] {
            let m = random_symmetric(n, seed);
            let pairs = top_eigenpairs(&m, k, EigenOptions::default()).unwrap();
            let dense = dense_spectrum(&m);
            for (a, b) in pairs.values.iter().zip(&dense) {
                assert!((a - b).abs() < 1e-9, "n={n}: {a} vs {b}");
            }
            for (lambda, u) in pairs.values.iter().zip(&pairs.vectors) {
                let mut mu = vec![0.0; n];
                m.matvec(u, &mut mu);
                let res: f64 = mu.iter().zip(u).map(|(x, y)| (x - lambda * y).powi(2)).sum::<f64>().sqrt();
                assert!(res < 1e-8, "residual {res}");
            }
        }
    }

    #[test]
    fn repeated_eigenvalues_are_found() {
        // Two disjoint 5-cliques: eigenvalue 4 twice, -1 eight times.
        let n = 10;
        let mut m = SymmetricMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if i != j && i / 5 == j / 5 {
                    m.set(i, j, 1.0);
                }
            }
        }
        let pairs = top_eigenpairs(&m, 2, EigenOptions::default()).unwrap();
        assert!((pairs.values[0] - 4.0).abs() < 1e-10);
        assert!((pairs.values[1] - 4.0).abs() < 1e-10);
        let approx = SymmetricMatrix::from_eigenpairs(n, &pairs.values, &pairs.vectors);
        let mut expected = m.clone();
        for i in 0..n {
            for j in 0..n {
                if i / 5 == j / 5 {
                    expected.set(i, j, 0.8);
                }
            }
        }
        assert!(approx.frobenius_distance(&expected) < 1e-9);
    }

    #[test]
    fn zero_matrix() {
        let m = SymmetricMatrix::zeros(6);
        let pairs = top_eigenpairs(&m, 2, EigenOptions::default()).unwrap();
        assert_eq!(pairs.values, vec![0.0, 0.0]);
    }
}
