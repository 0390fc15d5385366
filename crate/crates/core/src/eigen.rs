//! Iterative eigensolvers for large Hermitian operators.
//!
//! [`lanczos_largest`] is a plain three-term Lanczos iteration for the top
//! eigenvalue of a real symmetric operator given only as a matrix-vector
//! product; no basis is stored, so it handles million-vertex graphs.
//! [`block_lowest`] is Chebyshev-filtered subspace iteration for the
//! lowest eigenpairs of a complex Hermitian operator, with explicit
//! residuals; working on a block makes it robust to degenerate
//! eigenvalues.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{c64, hermitian_eigen, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosResult {
    pub value: f64,
    pub iterations: usize,
    /// Residual estimate `|β_{j+1} s_j|` of the returned Ritz pair.
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn top_ritz(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let j = alpha.len();
    let mut t = DMatrix::<f64>::zeros(j, j);
    for i in 0..j {
        t[(i, i)] = alpha[i];
        if i + 1 < j {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (k, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty tridiagonal");
    (value, eig.eigenvectors[(j - 1, k)])
}

/// Largest eigenvalue of a real symmetric operator `y = A x`.
///
/// The start vector has positive entries, so for operators with
/// non-negative entries it overlaps the Perron vector.
pub fn lanczos_largest<F>(n: usize, mut apply: F, tol: f64, max_iter: usize, seed: u64) -> Result<LanczosResult>
where
    F: FnMut(&[f64], &mut [f64]),
{
    if n == 0 {
        return Err(Error::InvalidParameter("empty operator".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
    let norm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    let mut v_prev = vec![0.0; n];
    let mut w = vec![0.0; n];
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    let mut last = (0.0, f64::INFINITY);
    for j in 0..max_iter.min(n) {
        apply(&v, &mut w);
        let a = dot(&w, &v);
        let b_prev = if j > 0 { beta[j - 1] } else { 0.0 };
        for i in 0..n {
            w[i] -= a * v[i] + b_prev * v_prev[i];
        }
        alpha.push(a);
        let b = dot(&w, &w).sqrt();
        // the tridiagonal solve is cubic in j, so convergence is tested sparsely
        let exhausted = b < 1e-300 || j + 1 == max_iter.min(n);
        if j % 8 == 7 || exhausted {
            let (value, s_last) = top_ritz(&alpha, &beta);
            let residual = (b * s_last).abs();
            last = (value, residual);
            if residual <= tol * value.abs().max(1.0) || b < 1e-300 {
                return Ok(LanczosResult { value, iterations: j + 1, residual });
            }
        }
        beta.push(b);
        std::mem::swap(&mut v_prev, &mut v);
        for i in 0..n {
            v[i] = w[i] / b;
        }
    }
    if alpha.len() == n {
        // the full space was spanned; the Ritz value is exact
        return Ok(LanczosResult { value: last.0, iterations: n, residual: 0.0 });
    }
    Err(Error::ConvergenceFailure { iterations: max_iter, residual: last.1 })
}

#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// Eigenvectors as columns.
    pub vectors: CMatrix,
    /// `‖H v_i − λ_i v_i‖` per pair.
    pub residuals: Vec<f64>,
    /// Filter sweeps performed.
    pub sweeps: usize,
}

/// Orthonormal columns spanning `w` by twice-iterated Gram–Schmidt;
/// columns that collapse are replaced by fresh random directions.
fn orthonormal_columns(w: CMatrix, rng: &mut ChaCha8Rng) -> CMatrix {
    let n = w.nrows();
    let mut out: Vec<nalgebra::DVector<crate::linalg::C64>> = Vec::with_capacity(w.ncols());
    for j in 0..w.ncols() {
        let mut col = w.column(j).into_owned();
        for attempt in 0..3 {
            let before = col.norm();
            for _ in 0..2 {
                for q in &out {
                    let p = q.dotc(&col);
                    col -= q * p;
                }
            }
            let nrm = col.norm();
            if nrm > 1e-8 * before || attempt == 2 {
                col /= c64(nrm.max(1e-300), 0.0);
                break;
            }
            col = nalgebra::DVector::from_fn(n, |_, _| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        }
        out.push(col);
    }
    CMatrix::from_columns(&out)
}

/// Rayleigh–Ritz on an orthonormal block: Ritz values, vectors and the
/// operator applied to the vectors.
fn rayleigh_ritz<F>(x: &CMatrix, apply: &F) -> (Vec<f64>, CMatrix, CMatrix)
where
    F: Fn(&CMatrix) -> CMatrix,
{
    let hx = apply(x);
    let t = x.adjoint() * &hx;
    let t = (&t + t.adjoint()).scale(0.5);
    let (theta, y) = hermitian_eigen(&t);
    (theta, x * &y, hx * y)
}

/// Lowest `k` eigenpairs of a Hermitian operator given as a block product
/// `X ↦ H X`, by Chebyshev-filtered subspace iteration.
///
/// `upper` must bound the spectrum from above (a Gershgorin bound will
/// do). Each sweep applies a degree-`CHEBYSHEV_DEGREE` Chebyshev polynomial
/// that damps `[cut, upper]`, where `cut` is the largest current Ritz
/// value, then re-orthonormalises and performs Rayleigh–Ritz. The block
/// carries a few guard vectors so that clusters straddling the `k`-th
/// eigenvalue converge too.
pub fn block_lowest<F>(
    n: usize,
    k: usize,
    apply: F,
    upper: f64,
    tol: f64,
    max_sweeps: usize,
    seed: u64,
) -> Result<EigenPairs>
where
    F: Fn(&CMatrix) -> CMatrix,
{
    const CHEBYSHEV_DEGREE: usize = 24;
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("cannot compute {k} eigenpairs of a {n}x{n} operator")));
    }
    let b = (k + 4 + k / 2).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = CMatrix::from_fn(n, b, |_, _| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let mut x = orthonormal_columns(start, &mut rng);
    let mut worst = f64::INFINITY;
    for sweep in 0..max_sweeps {
        let (theta, u, hu) = rayleigh_ritz(&x, &apply);
        let residuals: Vec<f64> = (0..k)
            .map(|i| (hu.column(i) - u.column(i) * c64(theta[i], 0.0)).norm())
            .collect();
        worst = residuals.iter().copied().fold(0.0, f64::max);
        if b == n || (0..k).all(|i| residuals[i] <= tol * theta[i].abs().max(1.0)) {
            return Ok(EigenPairs {
                values: theta[..k].to_vec(),
                vectors: u.columns(0, k).into_owned(),
                residuals,
                sweeps: sweep,
            });
        }
        let cut = theta[b - 1];
        let half = (upper - cut) / 2.0;
        let centre = (upper + cut) / 2.0;
        if half <= 0.0 {
            return Err(Error::InvalidParameter("spectral upper bound is below the Ritz values".into()));
        }
        let scale = c64(1.0 / half, 0.0);
        let shifted = |y: &CMatrix| (apply(y) - y * c64(centre, 0.0)) * scale;
        let mut prev = u;
        let mut cur = shifted(&prev);
        for _ in 1..CHEBYSHEV_DEGREE {
            let next = shifted(&cur) * c64(2.0, 0.0) - &prev;
            prev = cur;
            cur = next;
        }
        x = orthonormal_columns(cur, &mut rng);
    }
    Err(Error::ConvergenceFailure { iterations: max_sweeps, residual: worst })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_apply(n: usize) -> impl Fn(&[f64], &mut [f64]) {
        move |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                let l = if i > 0 { x[i - 1] } else { 0.0 };
                let r = if i + 1 < n { x[i + 1] } else { 0.0 };
                y[i] = 0.5 * (l + r);
            }
        }
    }

    #[test]
    fn path_graph_top_eigenvalue() {
        // Dirichlet walk on a path of n vertices: cos(π/(n+1))
        for n in [1usize, 2, 10, 300] {
            let r = lanczos_largest(n, path_apply(n), 1e-12, 2000, 1).unwrap();
            let exact = (std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((r.value - exact).abs() < 1e-9, "n={n}: {} vs {exact}", r.value);
        }
    }

    #[test]
    fn block_lowest_finds_degenerate_pairs() {
        // cycle Laplacian: eigenvalues 2 − 2cos(2πk/n), mostly doubly degenerate
        let n = 120;
        let apply = |x: &CMatrix| {
            CMatrix::from_fn(n, x.ncols(), |i, j| {
                x[(i, j)] * c64(2.0, 0.0) - x[((i + 1) % n, j)] - x[((i + n - 1) % n, j)]
            })
        };
        let r = block_lowest(n, 7, apply, 4.0, 1e-9, 500, 3).unwrap();
        let mut exact: Vec<f64> =
            (0..n).map(|k| 2.0 - 2.0 * (std::f64::consts::TAU * k as f64 / n as f64).cos()).collect();
        exact.sort_by(f64::total_cmp);
        for i in 0..7 {
            assert!((r.values[i] - exact[i]).abs() < 1e-8, "{i}: {} vs {}", r.values[i], exact[i]);
            assert!(r.residuals[i] < 1e-8);
        }
    }
}
