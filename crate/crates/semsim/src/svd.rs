//! Singular value decomposition.
//!
//! `dense_svd` is a one-sided Jacobi factorization and doubles as the test
//! oracle. `truncated_svd` runs randomized subspace iteration on sparse
//! input, seeded for determinism. No external linear-algebra dependency;
//! both contracts are verified in-repo.
//!
//! Sign convention: each left singular vector's largest-magnitude entry is
//! made positive (ties broken by lowest row index). Columns beyond the
//! numerical rank (`σ < σ₁·1e-12`) carry zero singular values and zeroed
//! left vectors.

use crate::matrix::{DenseMatrix, SparseMatrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const DEFAULT_DENSE_TOL: f64 = 1e-10;
pub const DEFAULT_TRUNCATED_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_SWEEPS: usize = 100;
pub const DEFAULT_MAX_ITER: usize = 300;
const RANK_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SvdError {
    #[error("jacobi sweep limit ({0}) exceeded without convergence")]
    NoConvergence(usize),
    #[error("requested rank {k} exceeds min dimension {max}")]
    RankTooLarge { k: usize, max: usize },
    #[error("tolerance must be positive")]
    BadTolerance,
}

/// Truncated factors `U (m×k)`, `s (k)`, `V (n×k)` with `s` sorted
/// descending and orthonormal factor columns.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: DenseMatrix,
    pub s: Vec<f64>,
    pub v: DenseMatrix,
    pub k: usize,
}

impl SvdFactors {
    /// `U · diag(s) · Vᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.u.rows, self.v.rows);
        for i in 0..self.u.rows {
            for j in 0..self.v.rows {
                let mut acc = 0.0;
                for l in 0..self.k {
                    acc += self.u.get(i, l) * self.s[l] * self.v.get(j, l);
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

/// Full SVD (`k = min(rows, cols)`) via one-sided Jacobi rotations.
pub fn dense_svd(m: &DenseMatrix, tol: f64) -> Result<SvdFactors, SvdError> {
    dense_svd_with_sweeps(m, tol, DEFAULT_MAX_SWEEPS)
}

pub fn dense_svd_with_sweeps(
    m: &DenseMatrix,
    tol: f64,
    max_sweeps: usize,
) -> Result<SvdFactors, SvdError> {
    if tol <= 0.0 {
        return Err(SvdError::BadTolerance);
    }
    if m.rows < m.cols {
        // Jacobi wants at least as many rows as columns; factor the
        // transpose and swap U and V.
        let f = dense_svd_with_sweeps(&m.transpose(), tol, max_sweeps)?;
        return Ok(SvdFactors {
            u: f.v,
            s: f.s,
            v: f.u,
            k: f.k,
        });
    }

    let rows = m.rows;
    let n = m.cols;
    // Column-major working copies: a carries A·V, v accumulates rotations.
    let mut a: Vec<Vec<f64>> = (0..n).map(|j| (0..rows).map(|i| m.get(i, j)).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let conv_eps = 1e-14_f64;
    let mut converged = false;
    for _sweep in 0..max_sweeps {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha: f64 = a[i].iter().map(|x| x * x).sum();
                let beta: f64 = a[j].iter().map(|x| x * x).sum();
                let gamma: f64 = a[i].iter().zip(&a[j]).map(|(x, y)| x * y).sum();
                let scale = (alpha * beta).sqrt();
                if scale == 0.0 || gamma.abs() <= conv_eps * scale {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..rows {
                    let ai = a[i][r];
                    let aj = a[j][r];
                    a[i][r] = c * ai - s * aj;
                    a[j][r] = s * ai + c * aj;
                }
                for r in 0..n {
                    let vi = v[i][r];
                    let vj = v[j][r];
                    v[i][r] = c * vi - s * vj;
                    v[j][r] = s * vi + c * vj;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SvdError::NoConvergence(max_sweeps));
    }

    // Singular values are the column norms of A·V.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = a.iter().map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap().then(x.cmp(&y)));

    let sigma_max = order.first().map(|&j| norms[j]).unwrap_or(0.0);
    let mut u = DenseMatrix::zeros(rows, n);
    let mut s = vec![0.0; n];
    let mut vv = DenseMatrix::zeros(n, n);
    for (col, &j) in order.iter().enumerate() {
        let sigma = norms[j];
        for r in 0..n {
            vv.set(r, col, v[j][r]);
        }
        if sigma > sigma_max * RANK_EPS && sigma > 0.0 {
            s[col] = sigma;
            for r in 0..rows {
                u.set(r, col, a[j][r] / sigma);
            }
        }
        // below numerical rank: σ = 0, left vector stays zero
    }

    let mut factors = SvdFactors { u, s, v: vv, k: n };
    apply_sign_convention(&mut factors);
    Ok(factors)
}

/// Top-`k` factors of a sparse matrix by seeded randomized subspace
/// iteration. Accuracy contract: singular values match the dense oracle
/// within `max(tol, tol·σ₁)` on any matrix small enough to densify.
pub fn truncated_svd(
    m: &SparseMatrix,
    k: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<SvdFactors, SvdError> {
    let n_min = m.rows.min(m.cols);
    if k == 0 || k > n_min {
        return Err(SvdError::RankTooLarge { k, max: n_min });
    }
    if tol <= 0.0 {
        return Err(SvdError::BadTolerance);
    }

    let oversample = 8usize;
    let l = (k + oversample).min(n_min);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = DenseMatrix::zeros(m.cols, l);
    for i in 0..m.cols {
        for j in 0..l {
            // Box-Muller from uniform draws; ChaCha keeps it reproducible.
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            let g = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            gauss.set(i, j, g);
        }
    }

    let mut q = orthonormalize(&m.mul_dense(&gauss));
    let mut prev_sigma: Option<Vec<f64>> = None;
    let mut projected = m.transpose_mul_dense(&q); // cols × l, equals Bᵀ
    let mut converged = false;

    for _ in 0..max_iter {
        let small = dense_svd(&projected, DEFAULT_DENSE_TOL)?;
        let sigma: Vec<f64> = small.s.iter().take(k).copied().collect();
        if let Some(prev) = &prev_sigma {
            let scale = sigma.first().copied().unwrap_or(0.0).max(1e-300);
            let change = sigma
                .iter()
                .zip(prev)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if change <= tol.max(tol * scale) {
                converged = true;
                break;
            }
        }
        prev_sigma = Some(sigma);
        q = orthonormalize(&m.mul_dense(&projected));
        projected = m.transpose_mul_dense(&q);
    }
    if !converged {
        return Err(SvdError::NoConvergence(max_iter));
    }

    // projected = Aᵀ·Q = Vz·Sz·Uzᵀ with B = Qᵀ·A = Uz·Sz·Vzᵀ… factor once
    // more and lift the small left factor back through Q.
    let small = dense_svd(&projected, DEFAULT_DENSE_TOL)?;
    // projected (cols×l) = U_p S_p V_pᵀ; then A ≈ Q·(projectedᵀ) gives
    // A ≈ (Q·V_p)·S_p·U_pᵀ.
    let u_full = q.matmul(&small.v);
    let mut u = DenseMatrix::zeros(m.rows, k);
    let mut v = DenseMatrix::zeros(m.cols, k);
    let mut s = vec![0.0; k];
    let sigma_max = small.s.first().copied().unwrap_or(0.0);
    for col in 0..k {
        let sigma = small.s[col];
        if sigma > sigma_max * RANK_EPS && sigma > 0.0 {
            s[col] = sigma;
            for r in 0..m.rows {
                u.set(r, col, u_full.get(r, col));
            }
            for r in 0..m.cols {
                v.set(r, col, small.u.get(r, col));
            }
        }
    }
    let mut factors = SvdFactors { u, s, v, k };
    apply_sign_convention(&mut factors);
    Ok(factors)
}

/// Modified Gram-Schmidt with one re-orthogonalization pass. Columns that
/// collapse numerically are zeroed rather than left as noise.
fn orthonormalize(m: &DenseMatrix) -> DenseMatrix {
    let rows = m.rows;
    let cols = m.cols;
    let mut q: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| m.get(i, j)).collect())
        .collect();
    let scale = m.frobenius_norm().max(1e-300);
    for j in 0..cols {
        for _pass in 0..2 {
            for i in 0..j {
                let dot: f64 = q[i].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
                for r in 0..rows {
                    q[j][r] -= dot * q[i][r];
                }
            }
        }
        let norm: f64 = q[j].iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > scale * 1e-14 {
            for r in 0..rows {
                q[j][r] /= norm;
            }
        } else {
            for r in 0..rows {
                q[j][r] = 0.0;
            }
        }
    }
    let mut out = DenseMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            out.set(i, j, q[j][i]);
        }
    }
    out
}

fn apply_sign_convention(f: &mut SvdFactors) {
    for col in 0..f.k {
        if f.s[col] == 0.0 {
            continue;
        }
        let mut best_idx = 0usize;
        let mut best_abs = -1.0f64;
        for r in 0..f.u.rows {
            let a = f.u.get(r, col).abs();
            if a > best_abs {
                best_abs = a;
                best_idx = r;
            }
        }
        if f.u.get(best_idx, col) < 0.0 {
            for r in 0..f.u.rows {
                f.u.set(r, col, -f.u.get(r, col));
            }
            for r in 0..f.v.rows {
                f.v.set(r, col, -f.v.get(r, col));
            }
        }
    }
}
