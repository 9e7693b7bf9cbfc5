//! Thick-restart Lanczos with full reorthogonalization for the lowest
//! eigenvalues of a Hermitian operator applied matrix-free.
//!
//! The iteration runs on `B = cI − H` with `c ≥ ‖H‖`, so the wanted end of
//! the spectrum of `H` is the largest end of `B`. In exact arithmetic a single
//! start vector sees one copy of each eigenvalue; rounding lets further copies
//! converge after restarts, so converged Ritz values that agree within the
//! tolerance are merged and degenerate eigenvalues are reported once.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entries per block of the blocked reductions.
const CHUNK: usize = 4096;

pub trait HermitianOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
    /// An upper bound on the operator norm.
    fn norm_bound(&self) -> f64;
}

/// `Σ conj(a_i) b_i`, blocked and summed pairwise in a fixed order so the
/// result is independent of the thread count.
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let parts: Vec<Complex64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.conj() * q).sum())
        .collect();
    pairwise_sum(&parts)
}

pub fn norm(a: &[Complex64]) -> f64 {
    let parts: Vec<f64> = a
        .par_chunks(CHUNK)
        .map(|x| x.iter().map(|p| p.norm_sqr()).sum())
        .collect();
    pairwise_sum_real(&parts).sqrt()
}

fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    match v.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

pub(crate) fn pairwise_sum_real(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise_sum_real(&v[..n / 2]) + pairwise_sum_real(&v[n / 2..]),
    }
}

/// `y ← y + s x`.
pub fn axpy(s: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    y.par_iter_mut().zip(x.par_iter()).for_each(|(b, a)| *b += s * a);
}

fn scale(s: f64, x: &mut [Complex64]) {
    x.par_iter_mut().for_each(|v| *v *= s);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LanczosOptions {
    pub tol: f64,
    /// Budget of operator applications.
    pub max_iter: usize,
    /// Krylov basis size between restarts; `0` picks one from `k`.
    pub basis_size: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tol: 1e-8,
            max_iter: 20_000,
            basis_size: 0,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub value: f64,
    /// `‖Hx − λx‖ / ‖x‖`, recomputed from the Ritz vector.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct LanczosResult {
    pub pairs: Vec<Eigenpair>,
    pub vectors: Vec<Vec<Complex64>>,
    pub iterations: usize,
}

fn converged(value: f64, residual: f64, tol: f64) -> bool {
    residual <= tol * value.abs() + tol
}

/// Two converged Ritz values closer than the solver tolerance are one
/// eigenvalue as far as the caller can tell.
fn same_eigenvalue(a: f64, ra: f64, b: f64, rb: f64, tol: f64) -> bool {
    converged(a, ra, tol) && converged(b, rb, tol) && (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// The `k` lowest distinct eigenvalues of `op`; a degenerate eigenvalue is
/// reported once.
pub fn lowest<O: HermitianOperator + ?Sized>(op: &O, k: usize, opts: &LanczosOptions) -> Result<LanczosResult> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!(
            "requested {k} eigenvalues of a dimension-{n} operator"
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let m = if opts.basis_size > 0 {
        opts.basis_size
    } else {
        (2 * k + 20).max(32)
    }
    .min(n)
    .max(k + 1)
    .min(n);
    let shift = op.norm_bound();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let random_vector = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    };

    let apply_b = |x: &[Complex64], y: &mut [Complex64]| {
        op.apply(x, y);
        y.par_iter_mut().zip(x.par_iter()).for_each(|(b, a)| *b = shift * a - *b);
    };

    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
    let mut v0 = random_vector(&mut rng);
    let n0 = norm(&v0);
    scale(1.0 / n0, &mut v0);
    basis.push(v0);
    let mut t = DMatrix::<f64>::zeros(m, m);
    let mut kept = 0;
    let mut iterations = 0;
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut best: Vec<(f64, f64)>;

    loop {
        let mut beta_last = 0.0;
        let mut size = m;
        for j in kept..m {
            apply_b(&basis[j], &mut w);
            iterations += 1;
            t[(j, j)] = dot(&basis[j], &w).re;
            // Two passes of classical Gram–Schmidt against the whole basis.
            for _ in 0..2 {
                let coeffs: Vec<Complex64> = basis.iter().map(|v| dot(v, &w)).collect();
                for (v, c) in basis.iter().zip(&coeffs) {
                    axpy(-c, v, &mut w);
                }
            }
            let beta = norm(&w);
            if j + 1 == m {
                beta_last = beta;
                break;
            }
            let mut next = w.clone();
            if beta <= 1e-13 * shift {
                // Invariant subspace: continue with a fresh orthogonal direction.
                if basis.len() == n {
                    size = j + 1;
                    beta_last = 0.0;
                    break;
                }
                next = random_vector(&mut rng);
                for _ in 0..2 {
                    let coeffs: Vec<Complex64> = basis.iter().map(|v| dot(v, &next)).collect();
                    for (v, c) in basis.iter().zip(&coeffs) {
                        axpy(-c, v, &mut next);
                    }
                }
                let nn = norm(&next);
                scale(1.0 / nn, &mut next);
                t[(j + 1, j)] = 0.0;
                t[(j, j + 1)] = 0.0;
            } else {
                scale(1.0 / beta, &mut next);
                t[(j + 1, j)] = beta;
                t[(j, j + 1)] = beta;
            }
            basis.push(next);
        }

        let tm = t.view((0, 0), (size, size)).into_owned();
        let eig = SymmetricEigen::new(tm);
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        // Walk the Ritz values upward, collapsing copies of one eigenvalue.
        let mut picked: Vec<usize> = Vec::with_capacity(k);
        let mut estimates: Vec<(f64, f64)> = Vec::with_capacity(k);
        let mut walked = 0;
        for &i in &order {
            if picked.len() == k {
                break;
            }
            walked += 1;
            let est = (shift - eig.eigenvalues[i], (beta_last * eig.eigenvectors[(size - 1, i)]).abs());
            if let Some(&(lam, res)) = estimates.last() {
                if same_eigenvalue(lam, res, est.0, est.1, opts.tol) {
                    continue;
                }
            }
            picked.push(i);
            estimates.push(est);
        }
        let want = picked.len();
        best = estimates.clone();
        let all_converged = want == k && estimates.iter().all(|(l, r)| converged(*l, *r, opts.tol));

        let ritz = |i: usize| -> Vec<Complex64> {
            let mut x = vec![Complex64::new(0.0, 0.0); n];
            for l in 0..size {
                axpy(Complex64::new(eig.eigenvectors[(l, i)], 0.0), &basis[l], &mut x);
            }
            x
        };

        if all_converged || size < m {
            let mut pairs = Vec::with_capacity(want);
            let mut vectors = Vec::with_capacity(want);
            let mut hx = vec![Complex64::new(0.0, 0.0); n];
            let mut ok = true;
            for &i in &picked {
                let mut x = ritz(i);
                let nx = norm(&x);
                scale(1.0 / nx, &mut x);
                op.apply(&x, &mut hx);
                let lambda = dot(&x, &hx).re;
                axpy(Complex64::new(-lambda, 0.0), &x, &mut hx);
                let residual = norm(&hx);
                ok &= converged(lambda, residual, opts.tol);
                pairs.push(Eigenpair { value: lambda, residual });
                vectors.push(x);
            }
            iterations += want;
            if ok || size < m {
                return Ok(LanczosResult {
                    pairs,
                    vectors,
                    iterations,
                });
            }
        }
        if iterations >= opts.max_iter {
            return Err(Error::Convergence { iterations, best });
        }

        // Thick restart: keep the leading Ritz vectors plus the residual direction.
        let keep = (k + (m - k) / 2).max(walked).min(m - 2).max(k);
        let residual_dir = {
            let mut r = w.clone();
            scale(1.0 / beta_last, &mut r);
            r
        };
        let mut new_basis: Vec<Vec<Complex64>> = order[..keep].iter().map(|&i| ritz(i)).collect();
        new_basis.push(residual_dir);
        basis = new_basis;
        t.fill(0.0);
        for (p, &i) in order[..keep].iter().enumerate() {
            t[(p, p)] = eig.eigenvalues[i];
            let s = beta_last * eig.eigenvectors[(size - 1, i)];
            t[(keep, p)] = s;
            t[(p, keep)] = s;
        }
        kept = keep;
    }
}
