//! Dense real symmetric matrices and a cyclic Jacobi eigensolver.
//!
//! The excitation blocks are at most 4x4 and the brute-force cross-check stays
//! in the low hundreds of dimensions, so an O(n^3)-per-sweep Jacobi iteration
//! with a deterministic sweep order is both sufficient and reproducible.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative off-diagonal threshold at which a Jacobi sweep is considered
/// converged, measured against the Frobenius norm of the input.
pub const JACOBI_TOL: f64 = 1e-13;

const MAX_SWEEPS: usize = 64;

/// Square dense matrix of `f64`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DMat {
    dim: usize,
    data: Vec<f64>,
}

impl DMat {
    pub fn zeros(dim: usize) -> Self {
        DMat {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = DMat::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    /// Set both `(i, j)` and `(j, i)` so symmetry holds entry-wise.
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.set(i, j, v);
        self.set(j, i, v);
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `out = self * v` for a complex vector.
    pub fn mul_complex(&self, v: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(v.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for i in 0..self.dim {
            let row = &self.data[i * self.dim..(i + 1) * self.dim];
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, x) in row.iter().zip(v.iter()) {
                acc += x * *a;
            }
            out[i] = acc;
        }
    }

    /// Largest absolute deviation from entry-wise symmetry.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// Eigendecomposition of a real symmetric matrix: `a = V diag(values) V^T`.
///
/// Eigenvalues are sorted ascending; column `k` of `vectors` is the
/// eigenvector for `values[k]`, sign-fixed so its largest-magnitude component
/// is positive.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: Vec<f64>,
    pub vectors: DMat,
}

/// Cyclic Jacobi diagonalization of a symmetric matrix.
pub fn sym_eigen(a: &DMat) -> Result<SymEig> {
    let n = a.dim();
    let mut m = a.clone();
    let mut v = DMat::identity(n);
    let target = JACOBI_TOL * a.frobenius();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_norm(&m) <= target {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (m.get(q, q) - m.get(p, p)) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                let app = m.get(p, p);
                let aqq = m.get(q, q);
                m.set(p, p, app - t * apq);
                m.set(q, q, aqq + t * apq);
                m.set_sym(p, q, 0.0);
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = m.get(k, p);
                    let akq = m.get(k, q);
                    m.set_sym(k, p, c * akp - s * akq);
                    m.set_sym(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    if !converged && off_norm(&m) > target {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).partial_cmp(&m.get(j, j)).unwrap());
    let values: Vec<f64> = order.iter().map(|&k| m.get(k, k)).collect();
    let mut vectors = DMat::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        // fix the overall sign of each eigenvector
        let mut pivot = 0;
        for i in 1..n {
            if v.get(i, old_col).abs() > v.get(pivot, old_col).abs() {
                pivot = i;
            }
        }
        let sign = if v.get(pivot, old_col) < 0.0 {
            -1.0
        } else {
            1.0
        };
        for i in 0..n {
            vectors.set(i, new_col, sign * v.get(i, old_col));
        }
    }
    Ok(SymEig { values, vectors })
}

fn off_norm(m: &DMat) -> f64 {
    let n = m.dim();
    let mut acc = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            let x = m.get(p, q);
            acc += 2.0 * x * x;
        }
    }
    acc.sqrt()
}
