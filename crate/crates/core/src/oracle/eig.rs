//! Dense complex Hermitian eigensolver: Householder reduction to real
//! tridiagonal form, implicit QL for eigenvalues, inverse iteration for
//! selected eigenvectors.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Square complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> HermitianMatrix {
        HermitianMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |M - M*|`, relative to `max |M|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        let m = self.max_abs();
        if m > 0.0 {
            worst / m
        } else {
            0.0
        }
    }

    /// Replaces `M` by `(M + M*)/2`.
    pub fn symmetrize(&mut self) {
        for i in 0..self.n {
            let d = self.get(i, i);
            self.set(i, i, Complex64::new(d.re, 0.0));
            for j in i + 1..self.n {
                let a = 0.5 * (self.get(i, j) + self.get(j, i).conj());
                self.set(i, j, a);
                self.set(j, i, a.conj());
            }
        }
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Result of the Householder reduction `Q^H A Q = T`.
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
    /// Reflector vectors (`v[0] = 1` implicit at position `k + 1`) and factors.
    reflectors: Vec<(Vec<Complex64>, Complex64)>,
}

/// Householder reduction of a Hermitian matrix (full storage, consumed).
pub fn tridiagonalize(mut a: HermitianMatrix) -> Tridiagonal {
    let n = a.n;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut reflectors = Vec::with_capacity(n.saturating_sub(1));
    let zero = Complex64::new(0.0, 0.0);
    let mut x = vec![zero; n];
    for k in 0..n.saturating_sub(1) {
        diag[k] = a.get(k, k).re;
        let m = n - k - 1;
        // column k below the diagonal, read from row k
        let mut v: Vec<Complex64> = a.data[k * n + k + 1..(k + 1) * n].iter().map(|z| z.conj()).collect();
        let alpha = v[0];
        let xnorm = v[1..].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let (tau, beta) = if xnorm == 0.0 && alpha.im == 0.0 {
            (zero, alpha.re)
        } else {
            let beta = -alpha.re.signum() * (alpha.norm_sqr() + xnorm * xnorm).sqrt();
            let beta = if alpha.re == 0.0 { -(alpha.norm_sqr() + xnorm * xnorm).sqrt() } else { beta };
            let tau = Complex64::new((beta - alpha.re) / beta, -alpha.im / beta);
            let scale = Complex64::new(1.0, 0.0) / (alpha - beta);
            for z in v[1..].iter_mut() {
                *z *= scale;
            }
            (tau, beta)
        };
        v[0] = Complex64::new(1.0, 0.0);
        off[k] = beta;
        if tau != zero {
            // x = tau * A22 v
            let base = k + 1;
            for i in 0..m {
                let row = &a.data[(base + i) * n + base..(base + i + 1) * n];
                let s: Complex64 = row.iter().zip(&v).map(|(p, q)| p * q).sum();
                x[i] = tau * s;
            }
            // w = x - (tau/2)(x^H v) v
            let xv: Complex64 = x[..m].iter().zip(&v).map(|(p, q)| p.conj() * q).sum();
            let alpha2 = -0.5 * tau * xv;
            for i in 0..m {
                x[i] += alpha2 * v[i];
            }
            // A22 -= v w^H + w v^H
            for i in 0..m {
                let vi = v[i];
                let wi = x[i];
                let row = &mut a.data[(base + i) * n + base..(base + i + 1) * n];
                for j in 0..m {
                    row[j] -= vi * x[j].conj() + wi * v[j].conj();
                }
            }
        }
        reflectors.push((v, tau));
    }
    if n > 0 {
        diag[n - 1] = a.get(n - 1, n - 1).re;
    }
    Tridiagonal { diag, off, reflectors }
}

/// Eigenvalues of a real symmetric tridiagonal matrix by implicit QL, ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&off[..n.saturating_sub(1)]);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(Error::ConvergenceFailure);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut early = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

/// Eigenvector of the tridiagonal matrix for eigenvalue `lambda` by inverse iteration.
fn tridiagonal_vector(diag: &[f64], off: &[f64], lambda: f64, norm: f64, seed: usize) -> Vec<f64> {
    let n = diag.len();
    let shift = lambda + 1e-13 * norm.max(f64::MIN_POSITIVE);
    // deterministic pseudo-random start
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ (seed as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    let mut y: Vec<f64> = (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    for _ in 0..3 {
        y = solve_shifted(diag, off, shift, &y, norm);
        let nrm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        y.iter_mut().for_each(|v| *v /= nrm);
    }
    y
}

/// Solves `(T - s I) y = b` with partial pivoting (tridiagonal LU).
fn solve_shifted(diag: &[f64], off: &[f64], s: f64, b: &[f64], norm: f64) -> Vec<f64> {
    let n = diag.len();
    let tiny = f64::EPSILON * norm.max(f64::MIN_POSITIVE);
    if n == 1 {
        let p = diag[0] - s;
        return vec![b[0] / if p.abs() < tiny { tiny } else { p }];
    }
    // U has up to two superdiagonals after pivoting
    let mut u0 = vec![0.0; n];
    let mut u1 = vec![0.0; n];
    let mut u2 = vec![0.0; n];
    let mut rhs = b.to_vec();
    let mut a = diag[0] - s; // current pivot row diagonal
    let mut c = off[0]; // current pivot row superdiagonal
    let mut c2 = 0.0;
    for i in 0..n - 1 {
        let lower = off[i];
        let next_d = diag[i + 1] - s;
        let next_c = if i + 1 < n - 1 { off[i + 1] } else { 0.0 };
        if lower.abs() > a.abs() {
            // swap rows i and i+1
            u0[i] = lower;
            u1[i] = next_d;
            u2[i] = next_c;
            let m = a / lower;
            rhs.swap(i, i + 1);
            rhs[i + 1] -= m * rhs[i];
            a = c - m * next_d;
            c = c2 - m * next_c;
            c2 = 0.0;
        } else {
            let piv = if a.abs() < tiny { tiny } else { a };
            u0[i] = piv;
            u1[i] = c;
            u2[i] = c2;
            let m = lower / piv;
            rhs[i + 1] -= m * rhs[i];
            a = next_d - m * c;
            c = next_c;
            c2 = 0.0;
        }
    }
    u0[n - 1] = if a.abs() < tiny { tiny } else { a };
    let mut y = vec![0.0; n];
    for i in (0..n).rev() {
        let mut v = rhs[i];
        if i + 1 < n {
            v -= u1[i] * y[i + 1];
        }
        if i + 2 < n {
            v -= u2[i] * y[i + 2];
        }
        y[i] = v / u0[i];
    }
    y
}

impl Tridiagonal {
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        tridiagonal_eigenvalues(&self.diag, &self.off)
    }

    fn norm(&self) -> f64 {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                self.diag[i].abs()
                    + if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                    + if i + 1 < n { self.off[i].abs() } else { 0.0 }
            })
            .fold(0.0, f64::max)
    }

    /// Eigenvectors of the original matrix for the given (computed) eigenvalues.
    pub fn eigenvectors(&self, lambdas: &[f64]) -> Vec<Vec<Complex64>> {
        let norm = self.norm();
        let mut zs: Vec<Vec<f64>> = Vec::with_capacity(lambdas.len());
        for (idx, &lam) in lambdas.iter().enumerate() {
            let mut z = tridiagonal_vector(&self.diag, &self.off, lam, norm, idx);
            // orthogonalize within clusters
            for (prev, &pl) in zs.iter().zip(lambdas) {
                if (pl - lam).abs() < 1e-8 * norm.max(1.0) {
                    let dot: f64 = prev.iter().zip(&z).map(|(a, b)| a * b).sum();
                    z.iter_mut().zip(prev).for_each(|(a, b)| *a -= dot * b);
                    let nrm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
                    z.iter_mut().for_each(|v| *v /= nrm);
                }
            }
            zs.push(z);
        }
        zs.into_iter().map(|z| self.back_transform(&z)).collect()
    }

    /// `u = Q z` with `Q = H_0 H_1 ... H_{n-2}`.
    fn back_transform(&self, z: &[f64]) -> Vec<Complex64> {
        let mut u: Vec<Complex64> = z.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        for (k, (v, tau)) in self.reflectors.iter().enumerate().rev() {
            let seg = &mut u[k + 1..];
            let dot: Complex64 = v.iter().zip(seg.iter()).map(|(a, b)| a.conj() * b).sum();
            let f = tau * dot;
            for (s, a) in seg.iter_mut().zip(v) {
                *s -= f * a;
            }
        }
        u
    }
}

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues(m: &HermitianMatrix) -> Result<Vec<f64>> {
    tridiagonalize(m.clone()).eigenvalues()
}
