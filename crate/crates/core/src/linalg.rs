//! Minimal dense linear-algebra kernel.
//!
//! Everything else in the crate is built on this module: LU solves for the
//! equilibrium oracle, eigenvalues for Hurwitz/connectivity tests, and
//! rank-revealing factorizations for the Kalman controllability and
//! observability tests. Matrices are small (a few dozen rows at most), so
//! the implementations favour robustness and clarity over speed:
//! eigenvalues go through Householder Hessenberg reduction followed by
//! Francis double-shift QR iteration, and numerical rank uses
//! column-pivoted QR.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is singular (pivot magnitude {pivot:.3e} below 1e-12)")]
    Singular { pivot: f64 },
    #[error("eigenvalue iteration did not converge within the iteration bound")]
    NonConvergence,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix entries must be finite")]
    NonFinite,
}

/// Dense real matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Build from a flat row-major slice.
    ///
    /// Panics if `data.len() != rows * cols`.
    pub fn from_row_slice(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(
            data.len(),
            rows * cols,
            "matrix data length {} does not match {}x{}",
            data.len(),
            rows,
            cols
        );
        Matrix {
            rows,
            cols,
            data: data.to_vec(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// n x 1 column matrix from a slice.
    pub fn column(v: &[f64]) -> Self {
        Matrix::from_row_slice(v.len(), 1, v)
    }

    /// 1 x n row matrix from a slice.
    pub fn row(v: &[f64]) -> Self {
        Matrix::from_row_slice(1, v.len(), v)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Copy `block` into self with upper-left corner at (r0, c0).
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Solve a x = b by LU factorization with partial pivoting.
    ///
    /// Fails with [`LinalgError::Singular`] when a pivot drops below 1e-12
    /// in magnitude.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::DimensionMismatch(format!(
                "solve needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        if self.rows != b.len() {
            return Err(LinalgError::DimensionMismatch(format!(
                "solve rhs length {} does not match {}x{} matrix",
                b.len(),
                self.rows,
                self.cols
            )));
        }
        if !self.is_finite() || !b.iter().all(|v| v.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        let n = self.rows;
        let mut lu = self.clone();
        let mut x: Vec<f64> = b.to_vec();
        for k in 0..n {
            let mut piv = k;
            for i in (k + 1)..n {
                if lu[(i, k)].abs() > lu[(piv, k)].abs() {
                    piv = i;
                }
            }
            let pivot = lu[(piv, k)];
            if pivot.abs() < 1e-12 {
                return Err(LinalgError::Singular {
                    pivot: pivot.abs(),
                });
            }
            if piv != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(piv, j)];
                    lu[(piv, j)] = tmp;
                }
                x.swap(k, piv);
            }
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                for j in (k + 1)..n {
                    lu[(i, j)] -= f * lu[(k, j)];
                }
                x[i] -= f * x[k];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                x[i] -= lu[(i, j)] * x[j];
            }
            x[i] /= lu[(i, i)];
        }
        Ok(x)
    }

    /// All eigenvalues (with multiplicity) of a square matrix.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::DimensionMismatch(format!(
                "eigenvalues need a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        if !self.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        let n = self.rows;
        match n {
            0 => Ok(vec![]),
            1 => Ok(vec![Complex64::new(self[(0, 0)], 0.0)]),
            2 => Ok(eig2(self[(0, 0)], self[(0, 1)], self[(1, 0)], self[(1, 1)]).to_vec()),
            _ => {
                let mut h = self.clone();
                hessenberg_in_place(&mut h);
                francis_qr(&mut h)
            }
        }
    }

    /// Numerical rank via column-pivoted Householder QR.
    ///
    /// A diagonal entry of R counts toward the rank while it exceeds
    /// 1e-9 times the largest initial column norm.
    pub fn rank(&self) -> usize {
        let mut r = self.clone();
        let m = self.rows;
        let n = self.cols;
        let mut col_norms: Vec<f64> = (0..n)
            .map(|j| (0..m).map(|i| r[(i, j)] * r[(i, j)]).sum::<f64>().sqrt())
            .collect();
        let scale = col_norms.iter().fold(0.0_f64, |a, b| a.max(*b));
        if scale == 0.0 {
            return 0;
        }
        let tol = 1e-9 * scale;
        let kmax = m.min(n);
        let mut rank = 0;
        for k in 0..kmax {
            // pivot: remaining column with the largest norm
            let (piv, &norm) = col_norms[k..]
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap();
            let piv = piv + k;
            if norm <= tol {
                break;
            }
            if piv != k {
                for i in 0..m {
                    let tmp = r[(i, k)];
                    r[(i, k)] = r[(i, piv)];
                    r[(i, piv)] = tmp;
                }
                col_norms.swap(k, piv);
            }
            // Householder zeroing column k below the diagonal
            let alpha = {
                let norm_k: f64 = (k..m).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
                if r[(k, k)] >= 0.0 {
                    -norm_k
                } else {
                    norm_k
                }
            };
            if alpha.abs() <= tol {
                break;
            }
            let mut v: Vec<f64> = (k..m).map(|i| r[(i, k)]).collect();
            v[0] -= alpha;
            let vtv: f64 = v.iter().map(|x| x * x).sum();
            if vtv > 0.0 {
                for j in k..n {
                    let dot: f64 = (k..m).map(|i| v[i - k] * r[(i, j)]).sum();
                    let f = 2.0 * dot / vtv;
                    for i in k..m {
                        r[(i, j)] -= f * v[i - k];
                    }
                }
            }
            r[(k, k)] = alpha;
            rank += 1;
            // downdate remaining column norms (recompute: matrices are small)
            for (j, cn) in col_norms.iter_mut().enumerate().skip(k + 1) {
                *cn = ((k + 1)..m).map(|i| r[(i, j)] * r[(i, j)]).sum::<f64>().sqrt();
            }
        }
        rank
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl std::ops::Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl std::ops::Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl std::ops::Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// True iff every eigenvalue satisfies Re(lambda) < -margin.
pub fn is_hurwitz(a: &Matrix, margin: f64) -> Result<bool, LinalgError> {
    let eigs = a.eigenvalues()?;
    Ok(eigs.iter().all(|l| l.re < -margin))
}

/// Largest eigenvalue real part.
pub fn spectral_abscissa(a: &Matrix) -> Result<f64, LinalgError> {
    let eigs = a.eigenvalues()?;
    Ok(eigs.iter().fold(f64::NEG_INFINITY, |m, l| m.max(l.re)))
}

/// Kalman controllability matrix [b, ab, ..., a^(n-1) b].
pub fn controllability_matrix(a: &Matrix, b: &Matrix) -> Matrix {
    assert!(a.is_square() && a.rows() == b.rows(), "incompatible (a, b)");
    let n = a.rows();
    let m = b.cols();
    let mut out = Matrix::zeros(n, n * m);
    let mut power = b.clone();
    for k in 0..n {
        out.set_block(0, k * m, &power);
        power = a * &power;
    }
    out
}

/// Kalman rank test for controllability of the pair (a, b).
pub fn controllable(a: &Matrix, b: &Matrix) -> bool {
    controllability_matrix(a, b).rank() == a.rows()
}

/// Kalman rank test for observability of the pair (a, c), via duality.
pub fn observable(a: &Matrix, c: &Matrix) -> bool {
    controllable(&a.transpose(), &c.transpose())
}

/// Eigenvalues of a 2x2 matrix, computed directly from trace/determinant.
fn eig2(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 2] {
    let p = 0.5 * (a + d);
    let det = a * d - b * c;
    let disc = p * p - det;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        // avoid cancellation: compute the larger root first
        let l1 = if p >= 0.0 { p + sq } else { p - sq };
        let l2 = if l1 != 0.0 { det / l1 } else { p - sq.copysign(p) };
        [Complex64::new(l1, 0.0), Complex64::new(l2, 0.0)]
    } else {
        let im = (-disc).sqrt();
        [Complex64::new(p, im), Complex64::new(p, -im)]
    }
}

/// Householder reduction to upper Hessenberg form (in place).
fn hessenberg_in_place(h: &mut Matrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let norm: f64 = ((k + 1)..n).map(|i| h[(i, k)] * h[(i, k)]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if h[(k + 1, k)] >= 0.0 { -norm } else { norm };
        let mut v = vec![0.0; n];
        for i in (k + 1)..n {
            v[i] = h[(i, k)];
        }
        v[k + 1] -= alpha;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        // H <- P H with P = I - 2 v v^T / v^T v
        for j in 0..n {
            let dot: f64 = ((k + 1)..n).map(|i| v[i] * h[(i, j)]).sum();
            let f = 2.0 * dot / vtv;
            for i in (k + 1)..n {
                h[(i, j)] -= f * v[i];
            }
        }
        // H <- H P
        for i in 0..n {
            let dot: f64 = ((k + 1)..n).map(|j| v[j] * h[(i, j)]).sum();
            let f = 2.0 * dot / vtv;
            for j in (k + 1)..n {
                h[(i, j)] -= f * v[j];
            }
        }
        h[(k + 1, k)] = alpha;
        for i in (k + 2)..n {
            h[(i, k)] = 0.0;
        }
    }
}

/// Francis double-shift QR iteration on an upper Hessenberg matrix.
///
/// Returns all eigenvalues; the per-block iteration bound of 40 sweeps
/// signals pathological input via [`LinalgError::NonConvergence`].
fn francis_qr(h: &mut Matrix) -> Result<Vec<Complex64>, LinalgError> {
    let n = h.rows();
    let mut eigs: Vec<Complex64> = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut its = 0usize;
    loop {
        // deflate: find the active window [lo, hi]
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].abs() + h[(lo, lo)].abs();
            let s = if s == 0.0 { h.max_abs() } else { s };
            if h[(lo, lo - 1)].abs() <= f64::EPSILON * s {
                h[(lo, lo - 1)] = 0.0;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigs.push(Complex64::new(h[(hi, hi)], 0.0));
            if hi == 0 {
                break;
            }
            hi -= 1;
            its = 0;
        } else if lo + 1 == hi {
            let block = eig2(h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            eigs.extend_from_slice(&block);
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            its = 0;
        } else {
            if its >= 40 {
                return Err(LinalgError::NonConvergence);
            }
            // double shift from the trailing 2x2; exceptional shift breaks cycles
            let (s, t) = if its == 10 || its == 20 || its == 30 {
                let ex = h[(hi, hi - 1)].abs() + h[(hi - 1, hi - 2)].abs();
                (1.5 * ex, -0.4375 * ex * ex)
            } else {
                let m = hi - 1;
                (
                    h[(m, m)] + h[(hi, hi)],
                    h[(m, m)] * h[(hi, hi)] - h[(m, hi)] * h[(hi, m)],
                )
            };
            its += 1;
            francis_step(h, lo, hi, s, t);
        }
    }
    Ok(eigs)
}

/// One implicit double-shift sweep on the window [lo, hi] of a Hessenberg
/// matrix, with shift polynomial lambda^2 - s lambda + t.
fn francis_step(h: &mut Matrix, lo: usize, hi: usize, s: f64, t: f64) {
    let n = h.rows();
    // first column of (H - aI)(H - bI) restricted to the window
    let mut x = h[(lo, lo)] * h[(lo, lo)] + h[(lo, lo + 1)] * h[(lo + 1, lo)] - s * h[(lo, lo)] + t;
    let mut y = h[(lo + 1, lo)] * (h[(lo, lo)] + h[(lo + 1, lo + 1)] - s);
    let mut z = h[(lo + 2, lo + 1)] * h[(lo + 1, lo)];
    for k in lo..hi - 1 {
        // Householder for (x, y, z)
        let three = k < hi - 1;
        let zz = if three { z } else { 0.0 };
        let norm = (x * x + y * y + zz * zz).sqrt();
        if norm == 0.0 {
            // nothing to chase at this column; advance the bulge window
            if k + 1 <= hi - 1 {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
                z = if k + 3 <= hi { h[(k + 3, k)] } else { 0.0 };
            }
            continue;
        }
        let alpha = if x >= 0.0 { -norm } else { norm };
        let v = [x - alpha, y, zz];
        let vtv: f64 = v.iter().map(|w| w * w).sum();
        if vtv > 0.0 {
            let rows = if k + 2 <= hi { 3 } else { 2 };
            let c0 = k.saturating_sub(1).max(lo);
            // left: rows k..k+rows, all columns from c0 on
            for j in c0..n {
                let mut dot = 0.0;
                for (r, vr) in v.iter().enumerate().take(rows) {
                    dot += vr * h[(k + r, j)];
                }
                let f = 2.0 * dot / vtv;
                for (r, vr) in v.iter().enumerate().take(rows) {
                    h[(k + r, j)] -= f * vr;
                }
            }
            // right: columns k..k+rows, rows up to min(hi, k+3)
            let rmax = (k + 3).min(hi);
            for i in 0..=rmax {
                let mut dot = 0.0;
                for (c, vc) in v.iter().enumerate().take(rows) {
                    dot += vc * h[(i, k + c)];
                }
                let f = 2.0 * dot / vtv;
                for (c, vc) in v.iter().enumerate().take(rows) {
                    h[(i, k + c)] -= f * vc;
                }
            }
        }
        // restore Hessenberg zeros introduced left of the bulge
        if k > lo {
            h[(k, k - 1)] = alpha;
            h[(k + 1, k - 1)] = 0.0;
            if k + 2 <= hi {
                h[(k + 2, k - 1)] = 0.0;
            }
        }
        if k + 1 <= hi - 1 {
            x = h[(k + 1, k)];
            y = h[(k + 2, k)];
            z = if k + 3 <= hi { h[(k + 3, k)] } else { 0.0 };
        }
    }
    // final 2-element reflection on rows (hi-1, hi) clearing h[hi][hi-2]
    let norm = (x * x + y * y).sqrt();
    if norm > 0.0 {
        let alpha = if x >= 0.0 { -norm } else { norm };
        let v = [x - alpha, y];
        let vtv: f64 = v[0] * v[0] + v[1] * v[1];
        if vtv > 0.0 {
            let c0 = (hi - 2).max(lo);
            for j in c0..n {
                let dot = v[0] * h[(hi - 1, j)] + v[1] * h[(hi, j)];
                let f = 2.0 * dot / vtv;
                h[(hi - 1, j)] -= f * v[0];
                h[(hi, j)] -= f * v[1];
            }
            for i in 0..=hi {
                let dot = v[0] * h[(i, hi - 1)] + v[1] * h[(i, hi)];
                let f = 2.0 * dot / vtv;
                h[(i, hi - 1)] -= f * v[0];
                h[(i, hi)] -= f * v[1];
            }
        }
        h[(hi - 1, hi - 2)] = alpha;
        h[(hi, hi - 2)] = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sorted_eigs(m: &Matrix) -> Vec<Complex64> {
        let mut e = m.eigenvalues().unwrap();
        e.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        e
    }

    #[test]
    fn solve_identity() {
        let a = Matrix::identity(3);
        let x = a.solve(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn solve_diagonal() {
        let a = Matrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let x = a.solve(&[2.0, 8.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0]);
    }

    #[test]
    fn solve_singular_reports_pivot() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        match a.solve(&[1.0, 2.0]) {
            Err(LinalgError::Singular { pivot }) => assert!(pivot < 1e-12),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn solve_random_6x6_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 6;
        // diagonally dominant, hence well conditioned
        let a = Matrix::from_fn(n, n, |i, j| {
            let v: f64 = rng.gen_range(-1.0..1.0);
            if i == j {
                v + 8.0
            } else {
                v
            }
        });
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let x = a.solve(&b).unwrap();
        let r = a.mul_vec(&x);
        let bmax = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            assert!((r[i] - b[i]).abs() <= 1e-9 * (1.0 + bmax));
        }
    }

    #[test]
    fn eigenvalues_rotation() {
        let a = Matrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let e = sorted_eigs(&a);
        assert_relative_eq!(e[0].re, 0.0, epsilon = 1e-12);
        assert_relative_eq!(e[0].im, -1.0, epsilon = 1e-12);
        assert_relative_eq!(e[1].im, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eigenvalues_characteristic_roots() {
        // roots of lambda^2 + 10 lambda + 1 are -5 +/- sqrt(24)
        let a = Matrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, -10.0]);
        let e = sorted_eigs(&a);
        assert_relative_eq!(e[0].re, -5.0 - 24.0_f64.sqrt(), epsilon = 1e-10);
        assert_relative_eq!(e[1].re, -5.0 + 24.0_f64.sqrt(), epsilon = 1e-10);
        assert_eq!((e[0].im, e[1].im), (0.0, 0.0));
    }

    #[test]
    fn eigenvalues_cycle_laplacian() {
        // complete graph on 3 nodes: eigenvalues {0, 3, 3}
        let l = Matrix::from_row_slice(3, 3, &[2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0]);
        let e = sorted_eigs(&l);
        assert_relative_eq!(e[0].re, 0.0, epsilon = 1e-9);
        assert_relative_eq!(e[1].re, 3.0, epsilon = 1e-9);
        assert_relative_eq!(e[2].re, 3.0, epsilon = 1e-9);
        for v in &e {
            assert!(v.im.abs() <= 1e-9);
        }
    }

    #[test]
    fn eigenvalues_frozen_6x6() {
        // fixed matrix with known spectrum: Q D Q^T for a Householder Q
        let diag = [-7.5, -3.0, -1.0, 0.0, 2.5, 6.0];
        let n = 6;
        let v: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        let q = Matrix::from_fn(n, n, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - 2.0 * v[i] * v[j] / vtv
        });
        let d = Matrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 });
        let a = &(&q * &d) * &q.transpose();
        let e = sorted_eigs(&a);
        for (got, want) in e.iter().zip(diag.iter()) {
            assert_relative_eq!(got.re, *want, epsilon = 1e-8);
            assert!(got.im.abs() <= 1e-9);
        }
    }

    #[test]
    fn eigenvalues_defective_jordan() {
        let a = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let e = sorted_eigs(&a);
        assert_eq!(e.len(), 2);
        assert!(e.iter().all(|l| l.norm() <= 1e-12));
    }

    #[test]
    fn symmetric_eigenvalues_real_trace_det() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = 3;
            let mut a = Matrix::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let v: f64 = rng.gen_range(-3.0..3.0);
                    a[(i, j)] = v;
                    a[(j, i)] = v;
                }
            }
            let e = a.eigenvalues().unwrap();
            let scale = a.max_abs();
            for l in &e {
                assert!(l.im.abs() <= 1e-9 * scale.max(1.0));
            }
            let trace: f64 = (0..n).map(|i| a[(i, i)]).sum();
            let sum: f64 = e.iter().map(|l| l.re).sum();
            assert_relative_eq!(trace, sum, epsilon = 1e-7 * scale.max(1.0));
            let det = a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
                - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
                + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)]);
            let prod: f64 = e.iter().map(|l| l.re).product();
            assert_relative_eq!(det, prod, epsilon = 1e-7 * scale.max(1.0).powi(3));
        }
    }

    #[test]
    fn hurwitz_examples() {
        let stable = Matrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]);
        assert!(is_hurwitz(&stable, 1e-9).unwrap());
        let double_integrator = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(!is_hurwitz(&double_integrator, 1e-9).unwrap());
        // trace < 0 and det = w^2 + 15 w > 0 imply a stable 2x2
        let w = 2.0 * std::f64::consts::PI;
        let observer_err = Matrix::from_row_slice(2, 2, &[-12.0, w, -w - 15.0, 0.0]);
        assert!(is_hurwitz(&observer_err, 1e-9).unwrap());
    }

    #[test]
    fn controllability_examples() {
        let a = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let b = Matrix::column(&[0.0, 1.0]);
        assert!(controllable(&a, &b));

        let a2 = Matrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]);
        let b2 = Matrix::column(&[1.0, 0.0]);
        assert!(!controllable(&a2, &b2));

        // augmented loop pair for the double-integrator demo gains
        let cal_a = Matrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, -10.0, 2.0, 0.0, 0.0, 0.0]);
        let cal_b = Matrix::column(&[0.0, 12.0, 1.0]);
        assert!(controllable(&cal_a, &cal_b));
        let cal_c = Matrix::row(&[1.0, 0.0, 0.0]);
        assert!(observable(&cal_a, &cal_c));
    }

    #[test]
    fn observability_dual() {
        let a = Matrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]);
        let c = Matrix::row(&[1.0, 0.0]);
        assert!(!observable(&a, &c)); // second mode invisible
        let c2 = Matrix::row(&[1.0, 1.0]);
        assert!(observable(&a, &c2));
    }

    proptest! {
        #[test]
        fn solve_roundtrip_well_conditioned(n in 1usize..=30, seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = Matrix::from_fn(n, n, |i, j| {
                let v: f64 = rng.gen_range(-1.0..1.0);
                if i == j { v + n as f64 + 2.0 } else { v }
            });
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let x = a.solve(&b).unwrap();
            let r = a.mul_vec(&x);
            let bmax = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            for i in 0..n {
                prop_assert!((r[i] - b[i]).abs() <= 1e-9 * (1.0 + bmax));
            }
        }

        #[test]
        fn controllability_similarity_invariant(seed in 0u64..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 3;
            let a = Matrix::from_fn(n, n, |_, _| rng.gen_range(-2.0..2.0));
            let b = Matrix::from_fn(n, 1, |_, _| rng.gen_range(-2.0..2.0));
            // random well-conditioned similarity transform
            let t = Matrix::from_fn(n, n, |i, j| {
                let v: f64 = rng.gen_range(-1.0..1.0);
                if i == j { v + 4.0 } else { v }
            });
            // t_inv columns from solves
            let mut t_inv = Matrix::zeros(n, n);
            for j in 0..n {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                let col = t.solve(&e).unwrap();
                for i in 0..n {
                    t_inv[(i, j)] = col[i];
                }
            }
            let a2 = &(&t * &a) * &t_inv;
            let b2 = &t * &b;
            prop_assert_eq!(controllable(&a, &b), controllable(&a2, &b2));
        }

        #[test]
        fn eigenvalues_match_trace(seed in 0u64..300, n in 2usize..=8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = Matrix::from_fn(n, n, |_, _| rng.gen_range(-3.0..3.0));
            let e = a.eigenvalues().unwrap();
            let trace: f64 = (0..n).map(|i| a[(i, i)]).sum();
            let sum_re: f64 = e.iter().map(|l| l.re).sum();
            let sum_im: f64 = e.iter().map(|l| l.im).sum();
            prop_assert!((trace - sum_re).abs() <= 1e-7 * a.max_abs().max(1.0) * n as f64);
            prop_assert!(sum_im.abs() <= 1e-7 * a.max_abs().max(1.0) * n as f64);
        }
    }
}
