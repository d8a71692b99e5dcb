//! Dense complex matrices and the cyclic Jacobi eigensolver.
//!
//! This is the per-block substrate under [`crate::AlgebraElement`]. Storage
//! is row-major; shapes are checked with assertions since every caller in the
//! crate validates signatures before reaching here.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::scalar::{cre, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cre(T::one());
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex<T>,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data. Panics if the length is wrong.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data has wrong length");
        Self { rows, cols, data }
    }

    pub fn diagonal(values: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
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

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * *b;
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|a| a * s)
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f(a)).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shapes differ"
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).fold(cre(T::zero()), |acc, i| acc + self[(i, i)])
    }

    /// Frobenius inner product `tr(self* other)`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shapes differ"
        );
        self.data
            .iter()
            .zip(&other.data)
            .fold(cre(T::zero()), |acc, (a, b)| acc + a.conj() * *b)
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn from_columns(rows: usize, columns: &[Vec<Complex<T>>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    /// Submatrix made of the listed columns.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])])
    }

    /// `(self + self*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()).scale(half)
        })
    }

    /// `(self - self*) / 2i`, the Hermitian imaginary part.
    pub fn skew_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            let d = (self[(i, j)] - self[(j, i)].conj()).scale(half);
            // divide by i
            Complex::new(d.im, -d.re)
        })
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Cyclic Jacobi diagonalization of the Hermitian part of a square matrix.
    ///
    /// Stops once the off-diagonal Frobenius mass is at most
    /// `off_tol * ||h||_F` or after `max_sweeps` sweeps. Eigenvalues are
    /// returned ascending with the matching orthonormal eigenvectors as
    /// columns.
    pub fn jacobi_eigh(&self, off_tol: T, max_sweeps: usize) -> JacobiOutcome<T> {
        assert!(self.is_square(), "Jacobi needs a square matrix");
        let n = self.rows;
        let mut a = self.hermitian_part();
        let mut v = Self::identity(n);
        let target = off_tol * a.frobenius_norm();
        let mut sweeps = 0;
        let mut off = off_diagonal_mass(&a);
        while off > target && sweeps < max_sweeps {
            sweeps += 1;
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q, sweeps);
                }
            }
            off = off_diagonal_mass(&a);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            a[(i, i)]
                .re
                .partial_cmp(&a[(j, j)].re)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(i.cmp(&j))
        });
        JacobiOutcome {
            values: order.iter().map(|&i| a[(i, i)].re).collect(),
            vectors: v.select_columns(&order),
            converged: off <= target,
            sweeps,
            off,
        }
    }

    /// One-sided (Hestenes) Jacobi singular value decomposition of a square
    /// matrix: column pairs of `x V` are rotated until mutually orthogonal,
    /// which diagonalizes `x*x` without forming it.
    ///
    /// Singular values come back descending. Left vectors are the normalized
    /// columns of `x V`; a column is left zero when its singular value is
    /// exactly zero.
    pub fn jacobi_svd(&self, off_tol: T, max_sweeps: usize) -> SvdOutcome<T> {
        assert!(self.is_square(), "Jacobi SVD needs a square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut v = Self::identity(n);
        let mut sweeps = 0;
        let mut converged = n < 2;
        while !converged && sweeps < max_sweeps {
            sweeps += 1;
            converged = true;
            for p in 0..n {
                for q in (p + 1)..n {
                    converged &= !orthogonalize_pair(&mut a, &mut v, p, q, off_tol);
                }
            }
        }
        let norms: Vec<T> = (0..n).map(|j| vec_norm(&a.column(j))).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            norms[j]
                .partial_cmp(&norms[i])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(i.cmp(&j))
        });
        let sigma: Vec<T> = order.iter().map(|&j| norms[j]).collect();
        let left = Self::from_fn(n, n, |i, k| {
            let j = order[k];
            if norms[j] > T::zero() {
                a[(i, j)].unscale(norms[j])
            } else {
                cre(T::zero())
            }
        });
        SvdOutcome {
            sigma,
            left,
            right: v.select_columns(&order),
            converged,
            sweeps,
        }
    }

    /// Random matrix with independent standard complex Gaussian entries
    /// (real and imaginary parts each `N(0, 1/2)`).
    pub fn random_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let s = T::lit(std::f64::consts::FRAC_1_SQRT_2);
        Self::from_fn(rows, cols, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(T::lit(re) * s, T::lit(im) * s)
        })
    }

    /// Haar-ish random unitary: Gram-Schmidt on a complex Gaussian matrix.
    pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let g = Self::random_gaussian(n, n, rng);
            let cols: Vec<_> = (0..n).map(|j| g.column(j)).collect();
            let q = orthonormalize(&cols, T::lit(1e-6));
            if q.len() == n {
                return Self::from_columns(n, &q);
            }
        }
    }
}

/// Result of [`Matrix::jacobi_eigh`].
#[derive(Debug, Clone)]
pub struct JacobiOutcome<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
    pub converged: bool,
    pub sweeps: usize,
    pub off: T,
}

/// Result of [`Matrix::jacobi_svd`]: `x = left · diag(sigma) · right*`.
#[derive(Debug, Clone)]
pub struct SvdOutcome<T> {
    pub sigma: Vec<T>,
    pub left: Matrix<T>,
    pub right: Matrix<T>,
    pub converged: bool,
    pub sweeps: usize,
}

// Rotates columns p, q of `a` (and `v`) to make them orthogonal. Returns
// whether a rotation was applied.
fn orthogonalize_pair<T: Real>(
    a: &mut Matrix<T>,
    v: &mut Matrix<T>,
    p: usize,
    q: usize,
    off_tol: T,
) -> bool {
    let n = a.rows;
    let mut alpha = T::zero();
    let mut beta = T::zero();
    let mut gamma = cre(T::zero());
    for k in 0..n {
        alpha += a[(k, p)].norm_sqr();
        beta += a[(k, q)].norm_sqr();
        gamma += a[(k, p)].conj() * a[(k, q)];
    }
    let mag = gamma.norm();
    if mag == T::zero() || mag <= off_tol * (alpha * beta).sqrt() {
        return false;
    }
    let zeta = (beta - alpha) / (T::lit(2.0) * mag);
    let t = {
        let t = T::one() / (zeta.abs() + (zeta * zeta + T::one()).sqrt());
        if zeta < T::zero() {
            -t
        } else {
            t
        }
    };
    let cs = T::one() / (t * t + T::one()).sqrt();
    let sn = t * cs;
    let phase = gamma.unscale(mag).conj();
    for m in [&mut *a, &mut *v] {
        for k in 0..n {
            let xp = m[(k, p)];
            let xq = m[(k, q)] * phase;
            m[(k, p)] = xp.scale(cs) - xq.scale(sn);
            m[(k, q)] = xp.scale(sn) + xq.scale(cs);
        }
    }
    true
}

fn off_diagonal_mass<T: Real>(a: &Matrix<T>) -> T {
    let mut s = T::zero();
    for i in 0..a.rows {
        for j in 0..a.cols {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

// One complex Jacobi rotation zeroing a[p][q]. The phase of a[p][q] is
// absorbed into column q so the remaining 2x2 problem is real symmetric.
fn rotate<T: Real>(a: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize, sweep: usize) {
    let g = a[(p, q)];
    let mag = g.norm();
    if mag == T::zero() {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let hundred = T::lit(100.0);
    if sweep > 4 && app.abs() + hundred * mag == app.abs() && aqq.abs() + hundred * mag == aqq.abs()
    {
        a[(p, q)] = cre(T::zero());
        a[(q, p)] = cre(T::zero());
        return;
    }
    let theta = (aqq - app) / (T::lit(2.0) * mag);
    let t = {
        let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
        if theta < T::zero() {
            -t
        } else {
            t
        }
    };
    let cs = T::one() / (t * t + T::one()).sqrt();
    let sn = t * cs;
    let phase = g.unscale(mag).conj();
    // G = diag(1, phase) * [[c, s], [-s, c]]
    let g_pp = cre(cs);
    let g_pq = cre(sn);
    let g_qp = phase.scale(-sn);
    let g_qq = phase.scale(cs);
    let n = a.rows;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = cre(T::zero());
    a[(q, p)] = cre(T::zero());
    a[(p, p)] = cre(a[(p, p)].re);
    a[(q, q)] = cre(a[(q, q)].re);
}

/// Modified Gram-Schmidt with re-orthogonalization. Vectors whose residual
/// norm falls below `drop_tol` times their original norm are discarded.
pub fn orthonormalize<T: Real>(vectors: &[Vec<Complex<T>>], drop_tol: T) -> Vec<Vec<Complex<T>>> {
    let mut basis: Vec<Vec<Complex<T>>> = Vec::new();
    for v in vectors {
        let norm0 = vec_norm(v);
        if norm0 == T::zero() {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let proj = vec_inner(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= proj * *bi;
                }
            }
        }
        let nw = vec_norm(&w);
        if nw > drop_tol * norm0 {
            basis.push(w.into_iter().map(|z| z.unscale(nw)).collect());
        }
    }
    basis
}

pub fn vec_inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(cre(T::zero()), |acc, (x, y)| acc + x.conj() * *y)
}

pub fn vec_norm<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;

    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reconstruct(out: &JacobiOutcome<f64>) -> Matrix<f64> {
        let d = Matrix::diagonal(&out.values.iter().map(|&v| cre(v)).collect::<Vec<_>>());
        out.vectors.matmul(&d).matmul(&out.vectors.adjoint())
    }

    #[test]
    fn jacobi_pauli_y() {
        let y = Matrix::<f64>::from_row_major(
            2,
            2,
            vec![cre(0.0), c(0.0, -1.0), c(0.0, 1.0), cre(0.0)],
        );
        let out = y.jacobi_eigh(1e-14, 100);
        assert!(out.converged);
        assert!((out.values[0] + 1.0).abs() < 1e-14);
        assert!((out.values[1] - 1.0).abs() < 1e-14);
        assert!(reconstruct(&out).sub(&y).frobenius_norm() < 1e-14);
    }

    #[test]
    fn jacobi_random_hermitian_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=12 {
            let g = Matrix::<f64>::random_gaussian(n, n, &mut rng);
            let h = g.hermitian_part();
            let out = h.jacobi_eigh(1e-14, 100);
            assert!(out.converged, "n = {n}");
            let v = &out.vectors;
            let gram = v.adjoint().matmul(v);
            assert!(gram.sub(&Matrix::identity(n)).frobenius_norm() < 1e-13);
            assert!(
                reconstruct(&out).sub(&h).frobenius_norm() < 1e-12 * (1.0 + h.frobenius_norm())
            );
            assert!(out.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = Matrix::<f64>::random_unitary(5, &mut rng);
        assert!(
            u.adjoint()
                .matmul(&u)
                .sub(&Matrix::identity(5))
                .frobenius_norm()
                < 1e-13
        );
    }

    #[test]
    fn svd_reconstructs_and_resolves_exact_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=8 {
            let w = Matrix::<f64>::random_unitary(n, &mut rng);
            let v = Matrix::<f64>::random_unitary(n, &mut rng);
            let s: Vec<_> = (0..n)
                .map(|i| cre(if i % 3 == 2 { 0.0 } else { 1.0 + i as f64 }))
                .collect();
            let x = w.matmul(&Matrix::diagonal(&s)).matmul(&v.adjoint());
            let out = x.jacobi_svd(1e-15, 100);
            assert!(out.converged);
            let d = Matrix::diagonal(&out.sigma.iter().map(|&v| cre(v)).collect::<Vec<_>>());
            let back = out.left.matmul(&d).matmul(&out.right.adjoint());
            assert!(back.sub(&x).frobenius_norm() < 1e-13, "n = {n}");
            let zeros = out.sigma.iter().filter(|&&v| v < 1e-13).count();
            assert_eq!(zeros, n / 3);
            assert!(out.sigma.windows(2).all(|p| p[0] >= p[1]));
            let vv = out.right.adjoint().matmul(&out.right);
            assert!(vv.sub(&Matrix::identity(n)).frobenius_norm() < 1e-13);
        }
    }
}
