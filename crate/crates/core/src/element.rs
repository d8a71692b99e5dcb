//! Elements of a finite-dimensional *-algebra `M_{n_1} ⊕ … ⊕ M_{n_r}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use rand::Rng;

use crate::error::{AlgebraError, Result};
use crate::matrix::Matrix;
use crate::scalar::{cre, Real};

/// Block sizes `(n_1, …, n_r)` of a direct sum of full matrix algebras.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature(Vec<usize>);

impl Signature {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(AlgebraError::Malformed(
                "signature needs at least one block".into(),
            ));
        }
        if sizes.contains(&0) {
            return Err(AlgebraError::Malformed(
                "block sizes must be at least 1".into(),
            ));
        }
        Ok(Self(sizes))
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn num_blocks(&self) -> usize {
        self.0.len()
    }

    /// Dimension of the underlying Hilbert space, `Σ n_k`.
    pub fn total_dim(&self) -> usize {
        self.0.iter().sum()
    }

    /// Linear dimension of the algebra, `Σ n_k²`.
    pub fn algebra_dim(&self) -> usize {
        self.0.iter().map(|n| n * n).sum()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| format!("M{n}")).collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// An element of the block-diagonal algebra, stored block by block.
///
/// Entries are always finite. Arithmetic operators panic on signature
/// mismatch; the `checked_*` methods return [`AlgebraError::SignatureMismatch`]
/// instead.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement<T> {
    blocks: Vec<Matrix<T>>,
}

impl<T: Real> AlgebraElement<T> {
    pub fn new(blocks: Vec<Matrix<T>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(AlgebraError::Malformed(
                "element needs at least one block".into(),
            ));
        }
        for (k, b) in blocks.iter().enumerate() {
            if !b.is_square() || b.rows() == 0 {
                return Err(AlgebraError::Malformed(format!(
                    "block {k} is {}x{}, expected a non-empty square matrix",
                    b.rows(),
                    b.cols()
                )));
            }
            if !b.is_finite() {
                return Err(AlgebraError::Malformed(format!(
                    "block {k} has non-finite entries"
                )));
            }
        }
        Ok(Self { blocks })
    }

    pub(crate) fn from_blocks_unchecked(blocks: Vec<Matrix<T>>) -> Self {
        Self { blocks }
    }

    /// Single-block element from a square row-major array.
    pub fn from_rows(rows: &[&[Complex<T>]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(AlgebraError::Malformed(
                "rows must form a square matrix".into(),
            ));
        }
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(vec![Matrix::from_row_major(n, n, data)])
    }

    /// Single-block element from real row-major entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(AlgebraError::Malformed(
                "rows must form a square matrix".into(),
            ));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&v| cre(T::lit(v))))
            .collect();
        Self::new(vec![Matrix::from_row_major(n, n, data)])
    }

    /// Single-block diagonal element.
    pub fn diag(values: &[Complex<T>]) -> Self {
        Self::from_blocks_unchecked(vec![Matrix::diagonal(values)])
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let v: Vec<_> = values.iter().map(|&x| cre(T::lit(x))).collect();
        Self::diag(&v)
    }

    pub fn zero(sig: &Signature) -> Self {
        Self::from_blocks_unchecked(sig.sizes().iter().map(|&n| Matrix::zeros(n, n)).collect())
    }

    /// The unit `1_A`: the identity in every block.
    pub fn identity(sig: &Signature) -> Self {
        Self::from_blocks_unchecked(sig.sizes().iter().map(|&n| Matrix::identity(n)).collect())
    }

    pub fn scalar(sig: &Signature, z: Complex<T>) -> Self {
        Self::identity(sig).scale(z)
    }

    pub fn random_gaussian<R: Rng + ?Sized>(sig: &Signature, rng: &mut R) -> Self {
        Self::from_blocks_unchecked(
            sig.sizes()
                .iter()
                .map(|&n| Matrix::random_gaussian(n, n, rng))
                .collect(),
        )
    }

    pub fn random_unitary<R: Rng + ?Sized>(sig: &Signature, rng: &mut R) -> Self {
        Self::from_blocks_unchecked(
            sig.sizes()
                .iter()
                .map(|&n| Matrix::random_unitary(n, rng))
                .collect(),
        )
    }

    pub fn signature(&self) -> Signature {
        Signature(self.blocks.iter().map(|b| b.rows()).collect())
    }

    pub fn blocks(&self) -> &[Matrix<T>] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &Matrix<T> {
        &self.blocks[k]
    }

    pub fn into_blocks(self) -> Vec<Matrix<T>> {
        self.blocks
    }

    /// Direct sum of two elements, concatenating their block lists.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut blocks = self.blocks.clone();
        blocks.extend(other.blocks.iter().cloned());
        Self::from_blocks_unchecked(blocks)
    }

    pub fn same_signature(&self, other: &Self) -> bool {
        self.blocks.len() == other.blocks.len()
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|(a, b)| a.rows() == b.rows())
    }

    pub fn ensure_same_signature(&self, other: &Self) -> Result<()> {
        if self.same_signature(other) {
            Ok(())
        } else {
            Err(AlgebraError::SignatureMismatch {
                left: self.signature().0,
                right: other.signature().0,
            })
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.ensure_same_signature(other)?;
        Ok(self.zip_blocks(other, Matrix::matmul))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.ensure_same_signature(other)?;
        Ok(self.zip_blocks(other, Matrix::add))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.ensure_same_signature(other)?;
        Ok(self.zip_blocks(other, Matrix::sub))
    }

    fn zip_blocks(&self, other: &Self, f: impl Fn(&Matrix<T>, &Matrix<T>) -> Matrix<T>) -> Self {
        Self::from_blocks_unchecked(
            self.blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| f(a, b))
                .collect(),
        )
    }

    pub fn map_blocks(&self, f: impl Fn(&Matrix<T>) -> Matrix<T>) -> Self {
        Self::from_blocks_unchecked(self.blocks.iter().map(f).collect())
    }

    /// Blockwise conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.map_blocks(Matrix::adjoint)
    }

    pub fn scale(&self, z: Complex<T>) -> Self {
        self.map_blocks(|b| b.scale(z))
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(cre(s))
    }

    /// `(x + x*) / 2`.
    pub fn real_part(&self) -> Self {
        self.map_blocks(Matrix::hermitian_part)
    }

    /// `(x - x*) / 2i`, so that `x = real_part + i·imag_part`.
    pub fn imag_part(&self) -> Self {
        self.map_blocks(Matrix::skew_part)
    }

    /// `xy - yx`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Frobenius (Hilbert-Schmidt) norm over all blocks.
    pub fn frobenius_norm(&self) -> T {
        self.blocks
            .iter()
            .fold(T::zero(), |acc, b| {
                let f = b.frobenius_norm();
                acc + f * f
            })
            .sqrt()
    }

    /// Trace inner product `Σ_k tr(x_k* y_k)`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .fold(cre(T::zero()), |acc, (a, b)| acc + a.inner(b))
    }

    pub fn trace(&self) -> Complex<T> {
        self.blocks
            .iter()
            .fold(cre(T::zero()), |acc, b| acc + b.trace())
    }

    /// Entries of every block concatenated, row-major within each block.
    pub fn flatten(&self) -> Vec<Complex<T>> {
        self.blocks
            .iter()
            .flat_map(|b| b.as_slice().iter().copied())
            .collect()
    }

    /// Inverse of [`Self::flatten`].
    pub fn unflatten(sig: &Signature, data: &[Complex<T>]) -> Self {
        let mut offset = 0;
        let blocks = sig
            .sizes()
            .iter()
            .map(|&n| {
                let m = Matrix::from_row_major(n, n, data[offset..offset + n * n].to_vec());
                offset += n * n;
                m
            })
            .collect();
        Self::from_blocks_unchecked(blocks)
    }

    /// Frobenius distance to the adjoint; zero exactly for self-adjoint elements.
    pub fn self_adjoint_residual(&self) -> T {
        (self - &self.adjoint()).frobenius_norm()
    }

    /// Largest absolute entry difference, the "bit-level" comparison used for
    /// direct-sum checks.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.flatten()
            .iter()
            .zip(other.flatten())
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - b).norm()))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<T: Real> $trait<&AlgebraElement<T>> for &AlgebraElement<T> {
            type Output = AlgebraElement<T>;

            fn $method(self, rhs: &AlgebraElement<T>) -> AlgebraElement<T> {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }

        impl<T: Real> $trait<AlgebraElement<T>> for AlgebraElement<T> {
            type Output = AlgebraElement<T>;

            fn $method(self, rhs: AlgebraElement<T>) -> AlgebraElement<T> {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl<T: Real> Neg for &AlgebraElement<T> {
    type Output = AlgebraElement<T>;

    fn neg(self) -> AlgebraElement<T> {
        self.scale_real(-T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn adjoint_of_nilpotent() {
        let x =
            AlgebraElement::<f64>::from_rows(&[&[cre(0.0), c(0.0, 1.0)], &[cre(0.0), cre(0.0)]])
                .unwrap();
        let expected =
            AlgebraElement::from_rows(&[&[cre(0.0), cre(0.0)], &[c(0.0, -1.0), cre(0.0)]]).unwrap();
        assert_eq!(x.adjoint(), expected);
    }

    #[test]
    fn identity_is_self_adjoint() {
        let sig = Signature::new(vec![2, 3]).unwrap();
        let one = AlgebraElement::<f64>::identity(&sig);
        assert_eq!(one.adjoint(), one);
    }

    #[test]
    fn real_and_imaginary_parts_recombine() {
        let x = AlgebraElement::<f64>::from_rows(&[
            &[c(1.0, 2.0), c(3.0, -1.0)],
            &[c(0.5, 0.5), c(-2.0, 0.0)],
        ])
        .unwrap();
        let back = &x.real_part() + &x.imag_part().scale(c(0.0, 1.0));
        assert!(back.max_abs_diff(&x) < 1e-15);
        assert!(x.real_part().self_adjoint_residual() == 0.0);
        assert!(x.imag_part().self_adjoint_residual() < 1e-15);
    }

    #[test]
    fn signature_mismatch_is_rejected() {
        let a = AlgebraElement::<f64>::identity(&Signature::new(vec![2]).unwrap());
        let b = AlgebraElement::<f64>::identity(&Signature::new(vec![1, 1]).unwrap());
        assert!(matches!(
            a.checked_mul(&b),
            Err(AlgebraError::SignatureMismatch { .. })
        ));
        assert!(a.checked_add(&b).is_err());
    }

    #[test]
    fn rejects_non_finite_and_non_square() {
        let bad = Matrix::from_row_major(1, 1, vec![c(f64::NAN, 0.0)]);
        assert!(AlgebraElement::new(vec![bad]).is_err());
        let rect = Matrix::<f64>::zeros(2, 3);
        assert!(AlgebraElement::new(vec![rect]).is_err());
        assert!(AlgebraElement::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn flatten_roundtrip() {
        let sig = Signature::new(vec![1, 3]).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1);
        let x = AlgebraElement::<f64>::random_gaussian(&sig, &mut rng);
        assert_eq!(AlgebraElement::unflatten(&sig, &x.flatten()), x);
    }
}
