//! Analytic primitives of the ambient algebra: norms, the Loewner order,
//! Hermitian eigendecompositions and the functional calculus built on them.

use num_complex::Complex;

use crate::element::AlgebraElement;
use crate::error::{AlgebraError, Result};
use crate::matrix::Matrix;
use crate::scalar::{cre, Real};
use crate::tolerance::ToleranceConfig;

/// Eigendecomposition of one block: ascending eigenvalues and the unitary
/// whose columns are the matching eigenvectors.
#[derive(Debug, Clone)]
pub struct BlockEigen<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

/// Blockwise eigendecomposition of a self-adjoint element.
#[derive(Debug, Clone)]
pub struct HermitianEigenSystem<T> {
    pub blocks: Vec<BlockEigen<T>>,
}

impl<T: Real> HermitianEigenSystem<T> {
    /// All eigenvalues, ascending, with multiplicity.
    pub fn eigenvalues(&self) -> Vec<T> {
        let mut v: Vec<T> = self
            .blocks
            .iter()
            .flat_map(|b| b.values.iter().copied())
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        v
    }

    pub fn min_eigenvalue(&self) -> T {
        self.blocks
            .iter()
            .filter_map(|b| b.values.first().copied())
            .fold(T::infinity(), T::min)
    }

    pub fn max_eigenvalue(&self) -> T {
        self.blocks
            .iter()
            .filter_map(|b| b.values.last().copied())
            .fold(T::neg_infinity(), T::max)
    }

    /// Spectral radius, which is the operator norm for self-adjoint input.
    pub fn spectral_radius(&self) -> T {
        self.min_eigenvalue().abs().max(self.max_eigenvalue().abs())
    }

    /// The eigenvector unitary as an algebra element.
    pub fn unitary(&self) -> AlgebraElement<T> {
        AlgebraElement::from_blocks_unchecked(
            self.blocks.iter().map(|b| b.vectors.clone()).collect(),
        )
    }

    /// `U f(Λ) U*` for a scalar function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(T) -> Complex<T>) -> AlgebraElement<T> {
        AlgebraElement::from_blocks_unchecked(
            self.blocks
                .iter()
                .map(|b| {
                    let n = b.values.len();
                    // U diag(f) U*, scaling columns first.
                    let scaled = Matrix::from_fn(n, n, |i, j| b.vectors[(i, j)] * f(b.values[j]));
                    scaled.matmul(&b.vectors.adjoint())
                })
                .collect(),
        )
    }

    pub fn reconstruct(&self) -> AlgebraElement<T> {
        self.apply(cre)
    }
}

/// Blockwise conjugate transpose.
pub fn adjoint<T: Real>(x: &AlgebraElement<T>) -> AlgebraElement<T> {
    x.adjoint()
}

/// Largest singular value over all blocks, from the top eigenvalue of `x*x`.
pub fn operator_norm<T: Real>(x: &AlgebraElement<T>) -> T {
    let sweeps = 100;
    let off_tol = T::epsilon();
    x.blocks()
        .iter()
        .map(|b| {
            let gram = b.adjoint().matmul(b);
            let out = gram.jacobi_eigh(off_tol, sweeps);
            out.values
                .last()
                .copied()
                .unwrap_or_else(T::zero)
                .max(T::zero())
                .sqrt()
        })
        .fold(T::zero(), T::max)
}

pub(crate) fn ensure_self_adjoint<T: Real>(
    h: &AlgebraElement<T>,
    tol: &ToleranceConfig<T>,
) -> Result<()> {
    let residual = h.self_adjoint_residual();
    if residual <= tol.slack(h.frobenius_norm()) {
        Ok(())
    } else {
        Err(AlgebraError::NotSelfAdjoint {
            residual: residual.to_f64().unwrap_or(f64::NAN),
        })
    }
}

/// Per-block cyclic Jacobi on the self-adjoint element `h`.
///
/// Each block converges against its own Frobenius norm, so the outcome for a
/// block never depends on the other summands.
pub fn eigh_hermitian<T: Real>(
    h: &AlgebraElement<T>,
    tol: &ToleranceConfig<T>,
) -> Result<HermitianEigenSystem<T>> {
    ensure_self_adjoint(h, tol)?;
    let mut blocks = Vec::with_capacity(h.blocks().len());
    let mut worst_off = T::zero();
    let mut sweeps = 0;
    let mut all_converged = true;
    for b in h.blocks() {
        let out = b.jacobi_eigh(tol.jacobi_off_tol, tol.max_sweeps);
        all_converged &= out.converged;
        worst_off = worst_off.max(out.off);
        sweeps = sweeps.max(out.sweeps);
        blocks.push(BlockEigen {
            values: out.values,
            vectors: out.vectors,
        });
    }
    let sys = HermitianEigenSystem { blocks };
    if !all_converged {
        let residual = (&sys.reconstruct() - &h.real_part()).frobenius_norm();
        if residual > tol.slack(sys.spectral_radius()) {
            return Err(AlgebraError::NonConvergence {
                sweeps,
                off: worst_off.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(sys)
}

/// Loewner comparison `a ≤ b`: the smallest eigenvalue of `b - a` is at
/// least `-pos_slack·(1 + ||b - a||)`.
pub fn loewner_leq<T: Real>(
    a: &AlgebraElement<T>,
    b: &AlgebraElement<T>,
    tol: &ToleranceConfig<T>,
) -> Result<bool> {
    a.ensure_same_signature(b)?;
    ensure_self_adjoint(a, tol)?;
    ensure_self_adjoint(b, tol)?;
    let sys = eigh_hermitian(&(b - a), tol)?;
    Ok(sys.min_eigenvalue() >= -tol.slack(sys.spectral_radius()))
}

/// Amount by which `a ≤ b` fails: `max(0, -λ_min(b - a))`.
pub fn loewner_violation<T: Real>(
    a: &AlgebraElement<T>,
    b: &AlgebraElement<T>,
    tol: &ToleranceConfig<T>,
) -> Result<T> {
    a.ensure_same_signature(b)?;
    let sys = eigh_hermitian(&(b - a).real_part(), tol)?;
    Ok((-sys.min_eigenvalue()).max(T::zero()))
}

/// Positive square root; eigenvalues within the slack below zero are clamped.
pub fn positive_sqrt<T: Real>(
    h: &AlgebraElement<T>,
    tol: &ToleranceConfig<T>,
) -> Result<AlgebraElement<T>> {
    let sys = eigh_hermitian(h, tol)?;
    sqrt_from_system(&sys, tol)
}

pub(crate) fn sqrt_from_system<T: Real>(
    sys: &HermitianEigenSystem<T>,
    tol: &ToleranceConfig<T>,
) -> Result<AlgebraElement<T>> {
    let min = sys.min_eigenvalue();
    if min < -tol.slack(sys.spectral_radius()) {
        return Err(AlgebraError::NotPositive {
            min_eigenvalue: min.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(sys.apply(|l| cre(l.max(T::zero()).sqrt())))
}

/// Threshold under which an eigenvalue of `h` counts as zero.
pub fn rank_threshold<T: Real>(norm: T, tol: &ToleranceConfig<T>) -> T {
    tol.rank_cutoff * norm.max(T::one())
}

/// Smallest projection `q` with `qh = h`: the sum of eigenprojections whose
/// eigenvalues exceed the relative rank cutoff in magnitude.
pub fn range_projection<T: Real>(
    h: &AlgebraElement<T>,
    tol: &ToleranceConfig<T>,
) -> Result<Projection<T>> {
    let sys = eigh_hermitian(h, tol)?;
    Ok(range_projection_from_system(&sys, tol))
}

pub(crate) fn range_projection_from_system<T: Real>(
    sys: &HermitianEigenSystem<T>,
    tol: &ToleranceConfig<T>,
) -> Projection<T> {
    let cut = rank_threshold(sys.spectral_radius(), tol);
    Projection::from_element_unchecked(sys.apply(|l| {
        if l.abs() > cut {
            cre(T::one())
        } else {
            cre(T::zero())
        }
    }))
}

/// Inverse of `h` on its range, zero on its kernel.
pub fn pseudo_inverse_on_range<T: Real>(
    h: &AlgebraElement<T>,
    tol: &ToleranceConfig<T>,
) -> Result<AlgebraElement<T>> {
    let sys = eigh_hermitian(h, tol)?;
    Ok(pseudo_inverse_from_system(&sys, tol))
}

pub(crate) fn pseudo_inverse_from_system<T: Real>(
    sys: &HermitianEigenSystem<T>,
    tol: &ToleranceConfig<T>,
) -> AlgebraElement<T> {
    let cut = rank_threshold(sys.spectral_radius(), tol);
    sys.apply(|l| {
        if l.abs() > cut {
            cre(l.recip())
        } else {
            cre(T::zero())
        }
    })
}

/// A self-adjoint idempotent.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection<T> {
    element: AlgebraElement<T>,
}

impl<T: Real> Projection<T> {
    /// Certifies `p² = p = p*` within `pos_slack·2`.
    pub fn new(element: AlgebraElement<T>, tol: &ToleranceConfig<T>) -> Result<Self> {
        let residual = projection_residual(&element);
        if residual <= tol.slack(T::one()) {
            Ok(Self { element })
        } else {
            Err(AlgebraError::NotProjection {
                residual: residual.to_f64().unwrap_or(f64::NAN),
            })
        }
    }

    pub(crate) fn from_element_unchecked(element: AlgebraElement<T>) -> Self {
        Self { element }
    }

    pub fn zero(sig: &crate::Signature) -> Self {
        Self::from_element_unchecked(AlgebraElement::zero(sig))
    }

    pub fn identity(sig: &crate::Signature) -> Self {
        Self::from_element_unchecked(AlgebraElement::identity(sig))
    }

    pub fn element(&self) -> &AlgebraElement<T> {
        &self.element
    }

    pub fn into_element(self) -> AlgebraElement<T> {
        self.element
    }

    /// `1 - p`.
    pub fn complement(&self) -> Self {
        let one = AlgebraElement::identity(&self.element.signature());
        Self::from_element_unchecked(&one - &self.element)
    }

    /// Rank, read off the trace.
    pub fn rank(&self) -> usize {
        let t = self.element.trace().re;
        t.round().to_usize().unwrap_or(0)
    }

    /// `p ≤ q`, tested as `||p - qp|| ≤ slack`, which for projections is
    /// equivalent to the Loewner comparison.
    pub fn is_below(&self, other: &Self, tol: &ToleranceConfig<T>) -> bool {
        let qp = &other.element * &self.element;
        (&self.element - &qp).frobenius_norm() <= tol.slack(T::one())
    }

    pub fn is_orthogonal_to(&self, other: &Self, tol: &ToleranceConfig<T>) -> bool {
        (&self.element * &other.element).frobenius_norm() <= tol.slack(T::one())
    }

    pub fn is_zero(&self, tol: &ToleranceConfig<T>) -> bool {
        self.element.frobenius_norm() <= tol.slack(T::one())
    }
}

/// `max(||p² - p||_F, ||p - p*||_F)`.
pub fn projection_residual<T: Real>(p: &AlgebraElement<T>) -> T {
    let sq = p * p;
    (&sq - p).frobenius_norm().max(p.self_adjoint_residual())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use crate::Signature;

    fn tol() -> ToleranceConfig<f64> {
        ToleranceConfig::default()
    }

    fn el(rows: &[&[f64]]) -> AlgebraElement<f64> {
        AlgebraElement::from_real_rows(rows).unwrap()
    }

    #[test]
    fn operator_norm_examples() {
        assert!(
            (operator_norm(&AlgebraElement::<f64>::diag_real(&[1.0, -3.0])) - 3.0).abs() < 1e-14
        );
        assert!((operator_norm(&el(&[&[0.0, 2.0], &[0.0, 0.0]])) - 2.0).abs() < 1e-14);
        let z = AlgebraElement::<f64>::zero(&Signature::new(vec![3]).unwrap());
        assert_eq!(operator_norm(&z), 0.0);
    }

    #[test]
    fn operator_norm_takes_max_over_blocks() {
        let x = AlgebraElement::<f64>::diag_real(&[1.0])
            .direct_sum(&AlgebraElement::diag_real(&[0.5, -4.0]));
        assert!((operator_norm(&x) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn loewner_examples() {
        let t = tol();
        let one = AlgebraElement::<f64>::identity(&Signature::new(vec![2]).unwrap());
        assert!(loewner_leq(
            &AlgebraElement::diag_real(&[1.0, 0.0]),
            &AlgebraElement::diag_real(&[1.0, 1.0]),
            &t
        )
        .unwrap());
        assert!(loewner_leq(&el(&[&[0.0, 1.0], &[1.0, 0.0]]), &one, &t).unwrap());
        assert!(!loewner_leq(
            &AlgebraElement::diag_real(&[2.0, 0.0]),
            &AlgebraElement::diag_real(&[1.0, 1.0]),
            &t
        )
        .unwrap());
    }

    #[test]
    fn loewner_rejects_non_self_adjoint() {
        let x = el(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let one = AlgebraElement::identity(&x.signature());
        assert!(matches!(
            loewner_leq(&x, &one, &tol()),
            Err(AlgebraError::NotSelfAdjoint { .. })
        ));
    }

    #[test]
    fn eigh_examples() {
        let t = tol();
        let sys = eigh_hermitian(&AlgebraElement::<f64>::diag_real(&[3.0, 1.0]), &t).unwrap();
        assert_eq!(sys.eigenvalues(), vec![1.0, 3.0]);
        // permutation unitary: |U| has one unit entry per column
        let u = &sys.blocks[0].vectors;
        assert!((u[(1, 0)].norm() - 1.0).abs() < 1e-15 && (u[(0, 1)].norm() - 1.0).abs() < 1e-15);

        let sys = eigh_hermitian(&el(&[&[0.0, 1.0], &[1.0, 0.0]]), &t).unwrap();
        let ev = sys.eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);

        let y = AlgebraElement::from_rows(&[&[cre(0.0), c(0.0, -1.0)], &[c(0.0, 1.0), cre(0.0)]])
            .unwrap();
        let ev = eigh_hermitian(&y, &t).unwrap().eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigh_rejects_non_self_adjoint() {
        let x = el(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(eigh_hermitian(&x, &tol()).is_err());
    }

    #[test]
    fn eigh_reports_non_convergence() {
        let t = ToleranceConfig {
            max_sweeps: 1,
            jacobi_off_tol: 1e-300,
            pos_slack: 1e-300,
            ..tol()
        };
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(11);
        let h = AlgebraElement::<f64>::random_gaussian(&Signature::new(vec![8]).unwrap(), &mut rng)
            .real_part();
        assert!(matches!(
            eigh_hermitian(&h, &t),
            Err(AlgebraError::NonConvergence { .. })
        ));
    }

    #[test]
    fn positive_sqrt_examples() {
        let t = tol();
        let r = positive_sqrt(&AlgebraElement::<f64>::diag_real(&[4.0, 9.0]), &t).unwrap();
        assert!(r.max_abs_diff(&AlgebraElement::diag_real(&[2.0, 3.0])) < 1e-14);

        let r = positive_sqrt(&el(&[&[2.0, 1.0], &[1.0, 2.0]]), &t).unwrap();
        let s3 = 3f64.sqrt();
        let expected = el(&[
            &[(s3 + 1.0) / 2.0, (s3 - 1.0) / 2.0],
            &[(s3 - 1.0) / 2.0, (s3 + 1.0) / 2.0],
        ]);
        assert!(r.max_abs_diff(&expected) < 1e-14);

        let z = AlgebraElement::<f64>::zero(&Signature::new(vec![2]).unwrap());
        assert!(positive_sqrt(&z, &t).unwrap().max_abs_diff(&z) == 0.0);
    }

    #[test]
    fn positive_sqrt_clamps_roundoff_and_rejects_negative() {
        let t = tol();
        let r = positive_sqrt(&AlgebraElement::<f64>::diag_real(&[4.0, -1e-12]), &t).unwrap();
        assert!(r.max_abs_diff(&AlgebraElement::diag_real(&[2.0, 0.0])) < 1e-14);
        assert!(matches!(
            positive_sqrt(&AlgebraElement::<f64>::diag_real(&[1.0, -0.5]), &t),
            Err(AlgebraError::NotPositive { .. })
        ));
    }

    #[test]
    fn range_projection_examples() {
        let t = tol();
        let p = range_projection(&AlgebraElement::<f64>::diag_real(&[3.0, 0.0]), &t).unwrap();
        assert!(
            p.element()
                .max_abs_diff(&AlgebraElement::diag_real(&[1.0, 0.0]))
                < 1e-15
        );

        let z = AlgebraElement::<f64>::zero(&Signature::new(vec![2]).unwrap());
        assert!(range_projection(&z, &t).unwrap().element().frobenius_norm() == 0.0);

        let p = range_projection(&el(&[&[1.0, 1.0], &[1.0, 1.0]]), &t).unwrap();
        assert!(p.element().max_abs_diff(&el(&[&[0.5, 0.5], &[0.5, 0.5]])) < 1e-15);
    }

    #[test]
    fn pseudo_inverse_examples() {
        let t = tol();
        let r =
            pseudo_inverse_on_range(&AlgebraElement::<f64>::diag_real(&[2.0, 0.0]), &t).unwrap();
        assert!(r.max_abs_diff(&AlgebraElement::diag_real(&[0.5, 0.0])) < 1e-15);

        let one = AlgebraElement::<f64>::identity(&Signature::new(vec![3]).unwrap());
        assert!(
            pseudo_inverse_on_range(&one, &t)
                .unwrap()
                .max_abs_diff(&one)
                < 1e-15
        );

        let r = pseudo_inverse_on_range(&el(&[&[2.0, 1.0], &[1.0, 2.0]]), &t).unwrap();
        let expected = el(&[&[2.0 / 3.0, -1.0 / 3.0], &[-1.0 / 3.0, 2.0 / 3.0]]);
        assert!(r.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn projection_certification() {
        let t = tol();
        assert!(Projection::new(AlgebraElement::<f64>::diag_real(&[1.0, 0.0]), &t).is_ok());
        assert!(matches!(
            Projection::new(AlgebraElement::<f64>::diag_real(&[0.5, 0.0]), &t),
            Err(AlgebraError::NotProjection { .. })
        ));
    }

    #[test]
    fn f32_instantiation_works() {
        let t = ToleranceConfig::<f32>::default();
        let h = AlgebraElement::<f32>::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let r = positive_sqrt(&h, &t).unwrap();
        assert!((&(&r * &r) - &h).frobenius_norm() < 1e-5);
    }
}
