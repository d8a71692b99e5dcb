//! Joint eigenspaces of commuting normal elements by recursive splitting.
//!
//! Each generator `g` is split as `Re g + i·Im g`; every current subspace is
//! compressed onto the Hermitian part, diagonalized, and cut wherever
//! consecutive eigenvalues differ by more than `cluster_tol·max(1, ||g||)`.
//! Pieces from different blocks with matching joint eigenvalues are merged
//! afterwards, so a joint eigenspace may span several summands.

use num_complex::Complex;

use crate::algebra::operator_norm;
use crate::element::{AlgebraElement, Signature};
use crate::matrix::Matrix;
use crate::scalar::{c, Real};
use crate::tolerance::ToleranceConfig;

/// One joint eigenspace: the common eigenvalue of each generator and an
/// orthonormal basis of the subspace inside each block it touches.
#[derive(Debug, Clone)]
pub struct JointEigenspace<T> {
    pub values: Vec<Complex<T>>,
    pub pieces: Vec<(usize, Matrix<T>)>,
}

impl<T: Real> JointEigenspace<T> {
    pub fn dimension(&self) -> usize {
        self.pieces.iter().map(|(_, v)| v.cols()).sum()
    }

    /// Orthogonal projection onto the subspace.
    pub fn projection(&self, sig: &Signature) -> AlgebraElement<T> {
        let mut blocks: Vec<Matrix<T>> = sig.sizes().iter().map(|&n| Matrix::zeros(n, n)).collect();
        for (k, v) in &self.pieces {
            blocks[*k] = blocks[*k].add(&v.matmul(&v.adjoint()));
        }
        AlgebraElement::from_blocks_unchecked(blocks)
    }
}

struct Piece<T> {
    block: usize,
    values: Vec<Complex<T>>,
    basis: Matrix<T>,
}

/// Splits the whole space into joint eigenspaces of `gens`.
///
/// The generators must be normal and pairwise commuting; callers check this.
/// With no generators the result is a single space, the whole algebra.
pub fn joint_eigenspaces<T: Real>(
    sig: &Signature,
    gens: &[AlgebraElement<T>],
    tol: &ToleranceConfig<T>,
) -> Vec<JointEigenspace<T>> {
    let scales: Vec<T> = gens
        .iter()
        .map(|g| operator_norm(g).max(T::one()))
        .collect();
    let mut pieces = Vec::new();
    for (k, &n) in sig.sizes().iter().enumerate() {
        let mut current = vec![(Vec::new(), Matrix::identity(n))];
        for (g, &scale) in gens.iter().zip(&scales) {
            let radius = tol.cluster_tol * scale;
            let re = g.block(k).hermitian_part();
            let im = g.block(k).skew_part();
            let mut next = Vec::new();
            for (vals, basis) in current {
                for (mean_re, sub) in split(&re, &basis, radius, tol) {
                    for (mean_im, subsub) in split(&im, &sub, radius, tol) {
                        let mut v: Vec<Complex<T>> = vals.clone();
                        v.push(c(mean_re, mean_im));
                        next.push((v, subsub));
                    }
                }
            }
            current = next;
        }
        pieces.extend(current.into_iter().map(|(values, basis)| Piece {
            block: k,
            values,
            basis,
        }));
    }
    merge(pieces, &scales, tol)
}

// Compress `h` onto span(basis), diagonalize, and cut the spectrum into
// clusters of radius `radius` (single linkage on the sorted eigenvalues).
fn split<T: Real>(
    h: &Matrix<T>,
    basis: &Matrix<T>,
    radius: T,
    tol: &ToleranceConfig<T>,
) -> Vec<(T, Matrix<T>)> {
    let compressed = basis.adjoint().matmul(h).matmul(basis);
    let out = compressed.jacobi_eigh(tol.jacobi_off_tol, tol.max_sweeps);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in out.values.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if v - out.values[*g.last().expect("non-empty group")] <= radius => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let mean = g.iter().fold(T::zero(), |acc, &i| acc + out.values[i])
                / T::from_usize_lossy(g.len());
            (mean, basis.matmul(&out.vectors.select_columns(&g)))
        })
        .collect()
}

fn merge<T: Real>(
    pieces: Vec<Piece<T>>,
    scales: &[T],
    tol: &ToleranceConfig<T>,
) -> Vec<JointEigenspace<T>> {
    let n = pieces.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut j = i;
        while parent[j] != r {
            let next = parent[j];
            parent[j] = r;
            j = next;
        }
        r
    }
    let close = |a: &[Complex<T>], b: &[Complex<T>]| {
        a.iter()
            .zip(b)
            .zip(scales)
            .all(|((x, y), &s)| (*x - *y).norm() <= tol.cluster_tol * s)
    };
    for i in 0..n {
        for j in (i + 1)..n {
            if close(&pieces[i].values, &pieces[j].values) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj] = ri;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, members)) => members.push(i),
            None => groups.push((r, vec![i])),
        }
    }
    let mut spaces: Vec<JointEigenspace<T>> = groups
        .into_iter()
        .map(|(_, members)| {
            let m = pieces[members[0]].values.len();
            let mut values = vec![c(T::zero(), T::zero()); m];
            let mut weight = T::zero();
            let mut by_block: Vec<(usize, Matrix<T>)> = Vec::new();
            for &i in &members {
                let p = &pieces[i];
                let w = T::from_usize_lossy(p.basis.cols());
                weight += w;
                for (acc, v) in values.iter_mut().zip(&p.values) {
                    *acc += v.scale(w);
                }
                match by_block.iter_mut().find(|(k, _)| *k == p.block) {
                    Some((_, basis)) => *basis = hstack(basis, &p.basis),
                    None => by_block.push((p.block, p.basis.clone())),
                }
            }
            for v in &mut values {
                *v = v.unscale(weight);
            }
            by_block.sort_by_key(|(k, _)| *k);
            JointEigenspace {
                values,
                pieces: by_block,
            }
        })
        .collect();
    spaces.sort_by(|a, b| {
        for (x, y) in a.values.iter().zip(&b.values) {
            let ord =
                x.re.partial_cmp(&y.re)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(x.im.partial_cmp(&y.im).unwrap_or(std::cmp::Ordering::Equal));
            if ord != std::cmp::Ordering::Equal {
                return ord;
            }
        }
        std::cmp::Ordering::Equal
    });
    spaces
}

fn hstack<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    Matrix::from_fn(a.rows(), a.cols() + b.cols(), |i, j| {
        if j < a.cols() {
            a[(i, j)]
        } else {
            b[(i, j - a.cols())]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cre;

    #[test]
    fn degenerate_diagonal_splits_by_value() {
        let t = ToleranceConfig::default();
        let a = AlgebraElement::<f64>::diag(&[cre(1.0), c(0.0, 1.0), c(0.0, 1.0)]);
        let spaces = joint_eigenspaces(&a.signature(), std::slice::from_ref(&a), &t);
        assert_eq!(spaces.len(), 2);
        let dims: Vec<_> = spaces.iter().map(JointEigenspace::dimension).collect();
        assert_eq!(dims, vec![2, 1]);
    }

    #[test]
    fn equal_values_merge_across_blocks() {
        let t = ToleranceConfig::default();
        let a = AlgebraElement::<f64>::diag_real(&[2.0, 1.0])
            .direct_sum(&AlgebraElement::diag_real(&[2.0]));
        let spaces = joint_eigenspaces(&a.signature(), std::slice::from_ref(&a), &t);
        assert_eq!(spaces.len(), 2);
        assert_eq!(spaces[1].dimension(), 2);
        assert_eq!(spaces[1].pieces.len(), 2);
        let p = spaces[1].projection(&a.signature());
        let expected =
            AlgebraElement::diag_real(&[1.0, 0.0]).direct_sum(&AlgebraElement::diag_real(&[1.0]));
        assert!(p.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn no_generators_gives_whole_space() {
        let t = ToleranceConfig::<f64>::default();
        let sig = Signature::new(vec![2, 3]).unwrap();
        let spaces = joint_eigenspaces(&sig, &[], &t);
        assert_eq!(spaces.len(), 1);
        assert_eq!(spaces[0].dimension(), 5);
    }

    #[test]
    fn two_commuting_generators_refine() {
        let t = ToleranceConfig::default();
        let a = AlgebraElement::<f64>::diag_real(&[1.0, 1.0, 2.0, 2.0]);
        let b = AlgebraElement::<f64>::diag_real(&[5.0, 6.0, 5.0, 5.0]);
        let spaces = joint_eigenspaces(&a.signature(), &[a, b], &t);
        let dims: Vec<_> = spaces.iter().map(JointEigenspace::dimension).collect();
        assert_eq!(dims, vec![1, 1, 2]);
    }
}
