//! Projection lattice, commutative subalgebras and their monotone closures.
//!
//! Subalgebras are stored as orthonormal bases under the trace inner product
//! `⟨x, y⟩ = Σ_k tr(x_k* y_k)`; equality is tested basis-free through the
//! largest principal angle between spans.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{eigh_hermitian, loewner_leq, operator_norm, range_projection, Projection};
use crate::element::{AlgebraElement, Signature};
use crate::error::{AlgebraError, Result};
use crate::joint::joint_eigenspaces;
use crate::matrix::{orthonormalize, Matrix};
use crate::scalar::{cre, Real};
use crate::spectral::{is_normal, normality_residual};
use crate::tolerance::ToleranceConfig;

/// Projections of a subalgebra are enumerated exhaustively up to this many
/// atoms; beyond it only atoms and their complements are used.
const MAX_ENUMERATED_ATOMS: usize = 10;

/// Least upper bound of a finite family of projections: `rp(Σ p_i)`.
pub fn sup_projections<T: Real>(
    ps: &[Projection<T>],
    tol: &ToleranceConfig<T>,
) -> Result<Projection<T>> {
    let first = ps
        .first()
        .ok_or_else(|| AlgebraError::Malformed("supremum of an empty family".into()))?;
    let mut sum = first.element().clone();
    for p in &ps[1..] {
        sum = sum.checked_add(p.element())?;
    }
    range_projection(&sum, tol)
}

/// Largest projection annihilating every element of `s`: `1 - rp(Σ s_i)`.
pub fn max_annihilator<T: Real>(
    s: &[AlgebraElement<T>],
    tol: &ToleranceConfig<T>,
) -> Result<Projection<T>> {
    let first = s
        .first()
        .ok_or_else(|| AlgebraError::Malformed("annihilator of an empty family".into()))?;
    let sig = first.signature();
    let mut sum = AlgebraElement::zero(&sig);
    for x in s {
        sum = sum.checked_add(x)?;
        let sys = eigh_hermitian(x, tol)?;
        if sys.min_eigenvalue() < -tol.slack(sys.spectral_radius()) {
            return Err(AlgebraError::NotPositive {
                min_eigenvalue: sys.min_eigenvalue().to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(range_projection(&sum, tol)?.complement())
}

/// Join of two commuting projections, `p + q - pq`.
pub fn join_commuting<T: Real>(p: &Projection<T>, q: &Projection<T>) -> Projection<T> {
    let (a, b) = (p.element(), q.element());
    Projection::from_element_unchecked(&(a + b) - &(a * b))
}

/// Meet of two commuting projections, `pq`.
pub fn meet_commuting<T: Real>(p: &Projection<T>, q: &Projection<T>) -> Projection<T> {
    Projection::from_element_unchecked(p.element() * q.element())
}

/// Orthogonal-family axiom at finite dimension: for pairwise orthogonal
/// `ps`, the sum is a projection, equals [`sup_projections`], dominates each
/// member, and lies below every listed projection that dominates them all.
///
/// Returns `Ok(false)` if the family is not pairwise orthogonal.
pub fn orthogonal_family_has_least_upper_bound<T: Real>(
    ps: &[Projection<T>],
    candidates: &[Projection<T>],
    tol: &ToleranceConfig<T>,
) -> Result<bool> {
    for (i, p) in ps.iter().enumerate() {
        for q in &ps[i + 1..] {
            p.element().ensure_same_signature(q.element())?;
            if !p.is_orthogonal_to(q, tol) {
                return Ok(false);
            }
        }
    }
    let sup = sup_projections(ps, tol)?;
    let sum = ps
        .iter()
        .skip(1)
        .fold(ps[0].element().clone(), |acc, p| &acc + p.element());
    if Projection::new(sum.clone(), tol).is_err()
        || (&sum - sup.element()).frobenius_norm() > tol.slack(T::one())
    {
        return Ok(false);
    }
    if !ps.iter().all(|p| p.is_below(&sup, tol)) {
        return Ok(false);
    }
    for q in candidates {
        if ps.iter().all(|p| p.is_below(q, tol)) && !loewner_leq(sup.element(), q.element(), tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A unital *-subalgebra given by an orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subalgebra<T> {
    signature: Signature,
    basis: Vec<AlgebraElement<T>>,
    refinement_seed: Option<u64>,
}

fn drop_tol<T: Real>(tol: &ToleranceConfig<T>) -> T {
    tol.cluster_tol
}

impl<T: Real> Subalgebra<T> {
    /// Linear span of `elems` (no closure is taken).
    pub fn span(
        sig: &Signature,
        elems: &[AlgebraElement<T>],
        tol: &ToleranceConfig<T>,
    ) -> Result<Self> {
        let mut vecs = Vec::with_capacity(elems.len());
        for e in elems {
            if e.signature() != *sig {
                return Err(AlgebraError::SignatureMismatch {
                    left: sig.sizes().to_vec(),
                    right: e.signature().sizes().to_vec(),
                });
            }
            vecs.push(e.flatten());
        }
        let basis = orthonormalize(&vecs, drop_tol(tol))
            .into_iter()
            .map(|v| AlgebraElement::unflatten(sig, &v))
            .collect();
        Ok(Self {
            signature: sig.clone(),
            basis,
            refinement_seed: None,
        })
    }

    /// Smallest unital *-subalgebra containing `gens`.
    pub fn generated_by(
        sig: &Signature,
        gens: &[AlgebraElement<T>],
        tol: &ToleranceConfig<T>,
    ) -> Result<Self> {
        let mut seed = vec![AlgebraElement::identity(sig)];
        for g in gens {
            seed.push(g.clone());
            seed.push(g.adjoint());
        }
        let mut alg = Self::span(sig, &seed, tol)?;
        loop {
            let before = alg.dim();
            let mut candidates = alg.basis.clone();
            for a in &alg.basis {
                for b in &alg.basis {
                    let prod = a * b;
                    if alg.membership_residual(&prod)
                        > drop_tol(tol) * prod.frobenius_norm().max(T::one())
                    {
                        candidates.push(prod);
                    }
                }
            }
            alg = Self::span(sig, &candidates, tol)?;
            if alg.dim() == before {
                return Ok(alg);
            }
        }
    }

    /// Commutative algebra spanned by the joint spectral projections of
    /// commuting normal `gens` (together with the unit).
    pub fn commutative_generated_by(
        sig: &Signature,
        gens: &[AlgebraElement<T>],
        tol: &ToleranceConfig<T>,
    ) -> Result<Self> {
        ensure_commuting_normal(gens, tol)?;
        let atoms: Vec<AlgebraElement<T>> = joint_eigenspaces(sig, gens, tol)
            .iter()
            .map(|s| s.projection(sig))
            .collect();
        Self::from_atoms(sig, &atoms, tol)
    }

    fn from_atoms(
        sig: &Signature,
        atoms: &[AlgebraElement<T>],
        tol: &ToleranceConfig<T>,
    ) -> Result<Self> {
        Self::span(sig, atoms, tol)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn basis(&self) -> &[AlgebraElement<T>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Seed used for the random refinement when built by [`generate_masa`].
    pub fn refinement_seed(&self) -> Option<u64> {
        self.refinement_seed
    }

    /// Orthogonal projection of `x` onto the span.
    pub fn project(&self, x: &AlgebraElement<T>) -> AlgebraElement<T> {
        self.basis
            .iter()
            .fold(AlgebraElement::zero(&self.signature), |acc, b| {
                &acc + &b.scale(b.inner(x))
            })
    }

    /// Frobenius distance from `x` to the span.
    pub fn membership_residual(&self, x: &AlgebraElement<T>) -> T {
        (x - &self.project(x)).frobenius_norm()
    }

    pub fn contains(&self, x: &AlgebraElement<T>, tol: &ToleranceConfig<T>) -> bool {
        x.same_signature(&AlgebraElement::zero(&self.signature))
            && self.membership_residual(x) <= tol.slack(x.frobenius_norm())
    }

    /// Worst residual of `self ⊆ other` over the basis.
    pub fn containment_residual(&self, other: &Self) -> T {
        self.basis
            .iter()
            .map(|b| other.membership_residual(b))
            .fold(T::zero(), T::max)
    }

    pub fn is_contained_in(&self, other: &Self, tol: &ToleranceConfig<T>) -> bool {
        self.signature == other.signature && self.containment_residual(other) <= tol.slack(T::one())
    }

    pub fn commutativity_residual(&self) -> T {
        let mut worst = T::zero();
        for (i, a) in self.basis.iter().enumerate() {
            for b in &self.basis[i + 1..] {
                worst = worst.max(a.commutator(b).frobenius_norm());
            }
        }
        worst
    }

    pub fn is_commutative(&self, tol: &ToleranceConfig<T>) -> bool {
        self.commutativity_residual() <= tol.slack(T::one())
    }

    /// Worst residual of the closure axioms: unit, adjoints and products of
    /// basis elements all lie in the span.
    pub fn closure_residual(&self) -> T {
        let mut worst = self.membership_residual(&AlgebraElement::identity(&self.signature));
        for a in &self.basis {
            worst = worst.max(self.membership_residual(&a.adjoint()));
            for b in &self.basis {
                worst = worst.max(self.membership_residual(&(a * b)));
            }
        }
        worst
    }

    /// Sine of the largest principal angle between the two spans; `1` when
    /// the dimensions differ.
    pub fn principal_angle_sine(&self, other: &Self) -> T {
        if self.dim() != other.dim() || self.signature != other.signature {
            return T::one();
        }
        if self.dim() == 0 {
            return T::zero();
        }
        let d = other.dim();
        let residuals: Vec<Vec<_>> = other
            .basis
            .iter()
            .map(|v| (v - &self.project(v)).flatten())
            .collect();
        let gram = Matrix::from_fn(d, d, |i, j| {
            crate::matrix::vec_inner(&residuals[i], &residuals[j])
        });
        let out = gram.jacobi_eigh(T::epsilon(), 100);
        out.values
            .last()
            .copied()
            .unwrap_or_else(T::zero)
            .max(T::zero())
            .sqrt()
    }

    /// Minimal projections of a commutative subalgebra.
    pub fn atoms(&self, tol: &ToleranceConfig<T>) -> Result<Vec<Projection<T>>> {
        ensure_commuting_normal(&self.basis, tol)?;
        let spaces = joint_eigenspaces(&self.signature, &self.basis, tol);
        let mut atoms = Vec::with_capacity(spaces.len());
        for s in spaces {
            let p = s.projection(&self.signature);
            // only eigenspaces that the algebra itself separates are atoms;
            // the unit guarantees their sum is 1
            atoms.push(Projection::from_element_unchecked(p));
        }
        Ok(atoms)
    }

    /// Relative commutant `{y : yb = by for every basis element b}` in the
    /// ambient algebra, from the kernel of the commutator map.
    pub fn relative_commutant(&self, tol: &ToleranceConfig<T>) -> Result<Self> {
        let sig = &self.signature;
        let dim = sig.algebra_dim();
        let units: Vec<AlgebraElement<T>> = (0..dim)
            .map(|i| {
                let mut v = vec![cre(T::zero()); dim];
                v[i] = cre(T::one());
                AlgebraElement::unflatten(sig, &v)
            })
            .collect();
        // Gram matrix of the commutator map y -> ([y, b_1], …, [y, b_m]).
        let images: Vec<Vec<AlgebraElement<T>>> = units
            .iter()
            .map(|e| self.basis.iter().map(|b| e.commutator(b)).collect())
            .collect();
        let gram = Matrix::from_fn(dim, dim, |i, j| {
            images[i]
                .iter()
                .zip(&images[j])
                .fold(cre(T::zero()), |acc, (a, b)| acc + a.inner(b))
        });
        let out = gram.jacobi_eigh(tol.jacobi_off_tol, tol.max_sweeps);
        let top = out
            .values
            .last()
            .copied()
            .unwrap_or_else(T::zero)
            .max(T::one());
        let kernel: Vec<AlgebraElement<T>> = out
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v <= tol.cluster_tol * top)
            .map(|(j, _)| AlgebraElement::unflatten(sig, &out.vectors.column(j)))
            .collect();
        Self::span(sig, &kernel, tol)
    }

    /// Projections of a commutative subalgebra: every sum of atoms when there
    /// are at most ten atoms, otherwise the atoms and their complements.
    pub fn projections(&self, tol: &ToleranceConfig<T>) -> Result<Vec<Projection<T>>> {
        let atoms = self.atoms(tol)?;
        Ok(enumerate_projections(&self.signature, &atoms))
    }
}

fn enumerate_projections<T: Real>(sig: &Signature, atoms: &[Projection<T>]) -> Vec<Projection<T>> {
    let r = atoms.len();
    if r <= MAX_ENUMERATED_ATOMS {
        let mut sums: Vec<AlgebraElement<T>> = Vec::with_capacity(1 << r);
        sums.push(AlgebraElement::zero(sig));
        for mask in 1usize..(1 << r) {
            let low = mask.trailing_zeros() as usize;
            let s = &sums[mask & (mask - 1)] + atoms[low].element();
            sums.push(s);
        }
        sums.into_iter()
            .map(Projection::from_element_unchecked)
            .collect()
    } else {
        let mut out = vec![Projection::zero(sig), Projection::identity(sig)];
        for a in atoms {
            out.push(a.clone());
            out.push(a.complement());
        }
        out
    }
}

fn ensure_commuting_normal<T: Real>(
    gens: &[AlgebraElement<T>],
    tol: &ToleranceConfig<T>,
) -> Result<()> {
    for g in gens {
        if !is_normal(g, tol) {
            return Err(AlgebraError::NotNormal {
                residual: normality_residual(g).to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            a.ensure_same_signature(b)?;
            let r = a.commutator(b).frobenius_norm();
            if r > tol.slack(operator_norm(a) * operator_norm(b)) {
                return Err(AlgebraError::NotCommuting {
                    residual: r.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    Ok(())
}

/// Maximal commutative subalgebra containing commuting normal `seeds`.
///
/// The joint eigenspaces of the seeds are refined by a random orthonormal
/// basis drawn from `refinement_seed`; the result is the diagonal algebra of
/// rank-one projections in that basis.
pub fn generate_masa<T: Real>(
    seeds: &[AlgebraElement<T>],
    refinement_seed: u64,
    tol: &ToleranceConfig<T>,
) -> Result<Subalgebra<T>> {
    let sig = seeds
        .first()
        .ok_or_else(|| AlgebraError::Malformed("at least one seed element is required".into()))?
        .signature();
    ensure_commuting_normal(seeds, tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(refinement_seed);
    let mut rank_one = Vec::with_capacity(sig.total_dim());
    for space in joint_eigenspaces(&sig, seeds, tol) {
        for (k, v) in &space.pieces {
            let w = Matrix::random_unitary(v.cols(), &mut rng);
            let refined = v.matmul(&w);
            for j in 0..refined.cols() {
                let col = refined.select_columns(&[j]);
                let mut blocks: Vec<Matrix<T>> =
                    sig.sizes().iter().map(|&n| Matrix::zeros(n, n)).collect();
                blocks[*k] = col.matmul(&col.adjoint());
                rank_one.push(AlgebraElement::from_blocks_unchecked(blocks));
            }
        }
    }
    let mut d = Subalgebra::span(&sig, &rank_one, tol)?;
    d.refinement_seed = Some(refinement_seed);
    Ok(d)
}

fn ensure_contained<T: Real>(
    b: &Subalgebra<T>,
    d: &Subalgebra<T>,
    tol: &ToleranceConfig<T>,
) -> Result<()> {
    if b.signature != d.signature {
        return Err(AlgebraError::SignatureMismatch {
            left: b.signature.sizes().to_vec(),
            right: d.signature.sizes().to_vec(),
        });
    }
    let r = b.containment_residual(d);
    if r > tol.slack(T::one()) {
        return Err(AlgebraError::NotContained {
            residual: r.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Supremum inside the ambient algebra of `{x ∈ B⁺ : ||x|| ≤ 1, x ≤ p}`.
///
/// An element `Σ c_j e_j` of `B⁺` (with `e_j` the atoms of `B`) lies below
/// `p` exactly when every atom carrying a positive coefficient is below `p`,
/// so the set is the face spanned by those atoms; it is closed under
/// products and its supremum is the range projection of their sum.
fn face_supremum<T: Real>(
    b_atoms: &[Projection<T>],
    p: &Projection<T>,
    sig: &Signature,
    tol: &ToleranceConfig<T>,
) -> Result<Projection<T>> {
    let face: Vec<Projection<T>> = b_atoms
        .iter()
        .filter(|e| e.is_below(p, tol))
        .cloned()
        .collect();
    if face.is_empty() {
        Ok(Projection::zero(sig))
    } else {
        let ranges = face
            .iter()
            .map(|e| range_projection(e.element(), tol))
            .collect::<Result<Vec<_>>>()?;
        sup_projections(&ranges, tol)
    }
}

/// Monotone closure of the commutative subalgebra `b` inside the maximal
/// commutative subalgebra `d`.
///
/// Adjoins, for every projection `p` of `d`, the supremum of the part of the
/// unit ball of `B⁺` below `p`, and repeats until the algebra stops growing.
pub fn monotone_closure<T: Real>(
    b: &Subalgebra<T>,
    d: &Subalgebra<T>,
    tol: &ToleranceConfig<T>,
) -> Result<Subalgebra<T>> {
    ensure_contained(b, d, tol)?;
    let sig = b.signature.clone();
    let d_projections = d.projections(tol)?;
    let mut current = b.clone();
    loop {
        let atoms = current.atoms(tol)?;
        let mut gens: Vec<AlgebraElement<T>> = atoms.iter().map(|a| a.element().clone()).collect();
        for p in &d_projections {
            gens.push(face_supremum(&atoms, p, &sig, tol)?.into_element());
        }
        let next = Subalgebra::commutative_generated_by(&sig, &gens, tol)?;
        let stable =
            next.dim() == current.dim() && next.principal_angle_sine(&current) <= tol.cluster_tol;
        current = next;
        if stable {
            return Ok(current);
        }
    }
}

/// Pairing of the projections of two monotone closures of the same algebra.
#[derive(Debug, Clone)]
pub struct ClosureCorrespondence<T> {
    pub pairs: Vec<(Projection<T>, Projection<T>)>,
    signature: Signature,
    b_atoms: Vec<Projection<T>>,
}

impl<T: Real> ClosureCorrespondence<T> {
    /// Image of a projection of the first closure: the supremum, computed in
    /// the second maximal commutative subalgebra, of the part of `B⁺` below it.
    pub fn image(&self, p: &Projection<T>, tol: &ToleranceConfig<T>) -> Result<Projection<T>> {
        face_supremum(&self.b_atoms, p, &self.signature, tol)
    }

    /// `max ||p - p'||_F` over the pairs; zero when the correspondence is the
    /// identity.
    pub fn max_delta(&self) -> T {
        self.pairs
            .iter()
            .map(|(p, q)| (p.element() - q.element()).frobenius_norm())
            .fold(T::zero(), T::max)
    }

    /// Smallest distance between images of distinct projections.
    pub fn min_image_separation(&self) -> T {
        let mut best = T::infinity();
        for (i, (_, a)) in self.pairs.iter().enumerate() {
            for (_, b) in &self.pairs[i + 1..] {
                best = best.min((a.element() - b.element()).frobenius_norm());
            }
        }
        best
    }

    pub fn is_bijective(&self, tol: &ToleranceConfig<T>) -> bool {
        self.pairs.len() < 2 || self.min_image_separation() > tol.slack(T::one())
    }

    /// Worst lattice-homomorphism residual: products (meets), joins and
    /// complements of paired projections map to the corresponding operations
    /// on their images.
    pub fn lattice_residual(&self, tol: &ToleranceConfig<T>) -> Result<T> {
        let mut worst = T::zero();
        for (p1, q1) in &self.pairs {
            let comp = self.image(&p1.complement(), tol)?;
            worst = worst.max((comp.element() - q1.complement().element()).frobenius_norm());
            for (p2, q2) in &self.pairs {
                let meet = self.image(&meet_commuting(p1, p2), tol)?;
                worst =
                    worst.max((meet.element() - meet_commuting(q1, q2).element()).frobenius_norm());
                let join = self.image(&join_commuting(p1, p2), tol)?;
                worst =
                    worst.max((join.element() - join_commuting(q1, q2).element()).frobenius_norm());
            }
        }
        Ok(worst)
    }

    /// Residual of `(p1 p2)' = p1' p2'` over all paired projections.
    pub fn product_residual(&self, tol: &ToleranceConfig<T>) -> Result<T> {
        let mut worst = T::zero();
        for (p1, q1) in &self.pairs {
            for (p2, q2) in &self.pairs {
                let img = self.image(&meet_commuting(p1, p2), tol)?;
                worst =
                    worst.max((img.element() - &(q1.element() * q2.element())).frobenius_norm());
            }
        }
        Ok(worst)
    }
}

/// Pairs each projection `p` of the closure of `b` in `d` with the supremum,
/// taken in `d2`, of `{x ∈ B⁺ : ||x|| ≤ 1, x ≤ p}`.
pub fn closure_correspondence<T: Real>(
    b: &Subalgebra<T>,
    d: &Subalgebra<T>,
    d2: &Subalgebra<T>,
    tol: &ToleranceConfig<T>,
) -> Result<ClosureCorrespondence<T>> {
    ensure_contained(b, d, tol)?;
    ensure_contained(b, d2, tol)?;
    let closure = monotone_closure(b, d, tol)?;
    let b_atoms = b.atoms(tol)?;
    let sig = b.signature.clone();
    let mut pairs = Vec::new();
    for p in closure.projections(tol)? {
        let image = face_supremum(&b_atoms, &p, &sig, tol)?;
        let r = d2.membership_residual(image.element());
        if r > tol.slack(T::one()) {
            return Err(AlgebraError::NotContained {
                residual: r.to_f64().unwrap_or(f64::NAN),
            });
        }
        pairs.push((p, image));
    }
    Ok(ClosureCorrespondence {
        pairs,
        signature: sig,
        b_atoms,
    })
}

/// Projection-generation axiom: a commutative subalgebra equals the span of
/// its projections. Returns the principal-angle sine between the two.
pub fn projection_generation_residual<T: Real>(
    d: &Subalgebra<T>,
    tol: &ToleranceConfig<T>,
) -> Result<T> {
    let atoms: Vec<AlgebraElement<T>> = d
        .atoms(tol)?
        .into_iter()
        .map(Projection::into_element)
        .collect();
    let spanned = Subalgebra::span(d.signature(), &atoms, tol)?;
    Ok(spanned.principal_angle_sine(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> ToleranceConfig<f64> {
        ToleranceConfig::default()
    }

    fn proj(x: AlgebraElement<f64>) -> Projection<f64> {
        Projection::new(x, &tol()).unwrap()
    }

    fn el(rows: &[&[f64]]) -> AlgebraElement<f64> {
        AlgebraElement::from_real_rows(rows).unwrap()
    }

    #[test]
    fn sup_examples() {
        let t = tol();
        let s = sup_projections(
            &[
                proj(AlgebraElement::diag_real(&[1.0, 0.0, 0.0])),
                proj(AlgebraElement::diag_real(&[0.0, 1.0, 0.0])),
            ],
            &t,
        )
        .unwrap();
        assert!(
            s.element()
                .max_abs_diff(&AlgebraElement::diag_real(&[1.0, 1.0, 0.0]))
                < 1e-15
        );

        let p = proj(el(&[&[0.5, 0.5], &[0.5, 0.5]]));
        assert!(
            sup_projections(std::slice::from_ref(&p), &t)
                .unwrap()
                .element()
                .max_abs_diff(p.element())
                < 1e-14
        );

        let s = sup_projections(&[proj(AlgebraElement::diag_real(&[1.0, 0.0])), p], &t).unwrap();
        assert!(
            s.element()
                .max_abs_diff(&AlgebraElement::diag_real(&[1.0, 1.0]))
                < 1e-14
        );
        assert!(sup_projections::<f64>(&[], &t).is_err());
    }

    #[test]
    fn annihilator_examples() {
        let t = tol();
        let q = max_annihilator(&[AlgebraElement::diag_real(&[1.0, 0.0, 0.0])], &t).unwrap();
        assert!(
            q.element()
                .max_abs_diff(&AlgebraElement::diag_real(&[0.0, 1.0, 1.0]))
                < 1e-15
        );
        let sig = Signature::new(vec![3]).unwrap();
        let q = max_annihilator(&[AlgebraElement::<f64>::identity(&sig)], &t).unwrap();
        assert!(q.element().frobenius_norm() < 1e-15);
        let q = max_annihilator(&[el(&[&[1.0, 1.0], &[1.0, 1.0]])], &t).unwrap();
        assert!(q.element().max_abs_diff(&el(&[&[0.5, -0.5], &[-0.5, 0.5]])) < 1e-14);
        assert!(matches!(
            max_annihilator(&[AlgebraElement::diag_real(&[1.0, -1.0])], &t),
            Err(AlgebraError::NotPositive { .. })
        ));
    }

    #[test]
    fn masa_of_unit_in_m2() {
        let t = tol();
        let sig = Signature::new(vec![2]).unwrap();
        let d = generate_masa(&[AlgebraElement::<f64>::identity(&sig)], 0, &t).unwrap();
        assert_eq!(d.dim(), 2);
        assert_eq!(d.refinement_seed(), Some(0));
        assert!(d.is_commutative(&t));
    }

    #[test]
    fn masa_contains_seed_and_is_its_own_commutant() {
        let t = tol();
        let a = AlgebraElement::<f64>::diag_real(&[1.0, 1.0, 2.0]);
        let d = generate_masa(std::slice::from_ref(&a), 9, &t).unwrap();
        assert_eq!(d.dim(), 3);
        assert!(d.contains(&a, &t));
        let comm = d.relative_commutant(&t).unwrap();
        assert_eq!(comm.dim(), 3);
        assert!(comm.principal_angle_sine(&d) < 1e-8);
    }

    #[test]
    fn masa_rejects_non_commuting_and_non_normal() {
        let t = tol();
        let x = el(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let z = AlgebraElement::diag_real(&[1.0, -1.0]);
        assert!(matches!(
            generate_masa(&[x, z], 0, &t),
            Err(AlgebraError::NotCommuting { .. })
        ));
        assert!(matches!(
            generate_masa(&[el(&[&[0.0, 1.0], &[0.0, 0.0]])], 0, &t),
            Err(AlgebraError::NotNormal { .. })
        ));
    }

    #[test]
    fn closure_of_closed_algebra_is_itself() {
        let t = tol();
        let a = AlgebraElement::<f64>::diag_real(&[1.0, 1.0, 2.0]);
        let sig = a.signature();
        let b = Subalgebra::generated_by(&sig, std::slice::from_ref(&a), &t).unwrap();
        assert_eq!(b.dim(), 2);
        let d = Subalgebra::span(
            &sig,
            &[
                AlgebraElement::diag_real(&[1.0, 0.0, 0.0]),
                AlgebraElement::diag_real(&[0.0, 1.0, 0.0]),
                AlgebraElement::diag_real(&[0.0, 0.0, 1.0]),
            ],
            &t,
        )
        .unwrap();
        let closure = monotone_closure(&b, &d, &t).unwrap();
        assert_eq!(closure.dim(), 2);
        assert!(closure.principal_angle_sine(&b) < 1e-8);

        let dd = monotone_closure(&d, &d, &t).unwrap();
        assert!(dd.principal_angle_sine(&d) < 1e-8);

        let scalars = Subalgebra::generated_by(&sig, &[], &t).unwrap();
        let sc = monotone_closure(&scalars, &d, &t).unwrap();
        assert_eq!(sc.dim(), 1);
    }

    #[test]
    fn closure_requires_containment() {
        let t = tol();
        let sig = Signature::new(vec![2]).unwrap();
        let b = Subalgebra::generated_by(&sig, &[el(&[&[0.0, 1.0], &[1.0, 0.0]])], &t).unwrap();
        let d = generate_masa(&[AlgebraElement::diag_real(&[1.0, 2.0])], 0, &t).unwrap();
        assert!(matches!(
            monotone_closure(&b, &d, &t),
            Err(AlgebraError::NotContained { .. })
        ));
    }

    #[test]
    fn correspondence_across_rotated_masas() {
        let t = tol();
        let a = AlgebraElement::<f64>::diag_real(&[1.0, 1.0, 2.0]);
        let sig = a.signature();
        let b = Subalgebra::generated_by(&sig, std::slice::from_ref(&a), &t).unwrap();
        let std = |i: usize| {
            let mut v = [0.0; 3];
            v[i] = 1.0;
            AlgebraElement::diag_real(&v)
        };
        let d = Subalgebra::span(&sig, &[std(0), std(1), std(2)], &t).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = el(&[&[s, -s, 0.0], &[s, s, 0.0], &[0.0, 0.0, 1.0]]);
        let rotated: Vec<_> = (0..3).map(|i| &(&r * &std(i)) * &r.adjoint()).collect();
        let d2 = Subalgebra::span(&sig, &rotated, &t).unwrap();
        assert!(d.principal_angle_sine(&d2) > 0.1);

        let corr = closure_correspondence(&b, &d, &d2, &t).unwrap();
        assert_eq!(corr.pairs.len(), 4);
        assert!(corr.max_delta() < 1e-10);
        let target = proj(AlgebraElement::diag_real(&[1.0, 1.0, 0.0]));
        let img = corr.image(&target, &t).unwrap();
        assert!(img.element().max_abs_diff(target.element()) < 1e-12);
        assert!(corr.is_bijective(&t));
        assert!(corr.product_residual(&t).unwrap() < 1e-10);
        assert!(corr.lattice_residual(&t).unwrap() < 1e-10);
    }

    #[test]
    fn orthogonal_family_axiom() {
        let t = tol();
        let p1 = proj(AlgebraElement::diag_real(&[1.0, 0.0, 0.0]));
        let p2 = proj(AlgebraElement::diag_real(&[0.0, 1.0, 0.0]));
        let cands = vec![
            proj(AlgebraElement::diag_real(&[1.0, 1.0, 1.0])),
            proj(AlgebraElement::diag_real(&[1.0, 1.0, 0.0])),
            proj(AlgebraElement::diag_real(&[1.0, 0.0, 1.0])),
        ];
        assert!(orthogonal_family_has_least_upper_bound(&[p1.clone(), p2], &cands, &t).unwrap());
        let overlapping = proj(el(&[&[0.5, 0.5, 0.0], &[0.5, 0.5, 0.0], &[0.0, 0.0, 0.0]]));
        assert!(!orthogonal_family_has_least_upper_bound(&[p1, overlapping], &cands, &t).unwrap());
    }

    #[test]
    fn masa_is_generated_by_projections() {
        let t = tol();
        let sig = Signature::new(vec![2, 3]).unwrap();
        let d = generate_masa(&[AlgebraElement::<f64>::identity(&sig)], 4, &t).unwrap();
        assert!(projection_generation_residual(&d, &t).unwrap() < 1e-8);
    }
}
