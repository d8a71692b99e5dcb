//! Spectral decomposition of normal elements.
//!
//! The spectrum is read off the joint eigenspaces of `h = Re a` and
//! `k = Im a`; the projection-valued measure assigns to each spectrum point
//! the projection onto its eigenspace. On a finite spectrum every subset is
//! Borel, open and closed at once, so the measure is determined by its atoms.

use num_complex::Complex;

use crate::algebra::{operator_norm, Projection};
use crate::element::{AlgebraElement, Signature};
use crate::error::{AlgebraError, Result};
use crate::joint::joint_eigenspaces;
use crate::order::{build_certificate, OrderLimitCertificate};
use crate::scalar::{cre, Real};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint<T> {
    pub value: Complex<T>,
    pub multiplicity: usize,
}

/// Clustered spectrum of a normal element.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub points: Vec<SpectrumPoint<T>>,
    /// Distance under which a query value is identified with a point.
    pub radius: T,
}

impl<T: Real> Spectrum<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> Vec<Complex<T>> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// Index of the point within `radius` of `z`, nearest first.
    pub fn locate(&self, z: Complex<T>) -> Option<usize> {
        self.points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, (p.value - z).norm()))
            .filter(|(_, d)| *d <= self.radius)
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
    }
}

/// Projection-valued measure on a finite spectrum, stored by its atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure<T> {
    spectrum: Spectrum<T>,
    atoms: Vec<Projection<T>>,
    signature: Signature,
}

impl<T: Real> SpectralMeasure<T> {
    /// Assembles a measure from explicit atoms, one per spectrum point.
    pub fn from_atoms(spectrum: Spectrum<T>, atoms: Vec<Projection<T>>) -> Result<Self> {
        let first = atoms
            .first()
            .ok_or_else(|| AlgebraError::Malformed("measure needs at least one atom".into()))?;
        if atoms.len() != spectrum.len() {
            return Err(AlgebraError::Malformed(format!(
                "{} atoms for {} spectrum points",
                atoms.len(),
                spectrum.len()
            )));
        }
        let signature = first.element().signature();
        for a in &atoms {
            a.element().ensure_same_signature(first.element())?;
        }
        Ok(Self {
            spectrum,
            atoms,
            signature,
        })
    }

    pub fn spectrum(&self) -> &Spectrum<T> {
        &self.spectrum
    }

    pub fn atoms(&self) -> &[Projection<T>] {
        &self.atoms
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// `m({λ})` for the point at `index`.
    pub fn atom(&self, index: usize) -> &Projection<T> {
        &self.atoms[index]
    }

    /// Worst residual over the measure axioms: idempotency, self-adjointness,
    /// pairwise orthogonality and completeness.
    pub fn axiom_residual(&self) -> T {
        let mut worst = T::zero();
        let mut total = AlgebraElement::zero(&self.signature);
        for (i, p) in self.atoms.iter().enumerate() {
            let e = p.element();
            worst = worst.max(crate::algebra::projection_residual(e));
            for q in &self.atoms[i + 1..] {
                worst = worst.max((e * q.element()).frobenius_norm());
            }
            total = &total + e;
        }
        worst.max((&total - &AlgebraElement::identity(&self.signature)).frobenius_norm())
    }
}

/// A subset of the spectrum, listed by its points.
#[derive(Debug, Clone, PartialEq)]
pub struct BorelSubset<T> {
    pub points: Vec<Complex<T>>,
}

impl<T: Real> BorelSubset<T> {
    pub fn new(points: Vec<Complex<T>>) -> Self {
        Self { points }
    }

    pub fn empty() -> Self {
        Self { points: Vec::new() }
    }

    pub fn full(spectrum: &Spectrum<T>) -> Self {
        Self::new(spectrum.values())
    }
}

/// A function on the spectrum, given by its value at each point.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction<T> {
    pub values: Vec<(Complex<T>, Complex<T>)>,
}

impl<T: Real> SpectralFunction<T> {
    pub fn from_fn(spectrum: &Spectrum<T>, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            values: spectrum
                .points
                .iter()
                .map(|p| (p.value, f(p.value)))
                .collect(),
        }
    }

    pub fn identity(spectrum: &Spectrum<T>) -> Self {
        Self::from_fn(spectrum, |z| z)
    }

    /// Indicator function of `subset` (points are matched within the
    /// spectrum radius).
    pub fn indicator(spectrum: &Spectrum<T>, subset: &BorelSubset<T>) -> Result<Self> {
        let mut inside = vec![false; spectrum.len()];
        for z in &subset.points {
            let i = spectrum
                .locate(*z)
                .ok_or_else(|| AlgebraError::UnknownPoint(format!("{z}")))?;
            inside[i] = true;
        }
        Ok(Self {
            values: spectrum
                .points
                .iter()
                .zip(inside)
                .map(|(p, b)| (p.value, if b { cre(T::one()) } else { cre(T::zero()) }))
                .collect(),
        })
    }

    fn value_at(&self, z: Complex<T>, radius: T) -> Option<Complex<T>> {
        self.values
            .iter()
            .map(|(p, v)| ((*p - z).norm(), *v))
            .filter(|(d, _)| *d <= radius)
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(_, v)| v)
    }
}

/// `||aa* - a*a|| ≤ pos_slack·(1 + ||a||²)`.
pub fn is_normal<T: Real>(a: &AlgebraElement<T>, tol: &ToleranceConfig<T>) -> bool {
    normality_residual(a) <= tol.slack(operator_norm(a).powi(2))
}

pub fn normality_residual<T: Real>(a: &AlgebraElement<T>) -> T {
    let adj = a.adjoint();
    a.commutator(&adj).frobenius_norm()
}

fn ensure_normal<T: Real>(a: &AlgebraElement<T>, tol: &ToleranceConfig<T>) -> Result<()> {
    if is_normal(a, tol) {
        Ok(())
    } else {
        Err(AlgebraError::NotNormal {
            residual: normality_residual(a).to_f64().unwrap_or(f64::NAN),
        })
    }
}

/// Spectrum of a normal element with multiplicities.
pub fn spectrum_of<T: Real>(
    a: &AlgebraElement<T>,
    tol: &ToleranceConfig<T>,
) -> Result<Spectrum<T>> {
    Ok(spectral_measure(a, tol)?.spectrum)
}

/// Projection-valued measure of a normal element: the atom at `λ` projects
/// onto the clustered joint eigenspace of `(Re a, Im a)` with value `λ`.
pub fn spectral_measure<T: Real>(
    a: &AlgebraElement<T>,
    tol: &ToleranceConfig<T>,
) -> Result<SpectralMeasure<T>> {
    ensure_normal(a, tol)?;
    let sig = a.signature();
    let spaces = joint_eigenspaces(&sig, std::slice::from_ref(a), tol);
    let radius = tol.cluster_tol * operator_norm(a).max(T::one());
    let points = spaces
        .iter()
        .map(|s| SpectrumPoint {
            value: s.values[0],
            multiplicity: s.dimension(),
        })
        .collect();
    let atoms = spaces
        .iter()
        .map(|s| Projection::from_element_unchecked(s.projection(&sig)))
        .collect();
    Ok(SpectralMeasure {
        spectrum: Spectrum { points, radius },
        atoms,
        signature: sig,
    })
}

/// `m(E)`: the sum of the atoms at the points of `E`.
pub fn measure_of<T: Real>(
    m: &SpectralMeasure<T>,
    subset: &BorelSubset<T>,
) -> Result<Projection<T>> {
    let mut inside = vec![false; m.spectrum.len()];
    for z in &subset.points {
        let i = m
            .spectrum
            .locate(*z)
            .ok_or_else(|| AlgebraError::UnknownPoint(format!("{z}")))?;
        inside[i] = true;
    }
    let mut acc = AlgebraElement::zero(&m.signature);
    for (atom, _) in m.atoms.iter().zip(&inside).filter(|(_, b)| **b) {
        acc = &acc + atom.element();
    }
    Ok(Projection::from_element_unchecked(acc))
}

/// `∫ f dm = Σ_λ f(λ)·m({λ})`.
pub fn integrate<T: Real>(
    f: &SpectralFunction<T>,
    m: &SpectralMeasure<T>,
) -> Result<AlgebraElement<T>> {
    let mut acc = AlgebraElement::zero(&m.signature);
    for (p, atom) in m.spectrum.points.iter().zip(&m.atoms) {
        let v = f
            .value_at(p.value, m.spectrum.radius)
            .ok_or_else(|| AlgebraError::IncompleteFunction(format!("{}", p.value)))?;
        acc = &acc + &atom.element().scale(v);
    }
    Ok(acc)
}

const MAX_REGULARITY_POINTS: usize = 12;

/// Quasi-regularity and regularity under the discrete topology, by full
/// subset enumeration.
///
/// For every subset `E` the Loewner infimum of `m(U)` over all supersets `U`
/// and the supremum of `m(K)` over all subsets `K` are computed and compared
/// with `m(E)`. Returns the worst deviation.
pub fn regularity_residual<T: Real>(m: &SpectralMeasure<T>) -> Result<T> {
    let r = m.spectrum.len();
    if r > MAX_REGULARITY_POINTS {
        return Err(AlgebraError::TooManyPoints(r));
    }
    let full = 1usize << r;
    let sig = &m.signature;
    let one = AlgebraElement::identity(sig);

    let mut value: Vec<AlgebraElement<T>> = Vec::with_capacity(full);
    value.push(AlgebraElement::zero(sig));
    for mask in 1..full {
        let low = mask.trailing_zeros() as usize;
        let v = &value[mask & (mask - 1)] + m.atoms[low].element();
        value.push(v);
    }

    // Meet over all supersets and join over all subsets, by zeta transforms
    // over one point at a time. Every m(U) enters each result exactly once,
    // so rounding grows with the number of factors rather than compounding
    // through the recursion. Meets of commuting projections are products,
    // joins are p + q - pq.
    let mut inf = value.clone();
    let mut sup = value.clone();
    for x in 0..r {
        let bit = 1usize << x;
        for mask in 0..full {
            if mask & bit == 0 {
                inf[mask] = &inf[mask] * &inf[mask | bit];
            } else {
                let down = &sup[mask & !bit];
                let acc = &sup[mask];
                sup[mask] = &(acc + down) - &(acc * down);
            }
        }
    }

    let mut worst = T::zero();
    for mask in 0..full {
        let inf_e = &inf[mask];
        worst = worst
            .max((inf_e - &value[mask]).frobenius_norm())
            .max((&sup[mask] - &value[mask]).frobenius_norm());
    }
    // m(X) = 1 and m(∅) = 0 anchor the enumeration
    worst = worst.max((&value[full - 1] - &one).frobenius_norm());
    Ok(worst)
}

/// `true` when both regularity identities hold within `pos_slack·2`. A
/// `false` here means the atoms are not a commuting orthogonal family.
pub fn check_regularity<T: Real>(m: &SpectralMeasure<T>, tol: &ToleranceConfig<T>) -> Result<bool> {
    let dim = T::from_usize_lossy(m.signature.total_dim());
    Ok(regularity_residual(m)? <= tol.slack(T::one()) * dim.max(T::one()))
}

/// Certificate that the partial sums `s_j = Σ_{first j points} f(λ)m({λ})`
/// converge in order to `∫ f dm`. The tail rate is `max_j j·||s_j - ∫ f dm||`.
pub fn order_convergent_integral<T: Real>(
    f: &SpectralFunction<T>,
    m: &SpectralMeasure<T>,
    ordering: &[Complex<T>],
    tol: &ToleranceConfig<T>,
) -> Result<OrderLimitCertificate<T>> {
    let r = m.spectrum.len();
    let mut seen = vec![false; r];
    let mut order = Vec::with_capacity(r);
    for z in ordering {
        match m.spectrum.locate(*z) {
            Some(i) if !seen[i] => {
                seen[i] = true;
                order.push(i);
            }
            _ => return Err(AlgebraError::IncompleteOrdering),
        }
    }
    if order.len() != r {
        return Err(AlgebraError::IncompleteOrdering);
    }
    let limit = integrate(f, m)?;
    let mut partial = AlgebraElement::zero(&m.signature);
    let mut seq = Vec::with_capacity(r);
    for &i in &order {
        let p = m.spectrum.points[i];
        let v = f
            .value_at(p.value, m.spectrum.radius)
            .ok_or_else(|| AlgebraError::IncompleteFunction(format!("{}", p.value)))?;
        partial = &partial + &m.atoms[i].element().scale(v);
        seq.push(partial.clone());
    }
    let rate = seq
        .iter()
        .enumerate()
        .map(|(j, s)| T::from_usize_lossy(j + 1) * operator_norm(&(s - &limit)))
        .fold(T::zero(), T::max);
    build_certificate(&seq, &limit, rate, tol)
}
