//! Polar decomposition `x = |x*|·u = u·|x|` by the regularized sequence
//! `u_n = x(1/n + |x|)^{-1}` and by a direct singular-value oracle, together
//! with the spectral cut and the inequality that drives the convergence proof.

use crate::algebra::{
    eigh_hermitian, operator_norm, projection_residual, rank_threshold, Projection,
};
use crate::element::AlgebraElement;
use crate::error::{AlgebraError, Result};
use crate::matrix::{Matrix, SvdOutcome};
use crate::order::{build_certificate_indexed, OrderLimitCertificate};
use crate::scalar::{cre, Real};
use crate::spectral::{integrate, measure_of, spectral_measure, BorelSubset, SpectralFunction};
use crate::tolerance::ToleranceConfig;

use num_complex::Complex;

/// Default top of the index ladder, `2^20`.
pub const DEFAULT_N_MAX: u64 = 1 << 20;

/// Blockwise singular value decomposition of an element, the common source of
/// `|x|`, `|x*|`, their range projections and the partial isometry.
#[derive(Debug, Clone)]
pub struct Modulus<T> {
    blocks: Vec<SvdOutcome<T>>,
    cut: T,
}

impl<T: Real> Modulus<T> {
    pub fn of(x: &AlgebraElement<T>, tol: &ToleranceConfig<T>) -> Result<Self> {
        let mut blocks = Vec::with_capacity(x.blocks().len());
        for b in x.blocks() {
            let out = b.jacobi_svd(tol.jacobi_off_tol, tol.max_sweeps);
            if !out.converged {
                return Err(AlgebraError::NonConvergence {
                    sweeps: out.sweeps,
                    off: f64::NAN,
                });
            }
            blocks.push(out);
        }
        let top = blocks
            .iter()
            .filter_map(|b| b.sigma.first().copied())
            .fold(T::zero(), T::max);
        Ok(Self {
            blocks,
            cut: rank_threshold(top, tol),
        })
    }

    /// `||x||`.
    pub fn norm(&self) -> T {
        self.blocks
            .iter()
            .filter_map(|b| b.sigma.first().copied())
            .fold(T::zero(), T::max)
    }

    /// Singular values at or below this count as zero.
    pub fn cut(&self) -> T {
        self.cut
    }

    pub fn singular_values(&self) -> Vec<T> {
        let mut v: Vec<T> = self
            .blocks
            .iter()
            .flat_map(|b| b.sigma.iter().copied())
            .collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        v
    }

    /// Smallest singular value above the cut.
    pub fn sigma_min_nonzero(&self) -> Option<T> {
        self.blocks
            .iter()
            .flat_map(|b| b.sigma.iter().copied())
            .filter(|&s| s > self.cut)
            .reduce(T::min)
    }

    pub fn is_invertible(&self) -> bool {
        self.blocks
            .iter()
            .flat_map(|b| b.sigma.iter())
            .all(|&s| s > self.cut)
    }

    fn assemble(&self, f: impl Fn(&SvdOutcome<T>, usize, usize) -> Matrix<T>) -> AlgebraElement<T> {
        AlgebraElement::from_blocks_unchecked(
            self.blocks
                .iter()
                .map(|b| {
                    let n = b.sigma.len();
                    f(b, n, n)
                })
                .collect(),
        )
    }

    /// `g(|x|) = V g(Σ) V*`.
    pub fn right_fn(&self, g: impl Fn(T) -> T) -> AlgebraElement<T> {
        self.assemble(|b, n, _| {
            let scaled = Matrix::from_fn(n, n, |i, j| b.right[(i, j)].scale(g(b.sigma[j])));
            scaled.matmul(&b.right.adjoint())
        })
    }

    /// `g(|x*|) = U g(Σ) U*` for `g(0) = 0`; left vectors of exactly zero
    /// singular values are not tracked.
    pub fn left_fn(&self, g: impl Fn(T) -> T) -> AlgebraElement<T> {
        self.assemble(|b, n, _| {
            let scaled = Matrix::from_fn(n, n, |i, j| b.left[(i, j)].scale(g(b.sigma[j])));
            scaled.matmul(&b.left.adjoint())
        })
    }

    fn indicator(&self) -> impl Fn(T) -> T {
        let cut = self.cut;
        move |s| if s > cut { T::one() } else { T::zero() }
    }

    /// `|x| = (x*x)^{1/2}`.
    pub fn abs(&self) -> AlgebraElement<T> {
        self.right_fn(|s| s)
    }

    /// `|x*| = (xx*)^{1/2}`.
    pub fn abs_adjoint(&self) -> AlgebraElement<T> {
        self.left_fn(|s| s)
    }

    /// `rp(|x|)`.
    pub fn source_projection(&self) -> Projection<T> {
        Projection::from_element_unchecked(self.right_fn(self.indicator()))
    }

    /// `rp(|x*|)`.
    pub fn target_projection(&self) -> Projection<T> {
        Projection::from_element_unchecked(self.left_fn(self.indicator()))
    }

    /// `Σ_{σ > cut} u_j v_j*`.
    pub fn partial_isometry(&self) -> AlgebraElement<T> {
        let cut = self.cut;
        self.assemble(|b, n, _| {
            let kept = Matrix::from_fn(n, n, |i, j| {
                if b.sigma[j] > cut {
                    b.left[(i, j)]
                } else {
                    cre(T::zero())
                }
            });
            kept.matmul(&b.right.adjoint())
        })
    }
}

/// Polar decomposition with the data of the route that produced it.
#[derive(Debug, Clone)]
pub struct PolarResult<T> {
    pub u: AlgebraElement<T>,
    pub absx: AlgebraElement<T>,
    pub absxstar: AlgebraElement<T>,
    /// `(n, ||u_n - u||)` along the index ladder; empty for the direct route.
    pub diagnostics: Vec<(u64, T)>,
    /// The regularized terms `u_n`, aligned with `diagnostics`.
    pub ladder: Vec<AlgebraElement<T>>,
    /// `||u_N - u||` for the last computed term, i.e. the size of the final
    /// snap onto the partial isometries.
    pub snap_correction: Option<T>,
    /// Smallest nonzero singular value of `x`.
    pub sigma_min: Option<T>,
}

impl<T: Real> PolarResult<T> {
    /// Order-convergence witness for `u_n → u` with tail rate `1/σ_min`.
    pub fn certificate(&self, tol: &ToleranceConfig<T>) -> Result<OrderLimitCertificate<T>> {
        let indices: Vec<u64> = self.diagnostics.iter().map(|d| d.0).collect();
        let rate = self.sigma_min.map_or(T::zero(), T::recip);
        build_certificate_indexed(&indices, &self.ladder, &self.u, rate, tol)
    }
}

/// `u = x·|x|⁺` computed from the singular value decomposition of `x`.
pub fn polar_direct<T: Real>(
    x: &AlgebraElement<T>,
    tol: &ToleranceConfig<T>,
) -> Result<PolarResult<T>> {
    let m = Modulus::of(x, tol)?;
    Ok(PolarResult {
        u: m.partial_isometry(),
        absx: m.abs(),
        absxstar: m.abs_adjoint(),
        diagnostics: Vec::new(),
        ladder: Vec::new(),
        snap_correction: None,
        sigma_min: m.sigma_min_nonzero(),
    })
}

/// Index ladder `1, 2, 4, …` capped by (and ending at) `n_max`.
pub fn index_ladder(n_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut n = 1u64;
    while n < n_max {
        out.push(n);
        n = n.saturating_mul(2);
    }
    out.push(n_max);
    out
}

/// `(1/n)/(1/n + σ)`: the distance `||u_n - u||` when `σ` is the smallest
/// nonzero singular value.
pub fn regularization_bound<T: Real>(n: u64, sigma_min: T) -> T {
    let h = T::from_u64(n).expect("index representable").recip();
    h / (h + sigma_min)
}

/// Polar decomposition through `u_n = x(1/n + |x|)^{-1}` along
/// [`index_ladder`], stopping early once consecutive terms agree within the
/// rank cutoff. The last term is snapped to the partial isometry of
/// `u_N·rp(|x|)`.
pub fn polar_regularized<T: Real>(
    x: &AlgebraElement<T>,
    n_max: u64,
    tol: &ToleranceConfig<T>,
) -> Result<PolarResult<T>> {
    if n_max == 0 {
        return Err(AlgebraError::Malformed("n_max must be at least 1".into()));
    }
    let m = Modulus::of(x, tol)?;
    let sigma_min = m.sigma_min_nonzero();
    let mut indices = Vec::new();
    let mut ladder: Vec<AlgebraElement<T>> = Vec::new();
    let mut last_gap = None;
    for n in index_ladder(n_max) {
        let h = T::from_u64(n).expect("index representable").recip();
        let un = x * &m.right_fn(|s| (h + s).recip());
        let gap = ladder.last().map(|prev| operator_norm(&(&un - prev)));
        indices.push(n);
        ladder.push(un);
        if let Some(g) = gap {
            last_gap = Some((indices[indices.len() - 2], g));
            if g < tol.rank_cutoff {
                break;
            }
        }
    }
    if let (Some((prev_n, gap)), Some(s)) = (last_gap, sigma_min) {
        let bound = regularization_bound(prev_n, s);
        if gap > bound + tol.cluster_tol {
            return Err(AlgebraError::SlowConvergence {
                n: *indices.last().expect("nonempty ladder"),
                gap: gap.to_f64().unwrap_or(f64::NAN),
                bound: bound.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let last = ladder.last().expect("nonempty ladder");
    let u = Modulus::of(&(last * m.source_projection().element()), tol)?.partial_isometry();
    let diagnostics: Vec<(u64, T)> = indices
        .iter()
        .zip(&ladder)
        .map(|(&n, un)| (n, operator_norm(&(un - &u))))
        .collect();
    Ok(PolarResult {
        snap_correction: diagnostics.last().map(|d| d.1),
        u,
        absx: m.abs(),
        absxstar: m.abs_adjoint(),
        diagnostics,
        ladder,
        sigma_min,
    })
}

/// Frobenius residuals of the polar-decomposition conditions for a candidate
/// `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarResiduals<T> {
    /// `||uu*u - u||`
    pub partial_isometry: T,
    /// `||x - |x*|u||`
    pub left: T,
    /// `||x - u|x|||`
    pub right: T,
    /// `||u*u - rp(|x|)||`
    pub source: T,
    /// `||uu* - rp(|x*|)||`
    pub target: T,
    /// Threshold applied to `left` and `right`.
    pub reconstruction_threshold: T,
    /// Threshold applied to the three projection conditions.
    pub projection_threshold: T,
}

impl<T: Real> PolarResiduals<T> {
    pub fn accepted(&self) -> bool {
        let pt = self.projection_threshold;
        let rt = self.reconstruction_threshold;
        self.partial_isometry <= pt
            && self.source <= pt
            && self.target <= pt
            && self.left <= rt
            && self.right <= rt
    }
}

pub fn polar_residuals<T: Real>(
    x: &AlgebraElement<T>,
    u: &AlgebraElement<T>,
    tol: &ToleranceConfig<T>,
) -> Result<PolarResiduals<T>> {
    x.ensure_same_signature(u)?;
    let m = Modulus::of(x, tol)?;
    let us = u.adjoint();
    let utu = &us * u;
    let uut = u * &us;
    Ok(PolarResiduals {
        partial_isometry: (&(&uut * u) - u).frobenius_norm(),
        left: (x - &(&m.abs_adjoint() * u)).frobenius_norm(),
        right: (x - &(u * &m.abs())).frobenius_norm(),
        source: (&utu - m.source_projection().element()).frobenius_norm(),
        target: (&uut - m.target_projection().element()).frobenius_norm(),
        reconstruction_threshold: tol.slack(m.norm()),
        projection_threshold: tol.slack(T::one()),
    })
}

/// Whether `u` is the polar partial isometry of `x`.
///
/// All five conditions are required: `x = |x*|u = u|x|` alone admits any
/// addition supported on the kernels, which `u*u = rp(|x|)` excludes.
pub fn verify_polar<T: Real>(
    x: &AlgebraElement<T>,
    u: &AlgebraElement<T>,
    tol: &ToleranceConfig<T>,
) -> Result<bool> {
    Ok(polar_residuals(x, u, tol)?.accepted())
}

/// Which construction [`spectral_cut`] used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutBranch {
    /// `|x*|` is a projection: `a = 1`, `p = xx*`.
    Projection,
    /// `|x*|` is invertible: `p = 1`, `a = (xx*)^{-1/2}`.
    Invertible,
    /// The spectrum of `|x*|` is cut at `mu`.
    Truncated,
}

impl CutBranch {
    pub fn name(self) -> &'static str {
        match self {
            CutBranch::Projection => "projection",
            CutBranch::Invertible => "invertible",
            CutBranch::Truncated => "truncated",
        }
    }
}

/// A nonzero projection `p` and positive `a` with `a|x*| = p`, all three
/// commuting.
#[derive(Debug, Clone)]
pub struct SpectralCut<T> {
    pub p: Projection<T>,
    pub a: AlgebraElement<T>,
    pub mu: Option<T>,
    pub branch: CutBranch,
}

/// Residuals of the spectral-cut identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutResiduals<T> {
    /// Largest of `||[a, p]||`, `||[a, |x*|]||`, `||[p, |x*|]||`.
    pub commutators: T,
    /// `||a|x*| - p||`
    pub product: T,
    /// `||(a·xx*·a)^{1/2} - p||`
    pub root: T,
}

impl<T: Real> CutResiduals<T> {
    pub fn max(&self) -> T {
        self.commutators.max(self.product).max(self.root)
    }
}

impl<T: Real> SpectralCut<T> {
    pub fn residuals(
        &self,
        x: &AlgebraElement<T>,
        tol: &ToleranceConfig<T>,
    ) -> Result<CutResiduals<T>> {
        x.ensure_same_signature(&self.a)?;
        let absxstar = Modulus::of(x, tol)?.abs_adjoint();
        let p = self.p.element();
        let commutators = self
            .a
            .commutator(p)
            .frobenius_norm()
            .max(self.a.commutator(&absxstar).frobenius_norm())
            .max(p.commutator(&absxstar).frobenius_norm());
        let xxs = x * &x.adjoint();
        let inner = (&(&self.a * &xxs) * &self.a).real_part();
        Ok(CutResiduals {
            commutators,
            product: (&(&self.a * &absxstar) - p).frobenius_norm(),
            root: (&sqrt_on_range(&inner, tol)? - p).frobenius_norm(),
        })
    }
}

/// Positive square root with eigenvalues at or below the rank threshold set
/// to zero, so that rounding noise on the kernel is not lifted to its square
/// root.
pub fn sqrt_on_range<T: Real>(
    h: &AlgebraElement<T>,
    tol: &ToleranceConfig<T>,
) -> Result<AlgebraElement<T>> {
    let sys = eigh_hermitian(h, tol)?;
    let radius = sys.spectral_radius();
    if sys.min_eigenvalue() < -tol.slack(radius) {
        return Err(AlgebraError::NotPositive {
            min_eigenvalue: sys.min_eigenvalue().to_f64().unwrap_or(f64::NAN),
        });
    }
    let cut = rank_threshold(radius, tol);
    Ok(sys.apply(|l| {
        if l > cut {
            cre(l.sqrt())
        } else {
            cre(T::zero())
        }
    }))
}

/// Spectral cut of `x ≠ 0`.
///
/// Without `mu` the projection and invertible cases are recognised first;
/// otherwise the cut defaults to half the smallest nonzero spectral point of
/// `|x*|`. An explicit `mu ∈ (0, ||x||)` always cuts: `p = 1 - m([0, mu])`
/// and `a = Σ_{λ > mu} λ^{-1} m({λ})`.
pub fn spectral_cut<T: Real>(
    x: &AlgebraElement<T>,
    mu: Option<T>,
    tol: &ToleranceConfig<T>,
) -> Result<SpectralCut<T>> {
    let m = Modulus::of(x, tol)?;
    let norm = m.norm();
    if norm <= tol.rank_cutoff {
        return Err(AlgebraError::ZeroElement);
    }
    let sig = x.signature();
    if let Some(mu) = mu {
        if !(mu > T::zero() && mu < norm) {
            return Err(AlgebraError::BadCut {
                mu: mu.to_f64().unwrap_or(f64::NAN),
                norm: norm.to_f64().unwrap_or(f64::NAN),
            });
        }
    } else {
        let xxs = x * &x.adjoint();
        if projection_residual(&xxs) <= tol.slack(T::one()) {
            return Ok(SpectralCut {
                p: Projection::from_element_unchecked(xxs),
                a: AlgebraElement::identity(&sig),
                mu: None,
                branch: CutBranch::Projection,
            });
        }
        if m.is_invertible() {
            return Ok(SpectralCut {
                p: Projection::identity(&sig),
                a: m.left_fn(T::recip),
                mu: None,
                branch: CutBranch::Invertible,
            });
        }
    }

    let measure = spectral_measure(&m.abs_adjoint(), tol)?;
    let spectrum = measure.spectrum();
    let mu = match mu {
        Some(mu) => mu,
        None => {
            let smallest = spectrum
                .values()
                .into_iter()
                .map(|z| z.re)
                .filter(|&v| v > m.cut())
                .reduce(T::min)
                .ok_or(AlgebraError::ZeroElement)?;
            smallest * T::lit(0.5)
        }
    };
    let below: Vec<Complex<T>> = spectrum
        .values()
        .into_iter()
        .filter(|z| z.re <= mu)
        .collect();
    let p = measure_of(&measure, &BorelSubset::new(below))?.complement();
    if p.is_zero(tol) {
        return Err(AlgebraError::BadCut {
            mu: mu.to_f64().unwrap_or(f64::NAN),
            norm: norm.to_f64().unwrap_or(f64::NAN),
        });
    }
    let inverse = SpectralFunction::from_fn(spectrum, |z| {
        if z.re > mu {
            cre(z.re.recip())
        } else {
            cre(T::zero())
        }
    });
    let a = integrate(&inverse, &measure)?;
    Ok(SpectralCut {
        p,
        a,
        mu: Some(mu),
        branch: CutBranch::Truncated,
    })
}

/// How far each side of the displayed inequality fails:
/// `0 ≤ S²` and `S² ≤ 2(xΔ²x* + Δx*xΔ)` with `S = xΔ + Δx*`,
/// `Δ = R_n - R_m`, `R_j = (1/j + |x|)^{-1}`. Each entry is
/// `max(0, -λ_min)` of the corresponding difference.
pub fn sequence_inequality_violations<T: Real>(
    x: &AlgebraElement<T>,
    n: u64,
    m: u64,
    tol: &ToleranceConfig<T>,
) -> Result<(T, T)> {
    if n == 0 || m == 0 {
        return Err(AlgebraError::Malformed("indices must be at least 1".into()));
    }
    let md = Modulus::of(x, tol)?;
    let resolvent = |j: u64| {
        let h = T::from_u64(j).expect("index representable").recip();
        md.right_fn(move |s| (h + s).recip())
    };
    let delta = &resolvent(n) - &resolvent(m);
    let xs = x.adjoint();
    let s = (&(x * &delta) + &(&delta * &xs)).real_part();
    let s2 = (&s * &s).real_part();
    let rhs = (&(&(&(x * &delta) * &delta) * &xs) + &(&(&(&delta * &xs) * x) * &delta))
        .scale_real(T::lit(2.0))
        .real_part();
    let lower = eigh_hermitian(&s2, tol)?.min_eigenvalue();
    let upper = eigh_hermitian(&(&rhs - &s2), tol)?.min_eigenvalue();
    Ok(((-lower).max(T::zero()), (-upper).max(T::zero())))
}

/// Both sides of the displayed inequality hold within `pos_slack`.
pub fn sequence_inequality_check<T: Real>(
    x: &AlgebraElement<T>,
    n: u64,
    m: u64,
    tol: &ToleranceConfig<T>,
) -> Result<bool> {
    let (lower, upper) = sequence_inequality_violations(x, n, m, tol)?;
    Ok(lower <= tol.pos_slack && upper <= tol.pos_slack)
}

/// For self-adjoint `x`, `|x|R_n` and `(|x| - x)R_n` are non-decreasing in
/// the Loewner order along `ladder`.
pub fn regularized_monotonicity_check<T: Real>(
    x: &AlgebraElement<T>,
    ladder: &[u64],
    tol: &ToleranceConfig<T>,
) -> Result<bool> {
    let residual = x.self_adjoint_residual();
    if residual > tol.slack(x.frobenius_norm()) {
        return Err(AlgebraError::NotSelfAdjoint {
            residual: residual.to_f64().unwrap_or(f64::NAN),
        });
    }
    let md = Modulus::of(x, tol)?;
    let abs = md.abs();
    let neg = &abs - x;
    let terms = |j: u64| {
        let h = T::from_u64(j).expect("index representable").recip();
        let r = md.right_fn(move |s| (h + s).recip());
        ((&abs * &r).real_part(), (&neg * &r).real_part())
    };
    let mut prev: Option<(AlgebraElement<T>, AlgebraElement<T>)> = None;
    for &n in ladder {
        let cur = terms(n);
        if let Some((pa, pb)) = &prev {
            if !crate::algebra::loewner_leq(pa, &cur.0, tol)?
                || !crate::algebra::loewner_leq(pb, &cur.1, tol)?
            {
                return Ok(false);
            }
        }
        prev = Some(cur);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Signature;
    use crate::order::verify_certificate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> ToleranceConfig<f64> {
        ToleranceConfig::default()
    }

    fn el(rows: &[&[f64]]) -> AlgebraElement<f64> {
        AlgebraElement::from_real_rows(rows).unwrap()
    }

    #[test]
    fn direct_nilpotent() {
        let x = el(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let r = polar_direct(&x, &tol()).unwrap();
        assert!(r.u.max_abs_diff(&x) < 1e-15);
        assert!(r.absx.max_abs_diff(&AlgebraElement::diag_real(&[0.0, 1.0])) < 1e-15);
        assert!(
            r.absxstar
                .max_abs_diff(&AlgebraElement::diag_real(&[1.0, 0.0]))
                < 1e-15
        );
    }

    #[test]
    fn direct_unitary_and_zero() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sig = Signature::new(vec![3, 2]).unwrap();
        let w = AlgebraElement::<f64>::random_unitary(&sig, &mut rng);
        let r = polar_direct(&w, &t).unwrap();
        assert!(r.u.max_abs_diff(&w) < 1e-13);
        assert!(r.absx.max_abs_diff(&AlgebraElement::identity(&sig)) < 1e-13);
        let z = polar_direct(&AlgebraElement::<f64>::zero(&sig), &t).unwrap();
        assert_eq!(z.u.frobenius_norm(), 0.0);
    }

    #[test]
    fn regularized_self_adjoint() {
        let x = AlgebraElement::<f64>::diag_real(&[1.0, -2.0]);
        let r = polar_regularized(&x, DEFAULT_N_MAX, &tol()).unwrap();
        assert!(r.u.max_abs_diff(&AlgebraElement::diag_real(&[1.0, -1.0])) < 1e-12);
        let u3 = &r.ladder[2];
        // n = 4: diag(1/(1/4+1), -2/(1/4+2))
        assert!(u3.max_abs_diff(&AlgebraElement::diag_real(&[0.8, -2.0 / 2.25])) < 1e-14);
    }

    #[test]
    fn regularized_projection_and_nilpotent() {
        let t = tol();
        let p = el(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(polar_regularized(&p, 1024, &t).unwrap().u.max_abs_diff(&p) < 1e-12);

        let x = el(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let r = polar_regularized(&x, DEFAULT_N_MAX, &t).unwrap();
        assert!(r.u.max_abs_diff(&x) < 1e-15);
        assert!(r.diagnostics.windows(2).all(|w| w[1].1 < w[0].1));
        for &(n, d) in &r.diagnostics {
            assert!((d - regularization_bound(n, 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn regularized_matches_direct_and_certifies() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sig = Signature::new(vec![1, 4, 3]).unwrap();
        let x = AlgebraElement::<f64>::random_gaussian(&sig, &mut rng);
        let d = polar_direct(&x, &t).unwrap();
        let r = polar_regularized(&x, DEFAULT_N_MAX, &t).unwrap();
        assert!((&r.u - &d.u).frobenius_norm() < 10.0 * t.rank_cutoff);
        let s = r.sigma_min.unwrap();
        for &(n, dist) in &r.diagnostics {
            assert!(dist <= regularization_bound(n, s) + 1e-9);
        }
        let cert = r.certificate(&t).unwrap();
        assert!(verify_certificate(&cert, &t).accepted);
    }

    #[test]
    fn verify_round_trip_and_tampering() {
        let t = tol();
        let x = AlgebraElement::<f64>::diag_real(&[2.0, 0.5, 0.0]);
        let u = polar_direct(&x, &t).unwrap().u;
        assert!(verify_polar(&x, &u, &t).unwrap());
        assert!(!verify_polar(&x, &-&u, &t).unwrap());
        let w = AlgebraElement::diag_real(&[0.0, 0.0, 0.1]);
        let tampered = &u + &w;
        let res = polar_residuals(&x, &tampered, &t).unwrap();
        assert!(res.left < 1e-15 && res.right < 1e-15);
        assert!(!res.accepted());
    }

    #[test]
    fn cut_truncated_example() {
        let t = tol();
        let x = AlgebraElement::<f64>::diag_real(&[2.0, 0.5, 0.0]);
        let cut = spectral_cut(&x, Some(1.0), &t).unwrap();
        assert_eq!(cut.branch, CutBranch::Truncated);
        assert!(
            cut.p
                .element()
                .max_abs_diff(&AlgebraElement::diag_real(&[1.0, 0.0, 0.0]))
                < 1e-12
        );
        assert!(
            cut.a
                .max_abs_diff(&AlgebraElement::diag_real(&[0.5, 0.0, 0.0]))
                < 1e-12
        );
        assert!(cut.residuals(&x, &t).unwrap().max() < 1e-12);

        let default = spectral_cut(&x, None, &t).unwrap();
        assert_eq!(default.branch, CutBranch::Truncated);
        assert!((default.mu.unwrap() - 0.25).abs() < 1e-12);
        assert!(
            default
                .p
                .element()
                .max_abs_diff(&AlgebraElement::diag_real(&[1.0, 1.0, 0.0]))
                < 1e-12
        );
    }

    #[test]
    fn cut_projection_and_invertible_branches() {
        let t = tol();
        let x = el(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let cut = spectral_cut(&x, None, &t).unwrap();
        assert_eq!(cut.branch, CutBranch::Projection);
        assert!(
            cut.p
                .element()
                .max_abs_diff(&AlgebraElement::diag_real(&[1.0, 0.0]))
                < 1e-15
        );
        assert!(cut.a.max_abs_diff(&AlgebraElement::diag_real(&[1.0, 1.0])) < 1e-15);

        let y = el(&[&[2.0, 1.0], &[0.0, 1.0]]);
        let cut = spectral_cut(&y, None, &t).unwrap();
        assert_eq!(cut.branch, CutBranch::Invertible);
        let yys = &y * &y.adjoint();
        let inv_sqrt = eigh_hermitian(&yys, &t)
            .unwrap()
            .apply(|l| cre(l.sqrt().recip()));
        assert!(cut.a.max_abs_diff(&inv_sqrt) < 1e-12);
        assert!(cut.residuals(&y, &t).unwrap().max() < 1e-12);
    }

    #[test]
    fn cut_errors() {
        let t = tol();
        let sig = Signature::new(vec![2]).unwrap();
        assert!(matches!(
            spectral_cut(&AlgebraElement::<f64>::zero(&sig), None, &t),
            Err(AlgebraError::ZeroElement)
        ));
        let x = AlgebraElement::<f64>::diag_real(&[2.0, 0.5]);
        assert!(matches!(
            spectral_cut(&x, Some(2.0), &t),
            Err(AlgebraError::BadCut { .. })
        ));
        assert!(matches!(
            spectral_cut(&x, Some(-1.0), &t),
            Err(AlgebraError::BadCut { .. })
        ));
    }

    #[test]
    fn sequence_inequality_examples() {
        let t = tol();
        let sig = Signature::new(vec![2]).unwrap();
        assert!(sequence_inequality_check(&AlgebraElement::<f64>::zero(&sig), 1, 2, &t).unwrap());
        let x = AlgebraElement::<f64>::diag_real(&[1.0, 2.0]);
        assert!(sequence_inequality_check(&x, 1, 3, &t).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let y =
            AlgebraElement::<f64>::random_gaussian(&Signature::new(vec![4, 2]).unwrap(), &mut rng);
        assert!(sequence_inequality_check(&y, 3, 40, &t).unwrap());
    }

    #[test]
    fn monotone_regularized_parts() {
        let t = tol();
        let x = el(&[&[1.0, 2.0, 0.0], &[2.0, -1.0, 0.5], &[0.0, 0.5, 0.0]]);
        assert!(regularized_monotonicity_check(&x, &index_ladder(1 << 10), &t).unwrap());
        let reversed: Vec<u64> = index_ladder(64).into_iter().rev().collect();
        assert!(!regularized_monotonicity_check(&x, &reversed, &t).unwrap());
    }

    #[test]
    fn direct_sum_is_bit_exact() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = AlgebraElement::<f64>::random_gaussian(&Signature::new(vec![3]).unwrap(), &mut rng);
        let b =
            AlgebraElement::<f64>::random_gaussian(&Signature::new(vec![2, 4]).unwrap(), &mut rng);
        let whole = polar_regularized(&a.direct_sum(&b), DEFAULT_N_MAX, &t).unwrap();
        let pa = polar_regularized(&a, DEFAULT_N_MAX, &t).unwrap();
        let pb = polar_regularized(&b, DEFAULT_N_MAX, &t).unwrap();
        assert_eq!(whole.u, pa.u.direct_sum(&pb.u));
        let whole = polar_direct(&a.direct_sum(&b), &t).unwrap();
        assert_eq!(
            whole.u,
            polar_direct(&a, &t)
                .unwrap()
                .u
                .direct_sum(&polar_direct(&b, &t).unwrap().u)
        );
    }
}
