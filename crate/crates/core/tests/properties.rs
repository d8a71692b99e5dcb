use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use awkit::lattice::{generate_masa, max_annihilator, sup_projections, Subalgebra};
use awkit::polar::{polar_direct, polar_regularized, spectral_cut, verify_polar, DEFAULT_N_MAX};
use awkit::spectral::{integrate, spectral_measure, SpectralFunction};
use awkit::{
    eigh_hermitian, loewner_leq, operator_norm, positive_sqrt, pseudo_inverse_on_range,
    range_projection, Element, Element32, Matrix, Signature, ToleranceConfig, Tolerances, C64,
};

fn signature() -> impl Strategy<Value = Signature> {
    prop::collection::vec(1usize..=5, 1..=3).prop_map(|s| Signature::new(s).unwrap())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sqrt_squares_back(sig in signature(), seed in any::<u64>()) {
        let t = Tolerances::default();
        let g = Element::random_gaussian(&sig, &mut rng(seed));
        let h = &g.adjoint() * &g;
        let r = positive_sqrt(&h, &t).unwrap();
        prop_assert!((&(&r * &r) - &h).frobenius_norm() <= 1e-10 * (1.0 + h.frobenius_norm()));
        prop_assert!(loewner_leq(&Element::zero(&sig), &r, &t).unwrap());
    }

    #[test]
    fn pseudo_inverse_is_moore_penrose(sig in signature(), seed in any::<u64>()) {
        let t = Tolerances::default();
        let g = Element::random_gaussian(&sig, &mut rng(seed));
        let h = (&g + &g.adjoint()).scale_real(0.5);
        let p = pseudo_inverse_on_range(&h, &t).unwrap();
        let rp = range_projection(&h, &t).unwrap();
        prop_assert!((&(&h * &p) - rp.element()).frobenius_norm() < 1e-8);
        prop_assert!((&(&(&p * &h) * &p) - &p).frobenius_norm() < 1e-8 * (1.0 + p.frobenius_norm()));
    }

    #[test]
    fn loewner_order_is_transitive_on_chains(sig in signature(), seed in any::<u64>()) {
        let t = Tolerances::default();
        let mut r = rng(seed);
        let a = Element::random_gaussian(&sig, &mut r);
        let b = Element::random_gaussian(&sig, &mut r);
        let x = (&a + &a.adjoint()).scale_real(0.5);
        let y = &x + &(&b.adjoint() * &b);
        let z = &y + &Element::identity(&sig);
        prop_assert!(loewner_leq(&x, &y, &t).unwrap());
        prop_assert!(loewner_leq(&y, &z, &t).unwrap());
        prop_assert!(loewner_leq(&x, &z, &t).unwrap());
        prop_assert!(!loewner_leq(&z, &x, &t).unwrap());
    }

    #[test]
    fn polar_routes_agree_and_verify(sig in signature(), seed in any::<u64>()) {
        let t = Tolerances::default();
        let x = Element::random_gaussian(&sig, &mut rng(seed));
        let d = polar_direct(&x, &t).unwrap();
        let r = polar_regularized(&x, DEFAULT_N_MAX, &t).unwrap();
        prop_assert!(verify_polar(&x, &d.u, &t).unwrap());
        prop_assert!(verify_polar(&x, &r.u, &t).unwrap());
        prop_assert!((&d.u - &r.u).frobenius_norm() <= 10.0 * t.rank_cutoff);
        // |x*| = u|x|u*
        let conj = &(&d.u * &d.absx) * &d.u.adjoint();
        prop_assert!((&conj - &d.absxstar).frobenius_norm() < 1e-10 * (1.0 + operator_norm(&x)));
    }

    #[test]
    fn polar_of_unitary_multiple(sig in signature(), seed in any::<u64>(), s in 0.1f64..5.0) {
        let t = Tolerances::default();
        let w = Element::random_unitary(&sig, &mut rng(seed));
        let d = polar_direct(&w.scale_real(s), &t).unwrap();
        prop_assert!(d.u.max_abs_diff(&w) < 1e-12);
        prop_assert!(d.absx.max_abs_diff(&Element::identity(&sig).scale_real(s)) < 1e-12 * s.max(1.0));
    }

    #[test]
    fn spectral_cut_identities(sig in signature(), seed in any::<u64>()) {
        let t = Tolerances::default();
        let x = Element::random_gaussian(&sig, &mut rng(seed));
        let cut = spectral_cut(&x, None, &t).unwrap();
        let res = cut.residuals(&x, &t).unwrap();
        prop_assert!(res.max() < 1e-9, "{res:?}");
        let norm = operator_norm(&x);
        let mu = 0.5 * norm;
        let cut = spectral_cut(&x, Some(mu), &t).unwrap();
        prop_assert!(!cut.p.is_zero(&t));
        prop_assert!(cut.residuals(&x, &t).unwrap().max() < 1e-9);
    }

    #[test]
    fn sup_and_annihilator_are_complementary(sig in signature(), seed in any::<u64>()) {
        let t = Tolerances::default();
        let mut r = rng(seed);
        let half = Element::new(
            sig.sizes()
                .iter()
                .map(|&n| Matrix::diagonal(&(0..n).map(|j| C64::new(if 2 * j < n { 1.0 } else { 0.0 }, 0.0)).collect::<Vec<_>>()))
                .collect(),
        )
        .unwrap();
        let a = &Element::random_gaussian(&sig, &mut r) * &half;
        let b = &Element::random_gaussian(&sig, &mut r) * &half;
        let pa = &a * &a.adjoint();
        let pb = &b * &b.adjoint();
        let s = sup_projections(&[range_projection(&pa, &t).unwrap(), range_projection(&pb, &t).unwrap()], &t).unwrap();
        let q = max_annihilator(&[pa, pb], &t).unwrap();
        prop_assert!((&(s.element() + q.element()) - &Element::identity(&sig)).frobenius_norm() < 1e-9);
    }

    #[test]
    fn masa_is_maximal(sig in signature(), seed in any::<u64>()) {
        let t = Tolerances::default();
        let d = generate_masa(&[Element::identity(&sig)], seed, &t).unwrap();
        prop_assert_eq!(d.dim(), sig.total_dim());
        let comm = d.relative_commutant(&t).unwrap();
        prop_assert!(comm.principal_angle_sine(&d) < 1e-8);
        prop_assert!(d.is_commutative(&t));
    }
}

/// The atoms of a normal element built as `U diag(λ) U*` are the projections
/// onto the eigenvector groups of the construction, and any other orthogonal
/// family integrating the identity to `a` coincides with them.
#[test]
fn spectral_measure_is_unique() {
    let t = Tolerances::default();
    let mut r = rng(17);
    let n = 5;
    let u = Matrix::<f64>::random_unitary(n, &mut r);
    let lambdas = [
        C64::new(1.0, 1.0),
        C64::new(1.0, 1.0),
        C64::new(-0.5, 0.0),
        C64::new(2.0, 0.0),
        C64::new(-0.5, 0.0),
    ];
    let a = Element::new(vec![u
        .matmul(&Matrix::diagonal(&lambdas))
        .matmul(&u.adjoint())])
    .unwrap();
    let m = spectral_measure(&a, &t).unwrap();
    assert_eq!(m.spectrum().len(), 3);
    for (point, atom) in m.spectrum().points.iter().zip(m.atoms()) {
        let cols: Vec<usize> = (0..n)
            .filter(|&j| (lambdas[j] - point.value).norm() < 1e-9)
            .collect();
        let v = u.select_columns(&cols);
        let oracle = Element::new(vec![v.matmul(&v.adjoint())]).unwrap();
        assert!(atom.element().max_abs_diff(&oracle) < 1e-12);
        assert_eq!(point.multiplicity, cols.len());
    }
    let back = integrate(&SpectralFunction::identity(m.spectrum()), &m).unwrap();
    assert!(back.max_abs_diff(&a) < 1e-12);
}

/// The same constructions run in single precision with looser tolerances.
#[test]
fn single_precision_polar() {
    let t = ToleranceConfig::<f32>::default();
    let sig = Signature::new(vec![3, 2]).unwrap();
    let x = Element32::random_gaussian(&sig, &mut rng(4));
    let d = polar_direct(&x, &t).unwrap();
    let err = (&x - &(&d.absxstar * &d.u)).frobenius_norm();
    assert!(err < 1e-4, "{err}");
    let r = polar_regularized(&x, 1 << 12, &t).unwrap();
    assert!((&r.u - &d.u).frobenius_norm() < 1e-3);
    let sys = eigh_hermitian(&d.absx, &t).unwrap();
    assert!(sys.min_eigenvalue() > 0.0);
}

#[test]
fn commutative_algebra_of_repeated_spectrum() {
    let t = Tolerances::default();
    let a = Element::diag_real(&[1.0, 1.0, 3.0, 3.0]);
    let b = Subalgebra::generated_by(&a.signature(), std::slice::from_ref(&a), &t).unwrap();
    assert_eq!(b.dim(), 2);
    assert_relative_eq!(
        b.membership_residual(&Element::diag_real(&[5.0, 5.0, -1.0, -1.0])),
        0.0,
        epsilon = 1e-12
    );
    assert!(b.membership_residual(&Element::diag_real(&[1.0, 0.0, 0.0, 0.0])) > 0.1);
}
