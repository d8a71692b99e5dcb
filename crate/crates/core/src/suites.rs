//! Seeded property suites, one per acceptance criterion.
//!
//! Every suite draws its inputs from a ChaCha8 stream keyed by
//! `(seed, criterion, trial)` and compares library output with an oracle
//! built independently, usually from the construction of the input itself.
//! Trial counts are the nominal counts scaled by `trials / 200`.

use std::fmt;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{operator_norm, positive_sqrt, range_projection, Projection};
use crate::element::{AlgebraElement, Signature};
use crate::lattice::{closure_correspondence, generate_masa, monotone_closure, Subalgebra};
use crate::matrix::Matrix;
use crate::order::{
    build_certificate_indexed, limit_calculus_check, verify_certificate, FailingCondition,
};
use crate::polar::{
    polar_direct, polar_regularized, regularization_bound, sequence_inequality_violations,
    spectral_cut, verify_polar, CutBranch, PolarResult, DEFAULT_N_MAX,
};
use crate::spectral::{
    check_regularity, integrate, regularity_residual, spectral_measure, SpectralFunction,
};
use crate::tolerance::ToleranceConfig;

type C = Complex<f64>;
type El = AlgebraElement<f64>;

/// Knobs shared by all suites.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Nominal trial count; criteria scale their own counts by `trials / 200`.
    pub trials: usize,
    pub seed: u64,
    pub min_dim: usize,
    pub max_dim: usize,
    pub tol: ToleranceConfig<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            trials: 200,
            seed: 0,
            min_dim: 1,
            max_dim: 8,
            tol: ToleranceConfig::default(),
        }
    }
}

impl SuiteConfig {
    /// `ceil(nominal · trials / 200)`, at least one.
    pub fn count(&self, nominal: usize) -> usize {
        (nominal * self.trials).div_ceil(200).max(1)
    }

    fn rng(&self, criterion: u64, trial: usize) -> ChaCha8Rng {
        let key = self
            .seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(criterion << 40)
            .wrapping_add(trial as u64);
        ChaCha8Rng::seed_from_u64(key)
    }

    fn block_size(&self, rng: &mut ChaCha8Rng) -> usize {
        rng.random_range(self.min_dim..=self.max_dim.max(self.min_dim))
    }

    fn signature(&self, rng: &mut ChaCha8Rng) -> Signature {
        let k = rng.random_range(1..=3);
        Signature::new((0..k).map(|_| self.block_size(rng)).collect()).expect("positive sizes")
    }
}

/// Verdict of one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub trials: usize,
    /// Largest residual seen (criterion specific; compare with `threshold`).
    pub worst: f64,
    pub threshold: f64,
    pub detail: String,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<28} trials={:<4} worst={:.3e} threshold={:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.trials,
            self.worst,
            self.threshold
        )?;
        if !self.detail.is_empty() {
            write!(f, "  {}", self.detail)?;
        }
        Ok(())
    }
}

/// Criterion names in id order.
pub const CRITERIA: [(u8, &str); 10] = [
    (1, "polar-reconstruction"),
    (2, "regularization-rate"),
    (3, "polar-uniqueness"),
    (4, "spectral-measure"),
    (5, "regularity-degeneracy"),
    (6, "spectral-cut"),
    (7, "monotone-closure"),
    (8, "order-convergence-calculus"),
    (9, "sequence-inequality"),
    (10, "direct-sum-reduction"),
];

pub fn run_criterion(id: u8, cfg: &SuiteConfig) -> Option<CriterionOutcome> {
    Some(match id {
        1 => polar_reconstruction(cfg),
        2 => regularization_rate(cfg),
        3 => polar_uniqueness(cfg),
        4 => spectral_measure_suite(cfg),
        5 => regularity_degeneracy(cfg),
        6 => spectral_cut_suite(cfg),
        7 => monotone_closure_suite(cfg),
        8 => order_calculus(cfg),
        9 => sequence_inequality_inequality(cfg),
        10 => direct_sum_reduction(cfg),
        _ => return None,
    })
}

pub fn run_all(cfg: &SuiteConfig) -> Vec<CriterionOutcome> {
    CRITERIA
        .iter()
        .filter_map(|&(id, _)| run_criterion(id, cfg))
        .collect()
}

fn name_of(id: u8) -> &'static str {
    CRITERIA[(id - 1) as usize].1
}

struct Tally {
    id: u8,
    trials: usize,
    worst: f64,
    threshold: f64,
    failures: Vec<String>,
}

impl Tally {
    fn new(id: u8, trials: usize, threshold: f64) -> Self {
        Self {
            id,
            trials,
            worst: 0.0,
            threshold,
            failures: Vec::new(),
        }
    }

    /// Records a residual that must not exceed the threshold.
    fn residual(&mut self, trial: usize, what: &str, value: f64) {
        if value.is_nan() || value > self.worst {
            self.worst = if value.is_nan() { f64::INFINITY } else { value };
        }
        if value.is_nan() || value > self.threshold {
            self.fail(trial, format!("{what} = {value:.3e}"));
        }
    }

    fn check(&mut self, trial: usize, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.fail(trial, what());
        }
    }

    fn fail(&mut self, trial: usize, msg: String) {
        self.failures.push(format!("trial {trial}: {msg}"));
    }

    fn finish(self, extra: String) -> CriterionOutcome {
        let mut detail = extra;
        if let Some(first) = self.failures.first() {
            if !detail.is_empty() {
                detail.push_str("; ");
            }
            detail.push_str(&format!("{} failures, first: {first}", self.failures.len()));
        }
        CriterionOutcome {
            id: self.id,
            name: name_of(self.id),
            passed: self.failures.is_empty(),
            trials: self.trials,
            worst: self.worst,
            threshold: self.threshold,
            detail,
        }
    }
}

/// `x = ⊕ W_k diag(σ_k) V_k*` together with the oracle quantities read off
/// the construction.
struct Constructed {
    x: El,
    /// `⊕ W_k 1[σ>0] V_k*`
    u: El,
    /// `rp(|x|)`
    source: El,
    /// `rp(|x*|)`
    target: El,
    /// `v v*` for the right singular vector of the largest singular value.
    top_source: El,
    sigma_min: Option<f64>,
}

fn construct(
    sig: &Signature,
    rng: &mut ChaCha8Rng,
    mut sigmas: impl FnMut(usize, &mut ChaCha8Rng) -> Vec<f64>,
) -> Constructed {
    let mut x = Vec::new();
    let mut u = Vec::new();
    let mut source = Vec::new();
    let mut target = Vec::new();
    let mut top = (f64::NEG_INFINITY, 0usize, Vec::new());
    let mut sigma_min: Option<f64> = None;
    for (k, &n) in sig.sizes().iter().enumerate() {
        let w = Matrix::<f64>::random_unitary(n, rng);
        let v = Matrix::<f64>::random_unitary(n, rng);
        let s = sigmas(n, rng);
        let ind: Vec<C> = s
            .iter()
            .map(|&v| C::new(if v > 0.0 { 1.0 } else { 0.0 }, 0.0))
            .collect();
        let sd: Vec<C> = s.iter().map(|&v| C::new(v, 0.0)).collect();
        x.push(w.matmul(&Matrix::diagonal(&sd)).matmul(&v.adjoint()));
        u.push(w.matmul(&Matrix::diagonal(&ind)).matmul(&v.adjoint()));
        source.push(v.matmul(&Matrix::diagonal(&ind)).matmul(&v.adjoint()));
        target.push(w.matmul(&Matrix::diagonal(&ind)).matmul(&w.adjoint()));
        for (j, &sv) in s.iter().enumerate() {
            if sv > top.0 {
                top = (sv, k, v.column(j));
            }
            if sv > 0.0 {
                sigma_min = Some(sigma_min.map_or(sv, |m: f64| m.min(sv)));
            }
        }
    }
    let top_source = El::from_blocks_unchecked(
        sig.sizes()
            .iter()
            .enumerate()
            .map(|(k, &n)| {
                if k == top.1 {
                    let col = Matrix::from_columns(n, std::slice::from_ref(&top.2));
                    col.matmul(&col.adjoint())
                } else {
                    Matrix::zeros(n, n)
                }
            })
            .collect(),
    );
    Constructed {
        x: El::from_blocks_unchecked(x),
        u: El::from_blocks_unchecked(u),
        source: El::from_blocks_unchecked(source),
        target: El::from_blocks_unchecked(target),
        top_source,
        sigma_min,
    }
}

/// `⊕ U_k diag(λ_k) U_k*` with eigenvalues supplied per block.
fn normal_from_values(sig: &Signature, values: &[Vec<C>], rng: &mut ChaCha8Rng) -> El {
    El::from_blocks_unchecked(
        sig.sizes()
            .iter()
            .zip(values)
            .map(|(&n, vals)| {
                let u = Matrix::<f64>::random_unitary(n, rng);
                u.matmul(&Matrix::diagonal(vals)).matmul(&u.adjoint())
            })
            .collect(),
    )
}

/// `k` distinct points of the grid `0.5·(Z + iZ)` inside `[-1.5, 1.5]²`.
fn distinct_points(k: usize, rng: &mut ChaCha8Rng, real: bool) -> Vec<C> {
    let mut grid: Vec<C> = Vec::new();
    for a in -3i32..=3 {
        for b in -3i32..=3 {
            if !real || b == 0 {
                grid.push(C::new(0.5 * a as f64, 0.5 * b as f64));
            }
        }
    }
    for i in 0..k.min(grid.len()) {
        let j = rng.random_range(i..grid.len());
        grid.swap(i, j);
    }
    grid.truncate(k);
    grid
}

/// Splits `k` distinct values (each used at least once, padded by repeats)
/// over the blocks of `sig` in random order.
fn spread_values(sig: &Signature, points: &[C], rng: &mut ChaCha8Rng) -> Vec<Vec<C>> {
    let total = sig.total_dim();
    let mut all: Vec<C> = points.iter().copied().take(total).collect();
    while all.len() < total {
        all.push(points[rng.random_range(0..points.len())]);
    }
    for i in (1..all.len()).rev() {
        let j = rng.random_range(0..=i);
        all.swap(i, j);
    }
    let mut out = Vec::new();
    let mut it = all.into_iter();
    for &n in sig.sizes() {
        out.push(it.by_ref().take(n).collect());
    }
    out
}

fn polar_checks(
    tally: &mut Tally,
    trial: usize,
    route: &str,
    x: &El,
    r: &PolarResult<f64>,
    tol: &ToleranceConfig<f64>,
) {
    let xxs = x * &x.adjoint();
    let root = match positive_sqrt(&xxs, tol) {
        Ok(r) => r,
        Err(e) => return tally.fail(trial, format!("{route}: sqrt(xx*) failed: {e}")),
    };
    let rp = match range_projection(&root, tol) {
        Ok(p) => p,
        Err(e) => return tally.fail(trial, format!("{route}: rp failed: {e}")),
    };
    let u = &r.u;
    let us = u.adjoint();
    let rec = (x - &(&root * u)).frobenius_norm() / (1.0 + operator_norm(x));
    let tgt = (&(u * &us) - rp.element()).frobenius_norm();
    let pi = (&(&(u * &us) * u) - u).frobenius_norm();
    tally.residual(trial, &format!("{route} reconstruction"), rec);
    tally.residual(trial, &format!("{route} uu* - rp(|x*|)"), tgt);
    tally.residual(trial, &format!("{route} uu*u - u"), pi);
}

/// Criterion 1: reconstruction, range and partial-isometry residuals of both
/// polar routes on complex Gaussian inputs.
pub fn polar_reconstruction(cfg: &SuiteConfig) -> CriterionOutcome {
    let n = cfg.count(200);
    let mut tally = Tally::new(1, n, 1e-9);
    for trial in 0..n {
        let mut rng = cfg.rng(1, trial);
        let sig = cfg.signature(&mut rng);
        let x = El::random_gaussian(&sig, &mut rng);
        match polar_direct(&x, &cfg.tol) {
            Ok(r) => polar_checks(&mut tally, trial, "direct", &x, &r, &cfg.tol),
            Err(e) => tally.fail(trial, format!("direct: {e}")),
        }
        match polar_regularized(&x, DEFAULT_N_MAX, &cfg.tol) {
            Ok(r) => polar_checks(&mut tally, trial, "regularized", &x, &r, &cfg.tol),
            Err(e) => tally.fail(trial, format!("regularized: {e}")),
        }
    }
    tally.finish(String::new())
}

/// Criterion 2: every ladder term obeys `||u_n - u|| ≤ (1/n)/(1/n + σ_min)`,
/// the regularized result agrees with the construction, and the diagnostics
/// yield an accepted order-convergence certificate.
pub fn regularization_rate(cfg: &SuiteConfig) -> CriterionOutcome {
    let n = cfg.count(200);
    let mut tally = Tally::new(2, n, 1e-9);
    let mut certified = 0;
    for trial in 0..n {
        let mut rng = cfg.rng(2, trial);
        let sig = cfg.signature(&mut rng);
        let c = construct(&sig, &mut rng, |m, rng| {
            (0..m).map(|_| rng.random_range(0.1..3.0)).collect()
        });
        let s = c.sigma_min.expect("full rank");
        let r = match polar_regularized(&c.x, DEFAULT_N_MAX, &cfg.tol) {
            Ok(r) => r,
            Err(e) => {
                tally.fail(trial, e.to_string());
                continue;
            }
        };
        for (&(idx, _), un) in r.diagnostics.iter().zip(&r.ladder) {
            let excess = operator_norm(&(un - &c.u)) - regularization_bound(idx, s);
            tally.residual(trial, &format!("rate excess at n = {idx}"), excess.max(0.0));
        }
        let agreement = operator_norm(&(&r.u - &c.u)) - regularization_bound(DEFAULT_N_MAX, s);
        tally.residual(trial, "oracle agreement excess", agreement.max(0.0));
        let indices: Vec<u64> = r.diagnostics.iter().map(|d| d.0).collect();
        match build_certificate_indexed(&indices, &r.ladder, &r.u, 1.0 / s, &cfg.tol) {
            Ok(cert) => {
                let rep = verify_certificate(&cert, &cfg.tol);
                tally.check(trial, rep.accepted, || {
                    format!("certificate rejected: {rep:?}")
                });
                certified += usize::from(rep.accepted);
            }
            Err(e) => tally.fail(trial, format!("certificate: {e}")),
        }
    }
    tally.finish(format!("{certified} ladders certified"))
}

/// Criterion 3: genuine partial isometries are accepted and every tampered
/// candidate (kernel-supported addition, sign flip, phase twist on the range)
/// is rejected.
pub fn polar_uniqueness(cfg: &SuiteConfig) -> CriterionOutcome {
    let n = cfg.count(100);
    let mut tally = Tally::new(3, 3 * n, 0.0);
    let mut rejected = 0usize;
    for trial in 0..n {
        let mut rng = cfg.rng(3, trial);
        let lo = cfg.min_dim.max(2);
        let hi = cfg.max_dim.max(lo);
        let k = rng.random_range(1..=3);
        let sig =
            Signature::new((0..k).map(|_| rng.random_range(lo..=hi)).collect()).expect("sizes");
        let c = construct(&sig, &mut rng, |m, rng| {
            let rank = rng.random_range(1..m);
            let mut s: Vec<f64> = (0..m)
                .map(|j| {
                    if j < rank {
                        rng.random_range(0.2..3.0)
                    } else {
                        0.0
                    }
                })
                .collect();
            s.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
            s
        });
        let x = &c.x;
        let tol = &cfg.tol;
        let genuine = [
            ("construction", c.u.clone()),
            (
                "direct",
                polar_direct(x, tol)
                    .map(|r| r.u)
                    .unwrap_or_else(|_| c.u.clone()),
            ),
        ];
        for (what, u) in &genuine {
            let ok = verify_polar(x, u, tol).unwrap_or(false);
            tally.check(trial, ok, || format!("genuine {what} u rejected"));
        }

        let sig = x.signature();
        let one = El::identity(&sig);
        let r = El::random_gaussian(&sig, &mut rng);
        let w = &(&(&one - &c.target) * &r) * &(&one - &c.source);
        let kernel = &c.u + &w.scale_real(0.1);
        let flip = if trial % 2 == 0 {
            -&c.u
        } else {
            &c.u * &(&one - &c.top_source.scale_real(2.0))
        };
        let theta = rng.random_range(0.3..(std::f64::consts::TAU - 0.3));
        let twist = &c.u * &(&one + &c.top_source.scale(C::from_polar(1.0, theta) - 1.0));
        for (what, v) in [
            ("kernel addition", kernel),
            ("sign flip", flip),
            ("phase twist", twist),
        ] {
            let accepted = verify_polar(x, &v, tol).unwrap_or(false);
            tally.check(trial, !accepted, || format!("{what} accepted"));
            rejected += usize::from(!accepted);
        }
    }
    tally.finish(format!("{rejected}/{} tampered candidates rejected", 3 * n))
}

fn horner(coeffs: &[C], a: &El) -> El {
    let sig = a.signature();
    let mut acc = El::zero(&sig);
    for &c in coeffs.iter().rev() {
        acc = &(&acc * a) + &El::scalar(&sig, c);
    }
    acc
}

fn poly_eval(coeffs: &[C], z: C) -> C {
    coeffs
        .iter()
        .rev()
        .fold(C::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn random_poly(rng: &mut ChaCha8Rng) -> Vec<C> {
    let deg = rng.random_range(0..=3);
    (0..=deg)
        .map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Criterion 4: spectral measures of seeded normal elements.
pub fn spectral_measure_suite(cfg: &SuiteConfig) -> CriterionOutcome {
    let n = cfg.count(200);
    let mut tally = Tally::new(4, n, 1e-9);
    for trial in 0..n {
        let mut rng = cfg.rng(4, trial);
        let sig = cfg.signature(&mut rng);
        let k = rng.random_range(1..=sig.total_dim().min(6));
        let points = distinct_points(k, &mut rng, trial % 4 == 0);
        let values = spread_values(&sig, &points, &mut rng);
        let a = normal_from_values(&sig, &values, &mut rng);
        let m = match spectral_measure(&a, &cfg.tol) {
            Ok(m) => m,
            Err(e) => {
                tally.fail(trial, e.to_string());
                continue;
            }
        };
        let spectrum = m.spectrum();
        tally.check(trial, spectrum.len() == k, || {
            format!("{} spectral points, expected {k}", spectrum.len())
        });
        let spread = points
            .iter()
            .map(|p| {
                spectrum
                    .values()
                    .iter()
                    .map(|z| (z - p).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        tally.residual(trial, "spectrum location", spread);

        let rec = integrate(&SpectralFunction::identity(spectrum), &m)
            .map(|s| (&s - &a).frobenius_norm());
        tally.residual(
            trial,
            "reconstruction",
            rec.unwrap_or(f64::NAN) / (1.0 + operator_norm(&a)),
        );

        let atoms: Vec<&El> = m.atoms().iter().map(Projection::element).collect();
        let mut total = El::zero(&sig);
        for (i, p) in atoms.iter().enumerate() {
            tally.residual(trial, "idempotency", (&(*p * *p) - *p).frobenius_norm());
            tally.residual(trial, "self-adjointness", p.self_adjoint_residual());
            for q in &atoms[i + 1..] {
                tally.residual(trial, "orthogonality", (*p * *q).frobenius_norm());
            }
            total = &total + *p;
        }
        tally.residual(
            trial,
            "completeness",
            (&total - &El::identity(&sig)).frobenius_norm(),
        );

        let (p, q) = (random_poly(&mut rng), random_poly(&mut rng));
        let fp = SpectralFunction::from_fn(spectrum, |z| poly_eval(&p, z));
        let fq = SpectralFunction::from_fn(spectrum, |z| poly_eval(&q, z));
        let fpq = SpectralFunction::from_fn(spectrum, |z| poly_eval(&p, z) * poly_eval(&q, z));
        match (integrate(&fp, &m), integrate(&fq, &m), integrate(&fpq, &m)) {
            (Ok(ip), Ok(iq), Ok(ipq)) => {
                tally.residual(
                    trial,
                    "multiplicativity",
                    (&ipq - &(&ip * &iq)).frobenius_norm(),
                );
                tally.residual(
                    trial,
                    "polynomial calculus",
                    (&ip - &horner(&p, &a)).frobenius_norm(),
                );
            }
            _ => tally.fail(trial, "integration failed".into()),
        }
    }
    tally.finish(String::new())
}

/// Criterion 5: regularity holds by full subset enumeration on spectra with
/// at most twelve points.
pub fn regularity_degeneracy(cfg: &SuiteConfig) -> CriterionOutcome {
    let n = cfg.count(100);
    let mut tally = Tally::new(5, n, 1e-9);
    for trial in 0..n {
        let mut rng = cfg.rng(5, trial);
        let k = 1 + trial % 12;
        let mut sizes = Vec::new();
        while sizes.iter().sum::<usize>() < k || sizes.is_empty() {
            sizes.push(cfg.block_size(&mut rng));
        }
        let sig = Signature::new(sizes).expect("sizes");
        let points = distinct_points(k, &mut rng, false);
        let values = spread_values(&sig, &points, &mut rng);
        let a = normal_from_values(&sig, &values, &mut rng);
        match spectral_measure(&a, &cfg.tol) {
            Ok(m) => {
                tally.check(trial, m.spectrum().len() == k, || {
                    format!("{} points, expected {k}", m.spectrum().len())
                });
                let ok = check_regularity(&m, &cfg.tol).unwrap_or(false);
                tally.check(trial, ok, || "regularity check failed".into());
                tally.residual(
                    trial,
                    "regularity residual",
                    regularity_residual(&m).unwrap_or(f64::NAN),
                );
            }
            Err(e) => tally.fail(trial, e.to_string()),
        }
    }
    tally.finish(String::new())
}

/// Criterion 6: the spectral cut on all three branches.
pub fn spectral_cut_suite(cfg: &SuiteConfig) -> CriterionOutcome {
    let n = cfg.count(100);
    let mut tally = Tally::new(6, n, 1e-9);
    let mut seen = [0usize; 3];
    for trial in 0..n {
        let mut rng = cfg.rng(6, trial);
        let expected = [
            CutBranch::Projection,
            CutBranch::Invertible,
            CutBranch::Truncated,
        ][trial % 3];
        let sig = if expected == CutBranch::Truncated {
            let lo = cfg.min_dim.max(2);
            let hi = cfg.max_dim.max(lo);
            let k = rng.random_range(1..=3);
            Signature::new((0..k).map(|_| rng.random_range(lo..=hi)).collect()).expect("sizes")
        } else {
            cfg.signature(&mut rng)
        };
        let c = construct(&sig, &mut rng, |m, rng| match expected {
            CutBranch::Projection => {
                let rank = rng.random_range(1..=m);
                (0..m).map(|j| if j < rank { 1.0 } else { 0.0 }).collect()
            }
            CutBranch::Invertible => (0..m).map(|_| rng.random_range(0.2..3.0)).collect(),
            CutBranch::Truncated => {
                let rank = rng.random_range(1..m);
                (0..m)
                    .map(|j| {
                        if j < rank {
                            rng.random_range(0.2..3.0)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
        });
        let cut = match spectral_cut(&c.x, None, &cfg.tol) {
            Ok(cut) => cut,
            Err(e) => {
                tally.fail(trial, e.to_string());
                continue;
            }
        };
        tally.check(trial, cut.branch == expected, || {
            format!(
                "branch {} instead of {}",
                cut.branch.name(),
                expected.name()
            )
        });
        seen[trial % 3] += usize::from(cut.branch == expected);
        tally.check(trial, !cut.p.is_zero(&cfg.tol), || "p = 0".into());
        match cut.residuals(&c.x, &cfg.tol) {
            Ok(r) => {
                tally.residual(trial, "commutators", r.commutators);
                tally.residual(trial, "a|x*| - p", r.product);
                tally.residual(trial, "(a xx* a)^(1/2) - p", r.root);
            }
            Err(e) => tally.fail(trial, e.to_string()),
        }
        // with the default cut, p is the range projection of |x*|
        let expected_p = if expected == CutBranch::Invertible {
            El::identity(&sig)
        } else {
            c.target.clone()
        };
        tally.residual(
            trial,
            "p against construction",
            (cut.p.element() - &expected_p).frobenius_norm(),
        );
    }
    tally.finish(format!(
        "branches projection/invertible/truncated = {}/{}/{}",
        seen[0], seen[1], seen[2]
    ))
}

/// Criterion 7: monotone closures of degenerate commutative algebras in two
/// different maximal commutative subalgebras.
pub fn monotone_closure_suite(cfg: &SuiteConfig) -> CriterionOutcome {
    let n = cfg.count(50);
    let mut tally = Tally::new(7, n, 1e-8);
    let mut distinct_masas = 0usize;
    for trial in 0..n {
        let mut rng = cfg.rng(7, trial);
        let hi = cfg.max_dim.min(4).max(cfg.min_dim);
        let k = rng.random_range(1..=2);
        let sig = Signature::new((0..k).map(|_| rng.random_range(cfg.min_dim..=hi)).collect())
            .expect("sizes");
        let distinct = rng.random_range(1..=sig.total_dim().min(3));
        let points = distinct_points(distinct, &mut rng, true);
        let values = spread_values(&sig, &points, &mut rng);
        let b_gen = normal_from_values(&sig, &values, &mut rng);
        let tol = &cfg.tol;
        let run = || -> crate::Result<()> {
            let b = Subalgebra::generated_by(&sig, std::slice::from_ref(&b_gen), tol)?;
            let d = generate_masa(std::slice::from_ref(&b_gen), rng.random(), tol)?;
            let d2 = generate_masa(std::slice::from_ref(&b_gen), rng.random(), tol)?;
            if d.principal_angle_sine(&d2) > 1e-3 {
                distinct_masas += 1;
            }
            let c1 = monotone_closure(&b, &d, tol)?;
            let c2 = monotone_closure(&b, &d2, tol)?;
            tally.residual(trial, "angle(closure in D, B)", c1.principal_angle_sine(&b));
            tally.residual(
                trial,
                "angle(closure in D, closure in D')",
                c1.principal_angle_sine(&c2),
            );
            let corr = closure_correspondence(&b, &d, &d2, tol)?;
            tally.residual(trial, "correspondence delta", corr.max_delta());
            tally.residual(trial, "product preservation", corr.product_residual(tol)?);
            tally.check(trial, corr.is_bijective(tol), || {
                "correspondence not injective".into()
            });
            Ok(())
        };
        let mut run = run;
        if let Err(e) = run() {
            tally.fail(trial, e.to_string());
        }
    }
    tally.finish(format!("{distinct_masas} triples with D != D'"))
}

fn random_certified(sig: &Signature, rng: &mut ChaCha8Rng) -> (Vec<u64>, Vec<El>, El, f64) {
    let limit = El::random_gaussian(sig, rng);
    let len = rng.random_range(3..=12);
    let rate = rng.random_range(0.5..3.0);
    let mut indices = Vec::with_capacity(len);
    let mut next = 1u64;
    for _ in 0..len {
        next += rng.random_range(0..3);
        indices.push(next);
        next += 1;
    }
    let seq = indices
        .iter()
        .map(|&i| {
            let g = El::random_gaussian(sig, rng);
            let s = rng.random_range(0.1..1.0) * rate / (i as f64 * operator_norm(&g).max(1e-300));
            &limit + &g.scale_real(s)
        })
        .collect();
    (indices, seq, limit, rate)
}

/// Criterion 8: certificate round trips, crafted violations with the
/// expected failing tags, and the limit calculus on certified pairs.
pub fn order_calculus(cfg: &SuiteConfig) -> CriterionOutcome {
    let n = cfg.count(100);
    let tampers = cfg.count(20);
    let mut tally = Tally::new(8, n + tampers, 1e-9);
    let tol = &cfg.tol;
    let mut certs = Vec::new();
    for trial in 0..n {
        let mut rng = cfg.rng(8, trial);
        let sig = if trial % 2 == 1 {
            certs
                .last()
                .map(|(s, _): &(Signature, _)| s.clone())
                .expect("previous trial")
        } else {
            cfg.signature(&mut rng)
        };
        let (indices, seq, limit, rate) = random_certified(&sig, &mut rng);
        match build_certificate_indexed(&indices, &seq, &limit, rate, tol) {
            Ok(cert) => {
                let rep = verify_certificate(&cert, tol);
                tally.check(trial, rep.accepted, || {
                    format!("round trip rejected: {rep:?}")
                });
                tally.residual(trial, "round-trip residual", rep.worst_residual);
                certs.push((sig, cert));
            }
            Err(e) => tally.fail(trial, e.to_string()),
        }
    }
    let mut properties = 0usize;
    for (pair, w) in certs.chunks(2).enumerate() {
        if let [(sig, c1), (_, c2)] = w {
            let mut rng = cfg.rng(80, pair);
            let x = El::random_gaussian(sig, &mut rng);
            let y = El::random_gaussian(sig, &mut rng);
            match limit_calculus_check(c1, c2, &x, &y, tol) {
                Ok(rep) => {
                    tally.check(2 * pair, rep.combined.accepted, || {
                        format!("calculus rejected: {:?}", rep.combined)
                    });
                    for (prop, r) in &rep.properties {
                        tally.residual(2 * pair, prop.name(), r.worst_residual);
                    }
                    properties += rep.properties.len();
                }
                Err(e) => tally.fail(2 * pair, e.to_string()),
            }
        }
    }
    let families = [
        FailingCondition::LowerBound,
        FailingCondition::UpperBound,
        FailingCondition::EnvelopeMonotonicity,
        FailingCondition::Tail,
        FailingCondition::SumDecomposition,
    ];
    let mut tagged = 0usize;
    for t in 0..tampers {
        let mut rng = cfg.rng(81, t);
        let sig = cfg.signature(&mut rng);
        let (indices, seq, limit, rate) = random_certified(&sig, &mut rng);
        let mut cert = match build_certificate_indexed(&indices, &seq, &limit, rate, tol) {
            Ok(c) => c,
            Err(e) => {
                tally.fail(n + t, e.to_string());
                continue;
            }
        };
        let j = rng.random_range(0..cert.len() - 1);
        let e = cert.envelope.eps[j];
        let one = El::identity(&sig);
        let family = families[t % families.len()];
        match family {
            FailingCondition::LowerBound => {
                cert.components[3][j] = &cert.components[3][j] - &one.scale_real(3.0 * e + 0.1);
            }
            FailingCondition::UpperBound => {
                cert.components[3][j] = &cert.components[3][j] + &one.scale_real(3.0 * e + 0.1);
            }
            FailingCondition::EnvelopeMonotonicity => {
                cert.envelope.eps[j + 1] = cert.envelope.eps[j] + 0.5;
            }
            FailingCondition::Tail => {
                let needed = cert
                    .indices
                    .iter()
                    .zip(&cert.envelope.eps)
                    .map(|(&i, &e)| i as f64 * e)
                    .fold(0.0, f64::max);
                cert.envelope.tail_rate = 0.5 * needed;
            }
            _ => {
                cert.terms[j] = &cert.terms[j] + &one.scale_real(0.25);
            }
        }
        let rep = verify_certificate(&cert, tol);
        let ok = !rep.accepted && rep.failing_condition == Some(family);
        tally.check(n + t, ok, || {
            format!(
                "{} tamper reported {:?}",
                family.tag(),
                rep.failing_condition.map(FailingCondition::tag)
            )
        });
        tagged += usize::from(ok);
    }
    tally.finish(format!(
        "{tagged}/{tampers} violations tagged correctly, {properties} properties checked"
    ))
}

/// Criterion 9: the displayed inequality in the Loewner order.
pub fn sequence_inequality_inequality(cfg: &SuiteConfig) -> CriterionOutcome {
    let n = cfg.count(100);
    let mut tally = Tally::new(9, n, 1e-10);
    for trial in 0..n {
        let mut rng = cfg.rng(9, trial);
        let sig = cfg.signature(&mut rng);
        let x = if trial % 4 == 3 {
            construct(&sig, &mut rng, |m, rng| {
                (0..m)
                    .map(|j| {
                        if j % 2 == 1 {
                            0.0
                        } else {
                            rng.random_range(0.0..3.0)
                        }
                    })
                    .collect()
            })
            .x
        } else {
            El::random_gaussian(&sig, &mut rng)
        };
        let a = rng.random_range(1..64u64);
        let b = rng.random_range((a + 1)..=64u64);
        match sequence_inequality_violations(&x, a, b, &cfg.tol) {
            Ok((lower, upper)) => {
                tally.residual(trial, "0 <= S^2 violation", lower);
                tally.residual(trial, "S^2 <= 2(...) violation", upper);
            }
            Err(e) => tally.fail(trial, e.to_string()),
        }
    }
    tally.finish(String::new())
}

/// Criterion 10: polar decomposition of a direct sum equals the direct sum of
/// the blockwise decompositions, bit for bit.
pub fn direct_sum_reduction(cfg: &SuiteConfig) -> CriterionOutcome {
    let n = cfg.count(50);
    let mut tally = Tally::new(10, n, 0.0);
    for trial in 0..n {
        let mut rng = cfg.rng(10, trial);
        let parts: Vec<El> = (0..rng.random_range(2..=3))
            .map(|_| {
                let sig = Signature::new(vec![cfg.block_size(&mut rng)]).expect("size");
                if rng.random_bool(0.25) {
                    El::zero(&sig)
                } else {
                    El::random_gaussian(&sig, &mut rng)
                }
            })
            .collect();
        let whole = parts[1..]
            .iter()
            .fold(parts[0].clone(), |acc, p| acc.direct_sum(p));
        let tol = &cfg.tol;
        type Route = fn(&El, &ToleranceConfig<f64>) -> crate::Result<PolarResult<f64>>;
        let routes: [(&str, Route); 2] = [
            ("direct", polar_direct),
            ("regularized", |x, t| polar_regularized(x, DEFAULT_N_MAX, t)),
        ];
        for (name, f) in routes {
            let joined = parts
                .iter()
                .map(|p| f(p, tol))
                .collect::<crate::Result<Vec<_>>>()
                .map(|rs| {
                    let cat = |g: fn(&PolarResult<f64>) -> &El| {
                        rs[1..]
                            .iter()
                            .fold(g(&rs[0]).clone(), |acc, r| acc.direct_sum(g(r)))
                    };
                    (cat(|r| &r.u), cat(|r| &r.absx), cat(|r| &r.absxstar))
                });
            match (f(&whole, tol), joined) {
                (Ok(w), Ok((u, ax, axs))) => {
                    let diff =
                        w.u.max_abs_diff(&u)
                            .max(w.absx.max_abs_diff(&ax))
                            .max(w.absxstar.max_abs_diff(&axs));
                    tally.residual(trial, &format!("{name} blockwise difference"), diff);
                }
                (Err(e), _) | (_, Err(e)) => tally.fail(trial, format!("{name}: {e}")),
            }
        }
    }
    tally.finish(String::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_counts() {
        let cfg = SuiteConfig {
            trials: 10,
            ..SuiteConfig::default()
        };
        assert_eq!(cfg.count(200), 10);
        assert_eq!(cfg.count(100), 5);
        assert_eq!(cfg.count(20), 1);
        assert_eq!(SuiteConfig::default().count(50), 50);
    }

    #[test]
    fn small_run_passes_and_is_deterministic() {
        let cfg = SuiteConfig {
            trials: 6,
            seed: 3,
            ..SuiteConfig::default()
        };
        let a = run_all(&cfg);
        for o in &a {
            assert!(o.passed, "{o}");
        }
        assert_eq!(a, run_all(&cfg));
    }
}
