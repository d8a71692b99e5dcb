//! Order convergence as finite, checkable certificates.
//!
//! A sequence `a_n → a` is witnessed by four self-adjoint component
//! sequences `a^(k)_n` with limits `a^(k)` such that
//! `Σ_k i^k a^(k)_n = a_n`, `Σ_k i^k a^(k) = a` and
//! `0 ≤ a^(k)_n - a^(k) ≤ 2ε_n·1`. The dominators are scalar multiples of
//! the unit, decreasing in `n`, and their vanishing is discharged by a
//! declared tail rate `ε_n ≤ c/n`.

use std::fmt;

use num_complex::Complex;

use crate::algebra::{eigh_hermitian, loewner_leq, operator_norm};
use crate::element::AlgebraElement;
use crate::error::{AlgebraError, Result};
use crate::scalar::{c, cre, Real};
use crate::tolerance::ToleranceConfig;

/// Scalar dominator envelope `ε_n` with its analytic tail bound `c/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DominatorEnvelope<T> {
    pub eps: Vec<T>,
    pub tail_rate: T,
}

/// Finite-prefix witness of order convergence.
///
/// `components[k - 1]` holds the sequence `a^(k)_n` and
/// `component_limits[k - 1]` its limit `a^(k)`, for `k = 1..4`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderLimitCertificate<T> {
    pub indices: Vec<u64>,
    pub terms: Vec<AlgebraElement<T>>,
    pub limit: AlgebraElement<T>,
    pub components: [Vec<AlgebraElement<T>>; 4],
    pub component_limits: [AlgebraElement<T>; 4],
    pub envelope: DominatorEnvelope<T>,
}

impl<T: Real> OrderLimitCertificate<T> {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Which certificate condition failed first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
///
/// Variants are ordered by reporting priority: a bound violation names the
/// damaged component, so it wins over the decomposition check it also breaks.
pub enum FailingCondition {
    LowerBound,
    UpperBound,
    EnvelopeMonotonicity,
    Tail,
    SumDecomposition,
    /// Limit-calculus property (iv) failed.
    OrderPreservation,
    /// Limit-calculus property (v) failed.
    NormBound,
}

impl FailingCondition {
    pub fn tag(self) -> &'static str {
        match self {
            Self::SumDecomposition => "sum-decomposition",
            Self::LowerBound => "lower-bound",
            Self::UpperBound => "upper-bound",
            Self::EnvelopeMonotonicity => "envelope-monotonicity",
            Self::Tail => "tail",
            Self::OrderPreservation => "order-preservation",
            Self::NormBound => "norm-bound",
        }
    }
}

impl fmt::Display for FailingCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Verdict of a certificate check. `accepted` holds exactly when
/// `failing_condition` is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport<T> {
    pub accepted: bool,
    pub worst_residual: T,
    pub failing_condition: Option<FailingCondition>,
}

impl<T: Real> LimitReport<T> {
    fn from_failures(worst_residual: T, failures: &[FailingCondition]) -> Self {
        let failing_condition = failures.iter().min().copied();
        Self {
            accepted: failing_condition.is_none(),
            worst_residual,
            failing_condition,
        }
    }

    fn combine(reports: &[&LimitReport<T>]) -> Self {
        let worst = reports
            .iter()
            .fold(T::zero(), |acc, r| acc.max(r.worst_residual));
        let failing = reports.iter().find_map(|r| r.failing_condition);
        Self {
            accepted: failing.is_none(),
            worst_residual: worst,
            failing_condition: failing,
        }
    }
}

/// `i^k` for `k = 1..4`.
fn i_pow<T: Real>(k: usize) -> Complex<T> {
    match k % 4 {
        1 => c(T::zero(), T::one()),
        2 => cre(-T::one()),
        3 => c(T::zero(), -T::one()),
        _ => cre(T::one()),
    }
}

fn recombine<T: Real>(parts: [&AlgebraElement<T>; 4]) -> AlgebraElement<T> {
    let mut acc = parts[0].scale(i_pow(1));
    for (k, p) in parts.iter().enumerate().skip(1) {
        acc = &acc + &p.scale(i_pow(k + 1));
    }
    acc
}

/// [`build_certificate_indexed`] with indices `1, 2, …, len`.
pub fn build_certificate<T: Real>(
    seq: &[AlgebraElement<T>],
    limit: &AlgebraElement<T>,
    tail_rate: T,
    tol: &ToleranceConfig<T>,
) -> Result<OrderLimitCertificate<T>> {
    let indices: Vec<u64> = (1..=seq.len() as u64).collect();
    build_certificate_indexed(&indices, seq, limit, tail_rate, tol)
}

/// Turns a norm-convergent prefix with tail bound `||a_n - a|| ≤ c/n` into an
/// order-convergence witness.
///
/// `ε_n` is the largest remaining distance `sup_{m ≥ n} ||a_m - a||` over the
/// prefix. Components are `a^(4)_n = Re a_n + ε_n`, `a^(1)_n = Im a_n + ε_n`
/// and `a^(2)_n = a^(3)_n = ε_n`, with limits `(Im a, 0, 0, Re a)` in
/// component order 1..4.
pub fn build_certificate_indexed<T: Real>(
    indices: &[u64],
    seq: &[AlgebraElement<T>],
    limit: &AlgebraElement<T>,
    tail_rate: T,
    tol: &ToleranceConfig<T>,
) -> Result<OrderLimitCertificate<T>> {
    if seq.is_empty() {
        return Err(AlgebraError::EmptySequence);
    }
    if indices.len() != seq.len() {
        return Err(AlgebraError::Malformed(format!(
            "{} indices for {} terms",
            indices.len(),
            seq.len()
        )));
    }
    if indices[0] == 0 || indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AlgebraError::Malformed(
            "indices must be strictly ascending naturals ≥ 1".into(),
        ));
    }
    if !(tail_rate >= T::zero() && tail_rate.is_finite()) {
        return Err(AlgebraError::Malformed(format!(
            "tail rate must be finite and ≥ 0, got {tail_rate}"
        )));
    }
    for a in seq {
        a.ensure_same_signature(limit)?;
    }
    let slack = tol.slack(operator_norm(limit));
    let mut dist = Vec::with_capacity(seq.len());
    for (&n, a) in indices.iter().zip(seq) {
        let d = operator_norm(&(a - limit));
        let bound = tail_rate / T::from_u64(n).expect("index representable");
        if d > bound + slack {
            return Err(AlgebraError::EnvelopeViolation {
                index: n,
                distance: d.to_f64().unwrap_or(f64::NAN),
                bound: bound.to_f64().unwrap_or(f64::NAN),
            });
        }
        dist.push(d);
    }
    let mut eps = dist.clone();
    for j in (0..eps.len().saturating_sub(1)).rev() {
        eps[j] = eps[j].max(eps[j + 1]);
    }

    let sig = limit.signature();
    let one = AlgebraElement::identity(&sig);
    let mut comps: [Vec<AlgebraElement<T>>; 4] = Default::default();
    for (a, &e) in seq.iter().zip(&eps) {
        let shift = one.scale_real(e);
        comps[0].push(&a.imag_part() + &shift);
        comps[1].push(shift.clone());
        comps[2].push(shift.clone());
        comps[3].push(&a.real_part() + &shift);
    }
    let zero = AlgebraElement::zero(&sig);
    Ok(OrderLimitCertificate {
        indices: indices.to_vec(),
        terms: seq.to_vec(),
        limit: limit.clone(),
        components: comps,
        component_limits: [limit.imag_part(), zero.clone(), zero, limit.real_part()],
        envelope: DominatorEnvelope { eps, tail_rate },
    })
}

/// Checks every condition of the certificate and reports the highest-priority
/// failing one (see [`FailingCondition`]) together with the worst residual.
pub fn verify_certificate<T: Real>(
    cert: &OrderLimitCertificate<T>,
    tol: &ToleranceConfig<T>,
) -> LimitReport<T> {
    let n = cert.terms.len();
    let shapes_ok = n > 0
        && cert.indices.len() == n
        && cert.envelope.eps.len() == n
        && cert.components.iter().all(|c| c.len() == n)
        && cert.terms.iter().all(|t| t.same_signature(&cert.limit))
        && cert
            .components
            .iter()
            .flatten()
            .all(|t| t.same_signature(&cert.limit))
        && cert
            .component_limits
            .iter()
            .all(|t| t.same_signature(&cert.limit));
    if !shapes_ok {
        return LimitReport::from_failures(T::infinity(), &[FailingCondition::SumDecomposition]);
    }

    let mut worst = T::zero();
    let mut failures = Vec::new();
    let fail = |cond: FailingCondition, failures: &mut Vec<FailingCondition>| {
        if !failures.contains(&cond) {
            failures.push(cond);
        }
    };

    // (iii) decomposition of the limit and of every term
    let lim_sum = recombine([
        &cert.component_limits[0],
        &cert.component_limits[1],
        &cert.component_limits[2],
        &cert.component_limits[3],
    ]);
    let r = (&lim_sum - &cert.limit).frobenius_norm();
    worst = worst.max(r);
    if r > tol.slack(operator_norm(&cert.limit)) {
        fail(FailingCondition::SumDecomposition, &mut failures);
    }
    for j in 0..n {
        let s = recombine([
            &cert.components[0][j],
            &cert.components[1][j],
            &cert.components[2][j],
            &cert.components[3][j],
        ]);
        let r = (&s - &cert.terms[j]).frobenius_norm();
        worst = worst.max(r);
        if r > tol.slack(operator_norm(&cert.terms[j])) {
            fail(FailingCondition::SumDecomposition, &mut failures);
        }
    }

    // (i) 0 ≤ a^(k)_n - a^(k) ≤ 2ε_n
    let two = T::lit(2.0);
    for k in 0..4 {
        let lim = &cert.component_limits[k];
        let lim_sa = lim.self_adjoint_residual();
        for j in 0..n {
            let term = &cert.components[k][j];
            let sa = term.self_adjoint_residual().max(lim_sa);
            let diff = (term - lim).real_part();
            let sys = match eigh_hermitian(&diff, tol) {
                Ok(s) => s,
                Err(_) => {
                    fail(FailingCondition::LowerBound, &mut failures);
                    continue;
                }
            };
            let slack = tol.slack(sys.spectral_radius());
            let lower = (-sys.min_eigenvalue()).max(T::zero()).max(sa);
            let upper = (sys.max_eigenvalue() - two * cert.envelope.eps[j]).max(T::zero());
            worst = worst.max(lower).max(upper);
            if lower > slack || sa > tol.slack(term.frobenius_norm()) {
                fail(FailingCondition::LowerBound, &mut failures);
            }
            if upper > slack {
                fail(FailingCondition::UpperBound, &mut failures);
            }
        }
    }

    // (ii) decreasing envelope with greatest lower bound zero via c/n
    let eps = &cert.envelope.eps;
    for j in 0..n {
        let neg = (-eps[j]).max(T::zero());
        let rise = if j + 1 < n {
            (eps[j + 1] - eps[j]).max(T::zero())
        } else {
            T::zero()
        };
        worst = worst.max(neg).max(rise);
        if neg > T::zero() || rise > tol.pos_slack || !eps[j].is_finite() {
            fail(FailingCondition::EnvelopeMonotonicity, &mut failures);
        }
    }
    let rate = cert.envelope.tail_rate;
    if !(rate >= T::zero() && rate.is_finite()) {
        fail(FailingCondition::Tail, &mut failures);
    } else {
        for (&idx, &e) in cert.indices.iter().zip(eps) {
            let bound = rate / T::from_u64(idx).expect("index representable");
            let excess = (e - bound).max(T::zero());
            worst = worst.max(excess);
            if excess > tol.pos_slack {
                fail(FailingCondition::Tail, &mut failures);
            }
        }
    }
    if cert.indices[0] == 0 || cert.indices.windows(2).any(|w| w[0] >= w[1]) {
        fail(FailingCondition::Tail, &mut failures);
    }

    LimitReport::from_failures(worst, &failures)
}

/// The five limit-calculus properties of order convergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitProperty {
    Sum,
    ModuleAction,
    Product,
    OrderPreservation,
    NormBound,
}

impl LimitProperty {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sum => "sum",
            Self::ModuleAction => "module-action",
            Self::Product => "product",
            Self::OrderPreservation => "order",
            Self::NormBound => "norm",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LimitCalculusReport<T> {
    pub properties: Vec<(LimitProperty, LimitReport<T>)>,
    pub combined: LimitReport<T>,
}

/// Runs properties (i)–(v) on two certified sequences and two fixed
/// elements `x`, `y`.
///
/// Derived sequences are paired term by term; the pair sits at index
/// `min(α_j, β_j)` and its tail rate comes from the soundness bound
/// `||a_n - a|| ≤ 8ε_n ≤ 8c/n` of the input certificates.
pub fn limit_calculus_check<T: Real>(
    c1: &OrderLimitCertificate<T>,
    c2: &OrderLimitCertificate<T>,
    x: &AlgebraElement<T>,
    y: &AlgebraElement<T>,
    tol: &ToleranceConfig<T>,
) -> Result<LimitCalculusReport<T>> {
    c1.limit.ensure_same_signature(&c2.limit)?;
    c1.limit.ensure_same_signature(x)?;
    c1.limit.ensure_same_signature(y)?;

    let r1 = verify_certificate(c1, tol);
    let r2 = verify_certificate(c2, tol);
    if !r1.accepted || !r2.accepted {
        let combined = LimitReport::combine(&[&r1, &r2]);
        return Ok(LimitCalculusReport {
            properties: Vec::new(),
            combined,
        });
    }

    let len = c1.len().min(c2.len());
    let idx: Vec<u64> = (0..len).map(|j| c1.indices[j].min(c2.indices[j])).collect();
    let eight = T::lit(8.0);
    let rate1 = eight * c1.envelope.tail_rate;
    let rate2 = eight * c2.envelope.tail_rate;
    let (a, b) = (&c1.limit, &c2.limit);
    let mut properties = Vec::with_capacity(5);

    let certify = |seq: Vec<AlgebraElement<T>>,
                   lim: AlgebraElement<T>,
                   indices: &[u64],
                   rate: T|
     -> LimitReport<T> {
        match build_certificate_indexed(indices, &seq, &lim, rate, tol) {
            Ok(cert) => verify_certificate(&cert, tol),
            Err(AlgebraError::EnvelopeViolation {
                distance, bound, ..
            }) => LimitReport::from_failures(T::lit(distance - bound), &[FailingCondition::Tail]),
            Err(_) => {
                LimitReport::from_failures(T::infinity(), &[FailingCondition::SumDecomposition])
            }
        }
    };

    // (i) sum
    let seq: Vec<_> = (0..len).map(|j| &c1.terms[j] + &c2.terms[j]).collect();
    properties.push((LimitProperty::Sum, certify(seq, a + b, &idx, rate1 + rate2)));

    // (ii) two-sided module action
    let seq: Vec<_> = c1.terms.iter().map(|t| &(x * t) * y).collect();
    let rate = operator_norm(x) * operator_norm(y) * rate1;
    properties.push((
        LimitProperty::ModuleAction,
        certify(seq, &(x * a) * y, &c1.indices, rate),
    ));

    // (iii) product
    let seq: Vec<_> = (0..len).map(|j| &c1.terms[j] * &c2.terms[j]).collect();
    let b_sup = c2.terms[..len]
        .iter()
        .map(operator_norm)
        .fold(T::zero(), T::max);
    let rate = rate1 * b_sup + operator_norm(a) * rate2;
    properties.push((LimitProperty::Product, certify(seq, a * b, &idx, rate)));

    // (iv) order preservation on aligned indices
    properties.push((
        LimitProperty::OrderPreservation,
        order_property(c1, c2, tol)?,
    ));

    // (v) ||a|| ≤ sup ||a_n|| + 8ε_1, for both limits
    let mut worst = T::zero();
    for cert in [c1, c2] {
        let sup = cert.terms.iter().map(operator_norm).fold(T::zero(), T::max);
        let bound = sup + eight * cert.envelope.eps[0];
        let excess = (operator_norm(&cert.limit) - bound).max(T::zero());
        worst = worst.max(excess);
    }
    let failures = if worst > tol.pos_slack {
        vec![FailingCondition::NormBound]
    } else {
        vec![]
    };
    properties.push((
        LimitProperty::NormBound,
        LimitReport::from_failures(worst, &failures),
    ));

    let refs: Vec<&LimitReport<T>> = properties.iter().map(|(_, r)| r).collect();
    let combined = LimitReport::combine(&refs);
    Ok(LimitCalculusReport {
        properties,
        combined,
    })
}

// Property (iv). When both certified sequences are self-adjoint and satisfy
// a_n ≤ b_n termwise, checks a ≤ b directly. Otherwise it is exercised on the
// comparable pair (Re a_n, Re a_n + b_n* b_n), whose limits are
// (Re a, Re a + b* b).
fn order_property<T: Real>(
    c1: &OrderLimitCertificate<T>,
    c2: &OrderLimitCertificate<T>,
    tol: &ToleranceConfig<T>,
) -> Result<LimitReport<T>> {
    let len = c1.len().min(c2.len());
    let aligned = c1.indices[..len] == c2.indices[..len];
    let self_adjoint = |xs: &[AlgebraElement<T>]| {
        xs.iter()
            .all(|t| t.self_adjoint_residual() <= tol.slack(t.frobenius_norm()))
    };
    let direct = aligned
        && self_adjoint(&c1.terms[..len])
        && self_adjoint(&c2.terms[..len])
        && self_adjoint(std::slice::from_ref(&c1.limit))
        && self_adjoint(std::slice::from_ref(&c2.limit));

    let (lower, upper, lower_lim, upper_lim) = if direct
        && (0..len).try_fold(true, |ok, j| {
            Ok::<_, AlgebraError>(ok && loewner_leq(&c1.terms[j], &c2.terms[j], tol)?)
        })? {
        (
            c1.terms[..len].to_vec(),
            c2.terms[..len].to_vec(),
            c1.limit.clone(),
            c2.limit.clone(),
        )
    } else {
        let lower: Vec<_> = c1.terms[..len]
            .iter()
            .map(AlgebraElement::real_part)
            .collect();
        let upper: Vec<_> = (0..len)
            .map(|j| &lower[j] + &(&c2.terms[j].adjoint() * &c2.terms[j]))
            .collect();
        let lower_lim = c1.limit.real_part();
        let upper_lim = &lower_lim + &(&c2.limit.adjoint() * &c2.limit);
        (lower, upper, lower_lim, upper_lim)
    };

    let mut worst = T::zero();
    for j in 0..len {
        worst = worst.max(crate::algebra::loewner_violation(
            &lower[j], &upper[j], tol,
        )?);
    }
    let premise_ok = worst <= tol.slack(T::one());
    let violation = crate::algebra::loewner_violation(&lower_lim, &upper_lim, tol)?;
    worst = worst.max(violation);
    let holds = !premise_ok || loewner_leq(&lower_lim, &upper_lim, tol)?;
    let failures = if holds {
        vec![]
    } else {
        vec![FailingCondition::OrderPreservation]
    };
    Ok(LimitReport::from_failures(worst, &failures))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Signature;

    fn tol() -> ToleranceConfig<f64> {
        ToleranceConfig::default()
    }

    fn scalar_seq(sig: &Signature, len: usize) -> Vec<AlgebraElement<f64>> {
        (1..=len)
            .map(|n| AlgebraElement::scalar(sig, cre(1.0 / n as f64)))
            .collect()
    }

    #[test]
    fn scalar_sequence_certificate() {
        let sig = Signature::new(vec![2]).unwrap();
        let seq = scalar_seq(&sig, 10);
        let zero = AlgebraElement::zero(&sig);
        let cert = build_certificate(&seq, &zero, 1.0, &tol()).unwrap();
        for (j, e) in cert.envelope.eps.iter().enumerate() {
            assert!((e - 1.0 / (j + 1) as f64).abs() < 1e-15);
        }
        let report = verify_certificate(&cert, &tol());
        assert!(report.accepted, "{report:?}");
        assert_eq!(report.failing_condition, None);
    }

    #[test]
    fn alternating_sequence_envelope_is_tail_sup() {
        let seq: Vec<_> = (1..=12)
            .map(|n| {
                let s = if n % 2 == 0 { 1.0 } else { -1.0 };
                AlgebraElement::<f64>::diag_real(&[s / n as f64, 0.0])
            })
            .collect();
        let zero = AlgebraElement::zero(&seq[0].signature());
        let cert = build_certificate(&seq, &zero, 1.0, &tol()).unwrap();
        // oracle: sup over the remaining prefix by enumeration
        for n in 1..=12usize {
            let sup = (n..=12).map(|m| 1.0 / m as f64).fold(0.0, f64::max);
            assert!((cert.envelope.eps[n - 1] - sup).abs() < 1e-15);
        }
        assert!(verify_certificate(&cert, &tol()).accepted);
    }

    #[test]
    fn non_null_sequence_is_an_envelope_violation() {
        let seq: Vec<_> = (1..=6)
            .map(|n| AlgebraElement::<f64>::diag_real(&[if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0]))
            .collect();
        let zero = AlgebraElement::zero(&seq[0].signature());
        for rate in [1.0, 3.0, 5.0] {
            assert!(matches!(
                build_certificate(&seq, &zero, rate, &tol()),
                Err(AlgebraError::EnvelopeViolation { .. })
            ));
        }
    }

    #[test]
    fn empty_sequence_rejected() {
        let zero = AlgebraElement::<f64>::zero(&Signature::new(vec![1]).unwrap());
        assert_eq!(
            build_certificate(&[], &zero, 1.0, &tol()),
            Err(AlgebraError::EmptySequence)
        );
    }

    #[test]
    fn tampered_component_fails_lower_bound() {
        let sig = Signature::new(vec![2]).unwrap();
        let zero = AlgebraElement::zero(&sig);
        let mut cert = build_certificate(&scalar_seq(&sig, 8), &zero, 1.0, &tol()).unwrap();
        let e = cert.envelope.eps[3];
        cert.components[3][3] =
            &cert.components[3][3] - &AlgebraElement::scalar(&sig, cre(3.0 * e));
        let report = verify_certificate(&cert, &tol());
        assert!(!report.accepted);
        assert_eq!(report.failing_condition, Some(FailingCondition::LowerBound));
    }

    #[test]
    fn non_monotone_envelope_rejected() {
        let sig = Signature::new(vec![2]).unwrap();
        let zero = AlgebraElement::zero(&sig);
        let mut cert = build_certificate(&scalar_seq(&sig, 8), &zero, 1.0, &tol()).unwrap();
        cert.envelope.eps[5] = cert.envelope.eps[3];
        let report = verify_certificate(&cert, &tol());
        assert_eq!(
            report.failing_condition,
            Some(FailingCondition::EnvelopeMonotonicity)
        );
    }

    #[test]
    fn wrong_sum_rejected() {
        let sig = Signature::new(vec![2]).unwrap();
        let zero = AlgebraElement::zero(&sig);
        let mut cert = build_certificate(&scalar_seq(&sig, 8), &zero, 1.0, &tol()).unwrap();
        cert.terms[2] = &cert.terms[2] + &AlgebraElement::scalar(&sig, cre(0.25));
        assert_eq!(
            verify_certificate(&cert, &tol()).failing_condition,
            Some(FailingCondition::SumDecomposition)
        );
    }

    #[test]
    fn tail_rate_too_small_rejected() {
        let sig = Signature::new(vec![2]).unwrap();
        let zero = AlgebraElement::zero(&sig);
        let mut cert = build_certificate(&scalar_seq(&sig, 8), &zero, 1.0, &tol()).unwrap();
        cert.envelope.tail_rate = 0.5;
        assert_eq!(
            verify_certificate(&cert, &tol()).failing_condition,
            Some(FailingCondition::Tail)
        );
    }

    #[test]
    fn calculus_sum_and_module_action() {
        let sig = Signature::new(vec![2]).unwrap();
        let zero = AlgebraElement::zero(&sig);
        let c1 = build_certificate(&scalar_seq(&sig, 10), &zero, 1.0, &tol()).unwrap();
        let c2 = c1.clone();
        let p = AlgebraElement::diag_real(&[1.0, 0.0]);
        let report = limit_calculus_check(&c1, &c2, &p, &p, &tol()).unwrap();
        assert!(report.combined.accepted, "{report:?}");
        assert_eq!(report.properties.len(), 5);

        // the sum sequence is (2/n)·1 and is certified directly too
        let sum: Vec<_> = (1..=10)
            .map(|n| AlgebraElement::scalar(&sig, cre(2.0 / n as f64)))
            .collect();
        assert!(
            verify_certificate(
                &build_certificate(&sum, &zero, 2.0, &tol()).unwrap(),
                &tol()
            )
            .accepted
        );
        let act: Vec<_> = (1..=10)
            .map(|n| AlgebraElement::diag_real(&[1.0 / n as f64, 0.0]))
            .collect();
        assert!(
            verify_certificate(
                &build_certificate(&act, &zero, 1.0, &tol()).unwrap(),
                &tol()
            )
            .accepted
        );
    }

    #[test]
    fn calculus_rejects_signature_mismatch() {
        let sig = Signature::new(vec![2]).unwrap();
        let zero = AlgebraElement::zero(&sig);
        let c1 = build_certificate(&scalar_seq(&sig, 4), &zero, 1.0, &tol()).unwrap();
        let other = AlgebraElement::identity(&Signature::new(vec![3]).unwrap());
        assert!(matches!(
            limit_calculus_check(&c1, &c1, &other, &other, &tol()),
            Err(AlgebraError::SignatureMismatch { .. })
        ));
    }
}
