//! Both sides of Ramanujan's formula, its coth form and Lerch's case,
//! verification reports, the telescoping double-sum checks, and the fast
//! `zeta(4m+3)` evaluator.
//!
//! Instances are parametrised by a positive rational `t` with
//! `alpha = pi t` and `beta = pi / t`, so `alpha * beta = pi^2` holds by
//! construction. For real `beta > 0` and integer `m`, `(-beta)^(-m)` is read
//! as `(-1)^m beta^(-m)`.

use std::fmt;

use rug::ops::Pow;
use rug::{Float, Rational};
use serde::{Serialize, Serializer};

use crate::error::{at_least, Error, Result};
use crate::exact::{
    bernoulli, coth_variant_coeffs, factorial, lerch_terms, ramanujan_bernoulli_coeffs,
    BernoulliCache,
};
use crate::realseries::{
    check_prec, coth_sum, double_sum_truncated, lambert_sum, log2_abs, pi_float,
    zeta_integer_truncated, Real, SeriesTruncation, GUARD_BITS,
};

/// Relative size of the rounding floor used by the double-precision oracles.
const ORACLE_ROUNDING_LOG2: i32 = -40;

/// One instance `(m, t)` of Ramanujan's formula at a given precision.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityParams {
    m: u32,
    t: Rational,
    prec: u32,
}

impl IdentityParams {
    pub fn new(m: u32, t: Rational, prec: u32) -> Result<Self> {
        at_least("m", 1, m as u64)?;
        if t <= 0 {
            return Err(Error::NotPositive("t"));
        }
        check_prec(prec)?;
        Ok(IdentityParams { m, t, prec })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn t(&self) -> &Rational {
        &self.t
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn working_prec(&self) -> u32 {
        self.prec + GUARD_BITS
    }

    /// `alpha = pi t` at `prec` bits.
    pub fn alpha(&self, prec: u32) -> Float {
        pi_float(prec + GUARD_BITS) * &self.t
    }

    /// `beta = pi / t` at `prec` bits.
    pub fn beta(&self, prec: u32) -> Float {
        pi_float(prec + GUARD_BITS) / &self.t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityName {
    Ramanujan,
    CothVariant,
    Lerch,
    Convolution,
    Telescoping,
}

impl fmt::Display for IdentityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IdentityName::Ramanujan => "ramanujan",
            IdentityName::CothVariant => "coth_variant",
            IdentityName::Lerch => "lerch",
            IdentityName::Convolution => "convolution",
            IdentityName::Telescoping => "telescoping",
        })
    }
}

/// Deliberate corruptions used to show that a verifier can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NegativeControl {
    /// Negate the first coefficient of the closed-form side.
    FlipCoefficientSign,
    /// Scale `beta` by `1 + 2^(-prec/2)`, breaking `alpha * beta = pi^2`.
    BreakConstraint,
}

/// A secondary consistency check run alongside a verification.
#[derive(Clone, Debug, PartialEq)]
pub struct InternalCheck {
    pub name: &'static str,
    pub holds: bool,
}

fn display_string<T: fmt::Display, S: Serializer>(
    v: &T,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_str(v)
}

/// Outcome of one verification. `pass` is exactly
/// `abs_diff_log2 <= tolerance_log2`.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub identity: IdentityName,
    pub m: u32,
    #[serde(serialize_with = "display_string")]
    pub t: Rational,
    pub prec_bits: u32,
    pub lhs: Real,
    pub rhs: Real,
    pub abs_diff_log2: f64,
    pub tolerance_log2: f64,
    pub pass: bool,
    pub truncations: Vec<SeriesTruncation>,
    #[serde(skip)]
    pub internal_checks: Vec<InternalCheck>,
}

impl IdentityReport {
    pub fn internal_checks_hold(&self) -> bool {
        self.internal_checks.iter().all(|c| c.holds)
    }
}

struct Comparison {
    identity: IdentityName,
    m: u32,
    t: Rational,
    prec: u32,
    /// precision at which lhs and rhs are reported
    report_prec: u32,
    lhs: Float,
    rhs: Float,
    tolerance_log2: f64,
    /// value reported for abs_diff_log2 when the difference is exactly zero
    zero_floor: f64,
    truncations: Vec<SeriesTruncation>,
    internal_checks: Vec<InternalCheck>,
}

impl Comparison {
    fn finish(self) -> IdentityReport {
        let wp = self.lhs.prec().max(self.rhs.prec()) + GUARD_BITS;
        let diff = Float::with_val(wp, &self.lhs - &self.rhs);
        let abs_diff_log2 = log2_abs(&diff, self.zero_floor);
        IdentityReport {
            identity: self.identity,
            m: self.m,
            t: self.t,
            prec_bits: self.prec,
            lhs: Real::rounded(&self.lhs, self.report_prec),
            rhs: Real::rounded(&self.rhs, self.report_prec),
            abs_diff_log2,
            tolerance_log2: self.tolerance_log2,
            pass: abs_diff_log2 <= self.tolerance_log2,
            truncations: self.truncations,
            internal_checks: self.internal_checks,
        }
    }
}

/// Default certified tolerance: `2^(2g - prec)`.
pub fn default_tolerance_log2(prec: u32) -> f64 {
    2.0 * GUARD_BITS as f64 - prec as f64
}

fn powi(x: &Float, e: i32) -> Float {
    x.clone().pow(e)
}

fn sign(odd: bool) -> i32 {
    if odd {
        -1
    } else {
        1
    }
}

/// Everything the exponential-sum side needs, at working precision.
struct ExponentialPieces {
    alpha: Float,
    beta: Float,
    zeta: Float,
    f_alpha: Float,
    f_beta: Float,
    truncations: Vec<SeriesTruncation>,
}

fn exponential_pieces(
    p: &IdentityParams,
    control: Option<NegativeControl>,
) -> Result<ExponentialPieces> {
    let wp = p.working_prec();
    let alpha = p.alpha(wp);
    let mut beta = p.beta(wp);
    if control == Some(NegativeControl::BreakConstraint) {
        let nudge = Float::with_val(wp, Float::i_exp(1, -((p.prec / 2) as i32)));
        beta *= nudge + 1u32;
    }
    let s = 2 * p.m as i64 + 1;
    let (zeta, tz) = zeta_integer_truncated(s, wp)?;
    let (f_alpha, ta) = lambert_sum(s, &Real::rounded(&alpha, wp), wp)?;
    let (f_beta, tb) = lambert_sum(s, &Real::rounded(&beta, wp), wp)?;
    Ok(ExponentialPieces {
        alpha,
        beta,
        zeta: zeta.into_float(),
        f_alpha: f_alpha.into_float(),
        f_beta: f_beta.into_float(),
        truncations: vec![tz, ta, tb],
    })
}

impl ExponentialPieces {
    /// `alpha^-m (c zeta + w F(alpha)) - (-1)^m beta^-m (c zeta + w F(beta))`.
    fn combine(&self, m: u32, zeta_weight: f64, sum_weight: u32) -> Float {
        let wp = self.zeta.prec();
        let zeta = Float::with_val(wp, &self.zeta * zeta_weight);
        let brace_a = Float::with_val(wp, &self.f_alpha * sum_weight) + &zeta;
        let brace_b = Float::with_val(wp, &self.f_beta * sum_weight) + &zeta;
        let left = brace_a * powi(&self.alpha, -(m as i32));
        let right = brace_b * powi(&self.beta, -(m as i32)) * sign(m % 2 == 1);
        left - right
    }
}

/// `sum_k coeffs[k] alpha^(m+1-k) beta^k`; also returns the largest term
/// magnitude so callers can judge cancellation.
fn bilinear(coeffs: &[Rational], alpha: &Float, beta: &Float, m: u32) -> (Float, Float) {
    let wp = alpha.prec();
    let mut sum = Float::new(wp);
    let mut largest = Float::new(wp);
    for (k, c) in coeffs.iter().enumerate() {
        let k = k as i32;
        let term = powi(alpha, m as i32 + 1 - k) * powi(beta, k) * c;
        if term.cmp_abs(&largest) == Some(std::cmp::Ordering::Greater) {
            largest = Float::with_val(wp, term.abs_ref());
        }
        sum += term;
    }
    (sum, largest)
}

/// Within two units in the last place of `scale` at `prec` bits.
fn within_two_ulp(a: &Float, b: &Float, scale: &Float, prec: u32) -> bool {
    let diff = Float::with_val(a.prec() + GUARD_BITS, a - b);
    if diff.is_zero() {
        return true;
    }
    let Some(e) = scale.get_exp() else {
        return false;
    };
    let ulp = Float::with_val(64, Float::i_exp(1, e - prec as i32));
    diff.abs() <= ulp * 2u32
}

fn flip_first(mut coeffs: Vec<Rational>, control: Option<NegativeControl>) -> Vec<Rational> {
    if control == Some(NegativeControl::FlipCoefficientSign) {
        coeffs[0] = -coeffs[0].clone();
    }
    coeffs
}

/// Left side of Ramanujan's formula:
/// `alpha^-m {zeta(2m+1)/2 + F(alpha)} - (-beta)^-m {zeta(2m+1)/2 + F(beta)}`
/// with `F(a) = sum n^(-2m-1)/(e^(2an)-1)`.
pub fn ramanujan_lhs(p: &IdentityParams) -> Result<(Real, Vec<SeriesTruncation>)> {
    let pieces = exponential_pieces(p, None)?;
    let lhs = pieces.combine(p.m, 0.5, 1);
    Ok((Real::rounded(&lhs, p.prec), pieces.truncations))
}

/// Right side of Ramanujan's formula, term by term in `alpha` and `beta`.
pub fn ramanujan_rhs(p: &IdentityParams) -> Result<Real> {
    let wp = p.working_prec();
    let coeffs = ramanujan_bernoulli_coeffs(p.m)?;
    let (rhs, _) = bilinear(&coeffs, &p.alpha(wp), &p.beta(wp), p.m);
    Ok(Real::rounded(&rhs, p.prec))
}

/// Right side regrouped as `pi^(m+1) * sum_k coeffs[k] t^(m+1-2k)`, with the
/// Laurent polynomial in `t` summed exactly.
pub fn ramanujan_rhs_laurent(p: &IdentityParams) -> Result<Real> {
    let wp = p.working_prec();
    let coeffs = ramanujan_bernoulli_coeffs(p.m)?;
    let poly: Rational = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * p.t.clone().pow(p.m as i32 + 1 - 2 * k as i32))
        .sum();
    let value = powi(&pi_float(wp), p.m as i32 + 1) * poly;
    Ok(Real::rounded(&value, p.prec))
}

/// Right side assembled the way the telescoping proof produces it: the
/// interior `p = 1..=m` Bernoulli terms of
/// `(-1)^m 2^(2m) sum_p (-1)^p B_(2m-2p+2) B_2p / ((2m-2p+2)! (2p)!) alpha^p beta^(m-p+1)`
/// plus the two boundary terms written through `zeta(2m+2)`:
/// `p = 0` is `zeta(2m+2) / (2 alpha^(m+1))` and `p = m+1` is
/// `-(-1)^m zeta(2m+2) alpha^(m+1) / (2 pi^(2m+2))`.
pub fn ramanujan_rhs_assembled(p: &IdentityParams) -> Result<Real> {
    let wp = p.working_prec();
    Ok(Real::rounded(&assembled_rhs(p, wp)?, p.prec))
}

fn assembled_rhs(p: &IdentityParams, wp: u32) -> Result<Float> {
    let m = p.m;
    let alpha = p.alpha(wp);
    let beta = p.beta(wp);
    let (zeta, _) = zeta_integer_truncated(2 * m as i64 + 2, wp)?;
    let zeta = zeta.into_float();
    let alpha_top = powi(&alpha, m as i32 + 1);

    let first = Float::with_val(wp, &zeta / &alpha_top) / 2u32;
    let pi_pow = powi(&pi_float(wp), 2 * m as i32 + 2);
    let last = Float::with_val(wp, &zeta * &alpha_top) / pi_pow / 2u32 * -sign(m % 2 == 1);

    let cache = BernoulliCache::global();
    let scale = Rational::from(rug::Integer::from(1) << (2 * m)) * sign(m % 2 == 1);
    let mut interior = Float::new(wp);
    for j in 1..=m {
        let b = bernoulli((2 * m - 2 * j + 2) as usize, cache) * bernoulli(2 * j as usize, cache);
        let c = b / Rational::from(factorial(2 * m - 2 * j + 2) * factorial(2 * j))
            * &scale
            * sign(j % 2 == 1);
        interior += powi(&alpha, j as i32) * powi(&beta, (m - j + 1) as i32) * c;
    }
    Ok(first + interior + last)
}

pub fn verify_ramanujan(p: &IdentityParams) -> Result<IdentityReport> {
    verify_ramanujan_with(p, None)
}

pub fn verify_ramanujan_with(
    p: &IdentityParams,
    control: Option<NegativeControl>,
) -> Result<IdentityReport> {
    let wp = p.working_prec();
    let pieces = exponential_pieces(p, control)?;
    let lhs = pieces.combine(p.m, 0.5, 1);
    let coeffs = ramanujan_bernoulli_coeffs(p.m)?;
    let (clean, largest) = bilinear(&coeffs, &p.alpha(wp), &p.beta(wp), p.m);
    let coeffs = flip_first(coeffs, control);
    let (rhs, _) = bilinear(&coeffs, &pieces.alpha, &pieces.beta, p.m);

    let assembled = assembled_rhs(p, wp)?;
    let checks = vec![InternalCheck {
        name: "rhs_matches_assembled_form",
        holds: within_two_ulp(&clean, &assembled, &largest, p.prec),
    }];
    Ok(Comparison {
        identity: IdentityName::Ramanujan,
        m: p.m,
        t: p.t.clone(),
        prec: p.prec,
        report_prec: p.prec,
        lhs,
        rhs,
        tolerance_log2: default_tolerance_log2(p.prec),
        zero_floor: -(wp as f64),
        truncations: pieces.truncations,
        internal_checks: checks,
    }
    .finish())
}

/// Both sides of the coth form
/// `alpha^-m sum coth(alpha n)/n^(2m+1) - (-beta)^-m sum coth(beta n)/n^(2m+1)
///  = -2^(2m+1) sum_k (-1)^k B_2k B_(2m+2-2k)/((2k)! (2m+2-2k)!) alpha^(m+1-k) beta^k`,
/// with `coth(an) = 1 + 2/(e^(2an) - 1)`.
pub fn coth_variant_sides(p: &IdentityParams) -> Result<(Real, Real)> {
    let r = verify_coth_variant(p)?;
    Ok((r.lhs, r.rhs))
}

pub fn verify_coth_variant(p: &IdentityParams) -> Result<IdentityReport> {
    verify_coth_variant_with(p, None)
}

pub fn verify_coth_variant_with(
    p: &IdentityParams,
    control: Option<NegativeControl>,
) -> Result<IdentityReport> {
    let wp = p.working_prec();
    let pieces = exponential_pieces(p, control)?;
    let lhs = pieces.combine(p.m, 1.0, 2);
    let coeffs = coth_variant_coeffs(p.m)?;
    let (clean, largest) = bilinear(&coeffs, &p.alpha(wp), &p.beta(wp), p.m);
    let coeffs = flip_first(coeffs, control);
    let (rhs, _) = bilinear(&coeffs, &pieces.alpha, &pieces.beta, p.m);

    let (exponential, _) = bilinear(
        &ramanujan_bernoulli_coeffs(p.m)?,
        &p.alpha(wp),
        &p.beta(wp),
        p.m,
    );
    let doubled = exponential * 2u32;
    let checks = vec![InternalCheck {
        name: "rhs_is_twice_exponential_form",
        holds: within_two_ulp(&clean, &doubled, &largest, p.prec),
    }];
    Ok(Comparison {
        identity: IdentityName::CothVariant,
        m: p.m,
        t: p.t.clone(),
        prec: p.prec,
        report_prec: p.prec,
        lhs,
        rhs,
        tolerance_log2: default_tolerance_log2(p.prec),
        zero_floor: -(wp as f64),
        truncations: pieces.truncations,
        internal_checks: checks,
    }
    .finish())
}

pub fn verify_lerch(m: u32, prec: u32) -> Result<IdentityReport> {
    verify_lerch_with(m, prec, None)
}

/// `sum coth(pi n)/n^(4m+3)` against `lerch_rational_coefficient(m) pi^(4m+3)`.
pub fn verify_lerch_with(
    m: u32,
    prec: u32,
    control: Option<NegativeControl>,
) -> Result<IdentityReport> {
    check_prec(prec)?;
    let wp = prec + GUARD_BITS;
    let s = 4 * m as i64 + 3;
    let (lhs, truncations) = match control {
        Some(NegativeControl::BreakConstraint) => {
            let nudge = Float::with_val(wp, Float::i_exp(1, -((prec / 2) as i32))) + 1u32;
            let a = pi_float(wp + GUARD_BITS) * nudge;
            let (zeta, tz) = zeta_integer_truncated(s, wp)?;
            let (f, tl) = lambert_sum(s, &Real::rounded(&a, wp + GUARD_BITS), wp)?;
            let v = Float::with_val(wp, f.value() * 2u32) + zeta.value();
            (v, vec![tz, tl])
        }
        _ => {
            let (v, t) = coth_sum(s, wp)?;
            (v.into_float(), t)
        }
    };
    let terms = flip_first(lerch_terms(m), control);
    let coefficient: Rational = terms.into_iter().sum();
    let rhs = powi(&pi_float(wp), s as i32) * coefficient;
    Ok(Comparison {
        identity: IdentityName::Lerch,
        m,
        t: Rational::from(1),
        prec,
        report_prec: prec,
        lhs,
        rhs,
        tolerance_log2: default_tolerance_log2(prec),
        zero_floor: -(wp as f64),
        truncations,
        internal_checks: Vec::new(),
    }
    .finish())
}

/// `zeta(4m+3) = r pi^(4m+3) - 2 sum n^-(4m+3)/(e^(2 pi n) - 1)` with
/// `r = lerch_rational_coefficient(m)`; never calls the Euler–Maclaurin
/// evaluator.
pub fn fast_odd_zeta(m: u32, prec: u32) -> Result<(Real, SeriesTruncation)> {
    check_prec(prec)?;
    let wp = prec + GUARD_BITS;
    let s = 4 * m as i64 + 3;
    let pi = pi_float(wp + GUARD_BITS);
    let (f, trunc) = lambert_sum(s, &Real::rounded(&pi, wp + GUARD_BITS), wp)?;
    let coefficient: Rational = lerch_terms(m).into_iter().sum();
    let closed = powi(&Float::with_val(wp, &pi), s as i32) * coefficient;
    let value = closed - Float::with_val(wp, f.value() * 2u32);
    Ok((Real::rounded(&value, prec), trunc))
}

/// `(-1)^(j-1) zeta(2j) zeta(4m+4-2j)` for `j = 1..=2m+1`, the terms left
/// behind by repeatedly applying
/// `1/(n^a (k^2+n^2)) = 1/(n^a k^2) - 1/(n^(a-2) k^2 (k^2+n^2))`.
pub fn convolution_products(m: u32, prec: u32) -> Result<Vec<Float>> {
    at_least("m", 1, m as u64)?;
    check_prec(prec)?;
    let zetas: Vec<Float> = (1..=2 * m + 1)
        .map(|j| zeta_integer_truncated(2 * j as i64, prec).map(|(z, _)| z.into_float()))
        .collect::<Result<_>>()?;
    Ok((1..=2 * m + 1)
        .map(|j| {
            let a = &zetas[(j - 1) as usize];
            let b = &zetas[(2 * m + 1 - j) as usize];
            Float::with_val(prec, a * b) * sign(j % 2 == 0)
        })
        .collect())
}

/// Brute-force pieces of the double-sum recursion at one truncation.
#[derive(Clone, Debug)]
pub struct ConvolutionOracle {
    /// `sum_{n,k<=N} 1/(n^(4m+2) (k^2+n^2))`
    pub lhs: f64,
    /// `sum_{n,k<=N} 1/(k^(4m+2) (k^2+n^2))`
    pub trailing: f64,
}

pub fn convolution_oracle(m: u32, n_trunc: u64) -> Result<ConvolutionOracle> {
    at_least("m", 1, m as u64)?;
    let one = Real::from_f64(1.0);
    let e = 4 * m + 2;
    Ok(ConvolutionOracle {
        lhs: double_sum_truncated(&one, e, 0, n_trunc)?.to_f64(),
        trailing: double_sum_truncated(&one, 0, e, n_trunc)?.to_f64(),
    })
}

pub fn verify_convolution_recursion(m: u32, n_trunc: u64, prec: u32) -> Result<IdentityReport> {
    verify_convolution_recursion_with(m, n_trunc, prec, None)
}

/// `sum 1/(n^(4m+2)(k^2+n^2)) = zeta(2)zeta(4m+2) - zeta(4)zeta(4m) + … + zeta(4m+2)zeta(2)
///  - sum 1/(k^(4m+2)(k^2+n^2))`, with both double sums truncated to the
/// square `[1, N]^2`.
///
/// The tolerance is calibrated from the run itself: four times the change in
/// the residual between `N` and `2N`.
pub fn verify_convolution_recursion_with(
    m: u32,
    n_trunc: u64,
    prec: u32,
    control: Option<NegativeControl>,
) -> Result<IdentityReport> {
    at_least("m", 1, m as u64)?;
    at_least("N", 100, n_trunc)?;
    check_prec(prec)?;
    if control == Some(NegativeControl::BreakConstraint) {
        return Err(Error::NotApplicable("break-constraint"));
    }
    let mut products = convolution_products(m, prec)?;
    if control == Some(NegativeControl::FlipCoefficientSign) {
        products[0] = -products[0].clone();
    }
    let convolution: Float = Float::with_val(prec, Float::sum(products.iter()));

    let residual = |o: &ConvolutionOracle| -> (Float, Float, Float) {
        let lhs = Float::with_val(prec, o.lhs);
        let rhs = Float::with_val(prec, &convolution - o.trailing);
        let r = Float::with_val(prec, &lhs - &rhs);
        (lhs, rhs, r)
    };
    let oracle = convolution_oracle(m, n_trunc)?;
    let (lhs, rhs, r1) = residual(&oracle);
    let swapped =
        (oracle.lhs - oracle.trailing).abs() <= oracle.lhs * 2f64.powi(ORACLE_ROUNDING_LOG2);
    let halved = Float::with_val(prec, &convolution / 2u32) - oracle.lhs;
    let (_, _, r2) = residual(&convolution_oracle(m, 2 * n_trunc)?);
    let change = Float::with_val(prec, &r1 - &r2).abs();
    let tolerance = Float::with_val(prec, &change * 4u32);
    let checks = vec![
        InternalCheck {
            name: "double_sums_swap_symmetric",
            holds: swapped,
        },
        InternalCheck {
            name: "lhs_is_half_convolution",
            holds: halved.abs() <= tolerance,
        },
    ];
    let truncation = SeriesTruncation {
        terms: n_trunc,
        tail_bound_log2: log2_abs(&change, -1074.0),
    };
    Ok(Comparison {
        identity: IdentityName::Convolution,
        m,
        t: Rational::from(1),
        prec,
        report_prec: 64,
        lhs,
        rhs,
        tolerance_log2: log2_abs(&tolerance, -1074.0),
        zero_floor: -1074.0,
        truncations: vec![truncation],
        internal_checks: checks,
    }
    .finish())
}

/// A pair of positive sequences `x_k = (x_rate pi k)^2`, `z_m = (z_rate pi m)^2`
/// and a telescoping depth `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiZetaSequences {
    x_rate: Rational,
    z_rate: Rational,
    depth: u32,
}

impl QuasiZetaSequences {
    pub fn new(x_rate: Rational, z_rate: Rational, depth: u32) -> Result<Self> {
        if x_rate <= 0 || z_rate <= 0 {
            return Err(Error::UnsupportedSequence(format!(
                "scaled squares need positive rates, got {x_rate} and {z_rate}"
            )));
        }
        if depth == 0 {
            return Err(Error::UnsupportedSequence(
                "depth must be at least 1".into(),
            ));
        }
        Ok(QuasiZetaSequences {
            x_rate,
            z_rate,
            depth,
        })
    }

    /// `x_k = alpha^2 k^2` with `alpha = pi t`, and `z_m = pi^2 m^2`.
    pub fn alpha_pi(t: Rational, depth: u32) -> Result<Self> {
        Self::new(t, Rational::from(1), depth)
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// `x_rate / z_rate`; equals `t` for [`QuasiZetaSequences::alpha_pi`].
    pub fn rate_ratio(&self) -> Rational {
        Rational::from(&self.x_rate / &self.z_rate)
    }
}

/// Partial sums `sum_{k<=K} k^(-2j)` for `j = 1..=depth`.
fn even_partial_zetas(depth: u32, k_max: u64, prec: u32) -> Vec<Float> {
    (1..=depth)
        .map(|j| {
            let mut s = Float::new(prec);
            for k in (1..=k_max).rev() {
                s += Float::with_val(prec, k).pow(2 * j).recip();
            }
            s
        })
        .collect()
}

struct TelescopeSides {
    lhs: Float,
    rhs: Float,
    magnitude: Float,
}

fn telescope_sides(
    q: &QuasiZetaSequences,
    k_max: u64,
    prec: u32,
    control: Option<NegativeControl>,
) -> Result<TelescopeSides> {
    let n = q.depth;
    let pi = pi_float(prec);
    let cx = Float::with_val(prec, &pi * &q.x_rate).square();
    let cz = Float::with_val(prec, &pi * &q.z_rate).square();
    let ratio = q.rate_ratio();
    let a2 = Real::from_rational(&Rational::from(ratio.square_ref()), prec)?;

    let s1 = double_sum_truncated(&a2, 2 * n, 0, k_max)?.to_f64();
    let s2 = double_sum_truncated(&a2, 0, 2 * n, k_max)?.to_f64();
    let lhs = powi(&cx, -(n as i32)) / &cz * s1;
    let trailing = powi(&cz, -(n as i32) - 1) * s2 * sign(n % 2 == 1);

    let h = even_partial_zetas(n, k_max, prec);
    let zx = |j: u32| Float::with_val(prec, &h[j as usize - 1] / powi(&cx, j as i32));
    let zz = |j: u32| Float::with_val(prec, &h[j as usize - 1] / powi(&cz, j as i32));
    let mut products: Vec<Float> = (0..n)
        .map(|p| zx(n - p) * zz(p + 1) * sign(p % 2 == 1))
        .collect();
    if control == Some(NegativeControl::FlipCoefficientSign) {
        products[0] = -products[0].clone();
    }

    let mut magnitude =
        Float::with_val(prec, lhs.abs_ref()) + Float::with_val(prec, trailing.abs_ref());
    for p in &products {
        magnitude += Float::with_val(prec, p.abs_ref());
    }
    let rhs = Float::with_val(prec, Float::sum(products.iter())) + trailing;
    Ok(TelescopeSides {
        lhs,
        rhs,
        magnitude,
    })
}

pub fn telescope_check(q: &QuasiZetaSequences, k_max: u64, prec: u32) -> Result<IdentityReport> {
    telescope_check_with(q, k_max, prec, None)
}

/// Checks
/// `sum_{k,m} 1/(x_k^n (x_k+z_m)) = sum_{p=0}^{n-1} (-1)^p zeta_x(n-p) zeta_z(p+1) + (-1)^n sum_{k,m} 1/(z_m^n (x_k+z_m))`
/// with every sum truncated at `K` terms per index.
///
/// On a square truncation with partial-sum `zeta_x`, `zeta_z` the identity
/// is exact, so the residual is pure double-precision rounding. The tolerance
/// is the larger of four times the `K`-vs-`2K` change in the residual and a
/// rounding floor of `2^-40` times the sum of the magnitudes involved.
pub fn telescope_check_with(
    q: &QuasiZetaSequences,
    k_max: u64,
    prec: u32,
    control: Option<NegativeControl>,
) -> Result<IdentityReport> {
    at_least("K", 1, k_max)?;
    check_prec(prec)?;
    if control == Some(NegativeControl::BreakConstraint) {
        return Err(Error::NotApplicable("break-constraint"));
    }
    let first = telescope_sides(q, k_max, prec, control)?;
    let second = telescope_sides(q, 2 * k_max, prec, control)?;
    let r1 = Float::with_val(prec, &first.lhs - &first.rhs);
    let r2 = Float::with_val(prec, &second.lhs - &second.rhs);
    let change = Float::with_val(prec, &r1 - &r2).abs();
    let floor = Float::with_val(prec, &first.magnitude) << ORACLE_ROUNDING_LOG2;
    let tolerance = (Float::with_val(prec, &change * 4u32)).max(&floor);
    let truncation = SeriesTruncation {
        terms: k_max,
        tail_bound_log2: log2_abs(&change, -1074.0),
    };
    Ok(Comparison {
        identity: IdentityName::Telescoping,
        m: q.depth,
        t: q.rate_ratio(),
        prec,
        report_prec: 64,
        lhs: first.lhs,
        rhs: first.rhs,
        tolerance_log2: log2_abs(&tolerance, -1074.0),
        zero_floor: -1074.0,
        truncations: vec![truncation],
        internal_checks: Vec::new(),
    }
    .finish())
}
