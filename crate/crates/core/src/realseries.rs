//! Multiprecision evaluation of the analytic side: pi, integer zeta values,
//! the exponential (Lambert-type) sums, coth sums, Mittag-Leffler partial
//! sums, and brute-force double sums used as oracles.
//!
//! Every certified evaluation at `prec` bits works internally at
//! `prec + GUARD_BITS` and truncates its series only once a proven tail bound
//! drops below `2^-(prec + GUARD_BITS)`. The result then carries an absolute
//! error of at most `2^(GUARD_BITS - prec)` (all certified values here are
//! of order one or smaller, so absolute and relative budgets coincide up to
//! a few bits). Rounding is to nearest throughout.

use std::f64::consts::LOG2_E;
use std::fmt;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};
use serde::{Serialize, Serializer};

use crate::error::{at_least, Error, Result};
use crate::exact::{factorial, BernoulliCache};

/// Extra internal bits consumed by composition error.
pub const GUARD_BITS: u32 = 32;

/// Smallest precision accepted anywhere in the crate.
pub const MIN_PREC: u32 = 64;

pub(crate) fn check_prec(prec: u32) -> Result<()> {
    if prec < MIN_PREC {
        Err(Error::Precision {
            min: MIN_PREC,
            value: prec,
        })
    } else {
        Ok(())
    }
}

/// An arbitrary-precision real tagged with the precision it is good to.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Real {
    value: Float,
}

impl Real {
    /// Rounds `value` to nearest at `prec` bits.
    pub fn new(value: &Float, prec: u32) -> Result<Real> {
        check_prec(prec)?;
        Ok(Real::rounded(value, prec))
    }

    pub(crate) fn rounded(value: &Float, prec: u32) -> Real {
        debug_assert!(prec >= MIN_PREC);
        Real {
            value: Float::with_val(prec, value),
        }
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Result<Real> {
        check_prec(prec)?;
        Ok(Real {
            value: Float::with_val(prec, q),
        })
    }

    /// Exact conversion; the result claims 64 bits.
    pub fn from_f64(x: f64) -> Real {
        Real {
            value: Float::with_val(MIN_PREC, x),
        }
    }

    pub fn value(&self) -> &Float {
        &self.value
    }

    pub fn into_float(self) -> Float {
        self.value
    }

    pub fn prec(&self) -> u32 {
        self.value.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// Number of significant decimal digits used when printing.
    pub fn decimal_digits(&self) -> usize {
        (self.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize
    }

    /// Decimal rendering with `ceil(prec * log10 2)` significant digits,
    /// in the form `d.ddd…e±x`.
    pub fn to_decimal(&self) -> String {
        self.value.to_string_radix(10, Some(self.decimal_digits()))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_decimal())
    }
}

/// Certification metadata for a truncated infinite series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesTruncation {
    /// Number of terms (or summation cut-off) actually used.
    pub terms: u64,
    /// log2 of an upper bound on the omitted part.
    #[serde(rename = "tail_log2")]
    pub tail_bound_log2: f64,
}

impl SeriesTruncation {
    pub fn is_certified_for(&self, prec: u32) -> bool {
        self.tail_bound_log2 <= -((prec + GUARD_BITS) as f64)
    }
}

/// log2 |x| as an f64, clamped below at `floor` (also returned for zero).
pub fn log2_abs(x: &Float, floor: f64) -> f64 {
    if x.is_zero() {
        return floor;
    }
    let mut y = Float::with_val(64, x.abs_ref());
    y.log2_mut();
    y.to_f64().max(floor)
}

pub fn pi(prec: u32) -> Result<Real> {
    check_prec(prec)?;
    Ok(Real {
        value: Float::with_val(prec, Constant::Pi),
    })
}

pub(crate) fn pi_float(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// `zeta(s)` for integer `s >= 2` by Euler–Maclaurin summation.
pub fn zeta_integer(s: i64, prec: u32) -> Result<Real> {
    zeta_integer_truncated(s, prec).map(|(z, _)| z)
}

/// As [`zeta_integer`], also returning the summation cut-off `N` and the
/// log2 remainder bound.
///
/// `zeta(s) = sum_{n<N} n^-s + N^(1-s)/(s-1) + N^-s/2
///           + sum_{j=1}^{J} B_2j/(2j)! s(s+1)…(s+2j-2) N^(-s-2j+1) + R_J`.
///
/// For real `s > 1` the remainder is bounded by the first omitted correction
/// term, which is what `tail_bound_log2` records.
pub fn zeta_integer_truncated(s: i64, prec: u32) -> Result<(Real, SeriesTruncation)> {
    check_prec(prec)?;
    if s < 2 {
        return Err(Error::UnsupportedExponent {
            s,
            reason: "zeta is only evaluated at integers s >= 2",
        });
    }
    let s = u32::try_from(s).map_err(|_| Error::UnsupportedExponent {
        s,
        reason: "exponent too large",
    })?;
    let wp = prec + GUARD_BITS;
    let mut cutoff = u64::from(wp).max(16);
    loop {
        if let Some((sum, bound)) = euler_maclaurin(s, cutoff, wp) {
            let trunc = SeriesTruncation {
                terms: cutoff,
                tail_bound_log2: bound,
            };
            return Ok((Real::rounded(&sum, prec), trunc));
        }
        cutoff *= 2;
    }
}

fn euler_maclaurin(s: u32, cutoff: u64, wp: u32) -> Option<(Float, f64)> {
    let target = -(wp as f64);
    let mut sum = Float::new(wp);
    for k in (1..cutoff).rev() {
        sum += Float::with_val(wp, k).pow(s).recip();
    }
    let n = Float::with_val(wp, cutoff);
    let n_pow = n.clone().pow(s - 1);
    sum += Float::with_val(wp, &n_pow * (s - 1)).recip();
    sum += (Float::with_val(wp, &n_pow * &n) * 2u32).recip();

    let n2 = Float::with_val(wp, n.square_ref());
    let inv_n2 = n2.clone().recip();
    // s(s+1)…(s+2j-2) * N^(-s-2j+1), starting at j = 1
    let mut factor = Float::with_val(wp, &n_pow * &n2).recip() * s;
    let cache = BernoulliCache::global();
    let mut previous = f64::INFINITY;
    for j in 1u32.. {
        let b = cache.get(2 * j as usize) / Rational::from(factorial(2 * j));
        let term = Float::with_val(wp, &b) * &factor;
        let size = log2_abs(&term, f64::NEG_INFINITY);
        if size < target {
            return Some((sum, size));
        }
        if size > previous {
            // asymptotic series turned around before reaching the target
            return None;
        }
        previous = size;
        sum += term;
        factor *= &inv_n2;
        factor *= (s + 2 * j - 1) as u64 * (s + 2 * j) as u64;
    }
    unreachable!()
}

fn check_lambert_exponent(s: i64) -> Result<u32> {
    if s < 3 || s % 2 == 0 {
        return Err(Error::UnsupportedExponent {
            s,
            reason: "expected an odd integer s >= 3",
        });
    }
    u32::try_from(s).map_err(|_| Error::UnsupportedExponent {
        s,
        reason: "exponent too large",
    })
}

/// log2 of the geometric tail bound
/// `sum_{n>N} n^-s/(e^(2an)-1) <= (N+1)^-s e^(-2a(N+1)) / (1-e^(-2a))^2`.
pub fn lambert_tail_log2(s: u32, a: f64, terms: u64) -> f64 {
    let next = (terms + 1) as f64;
    let one_minus_q = -(-2.0 * a).exp_m1();
    -(s as f64) * next.log2() - 2.0 * a * next * LOG2_E - 2.0 * one_minus_q.log2()
}

/// Smallest `N` whose tail bound is below `2^-bits`, with one bit to spare
/// for the f64 evaluation of the bound.
pub fn lambert_terms_needed(s: u32, a: f64, bits: u32) -> u64 {
    let goal = -(bits as f64) - 1.0;
    let ok = |n: u64| lambert_tail_log2(s, a, n) < goal;
    let mut hi = 1u64;
    while !ok(hi) {
        hi *= 2;
    }
    let mut lo = 0u64;
    // invariant: !ok(lo) or lo == 0, ok(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `sum_{n>=1} n^-s / (e^(2an) - 1)` for odd `s >= 3` and `a > 0`.
pub fn lambert_sum(s: i64, a: &Real, prec: u32) -> Result<(Real, SeriesTruncation)> {
    check_prec(prec)?;
    let s = check_lambert_exponent(s)?;
    if *a.value() <= 0 {
        return Err(Error::NotPositive("a"));
    }
    let wp = prec + GUARD_BITS;
    let terms = lambert_terms_needed(s, a.to_f64(), wp);
    // Terms are q^n / ((1 - q^n) n^s) with q = e^(-2a). Forming q^n by
    // repeated multiplication costs up to log2(n) bits, and 1 - q^n loses
    // log2(1/(1 - q)) more when a is small.
    let one_minus_q = -(-2.0 * a.to_f64()).exp_m1();
    let extra = (terms as f64 + 4.0).log2().ceil() + (-one_minus_q.log2()).max(0.0).ceil() + 4.0;
    let ip = wp + extra as u32;
    let mut q = Float::with_val(ip, a.value() * -2i32);
    q.exp_mut();
    let mut qn = Float::with_val(ip, 1u32);
    let mut sum = Float::new(ip);
    for n in 1..=terms {
        qn *= &q;
        let mut denom = Float::with_val(ip, 1u32 - &qn);
        denom *= Float::with_val(ip, n).pow(s);
        sum += Float::with_val(ip, &qn / &denom);
    }
    let trunc = SeriesTruncation {
        terms,
        tail_bound_log2: lambert_tail_log2(s, a.to_f64(), terms),
    };
    Ok((Real::rounded(&sum, prec), trunc))
}

/// `sum_{n>=1} coth(pi n) / n^s` for `s = 4m + 3`, evaluated as
/// `zeta(s) + 2 * lambert_sum(s, pi)`.
///
/// Truncations are reported as `[zeta, lambert]`.
pub fn coth_sum(s: i64, prec: u32) -> Result<(Real, Vec<SeriesTruncation>)> {
    check_prec(prec)?;
    if s < 3 || s % 4 != 3 {
        return Err(Error::UnsupportedExponent {
            s,
            reason: "expected s = 4m + 3",
        });
    }
    let wp = prec + GUARD_BITS;
    let (zeta, tz) = zeta_integer_truncated(s, wp)?;
    let pi = Real::rounded(&pi_float(wp + GUARD_BITS), wp + GUARD_BITS);
    let (lambert, tl) = lambert_sum(s, &pi, wp)?;
    let value = Float::with_val(wp, lambert.value() * 2u32) + zeta.value();
    Ok((Real::rounded(&value, prec), vec![tz, tl]))
}

/// Partial sum of the Mittag-Leffler expansion
/// `coth(pi x) = 1/(pi x) + (2x/pi) sum_k 1/(x^2 + k^2)`
/// together with the integral-comparison bracket on the omitted tail.
#[derive(Clone, Debug)]
pub struct MittagLefflerSum {
    pub value: Real,
    pub truncation: SeriesTruncation,
    /// `(2/pi) atan(x/(K+1))`, a lower bound on the omitted tail.
    pub tail_lower: Real,
    /// `(2/pi) atan(x/K)`, an upper bound on the omitted tail.
    pub tail_upper: Real,
}

/// Oracle-grade: converges like `O(1/K)` and is not certified to `prec`.
pub fn mittag_leffler_coth(x: &Real, k_max: u64, prec: u32) -> Result<MittagLefflerSum> {
    check_prec(prec)?;
    if *x.value() <= 0 {
        return Err(Error::NotPositive("x"));
    }
    at_least("K", 1, k_max)?;
    let wp = prec + GUARD_BITS;
    let pi = pi_float(wp);
    let x = Float::with_val(wp, x.value());
    let x2 = Float::with_val(wp, x.square_ref());
    let mut sum = Float::new(wp);
    for k in (1..=k_max).rev() {
        let k2 = Float::with_val(wp, k) * k;
        sum += (k2 + &x2).recip();
    }
    let scale = Float::with_val(wp, &x * 2u32) / &pi;
    let mut value = Float::with_val(wp, &x * &pi).recip();
    value += sum * &scale;

    let bracket = |c: u64| {
        let mut r = Float::with_val(wp, &x / c);
        r.atan_mut();
        r * 2u32 / &pi
    };
    let upper = bracket(k_max);
    let lower = bracket(k_max + 1);
    let trunc = SeriesTruncation {
        terms: k_max,
        tail_bound_log2: log2_abs(&upper, f64::NEG_INFINITY),
    };
    Ok(MittagLefflerSum {
        value: Real::rounded(&value, prec),
        truncation: trunc,
        tail_lower: Real::rounded(&lower, prec),
        tail_upper: Real::rounded(&upper, prec),
    })
}

/// Compensated (Neumaier) accumulator.
#[derive(Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    carry: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(self) -> f64 {
        self.sum + self.carry
    }
}

fn check_even(name: &'static str, e: u32) -> Result<()> {
    if !e.is_multiple_of(2) {
        return Err(Error::UnsupportedExponent {
            s: e as i64,
            reason: match name {
                "exponent_n" => "exponent_n must be even",
                _ => "exponent_k must be even",
            },
        });
    }
    Ok(())
}

/// Brute-force square truncation
/// `sum_{n=1}^{N} sum_{k=1}^{N} 1 / (n^en k^ek (k^2 + a2 n^2))`.
///
/// Oracle-grade only: evaluated in compensated double precision and returned
/// as a 64-bit [`Real`]; the omitted tail decays like `O(1/N)`. Both
/// exponents must be even and at least one of them positive.
pub fn double_sum_truncated(
    a2: &Real,
    exponent_n: u32,
    exponent_k: u32,
    n_max: u64,
) -> Result<Real> {
    at_least("N", 1, n_max)?;
    check_even("exponent_n", exponent_n)?;
    check_even("exponent_k", exponent_k)?;
    if exponent_n + exponent_k < 2 {
        return Err(Error::UnsupportedExponent {
            s: 0,
            reason: "at least one exponent must be >= 2",
        });
    }
    if *a2.value() <= 0 {
        return Err(Error::NotPositive("a2"));
    }
    let a2 = a2.to_f64();
    let squares: Vec<f64> = (1..=n_max).map(|i| (i * i) as f64).collect();
    let pow = |e: u32| -> Vec<f64> { (1..=n_max).map(|i| (i as f64).powi(e as i32)).collect() };
    let pow_n = pow(exponent_n);
    let pow_k = pow(exponent_k);

    let mut total = Neumaier::default();
    for (n2, pn) in squares.iter().zip(&pow_n) {
        let shift = a2 * n2;
        let mut row = Neumaier::default();
        // small terms first
        for (k2, pk) in squares.iter().zip(&pow_k).rev() {
            row.add(1.0 / (pk * (k2 + shift)));
        }
        total.add(row.total() / pn);
    }
    Ok(Real::from_f64(total.total()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const ZETA3: &str = "1.20205690315959428539973816151144999076498629234049888179227";
    const LAMBERT_3_PI: &str = "0.0018713727593660273788370455490243557718874648330721";

    fn parse(s: &str, prec: u32) -> Float {
        Float::with_val(prec, Float::parse(s).unwrap())
    }

    fn diff_log2(a: &Float, b: &Float) -> f64 {
        let d = Float::with_val(a.prec().max(b.prec()) + 64, a - b);
        log2_abs(&d, -1.0e9)
    }

    #[test]
    fn pi_digits() {
        let p = pi(256).unwrap();
        assert!(p.to_decimal().starts_with(
            "3.141592653589793238462643383279502884197169399375105820974944592307816"
        ));
        let coarse = pi(64).unwrap().to_decimal();
        assert!(coarse.starts_with("3.14159265358979323"), "{coarse}");
        assert!(pi(63).is_err());
    }

    #[test]
    fn pi_refines_consistently() {
        let fine = pi(512).unwrap();
        let coarse = pi(256).unwrap();
        assert_eq!(Real::rounded(fine.value(), 256), coarse);
    }

    #[test]
    fn zeta_three_matches_reference() {
        let z = zeta_integer(3, 192).unwrap();
        assert!(diff_log2(z.value(), &parse(ZETA3, 256)) < -(192.0 - 32.0));
    }

    #[test]
    fn zeta_rejects_small_s() {
        assert!(zeta_integer(1, 128).is_err());
        assert!(zeta_integer(-4, 128).is_err());
    }

    #[test]
    fn zeta_truncation_is_certified() {
        for s in [2, 3, 7, 20] {
            let (_, t) = zeta_integer_truncated(s, 256).unwrap();
            assert!(t.is_certified_for(256), "s = {s}: {t:?}");
        }
    }

    #[test]
    fn lambert_pi_matches_reference() {
        let a = pi(256).unwrap();
        let (v, t) = lambert_sum(3, &a, 160).unwrap();
        assert!(diff_log2(v.value(), &parse(LAMBERT_3_PI, 200)) < -150.0);
        assert!(t.is_certified_for(160));
    }

    #[test]
    fn lambert_rejects_bad_input() {
        let a = pi(128).unwrap();
        assert!(lambert_sum(4, &a, 128).is_err());
        assert!(lambert_sum(1, &a, 128).is_err());
        let zero = Real::from_f64(0.0);
        assert_eq!(
            lambert_sum(3, &zero, 128).unwrap_err(),
            Error::NotPositive("a")
        );
    }

    #[test]
    fn lambert_large_argument_is_dominated_by_first_term() {
        let a = Real::from_f64(20.0);
        let (v, _) = lambert_sum(3, &a, 128).unwrap();
        let bound = (-40.0f64).exp() / (1.0 - (-40.0f64).exp()) * 1.01;
        assert!(v.to_f64() < bound);
        assert!(v.to_f64() > 0.0);
    }

    #[test]
    fn lambert_decreases_in_s() {
        let a = Real::from_f64(0.7);
        let values: Vec<f64> = (1..8)
            .map(|i| lambert_sum(2 * i + 1, &a, 96).unwrap().0.to_f64())
            .collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
        let first = 1.0 / ((1.4f64).exp() - 1.0);
        assert!(values.iter().all(|&v| v > first));
    }

    #[test]
    fn small_argument_needs_more_terms() {
        let few = lambert_terms_needed(3, 3.0, 256);
        let many = lambert_terms_needed(3, 0.01, 256);
        assert!(many > 10 * few);
        assert!(lambert_tail_log2(3, 0.01, many) < -257.0);
        assert!(lambert_tail_log2(3, 0.01, many - 1) >= -257.0);
    }

    #[test]
    fn coth_sum_checks_exponent() {
        assert!(coth_sum(5, 128).is_err());
        assert!(coth_sum(-1, 128).is_err());
        let (v, t) = coth_sum(3, 128).unwrap();
        assert!(v.to_f64() > 1.2020569);
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn mittag_leffler_small_x_limit() {
        let x = Real::from_f64(1e-6);
        let ml = mittag_leffler_coth(&x, 1000, 128).unwrap();
        let pole = 1.0 / (std::f64::consts::PI * 1e-6);
        let rest = ml.value.to_f64() - pole;
        assert!(rest.abs() < 1e-5, "{rest}");
    }

    #[test]
    fn mittag_leffler_rejects() {
        let x = Real::from_f64(-1.0);
        assert!(mittag_leffler_coth(&x, 10, 128).is_err());
        assert!(mittag_leffler_coth(&Real::from_f64(1.0), 0, 128).is_err());
    }

    #[test]
    fn double_sum_rejects() {
        let one = Real::from_f64(1.0);
        assert!(double_sum_truncated(&one, 6, 0, 0).is_err());
        assert!(double_sum_truncated(&one, 3, 0, 10).is_err());
        assert!(double_sum_truncated(&one, 0, 0, 10).is_err());
        assert!(double_sum_truncated(&Real::from_f64(0.0), 2, 0, 10).is_err());
    }

    #[test]
    fn double_sum_tail_halves() {
        let one = Real::from_f64(1.0);
        let s = |n| double_sum_truncated(&one, 6, 0, n).unwrap().to_f64();
        let (a, b, c) = (s(200), s(400), s(800));
        assert!((c - b).abs() * 2.0 <= (b - a).abs() * 1.01);
    }

    #[test]
    fn double_sum_index_swap() {
        let one = Real::from_f64(1.0);
        let x = double_sum_truncated(&one, 6, 0, 300).unwrap().to_f64();
        let y = double_sum_truncated(&one, 0, 6, 300).unwrap().to_f64();
        assert!(((x - y) / x).abs() < 1e-14);
    }

    #[test]
    fn decimal_digits_follow_precision() {
        assert_eq!(pi(64).unwrap().decimal_digits(), 20);
        assert_eq!(pi(256).unwrap().decimal_digits(), 78);
    }
}
