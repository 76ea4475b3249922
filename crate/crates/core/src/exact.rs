//! Exact rational arithmetic: Bernoulli numbers and every identity that can be
//! checked without touching floating point.
//!
//! Bernoulli numbers follow the `z / (e^z - 1)` convention, so `B_1 = -1/2`.
//! All coefficients are returned as lowest-terms [`Rational`]s; their `Display`
//! form is `p/q`, or `p` when the denominator is one.

use std::sync::{OnceLock, RwLock};

use rug::ops::Pow;
use rug::{Complete, Integer};

pub use rug::Rational;

use crate::error::{at_least, Result};

/// Append-only memo table of Bernoulli numbers.
///
/// Readers share a read lock; extension takes the write lock and re-checks the
/// high-water mark, so two threads asking for the same index compute it once.
#[derive(Debug)]
pub struct BernoulliCache {
    table: RwLock<Vec<Rational>>,
}

impl Default for BernoulliCache {
    fn default() -> Self {
        Self::new()
    }
}

impl BernoulliCache {
    pub fn new() -> Self {
        BernoulliCache {
            table: RwLock::new(vec![Rational::from(1), Rational::from((-1, 2))]),
        }
    }

    /// Process-wide cache used by the coefficient functions in this module.
    pub fn global() -> &'static BernoulliCache {
        static CACHE: OnceLock<BernoulliCache> = OnceLock::new();
        CACHE.get_or_init(BernoulliCache::new)
    }

    /// Largest index currently stored.
    pub fn high_water(&self) -> usize {
        self.table.read().expect("bernoulli cache poisoned").len() - 1
    }

    pub fn get(&self, n: usize) -> Rational {
        {
            let table = self.table.read().expect("bernoulli cache poisoned");
            if let Some(b) = table.get(n) {
                return b.clone();
            }
        }
        let mut table = self.table.write().expect("bernoulli cache poisoned");
        while table.len() <= n {
            let next = next_bernoulli(&table);
            table.push(next);
        }
        table[n].clone()
    }

    /// Calls `f` with the table guaranteed to cover indices `0..=n`.
    pub fn with_table<R>(&self, n: usize, f: impl FnOnce(&[Rational]) -> R) -> R {
        self.get(n);
        let table = self.table.read().expect("bernoulli cache poisoned");
        f(&table[..=n])
    }
}

// B_n = -1/(n+1) * sum_{j<n} C(n+1, j) B_j, skipping the vanishing odd terms.
fn next_bernoulli(table: &[Rational]) -> Rational {
    let n = table.len();
    if n >= 3 && n % 2 == 1 {
        return Rational::new();
    }
    let n1 = (n + 1) as u32;
    let mut sum = Rational::new();
    for (j, b) in table.iter().enumerate() {
        if j >= 3 && j % 2 == 1 {
            continue;
        }
        let c = Integer::binomial_u(n1, j as u32).complete();
        sum += b * Rational::from(c);
    }
    -sum / Rational::from(n1)
}

/// `B_n` under the `z / (e^z - 1)` convention.
pub fn bernoulli(n: usize, cache: &BernoulliCache) -> Rational {
    cache.get(n)
}

pub fn factorial(n: u32) -> Integer {
    Integer::factorial(n).complete()
}

fn pow2(e: u32) -> Rational {
    Rational::from(Integer::from(1) << e)
}

fn sign(odd: bool) -> i32 {
    if odd {
        -1
    } else {
        1
    }
}

/// `B_i B_j / (i! j!)`.
fn bernoulli_pair(table: &[Rational], i: usize, j: usize) -> Rational {
    let num = Rational::from(&table[i] * &table[j]);
    num / Rational::from(factorial(i as u32) * factorial(j as u32))
}

/// The rational `c` with `zeta(2m) = c * pi^(2m)`.
pub fn euler_zeta_coefficient(m: u32) -> Result<Rational> {
    at_least("m", 1, m as u64)?;
    let b = bernoulli(2 * m as usize, BernoulliCache::global());
    let c = pow2(2 * m) * b / Rational::from(2 * factorial(2 * m));
    Ok(c * sign(m.is_multiple_of(2)))
}

/// Coefficients of the bilinear Bernoulli sum on the right of Ramanujan's
/// formula, indexed `k = 0..=m+1`:
///
/// `2^(2m) (-1)^(k-1) B_2k B_(2m-2k+2) / ((2k)! (2m-2k+2)!)`
///
/// The right-hand side is `sum_k coeffs[k] * alpha^(m-k+1) * beta^k`.
pub fn ramanujan_bernoulli_coeffs(m: u32) -> Result<Vec<Rational>> {
    at_least("m", 1, m as u64)?;
    let m = m as usize;
    let scale = pow2(2 * m as u32);
    Ok(BernoulliCache::global().with_table(2 * m + 2, |b| {
        (0..=m + 1)
            .map(|k| bernoulli_pair(b, 2 * k, 2 * m + 2 - 2 * k) * &scale * sign(k % 2 == 0))
            .collect()
    }))
}

/// Coefficients of the coth form, indexed `k = 0..=m+1`:
///
/// `-2^(2m+1) (-1)^k B_2k B_(2m+2-2k) / ((2k)! (2m+2-2k)!)`
///
/// Computed from the Bernoulli table directly rather than by rescaling
/// [`ramanujan_bernoulli_coeffs`], so the two normalisations check each other.
pub fn coth_variant_coeffs(m: u32) -> Result<Vec<Rational>> {
    at_least("m", 1, m as u64)?;
    let m = m as usize;
    let scale = -pow2(2 * m as u32 + 1);
    Ok(BernoulliCache::global().with_table(2 * m + 2, |b| {
        (0..=m + 1)
            .map(|k| bernoulli_pair(b, 2 * k, 2 * m + 2 - 2 * k) * &scale * sign(k % 2 == 1))
            .collect()
    }))
}

/// The rational `r` with `sum_n coth(pi n) / n^(4m+3) = r * pi^(4m+3)`.
pub fn lerch_rational_coefficient(m: u32) -> Rational {
    lerch_terms(m).into_iter().sum::<Rational>()
}

/// The individual `k = 0..=2m+2` summands of [`lerch_rational_coefficient`].
pub fn lerch_terms(m: u32) -> Vec<Rational> {
    let m = m as usize;
    let top = 4 * m + 4;
    let scale = pow2(top as u32 - 2);
    BernoulliCache::global().with_table(top, |b| {
        (0..=2 * m + 2)
            .map(|k| bernoulli_pair(b, 2 * k, top - 2 * k) * &scale * sign(k % 2 == 0))
            .collect()
    })
}

/// `sum_{k=0}^{2m} (-1)^(k-1) B_2k B_(4m-2k) / ((2k)! (4m-2k)!)`.
fn bernoulli_convolution(b: &[Rational], m: usize) -> Rational {
    (0..=2 * m)
        .map(|k| bernoulli_pair(b, 2 * k, 4 * m - 2 * k) * sign(k % 2 == 0))
        .sum()
}

/// The Bernoulli convolution folded about its midpoint `k = m`:
/// `-2 B_4m/(4m)! + (-1)^(m-1) B_2m^2/((2m)!)^2 + 2 sum_{k=1}^{m-1} (-1)^(k-1) B_2k B_(4m-2k)/((2k)! (4m-2k)!)`.
///
/// The endpoints `k = 0` and `k = 2m` each contribute `-B_4m/(4m)!`, hence
/// the factor two on the boundary term.
pub fn folded_bernoulli_convolution(m: u32) -> Result<Rational> {
    at_least("m", 1, m as u64)?;
    let m = m as usize;
    Ok(BernoulliCache::global().with_table(4 * m, |b| {
        let mut folded = -bernoulli_pair(b, 0, 4 * m) * 2;
        folded += bernoulli_pair(b, 2 * m, 2 * m) * sign(m.is_multiple_of(2));
        let inner: Rational = (1..m)
            .map(|k| bernoulli_pair(b, 2 * k, 4 * m - 2 * k) * sign(k % 2 == 0))
            .sum();
        folded + inner * 2
    }))
}

/// Exact check that the Bernoulli convolution is invariant under
/// `k -> 2m - k`, i.e. that the full `k = 0..=2m` sum equals
/// [`folded_bernoulli_convolution`].
pub fn fold_symmetry_check(m: u32) -> Result<bool> {
    let folded = folded_bernoulli_convolution(m)?;
    let m = m as usize;
    let full = BernoulliCache::global().with_table(4 * m, |b| bernoulli_convolution(b, m));
    Ok(full == folded)
}

/// Exact check of the even-zeta convolution
/// `zeta(4m) + (-1)^(m-1) zeta(2m)^2 + 2 sum_{k=1}^{m-1} (-1)^(k-1) zeta(4m-2k) zeta(2k)`
/// against `2^(4m-2) pi^(4m)` times the Bernoulli convolution, comparing the
/// rational coefficients of `pi^(4m)`.
pub fn zeta_convolution_rational_check(m: u32) -> Result<bool> {
    at_least("m", 1, m as u64)?;
    let c = |j: u32| euler_zeta_coefficient(j).expect("index >= 1");
    let mut lhs = c(2 * m);
    lhs += c(m).square() * sign(m.is_multiple_of(2));
    for k in 1..m {
        lhs += c(2 * m - k) * c(k) * 2 * sign(k % 2 == 0);
    }
    let mu = m as usize;
    let rhs = BernoulliCache::global()
        .with_table(4 * mu, |b| bernoulli_convolution(b, mu) * pow2(4 * m - 2));
    Ok(lhs == rhs)
}

/// One stage of the quasisymmetric telescoping:
/// `1/(x^n (x+z)) = 1/(x^n z) - 1/(x^(n-1) z (x+z))`, evaluated exactly.
///
/// Returns `false` when either side is undefined (`x`, `z` or `x + z` zero).
pub fn telescope_step_holds(x: &Rational, z: &Rational, n: u32) -> bool {
    let sum = Rational::from(x + z);
    if *x == 0 || *z == 0 || sum == 0 || n == 0 {
        return false;
    }
    let xn = x.clone().pow(n as i32);
    let lhs = (&xn * &sum).complete().recip();
    let first = (&xn * z).complete().recip();
    let xn1 = x.clone().pow(n as i32 - 1);
    let second = (xn1 * z.clone() * sum).recip();
    lhs == first - second
}
