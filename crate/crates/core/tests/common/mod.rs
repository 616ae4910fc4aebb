//! Reference oracles for the integration tests.
//!
//! Everything here recomputes model quantities through routes the library
//! does not use: factorial-ratio binomials and exact rationals instead of
//! the multiplicative recurrences, and Simpson quadrature instead of erfc.
//! Keep it that way; the tests lean on the independence.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// n! as a big integer, by plain repeated multiplication.
fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Binomial coefficient from factorials. Zero when k exceeds n, matching
/// the empty selection count.
pub fn binom_ref(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Upper tail P(X >= threshold) of a hypergeometric count, as an exact
/// rational: draws from pop_total with pop_success marked successes.
pub fn hypergeom_tail_rational(
    pop_success: u64,
    pop_total: u64,
    draws: u64,
    threshold: u64,
) -> BigRational {
    let mut numer = BigInt::zero();
    for i in threshold..=draws.min(pop_success) {
        numer += binom_ref(pop_success, i) * binom_ref(pop_total - pop_success, draws - i);
    }
    BigRational::new(numer, binom_ref(pop_total, draws))
}

/// Rational to f64 for the small instances these tests use (numerator and
/// denominator both well inside the 2^53 integer range).
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let n = r.numer().abs().to_f64().expect("oracle numerator fits f64");
    let d = r.denom().abs().to_f64().expect("oracle denominator fits f64");
    let mag = n / d;
    if r.is_negative() {
        -mag
    } else {
        mag
    }
}

/// Standard normal CDF by composite Simpson quadrature of the density
/// over [0, |x|], reflected for negative arguments. Panel count keeps the
/// quadrature error near 1e-12 for |x| <= 9, well under the comparison
/// tolerances used against it.
pub fn normal_cdf_quadrature(x: f64) -> f64 {
    let ax = x.abs();
    let panels = 4000usize;
    let h = ax / panels as f64;
    let density = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = density(0.0) + density(ax);
    for k in 1..panels {
        let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += weight * density(k as f64 * h);
    }
    let integral = acc * h / 3.0;
    if x >= 0.0 {
        0.5 + integral
    } else {
        0.5 - integral
    }
}
