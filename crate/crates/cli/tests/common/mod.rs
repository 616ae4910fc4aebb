//! Reference oracle for the acceptance suite.
//!
//! Recomputes the exact detector probabilities through a route the library
//! does not use: factorial-ratio binomials summed as exact big-integer
//! rationals, instead of the multiplicative tail recurrence. Keep it that
//! way; the acceptance checks lean on the independence.

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
