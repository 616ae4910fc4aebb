//! Upper tails of the hypergeometric distribution.
//!
//! A receiver drawing `draws` molecules without replacement from a
//! reservoir holding `pop_success` evidence molecules out of `pop_total`
//! decodes correctly when it sees at least `threshold` of them. The
//! decision probabilities are therefore hypergeometric upper tails, and
//! they must stay trustworthy from desk-sized populations up to hundreds
//! of millions of molecules.
//!
//! Two disjoint evaluation routes cover that range:
//!
//! * populations up to [`EXACT_POPULATION_CUTOFF`] go through big-integer
//!   arithmetic: the tail is a ratio of two exact integers, rounded once
//!   at the end;
//! * larger populations use log-space probability mass, anchored at the
//!   distribution's mode and walked outward with the term-ratio
//!   recurrence, summing compensated relative terms until they fall below
//!   resolution.
//!
//! The routes overlap nowhere in production but are cross-checked against
//! each other in tests, along with an independent rational-arithmetic
//! enumeration oracle in the integration suite.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::kahan::KahanSum;

/// Largest population evaluated by exact big-integer arithmetic.
pub const EXACT_POPULATION_CUTOFF: u64 = 10_000;

/// Relative term size below which the mode walk stops adding mass.
const WALK_EPSILON: f64 = 1e-18;

/// Probability that a sample of `draws` taken without replacement from
/// `pop_total` molecules, `pop_success` of which count as evidence,
/// contains at least `threshold` evidence molecules.
///
/// Thresholds at or below the support's lower edge give exactly 1,
/// thresholds above its upper edge exactly 0. `pop_success` and `draws`
/// must not exceed the population.
pub fn hypergeometric_tail(
    pop_success: u64,
    pop_total: u64,
    draws: u64,
    threshold: u64,
) -> Result<f64> {
    if pop_success > pop_total || draws > pop_total {
        return Err(Error::HypergeomDomain {
            pop_success,
            pop_total,
            draws,
        });
    }
    // Support of the count: it can't exceed the draws or the evidence
    // present, and it can't fall below what's left after the sample has
    // soaked up every non-evidence molecule.
    let lo = draws.saturating_sub(pop_total - pop_success);
    let hi = draws.min(pop_success);
    if threshold <= lo {
        return Ok(1.0);
    }
    if threshold > hi {
        return Ok(0.0);
    }
    if pop_total <= EXACT_POPULATION_CUTOFF {
        Ok(tail_exact(pop_success, pop_total, draws, threshold, hi))
    } else {
        Ok(tail_log_walk(pop_success, pop_total, draws, threshold, lo, hi))
    }
}

/// Exact binomial coefficient via the multiplicative recurrence; every
/// intermediate division is exact.
fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for j in 1..=k {
        acc = acc * BigUint::from(n - k + j) / BigUint::from(j);
    }
    acc
}

/// Rounds an exact non-negative rational `num / den` (with `num <= den`)
/// to f64. Both integers can far exceed f64 range, so they are first
/// shifted right together until the denominator fits comfortably; the
/// shift cancels in the ratio and leaves about a thousand significant
/// bits, far more than the final division keeps.
fn big_ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits().saturating_sub(1000);
    let n = (num >> shift).to_f64().expect("shifted numerator fits f64");
    let d = (den >> shift).to_f64().expect("shifted denominator fits f64");
    n / d
}

fn tail_exact(pop_success: u64, pop_total: u64, draws: u64, threshold: u64, hi: u64) -> f64 {
    let k = pop_success;
    let t = pop_total;
    let n = draws;
    // First term of the tail, then the ratio recurrence
    //   w(i+1) = w(i) * (k-i)(n-i) / ((i+1)(t-k-n+i+1)),
    // multiplying before dividing so every division is exact.
    let mut term = binomial(k, threshold) * binomial(t - k, n - threshold);
    let mut sum = term.clone();
    for i in threshold..hi {
        // t-k+i+1 >= n+1 throughout the support, so this cannot underflow.
        term = term * BigUint::from((k - i) * (n - i))
            / BigUint::from((i + 1) * (t - k + i + 1 - n));
        sum += &term;
    }
    big_ratio_to_f64(&sum, &binomial(t, n))
}

/// Log of the binomial coefficient for moderate `k` (the draw sizes),
/// summed in compensated form to keep the later exponentiation honest.
fn ln_binomial_small(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    let mut acc = KahanSum::default();
    for j in 0..k {
        acc.add(((n - j) as f64 / (j + 1) as f64).ln());
    }
    acc.value()
}

/// Log of the probability mass at `i`, written as a product of bounded
/// ratios so no factor overflows even for populations of 1e9:
///
/// ```text
/// pmf(i) = C(draws, i) * prod_{j<i} (k-j)/(t-j)
///                      * prod_{j<draws-i} (t-k-j)/(t-i-j)
/// ```
fn ln_pmf(pop_success: u64, pop_total: u64, draws: u64, i: u64) -> f64 {
    let k = pop_success;
    let t = pop_total;
    let mut acc = KahanSum::default();
    acc.add(ln_binomial_small(draws, i));
    for j in 0..i {
        acc.add((((k - j) as f64) / ((t - j) as f64)).ln());
    }
    for j in 0..(draws - i) {
        acc.add((((t - k - j) as f64) / ((t - i - j) as f64)).ln());
    }
    acc.value()
}

fn tail_log_walk(
    pop_success: u64,
    pop_total: u64,
    draws: u64,
    threshold: u64,
    _lo: u64,
    hi: u64,
) -> f64 {
    let k = pop_success;
    let t = pop_total;
    let n = draws;
    // Anchor at the mode (clamped into the summation range) so every
    // relative term is at most 1 and the walk decays in both directions.
    let mode = ((n as u128 + 1) * (k as u128 + 1) / (t as u128 + 2)) as u64;
    let anchor = mode.clamp(threshold, hi);
    let ln_anchor = ln_pmf(k, t, n, anchor);

    let up_ratio = |i: u64| {
        ((k - i) as f64 * (n - i) as f64) / ((i + 1) as f64 * (t - k + i + 1 - n) as f64)
    };
    let mut total = KahanSum::default();
    total.add(1.0);
    let mut rel = 1.0;
    for i in anchor..hi {
        rel *= up_ratio(i);
        total.add(rel);
        if rel < WALK_EPSILON {
            break;
        }
    }
    rel = 1.0;
    for i in ((threshold + 1)..=anchor).rev() {
        // Inverse of the upward ratio, stepping from i to i-1.
        rel *= (i as f64 * (t - k + i - n) as f64) / ((k - i + 1) as f64 * (n - i + 1) as f64);
        total.add(rel);
        if rel < WALK_EPSILON {
            break;
        }
    }
    (ln_anchor + total.value().ln()).exp().min(1.0)
}
