//! Bit-error analytics for ratio-shift keying.
//!
//! Bits are encoded by which reservoir a burst of `n_emit` molecules is
//! drawn from: bit 0 from L, bit 1 from H. After the transmitter has moved
//! molecules around, L is rich in one species and H in the other, so the
//! receiver counts evidence molecules in the burst and compares against a
//! threshold. Both decision probabilities are hypergeometric tails; this
//! module computes them exactly, via the normal approximation, and sets up
//! the shared decision-rule plumbing the Monte Carlo path also uses.
//!
//! Orientation matters: moving i2 out of L enriches L in i1 and H in i2,
//! moving i1 out does the opposite, and the evidence species and
//! thresholds swap with it. The symmetric layout below keeps the two
//! orientations exact mirror images of each other, which is also a useful
//! correctness check.

use crate::error::{Error, Result};
use crate::hypergeom::hypergeometric_tail;
use crate::reservoir::{ConcentrationConvention, Reservoir, ReservoirPair, Species};

/// Which species the transmitter has been moving. Decides the evidence
/// species for each bit and which threshold goes where.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// i2 moved out of L: bit 0 is witnessed by i1, bit 1 by i2.
    MovedI2,
    /// i1 moved out of L: bit 0 is witnessed by i2, bit 1 by i1.
    MovedI1,
}

impl Orientation {
    /// Species whose presence in an L-burst argues for bit 0.
    pub fn bit0_evidence(self) -> Species {
        match self {
            Orientation::MovedI2 => Species::I1,
            Orientation::MovedI1 => Species::I2,
        }
    }

    /// Species whose presence in an H-burst argues for bit 1.
    pub fn bit1_evidence(self) -> Species {
        self.bit0_evidence().other()
    }
}

impl std::fmt::Display for Orientation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Orientation::MovedI2 => write!(f, "moved_i2"),
            Orientation::MovedI1 => write!(f, "moved_i1"),
        }
    }
}

/// Decision thresholds for a burst of `n_emit` molecules from a pair
/// initialized at `c2_init`: the receiver declares the bit when the
/// evidence count reaches `floor(n_emit * share) + 1`, where `share` is
/// the evidence species' initial share in the emitting reservoir. Returns
/// `(t0, t1)`.
pub fn thresholds(c2_init: f64, n_emit: u64, orientation: Orientation) -> Result<(u64, u64)> {
    if n_emit == 0 {
        return Err(Error::ZeroEmission);
    }
    if !(c2_init.is_finite() && 0.0 < c2_init && c2_init < 1.0) {
        return Err(Error::ConcentrationOutOfRange(c2_init));
    }
    let on_c2 = ((n_emit as f64 * c2_init).floor() as u64 + 1).min(n_emit);
    let on_complement = ((n_emit as f64 * (1.0 - c2_init)).floor() as u64 + 1).min(n_emit);
    Ok(match orientation {
        // Bit 0 evidence is the species L gets enriched in.
        Orientation::MovedI2 => (on_complement, on_c2),
        Orientation::MovedI1 => (on_c2, on_complement),
    })
}

/// A fixed receiver: burst size, per-bit thresholds, orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecisionRule {
    pub n_emit: u64,
    pub t0: u64,
    pub t1: u64,
    pub orientation: Orientation,
}

impl DecisionRule {
    /// The standard rule for a pair initialized at `c2_init`; see
    /// [`thresholds`].
    pub fn new(c2_init: f64, n_emit: u64, orientation: Orientation) -> Result<Self> {
        let (t0, t1) = thresholds(c2_init, n_emit, orientation)?;
        Ok(DecisionRule {
            n_emit,
            t0,
            t1,
            orientation,
        })
    }

    /// A rule with explicit thresholds, each within `1..=n_emit`.
    pub fn with_thresholds(
        n_emit: u64,
        t0: u64,
        t1: u64,
        orientation: Orientation,
    ) -> Result<Self> {
        if n_emit == 0 {
            return Err(Error::ZeroEmission);
        }
        for t in [t0, t1] {
            if t == 0 || t > n_emit {
                return Err(Error::ThresholdOutOfRange { t, n_emit });
            }
        }
        Ok(DecisionRule {
            n_emit,
            t0,
            t1,
            orientation,
        })
    }
}

/// Which evaluator produced a [`BerEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BerMethod {
    ExactHypergeometric,
    NormalApprox,
    MonteCarlo,
}

impl std::fmt::Display for BerMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BerMethod::ExactHypergeometric => write!(f, "exact"),
            BerMethod::NormalApprox => write!(f, "normal"),
            BerMethod::MonteCarlo => write!(f, "mc"),
        }
    }
}

/// Decision probabilities and the resulting error rate under equal priors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerEstimate {
    pub p_correct_given_0: f64,
    pub p_correct_given_1: f64,
    pub p_error: f64,
    pub method: BerMethod,
    /// Half-width of the 95% normal confidence interval on `p_error`;
    /// only Monte Carlo estimates carry one.
    pub mc_half_width: Option<f64>,
}

impl BerEstimate {
    /// Assembles an estimate from the two conditional success
    /// probabilities; the error rate is their equal-prior complement,
    /// `1 - (p0 + p1) / 2`, by construction.
    pub fn from_conditionals(
        p_correct_given_0: f64,
        p_correct_given_1: f64,
        method: BerMethod,
        mc_half_width: Option<f64>,
    ) -> Self {
        BerEstimate {
            p_correct_given_0,
            p_correct_given_1,
            p_error: 1.0 - 0.5 * (p_correct_given_0 + p_correct_given_1),
            method,
            mc_half_width,
        }
    }
}

/// Difference in error rate between two estimates, `a - b`. The inputs
/// must describe the same burst size and channel instance; the estimates
/// do not carry enough context to check that here.
pub fn ber_gap(a: &BerEstimate, b: &BerEstimate) -> f64 {
    a.p_error - b.p_error
}

/// Standard normal CDF, built on the complementary error function so both
/// tails keep full relative precision. Reflection is exact:
/// `normal_cdf(-x) + normal_cdf(x) == 1` for every finite `x`.
pub fn normal_cdf(x: f64) -> f64 {
    let tail = 0.5 * libm::erfc(x.abs() / std::f64::consts::SQRT_2);
    if x >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// P(correct) for one bit under the normal approximation: the evidence
/// count in a burst of `n` is treated as N(n e, n e (1-e)) and the bit is
/// read correctly when the count lands between the threshold fraction and
/// the full burst.
fn correct_prob_normal(evidence_share: f64, threshold_share: f64, n: f64) -> f64 {
    let mu = n * evidence_share;
    let sigma = (n * evidence_share * (1.0 - evidence_share)).sqrt();
    normal_cdf((n - mu) / sigma) - normal_cdf((threshold_share * n - mu) / sigma)
}

/// Normal-approximation error contribution of bit 0, in i2-share
/// coordinates: the pair started at `c_anchor` and L's linearized i2
/// share now sits at `c_i2_low` (below the anchor once i2 has moved out).
/// Public because sensitivity checks probe it directly.
pub fn normal_bit0_error(c_anchor: f64, c_i2_low: f64, n_emit: u64) -> Result<f64> {
    check_share(c_anchor)?;
    check_share(c_i2_low)?;
    if n_emit == 0 {
        return Err(Error::ZeroEmission);
    }
    let pc = correct_prob_normal(1.0 - c_i2_low, 1.0 - c_anchor, n_emit as f64);
    Ok(0.5 * (1.0 - pc))
}

/// Normal-approximation error contribution of bit 1, in i2-share
/// coordinates: H's linearized i2 share sits at `c_i2_high` (above the
/// anchor once i2 has moved in).
pub fn normal_bit1_error(c_anchor: f64, c_i2_high: f64, n_emit: u64) -> Result<f64> {
    check_share(c_anchor)?;
    check_share(c_i2_high)?;
    if n_emit == 0 {
        return Err(Error::ZeroEmission);
    }
    let pc = correct_prob_normal(c_i2_high, c_anchor, n_emit as f64);
    Ok(0.5 * (1.0 - pc))
}

fn check_share(c: f64) -> Result<()> {
    if !(c.is_finite() && 0.0 < c && c < 1.0) {
        return Err(Error::ConcentrationOutOfRange(c));
    }
    Ok(())
}

/// Error rate after `moved` molecules have been relocated, under the
/// normal approximation with linearized concentrations. `moved` counts
/// molecules of the oriented species (plus its cross partner, if any)
/// shifted since initialization; it is a real number so energy sweeps can
/// feed the continuous closed-form inverse straight in.
///
/// The two orientations are exact mirrors: evaluating one at `c2_init`
/// equals evaluating the other at `1 - c2_init` bit for bit.
pub fn ber_normal(
    c2_init: f64,
    moved: f64,
    n_low: u64,
    n_high: u64,
    n_emit: u64,
    orientation: Orientation,
) -> Result<BerEstimate> {
    check_share(c2_init)?;
    if !(moved.is_finite() && moved >= 0.0) {
        return Err(Error::NegativeMoved(moved));
    }
    if n_low == 0 || n_high == 0 {
        return Err(Error::ZeroDesignSize);
    }
    if n_emit == 0 {
        return Err(Error::ZeroEmission);
    }
    // Initial share of the bit-0 evidence species in L. Everything else
    // is derived from it the same way for both orientations, which is
    // what makes the mirror exact.
    let w = match orientation {
        Orientation::MovedI2 => 1.0 - c2_init,
        Orientation::MovedI1 => c2_init,
    };
    let d0 = w + moved / n_low as f64;
    let d1 = (1.0 - w) + moved / n_high as f64;
    check_share(d0)?;
    check_share(d1)?;
    let n = n_emit as f64;
    let pc0 = correct_prob_normal(d0, w, n);
    let pc1 = correct_prob_normal(d1, 1.0 - w, n);
    Ok(BerEstimate::from_conditionals(
        pc0,
        pc1,
        BerMethod::NormalApprox,
        None,
    ))
}

/// Exact error rate of a decision rule against a concrete pair state.
///
/// Under [`ConcentrationConvention::FixedDenominator`] the burst is drawn
/// from the design-size population implied by the linearized shares, which
/// is what the closed-form expressions describe. Under
/// [`ConcentrationConvention::CurrentTotal`] it is drawn from the
/// molecules actually present, which is what a physical receiver sees.
/// Both routes reduce to hypergeometric tails.
pub fn ber_exact(
    state: &ReservoirPair,
    rule: &DecisionRule,
    convention: ConcentrationConvention,
) -> Result<BerEstimate> {
    let pc = |species: Species, reservoir: Reservoir, threshold: u64| -> Result<f64> {
        let (pop_success, pop_total) = match convention {
            ConcentrationConvention::FixedDenominator => {
                let share = state.linearized_concentration(species, reservoir);
                if !(0.0..=1.0).contains(&share) {
                    return Err(Error::ConcentrationOutOfRange(share));
                }
                let design = state.design(reservoir);
                ((share * design as f64).round() as u64, design)
            }
            ConcentrationConvention::CurrentTotal => {
                (state.count(species, reservoir), state.total(reservoir))
            }
        };
        if pop_total < rule.n_emit {
            return Err(Error::EmissionExceedsReservoir {
                have: pop_total,
                need: rule.n_emit,
            });
        }
        hypergeometric_tail(pop_success.min(pop_total), pop_total, rule.n_emit, threshold)
    };
    let pc0 = pc(rule.orientation.bit0_evidence(), Reservoir::Low, rule.t0)?;
    let pc1 = pc(rule.orientation.bit1_evidence(), Reservoir::High, rule.t1)?;
    Ok(BerEstimate::from_conditionals(
        pc0,
        pc1,
        BerMethod::ExactHypergeometric,
        None,
    ))
}
