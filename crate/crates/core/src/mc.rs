//! Monte Carlo estimation of the bit-error rate.
//!
//! The sampler draws emission bursts molecule by molecule, without
//! replacement, from the live counts of a reservoir, so it exercises the
//! physical channel directly rather than any of the closed forms. That
//! makes it the third, independent route to the error rate (after the
//! exact tails and the normal approximation) and the only one that needs
//! randomness.
//!
//! Reproducibility is part of the contract: a fixed seed yields a
//! bit-identical estimate on reruns, and sweep points derive their own
//! stream seeds from a base seed so grid evaluations stay stable however
//! they are scheduled.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ber::{BerEstimate, BerMethod, DecisionRule};
use crate::error::{Error, Result};
use crate::reservoir::{Reservoir, ReservoirPair, Species};

/// Monte Carlo run parameters. `n_emit` duplicates the decision rule's
/// burst size so a config describes the experiment on its own; `mc_ber`
/// rejects configs that disagree with the rule they are paired with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub n_emit: u64,
}

/// Derives an independent stream seed for one point of a sweep from the
/// sweep's base seed. SplitMix64 finalization scrambles the combination,
/// so neighboring points get uncorrelated ChaCha streams.
pub fn derive_stream_seed(base_seed: u64, point_index: u64) -> u64 {
    let mut z = base_seed.wrapping_add(
        point_index
            .wrapping_add(1)
            .wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws a burst of `n_emit` molecules without replacement from a
/// reservoir's live contents and returns how many were of `species`.
/// Exact sequential sampling: each draw hits with probability
/// (remaining evidence) / (remaining total).
pub fn sample_emission(
    state: &ReservoirPair,
    reservoir: Reservoir,
    species: Species,
    n_emit: u64,
    rng: &mut impl Rng,
) -> Result<u64> {
    if n_emit == 0 {
        return Err(Error::ZeroEmission);
    }
    let mut remaining_total = state.total(reservoir);
    if remaining_total < n_emit {
        return Err(Error::EmissionExceedsReservoir {
            have: remaining_total,
            need: n_emit,
        });
    }
    let mut remaining_evidence = state.count(species, reservoir);
    let mut hits = 0;
    for _ in 0..n_emit {
        if rng.random_range(0..remaining_total) < remaining_evidence {
            hits += 1;
            remaining_evidence -= 1;
        }
        remaining_total -= 1;
    }
    Ok(hits)
}

/// Estimates the error rate by simulating `trials` transmissions against
/// the live reservoir contents, alternating bit 0 (burst from L) and
/// bit 1 (burst from H). The estimate carries the 95% half-width on
/// `p_error`; reruns with the same config are bit-identical.
///
/// With an odd trial count bit 0 gets the extra trial; a single-bit
/// conditional with no trials at all is reported as zero.
pub fn mc_ber(state: &ReservoirPair, rule: &DecisionRule, config: &McConfig) -> Result<BerEstimate> {
    if config.trials == 0 {
        return Err(Error::ZeroTrials);
    }
    if config.n_emit != rule.n_emit {
        return Err(Error::EmissionMismatch {
            rule_n: rule.n_emit,
            config_n: config.n_emit,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut correct = [0u64; 2];
    let mut attempts = [0u64; 2];
    for trial in 0..config.trials {
        let bit = (trial % 2) as usize;
        let (reservoir, species, threshold) = if bit == 0 {
            (Reservoir::Low, rule.orientation.bit0_evidence(), rule.t0)
        } else {
            (Reservoir::High, rule.orientation.bit1_evidence(), rule.t1)
        };
        let hits = sample_emission(state, reservoir, species, rule.n_emit, &mut rng)?;
        attempts[bit] += 1;
        if hits >= threshold {
            correct[bit] += 1;
        }
    }
    let conditional = |bit: usize| {
        if attempts[bit] == 0 {
            0.0
        } else {
            correct[bit] as f64 / attempts[bit] as f64
        }
    };
    let pc0 = conditional(0);
    let pc1 = conditional(1);
    let p_error = 1.0 - 0.5 * (pc0 + pc1);
    let half_width = 1.96 * (p_error * (1.0 - p_error) / config.trials as f64).sqrt();
    Ok(BerEstimate::from_conditionals(
        pc0,
        pc1,
        BerMethod::MonteCarlo,
        Some(half_width),
    ))
}
