//! Error type shared across the crate.
//!
//! One enum covers all modules: the library is small and callers usually
//! bubble everything up to a single reporting point. Variants distinguish
//! contract violations (bad arguments, illegal phase) from numerical-domain
//! failures (concentrations outside (0,1), exhausted sources) so a harness
//! can map them to different exit codes.

use crate::reservoir::{Reservoir, Species};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A pair state needs an even total so both reservoirs start equal.
    #[error("total molecule count {0} is odd; the reservoirs must split evenly")]
    OddTotal(u64),

    /// The initial fraction would leave one species with zero molecules
    /// (or is outside (0,1) entirely).
    #[error("initial i2 fraction {c2} of {n_low} molecules leaves no room for both species")]
    DegenerateSplit { c2: f64, n_low: u64 },

    /// Reservoir design sizes must be at least 1.
    #[error("reservoir design sizes must be positive")]
    ZeroDesignSize,

    /// Transfers move at least one molecule.
    #[error("transfer count must be positive")]
    ZeroTransferCount,

    /// Source and destination of a transfer must differ.
    #[error("transfer source and destination are the same reservoir")]
    SameReservoir,

    /// The source reservoir does not hold enough of the species.
    #[error("cannot move {need} {species} molecules out of {reservoir}: only {have} present")]
    InsufficientSource {
        species: Species,
        reservoir: Reservoir,
        have: u64,
        need: u64,
    },

    /// Current-total concentrations are undefined on an empty reservoir.
    #[error("reservoir {0} is empty; current-total concentration is undefined")]
    EmptyReservoir(Reservoir),

    /// The i1/i2 ratio is undefined when no i2 molecules remain.
    #[error("reservoir {0} holds no i2 molecules; the i1/i2 ratio diverges")]
    PureI1(Reservoir),

    /// Energy budgets and costs are non-negative by definition.
    #[error("energy {0} J is negative")]
    NegativeEnergy(f64),

    /// Batch sizes are at least one molecule.
    #[error("batch size m0 must be positive")]
    ZeroBatch,

    /// The cost law diverges as the source concentration reaches zero.
    #[error("source concentration {0} is not positive; the source is exhausted")]
    SourceExhausted(f64),

    /// A bulk move larger than the species supply at the stated concentration.
    #[error("cannot move {m} molecules: only {available:.1} available at this concentration")]
    MoveExceedsSupply { m: u64, available: f64 },

    /// Equilibration starts from a freshly initialized pair.
    #[error("state is not fresh: both reservoirs must sit at design size with identical counts")]
    NotFresh,

    /// Equilibration consumes the excess of i2 in the low reservoir.
    #[error("low reservoir holds no i2 excess (i2 {i2} <= i1 {i1}); nothing to equilibrate")]
    NoExcessI2 { i2: u64, i1: u64 },

    /// Post-equilibrium strategies need the low reservoir at or past balance.
    #[error("strategy requires the low reservoir at or past i1/i2 balance (i2 {i2} > i1 {i1})")]
    NotAtEquilibrium { i2: u64, i1: u64 },

    /// Hypergeometric parameters outside their domain.
    #[error("hypergeometric domain violation: successes {pop_success}, total {pop_total}, draws {draws}")]
    HypergeomDomain {
        pop_success: u64,
        pop_total: u64,
        draws: u64,
    },

    /// Decision thresholds live in 1..=n_emit.
    #[error("threshold {t} outside 1..={n_emit}")]
    ThresholdOutOfRange { t: u64, n_emit: u64 },

    /// Emissions draw without replacement and cannot exceed the reservoir.
    #[error("emission of {need} molecules exceeds reservoir population {have}")]
    EmissionExceedsReservoir { have: u64, need: u64 },

    /// A model concentration left (0,1), where the normal and combinatorial
    /// forms stop being meaningful.
    #[error("concentration {0} outside the open interval (0,1)")]
    ConcentrationOutOfRange(f64),

    /// Moved-molecule totals are non-negative.
    #[error("moved total {0} is negative")]
    NegativeMoved(f64),

    /// Emission sizes are at least one molecule.
    #[error("emission size must be positive")]
    ZeroEmission,

    /// Monte Carlo estimation needs at least one trial.
    #[error("trial count must be positive")]
    ZeroTrials,

    /// A Monte Carlo config must describe the same burst size as the
    /// decision rule it is paired with.
    #[error("config emission size {config_n} disagrees with decision rule {rule_n}")]
    EmissionMismatch { rule_n: u64, config_n: u64 },

    /// Physical constants must be positive and finite.
    #[error("physical constants must be positive and finite (k = {k}, T = {t})")]
    BadConstants { k: f64, t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
