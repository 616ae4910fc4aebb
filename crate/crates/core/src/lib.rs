//! Core model of an energy-constrained two-reservoir molecular transmitter.
//!
//! The transmitter keeps two reservoirs of a binary molecule mixture and
//! signals by releasing bursts whose composition depends on which reservoir
//! they come from. Preparing distinguishable reservoirs costs free energy:
//! every batch moved against a concentration gradient is paid for out of a
//! finite budget. This crate models that preparation and its payoff:
//!
//! * [`reservoir`] tracks molecule counts, transfers, and the concentration
//!   conventions used by the cost law and the detectors.
//! * [`energy`] prices individual batches and bulk moves, and schedules
//!   transfers against a budget.
//! * [`strategy`] runs the named preparation policies (direct moves from a
//!   fresh pair, and the post-equilibration continuations) to a budget.
//! * [`hypergeom`] evaluates the without-replacement tail probabilities the
//!   exact detector is built on, switching from big-integer arithmetic to a
//!   log-space walk when populations get large.
//! * [`ber`] turns a prepared pair into a bit-error rate, by exact tails or
//!   by the closed-form normal approximation.
//! * [`mc`] estimates the same error rate by sampling emissions directly,
//!   reproducibly under a fixed seed.
//!
//! Energies are in joules throughout, with the thermal scale set by
//! [`PhysicalConstants`]. Counts are integers end to end; the model never
//! tracks fractional molecules.

pub mod ber;
pub mod energy;
pub mod error;
pub mod hypergeom;
mod kahan;
pub mod mc;
pub mod reservoir;
pub mod strategy;

pub use ber::{
    ber_exact, ber_gap, ber_normal, normal_bit0_error, normal_bit1_error, normal_cdf, thresholds,
    BerEstimate, BerMethod, DecisionRule, Orientation,
};
pub use energy::{
    closed_form_moved, per_transfer_cost, total_energy_bulk, transfers_under_budget,
    transfers_under_budget_tally, EnergyLedger, MovedEstimate, PhysicalConstants, TransferTally,
};
pub use error::{Error, Result};
pub use hypergeom::{hypergeometric_tail, EXACT_POPULATION_CUTOFF};
pub use mc::{derive_stream_seed, mc_ber, sample_emission, McConfig};
pub use reservoir::{
    Concentration, ConcentrationConvention, Reservoir, ReservoirPair, Species, TransferStep,
};
pub use strategy::{
    run_strategy, run_strategy_tally, run_to_equilibrium, step_plan, EquilibriumReport, StepPlan,
    StrategyKind, TransferStrategy,
};
