//! Transfer strategies: which molecules move where, and when to stop.
//!
//! A fresh pair has more i2 than i1 in both reservoirs. The cheap phase
//! moves the i2 excess out of L until L holds both species in equal
//! numbers ([`run_to_equilibrium`] computes that point and its cost
//! exactly). Past it, keeping the reservoirs usable gets expensive, and
//! there are three ways to spend further energy: keep draining i2 from L,
//! alternate i2 out with i1 in (the cross pattern), or haul i1 from H
//! into L. [`step_plan`] turns each strategy into the step sequence the
//! budget scheduler executes.

use crate::energy::{
    transfers_under_budget, transfers_under_budget_tally, EnergyLedger, PhysicalConstants,
    TransferTally,
};
use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::reservoir::{Reservoir, ReservoirPair, Species, TransferStep};

/// The five transfer patterns the transmitter can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    /// Drain excess i2 from L into H. The pre-equilibrium workhorse.
    MoveI2LowToHigh,
    /// Push i1 from L into H instead, enriching L in i2.
    MoveI1LowToHigh,
    /// Past equilibrium, keep draining i2 from L.
    PostEqContinueI2,
    /// Past equilibrium, alternate one i2 batch out of L with one i1
    /// batch from H back into L.
    PostEqCross,
    /// Past equilibrium, move only i1 from H into L.
    PostEqMoveI1,
}

impl StrategyKind {
    /// Whether the strategy presumes L has already been balanced.
    pub fn is_post_equilibrium(self) -> bool {
        matches!(
            self,
            StrategyKind::PostEqContinueI2
                | StrategyKind::PostEqCross
                | StrategyKind::PostEqMoveI1
        )
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            StrategyKind::MoveI2LowToHigh => "move_i2",
            StrategyKind::MoveI1LowToHigh => "move_i1",
            StrategyKind::PostEqContinueI2 => "posteq_continue_i2",
            StrategyKind::PostEqCross => "posteq_cross",
            StrategyKind::PostEqMoveI1 => "posteq_move_i1",
        };
        write!(f, "{name}")
    }
}

/// A strategy plus the batch size its transfers are executed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransferStrategy {
    pub kind: StrategyKind,
    pub m0: u64,
}

impl TransferStrategy {
    pub fn new(kind: StrategyKind, m0: u64) -> Result<Self> {
        if m0 == 0 {
            return Err(Error::ZeroBatch);
        }
        Ok(TransferStrategy { kind, m0 })
    }
}

/// Infinite step sequence for a strategy; see [`step_plan`].
#[derive(Debug, Clone)]
pub struct StepPlan {
    kind: StrategyKind,
    index: u64,
}

impl Iterator for StepPlan {
    type Item = TransferStep;

    fn next(&mut self) -> Option<TransferStep> {
        let i2_out = TransferStep {
            species: Species::I2,
            from: Reservoir::Low,
            to: Reservoir::High,
        };
        let i1_out = TransferStep {
            species: Species::I1,
            from: Reservoir::Low,
            to: Reservoir::High,
        };
        let i1_back = TransferStep {
            species: Species::I1,
            from: Reservoir::High,
            to: Reservoir::Low,
        };
        let step = match self.kind {
            StrategyKind::MoveI2LowToHigh | StrategyKind::PostEqContinueI2 => i2_out,
            StrategyKind::MoveI1LowToHigh => i1_out,
            StrategyKind::PostEqMoveI1 => i1_back,
            StrategyKind::PostEqCross => {
                if self.index.is_multiple_of(2) {
                    i2_out
                } else {
                    i1_back
                }
            }
        };
        self.index += 1;
        Some(step)
    }
}

/// The step sequence a strategy executes, one entry per batch. All plans
/// are unbounded; the scheduler's budget and exhaustion checks end the
/// run. The cross plan starts with the i2 batch out of L.
pub fn step_plan(kind: StrategyKind) -> StepPlan {
    StepPlan { kind, index: 0 }
}

/// Outcome of balancing the low reservoir; see [`run_to_equilibrium`].
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    /// i2 molecules moved out of L to reach balance.
    pub moved_total: u64,
    /// Energy paid for the whole move, in joules.
    pub energy_spent: f64,
    /// The balanced state: L holds i1 and i2 in equal numbers.
    pub final_state: ReservoirPair,
}

/// Moves i2 from L to H in batches of `m0` until L holds both species in
/// equal numbers, which is where a fresh pair's cheap phase ends. The
/// final batch is truncated so the run lands exactly on balance.
///
/// Requires a fresh state: both reservoirs at design size with identical
/// counts, and an i2 excess to consume. For a pair built by
/// [`ReservoirPair::new_state`] with `c2_init` above one half that is
/// `moved_total = i2_low - i1_low`, independent of `m0`.
///
/// The cost series telescopes into exact integer fractions here: batch
/// `b` taken while L holds `q` i2 molecules costs `kT * b^2 / q`, because
/// the linearized share of a fresh pair is the plain count fraction. The
/// sum is compensated; sweeps at realistic sizes run hundreds of millions
/// of batches.
pub fn run_to_equilibrium(
    state: ReservoirPair,
    m0: u64,
    constants: &PhysicalConstants,
) -> Result<EquilibriumReport> {
    if m0 == 0 {
        return Err(Error::ZeroBatch);
    }
    let fresh = state.total(Reservoir::Low) == state.n_low_design
        && state.total(Reservoir::High) == state.n_high_design
        && state.i1_low == state.i1_high
        && state.i2_low == state.i2_high;
    if !fresh {
        return Err(Error::NotFresh);
    }
    if state.i2_low <= state.i1_low {
        return Err(Error::NoExcessI2 {
            i2: state.i2_low,
            i1: state.i1_low,
        });
    }
    let target = state.i1_low;
    let moved_total = state.i2_low - target;
    let kt = constants.kt();
    let full_batch_num = kt * (m0 as f64) * (m0 as f64);
    let mut energy = KahanSum::default();
    let mut q = state.i2_low;
    while q > target {
        let b = m0.min(q - target);
        let num = if b == m0 {
            full_batch_num
        } else {
            kt * (b as f64) * (b as f64)
        };
        energy.add(num / q as f64);
        q -= b;
    }
    let final_state =
        state.apply_transfer(Species::I2, Reservoir::Low, Reservoir::High, moved_total)?;
    Ok(EquilibriumReport {
        moved_total,
        energy_spent: energy.value(),
        final_state,
    })
}

/// Runs a strategy's step plan under an energy budget, returning the final
/// state and the full cost ledger. Post-equilibrium strategies insist that
/// L is at or past balance; the two plain strategies run from any state.
pub fn run_strategy(
    state: ReservoirPair,
    strategy: &TransferStrategy,
    budget: f64,
    constants: &PhysicalConstants,
) -> Result<(ReservoirPair, EnergyLedger)> {
    check_phase(&state, strategy)?;
    transfers_under_budget(
        state,
        step_plan(strategy.kind),
        strategy.m0,
        budget,
        constants,
    )
}

/// Same run as [`run_strategy`], recording only the tally. Sweeps over
/// fine-grained budgets use this to avoid materializing ledgers with
/// hundreds of millions of entries.
pub fn run_strategy_tally(
    state: ReservoirPair,
    strategy: &TransferStrategy,
    budget: f64,
    constants: &PhysicalConstants,
) -> Result<(ReservoirPair, TransferTally)> {
    check_phase(&state, strategy)?;
    transfers_under_budget_tally(
        state,
        step_plan(strategy.kind),
        strategy.m0,
        budget,
        constants,
    )
}

fn check_phase(state: &ReservoirPair, strategy: &TransferStrategy) -> Result<()> {
    if strategy.m0 == 0 {
        return Err(Error::ZeroBatch);
    }
    if strategy.kind.is_post_equilibrium() && state.i2_low > state.i1_low {
        return Err(Error::NotAtEquilibrium {
            i2: state.i2_low,
            i1: state.i1_low,
        });
    }
    Ok(())
}
