//! Free-energy cost of moving molecules between the reservoirs.
//!
//! Concentrating a species costs work against the entropy of mixing. For a
//! batch of `m0` molecules moved while the source holds the species at
//! linearized concentration `c`, the cost is
//!
//! ```text
//! E_step = 2 kT m0^2 / (n c)
//! ```
//!
//! with `n` the combined design size of both reservoirs. Batches are paid
//! for at the concentration in effect when they start, so a full move of
//! `m` molecules in batches of `m0` is a sum of step costs with the source
//! concentration walking downward.
//!
//! Two aggregate views are provided. [`total_energy_bulk`] evaluates that
//! sum directly from a starting concentration. [`transfers_under_budget`]
//! runs the general scheduler: it executes an arbitrary step plan against a
//! live [`ReservoirPair`], re-reading the linearized concentration before
//! each batch, and stops when the budget, the plan, or the source runs out.
//! The scheduler is the ground truth for strategies that interleave both
//! species; the closed forms are the fast path for single-species moves.

use crate::error::{Error, Result};
use crate::reservoir::{ReservoirPair, TransferStep};

/// Boltzmann constant and absolute temperature, the only physics inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Boltzmann constant in J/K.
    pub boltzmann_k: f64,
    /// Absolute temperature in K.
    pub temperature: f64,
}

impl PhysicalConstants {
    pub fn new(boltzmann_k: f64, temperature: f64) -> Result<Self> {
        let ok = boltzmann_k.is_finite()
            && temperature.is_finite()
            && boltzmann_k > 0.0
            && temperature > 0.0;
        if !ok {
            return Err(Error::BadConstants {
                k: boltzmann_k,
                t: temperature,
            });
        }
        Ok(PhysicalConstants {
            boltzmann_k,
            temperature,
        })
    }

    /// Standard working point: k = 1.3807e-23 J/K at 298.15 K.
    pub fn room_temperature() -> Self {
        PhysicalConstants {
            boltzmann_k: 1.3807e-23,
            temperature: 298.15,
        }
    }

    /// kT = 1, for desk calculations where energies are quoted in kT units.
    pub fn normalized() -> Self {
        PhysicalConstants {
            boltzmann_k: 1.0,
            temperature: 1.0,
        }
    }

    /// The thermal energy kT in joules.
    pub fn kt(&self) -> f64 {
        self.boltzmann_k * self.temperature
    }
}

/// Result of inverting the single-bulk energy relation: how many molecules
/// a given energy moves. The count is a real number (the inversion is
/// continuous); `in_regime` is false once it exceeds a quarter of the
/// total, where the constant-concentration assumption behind the closed
/// form has clearly broken down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MovedEstimate {
    pub count: f64,
    pub in_regime: bool,
}

/// Inverts the small-move energy relation for a single bulk: spending
/// `energy_j` on a species at concentration `c_species` in a system of
/// `n_total` molecules moves approximately
///
/// ```text
/// m = sqrt(c_species * n_total * energy_j / (2 kT))
/// ```
///
/// molecules. Valid while `m` stays small against the reservoir; the
/// estimate flags itself out of regime beyond `n_total / 4`.
pub fn closed_form_moved(
    energy_j: f64,
    c_species: f64,
    n_total: u64,
    constants: &PhysicalConstants,
) -> Result<MovedEstimate> {
    if !(energy_j.is_finite() && energy_j >= 0.0) {
        return Err(Error::NegativeEnergy(energy_j));
    }
    if !(c_species.is_finite() && 0.0 < c_species && c_species < 1.0) {
        return Err(Error::ConcentrationOutOfRange(c_species));
    }
    let count = (c_species * n_total as f64 * energy_j / (2.0 * constants.kt())).sqrt();
    Ok(MovedEstimate {
        count,
        in_regime: count <= n_total as f64 / 4.0,
    })
}

/// Cost of one batch of `m0` molecules taken from a source whose species
/// currently sits at linearized concentration `c_source_now`, in a system
/// of `n_total` molecules. Errors once the source concentration is no
/// longer positive: the cost law diverges there and the source is treated
/// as exhausted.
pub fn per_transfer_cost(
    c_source_now: f64,
    m0: u64,
    n_total: u64,
    constants: &PhysicalConstants,
) -> Result<f64> {
    if m0 == 0 {
        return Err(Error::ZeroBatch);
    }
    if c_source_now <= 0.0 || c_source_now.is_nan() {
        return Err(Error::SourceExhausted(c_source_now));
    }
    let b = m0 as f64;
    Ok(2.0 * constants.kt() * b * b / (n_total as f64 * c_source_now))
}

/// Total cost of moving `m` molecules of a species out of a reservoir of
/// design size `n_low`, starting at concentration `c_species`, in batches
/// of `m0` (the final batch may be smaller and is priced by the same
/// rule). Each batch is paid for at the concentration in effect when it
/// starts:
///
/// ```text
/// E_total = sum over batches of kT * b^2 / (c_species * n_low - moved_so_far)
/// ```
///
/// Errors when `m` exceeds the species supply `c_species * n_low`.
pub fn total_energy_bulk(
    m: u64,
    m0: u64,
    c_species: f64,
    n_low: u64,
    constants: &PhysicalConstants,
) -> Result<f64> {
    if m0 == 0 {
        return Err(Error::ZeroBatch);
    }
    if !(c_species.is_finite() && 0.0 < c_species && c_species < 1.0) {
        return Err(Error::ConcentrationOutOfRange(c_species));
    }
    let supply = c_species * n_low as f64;
    if m as f64 > supply {
        return Err(Error::MoveExceedsSupply {
            m,
            available: supply,
        });
    }
    let kt = constants.kt();
    let full_batch_num = kt * (m0 as f64) * (m0 as f64);
    let mut moved: u64 = 0;
    let mut total = 0.0;
    while moved < m {
        let b = m0.min(m - moved);
        let denom = supply - moved as f64;
        let num = if b == m0 {
            full_batch_num
        } else {
            kt * (b as f64) * (b as f64)
        };
        total += num / denom;
        moved += b;
    }
    Ok(total)
}

/// Full record of a budgeted scheduling run: every batch cost in execution
/// order, their sum, and the budget that bounded them.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    pub budget: f64,
    pub spent: f64,
    pub per_transfer_costs: Vec<f64>,
    pub transfers_executed: u64,
}

impl EnergyLedger {
    /// Budget not yet spent.
    pub fn remaining(&self) -> f64 {
        self.budget - self.spent
    }
}

/// Summary counters of a budgeted run, for sweeps that execute hundreds of
/// millions of batches and must not record every cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferTally {
    pub budget: f64,
    pub spent: f64,
    pub transfers_executed: u64,
}

/// Executes `plan` step by step in batches of `m0` until the budget or the
/// source runs out, returning the final state and a full [`EnergyLedger`].
///
/// Before each batch the scheduler re-reads the linearized source
/// concentration; a batch is executed only if that concentration is still
/// positive, its cost fits the remaining budget (spending exactly to the
/// boundary is allowed), and the source physically holds `m0` molecules.
/// The first failing condition ends the run cleanly. Batches are atomic:
/// there are no partial transfers.
pub fn transfers_under_budget<P>(
    state: ReservoirPair,
    plan: P,
    m0: u64,
    budget: f64,
    constants: &PhysicalConstants,
) -> Result<(ReservoirPair, EnergyLedger)>
where
    P: IntoIterator<Item = TransferStep>,
{
    let mut costs = Vec::new();
    let (state, executed, spent) = schedule(state, plan, m0, budget, constants, |c| {
        costs.push(c);
    })?;
    Ok((
        state,
        EnergyLedger {
            budget,
            spent,
            per_transfer_costs: costs,
            transfers_executed: executed,
        },
    ))
}

/// Same run as [`transfers_under_budget`], recording only the tally.
pub fn transfers_under_budget_tally<P>(
    state: ReservoirPair,
    plan: P,
    m0: u64,
    budget: f64,
    constants: &PhysicalConstants,
) -> Result<(ReservoirPair, TransferTally)>
where
    P: IntoIterator<Item = TransferStep>,
{
    let (state, executed, spent) = schedule(state, plan, m0, budget, constants, |_| {})?;
    Ok((
        state,
        TransferTally {
            budget,
            spent,
            transfers_executed: executed,
        },
    ))
}

fn schedule<P, F>(
    mut state: ReservoirPair,
    plan: P,
    m0: u64,
    budget: f64,
    constants: &PhysicalConstants,
    mut on_cost: F,
) -> Result<(ReservoirPair, u64, f64)>
where
    P: IntoIterator<Item = TransferStep>,
    F: FnMut(f64),
{
    if m0 == 0 {
        return Err(Error::ZeroBatch);
    }
    if budget.is_nan() || budget < 0.0 {
        return Err(Error::NegativeEnergy(budget));
    }
    let kt2_b2 = 2.0 * constants.kt() * (m0 as f64) * (m0 as f64);
    let n = state.design_total() as f64;
    let mut spent = 0.0;
    let mut executed: u64 = 0;
    for step in plan {
        let c_src = state.linearized_concentration(step.species, step.from);
        if c_src <= 0.0 || c_src.is_nan() {
            break;
        }
        let cost = kt2_b2 / (n * c_src);
        if spent + cost > budget {
            break;
        }
        if state.count(step.species, step.from) < m0 {
            break;
        }
        state = state
            .apply_transfer(step.species, step.from, step.to, m0)
            .expect("transfer was pre-checked");
        spent += cost;
        executed += 1;
        on_cost(cost);
    }
    Ok((state, executed, spent))
}
