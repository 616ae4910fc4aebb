//! Turns a parsed [`SweepConfig`] into a finished CSV document.
//!
//! Each scenario walks a grid, computes its rows in parallel, and joins
//! them in grid order, so the output bytes depend only on the config.
//! Nothing is written until the whole document exists; callers therefore
//! never see a partial file on error.
//!
//! A leading `#` comment line records the full effective config plus the
//! crate version, which makes any CSV reproducible from its own header.
//! BER rows carry the evaluation method and a `regime_ok` flag; points
//! where the total perturbation exceeds a quarter of the molecule budget
//! are flagged rather than dropped. Exact-mode rows use the fixed-design-
//! denominator concentration convention throughout, matching the closed
//! forms the other methods discretize.

use std::fmt::Write as _;

use moltx_core::{
    ber_exact, ber_normal, closed_form_moved, derive_stream_seed, mc_ber, normal_bit0_error,
    normal_bit1_error, run_strategy_tally, run_to_equilibrium, BerEstimate, BerMethod,
    ConcentrationConvention, DecisionRule, McConfig, Orientation, PhysicalConstants,
    Reservoir, ReservoirPair, Species, StrategyKind, TransferStrategy,
};
use rayon::prelude::*;

use crate::config::{ConfigError, Method, Scenario, SweepConfig};

/// Failures after argument parsing, split by exit code: config problems
/// exit 2, numerical-domain problems found mid-sweep exit 3.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Numeric {
        context: String,
        source: moltx_core::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric { .. } => 3,
        }
    }
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError::Config(ConfigError::Invalid(message.into()))
}

/// Tags a core error with where in the sweep it happened.
fn at(context: String) -> impl FnOnce(moltx_core::Error) -> CliError {
    move |source| CliError::Numeric { context, source }
}

/// Runs the configured scenario and returns the complete CSV document.
pub fn run_scenario(config: &SweepConfig) -> Result<String, CliError> {
    let scenario = config
        .scenario
        .ok_or(CliError::Config(ConfigError::ScenarioMissing))?;
    let ctx = Ctx::new(config)?;
    let (columns, rows) = match scenario {
        Scenario::Fig2Ratios => fig2_rows(&ctx)?,
        Scenario::Fig3BerPremove => fig3_rows(&ctx, false)?,
        Scenario::Fig4EnergyVsBatch => fig4_rows(&ctx)?,
        Scenario::Fig5BerVsBatch => fig5_rows(&ctx)?,
        Scenario::Fig6BerPosteq => fig6_rows(&ctx)?,
        Scenario::Fig7Gaps => fig7_rows(&ctx)?,
        Scenario::Point => fig3_rows(&ctx, true)?,
    };

    let mut doc = header_line(config, scenario);
    doc.push_str(columns);
    doc.push('\n');
    for row in rows {
        doc.push_str(&row);
        doc.push('\n');
    }
    Ok(doc)
}

/// Shared, validated slice of the config.
struct Ctx<'a> {
    cfg: &'a SweepConfig,
    constants: PhysicalConstants,
    n_low: u64,
    n_high: u64,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a SweepConfig) -> Result<Self, CliError> {
        let constants = PhysicalConstants::new(cfg.boltzmann_k, cfg.temperature)
            .map_err(|e| invalid(e.to_string()))?;
        Ok(Ctx {
            cfg,
            constants,
            n_low: cfg.n_total / 2,
            n_high: cfg.n_total / 2,
        })
    }

    fn fresh(&self, c2: f64) -> Result<ReservoirPair, CliError> {
        ReservoirPair::new_state(self.cfg.n_total, c2)
            .map_err(|e| invalid(format!("c2 = {c2}: {e}")))
    }

    fn energies(&self) -> Result<&[f64], CliError> {
        if self.cfg.energies.is_empty() {
            Err(invalid("energy grid is empty; set E or E_geom"))
        } else {
            Ok(&self.cfg.energies)
        }
    }

    fn c2_grid(&self) -> Result<&[f64], CliError> {
        if self.cfg.c2.is_empty() {
            Err(invalid("c2 grid is empty; set c2"))
        } else {
            Ok(&self.cfg.c2)
        }
    }

    fn single_c2(&self, scenario: &str) -> Result<f64, CliError> {
        match self.c2_grid()? {
            [one] => Ok(*one),
            many => Err(invalid(format!(
                "{scenario} sweeps one c2 at a time; got {} values",
                many.len()
            ))),
        }
    }

    fn single_m0(&self, scenario: &str) -> Result<u64, CliError> {
        match self.cfg.m0.as_slice() {
            [one] => Ok(*one),
            many => Err(invalid(format!(
                "{scenario} uses one batch size; got {} values",
                many.len()
            ))),
        }
    }

    /// Quarter-of-total bound behind every regime_ok column.
    fn in_regime(&self, moved: u64) -> bool {
        moved <= self.cfg.n_total / 4
    }
}

/// One `#` line holding the effective config and artifact version, enough
/// to regenerate the file.
fn header_line(config: &SweepConfig, scenario: Scenario) -> String {
    let join_f64 = |values: &[f64]| {
        if values.is_empty() {
            "-".to_string()
        } else {
            values
                .iter()
                .map(|v| format!("{v:e}"))
                .collect::<Vec<_>>()
                .join(",")
        }
    };
    let m0 = config
        .m0
        .iter()
        .map(|m| m.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let c2 = if config.c2.is_empty() {
        "-".to_string()
    } else {
        config
            .c2
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    let kt = config.boltzmann_k * config.temperature;
    let mut line = String::new();
    writeln!(
        line,
        "# moltx {} scenario={} method={} seed={} trials={} k={:e} T={} kT={:e} N_m={} n={} c2={} m0={} E={}",
        env!("CARGO_PKG_VERSION"),
        scenario,
        config.method,
        config.seed,
        config.trials,
        config.boltzmann_k,
        config.temperature,
        kt,
        config.n_emit,
        config.n_total,
        c2,
        m0,
        join_f64(&config.energies),
    )
    .expect("writing to a String cannot fail");
    line
}

/// The two pre-equilibrium strategies with the species each one spends.
const PRE_MOVE: [(StrategyKind, Species); 2] = [
    (StrategyKind::MoveI2LowToHigh, Species::I2),
    (StrategyKind::MoveI1LowToHigh, Species::I1),
];

const POST_EQ: [StrategyKind; 3] = [
    StrategyKind::PostEqContinueI2,
    StrategyKind::PostEqCross,
    StrategyKind::PostEqMoveI1,
];

fn source_share(c2: f64, species: Species) -> f64 {
    match species {
        Species::I2 => c2,
        Species::I1 => 1.0 - c2,
    }
}

fn orientation_for(kind: StrategyKind) -> Orientation {
    match kind {
        StrategyKind::MoveI1LowToHigh => Orientation::MovedI1,
        _ => Orientation::MovedI2,
    }
}

/// Ratio curves i1/i2 per reservoir against spent energy. These follow the
/// closed-form move count, so the method flag has no effect here.
fn fig2_rows(ctx: &Ctx) -> Result<(&'static str, Vec<String>), CliError> {
    let c2 = ctx.single_c2("fig2_ratios")?;
    let energies = ctx.energies()?;
    ctx.fresh(c2)?;

    let inputs: Vec<(StrategyKind, Species, f64)> = PRE_MOVE
        .iter()
        .flat_map(|&(kind, species)| energies.iter().map(move |&e| (kind, species, e)))
        .collect();

    let n_low = ctx.n_low as f64;
    let n_high = ctx.n_high as f64;
    let rows = inputs
        .par_iter()
        .map(|&(kind, species, energy)| {
            let context = || format!("fig2_ratios {kind} at E={energy:e}");
            let moved = closed_form_moved(energy, source_share(c2, species), ctx.cfg.n_total, &ctx.constants)
                .map_err(at(context()))?
                .count;
            // The spent species leaves L, so its linearized share falls
            // there and rises in H by the mirrored amount.
            let (theta_low, theta_high) = match species {
                Species::I2 => (c2 - moved / n_low, c2 + moved / n_high),
                Species::I1 => (c2 + moved / n_low, c2 - moved / n_high),
            };
            for theta in [theta_low, theta_high] {
                if !(0.0 < theta && theta < 1.0) {
                    return Err(at(context())(moltx_core::Error::ConcentrationOutOfRange(
                        theta,
                    )));
                }
            }
            let ratio_low = (1.0 - theta_low) / theta_low;
            let ratio_high = (1.0 - theta_high) / theta_high;
            Ok(format!("{energy:e},{kind},{ratio_low:e},{ratio_high:e}"))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(("E,strategy,ratio_L_i1_over_i2,ratio_H_i1_over_i2", rows))
}

/// Pre-move BER against energy. `point` is the same computation pinned to
/// a single (c2, E) pair and the move-i2 strategy.
fn fig3_rows(ctx: &Ctx, point: bool) -> Result<(&'static str, Vec<String>), CliError> {
    let (c2_grid, energies, strategies): (Vec<f64>, &[f64], &[(StrategyKind, Species)]) =
        if point {
            let c2 = ctx.single_c2("point")?;
            let energies = ctx.energies()?;
            if energies.len() != 1 {
                return Err(invalid(format!(
                    "point takes one energy; got {}",
                    energies.len()
                )));
            }
            ctx.single_m0("point")?;
            (vec![c2], energies, &PRE_MOVE[..1])
        } else {
            (ctx.c2_grid()?.to_vec(), ctx.energies()?, &PRE_MOVE[..])
        };
    let scenario = if point { "point" } else { "fig3_ber_premove" };

    let mut inputs = Vec::new();
    for &c2 in &c2_grid {
        ctx.fresh(c2)?;
        for &(kind, species) in strategies {
            for &energy in energies {
                inputs.push((c2, kind, species, energy));
            }
        }
    }

    let rows = inputs
        .par_iter()
        .enumerate()
        .map(|(index, &(c2, kind, species, energy))| {
            let context = || format!("{scenario} {kind} at c2={c2} E={energy:e}");
            let estimate =
                closed_form_moved(energy, source_share(c2, species), ctx.cfg.n_total, &ctx.constants)
                    .map_err(at(context()))?;
            let orientation = orientation_for(kind);
            let p_error = match ctx.cfg.method {
                Method::Normal => {
                    ber_normal(c2, estimate.count, ctx.n_low, ctx.n_high, ctx.cfg.n_emit, orientation)
                        .map_err(at(context()))?
                        .p_error
                }
                Method::Exact | Method::Mc => {
                    // Discrete evaluators need an integer state; the
                    // closed-form count is rounded to the nearest one.
                    let m = estimate.count.round() as u64;
                    let fresh = ctx.fresh(c2)?;
                    let state = if m == 0 {
                        fresh
                    } else {
                        fresh
                            .apply_transfer(species, Reservoir::Low, Reservoir::High, m)
                            .map_err(at(context()))?
                    };
                    let rule = DecisionRule::new(c2, ctx.cfg.n_emit, orientation)
                        .map_err(at(context()))?;
                    ber_for_state(ctx, &state, &rule, index).map_err(at(context()))?
                }
            };
            Ok(format!(
                "{energy:e},{kind},{c2},{p_error:e},{},{}",
                ctx.cfg.method,
                estimate.in_regime
            ))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(("E,strategy_or_m0,c2,p_error,method,regime_ok", rows))
}

/// Exact or Monte Carlo BER of a concrete reservoir state. `row_index`
/// keys the per-row random stream so rows stay reproducible under any
/// thread schedule.
fn ber_for_state(
    ctx: &Ctx,
    state: &ReservoirPair,
    rule: &DecisionRule,
    row_index: usize,
) -> moltx_core::Result<f64> {
    let estimate = match ctx.cfg.method {
        Method::Exact => ber_exact(state, rule, ConcentrationConvention::FixedDenominator)?,
        Method::Mc => mc_ber(
            state,
            rule,
            &McConfig {
                trials: ctx.cfg.trials,
                seed: derive_stream_seed(ctx.cfg.seed, row_index as u64),
                n_emit: ctx.cfg.n_emit,
            },
        )?,
        Method::Normal => unreachable!("normal rows never go through a concrete state"),
    };
    Ok(estimate.p_error)
}

/// Cost of balancing L against batch size.
fn fig4_rows(ctx: &Ctx) -> Result<(&'static str, Vec<String>), CliError> {
    let c2_grid = ctx.c2_grid()?;
    let mut inputs = Vec::new();
    for &c2 in c2_grid {
        ctx.fresh(c2)?;
        for &m0 in &ctx.cfg.m0 {
            inputs.push((c2, m0));
        }
    }
    let rows = inputs
        .par_iter()
        .map(|&(c2, m0)| {
            let context = || format!("fig4_energy_vs_batch at c2={c2} m0={m0}");
            let report = run_to_equilibrium(ctx.fresh(c2)?, m0, &ctx.constants)
                .map_err(at(context()))?;
            Ok(format!("{m0},{c2},{:e}", report.energy_spent))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(("m0,c2,E_total", rows))
}

/// BER against budget when the pre-equilibrium move-i2 strategy runs
/// through the batch scheduler instead of the closed form.
fn fig5_rows(ctx: &Ctx) -> Result<(&'static str, Vec<String>), CliError> {
    let c2_grid = ctx.c2_grid()?;
    let energies = ctx.energies()?;
    let mut inputs = Vec::new();
    for &c2 in c2_grid {
        ctx.fresh(c2)?;
        for &m0 in &ctx.cfg.m0 {
            for &energy in energies {
                inputs.push((c2, m0, energy));
            }
        }
    }

    let rows = inputs
        .par_iter()
        .enumerate()
        .map(|(index, &(c2, m0, energy))| {
            let context = || format!("fig5_ber_vs_batch at c2={c2} m0={m0} E={energy:e}");
            let strategy = TransferStrategy::new(StrategyKind::MoveI2LowToHigh, m0)
                .map_err(at(context()))?;
            let (state, tally) =
                run_strategy_tally(ctx.fresh(c2)?, &strategy, energy, &ctx.constants)
                    .map_err(at(context()))?;
            let moved = tally.transfers_executed * m0;
            let p_error = match ctx.cfg.method {
                Method::Normal => ber_normal(
                    c2,
                    moved as f64,
                    ctx.n_low,
                    ctx.n_high,
                    ctx.cfg.n_emit,
                    Orientation::MovedI2,
                )
                .map_err(at(context()))?
                .p_error,
                Method::Exact | Method::Mc => {
                    let rule = DecisionRule::new(c2, ctx.cfg.n_emit, Orientation::MovedI2)
                        .map_err(at(context()))?;
                    ber_for_state(ctx, &state, &rule, index).map_err(at(context()))?
                }
            };
            Ok(format!(
                "{energy:e},{m0},{c2},{p_error:e},{},{}",
                ctx.cfg.method,
                ctx.in_regime(moved)
            ))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(("E,strategy_or_m0,c2,p_error,method,regime_ok", rows))
}

/// Balances L once per c2, then prices the three continuation strategies.
/// The energy grid is the post-equilibrium budget; the balancing cost is
/// not charged against it.
fn fig6_rows(ctx: &Ctx) -> Result<(&'static str, Vec<String>), CliError> {
    let c2_grid = ctx.c2_grid()?;
    let energies = ctx.energies()?;
    let m0 = ctx.single_m0("fig6_ber_posteq")?;

    let mut inputs = Vec::new();
    for &c2 in c2_grid {
        let eq = run_to_equilibrium(ctx.fresh(c2)?, m0, &ctx.constants)
            .map_err(at(format!("fig6_ber_posteq balancing at c2={c2} m0={m0}")))?;
        for kind in POST_EQ {
            for &energy in energies {
                inputs.push((c2, kind, energy, eq.final_state, eq.moved_total));
            }
        }
    }

    let rows = inputs
        .par_iter()
        .enumerate()
        .map(|(index, &(c2, kind, energy, eq_state, eq_moved))| {
            let context = || format!("fig6_ber_posteq {kind} at c2={c2} E={energy:e}");
            let (p_error, moved) =
                posteq_point(ctx, c2, kind, m0, energy, eq_state, index).map_err(at(context()))?;
            Ok(format!(
                "{energy:e},{kind},{c2},{p_error:e},{},{}",
                ctx.cfg.method,
                ctx.in_regime(eq_moved + moved)
            ))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(("E,strategy_or_m0,c2,p_error,method,regime_ok", rows))
}

/// BER of one post-equilibrium continuation run: spend `energy` from the
/// balanced state, then evaluate against thresholds still anchored at the
/// initial c2. Returns the error probability and the batch molecules
/// moved past balance.
fn posteq_point(
    ctx: &Ctx,
    c2: f64,
    kind: StrategyKind,
    m0: u64,
    energy: f64,
    eq_state: ReservoirPair,
    row_index: usize,
) -> moltx_core::Result<(f64, u64)> {
    let strategy = TransferStrategy::new(kind, m0)?;
    let (state, tally) = run_strategy_tally(eq_state, &strategy, energy, &ctx.constants)?;
    let moved = tally.transfers_executed * m0;
    let p_error = match ctx.cfg.method {
        Method::Normal => {
            let theta_low = state.linearized_c2(Reservoir::Low);
            let theta_high = state.linearized_c2(Reservoir::High);
            let pe0 = normal_bit0_error(c2, theta_low, ctx.cfg.n_emit)?;
            let pe1 = normal_bit1_error(c2, theta_high, ctx.cfg.n_emit)?;
            BerEstimate::from_conditionals(
                1.0 - 2.0 * pe0,
                1.0 - 2.0 * pe1,
                BerMethod::NormalApprox,
                None,
            )
            .p_error
        }
        Method::Exact | Method::Mc => {
            let rule = DecisionRule::new(c2, ctx.cfg.n_emit, Orientation::MovedI2)?;
            ber_for_state(ctx, &state, &rule, row_index)?
        }
    };
    Ok((p_error, moved))
}

/// Pairwise BER gaps between the post-equilibrium strategies at each
/// budget: cross minus continue-i2, then move-i1 minus cross.
fn fig7_rows(ctx: &Ctx) -> Result<(&'static str, Vec<String>), CliError> {
    let c2 = ctx.single_c2("fig7_gaps")?;
    let m0 = ctx.single_m0("fig7_gaps")?;
    let energies = ctx.energies()?;
    let eq = run_to_equilibrium(ctx.fresh(c2)?, m0, &ctx.constants)
        .map_err(at(format!("fig7_gaps balancing at c2={c2} m0={m0}")))?;

    let rows = energies
        .par_iter()
        .enumerate()
        .map(|(index, &energy)| {
            let context = || format!("fig7_gaps at c2={c2} E={energy:e}");
            // Three strategies share one row, so the row index is spread
            // into three distinct stream keys.
            let mut p = [0.0f64; 3];
            for (slot, kind) in POST_EQ.into_iter().enumerate() {
                let (p_error, _) =
                    posteq_point(ctx, c2, kind, m0, energy, eq.final_state, 3 * index + slot)
                        .map_err(at(context()))?;
                p[slot] = p_error;
            }
            let gap1 = p[1] - p[0];
            let gap2 = p[2] - p[1];
            Ok(format!("{energy:e},{gap1:e},{gap2:e}"))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(("E,gap1,gap2", rows))
}
