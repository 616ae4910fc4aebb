use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use moltx::config::{parse_config, Method, Scenario};
use moltx::scenario::run_scenario;

/// Sweep driver for the two-reservoir transmitter model.
///
/// Reads a `key = value` config file, runs one scenario, and writes CSV to
/// stdout or to a file. Exit codes: 0 on success, 2 for config problems,
/// 3 for numerical-domain failures inside the sweep.
#[derive(Parser)]
#[command(name = "moltx", version, about)]
struct Cli {
    /// Scenario to run: fig2_ratios, fig3_ber_premove, fig4_energy_vs_batch,
    /// fig5_ber_vs_batch, fig6_ber_posteq, fig7_gaps, or point.
    scenario: String,

    /// Path to the config file.
    #[arg(long)]
    config: PathBuf,

    /// Output file; defaults to the config's `out` key, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// BER evaluation method: exact, normal, or mc. Overrides the config.
    #[arg(long)]
    method: Option<String>,

    /// Base seed for Monte Carlo rows. Overrides the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let scenario: Scenario = match cli.scenario.parse() {
        Ok(s) => s,
        Err(e) => return fail(2, &e.to_string()),
    };
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => return fail(2, &format!("cannot read {}: {e}", cli.config.display())),
    };
    let mut config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => return fail(2, &e.to_string()),
    };
    config.scenario = Some(scenario);
    if let Some(method) = &cli.method {
        config.method = match method.parse::<Method>() {
            Ok(m) => m,
            Err(e) => return fail(2, &e.to_string()),
        };
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }

    // The whole document is built in memory first, so a failed sweep never
    // leaves a partial file behind.
    let doc = match run_scenario(&config) {
        Ok(doc) => doc,
        Err(e) => return fail(e.exit_code(), &e.to_string()),
    };

    match cli.out.or(config.out) {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &doc) {
                return fail(1, &format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{doc}"),
    }
    ExitCode::SUCCESS
}

fn fail(code: u8, message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}
