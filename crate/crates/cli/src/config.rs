//! Config files for the sweep driver.
//!
//! The format is one `key = value` per line. `#` starts a comment, blank
//! lines are skipped, and list values are comma separated:
//!
//! ```text
//! # pre-move BER sweep at bench scale
//! c2 = 0.6, 0.7, 0.8
//! E_geom = 1e-16, 5e-14, 20
//! method = normal
//! ```
//!
//! Physical keys omitted from the file fall back to the reference design:
//! k = 1.3807e-23 J/K, T = 298.15 K, N_m = 5000 emitted molecules, and
//! n = 8e8 molecules split evenly across the two reservoirs. Every parse
//! error carries the line it came from.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

/// Which figure-style sweep to run. Names match the CLI argument exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Reservoir ratio curves i1/i2 against spent energy, both pre-move
    /// strategies.
    Fig2Ratios,
    /// Pre-equilibrium BER against energy via the closed-form move count.
    Fig3BerPremove,
    /// Total cost of balancing the low reservoir against batch size.
    Fig4EnergyVsBatch,
    /// BER against energy when moves run through the batch scheduler.
    Fig5BerVsBatch,
    /// BER against post-equilibrium budget for the three continuation
    /// strategies.
    Fig6BerPosteq,
    /// Pairwise BER gaps between the post-equilibrium strategies.
    Fig7Gaps,
    /// One fully specified operating point, a single CSV row.
    Point,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Fig2Ratios,
        Scenario::Fig3BerPremove,
        Scenario::Fig4EnergyVsBatch,
        Scenario::Fig5BerVsBatch,
        Scenario::Fig6BerPosteq,
        Scenario::Fig7Gaps,
        Scenario::Point,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig2Ratios => "fig2_ratios",
            Scenario::Fig3BerPremove => "fig3_ber_premove",
            Scenario::Fig4EnergyVsBatch => "fig4_energy_vs_batch",
            Scenario::Fig5BerVsBatch => "fig5_ber_vs_batch",
            Scenario::Fig6BerPosteq => "fig6_ber_posteq",
            Scenario::Fig7Gaps => "fig7_gaps",
            Scenario::Point => "point",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| ConfigError::UnknownScenario(s.to_string()))
    }
}

/// How BER rows are evaluated: exact tail sums, the normal approximation,
/// or Monte Carlo emission trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Normal,
    Mc,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Normal => "normal",
            Method::Mc => "mc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "exact" => Ok(Method::Exact),
            "normal" => Ok(Method::Normal),
            "mc" => Ok(Method::Mc),
            other => Err(ConfigError::UnknownMethod(other.to_string())),
        }
    }
}

/// A fully parsed sweep description. The scenario itself always comes from
/// the command line, never from the file, so it sits here as an `Option`
/// filled in by the caller.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub scenario: Option<Scenario>,
    /// Boltzmann constant in J/K. Overridable so bench-scale configs can
    /// work in units of kT = 1.
    pub boltzmann_k: f64,
    /// Temperature in K.
    pub temperature: f64,
    /// Molecules emitted per symbol.
    pub n_emit: u64,
    /// Total molecules across both reservoirs; must be even.
    pub n_total: u64,
    /// Initial i2 fractions to sweep.
    pub c2: Vec<f64>,
    /// Energy grid in joules. Meaning is per scenario: spent energy for
    /// the pre-move figures, scheduler budget for the batch figures.
    pub energies: Vec<f64>,
    /// Batch sizes to sweep.
    pub m0: Vec<u64>,
    pub method: Method,
    /// Trials per Monte Carlo point.
    pub trials: u64,
    pub seed: u64,
    /// Output path; stdout when absent.
    pub out: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            scenario: None,
            boltzmann_k: 1.3807e-23,
            temperature: 298.15,
            n_emit: 5000,
            n_total: 800_000_000,
            c2: Vec::new(),
            energies: Vec::new(),
            m0: vec![1],
            method: Method::Normal,
            trials: 100_000,
            seed: 1,
            out: None,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    MissingEquals { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: {key} = `{value}`: {reason}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },
    #[error("line {line}: `E` and `E_geom` both present; pick one energy grid")]
    TwoEnergyGrids { line: usize },
    #[error("unknown scenario `{0}`; expected one of fig2_ratios, fig3_ber_premove, fig4_energy_vs_batch, fig5_ber_vs_batch, fig6_ber_posteq, fig7_gaps, point")]
    UnknownScenario(String),
    #[error("unknown method `{0}`; expected exact, normal, or mc")]
    UnknownMethod(String),
    #[error("scenario missing; pass it as the first CLI argument")]
    ScenarioMissing,
    #[error("{0}")]
    Invalid(String),
}

/// Parses config text into a [`SweepConfig`] with defaults applied for
/// omitted keys. Grid completeness is not checked here; each scenario
/// validates the slice of the config it actually uses.
pub fn parse_config(text: &str) -> Result<SweepConfig, ConfigError> {
    let mut config = SweepConfig::default();
    let mut seen: Vec<String> = Vec::new();
    let mut energy_grid_line: Option<usize> = None;

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or(ConfigError::MissingEquals { line })?;
        let key = key.trim();
        let value = value.trim();
        if seen.iter().any(|k| k == key) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
        seen.push(key.to_string());

        match key {
            "k" => {
                let k: f64 = parse_scalar(line, key, value)?;
                require(line, key, value, k.is_finite() && k > 0.0, "must be positive")?;
                config.boltzmann_k = k;
            }
            "T" => {
                let t: f64 = parse_scalar(line, key, value)?;
                require(line, key, value, t.is_finite() && t > 0.0, "must be positive")?;
                config.temperature = t;
            }
            "N_m" => {
                let n: u64 = parse_scalar(line, key, value)?;
                require(line, key, value, n >= 1, "must be at least 1")?;
                config.n_emit = n;
            }
            "n" => {
                let n: u64 = parse_scalar(line, key, value)?;
                require(
                    line,
                    key,
                    value,
                    n >= 4 && n.is_multiple_of(2),
                    "must be an even total of at least 4",
                )?;
                config.n_total = n;
            }
            "c2" => {
                let list: Vec<f64> = parse_list(line, key, value)?;
                for &c in &list {
                    require(
                        line,
                        key,
                        value,
                        c.is_finite() && 0.0 < c && c < 1.0,
                        "fractions must lie strictly between 0 and 1",
                    )?;
                }
                config.c2 = list;
            }
            "E" => {
                if let Some(first) = energy_grid_line.replace(line) {
                    let _ = first;
                    return Err(ConfigError::TwoEnergyGrids { line });
                }
                let list: Vec<f64> = parse_list(line, key, value)?;
                for &e in &list {
                    require(
                        line,
                        key,
                        value,
                        e.is_finite() && e >= 0.0,
                        "energies must be finite and non-negative",
                    )?;
                }
                config.energies = list;
            }
            "E_geom" => {
                if let Some(first) = energy_grid_line.replace(line) {
                    let _ = first;
                    return Err(ConfigError::TwoEnergyGrids { line });
                }
                config.energies = parse_geom(line, key, value)?;
            }
            "m0" => {
                let list: Vec<u64> = parse_list(line, key, value)?;
                for &m in &list {
                    require(line, key, value, m >= 1, "batch sizes must be at least 1")?;
                }
                config.m0 = list;
            }
            "method" => {
                config.method = value
                    .parse()
                    .map_err(|_| bad(line, key, value, "expected exact, normal, or mc"))?;
            }
            "trials" => {
                let t: u64 = parse_scalar(line, key, value)?;
                require(line, key, value, t >= 1, "must be at least 1")?;
                config.trials = t;
            }
            "seed" => {
                config.seed = parse_scalar(line, key, value)?;
            }
            "out" => {
                require(line, key, value, !value.is_empty(), "path must be non-empty")?;
                config.out = Some(PathBuf::from(value));
            }
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
        }
    }

    Ok(config)
}

fn bad(line: usize, key: &str, value: &str, reason: &str) -> ConfigError {
    ConfigError::BadValue {
        line,
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}

fn require(
    line: usize,
    key: &str,
    value: &str,
    ok: bool,
    reason: &str,
) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(bad(line, key, value, reason))
    }
}

fn parse_scalar<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| bad(line, key, value, "malformed number"))
}

fn parse_list<T: FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<T>, ConfigError> {
    let items: Vec<&str> = value.split(',').map(str::trim).collect();
    if items.iter().all(|s| s.is_empty()) {
        return Err(bad(line, key, value, "empty list"));
    }
    items
        .into_iter()
        .map(|item| {
            if item.is_empty() {
                Err(bad(line, key, value, "empty list entry"))
            } else {
                item.parse()
                    .map_err(|_| bad(line, key, value, "malformed number in list"))
            }
        })
        .collect()
}

/// `E_geom = start, stop, points` expands to a geometric grid with both
/// endpoints included. The last point is pinned to `stop` exactly rather
/// than trusting `start * ratio^(points-1)` to land there.
fn parse_geom(line: usize, key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(bad(line, key, value, "expected `start, stop, points`"));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| bad(line, key, value, "malformed start"))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|_| bad(line, key, value, "malformed stop"))?;
    let points: usize = parts[2]
        .parse()
        .map_err(|_| bad(line, key, value, "malformed point count"))?;
    require(
        line,
        key,
        value,
        start.is_finite() && start > 0.0,
        "start must be positive",
    )?;
    require(line, key, value, stop.is_finite() && stop >= start, "stop must be >= start")?;
    require(line, key, value, points >= 1, "need at least one point")?;
    if points == 1 {
        require(line, key, value, stop == start, "one point needs stop == start")?;
        return Ok(vec![start]);
    }
    let ratio = (stop / start).powf(1.0 / (points - 1) as f64);
    let mut grid: Vec<f64> = (0..points)
        .map(|i| start * ratio.powi(i as i32))
        .collect();
    grid[points - 1] = stop;
    Ok(grid)
}
