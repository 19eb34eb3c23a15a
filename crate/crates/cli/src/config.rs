//! Run configuration: defaults, `key = value` files and command-line
//! overrides, merged in that order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use kaon_core::physics::{DELTA_M_RATIO, EPSILON_MAGNITUDE, EPSILON_PHASE, GAMMA_RATIO};
use kaon_core::{BasisChoice, Normalization, PhysicalParams};

use crate::error::CliError;

/// Every setting that can come from a config file or a flag. Unset fields
/// fall through to the next layer.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Config file with `key = value` lines; flags given here win.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// K_S decay rate, the unit of inverse time.
    #[arg(long)]
    pub gamma_s: Option<f64>,
    /// gamma_S / gamma_L.
    #[arg(long)]
    pub gamma_ratio: Option<f64>,
    /// delta_m / gamma_S.
    #[arg(long)]
    pub delta_m_ratio: Option<f64>,
    /// |epsilon|.
    #[arg(long)]
    pub epsilon_mag: Option<f64>,
    /// arg(epsilon) in radians.
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon_phase: Option<f64>,
    /// End of the time grid, in units of 1/gamma_S.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of grid intervals; the grid has steps + 1 points.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Measurement basis for P and V [default: cp].
    #[arg(long, value_name = "strangeness|cp")]
    pub basis: Option<BasisChoice>,
    /// Normalize P, V, S, M and C by the surviving trace [default: raw].
    #[arg(long, value_name = "raw|surviving")]
    pub mode: Option<Normalization>,
    /// Named initial state or comma-separated complex amplitudes.
    #[arg(long, value_name = "NAME|SPEC", allow_hyphen_values = true)]
    pub initial: Option<String>,
    /// Output file, or `stdout`.
    #[arg(long, value_name = "PATH|stdout")]
    pub out: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| format!("bad value '{value}' for {key}: {e}"))
}

impl Overrides {
    /// Sets one field from its textual form. Keys may use `_` or `-`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "gamma_s" => self.gamma_s = Some(parse_value(&key, value)?),
            "gamma_ratio" => self.gamma_ratio = Some(parse_value(&key, value)?),
            "delta_m_ratio" => self.delta_m_ratio = Some(parse_value(&key, value)?),
            "epsilon_mag" => self.epsilon_mag = Some(parse_value(&key, value)?),
            "epsilon_phase" => self.epsilon_phase = Some(parse_value(&key, value)?),
            "t_max" => self.t_max = Some(parse_value(&key, value)?),
            "steps" => self.steps = Some(parse_value(&key, value)?),
            "basis" => self.basis = Some(parse_value(&key, value)?),
            "mode" => self.mode = Some(parse_value(&key, value)?),
            "initial" => self.initial = Some(value.to_string()),
            "out" => self.out = Some(value.to_string()),
            "seed" => self.seed = Some(parse_value(&key, value)?),
            "config" => return Err("config files cannot include other config files".into()),
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Parses `key = value` lines. Blank lines and `#` comments are skipped.
    pub fn parse_file_contents(text: &str) -> Result<Self, (usize, String)> {
        let mut out = Self::default();
        for (index, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| (index + 1, format!("expected key = value, got '{line}'")))?;
            out.set(key, value).map_err(|e| (index + 1, e))?;
        }
        Ok(out)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            line: 0,
            message: e.to_string(),
        })?;
        Self::parse_file_contents(&text).map_err(|(line, message)| CliError::Config {
            path: path.to_path_buf(),
            line,
            message,
        })
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(self, other: Overrides) -> Overrides {
        Overrides {
            config: other.config.or(self.config),
            gamma_s: other.gamma_s.or(self.gamma_s),
            gamma_ratio: other.gamma_ratio.or(self.gamma_ratio),
            delta_m_ratio: other.delta_m_ratio.or(self.delta_m_ratio),
            epsilon_mag: other.epsilon_mag.or(self.epsilon_mag),
            epsilon_phase: other.epsilon_phase.or(self.epsilon_phase),
            t_max: other.t_max.or(self.t_max),
            steps: other.steps.or(self.steps),
            basis: other.basis.or(self.basis),
            mode: other.mode.or(self.mode),
            initial: other.initial.or(self.initial),
            out: other.out.or(self.out),
            seed: other.seed.or(self.seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutputTarget {
    Stdout,
    File(PathBuf),
}

impl OutputTarget {
    fn parse(s: &str) -> Self {
        if s == "stdout" || s == "-" {
            OutputTarget::Stdout
        } else {
            OutputTarget::File(PathBuf::from(s))
        }
    }
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub gamma_s: f64,
    pub gamma_ratio: f64,
    pub delta_m_ratio: f64,
    pub epsilon_mag: f64,
    pub epsilon_phase: f64,
    pub t_max: f64,
    pub steps: usize,
    pub basis: BasisChoice,
    pub mode: Normalization,
    pub initial: Option<String>,
    pub out: OutputTarget,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 20_240_601;

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gamma_s: 1.0,
            gamma_ratio: GAMMA_RATIO,
            delta_m_ratio: DELTA_M_RATIO,
            epsilon_mag: EPSILON_MAGNITUDE,
            epsilon_phase: EPSILON_PHASE,
            t_max: 6.0,
            steps: 600,
            basis: BasisChoice::Cp,
            mode: Normalization::default(),
            initial: None,
            out: OutputTarget::Stdout,
            seed: DEFAULT_SEED,
        }
    }
}

impl RunConfig {
    /// Defaults, then the config file named by the flags (if any), then the
    /// flags themselves.
    pub fn resolve(flags: Overrides) -> Result<Self, CliError> {
        let merged = match &flags.config {
            Some(path) => Overrides::from_file(path)?.overlay(flags),
            None => flags,
        };
        Self::from_overrides(merged)
    }

    pub fn from_overrides(o: Overrides) -> Result<Self, CliError> {
        let d = Self::default();
        let config = Self {
            gamma_s: o.gamma_s.unwrap_or(d.gamma_s),
            gamma_ratio: o.gamma_ratio.unwrap_or(d.gamma_ratio),
            delta_m_ratio: o.delta_m_ratio.unwrap_or(d.delta_m_ratio),
            epsilon_mag: o.epsilon_mag.unwrap_or(d.epsilon_mag),
            epsilon_phase: o.epsilon_phase.unwrap_or(d.epsilon_phase),
            t_max: o.t_max.unwrap_or(d.t_max),
            steps: o.steps.unwrap_or(d.steps),
            basis: o.basis.unwrap_or(d.basis),
            mode: o.mode.unwrap_or(d.mode),
            initial: o.initial,
            out: o.out.as_deref().map(OutputTarget::parse).unwrap_or(d.out),
            seed: o.seed.unwrap_or(d.seed),
        };
        if !(config.t_max.is_finite() && config.t_max > 0.0) {
            return Err(CliError::Usage(format!(
                "t_max must be positive, got {}",
                config.t_max
            )));
        }
        if config.steps < 2 {
            return Err(CliError::Usage(format!(
                "steps must be at least 2, got {}",
                config.steps
            )));
        }
        config.params()?;
        Ok(config)
    }

    pub fn params(&self) -> Result<PhysicalParams, CliError> {
        Ok(PhysicalParams::from_ratios(
            self.gamma_s,
            self.gamma_ratio,
            self.delta_m_ratio,
            self.epsilon_mag,
            self.epsilon_phase,
        )?)
    }

    /// `t_k = t_max k / steps` for `k = 0..=steps`.
    pub fn time_grid(&self) -> Vec<f64> {
        (0..=self.steps)
            .map(|k| self.t_max * k as f64 / self.steps as f64)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_format() {
        let text = "# kaon run\n\nepsilon_mag = 0.1  # inflated\nbasis=cp\nt-max = 4\n";
        let o = Overrides::parse_file_contents(text).unwrap();
        assert_eq!(o.epsilon_mag, Some(0.1));
        assert_eq!(o.basis, Some(BasisChoice::Cp));
        assert_eq!(o.t_max, Some(4.0));
        assert_eq!(o.steps, None);
    }

    #[test]
    fn file_errors_carry_line_numbers() {
        assert_eq!(
            Overrides::parse_file_contents("steps = 3\nbogus = 1")
                .unwrap_err()
                .0,
            2
        );
        assert_eq!(Overrides::parse_file_contents("steps 3").unwrap_err().0, 1);
        assert_eq!(
            Overrides::parse_file_contents("steps = many")
                .unwrap_err()
                .0,
            1
        );
    }

    #[test]
    fn flags_win_over_file() {
        let file = Overrides::parse_file_contents("steps = 10\nseed = 4").unwrap();
        let flags = Overrides {
            steps: Some(20),
            ..Overrides::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.steps, Some(20));
        assert_eq!(merged.seed, Some(4));
    }

    #[test]
    fn defaults_resolve() {
        let cfg = RunConfig::from_overrides(Overrides::default()).unwrap();
        let grid = cfg.time_grid();
        assert_eq!(grid.len(), 601);
        assert_eq!(grid[0], 0.0);
        assert_eq!(grid[600], 6.0);
        assert_eq!(cfg.params().unwrap(), PhysicalParams::default());
    }

    #[test]
    fn rejects_bad_grid_and_params() {
        let bad = |o: Overrides| RunConfig::from_overrides(o).is_err();
        assert!(bad(Overrides {
            steps: Some(1),
            ..Overrides::default()
        }));
        assert!(bad(Overrides {
            t_max: Some(0.0),
            ..Overrides::default()
        }));
        assert!(bad(Overrides {
            gamma_ratio: Some(0.5),
            ..Overrides::default()
        }));
        assert!(bad(Overrides {
            epsilon_mag: Some(-1.0),
            ..Overrides::default()
        }));
    }

    #[test]
    fn output_target() {
        assert_eq!(OutputTarget::parse("stdout"), OutputTarget::Stdout);
        assert_eq!(
            OutputTarget::parse("a.csv"),
            OutputTarget::File("a.csv".into())
        );
    }
}
