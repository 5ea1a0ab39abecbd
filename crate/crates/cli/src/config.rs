//! Run configuration: JSON file, flag overrides, validation and hashing.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use aiii_quench::dynamics::{EvolutionMode, QuenchSpec, TimeGrid};
use aiii_quench::model::{phase_oracle, ModelParams, Phase, DEFAULT_XI0, DEFAULT_XI_SO};
use aiii_quench::nmr::NmrParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "AIII_QUENCH_OUT";

/// A real number given either as a JSON number or as a `pi` expression
/// such as `"pi/6"`, `"-2pi/3"` or `"0.25*pi"`. Serializes back unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Number(f64),
    Expr(String),
}

impl Angle {
    pub fn value(&self) -> Result<f64, String> {
        match self {
            Angle::Number(x) => Ok(*x),
            Angle::Expr(s) => parse_pi_expr(s),
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::Number(x) => write!(f, "{x}"),
            Angle::Expr(s) => f.write_str(s),
        }
    }
}

/// `[sign] [coef][*]pi [/ denom]` or a plain decimal.
pub fn parse_pi_expr(text: &str) -> Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let bad = || format!("cannot parse angle '{text}'");
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d.parse::<f64>().map_err(|_| bad())?)),
        None => (s.as_str(), None),
    };
    let (sign, body) = match num.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, num.strip_prefix('+').unwrap_or(num)),
    };
    let value = if let Some(coef) = body.strip_suffix("pi") {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let c = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().map_err(|_| bad())? };
        c * PI
    } else {
        body.parse::<f64>().map_err(|_| bad())?
    };
    let value = sign * value / den.unwrap_or(1.0);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Exact,
    Trotter,
    Compiled,
    Noisy,
}

impl From<ModeName> for EvolutionMode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Exact => EvolutionMode::Exact,
            ModeName::Trotter => EvolutionMode::Trotter,
            ModeName::Compiled => EvolutionMode::Compiled,
            ModeName::Noisy => EvolutionMode::NoisyExact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[value(rename_all = "verbatim")]
#[allow(clippy::upper_case_acronyms)]
pub enum CaseLabel {
    I,
    II,
    III,
}

impl CaseLabel {
    /// Post-quench `m_z / ξ0` of each experimental case.
    pub fn mz(self) -> f64 {
        match self {
            CaseLabel::I => 0.0,
            CaseLabel::II => 1.3,
            CaseLabel::III => -1.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeGridConfig {
    /// `"experiment"` (0.5 … 5 ms) or `"dense"` (1000-point long average).
    Named(String),
    /// Explicit times in milliseconds.
    Points(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub case: Option<CaseLabel>,
    /// `m_z / ξ0`; falls back to the case preset, then to 0.86.
    pub mz: Option<f64>,
    /// rad/s
    pub xi0: f64,
    /// rad/s
    pub xi_so: f64,
    pub mode: ModeName,
    pub time_grid: TimeGridConfig,
    pub tau_ms: f64,
    pub kz: Angle,
    pub slice_grid: usize,
    pub mesh_grid: usize,
    /// Shell offset in units of `ξ0`.
    pub delta: f64,
    /// Dephasing amplitudes in units of `ξ_so`.
    pub noise_levels: Vec<f64>,
    pub noise_samples: usize,
    pub seed: u64,
    pub j_hz: f64,
    pub tau_hard_us: f64,
    /// `(h0, h1, h2, h3)` in rad/s for the `pulse` command.
    pub pulse_h: [f64; 4],
    /// Not part of the echoed configuration.
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    /// 0 = one per core. Not part of the echoed configuration.
    #[serde(skip_serializing)]
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            case: None,
            mz: None,
            xi0: DEFAULT_XI0,
            xi_so: DEFAULT_XI_SO,
            mode: ModeName::Trotter,
            time_grid: TimeGridConfig::Named("experiment".into()),
            tau_ms: 0.25,
            kz: Angle::Expr("pi/6".into()),
            slice_grid: 24,
            mesh_grid: 24,
            delta: 0.1,
            noise_levels: vec![0.0, 0.1, 0.25, 0.5],
            noise_samples: 100,
            seed: 20_240_521,
            j_hz: 215.0,
            tau_hard_us: 5.0,
            pulse_h: [-DEFAULT_XI0, 0.0, 0.0, -0.5 * DEFAULT_XI0],
            out: None,
            workers: 0,
        }
    }
}

/// Flag values layered over the file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// JSON configuration file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Experimental case preset (sets m_z).
    #[arg(long, value_enum, ignore_case = true)]
    pub case: Option<CaseLabel>,
    /// m_z in units of xi0.
    #[arg(long, allow_hyphen_values = true)]
    pub mz: Option<f64>,
    /// Grid size for slices and meshes.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeName>,
    /// `experiment`, `dense`, or comma-separated times in ms.
    #[arg(long)]
    pub time_grid: Option<String>,
    /// Shell offset in units of xi0.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (default: $AIII_QUENCH_OUT or ./out).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads, 0 = all cores.
    #[arg(long)]
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid configuration: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// File (if any) then flags, then validation.
    pub fn resolve(ov: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match &ov.config {
            Some(path) => Self::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(c) = ov.case {
            cfg.case = Some(c);
            cfg.mz = None;
        }
        if let Some(mz) = ov.mz {
            cfg.mz = Some(mz);
        }
        if let Some(n) = ov.grid {
            cfg.slice_grid = n;
            cfg.mesh_grid = n;
        }
        if let Some(m) = ov.mode {
            cfg.mode = m;
        }
        if let Some(tg) = &ov.time_grid {
            cfg.time_grid = parse_time_grid_flag(tg)?;
        }
        if let Some(d) = ov.delta {
            cfg.delta = d;
        }
        if let Some(s) = ov.seed {
            cfg.seed = s;
        }
        if let Some(o) = &ov.out {
            cfg.out = Some(o.clone());
        }
        if let Some(w) = ov.workers {
            cfg.workers = w;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn mz_over_xi0(&self) -> f64 {
        self.mz.unwrap_or_else(|| self.case.map_or(0.86, CaseLabel::mz))
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        ModelParams::new(self.mz_over_xi0() * self.xi0, self.xi0, self.xi_so).map_err(config_error)
    }

    pub fn time_grid(&self) -> Result<TimeGrid, CliError> {
        match &self.time_grid {
            TimeGridConfig::Named(name) if name == "experiment" => Ok(TimeGrid::experiment()),
            TimeGridConfig::Named(name) if name == "dense" => Ok(TimeGrid::dense()),
            TimeGridConfig::Named(name) => Err(CliError::Config(format!(
                "time_grid must be \"experiment\", \"dense\" or a list of ms (got \"{name}\")"
            ))),
            TimeGridConfig::Points(ms) => Ok(TimeGrid::Points(ms.iter().map(|t| t * 1e-3).collect())),
        }
    }

    pub fn nmr(&self) -> NmrParams {
        NmrParams {
            j_hz: self.j_hz,
            tau_hard: self.tau_hard_us * 1e-6,
            ..NmrParams::default()
        }
    }

    /// Surface-based commands need a gapped post-quench Hamiltonian.
    pub fn require_gapped(&self) -> Result<(), CliError> {
        if phase_oracle(&self.params()?) == Phase::Boundary {
            return Err(CliError::Config(format!(
                "m_z = {} xi0 sits on a phase boundary",
                self.mz_over_xi0()
            )));
        }
        Ok(())
    }

    pub fn kz(&self) -> Result<f64, CliError> {
        self.kz.value().map_err(CliError::Config)
    }

    /// Quench specification for `mode` (the configured one unless overridden).
    pub fn spec_with_mode(&self, mode: EvolutionMode) -> Result<QuenchSpec, CliError> {
        let mut spec = QuenchSpec::new(self.params()?, mode).with_times(self.time_grid()?).with_seed(self.seed);
        spec.tau = self.tau_ms * 1e-3;
        spec.noise_samples = self.noise_samples;
        spec.nmr = self.nmr();
        Ok(spec)
    }

    pub fn spec(&self) -> Result<QuenchSpec, CliError> {
        self.spec_with_mode(self.mode.into())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        self.params()?;
        self.kz()?;
        if self.slice_grid < 8 {
            return bad(format!("slice_grid must be >= 8 (got {})", self.slice_grid));
        }
        if self.mesh_grid < 16 {
            return bad(format!("mesh_grid must be >= 16 (got {})", self.mesh_grid));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return bad(format!("delta must lie in (0, 0.5) xi0 (got {})", self.delta));
        }
        if self.noise_levels.iter().any(|a| !(*a >= 0.0 && a.is_finite())) {
            return bad("noise_levels must be finite and >= 0".into());
        }
        if self.noise_samples == 0 {
            return bad("noise_samples must be >= 1".into());
        }
        if self.pulse_h.iter().any(|h| !h.is_finite()) {
            return bad("pulse_h must be finite".into());
        }
        self.nmr().validate().map_err(config_error)?;
        self.spec()?.validate().map_err(config_error)?;
        Ok(())
    }

    /// Canonical JSON of everything that determines the numbers.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.echo().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

fn config_error(e: aiii_quench::Error) -> CliError {
    CliError::Config(e.to_string())
}

fn parse_time_grid_flag(s: &str) -> Result<TimeGridConfig, CliError> {
    if s == "experiment" || s == "dense" {
        return Ok(TimeGridConfig::Named(s.into()));
    }
    s.split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map(TimeGridConfig::Points)
        .map_err(|_| CliError::Config(format!("cannot parse --time-grid '{s}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_expressions() {
        let close = |s: &str, v: f64| (parse_pi_expr(s).unwrap() - v).abs() < 1e-15;
        assert!(close("pi/6", PI / 6.0));
        assert!(close("-pi", -PI));
        assert!(close("2pi/3", 2.0 * PI / 3.0));
        assert!(close("0.25 * pi", PI / 4.0));
        assert!(close("0.5", 0.5));
        assert!(parse_pi_expr("tau").is_err());
        assert!(parse_pi_expr("pi/0").is_err());
    }

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
        assert_eq!(RunConfig::default().mz_over_xi0(), 0.86);
    }

    #[test]
    fn echo_round_trips_and_skips_runtime_fields() {
        let cfg = RunConfig {
            workers: 7,
            out: Some("/tmp/x".into()),
            ..RunConfig::default()
        };
        let echo = cfg.echo();
        assert!(!echo.contains("workers") && !echo.contains("/tmp/x"));
        let back = RunConfig::from_json(&echo).unwrap();
        assert_eq!(back.hash(), cfg.hash());
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(RunConfig::from_json(r#"{"mzz": 1}"#).is_err());
    }

    #[test]
    fn case_preset_and_override() {
        let ov = Overrides {
            case: Some(CaseLabel::III),
            ..Overrides::default()
        };
        assert_eq!(RunConfig::resolve(&ov).unwrap().mz_over_xi0(), -1.3);
        let ov = Overrides {
            case: Some(CaseLabel::III),
            mz: Some(0.2),
            ..Overrides::default()
        };
        assert_eq!(RunConfig::resolve(&ov).unwrap().mz_over_xi0(), 0.2);
    }

    #[test]
    fn dense_trotter_is_a_config_error() {
        let ov = Overrides {
            time_grid: Some("dense".into()),
            ..Overrides::default()
        };
        assert!(matches!(RunConfig::resolve(&ov), Err(CliError::Config(_))));
    }
}
