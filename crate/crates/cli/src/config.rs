//! Experiment configuration: flag/file merging, validation, and sweep
//! definitions.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::CliError;
use gjcm::{Complex64, ModelParams, SectorPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SectorsArg {
    /// All excitation sectors reachable from the initial state.
    Full,
    /// Ansatz truncation that drops the two lowest sectors and keeps the
    /// resulting norm deficit.
    Paper,
}

impl SectorsArg {
    pub fn policy(self) -> SectorPolicy {
        match self {
            SectorsArg::Full => SectorPolicy::Full,
            SectorsArg::Paper => SectorPolicy::Ansatz,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SectorsArg::Full => "full",
            SectorsArg::Paper => "paper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SolverArg {
    /// Closed-form spectral propagator.
    Exact,
    /// Fixed-step fourth-order Runge-Kutta.
    Rk4,
}

impl SolverArg {
    pub fn name(self) -> &'static str {
        match self {
            SolverArg::Exact => "exact",
            SolverArg::Rk4 => "rk4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl FormatArg {
    pub fn extension(self) -> &'static str {
        match self {
            FormatArg::Csv => "csv",
            FormatArg::Json => "json",
        }
    }
}

/// One selectable output column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Entropy,
    Concurrence,
    Inversion,
    G2,
    Norm,
    Excitation,
}

impl Observable {
    /// Canonical column order.
    pub const ALL: [Observable; 6] = [
        Observable::Entropy,
        Observable::Concurrence,
        Observable::Inversion,
        Observable::G2,
        Observable::Norm,
        Observable::Excitation,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Observable::Entropy => "S",
            Observable::Concurrence => "C",
            Observable::Inversion => "W",
            Observable::G2 => "g2",
            Observable::Norm => "norm",
            Observable::Excitation => "excitation",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        Observable::ALL
            .iter()
            .copied()
            .find(|o| o.column() == token)
    }
}

/// Parse a comma-separated observable selection into canonical order.
pub fn parse_observables(tokens: &[String]) -> Result<Vec<Observable>, CliError> {
    let mut picked = Vec::new();
    for t in tokens {
        let obs = Observable::parse(t).ok_or_else(|| {
            CliError::Config(format!(
                "observables: unknown observable {t:?} (expected S, C, W, g2, norm, excitation)"
            ))
        })?;
        if !picked.contains(&obs) {
            picked.push(obs);
        }
    }
    // fixed column order regardless of how the selection was written
    Ok(Observable::ALL
        .into_iter()
        .filter(|o| picked.contains(o))
        .collect())
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    pub omega: f64,
    pub alpha: f64,
    /// Photon truncation; `None` selects it automatically from `alpha`.
    pub n_max: Option<usize>,
    pub sectors: SectorsArg,
    pub solver: SolverArg,
    pub dt: f64,
    pub tau_max: f64,
    pub dtau_out: f64,
    pub observables: Vec<Observable>,
    pub out_dir: PathBuf,
    pub format: FormatArg,
    pub plot: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, why: String| Err(CliError::Config(format!("{field}: {why}")));
        if !(self.lambda1 >= 0.0 && self.lambda1.is_finite()) {
            return bad(
                "lambda1",
                format!("must be a nonnegative number, got {}", self.lambda1),
            );
        }
        if !(self.lambda2 >= 0.0 && self.lambda2.is_finite()) {
            return bad(
                "lambda2",
                format!("must be a nonnegative number, got {}", self.lambda2),
            );
        }
        if !self.omega.is_finite() {
            return bad("omega", format!("must be finite, got {}", self.omega));
        }
        if !self.alpha.is_finite() {
            return bad("alpha", format!("must be finite, got {}", self.alpha));
        }
        if !(self.tau_max > 0.0 && self.tau_max.is_finite()) {
            return bad("tmax", format!("must be positive, got {}", self.tau_max));
        }
        if !(self.dtau_out > 0.0 && self.dtau_out.is_finite()) {
            return bad(
                "dtau-out",
                format!("must be positive, got {}", self.dtau_out),
            );
        }
        if self.solver == SolverArg::Rk4 && !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(
                "dt",
                format!("must be positive for the rk4 solver, got {}", self.dt),
            );
        }
        if self.observables.is_empty() {
            return bad("observables", "selection must not be empty".into());
        }
        Ok(())
    }

    /// Model parameters for the simulation core; setup errors count as
    /// configuration errors.
    pub fn model_params(&self) -> Result<ModelParams, CliError> {
        let alpha = Complex64::new(self.alpha, 0.0);
        let n_max = self.n_max.unwrap_or_else(|| ModelParams::auto_n_max(alpha));
        ModelParams::new(
            self.lambda1,
            self.lambda2,
            self.omega,
            alpha,
            n_max,
            self.sectors.policy(),
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }

    /// Output sampling grid `0, dtau, 2 dtau, ..` up to and including
    /// `tau_max` (within rounding of the last step).
    pub fn time_grid(&self) -> Vec<f64> {
        let count = (self.tau_max / self.dtau_out + 1e-9).floor() as usize;
        (0..=count).map(|i| i as f64 * self.dtau_out).collect()
    }

    /// Short human-readable parameter stamp used in plot titles.
    pub fn describe(&self) -> String {
        format!(
            "lambda1={} lambda2={} omega={} alpha={} sectors={} solver={}",
            self.lambda1,
            self.lambda2,
            self.omega,
            self.alpha,
            self.sectors.name(),
            self.solver.name()
        )
    }
}

/// Flat JSON config file mirroring the flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub omega: Option<f64>,
    pub alpha: Option<f64>,
    pub n_max: Option<usize>,
    pub sectors: Option<String>,
    pub solver: Option<String>,
    pub dt: Option<f64>,
    pub tau_max: Option<f64>,
    pub dtau_out: Option<f64>,
    pub observables: Option<Vec<String>>,
    pub out_dir: Option<String>,
    pub format: Option<String>,
    pub plot: Option<bool>,
}

pub fn load_config_file(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("config file {}: {e}", path.display())))
}

fn parse_enum_token<T: Copy>(field: &str, token: &str, table: &[(&str, T)]) -> Result<T, CliError> {
    table
        .iter()
        .find(|(name, _)| *name == token)
        .map(|(_, v)| *v)
        .ok_or_else(|| {
            let options: Vec<&str> = table.iter().map(|(name, _)| *name).collect();
            CliError::Config(format!(
                "{field}: unknown value {token:?} (expected one of {options:?})"
            ))
        })
}

/// Flag values override file values, which override the defaults.
pub struct ConfigSources {
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub omega: Option<f64>,
    pub alpha: Option<f64>,
    pub n_max: Option<usize>,
    pub sectors: Option<SectorsArg>,
    pub solver: Option<SolverArg>,
    pub dt: Option<f64>,
    pub tau_max: Option<f64>,
    pub dtau_out: Option<f64>,
    pub observables: Option<Vec<String>>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<FormatArg>,
    pub plot: bool,
    pub file: ConfigFile,
}

impl ConfigSources {
    pub fn resolve(self) -> Result<ExperimentConfig, CliError> {
        let file = self.file;
        let sectors = match self.sectors {
            Some(s) => s,
            None => match file.sectors.as_deref() {
                Some(tok) => parse_enum_token(
                    "sectors",
                    tok,
                    &[("full", SectorsArg::Full), ("paper", SectorsArg::Paper)],
                )?,
                None => SectorsArg::Full,
            },
        };
        let solver = match self.solver {
            Some(s) => s,
            None => match file.solver.as_deref() {
                Some(tok) => parse_enum_token(
                    "solver",
                    tok,
                    &[("exact", SolverArg::Exact), ("rk4", SolverArg::Rk4)],
                )?,
                None => SolverArg::Exact,
            },
        };
        let format = match self.format {
            Some(f) => f,
            None => match file.format.as_deref() {
                Some(tok) => parse_enum_token(
                    "format",
                    tok,
                    &[("csv", FormatArg::Csv), ("json", FormatArg::Json)],
                )?,
                None => FormatArg::Csv,
            },
        };
        let observables = match self.observables.or(file.observables) {
            Some(tokens) => parse_observables(&tokens)?,
            None => Observable::ALL.to_vec(),
        };
        let cfg = ExperimentConfig {
            lambda1: self.lambda1.or(file.lambda1).unwrap_or(0.3),
            lambda2: self.lambda2.or(file.lambda2).unwrap_or(0.3),
            omega: self.omega.or(file.omega).unwrap_or(0.2),
            alpha: self.alpha.or(file.alpha).unwrap_or(3.0),
            n_max: self.n_max.or(file.n_max),
            sectors,
            solver,
            dt: self.dt.or(file.dt).unwrap_or(1e-3),
            tau_max: self.tau_max.or(file.tau_max).unwrap_or(100.0),
            dtau_out: self.dtau_out.or(file.dtau_out).unwrap_or(0.05),
            observables,
            out_dir: self
                .out_dir
                .or(file.out_dir.map(PathBuf::from))
                .unwrap_or_else(|| ".".into()),
            format,
            plot: self.plot || file.plot.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Lambda1,
    Lambda2,
    Omega,
    Alpha,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Lambda1 => "lambda1",
            SweepParam::Lambda2 => "lambda2",
            SweepParam::Omega => "omega",
            SweepParam::Alpha => "alpha",
        }
    }
}

/// A swept parameter with its explicit value list.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl SweepSpec {
    /// Parse `name=v1,v2,..` or `name=start:stop:count`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = |why: String| CliError::Config(format!("sweep: {why}"));
        let (name, rhs) = text
            .split_once('=')
            .ok_or_else(|| bad(format!("expected <param>=<values>, got {text:?}")))?;
        let param = match name {
            "lambda1" => SweepParam::Lambda1,
            "lambda2" => SweepParam::Lambda2,
            "omega" => SweepParam::Omega,
            "alpha" => SweepParam::Alpha,
            other => {
                return Err(bad(format!(
                    "unknown parameter {other:?} (expected lambda1, lambda2, omega, alpha)"
                )))
            }
        };
        let parse_num = |tok: &str| {
            tok.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("invalid number {tok:?}")))
        };
        let values = if rhs.contains(':') {
            let parts: Vec<&str> = rhs.split(':').collect();
            if parts.len() != 3 {
                return Err(bad(format!("range must be start:stop:count, got {rhs:?}")));
            }
            let start = parse_num(parts[0])?;
            let stop = parse_num(parts[1])?;
            let count: usize = parts[2]
                .trim()
                .parse()
                .ok()
                .filter(|&c| c >= 1)
                .ok_or_else(|| {
                    bad(format!(
                        "count must be a positive integer, got {:?}",
                        parts[2]
                    ))
                })?;
            if count == 1 {
                vec![start]
            } else {
                (0..count)
                    .map(|i| start + i as f64 * (stop - start) / (count - 1) as f64)
                    .collect()
            }
        } else {
            rhs.split(',')
                .map(parse_num)
                .collect::<Result<Vec<f64>, CliError>>()?
        };
        if values.is_empty() {
            return Err(bad("value list must not be empty".into()));
        }
        Ok(SweepSpec { param, values })
    }

    /// The base configuration with the swept parameter replaced.
    pub fn apply(&self, base: &ExperimentConfig, value: f64) -> ExperimentConfig {
        let mut cfg = base.clone();
        match self.param {
            SweepParam::Lambda1 => cfg.lambda1 = value,
            SweepParam::Lambda2 => cfg.lambda2 = value,
            SweepParam::Omega => cfg.omega = value,
            SweepParam::Alpha => cfg.alpha = value,
        }
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_list_and_range_forms() {
        let s = SweepSpec::parse("lambda1=0.2,0.5,0.8,1.2").unwrap();
        assert_eq!(s.param, SweepParam::Lambda1);
        assert_eq!(s.values, vec![0.2, 0.5, 0.8, 1.2]);
        let r = SweepSpec::parse("lambda2=0.0:1.0:5").unwrap();
        assert_eq!(r.values, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let one = SweepSpec::parse("alpha=2.0:9.0:1").unwrap();
        assert_eq!(one.values, vec![2.0]);
    }

    #[test]
    fn sweep_rejects_malformed_specs() {
        assert!(SweepSpec::parse("lambda1").is_err());
        assert!(SweepSpec::parse("mass=1,2").is_err());
        assert!(SweepSpec::parse("omega=0.1:0.5:0").is_err());
        assert!(SweepSpec::parse("omega=a,b").is_err());
        assert!(SweepSpec::parse("omega=0.1:0.5").is_err());
    }

    #[test]
    fn observables_keep_canonical_order() {
        let picked = parse_observables(&["W".into(), "S".into(), "W".into(), "g2".into()]).unwrap();
        assert_eq!(
            picked,
            vec![Observable::Entropy, Observable::Inversion, Observable::G2]
        );
        assert!(parse_observables(&["X".into()]).is_err());
    }

    fn sources() -> ConfigSources {
        ConfigSources {
            lambda1: None,
            lambda2: None,
            omega: None,
            alpha: None,
            n_max: None,
            sectors: None,
            solver: None,
            dt: None,
            tau_max: None,
            dtau_out: None,
            observables: None,
            out_dir: None,
            format: None,
            plot: false,
            file: ConfigFile::default(),
        }
    }

    #[test]
    fn defaults_match_the_reference_scenario() {
        let cfg = sources().resolve().unwrap();
        assert_eq!(cfg.lambda1, 0.3);
        assert_eq!(cfg.lambda2, 0.3);
        assert_eq!(cfg.omega, 0.2);
        assert_eq!(cfg.alpha, 3.0);
        assert_eq!(cfg.tau_max, 100.0);
        assert_eq!(cfg.dtau_out, 0.05);
        assert_eq!(cfg.observables.len(), 6);
        assert_eq!(cfg.time_grid().len(), 2001);
        assert_eq!(cfg.model_params().unwrap().n_max, 40);
    }

    #[test]
    fn flags_override_file_values() {
        let mut src = sources();
        src.file.lambda1 = Some(0.7);
        src.file.tau_max = Some(10.0);
        src.lambda1 = Some(0.2);
        let cfg = src.resolve().unwrap();
        assert_eq!(cfg.lambda1, 0.2);
        assert_eq!(cfg.tau_max, 10.0);
    }

    #[test]
    fn validation_reports_field_names() {
        let mut src = sources();
        src.tau_max = Some(-1.0);
        let err = src.resolve().unwrap_err();
        assert!(err.to_string().contains("tmax"));
        let mut src = sources();
        src.observables = Some(vec![]);
        assert!(src
            .resolve()
            .unwrap_err()
            .to_string()
            .contains("observables"));
    }
}
