//! Orchestration: configuration -> evolved states -> observable rows -> files.

use std::fs;
use std::path::{Path, PathBuf};

use gjcm::{
    concurrence, entropy, evolve_exact, evolve_rk4, excitation_expectation, g2, initial_state,
    inversion, isospin_density, pair_density, plan, total_norm, ModelParams, SystemState,
};

use crate::config::{ExperimentConfig, FormatArg, Observable, SolverArg, SweepSpec};
use crate::error::CliError;
use crate::series::{fmt_float, write_csv, write_json, ParamValue, Series};
use crate::svg;

fn config_err(e: gjcm::Error) -> CliError {
    CliError::Config(e.to_string())
}

/// Walk the output grid, handing each sampled state to `visit`. The exact
/// solver evaluates every sample from the initial state; the RK4 solver steps
/// segment by segment.
fn for_each_state<F>(
    cfg: &ExperimentConfig,
    mp: &ModelParams,
    taus: &[f64],
    mut visit: F,
) -> Result<(), CliError>
where
    F: FnMut(f64, &SystemState) -> Result<(), CliError>,
{
    let s0 = initial_state(mp).map_err(config_err)?;
    match cfg.solver {
        SolverArg::Exact => {
            let pl = plan(mp, taus).map_err(config_err)?;
            for &t in taus {
                let s = evolve_exact(&s0, &pl, t)?;
                visit(t, &s)?;
            }
        }
        SolverArg::Rk4 => {
            let mut s = s0;
            visit(taus[0], &s)?;
            for &t in &taus[1..] {
                s = evolve_rk4(&s, mp, cfg.dtau_out, cfg.dt)?;
                visit(t, &s)?;
            }
        }
    }
    Ok(())
}

/// One output row: the grid time followed by the requested observables.
fn values_for(observables: &[Observable], tau: f64, s: &SystemState) -> Result<Vec<f64>, CliError> {
    let rt = |e: gjcm::Error| CliError::Runtime(format!("at tau = {tau}: {e}"));
    let iso = isospin_density(s);
    let pair = pair_density(s);
    let mut row = Vec::with_capacity(observables.len() + 1);
    row.push(tau);
    for obs in observables {
        row.push(match obs {
            Observable::Entropy => entropy(&iso).map_err(rt)?,
            Observable::Concurrence => concurrence(&pair).map_err(rt)?,
            Observable::Inversion => inversion(&iso),
            Observable::G2 => g2(s).map_err(rt)?,
            Observable::Norm => total_norm(s),
            Observable::Excitation => excitation_expectation(s),
        });
    }
    Ok(row)
}

fn columns_for(observables: &[Observable]) -> Vec<String> {
    let mut cols = vec!["tau".to_owned()];
    cols.extend(observables.iter().map(|o| o.column().to_owned()));
    cols
}

fn param_stamp(cfg: &ExperimentConfig, mp: &ModelParams) -> Vec<(&'static str, ParamValue)> {
    vec![
        ("lambda1", ParamValue::Num(cfg.lambda1)),
        ("lambda2", ParamValue::Num(cfg.lambda2)),
        ("omega", ParamValue::Num(cfg.omega)),
        ("alpha", ParamValue::Num(cfg.alpha)),
        ("n_max", ParamValue::Int(mp.n_max as u64)),
        ("sectors", ParamValue::Str(cfg.sectors.name())),
        ("solver", ParamValue::Str(cfg.solver.name())),
        (
            "dt",
            if cfg.solver == SolverArg::Rk4 {
                ParamValue::Num(cfg.dt)
            } else {
                ParamValue::Null
            },
        ),
        ("tau_max", ParamValue::Num(cfg.tau_max)),
        ("dtau_out", ParamValue::Num(cfg.dtau_out)),
    ]
}

fn render_series_text(cfg: &ExperimentConfig, mp: &ModelParams, series: &Series) -> String {
    match cfg.format {
        FormatArg::Csv => write_csv(series),
        FormatArg::Json => write_json(series, &param_stamp(cfg, mp)),
    }
}

fn write_plots(
    cfg: &ExperimentConfig,
    series: &Series,
    prefix: &str,
) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    let taus: Vec<f64> = series.rows.iter().map(|r| r[0]).collect();
    for (k, obs) in cfg.observables.iter().enumerate() {
        let values: Vec<f64> = series.rows.iter().map(|r| r[k + 1]).collect();
        let title = format!("{} ({})", obs.column(), cfg.describe());
        let svg = svg::render(&taus, &values, obs.column(), &title)?;
        let path = cfg.out_dir.join(format!("{prefix}{}.svg", obs.column()));
        fs::write(&path, svg)?;
        written.push(path);
    }
    Ok(written)
}

/// Everything `run` or one sweep entry wrote to disk.
pub struct WrittenFiles {
    pub series: PathBuf,
    pub plots: Vec<PathBuf>,
}

/// Simulate one configuration and write its series file (plus plots when
/// requested). Byte-deterministic for equal configurations.
pub fn run(cfg: &ExperimentConfig) -> Result<WrittenFiles, CliError> {
    cfg.validate()?;
    let mp = cfg.model_params()?;
    let taus = cfg.time_grid();
    let mut rows = Vec::with_capacity(taus.len());
    for_each_state(cfg, &mp, &taus, |t, s| {
        rows.push(values_for(&cfg.observables, t, s)?);
        Ok(())
    })?;
    let series = Series {
        columns: columns_for(&cfg.observables),
        rows,
    };
    fs::create_dir_all(&cfg.out_dir)?;
    let path = cfg
        .out_dir
        .join(format!("series.{}", cfg.format.extension()));
    fs::write(&path, render_series_text(cfg, &mp, &series))?;
    let plots = if cfg.plot {
        write_plots(cfg, &series, "plot_")?
    } else {
        Vec::new()
    };
    Ok(WrittenFiles {
        series: path,
        plots,
    })
}

struct SweepEntry {
    value: f64,
    file: String,
    plots: Vec<String>,
    mean_entropy: f64,
    mean_g2: f64,
    max_concurrence: f64,
}

/// Output of a sweep: per-value series files plus the manifest, written last.
pub struct SweepOutput {
    pub manifest: PathBuf,
    pub files: Vec<PathBuf>,
}

pub fn sweep(spec: &SweepSpec, base: &ExperimentConfig) -> Result<SweepOutput, CliError> {
    base.validate()?;
    let all = Observable::ALL;
    let col_of = |obs: Observable| 1 + all.iter().position(|o| *o == obs).unwrap();
    let mut entries: Vec<SweepEntry> = Vec::new();
    let mut files = Vec::new();

    for &value in &spec.values {
        let cfg = spec.apply(base, value);
        cfg.validate()?;
        let mp = cfg.model_params()?;
        let taus = cfg.time_grid();

        // full records feed the summary statistics regardless of selection
        let mut full_rows: Vec<Vec<f64>> = Vec::with_capacity(taus.len());
        for_each_state(&cfg, &mp, &taus, |t, s| {
            full_rows.push(values_for(&all, t, s)?);
            Ok(())
        })?;
        let n = full_rows.len() as f64;
        let mean_entropy = full_rows
            .iter()
            .map(|r| r[col_of(Observable::Entropy)])
            .sum::<f64>()
            / n;
        let mean_g2 = full_rows
            .iter()
            .map(|r| r[col_of(Observable::G2)])
            .sum::<f64>()
            / n;
        let max_concurrence = full_rows
            .iter()
            .map(|r| r[col_of(Observable::Concurrence)])
            .fold(f64::NEG_INFINITY, f64::max);

        let rows: Vec<Vec<f64>> = full_rows
            .iter()
            .map(|full| {
                let mut row = vec![full[0]];
                row.extend(cfg.observables.iter().map(|o| full[col_of(*o)]));
                row
            })
            .collect();
        let series = Series {
            columns: columns_for(&cfg.observables),
            rows,
        };

        let file = format!("{}_{}.{}", spec.param.name(), value, cfg.format.extension());
        if entries.iter().any(|e| e.file == file) {
            return Err(CliError::Config(format!("sweep: duplicate value {value}")));
        }
        fs::create_dir_all(&cfg.out_dir)?;
        let path = cfg.out_dir.join(&file);
        fs::write(&path, render_series_text(&cfg, &mp, &series))?;
        files.push(path);

        let prefix = format!("{}_{}_", spec.param.name(), value);
        let plots = if cfg.plot {
            let paths = write_plots(&cfg, &series, &prefix)?;
            files.extend(paths.iter().cloned());
            paths
                .iter()
                .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
                .collect()
        } else {
            Vec::new()
        };
        entries.push(SweepEntry {
            value,
            file,
            plots,
            mean_entropy,
            mean_g2,
            max_concurrence,
        });
    }

    // the manifest is written last, once every series file exists
    let mut manifest = String::from("{\n");
    manifest.push_str(&format!("  \"parameter\": {:?},\n", spec.param.name()));
    manifest.push_str("  \"entries\": [");
    for (i, e) in entries.iter().enumerate() {
        if i > 0 {
            manifest.push(',');
        }
        manifest.push_str("\n    {\n");
        manifest.push_str(&format!("      \"value\": {},\n", fmt_float(e.value)));
        manifest.push_str(&format!("      \"file\": {:?},\n", e.file));
        let plots: Vec<String> = e.plots.iter().map(|p| format!("{p:?}")).collect();
        manifest.push_str(&format!("      \"plots\": [{}],\n", plots.join(", ")));
        manifest.push_str(&format!(
            "      \"mean_S\": {},\n",
            fmt_float(e.mean_entropy)
        ));
        manifest.push_str(&format!("      \"mean_g2\": {},\n", fmt_float(e.mean_g2)));
        manifest.push_str(&format!(
            "      \"max_C\": {}\n",
            fmt_float(e.max_concurrence)
        ));
        manifest.push_str("    }");
    }
    manifest.push_str("\n  ]\n}\n");
    let manifest_path = base.out_dir.join("manifest.json");
    fs::write(&manifest_path, manifest)?;
    Ok(SweepOutput {
        manifest: manifest_path,
        files,
    })
}

/// Re-render one observable column of an existing series file.
pub fn render_file(
    series_path: &Path,
    observable: &str,
    out: Option<PathBuf>,
) -> Result<PathBuf, CliError> {
    let text = fs::read_to_string(series_path)?;
    let is_json = series_path
        .extension()
        .map(|e| e == "json")
        .unwrap_or(false);
    let (series, stamp) = if is_json {
        crate::series::parse_json(&text)?
    } else {
        (crate::series::parse_csv(&text)?, None)
    };
    if series.rows.is_empty() {
        return Err(CliError::Runtime("no data rows".into()));
    }
    let tau_col = series
        .column_index("tau")
        .ok_or_else(|| CliError::Runtime("series file has no tau column".into()))?;
    let col = series.column_index(observable).ok_or_else(|| {
        CliError::Runtime(format!(
            "column {observable:?} not found (available: {:?})",
            series.columns
        ))
    })?;
    let taus: Vec<f64> = series.rows.iter().map(|r| r[tau_col]).collect();
    let values: Vec<f64> = series.rows.iter().map(|r| r[col]).collect();
    let title = stamp.unwrap_or_else(|| {
        series_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    let svg = svg::render(
        &taus,
        &values,
        observable,
        &format!("{observable} ({title})"),
    )?;
    let out_path = out.unwrap_or_else(|| {
        let stem = series_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        series_path.with_file_name(format!("{stem}_{observable}.svg"))
    });
    fs::write(&out_path, svg)?;
    Ok(out_path)
}
