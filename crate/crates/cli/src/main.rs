//! `gjcm` - coherent-state dynamics of the magnetized Dirac-Moshinsky
//! oscillator coupled to an isospin field, as time series, sweeps, and plots.

mod config;
mod error;
mod pipeline;
mod series;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{
    load_config_file, ConfigFile, ConfigSources, FormatArg, SectorsArg, SolverArg, SweepSpec,
};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "gjcm",
    version,
    about = "Generalized Jaynes-Cummings dynamics of a magnetized Dirac-Moshinsky oscillator \
             coupled to an isospin field"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one configuration and write the observable time series.
    Run(RunArgs),
    /// Simulate a parameter sweep: one series file per value plus a manifest.
    Sweep(SweepArgs),
    /// Render one observable column of an existing series file as SVG.
    Render(RenderArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Oscillator-photon coupling, in units of the overall rate
    #[arg(long, allow_negative_numbers = true)]
    lambda1: Option<f64>,
    /// Isospin-photon coupling, in units of the overall rate
    #[arg(long, allow_negative_numbers = true)]
    lambda2: Option<f64>,
    /// Level-splitting parameter of both two-level systems
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    /// Coherent amplitude of the initial field
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Photon truncation index (default: automatic from alpha)
    #[arg(long)]
    nmax: Option<usize>,
    /// Sector coverage
    #[arg(long, value_enum)]
    sectors: Option<SectorsArg>,
    /// Time evolution method
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
    /// Integrator step for the rk4 solver
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    /// Largest scaled time to simulate
    #[arg(long, allow_negative_numbers = true)]
    tmax: Option<f64>,
    /// Output sampling interval in scaled time
    #[arg(long = "dtau-out", allow_negative_numbers = true)]
    dtau_out: Option<f64>,
    /// Comma-separated subset of S,C,W,g2,norm,excitation
    #[arg(long, value_delimiter = ',')]
    observables: Option<Vec<String>>,
    /// Directory that receives every output file
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
    /// Series file format
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Also write one SVG plot per selected observable
    #[arg(long)]
    plot: bool,
    /// Flat JSON config file; explicit flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonArgs {
    fn resolve(self) -> Result<config::ExperimentConfig, CliError> {
        let file = match &self.config {
            Some(path) => load_config_file(path)?,
            None => ConfigFile::default(),
        };
        ConfigSources {
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            omega: self.omega,
            alpha: self.alpha,
            n_max: self.nmax,
            sectors: self.sectors,
            solver: self.solver,
            dt: self.dt,
            tau_max: self.tmax,
            dtau_out: self.dtau_out,
            observables: self.observables,
            out_dir: self.out_dir,
            format: self.format,
            plot: self.plot,
            file,
        }
        .resolve()
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Swept parameter: `<name>=<v1,v2,..>` or `<name>=<start>:<stop>:<count>`
    #[arg(long)]
    sweep: String,
}

#[derive(Args)]
struct RenderArgs {
    /// Existing series file (.csv or .json)
    #[arg(long)]
    series: PathBuf,
    /// Column to plot (e.g. W)
    #[arg(long)]
    observable: String,
    /// Output SVG path (default: next to the series file)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.common.resolve()?;
            let written = pipeline::run(&cfg)?;
            println!("wrote {}", written.series.display());
            for p in written.plots {
                println!("wrote {}", p.display());
            }
        }
        Command::Sweep(args) => {
            let spec = SweepSpec::parse(&args.sweep)?;
            let cfg = args.common.resolve()?;
            let out = pipeline::sweep(&spec, &cfg)?;
            for p in out.files {
                println!("wrote {}", p.display());
            }
            println!("wrote {}", out.manifest.display());
        }
        Command::Render(args) => {
            let out = pipeline::render_file(&args.series, &args.observable, args.out)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
