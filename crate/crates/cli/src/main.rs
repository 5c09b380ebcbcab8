use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mjcm_cli::config::{self, NmaxSetting, RunConfig};
use mjcm_cli::{cmd_check, cmd_predict, cmd_simulate, CliError};

/// Multiphoton Jaynes-Cummings model simulator.
#[derive(Parser)]
#[command(name = "mjcm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep observables over a scaled-time grid and write a CSV file.
    Simulate(RunArgs),
    /// Print analytic predictions (revival times, proportionality factors,
    /// trapping defect) without evolving anything.
    Predict(RunArgs),
    /// Verify the closed-form amplitudes against the brute-force integrator.
    Check(CheckArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file (TOML); flags below override its keys.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Initial field state: coherent | kphoton | orthogonal_even | even | odd.
    #[arg(long)]
    state: Option<String>,

    /// Coherent amplitude alpha (>= 0).
    #[arg(long)]
    alpha: Option<f64>,

    /// Ladder spacing for kphoton states.
    #[arg(long)]
    k: Option<u32>,

    /// Atom superposition angle theta in radians.
    #[arg(long)]
    theta: Option<f64>,

    /// Atom relative phase phi in radians.
    #[arg(long)]
    phi: Option<f64>,

    /// Photons per transition.
    #[arg(long)]
    m: Option<u32>,

    /// Evolution approach: eha | meha.
    #[arg(long)]
    approach: Option<String>,

    /// Stark-shift parameter on the excited level (meha).
    #[arg(long)]
    beta1: Option<f64>,

    /// Stark-shift parameter on the ground level (meha).
    #[arg(long)]
    beta2: Option<f64>,

    /// Atom-field coupling constant.
    #[arg(long)]
    lambda: Option<f64>,

    /// End of the scaled-time grid.
    #[arg(long = "t-max")]
    t_max: Option<f64>,

    /// Number of grid points (>= 2).
    #[arg(long)]
    steps: Option<usize>,

    /// Fock truncation: "auto" or an explicit level count.
    #[arg(long)]
    nmax: Option<NmaxSetting>,

    /// Comma-separated observable columns.
    #[arg(long, value_delimiter = ',')]
    observables: Option<Vec<String>>,

    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Override the integrator step size (the default is derived per
    /// configuration from the error budget).
    #[arg(long)]
    dt: Option<f64>,

    /// Print one line per configuration.
    #[arg(long)]
    verbose: bool,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.state {
            cfg.state.kind = v;
        }
        if let Some(v) = self.alpha {
            cfg.state.alpha = v;
        }
        if let Some(v) = self.k {
            cfg.state.k = v;
        }
        if let Some(v) = self.theta {
            cfg.atom.theta = v;
        }
        if let Some(v) = self.phi {
            cfg.atom.phi = v;
        }
        if let Some(v) = self.m {
            cfg.model.m = v;
        }
        if let Some(v) = self.approach {
            cfg.model.approach = v;
        }
        if let Some(v) = self.beta1 {
            cfg.model.beta1 = v;
        }
        if let Some(v) = self.beta2 {
            cfg.model.beta2 = v;
        }
        if let Some(v) = self.lambda {
            cfg.model.lambda = v;
        }
        if let Some(v) = self.t_max {
            cfg.grid.t_max = v;
        }
        if let Some(v) = self.steps {
            cfg.grid.steps = v;
        }
        if let Some(v) = self.nmax {
            cfg.truncation.n_max = v;
        }
        if let Some(v) = self.observables {
            cfg.observables = v;
        }
        if let Some(v) = self.out {
            cfg.output = Some(v);
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => {
            let resolved = config::resolve(args.into_config()?)?;
            cmd_simulate(&resolved)
        }
        Command::Predict(args) => {
            let resolved = config::resolve(args.into_config()?)?;
            cmd_predict(&resolved)
        }
        Command::Check(args) => cmd_check(args.dt, args.verbose),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
