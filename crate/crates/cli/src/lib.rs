//! Command implementations for the `mjcm` binary.

pub mod config;

use std::fmt;
use std::io::Write;
use std::path::Path;

use mjcm::observables::{
    self, sweep, trapping_defect, RevivalDetector,
};
use mjcm::oracle::grid::{run_default_grid, DEVIATION_BUDGET};
use mjcm::{Error, FluctuationOrder, TimeSeries};

use config::Resolved;

/// Failure categories mapped onto process exit codes:
/// 1 check failure, 2 configuration error, 3 numeric-budget violation.
#[derive(Debug)]
pub enum CliError {
    Check(String),
    Config(String),
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Check(_) => 1,
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
        }
    }

    /// Maps a core error raised while building states or sweeping: numeric
    /// budgets exit 3, everything else is a configuration problem.
    pub fn from_construction(err: Error) -> Self {
        match err {
            Error::Truncation { .. } | Error::StepSize { .. } | Error::Headroom { .. } | Error::Overflow { .. } => {
                CliError::Budget(err.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Check(msg) => write!(f, "check failed: {msg}"),
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Budget(msg) => write!(f, "numeric budget violated: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Runs the sweep and writes the CSV.
pub fn cmd_simulate(resolved: &Resolved) -> Result<(), CliError> {
    let series = sweep(
        &resolved.field,
        &resolved.atom,
        &resolved.model,
        resolved.t_max,
        resolved.steps,
        &resolved.observables,
    )
    .map_err(CliError::from_construction)?;
    write_csv(&resolved.output, &series, resolved)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", resolved.output.display())))?;
    println!(
        "wrote {} ({} points, {} columns)",
        resolved.output.display(),
        series.t().len(),
        series.columns().len()
    );
    Ok(())
}

/// Serializes a [`TimeSeries`]: `#`-prefixed configuration echo, a header
/// row, then one comma-separated row per grid point with shortest
/// round-trip float formatting.
pub fn write_csv(path: &Path, series: &TimeSeries, resolved: &Resolved) -> std::io::Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "# mjcm simulate")?;
    writeln!(out, "# state.kind = {}", resolved.config.state.kind)?;
    writeln!(out, "# state.alpha = {}", resolved.config.state.alpha)?;
    if resolved.config.state.kind == "kphoton" {
        writeln!(out, "# state.k = {}", resolved.config.state.k)?;
    }
    writeln!(out, "# atom.theta = {}", resolved.atom.theta())?;
    writeln!(out, "# atom.phi = {}", resolved.atom.phi())?;
    writeln!(out, "# model.m = {}", resolved.model.m)?;
    writeln!(
        out,
        "# model.approach = {}",
        match resolved.model.approach {
            mjcm::Approach::Eha => "eha",
            mjcm::Approach::Meha => "meha",
        }
    )?;
    writeln!(out, "# model.beta1 = {}", resolved.model.beta1)?;
    writeln!(out, "# model.beta2 = {}", resolved.model.beta2)?;
    writeln!(out, "# model.lambda = {}", resolved.model.lambda)?;
    writeln!(out, "# grid.t_max = {}", resolved.t_max)?;
    writeln!(out, "# grid.steps = {}", resolved.steps)?;
    writeln!(
        out,
        "# truncation.n_max = {}{}",
        resolved.n_max,
        if resolved.n_max_was_auto { " (auto)" } else { "" }
    )?;
    let names: Vec<&str> = series.columns().iter().map(|(n, _)| n.as_str()).collect();
    writeln!(out, "T,{}", names.join(","))?;
    for (i, t) in series.t().iter().enumerate() {
        write!(out, "{t}")?;
        for (_, col) in series.columns() {
            write!(out, ",{}", col[i])?;
        }
        writeln!(out)?;
    }
    out.flush()
}

/// Pure analytic report: mean photon number, support class, revival-time
/// estimates, proportionality factors and the trapping defect.
pub fn cmd_predict(resolved: &Resolved) -> Result<(), CliError> {
    let field = &resolved.field;
    let m = resolved.model.m;
    let nbar = field.mean_photon();
    println!("state               : {}", field.label());
    println!("n_max               : {}", field.n_max());
    println!("mean photon number  : {nbar:.6}");
    let class = field.natural_phenomenon_class(1e-12);
    println!("natural-phenomenon  : {class}");
    let spacing = field.support_spacing();
    match spacing {
        Some(s) => println!("support spacing     : {s}"),
        None => println!("support spacing     : (single level)"),
    }
    if nbar > 0.0 {
        println!("T_R (spacing 1)     : {:.4}", observables::revival_time(nbar, 1));
        if let Some(s) = spacing {
            if s > 1 {
                println!(
                    "T_R (spacing {s})     : {:.4}  (= spacing-1 estimate / {:.2})",
                    observables::revival_time(nbar, s as u32),
                    observables::revival_time(nbar, 1) / observables::revival_time(nbar, s as u32)
                );
            }
        }
    } else {
        println!("T_R                 : undefined for the vacuum");
    }
    let n_round = nbar.round().max(1.0) as usize;
    println!(
        "f exact (n={n_round}, m={m}) : {:.6}",
        observables::f_normal_exact(n_round, m)
    );
    println!(
        "f asymptotic order 1: {:.6}",
        observables::f_asymptotic(n_round, m, FluctuationOrder::Normal)
    );
    println!(
        "f asymptotic order 2: {:.6}",
        observables::f_asymptotic(n_round, m, FluctuationOrder::AmplitudeSquared)
    );
    println!("trapping defect (m) : {:.6}", trapping_defect(field, m));
    Ok(())
}

/// Runs the closed-form-vs-integrated comparison grid and the conservation
/// checks; prints per-configuration deviations and fails if any budget is
/// exceeded.
pub fn cmd_check(dt_override: Option<f64>, verbose: bool) -> Result<(), CliError> {
    let report = run_default_grid(dt_override).map_err(|e| match e {
        Error::StepSize { .. } => CliError::Check(e.to_string()),
        other => CliError::from_construction(other),
    })?;
    if verbose {
        for case in &report.cases {
            println!(
                "  {:<34} m={} theta={:.3} phi={:.3} {:<4} dt={:.2e}  dev={:.3e}  norm drift={:.2e}",
                case.state,
                case.m,
                case.theta,
                case.phi,
                match case.approach {
                    mjcm::Approach::Eha => "eha",
                    mjcm::Approach::Meha => "meha",
                },
                case.dt,
                case.max_deviation,
                case.norm_drift,
            );
        }
    }
    println!(
        "{} configurations, max deviation {:.3e} (budget {:.0e}), max norm drift {:.3e}, {:.1} s",
        report.cases.len(),
        report.max_deviation(),
        DEVIATION_BUDGET,
        report.max_norm_drift(),
        report.elapsed.as_secs_f64(),
    );
    if !report.within_budget() {
        return Err(CliError::Check(format!(
            "max deviation {:.3e} exceeds budget {:.0e}",
            report.max_deviation(),
            DEVIATION_BUDGET
        )));
    }
    println!("all configurations within budget");
    Ok(())
}

/// Revival-detector convenience used by the acceptance suite and examples:
/// centers of a named column of a series.
pub fn detect_centers(series: &TimeSeries, column: &str, window: f64) -> Option<Vec<f64>> {
    let y = series.column(column)?;
    Some(RevivalDetector::new(window).centers(series.t(), y))
}
