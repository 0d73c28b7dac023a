//! Command-line front end: `coeffs`, `simulate`, `compare`, `sweep`, and
//! `experiment` subcommands over the library.
//!
//! Flags mirror the config-file keys (`--J`, `--delta`, …, `--snapshots`);
//! `--config FILE` loads a file first and any flags override it. Standard
//! output is deterministic for fixed inputs. Exit codes: 0 success, 1
//! validation/usage error, 2 numeric blowup, 3 failed report assertion.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::analytic::{bright_soliton, dark_soliton, SolitonKind};
use crate::continuum::{Field, ModelTag, Trajectory};
use crate::harness::{
    run_experiment, sweep, ExperimentConfig, OutputOptions, RunReport, SweepAxis, SweepTable,
};
use crate::model::{classify_regime, compute_coefficients, ModelParams, RegimeKind};
use crate::observables::l2_deviation;
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "spin-soliton",
    version,
    about = "Soliton dynamics of an anisotropic spin chain in an oblique field",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the effective couplings and regime for one parameter set.
    Coeffs(ParamFlags),
    /// Integrate one model from a configuration and summarize it.
    Simulate(RunFlags),
    /// Run the configured model and its analytic profile side by side.
    Compare(RunFlags),
    /// Run one row per value along the theta or lambda axis.
    Sweep(SweepFlags),
    /// Execute a preset (or custom config) and score its assertions.
    Experiment(RunFlags),
}

#[derive(Debug, Args)]
struct ParamFlags {
    /// Exchange coupling (> 0).
    #[arg(long = "J", allow_negative_numbers = true)]
    j: f64,
    /// Anisotropy of the z-axis coupling.
    #[arg(long = "delta", allow_negative_numbers = true)]
    delta: f64,
    /// Field tilt angle against the chain axis, radians.
    #[arg(long = "theta", allow_negative_numbers = true)]
    theta: f64,
    /// Field magnitude (> 0).
    #[arg(long = "B", allow_negative_numbers = true)]
    b: f64,
    /// Spin length (>= 1/2).
    #[arg(long = "S", allow_negative_numbers = true)]
    spin: f64,
    /// Reduced Planck constant.
    #[arg(long = "hbar", default_value_t = 1.0, allow_negative_numbers = true)]
    hbar: f64,
}

/// Config-file keys as flags; every one is optional and overrides the file.
#[derive(Debug, Args)]
struct ConfigFlags {
    /// Configuration file in the `key = value` schema.
    #[arg(long = "config")]
    config: Option<PathBuf>,
    /// Preset name (fig1a, fig1b, fig2a, fig2b, fig3a, fig3b, fig4, custom).
    #[arg(long = "preset")]
    preset: Option<String>,
    #[arg(long = "J", allow_negative_numbers = true)]
    j: Option<f64>,
    #[arg(long = "delta", allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long = "theta", allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long = "B", allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long = "S", allow_negative_numbers = true)]
    spin: Option<f64>,
    #[arg(long = "hbar", allow_negative_numbers = true)]
    hbar: Option<f64>,
    #[arg(long = "A")]
    amplitude: Option<f64>,
    #[arg(long = "v1", allow_negative_numbers = true)]
    v1: Option<f64>,
    #[arg(long = "x0", allow_negative_numbers = true)]
    x0: Option<f64>,
    /// nls, nls-envelope, extended-nls, lattice-simplified, lattice-full,
    /// analytic-bright, or analytic-dark.
    #[arg(long = "model")]
    model: Option<String>,
    /// periodic or fixed-ends.
    #[arg(long = "bc")]
    bc: Option<String>,
    #[arg(long = "n_points")]
    n_points: Option<usize>,
    #[arg(long = "x_min", allow_negative_numbers = true)]
    x_min: Option<f64>,
    #[arg(long = "x_max", allow_negative_numbers = true)]
    x_max: Option<f64>,
    /// Integration step; must respect the stability bound.
    #[arg(long = "dt")]
    dt: Option<f64>,
    #[arg(long = "t_end")]
    t_end: Option<f64>,
    /// Snapshot count or comma-separated times.
    #[arg(long = "snapshots")]
    snapshots: Option<String>,
}

impl ConfigFlags {
    fn overrides(&self) -> Vec<(String, String)> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        let mut num = |key: &str, v: Option<f64>| {
            if let Some(v) = v {
                pairs.push((key.into(), v.to_string()));
            }
        };
        num("J", self.j);
        num("delta", self.delta);
        num("theta", self.theta);
        num("B", self.b);
        num("S", self.spin);
        num("hbar", self.hbar);
        num("A", self.amplitude);
        num("v1", self.v1);
        num("x0", self.x0);
        num("x_min", self.x_min);
        num("x_max", self.x_max);
        num("dt", self.dt);
        num("t_end", self.t_end);
        if let Some(p) = &self.preset {
            pairs.push(("preset".into(), p.clone()));
        }
        if let Some(m) = &self.model {
            pairs.push(("model".into(), m.clone()));
        }
        if let Some(bc) = &self.bc {
            pairs.push(("bc".into(), bc.clone()));
        }
        if let Some(n) = self.n_points {
            pairs.push(("n_points".into(), n.to_string()));
        }
        if let Some(s) = &self.snapshots {
            pairs.push(("snapshots".into(), s.clone()));
        }
        pairs
    }

    fn resolve(&self) -> Result<ExperimentConfig> {
        let text = match &self.config {
            Some(path) => std::fs::read_to_string(path)?,
            None => String::new(),
        };
        crate::io::parse_config_with_overrides(&text, &self.overrides())
    }
}

#[derive(Debug, Args)]
struct RunFlags {
    #[command(flatten)]
    config: ConfigFlags,
    /// Output directory for trajectory/report files (locked while running).
    #[arg(long = "out")]
    out: Option<PathBuf>,
    /// Also write a grayscale |phi(x,t)| heatmap per trajectory (PGM).
    #[arg(long = "heatmap")]
    heatmap: bool,
}

#[derive(Debug, Args)]
struct SweepFlags {
    #[command(flatten)]
    config: ConfigFlags,
    /// Sweep axis: theta or lambda.
    #[arg(long = "axis")]
    axis: String,
    /// Comma-separated axis values (at least 2).
    #[arg(long = "values")]
    values: String,
    /// Output directory for the sweep table (locked while running).
    #[arg(long = "out")]
    out: Option<PathBuf>,
}

/// Parse arguments and run; returns the process exit code.
///
/// Help and version requests exit 0; argument errors exit 1; library errors
/// map through [`Error::exit_code`] (2 for numeric blowup, 1 otherwise);
/// a report whose assertions fail exits 3.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Coeffs(flags) => cmd_coeffs(&flags),
        Command::Simulate(flags) => cmd_simulate(&flags),
        Command::Compare(flags) => cmd_compare(&flags),
        Command::Sweep(flags) => cmd_sweep(&flags),
        Command::Experiment(flags) => cmd_experiment(&flags),
    }
}

/// Short decimal plus full-precision scientific form, stable layout.
fn show(value: f64) -> String {
    format!("{value:.7} ({value:.16e})")
}

fn cmd_coeffs(flags: &ParamFlags) -> Result<i32> {
    let params = ModelParams::new(flags.j, flags.delta, flags.theta, flags.b, flags.spin)?
        .with_hbar(flags.hbar)?;
    let coeffs = compute_coefficients(&params)?;
    let regime = classify_regime(&params)?;
    println!("theta_magic = {}", show(coeffs.theta_magic));
    println!("c0 = {}", show(coeffs.c0));
    println!("c1 = {}", show(coeffs.c1));
    println!("c2 = {}", show(coeffs.c2));
    println!("c3 = {}", show(coeffs.c3));
    println!("V = {}", show(coeffs.potential));
    println!("chi = {}", show(coeffs.chi));
    println!("regime = {}", regime.kind);
    println!("lambda = {}", regime.lambda);
    println!("admissible = {}", regime.admissible);
    Ok(0)
}

fn print_run_summary(report: &RunReport) {
    for run in &report.runs {
        let grid = run.trajectory.meta.grid;
        println!("run = {}", run.label);
        println!("model = {}", run.model);
        println!(
            "grid: n = {} on [{:.6}, {:.6}] ({})",
            grid.n_points, grid.x_min, grid.x_max, grid.boundary
        );
        match run.trajectory.meta.dt {
            Some(dt) => println!("dt = {dt:.6e}"),
            None => println!("dt = none (analytic render)"),
        }
        println!("snapshots = {}", run.trajectory.snapshots.len());
        println!("norm drift = {:.6e}", run.norm_drift);
        println!("final max modulus = {:.6}", run.final_max_modulus);
        if let Some(d) = &run.diagnostics {
            println!(
                "peak: x = {:.6}, amplitude = {:.6}",
                d.peak_position, d.peak_amplitude
            );
            println!("velocity = {:.6}", d.velocity_estimate);
            println!("fwhm = {:.6}", d.fwhm);
            println!("shape retention = {:.6e}", d.shape_retention_error);
        }
        if let Some(file) = &run.trajectory_file {
            println!("trajectory file = {file}");
        }
    }
}

fn cmd_simulate(flags: &RunFlags) -> Result<i32> {
    let config = flags.config.resolve()?;
    let report = run_experiment(
        &config,
        OutputOptions {
            dir: flags.out.as_deref(),
            heatmap: flags.heatmap,
        },
    )?;
    println!("regime = {}", report.regime.kind);
    print_run_summary(&report);
    Ok(0)
}

/// Render the regime's analytic soliton on the trajectory's own grid and
/// snapshot times.
fn analytic_twin(config: &ExperimentConfig, numeric: &Trajectory) -> Result<Trajectory> {
    let coeffs = compute_coefficients(&config.params)?;
    let regime = classify_regime(&config.params)?;
    let kind = match regime.kind {
        RegimeKind::Bright => SolitonKind::Bright,
        RegimeKind::Dark => SolitonKind::Dark,
        RegimeKind::Linear => {
            return Err(Error::Validation(format!(
                "compare needs a soliton regime; theta = {} is linear (no analytic profile)",
                config.params.theta
            )));
        }
    };
    let grid = numeric.meta.grid;
    let snapshots = numeric
        .snapshots
        .iter()
        .map(|s| {
            Field::try_from_fn(grid, s.time, |x| match kind {
                SolitonKind::Bright => {
                    bright_soliton(&coeffs, &config.params, &config.soliton, x, s.time)
                }
                SolitonKind::Dark => {
                    dark_soliton(&coeffs, &config.params, &config.soliton, x, s.time)
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut meta = numeric.meta.clone();
    meta.model = match kind {
        SolitonKind::Bright => ModelTag::AnalyticBright,
        SolitonKind::Dark => ModelTag::AnalyticDark,
    };
    meta.dt = None;
    meta.carrier_shift = None;
    Trajectory::new(meta, snapshots)
}

fn cmd_compare(flags: &RunFlags) -> Result<i32> {
    let config = flags.config.resolve()?;
    if config.model == ModelTag::NlsEnvelope {
        return Err(Error::Validation(
            "compare works in the lab frame; `nls-envelope` trajectories live in the \
             rescaled frame (pick nls, extended-nls, or a lattice model)"
                .into(),
        ));
    }
    let report = run_experiment(&config, OutputOptions::default())?;
    let numeric = &report.runs[0].trajectory;
    let analytic = analytic_twin(&config, numeric)?;

    println!("model = {} vs {}", numeric.meta.model, analytic.meta.model);
    let mut final_l2 = 0.0;
    for (n, a) in numeric.snapshots.iter().zip(&analytic.snapshots) {
        let l2 = l2_deviation(n, a)?;
        let linf = n
            .values
            .iter()
            .zip(&a.values)
            .map(|(u, v)| (u.norm() - v.norm()).abs())
            .fold(0.0f64, f64::max);
        println!("t = {:>10.6}: l2 = {l2:.6e}, max = {linf:.6e}", n.time);
        final_l2 = l2;
    }
    println!("final l2 deviation = {final_l2:.6e}");
    if let Some(dir) = flags.out.as_deref() {
        let _lock = crate::io::DirLock::acquire(dir)?;
        crate::io::write_trajectory(numeric, &dir.join("numeric.csv"))?;
        crate::io::write_trajectory(&analytic, &dir.join("analytic.csv"))?;
        if flags.heatmap {
            crate::io::write_heatmap_pgm(numeric, &dir.join("numeric.pgm"))?;
            crate::io::write_heatmap_pgm(&analytic, &dir.join("analytic.pgm"))?;
        }
        println!("wrote numeric.csv and analytic.csv to {}", dir.display());
    }
    Ok(0)
}

fn print_sweep_table(table: &SweepTable) {
    println!("axis = {}", table.axis);
    println!(
        "{:>12} {:>8} {:>10} {:>11} {:>13} {:>13} {:>13} {:>13}",
        "value", "regime", "lambda", "admissible", "retention", "norm-drift", "velocity", "dev-cubic"
    );
    let opt = |v: Option<f64>| match v {
        Some(v) => format!("{v:.4e}"),
        None => "-".into(),
    };
    for row in &table.rows {
        println!(
            "{:>12.6} {:>8} {:>10.4} {:>11} {:>13} {:>13} {:>13} {:>13}",
            row.value,
            row.regime,
            row.lambda,
            row.admissible,
            opt(row.shape_retention),
            opt(row.norm_drift),
            opt(row.velocity_estimate),
            opt(row.deviation_from_cubic),
        );
        if let Some(e) = &row.error {
            println!("    row failed: {e}");
        }
    }
}

fn cmd_sweep(flags: &SweepFlags) -> Result<i32> {
    let axis: SweepAxis = flags.axis.parse()?;
    let values = flags
        .values
        .split(',')
        .map(|part| {
            part.trim().parse::<f64>().map_err(|_| {
                Error::Validation(format!("sweep value `{}` is not a number", part.trim()))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let config = flags.config.resolve()?;
    let table = sweep(&config, axis, &values)?;
    print_sweep_table(&table);
    if let Some(dir) = flags.out.as_deref() {
        let _lock = crate::io::DirLock::acquire(dir)?;
        let json = serde_json::to_string_pretty(&table)?;
        std::fs::write(dir.join("sweep.json"), json + "\n")?;
        println!("wrote sweep.json to {}", dir.display());
    }
    Ok(0)
}

fn cmd_experiment(flags: &RunFlags) -> Result<i32> {
    let config = flags.config.resolve()?;
    let report = run_experiment(
        &config,
        OutputOptions {
            dir: flags.out.as_deref(),
            heatmap: flags.heatmap,
        },
    )?;
    println!("preset = {}", report.preset);
    println!("regime = {}", report.regime.kind);
    print_run_summary(&report);
    if let Some(table) = &report.sweep {
        print_sweep_table(table);
    }
    for assertion in &report.assertions {
        let mark = if assertion.passed { "PASS" } else { "FAIL" };
        println!("[{mark}] {}: {}", assertion.name, assertion.detail);
    }
    if let Some(dir) = flags.out.as_deref() {
        println!("wrote report.json to {}", dir.display());
    }
    if report.passed {
        println!("report: passed");
        Ok(0)
    } else {
        println!("report: failed");
        Ok(3)
    }
}
