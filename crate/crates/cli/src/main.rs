//! `gzk` — experiment front end for the gZK weighted-Sobolev verification
//! suite.
//!
//! Exit codes: 0 pass, 1 assertion failure, 2 configuration/validation
//! failure, 3 numerical guard trip (instability, non-convergence,
//! boundary-tail violation, non-finite values).

mod config;
mod experiments;

use clap::{Args, Parser, Subcommand};
use config::Config;
use experiments::{exit_code, run, sweep, write_outputs, Scene};
use gzk_core::error::GzkError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gzk", version, about = "gZK weighted-Sobolev experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for report.txt / report.json / table.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the RNG seed from the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Allow time horizons beyond the local existence time.
    #[arg(long)]
    override_time: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Weight-group commutator identity residuals.
    Commutator(CommonArgs),
    /// Commutator identity with a directional fractional derivative applied.
    CommutatorBeta(CommonArgs),
    /// Growth of the commutator operator norm in time.
    PhiGrowth(CommonArgs),
    /// Weighted-norm persistence along a nonlinear evolution.
    Persistence(CommonArgs),
    /// Contraction factors of the Picard iteration.
    PicardContraction(CommonArgs),
    /// Temporal order of the production time stepper.
    Convergence(CommonArgs),
    /// Singular-integral fractional derivative vs the spectral multiplier.
    SteinCalibration(CommonArgs),
    /// Run an experiment over a cartesian parameter grid.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Parameter grid file (comma lists for t, r1, r2, k, resolution).
        #[arg(long)]
        grid: PathBuf,
    },
}

fn load_config(common: &CommonArgs) -> Result<Config, GzkError> {
    let mut cfg = Config::from_file(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.set("experiment.seed", seed.to_string());
    }
    Ok(cfg)
}

fn run_single(name: &str, common: &CommonArgs) -> u8 {
    let go = || -> Result<experiments::Outcome, GzkError> {
        let cfg = load_config(common)?;
        let scene = Scene::build(cfg)?;
        let outcome = run(name, &scene, common.override_time)?;
        if let Some(dir) = &common.out {
            write_outputs(dir, &outcome)?;
        }
        Ok(outcome)
    };
    match go() {
        Ok(outcome) => {
            let mut text = Vec::new();
            if outcome.report.write_text(&mut text).is_ok() {
                print!("{}", String::from_utf8_lossy(&text));
            }
            if outcome.passed {
                println!("{name}: PASS");
                0
            } else {
                for f in &outcome.failures {
                    eprintln!("{name}: FAIL: {f}");
                }
                1
            }
        }
        Err(e) => {
            eprintln!("{name}: error: {e}");
            exit_code(&e) as u8
        }
    }
}

fn run_sweep(common: &CommonArgs, grid: &PathBuf) -> u8 {
    let go = || -> Result<(experiments::Table, i32), GzkError> {
        let cfg = load_config(common)?;
        let grid_spec = Config::from_file(grid)?;
        let (table, code) = sweep(&cfg, &grid_spec, common.override_time)?;
        if let Some(dir) = &common.out {
            std::fs::create_dir_all(dir).map_err(|e| {
                GzkError::Validation(format!("cannot create {}: {e}", dir.display()))
            })?;
            std::fs::write(dir.join("table.csv"), table.render())?;
        }
        Ok((table, code))
    };
    match go() {
        Ok((table, code)) => {
            print!("{}", table.render());
            if code == 0 {
                println!("sweep: PASS");
            } else {
                eprintln!("sweep: worst row status {code}");
            }
            code as u8
        }
        Err(e) => {
            eprintln!("sweep: error: {e}");
            exit_code(&e) as u8
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Commutator(c) => run_single("commutator", c),
        Command::CommutatorBeta(c) => run_single("commutator-beta", c),
        Command::PhiGrowth(c) => run_single("phi-growth", c),
        Command::Persistence(c) => run_single("persistence", c),
        Command::PicardContraction(c) => run_single("picard-contraction", c),
        Command::Convergence(c) => run_single("convergence", c),
        Command::SteinCalibration(c) => run_single("stein-calibration", c),
        Command::Sweep { common, grid } => run_sweep(common, grid),
    };
    ExitCode::from(code)
}
