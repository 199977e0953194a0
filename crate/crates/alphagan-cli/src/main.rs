//! `alphagan` command-line tool.
//!
//! Every subcommand reads an optional TOML config (one table per
//! subcommand, unknown keys rejected), applies flag overrides, writes the
//! resolved config to its output directory and then its CSV/JSON artifacts.
//! Errors go to standard error as one line of JSON.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use alphagan::regions::Mode;
use alphagan::train::{parse_alpha, TrainConfig, Variant};
use clap::{Args, Parser, Subcommand};

use crate::commands::*;
use crate::config::{ConfigFile, Overrides};
use crate::error::{CliError, Result};

#[derive(Parser)]
#[command(name = "alphagan", version, about = "Tunable CPE-loss GAN toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out` in the config)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal discriminator, generator losses and gradients on a 1D scenario
    LossCurves {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scenario: Option<String>,
        /// Comma-separated α_D values (α_G = α_D unless --alpha-g)
        #[arg(long)]
        alpha_list: Option<String>,
        #[arg(long)]
        alpha_g: Option<String>,
        #[arg(long)]
        grid_points: Option<usize>,
        /// Gradient column: sat or ns
        #[arg(long)]
        grad_mode: Option<Mode>,
    },
    /// f-divergence and generator objective for a density pair
    Divergence {
        #[command(flatten)]
        common: Common,
        /// f_alpha, f_tilde, f_sat or f_ns
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        alpha_d: Option<String>,
        #[arg(long)]
        alpha_g: Option<String>,
        #[arg(long)]
        scenario: Option<String>,
        /// gaussian:mu,sigma or mixture:w,mu,sigma;...
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        q: Option<String>,
    },
    /// Convexity-region raster over (α_D, α_G)
    Region {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        mode: Option<Mode>,
        /// Comma-separated α_D values (default: log grid)
        #[arg(long)]
        alpha_d: Option<String>,
        #[arg(long)]
        alpha_g: Option<String>,
        /// Points per axis of the log grid
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Sample-space gradients of the generator loss
    Gradient {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        alpha_d: Option<String>,
        #[arg(long)]
        alpha_g: Option<String>,
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Estimation-error bound, sample threshold and lower-bound constant
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        delta: Option<f64>,
        /// Use α-loss Lipschitz constants for this α_G
        #[arg(long)]
        alpha_g: Option<String>,
    },
    /// Check the α-loss / f̃_α conjugate identities on a grid
    EquivalenceCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha_list: Option<String>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Train one GAN on the 2D ring
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epochs: Option<usize>,
        /// sat:αD,αG | ns:αD,αG | lsgan
        #[arg(long)]
        variant: Option<String>,
        #[arg(long)]
        n_train: Option<usize>,
    },
    /// Train many seeds and variants and aggregate outcomes
    Sweep {
        #[command(flatten)]
        common: Common,
        /// a..b (end exclusive) or a,b,c
        #[arg(long)]
        seeds: Option<String>,
        /// Semicolon-separated variants, e.g. "sat:1,1;sat:0.5,1"
        #[arg(long)]
        variants: Option<String>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        n_train: Option<usize>,
        /// Worker threads (default: available cores)
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn alpha(s: Option<String>) -> Result<Option<f64>> {
    s.map(|s| parse_alpha(&s).map_err(CliError::from)).transpose()
}

fn alpha_list(s: Option<String>) -> Result<Option<Vec<f64>>> {
    s.map(|s| {
        if s.trim().is_empty() {
            return Ok(vec![]);
        }
        s.split(',').map(|a| parse_alpha(a).map_err(CliError::from)).collect()
    })
    .transpose()
}

fn variant(s: Option<String>) -> Result<Option<Variant>> {
    s.map(|s| s.parse::<Variant>().map_err(CliError::from)).transpose()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::LossCurves { common, scenario, alpha_list: al, alpha_g, grid_points, grad_mode } => {
            let file = ConfigFile::load(common.config.as_deref())?;
            let o = Overrides::new()
                .set("scenario", scenario)?
                .set("alphas", alpha_list(al)?)?
                .set("alpha_g", alpha(alpha_g)?)?
                .set("grid_points", grid_points)?
                .set("grad_mode", grad_mode)?
                .set("out", common.out)?;
            loss_curves(&file.section("loss_curves", o)?)
        }
        Command::Divergence { common, f, alpha: a, alpha_d, alpha_g, scenario, p, q } => {
            let file = ConfigFile::load(common.config.as_deref())?;
            let o = Overrides::new()
                .set("f", f)?
                .set("alpha", alpha(a)?)?
                .set("alpha_d", alpha(alpha_d)?)?
                .set("alpha_g", alpha(alpha_g)?)?
                .set("scenario", scenario)?
                .set("p", p.as_deref().map(parse_density).transpose()?)?
                .set("q", q.as_deref().map(parse_density).transpose()?)?
                .set("out", common.out)?;
            divergence(&file.section("divergence", o)?)
        }
        Command::Region { common, mode, alpha_d, alpha_g, grid } => {
            let file = ConfigFile::load(common.config.as_deref())?;
            let o = Overrides::new()
                .set("mode", mode)?
                .set("alpha_d", alpha_list(alpha_d)?)?
                .set("alpha_g", alpha_list(alpha_g)?)?
                .set("grid", grid)?
                .set("out", common.out)?;
            region(&file.section("region", o)?)
        }
        Command::Gradient { common, scenario, alpha_d, alpha_g, mode, points } => {
            let file = ConfigFile::load(common.config.as_deref())?;
            let o = Overrides::new()
                .set("scenario", scenario)?
                .set("alpha_d", alpha_list(alpha_d)?)?
                .set("alpha_g", alpha_list(alpha_g)?)?
                .set("mode", mode)?
                .set("points", points)?
                .set("out", common.out)?;
            gradient(&file.section("gradient", o)?)
        }
        Command::Bounds { common, n, m, delta, alpha_g } => {
            let file = ConfigFile::load(common.config.as_deref())?;
            let loss = alpha(alpha_g)?.map(alphagan::bounds::LossLipschitz::Alpha);
            let o = Overrides::new()
                .set("n", n)?
                .set("m", m)?
                .set("delta", delta)?
                .set("loss", loss)?
                .set("out", common.out)?;
            bounds(&file.section("bounds", o)?)
        }
        Command::EquivalenceCheck { common, alpha_list: al, grid } => {
            let file = ConfigFile::load(common.config.as_deref())?;
            let o = Overrides::new().set("alphas", alpha_list(al)?)?.set("grid", grid)?.set("out", common.out)?;
            equivalence(&file.section("equivalence", o)?)
        }
        Command::Train { common, seed, epochs, variant: v, n_train } => {
            let file = ConfigFile::load(common.config.as_deref())?;
            let o = Overrides::new()
                .set("seed", seed)?
                .set("epochs", epochs)?
                .set("variant", variant(v)?.map(|v| v.to_string()))?
                .set("n_train", n_train)?
                .set("out", common.out)?;
            let (config, out): (TrainConfig, _) = file.section_and_out("train", o)?;
            run_train(&config, &out.unwrap_or_else(|| TRAIN_OUT.into()))
        }
        Command::Sweep { common, seeds, variants, epochs, n_train, workers } => {
            let file = ConfigFile::load(common.config.as_deref())?;
            let o = Overrides::new().set("epochs", epochs)?.set("n_train", n_train)?;
            // The `[train]` table is the base config; its `out` is unused here.
            let (base, _): (TrainConfig, _) = file.section_and_out("train", o)?;
            let variants = variants
                .map(|s| s.split(';').map(|v| v.trim().to_string()).collect::<Vec<_>>());
            if let Some(vs) = &variants {
                for v in vs {
                    v.parse::<Variant>()?;
                }
            }
            let o = Overrides::new().set("seeds", seeds)?.set("variants", variants)?.set("out", common.out)?;
            let section: SweepSection = file.section("sweep", o)?;
            let workers = workers
                .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
            run_sweep(&base, &section, workers)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind::*;
            if matches!(e.kind(), DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return ExitCode::from(if e.kind() == DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { 0 });
            }
            let msg = e.to_string();
            let first = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            eprintln!("{}", CliError::Usage(first.trim_start_matches("error: ").to_string()).to_json());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
