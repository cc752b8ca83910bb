//! Command-line front end for the event-triggered filter experiments.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use etvbf::harness::{
    emit_outputs, rows_to_csv, run_sweep_with_threads, run_trial, ExperimentConfig, FilterId,
    Profile, Sweep, SweepParam, SweepRow,
};

#[derive(Parser)]
#[command(
    name = "etvbf",
    version,
    about = "Event-triggered variational Bayesian filter simulator"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Base seed; trial i uses seed + i.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials per grid point.
    #[arg(long, global = true)]
    mc: Option<usize>,
    /// Steps per trial.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// JSON experiment config; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output prefix. Without it results go to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "desk", value_parser = parse_profile)]
    profile: Profile,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trial and dump its per-step record as CSV.
    Simulate {
        #[arg(long, default_value = "etvbf", value_parser = parse_filter)]
        filter: FilterId,
        #[arg(long, default_value_t = 0)]
        trial: u64,
        /// Trigger scale y.
        #[arg(long)]
        y: Option<f64>,
        /// Nominal measurement noise scale r.
        #[arg(long)]
        r: Option<f64>,
    },
    /// Sweep y, r or rho over a grid for the selected filters.
    Sweep {
        #[arg(long, value_parser = parse_param)]
        param: SweepParam,
        /// Grid values; defaults to the profile grid.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        grid: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', num_args = 1.., value_parser = parse_filter)]
        filters: Option<Vec<FilterId>>,
    },
    /// All filters at one (y, r) point.
    Compare {
        #[arg(long)]
        y: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
    },
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    s.parse().map_err(|e: etvbf::Error| e.to_string())
}

fn parse_filter(s: &str) -> Result<FilterId, String> {
    s.parse().map_err(|e: etvbf::Error| e.to_string())
}

fn parse_param(s: &str) -> Result<SweepParam, String> {
    s.parse().map_err(|e: etvbf::Error| e.to_string())
}

fn base_config(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            ExperimentConfig::from_json(&text)
                .with_context(|| format!("parsing config {}", path.display()))?
        }
        None => ExperimentConfig::for_profile(common.profile),
    };
    if let Some(seed) = common.seed {
        cfg.base_seed = seed;
    }
    if let Some(mc) = common.mc {
        cfg.n_mc = mc;
    }
    if let Some(steps) = common.steps {
        cfg.n_step = steps;
    }
    Ok(cfg)
}

fn report(rows: &[SweepRow], cfg: &ExperimentConfig, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(prefix) => {
            for path in emit_outputs(rows, cfg, prefix)? {
                eprintln!("wrote {}", path.display());
            }
        }
        None => io::stdout().write_all(rows_to_csv(rows).as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let common = &cli.common;
    let mut cfg = base_config(common)?;
    match cli.command {
        Command::Simulate {
            filter,
            trial,
            y,
            r,
        } => {
            if let Some(y) = y {
                cfg.filter.y = y;
            }
            if let Some(r) = r {
                cfg.filter.r = r;
            }
            cfg.validate()?;
            let record = run_trial(&cfg, filter, trial)?;
            if let Some(f) = &record.failure {
                eprintln!("trial failed at step {}: {}", f.step, f.message);
            }
            match &common.out {
                Some(prefix) => {
                    let mut path = prefix.clone().into_os_string();
                    path.push(".csv");
                    let path = PathBuf::from(path);
                    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                        fs::create_dir_all(dir)?;
                    }
                    let file = fs::File::create(&path)
                        .with_context(|| format!("creating {}", path.display()))?;
                    record.write_csv(io::BufWriter::new(file))?;
                    eprintln!("wrote {}", path.display());
                }
                None => record.write_csv(io::stdout().lock())?,
            }
        }
        Command::Sweep {
            param,
            grid,
            filters,
        } => {
            let grid = match grid {
                Some(g) => g,
                None => match cfg.sweep.as_ref().filter(|s| s.param == param) {
                    Some(s) => s.grid.clone(),
                    None => common.profile.grid(param),
                },
            };
            cfg.sweep = Some(Sweep { param, grid });
            if let Some(filters) = filters {
                cfg.filters = filters;
            }
            cfg.validate()?;
            let rows = run_sweep_with_threads(&cfg, common.threads)?;
            report(&rows, &cfg, common.out.as_ref())?;
        }
        Command::Compare { y, r } => {
            if let Some(y) = y {
                cfg.filter.y = y;
            }
            if let Some(r) = r {
                cfg.filter.r = r;
            }
            cfg.sweep = None;
            cfg.filters = FilterId::ALL.to_vec();
            cfg.validate()?;
            let rows = run_sweep_with_threads(&cfg, common.threads)?;
            report(&rows, &cfg, common.out.as_ref())?;
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
