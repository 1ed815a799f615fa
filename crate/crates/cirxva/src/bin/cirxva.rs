//! Batch front door: `price`, `mc`, `grid` and `tables` subcommands over a
//! sectioned key/value configuration file.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cirxva",
    about = "First-order XVA pricing of European calls under correlated CIR intensities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Run configuration file (sectioned key = value text).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in configuration (`table4`, `table4-t2`) used when no file is given.
    #[arg(long, default_value = "table4")]
    preset: String,
    /// Override corr.rho1.
    #[arg(long)]
    rho1: Option<f64>,
    /// Override corr.rho2.
    #[arg(long)]
    rho2: Option<f64>,
    /// Override mc.paths.
    #[arg(long)]
    paths: Option<usize>,
    /// Override mc.dt.
    #[arg(long)]
    dt: Option<f64>,
    /// Override mc.seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn load(&self) -> cirxva::Result<cirxva::config::RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => cirxva::config::RunConfig::from_file(path)?,
            None => cirxva::cli::preset_config(&self.preset)?,
        };
        if let Some(r1) = self.rho1 {
            cfg.rho1 = r1;
        }
        if let Some(r2) = self.rho2 {
            cfg.rho2 = r2;
        }
        if cfg.rho1 * cfg.rho1 + cfg.rho2 * cfg.rho2 > 1.0 + 1e-12 {
            return Err(cirxva::Error::Config {
                key: "corr".into(),
                message: "rho1^2 + rho2^2 must be <= 1".into(),
            });
        }
        if let Some(p) = self.paths {
            cfg.mc.n_paths = p;
        }
        if let Some(dt) = self.dt {
            cfg.mc.dt = dt;
        }
        if let Some(seed) = self.seed {
            cfg.mc.seed = seed;
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// First-order analytic price and its g0/g1/g2 breakdown.
    Price(ConfigArgs),
    /// Monte Carlo benchmark of the exact price representation.
    Mc(ConfigArgs),
    /// Approximation-vs-benchmark study over a correlation grid, as CSV.
    Grid {
        #[command(flatten)]
        config: ConfigArgs,
        /// Comma-separated rho1 values (defaults to the configured rho1).
        #[arg(long)]
        rho1_values: Option<String>,
        /// Comma-separated rho2 values (defaults to the configured rho2).
        #[arg(long)]
        rho2_values: Option<String>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Reproduce the published reference tables with per-cell deltas.
    Tables,
}

fn parse_list(name: &str, text: &str) -> cirxva::Result<Vec<f64>> {
    text.split(',')
        .map(|piece| {
            piece.trim().parse::<f64>().map_err(|_| cirxva::Error::Config {
                key: name.to_string(),
                message: format!("bad number `{piece}`"),
            })
        })
        .collect()
}

fn run() -> cirxva::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Price(args) => {
            let cfg = args.load()?;
            for w in cirxva::cli::feller_warnings(&cfg.cir1, &cfg.cir2, &cfg.credit) {
                eprintln!("{w}");
            }
            print!("{}", cirxva::cli::cmd_price(&cfg)?);
        }
        Command::Mc(args) => {
            let cfg = args.load()?;
            print!("{}", cirxva::cli::cmd_mc(&cfg)?);
        }
        Command::Grid {
            config,
            rho1_values,
            rho2_values,
            out,
        } => {
            let cfg = config.load()?;
            let r1s = match rho1_values {
                Some(text) => parse_list("rho1_values", &text)?,
                None => vec![cfg.rho1],
            };
            let r2s = match rho2_values {
                Some(text) => parse_list("rho2_values", &text)?,
                None => vec![cfg.rho2],
            };
            let mut grid = Vec::with_capacity(r1s.len() * r2s.len());
            for &r2 in &r2s {
                for &r1 in &r1s {
                    grid.push((r1, r2));
                }
            }
            let rows = cirxva::cli::cmd_grid(&cfg, &grid, &out)?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
        }
        Command::Tables => {
            print!("{}", cirxva::cli::cmd_tables(&cirxva::xva::ApproxParams::default())?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
