//! Command-line front end. `run` returns the process exit code.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::baselines::StrategyKind;
use crate::engine::{compare_strategies, run_closed_loop, DispatchTrace};
use crate::error::{Error, Result};
use crate::io::{self, report, Config};
use crate::renewable::{RenewableModel, Sample};
use crate::types::Scenario;

/// Environment variable that overrides the configured seed.
pub const SEED_ENV: &str = "HELIOS_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "helios",
    version,
    about = "Receding-horizon hybrid microgrid dispatch"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit renewable surrogate coefficients from a CSV with a renewable_kw column.
    Fit {
        csv: PathBuf,
        /// Clamp ceiling carried into the fitted model (kW).
        #[arg(long, default_value_t = 600.0)]
        p_rated: f64,
        /// Write the coefficients as config lines.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate one strategy in closed loop.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Strategy name; defaults to the configured one.
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Simulate several strategies on the same data.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated strategy names; defaults to all.
        #[arg(long, value_delimiter = ',')]
        strategies: Option<Vec<String>>,
    },
    /// Write the renewable surrogate evaluated on an irradiance x wind grid.
    Surface {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Irradiance grid points spanning [0, irr-max].
        #[arg(long, default_value_t = 11)]
        irr_points: usize,
        #[arg(long, default_value_t = 1.0)]
        irr_max: f64,
        /// Wind grid points spanning [0, wind-max].
        #[arg(long, default_value_t = 26)]
        wind_points: usize,
        #[arg(long, default_value_t = 25.0)]
        wind_max: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic hourly CSV.
    GenerateData {
        #[arg(long, default_value_t = 1)]
        days: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Hourly CSV path, or `synthetic`.
    #[arg(long, default_value = "synthetic")]
    data: String,
    /// Days of synthetic data.
    #[arg(long, default_value_t = 1)]
    days: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: PathBuf,
    /// Override a config key, e.g. `--set evo.population=120`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<Config> {
    let mut cfg = match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    for o in overrides {
        let (k, v) = o.split_once('=').ok_or_else(|| Error::Config {
            key: o.clone(),
            message: "expected KEY=VALUE".into(),
        })?;
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Flag beats environment, environment beats config.
fn resolve_seed(cfg: &Config, flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Error::Config {
            key: SEED_ENV.into(),
            message: format!("`{v}` is not an unsigned integer"),
        }),
        Err(_) => Ok(cfg.seed),
    }
}

fn load_scenario(data: &str, days: usize, cfg: &Config, seed: u64) -> Result<Scenario> {
    if data == "synthetic" {
        io::generate_synthetic(days, &cfg.synthetic, seed)
    } else {
        io::load_hourly_csv(Path::new(data))
    }
}

/// Stdout writes ignore errors so a closed pipe does not abort the run.
fn say(text: &str) {
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn print_written(paths: &[PathBuf]) {
    for p in paths {
        say(&format!("wrote {}\n", p.display()));
    }
}

fn simulate(run: &RunArgs, kinds: &[StrategyKind], cfg: &Config) -> Result<Vec<DispatchTrace>> {
    let seed = resolve_seed(cfg, run.seed)?;
    let scenario = load_scenario(&run.data, run.days, cfg, seed)?;
    let traces = if kinds.len() == 1 {
        vec![run_closed_loop(&scenario, kinds[0], cfg, seed)?]
    } else {
        compare_strategies(&scenario, kinds, cfg, seed)?
    };
    say(&report::summary_text(&traces));
    print_written(&report::write_report(&run.out_dir, &traces)?);
    Ok(traces)
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Fit { csv, p_rated, out } => {
            let scenario = io::load_hourly_csv(&csv)?;
            let observed = scenario.observed_renewable().ok_or_else(|| Error::Parse {
                row: 0,
                column: io::hourly::RENEWABLE.into(),
                message: "missing column".into(),
            })?;
            let samples: Vec<Sample> = (0..scenario.steps())
                .map(|t| Sample {
                    irradiance: scenario.irradiance()[t],
                    wind_speed: scenario.wind_speed()[t],
                    power: observed[t],
                })
                .collect();
            let m = RenewableModel::fit(&samples, p_rated)?;
            let rmse = (samples
                .iter()
                .map(|s| (m.raw(s.irradiance, s.wind_speed) - s.power).powi(2))
                .sum::<f64>()
                / samples.len() as f64)
                .sqrt();
            let text = format!(
                "renewable.a1 = {}\nrenewable.a2 = {}\nrenewable.a3 = {}\nrenewable.a4 = {}\nrenewable.p_rated = {}\n",
                m.a1, m.a2, m.a3, m.a4, m.p_rated
            );
            say(&text);
            say(&format!("# rmse_kw = {rmse}\n"));
            if let Some(path) = out {
                std::fs::write(&path, &text)?;
                print_written(&[path]);
            }
            Ok(())
        }
        Command::Simulate { run, strategy } => {
            let cfg = load_config(run.config.as_deref(), &run.overrides)?;
            let kind = match strategy {
                Some(s) => s.parse()?,
                None => cfg.strategy,
            };
            simulate(&run, &[kind], &cfg).map(drop)
        }
        Command::Compare { run, strategies } => {
            let cfg = load_config(run.config.as_deref(), &run.overrides)?;
            let kinds = match strategies {
                Some(names) => names
                    .iter()
                    .map(|s| s.parse())
                    .collect::<Result<Vec<StrategyKind>>>()?,
                None => StrategyKind::ALL.to_vec(),
            };
            if kinds.is_empty() {
                return Err(Error::InvalidParameter("no strategies given".into()));
            }
            simulate(&run, &kinds, &cfg).map(drop)
        }
        Command::Surface {
            config,
            irr_points,
            irr_max,
            wind_points,
            wind_max,
            out,
        } => {
            let cfg = load_config(config.as_deref(), &[])?;
            let irr = io::linspace(0.0, irr_max, irr_points)?;
            let wind = io::linspace(0.0, wind_max, wind_points)?;
            let file = std::fs::File::create(&out)?;
            io::write_surface_csv(&cfg.renewable, &irr, &wind, std::io::BufWriter::new(file))?;
            print_written(&[out]);
            Ok(())
        }
        Command::GenerateData {
            days,
            seed,
            config,
            out,
        } => {
            let cfg = load_config(config.as_deref(), &[])?;
            let seed = resolve_seed(&cfg, seed)?;
            let scenario = io::generate_synthetic(days, &cfg.synthetic, seed)?;
            let file = std::fs::File::create(&out)?;
            io::write_hourly_csv(&scenario, std::io::BufWriter::new(file))?;
            print_written(&[out]);
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        std::iter::once("helios")
            .chain(s.split_whitespace())
            .map(String::from)
            .collect()
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(argv("")), 1);
        assert_eq!(run(argv("frobnicate")), 1);
        assert_eq!(run(argv("simulate")), 1);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(argv("--help")), 0);
    }

    #[test]
    fn unknown_strategy_exits_one() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert_eq!(
            run(argv(&format!("simulate --strategy greedy --out-dir {out}"))),
            1
        );
    }

    #[test]
    fn missing_data_file_exits_two() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert_eq!(
            run(argv(&format!(
                "simulate --strategy renewable_first --data {out}/nope.csv --out-dir {out}"
            ))),
            2
        );
    }
}
