use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use grenander::boundary::{BoundaryFit, Method, ZeroEstimate, DEFAULT_ORDER_STAT_A};
use grenander::exec::Exec;
use grenander::limits::{default_c_grid, estimate_cstar, table4, GridSpec, Table4Options};
use grenander::penalized::{default_alpha0, penalized_zero, DEFAULT_Q};
use grenander::sampling::{DistributionSpec, Family};
use grenander::{emit_table, grenander, run_experiment, Error, ExperimentConfig, Sample, TableFormat, DEFAULT_CSTAR};

/// Exit status for an invalid experiment configuration.
const EXIT_CONFIG: u8 = 2;
/// Exit status when a cell falls back on more than 1% of replications.
const EXIT_FALLBACK: u8 = 3;

#[derive(Parser)]
#[command(name = "grenander", version, about = "Estimation of a decreasing density at the boundary of its support")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate f(0) (or f at the upper endpoint) from a sample file.
    EstimateZero(EstimateArgs),
    /// Print the Grenander estimator of a sample as `breakpoint,height` CSV.
    Fit {
        #[arg(long)]
        input: PathBuf,
    },
    /// Monte Carlo for the Brownian limit laws.
    Limits {
        #[command(subcommand)]
        command: LimitsCommand,
    },
    /// Draw a reproducible sample in the ingestion format.
    Sample {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        rep: u64,
    },
    /// Run a replicated experiment described by a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    method: Method,
    #[arg(long)]
    input: PathBuf,
    /// Order-statistic multiplier for `orderstat` and `numderiv`.
    #[arg(long, default_value_t = DEFAULT_ORDER_STAT_A)]
    a: f64,
    #[arg(long, default_value_t = DEFAULT_CSTAR)]
    cstar: f64,
    /// Pilot smoothing for `penalized`; defaults by sample size.
    #[arg(long)]
    alpha0: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_Q)]
    q: f64,
    /// Upper support endpoint for `endpoint`.
    #[arg(long, default_value_t = 1.0)]
    upper: f64,
}

#[derive(Args, Clone, Copy)]
struct GridArgs {
    #[arg(long, default_value_t = 100_000)]
    reps: u64,
    #[arg(long = "T", default_value_t = 10.0)]
    horizon: f64,
    #[arg(long, default_value_t = 5e-4)]
    h: f64,
    #[arg(long, default_value_t = 2006)]
    seed: u64,
    /// Run replications on one thread.
    #[arg(long)]
    sequential: bool,
}

impl GridArgs {
    fn exec(&self) -> Exec {
        if self.sequential { Exec::Sequential } else { Exec::Parallel }
    }
}

#[derive(Subcommand)]
enum LimitsCommand {
    /// Limiting mean, variance and MSE of the boundary estimators.
    Table4 {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = DEFAULT_CSTAR)]
        cstar: f64,
    },
    /// Minimizer of the mean-square slope objective.
    Cstar {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
        k: u32,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn print_estimate(e: &ZeroEstimate, n: usize) {
    println!("method={}", e.method.tag());
    println!("n={n}");
    println!("value={}", e.value);
    if let Some(t) = e.tuning {
        println!("c_star={}", t.c_star);
        println!("b_hat={}", t.b_hat);
        println!("deriv_hat={}", t.deriv_hat);
        println!("bandwidth={}", t.bandwidth);
    }
}

fn estimate_zero(args: &EstimateArgs) -> Result<()> {
    let s = Sample::read(&args.input)?;
    if args.method == Method::Penalized {
        let alpha0 = args.alpha0.unwrap_or_else(|| default_alpha0(s.n()));
        let p = penalized_zero(&s, alpha0, args.q)?;
        let r = p.recipe;
        println!("method=penalized");
        println!("n={}", s.n());
        println!("value={}", p.value);
        println!("alpha0={}", r.alpha0);
        println!("q={}", r.q);
        println!("alpha_hat={}", r.alpha_hat);
        println!("beta_hat={}", r.beta_hat);
        println!("x_m={}", r.x_m.map_or("none".into(), |x| x.to_string()));
        println!("fallback={}", r.fallback);
        return Ok(());
    }
    let fit = BoundaryFit::new(&s)?;
    let e = match args.method {
        Method::SimpleK1 => fit.simple_zero(),
        Method::AdaptiveK1 => fit.adaptive_zero(args.cstar)?,
        Method::SimpleK2 => fit.simple_zero_k2(),
        Method::AdaptiveK2 => fit.adaptive_zero_k2(args.cstar)?,
        Method::OrderStat => fit.order_stat_zero(args.a)?,
        Method::NumericalDerivative => fit.numerical_derivative_zero(args.a)?,
        Method::EndpointOne => fit.endpoint_one(args.upper)?,
        Method::Penalized => unreachable!(),
    };
    print_estimate(&e, s.n());
    Ok(())
}

fn grid_spec(g: &GridArgs) -> GridSpec {
    GridSpec {
        horizon: g.horizon,
        step: g.h,
        ..GridSpec::default()
    }
}

fn limits(cmd: &LimitsCommand) -> Result<()> {
    match cmd {
        LimitsCommand::Table4 { grid, cstar } => {
            let t = table4(&Table4Options {
                reps: grid.reps,
                grid: grid_spec(grid),
                seed: grid.seed,
                c_star: *cstar,
                exec: grid.exec(),
            })?;
            eprintln!("reps={} T={} h={} seed={} flagged={}", t.reps, grid.horizon, grid.h, t.seed, t.flagged);
            write_out(None, &t.to_csv())
        }
        LimitsCommand::Cstar { k, grid } => {
            let spec = GridSpec::uniform(grid.horizon, grid.h);
            let e = estimate_cstar(*k, grid.reps, &default_c_grid(), spec, grid.seed, grid.exec())?;
            println!("# k={} c_star={:.4} reps={}", e.k, e.c_star, e.reps);
            write_out(None, &e.to_csv())
        }
    }
}

/// Runs an experiment; the exit status distinguishes config errors and
/// excessive solver fallbacks.
fn simulate(config: &Path, out: Option<&Path>, format: Format) -> Result<ExitCode> {
    let cfg = match ExperimentConfig::read(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(EXIT_CONFIG));
        }
    };
    let report = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(EXIT_CONFIG));
        }
        Err(e) => return Err(e.into()),
    };
    let fmt = match format {
        Format::Csv => TableFormat::Csv,
        Format::Markdown => TableFormat::Markdown,
    };
    write_out(out, &emit_table(&report, fmt))?;
    if report.fallback_exceeds(0.01) {
        for c in report.cells.iter().filter(|c| c.fallback_rate() > 0.01) {
            eprintln!("fallback on {} at n={}: {}", c.method.tag(), c.n, c.flags());
        }
        return Ok(ExitCode::from(EXIT_FALLBACK));
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::EstimateZero(args) => estimate_zero(&args)?,
        Command::Fit { input } => {
            let s = Sample::read(&input)?;
            write_out(None, &grenander(&s)?.to_csv())?;
        }
        Command::Limits { command } => limits(&command)?,
        Command::Sample { family, n, seed, rep } => {
            let s = DistributionSpec { family }.draw(n, seed, rep)?;
            write_out(None, &s.to_text())?;
        }
        Command::Simulate { config, out, format } => return simulate(&config, out.as_deref(), format),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
