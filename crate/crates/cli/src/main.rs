//! `logid`: moments of log-infinitely-divisible chaos from the command line.

mod commands;
mod config;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use logid_core::quadrature::IntervalPair;
use logid_core::{Error, LevySpectrum};

use config::{Command, Format, Method, Parameters, Quantity, RunConfig, Suite};
use output::Table;

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Unsupported(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Unsupported(_) => 3,
            CliError::Numerical(_) | CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Unsupported(m) => write!(f, "unsupported: {m}"),
            CliError::Numerical(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::Domain(_) => CliError::Invalid(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "logid", version, about = "Moments of log-infinitely-divisible multiplicative chaos")]
struct Cli {
    /// JSON run configuration; command-line flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// print the effective configuration as JSON and exit
    #[arg(long, global = true)]
    emit_config: bool,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// absolute tolerance for quadrature results
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// write results here instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Sub>,
}

#[derive(Args, Debug, Default)]
struct SpectrumArgs {
    /// spectrum as JSON `{"sigma2": s, "atoms": [[u, w], ...]}` or `@file`
    #[arg(long, conflicts_with_all = ["gaussian", "log_poisson"])]
    spectrum: Option<String>,
    /// gaussian spectrum with this variance
    #[arg(long, conflicts_with = "log_poisson")]
    gaussian: Option<f64>,
    /// log-Poisson spectrum with jump factor c
    #[arg(long)]
    log_poisson: Option<f64>,
}

impl SpectrumArgs {
    fn resolve(&self) -> Result<Option<LevySpectrum>, CliError> {
        if let Some(text) = &self.spectrum {
            let text = match text.strip_prefix('@') {
                Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?,
                None => text.clone(),
            };
            let spec = serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("spectrum: {e}")))?;
            return Ok(Some(spec));
        }
        if let Some(s) = self.gaussian {
            return Ok(Some(LevySpectrum::gaussian(s)?));
        }
        if let Some(c) = self.log_poisson {
            return Ok(Some(LevySpectrum::log_poisson(c)?));
        }
        Ok(None)
    }
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// spectrum coefficients, multiscaling exponents and moment finiteness
    Spectrum {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        n_max: Option<u32>,
    },
    /// a single or joint moment by one of four methods
    Moment {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        n: Option<u32>,
        /// second order; asks for the joint moment of two intervals
        #[arg(long)]
        m: Option<u32>,
        /// integer exponent for method binom
        #[arg(long)]
        lambda: Option<u32>,
        /// Morris parameters `a,b` for method binom
        #[arg(long, value_delimiter = ',')]
        morris: Option<Vec<u32>>,
        /// joint-moment intervals `a1,b1,a2,b2`
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        intervals: Option<Vec<f64>>,
        /// report the ordered simplex integral without the factorial
        #[arg(long)]
        raw: bool,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// run identity checks and report residuals
    Verify {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        #[arg(long)]
        mu: Option<f64>,
    },
    /// Monte Carlo estimates from the cone construction
    Simulate {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        #[arg(long, value_enum)]
        quantity: Option<Quantity>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[command(flatten)]
        sim: SimArgs,
        /// lags for log-cov, interval lengths for scaling
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
        #[arg(long)]
        tau: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct SimArgs {
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long)]
    paths: Option<usize>,
    /// mass interval `a,b`
    #[arg(long, value_delimiter = ',')]
    interval: Option<Vec<f64>>,
}

impl SimArgs {
    fn apply(self, p: &mut Parameters) -> Result<(), CliError> {
        set(&mut p.epsilon, self.epsilon);
        set(&mut p.grid_n, self.grid_n);
        set(&mut p.paths, self.paths);
        set(&mut p.interval, self.interval.map(|v| fixed("interval", v)).transpose()?);
        Ok(())
    }
}

fn fixed<T: Copy + std::fmt::Debug, const K: usize>(flag: &str, v: Vec<T>) -> Result<[T; K], CliError> {
    v.try_into()
        .map_err(|v: Vec<T>| CliError::Invalid(format!("--{flag} takes {K} comma-separated values, got {}", v.len())))
}

fn set<T>(slot: &mut Option<T>, value: Option<T>) {
    if value.is_some() {
        *slot = value;
    }
}

fn sub_command(sub: &Sub) -> Command {
    match sub {
        Sub::Spectrum { .. } => Command::Spectrum,
        Sub::Moment { .. } => Command::Moment,
        Sub::Verify { .. } => Command::Verify,
        Sub::Simulate { .. } => Command::Simulate,
    }
}

fn build_config(cli: Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let cfg = RunConfig::from_json(&text)?;
            if let Some(sub) = &cli.command {
                if sub_command(sub) != cfg.command {
                    return Err(CliError::Invalid("subcommand does not match the config's command".into()));
                }
            }
            cfg
        }
        None => match &cli.command {
            Some(sub) => RunConfig::new(sub_command(sub)),
            None => return Err(CliError::Invalid("no command given; try `logid --help`".into())),
        },
    };
    set(&mut cfg.seed, cli.seed);
    set(&mut cfg.threads, cli.threads);
    set(&mut cfg.tol, cli.tol);
    set(&mut cfg.output, cli.output);
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    let p = &mut cfg.parameters;
    let spectrum = match cli.command {
        None => None,
        Some(Sub::Spectrum { spectrum, mu, n_max }) => {
            set(&mut p.mu, mu);
            set(&mut p.n_max, n_max);
            spectrum.resolve()?
        }
        Some(Sub::Moment { spectrum, method, mu, n, m, lambda, morris, intervals, raw, sim }) => {
            set(&mut cfg.method, method);
            set(&mut p.mu, mu);
            set(&mut p.n, n);
            set(&mut p.m, m);
            set(&mut p.lambda, lambda);
            set(&mut p.morris, morris.map(|v| fixed("morris", v)).transpose()?);
            if let Some(v) = intervals {
                let [a1, b1, a2, b2] = fixed("intervals", v)?;
                p.intervals = Some(IntervalPair::new(a1, b1, a2, b2)?);
            }
            if raw {
                p.raw = Some(true);
            }
            sim.apply(p)?;
            spectrum.resolve()?
        }
        Some(Sub::Verify { spectrum, suite, mu }) => {
            set(&mut p.suite, suite);
            set(&mut p.mu, mu);
            spectrum.resolve()?
        }
        Some(Sub::Simulate { spectrum, quantity, mu, q, sim, t, tau }) => {
            set(&mut p.quantity, quantity);
            set(&mut p.mu, mu);
            set(&mut p.q, q);
            set(&mut p.t, t);
            set(&mut p.tau, tau);
            sim.apply(p)?;
            spectrum.resolve()?
        }
    };
    if let Some(s) = spectrum {
        cfg.spectrum = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cfg: &RunConfig) -> Result<bool, CliError> {
    if let Some(threads) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Numerical(format!("thread pool: {e}")))?;
    }
    let (columns, command): (&[&'static str], fn(&RunConfig, &mut Table) -> Result<bool, CliError>) = match cfg.command {
        Command::Spectrum => (commands::SPECTRUM_COLUMNS, commands::spectrum),
        Command::Moment => (commands::MOMENT_COLUMNS, commands::moment),
        Command::Verify => (commands::VERIFY_COLUMNS, commands::verify),
        Command::Simulate => (commands::SIMULATE_COLUMNS, commands::simulate),
    };
    let mut table = Table::new(columns);
    let outcome = command(cfg, &mut table);
    // partial rows are still written when a later step fails
    if outcome.is_ok() || !table.rows.is_empty() {
        write_table(cfg, &table)?;
    }
    outcome
}

fn write_table(cfg: &RunConfig, table: &Table) -> Result<(), CliError> {
    match &cfg.output {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            table.write(cfg.format, &mut w)?;
            w.flush().map_err(|e| CliError::Io(e.to_string()))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            table.write(cfg.format, &mut lock)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let emit = cli.emit_config;
    let cfg = match build_config(cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("logid: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    if emit {
        println!("{}", cfg.to_json());
        return ExitCode::SUCCESS;
    }
    match run(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("logid: verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("logid: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
