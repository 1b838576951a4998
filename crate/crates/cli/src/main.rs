//! Command-line front end for the secrecy-rate toolkit.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 invalid configuration,
//! 3 unsupported regime.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sparsesec::channel::{sample_channels, sample_pattern, write_matrix_csv};
use sparsesec::config::{db_to_linear, validate};
use sparsesec::experiments::{evaluate_rate, figure, run_sweep, Axis, Curve, Figure, Metric, SweepSpec, DEFAULT_TRIALS};
use sparsesec::rates::{bounds, chi_metrics, Method, RateReport};
use sparsesec::{Error, SystemConfig};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Parser)]
#[command(name = "sparsesec", version, about = "Secrecy rates of sparse mmWave channels with artificial noise")]
struct Cli {
    /// Worker threads for Monte Carlo and sweeps (results do not depend on it).
    #[arg(long, global = true, env = "SPARSESEC_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bob's rate, Eve's capacity and the secrecy rate for one configuration.
    Rate {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "theorem1")]
        method: Method,
        #[command(flatten)]
        run: RunArgs,
        /// Write one channel realization (drawn with `--seed`) to DIR/g.csv and DIR/h.csv.
        #[arg(long, value_name = "DIR")]
        dump_channel: Option<PathBuf>,
    },
    /// Low- and high-SNR upper bounds on the secrecy rate.
    Bounds {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Sparsity metrics and the optimal number of dominant beams.
    Metrics {
        #[command(flatten)]
        config: ConfigArgs,
        /// Sparsity at which to evaluate the metrics (default l_t / n_t).
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Check a configuration and list every violated invariant.
    Validate {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Sweep metrics along one axis and write CSV.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// One of snr_db, m_t, m_e, l_t, phi, rho, eta.
        #[arg(long)]
        axis: Axis,
        /// `start:step:stop` (inclusive) or a comma-separated list.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Overrides defining one curve, e.g. `snr_db=6` or `rho=0.1,eta=0.2`. Repeatable.
        #[arg(long = "curve", allow_hyphen_values = true)]
        curves: Vec<Curve>,
        /// Metric name, e.g. theorem1, monte-carlo, leakage, beam-greedy. Repeatable.
        #[arg(long = "metric", required = true)]
        metrics: Vec<Metric>,
        #[command(flatten)]
        run: RunArgs,
        /// CSV destination (standard output if absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a preset figure sweep and write CSV.
    Figure {
        /// fig2, fig3, fig4, fig5, fig6, fig7, fig8, fig9, fig10 or fig12.
        name: Figure,
        /// Trials per point (preset default if absent).
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// CSV destination (standard output if absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

/// Config assembly: file, then convenience flags, then `--set` pairs.
#[derive(Args)]
struct ConfigArgs {
    /// `key=value` config file; absent keys keep the reference values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one config key. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[arg(long)]
    n_t: Option<usize>,
    #[arg(long)]
    n_r: Option<usize>,
    #[arg(long)]
    n_e: Option<usize>,
    #[arg(long)]
    m_t: Option<usize>,
    #[arg(long)]
    m_r: Option<usize>,
    #[arg(long)]
    m_e: Option<usize>,
    #[arg(long)]
    l_t: Option<usize>,
    #[arg(long)]
    l_r: Option<usize>,
    #[arg(long)]
    l_e: Option<usize>,
    #[arg(long)]
    power: Option<f64>,
    #[arg(long)]
    noise_var: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// Transmit SNR `P / noise_var`: linear, or dB with a `db` suffix (e.g. `10db`).
    #[arg(long, allow_hyphen_values = true, value_parser = parse_snr)]
    snr: Option<f64>,
}

impl ConfigArgs {
    fn build(&self) -> Result<SystemConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                SystemConfig::parse_with_base(&text, SystemConfig::default())?
            }
            None => SystemConfig::default(),
        };
        let counts = [
            ("n_t", self.n_t),
            ("n_r", self.n_r),
            ("n_e", self.n_e),
            ("m_t", self.m_t),
            ("m_r", self.m_r),
            ("m_e", self.m_e),
            ("l_t", self.l_t),
            ("l_r", self.l_r),
            ("l_e", self.l_e),
        ];
        for (key, v) in counts {
            if let Some(v) = v {
                cfg.set(key, &v.to_string())?;
            }
        }
        let reals = [("power", self.power), ("noise_var", self.noise_var), ("phi", self.phi), ("eta", self.eta)];
        for (key, v) in reals {
            if let Some(v) = v {
                cfg.set(key, &v.to_string())?;
            }
        }
        if let Some(snr) = self.snr {
            cfg.power = snr * cfg.noise_var;
        }
        for pair in &self.sets {
            let (k, v) = pair.split_once('=').ok_or_else(|| Usage(format!("expected KEY=VALUE, got `{pair}`")))?;
            cfg.set(k.trim(), v)?;
        }
        Ok(cfg)
    }
}

/// Error that maps to exit code 1.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn parse_snr(s: &str) -> Result<f64, String> {
    let lower = s.trim().to_ascii_lowercase();
    let (num, db) = match lower.strip_suffix("db") {
        Some(n) => (n.trim(), true),
        None => (lower.as_str(), false),
    };
    let v: f64 = num.parse().map_err(|_| format!("invalid SNR `{s}`"))?;
    if !v.is_finite() {
        return Err(format!("invalid SNR `{s}`"));
    }
    Ok(if db { db_to_linear(v) } else { v })
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Usage(format!("invalid grid value `{t}`")));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if !(step > 0.0 && start.is_finite() && stop.is_finite() && stop >= start) {
                bail!(Usage(format!("invalid grid range `{s}`")));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect())
        }
        [_] => s.split(',').map(|t| num(t).map_err(Into::into)).collect(),
        _ => bail!(Usage(format!("invalid grid `{s}`"))),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return 1;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::InvalidConfig(_) | Error::Domain(_)) => 2,
        Some(Error::Unsupported(_) | Error::Divergent(_)) => 3,
        _ => 1,
    }
}

fn print_report(out: &mut impl Write, r: &RateReport) -> io::Result<()> {
    writeln!(out, "method = {}", r.method)?;
    writeln!(out, "r_u = {:.6}", r.r_u)?;
    writeln!(out, "c_e = {:.6}", r.c_e)?;
    writeln!(out, "r_s = {:.6}", r.r_s)?;
    if r.method == Method::MonteCarlo {
        writeln!(out, "std_err = {:.6}", r.std_err)?;
        writeln!(out, "trials = {}", r.trials)?;
        writeln!(out, "retries = {}", r.retries)?;
    }
    if let Some(w) = &r.warning {
        writeln!(out, "warning = {w}")?;
    }
    Ok(())
}

fn dump_channel(cfg: &SystemConfig, seed: u64, dir: &Path) -> Result<()> {
    let pattern = sample_pattern(cfg, seed)?;
    let pair = sample_channels(cfg, &pattern, seed.wrapping_add(1))?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, m) in [("g.csv", &pair.g), ("h.csv", &pair.h)] {
        let path = dir.join(name);
        let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = io::BufWriter::new(file);
        write_matrix_csv(m, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn write_csv(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => Ok(io::stdout().lock().write_all(text.as_bytes())?),
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.workers {
        if n == 0 {
            bail!(Usage("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| anyhow!(e))?;
    }
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Rate { config, method, run, dump_channel: dump } => {
            let cfg = config.build()?;
            cfg.ensure_valid()?;
            if let Some(dir) = dump {
                dump_channel(&cfg, run.seed, &dir)?;
            }
            let report = evaluate_rate(method, &cfg, run.trials, run.seed)?;
            print_report(&mut stdout, &report)?;
        }
        Command::Bounds { config } => {
            let cfg = config.build()?;
            cfg.ensure_structurally_valid()?;
            let b = bounds(&cfg)?;
            writeln!(stdout, "low_snr_bound = {:.6}", b.low)?;
            writeln!(stdout, "high_snr_bound = {:.6}", b.high)?;
        }
        Command::Metrics { config, rho } => {
            let cfg = config.build()?;
            cfg.ensure_structurally_valid()?;
            let rho = rho.unwrap_or_else(|| cfg.rho());
            let m = chi_metrics(rho, cfg.eta, &cfg)?;
            writeln!(stdout, "rho = {rho:.6}")?;
            writeln!(stdout, "eta = {}", cfg.eta)?;
            writeln!(stdout, "chi_l = {:.6}", m.chi_l)?;
            writeln!(stdout, "chi_h = {:.6}", m.chi_h)?;
            writeln!(stdout, "rho* = {:.6}", m.rho_star)?;
            writeln!(stdout, "L_t* = {}", m.l_t_star)?;
        }
        Command::Validate { config } => {
            let cfg = config.build()?;
            let report = validate(&cfg);
            if !report.passes() {
                return Err(Error::InvalidConfig(report).into());
            }
            writeln!(stdout, "ok")?;
        }
        Command::Sweep { config, axis, grid, curves, metrics, run, out } => {
            let mut spec = SweepSpec::new(config.build()?, axis, parse_grid(&grid)?, metrics);
            if !curves.is_empty() {
                spec.curves = curves;
            }
            spec.trials = run.trials;
            spec.seed = run.seed;
            write_csv(&run_sweep(&spec)?.to_csv(), out.as_deref())?;
        }
        Command::Figure { name, trials, seed, out } => {
            let mut spec = figure(name);
            if let Some(t) = trials {
                spec.trials = t;
            }
            spec.seed = seed;
            write_csv(&run_sweep(&spec)?.to_csv(), out.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("sparsesec: {}", first.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sparsesec: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_accepts_db_and_linear() {
        assert_eq!(parse_snr("10").unwrap(), 10.0);
        assert!((parse_snr("10db").unwrap() - 10.0).abs() < 1e-12);
        assert!((parse_snr("20dB").unwrap() - 100.0).abs() < 1e-9);
        assert!((parse_snr("-10db").unwrap() - 0.1).abs() < 1e-12);
        assert!(parse_snr("loud").is_err());
    }

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("-10:5:10").unwrap(), vec![-10.0, -5.0, 0.0, 5.0, 10.0]);
        assert_eq!(parse_grid("0.1:0.1:0.3").unwrap(), vec![0.1, 0.2, 0.3]);
        assert_eq!(parse_grid("2,4,8").unwrap(), vec![2.0, 4.0, 8.0]);
        assert!(parse_grid("1:0:3").is_err());
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        let invalid = anyhow::Error::from(Error::InvalidConfig(Default::default()));
        assert_eq!(exit_code(&invalid), 2);
        assert_eq!(exit_code(&Error::Unsupported("x".into()).into()), 3);
        assert_eq!(exit_code(&Error::Parse("x".into()).into()), 1);
        assert_eq!(exit_code(&anyhow::Error::from(Usage("x".into()))), 1);
    }

    #[test]
    fn config_layers_apply_in_order() {
        let args = ConfigArgs {
            config: None,
            sets: vec!["eta=0.3".into()],
            n_t: Some(256),
            n_r: None,
            n_e: None,
            m_t: None,
            m_r: None,
            m_e: None,
            l_t: None,
            l_r: None,
            l_e: None,
            power: None,
            noise_var: Some(2.0),
            phi: None,
            eta: Some(0.2),
            snr: Some(10.0),
        };
        let cfg = args.build().unwrap();
        assert_eq!(cfg.n_t, 256);
        assert_eq!(cfg.eta, 0.3);
        assert_eq!(cfg.power, 20.0);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
