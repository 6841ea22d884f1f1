use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sumprod_core::bounds::circuit_lv;
use sumprod_core::config::{load_config, LoadedConfig};
use sumprod_core::distributions::{
    log_spaced, registry_densities, varpi_pdf_checked, verify_convenient, verify_d2bounds, verify_neg_moment,
    DEFAULT_VARPI_TOL,
};
use sumprod_core::experiments::{
    conditional_suite, run_experiment_with_workers, write_trial_csv, Pivot, RiceReport, Verdict,
};
use sumprod_core::func::DenseF64;
use sumprod_core::polynomials::DensePoly;
use sumprod_core::realroots::{kac_estimate, sturm_count, Interval};
use sumprod_core::Error;

#[derive(Parser)]
#[command(name = "sumprod", version, about = "Random sums of products of sparse polynomials: zero counts and bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Overrides {
    /// Number of Monte Carlo trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Absolute tolerance of the bound quadratures.
    #[arg(long)]
    tol: Option<f64>,
    /// Pivot term: an index, `listed` or `min`.
    #[arg(long)]
    pivot: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo experiment of a config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Per-trial CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON summary; printed to stdout when absent.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        /// Worker threads (default: all cores).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Evaluate the bounds of a config's circuit.
    Bound {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        summary: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Logarithmic variation of each weight function on [0, 1].
    Lv {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the density of a product of k standard Gaussians.
    Density {
        #[arg(long)]
        k: usize,
        /// Grid as LO:HI:N.
        #[arg(long, default_value = "-3:3:121", allow_hyphen_values = true)]
        points: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_VARPI_TOL)]
        tol: f64,
    },
    /// Kac estimate of the zeros of a dense polynomial against the exact count.
    Kac {
        /// Coefficients c0,c1,... in increasing degree.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        /// Region and grid as LO:HI:N.
        #[arg(long, default_value = "0:1:100000", allow_hyphen_values = true)]
        points: String,
        #[arg(long, default_value_t = 1e-4)]
        delta: f64,
    },
    /// Run a numerical verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Config for the rice suite.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Sample size for the conditional suite, trials for the rice suite.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    D2bounds,
    Convenient,
    Conditional,
    Rice,
}

/// Failures mapped to exit code 2.
struct ConfigError(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for ConfigError {
    fn from(e: E) -> Self {
        ConfigError(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(ConfigError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn sink(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot write {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> anyhow::Result<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn parse_pivot(s: &str) -> anyhow::Result<Pivot> {
    Ok(match s {
        "listed" => Pivot::Listed,
        "min" => Pivot::Min,
        _ => Pivot::Index(s.parse().map_err(|_| Error::Config {
            field: "pivot".into(),
            message: format!("expected an index, `listed` or `min`, got `{s}`"),
        })?),
    })
}

fn load(path: &Path, o: &Overrides) -> anyhow::Result<LoadedConfig> {
    let mut loaded = load_config(path)?;
    let cfg = &mut loaded.config;
    if let Some(n) = o.trials {
        cfg.trials = n;
    }
    if let Some(s) = o.seed {
        cfg.master_seed = s;
    }
    if let Some(t) = o.tol {
        cfg.tolerance = t;
    }
    if let Some(p) = &o.pivot {
        cfg.pivot = parse_pivot(p)?;
    }
    cfg.validate()?;
    Ok(loaded)
}

fn parse_points(s: &str) -> anyhow::Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        bail!("--points: expected LO:HI:N, got `{s}`");
    }
    let lo: f64 = parts[0].trim().parse().context("--points: bad LO")?;
    let hi: f64 = parts[1].trim().parse().context("--points: bad HI")?;
    let n: usize = parts[2].trim().parse().context("--points: bad N")?;
    if !(lo.is_finite() && hi.is_finite()) || n == 0 || (n > 1 && lo >= hi) {
        bail!("--points: need finite LO < HI and N >= 1");
    }
    Ok((lo, hi, n))
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn run(cmd: Command) -> Result<bool, ConfigError> {
    match cmd {
        Command::Simulate { config, out, summary, overrides, workers } => {
            let cfg = load(&config, &overrides)?.config;
            let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let (records, s) = run_experiment_with_workers(&cfg, workers)?;
            if let Some(p) = out.as_deref() {
                let mut w = sink(Some(p))?;
                write_trial_csv(&records, &mut w)?;
                w.flush()?;
            }
            write_json(&s, summary.as_deref())?;
            for c in s.checks.iter().filter(|c| !c.pass) {
                eprintln!("warning: {} = {} exceeds {}", c.name, c.value, c.bound);
            }
            Ok(true)
        }
        Command::Bound { config, summary, overrides } => {
            let cfg = load(&config, &overrides)?.config;
            write_json(&cfg.bound_report()?, summary.as_deref())?;
            Ok(true)
        }
        Command::Lv { config, tol, out } => {
            let cfg = load(&config, &Overrides { trials: None, seed: None, tol, pivot: None })?.config;
            let report = cfg.bound_report()?;
            let lv = circuit_lv(&cfg.circuit, cfg.tolerance);
            let mut w = sink(out.as_deref())?;
            writeln!(w, "term,k,lv,lv_bound,lv_factor_bound")?;
            for (i, v) in lv.iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{:.16e},{:.16e},{:.16e}",
                    i + 1,
                    report.ks[i],
                    v,
                    report.lv_bounds[i],
                    report.lv_factor_bounds[i]
                )?;
            }
            w.flush()?;
            Ok(true)
        }
        Command::Density { k, points, out, tol } => {
            let (lo, hi, n) = parse_points(&points)?;
            // validate k before touching the output file
            varpi_pdf_checked(k, 1.0, tol)?;
            let mut w = sink(out.as_deref())?;
            writeln!(w, "a,varpi")?;
            for a in grid(lo, hi, n) {
                let v = match varpi_pdf_checked(k, a, tol) {
                    Ok((v, _)) => v,
                    Err(Error::SingularAtZero(_)) => f64::INFINITY,
                    Err(e) => return Err(e.into()),
                };
                writeln!(w, "{a:.16e},{v:.16e}")?;
            }
            w.flush()?;
            Ok(true)
        }
        Command::Kac { coeffs, points, delta } => {
            let c: Vec<f64> = coeffs
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .context("--coeffs: expected comma-separated numbers")?;
            if c.iter().any(|v| !v.is_finite()) {
                return Err(anyhow::anyhow!("--coeffs: coefficients must be finite").into());
            }
            let (lo, hi, n) = parse_points(&points)?;
            let closed = Interval::closed(lo, hi)?;
            let estimate = kac_estimate(&DenseF64(c.clone()), &closed, delta, n)?;
            let p = DensePoly::from_f64(&c);
            let exact = sturm_count(&p, &Interval::open(lo, hi)?)?.count;
            let eta = 0.5 * (sturm_count(&p, &closed)?.count - exact) as f64;
            #[derive(Serialize)]
            struct KacOut {
                estimate: f64,
                exact_open: usize,
                eta: f64,
                deviation: f64,
            }
            write_json(&KacOut { estimate, exact_open: exact, eta, deviation: estimate - (exact as f64 + eta) }, None)?;
            Ok(true)
        }
        Command::Verify { suite, config, trials, seed, summary } => verify(suite, config, trials, seed, summary),
    }
}

fn verify(
    suite: Suite,
    config: Option<PathBuf>,
    trials: Option<usize>,
    seed: Option<u64>,
    summary: Option<PathBuf>,
) -> Result<bool, ConfigError> {
    let summary = summary.as_deref();
    match suite {
        Suite::D2bounds => {
            let grid = log_spaced(1e-3, 10.0, 40);
            let mut reports = Vec::new();
            for k in 2..=4 {
                reports.push(verify_d2bounds(k, &grid)?);
            }
            let pass = reports.iter().all(|r| r.all_pass());
            for r in &reports {
                eprintln!("k={}: {} checks, {} failed", r.k, r.checks.len(), r.failures().count());
            }
            write_json(&reports, summary)?;
            Ok(pass)
        }
        Suite::Convenient => {
            let mut checks: Vec<_> = registry_densities().iter().flat_map(verify_convenient).collect();
            checks.extend(verify_neg_moment());
            let pass = checks.iter().all(|c| c.pass);
            for c in checks.iter().filter(|c| !c.pass) {
                eprintln!("FAIL {} {}: {} vs {}", c.density, c.check, c.value, c.target);
            }
            write_json(&checks, summary)?;
            Ok(pass)
        }
        Suite::Conditional => {
            let checks = conditional_suite(trials.unwrap_or(1_000_000), seed.unwrap_or(0))?;
            let pass = checks.iter().all(|c| c.verdict != Verdict::Fail);
            for c in checks.iter().filter(|c| c.verdict != Verdict::Pass) {
                eprintln!("{:?} {} at {}", c.verdict, c.name, c.point);
            }
            write_json(&checks, summary)?;
            Ok(pass)
        }
        Suite::Rice => {
            let Some(path) = config else {
                return Err(anyhow::anyhow!("--config is required for the rice suite").into());
            };
            let cfg = load(&path, &Overrides { trials, seed, tol: None, pivot: None })?.config;
            if cfg.distribution.name() != "gaussian" {
                return Err(Error::Config {
                    field: "distribution".into(),
                    message: "the rice suite needs gaussian coefficients".into(),
                }
                .into());
            }
            let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
            let (records, s) = run_experiment_with_workers(&cfg, workers)?;
            let report = RiceReport::from_summary(&s, &records);
            write_json(&report, summary)?;
            Ok(report.pass)
        }
    }
}
