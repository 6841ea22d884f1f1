//! Monte Carlo estimation of expected zero counts and of conditional
//! expectations, compared against the bounds module.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{bound_report, min_pivot_report, BoundReport};
use crate::distributions::{sample_product_gaussian, ConvenientDensity, DensityKind};
use crate::error::{Error, Result};
use crate::polynomials::{beta_prime, eval_sparse, Circuit, Support, DEFAULT_DEGREE_CAP};
use crate::realroots::{
    sturm_count_regions, subdivision_count_regions, CountMethod, Region, RegionCounts, DEFAULT_SUBDIVISION_TOL,
};

/// One-sided 99% standard normal quantile.
pub const Z99: f64 = 2.326_347_874_040_841;
pub const DEFAULT_TRIALS: usize = 10_000;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
/// Window hits below which a conditional estimate is reported as inconclusive.
pub const MIN_WINDOW_HITS: usize = 30;

/// What to do when the dense degree exceeds the cap under Sturm counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapPolicy {
    /// Count that trial by subdivision and flag it.
    #[default]
    Fallback,
    Abort,
}

/// Which shift-0 term serves as term 1 in the bound report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pivot {
    #[default]
    Listed,
    Index(usize),
    /// The choice minimizing the closed-form bound.
    Min,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub circuit: Circuit,
    pub distribution: ConvenientDensity,
    pub trials: usize,
    pub master_seed: u64,
    /// Regions summarized; every trial still records all of them.
    pub regions: Vec<Region>,
    pub count_method: CountMethod,
    pub degree_cap: usize,
    pub on_cap: CapPolicy,
    /// Absolute tolerance of the bound quadratures.
    pub tolerance: f64,
    pub pivot: Pivot,
}

impl ExperimentConfig {
    pub fn new(circuit: Circuit, distribution: ConvenientDensity) -> Self {
        Self {
            circuit,
            distribution,
            trials: DEFAULT_TRIALS,
            master_seed: 0,
            regions: Region::ALL.to_vec(),
            count_method: CountMethod::Sturm,
            degree_cap: DEFAULT_DEGREE_CAP,
            on_cap: CapPolicy::Fallback,
            tolerance: DEFAULT_TOLERANCE,
            pivot: Pivot::Listed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::config("tolerance", "must be positive"));
        }
        if self.count_method == CountMethod::Sturm
            && self.on_cap == CapPolicy::Abort
            && self.circuit.dense_degree() > self.degree_cap
        {
            return Err(Error::DegreeCapExceeded {
                degree: self.circuit.dense_degree(),
                cap: self.degree_cap,
            });
        }
        Ok(())
    }

    pub fn bound_report(&self) -> Result<BoundReport> {
        match self.pivot {
            Pivot::Listed => Ok(bound_report(&self.circuit, &self.distribution, self.tolerance)),
            Pivot::Index(i) => {
                let c = self.circuit.with_pivot(i)?;
                let mut r = bound_report(&c, &self.distribution, self.tolerance);
                r.pivot = i;
                Ok(r)
            }
            Pivot::Min => min_pivot_report(&self.circuit, &self.distribution, self.tolerance),
        }
    }
}

/// The independent stream of trial `trial`: ChaCha8 keyed by the master seed,
/// with the trial index as stream number.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// How the counts of one trial were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodFlag {
    Sturm,
    Subdivision,
    /// Sturm requested but the degree cap forced subdivision.
    Fallback,
    /// Subdivision left cells below the resolution tolerance unresolved.
    Uncertified,
}

impl MethodFlag {
    pub fn name(self) -> &'static str {
        match self {
            MethodFlag::Sturm => "sturm",
            MethodFlag::Subdivision => "subdivision",
            MethodFlag::Fallback => "fallback",
            MethodFlag::Uncertified => "uncertified",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [MethodFlag::Sturm, MethodFlag::Subdivision, MethodFlag::Fallback, MethodFlag::Uncertified]
            .into_iter()
            .find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub counts: RegionCounts,
    pub method: MethodFlag,
}

pub fn sample_coefficients<R: Rng + ?Sized>(circuit: &Circuit, density: &ConvenientDensity, rng: &mut R) -> Vec<f64> {
    (0..circuit.num_coeffs()).map(|_| density.sample(rng)).collect()
}

pub fn run_trial(cfg: &ExperimentConfig, trial: u64) -> Result<TrialRecord> {
    let mut rng = trial_rng(cfg.master_seed, trial);
    let u = sample_coefficients(&cfg.circuit, &cfg.distribution, &mut rng);
    let subdivide = |fallback: bool| -> Result<(RegionCounts, MethodFlag)> {
        let (counts, certified) = subdivision_count_regions(&cfg.circuit, &u, DEFAULT_SUBDIVISION_TOL)?;
        let flag = match (certified, fallback) {
            (false, _) => MethodFlag::Uncertified,
            (true, true) => MethodFlag::Fallback,
            (true, false) => MethodFlag::Subdivision,
        };
        Ok((counts, flag))
    };
    let (counts, method) = match cfg.count_method {
        CountMethod::Subdivision => subdivide(false)?,
        CountMethod::Sturm => match cfg.circuit.expand(&u, cfg.degree_cap) {
            Ok(p) => (sturm_count_regions(&p)?, MethodFlag::Sturm),
            Err(Error::DegreeCapExceeded { .. }) if cfg.on_cap == CapPolicy::Fallback => subdivide(true)?,
            Err(e) => return Err(e),
        },
    };
    Ok(TrialRecord { trial, counts, method })
}

/// Mean, standard error and one-sided 99% upper confidence limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub stderr: f64,
    pub ucl: f64,
}

impl Stat {
    /// Sequential accumulation in the given order, so the result depends only
    /// on the values and their order.
    pub fn from_values<I: IntoIterator<Item = f64>>(values: I) -> Self {
        let (mut n, mut sum, mut sum_sq) = (0usize, 0.0, 0.0);
        for v in values {
            n += 1;
            sum += v;
            sum_sq += v * v;
        }
        if n == 0 {
            return Self {
                mean: 0.0,
                stderr: 0.0,
                ucl: 0.0,
            };
        }
        let nf = n as f64;
        let mean = sum / nf;
        let var = if n > 1 {
            ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        let stderr = (var / nf).sqrt();
        Self {
            mean,
            stderr,
            ucl: mean + Z99 * stderr,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionStat {
    pub region: Region,
    #[serde(flatten)]
    pub stat: Stat,
}

/// Pass/fail of `ucl <= bound` (or of any `value <= bound`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
}

impl BoundCheck {
    pub fn new(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            slack: bound - value,
            pass: value <= bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSummary {
    pub trials_completed: usize,
    pub master_seed: u64,
    pub distribution: String,
    pub regions: Vec<RegionStat>,
    /// Zeros in the closed interval `[0, 1]`.
    pub unit_closed: Stat,
    pub origin_zero_trials: usize,
    pub fallback_trials: usize,
    pub uncertified_trials: usize,
    pub bound_report: BoundReport,
    pub checks: Vec<BoundCheck>,
}

impl TrialSummary {
    pub fn region(&self, r: Region) -> Option<&Stat> {
        self.regions.iter().find(|s| s.region == r).map(|s| &s.stat)
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn summarize(cfg: &ExperimentConfig, records: &[TrialRecord]) -> Result<TrialSummary> {
    let report = cfg.bound_report()?;
    let stat = |r: Region| Stat::from_values(records.iter().map(|t| t.counts.get(r) as f64));
    let regions: Vec<RegionStat> = cfg.regions.iter().map(|&r| RegionStat { region: r, stat: stat(r) }).collect();
    let unit_closed =
        Stat::from_values(records.iter().map(|t| (t.counts.unit_pos + t.counts.zero_at_origin as usize) as f64));
    let count = |f: &dyn Fn(&TrialRecord) -> bool| records.iter().filter(|t| f(t)).count();

    let mut checks = Vec::new();
    let gaussian = cfg.distribution.kind == DensityKind::Gaussian;
    if gaussian {
        checks.push(BoundCheck::new("all: ucl <= total_bound", stat(Region::All).ucl, report.total_bound));
        checks.push(BoundCheck::new("unit_pos: ucl <= rice_integral", stat(Region::UnitPos).ucl, report.rice_integral));
        checks.push(BoundCheck::new(
            "rice_integral <= af_bound_unit + 1e-4",
            report.rice_integral,
            report.af_bound_unit + 1e-4,
        ));
    }
    if let Some(sp1) = report.sp1_bound {
        checks.push(BoundCheck::new("[0,1]: ucl <= sp1_bound", unit_closed.ucl, sp1));
    }
    Ok(TrialSummary {
        trials_completed: records.len(),
        master_seed: cfg.master_seed,
        distribution: cfg.distribution.name().to_string(),
        regions,
        unit_closed,
        origin_zero_trials: count(&|t| t.counts.zero_at_origin),
        fallback_trials: count(&|t| t.method == MethodFlag::Fallback),
        uncertified_trials: count(&|t| t.method == MethodFlag::Uncertified),
        bound_report: report,
        checks,
    })
}

/// Runs all trials on the global thread pool. Records come back in trial
/// order and are aggregated sequentially, so the output does not depend on
/// scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(Vec<TrialRecord>, TrialSummary)> {
    cfg.validate()?;
    let records = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|n| run_trial(cfg, n))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(cfg, &records)?;
    Ok((records, summary))
}

/// [`run_experiment`] on a dedicated pool of `workers` threads.
pub fn run_experiment_with_workers(cfg: &ExperimentConfig, workers: usize) -> Result<(Vec<TrialRecord>, TrialSummary)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    pool.install(|| run_experiment(cfg))
}

pub const CSV_HEADER: &str = "trial,zeros_unit_pos,zeros_tail_pos,zeros_unit_neg,zeros_tail_neg,zeros_total,method_flag";

pub fn write_trial_csv<W: Write>(records: &[TrialRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        let c = &r.counts;
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.trial,
            c.unit_pos,
            c.tail_pos,
            c.unit_neg,
            c.tail_neg,
            c.total,
            r.method.name()
        )?;
    }
    Ok(())
}

/// Parses a per-trial CSV. A zero at the origin is recovered from the
/// difference between the total and the four region counts.
pub fn read_trial_csv<R: BufRead>(input: R) -> Result<Vec<TrialRecord>> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    let bad = |line: usize, msg: &str| Error::Io(format!("line {line}: {msg}"));
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| bad(1, "missing header"))?.map_err(io)?;
    if header.trim() != CSV_HEADER {
        return Err(bad(1, "unexpected header"));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(io)?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 7 {
            return Err(bad(i + 2, "expected 7 fields"));
        }
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad(i + 2, "not an integer"));
        let v: Vec<u64> = fields[..6].iter().map(|s| num(s)).collect::<Result<_>>()?;
        let method = MethodFlag::parse(fields[6]).ok_or_else(|| bad(i + 2, "unknown method flag"))?;
        let sum = v[1] + v[2] + v[3] + v[4];
        if v[5] < sum || v[5] > sum + 1 {
            return Err(bad(i + 2, "total inconsistent with region counts"));
        }
        out.push(TrialRecord {
            trial: v[0],
            counts: RegionCounts {
                unit_pos: v[1] as usize,
                tail_pos: v[2] as usize,
                unit_neg: v[3] as usize,
                tail_neg: v[4] as usize,
                zero_at_origin: v[5] == sum + 1,
                total: v[5] as usize,
            },
            method,
        });
    }
    Ok(out)
}

/// Windowed Monte Carlo estimate of `E(Z | f = a) rho_f(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionalEstimate {
    pub value: f64,
    pub stderr: f64,
    pub delta: f64,
    pub hits: usize,
    /// No sample fell in the window; the value 0 carries no information.
    pub low_support: bool,
}

/// Default window half-width `n^(-1/5) sd(f)`.
pub fn default_window(n: usize, sd: f64) -> f64 {
    (n.max(1) as f64).powf(-0.2) * sd
}

/// `(1 / (2 delta n)) sum Z 1{|f - a| < delta}` over `n` draws of `(f, Z)`.
/// With `delta = None` the window is [`default_window`] with the sample
/// standard deviation of `f`.
pub fn conditional_moment_estimate<R, S>(mut sampler: S, a: f64, delta: Option<f64>, n: usize, rng: &mut R) -> Result<ConditionalEstimate>
where
    R: Rng + ?Sized,
    S: FnMut(&mut R) -> (f64, f64),
{
    let draws: Vec<(f64, f64)> = (0..n).map(|_| sampler(rng)).collect();
    windowed_estimate(&draws, a, delta)
}

/// The windowed estimator over precomputed draws `(f, Z)`.
pub fn windowed_estimate(draws: &[(f64, f64)], a: f64, delta: Option<f64>) -> Result<ConditionalEstimate> {
    let n = draws.len();
    if n == 0 {
        return Err(Error::OutOfRange { name: "n", value: 0.0 });
    }
    if let Some(d) = delta {
        if !(d > 0.0) {
            return Err(Error::OutOfRange { name: "delta", value: d });
        }
    }
    let delta = delta.unwrap_or_else(|| {
        let s = Stat::from_values(draws.iter().map(|d| d.0));
        default_window(n, s.stderr * (n as f64).sqrt())
    });
    let scale = 1.0 / (2.0 * delta);
    let mut hits = 0;
    let stat = Stat::from_values(draws.iter().map(|&(f, z)| {
        if (f - a).abs() < delta {
            hits += 1;
            z * scale
        } else {
            0.0
        }
    }));
    Ok(ConditionalEstimate {
        value: stat.mean,
        stderr: stat.stderr,
        delta,
        hits,
        low_support: hits == 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Statistical inequality `estimate <= bound`, accepted within three
/// standard errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub point: String,
    pub estimate: f64,
    pub stderr: f64,
    pub bound: f64,
    pub hits: usize,
    pub verdict: Verdict,
}

impl InequalityCheck {
    pub fn new(name: impl Into<String>, point: impl Into<String>, est: &ConditionalEstimate, factor: f64, bound: f64) -> Self {
        let (estimate, stderr) = (factor * est.value, factor * est.stderr);
        let verdict = if est.hits < MIN_WINDOW_HITS && estimate > bound {
            Verdict::Inconclusive
        } else if estimate <= bound + 3.0 * stderr {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            name: name.into(),
            point: point.into(),
            estimate,
            stderr,
            bound,
            hits: est.hits,
            verdict,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductLemmaReport {
    pub k: usize,
    pub x: f64,
    pub a: f64,
    /// `E(|g'| | g = a) rho(a) <= A B sum_j beta_j'(x)`
    pub total: InequalityCheck,
    /// `E(|f_j'/f_j| | g = a) rho(a) <= A B beta_j'(x) / |a|`
    pub per_factor: Vec<InequalityCheck>,
}

impl ProductLemmaReport {
    pub fn checks(&self) -> impl Iterator<Item = &InequalityCheck> {
        std::iter::once(&self.total).chain(&self.per_factor)
    }
}

/// Kernel estimates for the product `g = f_1 ... f_k` of independent random
/// sparse polynomials with coefficient density `density`, evaluated at `x`.
#[allow(clippy::too_many_arguments)]
pub fn verify_product_lemma<R: Rng + ?Sized>(
    k: usize,
    supports: &[Support],
    x: f64,
    a: f64,
    n: usize,
    delta: Option<f64>,
    density: &ConvenientDensity,
    rng: &mut R,
) -> Result<ProductLemmaReport> {
    if k == 0 || supports.len() != k {
        return Err(Error::OutOfRange { name: "k", value: k as f64 });
    }
    if let Some(s) = supports.iter().find(|s| !s.is_normalized()) {
        return Err(Error::UnnormalizedSupport(s.exponents().to_vec()));
    }
    if a == 0.0 || !a.is_finite() {
        return Err(Error::OutOfRange { name: "a", value: a });
    }
    let ab = density.a() * density.b();
    // one pass of samples shared by all k + 1 estimators
    let draws: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|_| {
            supports
                .iter()
                .map(|s| {
                    let c: Vec<f64> = (0..s.len()).map(|_| density.sample(rng)).collect();
                    eval_sparse(s, &c, x)
                })
                .collect()
        })
        .collect();
    let product = |fs: &[(f64, f64)]| fs.iter().map(|p| p.0).product::<f64>();
    let derivative = |fs: &[(f64, f64)]| {
        (0..fs.len())
            .map(|j| fs.iter().enumerate().map(|(l, p)| if l == j { p.1 } else { p.0 }).product::<f64>())
            .sum::<f64>()
    };
    let estimate = |z: &dyn Fn(&[(f64, f64)]) -> f64| {
        let pairs: Vec<(f64, f64)> = draws.iter().map(|fs| (product(fs), z(fs))).collect();
        windowed_estimate(&pairs, a, delta)
    };
    let point = format!("k={k} x={x} a={a}");
    let total_est = estimate(&|fs| derivative(fs).abs())?;
    let beta: Vec<f64> = supports.iter().map(|s| beta_prime(s, x)).collect();
    let total = InequalityCheck::new("product lemma: |g'|", &point, &total_est, 1.0, ab * beta.iter().sum::<f64>());
    let mut per_factor = Vec::with_capacity(k);
    for j in 0..k {
        let est = estimate(&|fs| (fs[j].1 / fs[j].0).abs())?;
        per_factor.push(InequalityCheck::new(
            format!("product lemma: |f_{}'/f_{}|", j + 1, j + 1),
            &point,
            &est,
            1.0,
            ab * beta[j] / a.abs(),
        ));
    }
    Ok(ProductLemmaReport {
        k,
        x,
        a,
        total,
        per_factor,
    })
}

/// `|w| E(|u_2| | u_1 + w u_2 = a) rho(a) <= 1` for standard Gaussians.
pub fn linear_combination_check<R: Rng + ?Sized>(w: f64, a: f64, n: usize, rng: &mut R) -> Result<InequalityCheck> {
    let est = conditional_moment_estimate(
        |r: &mut R| {
            let (u1, u2) = (sample_product_gaussian(1, r), sample_product_gaussian(1, r));
            (u1 + w * u2, u2.abs())
        },
        a,
        None,
        n,
        rng,
    )?;
    Ok(InequalityCheck::new("linear combination: |w| E|u_2|", format!("w={w} a={a}"), &est, w.abs(), 1.0))
}

/// `E(|u_2| | u_1 + w u_2 = a) rho(a) <= C (1/delta + B) |w|^(delta - 1)` with
/// `u_1 ~ varpi_2`, `u_2` standard Gaussian, `C = 1`, `delta = 1/4`.
pub fn product_weight_check<R: Rng + ?Sized>(w: f64, a: f64, n: usize, rng: &mut R) -> Result<InequalityCheck> {
    let (c, delta, b) = (1.0, 0.25, ConvenientDensity::gaussian().b());
    let est = conditional_moment_estimate(
        |r: &mut R| {
            let (u1, u2) = (sample_product_gaussian(2, r), sample_product_gaussian(1, r));
            (u1 + w * u2, u2.abs())
        },
        a,
        None,
        n,
        rng,
    )?;
    let bound = c * (1.0 / delta + b) * w.abs().powf(delta - 1.0);
    Ok(InequalityCheck::new("small weights: E|u_2|, u_1 ~ varpi_2", format!("w={w} a={a}"), &est, 1.0, bound))
}

/// Ten points each of the linear-combination, small-weight and product
/// inequalities, `n` windowed samples per point.
pub fn conditional_suite(n: usize, seed: u64) -> Result<Vec<InequalityCheck>> {
    let lin_points = [
        (0.1, 0.0),
        (0.5, 0.3),
        (1.0, 0.0),
        (1.0, 1.0),
        (2.0, -0.5),
        (3.0, 2.0),
        (0.2, -1.5),
        (5.0, 0.1),
        (1.5, -2.5),
        (0.8, 0.8),
    ];
    let prod_points = [
        (1, 0.5, 1.0),
        (1, 0.9, -0.4),
        (2, 1.0, 0.5),
        (2, 0.5, -1.0),
        (2, 0.3, 0.2),
        (3, 0.7, 0.5),
        (3, 1.0, -2.0),
        (2, 0.8, 2.0),
        (1, 0.2, 0.1),
        (3, 0.4, 1.0),
    ];
    let mut checks = Vec::new();
    for (i, &(w, a)) in lin_points.iter().enumerate() {
        checks.push(linear_combination_check(w, a, n, &mut trial_rng(seed, i as u64))?);
    }
    for (i, &(w, a)) in lin_points.iter().enumerate() {
        checks.push(product_weight_check(w, a, n, &mut trial_rng(seed, 100 + i as u64))?);
    }
    let supports = [
        Support::new(vec![0, 1]).expect("support"),
        Support::new(vec![0, 2, 3]).expect("support"),
        Support::new(vec![0, 1, 4]).expect("support"),
    ];
    for (i, &(k, x, a)) in prod_points.iter().enumerate() {
        let mut rng = trial_rng(seed, 200 + i as u64);
        let r = verify_product_lemma(k, &supports[..k], x, a, n, None, &ConvenientDensity::gaussian(), &mut rng)?;
        checks.push(r.total);
    }
    Ok(checks)
}

/// Empirical zeros in `(0, 1]` against the Rice integral.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiceReport {
    pub mean: f64,
    pub ucl: f64,
    pub rice_integral: f64,
    pub rice_converged: bool,
    pub af_bound_unit: f64,
    pub slack: f64,
    pub pass: bool,
}

impl RiceReport {
    pub fn from_summary(summary: &TrialSummary, records: &[TrialRecord]) -> Self {
        let stat = Stat::from_values(records.iter().map(|t| t.counts.unit_pos as f64));
        let b = &summary.bound_report;
        Self {
            mean: stat.mean,
            ucl: stat.ucl,
            rice_integral: b.rice_integral,
            rice_converged: b.rice_converged,
            af_bound_unit: b.af_bound_unit,
            slack: b.rice_integral - stat.ucl,
            pass: b.rice_converged && stat.ucl <= b.rice_integral,
        }
    }
}

pub fn rice_inequality_test(cfg: &ExperimentConfig) -> Result<RiceReport> {
    if cfg.distribution.kind != DensityKind::Gaussian {
        return Err(Error::config("distribution", "the Rice integrand is defined for gaussian coefficients"));
    }
    let (records, summary) = run_experiment(cfg)?;
    Ok(RiceReport::from_summary(&summary, &records))
}

/// Empirical zeros in `[0, 1]` against `A B (sum k_i)(t - 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sp1Report {
    pub distribution: String,
    pub mean: f64,
    pub ucl: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn sp1_experiment(cfg: &ExperimentConfig) -> Result<Sp1Report> {
    if !cfg.circuit.all_shifts_zero() {
        return Err(Error::config("circuit.terms", "all degree shifts must be 0"));
    }
    let (_, summary) = run_experiment(cfg)?;
    let bound = summary.bound_report.sp1_bound.expect("shift-free circuit");
    Ok(Sp1Report {
        distribution: summary.distribution.clone(),
        mean: summary.unit_closed.mean,
        ucl: summary.unit_closed.ucl,
        bound,
        pass: summary.unit_closed.ucl <= bound,
    })
}
