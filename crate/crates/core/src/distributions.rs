//! Coefficient densities and the density `varpi_k` of a product of `k`
//! independent standard Gaussians.

use std::cell::Cell;
use std::f64::consts::{E, PI};

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Largest product order with density evaluation; larger orders are sampled only.
pub const MAX_VARPI_ORDER: usize = 5;
pub const DEFAULT_VARPI_TOL: f64 = 1e-8;

/// Log-coordinate truncation `|s| <= 40`.
const LOG_WINDOW: f64 = 40.0;
/// Integrand decay (in nats) below its surrogate maximum that is discarded.
const WINDOW_NATS: f64 = 70.0;

pub fn std_normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityKind {
    Gaussian,
    Uniform,
    Laplace,
}

impl DensityKind {
    pub const ALL: [DensityKind; 3] = [DensityKind::Gaussian, DensityKind::Uniform, DensityKind::Laplace];

    pub fn name(self) -> &'static str {
        match self {
            DensityKind::Gaussian => "gaussian",
            DensityKind::Uniform => "uniform",
            DensityKind::Laplace => "laplace",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl std::fmt::Display for DensityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A symmetric coefficient density, nonincreasing on `(0, inf)`, with
/// `A = sup pdf` and `B = E|u|`.
///
/// Uniform on `[-1, 1]` is only weakly decreasing; it is admitted because
/// only nonincrease is ever used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConvenientDensity {
    pub kind: DensityKind,
}

impl ConvenientDensity {
    pub const fn new(kind: DensityKind) -> Self {
        Self { kind }
    }

    pub const fn gaussian() -> Self {
        Self::new(DensityKind::Gaussian)
    }

    pub const fn uniform() -> Self {
        Self::new(DensityKind::Uniform)
    }

    pub const fn laplace() -> Self {
        Self::new(DensityKind::Laplace)
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn pdf(&self, u: f64) -> f64 {
        match self.kind {
            DensityKind::Gaussian => std_normal_pdf(u),
            DensityKind::Uniform => {
                if u.abs() <= 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
            DensityKind::Laplace => 0.5 * (-u.abs()).exp(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            DensityKind::Gaussian => StandardNormal.sample(rng),
            DensityKind::Uniform => rng.gen_range(-1.0..=1.0),
            DensityKind::Laplace => {
                let e: f64 = Exp1.sample(rng);
                if rng.gen::<bool>() {
                    e
                } else {
                    -e
                }
            }
        }
    }

    /// `sup pdf`
    pub fn a(&self) -> f64 {
        match self.kind {
            DensityKind::Gaussian => INV_SQRT_2PI,
            DensityKind::Uniform | DensityKind::Laplace => 0.5,
        }
    }

    /// `E|u|`
    pub fn b(&self) -> f64 {
        match self.kind {
            DensityKind::Gaussian => (2.0 / PI).sqrt(),
            DensityKind::Uniform => 0.5,
            DensityKind::Laplace => 1.0,
        }
    }

    pub fn variance(&self) -> f64 {
        match self.kind {
            DensityKind::Gaussian => 1.0,
            DensityKind::Uniform => 1.0 / 3.0,
            DensityKind::Laplace => 2.0,
        }
    }
}

pub fn registry_densities() -> Vec<ConvenientDensity> {
    DensityKind::ALL.into_iter().map(ConvenientDensity::new).collect()
}

/// Law of `y_1 ... y_k` for independent standard Gaussians `y_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductGaussian {
    k: usize,
}

impl ProductGaussian {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::UnsupportedProductOrder(k));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_product_gaussian(self.k, rng)
    }

    pub fn pdf(&self, a: f64, tol: f64) -> Result<f64> {
        varpi_pdf(self.k, a, tol)
    }

    /// `E|y_1 ... y_k| = (2/pi)^(k/2)`
    pub fn mean_abs(&self) -> f64 {
        (2.0 / PI).powf(0.5 * self.k as f64)
    }
}

/// One draw of `y_1 ... y_k`. `k = 0` yields the empty product 1.
pub fn sample_product_gaussian<R: Rng + ?Sized>(k: usize, rng: &mut R) -> f64 {
    (0..k).map(|_| StandardNormal.sample(rng)).fold(1.0, |acc, y: f64| acc * y)
}

/// `varpi_k(a)` together with a flag telling whether every nested quadrature
/// met its tolerance.
pub fn varpi_pdf_checked(k: usize, a: f64, tol: f64) -> Result<(f64, bool)> {
    if k == 0 || k > MAX_VARPI_ORDER {
        return Err(Error::UnsupportedProductOrder(k));
    }
    if !a.is_finite() {
        return Err(Error::OutOfRange { name: "a", value: a });
    }
    if !(tol > 0.0) {
        return Err(Error::OutOfRange { name: "tol", value: tol });
    }
    let x = a.abs();
    if k == 1 {
        return Ok((std_normal_pdf(x), true));
    }
    if x == 0.0 {
        return Err(Error::SingularAtZero(k));
    }
    let ok = Cell::new(true);
    let v = varpi_abs(k, x, tol, &ok);
    Ok((v, ok.get()))
}

/// Density of the product of `k` standard Gaussians (`1 <= k <= 5`),
/// accurate to relative tolerance `tol`.
pub fn varpi_pdf(k: usize, a: f64, tol: f64) -> Result<f64> {
    varpi_pdf_checked(k, a, tol).map(|(v, _)| v)
}

/// `varpi_k(x) = 2 int varpi_j(x e^-s) varpi_(k-j)(e^s) ds` with `j = k / 2`,
/// the log-coordinate form of grouping the product into two sub-products.
fn varpi_abs(k: usize, x: f64, tol: f64, ok: &Cell<bool>) -> f64 {
    if k == 1 {
        return std_normal_pdf(x);
    }
    let j = k / 2;
    let r = x.ln();
    let Some((lo, hi)) = log_window(j, k - j, r) else {
        return 0.0;
    };
    let inner_tol = (tol * 1e-2).max(1e-14);
    let f = |s: f64| varpi_abs(j, x * (-s).exp(), inner_tol, ok) * varpi_abs(k - j, s.exp(), inner_tol, ok);
    let panels = ((hi - lo) / 1.5).ceil().max(1.0) as usize;
    let res = integrate(f, lo, hi, QuadOptions::relative(tol).with_panels(panels).with_max_panels(4000));
    if !res.converged {
        ok.set(false);
    }
    2.0 * res.value
}

/// Concave surrogate of `ln varpi_j(e^x) + x`, exact up to lower-order terms in
/// both tails.
fn surrogate(j: usize, x: f64) -> f64 {
    let jf = j as f64;
    x - 0.5 * jf * (2.0 * x / jf).exp()
}

/// Integration window in `s` for the split `(j, l)` at `r = ln x`, or `None`
/// when the whole window falls outside `|s| <= 40`.
fn log_window(j: usize, l: usize, r: f64) -> Option<(f64, f64)> {
    let g = |s: f64| surrogate(j, r - s) + surrogate(l, s);
    let peak = r * l as f64 / (j + l) as f64;
    let floor = g(peak) - WINDOW_NATS;
    let edge = |dir: f64| {
        let mut step = 1.0;
        while g(peak + dir * step) > floor && step < 1e3 {
            step *= 2.0;
        }
        let (mut inside, mut outside) = (0.0, step);
        for _ in 0..60 {
            let mid = 0.5 * (inside + outside);
            if g(peak + dir * mid) > floor {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        peak + dir * outside
    };
    let lo = edge(-1.0).max(-LOG_WINDOW);
    let hi = edge(1.0).min(LOG_WINDOW);
    (lo < hi).then_some((lo, hi))
}

/// Total mass `int varpi_k` over the real line, computed as
/// `2 int varpi_k(e^r) e^r dr`.
pub fn varpi_total_mass(k: usize, tol: f64) -> Result<(f64, bool)> {
    if k == 0 || k > MAX_VARPI_ORDER {
        return Err(Error::UnsupportedProductOrder(k));
    }
    if k == 1 {
        let res = integrate(std_normal_pdf, -40.0, 40.0, QuadOptions::relative(tol).with_panels(80));
        return Ok((res.value, res.converged));
    }
    let kf = k as f64;
    let hi = 0.5 * kf * (2.0 * WINDOW_NATS / kf).ln();
    let ok = Cell::new(true);
    let f = |r: f64| {
        let x = r.exp();
        varpi_abs(k, x, tol, &ok) * x
    };
    let res = integrate(f, -LOG_WINDOW, hi, QuadOptions::relative(tol).with_panels(40));
    Ok((2.0 * res.value, res.converged && ok.get()))
}

/// Density at `a` of `z_1 ... z_k` with independent `z_i ~ N(0, sigma_i^2)`:
/// `varpi_k(|a| / prod sigma) / prod sigma`.
pub fn scaled_product_pdf(sigmas: &[f64], a: f64) -> Result<f64> {
    if sigmas.is_empty() || sigmas.len() > MAX_VARPI_ORDER {
        return Err(Error::UnsupportedProductOrder(sigmas.len()));
    }
    if let Some(&s) = sigmas.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
        return Err(Error::OutOfRange { name: "sigma", value: s });
    }
    let scale: f64 = sigmas.iter().product();
    Ok(varpi_pdf(sigmas.len(), a.abs() / scale, DEFAULT_VARPI_TOL)? / scale)
}

/// `E|y|^(-delta)` for a standard Gaussian `y`:
/// `pi^(-1/2) 2^(-delta/2) Gamma((1 - delta)/2)`.
pub fn neg_moment_gaussian(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::OutOfRange { name: "delta", value: delta });
    }
    Ok(PI.sqrt().recip() * 2f64.powf(-0.5 * delta) * statrs::function::gamma::gamma(0.5 * (1.0 - delta)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum D2CheckKind {
    /// `varpi_k(-a) = varpi_k(a)`
    Symmetry,
    /// `varpi_k(a) >= varpi_k(next)` for consecutive positive grid points
    Monotone { next: f64 },
    /// `varpi_2(a) <= |a|^(delta - 1)`
    PowerBoundK2 { delta: f64 },
    /// `varpi_k(a) <= e |a|^(1/(2k) - 1)`
    PowerBound,
}

/// One inequality `lhs <= rhs` (for monotonicity `varpi(next) <= varpi(a)`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct D2Check {
    #[serde(flatten)]
    pub kind: D2CheckKind,
    pub a: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct D2Report {
    pub k: usize,
    pub checks: Vec<D2Check>,
}

impl D2Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass)
    }

    pub fn count(&self, status: CheckStatus) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &D2Check> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

fn check(kind: D2CheckKind, a: f64, lhs: f64, rhs: f64, tol: f64, converged: bool) -> D2Check {
    let margin = rhs - lhs;
    let status = if !converged {
        CheckStatus::Inconclusive
    } else if margin >= 0.0 {
        CheckStatus::Pass
    } else if -margin <= 10.0 * tol * lhs.abs().max(rhs.abs()) {
        CheckStatus::Inconclusive
    } else {
        CheckStatus::Fail
    };
    D2Check {
        kind,
        a,
        lhs,
        rhs,
        margin,
        status,
    }
}

/// Checks the growth and monotonicity properties of `varpi_k` on a grid of
/// nonzero points.
pub fn verify_d2bounds(k: usize, grid: &[f64]) -> Result<D2Report> {
    if !(2..=MAX_VARPI_ORDER).contains(&k) {
        return Err(Error::UnsupportedProductOrder(k));
    }
    if let Some(&a) = grid.iter().find(|a| **a == 0.0 || !a.is_finite()) {
        return Err(Error::OutOfRange { name: "a", value: a });
    }
    let tol = DEFAULT_VARPI_TOL;
    let mut values = Vec::with_capacity(grid.len());
    let mut checks = Vec::new();
    for &a in grid {
        let (v, ok) = varpi_pdf_checked(k, a, tol)?;
        let (vm, okm) = varpi_pdf_checked(k, -a, tol)?;
        checks.push(check(D2CheckKind::Symmetry, a, (vm - v).abs(), 0.0, 0.0, ok && okm));
        if k == 2 {
            for delta in [0.1, 0.25, 0.5] {
                let rhs = a.abs().powf(delta - 1.0);
                checks.push(check(D2CheckKind::PowerBoundK2 { delta }, a, v, rhs, tol, ok));
            }
        }
        let rhs = E * a.abs().powf(0.5 / k as f64 - 1.0);
        checks.push(check(D2CheckKind::PowerBound, a, v, rhs, tol, ok));
        values.push((a, v, ok));
    }
    let mut positive: Vec<_> = values.iter().filter(|(a, _, _)| *a > 0.0).copied().collect();
    positive.sort_by(|x, y| x.0.total_cmp(&y.0));
    positive.dedup_by(|x, y| x.0 == y.0);
    for w in positive.windows(2) {
        let (a, va, oka) = w[0];
        let (b, vb, okb) = w[1];
        checks.push(check(D2CheckKind::Monotone { next: b }, a, vb, va, tol, oka && okb));
    }
    Ok(D2Report { k, checks })
}

/// One numerical property of a registry density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvenientCheck {
    pub density: String,
    pub check: String,
    pub value: f64,
    pub target: f64,
    pub pass: bool,
}

/// Checks mass, symmetry, nonincrease on `(0, inf)`, the constants `A` and
/// `B`, and `|u| pdf(u) <= 1/2` on a grid.
pub fn verify_convenient(d: &ConvenientDensity) -> Vec<ConvenientCheck> {
    let name = d.name().to_string();
    let check = |c: &str, value: f64, target: f64, pass: bool| ConvenientCheck {
        density: name.clone(),
        check: c.to_string(),
        value,
        target,
        pass,
    };
    let opts = QuadOptions::absolute(1e-13).with_panels(80);
    // the uniform density jumps at 1, so split there
    let half_mass = integrate(|u| d.pdf(u), 0.0, 1.0, opts).value + integrate(|u| d.pdf(u), 1.0, 60.0, opts).value;
    let first = integrate(|u| u * d.pdf(u), 0.0, 1.0, opts).value + integrate(|u| u * d.pdf(u), 1.0, 60.0, opts).value;
    let grid: Vec<f64> = (0..=20_000).map(|i| i as f64 * 1e-3).collect();
    let asym = grid.iter().map(|&u| (d.pdf(u) - d.pdf(-u)).abs()).fold(0.0, f64::max);
    let rise = grid.windows(2).map(|w| d.pdf(w[1]) - d.pdf(w[0])).fold(f64::NEG_INFINITY, f64::max);
    let sup = grid.iter().map(|&u| d.pdf(u)).fold(0.0, f64::max);
    let lemma = grid.iter().map(|&u| u * d.pdf(u)).fold(0.0, f64::max);
    vec![
        check("mass", 2.0 * half_mass, 1.0, (2.0 * half_mass - 1.0).abs() < 1e-9),
        check("symmetry", asym, 0.0, asym == 0.0),
        check("nonincreasing", rise.max(0.0), 0.0, rise <= 0.0),
        check("sup pdf = A", sup, d.a(), (sup - d.a()).abs() <= 1e-12 * d.a()),
        check("E|u| = B", 2.0 * first, d.b(), (2.0 * first - d.b()).abs() < 1e-9),
        check("|u| pdf(u) <= 1/2", lemma, 0.5, lemma <= 0.5),
    ]
}

/// `E|y|^(-delta) <= 1 + 2 delta` on a grid of `delta` in `(0, 1/2]`.
pub fn verify_neg_moment() -> Vec<ConvenientCheck> {
    (1..=10)
        .map(|i| {
            let delta = 0.05 * i as f64;
            let v = neg_moment_gaussian(delta).expect("delta in range");
            ConvenientCheck {
                density: "gaussian".into(),
                check: format!("E|y|^-{delta:.2} <= 1 + 2 delta"),
                value: v,
                target: 1.0 + 2.0 * delta,
                pass: v <= 1.0 + 2.0 * delta,
            }
        })
        .collect()
}

/// `n` points log-spaced on `[lo, hi]`, `lo, hi > 0`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (l, h) = (lo.ln(), hi.ln());
            (0..n).map(|i| (l + (h - l) * i as f64 / (n - 1) as f64).exp()).collect()
        }
    }
}
