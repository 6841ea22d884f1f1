//! Deterministic bounds on the expected number of real zeros.

use std::cell::Cell;
use std::f64::consts::{E, PI};

use serde::Serialize;

use crate::distributions::ConvenientDensity;
use crate::error::{Error, Result};
use crate::func::Differentiable;
use crate::polynomials::{beta_prime, Circuit};
use crate::quadrature::{integrate, QuadOptions};
use crate::realroots::Interval;

pub const DEFAULT_BOUND_TOL: f64 = 1e-6;

fn bounded(interval: &Interval) -> Result<(f64, f64)> {
    interval
        .bounds()
        .ok_or_else(|| Error::InvalidInterval("bound integrals need a bounded interval".into()))
}

fn quad_opts(tol: f64) -> QuadOptions {
    QuadOptions::absolute(tol).with_panels(16).with_max_panels(20_000)
}

/// Logarithmic variation `int |q'| / q` of a positive function.
pub fn lv<F: Differentiable + ?Sized>(q: &F, interval: &Interval, tol: f64) -> Result<f64> {
    let (a, b) = bounded(interval)?;
    let bad = Cell::new(None);
    let res = integrate(
        |x| {
            let (v, d) = q.eval_d(x);
            if !(v > 0.0) {
                bad.set(Some(x));
                return 0.0;
            }
            (d / v).abs()
        },
        a,
        b,
        quad_opts(tol),
    );
    if let Some(x) = bad.get() {
        return Err(Error::NonPositive(x));
    }
    Ok(res.value)
}

/// `LV(q_i)` on `[0, 1]` for every term of the circuit.
pub fn circuit_lv(circuit: &Circuit, tol: f64) -> Vec<f64> {
    (0..circuit.m())
        .map(|i| {
            if i == 0 {
                return 0.0;
            }
            integrate(|x| circuit.weights(x)[i].q_logderiv.abs(), 0.0, 1.0, quad_opts(tol)).value
        })
        .collect()
}

/// `2 LV(q) + k t + 1/delta`, the bound on
/// `int_0^1 |w'| / max(w, w^(1 - delta))` for `w = q x^d`, `d >= 1`.
pub fn pronew_integral_bound(lv_q: f64, k: usize, t: usize, delta: f64) -> f64 {
    2.0 * lv_q + (k * t) as f64 + 1.0 / delta
}

/// `A B (k_1 + ... + k_m)(t - 1)`, the bound on the expected number of zeros
/// in `[0, 1]` for circuits without degree shifts.
pub fn sp1_bound(a: f64, b: f64, ks: &[usize], t: usize) -> f64 {
    let k: usize = ks.iter().sum();
    a * b * k as f64 * t.saturating_sub(1) as f64
}

/// `A B sum_(i >= 2) int |w_i'|` over the interval, for a weight family whose
/// first member is constant. With `monotone` set, the integrals are replaced
/// by the endpoint differences `|w_i(x_1) - w_i(x_0)|`.
pub fn varbound_linear<F: Differentiable>(
    a: f64,
    b: f64,
    family: &[F],
    interval: &Interval,
    monotone: bool,
    tol: f64,
) -> Result<f64> {
    let (x0, x1) = bounded(interval)?;
    if let Some(w1) = family.first() {
        for x in [x0, 0.5 * (x0 + x1), x1] {
            if w1.eval_d(x).1 != 0.0 {
                return Err(Error::OutOfRange {
                    name: "first weight derivative",
                    value: w1.eval_d(x).1,
                });
            }
        }
    }
    let total: f64 = family
        .iter()
        .skip(1)
        .map(|w| {
            if monotone {
                (w.eval_d(x1).0 - w.eval_d(x0).0).abs()
            } else {
                integrate(|x| w.eval_d(x).1.abs(), x0, x1, quad_opts(tol)).value
            }
        })
        .sum();
    Ok(a * b * total)
}

/// `delta = 1 / (2 k_1)`
pub fn rice_delta(circuit: &Circuit) -> f64 {
    0.5 / circuit.terms()[0].k() as f64
}

/// `|w'| / max(w, w^(1 - delta))`, written as `|w'/w| min(1, w^delta)` with
/// `w'/w = q'/q + d/x` so that it stays finite as `w -> 0`.
fn damped_log_derivative(q: f64, q_logderiv: f64, d: u32, x: f64, delta: f64) -> f64 {
    let (log_w, ratio) = if d == 0 {
        (q.ln(), q_logderiv)
    } else {
        (q.ln() + d as f64 * x.ln(), q_logderiv + d as f64 / x)
    };
    ratio.abs() * (delta * log_w).exp().min(1.0)
}

/// The Rice integrand
/// `g(x) = (2 pi)^(-1/2) sum_ij beta_ij'(x) + sum_i |q_i'/q_i|
///        + e (2 k_1 + 1) sum_(i >= 2) |w_i'| / max(w_i, w_i^(1 - 1/(2 k_1)))`
/// for standard Gaussian coefficients.
pub fn rice_integrand_g(circuit: &Circuit, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutsideDomain(x));
    }
    if x == 0.0 && !circuit.all_shifts_zero() {
        return Err(Error::OutsideDomain(x));
    }
    Ok(g_unchecked(circuit, x))
}

fn g_unchecked(circuit: &Circuit, x: f64) -> f64 {
    let k1 = circuit.terms()[0].k();
    let delta = 0.5 / k1 as f64;
    let weights = circuit.weights(x);
    let beta_sum: f64 = circuit
        .terms()
        .iter()
        .flat_map(|t| t.factors.iter())
        .map(|s| beta_prime(s, x))
        .sum();
    let lq: f64 = weights.iter().map(|w| w.q_logderiv.abs()).sum();
    let damped: f64 = circuit
        .terms()
        .iter()
        .zip(&weights)
        .skip(1)
        .map(|(t, w)| damped_log_derivative(w.q, w.q_logderiv, t.degree_shift, x, delta))
        .sum();
    beta_sum / (2.0 * PI).sqrt() + lq + E * (2 * k1 + 1) as f64 * damped
}

/// Outcome of an adaptive integration that may fall short of its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    /// `false` marks the value as inconclusive.
    pub converged: bool,
}

/// `int_0^1 f(x) dx` after `x = s^p`, which turns the `x^(d delta - 1)`
/// singularity at 0 into a bounded integrand for `p = 1 / (d delta)`.
fn integrate_unit_substituted<F: Fn(f64) -> f64>(f: F, p: f64, tol: f64) -> Integral {
    let res = if p == 1.0 {
        integrate(f, 0.0, 1.0, quad_opts(tol))
    } else {
        integrate(
            |s: f64| {
                let x = s.powf(p);
                if x <= 0.0 {
                    return 0.0;
                }
                f(x) * p * x / s
            },
            0.0,
            1.0,
            quad_opts(tol),
        )
    };
    Integral {
        value: res.value,
        abs_error: res.abs_error,
        converged: res.converged,
    }
}

/// `int_0^1 g` to absolute tolerance `tol`.
pub fn integrate_rice(circuit: &Circuit, tol: f64) -> Integral {
    let delta = rice_delta(circuit);
    let p = circuit
        .shifts()
        .into_iter()
        .filter(|&d| d > 0)
        .min()
        .map_or(1.0, |d| 1.0 / (d as f64 * delta));
    integrate_unit_substituted(|x| g_unchecked(circuit, x), p, tol)
}

/// `int_0^1 |w_i'| / max(w_i, w_i^(1 - delta))` for term `i`.
pub fn weight_integral(circuit: &Circuit, i: usize, delta: f64, tol: f64) -> Integral {
    let d = circuit.terms()[i].degree_shift;
    let p = if d == 0 { 1.0 } else { 1.0 / (d as f64 * delta) };
    integrate_unit_substituted(
        |x| {
            let w = circuit.weights(x)[i];
            damped_log_derivative(w.q, w.q_logderiv, d, x, delta)
        },
        p,
        tol,
    )
}

/// Closed-form bound on the expected number of zeros in `[0, 1]`:
/// `(2 pi)^(-1/2) K (t - 1) + K ln t + e (2 k_1 + 1) ((K - k_1)(2 ln t + t) + (m - 1) 2 k_1)`
/// with `K = k_1 + ... + k_m` and `ks[0] = k_1`.
pub fn af_closed_form(ks: &[usize], t: usize) -> f64 {
    let Some(&k1) = ks.first() else {
        return 0.0;
    };
    let m = ks.len();
    let total: usize = ks.iter().sum();
    let ln_t = (t.max(1) as f64).ln();
    let tt = t as f64;
    total as f64 * (tt - 1.0).max(0.0) / (2.0 * PI).sqrt()
        + total as f64 * ln_t
        + E * (2 * k1 + 1) as f64 * ((total - k1) as f64 * (2.0 * ln_t + tt) + ((m - 1) * 2 * k1) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub m: usize,
    pub ks: Vec<usize>,
    pub t: usize,
    pub shifts: Vec<u32>,
    /// Index, in the input term order, of the term used as term 1.
    pub pivot: usize,
    pub density: String,
    /// `A B (sum k_i)(t - 1)`; only defined when every degree shift is 0.
    pub sp1_bound: Option<f64>,
    pub af_bound_unit: f64,
    /// Bound for the whole real line, four times `af_bound_unit`.
    pub total_bound: f64,
    pub rice_integral: f64,
    pub rice_abs_error: f64,
    pub rice_converged: bool,
    /// Numerical `LV(q_i)` on `[0, 1]`.
    pub lv_values: Vec<f64>,
    /// `k_i ln t`, the per-term bound used in the closed form.
    pub lv_bounds: Vec<f64>,
    /// `(k_i + k_1) ln t / 2`, counting every alpha factor of `q_i`.
    pub lv_factor_bounds: Vec<f64>,
    /// Numerical `int_0^1 |w_i'| / max(w_i, w_i^(1 - delta))`; `None` for term 1.
    pub weight_integrals: Vec<Option<f64>>,
    /// `2 LV(q_i) + k_i t + 1/delta`; `None` for term 1 and for shift 0,
    /// where the splitting point `exp(-k t / d)` is undefined.
    pub weight_integral_bounds: Vec<Option<f64>>,
    pub notes: Vec<String>,
}

/// Full bound report for the circuit in its given term order, with the
/// Rice quantities computed for standard Gaussian coefficients and the
/// shift-free bound for `density`.
pub fn bound_report(circuit: &Circuit, density: &ConvenientDensity, tol: f64) -> BoundReport {
    report_with_pivot(circuit, 0, density, tol)
}

fn report_with_pivot(circuit: &Circuit, pivot: usize, density: &ConvenientDensity, tol: f64) -> BoundReport {
    let ks = circuit.ks();
    let t = circuit.t();
    let k1 = ks[0];
    let ln_t = (t as f64).ln();
    let delta = rice_delta(circuit);
    let af = af_closed_form(&ks, t);
    let rice = integrate_rice(circuit, tol);
    let lv_values = circuit_lv(circuit, tol);
    let lv_bounds: Vec<f64> = ks.iter().map(|&k| k as f64 * ln_t).collect();
    let lv_factor_bounds: Vec<f64> = ks.iter().map(|&k| 0.5 * (k + k1) as f64 * ln_t).collect();
    let mut weight_integrals = vec![None];
    let mut weight_integral_bounds = vec![None];
    for i in 1..circuit.m() {
        weight_integrals.push(Some(weight_integral(circuit, i, delta, tol).value));
        let d = circuit.terms()[i].degree_shift;
        weight_integral_bounds.push((d > 0).then(|| pronew_integral_bound(lv_values[i], ks[i], t, delta)));
    }
    let mut notes = Vec::new();
    if density.kind != crate::distributions::DensityKind::Gaussian {
        notes.push(format!(
            "af_bound_unit and rice_integral assume standard Gaussian coefficients, not {}",
            density.name()
        ));
    }
    if ks.iter().any(|&k| k < k1) {
        notes.push("k_1 exceeds some k_i: the closed form uses LV(q_i) <= k_i ln t, smaller than (k_i + k_1) ln t / 2".into());
    }
    if circuit.m() > 1 && circuit.shifts()[1..].contains(&0) {
        notes.push("analytic weight-integral bound not applicable to terms with shift 0".into());
    }
    if !rice.converged {
        notes.push(format!("rice integral inconclusive, error estimate {:e}", rice.abs_error));
    }
    BoundReport {
        m: circuit.m(),
        ks: ks.clone(),
        t,
        shifts: circuit.shifts(),
        pivot,
        density: density.name().to_string(),
        sp1_bound: circuit.all_shifts_zero().then(|| sp1_bound(density.a(), density.b(), &ks, t)),
        af_bound_unit: af,
        total_bound: 4.0 * af,
        rice_integral: rice.value,
        rice_abs_error: rice.abs_error,
        rice_converged: rice.converged,
        lv_values,
        lv_bounds,
        lv_factor_bounds,
        weight_integrals,
        weight_integral_bounds,
        notes,
    }
}

/// Gaussian bound report for the circuit as listed.
pub fn af_bound(circuit: &Circuit, tol: f64) -> BoundReport {
    bound_report(circuit, &ConvenientDensity::gaussian(), tol)
}

/// Re-pivots among the shift-0 terms and returns the report with the smallest
/// `af_bound_unit` (ties broken by the Rice integral, then by term order).
pub fn min_pivot_report(circuit: &Circuit, density: &ConvenientDensity, tol: f64) -> Result<BoundReport> {
    let mut best: Option<BoundReport> = None;
    for i in circuit.pivot_candidates() {
        let c = circuit.with_pivot(i)?;
        let r = report_with_pivot(&c, i, density, tol);
        let better = best.as_ref().is_none_or(|b| {
            (r.af_bound_unit, r.rice_integral) < (b.af_bound_unit, b.rice_integral)
        });
        if better {
            best = Some(r);
        }
    }
    best.ok_or(Error::EmptyCircuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{DenseF64, FnD};
    use crate::polynomials::{alpha, ProductTerm, Support};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sup(v: &[u32]) -> Support {
        Support::new(v.to_vec()).unwrap()
    }

    fn circuit(terms: &[(&[&[u32]], u32)]) -> Circuit {
        Circuit::new(
            terms
                .iter()
                .map(|(f, d)| ProductTerm::new(f.iter().map(|s| sup(s)).collect(), *d))
                .collect(),
        )
        .unwrap()
    }

    fn unit() -> Interval {
        Interval::closed(0.0, 1.0).unwrap()
    }

    fn random_support(rng: &mut ChaCha8Rng, t: usize, max_exp: u32) -> Support {
        let mut e = vec![0u32];
        while e.len() < t {
            let x = rng.gen_range(1..=max_exp);
            if !e.contains(&x) {
                e.push(x);
            }
        }
        e.sort_unstable();
        Support::new(e).unwrap()
    }

    fn random_circuit(rng: &mut ChaCha8Rng) -> Circuit {
        let m = rng.gen_range(1..=3);
        let terms = (0..m)
            .map(|i| {
                let k = rng.gen_range(1..=3);
                let factors: Vec<Support> = (0..k)
                    .map(|_| {
                        let t = rng.gen_range(1..=4);
                        random_support(rng, t, 6)
                    })
                    .collect();
                let d = if i == 0 { 0 } else { rng.gen_range(0..=4) };
                ProductTerm::new(factors, d)
            })
            .collect();
        Circuit::new(terms).unwrap()
    }

    fn random_positive_poly(rng: &mut ChaCha8Rng) -> DenseF64 {
        // 1 + sum c_j x^j with |c_j| small keeps it positive on [0, 1]
        let n = rng.gen_range(2..6);
        let mut c = vec![1.0];
        c.extend((0..n).map(|_| rng.gen_range(-0.9..0.9) / n as f64));
        DenseF64(c)
    }

    #[test]
    fn lv_of_monotone_alpha() {
        let q = FnD(|x: f64| (1.0 + x * x, 2.0 * x));
        assert!((lv(&q, &unit(), 1e-9).unwrap() - 2f64.ln()).abs() < 1e-9);
        for t in 1..=6 {
            let s = Support::dense(t);
            let q = FnD(|x: f64| (alpha(&s, x), crate::polynomials::alpha_prime(&s, x)));
            assert!((lv(&q, &unit(), 1e-9).unwrap() - (t as f64).ln()).abs() < 1e-8);
        }
    }

    #[test]
    fn lv_nonmonotone_ratio_against_grid() {
        let q = FnD(|x: f64| {
            let (n, d) = (1.0 + x * x, 1.0 + x.powi(4));
            (n / d, (2.0 * x * d - n * 4.0 * x.powi(3)) / (d * d))
        });
        let n = 1_000_000;
        let h = 1.0 / n as f64;
        let f = |x: f64| {
            let (v, d) = q.eval_d(x);
            (d / v).abs()
        };
        let trap: f64 = (0..n).map(|i| 0.5 * h * (f(i as f64 * h) + f((i + 1) as f64 * h))).sum();
        assert!((lv(&q, &unit(), 1e-9).unwrap() - trap).abs() < 1e-6);
    }

    #[test]
    fn lv_rejects_nonpositive() {
        let q = FnD(|x: f64| (x - 0.5, 1.0));
        assert!(matches!(lv(&q, &unit(), 1e-6), Err(Error::NonPositive(_))));
    }

    #[test]
    fn lv_calculus_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p1 = random_positive_poly(&mut rng);
            let p2 = random_positive_poly(&mut rng);
            let prod = FnD(|x: f64| {
                let ((a, da), (b, db)) = (p1.eval_d(x), p2.eval_d(x));
                (a * b, da * b + a * db)
            });
            let (l1, l2) = (lv(&p1, &unit(), 1e-9).unwrap(), lv(&p2, &unit(), 1e-9).unwrap());
            assert!(lv(&prod, &unit(), 1e-9).unwrap() <= l1 + l2 + 1e-6);
            for r in [-2.0, -0.5, 0.5, 3.0] {
                let pow = FnD(|x: f64| {
                    let (a, da) = p1.eval_d(x);
                    (a.powf(r), r * a.powf(r - 1.0) * da)
                });
                assert!((lv(&pow, &unit(), 1e-9).unwrap() - r.abs() * l1).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(pronew_integral_bound(0.0, 1, 1, 1.0), 2.0);
        let g = ConvenientDensity::gaussian();
        assert_relative_eq!(g.a() * g.b(), 1.0 / PI, max_relative = 1e-15);
        assert_relative_eq!(sp1_bound(g.a(), g.b(), &[2, 2], 3), 8.0 / PI, max_relative = 1e-15);
        assert_eq!(sp1_bound(0.5, 0.5, &[1], 4), 0.75);
        assert_eq!(sp1_bound(1.0, 1.0, &[3, 1], 1), 0.0);
        assert_eq!(af_closed_form(&[1], 1), 0.0);
    }

    #[test]
    fn af_term_by_term() {
        let (k, m, t) = ([2usize, 2], 2.0, 3.0f64);
        let first = 4.0 * (t - 1.0) / (2.0 * PI).sqrt();
        let second = 4.0 * t.ln();
        let third = E * 5.0 * (2.0 * (2.0 * t.ln() + t) + (m - 1.0) * 4.0);
        let af = af_closed_form(&k, 3);
        assert_relative_eq!(af, first + second + third, max_relative = 1e-14);
        assert!((af - 203.23).abs() < 0.01, "{af}");
        let c = circuit(&[(&[&[0, 1, 2], &[0, 1, 2]], 0), (&[&[0, 1, 2], &[0, 1, 2]], 1)]);
        let r = af_bound(&c, 1e-6);
        assert_eq!(r.total_bound, 4.0 * r.af_bound_unit);
        assert!((r.total_bound - 812.9).abs() < 0.05);
    }

    #[test]
    fn closed_forms_are_monotone() {
        for t in 1..8 {
            for k1 in 1..4 {
                for k2 in 1..4 {
                    let ks = [k1, k2];
                    let af = af_closed_form(&ks, t);
                    assert!(af_closed_form(&ks, t + 1) >= af);
                    assert!(af_closed_form(&[k1 + 1, k2], t) >= af);
                    assert!(af_closed_form(&[k1, k2 + 1], t) >= af);
                    let sp = sp1_bound(0.5, 1.0, &ks, t);
                    assert!(sp1_bound(0.5, 1.0, &ks, t + 1) >= sp);
                    assert!(sp1_bound(0.5, 1.0, &[k1 + 1, k2], t) >= sp);
                }
            }
        }
    }

    #[test]
    fn af_scales_linearly_in_m() {
        let t = 4;
        let af = |m: usize| af_closed_form(&vec![2; m], t);
        for m in 2..10 {
            let second = af(m + 2) - 2.0 * af(m + 1) + af(m);
            assert!(second.abs() < 1e-9 * af(m));
        }
        let r = af(100) / af(50);
        assert!((r - 2.0).abs() < 0.05, "{r}");
    }

    #[test]
    fn varbound_examples() {
        let family: Vec<FnD<Box<dyn Fn(f64) -> (f64, f64)>>> = (0..4)
            .map(|d: i32| {
                let f: Box<dyn Fn(f64) -> (f64, f64)> = Box::new(move |x: f64| {
                    (x.powi(d), if d == 0 { 0.0 } else { d as f64 * x.powi(d - 1) })
                });
                FnD(f)
            })
            .collect();
        let v = varbound_linear(0.3, 0.7, &family, &unit(), false, 1e-9).unwrap();
        assert!((v - 0.21 * 3.0).abs() < 1e-9);
        let v = varbound_linear(0.3, 0.7, &family, &unit(), true, 1e-9).unwrap();
        assert!((v - 0.21 * 3.0).abs() < 1e-15);
        let sq = [DenseF64(vec![1.0]), DenseF64(vec![0.0, 0.0, 1.0])];
        assert!((varbound_linear(1.0, 1.0, &sq, &unit(), false, 1e-9).unwrap() - 1.0).abs() < 1e-9);
        let bad = [DenseF64(vec![0.0, 1.0])];
        assert!(varbound_linear(1.0, 1.0, &bad, &unit(), false, 1e-9).is_err());
    }

    #[test]
    fn varbound_against_grid_total_variation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let mut family = vec![DenseF64(vec![1.0])];
            for _ in 0..3 {
                family.push(DenseF64((0..5).map(|_| rng.gen_range(-1.0..1.0)).collect()));
            }
            let v = varbound_linear(1.0, 1.0, &family, &unit(), false, 1e-10).unwrap();
            let n = 200_000;
            let tv: f64 = family[1..]
                .iter()
                .map(|w| {
                    (0..n)
                        .map(|i| (w.eval_d((i + 1) as f64 / n as f64).0 - w.eval_d(i as f64 / n as f64).0).abs())
                        .sum::<f64>()
                })
                .sum();
            assert!((v - tv).abs() < 1e-6, "{v} {tv}");
        }
    }

    #[test]
    fn g_single_term_reduces_to_beta() {
        let c = circuit(&[(&[&[0, 1, 4], &[0, 2]], 0)]);
        for x in [0.1, 0.5, 0.9] {
            let expect = (beta_prime(&sup(&[0, 1, 4]), x) + beta_prime(&sup(&[0, 2]), x)) / (2.0 * PI).sqrt();
            assert_relative_eq!(rice_integrand_g(&c, x).unwrap(), expect, max_relative = 1e-14);
        }
    }

    #[test]
    fn g_constant_supports_hand_reduction() {
        let c = circuit(&[(&[&[0], &[0]], 0), (&[&[0]], 2), (&[&[0], &[0], &[0]], 3)]);
        let delta = 0.25;
        for x in [0.05f64, 0.3, 0.77] {
            let expect = E * 5.0
                * [2.0f64, 3.0]
                    .iter()
                    .map(|&d| d * x.powf(d - 1.0) / x.powf(d).max(x.powf(d * (1.0 - delta))))
                    .sum::<f64>();
            assert_relative_eq!(rice_integrand_g(&c, x).unwrap(), expect, max_relative = 1e-12);
        }
    }

    /// Direct transcription of the displayed integrand, with `q_i` formed as a
    /// square root of an alpha ratio and derivatives by central differences.
    fn g_oracle(c: &Circuit, x: f64) -> f64 {
        let terms = c.terms();
        let k1 = terms[0].k() as f64;
        let delta = 1.0 / (2.0 * k1);
        let prod_alpha = |i: usize, x: f64| terms[i].factors.iter().map(|s| alpha(s, x)).product::<f64>();
        let q = |i: usize, x: f64| (prod_alpha(i, x) / prod_alpha(0, x)).sqrt();
        let w = |i: usize, x: f64| q(i, x) * x.powi(terms[i].degree_shift as i32);
        let h = 1e-6;
        let mut g = 0.0;
        for t in terms {
            for s in &t.factors {
                let beta = |x: f64| s.exponents().iter().map(|&e| x.powi(e as i32)).sum::<f64>();
                g += (beta(x + h) - beta(x - h)) / (2.0 * h) / (2.0 * PI).sqrt();
            }
        }
        for i in 0..terms.len() {
            g += ((q(i, x + h) - q(i, x - h)) / (2.0 * h) / q(i, x)).abs();
        }
        for i in 1..terms.len() {
            let wi = w(i, x);
            let dw = (w(i, x + h) - w(i, x - h)) / (2.0 * h);
            g += E * (2.0 * k1 + 1.0) * dw.abs() / wi.max(wi.powf(1.0 - delta));
        }
        g
    }

    #[test]
    fn g_matches_independent_implementation() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let c = random_circuit(&mut rng);
            for x in [0.5, 0.2, 0.85] {
                let g = rice_integrand_g(&c, x).unwrap();
                assert!(g >= 0.0);
                assert_relative_eq!(g, g_oracle(&c, x), max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn g_domain() {
        let c = circuit(&[(&[&[0, 1]], 0), (&[&[0]], 1)]);
        assert!(rice_integrand_g(&c, 0.0).is_err());
        assert!(rice_integrand_g(&c, 1.5).is_err());
        let c = circuit(&[(&[&[0, 1]], 0)]);
        assert!(rice_integrand_g(&c, 0.0).is_ok());
    }

    #[test]
    fn rice_integral_hand_oracles() {
        let c = circuit(&[(&[&[0]], 0), (&[&[0]], 1)]);
        let r = integrate_rice(&c, 1e-9);
        assert!(r.converged);
        assert!((r.value - 6.0 * E).abs() < 1e-7, "{}", r.value);
        let c = circuit(&[(&[&[0, 1]], 0)]);
        assert!((integrate_rice(&c, 1e-9).value - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn rice_integral_below_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..40 {
            let c = random_circuit(&mut rng);
            let r = af_bound(&c, 1e-6);
            assert!(r.rice_converged);
            assert!(r.rice_integral <= r.af_bound_unit + 1e-4, "{:?}", r);
            for (i, (v, b)) in r.lv_values.iter().zip(&r.lv_factor_bounds).enumerate() {
                assert!(*v <= b + 1e-6, "term {i}: {v} > {b}");
            }
            for (wi, bi) in r.weight_integrals.iter().zip(&r.weight_integral_bounds) {
                if let (Some(w), Some(b)) = (wi, bi) {
                    assert!(*w <= b + 1e-6);
                }
            }
        }
    }

    #[test]
    fn epsilon_split_pieces() {
        // w = q x^d with q = sqrt(alpha_{0,1,3} alpha_{0,2} / alpha_{0,4}), k = 2 numerator factors
        let c = circuit(&[(&[&[0, 4]], 0), (&[&[0, 1, 3], &[0, 2]], 2)]);
        let (k, t, d) = (2.0f64, 3.0f64, 2.0f64);
        let delta = 0.5;
        let eps = (-k * t / d).exp();
        let lvq = circuit_lv(&c, 1e-10)[1];
        let near = |x: f64| {
            let w = c.weights(x)[1];
            w.w_prime.abs() / w.w.powf(1.0 - delta)
        };
        let far = |x: f64| {
            let w = c.weights(x)[1];
            (w.w_prime / w.w).abs()
        };
        let left = integrate(|s: f64| near(s * s) * 2.0 * s, 0.0, eps.sqrt(), QuadOptions::absolute(1e-10)).value;
        let right = integrate(far, eps, 1.0, QuadOptions::absolute(1e-10).with_panels(20)).value;
        assert!(left <= lvq + 1.0 / delta);
        assert!(right <= lvq + k * t + 1e-9);
        let whole = weight_integral(&c, 1, delta, 1e-10).value;
        assert!(whole <= left + right + 1e-8);
        assert!(whole <= pronew_integral_bound(lvq, 2, 3, delta));
        assert!(lvq <= 0.5 * 3.0 * t.ln());
    }

    #[test]
    fn pivot_minimum() {
        let c = circuit(&[(&[&[0, 1], &[0, 1], &[0, 1]], 0), (&[&[0, 2]], 0), (&[&[0, 1]], 2)]);
        let r = min_pivot_report(&c, &ConvenientDensity::gaussian(), 1e-6).unwrap();
        assert_eq!(r.pivot, 1);
        assert!(r.af_bound_unit <= af_bound(&c, 1e-6).af_bound_unit);
        assert_eq!(r.ks[0], 1);
    }

    #[test]
    fn sp1_only_without_shifts() {
        let c = circuit(&[(&[&[0, 1]], 0), (&[&[0, 2]], 1)]);
        assert!(af_bound(&c, 1e-6).sp1_bound.is_none());
        let c = circuit(&[(&[&[0, 1]], 0), (&[&[0, 2]], 0)]);
        let r = bound_report(&c, &ConvenientDensity::laplace(), 1e-6);
        assert_eq!(r.sp1_bound, Some(0.5 * 2.0));
        assert!(!r.notes.is_empty());
    }
}
