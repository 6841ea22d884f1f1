//! Zero counting for circuits above the dense degree cap.
//!
//! A cell is settled when an interval enclosure of `F` over it excludes 0
//! (no zero) or an enclosure of `F'` excludes 0 (monotone, so the zero count
//! is the sign change across the cell). Other cells are bisected. Cells that
//! shrink below the width tolerance are counted by their endpoint signs and
//! the result is marked uncertified.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::interval::{Interval, Region};
use super::interval_arith::Iv;
use super::sturm::{CountMethod, RegionCounts, ZeroCount};
use crate::error::{Error, Result};
use crate::polynomials::{Circuit, Support};

/// Default minimum cell width.
pub const DEFAULT_SUBDIVISION_TOL: f64 = 1e-10;
const MAX_CELLS: usize = 1 << 20;

fn factor_enclosure(s: &Support, u: &[f64], x: Iv) -> (Iv, Iv) {
    let mut value = Iv::zero();
    let mut deriv = Iv::zero();
    for (&e, &c) in s.exponents().iter().zip(u) {
        if c == 0.0 {
            continue;
        }
        if e == 0 {
            value = value + Iv::point(c);
            continue;
        }
        let below = x.powi(e - 1);
        value = value + (below * x).scale(c);
        deriv = deriv + below.scale(c * e as f64);
    }
    (value, deriv)
}

/// Enclosures of `F(X)` and `F'(X)` by natural interval extension.
pub fn circuit_enclosure(c: &Circuit, u: &[f64], x: Iv) -> (Iv, Iv) {
    let mut f = Iv::zero();
    let mut df = Iv::zero();
    let mut vals = Vec::new();
    let mut ders = Vec::new();
    for (i, term) in c.terms().iter().enumerate() {
        vals.clear();
        ders.clear();
        for (j, s) in term.factors.iter().enumerate() {
            let (v, d) = factor_enclosure(s, c.factor_coeffs(u, i, j), x);
            vals.push(v);
            ders.push(d);
        }
        let mut g = Iv::point(1.0);
        for v in &vals {
            g = g * *v;
        }
        let mut dg = Iv::zero();
        for j in 0..vals.len() {
            let mut p = ders[j];
            for (l, v) in vals.iter().enumerate() {
                if l != j {
                    p = p * *v;
                }
            }
            dg = dg + p;
        }
        let d = term.degree_shift;
        if d == 0 {
            f = f + g;
            df = df + dg;
        } else {
            let below = x.powi(d - 1);
            let xd = below * x;
            f = f + g * xd;
            df = df + dg * xd + (g * below).scale(d as f64);
        }
    }
    (f, df)
}

fn point_enclosure(c: &Circuit, u: &[f64], x: f64) -> Iv {
    circuit_enclosure(c, u, Iv::point(x)).0
}

struct Counter<'a> {
    circuit: &'a Circuit,
    coeffs: &'a [f64],
    tol: f64,
    cells: usize,
    certified: bool,
}

impl Counter<'_> {
    fn sign(iv: Iv) -> i8 {
        if iv.is_positive() {
            1
        } else if iv.is_negative() {
            -1
        } else {
            0
        }
    }

    /// Zeros strictly inside `(a, b)`; `fa`, `fb` must exclude 0.
    fn count_open(&mut self, a: f64, b: f64, fa: Iv, fb: Iv) -> usize {
        let mut total = 0;
        let mut stack = vec![(a, b, fa, fb)];
        while let Some((a, b, fa, fb)) = stack.pop() {
            self.cells += 1;
            let x = Iv::new(a, b);
            let (f_nat, df) = circuit_enclosure(self.circuit, self.coeffs, x);
            let mid = 0.5 * (a + b);
            let fm = point_enclosure(self.circuit, self.coeffs, mid);
            let f_mv = fm + df * (x - Iv::point(mid));
            let f = f_nat.intersect(f_mv);
            if !f.contains_zero() {
                continue;
            }
            let sign_change = (Self::sign(fa) != Self::sign(fb)) as usize;
            if !df.contains_zero() {
                total += sign_change;
                continue;
            }
            if b - a < self.tol || self.cells > MAX_CELLS {
                self.certified = false;
                total += sign_change;
                continue;
            }
            let split = [0.5, 0.4375, 0.5625, 0.375, 0.625]
                .iter()
                .map(|&r| a + r * (b - a))
                .map(|m| (m, point_enclosure(self.circuit, self.coeffs, m)))
                .find(|(_, fm)| !fm.contains_zero());
            match split {
                Some((m, fm)) if m > a && m < b => {
                    stack.push((m, b, fm, fb));
                    stack.push((a, m, fa, fm));
                }
                _ => {
                    self.certified = false;
                    total += sign_change;
                }
            }
        }
        total
    }

    /// Zeros in `region` (bounded).
    fn count(&mut self, region: &Interval) -> Result<usize> {
        let (a, b) = region
            .bounds()
            .ok_or_else(|| Error::InvalidInterval("subdivision needs a bounded region".into()))?;
        let fa = point_enclosure(self.circuit, self.coeffs, a);
        let fb = point_enclosure(self.circuit, self.coeffs, b);
        let mut extra = 0;
        let mut ends = [fa, fb];
        for (k, (iv, closed)) in [(fa, region.lo().is_closed()), (fb, region.hi().is_closed())]
            .into_iter()
            .enumerate()
        {
            if iv.contains_zero() {
                // a zero at (or indistinguishably near) the endpoint
                if iv.lo != 0.0 || iv.hi != 0.0 {
                    self.certified = false;
                }
                if closed {
                    extra += 1;
                }
                // nudge inward for the interior count
                let pos = if k == 0 { a + (b - a) * 1e-12 } else { b - (b - a) * 1e-12 };
                ends[k] = point_enclosure(self.circuit, self.coeffs, pos);
                if ends[k].contains_zero() {
                    self.certified = false;
                    return Ok(extra);
                }
            }
        }
        Ok(extra + self.count_open(a, b, ends[0], ends[1]))
    }
}

/// Counts zeros of the circuit with coefficients `u` in a bounded region by
/// certified subdivision.
pub fn subdivision_count(
    circuit: &Circuit,
    u: &[f64],
    region: &Interval,
    tol: f64,
) -> Result<ZeroCount> {
    if u.len() != circuit.num_coeffs() {
        return Err(Error::CoefficientCount {
            expected: circuit.num_coeffs(),
            got: u.len(),
        });
    }
    let mut counter = Counter {
        circuit,
        coeffs: u,
        tol,
        cells: 0,
        certified: true,
    };
    let count = counter.count(region)?;
    Ok(ZeroCount {
        count,
        method: CountMethod::Subdivision,
        region: *region,
        certified: counter.certified,
    })
}

/// Region counts by subdivision, mapping the tails and the negative axis
/// onto `(0, 1]` with `x -> 1/x` and `x -> -x`.
pub fn subdivision_count_regions(circuit: &Circuit, u: &[f64], tol: f64) -> Result<(RegionCounts, bool)> {
    let unit = Region::UnitPos.interval();
    let inner = Interval::open(0.0, 1.0)?;
    let recip = circuit.reciprocal_transform();
    let neg = circuit.negated_argument_coeffs(u);

    let a = subdivision_count(circuit, u, &unit, tol)?;
    let b = subdivision_count(&recip.circuit, &recip.map_coeffs(u), &inner, tol)?;
    let c = subdivision_count(circuit, &neg, &unit, tol)?;
    let d = subdivision_count(&recip.circuit, &recip.map_coeffs(&neg), &inner, tol)?;
    let zero_at_origin = exact_value_at_zero(circuit, u).is_zero();
    let counts = RegionCounts {
        unit_pos: a.count,
        tail_pos: b.count,
        unit_neg: c.count,
        tail_neg: d.count,
        zero_at_origin,
        total: a.count + b.count + c.count + d.count + zero_at_origin as usize,
    };
    Ok((counts, a.certified && b.certified && c.certified && d.certified))
}

fn exact_value_at_zero(circuit: &Circuit, u: &[f64]) -> BigRational {
    let mut sum = BigRational::zero();
    for (i, term) in circuit.terms().iter().enumerate() {
        if term.degree_shift != 0 {
            continue;
        }
        let mut prod = BigRational::from_integer(BigInt::from(1));
        for j in 0..term.factors.len() {
            let c0 = circuit.factor_coeffs(u, i, j)[0];
            prod *= BigRational::from_float(c0).unwrap_or_else(BigRational::zero);
        }
        sum += prod;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomials::ProductTerm;

    fn sup(v: &[u32]) -> Support {
        Support::new(v.to_vec()).unwrap()
    }

    #[test]
    fn enclosure_contains_point_values() {
        let c = Circuit::new(vec![
            ProductTerm::new(vec![sup(&[0, 1, 3]), sup(&[0, 2])], 0),
            ProductTerm::new(vec![sup(&[0, 1])], 2),
        ])
        .unwrap();
        let u = [0.3, -1.2, 0.7, 1.1, -0.4, 0.9, 2.0];
        let x = Iv::new(0.2, 0.6);
        let (f, df) = circuit_enclosure(&c, &u, x);
        for k in 0..=20 {
            let t = 0.2 + 0.02 * k as f64;
            let (v, d) = c.eval(&u, t);
            assert!(f.lo <= v && v <= f.hi);
            assert!(df.lo <= d && d <= df.hi);
        }
    }

    #[test]
    fn positive_function_has_no_zeros() {
        // (1 + x^2) + 0.5
        let c = Circuit::new(vec![
            ProductTerm::new(vec![sup(&[0, 2])], 0),
            ProductTerm::new(vec![sup(&[0])], 0),
        ])
        .unwrap();
        let r = subdivision_count(&c, &[1.0, 1.0, 0.5], &Interval::closed(-1.0, 1.0).unwrap(), 1e-9)
            .unwrap();
        assert_eq!(r.count, 0);
        assert!(r.certified);
    }

    #[test]
    fn near_double_root_is_not_counted() {
        // (x - 1/2)^2 + 1e-12
        let c = Circuit::new(vec![
            ProductTerm::new(vec![sup(&[0, 1]), sup(&[0, 1])], 0),
            ProductTerm::new(vec![sup(&[0])], 0),
        ])
        .unwrap();
        let u = [-0.5, 1.0, -0.5, 1.0, 1e-12];
        let r = subdivision_count(&c, &u, &Region::UnitPos.interval(), 1e-10).unwrap();
        assert!(r.count == 0 || !r.certified, "{r:?}");
        assert_ne!(r.count, 1);
    }

    #[test]
    fn simple_roots_are_counted() {
        // (x - 0.2)(x - 0.7)(x - 0.9)
        let c = Circuit::new(vec![ProductTerm::new(
            vec![sup(&[0, 1]), sup(&[0, 1]), sup(&[0, 1])],
            0,
        )])
        .unwrap();
        let u = [-0.2, 1.0, -0.7, 1.0, -0.9, 1.0];
        let r = subdivision_count(&c, &u, &Region::UnitPos.interval(), 1e-10).unwrap();
        assert_eq!((r.count, r.certified), (3, true));
        let (rc, ok) = subdivision_count_regions(&c, &u, 1e-10).unwrap();
        assert!(ok);
        assert_eq!((rc.unit_pos, rc.tail_pos, rc.unit_neg, rc.tail_neg), (3, 0, 0, 0));
    }

    #[test]
    fn regions_via_transforms() {
        // (x - 3)(x + 0.5)(x + 4)(x - 0.25)
        let c = Circuit::new(vec![ProductTerm::new(
            vec![sup(&[0, 1]), sup(&[0, 1]), sup(&[0, 1]), sup(&[0, 1])],
            0,
        )])
        .unwrap();
        let u = [-3.0, 1.0, 0.5, 1.0, 4.0, 1.0, -0.25, 1.0];
        let (rc, ok) = subdivision_count_regions(&c, &u, 1e-10).unwrap();
        assert!(ok);
        assert_eq!((rc.unit_pos, rc.tail_pos, rc.unit_neg, rc.tail_neg), (1, 1, 1, 1));
        assert!(!rc.zero_at_origin);
        assert_eq!(rc.total, 4);
    }

    #[test]
    fn unbounded_region_is_rejected() {
        let c = Circuit::new(vec![ProductTerm::new(vec![sup(&[0, 1])], 0)]).unwrap();
        assert!(subdivision_count(&c, &[1.0, 1.0], &Interval::real_line(), 1e-9).is_err());
    }
}
