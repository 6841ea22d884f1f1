//! Kac's counting integral `(1 / 2 delta) * int 1{|f| < delta} |f'| dx`.
//!
//! The integral is computed cell by cell on a uniform grid. On a cell where
//! `f` is monotone the integrand integrates exactly to the length of
//! `f([a, b])` clipped to `(-delta, delta)`. A cell whose endpoint
//! derivatives disagree in sign is split at the turning point, located by
//! bisection on `f'`. Two turning points inside one cell are not detected,
//! so the grid must separate turning points.

use super::interval::Interval;
use crate::error::{Error, Result};
use crate::func::Differentiable;

fn clip(v: f64, delta: f64) -> f64 {
    v.clamp(-delta, delta)
}

fn turning_point<F: Differentiable + ?Sized>(f: &F, mut a: f64, mut b: f64, da: f64) -> f64 {
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let (_, dm) = f.eval_d(m);
        if (dm > 0.0) == (da > 0.0) && dm != 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Estimates the number of zeros of `f` in the open region, with endpoint
/// zeros contributing one half each.
pub fn kac_estimate<F: Differentiable + ?Sized>(
    f: &F,
    region: &Interval,
    delta: f64,
    grid: usize,
) -> Result<f64> {
    let (lo, hi) = region
        .bounds()
        .ok_or_else(|| Error::InvalidInterval("Kac estimate needs a bounded region".into()))?;
    if !(delta > 0.0) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
        });
    }
    let grid = grid.max(1);
    let h = (hi - lo) / grid as f64;
    let mut total = 0.0;
    let (mut fa, mut da) = f.eval_d(lo);
    for k in 0..grid {
        let a = lo + h * k as f64;
        let b = if k + 1 == grid { hi } else { lo + h * (k + 1) as f64 };
        let (fb, db) = f.eval_d(b);
        let band_hit = fa.abs() < delta || fb.abs() < delta || (fa > 0.0) != (fb > 0.0);
        let turning = da != 0.0 && db != 0.0 && (da > 0.0) != (db > 0.0);
        if turning {
            let t = turning_point(f, a, b, da);
            let (ft, _) = f.eval_d(t);
            total += (clip(ft, delta) - clip(fa, delta)).abs() + (clip(fb, delta) - clip(ft, delta)).abs();
        } else if band_hit {
            total += (clip(fb, delta) - clip(fa, delta)).abs();
        }
        fa = fb;
        da = db;
    }
    Ok(total / (2.0 * delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{DenseF64, FnD};

    fn unit() -> Interval {
        Interval::closed(0.0, 1.0).unwrap()
    }

    #[test]
    fn single_interior_zero() {
        let f = FnD(|x: f64| (x - 0.5, 1.0));
        let v = kac_estimate(&f, &unit(), 1e-3, 1000).unwrap();
        assert!((v - 1.0).abs() < 0.01);
    }

    #[test]
    fn endpoint_zero_counts_half() {
        let f = FnD(|x: f64| (x, 1.0));
        let v = kac_estimate(&f, &unit(), 1e-3, 1000).unwrap();
        assert!((v - 0.5).abs() < 0.01);
    }

    #[test]
    fn no_zero() {
        let f = DenseF64(vec![1.0, 0.0, 1.0]);
        assert_eq!(kac_estimate(&f, &unit(), 1e-4, 1000).unwrap(), 0.0);
    }

    #[test]
    fn tangency_inside_band_is_partial() {
        // (x - 1/2)^2 dips to 0 at the turning point; the integral equals
        // twice the clipped rise, i.e. 2 * delta / (2 delta) = 1
        let f = FnD(|x: f64| ((x - 0.5).powi(2), 2.0 * (x - 0.5)));
        let v = kac_estimate(&f, &unit(), 1e-3, 999).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn oscillating_function() {
        let f = FnD(|x: f64| ((20.0 * x).sin(), 20.0 * (20.0 * x).cos()));
        let v = kac_estimate(&f, &Interval::closed(0.1, 3.0).unwrap(), 1e-4, 5000).unwrap();
        // zeros k*pi/20 in (0.1, 3): k = 1..=19
        assert!((v - 19.0).abs() < 0.01, "{v}");
    }

    #[test]
    fn rejects_bad_input() {
        let f = FnD(|x: f64| (x, 1.0));
        assert!(kac_estimate(&f, &unit(), 0.0, 10).is_err());
        assert!(kac_estimate(&f, &Interval::real_line(), 0.1, 10).is_err());
    }
}
