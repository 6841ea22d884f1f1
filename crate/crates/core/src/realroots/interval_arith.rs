//! Outward-rounded interval arithmetic, just enough to enclose circuit
//! values and derivatives over a cell.

use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Iv {
    pub lo: f64,
    pub hi: f64,
}

impl Iv {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi || lo.is_nan() || hi.is_nan());
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn zero() -> Self {
        Self::point(0.0)
    }

    pub fn contains_zero(&self) -> bool {
        !(self.lo > 0.0 || self.hi < 0.0)
    }

    pub fn is_positive(&self) -> bool {
        self.lo > 0.0
    }

    pub fn is_negative(&self) -> bool {
        self.hi < 0.0
    }

    fn widen(lo: f64, hi: f64) -> Self {
        Self {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }

    pub fn intersect(self, other: Iv) -> Iv {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            Iv { lo, hi }
        } else {
            // both are valid enclosures, so they overlap; disjointness is
            // a rounding artifact
            Iv {
                lo: lo.min(hi),
                hi: lo.max(hi),
            }
        }
    }

    /// `self^n` for `n >= 1`.
    pub fn powi(self, n: u32) -> Iv {
        if n == 0 {
            return Iv::point(1.0);
        }
        if n == 1 {
            return self;
        }
        // powi is not correctly rounded; allow a relative error of 4n ulps
        let slack = 1.0 + 4.0 * n as f64 * f64::EPSILON;
        let p = |x: f64| x.powi(n as i32);
        let (lo, hi) = if n % 2 == 1 || self.lo >= 0.0 {
            (p(self.lo), p(self.hi))
        } else if self.hi <= 0.0 {
            (p(self.hi), p(self.lo))
        } else {
            (0.0, p(self.lo.abs().max(self.hi)))
        };
        let lo = if lo > 0.0 { lo / slack } else { lo * slack };
        let hi = if hi > 0.0 { hi * slack } else { hi / slack };
        Iv::widen(lo, hi)
    }

    pub fn scale(self, c: f64) -> Iv {
        self * Iv::point(c)
    }
}

impl Add for Iv {
    type Output = Iv;

    fn add(self, o: Iv) -> Iv {
        Iv::widen(self.lo + o.lo, self.hi + o.hi)
    }
}

impl Sub for Iv {
    type Output = Iv;

    fn sub(self, o: Iv) -> Iv {
        Iv::widen(self.lo - o.hi, self.hi - o.lo)
    }
}

impl Mul for Iv {
    type Output = Iv;

    fn mul(self, o: Iv) -> Iv {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Iv::widen(lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encloses_products_and_powers() {
        let x = Iv::new(-0.5, 2.0);
        let sq = x.powi(2);
        assert!(sq.lo <= 0.0 && sq.hi >= 4.0);
        let cu = x.powi(3);
        assert!(cu.lo <= -0.125 && cu.hi >= 8.0);
        let p = x * Iv::new(-1.0, 3.0);
        assert!(p.lo <= -2.0 && p.hi >= 6.0);
    }

    #[test]
    fn third_is_enclosed() {
        let third = Iv::point(1.0) * Iv::point(1.0 / 3.0);
        let s = third + third + third;
        assert!(s.lo <= 1.0 && s.hi >= 1.0);
    }

    #[test]
    fn sign_queries() {
        assert!(Iv::new(1e-300, 1.0).is_positive());
        assert!(Iv::new(-1.0, 0.0).contains_zero());
        assert!(Iv::new(-2.0, -1.0).is_negative());
    }
}
