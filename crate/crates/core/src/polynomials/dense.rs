use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dense polynomial with exact rational coefficients, index = exponent.
/// Trailing zeros are trimmed, so a nonzero polynomial has a nonzero
/// leading coefficient and the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensePoly {
    coeffs: Vec<BigRational>,
}

impl DensePoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    /// Exact conversion: every finite binary float is a dyadic rational.
    /// Panics on non-finite input.
    pub fn from_f64(coeffs: &[f64]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_float(c).expect("finite coefficient"))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Floating-point Horner evaluation of the rounded coefficients.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn mul(&self, other: &DensePoly) -> DensePoly {
        if self.is_zero() || other.is_zero() {
            return DensePoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        DensePoly::new(out)
    }

    pub fn add(&self, other: &DensePoly) -> DensePoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let out = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
                let b = other.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
                a + b
            })
            .collect();
        DensePoly::new(out)
    }

    /// Positive rational multiple with coprime integer coefficients.
    /// Same roots and same sign everywhere.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        crate::realroots::make_primitive(ints)
    }

    /// Sign changes of the nonzero coefficients ordered by exponent.
    pub fn sign_changes(&self) -> usize {
        count_sign_changes(self.coeffs.iter().filter(|c| !c.is_zero()).map(|c| c.is_positive()))
    }
}

pub(crate) fn count_sign_changes<I: Iterator<Item = bool>>(signs: I) -> usize {
    let mut prev = None;
    let mut changes = 0;
    for s in signs {
        if prev.is_some_and(|p| p != s) {
            changes += 1;
        }
        prev = Some(s);
    }
    changes
}
