use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest exponent accepted anywhere in a circuit.
pub const MAX_EXPONENT: u32 = 1 << 20;

/// Strictly increasing set of nonnegative exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Support(Vec<u32>);

impl Support {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::EmptySupport);
        }
        if exponents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::UnsortedSupport(exponents));
        }
        if let Some(&e) = exponents.iter().find(|&&e| e > MAX_EXPONENT) {
            return Err(Error::ExponentOutOfRange(e as i64));
        }
        Ok(Self(exponents))
    }

    /// The support `{0}` of a constant.
    pub fn constant() -> Self {
        Self(vec![0])
    }

    /// `{0, 1, ..., n-1}`.
    pub fn dense(n: usize) -> Self {
        Self((0..n.max(1) as u32).collect())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_exponent(&self) -> u32 {
        *self.0.last().expect("support is nonempty")
    }

    pub fn is_normalized(&self) -> bool {
        self.0[0] == 0
    }

    /// `max(S) - S`, the support of `x^max(S) f_S(1/x)`.
    pub fn reflected(&self) -> Self {
        let top = self.max_exponent();
        Self(self.0.iter().rev().map(|&s| top - s).collect())
    }
}

impl TryFrom<Vec<u32>> for Support {
    type Error = Error;

    fn try_from(v: Vec<u32>) -> Result<Self> {
        Support::new(v)
    }
}

impl From<Support> for Vec<u32> {
    fn from(s: Support) -> Self {
        s.0
    }
}

/// Shifts an integer exponent set so its minimum becomes 0.
///
/// Returns the normalized support and the removed shift `min(S)`, so that
/// `f_S(x) = x^shift f_{S'}(x)`. Duplicates are merged.
pub fn normalize_support(exponents: &[i64]) -> Result<(Support, i64)> {
    let shift = *exponents.iter().min().ok_or(Error::EmptySupport)?;
    let mut out = Vec::with_capacity(exponents.len());
    for &e in exponents {
        let d = e
            .checked_sub(shift)
            .filter(|&d| d <= MAX_EXPONENT as i64)
            .ok_or(Error::ExponentOutOfRange(e))?;
        out.push(d as u32);
    }
    out.sort_unstable();
    out.dedup();
    Ok((Support(out), shift))
}

/// A sparse univariate polynomial `sum_s u_s x^s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsePoly {
    support: Support,
    coeffs: Vec<f64>,
}

impl SparsePoly {
    pub fn new(support: Support, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != support.len() {
            return Err(Error::CoefficientCount {
                expected: support.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self { support, coeffs })
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Value and first derivative at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        eval_sparse(&self.support, &self.coeffs, x)
    }
}

/// Evaluates `sum u_s x^s` and its derivative, walking the exponents in
/// increasing order and raising the running power by the exponent gaps.
pub fn eval_sparse(support: &Support, coeffs: &[f64], x: f64) -> (f64, f64) {
    debug_assert_eq!(support.len(), coeffs.len());
    let mut value = 0.0;
    let mut deriv = 0.0;
    // x^(s-1) for the current exponent s >= 1
    let mut pow_below = 1.0;
    let mut below_exp = 0u32;
    for (&s, &u) in support.exponents().iter().zip(coeffs) {
        if s == 0 {
            value += u;
            continue;
        }
        let target = s - 1;
        if target > below_exp {
            pow_below *= x.powi((target - below_exp) as i32);
            below_exp = target;
        }
        deriv += s as f64 * u * pow_below;
        value += u * pow_below * x;
    }
    (value, deriv)
}

fn power_sums(support: &Support, x: f64, scale: u32) -> (f64, f64) {
    // returns (sum x^(scale s), sum scale*s*x^(scale s - 1))
    let mut value = 0.0;
    let mut deriv = 0.0;
    let mut pow_below = 1.0;
    let mut below_exp = 0u32;
    for &s in support.exponents() {
        if s == 0 {
            value += 1.0;
            continue;
        }
        let e = scale * s;
        let target = e - 1;
        if target > below_exp {
            pow_below *= x.powi((target - below_exp) as i32);
            below_exp = target;
        }
        deriv += e as f64 * pow_below;
        value += pow_below * x;
    }
    (value, deriv)
}

/// Sparse sum of squares `alpha_S(x) = sum_s x^(2s)`; equals `E f_S(x)^2`
/// for standard Gaussian coefficients.
pub fn alpha(support: &Support, x: f64) -> f64 {
    power_sums(support, x, 2).0
}

pub fn alpha_prime(support: &Support, x: f64) -> f64 {
    power_sums(support, x, 2).1
}

/// `alpha_S'(x) / alpha_S(x)`.
pub fn alpha_logderiv(support: &Support, x: f64) -> f64 {
    let (a, da) = power_sums(support, x, 2);
    da / a
}

/// `beta_S(x) = sum_s x^s`.
pub fn beta(support: &Support, x: f64) -> f64 {
    power_sums(support, x, 1).0
}

pub fn beta_prime(support: &Support, x: f64) -> f64 {
    power_sums(support, x, 1).1
}
