//! Real functions that can report their derivative.

use crate::polynomials::{DensePoly, SparsePoly};

pub trait Differentiable {
    /// `(f(x), f'(x))`
    fn eval_d(&self, x: f64) -> (f64, f64);
}

/// Wraps a closure returning `(value, derivative)`.
#[derive(Debug, Clone, Copy)]
pub struct FnD<F>(pub F);

impl<F: Fn(f64) -> (f64, f64)> Differentiable for FnD<F> {
    fn eval_d(&self, x: f64) -> (f64, f64) {
        (self.0)(x)
    }
}

impl Differentiable for SparsePoly {
    fn eval_d(&self, x: f64) -> (f64, f64) {
        self.eval(x)
    }
}

/// Floating-point view of a dense polynomial.
#[derive(Debug, Clone)]
pub struct DenseF64(pub Vec<f64>);

impl DenseF64 {
    pub fn from_dense(p: &DensePoly) -> Self {
        use num_traits::ToPrimitive;
        Self(p.coeffs().iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect())
    }
}

impl Differentiable for DenseF64 {
    fn eval_d(&self, x: f64) -> (f64, f64) {
        let mut v = 0.0;
        let mut d = 0.0;
        for &c in self.0.iter().rev() {
            d = d * x + v;
            v = v * x + c;
        }
        (v, d)
    }
}

impl<T: Differentiable + ?Sized> Differentiable for &T {
    fn eval_d(&self, x: f64) -> (f64, f64) {
        (**self).eval_d(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_with_derivative() {
        // 1 - 3x + 2x^2
        let p = DenseF64(vec![1.0, -3.0, 2.0]);
        assert_eq!(p.eval_d(2.0), (3.0, 5.0));
    }
}
