use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, Zero};
use serde::{Deserialize, Serialize};

use super::dense::DensePoly;
use super::sparse::{eval_sparse, Support};
use crate::error::{Error, Result};
use crate::func::Differentiable;

/// Default cap on the dense degree handed to the exact counter.
pub const DEFAULT_DEGREE_CAP: usize = 4096;

/// One summand `f_1 ... f_k x^d` of a circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductTerm {
    pub factors: Vec<Support>,
    pub degree_shift: u32,
}

impl ProductTerm {
    pub fn new(factors: Vec<Support>, degree_shift: u32) -> Self {
        Self {
            factors,
            degree_shift,
        }
    }

    pub fn k(&self) -> usize {
        self.factors.len()
    }

    /// Exponent of the top monomial of the expanded term.
    pub fn dense_degree(&self) -> usize {
        self.degree_shift as usize
            + self
                .factors
                .iter()
                .map(|s| s.max_exponent() as usize)
                .sum::<usize>()
    }
}

/// A sum of products of sparse polynomials,
/// `F(x) = sum_i f_i1(x) ... f_ik_i(x) x^(d_i)`.
///
/// Terms are kept sorted by degree shift (stable, so listing order breaks
/// ties) and shifts are reduced so the first one is 0. Coefficients are
/// supplied separately as one flat slice in (term, factor, exponent) order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ProductTerm>", into = "Vec<ProductTerm>")]
pub struct Circuit {
    terms: Vec<ProductTerm>,
    offsets: Vec<Vec<usize>>,
    n_coeffs: usize,
}

impl TryFrom<Vec<ProductTerm>> for Circuit {
    type Error = Error;

    fn try_from(terms: Vec<ProductTerm>) -> Result<Self> {
        Circuit::new(terms)
    }
}

impl From<Circuit> for Vec<ProductTerm> {
    fn from(c: Circuit) -> Self {
        c.terms
    }
}

impl Circuit {
    pub fn new(mut terms: Vec<ProductTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyCircuit);
        }
        for (i, term) in terms.iter().enumerate() {
            if term.factors.is_empty() {
                return Err(Error::EmptyTerm(i));
            }
            if let Some(s) = term.factors.iter().find(|s| !s.is_normalized()) {
                return Err(Error::UnnormalizedSupport(s.exponents().to_vec()));
            }
        }
        terms.sort_by_key(|t| t.degree_shift);
        let base = terms[0].degree_shift;
        for t in &mut terms {
            t.degree_shift -= base;
        }
        Ok(Self::with_layout(terms))
    }

    fn with_layout(terms: Vec<ProductTerm>) -> Self {
        let mut offsets = Vec::with_capacity(terms.len());
        let mut n = 0;
        for t in &terms {
            let mut row = Vec::with_capacity(t.factors.len());
            for s in &t.factors {
                row.push(n);
                n += s.len();
            }
            offsets.push(row);
        }
        Self {
            terms,
            offsets,
            n_coeffs: n,
        }
    }

    pub fn terms(&self) -> &[ProductTerm] {
        &self.terms
    }

    /// Number of product terms.
    pub fn m(&self) -> usize {
        self.terms.len()
    }

    /// Factor counts `k_i`.
    pub fn ks(&self) -> Vec<usize> {
        self.terms.iter().map(ProductTerm::k).collect()
    }

    pub fn k_max(&self) -> usize {
        self.terms.iter().map(ProductTerm::k).max().unwrap_or(0)
    }

    /// Sparsity: the largest factor support size.
    pub fn t(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|t| t.factors.iter().map(Support::len))
            .max()
            .unwrap_or(0)
    }

    pub fn shifts(&self) -> Vec<u32> {
        self.terms.iter().map(|t| t.degree_shift).collect()
    }

    pub fn all_shifts_zero(&self) -> bool {
        self.terms.iter().all(|t| t.degree_shift == 0)
    }

    pub fn dense_degree(&self) -> usize {
        self.terms.iter().map(ProductTerm::dense_degree).max().unwrap_or(0)
    }

    pub fn num_coeffs(&self) -> usize {
        self.n_coeffs
    }

    pub fn factor_coeffs<'a>(&self, u: &'a [f64], term: usize, factor: usize) -> &'a [f64] {
        let start = self.offsets[term][factor];
        &u[start..start + self.terms[term].factors[factor].len()]
    }

    fn check_coeffs(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.n_coeffs {
            return Err(Error::CoefficientCount {
                expected: self.n_coeffs,
                got: u.len(),
            });
        }
        Ok(())
    }

    /// Moves term `index` (which must have shift 0) to the front.
    pub fn with_pivot(&self, index: usize) -> Result<Self> {
        match self.terms.get(index) {
            Some(t) if t.degree_shift == 0 => {
                let mut terms = self.terms.clone();
                let pivot = terms.remove(index);
                terms.insert(0, pivot);
                Ok(Self::with_layout(terms))
            }
            _ => Err(Error::InvalidPivot(index)),
        }
    }

    /// Indices of terms eligible as pivot (shift 0).
    pub fn pivot_candidates(&self) -> Vec<usize> {
        (0..self.m())
            .filter(|&i| self.terms[i].degree_shift == 0)
            .collect()
    }

    /// `F(x)` and `F'(x)` by the product and sum rules, factor by factor.
    ///
    /// Panics if `u` has the wrong length.
    pub fn eval(&self, u: &[f64], x: f64) -> (f64, f64) {
        assert_eq!(u.len(), self.n_coeffs, "coefficient count");
        let mut value = 0.0;
        let mut deriv = 0.0;
        let mut vals = Vec::new();
        let mut ders = Vec::new();
        for (i, term) in self.terms.iter().enumerate() {
            vals.clear();
            ders.clear();
            for (j, s) in term.factors.iter().enumerate() {
                let (v, d) = eval_sparse(s, self.factor_coeffs(u, i, j), x);
                vals.push(v);
                ders.push(d);
            }
            let (g, dg) = product_rule(&vals, &ders);
            let d = term.degree_shift;
            if d == 0 {
                value += g;
                deriv += dg;
            } else {
                let below = x.powi(d as i32 - 1);
                let xd = below * x;
                value += g * xd;
                deriv += dg * xd + g * d as f64 * below;
            }
        }
        (value, deriv)
    }

    /// Exact dense expansion of `F` for the coefficients `u`.
    pub fn expand(&self, u: &[f64], degree_cap: usize) -> Result<DensePoly> {
        let (ints, exp2) = self.expand_integer(u, degree_cap)?;
        let scale = if exp2 >= 0 {
            BigRational::from_integer(BigInt::from(1) << exp2 as usize)
        } else {
            BigRational::new(BigInt::from(1), BigInt::from(1) << (-exp2) as usize)
        };
        Ok(DensePoly::new(
            ints.into_iter()
                .map(|c| BigRational::from_integer(c) * &scale)
                .collect(),
        ))
    }

    /// Expansion as integer coefficients times `2^exp2`.
    pub(crate) fn expand_integer(&self, u: &[f64], degree_cap: usize) -> Result<(Vec<BigInt>, i64)> {
        self.check_coeffs(u)?;
        if let Some(&c) = u.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoefficient(c));
        }
        let degree = self.dense_degree();
        if degree > degree_cap {
            return Err(Error::DegreeCapExceeded {
                degree,
                cap: degree_cap,
            });
        }
        let mut terms: Vec<(Vec<BigInt>, i64)> = Vec::with_capacity(self.m());
        for (i, term) in self.terms.iter().enumerate() {
            let mut acc: Vec<BigInt> = vec![BigInt::from(1)];
            let mut acc_exp = 0i64;
            for (j, s) in term.factors.iter().enumerate() {
                let (factor, e) = dyadic_factor(s, self.factor_coeffs(u, i, j));
                acc = mul_sparse(&acc, s, &factor);
                acc_exp += e;
            }
            let mut shifted = vec![BigInt::zero(); term.degree_shift as usize];
            shifted.extend(acc);
            terms.push((shifted, acc_exp));
        }
        let base = terms.iter().map(|(_, e)| *e).min().unwrap_or(0);
        let mut out = vec![BigInt::zero(); degree + 1];
        for (coeffs, e) in terms {
            let up = (e - base) as usize;
            for (k, c) in coeffs.into_iter().enumerate() {
                if !c.is_zero() {
                    out[k] += c << up;
                }
            }
        }
        Ok((out, base))
    }

    /// The circuit of `x^D F(1/x)`: every support `S` becomes `max(S) - S`
    /// and the shifts are recomputed so the result is normalized again.
    pub fn reciprocal_transform(&self) -> Reciprocal {
        let top = self.terms.iter().map(ProductTerm::dense_degree).max().unwrap_or(0);
        let mut tagged: Vec<(usize, ProductTerm)> = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let factors = t.factors.iter().map(Support::reflected).collect();
                (i, ProductTerm::new(factors, (top - t.dense_degree()) as u32))
            })
            .collect();
        tagged.sort_by_key(|(_, t)| t.degree_shift);
        let source_term = tagged.iter().map(|(i, _)| *i).collect();
        let circuit = Circuit::new(tagged.into_iter().map(|(_, t)| t).collect())
            .expect("reflected circuit stays valid");
        Reciprocal {
            circuit,
            source_term,
            source: self.clone(),
        }
    }

    /// Coefficients `u'` such that the circuit with `u'` equals `± F(-x)`.
    pub fn negated_argument_coeffs(&self, u: &[f64]) -> Vec<f64> {
        let mut out = u.to_vec();
        for (i, term) in self.terms.iter().enumerate() {
            for (j, s) in term.factors.iter().enumerate() {
                let start = self.offsets[i][j];
                let flip_all = j == 0 && term.degree_shift % 2 == 1;
                for (k, &e) in s.exponents().iter().enumerate() {
                    if (e % 2 == 1) != flip_all {
                        out[start + k] = -out[start + k];
                    }
                }
            }
        }
        out
    }
}

/// Output of [`Circuit::reciprocal_transform`], with the coefficient map.
#[derive(Debug, Clone)]
pub struct Reciprocal {
    pub circuit: Circuit,
    source_term: Vec<usize>,
    source: Circuit,
}

impl Reciprocal {
    /// Maps coefficients of the source circuit onto the transformed layout.
    pub fn map_coeffs(&self, u: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(u.len());
        for &src in &self.source_term {
            for j in 0..self.source.terms[src].factors.len() {
                out.extend(self.source.factor_coeffs(u, src, j).iter().rev());
            }
        }
        out
    }
}

/// Borrowed circuit plus coefficients; a concrete function of `x`.
#[derive(Debug, Clone, Copy)]
pub struct CircuitInstance<'a> {
    pub circuit: &'a Circuit,
    pub coeffs: &'a [f64],
}

impl<'a> CircuitInstance<'a> {
    pub fn new(circuit: &'a Circuit, coeffs: &'a [f64]) -> Result<Self> {
        circuit.check_coeffs(coeffs)?;
        Ok(Self { circuit, coeffs })
    }
}

impl Differentiable for CircuitInstance<'_> {
    fn eval_d(&self, x: f64) -> (f64, f64) {
        self.circuit.eval(self.coeffs, x)
    }
}

fn product_rule(vals: &[f64], ders: &[f64]) -> (f64, f64) {
    let k = vals.len();
    // prefix[j] = v_0 ... v_{j-1}
    let mut prefix = Vec::with_capacity(k + 1);
    prefix.push(1.0);
    for &v in vals {
        let last = *prefix.last().unwrap();
        prefix.push(last * v);
    }
    let mut suffix = 1.0;
    let mut deriv = 0.0;
    for j in (0..k).rev() {
        deriv += prefix[j] * ders[j] * suffix;
        suffix *= vals[j];
    }
    (prefix[k], deriv)
}

/// Integer coefficients `c_s` and exponent `e` with `u_s = c_s 2^e`.
fn dyadic_factor(support: &Support, coeffs: &[f64]) -> (Vec<BigInt>, i64) {
    let parts: Vec<(u64, i16, i8)> = coeffs.iter().map(|c| c.integer_decode()).collect();
    let e_min = parts
        .iter()
        .filter(|(m, _, _)| *m != 0)
        .map(|(_, e, _)| *e as i64)
        .min()
        .unwrap_or(0);
    let ints = parts
        .iter()
        .map(|&(m, e, sign)| {
            if m == 0 {
                BigInt::zero()
            } else {
                let v = BigInt::from(m) << (e as i64 - e_min) as usize;
                if sign < 0 {
                    -v
                } else {
                    v
                }
            }
        })
        .collect();
    debug_assert_eq!(support.len(), coeffs.len());
    (ints, e_min)
}

fn mul_sparse(dense: &[BigInt], support: &Support, coeffs: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); dense.len() + support.max_exponent() as usize];
    for (&s, c) in support.exponents().iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (k, a) in dense.iter().enumerate() {
            if !a.is_zero() {
                out[k + s as usize] += a * c;
            }
        }
    }
    out
}
