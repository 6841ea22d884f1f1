//! Exact distinct-root counting with Sturm sequences over the integers.
//!
//! The sequence is generated by pseudo-remainders. Each remainder is divided
//! by the subresultant factor `|beta_i|` (an exact division), so coefficient
//! size grows only linearly along the chain and no gcds are needed; the sign
//! of every member is fixed so that `S_{i+1}` is a positive multiple of
//! `-rem(S_{i-1}, S_i)`.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::interval::{Endpoint, Interval, Region};
use crate::error::{Error, Result};
use crate::polynomials::DensePoly;

/// How a zero count was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMethod {
    Sturm,
    Subdivision,
}

/// Number of distinct real zeros in a region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCount {
    pub count: usize,
    pub method: CountMethod,
    pub region: Interval,
    /// Always true for Sturm counts.
    pub certified: bool,
}

/// Divides out the (positive) content.
pub fn make_primitive(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    let mut g = BigInt::zero();
    for c in &p {
        if !c.is_zero() {
            g = g.gcd(c);
            if g.is_one() {
                return p;
            }
        }
    }
    if g.is_zero() || g.is_one() {
        return p;
    }
    p.into_iter().map(|c| c / &g).collect()
}

fn derivative(p: &[BigInt]) -> Vec<BigInt> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) * a mod b`; also returns the
/// exponent used.
fn pseudo_remainder(a: &[BigInt], b: &[BigInt]) -> (Vec<BigInt>, usize) {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    let steps = a.len() - db;
    for step in 0..steps {
        let top = r.len() - 1 - step;
        let lead = std::mem::take(&mut r[top]);
        for c in r[..top].iter_mut() {
            *c *= lb;
        }
        if !lead.is_zero() {
            let off = top - db;
            for (k, bc) in b[..db].iter().enumerate() {
                r[off + k] -= &lead * bc;
            }
        }
    }
    r.truncate(db);
    (trim(r), steps)
}

/// Exact division `a / b` of integer polynomials known to divide over Q;
/// returns a primitive multiple of the quotient.
fn exact_quotient(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r: Vec<BigRational> = a.iter().cloned().map(BigRational::from_integer).collect();
    let mut q = vec![BigRational::zero(); a.len() - db];
    for top in (db..a.len()).rev() {
        let coef = &r[top] / BigRational::from_integer(lb.clone());
        let off = top - db;
        for (k, bc) in b.iter().enumerate() {
            r[off + k] -= &coef * BigRational::from_integer(bc.clone());
        }
        q[off] = coef;
    }
    debug_assert!(r.iter().all(Zero::is_zero));
    let lcm = q.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    make_primitive(q.iter().map(|c| c.numer() * (&lcm / c.denom())).collect())
}

/// A Sturm sequence of the square-free part of an integer polynomial.
#[derive(Debug, Clone)]
pub struct SturmSequence {
    seq: Vec<Vec<BigInt>>,
    /// Square-free polynomial the sequence was built from.
    base: Vec<BigInt>,
}

impl SturmSequence {
    /// Builds the sequence for `p` (coefficients by increasing exponent).
    pub fn new(p: &[BigInt]) -> Result<Self> {
        let p = make_primitive(p.to_vec());
        if p.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        let seq = chain(&p);
        let last = seq.last().expect("chain is nonempty");
        if last.len() > 1 {
            // repeated roots: restart on p / gcd(p, p')
            let base = exact_quotient(&p, last);
            let seq = chain(&base);
            return Ok(Self { seq, base });
        }
        Ok(Self { seq, base: p })
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn square_free_part(&self) -> &[BigInt] {
        &self.base
    }

    fn variations<F: Fn(&[BigInt]) -> Sign>(&self, sign_at: F) -> usize {
        let mut prev = Sign::NoSign;
        let mut v = 0;
        for s in self.seq.iter().map(|p| sign_at(p)) {
            if s == Sign::NoSign {
                continue;
            }
            if prev != Sign::NoSign && s != prev {
                v += 1;
            }
            prev = s;
        }
        v
    }

    fn variations_at(&self, point: &SignPoint) -> usize {
        self.variations(|p| point.sign_of(p))
    }

    /// Distinct roots in `region`.
    pub fn count(&self, region: &Interval) -> usize {
        let lo = SignPoint::from_endpoint(region.lo());
        let hi = SignPoint::from_endpoint(region.hi());
        // V(a) - V(b) counts roots in (a, b]
        let mut n = self.variations_at(&lo) as i64 - self.variations_at(&hi) as i64;
        if region.lo().is_closed() && lo.sign_of(&self.base) == Sign::NoSign {
            n += 1;
        }
        if matches!(region.hi(), Endpoint::Open(_)) && hi.sign_of(&self.base) == Sign::NoSign {
            n -= 1;
        }
        debug_assert!(n >= 0);
        n.max(0) as usize
    }

    /// Counts in the four experiment regions plus the real line, and
    /// whether `0` is a root.
    pub fn count_regions(&self) -> RegionCounts {
        let pts = [
            SignPoint::NegInf,
            SignPoint::Int(-1),
            SignPoint::Int(0),
            SignPoint::Int(1),
            SignPoint::PosInf,
        ];
        let v: Vec<i64> = pts.iter().map(|p| self.variations_at(p) as i64).collect();
        let zero_at = |p: &SignPoint| (p.sign_of(&self.base) == Sign::NoSign) as i64;
        let root_m1 = zero_at(&pts[1]);
        let root_0 = zero_at(&pts[2]);
        let tail_neg = v[0] - v[1] - root_m1;
        let unit_neg = v[1] - v[2] + root_m1 - root_0;
        let unit_pos = v[2] - v[3];
        let tail_pos = v[3] - v[4];
        RegionCounts {
            unit_pos: unit_pos as usize,
            tail_pos: tail_pos as usize,
            unit_neg: unit_neg as usize,
            tail_neg: tail_neg as usize,
            zero_at_origin: root_0 == 1,
            total: (v[0] - v[4]) as usize,
        }
    }
}

fn chain(p: &[BigInt]) -> Vec<Vec<BigInt>> {
    let mut seq = vec![p.to_vec()];
    let dp = make_primitive(derivative(p));
    if dp.is_empty() {
        return seq;
    }
    seq.push(dp);
    // subresultant bookkeeping (magnitudes only)
    let mut psi = BigInt::one();
    let mut prev_delta: Option<usize> = None;
    loop {
        let n = seq.len();
        let (a, b) = (&seq[n - 2], &seq[n - 1]);
        if b.len() == 1 {
            break;
        }
        let delta = a.len() - b.len();
        let (mut r, steps) = pseudo_remainder(a, b);
        if r.is_empty() {
            break;
        }
        let beta = match prev_delta {
            None => BigInt::one(),
            Some(pd) => {
                let lc_a = a.last().unwrap().abs();
                psi = if pd == 0 {
                    psi
                } else if pd == 1 {
                    lc_a.clone()
                } else {
                    num_traits::pow(lc_a.clone(), pd) / num_traits::pow(psi.clone(), pd - 1)
                };
                lc_a * num_traits::pow(psi.clone(), delta)
            }
        };
        debug_assert_eq!(steps, delta + 1);
        // make r a positive multiple of rem(a, b), then negate
        let lb_negative = b.last().unwrap().is_negative();
        let flip = !(lb_negative && steps % 2 == 1);
        if !beta.is_one() {
            for c in r.iter_mut() {
                *c /= &beta;
            }
        }
        if flip {
            for c in r.iter_mut() {
                *c = -std::mem::take(c);
            }
        }
        prev_delta = Some(delta);
        seq.push(r);
    }
    seq
}

/// Evaluation point for sign queries.
#[derive(Debug, Clone)]
enum SignPoint {
    NegInf,
    PosInf,
    Int(i64),
    Rational(BigRational),
}

impl SignPoint {
    fn from_endpoint(e: Endpoint) -> Self {
        match e {
            Endpoint::NegInf => SignPoint::NegInf,
            Endpoint::PosInf => SignPoint::PosInf,
            Endpoint::Closed(v) | Endpoint::Open(v) => {
                if v.fract() == 0.0 && v.abs() < 1e15 {
                    SignPoint::Int(v as i64)
                } else {
                    SignPoint::Rational(BigRational::from_float(v).expect("finite endpoint"))
                }
            }
        }
    }

    fn sign_of(&self, p: &[BigInt]) -> Sign {
        let Some(lead) = p.last() else {
            return Sign::NoSign;
        };
        match self {
            SignPoint::PosInf => lead.sign(),
            SignPoint::NegInf => {
                if (p.len() - 1) % 2 == 0 {
                    lead.sign()
                } else {
                    -lead.sign()
                }
            }
            SignPoint::Int(0) => p[0].sign(),
            SignPoint::Int(1) => p.iter().sum::<BigInt>().sign(),
            SignPoint::Int(-1) => p
                .iter()
                .enumerate()
                .fold(BigInt::zero(), |acc, (i, c)| if i % 2 == 0 { acc + c } else { acc - c })
                .sign(),
            SignPoint::Int(v) => {
                let x = BigInt::from(*v);
                p.iter().rev().fold(BigInt::zero(), |acc, c| acc * &x + c).sign()
            }
            SignPoint::Rational(q) => {
                // sign of d^n p(n/d) with d > 0
                let (num, den) = (q.numer(), q.denom());
                let mut acc = BigInt::zero();
                let mut dpow = BigInt::one();
                for c in p.iter().rev() {
                    acc = acc * num + c * &dpow;
                    dpow *= den;
                }
                acc.sign()
            }
        }
    }
}

/// Per-region distinct zero counts of one polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RegionCounts {
    pub unit_pos: usize,
    pub tail_pos: usize,
    pub unit_neg: usize,
    pub tail_neg: usize,
    pub zero_at_origin: bool,
    pub total: usize,
}

impl RegionCounts {
    pub fn get(&self, r: Region) -> usize {
        match r {
            Region::UnitPos => self.unit_pos,
            Region::TailPos => self.tail_pos,
            Region::UnitNeg => self.unit_neg,
            Region::TailNeg => self.tail_neg,
            Region::All => self.total,
        }
    }
}

/// Cauchy bound `1 + max |a_i| / |a_n|`; every real root lies strictly inside.
pub fn cauchy_bound(p: &DensePoly) -> Result<BigRational> {
    let lead = p.leading().ok_or(Error::ZeroPolynomial)?.abs();
    let max = p.coeffs()[..p.coeffs().len() - 1]
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(BigRational::zero);
    Ok(BigRational::one() + max / lead)
}

/// Exact number of distinct real zeros of `p` in `region`.
pub fn sturm_count(p: &DensePoly, region: &Interval) -> Result<ZeroCount> {
    let seq = SturmSequence::new(&p.primitive_integer())?;
    Ok(ZeroCount {
        count: seq.count(region),
        method: CountMethod::Sturm,
        region: *region,
        certified: true,
    })
}

/// Exact region counts of `p`.
pub fn sturm_count_regions(p: &DensePoly) -> Result<RegionCounts> {
    Ok(SturmSequence::new(&p.primitive_integer())?.count_regions())
}
