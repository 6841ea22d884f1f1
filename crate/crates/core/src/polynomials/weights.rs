use super::circuit::Circuit;
use super::sparse::{alpha, alpha_logderiv};

/// Per-term weight data at a point `x` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermWeights {
    /// `p_i = (prod_j alpha_ij)^(-1/2)`
    pub p: f64,
    /// `q_i = p_1 / p_i`
    pub q: f64,
    /// `w_i = q_i x^(d_i)`
    pub w: f64,
    /// `q_i' / q_i`
    pub q_logderiv: f64,
    /// `w_i'`
    pub w_prime: f64,
}

impl Circuit {
    /// Weight functions of every term at `x`. `q_1 = w_1 = 1` exactly.
    ///
    /// The products of square roots are formed as `exp` of summed
    /// half-logarithms.
    pub fn weights(&self, x: f64) -> Vec<TermWeights> {
        let mut log_alpha = Vec::with_capacity(self.m());
        let mut dlog_alpha = Vec::with_capacity(self.m());
        for term in self.terms() {
            let (l, dl) = term.factors.iter().fold((0.0, 0.0), |(l, dl), s| {
                (l + alpha(s, x).ln(), dl + alpha_logderiv(s, x))
            });
            log_alpha.push(l);
            dlog_alpha.push(dl);
        }
        let (l1, dl1) = (log_alpha[0], dlog_alpha[0]);
        self.terms()
            .iter()
            .enumerate()
            .map(|(i, term)| {
                let p = (-0.5 * log_alpha[i]).exp();
                let (q, q_logderiv) = if i == 0 {
                    (1.0, 0.0)
                } else {
                    (
                        (0.5 * (log_alpha[i] - l1)).exp(),
                        0.5 * (dlog_alpha[i] - dl1),
                    )
                };
                let d = term.degree_shift;
                let (w, w_prime) = if d == 0 {
                    (q, q * q_logderiv)
                } else {
                    let below = x.powi(d as i32 - 1);
                    (q * below * x, q * (q_logderiv * below * x + d as f64 * below))
                };
                TermWeights {
                    p,
                    q,
                    w,
                    q_logderiv,
                    w_prime,
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::super::{ProductTerm, Support};
    use super::*;

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

    #[test]
    fn first_term_is_constant_one() {
        let c = circuit(&[(&[&[0, 1, 3], &[0, 2]], 0), (&[&[0, 5]], 2)]);
        for &x in &[0.0, 0.25, 0.5, 0.99, 1.0] {
            let w = c.weights(x);
            assert_eq!(w[0].q, 1.0);
            assert_eq!(w[0].w, 1.0);
            assert_eq!(w[0].w_prime, 0.0);
        }
    }

    #[test]
    fn constant_supports_give_unit_q() {
        let c = circuit(&[(&[&[0], &[0]], 0), (&[&[0]], 3)]);
        let w = c.weights(0.5);
        assert_eq!(w[1].q, 1.0);
        assert_eq!(w[1].w, 0.125);
        assert!((w[1].w_prime - 3.0 * 0.25).abs() < 1e-15);
    }

    #[test]
    fn q_at_one_uses_support_sizes() {
        let c = circuit(&[(&[&[0, 1]], 0), (&[&[0, 2]], 0)]);
        assert!((c.weights(1.0)[1].q - 1.0).abs() < 1e-15);
        let c = circuit(&[(&[&[0, 1]], 0), (&[&[0, 2, 5], &[0, 1]], 1)]);
        let expect = (3.0f64 * 2.0 / 2.0).sqrt();
        assert!((c.weights(1.0)[1].q - expect).abs() < 1e-14);
    }

    #[test]
    fn p_matches_direct_product() {
        let c = circuit(&[(&[&[0, 1], &[0, 3]], 0)]);
        let x = 0.8f64;
        let direct = ((1.0 + x * x) * (1.0 + x.powi(6))).powf(-0.5);
        assert!((c.weights(x)[0].p - direct).abs() < 1e-15);
    }

    #[test]
    fn q_logderiv_matches_finite_differences() {
        let c = circuit(&[(&[&[0, 1, 4], &[0, 2]], 0), (&[&[0, 3, 7]], 1), (&[&[0, 1], &[0, 6], &[0, 2]], 2)]);
        let h = 1e-5;
        for &x in &[0.1, 0.35, 0.6, 0.9] {
            let w = c.weights(x);
            let lo = c.weights(x - h);
            let hi = c.weights(x + h);
            for i in 0..c.m() {
                let fd = (hi[i].q.ln() - lo[i].q.ln()) / (2.0 * h);
                assert!((w[i].q_logderiv - fd).abs() < 1e-6);
                let fdw = (hi[i].w - lo[i].w) / (2.0 * h);
                assert!((w[i].w_prime - fdw).abs() < 1e-6);
            }
        }
    }
}
