use crate::polynomials::{count_sign_changes, DensePoly, SparsePoly};

/// Coefficient sign variations, an upper bound on the number of positive
/// zeros (Descartes' rule of signs).
pub trait DescartesBound {
    fn descartes_positive_bound(&self) -> usize;
}

impl DescartesBound for SparsePoly {
    fn descartes_positive_bound(&self) -> usize {
        // coefficients are already ordered by exponent
        count_sign_changes(self.coeffs().iter().filter(|c| **c != 0.0).map(|c| *c > 0.0))
    }
}

impl DescartesBound for DensePoly {
    fn descartes_positive_bound(&self) -> usize {
        self.sign_changes()
    }
}

pub fn descartes_positive_bound<P: DescartesBound + ?Sized>(p: &P) -> usize {
    p.descartes_positive_bound()
}
