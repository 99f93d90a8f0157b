//! Seeded random instances: states, Hermitian and unitary operators.
//!
//! Every generator takes an explicit RNG. [`task_rng`] splits one run seed into
//! independent ChaCha streams so parallel batches stay reproducible.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::kahler::KahlerState;
use crate::linalg::{CMatrix, RMatrix, RVector};
use crate::operator::ComplexOperator;

pub fn task_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Gaussian (unnormalized) state.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> KahlerState {
    KahlerState::from_stacked(RVector::from_fn(2 * n, |_, _| normal(rng))).expect("n >= 1")
}

/// Uniformly distributed state on the unit g-sphere.
pub fn random_unit_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> KahlerState {
    loop {
        let s = random_state(rng, n);
        if s.norm() > 1e-8 {
            return s.normalized().expect("nonzero");
        }
    }
}

pub fn random_complex_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| Complex64::new(normal(rng), normal(rng)))
}

/// Generic complex operator with O(1) entries.
pub fn random_operator<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexOperator {
    ComplexOperator::from_complex(&random_complex_matrix(rng, n))
}

/// GUE-like Hermitian operator scaled so its spectrum is O(1).
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexOperator {
    let a = random_complex_matrix(rng, n);
    let h = (&a + a.adjoint()) * Complex64::new(0.5 / (n as f64).sqrt(), 0.0);
    ComplexOperator::from_complex(&h)
}

/// Haar-random unitary from the QR decomposition of a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexOperator {
    let qr = random_complex_matrix(rng, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for c in 0..n {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for row in 0..n {
            q[(row, c)] *= phase;
        }
    }
    ComplexOperator::from_complex(&q)
}

pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RMatrix {
    let a = RMatrix::from_fn(n, n, |_, _| normal(rng));
    0.5 * (&a + a.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_c;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = task_rng(5, 0).gen();
        let b: f64 = task_rng(5, 0).gen();
        let c: f64 = task_rng(5, 1).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn generated_unitary_is_unitary() {
        let mut rng = task_rng(1, 0);
        let u = random_unitary(&mut rng, 6).to_complex();
        let err = max_abs_c(&(u.adjoint() * &u - CMatrix::identity(6, 6)));
        assert!(err < 1e-13, "{err}");
    }

    #[test]
    fn generated_hermitian_is_hermitian() {
        let mut rng = task_rng(2, 0);
        let h = random_hermitian(&mut rng, 5).to_complex();
        assert!(max_abs_c(&(h.adjoint() - &h)) == 0.0);
    }
}
