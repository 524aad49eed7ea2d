//! Random inputs shared by the unit tests.

use num_complex::Complex64;
use rand::Rng;

use crate::model::{ComplexMatrix3, DensityMatrix, SystemParams};

pub fn random_complex_matrix<R: Rng>(rng: &mut R) -> ComplexMatrix3 {
    ComplexMatrix3::from_fn(|_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_hermitian<R: Rng>(rng: &mut R) -> ComplexMatrix3 {
    let a = random_complex_matrix(rng);
    (a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// ρ = AA† / tr(AA†), full rank with probability one.
pub fn random_density<R: Rng>(rng: &mut R) -> DensityMatrix {
    let a = random_complex_matrix(rng);
    let m = a * a.adjoint();
    let tr = m.trace();
    DensityMatrix::new(m / tr).unwrap()
}

pub fn random_params<R: Rng>(rng: &mut R) -> SystemParams {
    let gamma1 = rng.random_range(0.5..6.0);
    SystemParams::new(
        rng.random_range(10.0..1000.0),
        rng.random_range(10.0..1000.0),
        gamma1,
        gamma1 * rng.random_range(0.0..0.1),
        rng.random_range(0.0..std::f64::consts::TAU),
    )
}
