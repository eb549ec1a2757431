//! Random states and rotations for test suites and certification runs.

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use crate::bloch::TwoQubitState;
use crate::linalg::{CMatrix4, C64};

/// ρ = GG†/tr(GG†) with G a 4×4 complex Ginibre matrix.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    let g = CMatrix4::from_fn(|_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    let gg = g * g.adjoint();
    let tr = gg.trace().re;
    let mut rho = gg / C64::from(tr);
    // exact Hermiticity
    rho = (rho + rho.adjoint()) * C64::from(0.5);
    TwoQubitState::new(rho).expect("Ginibre construction yields a state")
}

/// Haar-distributed element of SO(3) (Gaussian QR with sign correction).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Matrix3<f64> {
    let a = Matrix3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = a.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for i in 0..3 {
        if r[(i, i)] < 0.0 {
            q.set_column(i, &(-q.column(i)));
        }
    }
    if q.determinant() < 0.0 {
        q.set_column(0, &(-q.column(0)));
    }
    q
}

/// Uniform point on S².
pub fn random_axis<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-8 {
            return v / n;
        }
    }
}

/// `n` Ginibre states from a ChaCha8 stream seeded with `seed`.
pub fn ginibre_suite(seed: u64, n: usize) -> Vec<TwoQubitState> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_state(&mut rng)).collect()
}
