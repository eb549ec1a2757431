//! Density matrices, their Bloch/correlation form, and local SO(3)×SO(3)
//! frame changes.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    bloch_operator, canonical_sign, hermitian_eigenvalues4, identity2, kron, max_abs3, max_abs4,
    pauli, CMatrix4, C64,
};

/// Absolute tolerance used by [`validate_state`].
pub const VALIDATION_TOL: f64 = 1e-10;

/// A validated two-qubit density matrix in the |00⟩,|01⟩,|10⟩,|11⟩ basis.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitState {
    rho: CMatrix4,
}

impl TwoQubitState {
    pub fn new(rho: CMatrix4) -> Result<Self> {
        validate_state(rho)
    }

    pub fn matrix(&self) -> &CMatrix4 {
        &self.rho
    }

    pub fn bloch(&self) -> BlochForm {
        to_bloch(self)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues4(&self.rho)[0]
    }

    /// Constructor for matrices produced by this crate whose validity is
    /// guaranteed by construction (channel outputs).
    pub(crate) fn from_trusted(rho: CMatrix4) -> Self {
        TwoQubitState { rho }
    }
}

/// Checks Hermiticity, unit trace and positivity, each to [`VALIDATION_TOL`].
pub fn validate_state(rho: CMatrix4) -> Result<TwoQubitState> {
    let herm = max_abs4(&(rho - rho.adjoint()));
    if !(herm <= VALIDATION_TOL) {
        return Err(Error::NotHermitian(herm));
    }
    let tr = rho.trace();
    let trace_err = (tr - C64::from(1.0)).norm();
    if !(trace_err <= VALIDATION_TOL) {
        return Err(Error::NotUnitTrace(trace_err));
    }
    let min_eig = hermitian_eigenvalues4(&rho)[0];
    if min_eig < -VALIDATION_TOL {
        return Err(Error::NotPositive(min_eig));
    }
    Ok(TwoQubitState { rho })
}

/// Bloch vectors x (subsystem 𝒜), y (subsystem ℬ) and correlation matrix K.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochForm {
    pub x: Vector3<f64>,
    pub y: Vector3<f64>,
    pub k: Matrix3<f64>,
}

impl BlochForm {
    pub fn new(x: Vector3<f64>, y: Vector3<f64>, k: Matrix3<f64>) -> Self {
        BlochForm { x, y, k }
    }

    pub fn maximally_mixed() -> Self {
        BlochForm::new(Vector3::zeros(), Vector3::zeros(), Matrix3::zeros())
    }

    /// K Kᵀ.
    pub fn kkt(&self) -> Matrix3<f64> {
        self.k * self.k.transpose()
    }

    pub fn to_state(&self) -> Result<TwoQubitState> {
        validate_state(from_bloch(self))
    }
}

/// x_j = tr(ρ σ_j⊗I), y_j = tr(ρ I⊗σ_j), K_jk = tr(ρ σ_j⊗σ_k).
pub fn to_bloch(state: &TwoQubitState) -> BlochForm {
    let rho = state.matrix();
    let s = pauli();
    let id = identity2();
    let expect = |op: CMatrix4| (rho * op).trace().re;
    let x = Vector3::from_fn(|j, _| expect(kron(&s[j], &id)));
    let y = Vector3::from_fn(|j, _| expect(kron(&id, &s[j])));
    let k = Matrix3::from_fn(|j, l| expect(kron(&s[j], &s[l])));
    BlochForm { x, y, k }
}

/// ¼(I⊗I + ⟨x,σ⟩⊗I + I⊗⟨y,σ⟩ + Σ K_jk σ_j⊗σ_k).
///
/// Positivity is not implied by the Bloch data; pass the result through
/// [`validate_state`] when it matters.
pub fn from_bloch(b: &BlochForm) -> CMatrix4 {
    let s = pauli();
    let id = identity2();
    let mut rho = kron(&id, &id) + kron(&bloch_operator(&b.x), &id) + kron(&id, &bloch_operator(&b.y));
    for j in 0..3 {
        for l in 0..3 {
            if b.k[(j, l)] != 0.0 {
                rho += kron(&s[j], &s[l]) * C64::from(b.k[(j, l)]);
            }
        }
    }
    rho * C64::from(0.25)
}

/// Pair of rotations with U K Vᵀ = diag(d).
#[derive(Clone, Debug, PartialEq)]
pub struct LocalFrame {
    pub u: Matrix3<f64>,
    pub v: Matrix3<f64>,
    pub d: Vector3<f64>,
}

/// Brings K to signed-diagonal form with U, V ∈ SO(3).
///
/// Singular values are ordered by decreasing magnitude. Reflections left by the
/// SVD are absorbed into the sign of the last diagonal entry.
pub fn diagonalize_correlation(b: &BlochForm) -> (LocalFrame, BlochForm) {
    let svd = b.k.svd(true, true);
    let w = svd.u.expect("svd requested u");
    let zt = svd.v_t.expect("svd requested v_t");
    let z = zt.transpose();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));

    let mut wc: Vec<Vector3<f64>> = order.iter().map(|&i| w.column(i).into_owned()).collect();
    let mut zc: Vec<Vector3<f64>> = order.iter().map(|&i| z.column(i).into_owned()).collect();
    for i in 0..2 {
        let before = wc[i];
        canonical_sign(&mut wc[i]);
        if wc[i] != before {
            zc[i] = -zc[i];
        }
    }
    let mut wm = Matrix3::from_columns(&wc);
    let mut zm = Matrix3::from_columns(&zc);
    if wm.determinant() < 0.0 {
        wm.set_column(2, &(-wm.column(2)));
    }
    if zm.determinant() < 0.0 {
        zm.set_column(2, &(-zm.column(2)));
    }
    let u = wm.transpose();
    let v = zm.transpose();
    let diag = u * b.k * v.transpose();
    let d = diag.diagonal();
    let frame = LocalFrame { u, v, d };
    let transformed = BlochForm {
        x: u * b.x,
        y: v * b.y,
        k: Matrix3::from_diagonal(&d),
    };
    (frame, transformed)
}

/// Checks UUᵀ = I and det U = +1 to 1e-10.
pub fn check_special_orthogonal(u: &Matrix3<f64>) -> Result<()> {
    let orthogonality = max_abs3(&(u * u.transpose() - Matrix3::identity()));
    let det = u.determinant();
    if orthogonality > 1e-10 || (det - 1.0).abs() > 1e-10 {
        return Err(Error::NotSpecialOrthogonal { orthogonality, det });
    }
    Ok(())
}

/// (x, y, K) ↦ (Ux, Vy, UKVᵀ).
pub fn apply_local_rotation(b: &BlochForm, u: &Matrix3<f64>, v: &Matrix3<f64>) -> Result<BlochForm> {
    check_special_orthogonal(u)?;
    check_special_orthogonal(v)?;
    Ok(BlochForm {
        x: u * b.x,
        y: v * b.y,
        k: u * b.k * v.transpose(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::sampling::{random_rotation, random_state};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quarter_identity() -> CMatrix4 {
        CMatrix4::identity() * C64::from(0.25)
    }

    #[test]
    fn maximally_mixed_is_valid_and_has_zero_bloch_data() {
        let s = validate_state(quarter_identity()).unwrap();
        let b = s.bloch();
        assert_eq!(b, BlochForm::maximally_mixed());
    }

    #[test]
    fn werner_outside_region_is_not_positive() {
        let b = BlochForm::new(Vector3::zeros(), Vector3::zeros(), Matrix3::identity() * 0.5);
        match validate_state(from_bloch(&b)) {
            Err(Error::NotPositive(e)) => assert_abs_diff_eq!(e, (1.0 - 3.0 * 0.5) / 4.0, epsilon = 1e-12),
            other => panic!("expected NotPositive, got {other:?}"),
        }
    }

    #[test]
    fn shifted_spectrum_is_not_positive() {
        // unitary conjugation of diag(0.51, 0.3, 0.2, -0.01)
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let base = random_state(&mut rng);
        let eig = nalgebra::SymmetricEigen::new(*base.matrix());
        let spectrum = nalgebra::Vector4::new(0.51, 0.3, 0.2, -0.01).map(C64::from);
        let rho = eig.eigenvectors * CMatrix4::from_diagonal(&spectrum) * eig.eigenvectors.adjoint();
        match validate_state(rho) {
            Err(Error::NotPositive(e)) => assert_abs_diff_eq!(e, -0.01, epsilon = 1e-12),
            other => panic!("expected NotPositive, got {other:?}"),
        }
    }

    #[test]
    fn rejects_non_hermitian_and_bad_trace() {
        let mut rho = quarter_identity();
        rho[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(validate_state(rho), Err(Error::NotHermitian(_))));
        let rho = quarter_identity() * C64::from(1.1);
        assert!(matches!(validate_state(rho), Err(Error::NotUnitTrace(_))));
    }

    #[test]
    fn pure_n_bloch_data() {
        let b = families::pure_n(0.6).unwrap().bloch();
        assert!((b.x - Vector3::new(0.0, 0.0, 0.8)).amax() < 1e-12);
        let k = Matrix3::from_diagonal(&Vector3::new(0.6, -0.6, 1.0));
        assert!(max_abs3(&(b.k - k)) < 1e-12);
    }

    #[test]
    fn from_bloch_has_unit_trace_for_arbitrary_data() {
        let b = BlochForm::new(
            Vector3::new(3.0, -1.0, 0.2),
            Vector3::new(0.5, 7.0, 0.0),
            Matrix3::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0),
        );
        let tr = from_bloch(&b).trace();
        assert_abs_diff_eq!(tr.re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(tr.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn werner_matrix_from_bloch() {
        let t = 0.2;
        let rho = from_bloch(&BlochForm::new(Vector3::zeros(), Vector3::zeros(), Matrix3::identity() * t));
        let w = families::werner(t).unwrap();
        assert!(max_abs4(&(rho - w.matrix())) < 1e-15);
        assert_abs_diff_eq!(rho[(1, 2)].re, 2.0 * t / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn diagonal_input_gives_signed_permutations() {
        let b = BlochForm::new(
            Vector3::new(0.1, 0.0, 0.0),
            Vector3::zeros(),
            Matrix3::from_diagonal(&Vector3::new(0.2, -0.5, 0.3)),
        );
        let (frame, out) = diagonalize_correlation(&b);
        for m in [frame.u, frame.v] {
            assert_abs_diff_eq!(m.determinant(), 1.0, epsilon = 1e-12);
            assert!(m.iter().all(|e| e.abs() < 1e-12 || (e.abs() - 1.0).abs() < 1e-12));
        }
        let mags: Vec<f64> = frame.d.iter().map(|d| d.abs()).collect();
        assert_abs_diff_eq!(mags[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(mags[1], 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(mags[2], 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(out.x.norm(), 0.1, epsilon = 1e-12);
    }

    #[test]
    fn scaled_rotation_has_flat_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let v0 = random_rotation(&mut rng);
        let b = BlochForm::new(Vector3::zeros(), Vector3::zeros(), v0 * -0.4);
        let (frame, _) = diagonalize_correlation(&b);
        for d in frame.d.iter() {
            assert_abs_diff_eq!(d.abs(), 0.4, epsilon = 1e-12);
        }
    }

    #[test]
    fn random_states_diagonalize_and_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let s = random_state(&mut rng);
            let b = s.bloch();
            let back = from_bloch(&b);
            assert!(max_abs4(&(back - s.matrix())) < 1e-12);
            assert!(b.x.norm() <= 1.0 + 1e-12 && b.y.norm() <= 1.0 + 1e-12);

            let (frame, out) = diagonalize_correlation(&b);
            let resid = frame.u * b.k * frame.v.transpose() - Matrix3::from_diagonal(&frame.d);
            assert!(max_abs3(&resid) < 1e-12);
            assert!(max_abs3(&(out.k - Matrix3::from_diagonal(&frame.d))) < 1e-15);
            check_special_orthogonal(&frame.u).unwrap();
            check_special_orthogonal(&frame.v).unwrap();
            let mut mags: Vec<f64> = frame.d.iter().map(|d| d.abs()).collect();
            mags.sort_by(|a, b| b.total_cmp(a));
            let sv = b.k.singular_values();
            let mut sv: Vec<f64> = sv.iter().copied().collect();
            sv.sort_by(|a, b| b.total_cmp(a));
            for (m, s) in mags.iter().zip(&sv) {
                assert_abs_diff_eq!(m, s, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn local_rotation_identity_and_half_turn() {
        let b = BlochForm::new(Vector3::new(1.0, 0.0, 0.0), Vector3::zeros(), Matrix3::zeros());
        let same = apply_local_rotation(&b, &Matrix3::identity(), &Matrix3::identity()).unwrap();
        assert_eq!(same, b);
        let rz = Matrix3::new(-1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0);
        let turned = apply_local_rotation(&b, &rz, &Matrix3::identity()).unwrap();
        assert!((turned.x - Vector3::new(-1.0, 0.0, 0.0)).amax() < 1e-15);
    }

    #[test]
    fn local_rotation_rejects_reflections() {
        let b = BlochForm::maximally_mixed();
        let refl = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert!(matches!(
            apply_local_rotation(&b, &refl, &Matrix3::identity()),
            Err(Error::NotSpecialOrthogonal { .. })
        ));
        let scaled = Matrix3::identity() * 1.01;
        assert!(apply_local_rotation(&b, &Matrix3::identity(), &scaled).is_err());
    }
}
