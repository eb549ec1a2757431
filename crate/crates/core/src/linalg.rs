//! Small dense helpers: Pauli algebra, 3×3 adjugate, ordered symmetric
//! eigendecompositions and a few geometric utilities on the unit sphere.

use nalgebra::{Matrix2, Matrix3, Matrix4, SymmetricEigen, Vector3};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix2 = Matrix2<C64>;
pub type CMatrix4 = Matrix4<C64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// The Pauli matrices σ₁, σ₂, σ₃.
pub fn pauli() -> [CMatrix2; 3] {
    [
        Matrix2::new(ZERO, ONE, ONE, ZERO),
        Matrix2::new(ZERO, -I, I, ZERO),
        Matrix2::new(ONE, ZERO, ZERO, -ONE),
    ]
}

pub fn identity2() -> CMatrix2 {
    Matrix2::identity()
}

/// Kronecker product of two 2×2 complex matrices, in the |00⟩,|01⟩,|10⟩,|11⟩ basis.
pub fn kron(a: &CMatrix2, b: &CMatrix2) -> CMatrix4 {
    CMatrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// ⟨n, σ⟩ = n₁σ₁ + n₂σ₂ + n₃σ₃.
pub fn bloch_operator(n: &Vector3<f64>) -> CMatrix2 {
    let s = pauli();
    s[0] * C64::from(n[0]) + s[1] * C64::from(n[1]) + s[2] * C64::from(n[2])
}

/// Transpose of the cofactor matrix. Well defined for singular input.
pub fn adjugate(m: &Matrix3<f64>) -> Matrix3<f64> {
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| {
        m[(r0, c0)] * m[(r1, c1)] - m[(r0, c1)] * m[(r1, c0)]
    };
    // cofactor C_ij, then transpose into adj_ji
    let cof = Matrix3::new(
        c(1, 2, 1, 2),
        -c(1, 2, 0, 2),
        c(1, 2, 0, 1),
        -c(0, 2, 1, 2),
        c(0, 2, 0, 2),
        -c(0, 2, 0, 1),
        c(0, 1, 1, 2),
        -c(0, 1, 0, 2),
        c(0, 1, 0, 1),
    );
    cof.transpose()
}

/// Rank-one map z ↦ ⟨z, x⟩x.
pub fn outer(x: &Vector3<f64>) -> Matrix3<f64> {
    x * x.transpose()
}

/// Largest absolute entry.
pub fn max_abs3(m: &Matrix3<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn max_abs4(m: &CMatrix4) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.norm()))
}

/// Flip `v` so that its first component with |c| > 1e-12 is positive.
pub fn canonical_sign(v: &mut Vector3<f64>) {
    if let Some(c) = v.iter().copied().find(|c| c.abs() > 1e-12) {
        if c < 0.0 {
            *v = -*v;
        }
    }
}

/// Ordered eigendecomposition of a real symmetric 3×3 matrix.
///
/// Columns of `vectors` are unit eigenvectors matching `values`. The first two
/// columns follow the first-nonzero-component-positive convention and the third
/// is their cross product, so the basis is always right handed.
#[derive(Clone, Debug, PartialEq)]
pub struct SymEigen3 {
    pub values: [f64; 3],
    pub vectors: Matrix3<f64>,
}

impl SymEigen3 {
    pub fn descending(m: &Matrix3<f64>) -> Self {
        Self::ordered(m, true)
    }

    pub fn ascending(m: &Matrix3<f64>) -> Self {
        Self::ordered(m, false)
    }

    fn ordered(m: &Matrix3<f64>, descending: bool) -> Self {
        let sym = (m + m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| {
            let (va, vb) = (eig.eigenvalues[a], eig.eigenvalues[b]);
            if descending {
                vb.total_cmp(&va)
            } else {
                va.total_cmp(&vb)
            }
        });
        let values = [
            eig.eigenvalues[idx[0]],
            eig.eigenvalues[idx[1]],
            eig.eigenvalues[idx[2]],
        ];
        let mut e0: Vector3<f64> = eig.eigenvectors.column(idx[0]).into_owned().normalize();
        let mut e1: Vector3<f64> = eig.eigenvectors.column(idx[1]).into_owned();
        // re-orthogonalise against rounding
        e1 = (e1 - e0 * e0.dot(&e1)).normalize();
        canonical_sign(&mut e0);
        canonical_sign(&mut e1);
        let e2 = e0.cross(&e1);
        SymEigen3 {
            values,
            vectors: Matrix3::from_columns(&[e0, e1, e2]),
        }
    }

    pub fn vector(&self, i: usize) -> Vector3<f64> {
        self.vectors.column(i).into_owned()
    }
}

/// Eigenvalues of a Hermitian 4×4 matrix, ascending.
pub fn hermitian_eigenvalues4(m: &CMatrix4) -> [f64; 4] {
    let h = (m + m.adjoint()) * C64::from(0.5);
    let eig = SymmetricEigen::new(h);
    let mut v = [
        eig.eigenvalues[0],
        eig.eigenvalues[1],
        eig.eigenvalues[2],
        eig.eigenvalues[3],
    ];
    v.sort_by(f64::total_cmp);
    v
}

/// Unit vector at polar angle `theta` from e₃ and azimuth `phi`.
pub fn spherical(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}

/// Some unit vector orthogonal to `v`.
pub fn orthogonal_unit(v: &Vector3<f64>) -> Vector3<f64> {
    let pick = if v[0].abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    v.cross(&pick).normalize()
}

/// Rotation (det +1) whose first column is `v`.
pub fn frame_with_first(v: &Vector3<f64>) -> Matrix3<f64> {
    let a = v.normalize();
    let b = orthogonal_unit(&a);
    let c = a.cross(&b);
    Matrix3::from_columns(&[a, b, c])
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
///
/// Returns `(argmin, min)`; stops when the bracket is narrower than `tol` or
/// after `max_iter` shrink steps.
pub fn golden_section<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> (f64, f64) {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (hi - lo).abs() <= tol {
            break;
        }
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn adjugate_matches_det_times_inverse() {
        let m = Matrix3::new(1.0, 2.0, 0.5, -0.3, 0.7, 1.1, 0.2, -0.4, 0.9);
        let adj = adjugate(&m);
        let expect = m.try_inverse().unwrap() * m.determinant();
        assert!(max_abs3(&(adj - expect)) < 1e-12);
        assert!(max_abs3(&(m * adj - Matrix3::identity() * m.determinant())) < 1e-12);
    }

    #[test]
    fn adjugate_of_singular_rank_one() {
        let m = Matrix3::new(0.4, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!(max_abs3(&adjugate(&m)) < 1e-15);
        let m = Matrix3::from_diagonal(&Vector3::new(2.0, 3.0, 0.0));
        let adj = adjugate(&m);
        assert_abs_diff_eq!(adj[(2, 2)], 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(adj[(0, 0)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pauli_products() {
        let s = pauli();
        // σ₁σ₂ = iσ₃
        let prod = s[0] * s[1];
        let expect = s[2] * I;
        assert!((prod - expect).iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn ordered_eigen_is_right_handed() {
        let m = Matrix3::new(2.0, 0.3, -0.1, 0.3, 1.0, 0.2, -0.1, 0.2, 0.5);
        for e in [SymEigen3::descending(&m), SymEigen3::ascending(&m)] {
            assert_abs_diff_eq!(e.vectors.determinant(), 1.0, epsilon = 1e-12);
            for i in 0..3 {
                let v = e.vector(i);
                assert!((m * v - v * e.values[i]).amax() < 1e-12);
            }
        }
        let d = SymEigen3::descending(&m);
        assert!(d.values[0] >= d.values[1] && d.values[1] >= d.values[2]);
    }

    #[test]
    fn golden_section_finds_parabola_vertex() {
        let (x, fx) = golden_section(|t| (t - 0.3).powi(2) + 1.0, -1.0, 2.0, 1e-12, 200);
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-6);
        assert_abs_diff_eq!(fx, 1.0, epsilon = 1e-12);
    }
}
