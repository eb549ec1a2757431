//! Local projective measurement on the first qubit and the trace norm of the
//! state change it causes.
//!
//! The trace norm is available two ways: from the 4×4 spectrum
//! ([`trace_norm_direct`]) and from the Bloch data alone
//! ([`trace_norm_closed`]). The closed form is
//!
//! ‖S‖₁ = (1/√2)·√(g₁ + √(g₁² − g₂)),
//!
//! g₁ = ‖𝓜x‖² + tr(𝓜KKᵀ), g₂ = 4(‖Kᵀ𝓜x‖² + ‖(adj K)v‖²), 𝓜 = I − vvᵀ.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::bloch::{BlochForm, TwoQubitState};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::grid::fibonacci_hemisphere;
use crate::linalg::{
    adjugate, bloch_operator, hermitian_eigenvalues4, identity2, kron, outer, CMatrix4, SymEigen3,
    C64,
};

/// Relative tolerance for membership of the singular set.
pub const SINGULAR_TOL: f64 = 1e-10;
const CLAMP_TOL: f64 = 1e-12;
const RADICAND_ERROR_TOL: f64 = 1e-9;

/// Unit vector v; v and −v describe the same measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct MeasurementAxis {
    v: Vector3<f64>,
}

impl MeasurementAxis {
    pub const UNIT_TOL: f64 = 1e-12;

    pub fn new(v: Vector3<f64>) -> Result<Self> {
        let n = v.norm();
        if !((n - 1.0).abs() <= Self::UNIT_TOL) {
            return Err(Error::NotUnitAxis(n));
        }
        Ok(MeasurementAxis { v })
    }

    /// Rescales any nonzero vector onto the sphere.
    pub fn normalized(v: Vector3<f64>) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::NotUnitAxis(n));
        }
        Ok(MeasurementAxis { v: v / n })
    }

    pub fn e1() -> Self {
        MeasurementAxis { v: Vector3::x() }
    }

    pub fn e2() -> Self {
        MeasurementAxis { v: Vector3::y() }
    }

    pub fn e3() -> Self {
        MeasurementAxis { v: Vector3::z() }
    }

    pub fn vector(&self) -> Vector3<f64> {
        self.v
    }

    /// P_v = vvᵀ.
    pub fn projector(&self) -> Matrix3<f64> {
        outer(&self.v)
    }

    /// 𝓜 = I − vvᵀ.
    pub fn complement(&self) -> Matrix3<f64> {
        Matrix3::identity() - self.projector()
    }

    /// Representative with the first non-negligible component positive.
    pub fn canonical(&self) -> Self {
        let mut v = self.v;
        crate::linalg::canonical_sign(&mut v);
        MeasurementAxis { v }
    }

    /// Angle between the measurement directions, in [0, π/2].
    pub fn angle_to(&self, other: &MeasurementAxis) -> f64 {
        self.v.dot(&other.v).abs().min(1.0).acos()
    }
}

impl TryFrom<[f64; 3]> for MeasurementAxis {
    type Error = Error;

    fn try_from(a: [f64; 3]) -> Result<Self> {
        MeasurementAxis::normalized(Vector3::from(a))
    }
}

impl From<MeasurementAxis> for [f64; 3] {
    fn from(a: MeasurementAxis) -> Self {
        a.v.into()
    }
}

fn spin_projectors(v: &Vector3<f64>) -> [CMatrix4; 2] {
    let half = C64::from(0.5);
    let sv = bloch_operator(v);
    let id = identity2();
    [
        kron(&((id + sv) * half), &id),
        kron(&((id - sv) * half), &id),
    ]
}

/// S(𝓜) for a raw 4×4 matrix, no positivity required.
pub fn disturbance_of_matrix(rho: &CMatrix4, axis: &MeasurementAxis) -> CMatrix4 {
    let out = spin_projectors(&axis.v)
        .iter()
        .fold(CMatrix4::zeros(), |acc, p| acc + p * rho * p);
    rho - out
}

/// (𝒫 ⊗ id)(ρ) with 𝒫(A) = P₊AP₊ + P₋AP₋, P± = ½(I ± v·σ).
pub fn measure_channel(state: &TwoQubitState, axis: &MeasurementAxis) -> TwoQubitState {
    let rho = state.matrix();
    let out = spin_projectors(&axis.v)
        .iter()
        .fold(CMatrix4::zeros(), |acc, p| acc + p * rho * p);
    TwoQubitState::from_trusted((out + out.adjoint()) * C64::from(0.5))
}

/// S(𝓜) = ρ − (𝒫 ⊗ id)(ρ).
pub fn disturbance_matrix(state: &TwoQubitState, axis: &MeasurementAxis) -> CMatrix4 {
    state.matrix() - measure_channel(state, axis).matrix()
}

/// Sum of absolute eigenvalues.
pub fn trace_norm_direct(s: &CMatrix4) -> f64 {
    hermitian_eigenvalues4(s).iter().map(|e| e.abs()).sum()
}

/// Bloch-side data needed by the closed form, precomputed once per state.
#[derive(Clone, Debug)]
pub struct Objective {
    x: Vector3<f64>,
    k: Matrix3<f64>,
    kkt: Matrix3<f64>,
    tr_kkt: f64,
    ete: Matrix3<f64>,
}

impl Objective {
    pub fn new(b: &BlochForm) -> Self {
        let kkt = b.kkt();
        let e = adjugate(&b.k);
        Objective {
            x: b.x,
            k: b.k,
            kkt,
            tr_kkt: kkt.trace(),
            ete: e.transpose() * e,
        }
    }

    /// (g₁, g₂) at a unit vector.
    pub fn g_pair(&self, v: &Vector3<f64>) -> (f64, f64) {
        let mx = self.x - v * v.dot(&self.x);
        let g1 = mx.norm_squared() + self.tr_kkt - v.dot(&(self.kkt * v));
        let ktmx = self.k.transpose() * mx;
        let g2 = 4.0 * (ktmx.norm_squared() + v.dot(&(self.ete * v)));
        (g1, g2)
    }

    /// ‖S‖₁² with the inner radicand floored at zero.
    pub fn value_squared(&self, v: &Vector3<f64>) -> f64 {
        let (g1, g2) = self.g_pair(v);
        0.5 * (g1 + (g1 * g1 - g2).max(0.0).sqrt())
    }

    /// ‖S‖₁ with the inner radicand floored at zero.
    pub fn value(&self, v: &Vector3<f64>) -> f64 {
        self.value_squared(v).max(0.0).sqrt()
    }
}

pub fn g_pair(b: &BlochForm, axis: &MeasurementAxis) -> (f64, f64) {
    Objective::new(b).g_pair(&axis.v)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceReport {
    pub trace_norm: f64,
    pub g1: f64,
    pub g2: f64,
    pub in_singular_set: bool,
}

fn singular_membership(g1: f64, g2: f64) -> bool {
    (g1 * g1 - g2).abs() <= SINGULAR_TOL * (g1 * g1).max(1.0)
}

/// Closed-form trace norm of S(𝓜) from the Bloch data.
pub fn trace_norm_closed(b: &BlochForm, axis: &MeasurementAxis) -> Result<DisturbanceReport> {
    let (g1, g2) = g_pair(b, axis);
    let mut rad = g1 * g1 - g2;
    if rad < -RADICAND_ERROR_TOL {
        return Err(Error::NegativeRadicand(rad));
    }
    if (-CLAMP_TOL..0.0).contains(&rad) {
        rad = 0.0;
    }
    let outer = (g1 + rad.max(0.0).sqrt()).max(0.0);
    Ok(DisturbanceReport {
        trace_norm: (0.5 * outer).sqrt(),
        g1,
        g2,
        in_singular_set: singular_membership(g1, g2),
    })
}

/// g₁(v)² − g₂(v); zero (within [`SINGULAR_TOL`]) on the singular set.
pub fn singular_set_residual(b: &BlochForm, axis: &MeasurementAxis) -> f64 {
    let (g1, g2) = g_pair(b, axis);
    g1 * g1 - g2
}

/// L₋ = KKᵀ − xxᵀ.
pub fn l_minus(b: &BlochForm) -> Matrix3<f64> {
    b.kkt() - outer(&b.x)
}

/// L₊ = KKᵀ + xxᵀ.
pub fn l_plus(b: &BlochForm) -> Matrix3<f64> {
    b.kkt() + outer(&b.x)
}

#[derive(Clone, Debug, PartialEq)]
pub enum SingularSet {
    Axes(Vec<MeasurementAxis>),
    WholeSphere,
}

/// Degeneracy threshold on the L₋ spectrum, scaled by its spread.
pub fn degeneracy_tol(spread: f64) -> f64 {
    1e-9 * spread.max(1.0)
}

/// Points of the singular set, from the L₋ eigenbasis: v₂ = 0,
/// v₁² = (λ̂₁−λ̂₂)/(λ̂₁−λ̂₃), v₃² = (λ̂₂−λ̂₃)/(λ̂₁−λ̂₃), both relative signs.
pub fn singular_set_solve(b: &BlochForm) -> SingularSet {
    let eig = SymEigen3::descending(&l_minus(b));
    let [l1, l2, l3] = eig.values;
    let tol = degeneracy_tol(l1 - l3);
    if l1 - l3 <= tol {
        return SingularSet::WholeSphere;
    }
    let e = |i| eig.vector(i);
    if l1 - l2 <= tol {
        return SingularSet::Axes(vec![MeasurementAxis { v: e(2) }.canonical()]);
    }
    let c1 = ((l1 - l2) / (l1 - l3)).clamp(0.0, 1.0).sqrt();
    let c3 = ((l2 - l3) / (l1 - l3)).clamp(0.0, 1.0).sqrt();
    let mut axes = vec![MeasurementAxis::normalized(e(0) * c1 + e(2) * c3)
        .expect("unit combination")
        .canonical()];
    if c1 > 1e-12 && c3 > 1e-12 {
        axes.push(
            MeasurementAxis::normalized(e(0) * c1 - e(2) * c3)
                .expect("unit combination")
                .canonical(),
        );
    }
    SingularSet::Axes(axes)
}

/// Sampled check of the two conditions under which the minimum of g₁ over the
/// singular set is the global minimum of ‖S‖₁:
/// g₁(v*) ≤ 2g₁(v) for all v, and g₁(v*)g₁(v) ≥ ½(g₂(v) + g₂(v*)) whenever
/// g₁(v) ≤ g₁(v*). A `false` result still gives ‖S‖₁ ≤ √(g₁(v*)/2).
pub fn singular_min_check(b: &BlochForm, v_star: &MeasurementAxis, samples: usize) -> bool {
    singular_min_check_with(b, v_star, samples, Execution::default())
}

pub fn singular_min_check_with(
    b: &BlochForm,
    v_star: &MeasurementAxis,
    samples: usize,
    exec: Execution,
) -> bool {
    let obj = Objective::new(b);
    let (g1s, g2s) = obj.g_pair(&v_star.v);
    let scale = g1s.abs().max(g2s.abs()).max(1e-300);
    let slack = 1e-12 * scale.max(1.0);
    let pts = fibonacci_hemisphere(samples);
    exec::all(exec, pts.len(), |i| {
        let (g1, g2) = obj.g_pair(&pts[i]);
        let war1 = g1s <= 2.0 * g1 + slack;
        let war2 = g1 > g1s || g1s * g1 >= 0.5 * (g2 + g2s) - slack;
        war1 && war2
    })
}
