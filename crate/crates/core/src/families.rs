//! Parametric two-qubit families with closed-form discord, used as fixtures.
//!
//! Every constructor returns a validated state or
//! [`Error::OutOfPositivityRegion`].

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use crate::bloch::{from_bloch, validate_state, BlochForm, TwoQubitState};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues4, CMatrix4, C64};

const REGION_TOL: f64 = 1e-12;

fn out_of_region(family: &'static str, detail: impl Into<String>) -> Error {
    Error::OutOfPositivityRegion {
        family,
        detail: detail.into(),
    }
}

fn checked(family: &'static str, rho: CMatrix4) -> Result<TwoQubitState> {
    validate_state(rho).map_err(|e| out_of_region(family, e.to_string()))
}

fn real4(rows: [[f64; 4]; 4], scale: f64) -> CMatrix4 {
    Matrix4::from_fn(|r, c| C64::from(rows[r][c] * scale))
}

/// ρ_W with x = y = 0, K = t·I₃; valid for −1 ≤ t ≤ 1/3.
pub fn werner(t: f64) -> Result<TwoQubitState> {
    if !(-1.0 - REGION_TOL..=1.0 / 3.0 + REGION_TOL).contains(&t) {
        return Err(out_of_region("werner", format!("t = {t} not in [-1, 1/3]")));
    }
    let rho = real4(
        [
            [1.0 + t, 0.0, 0.0, 0.0],
            [0.0, 1.0 - t, 2.0 * t, 0.0],
            [0.0, 2.0 * t, 1.0 - t, 0.0],
            [0.0, 0.0, 0.0, 1.0 + t],
        ],
        0.25,
    );
    checked("werner", rho)
}

/// (1−t)·I/4 + t·|Ψ₊⟩⟨Ψ₊|; valid for −1/3 ≤ t ≤ 1.
pub fn isotropic(t: f64) -> Result<TwoQubitState> {
    if !(-1.0 / 3.0 - REGION_TOL..=1.0 + REGION_TOL).contains(&t) {
        return Err(out_of_region("isotropic", format!("t = {t} not in [-1/3, 1]")));
    }
    let rho = real4(
        [
            [1.0 + t, 0.0, 0.0, 2.0 * t],
            [0.0, 1.0 - t, 0.0, 0.0],
            [0.0, 0.0, 1.0 - t, 0.0],
            [2.0 * t, 0.0, 0.0, 1.0 + t],
        ],
        0.25,
    );
    checked("isotropic", rho)
}

/// Family with K = t·I₃ and arbitrary Bloch vectors:
/// x = (Re z, Im z, (a+b)/2), y = (Re w, Im w, (a−b)/2).
pub fn rho1(a: f64, b: f64, w: C64, z: C64, t: f64) -> Result<TwoQubitState> {
    let q = C64::from(0.25);
    let r = |v: f64| C64::from(v);
    let rho = Matrix4::new(
        r(1.0 + a + t), w.conj(), z.conj(), r(0.0),
        w, r(1.0 + b - t), r(2.0 * t), z.conj(),
        z, r(2.0 * t), r(1.0 - b - t), w.conj(),
        r(0.0), z, w, r(1.0 - a + t),
    ) * q;
    checked("rho1", rho)
}

/// Family with K = t·diag(1, −1, 1); same Bloch parametrisation as [`rho1`].
pub fn rho2(a: f64, b: f64, w: C64, z: C64, t: f64) -> Result<TwoQubitState> {
    let q = C64::from(0.25);
    let r = |v: f64| C64::from(v);
    let rho = Matrix4::new(
        r(1.0 + a + t), w.conj(), z.conj(), r(2.0 * t),
        w, r(1.0 + b - t), r(0.0), z.conj(),
        z, r(0.0), r(1.0 - b - t), w.conj(),
        r(2.0 * t), z, w, r(1.0 - a + t),
    ) * q;
    checked("rho2", rho)
}

/// Printed positivity region of [`rho1`] on the slice x = y = (0, 0, α).
pub fn rho1_region(alpha: f64, t: f64) -> bool {
    let tol = 1e-9;
    alpha.abs() <= 2.0 / 3.0 + tol && 2.0 * alpha.abs() - 1.0 <= t + tol && t <= 1.0 / 3.0 + tol
}

/// Printed positivity region of [`rho2`] on the slice x = y = (0, 0, α).
pub fn rho2_region(alpha: f64, t: f64) -> bool {
    let tol = 1e-9;
    let rad = 1.0 + 2.0 * t - 3.0 * t * t;
    (-1.0 / 3.0 - tol..=1.0 + tol).contains(&t) && alpha.abs() <= 0.5 * rad.max(0.0).sqrt() + tol
}

/// Maximally mixed marginals, K = diag(i₁, i₂, i₃).
pub fn bell_diagonal(i1: f64, i2: f64, i3: f64) -> Result<TwoQubitState> {
    let b = BlochForm::new(
        Vector3::zeros(),
        Vector3::zeros(),
        Matrix3::from_diagonal(&Vector3::new(i1, i2, i3)),
    );
    checked("bell_diagonal", from_bloch(&b))
}

/// Representative of the local orbit of pure states with parameter N ∈ [0, 1].
pub fn pure_n(n: f64) -> Result<TwoQubitState> {
    if !(-REGION_TOL..=1.0 + REGION_TOL).contains(&n) {
        return Err(out_of_region("pure_n", format!("N = {n} not in [0, 1]")));
    }
    let n = n.clamp(0.0, 1.0);
    let s = (1.0 - n * n).sqrt();
    let rho = real4(
        [
            [1.0 + s, 0.0, 0.0, n],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [n, 0.0, 0.0, 1.0 - s],
        ],
        0.5,
    );
    checked("pure_n", rho)
}

/// ρ_θ with x = (0, 0, −sin²θ), K = diag(cosθ sinθ, −cosθ sinθ, 0).
///
/// The matrix is a state for every real θ; the family is usually taken on
/// [0, π/2].
pub fn rho_theta(theta: f64) -> TwoQubitState {
    let (s, c) = theta.sin_cos();
    let rho = real4(
        [
            [2.0 * c * c, 0.0, 0.0, (2.0 * theta).sin()],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 2.0, 0.0],
            [(2.0 * theta).sin(), 0.0, 0.0, 2.0 * s * s],
        ],
        0.25,
    );
    validate_state(rho).expect("rho_theta is a state for every theta")
}

/// X-shaped state with real nonnegative anti-diagonal entries ρ₁₄, ρ₂₃.
pub fn x_state(
    rho11: f64,
    rho22: f64,
    rho33: f64,
    rho44: f64,
    rho14: f64,
    rho23: f64,
) -> Result<TwoQubitState> {
    let fam = "x_state";
    if rho14 < 0.0 || rho23 < 0.0 {
        return Err(out_of_region(fam, "off-diagonal entries must be nonnegative"));
    }
    let tr = rho11 + rho22 + rho33 + rho44;
    if (tr - 1.0).abs() > 1e-10 {
        return Err(out_of_region(fam, format!("diagonal sums to {tr}")));
    }
    if [rho11, rho22, rho33, rho44].iter().any(|d| *d < -1e-10) {
        return Err(out_of_region(fam, "negative diagonal entry"));
    }
    if rho14 * rho14 > rho11 * rho44 + 1e-12 || rho23 * rho23 > rho22 * rho33 + 1e-12 {
        return Err(out_of_region(fam, "anti-diagonal exceeds the geometric mean of its diagonal pair"));
    }
    let rho = real4(
        [
            [rho11, 0.0, 0.0, rho14],
            [0.0, rho22, rho23, 0.0],
            [0.0, rho23, rho33, 0.0],
            [rho14, 0.0, 0.0, rho44],
        ],
        1.0,
    );
    checked(fam, rho)
}

/// Correlation matrix with a single nonzero singular value:
/// K = diag(κ, 0, 0), x = (x₁, 0, x₃), arbitrary y.
pub fn quantum_classical(kappa: f64, x1: f64, x3: f64, y: Vector3<f64>) -> Result<TwoQubitState> {
    let b = BlochForm::new(
        Vector3::new(x1, 0.0, x3),
        y,
        Matrix3::from_diagonal(&Vector3::new(kappa, 0.0, 0.0)),
    );
    checked("quantum_classical", from_bloch(&b))
}

/// The coefficients (w₁, w₂, z) of the beyond-X family, built from
/// γ̃ = √(1 + 16γ²).
pub fn beyond_x_coefficients(gamma: f64) -> (f64, f64, f64) {
    let gt = (1.0 + 16.0 * gamma * gamma).sqrt();
    let sm = (7.0 - gt).max(0.0).sqrt();
    let sp = (7.0 + gt).sqrt();
    let denom = 2.0 * 2.0_f64.sqrt() * gt;
    let w1 = (sm * (gt - 1.0) + sp * (gt + 1.0)) / denom;
    let w2 = (sm * (gt + 1.0) + sp * (gt - 1.0)) / denom;
    let z = (sp - sm) / gt * 2.0_f64.sqrt() * gamma;
    (w1, w2, z)
}

fn beyond_x_matrix(gamma: f64, a: f64) -> CMatrix4 {
    let (w1, w2, z) = beyond_x_coefficients(gamma);
    let r = |v: f64| C64::from(v);
    let iaz = C64::new(0.0, a * z);
    Matrix4::new(
        r(1.0 + a * (1.0 + w2)), -iaz, -iaz, r(a * (2.0 - w1)),
        iaz, r(1.0 + a * (1.0 - w2)), r(a * (2.0 + w1)), iaz,
        iaz, r(a * (2.0 + w1)), r(1.0 - a * (1.0 + w2)), iaz,
        r(a * (2.0 - w1)), -iaz, -iaz, r(1.0 - a * (1.0 - w2)),
    ) * C64::from(0.25)
}

/// Two-parameter family beyond the X shape, with x = (0, 0, a) and
/// K = a·[[2,0,0],[0,w₁,z],[0,z,w₂]]. Requires |γ| ≤ √3; the admissible range
/// of `a` is checked, see [`beyond_x_max_a`].
pub fn beyond_x(gamma: f64, a: f64) -> Result<TwoQubitState> {
    if gamma.abs() > 3.0_f64.sqrt() + REGION_TOL {
        return Err(out_of_region("beyond_x", format!("|gamma| = {} > sqrt(3)", gamma.abs())));
    }
    checked("beyond_x", beyond_x_matrix(gamma, a))
}

/// Largest a ≥ 0 for which [`beyond_x`] is positive semidefinite, by bisection
/// on the minimum eigenvalue to an interval width of 1e-12.
pub fn beyond_x_max_a(gamma: f64) -> f64 {
    let min_eig = |a: f64| hermitian_eigenvalues4(&beyond_x_matrix(gamma, a))[0];
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while min_eig(hi) >= 0.0 {
        hi *= 2.0;
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if min_eig(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Werner,
    Isotropic,
    Rho1,
    Rho2,
    BellDiagonal,
    PureN,
    RhoTheta,
    XState,
    QuantumClassical,
    BeyondX,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::Werner,
        Family::Isotropic,
        Family::Rho1,
        Family::Rho2,
        Family::BellDiagonal,
        Family::PureN,
        Family::RhoTheta,
        Family::XState,
        Family::QuantumClassical,
        Family::BeyondX,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Werner => "werner",
            Family::Isotropic => "isotropic",
            Family::Rho1 => "rho1",
            Family::Rho2 => "rho2",
            Family::BellDiagonal => "bell_diagonal",
            Family::PureN => "pure_n",
            Family::RhoTheta => "rho_theta",
            Family::XState => "x_state",
            Family::QuantumClassical => "quantum_classical",
            Family::BeyondX => "beyond_x",
        }
    }

    /// Parameter names with their defaults.
    pub fn parameters(self) -> &'static [(&'static str, f64)] {
        match self {
            Family::Werner | Family::Isotropic => &[("t", 0.0)],
            Family::Rho1 | Family::Rho2 => &[
                ("a", 0.0),
                ("b", 0.0),
                ("w_re", 0.0),
                ("w_im", 0.0),
                ("z_re", 0.0),
                ("z_im", 0.0),
                ("t", 0.0),
                ("alpha", 0.0),
            ],
            Family::BellDiagonal => &[("i1", 0.0), ("i2", 0.0), ("i3", 0.0)],
            Family::PureN => &[("n", 0.0)],
            Family::RhoTheta => &[("theta", 0.0)],
            Family::XState => &[
                ("rho11", 0.25),
                ("rho22", 0.25),
                ("rho33", 0.25),
                ("rho44", 0.25),
                ("rho14", 0.0),
                ("rho23", 0.0),
            ],
            Family::QuantumClassical => &[
                ("kappa", 0.0),
                ("x1", 0.0),
                ("x3", 0.0),
                ("y1", 0.0),
                ("y2", 0.0),
                ("y3", 0.0),
            ],
            Family::BeyondX => &[("gamma", 0.0), ("a", 0.0)],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// A family together with named parameter values; unset parameters take the
/// family defaults.
///
/// For `rho1`/`rho2`, a nonzero `alpha` selects the slice x = y = (0, 0, α),
/// i.e. a = 2α, b = 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub params: BTreeMap<String, f64>,
}

impl FamilySpec {
    pub fn new(family: Family) -> Self {
        FamilySpec {
            family,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Result<Self> {
        self.set(name, value)?;
        Ok(self)
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let known = self.family.parameters();
        if !known.iter().any(|(n, _)| *n == name) {
            return Err(Error::UnknownParameter {
                family: self.family.name(),
                param: name.to_string(),
                expected: known.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", "),
            });
        }
        self.params.insert(name.to_string(), value);
        Ok(())
    }

    pub fn get(&self, name: &str) -> f64 {
        self.params.get(name).copied().unwrap_or_else(|| {
            self.family
                .parameters()
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, d)| *d)
                .unwrap_or(0.0)
        })
    }

    pub fn build(&self) -> Result<TwoQubitState> {
        let p = |n: &str| self.get(n);
        match self.family {
            Family::Werner => werner(p("t")),
            Family::Isotropic => isotropic(p("t")),
            Family::Rho1 | Family::Rho2 => {
                let (a, b) = if p("alpha") != 0.0 {
                    (2.0 * p("alpha"), 0.0)
                } else {
                    (p("a"), p("b"))
                };
                let w = C64::new(p("w_re"), p("w_im"));
                let z = C64::new(p("z_re"), p("z_im"));
                if self.family == Family::Rho1 {
                    rho1(a, b, w, z, p("t"))
                } else {
                    rho2(a, b, w, z, p("t"))
                }
            }
            Family::BellDiagonal => bell_diagonal(p("i1"), p("i2"), p("i3")),
            Family::PureN => pure_n(p("n")),
            Family::RhoTheta => Ok(rho_theta(p("theta"))),
            Family::XState => x_state(
                p("rho11"),
                p("rho22"),
                p("rho33"),
                p("rho44"),
                p("rho14"),
                p("rho23"),
            ),
            Family::QuantumClassical => quantum_classical(
                p("kappa"),
                p("x1"),
                p("x3"),
                Vector3::new(p("y1"), p("y2"), p("y3")),
            ),
            Family::BeyondX => beyond_x(p("gamma"), p("a")),
        }
    }
}

/// Upper end of the natural parameter range, used by sweeps and fixtures.
pub const RHO_THETA_MAX: f64 = FRAC_PI_2;

/// A family member with its known discord value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub spec: FamilySpec,
    pub expected_d1: f64,
}

fn fixture(name: &str, family: Family, params: &[(&str, f64)], expected_d1: f64) -> Fixture {
    let mut spec = FamilySpec::new(family);
    for (k, v) in params {
        spec.set(k, *v).expect("fixture parameters are valid");
    }
    Fixture {
        name: name.to_string(),
        spec,
        expected_d1,
    }
}

/// Family states whose discord is known in closed form.
pub fn fixtures() -> Vec<Fixture> {
    let mut out = vec![
        fixture("werner_-0.7", Family::Werner, &[("t", -0.7)], 0.7),
        fixture("werner_0.2", Family::Werner, &[("t", 0.2)], 0.2),
        fixture("isotropic_0.6", Family::Isotropic, &[("t", 0.6)], 0.6),
        fixture("rho1_e0", Family::Rho1, &[("alpha", 0.25), ("t", -0.4)], 0.4),
        fixture("rho2_e0", Family::Rho2, &[("alpha", 0.3), ("t", 0.5)], 0.5),
        fixture("pure_0.6", Family::PureN, &[("n", 0.6)], 0.6),
        fixture("bell_diagonal", Family::BellDiagonal, &[("i1", 0.5), ("i2", -0.3), ("i3", 0.2)], 0.3),
        fixture(
            "quantum_classical",
            Family::QuantumClassical,
            &[("kappa", 0.4), ("x1", 0.1), ("x3", 0.3)],
            0.12 / 0.34_f64.sqrt(),
        ),
    ];
    for theta in [0.3, FRAC_PI_2 / 2.0, 1.2] {
        out.push(fixture(
            &format!("rho_theta_{theta:.3}"),
            Family::RhoTheta,
            &[("theta", theta)],
            0.5 * (2.0 * theta).sin(),
        ));
    }
    for gamma in [0.0, 0.8, 1.6] {
        let a = 0.5 * beyond_x_max_a(gamma);
        out.push(fixture(
            &format!("beyond_x_{gamma}"),
            Family::BeyondX,
            &[("gamma", gamma), ("a", a)],
            2.0 * a,
        ));
    }
    out
}
