//! Closed-form trace-norm discord.
//!
//! All formulas work in the ordered eigenbasis of L₋ = KKᵀ − xxᵀ
//! (λ̂₁ ≥ λ̂₂ ≥ λ̂₃), with x expressed in that basis. In this frame
//!
//! ‖S(v)‖₁² = ‖x‖² − ⟨x,v⟩² + λ_max(L₋ restricted to v⊥),
//!
//! which reduces on the three coordinate great circles to one-dimensional
//! problems with explicit minima d₁, d₂ and min(μ*, μ**). Those circles do
//! not always contain the global minimum, so a fifth candidate is evaluated
//! at the axis orthogonal to the intermediate eigenvector of KKᵀ; see
//! [`Branch::Intermediate`].

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::bloch::{from_bloch, BlochForm};
use crate::disturbance::{
    degeneracy_tol, disturbance_of_matrix, l_minus, l_plus, trace_norm_direct, MeasurementAxis, Objective, SINGULAR_TOL,
};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::linalg::{golden_section, SymEigen3};

/// Points per piece in the one-dimensional safety-net scans.
pub const SAFETY_SCAN_POINTS: usize = 10_000;
/// Allowed gap between an analytic candidate and its numeric circle minimum.
pub const SAFETY_TOL: f64 = 1e-8;
const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenFrame {
    /// λ̂, descending.
    pub l_minus_vals: [f64; 3],
    /// Columns are the eigenvectors of L₋ in the order of `l_minus_vals`.
    pub l_minus_vecs: Matrix3<f64>,
    /// Eigenvalues of L₊, ascending.
    pub l_plus_vals: [f64; 3],
    /// x in the L₋ eigenbasis.
    pub x_frame: Vector3<f64>,
}

impl EigenFrame {
    pub fn to_lab(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.l_minus_vecs * v
    }

    pub fn to_frame(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.l_minus_vecs.transpose() * v
    }

    /// (λ̂₁ − λ̂₂, λ̂₁ − λ̂₃).
    pub fn gaps(&self) -> (f64, f64) {
        let [l1, l2, l3] = self.l_minus_vals;
        (l1 - l2, l1 - l3)
    }

    pub fn degeneracy_tol(&self) -> f64 {
        degeneracy_tol(self.gaps().1)
    }

    pub fn is_nondegenerate(&self) -> bool {
        let [l1, l2, l3] = self.l_minus_vals;
        let tol = self.degeneracy_tol();
        l1 - l2 > tol && l2 - l3 > tol
    }

    /// Same frame with the sign of eigenvector `i` reversed.
    pub fn flipped(&self, i: usize) -> EigenFrame {
        let mut f = self.clone();
        let col = -f.l_minus_vecs.column(i);
        f.l_minus_vecs.set_column(i, &col);
        f.x_frame[i] = -f.x_frame[i];
        f
    }

    fn x_norm2(&self) -> f64 {
        self.x_frame.norm_squared()
    }
}

pub fn eigenframe(b: &BlochForm) -> EigenFrame {
    let lm = SymEigen3::descending(&l_minus(b));
    let lp = SymEigen3::ascending(&l_plus(b));
    EigenFrame {
        l_minus_vals: lm.values,
        l_minus_vecs: lm.vectors,
        l_plus_vals: lp.values,
        x_frame: lm.vectors.transpose() * b.x,
    }
}

/// Hilbert–Schmidt discord, ½(λ₁ + λ₂) of L₊.
pub fn discord_d2(b: &BlochForm) -> f64 {
    let l = eigenframe(b).l_plus_vals;
    0.5 * (l[0] + l[1])
}

/// (1/√2)·√(λ₁ + λ₂) of L₊.
pub fn discord_lower_bound(b: &BlochForm) -> f64 {
    let l = eigenframe(b).l_plus_vals;
    FRAC_1_SQRT_2 * (l[0] + l[1]).max(0.0).sqrt()
}

/// √(intermediate eigenvalue of KKᵀ), a lower bound on D₁ for every state
/// (interlacing applied to the restriction identity in the module docs).
pub fn correlation_floor(b: &BlochForm) -> f64 {
    SymEigen3::ascending(&b.kkt()).values[1].max(0.0).sqrt()
}

/// Piecewise helpers for the v₂ = 0 circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapFunctions {
    /// φ_gap ∈ (0, π/2] with cos²φ_gap = (λ̂₁−λ̂₂)/(λ̂₁−λ̂₃).
    pub phi_gap: f64,
    /// Value of σ at −π, −π/2, 0, π/2, π.
    pub boundary_sigma: f64,
}

impl GapFunctions {
    pub fn sigma(&self, theta: f64) -> f64 {
        if (-PI < theta && theta < -FRAC_PI_2) || (0.0 < theta && theta < FRAC_PI_2) {
            1.0
        } else if (-FRAC_PI_2 < theta && theta < 0.0) || (FRAC_PI_2 < theta && theta < PI) {
            -1.0
        } else {
            self.boundary_sigma
        }
    }

    /// Membership of the open set (−π+φ, −φ) ∪ (φ, π−φ).
    pub fn in_gap(&self, theta: f64) -> bool {
        let phi = self.phi_gap;
        (-PI + phi < theta && theta < -phi) || (phi < theta && theta < PI - phi)
    }

    pub fn p(&self, theta: f64) -> f64 {
        if self.in_gap(theta) {
            1.0
        } else {
            (theta - self.sigma(theta) * self.phi_gap).cos().powi(2)
        }
    }

    pub fn r(&self, theta: f64) -> f64 {
        if self.in_gap(theta) {
            (theta - self.sigma(theta) * self.phi_gap).cos().powi(2)
        } else {
            1.0
        }
    }

    /// Nearest edge of the gap set, the point where the two pieces of the
    /// v₂ = 0 profile meet.
    pub fn edge(&self, theta: f64) -> f64 {
        self.sigma(theta) * self.phi_gap
    }
}

pub fn gap_functions(frame: &EigenFrame) -> Result<GapFunctions> {
    let (a, b) = frame.gaps();
    if b <= frame.degeneracy_tol() {
        return Err(Error::DegenerateGap(b));
    }
    let c2 = (a / b).clamp(0.0, 1.0);
    Ok(GapFunctions {
        phi_gap: c2.sqrt().acos(),
        boundary_sigma: 1.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaStars {
    pub theta_star: f64,
    pub theta_star_star: f64,
    pub n_star: f64,
    pub n_star_star: f64,
}

/// Angles of the two stationary points on the v₂ = 0 circle.
///
/// Half-angle form: θ* = ½·atan2(−2x₁x₃, λ̂₁−λ̂₃+x₁²−x₃²), which has the same
/// cosine and sine as the quotient form but stays finite as x₁x₃ → 0; that
/// limit gives θ* ∈ {0, π/2} by the sign of the second argument, and π/4 when
/// N* vanishes.
pub fn theta_stars(frame: &EigenFrame) -> Result<ThetaStars> {
    let (_, b) = frame.gaps();
    if b <= frame.degeneracy_tol() {
        return Err(Error::DegenerateGap(b));
    }
    let x = frame.x_frame;
    let (x1, x3) = (x[0], x[2]);
    let n_arg = b + x1 * x1 - x3 * x3;
    let cross = x1 * x3;
    let n_star = n_arg.hypot(2.0 * cross);
    let scale = b + x1 * x1 + x3 * x3;
    let theta_star = if n_star <= 1e-15 * scale.max(1e-300) {
        FRAC_PI_4
    } else {
        // +0 so that the x₁x₃ = 0 limit lands on +π/2, not −π/2
        let s = if cross == 0.0 { 0.0 } else { -2.0 * cross };
        0.5 * s.atan2(n_arg)
    };
    let n_star_star = x1 * x1 + x3 * x3;
    let theta_star_star = if x1 == 0.0 {
        FRAC_PI_2
    } else {
        (-x1.signum() * x3).atan2(x1.abs())
    };
    Ok(ThetaStars {
        theta_star,
        theta_star_star,
        n_star,
        n_star_star,
    })
}

fn mu_pair(frame: &EigenFrame, gap: &GapFunctions, ts: &ThetaStars) -> (f64, f64) {
    let [l1, l2, l3] = frame.l_minus_vals;
    let xn = frame.x_norm2();
    let x2 = frame.x_frame[1];
    let mu_star = 0.5 * (l1 + l3 + xn + x2 * x2 + ts.n_star * (1.0 - 2.0 * gap.p(ts.theta_star)));
    let mu_star_star = l2 + xn - ts.n_star_star * gap.r(ts.theta_star_star);
    (mu_star, mu_star_star)
}

/// (μ*, μ**): minima of ‖S‖₁² over the two pieces of the v₂ = 0 circle.
pub fn mu_candidates(frame: &EigenFrame) -> Result<(f64, f64)> {
    let gap = gap_functions(frame)?;
    let ts = theta_stars(frame)?;
    Ok(mu_pair(frame, &gap, &ts))
}

/// d₁ = λ̂₁ + x₁², the minimum over the circle v₁ = 0.
pub fn candidate_d1(frame: &EigenFrame) -> f64 {
    frame.l_minus_vals[0] + frame.x_frame[0].powi(2)
}

/// d₂, the minimum over the circle v₃ = 0.
pub fn candidate_d2(frame: &EigenFrame) -> f64 {
    let [l1, l2, _] = frame.l_minus_vals;
    let x = frame.x_frame;
    let xn = frame.x_norm2();
    let a = l1 - l2;
    let u = a + xn - x[2] * x[2];
    let rad = (u * u - 4.0 * a * x[1] * x[1]).max(0.0);
    0.5 * (l1 + l2 + xn + x[2] * x[2] - rad.sqrt())
}

/// D₁² when λ̂₂ = λ̂₃:
/// ½(λ̂₁+λ̂₂+‖x‖² − √((λ̂₁−λ̂₂−‖x‖²)² + 4(λ̂₁−λ̂₂)x₁²)).
pub fn degenerate23_squared(frame: &EigenFrame) -> f64 {
    let [l1, l2, _] = frame.l_minus_vals;
    let xn = frame.x_norm2();
    let a = l1 - l2;
    let x1 = frame.x_frame[0];
    let u = a - xn;
    0.5 * (l1 + l2 + xn - (u * u + 4.0 * a * x1 * x1).sqrt())
}

/// The same expression with +‖x‖² inside the square. Kept only so tests can
/// show that it disagrees with direct minimisation whenever x₁ ≠ 0.
pub fn degenerate23_squared_alt(frame: &EigenFrame) -> f64 {
    let [l1, l2, _] = frame.l_minus_vals;
    let xn = frame.x_norm2();
    let a = l1 - l2;
    let x1 = frame.x_frame[0];
    let u = a + xn;
    0.5 * (l1 + l2 + xn - (u * u + 4.0 * a * x1 * x1).sqrt())
}

/// Coordinate great circles of the L₋ frame, named by the vanishing component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Circle {
    V1,
    V2,
    V3,
}

impl Circle {
    pub fn from_index(i: usize) -> Option<Circle> {
        match i {
            1 => Some(Circle::V1),
            2 => Some(Circle::V2),
            3 => Some(Circle::V3),
            _ => None,
        }
    }

    /// Frame-coordinate point at angle θ: (0,c,s), (c,0,s) or (c,s,0).
    pub fn point(self, theta: f64) -> Vector3<f64> {
        let (s, c) = theta.sin_cos();
        match self {
            Circle::V1 => Vector3::new(0.0, c, s),
            Circle::V2 => Vector3::new(c, 0.0, s),
            Circle::V3 => Vector3::new(c, s, 0.0),
        }
    }
}

/// ‖S‖₁² on a coordinate circle from the one-dimensional profiles
/// μ = μ̃ + λ̂₂ + ‖x‖² with
/// μ̃ = λ̂₁−λ̂₂−⟨x,v⟩² (v₁ = 0), (λ̂₁−λ̂₂)v₂²−⟨x,v⟩² (v₃ = 0),
/// max(λ̂₁−λ̂₂−(λ̂₁−λ̂₃)v₁², 0) − ⟨x,v⟩² (v₂ = 0).
pub fn circle_mu(frame: &EigenFrame, circle: Circle, theta: f64) -> f64 {
    let v = circle.point(theta);
    let (a, b) = frame.gaps();
    let xv = frame.x_frame.dot(&v);
    let tilde = match circle {
        Circle::V1 => a,
        Circle::V3 => a * v[1] * v[1],
        Circle::V2 => (a - b * v[0] * v[0]).max(0.0),
    } - xv * xv;
    tilde + frame.l_minus_vals[1] + frame.x_norm2()
}

/// ‖S‖₁² at a frame-coordinate unit vector via the restriction identity.
pub fn restricted_mu(frame: &EigenFrame, v: &Vector3<f64>) -> f64 {
    let l = frame.l_minus_vals;
    let a = crate::linalg::orthogonal_unit(v);
    let c = v.cross(&a);
    let q = |p: &Vector3<f64>, r: &Vector3<f64>| l[0] * p[0] * r[0] + l[1] * p[1] * r[1] + l[2] * p[2] * r[2];
    let (aa, cc, ac) = (q(&a, &a), q(&c, &c), q(&a, &c));
    let lmax = 0.5 * (aa + cc) + (0.25 * (aa - cc).powi(2) + ac * ac).sqrt();
    let xv = frame.x_frame.dot(v);
    frame.x_norm2() - xv * xv + lmax
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleScan {
    pub min: f64,
    pub theta: f64,
}

/// Dense scan of `circle_mu` on `[lo, hi]` with golden-section polishing
/// around the best sample.
pub fn scan_circle(
    frame: &EigenFrame,
    circle: Circle,
    lo: f64,
    hi: f64,
    n: usize,
    exec: Execution,
) -> CircleScan {
    let n = n.max(2);
    let h = (hi - lo) / (n - 1) as f64;
    let at = |i: usize| lo + h * i as f64;
    let f = |t: f64| circle_mu(frame, circle, t);
    let (i, v) = exec::argmin(exec, n, |i| f(at(i))).expect("n >= 2");
    let left = at(i.saturating_sub(1));
    let right = at((i + 1).min(n - 1));
    let (t, m) = golden_section(f, left, right, 1e-12, 200);
    if m < v {
        CircleScan { min: m, theta: t }
    } else {
        CircleScan { min: v, theta: at(i) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// λ̂₁ = λ̂₂: D₁ = √λ̂₂.
    Degenerate12,
    /// λ̂₂ = λ̂₃.
    Degenerate23,
    /// λ̂₁ = λ̂₂ = λ̂₃: D₁ = √λ̂₂.
    FullyDegenerate,
    /// d₁, circle v₁ = 0.
    CircleV1,
    /// d₂, circle v₃ = 0.
    CircleV3,
    /// μ*, gap piece of the circle v₂ = 0.
    CircleV2MuStar,
    /// μ**, outer piece of the circle v₂ = 0.
    CircleV2MuStarStar,
    /// Axis orthogonal to the intermediate eigenvector of KKᵀ, in the plane
    /// of that eigenvector and x. Off every coordinate circle in general; the
    /// value there is max(λ_mid, ‖KᵀW‖² + β²) which meets the floor
    /// λ_mid(KKᵀ) when it wins.
    Intermediate,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Degenerate12 => "degenerate12",
            Branch::Degenerate23 => "degenerate23",
            Branch::FullyDegenerate => "fully_degenerate",
            Branch::CircleV1 => "circle_v1",
            Branch::CircleV3 => "circle_v3",
            Branch::CircleV2MuStar => "circle_v2_mu_star",
            Branch::CircleV2MuStarStar => "circle_v2_mu_star_star",
            Branch::Intermediate => "intermediate",
        }
    }

    pub fn is_degenerate(self) -> bool {
        matches!(self, Branch::Degenerate12 | Branch::Degenerate23 | Branch::FullyDegenerate)
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Squared candidate values in the non-degenerate case.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidates {
    pub d1: f64,
    pub d2: f64,
    pub mu_star: f64,
    pub mu_star_star: f64,
    pub intermediate: f64,
}

impl Candidates {
    fn ranked(&self) -> [(Branch, f64); 5] {
        [
            (Branch::CircleV1, self.d1),
            (Branch::CircleV3, self.d2),
            (Branch::CircleV2MuStar, self.mu_star),
            (Branch::CircleV2MuStarStar, self.mu_star_star),
            (Branch::Intermediate, self.intermediate),
        ]
    }

    /// Smallest candidate; ties within 1e-12 go to the earliest branch.
    pub fn winner(&self) -> (Branch, f64) {
        let ranked = self.ranked();
        let m = ranked.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
        ranked
            .into_iter()
            .find(|r| r.1 <= m + TIE_TOL)
            .unwrap_or((Branch::CircleV1, m))
    }
}

/// Numeric minima of the circle profiles, one per analytic candidate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SafetyNet {
    pub circle_v1: f64,
    pub circle_v3: f64,
    /// v₂ = 0, |θ| ∈ [φ_gap, π/2].
    pub circle_v2_gap: f64,
    /// v₂ = 0, |θ| ≤ φ_gap.
    pub circle_v2_outer: f64,
    /// ‖S‖₁² at the intermediate axis from the 4×4 spectrum.
    pub intermediate_direct: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscordResult {
    pub d1_value: f64,
    /// Minimising axis in the original coordinates.
    pub axis: MeasurementAxis,
    pub branch: Branch,
    pub d2_value: f64,
    pub lower_bound: f64,
    /// √λ_mid(KKᵀ); never exceeds `d1_value`.
    pub correlation_floor: f64,
    /// λ̂, descending.
    pub spectrum: [f64; 3],
    pub candidates: Option<Candidates>,
    pub safety_net: Option<SafetyNet>,
    /// ‖S‖₁² at `axis` from the spectrum of the 4×4 disturbance matrix.
    pub axis_value_squared: f64,
    pub axis_in_singular_set: bool,
}

impl DiscordResult {
    /// Compares analytic values against their numeric counterparts.
    pub fn verify_consistency(&self) -> Result<()> {
        let target = self.d1_value * self.d1_value;
        if (self.axis_value_squared - target).abs() > 1e-9 {
            return Err(Error::InternalConsistency(format!(
                "{} branch: value {target:e} but the reported axis gives {:e}",
                self.branch, self.axis_value_squared
            )));
        }
        if let (Some(c), Some(s)) = (&self.candidates, &self.safety_net) {
            let pairs = [
                ("d1", c.d1, s.circle_v1, SAFETY_TOL),
                ("d2", c.d2, s.circle_v3, SAFETY_TOL),
                ("mu_star", c.mu_star, s.circle_v2_gap, SAFETY_TOL),
                ("mu_star_star", c.mu_star_star, s.circle_v2_outer, SAFETY_TOL),
                ("intermediate", c.intermediate, s.intermediate_direct, 1e-10),
            ];
            for (name, analytic, numeric, tol) in pairs {
                if !((analytic - numeric).abs() <= tol) {
                    return Err(Error::InternalConsistency(format!(
                        "{name}: analytic {analytic:e}, numeric {numeric:e}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Candidate selector for the test-only corruption hook.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateKind {
    D1,
    D2,
    MuStar,
    MuStarStar,
    Intermediate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscordOptions {
    pub exec: Execution,
    /// Points per safety-net scan; 0 disables the scans.
    pub scan_points: usize,
    #[doc(hidden)]
    pub corruption: Option<(CandidateKind, f64)>,
}

impl Default for DiscordOptions {
    fn default() -> Self {
        DiscordOptions {
            exec: Execution::default(),
            scan_points: SAFETY_SCAN_POINTS,
            corruption: None,
        }
    }
}

/// Trace-norm geometric discord with the minimising axis and diagnostics.
pub fn discord_d1(b: &BlochForm) -> DiscordResult {
    discord_d1_with(b, &DiscordOptions::default())
}

// Smallest eigenvector of [[p, q], [q, r]] as (cos, sin).
fn min_eigvec2(p: f64, q: f64, r: f64) -> (f64, f64) {
    let t = 0.5 * (2.0 * q).atan2(p - r) + FRAC_PI_2;
    (t.cos(), t.sin())
}

fn x_direction_or(frame: &EigenFrame, fallback: Vector3<f64>) -> Vector3<f64> {
    let x = frame.x_frame;
    if x.norm() > 1e-12 {
        x.normalize()
    } else {
        fallback
    }
}

// Axis (frame coordinates) for λ̂₂ = λ̂₃: rotate e₂, e₃ so that x₃ = 0, then
// take the minimiser on the v₃ = 0 circle.
fn degenerate23_axis(frame: &EigenFrame) -> Vector3<f64> {
    let x = frame.x_frame;
    let perp = x[1].hypot(x[2]);
    let e2 = if perp > 1e-12 {
        Vector3::new(0.0, x[1] / perp, x[2] / perp)
    } else {
        Vector3::y()
    };
    let (a, _) = frame.gaps();
    let (c, s) = min_eigvec2(-x[0] * x[0], -x[0] * perp, a - perp * perp);
    Vector3::x() * c + e2 * s
}

/// Point at angle θ on the v₂ = 0 circle, (cos θ, 0, −sin θ).
fn v2_circle_axis(theta: f64) -> Vector3<f64> {
    Vector3::new(theta.cos(), 0.0, -theta.sin())
}

fn intermediate_axis(b: &BlochForm, frame: &EigenFrame) -> Vector3<f64> {
    let kk = SymEigen3::ascending(&b.kkt());
    let u_mid = kk.vector(1);
    let beta = b.x.dot(&u_mid);
    let w = b.x - u_mid * beta;
    let lab = if w.norm() > 1e-12 { w.normalize() } else { kk.vector(2) };
    frame.to_frame(&lab)
}

pub fn discord_d1_with(b: &BlochForm, opts: &DiscordOptions) -> DiscordResult {
    let frame = eigenframe(b);
    let [l1, l2, l3] = frame.l_minus_vals;
    let tol = frame.degeneracy_tol();
    let lp = frame.l_plus_vals;
    let d2_value = 0.5 * (lp[0] + lp[1]);
    let lower_bound = FRAC_1_SQRT_2 * (lp[0] + lp[1]).max(0.0).sqrt();

    let (branch, value, axis_frame, candidates, safety_net) = if l1 - l3 <= tol {
        let v = x_direction_or(&frame, Vector3::z());
        (Branch::FullyDegenerate, l2, v, None, None)
    } else if l1 - l2 <= tol {
        let v = x_direction_or(&frame, Vector3::z());
        (Branch::Degenerate12, l2, v, None, None)
    } else if l2 - l3 <= tol {
        let v = degenerate23_axis(&frame);
        (Branch::Degenerate23, degenerate23_squared(&frame), v, None, None)
    } else {
        nondegenerate(b, &frame, opts)
    };

    let axis = MeasurementAxis::normalized(frame.to_lab(&axis_frame))
        .expect("branch axes are nonzero")
        .canonical();
    let obj = Objective::new(b);
    let (g1, g2) = obj.g_pair(&axis.vector());
    DiscordResult {
        d1_value: value.max(0.0).sqrt(),
        axis,
        branch,
        d2_value,
        lower_bound,
        correlation_floor: correlation_floor(b),
        spectrum: frame.l_minus_vals,
        candidates,
        safety_net,
        axis_value_squared: trace_norm_direct(&disturbance_of_matrix(&from_bloch(b), &axis)).powi(2),
        axis_in_singular_set: (g1 * g1 - g2).abs() <= SINGULAR_TOL * (g1 * g1).max(1.0),
    }
}

type BranchPick = (Branch, f64, Vector3<f64>, Option<Candidates>, Option<SafetyNet>);

fn nondegenerate(b: &BlochForm, frame: &EigenFrame, opts: &DiscordOptions) -> BranchPick {
    let gap = gap_functions(frame).expect("outer gap checked by caller");
    let ts = theta_stars(frame).expect("outer gap checked by caller");
    let (mu_star, mu_star_star) = mu_pair(frame, &gap, &ts);
    let v_int = intermediate_axis(b, frame);
    let mut c = Candidates {
        d1: candidate_d1(frame),
        d2: candidate_d2(frame),
        mu_star,
        mu_star_star,
        intermediate: restricted_mu(frame, &v_int),
    };
    if let Some((kind, delta)) = opts.corruption {
        match kind {
            CandidateKind::D1 => c.d1 += delta,
            CandidateKind::D2 => c.d2 += delta,
            CandidateKind::MuStar => c.mu_star += delta,
            CandidateKind::MuStarStar => c.mu_star_star += delta,
            CandidateKind::Intermediate => c.intermediate += delta,
        }
    }
    let (branch, value) = c.winner();
    let x = frame.x_frame;
    let axis = match branch {
        Branch::CircleV1 => {
            let p = Vector3::new(0.0, x[1], x[2]);
            if p.norm() > 1e-12 {
                p.normalize()
            } else {
                Vector3::y()
            }
        }
        Branch::CircleV3 => {
            let (a, _) = frame.gaps();
            let (cs, sn) = min_eigvec2(-x[0] * x[0], -x[0] * x[1], a - x[1] * x[1]);
            Vector3::new(cs, sn, 0.0)
        }
        Branch::CircleV2MuStar => {
            let t = ts.theta_star;
            v2_circle_axis(if gap.in_gap(t) { t } else { gap.edge(t) })
        }
        Branch::CircleV2MuStarStar => {
            let t = ts.theta_star_star;
            v2_circle_axis(if gap.in_gap(t) { gap.edge(t) } else { t })
        }
        _ => v_int,
    };

    let safety = (opts.scan_points > 0).then(|| {
        let n = opts.scan_points;
        let phi = gap.phi_gap;
        let lab = MeasurementAxis::normalized(frame.to_lab(&v_int)).expect("unit intermediate axis");
        SafetyNet {
            circle_v1: scan_circle(frame, Circle::V1, 0.0, PI, n, opts.exec).min,
            circle_v3: scan_circle(frame, Circle::V3, 0.0, PI, n, opts.exec).min,
            circle_v2_gap: scan_circle(frame, Circle::V2, phi, PI - phi, n, opts.exec).min,
            circle_v2_outer: scan_circle(frame, Circle::V2, -phi, phi, n, opts.exec).min,
            intermediate_direct: trace_norm_direct(&disturbance_of_matrix(&from_bloch(b), &lab)).powi(2),
        }
    });
    (branch, value, axis, Some(c), safety)
}
