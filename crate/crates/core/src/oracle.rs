//! Brute-force minimisation of ‖S(𝓜)‖₁ over the sphere, critical-point
//! residuals, and certification of the closed form against both.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::bloch::BlochForm;
use crate::discord::{discord_d1_with, eigenframe, scan_circle, Branch, Circle, DiscordOptions, EigenFrame};
use crate::disturbance::{MeasurementAxis, Objective};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::grid::{hemisphere, spacing, GridKind};
use crate::linalg::{adjugate, frame_with_first, golden_section, outer};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    pub n_points: usize,
    /// Angular step below which refinement stops.
    pub refine_tol: f64,
    pub grid: GridKind,
    /// Number of separated grid basins that are refined.
    pub basins: usize,
    pub max_iter: usize,
    #[serde(skip, default)]
    pub exec: Execution,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            n_points: 20_000,
            refine_tol: 1e-10,
            grid: GridKind::Fibonacci,
            basins: 4,
            max_iter: 200,
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub min_value: f64,
    pub argmin: MeasurementAxis,
    pub grid_size: usize,
    /// Best raw grid value, before refinement.
    pub grid_min: f64,
    pub refine_iters: usize,
    /// Refined value of the second-best basin minus the best, when a second
    /// distinct basin exists.
    pub value_gap_estimate: Option<f64>,
}

/// Global minimum of the closed-form trace norm on a hemisphere grid, with
/// local refinement of the best basins.
pub fn minimize_grid(b: &BlochForm, n_points: usize, refine_tol: f64) -> OracleResult {
    minimize_grid_with(
        b,
        &OracleOptions {
            n_points,
            refine_tol,
            ..OracleOptions::default()
        },
    )
}

/// Index and value of the smallest grid sample, ties to the lowest index.
pub fn grid_minimum(b: &BlochForm, points: &[Vector3<f64>], exec: Execution) -> (usize, f64) {
    let obj = Objective::new(b);
    let (i, v) = exec::argmin(exec, points.len(), |i| obj.value_squared(&points[i])).expect("non-empty grid");
    (i, v.max(0.0).sqrt())
}

pub fn minimize_grid_with(b: &BlochForm, opts: &OracleOptions) -> OracleResult {
    let obj = Objective::new(b);
    let pts = hemisphere(opts.grid, opts.n_points.max(1));
    let vals = exec::map(opts.exec, pts.len(), |i| obj.value_squared(&pts[i]));
    let by_value = |i: &usize, j: &usize| vals[*i].total_cmp(&vals[*j]).then(i.cmp(j));
    let mut order: Vec<usize> = (0..pts.len()).collect();
    let head = order.len().min(4000);
    if head < order.len() {
        order.select_nth_unstable_by(head, by_value);
    }
    order.truncate(head);
    order.sort_by(by_value);

    let h = spacing(pts.len());
    let separation = 4.0 * h;
    let mut seeds: Vec<usize> = Vec::new();
    for &i in &order {
        if seeds.len() >= opts.basins.max(1) {
            break;
        }
        let far = seeds
            .iter()
            .all(|&s| pts[s].dot(&pts[i]).abs().min(1.0).acos() > separation);
        if far {
            seeds.push(i);
        }
    }

    let refined = exec::map(opts.exec, seeds.len(), |k| {
        refine(&obj, pts[seeds[k]], 2.0 * h, opts.refine_tol, opts.max_iter)
    });
    let mut best = 0;
    for (k, r) in refined.iter().enumerate() {
        if r.1 < refined[best].1 {
            best = k;
        }
    }
    let (p, val, iters) = refined[best];
    let gap = refined
        .iter()
        .enumerate()
        .filter(|(k, r)| *k != best && r.0.dot(&p).abs().min(1.0).acos() > 1e-4)
        .map(|(_, r)| r.1.max(0.0).sqrt() - val.max(0.0).sqrt())
        .fold(None, |acc: Option<f64>, g| Some(acc.map_or(g, |a| a.min(g))));

    OracleResult {
        min_value: val.max(0.0).sqrt(),
        argmin: MeasurementAxis::normalized(p).expect("unit").canonical(),
        grid_size: pts.len(),
        grid_min: vals[order[0]].max(0.0).sqrt(),
        refine_iters: iters,
        value_gap_estimate: gap,
    }
}

// Golden-section line searches along two tangent directions and their
// diagonals, in a chart re-centred at the current point every sweep so the
// poles need no special handling.
fn refine(obj: &Objective, start: Vector3<f64>, h0: f64, tol: f64, max_iter: usize) -> (Vector3<f64>, f64, usize) {
    let mut p = start;
    let mut fp = obj.value_squared(&p);
    let mut h = h0;
    let mut iters = 0;
    while iters < max_iter && h > tol {
        iters += 1;
        let frame = frame_with_first(&p);
        let (e1, e2): (Vector3<f64>, Vector3<f64>) = (frame.column(1).into(), frame.column(2).into());
        let mut largest = 0.0_f64;
        for d in [e1, e2, (e1 + e2).normalize(), (e1 - e2).normalize()] {
            // d drifts off the tangent plane once p moves within a sweep
            let along = |s: f64| (p * s.cos() + d * s.sin()).normalize();
            let (s, f) = golden_section(|s| obj.value_squared(&along(s)), -h, h, (h * 1e-4).max(1e-15), 200);
            if f < fp {
                p = along(s);
                fp = f;
                largest = largest.max(s.abs());
            }
        }
        if largest < 0.5 * h {
            h *= 0.5;
        }
    }
    (p, fp, iters)
}

/// Minimum over a coordinate circle of the L₋ frame, with the axis in the
/// original coordinates. Uses the one-dimensional circle profiles.
pub fn minimize_circle(frame: &EigenFrame, circle: Circle, n: usize) -> (f64, MeasurementAxis) {
    let s = scan_circle(frame, circle, 0.0, std::f64::consts::PI, n, Execution::default());
    let v = frame.to_lab(&circle.point(s.theta));
    (s.min, MeasurementAxis::normalized(v).expect("unit").canonical())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointReport {
    pub v: MeasurementAxis,
    /// ‖S‖₁².
    pub mu: f64,
    /// ⟨v, G_μ v⟩.
    pub omega: f64,
    /// max-norm of G_μP_v − P_vG_μ.
    pub commutator_residual: f64,
    /// max-norm of G_μP_v − ωP_v.
    pub eigen_residual: f64,
    pub in_singular_set: bool,
}

/// G_μ = −W_x𝓜KKᵀ − KKᵀ𝓜W_x + EᵀE + μL₊ with W_x = xxᵀ, E = adj K.
pub fn g_mu(b: &BlochForm, v: &MeasurementAxis, mu: f64) -> Matrix3<f64> {
    let w = outer(&b.x);
    let m = v.complement();
    let kkt = b.kkt();
    let e = adjugate(&b.k);
    -(w * m * kkt) - kkt * m * w + e.transpose() * e + (kkt + w) * mu
}

pub fn critical_residual(b: &BlochForm, v: &MeasurementAxis) -> CriticalPointReport {
    let obj = Objective::new(b);
    let mu = obj.value_squared(&v.vector());
    let g = g_mu(b, v, mu);
    let p = v.projector();
    let omega = v.vector().dot(&(g * v.vector()));
    let (g1, g2) = obj.g_pair(&v.vector());
    CriticalPointReport {
        v: *v,
        mu,
        omega,
        commutator_residual: (g * p - p * g).amax(),
        eigen_residual: (g * p - p * omega).amax(),
        in_singular_set: (g1 * g1 - g2).abs() <= crate::disturbance::SINGULAR_TOL * (g1 * g1).max(1.0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyOptions {
    pub oracle: OracleOptions,
    pub discord: DiscordOptions,
    /// Allowed |closed − oracle|.
    pub tol: f64,
    pub circle_points: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            oracle: OracleOptions::default(),
            discord: DiscordOptions::default(),
            tol: 1e-6,
            circle_points: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub closed: f64,
    pub oracle: f64,
    pub deviation: f64,
    pub tol: f64,
    pub branch: Branch,
    pub closed_axis: MeasurementAxis,
    pub oracle_axis: MeasurementAxis,
    /// Circle minima of ‖S‖₁² for v₁ = 0, v₂ = 0, v₃ = 0 (non-degenerate frames).
    pub circle_minima: Option<[f64; 3]>,
    /// √(min over circles) − oracle value.
    pub circle_excess: Option<f64>,
    /// |v₁v₂v₃| of the oracle argmin in the L₋ frame (non-degenerate frames).
    pub big_circle_product: Option<f64>,
    pub closed_residual: CriticalPointReport,
    pub oracle_residual: CriticalPointReport,
    pub consistency_error: Option<String>,
    pub passed: bool,
}

/// Runs the closed form, the grid oracle, the circle minimisers and the
/// critical-point residuals on one state.
pub fn certify_report(b: &BlochForm, opts: &CertifyOptions) -> CertifyReport {
    let closed = discord_d1_with(b, &opts.discord);
    let oracle = minimize_grid_with(b, &opts.oracle);
    let frame = eigenframe(b);
    let (circle_minima, circle_excess, big_circle_product) = if frame.is_nondegenerate() {
        let mins = [Circle::V1, Circle::V2, Circle::V3].map(|c| minimize_circle(&frame, c, opts.circle_points).0);
        let lowest = mins.iter().copied().fold(f64::INFINITY, f64::min);
        let v = frame.to_frame(&oracle.argmin.vector());
        (
            Some(mins),
            Some(lowest.max(0.0).sqrt() - oracle.min_value),
            Some((v[0] * v[1] * v[2]).abs()),
        )
    } else {
        (None, None, None)
    };
    let deviation = (closed.d1_value - oracle.min_value).abs();
    let consistency_error = closed.verify_consistency().err().map(|e| e.to_string());
    CertifyReport {
        closed: closed.d1_value,
        oracle: oracle.min_value,
        deviation,
        tol: opts.tol,
        branch: closed.branch,
        closed_axis: closed.axis,
        oracle_axis: oracle.argmin,
        circle_minima,
        circle_excess,
        big_circle_product,
        closed_residual: critical_residual(b, &closed.axis),
        oracle_residual: critical_residual(b, &oracle.argmin),
        passed: deviation <= opts.tol && consistency_error.is_none(),
        consistency_error,
    }
}

pub fn certify(b: &BlochForm) -> Result<CertifyReport> {
    certify_with(b, &CertifyOptions::default())
}

pub fn certify_with(b: &BlochForm, opts: &CertifyOptions) -> Result<CertifyReport> {
    let r = certify_report(b, opts);
    if r.passed {
        Ok(r)
    } else {
        Err(Error::CertificationFailure(match &r.consistency_error {
            Some(e) => format!("closed {:.12} vs oracle {:.12}; {e}", r.closed, r.oracle),
            None => format!(
                "closed {:.12} vs oracle {:.12}: deviation {:e} > {:e}",
                r.closed, r.oracle, r.deviation, r.tol
            ),
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discord::{discord_d1, CandidateKind};
    use crate::bloch::from_bloch;
    use crate::disturbance::{
        disturbance_of_matrix, singular_min_check, singular_set_solve, trace_norm_closed, trace_norm_direct, SingularSet,
    };
    use crate::families;
    use crate::grid::nested_hemisphere;
    use crate::sampling::{random_axis, random_state};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn werner_and_pure() {
        let r = minimize_grid(&families::werner(0.3).unwrap().bloch(), 2000, 1e-10);
        assert_abs_diff_eq!(r.min_value, 0.3, epsilon = 1e-12);
        let r = minimize_grid(&families::pure_n(0.6).unwrap().bloch(), 20_000, 1e-10);
        assert_abs_diff_eq!(r.min_value, 0.6, epsilon = 1e-10);
    }

    #[test]
    fn result_value_matches_closed_form_at_argmin() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for _ in 0..10 {
            let b = random_state(&mut rng).bloch();
            let r = minimize_grid(&b, 5000, 1e-10);
            let tn = trace_norm_closed(&b, &r.argmin).unwrap().trace_norm;
            assert_abs_diff_eq!(r.min_value, tn, epsilon = 1e-12);
            assert!(r.min_value <= r.grid_min + 1e-15);
            assert!(r.refine_iters <= 200);
        }
    }

    #[test]
    fn agrees_with_closed_form_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..30 {
            let b = random_state(&mut rng).bloch();
            let r = minimize_grid(&b, 20_000, 1e-10);
            let c = discord_d1(&b);
            assert!((r.min_value - c.d1_value).abs() <= 1e-6, "{} vs {}", r.min_value, c.d1_value);
        }
    }

    #[test]
    fn nested_grid_minimum_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        for _ in 0..5 {
            let b = random_state(&mut rng).bloch();
            let pts = nested_hemisphere(40_000);
            let mut prev = f64::INFINITY;
            for n in [1000, 2000, 5000, 10_000, 20_000, 40_000] {
                let (_, v) = grid_minimum(&b, &pts[..n], Execution::default());
                assert!(v <= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn execution_modes_agree() {
        let b = random_state(&mut ChaCha8Rng::seed_from_u64(53)).bloch();
        let mk = |exec| OracleOptions {
            exec,
            ..OracleOptions::default()
        };
        assert_eq!(
            minimize_grid_with(&b, &mk(Execution::Sequential)),
            minimize_grid_with(&b, &mk(Execution::Parallel))
        );
    }

    #[test]
    fn mmm_circle_and_residual() {
        let b = BlochForm::new(
            Vector3::zeros(),
            Vector3::zeros(),
            Matrix3::from_diagonal(&Vector3::new(0.8, 0.5, 0.2)),
        );
        let f = eigenframe(&b);
        let (mu, _) = minimize_circle(&f, Circle::V2, 10_000);
        assert_abs_diff_eq!(mu, 0.25, epsilon = 1e-12);
        let rep = critical_residual(&b, &MeasurementAxis::e1());
        assert!(rep.commutator_residual < 1e-15);
    }

    #[test]
    fn circles_bound_the_grid_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        for _ in 0..10 {
            let b = random_state(&mut rng).bloch();
            let f = eigenframe(&b);
            let g = minimize_grid(&b, 20_000, 1e-10).min_value;
            for c in [Circle::V1, Circle::V2, Circle::V3] {
                let (mu, axis) = minimize_circle(&f, c, 10_000);
                assert!(mu.sqrt() >= g - 1e-9);
                let tn = trace_norm_direct(&disturbance_of_matrix(&from_bloch(&b), &axis));
                assert_abs_diff_eq!(tn * tn, mu, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn residuals_small_at_minimisers_and_large_elsewhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let mut large = 0;
        for _ in 0..30 {
            let b = random_state(&mut rng).bloch();
            let c = discord_d1(&b);
            let rep = critical_residual(&b, &c.axis);
            if !rep.in_singular_set {
                assert!(rep.commutator_residual <= 1e-8, "{rep:?}");
                assert!(rep.eigen_residual <= 1e-8, "{rep:?}");
            }
            let o = minimize_grid(&b, 20_000, 1e-10);
            let rep = critical_residual(&b, &o.argmin);
            if !rep.in_singular_set {
                assert!(rep.commutator_residual <= 1e-6, "{rep:?}");
            }
            let r = critical_residual(&b, &MeasurementAxis::new(random_axis(&mut rng)).unwrap());
            if r.commutator_residual > 1e-3 {
                large += 1;
            }
        }
        assert!(large > 20);
    }

    #[test]
    fn singular_check_agrees_with_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(56);
        for _ in 0..20 {
            let b = random_state(&mut rng).bloch();
            let SingularSet::Axes(axes) = singular_set_solve(&b) else { continue };
            let obj = Objective::new(&b);
            let vstar = axes
                .iter()
                .min_by(|p, q| obj.g_pair(&p.vector()).0.total_cmp(&obj.g_pair(&q.vector()).0))
                .unwrap();
            let at_star = obj.value(&vstar.vector());
            let d1 = minimize_grid(&b, 20_000, 1e-10).min_value;
            let attained = at_star <= d1 + 1e-7;
            assert_eq!(singular_min_check(&b, vstar, 20_000), attained, "{at_star} vs {d1}");
        }
        // ρ_θ at θ = π/6
        let b = families::rho_theta(std::f64::consts::PI / 6.0).bloch();
        if let SingularSet::Axes(axes) = singular_set_solve(&b) {
            let d1 = minimize_grid(&b, 20_000, 1e-10).min_value;
            let obj = Objective::new(&b);
            for a in axes {
                let attained = obj.value(&a.vector()) <= d1 + 1e-7;
                assert_eq!(singular_min_check(&b, &a, 20_000), attained);
            }
        }
    }

    #[test]
    fn certify_passes_and_negative_control_fails() {
        let b = random_state(&mut ChaCha8Rng::seed_from_u64(57)).bloch();
        let rep = certify(&b).unwrap();
        assert!(rep.passed && rep.deviation <= 1e-6);

        let mut opts = CertifyOptions::default();
        opts.discord.corruption = Some((CandidateKind::D1, -0.05));
        assert!(matches!(certify_with(&b, &opts), Err(Error::CertificationFailure(_))));
    }
}
