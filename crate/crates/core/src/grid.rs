//! Deterministic point sets on the upper unit hemisphere (v ≡ −v).

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    /// Fibonacci lattice; every point moves when `n` changes.
    #[default]
    Fibonacci,
    /// R2 low-discrepancy sequence; the first `m` points of the `n`-point grid
    /// are the `m`-point grid.
    Nested,
}

fn from_height_azimuth(z: f64, phi: f64) -> Vector3<f64> {
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vector3::new(r * phi.cos(), r * phi.sin(), z)
}

/// Equal-area Fibonacci lattice on z > 0.
pub fn fibonacci_hemisphere(n: usize) -> Vec<Vector3<f64>> {
    let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
    (0..n)
        .map(|i| {
            let z = 1.0 - (i as f64 + 0.5) / n as f64;
            let phi = 2.0 * PI * (i as f64 / golden).fract();
            from_height_azimuth(z, phi)
        })
        .collect()
}

/// Prefix-stable R2 sequence (plastic-number increments) mapped equal-area to
/// z > 0.
pub fn nested_hemisphere(n: usize) -> Vec<Vector3<f64>> {
    let g = 1.324_717_957_244_746_f64;
    let (a1, a2) = (1.0 / g, 1.0 / (g * g));
    (0..n)
        .map(|i| {
            let k = (i + 1) as f64;
            let u = (0.5 + a1 * k).fract();
            let w = (0.5 + a2 * k).fract();
            from_height_azimuth(1.0 - u, 2.0 * PI * w)
        })
        .collect()
}

pub fn hemisphere(kind: GridKind, n: usize) -> Vec<Vector3<f64>> {
    match kind {
        GridKind::Fibonacci => fibonacci_hemisphere(n),
        GridKind::Nested => nested_hemisphere(n),
    }
}

/// Typical spacing between neighbouring points of an `n`-point hemisphere grid.
pub fn spacing(n: usize) -> f64 {
    (2.0 * PI / n.max(1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_are_unit_and_upper() {
        for kind in [GridKind::Fibonacci, GridKind::Nested] {
            for v in hemisphere(kind, 2000) {
                assert!((v.norm() - 1.0).abs() < 1e-14);
                assert!(v.z >= 0.0);
            }
        }
    }

    #[test]
    fn nested_grid_is_prefix_stable() {
        let small = nested_hemisphere(100);
        let large = nested_hemisphere(1000);
        assert_eq!(&large[..100], &small[..]);
    }

    #[test]
    fn grids_cover_the_hemisphere() {
        // every probe direction has a grid point within a few spacings
        let probes = fibonacci_hemisphere(300);
        for kind in [GridKind::Fibonacci, GridKind::Nested] {
            let pts = hemisphere(kind, 5000);
            let h = spacing(5000);
            for p in &probes {
                let best = pts
                    .iter()
                    .map(|q| p.dot(q).abs().min(1.0).acos())
                    .fold(f64::INFINITY, f64::min);
                assert!(best < 2.0 * h, "{kind:?}: gap {best} vs spacing {h}");
            }
        }
    }
}
