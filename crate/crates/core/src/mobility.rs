//! Constant-velocity straight-line TU mobility, sampled once per tic.

use serde::{Deserialize, Serialize};

use crate::scenario::{Point, Route};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub tic: u64,
    pub position: Point,
}

/// Distance travelled from the route start after `tic` tics, capped at the
/// route length.
pub fn distance_at(route: &Route, velocity_mps: f64, tic: u64, tic_ms: u64) -> f64 {
    let t = tic as f64 * tic_ms as f64 / 1000.0;
    (velocity_mps * t).min(route.length_m())
}

/// TU position at `tic`. The TU stops at the end point once it gets there.
pub fn position_at(route: &Route, velocity_mps: f64, tic: u64, tic_ms: u64) -> Point {
    let len = route.length_m();
    if len == 0.0 {
        return route.start;
    }
    let travelled = distance_at(route, velocity_mps, tic, tic_ms);
    if travelled >= len {
        return route.end;
    }
    let f = travelled / len;
    Point::new(
        route.start.x + f * (route.end.x - route.start.x),
        route.start.y + f * (route.end.y - route.start.y),
    )
}

/// Samples for tics `0..=run_time_ms / tic_ms`.
pub fn trajectory(
    route: &Route,
    velocity_mps: f64,
    run_time_ms: u64,
    tic_ms: u64,
) -> Vec<TrajectorySample> {
    (0..=run_time_ms / tic_ms)
        .map(|tic| TrajectorySample {
            tic,
            position: position_at(route, velocity_mps, tic, tic_ms),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const V50: f64 = 50.0 / 3.6;

    #[test]
    fn starts_at_start() {
        for v in [1.0, V50, 100.0] {
            assert_eq!(position_at(&Route::case_a(), v, 0, 10), Point::new(1000.0, 0.0));
        }
    }

    #[test]
    fn case_a_after_one_second() {
        let p = position_at(&Route::case_a(), 13.89, 100, 10);
        let d = 13.89 / 2f64.sqrt();
        assert!((p.x - (1000.0 - d)).abs() < 1e-9);
        assert!((p.y - d).abs() < 1e-9);
        assert!((p.x - 990.18).abs() < 0.005 && (p.y - 9.82).abs() < 0.005);
    }

    #[test]
    fn case_b_at_run_end_not_clamped() {
        let p = position_at(&Route::case_b(), 13.89, 7000, 10);
        assert!((p.x - 27.7).abs() < 1e-9, "{p:?}");
        assert_eq!(p.y, 500.0);
    }

    #[test]
    fn sample_count() {
        assert_eq!(trajectory(&Route::case_a(), V50, 70_000, 10).len(), 7001);
    }

    #[test]
    fn clamps_at_end() {
        // 100 m/s covers the 1000 m Case B route after 1000 tics.
        let traj = trajectory(&Route::case_b(), 100.0, 20_000, 10);
        assert!(traj[999].position != Route::case_b().end);
        for s in &traj[1000..] {
            assert_eq!(s.position, Route::case_b().end);
        }
    }

    #[test]
    fn step_length_at_50_kmh() {
        let v = 13.89;
        let traj = trajectory(&Route::case_b(), v, 1000, 10);
        for w in traj.windows(2) {
            let step = w[0].position.distance(&w[1].position);
            assert!((step - 0.1389).abs() < 1e-9);
        }
    }

    #[test]
    fn reversed_route_mirrors_samples() {
        let fwd = Route::case_b();
        let rev = Route::custom(fwd.end, fwd.start);
        let v = 1000.0 / 70.0;
        let a = trajectory(&fwd, v, 70_000, 10);
        let b = trajectory(&rev, v, 70_000, 10);
        let n = a.len() - 1;
        for i in 0..=n {
            let p = a[i].position;
            let q = b[n - i].position;
            assert!(p.distance(&q) < 1e-6, "tic {i}: {p:?} vs {q:?}");
        }
    }

    proptest! {
        #[test]
        fn constant_displacement_then_zero(v in 0.5f64..400.0, case_b in any::<bool>()) {
            let route = if case_b { Route::case_b() } else { Route::case_a() };
            let traj = trajectory(&route, v, 10_000, 10);
            let step = v * 0.01;
            let len = route.length_m();
            for w in traj.windows(2) {
                let d = w[0].position.distance(&w[1].position);
                let before = distance_at(&route, v, w[0].tic, 10);
                let after = distance_at(&route, v, w[1].tic, 10);
                if after < len {
                    prop_assert!((d - step).abs() < 1e-9);
                } else if before >= len {
                    prop_assert_eq!(d, 0.0);
                }
                // on the segment
                let p = w[1].position;
                let (s, e) = (route.start, route.end);
                let cross = (e.x - s.x) * (p.y - s.y) - (e.y - s.y) * (p.x - s.x);
                prop_assert!(cross.abs() / len < 1e-9);
            }
        }
    }
}
