mod common;

use common::{bodies, canonical};
use invis_core::body::{Body2D, EdgeSet};
use invis_core::geom::{angle_between, point_line_distance, Vec2};
use invis_core::theory::FOUR_BOUNCE_CLASSES;
use invis_core::tracer::{trace, TraceStatus, Trajectory, DEFAULT_MAX_BOUNCES};
use proptest::prelude::*;

/// An angle strictly inside the upper or lower sector.
fn sector_angle(body: &Body2D<f64>, u: f64, lower: bool) -> f64 {
    let t = body.phi_h + (body.phi_b - body.phi_h) * u;
    if lower {
        -t
    } else {
        t
    }
}

fn trace_from_f1(body: &Body2D<f64>, theta: f64) -> Trajectory<f64> {
    trace(
        body,
        body.pair.f1(),
        Vec2::from_angle(theta),
        DEFAULT_MAX_BOUNCES,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn every_reflection_obeys_the_law(body in bodies(), u in 0.001f64..0.999, lower in any::<bool>()) {
        let traj = trace_from_f1(&body, sector_angle(&body, u, lower));
        for r in &traj.reflections {
            // equal angles with the normal, and in-out in the plane of incidence
            prop_assert!((r.incoming.dot(r.normal) + r.outgoing.dot(r.normal)).abs() < 1e-12);
            prop_assert!((r.incoming.cross(r.normal) - r.outgoing.cross(r.normal)).abs() < 1e-12);
            prop_assert!((r.outgoing.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn legs_pass_through_the_foci(body in bodies(), u in 0.001f64..0.999, lower in any::<bool>()) {
        let traj = trace_from_f1(&body, sector_angle(&body, u, lower));
        prop_assume!(traj.status == TraceStatus::Escaped);
        prop_assert_eq!(traj.classes(), FOUR_BOUNCE_CLASSES.to_vec());
        let a = body.pair.a();
        let r = &traj.reflections;
        let (f1, f2) = (body.pair.f1(), body.pair.f2());
        prop_assert!(point_line_distance(f2, r[0].point, r[0].outgoing) < 1e-9 * a);
        prop_assert!(point_line_distance(f1, r[1].point, r[1].outgoing) < 1e-9 * a);
        prop_assert!(point_line_distance(body.dilated_f2(), r[2].point, r[2].outgoing) < 1e-9 * a * body.lambda);
        // D lies on the arc HB of the mirrored triangle
        let td = (r[1].point - f1).angle().abs();
        prop_assert!(td > body.phi_h && td < body.phi_b);
        prop_assert!(traj.reflections.iter().all(|r| !r.class.is_radial()));
    }

    #[test]
    fn reversed_exit_retraces_the_path(body in bodies(), u in 0.001f64..0.999) {
        let traj = trace_from_f1(&body, sector_angle(&body, u, false));
        prop_assume!(traj.status == TraceStatus::Escaped && traj.reflections.len() == 4);
        let g = traj.last_point();
        // start on the exit ray, beyond the body, heading back in
        let start = g + traj.final_direction * (2.0 * body.diameter());
        let back = trace(&body, start, -traj.final_direction, DEFAULT_MAX_BOUNCES);
        prop_assert_eq!(back.reflections.len(), 4);
        for (p, q) in back.vertices().iter().skip(1).zip(traj.vertices().iter().skip(1).rev()) {
            prop_assert!(p.distance(*q) < 1e-8 * body.pair.a());
        }
        prop_assert!(angle_between(back.final_direction, -traj.initial_direction) < 1e-9);
    }

    #[test]
    fn mirror_rays_have_mirror_trajectories(body in bodies(), theta in -3.1f64..3.1) {
        let up = trace_from_f1(&body, theta);
        let down = trace_from_f1(&body, -theta);
        prop_assert_eq!(up.status, down.status);
        prop_assert_eq!(up.reflections.len(), down.reflections.len());
        for (p, q) in up.reflections.iter().zip(&down.reflections) {
            prop_assert!(p.point.mirror_y().distance(q.point) < 1e-12 * body.pair.a() * body.lambda);
            prop_assert_eq!(p.class, q.class);
        }
    }

    #[test]
    fn rays_outside_the_sectors_escape(body in bodies(), u in 0.0f64..1.0) {
        // pick an angle outside ±[φ_H, φ_B], away from the boundary rays
        let gap = 1e-6;
        let inner = body.phi_h - 2.0 * gap;
        let outer_span = std::f64::consts::PI - body.phi_b - 2.0 * gap;
        let span = 2.0 * inner + 2.0 * outer_span;
        let s = u * span;
        let theta = if s < 2.0 * inner {
            s - inner
        } else if s < 2.0 * inner + outer_span {
            body.phi_b + gap + (s - 2.0 * inner)
        } else {
            -(body.phi_b + gap + (s - 2.0 * inner - outer_span))
        };
        let traj = trace_from_f1(&body, theta);
        prop_assert_eq!(traj.status, TraceStatus::Escaped);
        prop_assert_eq!(traj.reflections.len(), 0);
    }
}

#[test]
fn corner_rays_are_degenerate() {
    let body = canonical();
    for theta in [body.phi_b, -body.phi_b, body.phi_h, -body.phi_h] {
        let traj = trace_from_f1(&body, theta);
        assert_eq!(traj.status, TraceStatus::DegenerateHit, "{theta}");
    }
}

#[test]
fn scaled_bodies_keep_errors_small() {
    let body = canonical();
    for s in [1e-2, 1e-1, 1.0, 10.0, 1e2] {
        let b = body.scaled(s).unwrap();
        let mut worst: f64 = 0.0;
        for i in 1..200 {
            let traj = trace_from_f1(&b, sector_angle(&b, i as f64 / 200.0, i % 2 == 0));
            worst = worst.max(angle_between(traj.final_direction, traj.initial_direction));
        }
        assert!(worst < 1e-12, "scale {s}: {worst:e}");
    }
}
