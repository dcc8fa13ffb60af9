mod common;

use common::bodies;
use invis_core::conics::make_confocal_pair;
use invis_core::geom::{Point2, Vec2};
use invis_core::theory::{
    check_identity_chain, is_bisector, is_bisector_by_angles, CevianConfiguration,
};
use invis_core::tracer::{trace, TraceStatus, DEFAULT_MAX_BOUNCES};
use proptest::prelude::*;

/// A triangle with apex `B` and base `AC`, kept away from degeneracy:
/// every angle at least 0.1 rad and side ratio at most 100. Below that the
/// 1% offset residual can fall under 1e-4 (it is about 4e-5 at 0.05 rad).
fn triangles() -> impl Strategy<Value = [Point2<f64>; 3]> {
    (
        -10.0f64..10.0,
        -10.0f64..10.0,
        -10.0f64..10.0,
        -10.0f64..10.0,
        -10.0f64..10.0,
        -10.0f64..10.0,
    )
        .prop_map(|(ax, ay, bx, by, cx, cy)| {
            [
                Point2::new(ax, ay),
                Point2::new(bx, by),
                Point2::new(cx, cy),
            ]
        })
        .prop_filter("degenerate triangle", |[a, b, c]| {
            let sides = [a.distance(*b), b.distance(*c), c.distance(*a)];
            let (lo, hi) = sides
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(l, h), s| (l.min(*s), h.max(*s)));
            let angle = |p: Point2<f64>, q: Point2<f64>, r: Point2<f64>| {
                let (u, v) = (q - p, r - p);
                u.cross(v).abs().atan2(u.dot(v))
            };
            lo > 0.0
                && hi / lo <= 100.0
                && angle(*a, *b, *c)
                    .min(angle(*b, *c, *a))
                    .min(angle(*c, *a, *b))
                    >= 0.1
        })
}

/// Foot of the bisector from `B`: `AD/DC = AB/BC`.
fn bisector_foot([a, b, c]: [Point2<f64>; 3]) -> Point2<f64> {
    let (ab, bc) = (a.distance(b), b.distance(c));
    a + (c - a) * (ab / (ab + bc))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10_000, max_global_rejects: 1_000_000, ..ProptestConfig::default() })]

    #[test]
    fn bisector_satisfies_relation_c(tri in triangles()) {
        let d = bisector_foot(tri);
        let cfg = CevianConfiguration::from_points(tri[0], tri[1], tri[2], d).unwrap();
        prop_assert!(cfg.relation_c() < 1e-10);
        prop_assert!(cfg.angle_gap().unwrap() < 1e-8);
        prop_assert!(is_bisector(tri[0], tri[1], tri[2], d).unwrap());
        prop_assert!(is_bisector_by_angles(tri[0], tri[1], tri[2], d).unwrap());
    }

    #[test]
    fn offset_cevian_fails_relation_c(tri in triangles(), off in 0.01f64..0.5, toward_c in any::<bool>()) {
        let [a, _, c] = tri;
        let d0 = bisector_foot(tri);
        let t0 = (d0 - a).norm() / (c - a).norm();
        let t = if toward_c { t0 + off } else { t0 - off };
        prop_assume!(t > 0.0 && t < 1.0);
        let d = a + (c - a) * t;
        let cfg = CevianConfiguration::from_points(tri[0], tri[1], tri[2], d).unwrap();
        prop_assert!(cfg.relation_c() > 1e-4, "{:e}", cfg.relation_c());
        prop_assert!(cfg.angle_gap().unwrap() > 1e-8);
        prop_assert!(!is_bisector(tri[0], tri[1], tri[2], d).unwrap());
    }

    #[test]
    fn any_two_relations_give_the_third(a1 in 0.1f64..10.0, a2 in 0.1f64..10.0, q in 0.01f64..0.99) {
        // (a) fixes b2 from (a1, a2, b1); (b) or (c) then fixes f
        let b1 = q * a1;
        let b2 = a2 * b1 / a1;
        let f_b = (a1 * a2 - b1 * b2).sqrt();
        let f_c = ((a1 + b1) * (a2 - b2)).sqrt();
        let from_ab = CevianConfiguration::from_lengths(a1, a2, b1, b2, f_b);
        prop_assume!(from_ab.relation_a() < 1e-12 && from_ab.relation_b() < 1e-12);
        prop_assert!(from_ab.relation_c() < 1e-10);
        let from_ac = CevianConfiguration::from_lengths(a1, a2, b1, b2, f_c);
        prop_assume!(from_ac.relation_a() < 1e-12 && from_ac.relation_c() < 1e-12);
        prop_assert!(from_ac.relation_b() < 1e-10);
        // (b) and (c) together force b2 = a2 b1 / a1, i.e. (a)
        let from_bc = CevianConfiguration::from_lengths(a1, a2, b1, b2, f_b);
        prop_assume!(from_bc.relation_b() < 1e-12 && from_bc.relation_c() < 1e-12);
        prop_assert!(from_bc.relation_a() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn focal_product_at_h_is_the_focal_distance_squared(a in 0.01f64..100.0, r in 0.01f64..0.99) {
        let pair = make_confocal_pair(a, a * r).unwrap();
        let h = Point2::new(pair.c(), a * r * a * r / a);
        let (d1, d2) = (h.distance(pair.f1()), h.distance(pair.f2()));
        let four_c2 = 4.0 * pair.c() * pair.c();
        prop_assert!(((d1 + d2) * (d1 - d2) - four_c2).abs() <= 1e-12 * four_c2 * (d1 / pair.c()).powi(2).max(1.0));
        // F2H is perpendicular to F1F2
        prop_assert!((h - pair.f2()).dot(pair.f2() - pair.f1()).abs() <= 1e-12 * a * a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn identity_chain_holds_inside_the_sector(body in bodies(), u in 0.001f64..0.999, lower in any::<bool>()) {
        let t = body.phi_h + (body.phi_b - body.phi_h) * u;
        let theta = if lower { -t } else { t };
        let traj = trace(&body, body.pair.f1(), Vec2::from_angle(theta), DEFAULT_MAX_BOUNCES);
        prop_assume!(traj.status == TraceStatus::Escaped);
        let report = check_identity_chain(&traj, &body).unwrap();
        prop_assert!(report.passes(1e-9), "{:?}", report);
        let f1 = body.pair.f1();
        let tc = (traj.reflections[0].point - f1).angle().abs();
        let td = (traj.reflections[1].point - f1).angle().abs();
        prop_assert!(tc < body.phi_b && td < body.phi_b);
        let c = body.pair.c();
        prop_assert!((report.focal_product_value - 4.0 * c * c).abs() < 1e-9 * 4.0 * c * c);
    }
}
