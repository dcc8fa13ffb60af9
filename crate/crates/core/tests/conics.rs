use invis_core::conics::{ellipse_hyperbola_intersection, make_confocal_pair, ConicKind};
use invis_core::geom::{point_line_distance, Point2, Ray2, Vec2};
use invis_core::tracer::reflect;
use proptest::prelude::*;

fn pairs() -> impl Strategy<Value = (f64, f64)> {
    (0.01f64..100.0, 0.01f64..0.99).prop_map(|(a, r)| (a, a * r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn hyperbola_foci_coincide_with_ellipse_foci((a, b) in pairs()) {
        let pair = make_confocal_pair(a, b).unwrap();
        let (g1, g2) = pair.hyperbola().world_foci();
        let c = (pair.alpha().powi(2) + pair.beta().powi(2)).sqrt();
        prop_assert!((c - pair.c()).abs() <= 1e-12 * pair.c());
        prop_assert!(g1.distance(pair.f1()) <= 1e-12 * pair.c());
        prop_assert!(g2.distance(pair.f2()) <= 1e-12 * pair.c());
    }

    #[test]
    fn ellipse_reflects_f1_rays_through_f2((a, b) in pairs(), t in 0.0f64..std::f64::consts::TAU) {
        let pair = make_confocal_pair(a, b).unwrap();
        let p = Point2::new(a * t.cos(), b * t.sin());
        let u = (p - pair.f1()).normalized().unwrap();
        let n = pair.ellipse().normal_at(p).unwrap();
        if let Ok(out) = reflect(u, n) {
            prop_assert!(point_line_distance(pair.f2(), p, out) < 1e-9 * a);
        }
    }

    #[test]
    fn hyperbola_reflects_f2_rays_toward_f1((a, b) in pairs(), s in -3.0f64..3.0) {
        let pair = make_confocal_pair(a, b).unwrap();
        let p = Point2::new(pair.alpha() * s.cosh(), pair.beta() * s.sinh());
        let u = (p - pair.f2()).normalized().unwrap();
        let n = pair.hyperbola().normal_at(p).unwrap();
        if let Ok(out) = reflect(u, n) {
            prop_assert!(point_line_distance(pair.f1(), p, out) < 1e-9 * a);
        }
    }

    #[test]
    fn focal_strings((a, b) in pairs(), t in 0.0f64..std::f64::consts::TAU, s in -3.0f64..3.0) {
        let pair = make_confocal_pair(a, b).unwrap();
        let (f1, f2) = (pair.f1(), pair.f2());
        let p = Point2::new(a * t.cos(), b * t.sin());
        let sum = p.distance(f1) + p.distance(f2);
        prop_assert!((sum - 2.0 * a).abs() <= 1e-12 * 2.0 * a);
        let q = Point2::new(pair.alpha() * s.cosh(), pair.beta() * s.sinh());
        let diff = q.distance(f1) - q.distance(f2);
        // the difference loses digits to cancellation far out on the branch
        let scale = q.distance(f1) / (2.0 * pair.alpha());
        prop_assert!((diff - 2.0 * pair.alpha()).abs() <= 1e-12 * 2.0 * pair.alpha() * scale.max(1.0));
    }

    #[test]
    fn intersection_point_is_on_both_curves((a, b) in pairs()) {
        let pair = make_confocal_pair(a, b).unwrap();
        let h = ellipse_hyperbola_intersection(&pair);
        prop_assert!((h.x - pair.c()).abs() <= 1e-12 * a);
        prop_assert!((h.y - b * b / a).abs() <= 1e-12 * a);
        prop_assert!(pair.ellipse().implicit(h).abs() < 1e-12);
        prop_assert!(pair.hyperbola().implicit(h).abs() < 1e-12 * (a / pair.alpha()).powi(2));
    }
}

/// Crossings of the ray with the conic found by stepping the implicit
/// function at `step` and bisecting each sign change.
fn sampled_crossings(
    conic: &invis_core::conics::Conic<f64>,
    ray: &Ray2<f64>,
    t_max: f64,
    step: f64,
) -> Vec<f64> {
    let f = |t: f64| conic.implicit(ray.at(t));
    let on_branch = |t: f64| conic.kind == ConicKind::Ellipse || conic.to_local(ray.at(t)).x > 0.0;
    let n = (t_max / step) as usize;
    let mut out = Vec::new();
    let mut prev = f(0.0);
    for i in 1..=n {
        let t = i as f64 * step;
        let cur = f(t);
        if prev.signum() != cur.signum() {
            let (mut lo, mut hi) = (t - step, t);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if f(mid).signum() == f(lo).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            if on_branch(root) {
                out.push(root);
            }
        }
        prev = cur;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn intersections_match_sampling_oracle(
        ox in -5.0f64..5.0,
        oy in -5.0f64..5.0,
        theta in 0.0f64..std::f64::consts::TAU,
        hyperbola in any::<bool>(),
        lambda in 1.0f64..1.8,
        mirrored in any::<bool>(),
    ) {
        let pair = make_confocal_pair(2.0, 3f64.sqrt()).unwrap();
        let mut conic = if hyperbola { pair.hyperbola() } else { pair.ellipse() };
        conic = conic.dilated(pair.f1(), lambda);
        if mirrored {
            conic = conic.mirrored_about(pair.f1());
        }
        let ray = Ray2::new(Point2::new(ox, oy), Vec2::from_angle(theta)).unwrap();
        let hits = conic.intersect_ray(&ray);
        prop_assume!(hits.iter().all(|h| !h.tangent));
        prop_assume!(hits.windows(2).all(|w| w[1].t - w[0].t > 1e-3));
        let t_max = 20.0;
        let expected = sampled_crossings(&conic, &ray, t_max, 1e-4);
        let got: Vec<f64> = hits.iter().map(|h| h.t).filter(|&t| t < t_max - 1e-3 && t > 1e-3).collect();
        let expected: Vec<f64> = expected.into_iter().filter(|&t| t < t_max - 1e-3 && t > 1e-3).collect();
        prop_assert_eq!(got.len(), expected.len(), "{:?} vs {:?}", got, expected);
        for (g, e) in got.iter().zip(&expected) {
            prop_assert!((g - e).abs() < 1e-6);
        }
    }
}

#[test]
fn tangent_ray_is_flagged() {
    let pair = make_confocal_pair(2.0, 3f64.sqrt()).unwrap();
    // horizontal line y = b touches the ellipse at (0, b)
    let ray = Ray2::new(Point2::new(-5.0, 3f64.sqrt()), Vec2::new(1.0, 0.0)).unwrap();
    let hits = pair.ellipse().intersect_ray(&ray);
    assert_eq!(hits.len(), 1);
    assert!(hits[0].tangent);
    assert!((hits[0].t - 5.0).abs() < 1e-6);
}

#[test]
fn single_precision_pair() {
    let pair = make_confocal_pair(2.0f32, 3f32.sqrt()).unwrap();
    assert!((pair.c() - 1.0).abs() < 1e-6);
    assert!(pair.residuals().iter().all(|r| *r < 1e-5));
    assert!((pair.phi_h() - 0.6435).abs() < 1e-4);
}
