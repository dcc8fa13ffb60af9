mod common;

use common::{bodies, canonical};
use invis_core::body::{Body2D, EdgeSet};
use invis_core::geom::{Point2, Vec3};
use invis_core::symmetry3d::{
    export_mesh, quadric_cross_check, quadric_cross_check_with, quadric_patches, revolve,
    sector_directions, trace3d_from_focus, RevolutionVariant,
};
use invis_core::tracer::TraceStatus;
use proptest::prelude::*;

const VARIANTS: [RevolutionVariant; 2] = [
    RevolutionVariant::AboutMajorAxis,
    RevolutionVariant::AboutPerpendicularAxisThroughF1,
];

fn unit(x: f64, y: f64, z: f64) -> Vec3<f64> {
    Vec3::new(x, y, z).normalized().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn traces_stay_in_the_meridian_plane(
        body in bodies(),
        x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0,
        perpendicular in any::<bool>(),
    ) {
        prop_assume!(Vec3::new(x, y, z).norm() > 1e-3);
        let rb = revolve(&body, VARIANTS[perpendicular as usize]);
        let Ok(traj) = trace3d_from_focus(&rb, unit(x, y, z)) else { return Ok(()) };
        let a = body.pair.a();
        prop_assert!(traj.plane_deviation() < 1e-9 * a);
        // the axis and the initial direction span the plane
        prop_assert!(traj.plane_normal.dot(rb.axis.direction).abs() < 1e-12);
        prop_assert!(traj.plane_normal.dot(traj.initial_direction).abs() < 1e-12);
        prop_assert!(traj.final_direction.dot(traj.plane_normal).abs() < 1e-12);
    }

    #[test]
    fn rotation_about_the_major_axis_commutes_with_tracing(
        body in bodies(),
        u in 0.001f64..0.999,
        psi in 0.0f64..std::f64::consts::TAU,
    ) {
        let rb = revolve(&body, RevolutionVariant::AboutMajorAxis);
        let theta = body.phi_h + u * (body.phi_b - body.phi_h);
        let d = Vec3::new(theta.cos(), theta.sin(), 0.0);
        let k = rb.axis.direction;
        let base = trace3d_from_focus(&rb, d).unwrap();
        let turned = trace3d_from_focus(&rb, d.rotated(k, psi)).unwrap();
        prop_assert_eq!(base.reflections.len(), turned.reflections.len());
        let f1 = rb.axis.origin;
        for (p, q) in base.points().iter().zip(turned.points()) {
            let expected = f1 + (*p - f1).rotated(k, psi);
            prop_assert!(expected.distance(q) < 1e-10 * body.pair.a() * body.lambda);
        }
    }
}

#[test]
fn canonical_rotation_by_37_degrees() {
    let rb = revolve(&canonical(), RevolutionVariant::AboutMajorAxis);
    let d = Vec3::new((-0.7f64).cos(), (-0.7f64).sin(), 0.0);
    let psi = 37f64.to_radians();
    let base = trace3d_from_focus(&rb, d).unwrap();
    let turned = trace3d_from_focus(&rb, d.rotated(rb.axis.direction, psi)).unwrap();
    assert_eq!(base.reflections.len(), 4);
    for (p, q) in base.points().iter().zip(turned.points()) {
        let expected = rb.axis.origin + (*p - rb.axis.origin).rotated(rb.axis.direction, psi);
        assert!(expected.distance(q) < 1e-12);
    }
}

#[test]
fn perpendicular_variant_returns_rays_to_f1() {
    let rb = revolve(
        &canonical(),
        RevolutionVariant::AboutPerpendicularAxisThroughF1,
    );
    for d in sector_directions(&rb, 500, 9) {
        let traj = trace3d_from_focus(&rb, d).unwrap();
        assert_eq!(traj.status, TraceStatus::Escaped);
        assert_eq!(traj.reflections.len(), 4);
        assert!(traj.collinearity_error() < 1e-9);
        assert!(traj.exit_line_distance() < 1e-9 * 2.0);
    }
}

#[test]
fn quadric_oracle_agrees_with_the_reduction() {
    let body = canonical();
    let rb = revolve(&body, RevolutionVariant::AboutMajorAxis);
    let mut worst: f64 = 0.0;
    for d in sector_directions(&rb, 100, 21) {
        let direct = quadric_cross_check(&rb, d).unwrap();
        let reduced = trace3d_from_focus(&rb, d).unwrap();
        assert_eq!(direct.classes(), reduced.classes());
        for (p, q) in direct.points().iter().zip(reduced.points()) {
            worst = worst.max(p.distance(q));
        }
        assert!(direct.collinearity_error() < 1e-9);
    }
    assert!(worst < 1e-8 * body.pair.a(), "{worst:e}");
}

#[test]
fn perturbed_quadric_disagrees() {
    let body = canonical();
    let rb = revolve(&body, RevolutionVariant::AboutMajorAxis);
    let mut patches = quadric_patches(&rb);
    // b² off by 1% on the spheroid zones
    for p in patches
        .iter_mut()
        .filter(|p| p.surface.c == -1.0 && p.surface.b > 0.0)
    {
        p.surface.b /= 1.01;
    }
    let mut worst: f64 = 0.0;
    for d in sector_directions(&rb, 100, 21) {
        let direct = quadric_cross_check_with(&rb, &patches, d).unwrap();
        let reduced = trace3d_from_focus(&rb, d).unwrap();
        let gap = direct
            .points()
            .iter()
            .zip(reduced.points())
            .map(|(p, q)| p.distance(q))
            .fold(0.0, f64::max);
        let exit = (direct.final_direction - reduced.final_direction).norm();
        worst = worst.max(gap).max(exit * body.pair.a());
    }
    assert!(worst > 1e-3 * body.pair.a(), "{worst:e}");
}

/// Planar coordinates of a mesh vertex in the meridian half-plane that
/// holds the base body.
fn to_planar(body: &Body2D<f64>, variant: RevolutionVariant, v: [f64; 3]) -> Point2<f64> {
    let c = body.pair.c();
    match variant {
        RevolutionVariant::AboutMajorAxis => Point2::new(v[0], v[1].hypot(v[2])),
        RevolutionVariant::AboutPerpendicularAxisThroughF1 => {
            Point2::new(-c + (v[0] + c).hypot(v[2]), v[1])
        }
    }
}

#[test]
fn mesh_vertices_lie_on_their_arcs() {
    let body = canonical();
    for variant in VARIANTS {
        let rb = revolve(&body, variant);
        let mesh = export_mesh(&rb, 64, 32).unwrap();
        for patch in &mesh.patches {
            let edge = body.edges().iter().find(|e| e.id == patch.edge_id).unwrap();
            let upper = edge.upper;
            for i in patch.first_vertex..patch.first_vertex + patch.rings * patch.azimuthal {
                let mut p = to_planar(&body, variant, mesh.vertices[i]);
                if !upper && variant == RevolutionVariant::AboutMajorAxis {
                    p = p.mirror_y();
                }
                assert!(
                    edge.curve_distance(p) < 1e-9 * body.pair.a(),
                    "{variant:?} {}",
                    patch.edge_id
                );
            }
            // each ring is a circle about the axis
            for j in 0..patch.rings {
                let ring =
                    &mesh.vertices[patch.first_vertex + j * patch.azimuthal..][..patch.azimuthal];
                let r0 = to_planar(&body, variant, ring[0]);
                assert!(ring
                    .iter()
                    .all(|v| to_planar(&body, variant, *v).distance(r0) < 1e-12));
            }
        }
    }
}

/// Volume swept by a closed planar profile `(axial, radial)` by Pappus's
/// theorem: `2π · area · centroid radius`, the product being the first
/// moment of the region about the axis.
fn pappus(profile: &[(f64, f64)]) -> f64 {
    let n = profile.len();
    let mut moment = 0.0;
    for i in 0..n {
        let (x0, y0) = profile[i];
        let (x1, y1) = profile[(i + 1) % n];
        let cross = x0 * y1 - x1 * y0;
        moment += (y0 + y1) * cross / 6.0;
    }
    2.0 * std::f64::consts::PI * moment.abs()
}

#[test]
fn mesh_volume_matches_pappus() {
    let body = canonical();
    let rb = revolve(&body, RevolutionVariant::AboutMajorAxis);
    let mesh = export_mesh(&rb, 256, 128).unwrap();
    for (shell, ids) in [(0usize, [0u32, 2, 1]), (1, [6, 8, 7])] {
        // dense profile H → A → B → H
        let mut profile = Vec::new();
        for (k, id) in ids.iter().enumerate() {
            let e = body.edges().iter().find(|e| e.id.0 == *id).unwrap();
            let mut s = e.sample(4000);
            if k == 2 {
                s.reverse();
            }
            profile.extend(s.iter().map(|p| (p.x, p.y)));
        }
        let expected = pappus(&profile);
        let got = mesh.shell_volume(shell);
        assert!(
            ((got - expected) / expected).abs() < 1e-3,
            "shell {shell}: {got} vs {expected}"
        );
    }
}

#[test]
fn obj_output_is_deterministic() {
    let rb = revolve(
        &canonical(),
        RevolutionVariant::AboutPerpendicularAxisThroughF1,
    );
    let a = export_mesh(&rb, 16, 8).unwrap().to_obj();
    let b = export_mesh(&rb, 16, 8).unwrap().to_obj();
    assert_eq!(a, b);
    assert!(a.lines().filter(|l| l.starts_with("v ")).count() == 4 * 3 * 9 * 16);
    assert!(a.lines().filter(|l| l.starts_with("f ")).count() == 4 * 3 * 8 * 16 * 2);
}
