//! Solids of revolution built from a planar body, and their rays from `F1`.
//!
//! `F1` lies on the rotation axis in both variants, so every ray from `F1`
//! spans a plane with the axis and its billiard trajectory never leaves
//! that plane. Tracing therefore reduces to the planar tracer on the
//! meridian cross-section.

mod mesh;
mod quadric;

pub use mesh::{export_mesh, Mesh, MeshPatch, MIN_AZIMUTHAL_STEPS, MIN_MERIDIAN_STEPS};
pub use quadric::{
    quadric_cross_check, quadric_cross_check_with, quadric_patches, AxialQuadric, QuadricPatch,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::body::{Body2D, EdgeClass, EdgeId, EdgeList, EdgeSet};
use crate::error::GeometryError;
use crate::geom::{Point2, Point3, Vec2, Vec3};
use crate::invisibility::{Verdict, VerdictCounts, DEGENERATE_BUDGET};
use crate::scalar::{lit, Real};
use crate::theory::FOUR_BOUNCE_CLASSES;
use crate::tracer::{trace, Degeneracy, TraceStatus, DEFAULT_MAX_BOUNCES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RevolutionVariant {
    /// Rotation about the line `F1F2`.
    AboutMajorAxis,
    /// Rotation about the line through `F1` perpendicular to `F1F2`,
    /// within the plane of the planar body.
    AboutPerpendicularAxisThroughF1,
}

/// A line in space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis3<T> {
    pub origin: Point3<T>,
    /// Unit direction.
    pub direction: Vec3<T>,
}

/// A planar body swept about an axis through `F1`. The planar body sits
/// in the plane `z = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RevolutionBody<T> {
    pub base: Body2D<T>,
    pub variant: RevolutionVariant,
    pub axis: Axis3<T>,
    /// Meridian cross-section in the planar frame: the base body, plus its
    /// mirror image across the axis for the perpendicular variant.
    section: EdgeList<T>,
}

pub fn revolve<T: Real>(base: &Body2D<T>, variant: RevolutionVariant) -> RevolutionBody<T> {
    let f1 = base.pair.f1();
    let (o, l) = (T::zero(), T::one());
    let direction = match variant {
        RevolutionVariant::AboutMajorAxis => Vec3::new(l, o, o),
        RevolutionVariant::AboutPerpendicularAxisThroughF1 => Vec3::new(o, l, o),
    };
    let mut edges = base.edges.clone();
    let mut diameter = base.diameter();
    if variant == RevolutionVariant::AboutPerpendicularAxisThroughF1 {
        let n = edges.len() as u32;
        edges.extend(
            base.edges
                .iter()
                .map(|e| e.mirrored_about_vertical(f1, EdgeId(e.id.0 + n))),
        );
        diameter = diameter + diameter;
    }
    RevolutionBody {
        base: base.clone(),
        variant,
        axis: Axis3 {
            origin: Vec3::from_planar(f1),
            direction,
        },
        section: EdgeList { edges, diameter },
    }
}

/// Orthonormal frame of the meridian plane through a direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeridianFrame<T> {
    pub origin: Point3<T>,
    pub axis: Vec3<T>,
    /// In-plane unit vector perpendicular to the axis.
    pub radial: Vec3<T>,
    variant: RevolutionVariant,
    c: T,
}

impl<T: Real> MeridianFrame<T> {
    /// Planar point (base-body coordinates) to space.
    pub fn to_space(&self, p: Point2<T>) -> Point3<T> {
        let (along, across) = self.split(p);
        self.origin + self.axis * along + self.radial * across
    }

    pub fn dir_to_space(&self, d: Vec2<T>) -> Vec3<T> {
        match self.variant {
            RevolutionVariant::AboutMajorAxis => self.axis * d.x + self.radial * d.y,
            RevolutionVariant::AboutPerpendicularAxisThroughF1 => {
                self.radial * d.x + self.axis * d.y
            }
        }
    }

    /// Space direction (assumed to lie in the plane) to the planar frame.
    pub fn dir_to_plane(&self, d: Vec3<T>) -> Vec2<T> {
        let (u, r) = (d.dot(self.axis), d.dot(self.radial));
        match self.variant {
            RevolutionVariant::AboutMajorAxis => Vec2::new(u, r),
            RevolutionVariant::AboutPerpendicularAxisThroughF1 => Vec2::new(r, u),
        }
    }

    /// Unit normal of the meridian plane.
    pub fn normal(&self) -> Vec3<T> {
        self.axis.cross(self.radial)
    }

    fn split(&self, p: Point2<T>) -> (T, T) {
        let x = p.x + self.c;
        match self.variant {
            RevolutionVariant::AboutMajorAxis => (x, p.y),
            RevolutionVariant::AboutPerpendicularAxisThroughF1 => (p.y, x),
        }
    }
}

impl<T: Real> RevolutionBody<T> {
    /// The planar edges seen in every meridian plane.
    pub fn section(&self) -> &EdgeList<T> {
        &self.section
    }

    /// The meridian frame containing `direction`, which must not be
    /// parallel to the axis.
    pub fn meridian_frame(&self, direction: Vec3<T>) -> Result<MeridianFrame<T>, GeometryError> {
        let k = self.axis.direction;
        let d = direction
            .normalized()
            .ok_or_else(|| GeometryError::Construction("zero direction".into()))?;
        let perp = d - k * d.dot(k);
        if perp.norm() <= lit::<T>(1e-12) {
            return Err(GeometryError::AxisParallel);
        }
        Ok(MeridianFrame {
            origin: self.axis.origin,
            axis: k,
            radial: perp / perp.norm(),
            variant: self.variant,
            c: self.base.pair.c(),
        })
    }

    /// The frame whose half-plane at azimuth `psi` contains the planar body
    /// rotated by `psi`; `psi = 0` is the plane `z = 0`.
    pub fn frame_at_azimuth(&self, psi: T) -> MeridianFrame<T> {
        let k = self.axis.direction;
        let (o, l) = (T::zero(), T::one());
        let r0 = match self.variant {
            RevolutionVariant::AboutMajorAxis => Vec3::new(o, l, o),
            RevolutionVariant::AboutPerpendicularAxisThroughF1 => Vec3::new(l, o, o),
        };
        MeridianFrame {
            origin: self.axis.origin,
            axis: k,
            radial: r0.rotated(k, psi),
            variant: self.variant,
            c: self.base.pair.c(),
        }
    }

    /// Maps a point of the planar body to space by rotating it `psi` about
    /// the axis.
    pub fn embed(&self, p: Point2<T>, psi: T) -> Point3<T> {
        self.frame_at_azimuth(psi).to_space(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reflection3D<T> {
    pub edge_id: EdgeId,
    pub class: EdgeClass,
    pub point: Point3<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory3D<T> {
    pub origin: Point3<T>,
    pub initial_direction: Vec3<T>,
    pub reflections: Vec<Reflection3D<T>>,
    pub final_direction: Vec3<T>,
    /// Unit normal of the meridian plane the trajectory lives in.
    pub plane_normal: Vec3<T>,
    pub status: TraceStatus,
    pub degeneracy: Option<Degeneracy>,
}

impl<T: Real> Trajectory3D<T> {
    pub fn points(&self) -> Vec<Point3<T>> {
        self.reflections.iter().map(|r| r.point).collect()
    }

    pub fn classes(&self) -> Vec<EdgeClass> {
        self.reflections.iter().map(|r| r.class).collect()
    }

    pub fn last_point(&self) -> Point3<T> {
        self.reflections.last().map_or(self.origin, |r| r.point)
    }

    /// Largest distance of a reflection point from the meridian plane.
    pub fn plane_deviation(&self) -> T {
        self.reflections
            .iter()
            .map(|r| (r.point - self.origin).dot(self.plane_normal).abs())
            .fold(T::zero(), T::max)
    }

    /// Angle between the final and initial directions.
    pub fn collinearity_error(&self) -> T {
        let u = self.initial_direction;
        let v = self.final_direction;
        u.cross(v).norm().atan2(u.dot(v))
    }

    /// Distance from the origin to the line of the final segment.
    pub fn exit_line_distance(&self) -> T {
        let v = self.final_direction;
        (self.origin - self.last_point()).cross(v).norm() / v.norm()
    }
}

/// Plain-data form of a 3D trajectory for export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord3D {
    pub origin: [f64; 3],
    pub initial_direction: [f64; 3],
    pub points: Vec<[f64; 3]>,
    pub edge_ids: Vec<u32>,
    pub edge_classes: Vec<EdgeClass>,
    pub final_direction: [f64; 3],
    pub plane_normal: [f64; 3],
    pub plane_deviation: f64,
    pub collinearity_error: f64,
    pub exit_line_distance: f64,
    pub status: TraceStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degeneracy: Option<Degeneracy>,
}

impl<T: Real> From<&Trajectory3D<T>> for TrajectoryRecord3D {
    fn from(t: &Trajectory3D<T>) -> Self {
        let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
        Self {
            origin: t.origin.to_array_f64(),
            initial_direction: t.initial_direction.to_array_f64(),
            points: t
                .reflections
                .iter()
                .map(|r| r.point.to_array_f64())
                .collect(),
            edge_ids: t.reflections.iter().map(|r| r.edge_id.0).collect(),
            edge_classes: t.classes(),
            final_direction: t.final_direction.to_array_f64(),
            plane_normal: t.plane_normal.to_array_f64(),
            plane_deviation: f(t.plane_deviation()),
            collinearity_error: f(t.collinearity_error()),
            exit_line_distance: f(t.exit_line_distance()),
            status: t.status,
            degeneracy: t.degeneracy,
        }
    }
}

/// Traces the ray from `F1` along `direction` by reduction to its meridian
/// plane.
pub fn trace3d_from_focus<T: Real>(
    rb: &RevolutionBody<T>,
    direction: Vec3<T>,
) -> Result<Trajectory3D<T>, GeometryError> {
    let frame = rb.meridian_frame(direction)?;
    let d = direction.normalized().unwrap_or(direction);
    let planar = trace(
        &rb.section,
        rb.base.pair.f1(),
        frame.dir_to_plane(d),
        DEFAULT_MAX_BOUNCES,
    );
    Ok(Trajectory3D {
        origin: rb.axis.origin,
        initial_direction: d,
        reflections: planar
            .reflections
            .iter()
            .map(|r| Reflection3D {
                edge_id: r.edge_id,
                class: r.class,
                point: frame.to_space(r.point),
            })
            .collect(),
        final_direction: frame.dir_to_space(planar.final_direction),
        plane_normal: frame.normal(),
        status: planar.status,
        degeneracy: planar.degeneracy.map(|h| h.kind),
    })
}

/// Seeded directions from `F1` that hit the solid: uniform on the sphere,
/// restricted to the cones (major axis) or bands (perpendicular axis)
/// swept by the planar sectors.
pub fn sector_directions<T: Real>(rb: &RevolutionBody<T>, n: usize, seed: u64) -> Vec<Vec3<f64>> {
    let phi_h = rb.base.phi_h.to_f64().unwrap_or(f64::NAN);
    let phi_b = rb.base.phi_b.to_f64().unwrap_or(f64::NAN);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    (0..n)
        .map(|_| {
            let psi = rng.gen::<f64>() * tau;
            match rb.variant {
                RevolutionVariant::AboutMajorAxis => {
                    let ct = rng.gen_range(phi_b.cos()..phi_h.cos());
                    let st = (1.0 - ct * ct).sqrt();
                    Vec3::new(ct, st * psi.cos(), st * psi.sin())
                }
                RevolutionVariant::AboutPerpendicularAxisThroughF1 => {
                    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                    let dy = sign * rng.gen_range(phi_h.sin()..phi_b.sin());
                    let r = (1.0 - dy * dy).sqrt();
                    Vec3::new(r * psi.cos(), dy, r * psi.sin())
                }
            }
        })
        .collect()
}

/// Outcome of a 3D ray from `F1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayVerdict3D {
    pub direction: [f64; 3],
    pub bounce_count: usize,
    pub collinearity_error: f64,
    pub exit_line_distance: f64,
    pub plane_deviation: f64,
    pub verdict: Verdict,
}

pub fn verify_direction<T: Real>(
    rb: &RevolutionBody<T>,
    direction: Vec3<T>,
    tolerance: f64,
) -> RayVerdict3D {
    let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
    let a = f(rb.base.pair.a());
    let mut v = RayVerdict3D {
        direction: direction.to_array_f64(),
        bounce_count: 0,
        collinearity_error: 0.0,
        exit_line_distance: 0.0,
        plane_deviation: 0.0,
        verdict: Verdict::Degenerate,
    };
    let Ok(traj) = trace3d_from_focus(rb, direction) else {
        return v;
    };
    v.bounce_count = traj.reflections.len();
    v.collinearity_error = f(traj.collinearity_error());
    v.exit_line_distance = f(traj.exit_line_distance());
    v.plane_deviation = f(traj.plane_deviation());
    v.verdict = match traj.status {
        TraceStatus::DegenerateHit => Verdict::Degenerate,
        TraceStatus::MaxBouncesExceeded => Verdict::Fail,
        TraceStatus::Escaped if traj.reflections.is_empty() => Verdict::Miss,
        TraceStatus::Escaped => {
            let forward = (traj.last_point() - traj.origin).dot(traj.initial_direction)
                > (traj.reflections[0].point - traj.origin).dot(traj.initial_direction);
            if traj.classes() == FOUR_BOUNCE_CLASSES
                && v.collinearity_error < tolerance
                && v.exit_line_distance < tolerance * a
                && v.plane_deviation < tolerance * a
                && forward
            {
                Verdict::InvisiblePass
            } else {
                Verdict::Fail
            }
        }
    };
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fan3DReport {
    pub variant: RevolutionVariant,
    pub rays: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub counts: VerdictCounts,
    pub max_collinearity_error: f64,
    /// Relative to `a`.
    pub max_exit_line_distance_rel: f64,
    /// Relative to `a`.
    pub max_plane_deviation_rel: f64,
    pub pass: bool,
}

pub fn verify_fan3d<T: Real>(
    rb: &RevolutionBody<T>,
    n: usize,
    tolerance: f64,
    seed: u64,
) -> Fan3DReport {
    let a = rb.base.pair.a().to_f64().unwrap_or(f64::NAN);
    let dirs = sector_directions(rb, n, seed);
    let verdicts: Vec<RayVerdict3D> = dirs
        .par_iter()
        .map(|d| verify_direction(rb, Vec3::new(lit(d.x), lit(d.y), lit(d.z)), tolerance))
        .collect();
    let mut counts = VerdictCounts::default();
    let (mut col, mut dist, mut plane) = (0.0f64, 0.0f64, 0.0f64);
    for v in &verdicts {
        match v.verdict {
            Verdict::InvisiblePass => counts.invisible_pass += 1,
            Verdict::Miss => counts.miss += 1,
            Verdict::Degenerate => counts.degenerate += 1,
            Verdict::Fail => counts.fail += 1,
        }
        if v.verdict != Verdict::Degenerate {
            col = col.max(v.collinearity_error);
            dist = dist.max(v.exit_line_distance);
            plane = plane.max(v.plane_deviation);
        }
    }
    let pass = counts.fail == 0 && counts.degenerate as f64 <= DEGENERATE_BUDGET * n as f64;
    Fan3DReport {
        variant: rb.variant,
        rays: n,
        seed,
        tolerance,
        counts,
        max_collinearity_error: col,
        max_exit_line_distance_rel: dist / a,
        max_plane_deviation_rel: plane / a,
        pass,
    }
}

/// The circles along which the revolved inner and outer solids touch:
/// `(center, radius)` for each planar touch point, after revolution.
pub fn touch_circles<T: Real>(rb: &RevolutionBody<T>) -> Vec<(Point3<T>, T)> {
    let k = rb.axis.direction;
    let mut pts: Vec<Point2<T>> = rb.base.touch_points.to_vec();
    if rb.variant == RevolutionVariant::AboutMajorAxis {
        // both touch points sweep the same circle
        pts.truncate(1);
    }
    pts.iter()
        .map(|&p| {
            let q = Vec3::from_planar(p) - rb.axis.origin;
            let along = q.dot(k);
            (rb.axis.origin + k * along, (q - k * along).norm())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::build_invisible_body;
    use crate::conics::make_confocal_pair;

    fn rb(variant: RevolutionVariant) -> RevolutionBody<f64> {
        let body =
            build_invisible_body(&make_confocal_pair(2.0, 3f64.sqrt()).unwrap(), 0.8).unwrap();
        revolve(&body, variant)
    }

    #[test]
    fn axes() {
        let m = rb(RevolutionVariant::AboutMajorAxis);
        assert!(m.axis.origin.distance(Vec3::new(-1.0, 0.0, 0.0)) < 1e-15);
        assert_eq!(m.axis.direction, Vec3::new(1.0, 0.0, 0.0));
        let p = rb(RevolutionVariant::AboutPerpendicularAxisThroughF1);
        assert_eq!(p.axis.direction, Vec3::new(0.0, 1.0, 0.0));
        assert_eq!(p.section().edges.len(), 24);
    }

    #[test]
    fn azimuth_zero_is_identity() {
        for variant in [
            RevolutionVariant::AboutMajorAxis,
            RevolutionVariant::AboutPerpendicularAxisThroughF1,
        ] {
            let r = rb(variant);
            for (_, p) in r.base.inner.as_array() {
                let q = r.embed(p, 0.0);
                assert!(q.distance(Vec3::from_planar(p)) < 1e-15, "{variant:?}");
            }
        }
    }

    #[test]
    fn planar_direction_matches_planar_trace() {
        let r = rb(RevolutionVariant::AboutMajorAxis);
        let d = Vec2::from_angle(-0.7);
        let t3 = trace3d_from_focus(&r, Vec3::from_planar(d)).unwrap();
        let t2 = trace(&r.base, r.base.pair.f1(), d, DEFAULT_MAX_BOUNCES);
        assert_eq!(t3.reflections.len(), 4);
        for (a, b) in t3.points().iter().zip(t2.vertices().iter().skip(1)) {
            assert!(a.distance(Vec3::from_planar(*b)) < 1e-12);
        }
    }

    #[test]
    fn axis_parallel_is_rejected() {
        let r = rb(RevolutionVariant::AboutMajorAxis);
        assert_eq!(
            trace3d_from_focus(&r, Vec3::new(1.0, 0.0, 0.0)).unwrap_err(),
            GeometryError::AxisParallel
        );
        let p = rb(RevolutionVariant::AboutPerpendicularAxisThroughF1);
        assert!(trace3d_from_focus(&p, Vec3::new(0.0, -1.0, 0.0)).is_err());
    }

    #[test]
    fn small_fans_pass() {
        for variant in [
            RevolutionVariant::AboutMajorAxis,
            RevolutionVariant::AboutPerpendicularAxisThroughF1,
        ] {
            let rep = verify_fan3d(&rb(variant), 200, 1e-9, 3);
            assert!(rep.pass, "{rep:?}");
            assert_eq!(rep.counts.invisible_pass + rep.counts.degenerate, 200);
        }
    }

    #[test]
    fn touch_circle_radius() {
        let r = rb(RevolutionVariant::AboutMajorAxis);
        let circles = touch_circles(&r);
        assert_eq!(circles.len(), 1);
        assert!((circles[0].1 - r.base.inner.b.y).abs() < 1e-12);
    }
}
