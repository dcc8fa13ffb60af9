//! Direct 3D tracing against the revolved surfaces of the major-axis
//! solid: zones of a prolate spheroid, of one sheet of a hyperboloid of two
//! sheets and of a circular cone, plus their dilates about `F1`.
//!
//! Used as an oracle for the meridian reduction; it shares no code with the
//! planar tracer.

use super::{Reflection3D, RevolutionBody, RevolutionVariant, Trajectory3D};
use crate::body::{EdgeClass, EdgeId};
use crate::error::GeometryError;
use crate::geom::{Point3, Vec3};
use crate::scalar::{lit, Real};
use crate::tracer::{Degeneracy, TraceStatus, DEFAULT_MAX_BOUNCES};

/// `A (x − x0)² + B (y² + z²) + C = 0`, symmetric about the `x` axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxialQuadric<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub x0: T,
}

impl<T: Real> AxialQuadric<T> {
    pub fn value(&self, p: Point3<T>) -> T {
        let dx = p.x - self.x0;
        self.a * dx * dx + self.b * (p.y * p.y + p.z * p.z) + self.c
    }

    pub fn gradient(&self, p: Point3<T>) -> Vec3<T> {
        let two = lit::<T>(2.0);
        Vec3::new(
            two * self.a * (p.x - self.x0),
            two * self.b * p.y,
            two * self.b * p.z,
        )
    }

    /// Parameters `t` with `value(o + t v) = 0`, unsorted.
    fn roots(&self, o: Point3<T>, v: Vec3<T>) -> Vec<T> {
        let dx = o.x - self.x0;
        let qa = self.a * v.x * v.x + self.b * (v.y * v.y + v.z * v.z);
        let qb = lit::<T>(2.0) * (self.a * dx * v.x + self.b * (o.y * v.y + o.z * v.z));
        let qc = self.value(o);
        let scale = qa.abs().max(qb.abs()).max(qc.abs());
        let mut out = Vec::with_capacity(2);
        if qa.abs() <= lit::<T>(1e-14) * scale {
            if qb != T::zero() {
                out.push(-qc / qb);
            }
        } else {
            let disc = qb * qb - lit::<T>(4.0) * qa * qc;
            if disc < T::zero() {
                return out;
            }
            let q = -(qb + qb.signum() * disc.sqrt()) / lit::<T>(2.0);
            if q != T::zero() {
                out.push(q / qa);
                out.push(qc / q);
            } else {
                out.push(T::zero());
            }
        }
        // one Newton step on the implicit form
        out.into_iter()
            .map(|t| {
                let p = o + v * t;
                let g = self.gradient(p).dot(v);
                if g != T::zero() {
                    t - self.value(p) / g
                } else {
                    t
                }
            })
            .collect()
    }
}

/// One reflecting zone: the part of `surface`, dilated about `F1` by
/// `scale`, whose points (before dilation) are seen from `F1` at a polar
/// angle in `theta` and lie at a distance from `F1` in `radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadricPatch<T> {
    pub surface: AxialQuadric<T>,
    pub scale: T,
    pub theta: [T; 2],
    pub radius: Option<[T; 2]>,
    /// Keep only the sheet with `x > 0`.
    pub x_positive: bool,
    pub class: EdgeClass,
    pub edge_id: EdgeId,
}

/// The six zones of the major-axis solid.
pub fn quadric_patches<T: Real>(rb: &RevolutionBody<T>) -> Vec<QuadricPatch<T>> {
    let body = &rb.base;
    let p = &body.pair;
    let f1 = p.f1();
    let one = T::one();
    let ellipsoid = AxialQuadric {
        a: one / (p.a() * p.a()),
        b: one / (p.b() * p.b()),
        c: -one,
        x0: T::zero(),
    };
    let hyperboloid = AxialQuadric {
        a: one / (p.alpha() * p.alpha()),
        b: -one / (p.beta() * p.beta()),
        c: -one,
        x0: T::zero(),
    };
    let (s, co) = body.phi_b.sin_cos();
    let cone = AxialQuadric {
        a: -s * s,
        b: co * co,
        c: T::zero(),
        x0: f1.x,
    };
    let theta = [body.phi_h, body.phi_b];
    let radial = [body.inner.a.distance(f1), body.inner.b.distance(f1)];
    let mut out = Vec::with_capacity(6);
    for (scale, offset, classes) in [
        (
            one,
            0,
            [
                EdgeClass::EllipseArcB1,
                EdgeClass::HyperbolaArcB1,
                EdgeClass::RadialSegmentB1,
            ],
        ),
        (
            body.lambda,
            6,
            [
                EdgeClass::EllipseArcB2,
                EdgeClass::HyperbolaArcB2,
                EdgeClass::RadialSegmentB2,
            ],
        ),
    ] {
        out.push(QuadricPatch {
            surface: ellipsoid,
            scale,
            theta,
            radius: None,
            x_positive: false,
            class: classes[0],
            edge_id: EdgeId(offset),
        });
        out.push(QuadricPatch {
            surface: hyperboloid,
            scale,
            theta,
            radius: None,
            x_positive: true,
            class: classes[1],
            edge_id: EdgeId(offset + 1),
        });
        out.push(QuadricPatch {
            surface: cone,
            scale,
            theta,
            radius: Some(radial),
            x_positive: true,
            class: classes[2],
            edge_id: EdgeId(offset + 2),
        });
    }
    out
}

/// Direct trace of the ray from `F1` along `direction` through the
/// major-axis solid.
pub fn quadric_cross_check<T: Real>(
    rb: &RevolutionBody<T>,
    direction: Vec3<T>,
) -> Result<Trajectory3D<T>, GeometryError> {
    if rb.variant != RevolutionVariant::AboutMajorAxis {
        return Err(GeometryError::Construction(
            "the quadric oracle only covers rotation about the major axis".into(),
        ));
    }
    quadric_cross_check_with(rb, &quadric_patches(rb), direction)
}

/// As [`quadric_cross_check`], against an explicit set of zones.
pub fn quadric_cross_check_with<T: Real>(
    rb: &RevolutionBody<T>,
    patches: &[QuadricPatch<T>],
    direction: Vec3<T>,
) -> Result<Trajectory3D<T>, GeometryError> {
    let frame = rb.meridian_frame(direction)?;
    let f1 = rb.axis.origin;
    let d0 = direction.normalized().unwrap_or(direction);
    let diameter = rb.section().diameter;
    let t_min = lit::<T>(1e-9) * diameter;
    let ang_slack = lit::<T>(1e-12);
    let rad_slack = lit::<T>(1e-12) * rb.base.pair.a();

    let inside_zone = |patch: &QuadricPatch<T>, q: Point3<T>| {
        let w = q - f1;
        let rho = (w.y * w.y + w.z * w.z).sqrt();
        let theta = rho.atan2(w.x);
        if theta < patch.theta[0] - ang_slack || theta > patch.theta[1] + ang_slack {
            return false;
        }
        if patch.x_positive && q.x <= T::zero() {
            return false;
        }
        match patch.radius {
            Some([lo, hi]) => {
                let r = w.norm();
                r >= lo - rad_slack && r <= hi + rad_slack
            }
            None => true,
        }
    };

    let mut traj = Trajectory3D {
        origin: f1,
        initial_direction: d0,
        reflections: Vec::new(),
        final_direction: d0,
        plane_normal: frame.normal(),
        status: TraceStatus::Escaped,
        degeneracy: None,
    };
    let (mut o, mut d) = (f1, d0);
    loop {
        let mut best: Option<(T, usize, Point3<T>)> = None;
        for (i, patch) in patches.iter().enumerate() {
            // local (undilated) coordinates: q = F1 + (p − F1) / scale
            let q0 = f1 + (o - f1) / patch.scale;
            let v = d / patch.scale;
            for t in patch.surface.roots(q0, v) {
                if !(t > t_min) || best.is_some_and(|(bt, _, _)| t >= bt) {
                    continue;
                }
                let q = q0 + v * t;
                if inside_zone(patch, q) {
                    best = Some((t, i, q));
                }
            }
        }
        let Some((t, i, q)) = best else {
            traj.status = TraceStatus::Escaped;
            break;
        };
        if traj.reflections.len() >= DEFAULT_MAX_BOUNCES {
            traj.status = TraceStatus::MaxBouncesExceeded;
            break;
        }
        let patch = &patches[i];
        let n = patch
            .surface
            .gradient(q)
            .normalized()
            .unwrap_or(Vec3::zero());
        let dn = d.dot(n);
        if dn.abs() <= lit::<T>(1e-12) {
            traj.status = TraceStatus::DegenerateHit;
            traj.degeneracy = Some(Degeneracy::Tangent);
            break;
        }
        let p = o + d * t;
        traj.reflections.push(Reflection3D {
            edge_id: patch.edge_id,
            class: patch.class,
            point: p,
        });
        d = d - n * (lit::<T>(2.0) * dn);
        o = p;
    }
    traj.final_direction = d;
    Ok(traj)
}
