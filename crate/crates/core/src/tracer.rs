//! Billiard trajectories: straight flight between edges, specular
//! reflection at each hit, until the particle escapes.
//!
//! The tracer only knows about edges; it has no notion of the bodies'
//! expected bounce pattern.

use serde::{Deserialize, Serialize};

use crate::body::{EdgeClass, EdgeId, EdgeSet};
use crate::geom::{Point2, Ray2, Vec2};
use crate::scalar::{lit, tol, Real};

/// Default bounce limit. Traces from `F1` are expected to need four.
pub const DEFAULT_MAX_BOUNCES: usize = 16;

/// Advance distance after a reflection, as a fraction of the body diameter.
pub const ADVANCE_FRACTION: f64 = 1e-9;

/// Hits closer than this fraction of the diameter to an edge endpoint are degenerate.
pub const ENDPOINT_FRACTION: f64 = 1e-9;

/// Incidence with `|d·n|` below this is treated as tangent.
pub const TANGENT_COSINE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    /// Grazing incidence on an edge.
    Tangent,
    /// Hit at (or within tolerance of) an edge endpoint.
    Endpoint,
}

/// Why a trajectory could not be continued.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateHit<T> {
    pub kind: Degeneracy,
    pub edge: EdgeId,
    pub point: Point2<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStatus {
    Escaped,
    MaxBouncesExceeded,
    DegenerateHit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflection<T> {
    pub edge_id: EdgeId,
    pub class: EdgeClass,
    pub point: Point2<T>,
    pub incoming: Vec2<T>,
    pub outgoing: Vec2<T>,
    /// Unit normal facing the incoming particle (`incoming · normal < 0`).
    pub normal: Vec2<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub origin: Point2<T>,
    pub initial_direction: Vec2<T>,
    pub reflections: Vec<Reflection<T>>,
    pub final_direction: Vec2<T>,
    pub status: TraceStatus,
    pub degeneracy: Option<DegenerateHit<T>>,
}

impl<T: Real> Trajectory<T> {
    /// Start of the final, unbounded leg.
    pub fn last_point(&self) -> Point2<T> {
        self.reflections.last().map_or(self.origin, |r| r.point)
    }

    pub fn classes(&self) -> Vec<EdgeClass> {
        self.reflections.iter().map(|r| r.class).collect()
    }

    /// Origin followed by every reflection point.
    pub fn vertices(&self) -> Vec<Point2<T>> {
        std::iter::once(self.origin)
            .chain(self.reflections.iter().map(|r| r.point))
            .collect()
    }
}

/// Specular reflection `d − 2 (d·n) n`. Fails for tangent incidence.
pub fn reflect<T: Real>(direction: Vec2<T>, normal: Vec2<T>) -> Result<Vec2<T>, Degeneracy> {
    let dn = direction.dot(normal);
    if dn.abs() <= tol::<T>(TANGENT_COSINE) {
        return Err(Degeneracy::Tangent);
    }
    let out = direction - normal * (lit::<T>(2.0) * dn);
    // Renormalize to stop drift over many bounces.
    Ok(out.normalized().unwrap_or(out))
}

/// First edge crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit<T> {
    pub edge_id: EdgeId,
    pub class: EdgeClass,
    pub t: T,
    pub point: Point2<T>,
}

/// Nearest edge crossing with `t > t_min`, where `t_min` and the endpoint
/// tolerance scale with the body diameter.
pub fn nearest_hit<T: Real, S: EdgeSet<T> + ?Sized>(
    ray: &Ray2<T>,
    scene: &S,
) -> Result<Option<Hit<T>>, DegenerateHit<T>> {
    let d = scene.diameter();
    nearest_hit_with(
        ray,
        scene,
        tol::<T>(ADVANCE_FRACTION) * d,
        tol::<T>(ENDPOINT_FRACTION) * d,
    )
}

pub fn nearest_hit_with<T: Real, S: EdgeSet<T> + ?Sized>(
    ray: &Ray2<T>,
    scene: &S,
    t_min: T,
    endpoint_tol: T,
) -> Result<Option<Hit<T>>, DegenerateHit<T>> {
    let mut best: Option<(Hit<T>, Option<Degeneracy>)> = None;
    for edge in scene.edges() {
        for c in edge.crossings(ray, endpoint_tol) {
            if c.t <= t_min {
                continue;
            }
            if best.as_ref().is_some_and(|(b, _)| b.t <= c.t) {
                continue;
            }
            let flag = if c.tangent {
                Some(Degeneracy::Tangent)
            } else if edge.endpoint_distance(c.point) <= endpoint_tol {
                Some(Degeneracy::Endpoint)
            } else {
                None
            };
            best = Some((
                Hit {
                    edge_id: edge.id,
                    class: edge.class,
                    t: c.t,
                    point: c.point,
                },
                flag,
            ));
        }
    }
    match best {
        None => Ok(None),
        Some((hit, None)) => Ok(Some(hit)),
        Some((hit, Some(kind))) => Err(DegenerateHit {
            kind,
            edge: hit.edge_id,
            point: hit.point,
        }),
    }
}

/// Follows the billiard trajectory from `origin` along `direction` for at
/// most `max_bounces` reflections.
pub fn trace<T: Real, S: EdgeSet<T> + ?Sized>(
    scene: &S,
    origin: Point2<T>,
    direction: Vec2<T>,
    max_bounces: usize,
) -> Trajectory<T> {
    let direction = direction.normalized().unwrap_or(direction);
    let mut traj = Trajectory {
        origin,
        initial_direction: direction,
        reflections: Vec::new(),
        final_direction: direction,
        status: TraceStatus::Escaped,
        degeneracy: None,
    };
    let mut ray = Ray2 { origin, direction };
    loop {
        let hit = match nearest_hit(&ray, scene) {
            Ok(None) => {
                traj.status = TraceStatus::Escaped;
                break;
            }
            Ok(Some(hit)) => hit,
            Err(deg) => {
                traj.status = TraceStatus::DegenerateHit;
                traj.degeneracy = Some(deg);
                break;
            }
        };
        if traj.reflections.len() >= max_bounces {
            traj.status = TraceStatus::MaxBouncesExceeded;
            break;
        }
        let edge = scene
            .edges()
            .iter()
            .find(|e| e.id == hit.edge_id)
            .expect("hit edge belongs to the scene");
        let mut normal = edge.normal_at(hit.point);
        if normal.dot(ray.direction) > T::zero() {
            normal = -normal;
        }
        let outgoing = match reflect(ray.direction, normal) {
            Ok(v) => v,
            Err(kind) => {
                traj.status = TraceStatus::DegenerateHit;
                traj.degeneracy = Some(DegenerateHit {
                    kind,
                    edge: hit.edge_id,
                    point: hit.point,
                });
                break;
            }
        };
        traj.reflections.push(Reflection {
            edge_id: hit.edge_id,
            class: hit.class,
            point: hit.point,
            incoming: ray.direction,
            outgoing,
            normal,
        });
        ray = Ray2 {
            origin: hit.point,
            direction: outgoing,
        };
    }
    traj.final_direction = ray.direction;
    traj
}

/// Plain-data form of a trajectory for export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub origin: [f64; 2],
    pub initial_direction: [f64; 2],
    pub points: Vec<[f64; 2]>,
    pub directions: Vec<[f64; 2]>,
    pub edge_ids: Vec<u32>,
    pub edge_classes: Vec<EdgeClass>,
    pub final_direction: [f64; 2],
    pub status: TraceStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degeneracy: Option<Degeneracy>,
}

impl<T: Real> From<&Trajectory<T>> for TrajectoryRecord {
    fn from(t: &Trajectory<T>) -> Self {
        Self {
            origin: t.origin.to_array_f64(),
            initial_direction: t.initial_direction.to_array_f64(),
            points: t
                .reflections
                .iter()
                .map(|r| r.point.to_array_f64())
                .collect(),
            directions: t
                .reflections
                .iter()
                .map(|r| r.outgoing.to_array_f64())
                .collect(),
            edge_ids: t.reflections.iter().map(|r| r.edge_id.0).collect(),
            edge_classes: t.classes(),
            final_direction: t.final_direction.to_array_f64(),
            status: t.status,
            degeneracy: t.degeneracy.map(|d| d.kind),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::build_invisible_body;
    use crate::conics::make_confocal_pair;
    use approx::assert_relative_eq;

    #[test]
    fn reflect_examples() {
        let r = reflect(Vec2::new(1.0, 0.0), Vec2::new(-1.0, 0.0)).unwrap();
        assert_eq!(r, Vec2::new(-1.0, 0.0));
        let s = 2f64.sqrt() / 2.0;
        let r = reflect(Vec2::new(s, -s), Vec2::new(0.0, 1.0)).unwrap();
        assert_relative_eq!(r.x, s, epsilon = 1e-15);
        assert_relative_eq!(r.y, s, epsilon = 1e-15);
        // d=(0,1), n=-(s,s): d·n = −s, d′ = (0,1) − 2(−s)(−s,−s) = (−1, 0).
        let r = reflect(Vec2::new(0.0, 1.0), Vec2::new(-s, -s)).unwrap();
        assert_relative_eq!(r.x, -1.0, epsilon = 1e-15);
        assert_relative_eq!(r.y, 0.0, epsilon = 1e-15);
        assert_eq!(
            reflect(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)),
            Err(Degeneracy::Tangent)
        );
    }

    #[test]
    fn nearest_hit_examples() {
        let pair = make_confocal_pair(2.0, 3f64.sqrt()).unwrap();
        let body = build_invisible_body(&pair, 0.8).unwrap();
        let f1 = pair.f1();
        let hit = nearest_hit(&Ray2::at_angle(f1, -0.7), &body)
            .unwrap()
            .unwrap();
        assert_eq!(hit.class, EdgeClass::EllipseArcB1);
        assert!(!body.edge(hit.edge_id).unwrap().upper);
        assert!(nearest_hit(&Ray2::at_angle(f1, 0.0), &body)
            .unwrap()
            .is_none());
        assert!(
            nearest_hit(&Ray2::at_angle(f1, std::f64::consts::PI), &body)
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn trace_examples() {
        let pair = make_confocal_pair(2.0, 3f64.sqrt()).unwrap();
        let body = build_invisible_body(&pair, 0.8).unwrap();
        let f1 = pair.f1();
        let t = trace(&body, f1, Vec2::from_angle(-0.7), DEFAULT_MAX_BOUNCES);
        assert_eq!(t.status, TraceStatus::Escaped);
        assert_eq!(
            t.classes(),
            vec![
                EdgeClass::EllipseArcB1,
                EdgeClass::HyperbolaArcB1,
                EdgeClass::EllipseArcB2,
                EdgeClass::HyperbolaArcB2
            ]
        );
        for r in &t.reflections {
            let dn = r.incoming.dot(r.normal);
            assert!(dn < 0.0);
            assert!((dn + r.outgoing.dot(r.normal)).abs() < 1e-12);
            let expect = r.incoming - r.normal * (2.0 * dn);
            assert!((expect - r.outgoing).norm() < 1e-12);
        }
        let t = trace(&body, f1, Vec2::from_angle(0.0), DEFAULT_MAX_BOUNCES);
        assert!(t.reflections.is_empty());
        assert_eq!(t.status, TraceStatus::Escaped);
        let t = trace(
            &body,
            f1,
            Vec2::from_angle(body.phi_h - 1e-3),
            DEFAULT_MAX_BOUNCES,
        );
        assert!(t.reflections.is_empty());
    }

    #[test]
    fn corner_ray_is_degenerate() {
        let pair = make_confocal_pair(2.0, 3f64.sqrt()).unwrap();
        let body = build_invisible_body(&pair, 0.8).unwrap();
        let t = trace(&body, pair.f1(), Vec2::from_angle(0.8), DEFAULT_MAX_BOUNCES);
        assert_eq!(t.status, TraceStatus::DegenerateHit);
        assert_eq!(t.degeneracy.unwrap().kind, Degeneracy::Endpoint);
    }

    #[test]
    fn bounce_limit_is_reported() {
        let pair = make_confocal_pair(2.0, 3f64.sqrt()).unwrap();
        let body = build_invisible_body(&pair, 0.8).unwrap();
        let t = trace(&body, pair.f1(), Vec2::from_angle(-0.7), 2);
        assert_eq!(t.status, TraceStatus::MaxBouncesExceeded);
        assert_eq!(t.reflections.len(), 2);
    }
}
