//! The mirror bodies: the pair of curvilinear triangles `B1` bounded by the
//! confocal ellipse and hyperbola, and the composite `B1 ∪ B2` where `B2` is
//! the image of `B1` under a dilation about `F1`.

use serde::{Deserialize, Serialize};

use crate::conics::{ellipse_hyperbola_intersection, ConfocalPair, Conic};
use crate::error::GeometryError;
use crate::geom::{Point2, Ray2, Vec2};
use crate::scalar::{lit, tol, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

impl std::fmt::Display for EdgeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeClass {
    EllipseArcB1,
    HyperbolaArcB1,
    RadialSegmentB1,
    EllipseArcB2,
    HyperbolaArcB2,
    RadialSegmentB2,
}

impl EdgeClass {
    pub fn is_radial(self) -> bool {
        matches!(
            self,
            EdgeClass::RadialSegmentB1 | EdgeClass::RadialSegmentB2
        )
    }

    pub fn in_outer_body(self) -> bool {
        matches!(
            self,
            EdgeClass::EllipseArcB2 | EdgeClass::HyperbolaArcB2 | EdgeClass::RadialSegmentB2
        )
    }

    fn dilated(self) -> Self {
        match self {
            EdgeClass::EllipseArcB1 => EdgeClass::EllipseArcB2,
            EdgeClass::HyperbolaArcB1 => EdgeClass::HyperbolaArcB2,
            EdgeClass::RadialSegmentB1 => EdgeClass::RadialSegmentB2,
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeGeometry<T> {
    /// Portion of a conic whose local focal angle lies in `interval`;
    /// `endpoints` are ordered to match the interval bounds.
    ConicArc {
        conic: Conic<T>,
        endpoints: [Point2<T>; 2],
        interval: [T; 2],
    },
    Segment {
        endpoints: [Point2<T>; 2],
    },
}

/// One reflecting boundary piece of a body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<T> {
    pub id: EdgeId,
    pub class: EdgeClass,
    /// Belongs to the triangle above the major axis.
    pub upper: bool,
    pub geometry: EdgeGeometry<T>,
}

/// An edge crossing found along a ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeCrossing<T> {
    pub t: T,
    pub point: Point2<T>,
    pub tangent: bool,
}

const ARC_PARAM_SLACK: f64 = 1e-12;

impl<T: Real> Edge<T> {
    pub fn endpoints(&self) -> [Point2<T>; 2] {
        match self.geometry {
            EdgeGeometry::ConicArc { endpoints, .. } | EdgeGeometry::Segment { endpoints } => {
                endpoints
            }
        }
    }

    /// Distance from `p` to the nearer endpoint.
    pub fn endpoint_distance(&self, p: Point2<T>) -> T {
        let [e0, e1] = self.endpoints();
        p.distance(e0).min(p.distance(e1))
    }

    /// Crossings of the ray with this edge at `t > 0`, restricted to the
    /// edge's extent (interval slack, plus anything within `endpoint_tol` of
    /// an endpoint so the caller can flag it).
    pub fn crossings(&self, ray: &Ray2<T>, endpoint_tol: T) -> Vec<EdgeCrossing<T>> {
        match self.geometry {
            EdgeGeometry::ConicArc {
                conic, interval, ..
            } => conic
                .intersect_ray(ray)
                .into_iter()
                .filter_map(|h| {
                    let point = ray.at(h.t);
                    let s = conic.focal_angle(point);
                    let slack = lit::<T>(ARC_PARAM_SLACK);
                    let inside = s >= interval[0] - slack && s <= interval[1] + slack;
                    (inside || self.endpoint_distance(point) <= endpoint_tol).then_some(
                        EdgeCrossing {
                            t: h.t,
                            point,
                            tangent: h.tangent,
                        },
                    )
                })
                .collect(),
            EdgeGeometry::Segment {
                endpoints: [p0, p1],
            } => {
                let e = p1 - p0;
                let denom = ray.direction.cross(e);
                if denom.abs() <= T::epsilon() * e.norm() {
                    return Vec::new();
                }
                let w = p0 - ray.origin;
                let t = w.cross(e) / denom;
                let u = w.cross(ray.direction) / denom;
                let slack = endpoint_tol / e.norm();
                if t > T::zero() && u >= -slack && u <= T::one() + slack {
                    vec![EdgeCrossing {
                        t,
                        point: ray.at(t),
                        tangent: false,
                    }]
                } else {
                    Vec::new()
                }
            }
        }
    }

    /// Unit normal at a boundary point, sign unspecified.
    pub fn normal_at(&self, p: Point2<T>) -> Vec2<T> {
        match self.geometry {
            EdgeGeometry::ConicArc { conic, .. } => conic.normal_unchecked(p),
            EdgeGeometry::Segment {
                endpoints: [p0, p1],
            } => {
                let e = p1 - p0;
                Vec2::new(-e.y, e.x).normalized().unwrap_or_else(Vec2::zero)
            }
        }
    }

    /// Distance from `p` to the supporting curve of the edge.
    pub fn curve_distance(&self, p: Point2<T>) -> T {
        match self.geometry {
            EdgeGeometry::ConicArc { conic, .. } => conic.distance_estimate(p),
            EdgeGeometry::Segment {
                endpoints: [p0, p1],
            } => {
                let e = p1 - p0;
                let u = ((p - p0).dot(e) / e.norm_sq()).max(T::zero()).min(T::one());
                p.distance(p0 + e * u)
            }
        }
    }

    /// `n + 1` points along the edge, endpoints included.
    pub fn sample(&self, n: usize) -> Vec<Point2<T>> {
        let n = n.max(1);
        let denom = lit::<T>(n as f64);
        match self.geometry {
            EdgeGeometry::ConicArc {
                conic,
                interval,
                endpoints,
            } => (0..=n)
                .map(|i| {
                    if i == 0 {
                        return endpoints[0];
                    }
                    if i == n {
                        return endpoints[1];
                    }
                    let s = lit::<T>(i as f64) / denom;
                    let theta = interval[0] + (interval[1] - interval[0]) * s;
                    conic.point_at_focal_angle(theta).unwrap_or(endpoints[0])
                })
                .collect(),
            EdgeGeometry::Segment {
                endpoints: [p0, p1],
            } => (0..=n)
                .map(|i| p0 + (p1 - p0) * (lit::<T>(i as f64) / denom))
                .collect(),
        }
    }

    /// Image under `p ↦ center + λ (p − center)`.
    pub fn dilated(&self, center: Point2<T>, lambda: T, id: EdgeId) -> Self {
        let map = |p: Point2<T>| center + (p - center) * lambda;
        let geometry = match self.geometry {
            EdgeGeometry::ConicArc {
                conic,
                endpoints,
                interval,
            } => EdgeGeometry::ConicArc {
                conic: conic.dilated(center, lambda),
                endpoints: endpoints.map(map),
                interval,
            },
            EdgeGeometry::Segment { endpoints } => EdgeGeometry::Segment {
                endpoints: endpoints.map(map),
            },
        };
        Self {
            id,
            class: self.class.dilated(),
            upper: self.upper,
            geometry,
        }
    }

    /// Image under reflection across the vertical line `x = center.x`.
    pub fn mirrored_about_vertical(&self, center: Point2<T>, id: EdgeId) -> Self {
        let map = |p: Point2<T>| Point2::new(center.x + center.x - p.x, p.y);
        let geometry = match self.geometry {
            EdgeGeometry::ConicArc {
                conic,
                endpoints,
                interval,
            } => EdgeGeometry::ConicArc {
                conic: conic.mirrored_about(center),
                endpoints: endpoints.map(map),
                interval,
            },
            EdgeGeometry::Segment { endpoints } => EdgeGeometry::Segment {
                endpoints: endpoints.map(map),
            },
        };
        Self {
            id,
            geometry,
            ..*self
        }
    }
}

/// A collection of reflecting edges the tracer can run against.
pub trait EdgeSet<T: Real> {
    fn edges(&self) -> &[Edge<T>];

    /// Characteristic diameter; sets the tracer's advance and endpoint
    /// tolerances.
    fn diameter(&self) -> T;
}

/// A free-standing edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList<T> {
    pub edges: Vec<Edge<T>>,
    pub diameter: T,
}

impl<T: Real> EdgeSet<T> for EdgeList<T> {
    fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }
    fn diameter(&self) -> T {
        self.diameter
    }
}

/// Vertices of one pair of mirrored triangles `ABH`, `A'B'H'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NamedPoints<T> {
    pub a: Point2<T>,
    pub b: Point2<T>,
    pub h: Point2<T>,
    pub a_prime: Point2<T>,
    pub b_prime: Point2<T>,
    pub h_prime: Point2<T>,
}

impl<T: Real> NamedPoints<T> {
    fn upper(a: Point2<T>, b: Point2<T>, h: Point2<T>) -> Self {
        Self {
            a,
            b,
            h,
            a_prime: a.mirror_y(),
            b_prime: b.mirror_y(),
            h_prime: h.mirror_y(),
        }
    }

    fn dilated(&self, center: Point2<T>, lambda: T) -> Self {
        let m = |p: Point2<T>| center + (p - center) * lambda;
        Self {
            a: m(self.a),
            b: m(self.b),
            h: m(self.h),
            a_prime: m(self.a_prime),
            b_prime: m(self.b_prime),
            h_prime: m(self.h_prime),
        }
    }

    pub fn as_array(&self) -> [(&'static str, Point2<T>); 6] {
        [
            ("A", self.a),
            ("B", self.b),
            ("H", self.h),
            ("A'", self.a_prime),
            ("B'", self.b_prime),
            ("H'", self.h_prime),
        ]
    }
}

/// `B1`: the triangle `ABH` and its mirror image across the major axis.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorTriangles<T> {
    pub pair: ConfocalPair<T>,
    pub phi_h: T,
    pub phi_b: T,
    pub points: NamedPoints<T>,
    /// Six edges: upper ellipse arc, hyperbola arc, radial segment, then the
    /// lower three.
    pub edges: Vec<Edge<T>>,
}

impl<T: Real> EdgeSet<T> for MirrorTriangles<T> {
    fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }
    fn diameter(&self) -> T {
        lit::<T>(2.0) * self.points.b.distance(self.pair.f1()).max(self.pair.a())
    }
}

/// Builds `B1` for the confocal pair with `∠BF1F2 = phi_b`.
pub fn build_b1<T: Real>(
    pair: &ConfocalPair<T>,
    phi_b: T,
) -> Result<MirrorTriangles<T>, GeometryError> {
    let phi_h = pair.phi_h();
    let asym = pair.asymptote_angle();
    let f64_of = |v: T| v.to_f64().unwrap_or(f64::NAN);
    if !(phi_b > phi_h) || !phi_b.is_finite() {
        return Err(GeometryError::PhiBBelowPhiH {
            phi_b: f64_of(phi_b),
            phi_h: f64_of(phi_h),
        });
    }
    if !(phi_b < asym) {
        return Err(GeometryError::PhiBBeyondAsymptote {
            phi_b: f64_of(phi_b),
            asymptote: f64_of(asym),
        });
    }

    let f1 = pair.f1();
    let ray = Ray2::at_angle(f1, phi_b);
    let ellipse = pair.ellipse();
    let hyperbola = pair.hyperbola();
    let t_a = ellipse
        .intersect_ray(&ray)
        .first()
        .map(|h| h.t)
        .ok_or_else(|| GeometryError::Construction("ray from F1 misses the ellipse".into()))?;
    let t_b = hyperbola
        .intersect_ray(&ray)
        .into_iter()
        .map(|h| h.t)
        .find(|&t| t > t_a)
        .ok_or_else(|| GeometryError::Construction("no branch point outside the ellipse".into()))?;
    let a = ray.at(t_a);
    let b = ray.at(t_b);
    let h = ellipse_hyperbola_intersection(pair);
    let points = NamedPoints::upper(a, b, h);

    let upper = [
        Edge {
            id: EdgeId(0),
            class: EdgeClass::EllipseArcB1,
            upper: true,
            geometry: EdgeGeometry::ConicArc {
                conic: ellipse,
                endpoints: [h, a],
                interval: [phi_h, phi_b],
            },
        },
        Edge {
            id: EdgeId(1),
            class: EdgeClass::HyperbolaArcB1,
            upper: true,
            geometry: EdgeGeometry::ConicArc {
                conic: hyperbola,
                endpoints: [h, b],
                interval: [phi_h, phi_b],
            },
        },
        Edge {
            id: EdgeId(2),
            class: EdgeClass::RadialSegmentB1,
            upper: true,
            geometry: EdgeGeometry::Segment { endpoints: [a, b] },
        },
    ];
    let mut edges = upper.to_vec();
    for (k, e) in upper.iter().enumerate() {
        edges.push(mirror_edge_y(e, EdgeId(3 + k as u32)));
    }
    Ok(MirrorTriangles {
        pair: *pair,
        phi_h,
        phi_b,
        points,
        edges,
    })
}

fn mirror_edge_y<T: Real>(e: &Edge<T>, id: EdgeId) -> Edge<T> {
    let geometry = match e.geometry {
        EdgeGeometry::ConicArc {
            conic,
            endpoints,
            interval,
        } => EdgeGeometry::ConicArc {
            conic,
            // Parameter order stays ascending: the mirrored interval is
            // [-hi, -lo], so the endpoints swap.
            endpoints: [endpoints[1].mirror_y(), endpoints[0].mirror_y()],
            interval: [-interval[1], -interval[0]],
        },
        EdgeGeometry::Segment { endpoints } => EdgeGeometry::Segment {
            endpoints: endpoints.map(|p| p.mirror_y()),
        },
    };
    Edge {
        id,
        class: e.class,
        upper: !e.upper,
        geometry,
    }
}

/// `|F1B| / |F1A|`: the dilation about `F1` carrying `A` onto `B` (and
/// `A'` onto `B'`), so the two bodies touch exactly at `B` and `B'`.
pub fn dilation_coefficient<T: Real>(b1: &MirrorTriangles<T>) -> T {
    let f1 = b1.pair.f1();
    b1.points.b.distance(f1) / b1.points.a.distance(f1)
}

/// The composite body `B1 ∪ B2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Body2D<T> {
    pub pair: ConfocalPair<T>,
    pub phi_h: T,
    pub phi_b: T,
    pub lambda: T,
    /// Vertices of `B1`.
    pub inner: NamedPoints<T>,
    /// Vertices of `B2`, the images of `inner` under the dilation.
    pub outer: NamedPoints<T>,
    /// Images of `A`, `A'` in `B2`; equal to `B`, `B'` for the tangent dilation.
    pub touch_points: [Point2<T>; 2],
    /// Twelve edges: the six of `B1` (ids 0–5) then their dilates (6–11).
    pub edges: Vec<Edge<T>>,
}

impl<T: Real> EdgeSet<T> for Body2D<T> {
    fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }
    fn diameter(&self) -> T {
        lit::<T>(2.0) * self.outer.b.distance(self.pair.f1()).max(self.pair.a())
    }
}

/// Builds `B1 ∪ B2` with the tangent dilation coefficient.
pub fn build_invisible_body<T: Real>(
    pair: &ConfocalPair<T>,
    phi_b: T,
) -> Result<Body2D<T>, GeometryError> {
    let b1 = build_b1(pair, phi_b)?;
    let lambda = dilation_coefficient(&b1);
    Ok(assemble(b1, lambda))
}

/// Builds `B1 ∪ B2` with an explicit dilation coefficient `lambda > 1`.
/// Coefficients other than [`dilation_coefficient`] make the bodies
/// overlap or separate; such bodies are mainly useful as controls.
pub fn build_invisible_body_with_dilation<T: Real>(
    pair: &ConfocalPair<T>,
    phi_b: T,
    lambda: T,
) -> Result<Body2D<T>, GeometryError> {
    if !(lambda > T::one()) || !lambda.is_finite() {
        return Err(GeometryError::InvalidDilation(
            lambda.to_f64().unwrap_or(f64::NAN),
        ));
    }
    Ok(assemble(build_b1(pair, phi_b)?, lambda))
}

fn assemble<T: Real>(b1: MirrorTriangles<T>, lambda: T) -> Body2D<T> {
    let f1 = b1.pair.f1();
    let outer = b1.points.dilated(f1, lambda);
    let mut edges = b1.edges.clone();
    for e in &b1.edges {
        edges.push(e.dilated(f1, lambda, EdgeId(e.id.0 + 6)));
    }
    Body2D {
        pair: b1.pair,
        phi_h: b1.phi_h,
        phi_b: b1.phi_b,
        lambda,
        inner: b1.points,
        touch_points: [outer.a, outer.a_prime],
        outer,
        edges,
    }
}

/// Polar description of one pair of triangles about `F1`: focal angles
/// `phi_h ≤ |θ| ≤ phi_b`, radii between the (scaled) ellipse and hyperbola.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector<T> {
    pub pair: ConfocalPair<T>,
    pub phi_h: T,
    pub phi_b: T,
    pub scale: T,
}

impl<T: Real> Sector<T> {
    /// Signed clearance of `p` from the boundary in length units: positive
    /// inside, negative outside, zero on the boundary (first order).
    pub fn margin(&self, p: Point2<T>) -> T {
        let f1 = self.pair.f1();
        let v = p - f1;
        let rho = v.norm();
        let theta = v.angle().abs();
        let angular = (theta - self.phi_h).min(self.phi_b - theta) * rho;
        let (e, h) = (self.pair.ellipse(), self.pair.hyperbola());
        let (Some(re), Some(rh)) = (e.focal_radius(theta), h.focal_radius(theta)) else {
            return -T::infinity();
        };
        angular
            .min(rho - self.scale * re)
            .min(self.scale * rh - rho)
    }
}

impl<T: Real> Body2D<T> {
    pub fn inner_sector(&self) -> Sector<T> {
        Sector {
            pair: self.pair,
            phi_h: self.phi_h,
            phi_b: self.phi_b,
            scale: T::one(),
        }
    }

    pub fn outer_sector(&self) -> Sector<T> {
        Sector {
            pair: self.pair,
            phi_h: self.phi_h,
            phi_b: self.phi_b,
            scale: self.lambda,
        }
    }

    /// `B1` alone (edges 0–5).
    pub fn inner_body(&self) -> MirrorTriangles<T> {
        MirrorTriangles {
            pair: self.pair,
            phi_h: self.phi_h,
            phi_b: self.phi_b,
            points: self.inner,
            edges: self.edges[..6].to_vec(),
        }
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge<T>> {
        self.edges.iter().find(|e| e.id == id)
    }

    /// `F1 + λ (F2 − F1)`, the far focus of the dilated conics.
    pub fn dilated_f2(&self) -> Point2<T> {
        let f1 = self.pair.f1();
        f1 + (self.pair.f2() - f1) * self.lambda
    }

    /// A copy uniformly scaled about the origin. Angles and `λ` are unchanged.
    pub fn scaled(&self, s: T) -> Result<Self, GeometryError> {
        build_invisible_body_with_dilation(&self.pair.scaled(s), self.phi_b, self.lambda)
    }

    /// Re-checks the structural invariants of a body: angle ordering,
    /// named points on their curves, mirror symmetry of the edge set and
    /// (for the tangent dilation) coincidence of the touch points with `B`.
    pub fn check_invariants(&self) -> Result<(), GeometryError> {
        let fail = |m: String| Err(GeometryError::Construction(m));
        self.pair.validate()?;
        let scale = self.pair.a();
        let eps = tol::<T>(1e-9) * scale;
        if !(self.phi_h < self.phi_b && self.phi_b < self.pair.asymptote_angle()) {
            return fail("angles out of order".into());
        }
        if !(self.lambda > T::one()) {
            return Err(GeometryError::InvalidDilation(
                self.lambda.to_f64().unwrap_or(f64::NAN),
            ));
        }
        let h = ellipse_hyperbola_intersection(&self.pair);
        if self.inner.h.distance(h) > eps {
            return fail("H is not the ellipse-hyperbola intersection".into());
        }
        if self.edges.len() != 12 {
            return fail(format!("expected 12 edges, found {}", self.edges.len()));
        }
        for e in &self.edges {
            for p in e.endpoints() {
                if !(e.curve_distance(p) <= eps) {
                    return fail(format!("endpoint of {} is off its curve", e.id));
                }
            }
            let mirrored = self.edges.iter().any(|o| {
                o.class == e.class
                    && o.upper != e.upper
                    && o.endpoints().iter().all(|q| {
                        e.endpoints()
                            .iter()
                            .any(|p| p.mirror_y().distance(*q) <= eps)
                    })
            });
            if !mirrored {
                return fail(format!("edge {} has no mirror partner", e.id));
            }
        }
        let f1 = self.pair.f1();
        for (p, q) in [
            (self.inner.a, self.touch_points[0]),
            (self.inner.a_prime, self.touch_points[1]),
        ] {
            let image = f1 + (p - f1) * self.lambda;
            if image.distance(q) > eps {
                return fail("touch points are not images of A and A'".into());
            }
        }
        Ok(())
    }
}
