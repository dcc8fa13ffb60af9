//! Conic primitives in the canonical frame: the ellipse centered at the
//! origin with its major axis on the x-axis, and the confocal right
//! hyperbola branch.

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::geom::{Point2, Ray2, Vec2};
use crate::scalar::{lit, rel_err, tol, Real};

/// Ellipse `x²/a² + y²/b² = 1` and hyperbola `x²/α² − y²/β² = 1` sharing
/// the foci `(±c, 0)`, with the ellipse–hyperbola intersections lying on
/// the vertical lines through the foci.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfocalPair<T> {
    a: T,
    b: T,
    alpha: T,
    beta: T,
    c: T,
}

/// Relative tolerance for the pair relations.
pub const PAIR_TOLERANCE: f64 = 1e-12;

/// Builds the unique confocal pair for the ellipse semi-axes `a > b > 0`.
pub fn make_confocal_pair<T: Real>(a: T, b: T) -> Result<ConfocalPair<T>, GeometryError> {
    if !(a.is_finite() && b.is_finite() && b > T::zero() && a > b) {
        return Err(GeometryError::DegenerateEllipse {
            a: a.to_f64().unwrap_or(f64::NAN),
            b: b.to_f64().unwrap_or(f64::NAN),
        });
    }
    // (a-b)(a+b) avoids cancellation when b is close to a.
    let c = ((a - b) * (a + b)).sqrt();
    let pair = ConfocalPair {
        a,
        b,
        alpha: c * c / a,
        beta: b * c / a,
        c,
    };
    pair.validate()?;
    Ok(pair)
}

/// The two foci `(F1, F2) = ((−c, 0), (c, 0))`. `F1` is the emission point.
pub fn foci<T: Real>(pair: &ConfocalPair<T>) -> (Point2<T>, Point2<T>) {
    (pair.f1(), pair.f2())
}

/// Upper ellipse–hyperbola intersection `H = (c, b²/a)`.
pub fn ellipse_hyperbola_intersection<T: Real>(pair: &ConfocalPair<T>) -> Point2<T> {
    let h = Point2::new(pair.c, pair.b * pair.b / pair.a);
    debug_assert!(pair.ellipse().implicit(h).abs() < tol::<T>(1e-12) * lit(4.0));
    debug_assert!(pair.hyperbola().implicit(h).abs() < tol::<T>(1e-12) * lit(4.0));
    h
}

impl<T: Real> ConfocalPair<T> {
    /// Assembles a pair from all five parameters and checks every relation.
    pub fn from_parts(a: T, b: T, alpha: T, beta: T, c: T) -> Result<Self, GeometryError> {
        let pair = Self::from_parts_unchecked(a, b, alpha, beta, c);
        pair.validate()?;
        Ok(pair)
    }

    /// Assembles a pair without checking the relations. Useful for
    /// building deliberately broken configurations.
    pub fn from_parts_unchecked(a: T, b: T, alpha: T, beta: T, c: T) -> Self {
        Self {
            a,
            b,
            alpha,
            beta,
            c,
        }
    }

    pub fn a(&self) -> T {
        self.a
    }
    pub fn b(&self) -> T {
        self.b
    }
    pub fn alpha(&self) -> T {
        self.alpha
    }
    pub fn beta(&self) -> T {
        self.beta
    }
    pub fn c(&self) -> T {
        self.c
    }

    pub fn f1(&self) -> Point2<T> {
        Point2::new(-self.c, T::zero())
    }

    pub fn f2(&self) -> Point2<T> {
        Point2::new(self.c, T::zero())
    }

    pub fn ellipse(&self) -> Conic<T> {
        Conic::ellipse(self.a, self.b)
    }

    pub fn hyperbola(&self) -> Conic<T> {
        Conic::hyperbola(self.alpha, self.beta)
    }

    /// Angle `∠HF1F2` subtended at F1 by the intersection point H.
    pub fn phi_h(&self) -> T {
        (self.b * self.b / self.a).atan2(self.c + self.c)
    }

    /// Direction of the hyperbola asymptote, `atan(β/α)`. Rays from F1 at
    /// or beyond this angle miss the right branch.
    pub fn asymptote_angle(&self) -> T {
        self.beta.atan2(self.alpha)
    }

    /// Relative residuals of `c² = a² − b²`, `c² = α² + β²` and
    /// `1/β² − 1/b² = 1/c²`, in that order.
    ///
    /// The last relation is evaluated multiplied through by `β² b² c²`, as
    /// `β² (b² + c²) = b² c²`: the reciprocal form cancels catastrophically
    /// when `b ≪ a`.
    pub fn residuals(&self) -> [T; 3] {
        let (a, b, al, be, c) = (self.a, self.b, self.alpha, self.beta, self.c);
        let (b2, c2) = (b * b, c * c);
        [
            rel_err((a - b) * (a + b), c2),
            rel_err(al * al + be * be, c2),
            rel_err(be * be * (b2 + c2), b2 * c2),
        ]
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let names = [
            "c^2 = a^2 - b^2",
            "c^2 = alpha^2 + beta^2",
            "1/beta^2 - 1/b^2 = 1/c^2",
        ];
        let bound = tol::<T>(PAIR_TOLERANCE);
        let positive = [self.a, self.b, self.alpha, self.beta, self.c]
            .iter()
            .all(|v| v.is_finite() && *v > T::zero());
        if !positive || self.b >= self.a {
            return Err(GeometryError::DegenerateEllipse {
                a: self.a.to_f64().unwrap_or(f64::NAN),
                b: self.b.to_f64().unwrap_or(f64::NAN),
            });
        }
        for (r, name) in self.residuals().into_iter().zip(names) {
            if !(r <= bound) {
                return Err(GeometryError::InvalidPair {
                    relation: name,
                    residual: r.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    }

    /// The same pair scaled by `s > 0`.
    pub fn scaled(&self, s: T) -> Self {
        Self {
            a: self.a * s,
            b: self.b * s,
            alpha: self.alpha * s,
            beta: self.beta * s,
            c: self.c * s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConicKind {
    Ellipse,
    HyperbolaRightBranch,
}

/// A canonical conic placed in the world by a uniform dilation about
/// `center`, optionally composed with a reflection across the vertical
/// line through `center`.
///
/// World point `w` and local point `l` are related by
/// `w = center + scale · M (l − center)`, `M = diag(±1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conic<T> {
    pub kind: ConicKind,
    /// Semi-major axis of the ellipse, or real semi-axis of the hyperbola.
    pub p: T,
    /// Semi-minor axis of the ellipse, or imaginary semi-axis of the hyperbola.
    pub q: T,
    pub center: Point2<T>,
    pub scale: T,
    pub mirrored: bool,
}

/// A ray–conic crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConicHit<T> {
    pub t: T,
    /// Double root: the ray grazes the curve.
    pub tangent: bool,
}

impl<T: Real> Conic<T> {
    pub fn ellipse(a: T, b: T) -> Self {
        Self::canonical(ConicKind::Ellipse, a, b)
    }

    pub fn hyperbola(alpha: T, beta: T) -> Self {
        Self::canonical(ConicKind::HyperbolaRightBranch, alpha, beta)
    }

    fn canonical(kind: ConicKind, p: T, q: T) -> Self {
        Self {
            kind,
            p,
            q,
            center: Point2::zero(),
            scale: T::one(),
            mirrored: false,
        }
    }

    /// Composes the placement with a dilation by `lambda` about `center`.
    ///
    /// Only dilations about the current center (or from the identity
    /// placement) are representable.
    pub fn dilated(&self, center: Point2<T>, lambda: T) -> Self {
        let identity = self.scale == T::one() && !self.mirrored;
        assert!(
            identity || self.center == center,
            "dilation centers must agree to compose placements"
        );
        Self {
            center,
            scale: self.scale * lambda,
            ..*self
        }
    }

    /// Composes the placement with a reflection across `x = center.x`.
    pub fn mirrored_about(&self, center: Point2<T>) -> Self {
        let identity = self.scale == T::one() && !self.mirrored;
        assert!(
            identity || self.center == center,
            "reflection line must pass through the center"
        );
        Self {
            center,
            mirrored: !self.mirrored,
            ..*self
        }
    }

    #[inline]
    fn flip(&self, v: Vec2<T>) -> Vec2<T> {
        if self.mirrored {
            Vec2::new(-v.x, v.y)
        } else {
            v
        }
    }

    pub fn to_local(&self, w: Point2<T>) -> Point2<T> {
        self.center + self.flip(w - self.center) / self.scale
    }

    pub fn to_world(&self, l: Point2<T>) -> Point2<T> {
        self.center + self.flip(l - self.center) * self.scale
    }

    /// Linear eccentricity of the conic in its own frame.
    pub fn focal_half_distance(&self) -> T {
        match self.kind {
            ConicKind::Ellipse => ((self.p - self.q) * (self.p + self.q)).sqrt(),
            ConicKind::HyperbolaRightBranch => self.p.hypot(self.q),
        }
    }

    /// The two foci in world coordinates: images of `(−c, 0)` and `(c, 0)`.
    pub fn world_foci(&self) -> (Point2<T>, Point2<T>) {
        let c = self.focal_half_distance();
        (
            self.to_world(Point2::new(-c, T::zero())),
            self.to_world(Point2::new(c, T::zero())),
        )
    }

    /// Implicit form evaluated in local coordinates.
    #[inline]
    pub fn implicit_local(&self, l: Point2<T>) -> T {
        let u = l.x / self.p;
        let v = l.y / self.q;
        match self.kind {
            ConicKind::Ellipse => u * u + v * v - T::one(),
            ConicKind::HyperbolaRightBranch => u * u - v * v - T::one(),
        }
    }

    #[inline]
    fn gradient_local(&self, l: Point2<T>) -> Vec2<T> {
        let two = lit::<T>(2.0);
        let gx = two * l.x / (self.p * self.p);
        let gy = two * l.y / (self.q * self.q);
        match self.kind {
            ConicKind::Ellipse => Vec2::new(gx, gy),
            ConicKind::HyperbolaRightBranch => Vec2::new(gx, -gy),
        }
    }

    /// Implicit form at a world point.
    pub fn implicit(&self, w: Point2<T>) -> T {
        self.implicit_local(self.to_local(w))
    }

    /// First-order distance from `w` to the curve (world units), with the
    /// branch restriction applied for hyperbolas.
    pub fn distance_estimate(&self, w: Point2<T>) -> T {
        let l = self.to_local(w);
        if self.kind == ConicKind::HyperbolaRightBranch && l.x <= T::zero() {
            return T::infinity();
        }
        let g = self.gradient_local(l).norm();
        if g == T::zero() {
            return T::infinity();
        }
        self.implicit_local(l).abs() / g * self.scale
    }

    /// Unit normal at a world point on the curve. The ellipse normal points
    /// away from its center; the hyperbola normal points away from the
    /// convex region bounded by the branch (the side holding its right focus).
    pub fn normal_at(&self, w: Point2<T>) -> Result<Vec2<T>, GeometryError> {
        let d = self.distance_estimate(w);
        let bound = tol::<T>(1e-9) * self.p * self.scale;
        if !(d <= bound) {
            return Err(GeometryError::OffCurve {
                distance: d.to_f64().unwrap_or(f64::NAN),
                tolerance: bound.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(self.normal_unchecked(w))
    }

    /// As [`Conic::normal_at`] without the on-curve check.
    pub fn normal_unchecked(&self, w: Point2<T>) -> Vec2<T> {
        let g = self.gradient_local(self.to_local(w));
        let g = match self.kind {
            ConicKind::Ellipse => g,
            ConicKind::HyperbolaRightBranch => -g,
        };
        self.flip(g).normalized().unwrap_or_else(Vec2::zero)
    }

    /// Polar angle of a world point about the conic's left focus, measured
    /// in the local frame. This is the arc parameter used by the body edges;
    /// it maps the ellipse and the right branch (within the asymptotic
    /// cone) bijectively onto an interval.
    pub fn focal_angle(&self, w: Point2<T>) -> T {
        let l = self.to_local(w);
        let c = self.focal_half_distance();
        (l - Point2::new(-c, T::zero())).angle()
    }

    /// Distance from the left focus to the curve along local polar angle
    /// `theta`; `None` when the direction misses the right branch.
    pub fn focal_radius(&self, theta: T) -> Option<T> {
        let c = self.focal_half_distance();
        let e = c / self.p;
        let semi_latus = self.q * self.q / self.p;
        let cos = theta.cos();
        let denom = match self.kind {
            ConicKind::Ellipse => T::one() - e * cos,
            ConicKind::HyperbolaRightBranch => e * cos - T::one(),
        };
        (denom > T::zero()).then(|| semi_latus / denom)
    }

    /// World point at local focal angle `theta`.
    pub fn point_at_focal_angle(&self, theta: T) -> Option<Point2<T>> {
        let r = self.focal_radius(theta)?;
        let c = self.focal_half_distance();
        let l = Point2::new(-c, T::zero()) + Vec2::from_angle(theta) * r;
        Some(self.to_world(l))
    }

    /// Every crossing of `ray` with the curve at `t > 0`, ascending. Roots
    /// come from a cancellation-free quadratic solve followed by one Newton
    /// step on the implicit form. A near-zero discriminant is reported as a
    /// single tangent root.
    pub fn intersect_ray(&self, ray: &Ray2<T>) -> Vec<ConicHit<T>> {
        let o = self.to_local(ray.origin);
        let d = self.flip(ray.direction);
        let (sp, sq) = (self.p * self.p, self.q * self.q);
        let sign = match self.kind {
            ConicKind::Ellipse => T::one(),
            ConicKind::HyperbolaRightBranch => -T::one(),
        };
        let qa = d.x * d.x / sp + sign * d.y * d.y / sq;
        let qb = lit::<T>(2.0) * (o.x * d.x / sp + sign * o.y * d.y / sq);
        let qc = self.implicit_local(o);

        let mut roots: Vec<(T, bool)> = Vec::with_capacity(2);
        let coeff_scale = qb * qb + (lit::<T>(4.0) * qa * qc).abs();
        if qa.abs() <= tol::<T>(1e-14) * (qb.abs() + qc.abs()).max(T::one()) * lit(1e-2) {
            // Ray parallel to an asymptote: the quadratic degenerates.
            if qb != T::zero() {
                roots.push((-qc / qb, false));
            }
        } else {
            let disc = qb * qb - lit::<T>(4.0) * qa * qc;
            if disc.abs() <= tol::<T>(1e-12) * coeff_scale {
                roots.push((-qb / (lit::<T>(2.0) * qa), true));
            } else if disc > T::zero() {
                let sq_disc = disc.sqrt();
                let q = -(qb + qb.signum() * sq_disc) / lit(2.0);
                let r1 = q / qa;
                let r2 = if q != T::zero() { qc / q } else { -r1 };
                roots.push((r1, false));
                roots.push((r2, false));
            }
        }

        let mut hits: Vec<ConicHit<T>> = roots
            .into_iter()
            .map(|(t, tangent)| {
                let t = if tangent {
                    t
                } else {
                    self.newton_polish(o, d, t)
                };
                (t, tangent)
            })
            .filter(|&(t, _)| t > T::zero() && t.is_finite())
            .filter(|&(t, _)| self.kind == ConicKind::Ellipse || (o.x + d.x * t) > T::zero())
            .map(|(t, tangent)| ConicHit {
                t: t * self.scale,
                tangent,
            })
            .collect();
        hits.sort_by(|u, v| u.t.partial_cmp(&v.t).unwrap_or(std::cmp::Ordering::Equal));
        hits
    }

    fn newton_polish(&self, o: Point2<T>, d: Vec2<T>, t: T) -> T {
        let p = o + d * t;
        let f = self.implicit_local(p);
        let df = self.gradient_local(p).dot(d);
        if df != T::zero() && df.is_finite() {
            let step = f / df;
            if step.is_finite() {
                return t - step;
            }
        }
        t
    }
}
