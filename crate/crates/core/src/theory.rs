//! The bisector characterization in a triangle and the chain of identities
//! that a four-bounce trajectory from `F1` must satisfy.
//!
//! For a triangle `ABC` with `D` on side `AC`, write `a1 = |AB|`,
//! `a2 = |BC|`, `b1 = |AD|`, `b2 = |DC|`, `f = |BD|`. Each of
//!
//! * (a) `a1/a2 = b1/b2`
//! * (b) `a1 a2 − b1 b2 = f²`
//! * (c) `(a1 + b1)(a2 − b2) = f²`
//!
//! characterizes `BD` as the bisector of angle `ABC`, and any two of them
//! imply the third.

use serde::{Deserialize, Serialize};

use crate::body::{Body2D, EdgeClass};
use crate::error::GeometryError;
use crate::geom::{angle_between, Point2};
use crate::scalar::{rel_err, tol, Real};
use crate::tracer::Trajectory;

/// Side lengths of a triangle cut by a cevian `BD`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CevianConfiguration<T> {
    pub a1: T,
    pub a2: T,
    pub b1: T,
    pub b2: T,
    pub f: T,
    /// `[A, B, C, D]` when built from points.
    pub points: Option<[Point2<T>; 4]>,
}

impl<T: Real> CevianConfiguration<T> {
    pub fn from_lengths(a1: T, a2: T, b1: T, b2: T, f: T) -> Self {
        Self {
            a1,
            a2,
            b1,
            b2,
            f,
            points: None,
        }
    }

    /// Builds the configuration from the triangle `ABC` and `D`, which must
    /// lie on segment `AC` within `1e-9` of its length.
    pub fn from_points(
        a: Point2<T>,
        b: Point2<T>,
        c: Point2<T>,
        d: Point2<T>,
    ) -> Result<Self, GeometryError> {
        let ac = c - a;
        let len = ac.norm();
        if len == T::zero() {
            return Err(GeometryError::DegenerateTriangle("A and C coincide".into()));
        }
        let height = (b - a).cross(ac).abs() / len;
        if height <= tol::<T>(1e-12) * len.max((b - a).norm()) {
            return Err(GeometryError::DegenerateTriangle(
                "A, B, C are collinear".into(),
            ));
        }
        let off_line = (d - a).cross(ac).abs() / len;
        let along = (d - a).dot(ac) / (len * len);
        let slack = tol::<T>(1e-9);
        if off_line > slack * len || along < -slack || along > T::one() + slack {
            return Err(GeometryError::DegenerateTriangle(
                "D is not on segment AC".into(),
            ));
        }
        Ok(Self {
            a1: a.distance(b),
            a2: b.distance(c),
            b1: a.distance(d),
            b2: d.distance(c),
            f: b.distance(d),
            points: Some([a, b, c, d]),
        })
    }

    /// `|a1 b2 − a2 b1| / (a1 b2)`.
    pub fn relation_a(&self) -> T {
        let lhs = self.a1 * self.b2;
        (lhs - self.a2 * self.b1).abs() / lhs.abs().max(T::min_positive_value())
    }

    /// `|a1 a2 − b1 b2 − f²| / f²`.
    pub fn relation_b(&self) -> T {
        rel_err(self.a1 * self.a2 - self.b1 * self.b2, self.f * self.f)
    }

    /// `|(a1 + b1)(a2 − b2) − f²| / f²`.
    pub fn relation_c(&self) -> T {
        rel_err((self.a1 + self.b1) * (self.a2 - self.b2), self.f * self.f)
    }

    /// `|∠ABD − ∠DBC|` in radians; needs the points.
    pub fn angle_gap(&self) -> Option<T> {
        let [a, b, c, d] = self.points?;
        Some((angle_between(a - b, d - b) - angle_between(d - b, c - b)).abs())
    }
}

/// Threshold on the relation (c) residual used by [`is_bisector`].
pub const BISECTOR_TOLERANCE: f64 = 1e-9;

/// Whether `BD` bisects angle `ABC`, decided by relation (c).
pub fn is_bisector<T: Real>(
    a: Point2<T>,
    b: Point2<T>,
    c: Point2<T>,
    d: Point2<T>,
) -> Result<bool, GeometryError> {
    let cfg = CevianConfiguration::from_points(a, b, c, d)?;
    Ok(cfg.relation_c() < tol::<T>(BISECTOR_TOLERANCE))
}

/// Whether `BD` bisects angle `ABC`, decided by comparing the two angles.
pub fn is_bisector_by_angles<T: Real>(
    a: Point2<T>,
    b: Point2<T>,
    c: Point2<T>,
    d: Point2<T>,
) -> Result<bool, GeometryError> {
    let cfg = CevianConfiguration::from_points(a, b, c, d)?;
    Ok(cfg.angle_gap().expect("built from points") < tol::<T>(BISECTOR_TOLERANCE))
}

/// Residuals of the identities along one four-bounce trajectory with
/// reflection points `C`, `D` (on `B1`) and `E`, `G` (on `B2`).
///
/// All residuals are dimensionless and nonnegative: length identities are
/// relative, angle identities are differences in radians (relative angle
/// errors blow up for slim bodies seen at tiny angles). Inequalities report
/// zero when satisfied and the relative size of the violation otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IdentityReport {
    /// `∠AF1F2 = ∠A'F1F2`.
    pub mirror_angles: f64,
    /// `∠CF1F2 < ∠A'F1F2`.
    pub first_hit_inside_sector: f64,
    /// `|F1C| + |F2C| = |F1H| + |F2H|`.
    pub ellipse_focal_sum: f64,
    /// `|F1D| − |F2D| = |F1H| − |F2H|`.
    pub hyperbola_focal_difference: f64,
    /// `(|F1C| + |F2C|)(|F1D| − |F2D|) = |F1F2|²`.
    pub focal_product: f64,
    /// The product itself, for reporting against `4c²`.
    pub focal_product_value: f64,
    /// Relation (c) on triangle `C F1 D` with cevian `F1F2`.
    pub bisector_relation: f64,
    /// `∠CF1F2 = ∠DF1F2`.
    pub first_pair_angles: f64,
    /// `φ_H < ∠DF1F2 < φ_B`: `D` lies on arc `HB`.
    pub second_hit_on_arc: f64,
    /// `∠DF1F2 = ∠EF1F2` with `D`, `F1`, `E` collinear.
    pub radial_link: f64,
    /// Focal sum and difference on the dilated conics at `E` and `G`.
    pub dilated_focal: f64,
    /// `∠EF1F2 = ∠GF1F2`.
    pub second_pair_angles: f64,
    /// `∠CF1F2 = ∠GF1F2` on the same side: exit on the entry ray.
    pub entry_exit_angles: f64,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.mirror_angles,
            self.first_hit_inside_sector,
            self.ellipse_focal_sum,
            self.hyperbola_focal_difference,
            self.focal_product,
            self.bisector_relation,
            self.first_pair_angles,
            self.second_hit_on_arc,
            self.radial_link,
            self.dilated_focal,
            self.second_pair_angles,
            self.entry_exit_angles,
        ]
        .into_iter()
        .fold(
            0.0,
            |m, r| if r.is_nan() { f64::INFINITY } else { m.max(r) },
        )
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_residual() < tolerance
    }
}

/// The expected surface sequence of a four-bounce trajectory from `F1`.
///
/// After `D` the particle moves radially away from `F1`, so in `B2` it
/// meets the ellipse arc before the hyperbola arc.
pub const FOUR_BOUNCE_CLASSES: [EdgeClass; 4] = [
    EdgeClass::EllipseArcB1,
    EdgeClass::HyperbolaArcB1,
    EdgeClass::EllipseArcB2,
    EdgeClass::HyperbolaArcB2,
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("expected 4 reflections, found {0}")]
    BounceCount(usize),
    #[error("reflection classes {0:?} differ from the expected sequence")]
    ClassOrder(Vec<EdgeClass>),
}

/// Evaluates every identity of the four-bounce argument on a trajectory.
pub fn check_identity_chain<T: Real>(
    trajectory: &Trajectory<T>,
    body: &Body2D<T>,
) -> Result<IdentityReport, StructureError> {
    let refl = &trajectory.reflections;
    if refl.len() != 4 {
        return Err(StructureError::BounceCount(refl.len()));
    }
    let classes = trajectory.classes();
    if classes != FOUR_BOUNCE_CLASSES {
        return Err(StructureError::ClassOrder(classes));
    }
    let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
    let pair = &body.pair;
    let (f1, f2) = (pair.f1(), pair.f2());
    let f2d = body.dilated_f2();
    let (c, d, e, g) = (refl[0].point, refl[1].point, refl[2].point, refl[3].point);
    let h = body.inner.h;
    let signed = |p: Point2<T>| (p - f1).angle();
    let (tc, td, te, tg) = (signed(c), signed(d), signed(e), signed(g));
    let phi_b = body.phi_b;

    let ta = signed(body.inner.a).abs();
    let ta_prime = signed(body.inner.a_prime).abs();
    let violation = |excess: T, scale: T| {
        if excess > T::zero() {
            f(excess / scale)
        } else {
            0.0
        }
    };

    let sum_c = c.distance(f1) + c.distance(f2);
    let sum_h = h.distance(f1) + h.distance(f2);
    let diff_d = d.distance(f1) - d.distance(f2);
    let diff_h = h.distance(f1) - h.distance(f2);
    let product = sum_c * diff_d;
    let focal_sq = f1.distance(f2) * f1.distance(f2);

    // Triangle C F1 D with the cevian F1 F2 (C, F2, D are collinear).
    let cevian = CevianConfiguration::from_lengths(
        c.distance(f1),
        d.distance(f1),
        c.distance(f2),
        f2.distance(d),
        f1.distance(f2),
    );

    let lam = body.lambda;
    let dilated_sum = rel_err(e.distance(f1) + e.distance(f2d), lam * sum_h);
    let dilated_diff = rel_err(g.distance(f1) - g.distance(f2d), lam * diff_h);

    let on_arc = violation(body.phi_h - td.abs(), phi_b).max(violation(td.abs() - phi_b, phi_b));

    Ok(IdentityReport {
        mirror_angles: f((ta_prime - ta).abs()),
        first_hit_inside_sector: violation(tc.abs() - ta_prime, ta_prime),
        ellipse_focal_sum: f(rel_err(sum_c, sum_h)),
        hyperbola_focal_difference: f(rel_err(diff_d, diff_h)),
        focal_product: f(rel_err(product, focal_sq)),
        focal_product_value: f(product),
        bisector_relation: f(cevian.relation_c()),
        first_pair_angles: f((td.abs() - tc.abs()).abs()),
        second_hit_on_arc: on_arc,
        radial_link: f((te - td).abs()),
        dilated_focal: f(dilated_sum.max(dilated_diff)),
        second_pair_angles: f((tg.abs() - te.abs()).abs()),
        entry_exit_angles: f((tg - tc).abs()),
    })
}
