//! Ray-by-ray verification that a body is invisible from `F1`.
//!
//! A ray from `F1` is accounted for when either it misses the body, or its
//! billiard trajectory returns to the same ray: the exit direction equals
//! the entry direction, the exit line passes through `F1`, and the exit
//! leg lies further out than the entry leg.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::body::{build_invisible_body_with_dilation, Body2D, EdgeClass, EdgeGeometry, EdgeSet};
use crate::conics::ConicKind;
use crate::error::GeometryError;
use crate::geom::{angle_between, point_line_distance, Point2, Vec2};
use crate::scalar::{lit, Real};
use crate::theory::{check_identity_chain, IdentityReport};
use crate::tracer::{trace, TraceStatus, Trajectory, DEFAULT_MAX_BOUNCES};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 0x1f0c_a15e;
/// Largest tolerated fraction of degenerate rays in a fan.
pub const DEGENERATE_BUDGET: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    InvisiblePass,
    Miss,
    Degenerate,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayVerdict {
    pub angle: f64,
    pub bounce_count: usize,
    pub edge_classes: Vec<EdgeClass>,
    /// Angle between exit and entry directions (radians).
    pub collinearity_error: f64,
    /// Distance from `F1` to the exit line (length units).
    pub exit_line_distance: f64,
    pub identity_report: Option<IdentityReport>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Verification context for one body: caches the convex hull used for
/// the containment check.
pub struct Verifier<'a, T: Real> {
    body: &'a Body2D<T>,
    hull: Vec<Point2<T>>,
    tolerance: f64,
}

impl<'a, T: Real> Verifier<'a, T> {
    pub fn new(body: &'a Body2D<T>, tolerance: f64) -> Self {
        let samples: Vec<Point2<T>> = body.edges().iter().flat_map(|e| e.sample(32)).collect();
        Self {
            body,
            hull: convex_hull(&samples),
            tolerance,
        }
    }

    pub fn body(&self) -> &Body2D<T> {
        self.body
    }

    pub fn verify_angle(&self, angle: T) -> RayVerdict {
        self.verify_direction(Vec2::from_angle(angle))
    }

    pub fn verify_direction(&self, direction: Vec2<T>) -> RayVerdict {
        let traj = trace(
            self.body,
            self.body.pair.f1(),
            direction,
            DEFAULT_MAX_BOUNCES,
        );
        self.judge(&traj)
    }

    /// Classifies an already traced trajectory from `F1`.
    pub fn judge(&self, traj: &Trajectory<T>) -> RayVerdict {
        let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
        let f1 = self.body.pair.f1();
        let scale = f(self.body.pair.a());
        let mut v = RayVerdict {
            angle: f(traj.initial_direction.angle()),
            bounce_count: traj.reflections.len(),
            edge_classes: traj.classes(),
            collinearity_error: f(angle_between(traj.final_direction, traj.initial_direction)),
            exit_line_distance: f(point_line_distance(
                f1,
                traj.last_point(),
                traj.final_direction,
            )),
            identity_report: None,
            verdict: Verdict::Fail,
            reason: None,
        };
        let fail = |mut v: RayVerdict, why: String| {
            v.verdict = Verdict::Fail;
            v.reason = Some(why);
            v
        };
        match traj.status {
            TraceStatus::DegenerateHit => {
                v.verdict = Verdict::Degenerate;
                v.reason = traj
                    .degeneracy
                    .map(|d| format!("{:?} hit on edge {}", d.kind, d.edge));
                return v;
            }
            TraceStatus::MaxBouncesExceeded => return fail(v, "bounce limit exceeded".into()),
            TraceStatus::Escaped => {}
        }
        if traj.reflections.is_empty() {
            v.verdict = Verdict::Miss;
            return v;
        }
        if let Some(r) = traj.reflections.iter().find(|r| r.class.is_radial()) {
            return fail(
                v,
                format!("transversal hit on radial segment {}", r.edge_id),
            );
        }
        let report = match check_identity_chain(traj, self.body) {
            Ok(r) => r,
            Err(e) => return fail(v, e.to_string()),
        };
        v.identity_report = Some(report);
        if !(v.collinearity_error < self.tolerance) {
            return fail(v, "exit direction differs from entry direction".into());
        }
        if !(v.exit_line_distance < self.tolerance * scale) {
            return fail(v, "exit line misses F1".into());
        }
        let entry = traj.reflections[0].point;
        let exit = traj.last_point();
        let along = |p: Point2<T>| (p - f1).dot(traj.initial_direction);
        if !(along(exit) > along(entry)) {
            return fail(v, "exit leg is not beyond the entry leg".into());
        }
        if !report.passes(self.tolerance) {
            return fail(v, format!("identity residual {:e}", report.max_residual()));
        }
        let hull_tol = lit::<T>(self.tolerance) * self.body.pair.a();
        if let Some(r) = traj
            .reflections
            .iter()
            .find(|r| !hull_contains(&self.hull, r.point, hull_tol))
        {
            return fail(
                v,
                format!(
                    "reflection point on {} lies outside the convex hull",
                    r.edge_id
                ),
            );
        }
        v.verdict = Verdict::InvisiblePass;
        v
    }
}

/// Traces from `F1` at `angle` and classifies the outcome.
pub fn verify_ray<T: Real>(body: &Body2D<T>, angle: T, tolerance: f64) -> RayVerdict {
    Verifier::new(body, tolerance).verify_angle(angle)
}

/// Andrew's monotone chain; counterclockwise, no repeated first vertex.
pub fn convex_hull<T: Real>(points: &[Point2<T>]) -> Vec<Point2<T>> {
    let mut pts: Vec<Point2<T>> = points.to_vec();
    pts.sort_by(|a, b| {
        a.x.partial_cmp(&b.x)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.y.partial_cmp(&b.y).unwrap_or(std::cmp::Ordering::Equal))
    });
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: Point2<T>, a: Point2<T>, b: Point2<T>| (a - o).cross(b - o);
    let mut lower: Vec<Point2<T>> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2
            && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= T::zero()
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2<T>> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= T::zero()
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    // shared endpoints of adjacent edges can differ in the last bit; the
    // sliver edge between such copies has no meaningful direction
    let extent = lower
        .iter()
        .fold(T::zero(), |m, p| m.max(p.x.abs()).max(p.y.abs()));
    let eps = lit::<T>(1e-12) * extent;
    let mut hull: Vec<Point2<T>> = Vec::with_capacity(lower.len());
    for p in lower {
        if hull.last().is_none_or(|q: &Point2<T>| q.distance(p) > eps) {
            hull.push(p);
        }
    }
    while hull.len() > 1 && hull[0].distance(hull[hull.len() - 1]) <= eps {
        hull.pop();
    }
    hull
}

/// Whether `p` is inside the counterclockwise hull, allowing `slack`
/// outside each supporting line.
pub fn hull_contains<T: Real>(hull: &[Point2<T>], p: Point2<T>, slack: T) -> bool {
    let n = hull.len();
    (0..n).all(|i| {
        let (a, b) = (hull[i], hull[(i + 1) % n]);
        let e = b - a;
        e.cross(p - a) / e.norm() >= -slack
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyParameters {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub phi_h: f64,
    pub phi_b: f64,
    pub lambda: f64,
}

impl<T: Real> From<&Body2D<T>> for BodyParameters {
    fn from(b: &Body2D<T>) -> Self {
        let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
        let p = &b.pair;
        Self {
            a: f(p.a()),
            b: f(p.b()),
            alpha: f(p.alpha()),
            beta: f(p.beta()),
            c: f(p.c()),
            phi_h: f(b.phi_h),
            phi_b: f(b.phi_b),
            lambda: f(b.lambda),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub invisible_pass: usize,
    pub miss: usize,
    pub degenerate: usize,
    pub fail: usize,
}

impl VerdictCounts {
    pub fn total(&self) -> usize {
        self.invisible_pass + self.miss + self.degenerate + self.fail
    }

    fn add(&mut self, v: Verdict) {
        match v {
            Verdict::InvisiblePass => self.invisible_pass += 1,
            Verdict::Miss => self.miss += 1,
            Verdict::Degenerate => self.degenerate += 1,
            Verdict::Fail => self.fail += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorStats {
    pub name: String,
    pub counts: VerdictCounts,
    pub max_collinearity_error: f64,
    pub max_exit_line_distance: f64,
}

impl SectorStats {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            counts: VerdictCounts::default(),
            max_collinearity_error: 0.0,
            max_exit_line_distance: 0.0,
        }
    }

    fn absorb(&mut self, v: &RayVerdict) {
        self.counts.add(v.verdict);
        if v.verdict != Verdict::Degenerate {
            self.max_collinearity_error = self.max_collinearity_error.max(v.collinearity_error);
            self.max_exit_line_distance = self.max_exit_line_distance.max(v.exit_line_distance);
        }
    }
}

/// Aggregate of a verification fan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub body: BodyParameters,
    pub rays: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub counts: VerdictCounts,
    /// Upper sector, lower sector, and everything else.
    pub sectors: Vec<SectorStats>,
    pub max_collinearity_error: f64,
    /// Largest distance from `F1` to an exit line, divided by `a`.
    pub max_exit_line_distance_rel: f64,
    pub max_identity_residual: f64,
    /// Largest deviation of the focal product from `4c²`, relative.
    pub max_focal_product_error: f64,
    pub degenerate_angles: Vec<f64>,
    pub fail_angles: Vec<f64>,
    /// Every non-miss, non-degenerate ray followed the four-bounce sequence.
    pub four_bounce_structure: bool,
    pub pass: bool,
}

impl VerificationReport {
    /// Builds the report from per-ray verdicts in a fixed order.
    pub fn from_verdicts<T: Real>(
        body: &Body2D<T>,
        verdicts: &[RayVerdict],
        tolerance: f64,
        seed: u64,
    ) -> Self {
        let phi_h = body.phi_h.to_f64().unwrap_or(f64::NAN);
        let phi_b = body.phi_b.to_f64().unwrap_or(f64::NAN);
        let a = body.pair.a().to_f64().unwrap_or(f64::NAN);
        let mut sectors = vec![
            SectorStats::new("upper"),
            SectorStats::new("lower"),
            SectorStats::new("outside"),
        ];
        let mut counts = VerdictCounts::default();
        let mut max_res: f64 = 0.0;
        let mut max_prod: f64 = 0.0;
        let mut structure = true;
        let mut degenerate_angles = Vec::new();
        let mut fail_angles = Vec::new();
        for v in verdicts {
            counts.add(v.verdict);
            let s = if v.angle > phi_h && v.angle < phi_b {
                0
            } else if -v.angle > phi_h && -v.angle < phi_b {
                1
            } else {
                2
            };
            sectors[s].absorb(v);
            if let Some(r) = &v.identity_report {
                max_res = max_res.max(r.max_residual());
                max_prod = max_prod.max(r.focal_product);
            }
            match v.verdict {
                Verdict::Degenerate => degenerate_angles.push(v.angle),
                Verdict::Fail => fail_angles.push(v.angle),
                _ => {}
            }
            if matches!(v.verdict, Verdict::InvisiblePass | Verdict::Fail)
                && v.edge_classes != crate::theory::FOUR_BOUNCE_CLASSES
            {
                structure = false;
            }
        }
        let max_col = sectors
            .iter()
            .map(|s| s.max_collinearity_error)
            .fold(0.0, f64::max);
        let max_dist = sectors
            .iter()
            .map(|s| s.max_exit_line_distance)
            .fold(0.0, f64::max);
        let rays = verdicts.len();
        let pass =
            counts.fail == 0 && (counts.degenerate as f64) <= DEGENERATE_BUDGET * rays as f64;
        Self {
            body: BodyParameters::from(body),
            rays,
            tolerance,
            seed,
            counts,
            sectors,
            max_collinearity_error: max_col,
            max_exit_line_distance_rel: max_dist / a,
            max_identity_residual: max_res,
            max_focal_product_error: max_prod,
            degenerate_angles,
            fail_angles,
            four_bounce_structure: structure,
            pass,
        }
    }
}

/// Fan layout: half of the rays stratified over the two body sectors
/// `±(φ_H, φ_B)`, the rest stratified over the full circle, each ray
/// jittered within its stratum by a seeded generator.
pub fn fan_angles(phi_h: f64, phi_b: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let in_sector = n / 2;
    let upper = in_sector - in_sector / 2;
    let lower = in_sector / 2;
    let rest = n - in_sector;
    let mut out = Vec::with_capacity(n);
    let mut strata = |lo: f64, hi: f64, m: usize, sign: f64, out: &mut Vec<f64>| {
        for i in 0..m {
            let u: f64 = rng.gen();
            out.push(sign * (lo + (hi - lo) * (i as f64 + u) / m as f64));
        }
    };
    strata(phi_h, phi_b, upper, 1.0, &mut out);
    strata(phi_h, phi_b, lower, -1.0, &mut out);
    strata(
        -std::f64::consts::PI,
        std::f64::consts::PI,
        rest,
        1.0,
        &mut out,
    );
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanConfig {
    pub rays: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for FanConfig {
    fn default() -> Self {
        Self {
            rays: 10_000,
            tolerance: DEFAULT_TOLERANCE,
            seed: DEFAULT_SEED,
        }
    }
}

/// Verifies `n` rays with the default seed.
pub fn verify_fan<T: Real>(body: &Body2D<T>, n: usize, tolerance: f64) -> VerificationReport {
    verify_fan_with(
        body,
        &FanConfig {
            rays: n,
            tolerance,
            seed: DEFAULT_SEED,
        },
    )
}

pub fn verify_fan_with<T: Real>(body: &Body2D<T>, cfg: &FanConfig) -> VerificationReport {
    let phi_h = body.phi_h.to_f64().unwrap_or(f64::NAN);
    let phi_b = body.phi_b.to_f64().unwrap_or(f64::NAN);
    let angles = fan_angles(phi_h, phi_b, cfg.rays, cfg.seed);
    verify_angles(body, &angles, cfg.tolerance, cfg.seed)
}

/// Verifies an explicit list of angles. Rays are evaluated in parallel;
/// the report does not depend on evaluation order.
pub fn verify_angles<T: Real>(
    body: &Body2D<T>,
    angles: &[f64],
    tolerance: f64,
    seed: u64,
) -> VerificationReport {
    let verifier = Verifier::new(body, tolerance);
    let verdicts: Vec<RayVerdict> = angles
        .par_iter()
        .map(|&a| verifier.verify_angle(lit::<T>(a)))
        .collect();
    VerificationReport::from_verdicts(body, &verdicts, tolerance, seed)
}

/// A deliberate 1%-style change to one generating quantity, used to
/// check that verification is not vacuous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Perturbation {
    /// Multiply the dilation coefficient.
    Lambda(f64),
    /// Multiply `phi_b`, keeping the dilation coefficient.
    PhiB(f64),
    /// Multiply the hyperbola's semi-minor axis on every hyperbolic mirror,
    /// leaving the rest of the body alone.
    Beta(f64),
}

/// Applies a perturbation to `body`.
pub fn perturb<T: Real>(body: &Body2D<T>, p: Perturbation) -> Result<Body2D<T>, GeometryError> {
    match p {
        Perturbation::Lambda(k) => {
            build_invisible_body_with_dilation(&body.pair, body.phi_b, body.lambda * lit(k))
        }
        Perturbation::PhiB(k) => {
            build_invisible_body_with_dilation(&body.pair, body.phi_b * lit(k), body.lambda)
        }
        Perturbation::Beta(k) => {
            if !(k > 0.0) || !k.is_finite() {
                return Err(GeometryError::Construction(format!(
                    "beta factor must be positive, got {k}"
                )));
            }
            let mut out = body.clone();
            for e in out.edges.iter_mut() {
                if let EdgeGeometry::ConicArc { conic, .. } = &mut e.geometry {
                    if conic.kind == ConicKind::HyperbolaRightBranch {
                        conic.q = conic.q * lit(k);
                    }
                }
            }
            Ok(out)
        }
    }
}
