//! Text documents: the body file, trajectory records and reports.
//!
//! Everything is JSON, pretty-printed, with every float written with 17
//! significant digits so a document round-trips bit-for-bit.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::body::{build_invisible_body_with_dilation, Body2D, EdgeClass, EdgeGeometry};
use crate::conics::{make_confocal_pair, ConicKind};
use crate::error::DocumentError;
use crate::geom::Point2;
use crate::scalar::{lit, Real};

pub const BODY_SCHEMA: &str = "invisible-body/1";

/// Relative agreement required between stored and re-derived fields.
pub const STALE_TOLERANCE: f64 = 1e-9;

/// Pretty JSON formatter writing floats as `{:.16e}`.
struct Float17<'a>(PrettyFormatter<'a>);

impl Formatter for Float17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes any value in the crate's document style.
pub fn to_document<S: Serialize + ?Sized>(value: &S) -> Result<String, DocumentError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut buf,
        Float17(PrettyFormatter::with_indent(b"  ")),
    );
    value
        .serialize(&mut ser)
        .map_err(|e| DocumentError::Write(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| DocumentError::Write(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDoc {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConicDoc {
    pub kind: ConicKind,
    pub p: f64,
    pub q: f64,
    pub center: [f64; 2],
    pub scale: f64,
    pub mirrored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeShapeDoc {
    ConicArc { conic: ConicDoc, interval: [f64; 2] },
    Segment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: u32,
    pub class: EdgeClass,
    pub upper: bool,
    pub endpoints: [[f64; 2]; 2],
    pub shape: EdgeShapeDoc,
}

/// On-disk form of a [`Body2D`]. The generating parameters are
/// `pair.a`, `pair.b`, `phi_b` and `lambda`; every other field is derived
/// and re-checked on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyDocument {
    pub schema: String,
    pub pair: PairDoc,
    pub phi_h: f64,
    pub phi_b: f64,
    pub lambda: f64,
    pub points: BTreeMap<String, [f64; 2]>,
    pub touch_points: [[f64; 2]; 2],
    pub edges: Vec<EdgeDoc>,
}

fn f<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

impl<T: Real> From<&Body2D<T>> for BodyDocument {
    fn from(body: &Body2D<T>) -> Self {
        let p = &body.pair;
        let mut points = BTreeMap::new();
        for (name, q) in body.inner.as_array() {
            points.insert(format!("B1.{name}"), q.to_array_f64());
        }
        for (name, q) in body.outer.as_array() {
            points.insert(format!("B2.{name}"), q.to_array_f64());
        }
        let edges = body
            .edges
            .iter()
            .map(|e| EdgeDoc {
                id: e.id.0,
                class: e.class,
                upper: e.upper,
                endpoints: e.endpoints().map(|q| q.to_array_f64()),
                shape: match e.geometry {
                    EdgeGeometry::ConicArc {
                        conic, interval, ..
                    } => EdgeShapeDoc::ConicArc {
                        conic: ConicDoc {
                            kind: conic.kind,
                            p: f(conic.p),
                            q: f(conic.q),
                            center: conic.center.to_array_f64(),
                            scale: f(conic.scale),
                            mirrored: conic.mirrored,
                        },
                        interval: interval.map(f),
                    },
                    EdgeGeometry::Segment { .. } => EdgeShapeDoc::Segment,
                },
            })
            .collect();
        BodyDocument {
            schema: BODY_SCHEMA.to_string(),
            pair: PairDoc {
                a: f(p.a()),
                b: f(p.b()),
                alpha: f(p.alpha()),
                beta: f(p.beta()),
                c: f(p.c()),
            },
            phi_h: f(body.phi_h),
            phi_b: f(body.phi_b),
            lambda: f(body.lambda),
            points,
            touch_points: body.touch_points.map(|q| q.to_array_f64()),
            edges,
        }
    }
}

/// Writes a body document.
pub fn serialize_body<T: Real>(body: &Body2D<T>) -> Result<String, DocumentError> {
    to_document(&BodyDocument::from(body))
}

/// Reads a body document, rebuilds the body from its generating
/// parameters and rejects documents whose derived fields disagree.
pub fn deserialize_body<T: Real>(text: &str) -> Result<Body2D<T>, DocumentError> {
    let doc: BodyDocument = serde_json::from_str(text)?;
    if doc.schema != BODY_SCHEMA {
        return Err(DocumentError::Schema {
            found: doc.schema,
            expected: BODY_SCHEMA,
        });
    }
    let pair = make_confocal_pair::<T>(lit(doc.pair.a), lit(doc.pair.b))?;
    let body = build_invisible_body_with_dilation(&pair, lit(doc.phi_b), lit(doc.lambda))?;
    let rebuilt = BodyDocument::from(&body);
    cross_check(&doc, &rebuilt, doc.pair.a)?;
    Ok(body)
}

fn check(field: String, x: f64, y: f64, scale: f64) -> Result<(), DocumentError> {
    let delta = (x - y).abs() / scale.abs().max(f64::MIN_POSITIVE);
    if delta > STALE_TOLERANCE || delta.is_nan() {
        Err(DocumentError::Stale { field, delta })
    } else {
        Ok(())
    }
}

fn check_point(field: &str, x: [f64; 2], y: [f64; 2], scale: f64) -> Result<(), DocumentError> {
    check(format!("{field}.x"), x[0], y[0], scale)?;
    check(format!("{field}.y"), x[1], y[1], scale)
}

fn stale(field: String) -> DocumentError {
    DocumentError::Stale {
        field,
        delta: f64::INFINITY,
    }
}

fn cross_check(
    stored: &BodyDocument,
    derived: &BodyDocument,
    scale: f64,
) -> Result<(), DocumentError> {
    let (sp, dp) = (&stored.pair, &derived.pair);
    for (name, x, y) in [
        ("alpha", sp.alpha, dp.alpha),
        ("beta", sp.beta, dp.beta),
        ("c", sp.c, dp.c),
    ] {
        check(format!("pair.{name}"), x, y, scale)?;
    }
    check("phi_h".into(), stored.phi_h, derived.phi_h, 1.0)?;
    if stored.points.len() != derived.points.len() {
        return Err(stale("points".into()));
    }
    for (name, q) in &derived.points {
        let s = stored
            .points
            .get(name)
            .ok_or_else(|| stale(format!("points.{name}")))?;
        check_point(&format!("points.{name}"), *s, *q, scale)?;
    }
    for k in 0..2 {
        check_point(
            &format!("touch_points[{k}]"),
            stored.touch_points[k],
            derived.touch_points[k],
            scale,
        )?;
    }
    if stored.edges.len() != derived.edges.len() {
        return Err(stale("edges".into()));
    }
    for (s, d) in stored.edges.iter().zip(&derived.edges) {
        let tag = format!("edges[{}]", d.id);
        if s.id != d.id || s.class != d.class || s.upper != d.upper {
            return Err(stale(tag));
        }
        for k in 0..2 {
            check_point(
                &format!("{tag}.endpoints[{k}]"),
                s.endpoints[k],
                d.endpoints[k],
                scale,
            )?;
        }
        match (&s.shape, &d.shape) {
            (EdgeShapeDoc::Segment, EdgeShapeDoc::Segment) => {}
            (
                EdgeShapeDoc::ConicArc {
                    conic: sc,
                    interval: si,
                },
                EdgeShapeDoc::ConicArc {
                    conic: dc,
                    interval: di,
                },
            ) => {
                if sc.kind != dc.kind || sc.mirrored != dc.mirrored {
                    return Err(stale(format!("{tag}.conic")));
                }
                check(format!("{tag}.conic.p"), sc.p, dc.p, scale)?;
                check(format!("{tag}.conic.q"), sc.q, dc.q, scale)?;
                check(format!("{tag}.conic.scale"), sc.scale, dc.scale, 1.0)?;
                check_point(&format!("{tag}.conic.center"), sc.center, dc.center, scale)?;
                check(format!("{tag}.interval[0]"), si[0], di[0], 1.0)?;
                check(format!("{tag}.interval[1]"), si[1], di[1], 1.0)?;
            }
            _ => return Err(stale(format!("{tag}.shape"))),
        }
    }
    Ok(())
}

/// Reads a point stored as `[x, y]`.
pub fn point_from_doc<T: Real>(p: [f64; 2]) -> Point2<T> {
    Point2::from_array_f64(p)
}
