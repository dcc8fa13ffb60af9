//! Triangle meshes of the revolved solids, written as Wavefront OBJ.

use std::fmt::Write as _;

use serde::Serialize;

use super::{RevolutionBody, RevolutionVariant};
use crate::body::{Edge, EdgeClass, EdgeId};
use crate::error::GeometryError;
use crate::geom::Point2;
use crate::scalar::{lit, Real};

pub const MIN_AZIMUTHAL_STEPS: usize = 8;
pub const MIN_MERIDIAN_STEPS: usize = 8;

/// One revolved boundary edge: `rings` profile samples by `azimuthal`
/// steps, closed in azimuth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshPatch {
    pub edge_id: EdgeId,
    pub class: EdgeClass,
    /// Index of the revolved triangle this patch bounds.
    pub shell: usize,
    pub first_vertex: usize,
    pub rings: usize,
    pub azimuthal: usize,
    pub first_face: usize,
    pub face_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based, counterclockwise seen from outside.
    pub faces: Vec<[usize; 3]>,
    pub patches: Vec<MeshPatch>,
}

impl Mesh {
    pub fn shell_count(&self) -> usize {
        self.patches.iter().map(|p| p.shell + 1).max().unwrap_or(0)
    }

    /// Enclosed volume of one shell (divergence theorem over its faces).
    pub fn shell_volume(&self, shell: usize) -> f64 {
        self.patches
            .iter()
            .filter(|p| p.shell == shell)
            .flat_map(|p| &self.faces[p.first_face..p.first_face + p.face_count])
            .map(|f| {
                let [a, b, c] = f.map(|i| self.vertices[i]);
                (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                    + a[2] * (b[0] * c[1] - b[1] * c[0]))
                    / 6.0
            })
            .sum()
    }

    pub fn to_obj(&self) -> String {
        let mut s = String::with_capacity(self.vertices.len() * 64 + self.faces.len() * 24);
        let _ = writeln!(
            s,
            "# {} vertices, {} faces",
            self.vertices.len(),
            self.faces.len()
        );
        for v in &self.vertices {
            let _ = writeln!(s, "v {:.17e} {:.17e} {:.17e}", v[0], v[1], v[2]);
        }
        for p in &self.patches {
            let _ = writeln!(s, "g shell{}_{}", p.shell, p.edge_id);
            for f in &self.faces[p.first_face..p.first_face + p.face_count] {
                let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
            }
        }
        s
    }
}

/// Meshes every revolved triangle of the solid. Each boundary edge of a
/// triangle becomes its own closed-in-azimuth patch with
/// `meridian_steps + 1` rings.
pub fn export_mesh<T: Real>(
    rb: &RevolutionBody<T>,
    azimuthal_steps: usize,
    meridian_steps: usize,
) -> Result<Mesh, GeometryError> {
    if azimuthal_steps < MIN_AZIMUTHAL_STEPS || meridian_steps < MIN_MERIDIAN_STEPS {
        return Err(GeometryError::MeshResolution {
            azimuthal: azimuthal_steps,
            meridian: meridian_steps,
            min: MIN_AZIMUTHAL_STEPS.max(MIN_MERIDIAN_STEPS),
        });
    }
    // triangles as triples of edge indices; the lower triangles sweep the
    // same solid as the upper ones about the major axis
    let triangles: &[[usize; 3]] = match rb.variant {
        RevolutionVariant::AboutMajorAxis => &[[0, 1, 2], [6, 7, 8]],
        RevolutionVariant::AboutPerpendicularAxisThroughF1 => {
            &[[0, 1, 2], [3, 4, 5], [6, 7, 8], [9, 10, 11]]
        }
    };
    let frames: Vec<_> = (0..azimuthal_steps)
        .map(|k| {
            let psi = lit::<T>(std::f64::consts::TAU * k as f64 / azimuthal_steps as f64);
            rb.frame_at_azimuth(psi)
        })
        .collect();
    let mut mesh = Mesh {
        vertices: Vec::new(),
        faces: Vec::new(),
        patches: Vec::new(),
    };
    for (shell, tri) in triangles.iter().enumerate() {
        let edges: Vec<&Edge<T>> = tri.iter().map(|&i| &rb.base.edges[i]).collect();
        for (edge, profile) in closed_profile(rb, &edges, meridian_steps)? {
            let first_vertex = mesh.vertices.len();
            let first_face = mesh.faces.len();
            for p in &profile {
                for f in &frames {
                    mesh.vertices.push(f.to_space(*p).to_array_f64());
                }
            }
            let n = azimuthal_steps;
            let at = |j: usize, k: usize| first_vertex + j * n + k % n;
            for j in 0..profile.len() - 1 {
                for k in 0..n {
                    let (v00, v10, v11, v01) =
                        (at(j, k), at(j + 1, k), at(j + 1, k + 1), at(j, k + 1));
                    mesh.faces.push([v00, v10, v11]);
                    mesh.faces.push([v00, v11, v01]);
                }
            }
            mesh.patches.push(MeshPatch {
                edge_id: edge.id,
                class: edge.class,
                shell,
                first_vertex,
                rings: profile.len(),
                azimuthal: n,
                first_face,
                face_count: mesh.faces.len() - first_face,
            });
        }
    }
    Ok(mesh)
}

/// An edge with its sampled points, in traversal order.
type SampledEdge<'e, T> = (&'e Edge<T>, Vec<Point2<T>>);

/// Samples the triangle's edges head to tail, oriented counterclockwise in
/// (axial, radial) coordinates so the swept surface normals point outward.
fn closed_profile<'e, T: Real>(
    rb: &RevolutionBody<T>,
    edges: &[&'e Edge<T>],
    steps: usize,
) -> Result<Vec<SampledEdge<'e, T>>, GeometryError> {
    let eps = lit::<T>(1e-9) * rb.base.pair.a();
    let mut remaining: Vec<&Edge<T>> = edges[1..].to_vec();
    let mut chain = vec![(edges[0], edges[0].sample(steps))];
    while !remaining.is_empty() {
        let end = *chain
            .last()
            .and_then(|(_, s)| s.last())
            .expect("nonempty sample");
        let pos = remaining
            .iter()
            .position(|e| e.endpoints().iter().any(|q| q.distance(end) < eps))
            .ok_or_else(|| GeometryError::Construction("triangle boundary is not closed".into()))?;
        let e = remaining.remove(pos);
        let mut s = e.sample(steps);
        if s[0].distance(end) >= eps {
            s.reverse();
        }
        chain.push((e, s));
    }
    // signed area in (axial, radial) coordinates
    let frame = rb.frame_at_azimuth(T::zero());
    let k = frame.axis;
    let r = frame.radial;
    let coords = |p: Point2<T>| {
        let w = frame.to_space(p) - frame.origin;
        (w.dot(k), w.dot(r))
    };
    let pts: Vec<(T, T)> = chain
        .iter()
        .flat_map(|(_, s)| s.iter().map(|&p| coords(p)))
        .collect();
    let mut area = T::zero();
    for i in 0..pts.len() {
        let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
        area = area + a.0 * b.1 - a.1 * b.0;
    }
    if area < T::zero() {
        chain.reverse();
        for (_, s) in chain.iter_mut() {
            s.reverse();
        }
    }
    Ok(chain)
}
