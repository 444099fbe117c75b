//! Tube meshes around sampled curves and Wavefront OBJ output.
//!
//! Cross-sections follow a rotation-minimizing frame propagated by double
//! reflection. On closed curves the frame's holonomy is spread evenly over
//! the rings so the seam matches up.

use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use nalgebra::{Rotation3, Unit, Vector3};

use crate::curve::{SampledCurve, CLOSURE_TOLERANCE};

#[derive(Debug, thiserror::Error)]
pub enum MeshError {
    #[error("curve is not closed: |r(0) - r(period)| = {gap:e}")]
    NotClosed { gap: f64 },
    #[error("radius {radius} too large: must stay below half the shortest non-adjacent chord, {limit} (samples {i} and {j})")]
    RadiusTooLarge { radius: f64, limit: f64, i: usize, j: usize },
    #[error("radius {radius} too large: the tube would fold where the radius of curvature is {limit} (sample {index})")]
    RadiusExceedsCurvature { radius: f64, limit: f64, index: usize },
    #[error("invalid tube resolution: {rings} rings of {segments} segments on {samples} samples")]
    Resolution { rings: usize, segments: usize, samples: usize },
    #[error("malformed OBJ at line {line}: {message}")]
    Obj { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Quad tube around a curve. Vertex `i` has normal `i`.
#[derive(Debug, Clone)]
pub struct TubeMesh {
    pub vertices: Vec<Vector3<f64>>,
    pub normals: Vec<Vector3<f64>>,
    /// Zero-based vertex indices, counter-clockwise seen from outside.
    pub faces: Vec<[usize; 4]>,
    /// Ring centres and unit tangents.
    pub centers: Vec<Vector3<f64>>,
    pub tangents: Vec<Vector3<f64>>,
    pub segments: usize,
    /// Closed tubes wrap around; open ones have a free ring at each end.
    pub closed: bool,
}

impl TubeMesh {
    pub fn ring_count(&self) -> usize {
        self.centers.len()
    }

    pub fn edge_count(&self) -> usize {
        let mut edges = std::collections::HashSet::new();
        for f in &self.faces {
            for k in 0..4 {
                let (a, b) = (f[k], f[(k + 1) % 4]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges.len()
    }

    /// `V − E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.faces.len() as i64
    }

    /// Vertices of ring `m`.
    pub fn ring(&self, m: usize) -> &[Vector3<f64>] {
        &self.vertices[m * self.segments..(m + 1) * self.segments]
    }
}

/// Smallest chord `‖r_i − r_j‖` over pairs more than `L/32` apart along the curve.
pub fn min_nonadjacent_chord(curve: &SampledCurve) -> (f64, usize, usize) {
    let pos = curve.positions();
    let n = pos.len();
    // pairs sitting exactly at L/32 count as adjacent, whatever the rounding
    let near = curve.length() / 32.0 * (1.0 + 1e-9);
    let mut best = (f64::INFINITY, 0, 0);
    for i in 0..n {
        for j in i + 1..n {
            if curve.arc_distance(i, j) <= near {
                continue;
            }
            let d = (pos[i] - pos[j]).norm();
            if d < best.0 {
                best = (d, i, j);
            }
        }
    }
    best
}

/// Smallest radius of curvature `1/k` and where it occurs.
pub fn min_curvature_radius(curve: &SampledCurve) -> (f64, usize) {
    (0..curve.len())
        .map(|i| (1.0 / curve.curvature(i), i))
        .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a })
}

/// Largest radius the guards in [`tube_mesh`] accept: half the shortest
/// non-adjacent chord, and the smallest radius of curvature.
pub fn max_tube_radius(curve: &SampledCurve) -> f64 {
    (0.5 * min_nonadjacent_chord(curve).0).min(min_curvature_radius(curve).0)
}

fn reflect(v: &Vector3<f64>, axis: &Vector3<f64>) -> Vector3<f64> {
    let c = axis.norm_squared();
    if c == 0.0 {
        return *v;
    }
    v - axis * (2.0 * axis.dot(v) / c)
}

/// One double-reflection step taking `normal` from `(x0, t0)` to `(x1, t1)`.
fn propagate(normal: &Vector3<f64>, x0: &Vector3<f64>, t0: &Vector3<f64>, x1: &Vector3<f64>, t1: &Vector3<f64>) -> Vector3<f64> {
    let v1 = x1 - x0;
    let r_l = reflect(normal, &v1);
    let t_l = reflect(t0, &v1);
    let v2 = t1 - t_l;
    let r = reflect(&r_l, &v2);
    (r - t1 * t1.dot(&r)).normalize()
}

fn ring_indices(n: usize, rings: usize) -> Vec<usize> {
    (0..rings).map(|m| m * n / rings).collect()
}

/// Closed tube of the given radius with `rings` cross-sections of `segments` vertices.
///
/// The radius must stay below half of every chord between points more than
/// `L/32` apart along the curve, and below every radius of curvature.
pub fn tube_mesh(curve: &SampledCurve, radius: f64, rings: usize, segments: usize) -> Result<TubeMesh, MeshError> {
    let gap = curve.closure_gap();
    if gap > CLOSURE_TOLERANCE {
        return Err(MeshError::NotClosed { gap });
    }
    build(curve, radius, rings, segments, true)
}

/// Tube over one period of a curve that need not close (bent families whose
/// field has a closure defect). One extra ring sits at `u₀ + period`.
pub fn open_tube_mesh(curve: &SampledCurve, radius: f64, rings: usize, segments: usize) -> Result<TubeMesh, MeshError> {
    build(curve, radius, rings, segments, false)
}

fn build(curve: &SampledCurve, radius: f64, rings: usize, segments: usize, closed: bool) -> Result<TubeMesh, MeshError> {
    let n = curve.len();
    if rings < 3 || rings > n || segments < 3 || !(radius.is_finite() && radius > 0.0) {
        return Err(MeshError::Resolution {
            rings,
            segments,
            samples: n,
        });
    }
    let (chord, i, j) = min_nonadjacent_chord(curve);
    if radius >= 0.5 * chord {
        return Err(MeshError::RadiusTooLarge {
            radius,
            limit: 0.5 * chord,
            i,
            j,
        });
    }
    let (rho, index) = min_curvature_radius(curve);
    if radius >= rho {
        return Err(MeshError::RadiusExceedsCurvature {
            radius,
            limit: rho,
            index,
        });
    }

    let idx = ring_indices(n, rings);
    let mut centers: Vec<Vector3<f64>> = idx.iter().map(|&i| curve.sample(i).position()).collect();
    let mut tangents: Vec<Vector3<f64>> = idx.iter().map(|&i| curve.frenet_frame(i).t).collect();
    let end = curve.end_jet();
    let end_center = end.value();
    let end_tangent = end.d(1).normalize();

    let mut frames = Vec::with_capacity(rings + 1);
    frames.push(curve.frenet_frame(idx[0]).n1);
    for m in 1..=rings {
        let (x1, t1) = if m < rings {
            (centers[m], tangents[m])
        } else if closed {
            (centers[0], tangents[0])
        } else {
            (end_center, end_tangent)
        };
        let next = propagate(&frames[m - 1], &centers[m - 1], &tangents[m - 1], &x1, &t1);
        frames.push(next);
    }

    if closed {
        // holonomy: angle from the starting normal to the transported one, about t₀
        let (a0, t0) = (frames[0], tangents[0]);
        let back = frames[rings];
        let angle = t0.dot(&a0.cross(&back)).atan2(a0.dot(&back));
        for (m, f) in frames.iter_mut().enumerate().take(rings) {
            let axis = Unit::new_normalize(tangents[m]);
            let rot = Rotation3::from_axis_angle(&axis, -angle * m as f64 / rings as f64);
            *f = rot * *f;
        }
        frames.truncate(rings);
    } else {
        centers.push(end_center);
        tangents.push(end_tangent);
    }

    let mut vertices = Vec::with_capacity(frames.len() * segments);
    let mut normals = Vec::with_capacity(frames.len() * segments);
    for ((c, t), a) in centers.iter().zip(&tangents).zip(&frames) {
        let a = (a - t * t.dot(a)).normalize();
        let b = t.cross(&a);
        for s in 0..segments {
            let theta = 2.0 * PI * s as f64 / segments as f64;
            let e = a * theta.cos() + b * theta.sin();
            vertices.push(c + e * radius);
            normals.push(e);
        }
    }

    let ring_count = centers.len();
    let spans = if closed { ring_count } else { ring_count - 1 };
    let mut faces = Vec::with_capacity(spans * segments);
    for m in 0..spans {
        let next = (m + 1) % ring_count;
        for s in 0..segments {
            let s1 = (s + 1) % segments;
            faces.push([m * segments + s, m * segments + s1, next * segments + s1, next * segments + s]);
        }
    }
    Ok(TubeMesh {
        vertices,
        normals,
        faces,
        centers,
        tangents,
        segments,
        closed,
    })
}

/// `x` with nine significant digits, in plain decimal notation.
pub fn format_significant(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.8}", if x == 0.0 { 0.0 } else { x });
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (8 - exponent).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.starts_with("-0") && s.trim_start_matches(['-', '0', '.']).is_empty() {
        s[1..].to_string()
    } else {
        s
    }
}

/// Writes `v`, `vn` and `f a//a b//b c//c d//d` lines, 1-based, LF endings.
pub fn export_obj<W: Write>(mesh: &TubeMesh, mut out: W) -> io::Result<()> {
    let mut line = String::new();
    for v in &mesh.vertices {
        line.clear();
        line.push_str(&format!(
            "v {} {} {}\n",
            format_significant(v.x),
            format_significant(v.y),
            format_significant(v.z)
        ));
        out.write_all(line.as_bytes())?;
    }
    for n in &mesh.normals {
        out.write_all(
            format!(
                "vn {} {} {}\n",
                format_significant(n.x),
                format_significant(n.y),
                format_significant(n.z)
            )
            .as_bytes(),
        )?;
    }
    for f in &mesh.faces {
        let [a, b, c, d] = f.map(|i| i + 1);
        out.write_all(format!("f {a}//{a} {b}//{b} {c}//{c} {d}//{d}\n").as_bytes())?;
    }
    out.flush()
}

/// Writes the OBJ to a temporary file next to `path` and renames it into place.
pub fn write_obj_file(mesh: &TubeMesh, path: &Path) -> Result<(), MeshError> {
    let tmp = temp_path(path);
    let result = (|| -> io::Result<()> {
        let file = fs::File::create(&tmp)?;
        let mut w = io::BufWriter::new(file);
        export_obj(mesh, &mut w)?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

fn temp_path(path: &Path) -> PathBuf {
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!(".{name}.{}.tmp", std::process::id()))
}

/// `<stem>_eps<value>.obj`, with the shortest decimal that round-trips `eps`.
pub fn family_file_name(stem: &str, eps: f64) -> String {
    format!("{stem}_eps{eps}.obj")
}

/// Contents of an OBJ file written by [`export_obj`].
#[derive(Debug, Clone, Default)]
pub struct ObjData {
    pub vertices: Vec<Vector3<f64>>,
    pub normals: Vec<Vector3<f64>>,
    /// Zero-based `(vertex, normal)` pairs per face corner.
    pub faces: Vec<Vec<(usize, usize)>>,
}

/// Reads `v`, `vn` and `f` lines; other statements are skipped.
pub fn parse_obj(text: &str) -> Result<ObjData, MeshError> {
    let mut data = ObjData::default();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let err = |message: String| MeshError::Obj { line, message };
        let mut parts = raw.split_whitespace();
        let Some(tag) = parts.next() else { continue };
        match tag {
            "v" | "vn" => {
                let nums: Vec<f64> = parts
                    .map(|p| p.parse::<f64>().map_err(|e| err(format!("`{p}`: {e}"))))
                    .collect::<Result<_, _>>()?;
                if nums.len() != 3 {
                    return Err(err(format!("expected 3 coordinates, found {}", nums.len())));
                }
                let v = Vector3::new(nums[0], nums[1], nums[2]);
                if tag == "v" {
                    data.vertices.push(v);
                } else {
                    data.normals.push(v);
                }
            }
            "f" => {
                let mut corners = Vec::new();
                for p in parts {
                    let (a, b) = p.split_once("//").ok_or_else(|| err(format!("expected v//vn, found `{p}`")))?;
                    let parse = |s: &str| {
                        s.parse::<usize>()
                            .ok()
                            .filter(|i| *i > 0)
                            .ok_or_else(|| err(format!("bad index `{s}`")))
                    };
                    corners.push((parse(a)? - 1, parse(b)? - 1));
                }
                if corners.len() < 3 {
                    return Err(err("face with fewer than 3 corners".into()));
                }
                data.faces.push(corners);
            }
            _ => {}
        }
    }
    Ok(data)
}
