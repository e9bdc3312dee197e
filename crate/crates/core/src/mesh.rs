//! Simplicial tessellations of the unit sphere.
//!
//! A [`SurfaceSimplex`] is a `(d-1)`-simplex embedded in `R^d`: `d` vertices of
//! dimension `d`. Sphere meshes keep every vertex on the unit sphere, and each
//! flat simplex stands for the geodesic patch obtained by projecting it
//! radially onto the sphere.

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Barycentric coordinates at or above this value count as inside.
pub const CONTAINMENT_TOL: f64 = 1e-12;
/// Two vertices closer than this are the same vertex.
pub const VERTEX_TOL: f64 = 1e-10;
/// Relative (d-1)-volume below which a simplex is degenerate.
pub const DEGENERATE_VOLUME_TOL: f64 = 1e-14;
/// Hyperplane offsets below this (relative to the vertex scale) make the
/// radial projection of a simplex collapse onto a great sphere.
pub const DEGENERATE_OFFSET_TOL: f64 = 1e-12;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn midpoint_on_sphere(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let m: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
    let n = norm(&m);
    if n < VERTEX_TOL {
        None
    } else {
        Some(m.iter().map(|x| x / n).collect())
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Volume of the simplex spanned by `vertices` inside its own affine hull.
///
/// Works for any number of vertices `m + 1` in any ambient dimension; the
/// result is the `m`-dimensional volume `sqrt(det(E^T E)) / m!`.
pub fn simplex_volume(vertices: &[Vec<f64>]) -> f64 {
    let m = vertices.len().saturating_sub(1);
    if m == 0 {
        return 0.0;
    }
    let base = &vertices[0];
    let edges: Vec<Vec<f64>> = vertices[1..]
        .iter()
        .map(|v| v.iter().zip(base).map(|(x, y)| x - y).collect())
        .collect();
    let gram = DMatrix::from_fn(m, m, |i, j| dot(&edges[i], &edges[j]));
    gram.determinant().max(0.0).sqrt() / factorial(m)
}

/// A `(d-1)`-simplex with `d` vertices in `R^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSimplex {
    vertices: Vec<Vec<f64>>,
}

impl AsRef<[Vec<f64>]> for SurfaceSimplex {
    fn as_ref(&self) -> &[Vec<f64>] {
        &self.vertices
    }
}

impl SurfaceSimplex {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let d = vertices.len();
        if d < 2 {
            return invalid(format!("a surface simplex needs at least 2 vertices, got {d}"));
        }
        if let Some(v) = vertices.iter().find(|v| v.len() != d) {
            return invalid(format!(
                "vertex has dimension {} but the simplex has {d} vertices",
                v.len()
            ));
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return invalid("vertex coordinates must be finite");
        }
        Ok(SurfaceSimplex { vertices })
    }

    pub fn dim(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Vec<f64>> {
        self.vertices
    }

    /// The `(d-1)`-dimensional volume of the flat simplex.
    pub fn volume(&self) -> f64 {
        simplex_volume(&self.vertices)
    }

    pub fn centroid(&self) -> Vec<f64> {
        let d = self.dim();
        let mut c = vec![0.0; d];
        for v in &self.vertices {
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += vi;
            }
        }
        c.iter_mut().for_each(|x| *x /= d as f64);
        c
    }

    /// Indices and length of the longest edge. Ties go to the first pair in
    /// lexicographic order.
    pub fn longest_edge(&self) -> (usize, usize, f64) {
        let d = self.dim();
        let mut best = (0, 1, -1.0);
        for i in 0..d {
            for j in (i + 1)..d {
                let l = dist(&self.vertices[i], &self.vertices[j]);
                if l > best.2 {
                    best = (i, j, l);
                }
            }
        }
        best
    }

    fn vertex_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| self.vertices[i][j])
    }

    /// Unit normal `n` and offset `h > 0` of the hyperplane `{x : n.x = h}`
    /// through the vertices, or `None` when that hyperplane contains the origin.
    pub fn hyperplane(&self) -> Option<(Vec<f64>, f64)> {
        let d = self.dim();
        let w = self.vertex_matrix().lu().solve(&DVector::from_element(d, 1.0))?;
        let wn = w.norm();
        if !wn.is_finite() || wn == 0.0 {
            return None;
        }
        let n = w.iter().map(|x| x / wn).collect();
        Some((n, 1.0 / wn))
    }

    /// True when the flat simplex has (relatively) negligible volume or its
    /// radial projection onto the sphere has empty interior.
    pub fn is_degenerate(&self) -> bool {
        let d = self.dim();
        let (_, _, longest) = self.longest_edge();
        if longest <= 0.0 {
            return true;
        }
        if self.volume() < DEGENERATE_VOLUME_TOL * longest.powi(d as i32 - 1) {
            return true;
        }
        let scale = self.vertices.iter().map(|v| norm(v)).fold(0.0, f64::max);
        match self.hyperplane() {
            Some((_, h)) => h < DEGENERATE_OFFSET_TOL * scale,
            None => true,
        }
    }

    /// Barycentric coordinates of the point where the ray from the origin
    /// through `p` meets the simplex's hyperplane. `None` if the ray is
    /// parallel to the hyperplane or points away from it.
    pub fn ray_barycentric(&self, p: &[f64]) -> Result<Option<Vec<f64>>> {
        let d = self.dim();
        if p.len() != d {
            return invalid(format!("point has dimension {}, expected {d}", p.len()));
        }
        if self.is_degenerate() {
            return Err(Error::DegenerateGeometry(
                "containment test on a degenerate simplex".into(),
            ));
        }
        let rhs = DVector::from_column_slice(p);
        let lambda = self
            .vertex_matrix()
            .transpose()
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::DegenerateGeometry("singular vertex matrix".into()))?;
        let sum: f64 = lambda.iter().sum();
        if sum <= 0.0 || !sum.is_finite() {
            return Ok(None);
        }
        Ok(Some(lambda.iter().map(|l| l / sum).collect()))
    }
}

/// True iff the ray from the origin through `p` meets the flat simplex,
/// boundary included (tolerance [`CONTAINMENT_TOL`]).
pub fn radial_containment(simplex: &SurfaceSimplex, p: &[f64]) -> Result<bool> {
    Ok(simplex
        .ray_barycentric(p)?
        .is_some_and(|b| b.iter().all(|&l| l >= -CONTAINMENT_TOL)))
}

/// A list of surface simplices sharing one ambient dimension, with a group
/// label per simplex (the octant it descends from).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    dim: usize,
    simplices: Vec<SurfaceSimplex>,
    groups: Vec<usize>,
    degenerate_dropped: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Obj,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "obj" => Ok(ExportFormat::Obj),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

impl SurfaceMesh {
    pub fn new(dim: usize, simplices: Vec<SurfaceSimplex>, groups: Option<Vec<usize>>) -> Result<Self> {
        if simplices.is_empty() {
            return invalid("mesh must contain at least one simplex");
        }
        if let Some(s) = simplices.iter().find(|s| s.dim() != dim) {
            return invalid(format!("simplex of dimension {} in a mesh of dimension {dim}", s.dim()));
        }
        let groups = groups.unwrap_or_else(|| vec![0; simplices.len()]);
        if groups.len() != simplices.len() {
            return invalid("group labels must match the simplex count");
        }
        Ok(SurfaceMesh { dim, simplices, groups, degenerate_dropped: 0 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplices(&self) -> &[SurfaceSimplex] {
        &self.simplices
    }

    pub fn groups(&self) -> &[usize] {
        &self.groups
    }

    /// Number of degenerate simplices discarded while building this mesh.
    pub fn degenerate_dropped(&self) -> usize {
        self.degenerate_dropped
    }

    /// Sum of flat `(d-1)`-volumes.
    pub fn total_volume(&self) -> f64 {
        self.simplices.iter().map(SurfaceSimplex::volume).sum()
    }

    /// Applies `levels` rounds of the subdivision used by [`unit_sphere_mesh`],
    /// with new vertices re-projected to the unit sphere.
    pub fn subdivided(&self, levels: u32) -> SurfaceMesh {
        let mut simplices = self.simplices.clone();
        let mut groups = self.groups.clone();
        for _ in 0..levels {
            let mut next = Vec::with_capacity(simplices.len() * 4);
            let mut next_groups = Vec::with_capacity(simplices.len() * 4);
            for (s, g) in simplices.iter().zip(&groups) {
                for child in subdivide_once(s) {
                    next.push(child);
                    next_groups.push(*g);
                }
            }
            simplices = next;
            groups = next_groups;
        }
        SurfaceMesh { dim: self.dim, simplices, groups, degenerate_dropped: self.degenerate_dropped }
    }

    pub fn export(&self, format: ExportFormat) -> Result<Vec<u8>> {
        export_simplices(self.dim, &self.simplices, format)
    }
}

/// Splits a sphere simplex along its longest edge; the edge midpoint is
/// re-projected to the unit sphere. Returns `None` when the midpoint is at
/// the origin.
pub fn bisect_longest_edge(s: &SurfaceSimplex) -> Option<[SurfaceSimplex; 2]> {
    let (i, j, _) = s.longest_edge();
    let m = midpoint_on_sphere(&s.vertices[i], &s.vertices[j])?;
    let mut a = s.vertices.clone();
    let mut b = s.vertices.clone();
    a[j] = m.clone();
    b[i] = m;
    Some([SurfaceSimplex { vertices: a }, SurfaceSimplex { vertices: b }])
}

fn subdivide_once(s: &SurfaceSimplex) -> Vec<SurfaceSimplex> {
    let v = &s.vertices;
    match s.dim() {
        2 => {
            let m = midpoint_on_sphere(&v[0], &v[1]).expect("antipodal arc endpoints");
            vec![
                SurfaceSimplex { vertices: vec![v[0].clone(), m.clone()] },
                SurfaceSimplex { vertices: vec![m, v[1].clone()] },
            ]
        }
        3 => {
            let ab = midpoint_on_sphere(&v[0], &v[1]).expect("antipodal edge");
            let bc = midpoint_on_sphere(&v[1], &v[2]).expect("antipodal edge");
            let ca = midpoint_on_sphere(&v[2], &v[0]).expect("antipodal edge");
            vec![
                SurfaceSimplex { vertices: vec![v[0].clone(), ab.clone(), ca.clone()] },
                SurfaceSimplex { vertices: vec![ab.clone(), v[1].clone(), bc.clone()] },
                SurfaceSimplex { vertices: vec![ca.clone(), bc.clone(), v[2].clone()] },
                SurfaceSimplex { vertices: vec![ab, bc, ca] },
            ]
        }
        d => {
            // d - 1 longest-edge passes per level: 2^(d-1) children, the same
            // growth factor as the midpoint schemes for d = 2, 3.
            let mut current = vec![s.clone()];
            for _ in 0..(d - 1) {
                current = current
                    .iter()
                    .flat_map(|c| bisect_longest_edge(c).expect("antipodal edge"))
                    .collect();
            }
            current
        }
    }
}

/// Tessellates the unit sphere in `R^d`.
///
/// Starts from the `2^d` orthant simplices with vertices `±e_1, ..., ±e_d`
/// and subdivides each `k` times. For `d = 2` arcs are halved, for `d = 3`
/// triangles are split in four at the re-projected edge midpoints, and for
/// `d > 3` each level applies `d - 1` rounds of longest-edge bisection.
/// The simplex count is `2^d * 2^(k (d-1))` in every dimension.
pub fn unit_sphere_mesh(d: usize, k: u32) -> Result<SurfaceMesh> {
    if d < 2 {
        return invalid(format!("dimension must be at least 2, got {d}"));
    }
    if d >= usize::BITS as usize - 1 {
        return invalid(format!("dimension {d} is too large"));
    }
    let mut simplices = Vec::with_capacity(1 << d);
    let mut groups = Vec::with_capacity(1 << d);
    for mask in 0..(1usize << d) {
        let vertices = (0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = if mask >> i & 1 == 1 { -1.0 } else { 1.0 };
                e
            })
            .collect();
        simplices.push(SurfaceSimplex { vertices });
        groups.push(mask);
    }
    let base = SurfaceMesh { dim: d, simplices, groups, degenerate_dropped: 0 };
    Ok(base.subdivided(k))
}

/// Inserts the unit vector `p` into the mesh.
///
/// Every simplex whose radial projection contains `p` (boundary included) is
/// replaced by the simplices joining `p` to each of its facets; degenerate
/// pieces are dropped and counted. If `p` already is a vertex the mesh is
/// returned unchanged.
pub fn refine_at_point(mesh: &SurfaceMesh, p: &[f64]) -> Result<SurfaceMesh> {
    let d = mesh.dim;
    if p.len() != d {
        return invalid(format!("point has dimension {}, mesh has {d}", p.len()));
    }
    if p.iter().any(|x| !x.is_finite()) || (norm(p) - 1.0).abs() > 1e-8 {
        return invalid(format!("refinement point {p:?} is not a unit vector"));
    }
    let is_vertex = mesh
        .simplices
        .iter()
        .flat_map(|s| s.vertices.iter())
        .any(|v| dist(v, p) < VERTEX_TOL);
    if is_vertex {
        return Ok(mesh.clone());
    }
    let mut simplices = Vec::with_capacity(mesh.len() + 2 * d);
    let mut groups = Vec::with_capacity(mesh.len() + 2 * d);
    let mut dropped = mesh.degenerate_dropped;
    for (s, &g) in mesh.simplices.iter().zip(&mesh.groups) {
        if !radial_containment(s, p)? {
            simplices.push(s.clone());
            groups.push(g);
            continue;
        }
        for i in 0..d {
            let mut vertices = s.vertices.clone();
            vertices[i] = p.to_vec();
            let child = SurfaceSimplex { vertices };
            if child.is_degenerate() {
                dropped += 1;
            } else {
                simplices.push(child);
                groups.push(g);
            }
        }
    }
    if simplices.is_empty() {
        return Err(Error::DegenerateGeometry("refinement removed every simplex".into()));
    }
    Ok(SurfaceMesh { dim: d, simplices, groups, degenerate_dropped: dropped })
}

/// Formats a float with 17 significant digits, `inf`/`-inf` for infinities.
pub fn format_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// Exports simplices as CSV (one row per simplex vertex) or, for `d = 3`,
/// as a Wavefront OBJ triangle mesh with shared vertices.
pub fn export_simplices<S: AsRef<[Vec<f64>]>>(dim: usize, simplices: &[S], format: ExportFormat) -> Result<Vec<u8>> {
    let mut out = String::new();
    match format {
        ExportFormat::Csv => {
            out.push_str("simplex_index,vertex_index");
            for i in 1..=dim {
                write!(out, ",x{i}").unwrap();
            }
            out.push('\n');
            for (si, s) in simplices.iter().enumerate() {
                for (vi, v) in s.as_ref().iter().enumerate() {
                    write!(out, "{si},{vi}").unwrap();
                    for x in v {
                        write!(out, ",{}", format_f64(*x)).unwrap();
                    }
                    out.push('\n');
                }
            }
        }
        ExportFormat::Obj => {
            if dim != 3 {
                return Err(Error::UnsupportedFormat(format!(
                    "obj export needs a triangle mesh in 3 dimensions, mesh has dimension {dim}"
                )));
            }
            let mut index = VertexIndex::default();
            let mut faces = Vec::with_capacity(simplices.len());
            for s in simplices {
                let vs = s.as_ref();
                if vs.len() != 3 {
                    return Err(Error::UnsupportedFormat("obj faces must be triangles".into()));
                }
                faces.push([index.insert(&vs[0]), index.insert(&vs[1]), index.insert(&vs[2])]);
            }
            out.push_str("# generalized spherical contour tessellation\n");
            for v in &index.vertices {
                writeln!(out, "v {} {} {}", format_f64(v[0]), format_f64(v[1]), format_f64(v[2])).unwrap();
            }
            for f in &faces {
                writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).unwrap();
            }
        }
    }
    Ok(out.into_bytes())
}

/// Parses the CSV layout written by [`export_simplices`] into general simplices
/// (any number of vertices per simplex, all of the same dimension).
pub fn parse_simplices_csv(text: &str) -> Result<Vec<Vec<Vec<f64>>>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::InvalidArgument("empty mesh file".into()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    if columns.len() < 3 || columns[0] != "simplex_index" || columns[1] != "vertex_index" {
        return invalid("mesh csv header must start with simplex_index,vertex_index");
    }
    let dim = columns.len() - 2;
    let mut simplices: Vec<Vec<Vec<f64>>> = Vec::new();
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != dim + 2 {
            return invalid(format!("line {}: expected {} fields, got {}", lineno + 1, dim + 2, fields.len()));
        }
        let parse_idx = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("line {}: bad index {s:?}", lineno + 1)))
        };
        let si = parse_idx(fields[0])?;
        let vi = parse_idx(fields[1])?;
        let coords = fields[2..]
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::InvalidArgument(format!("line {}: bad coordinate {s:?}", lineno + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if si == simplices.len() {
            simplices.push(Vec::new());
        } else if si + 1 != simplices.len() {
            return invalid(format!("line {}: simplex indices must be consecutive", lineno + 1));
        }
        let current = simplices.last_mut().unwrap();
        if vi != current.len() {
            return invalid(format!("line {}: vertex indices must be consecutive", lineno + 1));
        }
        current.push(coords);
    }
    if simplices.is_empty() {
        return invalid("mesh csv has no simplices");
    }
    let nverts = simplices[0].len();
    if simplices.iter().any(|s| s.len() != nverts) {
        return invalid("all simplices must have the same number of vertices");
    }
    Ok(simplices)
}

/// Deduplicates vertices on a grid of spacing [`VERTEX_TOL`].
#[derive(Default)]
pub(crate) struct VertexIndex {
    lookup: HashMap<Vec<i64>, usize>,
    pub(crate) vertices: Vec<Vec<f64>>,
}

impl VertexIndex {
    pub(crate) fn insert(&mut self, v: &[f64]) -> usize {
        let key: Vec<i64> = v.iter().map(|x| (x / VERTEX_TOL).round() as i64).collect();
        *self.lookup.entry(key).or_insert_with(|| {
            self.vertices.push(v.to_vec());
            self.vertices.len() - 1
        })
    }
}
