use std::sync::Arc;

use thiserror::Error;

use crate::math::Vec3;

/// Triangle mesh in actor-local coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct TriMesh {
    pub positions: Vec<Vec3>,
    /// Per-vertex normals, either empty or one per position.
    pub normals: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
    bounds: (Vec3, Vec3),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("mesh has no triangles")]
    Empty,
    #[error("triangle {tri} references vertex {index} but mesh has {count} vertices")]
    IndexOutOfRange { tri: usize, index: u32, count: usize },
    #[error("normal count {normals} does not match vertex count {positions}")]
    NormalCount { normals: usize, positions: usize },
    #[error("mesh contains a non-finite coordinate")]
    NonFinite,
    #[error("obj line {line}: {msg}")]
    Obj { line: usize, msg: String },
}

impl TriMesh {
    pub fn new(
        positions: Vec<Vec3>,
        normals: Vec<Vec3>,
        triangles: Vec<[u32; 3]>,
    ) -> Result<Self, MeshError> {
        if triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        if !normals.is_empty() && normals.len() != positions.len() {
            return Err(MeshError::NormalCount {
                normals: normals.len(),
                positions: positions.len(),
            });
        }
        if !positions.iter().chain(&normals).all(|v| v.is_finite()) {
            return Err(MeshError::NonFinite);
        }
        for (tri, idx) in triangles.iter().enumerate() {
            if let Some(&index) = idx.iter().find(|&&i| i as usize >= positions.len()) {
                return Err(MeshError::IndexOutOfRange {
                    tri,
                    index,
                    count: positions.len(),
                });
            }
        }
        let normals = normals.into_iter().map(Vec3::normalized).collect();
        let mut lo = Vec3::splat(f64::INFINITY);
        let mut hi = Vec3::splat(f64::NEG_INFINITY);
        for &i in triangles.iter().flatten() {
            let p = positions[i as usize];
            lo = lo.min(p);
            hi = hi.max(p);
        }
        Ok(TriMesh {
            positions,
            normals,
            triangles,
            bounds: (lo, hi),
        })
    }

    /// Local-space bounds over referenced vertices.
    pub fn bounds(&self) -> (Vec3, Vec3) {
        self.bounds
    }

    pub fn triangle(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [
            self.positions[a as usize],
            self.positions[b as usize],
            self.positions[c as usize],
        ]
    }

    /// Parses positions (`v`), normals (`vn`) and faces (`f`) from a
    /// Wavefront OBJ document. Polygons are fan-triangulated. When faces
    /// reference normals, they are re-indexed to match positions; a vertex
    /// used with two different normals keeps the first.
    pub fn from_obj(text: &str) -> Result<Self, MeshError> {
        let mut positions = Vec::new();
        let mut obj_normals = Vec::new();
        let mut corner_normals: Vec<Option<usize>> = Vec::new();
        let mut triangles = Vec::new();
        let mut any_normal_ref = false;

        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let err = |msg: String| MeshError::Obj { line: line_no, msg };
            let line = line.split('#').next().unwrap_or("").trim();
            let mut parts = line.split_whitespace();
            let Some(tag) = parts.next() else { continue };
            match tag {
                "v" | "vn" => {
                    let coords: Vec<f64> = parts
                        .take(3)
                        .map(|s| s.parse::<f64>().map_err(|e| err(format!("{s:?}: {e}"))))
                        .collect::<Result<_, _>>()?;
                    if coords.len() != 3 {
                        return Err(err(format!("`{tag}` needs 3 coordinates")));
                    }
                    let v = Vec3::new(coords[0], coords[1], coords[2]);
                    if tag == "v" {
                        positions.push(v);
                        corner_normals.push(None);
                    } else {
                        obj_normals.push(v);
                    }
                }
                "f" => {
                    let mut face = Vec::new();
                    for corner in parts {
                        let mut refs = corner.split('/');
                        let vi = resolve_index(refs.next().unwrap_or(""), positions.len())
                            .map_err(&err)?;
                        let ni = match refs.nth(1) {
                            Some(s) if !s.is_empty() => {
                                Some(resolve_index(s, obj_normals.len()).map_err(&err)?)
                            }
                            _ => None,
                        };
                        if let Some(ni) = ni {
                            any_normal_ref = true;
                            corner_normals[vi].get_or_insert(ni);
                        }
                        face.push(vi as u32);
                    }
                    if face.len() < 3 {
                        return Err(err("face needs at least 3 vertices".into()));
                    }
                    for k in 1..face.len() - 1 {
                        triangles.push([face[0], face[k], face[k + 1]]);
                    }
                }
                _ => {}
            }
        }

        let normals = if any_normal_ref {
            corner_normals
                .iter()
                .map(|n| n.map(|i| obj_normals[i]).unwrap_or(Vec3::ZERO))
                .collect()
        } else {
            Vec::new()
        };
        TriMesh::new(positions, normals, triangles)
    }
}

fn resolve_index(s: &str, count: usize) -> Result<usize, String> {
    let i: i64 = s.parse().map_err(|_| format!("bad index {s:?}"))?;
    let resolved = if i > 0 {
        i - 1
    } else if i < 0 {
        count as i64 + i
    } else {
        -1
    };
    if resolved < 0 || resolved as usize >= count {
        return Err(format!("index {i} out of range ({count} defined)"));
    }
    Ok(resolved as usize)
}

/// Shape of an actor or of a joint's attached segment, in local space.
#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    Sphere { radius: f64 },
    /// Axis-aligned box centered on the origin.
    Box { half_extents: Vec3 },
    /// Rectangle in the local XY plane, normal +Z.
    Plane { half_extents: [f64; 2] },
    Mesh(Arc<TriMesh>),
}

impl Geometry {
    pub fn kind(&self) -> &'static str {
        match self {
            Geometry::Sphere { .. } => "sphere",
            Geometry::Box { .. } => "box",
            Geometry::Plane { .. } => "plane",
            Geometry::Mesh(_) => "mesh",
        }
    }

    /// Local-space axis-aligned bounds.
    pub fn local_bounds(&self) -> (Vec3, Vec3) {
        match self {
            Geometry::Sphere { radius } => (Vec3::splat(-radius), Vec3::splat(*radius)),
            Geometry::Box { half_extents } => (-*half_extents, *half_extents),
            Geometry::Plane { half_extents: [hx, hy] } => {
                (Vec3::new(-hx, -hy, 0.0), Vec3::new(*hx, *hy, 0.0))
            }
            Geometry::Mesh(mesh) => mesh.bounds(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Albedo {
    Constant([f64; 3]),
    /// Alternating cells of `cell` meters, measured in the actor's unrotated,
    /// scaled local frame.
    Checker {
        even: [f64; 3],
        odd: [f64; 3],
        cell: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Material {
    pub albedo: Albedo,
    pub ambient: f64,
}

impl Default for Material {
    fn default() -> Self {
        Material {
            albedo: Albedo::Constant([0.8, 0.8, 0.8]),
            ambient: 0.1,
        }
    }
}

impl Material {
    pub fn constant(rgb: [f64; 3], ambient: f64) -> Self {
        Material {
            albedo: Albedo::Constant(rgb),
            ambient,
        }
    }

    pub fn is_valid(&self) -> bool {
        let in_unit = |c: &[f64; 3]| c.iter().all(|v| (0.0..=1.0).contains(v));
        let albedo_ok = match &self.albedo {
            Albedo::Constant(c) => in_unit(c),
            Albedo::Checker { even, odd, cell } => {
                in_unit(even) && in_unit(odd) && *cell > 0.0 && cell.is_finite()
            }
        };
        albedo_ok && (0.0..=1.0).contains(&self.ambient)
    }

    /// Albedo at a point given in metric local coordinates.
    pub fn albedo_at(&self, metric_local: Vec3) -> [f64; 3] {
        match self.albedo {
            Albedo::Constant(c) => c,
            Albedo::Checker { even, odd, cell } => {
                // Bias keeps surfaces lying exactly on a cell boundary on one side.
                let idx = |v: f64| (v / cell + 1e-7).floor() as i64;
                let parity = idx(metric_local.x) + idx(metric_local.y) + idx(metric_local.z);
                if parity.rem_euclid(2) == 0 {
                    even
                } else {
                    odd
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LightKind {
    Point {
        position: Vec3,
        /// `k` in `1 / (1 + k·d²)`.
        attenuation: f64,
    },
    /// `direction` is the unit direction the light travels in.
    Directional { direction: Vec3 },
}

/// White light with scalar intensity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Light {
    pub kind: LightKind,
    pub intensity: f64,
    pub casts_shadows: bool,
}
