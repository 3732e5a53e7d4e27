//! Immutable render snapshot and nearest-hit ray queries.

use crate::math::{Mat3, Vec3};
use crate::scene::{geometry_world_aabb, Aabb, Geometry, InstanceId, Light, Material, Pose6D, SceneGraph, TriMesh};

use super::camera::Ray;

/// Hits closer than this are ignored.
pub const T_MIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HitRecord {
    pub t: f64,
    pub point: Vec3,
    /// World-space unit normal facing the ray origin.
    pub normal: Vec3,
    pub instance_id: InstanceId,
    pub albedo: [f64; 3],
    pub ambient: f64,
}

/// One renderable piece of geometry with its placement precomputed.
#[derive(Clone, Debug)]
pub struct Primitive {
    pub instance_id: InstanceId,
    pub geometry: Geometry,
    pub material: Material,
    pub pose: Pose6D,
    pub bounds: Aabb,
    /// `diag(1/scale) · Rᵀ`: world direction to local direction.
    to_local: Mat3,
    /// `R · diag(1/scale)`: local normal to world normal (unnormalized).
    normal_to_world: Mat3,
}

impl Primitive {
    pub fn new(instance_id: InstanceId, geometry: Geometry, material: Material, pose: Pose6D) -> Self {
        let rt = pose.rotation_matrix().transpose();
        let inv_s = Vec3::ONE.div_elem(pose.scale());
        let mut to_local = rt;
        for (row, s) in to_local.rows.iter_mut().zip([inv_s.x, inv_s.y, inv_s.z]) {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        Primitive {
            instance_id,
            bounds: geometry_world_aabb(&geometry, &pose),
            normal_to_world: pose.rotation_matrix().scale_cols(inv_s),
            geometry,
            material,
            pose,
            to_local,
        }
    }

    /// Nearest hit with `t` in `(T_MIN, t_max)`.
    pub fn intersect(&self, ray: &Ray, t_max: f64) -> Option<HitRecord> {
        if !ray_hits_aabb(ray, &self.bounds, t_max) {
            return None;
        }
        let o = self.to_local.mul_vec(ray.origin - self.pose.location());
        let d = self.to_local.mul_vec(ray.direction);
        let (t, local_normal) = match &self.geometry {
            Geometry::Sphere { radius } => hit_sphere(o, d, *radius, t_max)?,
            Geometry::Box { half_extents } => hit_box(o, d, *half_extents, t_max)?,
            Geometry::Plane { half_extents } => hit_plane(o, d, *half_extents, t_max)?,
            Geometry::Mesh(mesh) => hit_mesh(mesh, o, d, t_max)?,
        };
        let local_point = o + d * t;
        let mut normal = self.normal_to_world.mul_vec(local_normal).normalized();
        if normal.dot(ray.direction) > 0.0 {
            normal = -normal;
        }
        Some(HitRecord {
            t,
            point: ray.at(t),
            normal,
            instance_id: self.instance_id,
            albedo: self
                .material
                .albedo_at(local_point.mul_elem(self.pose.scale())),
            ambient: self.material.ambient,
        })
    }
}

/// Everything a render pass reads, detached from the mutable scene.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub primitives: Vec<Primitive>,
    pub lights: Vec<Light>,
    pub background: [f64; 3],
    /// Largest registered instance id (0 for an empty scene).
    pub max_instance_id: InstanceId,
}

impl Snapshot {
    /// Actors in registration order, then every attached skeletal segment
    /// placed at its joint's world pose.
    pub fn new(scene: &SceneGraph) -> Self {
        let mut primitives: Vec<Primitive> = scene
            .actors()
            .iter()
            .map(|a| Primitive::new(a.instance_id(), a.geometry.clone(), a.material, a.pose))
            .collect();
        for sk in scene.skeletons() {
            for ((_, pose), joint) in sk.joint_world_poses().into_iter().zip(&sk.joints) {
                if let Some((g, m)) = &joint.attachment {
                    primitives.push(Primitive::new(sk.instance_id(), g.clone(), *m, pose));
                }
            }
        }
        Snapshot {
            primitives,
            lights: scene.lights().to_vec(),
            background: scene.background(),
            max_instance_id: scene.max_instance_id(),
        }
    }

    /// Nearest intersection; on equal `t` the earlier primitive wins.
    pub fn trace(&self, ray: &Ray) -> Option<HitRecord> {
        let mut best: Option<HitRecord> = None;
        for prim in &self.primitives {
            let t_max = best.map_or(f64::INFINITY, |h| h.t);
            if let Some(hit) = prim.intersect(ray, t_max) {
                best = Some(hit);
            }
        }
        best
    }

    /// Whether anything lies along `ray` strictly before `t_max`.
    pub fn occluded(&self, ray: &Ray, t_max: f64) -> bool {
        self.primitives.iter().any(|p| p.intersect(ray, t_max).is_some())
    }
}

/// Free-function form of [`Snapshot::trace`].
pub fn trace(snapshot: &Snapshot, ray: &Ray) -> Option<HitRecord> {
    snapshot.trace(ray)
}

fn ray_hits_aabb(ray: &Ray, b: &Aabb, t_max: f64) -> bool {
    let mut lo = 0.0f64;
    let mut hi = t_max;
    for i in 0..3 {
        let o = ray.origin[i];
        let d = ray.direction[i];
        // Padding absorbs rounding in the bounds of thin or flat primitives.
        let pad = 1e-9 * (1.0 + b.min[i].abs().max(b.max[i].abs()));
        let (mn, mx) = (b.min[i] - pad, b.max[i] + pad);
        if d == 0.0 {
            if o < mn || o > mx {
                return false;
            }
            continue;
        }
        let (mut t0, mut t1) = ((mn - o) / d, (mx - o) / d);
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        lo = lo.max(t0);
        hi = hi.min(t1);
        if lo > hi {
            return false;
        }
    }
    true
}

fn accept(t: f64, t_max: f64) -> bool {
    t > T_MIN && t < t_max
}

fn hit_sphere(o: Vec3, d: Vec3, r: f64, t_max: f64) -> Option<(f64, Vec3)> {
    let a = d.dot(d);
    let half_b = o.dot(d);
    let c = o.dot(o) - r * r;
    let disc = half_b * half_b - a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // Stable pair of roots.
    let q = -(half_b + half_b.signum() * sq);
    let (mut t0, mut t1) = if q != 0.0 { (q / a, c / q) } else { (0.0, 0.0) };
    if t0 > t1 {
        std::mem::swap(&mut t0, &mut t1);
    }
    let t = if accept(t0, t_max) {
        t0
    } else if accept(t1, t_max) {
        t1
    } else {
        return None;
    };
    Some((t, (o + d * t) / r))
}

fn hit_box(o: Vec3, d: Vec3, h: Vec3, t_max: f64) -> Option<(f64, Vec3)> {
    let mut t_near = f64::NEG_INFINITY;
    let mut t_far = f64::INFINITY;
    let mut near_axis = 0;
    let mut far_axis = 0;
    for i in 0..3 {
        if d[i] == 0.0 {
            if o[i] < -h[i] || o[i] > h[i] {
                return None;
            }
            continue;
        }
        let (mut t0, mut t1) = ((-h[i] - o[i]) / d[i], (h[i] - o[i]) / d[i]);
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        if t0 > t_near {
            t_near = t0;
            near_axis = i;
        }
        if t1 < t_far {
            t_far = t1;
            far_axis = i;
        }
    }
    if t_near > t_far {
        return None;
    }
    let (t, axis) = if accept(t_near, t_max) {
        (t_near, near_axis)
    } else if accept(t_far, t_max) {
        (t_far, far_axis)
    } else {
        return None;
    };
    let mut n = [0.0; 3];
    n[axis] = 1.0;
    Some((t, n.into()))
}

fn hit_plane(o: Vec3, d: Vec3, [hx, hy]: [f64; 2], t_max: f64) -> Option<(f64, Vec3)> {
    if d.z == 0.0 {
        return None;
    }
    let t = -o.z / d.z;
    if !accept(t, t_max) {
        return None;
    }
    let p = o + d * t;
    if p.x.abs() > hx || p.y.abs() > hy {
        return None;
    }
    Some((t, Vec3::Z))
}

fn hit_mesh(mesh: &TriMesh, o: Vec3, d: Vec3, t_max: f64) -> Option<(f64, Vec3)> {
    let mut best: Option<(f64, Vec3)> = None;
    for (k, idx) in mesh.triangles.iter().enumerate() {
        let limit = best.map_or(t_max, |b| b.0);
        let [a, b, c] = mesh.triangle(k);
        let Some((t, u, v)) = moller_trumbore(o, d, a, b, c, limit) else {
            continue;
        };
        let n = if mesh.normals.is_empty() {
            (b - a).cross(c - a)
        } else {
            let [ia, ib, ic] = idx.map(|i| mesh.normals[i as usize]);
            ia * (1.0 - u - v) + ib * u + ic * v
        };
        best = Some((t, n));
    }
    best
}

/// Möller–Trumbore ray/triangle test. Returns `(t, u, v)` with barycentric
/// weights of `b` and `c`.
pub fn moller_trumbore(
    o: Vec3,
    d: Vec3,
    a: Vec3,
    b: Vec3,
    c: Vec3,
    t_max: f64,
) -> Option<(f64, f64, f64)> {
    let e1 = b - a;
    let e2 = c - a;
    let p = d.cross(e2);
    let det = e1.dot(p);
    if det.abs() < 1e-300 {
        return None;
    }
    let inv = 1.0 / det;
    let s = o - a;
    let u = s.dot(p) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(e1);
    let v = d.dot(q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = e2.dot(q) * inv;
    accept(t, t_max).then_some((t, u, v))
}
