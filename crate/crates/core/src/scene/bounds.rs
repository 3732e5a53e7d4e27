use serde::Serialize;

use crate::math::Vec3;

use super::geometry::Geometry;
use super::graph::{Actor, EntityRef, SceneGraph, SkeletalActor};
use super::pose::Pose6D;

/// Closed axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn from_points(points: impl IntoIterator<Item = Vec3>) -> Option<Aabb> {
        let mut it = points.into_iter();
        let first = it.next()?;
        Some(it.fold(Aabb { min: first, max: first }, |b, p| Aabb {
            min: b.min.min(p),
            max: b.max.max(p),
        }))
    }

    pub fn union(&self, o: &Aabb) -> Aabb {
        Aabb {
            min: self.min.min(o.min),
            max: self.max.max(o.max),
        }
    }

    /// Touching faces count as intersecting.
    pub fn intersects(&self, o: &Aabb) -> bool {
        (0..3).all(|i| self.min[i] <= o.max[i] && o.min[i] <= self.max[i])
    }

    pub fn contains(&self, p: Vec3, tol: f64) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] - tol && p[i] <= self.max[i] + tol)
    }

    /// Corner `i` takes the max on x when bit 2 is set, on y for bit 1, on
    /// z for bit 0: index 0 is (min,min,min), 7 is (max,max,max).
    pub fn corners(&self) -> [Vec3; 8] {
        std::array::from_fn(|i| {
            Vec3::new(
                if i & 4 != 0 { self.max.x } else { self.min.x },
                if i & 2 != 0 { self.max.y } else { self.min.y },
                if i & 1 != 0 { self.max.z } else { self.min.z },
            )
        })
    }
}

/// World-space bounds of `geometry` placed at `pose`.
pub fn geometry_world_aabb(geometry: &Geometry, pose: &Pose6D) -> Aabb {
    match geometry {
        Geometry::Sphere { radius } => {
            let l = pose.linear();
            let extent = Vec3::new(
                row_norm(l.rows[0]) * radius,
                row_norm(l.rows[1]) * radius,
                row_norm(l.rows[2]) * radius,
            );
            let c = pose.location();
            Aabb {
                min: c - extent,
                max: c + extent,
            }
        }
        Geometry::Box { .. } | Geometry::Plane { .. } => {
            let (lo, hi) = geometry.local_bounds();
            let local = Aabb { min: lo, max: hi };
            Aabb::from_points(local.corners().map(|p| pose.transform_point(p)))
                .expect("eight corners")
        }
        Geometry::Mesh(mesh) => {
            let used = mesh.triangles.iter().flatten().map(|&i| mesh.positions[i as usize]);
            Aabb::from_points(used.map(|p| pose.transform_point(p))).expect("non-empty mesh")
        }
    }
}

fn row_norm(r: [f64; 3]) -> f64 {
    (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt()
}

impl Actor {
    pub fn world_aabb(&self) -> Aabb {
        geometry_world_aabb(&self.geometry, &self.pose)
    }

    pub fn oriented_bbox(&self) -> OrientedBox {
        let (lo, hi) = self.geometry.local_bounds();
        OrientedBox::from_local(&Aabb { min: lo, max: hi }, &self.pose)
    }
}

impl SkeletalActor {
    /// Union of all attached segments. `None` when no joint carries geometry.
    pub fn world_aabb(&self) -> Option<Aabb> {
        self.joint_world_poses()
            .iter()
            .zip(&self.joints)
            .filter_map(|((_, pose), joint)| {
                joint
                    .attachment
                    .as_ref()
                    .map(|(g, _)| geometry_world_aabb(g, pose))
            })
            .reduce(|a, b| a.union(&b))
    }

    /// Box aligned with the root frame that encloses every attached segment.
    pub fn oriented_bbox(&self) -> Option<OrientedBox> {
        let world = self.joint_world_poses();
        let points = world.iter().zip(&self.joints).flat_map(|((_, pose), joint)| {
            let corners = joint.attachment.as_ref().map(|(g, _)| {
                let (lo, hi) = g.local_bounds();
                Aabb { min: lo, max: hi }
                    .corners()
                    .map(|c| self.pose.inverse_transform_point(pose.transform_point(c)))
            });
            corners.into_iter().flatten()
        });
        let local = Aabb::from_points(points)?;
        Some(OrientedBox::from_local(&local, &self.pose))
    }
}

/// Eight world-space corners (ordered as [`Aabb::corners`]) and their mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrientedBox {
    pub corners: [Vec3; 8],
    pub centroid: Vec3,
}

impl OrientedBox {
    pub fn from_local(local: &Aabb, pose: &Pose6D) -> OrientedBox {
        let corners = local.corners().map(|c| pose.transform_point(c));
        let sum = corners.iter().fold(Vec3::ZERO, |acc, c| acc + *c);
        OrientedBox {
            corners,
            centroid: sum / 8.0,
        }
    }
}

pub fn world_aabb(scene: &SceneGraph, entity: EntityRef) -> Option<Aabb> {
    match entity {
        EntityRef::Actor(i) => Some(scene.actors()[i].world_aabb()),
        EntityRef::Skeleton(i) => scene.skeletons()[i].world_aabb(),
        EntityRef::Camera(_) => None,
    }
}

pub fn oriented_bbox_3d(scene: &SceneGraph, entity: EntityRef) -> Option<OrientedBox> {
    match entity {
        EntityRef::Actor(i) => Some(scene.actors()[i].oriented_bbox()),
        EntityRef::Skeleton(i) => scene.skeletons()[i].oriented_bbox(),
        EntityRef::Camera(_) => None,
    }
}
