//! Scene graph, poses, geometry and the scene file loader.

mod bounds;
mod geometry;
mod graph;
mod loader;
mod pose;

use thiserror::Error;

pub use bounds::{geometry_world_aabb, oriented_bbox_3d, world_aabb, Aabb, OrientedBox};
pub use geometry::{Albedo, Geometry, Light, LightKind, Material, MeshError, TriMesh};
pub use graph::{
    joint_world_poses, Actor, CameraDef, EntityKind, EntityRef, InstanceId, Joint, SceneGraph,
    SkeletalActor, MAX_IMAGE_DIM,
};
pub use loader::{load_scene, load_scene_file, load_scene_with_base};
pub use pose::{look_at_rotation, world_transform, Pose6D, PoseError, Rotator};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("{path}: {msg}")]
    Field { path: String, msg: String },
    #[error("{path}: scale components must be > 0, got {scale:?}")]
    InvalidScale { path: String, scale: [f64; 3] },
    #[error("{path}: unknown geometry kind {kind:?}")]
    UnknownGeometry { path: String, kind: String },
    #[error("{path}: {source}")]
    Mesh { path: String, source: MeshError },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("invalid name {0:?}: names must be non-empty and contain no whitespace")]
    InvalidName(String),
    #[error("unknown entity {0:?}")]
    UnknownEntity(String),
    #[error("actor {0:?} is not movable")]
    NotMovable(String),
    #[error("invalid camera {0}")]
    InvalidCamera(String),
    #[error("invalid material on {0}")]
    InvalidMaterial(String),
    #[error("invalid geometry on {owner}: {msg}")]
    InvalidGeometry { owner: String, msg: String },
    #[error("invalid skeleton {0}")]
    InvalidSkeleton(String),
    #[error("invalid light: {0}")]
    InvalidLight(String),
    #[error("instance ids exhausted")]
    IdsExhausted,
}
