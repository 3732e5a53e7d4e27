//! # synthgt
//!
//! Headless generator of pixel-exact synthetic ground truth. A scripted 3D
//! scene is ray cast into lit RGB, albedo, shading, planar depth, world
//! normals and instance masks; sequences are recorded as pose logs and
//! replayed bit-identically; a line-based TCP server exposes the scene to
//! external clients.
//!
//! Coordinates are right-handed with +Z up and +X forward, in meters.
//! Rotations are (pitch, yaw, roll) in degrees, applied yaw first.
//!
//! - [`scene`]: scene graph, poses, skeletons, bounds, scene file loader.
//! - [`render`]: CPU ray caster and per-modality image planes.
//! - [`capture`]: per-camera capture sets, PNG/PFM encoding, masks, shading.
//! - [`sequence`]: record, rebuild and acquire over JSON Lines pose logs.
//! - [`protocol`]: the scene-control command server.

pub mod capture;
pub mod math;
pub mod protocol;
pub mod render;
pub mod scene;
pub mod sequence;

pub use math::Vec3;
