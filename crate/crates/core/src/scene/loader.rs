//! JSON scene description loader.
//!
//! ```json
//! {
//!   "background": [0.1, 0.1, 0.1],
//!   "actors": [{
//!     "name": "cube1", "class": "box", "movable": true,
//!     "pose": {"loc": [2, 0, 0.5], "rot": [0, 45, 0], "scale": [1, 1, 1]},
//!     "geometry": {"kind": "box", "half_extents": [0.5, 0.5, 0.5]},
//!     "material": {"albedo": [0.8, 0.2, 0.2], "ambient": 0.1}
//!   }],
//!   "skeletons": [{
//!     "name": "arm", "class": "robot", "pose": {...},
//!     "joints": [{"name": "base", "parent": -1, "pose": {...},
//!                 "geometry": {...}, "material": {...}}]
//!   }],
//!   "cameras": [{"name": "cam0", "pose": {...}, "hfov": 90,
//!                "width": 640, "height": 480, "stereo_baseline": 0.1}],
//!   "lights": [{"kind": "directional", "direction": [0, 0, -1], "intensity": 1, "shadows": true},
//!              {"kind": "point", "position": [0, 0, 3], "intensity": 5, "attenuation": 0.1}]
//! }
//! ```
//!
//! Geometry kinds: `sphere` (`radius`), `box` (`half_extents` xyz), `plane`
//! (`half_extents` xy, normal +Z), `mesh` (`obj_path` relative to the scene
//! file, or inline `positions` + `indices`). Checker albedo is written
//! `"checker": {"even": [..], "odd": [..], "cell": 0.25}`.
//!
//! Instance ids are assigned in file order, actors first, then skeletons.

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::math::Vec3;

use super::geometry::{Albedo, Geometry, Light, LightKind, Material, TriMesh};
use super::graph::{Actor, CameraDef, Joint, SceneGraph, SkeletalActor};
use super::pose::{Pose6D, PoseError};
use super::SceneError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    #[serde(default)]
    background: [f64; 3],
    #[serde(default)]
    actors: Vec<ActorEntry>,
    #[serde(default)]
    skeletons: Vec<SkeletonEntry>,
    #[serde(default)]
    cameras: Vec<CameraEntry>,
    #[serde(default)]
    lights: Vec<LightEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PoseEntry {
    #[serde(default)]
    loc: [f64; 3],
    #[serde(default)]
    rot: [f64; 3],
    #[serde(default = "ones")]
    scale: [f64; 3],
}

impl Default for PoseEntry {
    fn default() -> Self {
        PoseEntry {
            loc: [0.0; 3],
            rot: [0.0; 3],
            scale: ones(),
        }
    }
}

fn ones() -> [f64; 3] {
    [1.0; 3]
}

fn yes() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ActorEntry {
    name: String,
    #[serde(default)]
    class: String,
    #[serde(default = "yes")]
    movable: bool,
    #[serde(default)]
    pose: PoseEntry,
    geometry: GeometryEntry,
    #[serde(default)]
    material: Option<MaterialEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryEntry {
    kind: String,
    radius: Option<f64>,
    half_extents: Option<Vec<f64>>,
    obj_path: Option<String>,
    positions: Option<Vec<[f64; 3]>>,
    indices: Option<Vec<[u32; 3]>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialEntry {
    albedo: Option<[f64; 3]>,
    checker: Option<CheckerEntry>,
    #[serde(default)]
    ambient: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckerEntry {
    even: [f64; 3],
    odd: [f64; 3],
    cell: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SkeletonEntry {
    name: String,
    #[serde(default)]
    class: String,
    #[serde(default)]
    pose: PoseEntry,
    #[serde(default)]
    joints: Vec<JointEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JointEntry {
    name: String,
    parent: i64,
    #[serde(default)]
    pose: PoseEntry,
    geometry: Option<GeometryEntry>,
    material: Option<MaterialEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CameraEntry {
    name: String,
    #[serde(default)]
    pose: PoseEntry,
    hfov: f64,
    width: u32,
    height: u32,
    stereo_baseline: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LightEntry {
    kind: String,
    position: Option<[f64; 3]>,
    direction: Option<[f64; 3]>,
    intensity: f64,
    #[serde(default)]
    attenuation: f64,
    #[serde(default)]
    shadows: bool,
}

/// Parses a scene description. Mesh `obj_path`s are rejected; use
/// [`load_scene_with_base`] or [`load_scene_file`] for those.
pub fn load_scene(text: &str) -> Result<SceneGraph, SceneError> {
    load_scene_with_base(text, None)
}

pub fn load_scene_file(path: &Path) -> Result<SceneGraph, SceneError> {
    let text = std::fs::read_to_string(path).map_err(|e| SceneError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    load_scene_with_base(&text, path.parent())
}

pub fn load_scene_with_base(text: &str, base: Option<&Path>) -> Result<SceneGraph, SceneError> {
    let file: SceneFile = serde_json::from_str(text).map_err(|e| SceneError::Parse {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;

    let mut scene = SceneGraph::new();
    scene.set_background(unit_rgb("background", file.background)?);

    for (i, a) in file.actors.into_iter().enumerate() {
        let path = format!("actors[{i}]");
        let geometry = build_geometry(&format!("{path}.geometry"), &a.geometry, base)?;
        let material = match &a.material {
            Some(m) => build_material(&format!("{path}.material"), m)?,
            None => Material::default(),
        };
        let actor = Actor::new(a.name, geometry)
            .with_class(a.class)
            .with_movable(a.movable)
            .with_pose(build_pose(&format!("{path}.pose"), &a.pose)?)
            .with_material(material);
        scene.add_actor(actor)?;
    }

    for (i, s) in file.skeletons.into_iter().enumerate() {
        let path = format!("skeletons[{i}]");
        let mut joints = Vec::with_capacity(s.joints.len());
        for (k, j) in s.joints.iter().enumerate() {
            let jpath = format!("{path}.joints[{k}]");
            let parent = match j.parent {
                -1 => None,
                p if p >= 0 => Some(p as usize),
                p => {
                    return Err(SceneError::Field {
                        path: format!("{jpath}.parent"),
                        msg: format!("{p} is neither -1 nor a joint index"),
                    })
                }
            };
            let mut joint = Joint::new(&j.name, parent, build_pose(&format!("{jpath}.pose"), &j.pose)?);
            if let Some(g) = &j.geometry {
                let geometry = build_geometry(&format!("{jpath}.geometry"), g, base)?;
                let material = match &j.material {
                    Some(m) => build_material(&format!("{jpath}.material"), m)?,
                    None => Material::default(),
                };
                joint = joint.with_attachment(geometry, material);
            }
            joints.push(joint);
        }
        let pose = build_pose(&format!("{path}.pose"), &s.pose)?;
        scene.add_skeleton(SkeletalActor::new(s.name, pose, joints).with_class(s.class))?;
    }

    for (i, c) in file.cameras.into_iter().enumerate() {
        let pose = build_pose(&format!("cameras[{i}].pose"), &c.pose)?;
        let mut cam = CameraDef::new(c.name, c.width, c.height, c.hfov).with_pose(pose);
        cam.stereo_baseline = c.stereo_baseline;
        scene.add_camera(cam)?;
    }

    for (i, l) in file.lights.into_iter().enumerate() {
        let path = format!("lights[{i}]");
        let kind = match l.kind.as_str() {
            "point" => LightKind::Point {
                position: required(&path, "position", l.position)?.into(),
                attenuation: l.attenuation,
            },
            "directional" => LightKind::Directional {
                direction: required(&path, "direction", l.direction)?.into(),
            },
            other => {
                return Err(SceneError::Field {
                    path: format!("{path}.kind"),
                    msg: format!("unknown light kind {other:?}"),
                })
            }
        };
        scene
            .add_light(Light {
                kind,
                intensity: l.intensity,
                casts_shadows: l.shadows,
            })
            .map_err(|e| SceneError::Field {
                path,
                msg: e.to_string(),
            })?;
    }

    Ok(scene)
}

fn required<T>(path: &str, field: &str, v: Option<T>) -> Result<T, SceneError> {
    v.ok_or_else(|| SceneError::Field {
        path: format!("{path}.{field}"),
        msg: "missing".into(),
    })
}

fn unit_rgb(path: &str, c: [f64; 3]) -> Result<[f64; 3], SceneError> {
    if c.iter().all(|v| (0.0..=1.0).contains(v)) {
        Ok(c)
    } else {
        Err(SceneError::Field {
            path: path.to_string(),
            msg: format!("color {c:?} outside [0, 1]"),
        })
    }
}

fn build_pose(path: &str, p: &PoseEntry) -> Result<Pose6D, SceneError> {
    Pose6D::new(p.loc.into(), p.rot.into(), p.scale.into()).map_err(|e| match e {
        PoseError::InvalidScale(scale) => SceneError::InvalidScale {
            path: path.to_string(),
            scale,
        },
        PoseError::NonFinite => SceneError::Field {
            path: path.to_string(),
            msg: e.to_string(),
        },
    })
}

fn build_material(path: &str, m: &MaterialEntry) -> Result<Material, SceneError> {
    let albedo = match (&m.albedo, &m.checker) {
        (Some(c), None) => Albedo::Constant(unit_rgb(&format!("{path}.albedo"), *c)?),
        (None, Some(ch)) => Albedo::Checker {
            even: unit_rgb(&format!("{path}.checker.even"), ch.even)?,
            odd: unit_rgb(&format!("{path}.checker.odd"), ch.odd)?,
            cell: ch.cell,
        },
        _ => {
            return Err(SceneError::Field {
                path: path.to_string(),
                msg: "exactly one of `albedo` or `checker` is required".into(),
            })
        }
    };
    let material = Material {
        albedo,
        ambient: m.ambient,
    };
    if !material.is_valid() {
        return Err(SceneError::Field {
            path: path.to_string(),
            msg: "ambient must be in [0, 1] and checker cell > 0".into(),
        });
    }
    Ok(material)
}

fn build_geometry(path: &str, g: &GeometryEntry, base: Option<&Path>) -> Result<Geometry, SceneError> {
    let extents = |n: usize| -> Result<Vec<f64>, SceneError> {
        let he = required(path, "half_extents", g.half_extents.clone())?;
        if he.len() != n {
            return Err(SceneError::Field {
                path: format!("{path}.half_extents"),
                msg: format!("expected {n} values, got {}", he.len()),
            });
        }
        Ok(he)
    };
    match g.kind.as_str() {
        "sphere" => Ok(Geometry::Sphere {
            radius: required(path, "radius", g.radius)?,
        }),
        "box" => {
            let he = extents(3)?;
            Ok(Geometry::Box {
                half_extents: Vec3::new(he[0], he[1], he[2]),
            })
        }
        "plane" => {
            let he = extents(2)?;
            Ok(Geometry::Plane {
                half_extents: [he[0], he[1]],
            })
        }
        "mesh" => {
            let mesh_err = |e| SceneError::Mesh {
                path: path.to_string(),
                source: e,
            };
            let mesh = match (&g.obj_path, &g.positions, &g.indices) {
                (Some(rel), None, None) => {
                    let base = base.ok_or_else(|| SceneError::Field {
                        path: format!("{path}.obj_path"),
                        msg: "no base directory to resolve against".into(),
                    })?;
                    let file = base.join(rel);
                    let text = std::fs::read_to_string(&file).map_err(|e| SceneError::Io {
                        path: file.display().to_string(),
                        msg: e.to_string(),
                    })?;
                    TriMesh::from_obj(&text).map_err(mesh_err)?
                }
                (None, Some(pos), Some(idx)) => TriMesh::new(
                    pos.iter().map(|p| Vec3::from(*p)).collect(),
                    Vec::new(),
                    idx.clone(),
                )
                .map_err(mesh_err)?,
                _ => {
                    return Err(SceneError::Field {
                        path: path.to_string(),
                        msg: "mesh needs `obj_path` or both `positions` and `indices`".into(),
                    })
                }
            };
            Ok(Geometry::Mesh(Arc::new(mesh)))
        }
        other => Err(SceneError::UnknownGeometry {
            path: path.to_string(),
            kind: other.to_string(),
        }),
    }
}
