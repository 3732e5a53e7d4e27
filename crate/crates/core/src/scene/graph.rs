use std::collections::{BTreeMap, HashMap};

use crate::math::Vec3;

use super::geometry::{Geometry, Light, LightKind, Material};
use super::pose::Pose6D;
use super::SceneError;

/// Instance id written into masks. 0 is the background.
pub type InstanceId = u32;

#[derive(Clone, Debug, PartialEq)]
pub struct Actor {
    pub name: String,
    pub class_label: String,
    pub pose: Pose6D,
    pub geometry: Geometry,
    pub material: Material,
    pub movable: bool,
    instance_id: InstanceId,
}

impl Actor {
    pub fn new(name: impl Into<String>, geometry: Geometry) -> Self {
        Actor {
            name: name.into(),
            class_label: String::new(),
            pose: Pose6D::IDENTITY,
            geometry,
            material: Material::default(),
            movable: true,
            instance_id: 0,
        }
    }

    pub fn with_pose(mut self, pose: Pose6D) -> Self {
        self.pose = pose;
        self
    }

    pub fn with_material(mut self, material: Material) -> Self {
        self.material = material;
        self
    }

    pub fn with_class(mut self, class_label: impl Into<String>) -> Self {
        self.class_label = class_label.into();
        self
    }

    pub fn with_movable(mut self, movable: bool) -> Self {
        self.movable = movable;
        self
    }

    /// Assigned at registration; 0 before that.
    pub fn instance_id(&self) -> InstanceId {
        self.instance_id
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Joint {
    pub name: String,
    /// Index of the parent joint, always lower than this joint's index.
    pub parent: Option<usize>,
    pub local_pose: Pose6D,
    pub attachment: Option<(Geometry, Material)>,
}

impl Joint {
    pub fn new(name: impl Into<String>, parent: Option<usize>, local_pose: Pose6D) -> Self {
        Joint {
            name: name.into(),
            parent,
            local_pose,
            attachment: None,
        }
    }

    pub fn with_attachment(mut self, geometry: Geometry, material: Material) -> Self {
        self.attachment = Some((geometry, material));
        self
    }
}

/// An actor carrying a joint hierarchy. Each joint may hold a rigid
/// segment that renders with the owner's instance id.
#[derive(Clone, Debug, PartialEq)]
pub struct SkeletalActor {
    pub name: String,
    pub class_label: String,
    pub pose: Pose6D,
    pub joints: Vec<Joint>,
    instance_id: InstanceId,
}

impl SkeletalActor {
    pub fn new(name: impl Into<String>, pose: Pose6D, joints: Vec<Joint>) -> Self {
        SkeletalActor {
            name: name.into(),
            class_label: String::new(),
            pose,
            joints,
            instance_id: 0,
        }
    }

    pub fn with_class(mut self, class_label: impl Into<String>) -> Self {
        self.class_label = class_label.into();
        self
    }

    pub fn instance_id(&self) -> InstanceId {
        self.instance_id
    }

    fn validate(&self) -> Result<(), SceneError> {
        for (k, joint) in self.joints.iter().enumerate() {
            if let Some(p) = joint.parent {
                if p >= k {
                    return Err(SceneError::InvalidSkeleton(format!(
                        "{}: joint {k} ({}) has parent {p}, parents must precede children",
                        self.name, joint.name
                    )));
                }
            }
            if self.joints[..k].iter().any(|j| j.name == joint.name) {
                return Err(SceneError::InvalidSkeleton(format!(
                    "{}: duplicate joint name {:?}",
                    self.name, joint.name
                )));
            }
            if let Some((geometry, material)) = &joint.attachment {
                validate_geometry(&format!("{}.{}", self.name, joint.name), geometry)?;
                if !material.is_valid() {
                    return Err(SceneError::InvalidMaterial(format!(
                        "{}.{}",
                        self.name, joint.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// World pose of every joint, in joint order. A root joint composes
    /// with the actor pose; every other joint composes with its parent.
    pub fn joint_world_poses(&self) -> Vec<(String, Pose6D)> {
        let mut world: Vec<Pose6D> = Vec::with_capacity(self.joints.len());
        for joint in &self.joints {
            let parent = match joint.parent {
                Some(p) => world[p],
                None => self.pose,
            };
            world.push(parent.compose(&joint.local_pose));
        }
        self.joints
            .iter()
            .zip(world)
            .map(|(j, p)| (j.name.clone(), p))
            .collect()
    }
}

/// Free-function form of [`SkeletalActor::joint_world_poses`].
pub fn joint_world_poses(sk: &SkeletalActor) -> Vec<(String, Pose6D)> {
    sk.joint_world_poses()
}

/// Pinhole camera. Forward is the pose's +X, image right is the pose's -Y,
/// image up is the pose's +Z.
#[derive(Clone, Debug, PartialEq)]
pub struct CameraDef {
    pub name: String,
    pub pose: Pose6D,
    pub hfov_deg: f64,
    pub width: u32,
    pub height: u32,
    pub stereo_baseline: Option<f64>,
}

/// Upper bound on either image dimension.
pub const MAX_IMAGE_DIM: u32 = 8192;

impl CameraDef {
    pub fn new(name: impl Into<String>, width: u32, height: u32, hfov_deg: f64) -> Self {
        CameraDef {
            name: name.into(),
            pose: Pose6D::IDENTITY,
            hfov_deg,
            width,
            height,
            stereo_baseline: None,
        }
    }

    pub fn with_pose(mut self, pose: Pose6D) -> Self {
        self.pose = pose;
        self
    }

    pub fn with_stereo_baseline(mut self, baseline: f64) -> Self {
        self.stereo_baseline = Some(baseline);
        self
    }

    /// Focal length in pixels, `(width / 2) / tan(hfov / 2)`.
    pub fn focal_px(&self) -> f64 {
        (self.width as f64 / 2.0) / (self.hfov_deg.to_radians() / 2.0).tan()
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        let bad = |msg: String| Err(SceneError::InvalidCamera(format!("{}: {msg}", self.name)));
        if !(self.hfov_deg > 0.0 && self.hfov_deg < 180.0) {
            return bad(format!("hfov {} outside (0, 180)", self.hfov_deg));
        }
        if self.width == 0 || self.height == 0 {
            return bad(format!("size {}x{} must be at least 1x1", self.width, self.height));
        }
        if self.width > MAX_IMAGE_DIM || self.height > MAX_IMAGE_DIM {
            return bad(format!("size {}x{} exceeds {MAX_IMAGE_DIM}", self.width, self.height));
        }
        let f = self.focal_px();
        if !(f.is_finite() && f > 0.0) {
            return bad(format!("focal length {f} is not finite and positive"));
        }
        if let Some(b) = self.stereo_baseline {
            if !(b.is_finite() && b > 0.0) {
                return bad(format!("stereo baseline {b} must be positive"));
            }
        }
        Ok(())
    }

    pub fn forward(&self) -> Vec3 {
        self.pose.rotation_matrix().col(0)
    }

    /// Image-right direction in world space.
    pub fn right(&self) -> Vec3 {
        -self.pose.rotation_matrix().col(1)
    }

    pub fn up(&self) -> Vec3 {
        self.pose.rotation_matrix().col(2)
    }

    /// The implicit right-hand camera of a stereo pair: same orientation and
    /// intrinsics, offset by the baseline along the image-right axis.
    pub fn stereo_partner(&self) -> Option<CameraDef> {
        let b = self.stereo_baseline?;
        let loc = self.pose.location() + self.right() * b;
        Some(CameraDef {
            name: format!("{}_R", self.name),
            pose: self.pose.with_location(loc).ok()?,
            stereo_baseline: None,
            ..self.clone()
        })
    }
}

/// Handle to a registered entity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EntityRef {
    Actor(usize),
    Skeleton(usize),
    Camera(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntityKind {
    Actor,
    Skeleton,
    Camera,
}

impl EntityRef {
    pub fn kind(self) -> EntityKind {
        match self {
            EntityRef::Actor(_) => EntityKind::Actor,
            EntityRef::Skeleton(_) => EntityKind::Skeleton,
            EntityRef::Camera(_) => EntityKind::Camera,
        }
    }
}

/// Registry of everything in a scene. Names are unique across actors,
/// skeletons and cameras; instance ids are unique across actors and
/// skeletons and are handed out sequentially from 1.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneGraph {
    actors: Vec<Actor>,
    skeletons: Vec<SkeletalActor>,
    cameras: Vec<CameraDef>,
    lights: Vec<Light>,
    background: [f64; 3],
    next_id: InstanceId,
    names: HashMap<String, EntityRef>,
    ids: BTreeMap<InstanceId, EntityRef>,
    order: Vec<EntityRef>,
}

impl Default for SceneGraph {
    fn default() -> Self {
        SceneGraph::new()
    }
}

impl SceneGraph {
    pub fn new() -> Self {
        SceneGraph {
            actors: Vec::new(),
            skeletons: Vec::new(),
            cameras: Vec::new(),
            lights: Vec::new(),
            background: [0.0; 3],
            next_id: 1,
            names: HashMap::new(),
            ids: BTreeMap::new(),
            order: Vec::new(),
        }
    }

    pub fn background(&self) -> [f64; 3] {
        self.background
    }

    pub fn set_background(&mut self, rgb: [f64; 3]) {
        self.background = rgb;
    }

    /// The id the next registered actor or skeleton will receive.
    pub fn next_instance_id(&self) -> InstanceId {
        self.next_id
    }

    pub fn actors(&self) -> &[Actor] {
        &self.actors
    }

    pub fn skeletons(&self) -> &[SkeletalActor] {
        &self.skeletons
    }

    pub fn cameras(&self) -> &[CameraDef] {
        &self.cameras
    }

    pub fn lights(&self) -> &[Light] {
        &self.lights
    }

    /// All entities in registration order.
    pub fn entities(&self) -> &[EntityRef] {
        &self.order
    }

    pub fn entity_name(&self, e: EntityRef) -> &str {
        match e {
            EntityRef::Actor(i) => &self.actors[i].name,
            EntityRef::Skeleton(i) => &self.skeletons[i].name,
            EntityRef::Camera(i) => &self.cameras[i].name,
        }
    }

    pub fn lookup(&self, name: &str) -> Option<EntityRef> {
        self.names.get(name).copied()
    }

    pub fn lookup_id(&self, id: InstanceId) -> Option<EntityRef> {
        self.ids.get(&id).copied()
    }

    pub fn actor(&self, name: &str) -> Option<&Actor> {
        match self.lookup(name)? {
            EntityRef::Actor(i) => Some(&self.actors[i]),
            _ => None,
        }
    }

    pub fn skeleton(&self, name: &str) -> Option<&SkeletalActor> {
        match self.lookup(name)? {
            EntityRef::Skeleton(i) => Some(&self.skeletons[i]),
            _ => None,
        }
    }

    pub fn camera(&self, name: &str) -> Option<&CameraDef> {
        match self.lookup(name)? {
            EntityRef::Camera(i) => Some(&self.cameras[i]),
            _ => None,
        }
    }

    /// Largest registered instance id, 0 when there are none.
    pub fn max_instance_id(&self) -> InstanceId {
        self.ids.keys().next_back().copied().unwrap_or(0)
    }

    /// Instance id → class label for every actor and skeleton.
    pub fn class_labels(&self) -> BTreeMap<InstanceId, String> {
        let actors = self
            .actors
            .iter()
            .map(|a| (a.instance_id, a.class_label.clone()));
        let skels = self
            .skeletons
            .iter()
            .map(|s| (s.instance_id, s.class_label.clone()));
        actors.chain(skels).collect()
    }

    fn claim_name(&mut self, name: &str, entity: EntityRef) -> Result<(), SceneError> {
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(SceneError::InvalidName(name.to_string()));
        }
        if self.names.contains_key(name) {
            return Err(SceneError::DuplicateName(name.to_string()));
        }
        self.names.insert(name.to_string(), entity);
        self.order.push(entity);
        Ok(())
    }

    fn claim_id(&mut self, entity: EntityRef) -> Result<InstanceId, SceneError> {
        let id = self.next_id;
        self.next_id = id.checked_add(1).ok_or(SceneError::IdsExhausted)?;
        self.ids.insert(id, entity);
        Ok(id)
    }

    pub fn add_actor(&mut self, mut actor: Actor) -> Result<InstanceId, SceneError> {
        validate_geometry(&actor.name, &actor.geometry)?;
        if !actor.material.is_valid() {
            return Err(SceneError::InvalidMaterial(actor.name));
        }
        let entity = EntityRef::Actor(self.actors.len());
        self.claim_name(&actor.name, entity)?;
        actor.instance_id = self.claim_id(entity)?;
        let id = actor.instance_id;
        self.actors.push(actor);
        Ok(id)
    }

    pub fn add_skeleton(&mut self, mut sk: SkeletalActor) -> Result<InstanceId, SceneError> {
        sk.validate()?;
        let entity = EntityRef::Skeleton(self.skeletons.len());
        self.claim_name(&sk.name, entity)?;
        sk.instance_id = self.claim_id(entity)?;
        let id = sk.instance_id;
        self.skeletons.push(sk);
        Ok(id)
    }

    pub fn add_camera(&mut self, cam: CameraDef) -> Result<(), SceneError> {
        cam.validate()?;
        let entity = EntityRef::Camera(self.cameras.len());
        self.claim_name(&cam.name, entity)?;
        self.cameras.push(cam);
        Ok(())
    }

    pub fn add_light(&mut self, light: Light) -> Result<(), SceneError> {
        if !(light.intensity.is_finite() && light.intensity >= 0.0) {
            return Err(SceneError::InvalidLight(format!(
                "intensity {} must be finite and >= 0",
                light.intensity
            )));
        }
        let kind = match light.kind {
            LightKind::Directional { direction } => {
                let len = direction.length();
                if !(len.is_finite() && len > 0.0) {
                    return Err(SceneError::InvalidLight(
                        "directional light needs a non-zero direction".into(),
                    ));
                }
                LightKind::Directional {
                    direction: direction / len,
                }
            }
            LightKind::Point {
                position,
                attenuation,
            } => {
                if !position.is_finite() || !(attenuation.is_finite() && attenuation >= 0.0) {
                    return Err(SceneError::InvalidLight(
                        "point light needs a finite position and attenuation >= 0".into(),
                    ));
                }
                light.kind
            }
        };
        self.lights.push(Light { kind, ..light });
        Ok(())
    }

    pub fn pose(&self, name: &str) -> Option<Pose6D> {
        Some(match self.lookup(name)? {
            EntityRef::Actor(i) => self.actors[i].pose,
            EntityRef::Skeleton(i) => self.skeletons[i].pose,
            EntityRef::Camera(i) => self.cameras[i].pose,
        })
    }

    /// Sets the pose of a movable actor, a skeleton root, or a camera.
    pub fn set_pose(&mut self, name: &str, pose: Pose6D) -> Result<(), SceneError> {
        match self.lookup(name) {
            None => Err(SceneError::UnknownEntity(name.to_string())),
            Some(EntityRef::Actor(i)) => {
                let actor = &mut self.actors[i];
                if !actor.movable {
                    return Err(SceneError::NotMovable(name.to_string()));
                }
                actor.pose = pose;
                Ok(())
            }
            Some(EntityRef::Skeleton(i)) => {
                self.skeletons[i].pose = pose;
                Ok(())
            }
            Some(EntityRef::Camera(i)) => {
                self.cameras[i].pose = pose;
                Ok(())
            }
        }
    }

    pub fn set_joint_local_pose(
        &mut self,
        skeleton: &str,
        joint: usize,
        pose: Pose6D,
    ) -> Result<(), SceneError> {
        let Some(EntityRef::Skeleton(i)) = self.lookup(skeleton) else {
            return Err(SceneError::UnknownEntity(skeleton.to_string()));
        };
        let sk = &mut self.skeletons[i];
        let count = sk.joints.len();
        let j = sk.joints.get_mut(joint).ok_or_else(|| {
            SceneError::InvalidSkeleton(format!("{skeleton}: joint {joint} of {count}"))
        })?;
        j.local_pose = pose;
        Ok(())
    }
}

pub(crate) fn validate_geometry(owner: &str, g: &Geometry) -> Result<(), SceneError> {
    let bad = |msg: &str| {
        Err(SceneError::InvalidGeometry {
            owner: owner.to_string(),
            msg: msg.to_string(),
        })
    };
    let positive = |v: f64| v.is_finite() && v > 0.0;
    match g {
        Geometry::Sphere { radius } if !positive(*radius) => bad("sphere radius must be > 0"),
        Geometry::Box { half_extents }
            if !half_extents.to_array().iter().all(|&v| positive(v)) =>
        {
            bad("box half-extents must be > 0")
        }
        Geometry::Plane { half_extents } if !half_extents.iter().all(|&v| positive(v)) => {
            bad("plane half-extents must be > 0")
        }
        _ => Ok(()),
    }
}
