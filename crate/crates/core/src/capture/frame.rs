//! Capture sets, per-frame rendering and atomic frame output.
//!
//! Layout under the output root:
//!
//! ```text
//! <camera>/<modality>/<frame:06d>.<png|pfm>
//! <camera>_R/<modality>/<frame:06d>.<png|pfm>   right camera of a stereo pair
//! <frame:06d>.meta.json                         per-frame sidecar
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::render::{
    render_instance_by_override, render_instance_by_stencil, render_lit, render_modality,
    ImagePlane, Modality, Snapshot,
};
use crate::scene::{CameraDef, InstanceId, OrientedBox, Pose6D, SceneGraph};

use super::analysis::{bbox_2d, class_mask, default_palette, visible_ids, ClassPalette};
use super::encode::{encode_modality, EncodedImage, Format};
use super::shading::{compute_shading, DEFAULT_EPSILON};
use super::CaptureError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaskStrategy {
    /// Flat id colors rendered unlit; no instance limit below 2^24.
    #[default]
    Override,
    /// 8-bit stencil plus lookup; fails above 255 instances.
    Stencil,
}

/// The modalities to capture from one camera and how to encode them.
#[derive(Clone, Debug, PartialEq)]
pub struct CaptureSet {
    pub camera: String,
    pub modalities: BTreeSet<Modality>,
    /// Per-modality overrides of [`Format::default_for`].
    pub formats: BTreeMap<Modality, Format>,
    /// Overrides the camera's own baseline when set.
    pub stereo_baseline: Option<f64>,
    pub mask_strategy: MaskStrategy,
    pub epsilon: f64,
    /// Class colors; derived from the scene when absent.
    pub palette: Option<ClassPalette>,
}

impl CaptureSet {
    pub fn new(camera: impl Into<String>, modalities: impl IntoIterator<Item = Modality>) -> Self {
        CaptureSet {
            camera: camera.into(),
            modalities: modalities.into_iter().collect(),
            formats: BTreeMap::new(),
            stereo_baseline: None,
            mask_strategy: MaskStrategy::default(),
            epsilon: DEFAULT_EPSILON,
            palette: None,
        }
    }

    pub fn with_format(mut self, modality: Modality, format: Format) -> Self {
        self.formats.insert(modality, format);
        self
    }

    /// Switches every modality that has a float encoding to PFM.
    pub fn with_float_output(mut self) -> Self {
        for m in self.modalities.clone() {
            self.formats.insert(m, Format::preferred(m, true));
        }
        self
    }

    pub fn with_stereo_baseline(mut self, baseline: f64) -> Self {
        self.stereo_baseline = Some(baseline);
        self
    }

    pub fn with_mask_strategy(mut self, strategy: MaskStrategy) -> Self {
        self.mask_strategy = strategy;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn format_for(&self, modality: Modality) -> Format {
        self.formats
            .get(&modality)
            .copied()
            .unwrap_or_else(|| Format::default_for(modality))
    }

    pub fn validate(&self, scene: &SceneGraph) -> Result<(), CaptureError> {
        self.cameras(scene).map(|_| ())
    }

    /// The capturing camera and, for stereo sets, its right partner.
    pub fn cameras(&self, scene: &SceneGraph) -> Result<Vec<CameraDef>, CaptureError> {
        for (&m, &f) in &self.formats {
            if !f.supports(m) {
                return Err(CaptureError::InvalidFormat {
                    modality: m,
                    format: f,
                });
            }
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(CaptureError::InvalidEpsilon(self.epsilon));
        }
        let mut cam = scene
            .camera(&self.camera)
            .ok_or_else(|| CaptureError::UnknownCamera(self.camera.clone()))?
            .clone();
        if let Some(b) = self.stereo_baseline {
            cam.stereo_baseline = Some(b);
        }
        if let Some(b) = cam.stereo_baseline {
            if !(b.is_finite() && b > 0.0) {
                return Err(CaptureError::InvalidBaseline(b));
            }
        }
        let right = cam.stereo_partner();
        Ok(std::iter::once(cam).chain(right).collect())
    }
}

/// Every plane rendered for one camera in one frame.
#[derive(Clone, Debug)]
pub struct ViewPlanes {
    pub camera: CameraDef,
    /// The requested modalities.
    pub planes: BTreeMap<Modality, ImagePlane>,
    /// Instance ids, always rendered so the sidecar can list visible ids.
    pub instance: ImagePlane,
    /// The shading the renderer applied, when the lit pass ran.
    pub internal_shading: Option<ImagePlane>,
}

/// Renders the modalities of `set` for one camera from one snapshot.
/// Shading is recovered from the float rgb and albedo planes.
pub fn render_view(
    snapshot: &Snapshot,
    camera: &CameraDef,
    set: &CaptureSet,
    labels: &BTreeMap<InstanceId, String>,
    palette: &ClassPalette,
) -> Result<ViewPlanes, CaptureError> {
    let wants = |m| set.modalities.contains(&m);
    let mut planes = BTreeMap::new();

    let lit = (wants(Modality::Rgb) || wants(Modality::Shading)).then(|| render_lit(snapshot, camera));
    let albedo = if wants(Modality::Albedo) || wants(Modality::Shading) {
        Some(render_modality(snapshot, camera, Modality::Albedo)?)
    } else {
        None
    };
    if let (true, Some((rgb, _)), Some(albedo)) = (wants(Modality::Shading), &lit, &albedo) {
        planes.insert(Modality::Shading, compute_shading(rgb, albedo, set.epsilon)?);
    }
    let internal_shading = lit.as_ref().map(|(_, s)| s.clone());
    if let (true, Some((rgb, _))) = (wants(Modality::Rgb), lit) {
        planes.insert(Modality::Rgb, rgb);
    }
    if let (true, Some(albedo)) = (wants(Modality::Albedo), albedo) {
        planes.insert(Modality::Albedo, albedo);
    }
    for m in [Modality::Depth, Modality::Normal] {
        if wants(m) {
            planes.insert(m, render_modality(snapshot, camera, m)?);
        }
    }
    let instance = match set.mask_strategy {
        MaskStrategy::Override => render_instance_by_override(snapshot, camera)?,
        MaskStrategy::Stencil => render_instance_by_stencil(snapshot, camera)?.1,
    };
    if wants(Modality::Class) {
        planes.insert(Modality::Class, class_mask(&instance, labels, palette)?);
    }
    if wants(Modality::Instance) {
        planes.insert(Modality::Instance, instance.clone());
    }
    Ok(ViewPlanes {
        camera: camera.clone(),
        planes,
        instance,
        internal_shading,
    })
}

pub fn image_path(camera: &str, modality: Modality, format: Format, frame: u64) -> PathBuf {
    PathBuf::from(camera)
        .join(modality.name())
        .join(format!("{frame:06}.{}", format.extension()))
}

pub fn sidecar_path(frame: u64) -> PathBuf {
    PathBuf::from(format!("{frame:06}.meta.json"))
}

/// Encoded files of one frame, held in memory until committed.
#[derive(Clone, Debug, Default)]
pub struct FrameOutput {
    pub frame: u64,
    /// Paths relative to the output root.
    pub files: Vec<(PathBuf, Vec<u8>)>,
}

impl FrameOutput {
    /// Writes every file under `root`. Each file is written to a temporary
    /// sibling first and renamed only after all writes succeeded; on failure
    /// nothing from this frame is left behind.
    pub fn commit(&self, root: &Path) -> Result<(), CaptureError> {
        let mut staged: Vec<(PathBuf, PathBuf)> = Vec::new();
        let result = self.stage(root, &mut staged).and_then(|()| {
            for (tmp, dst) in &staged {
                fs::rename(tmp, dst).map_err(|e| CaptureError::io(dst, e))?;
            }
            Ok(())
        });
        if result.is_err() {
            for (tmp, dst) in &staged {
                let _ = fs::remove_file(tmp);
                let _ = fs::remove_file(dst);
            }
        }
        result
    }

    fn stage(&self, root: &Path, staged: &mut Vec<(PathBuf, PathBuf)>) -> Result<(), CaptureError> {
        for (rel, bytes) in &self.files {
            let dst = root.join(rel);
            if let Some(dir) = dst.parent() {
                fs::create_dir_all(dir).map_err(|e| CaptureError::io(dir, e))?;
            }
            let mut name = dst.file_name().unwrap_or_default().to_os_string();
            name.push(".tmp");
            let tmp = dst.with_file_name(name);
            fs::write(&tmp, bytes).map_err(|e| CaptureError::io(&tmp, e))?;
            staged.push((tmp, dst));
        }
        Ok(())
    }
}

/// Renders and encodes one capture set against one snapshot, including the
/// right camera of a stereo pair.
pub fn encode_set(
    scene: &SceneGraph,
    snapshot: &Snapshot,
    set: &CaptureSet,
    frame: u64,
) -> Result<(Vec<ViewPlanes>, Vec<(PathBuf, EncodedImage)>), CaptureError> {
    let labels = scene.class_labels();
    let palette = set.palette.clone().unwrap_or_else(|| default_palette(scene));
    let mut views = Vec::new();
    let mut images = Vec::new();
    for cam in set.cameras(scene)? {
        let view = render_view(snapshot, &cam, set, &labels, &palette)?;
        for (&m, plane) in &view.planes {
            let format = set.format_for(m);
            images.push((image_path(&cam.name, m, format, frame), encode_modality(plane, format)?));
        }
        views.push(view);
    }
    Ok((views, images))
}

/// Renders every enabled modality of `set` from one snapshot of `scene` and
/// writes the files under `root`.
pub fn capture_frame(
    scene: &SceneGraph,
    set: &CaptureSet,
    frame: u64,
    root: &Path,
) -> Result<Vec<EncodedImage>, CaptureError> {
    let snapshot = Snapshot::new(scene);
    let (_, images) = encode_set(scene, &snapshot, set, frame)?;
    let output = FrameOutput {
        frame,
        files: images.iter().map(|(p, img)| (p.clone(), img.bytes.clone())).collect(),
    };
    output.commit(root)?;
    Ok(images.into_iter().map(|(_, img)| img).collect())
}

/// Overlap lists keyed by entity name.
pub type OverlapMap = BTreeMap<String, Vec<String>>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VisibleInstance {
    pub id: InstanceId,
    pub name: String,
    /// Pixel-inclusive `[xmin, ymin, xmax, ymax]`.
    pub bbox_2d: [u32; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CameraMeta {
    pub name: String,
    pub pose: Pose6D,
    pub hfov_deg: f64,
    pub width: u32,
    pub height: u32,
    pub focal_px: f64,
    pub visible: Vec<VisibleInstance>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointMeta {
    pub name: String,
    /// World-space pose.
    pub pose: Pose6D,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntityMeta {
    pub name: String,
    pub instance_id: InstanceId,
    pub class: String,
    pub pose: Pose6D,
    pub bbox_3d: Option<OrientedBox>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub joints: Vec<JointMeta>,
}

/// Contents of `<frame>.meta.json`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameMeta {
    pub frame: u64,
    pub cameras: Vec<CameraMeta>,
    pub actors: Vec<EntityMeta>,
    pub skeletons: Vec<EntityMeta>,
    pub overlaps: OverlapMap,
    pub classes: BTreeMap<String, [u8; 3]>,
}

impl FrameMeta {
    pub fn new(scene: &SceneGraph, views: &[ViewPlanes], overlaps: &OverlapMap, frame: u64) -> Self {
        let cameras = views
            .iter()
            .map(|v| CameraMeta {
                name: v.camera.name.clone(),
                pose: v.camera.pose,
                hfov_deg: v.camera.hfov_deg,
                width: v.camera.width,
                height: v.camera.height,
                focal_px: v.camera.focal_px(),
                visible: visible_ids(&v.instance)
                    .into_iter()
                    .filter_map(|id| {
                        let e = scene.lookup_id(id)?;
                        Some(VisibleInstance {
                            id,
                            name: scene.entity_name(e).to_string(),
                            bbox_2d: bbox_2d(&v.instance, id)?,
                        })
                    })
                    .collect(),
            })
            .collect();
        let actors = scene
            .actors()
            .iter()
            .map(|a| EntityMeta {
                name: a.name.clone(),
                instance_id: a.instance_id(),
                class: a.class_label.clone(),
                pose: a.pose,
                bbox_3d: Some(a.oriented_bbox()),
                joints: Vec::new(),
            })
            .collect();
        let skeletons = scene
            .skeletons()
            .iter()
            .map(|s| EntityMeta {
                name: s.name.clone(),
                instance_id: s.instance_id(),
                class: s.class_label.clone(),
                pose: s.pose,
                bbox_3d: s.oriented_bbox(),
                joints: s
                    .joint_world_poses()
                    .into_iter()
                    .map(|(name, pose)| JointMeta { name, pose })
                    .collect(),
            })
            .collect();
        FrameMeta {
            frame,
            cameras,
            actors,
            skeletons,
            overlaps: overlaps.clone(),
            classes: default_palette(scene),
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("sidecar serializes");
        bytes.push(b'\n');
        bytes
    }
}

/// Captures every set from a single snapshot, adds the sidecar, and commits
/// the whole frame atomically.
pub fn write_frame(
    scene: &SceneGraph,
    sets: &[CaptureSet],
    overlaps: &OverlapMap,
    frame: u64,
    root: &Path,
) -> Result<FrameOutput, CaptureError> {
    let snapshot = Snapshot::new(scene);
    let mut views = Vec::new();
    let mut output = FrameOutput {
        frame,
        files: Vec::new(),
    };
    for set in sets {
        let (v, images) = encode_set(scene, &snapshot, set, frame)?;
        views.extend(v);
        output
            .files
            .extend(images.into_iter().map(|(p, img)| (p, img.bytes)));
    }
    let meta = FrameMeta::new(scene, &views, overlaps, frame);
    output.files.push((sidecar_path(frame), meta.to_json()));
    output.commit(root)?;
    Ok(output)
}
