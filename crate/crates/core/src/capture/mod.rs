//! Capture sets, image encodings and mask post-processing.

mod analysis;
mod encode;
mod frame;
mod idcolor;
mod shading;

use std::path::Path;

use thiserror::Error;

use crate::render::{Modality, RenderError};

pub use analysis::{bbox_2d, class_mask, default_palette, visible_ids, ClassPalette};
pub use encode::{
    decode_image, decode_plane, encode_modality, quantize_depth_mm, quantize_normal,
    quantize_unit, DecodedImage, EncodedImage, Format, Samples, DEPTH_PNG16_MAX_M, PNG_SIGNATURE,
};
pub use frame::{
    capture_frame, encode_set, image_path, render_view, sidecar_path, write_frame, CameraMeta,
    CaptureSet, EntityMeta, FrameMeta, FrameOutput, JointMeta, MaskStrategy, OverlapMap,
    ViewPlanes, VisibleInstance,
};
pub use idcolor::{decode_id_color, encode_id_color, ID_COLOR_LIMIT};
pub use shading::{compute_shading, DEFAULT_EPSILON};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CaptureError {
    #[error("unknown camera {0:?}")]
    UnknownCamera(String),
    #[error("format {format} cannot encode {modality}")]
    InvalidFormat { modality: Modality, format: Format },
    #[error("epsilon must be finite and > 0, got {0}")]
    InvalidEpsilon(f64),
    #[error("stereo baseline must be finite and > 0, got {0}")]
    InvalidBaseline(f64),
    #[error("image sizes differ: {a:?} vs {b:?}")]
    DimensionMismatch { a: (u32, u32), b: (u32, u32) },
    #[error("plane has the wrong modality for this operation")]
    WrongModality,
    #[error("instance id {0} has no class label")]
    UnmappedId(u32),
    #[error("class {0:?} has no palette color")]
    UnmappedClass(String),
    #[error("id {0} does not fit a 24-bit color")]
    IdOverflow(u32),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("png encode: {0}")]
    Png(String),
    #[error("decode: {0}")]
    Decode(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

impl CaptureError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        CaptureError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        }
    }
}
