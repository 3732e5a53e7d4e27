//! CPU ray caster producing per-modality image planes.
//!
//! One primary ray per pixel through the pixel center, no anti-aliasing:
//! mask pixels are always a single id, never a blend.

mod camera;
mod image;
mod passes;
mod shade;
mod trace;

use thiserror::Error;

pub use camera::{primary_ray, ray_through, Ray};
pub use image::{ImagePlane, Modality, PixelKind, Pixels, StencilBuffer};
pub use passes::{
    render_instance_by_override, render_instance_by_stencil, render_lit, render_modality,
    STENCIL_MAX_ID,
};
pub use shade::{shade, Shaded, SHADOW_BIAS};
pub use trace::{moller_trumbore, trace, HitRecord, Primitive, Snapshot, T_MIN};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RenderError {
    #[error("pixel ({x}, {y}) outside {width}x{height}")]
    PixelOutOfRange {
        x: u32,
        y: u32,
        width: u32,
        height: u32,
    },
    #[error("modality {0} is not rendered directly")]
    UnsupportedModality(Modality),
    #[error("stencil buffer holds 256 different values (0 is background), scene has instance id {max_id}")]
    InstanceCountExceeded { max_id: u32 },
    #[error("instance id {0} does not fit a 24-bit color")]
    IdOverflow(u32),
}
