//! Full-image render passes. Every pass is a pure function of the snapshot
//! and camera; rows are rendered in parallel and each pixel is written by
//! exactly one task, so output does not depend on scheduling.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::capture::{decode_id_color, encode_id_color};
use crate::scene::{CameraDef, InstanceId};

use super::camera::{primary_ray, Ray};
use super::image::{ImagePlane, Modality, Pixels, StencilBuffer};
use super::shade::shade;
use super::trace::{HitRecord, Snapshot};
use super::RenderError;

/// Largest id the 8-bit stencil strategy can encode.
pub const STENCIL_MAX_ID: InstanceId = 255;

fn per_pixel<T, F>(cam: &CameraDef, f: F) -> Vec<T>
where
    T: Send + Clone + Default,
    F: Fn(&Ray) -> T + Sync,
{
    let w = cam.width as usize;
    let mut out = vec![T::default(); w * cam.height as usize];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, px) in row.iter_mut().enumerate() {
            let ray = primary_ray(cam, x as u32, y as u32).expect("pixel in range");
            *px = f(&ray);
        }
    });
    out
}

fn planar_depth(cam: &CameraDef, ray: &Ray, hit: &HitRecord) -> f32 {
    (hit.t * ray.direction.dot(cam.forward())) as f32
}

/// Lit color and the scalar shading that produced it. No-hit pixels take
/// the background color with shading 1.
pub fn render_lit(snapshot: &Snapshot, cam: &CameraDef) -> (ImagePlane, ImagePlane) {
    let bg = snapshot.background.map(|c| c as f32);
    let pixels = per_pixel(cam, |ray| match snapshot.trace(ray) {
        Some(hit) => {
            let s = shade(snapshot, &hit);
            (s.rgb, s.shading)
        }
        None => (bg, 1.0),
    });
    let (rgb, shading): (Vec<_>, Vec<_>) = pixels.into_iter().unzip();
    (
        ImagePlane::new(cam.width, cam.height, Modality::Rgb, Pixels::Color(rgb)),
        ImagePlane::new(cam.width, cam.height, Modality::Shading, Pixels::Scalar(shading)),
    )
}

/// Unlit base-color pass: every hit pixel takes `color_of(hit)`.
fn render_base_color<F>(snapshot: &Snapshot, cam: &CameraDef, background: [f32; 3], color_of: F) -> Vec<[f32; 3]>
where
    F: Fn(&HitRecord) -> [f32; 3] + Sync,
{
    per_pixel(cam, |ray| snapshot.trace(ray).map_or(background, |h| color_of(&h)))
}

/// Renders one modality. Shading and class are derived products and are
/// produced by the capture layer instead.
pub fn render_modality(
    snapshot: &Snapshot,
    cam: &CameraDef,
    modality: Modality,
) -> Result<ImagePlane, RenderError> {
    let (w, h) = (cam.width, cam.height);
    let pixels = match modality {
        Modality::Rgb => return Ok(render_lit(snapshot, cam).0),
        Modality::Albedo => {
            let bg = snapshot.background.map(|c| c as f32);
            Pixels::Color(render_base_color(snapshot, cam, bg, |hit| {
                hit.albedo.map(|c| c as f32)
            }))
        }
        Modality::Depth => Pixels::Scalar(per_pixel(cam, |ray| {
            snapshot.trace(ray).map_or(0.0, |hit| planar_depth(cam, ray, &hit))
        })),
        Modality::Normal => Pixels::Color(per_pixel(cam, |ray| {
            snapshot.trace(ray).map_or([0.0; 3], |hit| hit.normal.to_f32())
        })),
        Modality::Instance => Pixels::Id(per_pixel(cam, |ray| {
            snapshot.trace(ray).map_or(0, |hit| hit.instance_id)
        })),
        Modality::Shading | Modality::Class => {
            return Err(RenderError::UnsupportedModality(modality))
        }
    };
    Ok(ImagePlane::new(w, h, modality, pixels))
}

/// Instance mask via material override: every primitive is drawn unlit in
/// the flat color encoding its id, then colors are decoded back to ids.
/// The snapshot's own materials are not touched.
pub fn render_instance_by_override(
    snapshot: &Snapshot,
    cam: &CameraDef,
) -> Result<ImagePlane, RenderError> {
    let mut overrides: HashMap<InstanceId, [f32; 3]> = HashMap::new();
    for prim in &snapshot.primitives {
        let rgb = encode_id_color(prim.instance_id)
            .map_err(|_| RenderError::IdOverflow(prim.instance_id))?;
        overrides.insert(prim.instance_id, rgb.map(|c| c as f32 / 255.0));
    }
    let colors = render_base_color(snapshot, cam, [0.0; 3], |hit| overrides[&hit.instance_id]);
    // Gamma 1, no tone mapping: linear value back to the exact byte.
    let ids = colors
        .into_iter()
        .map(|c| decode_id_color(c.map(|v| (v * 255.0).round() as u8)))
        .collect();
    Ok(ImagePlane::new(cam.width, cam.height, Modality::Instance, Pixels::Id(ids)))
}

/// Instance mask via an 8-bit stencil written during visibility, followed
/// by a lookup from stencil value to instance id. Fails when any
/// registered id exceeds 255.
pub fn render_instance_by_stencil(
    snapshot: &Snapshot,
    cam: &CameraDef,
) -> Result<(StencilBuffer, ImagePlane), RenderError> {
    if snapshot.max_instance_id > STENCIL_MAX_ID {
        return Err(RenderError::InstanceCountExceeded {
            max_id: snapshot.max_instance_id,
        });
    }
    let values: Vec<u8> = per_pixel(cam, |ray| {
        snapshot.trace(ray).map_or(0, |hit| hit.instance_id as u8)
    });
    let mut lookup = [0 as InstanceId; 256];
    for prim in &snapshot.primitives {
        lookup[prim.instance_id as usize] = prim.instance_id;
    }
    let ids = values.iter().map(|&v| lookup[v as usize]).collect();
    let stencil = StencilBuffer {
        width: cam.width,
        height: cam.height,
        values,
    };
    Ok((
        stencil,
        ImagePlane::new(cam.width, cam.height, Modality::Instance, Pixels::Id(ids)),
    ))
}
