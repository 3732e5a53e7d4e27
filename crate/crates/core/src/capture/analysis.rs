//! Post-processing over decoded instance masks.

use std::collections::BTreeMap;

use crate::render::{ImagePlane, Modality, Pixels};
use crate::scene::{InstanceId, SceneGraph};

use super::idcolor::{decode_id_color, encode_id_color};
use super::CaptureError;

/// Pixel-inclusive `(xmin, ymin, xmax, ymax)` of `id`, or `None` when no
/// pixel carries it.
pub fn bbox_2d(plane: &ImagePlane, id: InstanceId) -> Option<[u32; 4]> {
    let ids = plane.ids()?;
    let w = plane.width() as usize;
    let mut out: Option<[u32; 4]> = None;
    for (i, _) in ids.iter().enumerate().filter(|(_, v)| **v == id) {
        let (x, y) = ((i % w) as u32, (i / w) as u32);
        out = Some(match out {
            None => [x, y, x, y],
            Some([x0, y0, x1, y1]) => [x0.min(x), y0.min(y), x1.max(x), y1.max(y)],
        });
    }
    out
}

/// Sorted distinct non-zero ids present in an instance plane.
pub fn visible_ids(plane: &ImagePlane) -> Vec<InstanceId> {
    let mut ids: Vec<_> = plane.ids().unwrap_or(&[]).iter().copied().filter(|v| *v != 0).collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// Class label → mask color.
pub type ClassPalette = BTreeMap<String, [u8; 3]>;

/// Assigns each distinct class label a color in order of first appearance
/// among registered instances (by id): the k-th label gets the id color of
/// k, starting at 1.
pub fn default_palette(scene: &SceneGraph) -> ClassPalette {
    let mut palette = ClassPalette::new();
    for label in scene.class_labels().into_values() {
        let k = palette.len() as u32 + 1;
        palette
            .entry(label)
            .or_insert_with(|| encode_id_color(k).expect("fewer than 2^24 labels"));
    }
    palette
}

/// Relabels an instance plane by class. Pixels hold the packed class color
/// (decodable with [`decode_id_color`]); background stays 0.
pub fn class_mask(
    instance: &ImagePlane,
    labels: &BTreeMap<InstanceId, String>,
    palette: &ClassPalette,
) -> Result<ImagePlane, CaptureError> {
    let ids = instance.ids().ok_or(CaptureError::WrongModality)?;
    let mut cache: BTreeMap<InstanceId, u32> = BTreeMap::new();
    let mut out = Vec::with_capacity(ids.len());
    for &id in ids {
        if id == 0 {
            out.push(0);
            continue;
        }
        let v = match cache.get(&id) {
            Some(v) => *v,
            None => {
                let label = labels.get(&id).ok_or(CaptureError::UnmappedId(id))?;
                let color = palette
                    .get(label)
                    .ok_or_else(|| CaptureError::UnmappedClass(label.clone()))?;
                let v = decode_id_color(*color);
                cache.insert(id, v);
                v
            }
        };
        out.push(v);
    }
    Ok(ImagePlane::new(
        instance.width(),
        instance.height(),
        Modality::Class,
        Pixels::Id(out),
    ))
}
