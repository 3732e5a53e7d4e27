use crate::scene::LightKind;

use super::camera::Ray;
use super::trace::{HitRecord, Snapshot};

/// Offset applied along the normal before casting shadow rays.
pub const SHADOW_BIAS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shaded {
    /// `albedo ⊙ shading`, computed in `f32` so the product is exact
    /// against the stored albedo and shading planes.
    pub rgb: [f32; 3],
    pub albedo: [f32; 3],
    /// Unclamped scalar light factor.
    pub shading: f32,
}

/// Lambertian white-light shading:
/// `S = ambient + Σ intensity · max(0, n·l) · visibility · attenuation`.
pub fn shade(snapshot: &Snapshot, hit: &HitRecord) -> Shaded {
    let mut s = hit.ambient;
    for light in &snapshot.lights {
        let (to_light, light_pos, attenuation) = match light.kind {
            LightKind::Directional { direction } => (-direction, None, 1.0),
            LightKind::Point {
                position,
                attenuation,
            } => {
                let delta = position - hit.point;
                let d = delta.length();
                if d == 0.0 {
                    continue;
                }
                (delta / d, Some(position), 1.0 / (1.0 + attenuation * d * d))
            }
        };
        let cos = hit.normal.dot(to_light);
        if cos <= 0.0 || light.intensity == 0.0 {
            continue;
        }
        if light.casts_shadows {
            let origin = hit.point + hit.normal * SHADOW_BIAS;
            let shadow = Ray {
                origin,
                direction: to_light,
            };
            let t_max = light_pos.map_or(f64::INFINITY, |p| (p - origin).length());
            if snapshot.occluded(&shadow, t_max) {
                continue;
            }
        }
        s += light.intensity * cos * attenuation;
    }
    let shading = s as f32;
    let albedo = hit.albedo.map(|c| c as f32);
    Shaded {
        rgb: albedo.map(|c| c * shading),
        albedo,
        shading,
    }
}
