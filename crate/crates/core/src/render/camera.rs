use crate::math::Vec3;
use crate::scene::CameraDef;

use super::RenderError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    /// Unit length.
    pub direction: Vec3,
}

impl Ray {
    /// Normalizes `direction`.
    pub fn new(origin: Vec3, direction: Vec3) -> Self {
        Ray {
            origin,
            direction: direction.normalized(),
        }
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }
}

/// Ray through continuous image coordinates `(u, v)`, where `(0, 0)` is
/// the top-left corner of the image and `(width, height)` the bottom-right.
pub fn ray_through(cam: &CameraDef, u: f64, v: f64) -> Ray {
    let f = cam.focal_px();
    let du = u - cam.width as f64 / 2.0;
    let dv = cam.height as f64 / 2.0 - v;
    let local = Vec3::new(f, -du, dv);
    Ray::new(cam.pose.location(), cam.pose.rotation_matrix().mul_vec(local))
}

/// Ray through the center of pixel `(px, py)`.
pub fn primary_ray(cam: &CameraDef, px: u32, py: u32) -> Result<Ray, RenderError> {
    if px >= cam.width || py >= cam.height {
        return Err(RenderError::PixelOutOfRange {
            x: px,
            y: py,
            width: cam.width,
            height: cam.height,
        });
    }
    Ok(ray_through(cam, px as f64 + 0.5, py as f64 + 0.5))
}
