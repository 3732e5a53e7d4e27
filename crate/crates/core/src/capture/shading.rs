use crate::render::{ImagePlane, Modality, Pixels};

use super::CaptureError;

pub const DEFAULT_EPSILON: f64 = 1e-4;

/// Recovers scalar shading from a composed image and its albedo:
/// `S = mean_c(I_c / (R_c + ε))`.
pub fn compute_shading(
    rgb: &ImagePlane,
    albedo: &ImagePlane,
    epsilon: f64,
) -> Result<ImagePlane, CaptureError> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(CaptureError::InvalidEpsilon(epsilon));
    }
    if !rgb.same_size(albedo) {
        return Err(CaptureError::DimensionMismatch {
            a: (rgb.width(), rgb.height()),
            b: (albedo.width(), albedo.height()),
        });
    }
    let (Some(i), Some(r)) = (rgb.colors(), albedo.colors()) else {
        return Err(CaptureError::WrongModality);
    };
    let s = i
        .iter()
        .zip(r)
        .map(|(i, r)| {
            let sum: f64 = (0..3).map(|c| i[c] as f64 / (r[c] as f64 + epsilon)).sum();
            (sum / 3.0) as f32
        })
        .collect();
    Ok(ImagePlane::new(
        rgb.width(),
        rgb.height(),
        Modality::Shading,
        Pixels::Scalar(s),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn color(m: Modality, v: Vec<[f32; 3]>) -> ImagePlane {
        ImagePlane::new(v.len() as u32, 1, m, Pixels::Color(v))
    }

    #[test]
    fn identity_lighting() {
        let r = color(Modality::Albedo, vec![[0.5, 0.2, 0.9], [0.15, 0.3, 1.0]]);
        let i = color(Modality::Rgb, r.colors().unwrap().to_vec());
        let s = compute_shading(&i, &r, DEFAULT_EPSILON).unwrap();
        assert!(s.scalars().unwrap().iter().all(|v| (v - 1.0).abs() < 1e-3));
    }

    #[test]
    fn black_image_has_zero_shading() {
        let r = color(Modality::Albedo, vec![[0.5; 3]; 4]);
        let i = color(Modality::Rgb, vec![[0.0; 3]; 4]);
        let s = compute_shading(&i, &r, DEFAULT_EPSILON).unwrap();
        assert!(s.scalars().unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn errors() {
        let r = color(Modality::Albedo, vec![[0.5; 3]; 2]);
        let i = color(Modality::Rgb, vec![[0.5; 3]; 3]);
        assert!(matches!(
            compute_shading(&i, &r, 1e-4),
            Err(CaptureError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            compute_shading(&r, &r, 0.0),
            Err(CaptureError::InvalidEpsilon(_))
        ));
    }
}
