//! Byte encodings for image planes.
//!
//! | modality                       | png8                       | png16        | pfm           |
//! |--------------------------------|----------------------------|--------------|---------------|
//! | rgb, albedo                    | RGB, clamp, `⌊255v + ½⌋`   | –            | `PF`, raw     |
//! | shading                        | gray, clamp, `⌊255v + ½⌋`  | –            | `Pf`, raw     |
//! | normal                         | RGB, `⌊255(n+1)/2 + ½⌋`    | –            | `PF`, raw     |
//! | depth                          | –                          | gray, mm     | `Pf`, meters  |
//! | instance, class                | RGB, id color              | –            | –             |
//!
//! All values are linear; PNGs carry no gamma chunk. No-hit normals encode
//! to `(0, 0, 0)`, which no unit normal can produce. Depth saturates at
//! 65.535 m in png16. PFM is little-endian (scale `-1.0`), rows bottom-up.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::render::{ImagePlane, Modality, Pixels};

use super::idcolor::{decode_id_color, encode_id_color};
use super::CaptureError;

pub const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A];

/// Largest depth representable in png16, in meters.
pub const DEPTH_PNG16_MAX_M: f64 = 65.535;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Png8,
    Png16,
    Pfm,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Png8 => "png8",
            Format::Png16 => "png16",
            Format::Pfm => "pfm",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Png8 | Format::Png16 => "png",
            Format::Pfm => "pfm",
        }
    }

    pub fn supports(self, modality: Modality) -> bool {
        use Modality::*;
        matches!(
            (modality, self),
            (Rgb | Albedo | Shading | Normal, Format::Png8 | Format::Pfm)
                | (Depth, Format::Png16 | Format::Pfm)
                | (Instance | Class, Format::Png8)
        )
    }

    /// Default per modality: png16 for depth, png8 for the rest.
    pub fn default_for(modality: Modality) -> Format {
        match modality {
            Modality::Depth => Format::Png16,
            _ => Format::Png8,
        }
    }

    /// The format used for `modality` when the caller prefers PNG or PFM.
    pub fn preferred(modality: Modality, float: bool) -> Format {
        if float && Format::Pfm.supports(modality) {
            Format::Pfm
        } else {
            Format::default_for(modality)
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "png8" => Ok(Format::Png8),
            "png16" => Ok(Format::Png16),
            "pfm" => Ok(Format::Pfm),
            _ => Err(format!("unknown format {s:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EncodedImage {
    pub modality: Modality,
    pub format: Format,
    pub width: u32,
    pub height: u32,
    pub bytes: Vec<u8>,
}

/// Round half up after clamping to [0, 1].
pub fn quantize_unit(v: f32) -> u8 {
    let v = if v.is_nan() { 0.0 } else { (v as f64).clamp(0.0, 1.0) };
    (v * 255.0 + 0.5).floor() as u8
}

pub fn quantize_normal(n: [f32; 3]) -> [u8; 3] {
    if n == [0.0; 3] {
        return [0; 3];
    }
    n.map(|c| ((((c as f64) + 1.0) / 2.0).clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8)
}

pub fn quantize_depth_mm(d: f32) -> u16 {
    let d = if d.is_nan() { 0.0 } else { (d as f64).clamp(0.0, DEPTH_PNG16_MAX_M) };
    (d * 1000.0 + 0.5).floor() as u16
}

pub fn encode_modality(plane: &ImagePlane, format: Format) -> Result<EncodedImage, CaptureError> {
    let modality = plane.modality();
    if !format.supports(modality) {
        return Err(CaptureError::InvalidFormat { modality, format });
    }
    let (w, h) = (plane.width(), plane.height());
    let bytes = match (plane.pixels(), format) {
        (Pixels::Color(px), Format::Png8) => {
            let data: Vec<u8> = if modality == Modality::Normal {
                px.iter().flat_map(|n| quantize_normal(*n)).collect()
            } else {
                px.iter().flat_map(|c| c.map(quantize_unit)).collect()
            };
            write_png(w, h, png::ColorType::Rgb, png::BitDepth::Eight, &data)?
        }
        (Pixels::Scalar(px), Format::Png8) => {
            let data: Vec<u8> = px.iter().map(|v| quantize_unit(*v)).collect();
            write_png(w, h, png::ColorType::Grayscale, png::BitDepth::Eight, &data)?
        }
        (Pixels::Scalar(px), Format::Png16) => {
            let data: Vec<u8> = px
                .iter()
                .flat_map(|d| quantize_depth_mm(*d).to_be_bytes())
                .collect();
            write_png(w, h, png::ColorType::Grayscale, png::BitDepth::Sixteen, &data)?
        }
        (Pixels::Id(px), Format::Png8) => {
            let mut data = Vec::with_capacity(px.len() * 3);
            for &id in px {
                data.extend(encode_id_color(id)?);
            }
            write_png(w, h, png::ColorType::Rgb, png::BitDepth::Eight, &data)?
        }
        (Pixels::Color(px), Format::Pfm) => {
            write_pfm(w, h, 3, px.iter().flat_map(|c| c.iter().copied()))
        }
        (Pixels::Scalar(px), Format::Pfm) => write_pfm(w, h, 1, px.iter().copied()),
        _ => return Err(CaptureError::InvalidFormat { modality, format }),
    };
    Ok(EncodedImage {
        modality,
        format,
        width: w,
        height: h,
        bytes,
    })
}

fn write_png(
    w: u32,
    h: u32,
    color: png::ColorType,
    depth: png::BitDepth,
    data: &[u8],
) -> Result<Vec<u8>, CaptureError> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, w, h);
        enc.set_color(color);
        enc.set_depth(depth);
        let mut writer = enc
            .write_header()
            .map_err(|e| CaptureError::Png(e.to_string()))?;
        writer
            .write_image_data(data)
            .map_err(|e| CaptureError::Png(e.to_string()))?;
    }
    Ok(out)
}

fn write_pfm(w: u32, h: u32, channels: usize, values: impl Iterator<Item = f32>) -> Vec<u8> {
    let tag = if channels == 3 { "PF" } else { "Pf" };
    let mut out = format!("{tag}\n{w} {h}\n-1.0\n").into_bytes();
    let values: Vec<f32> = values.collect();
    let row_len = w as usize * channels;
    for row in values.chunks(row_len.max(1)).rev() {
        for v in row {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// Raw decoded samples, rows top-down.
#[derive(Clone, Debug, PartialEq)]
pub enum Samples {
    U8(Vec<u8>),
    U16(Vec<u16>),
    F32(Vec<f32>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodedImage {
    pub width: u32,
    pub height: u32,
    pub channels: usize,
    pub samples: Samples,
}

/// Decodes PNG (8/16-bit gray or RGB) or PFM bytes.
pub fn decode_image(bytes: &[u8]) -> Result<DecodedImage, CaptureError> {
    if bytes.starts_with(&PNG_SIGNATURE) {
        decode_png(bytes)
    } else if bytes.starts_with(b"PF") || bytes.starts_with(b"Pf") {
        decode_pfm(bytes)
    } else {
        Err(CaptureError::Decode("unrecognized image signature".into()))
    }
}

fn decode_png(bytes: &[u8]) -> Result<DecodedImage, CaptureError> {
    let err = |e: png::DecodingError| CaptureError::Decode(e.to_string());
    let mut reader = png::Decoder::new(bytes).read_info().map_err(err)?;
    let mut buf = vec![0; reader.output_buffer_size()];
    let info = reader.next_frame(&mut buf).map_err(err)?;
    buf.truncate(info.buffer_size());
    let channels = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::Rgb => 3,
        other => return Err(CaptureError::Decode(format!("unsupported color type {other:?}"))),
    };
    let samples = match info.bit_depth {
        png::BitDepth::Eight => Samples::U8(buf),
        png::BitDepth::Sixteen => Samples::U16(
            buf.chunks_exact(2)
                .map(|b| u16::from_be_bytes([b[0], b[1]]))
                .collect(),
        ),
        other => return Err(CaptureError::Decode(format!("unsupported bit depth {other:?}"))),
    };
    Ok(DecodedImage {
        width: info.width,
        height: info.height,
        channels,
        samples,
    })
}

fn decode_pfm(bytes: &[u8]) -> Result<DecodedImage, CaptureError> {
    let bad = |m: &str| CaptureError::Decode(format!("pfm: {m}"));
    // Header: three whitespace-terminated tokens after the tag.
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header not ascii"))?);
    }
    pos += 1; // single whitespace byte ends the header
    let channels = if fields[0] == "PF" { 3 } else { 1 };
    let w: u32 = fields[1].parse().map_err(|_| bad("width"))?;
    let h: u32 = fields[2].parse().map_err(|_| bad("height"))?;
    let scale: f32 = fields[3].parse().map_err(|_| bad("scale"))?;
    let n = w as usize * h as usize * channels;
    let body = bytes.get(pos..pos + n * 4).ok_or_else(|| bad("truncated data"))?;
    let read = |b: &[u8]| {
        let a = [b[0], b[1], b[2], b[3]];
        if scale < 0.0 {
            f32::from_le_bytes(a)
        } else {
            f32::from_be_bytes(a)
        }
    };
    let rows: Vec<Vec<f32>> = body
        .chunks((w as usize * channels * 4).max(1))
        .map(|row| row.chunks_exact(4).map(read).collect())
        .collect();
    let values = rows.into_iter().rev().flatten().collect();
    Ok(DecodedImage {
        width: w,
        height: h,
        channels,
        samples: Samples::F32(values),
    })
}

/// Inverts [`encode_modality`] back to linear values.
pub fn decode_plane(img: &EncodedImage) -> Result<ImagePlane, CaptureError> {
    let d = decode_image(&img.bytes)?;
    if d.width != img.width || d.height != img.height {
        return Err(CaptureError::Decode(format!(
            "payload is {}x{}, header says {}x{}",
            d.width, d.height, img.width, img.height
        )));
    }
    let want_channels = match img.modality.pixel_kind() {
        crate::render::PixelKind::Scalar => 1,
        _ => 3,
    };
    if d.channels != want_channels {
        return Err(CaptureError::Decode(format!(
            "{} needs {want_channels} channels, payload has {}",
            img.modality, d.channels
        )));
    }
    let triples = |v: &[f32]| v.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect::<Vec<_>>();
    let pixels = match (img.modality, &d.samples) {
        (Modality::Instance | Modality::Class, Samples::U8(b)) => Pixels::Id(
            b.chunks_exact(3)
                .map(|c| decode_id_color([c[0], c[1], c[2]]))
                .collect(),
        ),
        (Modality::Normal, Samples::U8(b)) => Pixels::Color(
            b.chunks_exact(3)
                .map(|c| {
                    if c == [0, 0, 0] {
                        [0.0; 3]
                    } else {
                        [c[0], c[1], c[2]].map(|v| v as f32 / 255.0 * 2.0 - 1.0)
                    }
                })
                .collect(),
        ),
        (Modality::Rgb | Modality::Albedo, Samples::U8(b)) => {
            Pixels::Color(triples(&b.iter().map(|v| *v as f32 / 255.0).collect::<Vec<_>>()))
        }
        (Modality::Shading, Samples::U8(b)) => {
            Pixels::Scalar(b.iter().map(|v| *v as f32 / 255.0).collect())
        }
        (Modality::Depth, Samples::U16(b)) => {
            Pixels::Scalar(b.iter().map(|v| (*v as f64 / 1000.0) as f32).collect())
        }
        (m, Samples::F32(v)) if m.pixel_kind() == crate::render::PixelKind::Color => {
            Pixels::Color(triples(v))
        }
        (Modality::Shading | Modality::Depth, Samples::F32(v)) => Pixels::Scalar(v.clone()),
        (m, _) => {
            return Err(CaptureError::Decode(format!("unexpected sample type for {m}")))
        }
    };
    Ok(ImagePlane::new(img.width, img.height, img.modality, pixels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn plane(modality: Modality, pixels: Pixels, w: u32, h: u32) -> ImagePlane {
        ImagePlane::new(w, h, modality, pixels)
    }

    fn first_u8(img: &EncodedImage) -> Vec<u8> {
        match decode_image(&img.bytes).unwrap().samples {
            Samples::U8(v) => v,
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn depth_two_meters_is_2000() {
        let p = plane(Modality::Depth, Pixels::Scalar(vec![2.0, 0.0, 70.0, 0.0004]), 2, 2);
        let img = encode_modality(&p, Format::Png16).unwrap();
        assert!(img.bytes.starts_with(&PNG_SIGNATURE));
        match decode_image(&img.bytes).unwrap().samples {
            Samples::U16(v) => assert_eq!(v, vec![2000, 0, 65535, 0]),
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn up_normal_encodes_to_128_128_255() {
        let p = plane(Modality::Normal, Pixels::Color(vec![[0.0, 0.0, 1.0], [0.0; 3]]), 2, 1);
        let img = encode_modality(&p, Format::Png8).unwrap();
        assert_eq!(first_u8(&img), vec![128, 128, 255, 0, 0, 0]);
        let back = decode_plane(&img).unwrap();
        assert_eq!(back.colors().unwrap()[1], [0.0; 3]);
    }

    #[test]
    fn instance_round_trip_is_exact() {
        let ids = vec![7, 0, 258, 65536 * 3 + 1];
        let p = plane(Modality::Instance, Pixels::Id(ids.clone()), 2, 2);
        let img = encode_modality(&p, Format::Png8).unwrap();
        assert_eq!(&first_u8(&img)[..3], &[7, 0, 0]);
        assert_eq!(decode_plane(&img).unwrap().ids().unwrap(), &ids[..]);
    }

    #[test]
    fn rgb_quantization_rounds_half_up_and_clamps() {
        let p = plane(
            Modality::Rgb,
            Pixels::Color(vec![[0.5, 1.5, -0.2], [1.0 / 510.0, 0.0, 1.0]]),
            2,
            1,
        );
        let img = encode_modality(&p, Format::Png8).unwrap();
        assert_eq!(first_u8(&img), vec![128, 255, 0, 1, 0, 255]);
    }

    #[test]
    fn shading_png8_is_single_channel() {
        let p = plane(Modality::Shading, Pixels::Scalar(vec![0.5, 2.0]), 2, 1);
        let img = encode_modality(&p, Format::Png8).unwrap();
        let d = decode_image(&img.bytes).unwrap();
        assert_eq!(d.channels, 1);
        assert_eq!(d.samples, Samples::U8(vec![128, 255]));
    }

    #[test]
    fn invalid_pairings() {
        let ids = plane(Modality::Instance, Pixels::Id(vec![1]), 1, 1);
        assert!(matches!(
            encode_modality(&ids, Format::Pfm),
            Err(CaptureError::InvalidFormat { .. })
        ));
        let depth = plane(Modality::Depth, Pixels::Scalar(vec![1.0]), 1, 1);
        assert!(encode_modality(&depth, Format::Png8).is_err());
        let rgb = plane(Modality::Rgb, Pixels::Color(vec![[0.0; 3]]), 1, 1);
        assert!(encode_modality(&rgb, Format::Png16).is_err());
    }

    #[test]
    fn pfm_layout() {
        let p = plane(Modality::Depth, Pixels::Scalar(vec![1.0, 2.0, 3.0, 4.0]), 2, 2);
        let img = encode_modality(&p, Format::Pfm).unwrap();
        let header = b"Pf\n2 2\n-1.0\n";
        assert!(img.bytes.starts_with(header));
        // Bottom row first.
        let body = &img.bytes[header.len()..];
        assert_eq!(&body[..4], &3.0f32.to_le_bytes());
        assert_eq!(decode_plane(&img).unwrap(), p);
    }

    #[test]
    fn no_gamma_chunk() {
        let p = plane(Modality::Rgb, Pixels::Color(vec![[0.2; 3]]), 1, 1);
        let img = encode_modality(&p, Format::Png8).unwrap();
        assert!(!img.bytes.windows(4).any(|w| w == b"gAMA" || w == b"sRGB"));
    }

    proptest! {
        #[test]
        fn lossless_and_bounded_round_trips(
            w in 1u32..6, h in 1u32..6, seed in any::<u64>()
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = (w * h) as usize;
            let colors: Vec<[f32; 3]> = (0..n).map(|_| [rng.gen(), rng.gen(), rng.gen()]).collect();
            let depth: Vec<f32> = (0..n).map(|_| rng.gen_range(0.0..60.0)).collect();
            let ids: Vec<u32> = (0..n).map(|_| rng.gen_range(0..1u32 << 24)).collect();

            let rgb = plane(Modality::Rgb, Pixels::Color(colors.clone()), w, h);
            let back = decode_plane(&encode_modality(&rgb, Format::Png8).unwrap()).unwrap();
            for (a, b) in colors.iter().zip(back.colors().unwrap()) {
                for c in 0..3 {
                    prop_assert!((a[c] - b[c]).abs() <= 1.0 / 510.0 + 1e-6);
                }
            }
            prop_assert_eq!(&decode_plane(&encode_modality(&rgb, Format::Pfm).unwrap()).unwrap(), &rgb);

            let dp = plane(Modality::Depth, Pixels::Scalar(depth.clone()), w, h);
            let back = decode_plane(&encode_modality(&dp, Format::Png16).unwrap()).unwrap();
            for (a, b) in depth.iter().zip(back.scalars().unwrap()) {
                prop_assert!((a - b).abs() <= 0.0005 + 1e-6);
            }
            prop_assert_eq!(&decode_plane(&encode_modality(&dp, Format::Pfm).unwrap()).unwrap(), &dp);

            let ip = plane(Modality::Instance, Pixels::Id(ids), w, h);
            prop_assert_eq!(&decode_plane(&encode_modality(&ip, Format::Png8).unwrap()).unwrap(), &ip);
        }
    }
}
