use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A ground-truth image type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Rgb,
    Albedo,
    Shading,
    Depth,
    Normal,
    Instance,
    Class,
}

impl Modality {
    pub const ALL: [Modality; 7] = [
        Modality::Rgb,
        Modality::Albedo,
        Modality::Shading,
        Modality::Depth,
        Modality::Normal,
        Modality::Instance,
        Modality::Class,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Modality::Rgb => "rgb",
            Modality::Albedo => "albedo",
            Modality::Shading => "shading",
            Modality::Depth => "depth",
            Modality::Normal => "normal",
            Modality::Instance => "instance",
            Modality::Class => "class",
        }
    }

    pub fn pixel_kind(self) -> PixelKind {
        match self {
            Modality::Rgb | Modality::Albedo | Modality::Normal => PixelKind::Color,
            Modality::Shading | Modality::Depth => PixelKind::Scalar,
            Modality::Instance | Modality::Class => PixelKind::Id,
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Modality {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Modality::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown modality {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PixelKind {
    Color,
    Scalar,
    Id,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Pixels {
    Color(Vec<[f32; 3]>),
    Scalar(Vec<f32>),
    Id(Vec<u32>),
}

impl Pixels {
    pub fn len(&self) -> usize {
        match self {
            Pixels::Color(v) => v.len(),
            Pixels::Scalar(v) => v.len(),
            Pixels::Id(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> PixelKind {
        match self {
            Pixels::Color(_) => PixelKind::Color,
            Pixels::Scalar(_) => PixelKind::Scalar,
            Pixels::Id(_) => PixelKind::Id,
        }
    }
}

/// One modality of one view, row-major from the top-left pixel, in linear
/// units: RGB and albedo as linear color, depth in meters (0 = no hit),
/// normals as world-space unit vectors (zero = no hit), ids as integers.
#[derive(Clone, Debug, PartialEq)]
pub struct ImagePlane {
    width: u32,
    height: u32,
    modality: Modality,
    pixels: Pixels,
}

impl ImagePlane {
    /// Panics if the payload kind or length does not fit the modality and
    /// size.
    pub fn new(width: u32, height: u32, modality: Modality, pixels: Pixels) -> Self {
        assert_eq!(
            pixels.kind(),
            modality.pixel_kind(),
            "{modality} plane with wrong payload kind"
        );
        assert_eq!(pixels.len(), width as usize * height as usize, "payload size");
        ImagePlane {
            width,
            height,
            modality,
            pixels,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn modality(&self) -> Modality {
        self.modality
    }

    pub fn pixels(&self) -> &Pixels {
        &self.pixels
    }

    pub fn index(&self, x: u32, y: u32) -> usize {
        y as usize * self.width as usize + x as usize
    }

    pub fn colors(&self) -> Option<&[[f32; 3]]> {
        match &self.pixels {
            Pixels::Color(v) => Some(v),
            _ => None,
        }
    }

    pub fn scalars(&self) -> Option<&[f32]> {
        match &self.pixels {
            Pixels::Scalar(v) => Some(v),
            _ => None,
        }
    }

    pub fn ids(&self) -> Option<&[u32]> {
        match &self.pixels {
            Pixels::Id(v) => Some(v),
            _ => None,
        }
    }

    pub fn same_size(&self, o: &ImagePlane) -> bool {
        self.width == o.width && self.height == o.height
    }
}

/// Per-pixel 8-bit id buffer written during the visibility pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StencilBuffer {
    pub width: u32,
    pub height: u32,
    pub values: Vec<u8>,
}

impl StencilBuffer {
    /// Sorted distinct values present.
    pub fn histogram(&self) -> Vec<(u8, usize)> {
        let mut counts = [0usize; 256];
        for &v in &self.values {
            counts[v as usize] += 1;
        }
        (0..=255u8)
            .zip(counts)
            .filter(|(_, c)| *c > 0)
            .collect()
    }
}
