//! Job configuration file (JSON).
//!
//! ```json
//! {
//!   "scene": "scenes/room.json",
//!   "out": "out/run1",
//!   "frames": 60,
//!   "fps": 30,
//!   "format": "png",
//!   "epsilon": 0.0001,
//!   "seed": 7,
//!   "modalities": ["rgb", "depth", "instance"],
//!   "captures": [
//!     {"camera": "cam0", "modalities": ["rgb", "depth"], "stereo_baseline": 0.1},
//!     {"camera": "cam1", "modalities": ["instance"], "formats": {"depth": "pfm"}}
//!   ],
//!   "motions": [
//!     {"kind": "keyframes", "target": "cube1", "keys": [
//!       {"frame": 0, "pose": {"loc": [0, 0, 0]}},
//!       {"frame": 59, "pose": {"loc": [2, 0, 0], "rot": [0, 90, 0]}}]},
//!     {"kind": "turntable", "camera": "cam0", "center": [0, 0, 0], "radius": 3, "height": 1},
//!     {"kind": "random_walk", "target": "ball", "step": 0.05}
//!   ]
//! }
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use synthgt::capture::{CaptureSet, Format, MaskStrategy, DEFAULT_EPSILON};
use synthgt::render::Modality;
use synthgt::scene::SceneGraph;

use crate::motion::Motion;

/// Modalities captured when neither the config nor the command line names any.
pub const DEFAULT_MODALITIES: [Modality; 3] = [Modality::Rgb, Modality::Depth, Modality::Instance];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Png,
    Pfm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaptureConfig {
    pub camera: String,
    #[serde(default)]
    pub modalities: Vec<Modality>,
    #[serde(default)]
    pub formats: BTreeMap<Modality, Format>,
    #[serde(default)]
    pub stereo_baseline: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default)]
    pub scene: Option<PathBuf>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Frame count; derived from the motions when absent.
    #[serde(default)]
    pub frames: Option<u64>,
    #[serde(default = "default_fps")]
    pub fps: f64,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub port: Option<u16>,
    #[serde(default)]
    pub mask_strategy: MaskStrategy,
    /// Modalities for captures that list none.
    #[serde(default)]
    pub modalities: Vec<Modality>,
    /// Every camera in the scene is captured when empty.
    #[serde(default)]
    pub captures: Vec<CaptureConfig>,
    #[serde(default)]
    pub motions: Vec<Motion>,
}

fn default_fps() -> f64 {
    30.0
}

impl Default for JobConfig {
    fn default() -> Self {
        JobConfig {
            scene: None,
            out: None,
            frames: None,
            fps: default_fps(),
            format: OutputFormat::default(),
            epsilon: None,
            seed: None,
            port: None,
            mask_strategy: MaskStrategy::default(),
            modalities: Vec::new(),
            captures: Vec::new(),
            motions: Vec::new(),
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub scene: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub frames: Option<u64>,
    pub modalities: Option<Vec<Modality>>,
    pub format: Option<OutputFormat>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub port: Option<u16>,
}

impl JobConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: JobConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        // Relative paths in a config file are relative to the file.
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.scene, &mut cfg.out].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>, overrides: Overrides) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => JobConfig::from_file(p)?,
            None => JobConfig::default(),
        };
        cfg.apply(overrides);
        Ok(cfg)
    }

    pub fn apply(&mut self, o: Overrides) {
        if o.scene.is_some() {
            self.scene = o.scene;
        }
        if o.out.is_some() {
            self.out = o.out;
        }
        if o.frames.is_some() {
            self.frames = o.frames;
        }
        if let Some(f) = o.format {
            self.format = f;
        }
        if o.epsilon.is_some() {
            self.epsilon = o.epsilon;
        }
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        if o.port.is_some() {
            self.port = o.port;
        }
        if let Some(m) = o.modalities {
            for c in &mut self.captures {
                c.modalities = m.clone();
            }
            self.modalities = m;
        }
    }

    pub fn scene_path(&self) -> Result<&Path> {
        match &self.scene {
            Some(p) => Ok(p),
            None => bail!("no scene given (use --scene or a config file)"),
        }
    }

    pub fn out_dir(&self) -> Result<&Path> {
        match &self.out {
            Some(p) => Ok(p),
            None => bail!("no output directory given (use --out or a config file)"),
        }
    }

    /// Capture sets resolved against `scene` and checked.
    pub fn capture_sets(&self, scene: &SceneGraph) -> Result<Vec<CaptureSet>> {
        let configs: Vec<CaptureConfig> = if self.captures.is_empty() {
            scene
                .cameras()
                .iter()
                .map(|c| CaptureConfig {
                    camera: c.name.clone(),
                    modalities: Vec::new(),
                    formats: BTreeMap::new(),
                    stereo_baseline: None,
                })
                .collect()
        } else {
            self.captures.clone()
        };
        if configs.is_empty() {
            bail!("nothing to capture: the scene has no cameras");
        }
        let mut sets = Vec::with_capacity(configs.len());
        for c in configs {
            let modalities = if !c.modalities.is_empty() {
                c.modalities.clone()
            } else if !self.modalities.is_empty() {
                self.modalities.clone()
            } else {
                DEFAULT_MODALITIES.to_vec()
            };
            let mut set = CaptureSet::new(&c.camera, modalities)
                .with_epsilon(self.epsilon.unwrap_or(DEFAULT_EPSILON))
                .with_mask_strategy(self.mask_strategy);
            if self.format == OutputFormat::Pfm {
                set = set.with_float_output();
            }
            for (&m, &f) in &c.formats {
                set = set.with_format(m, f);
            }
            if let Some(b) = c.stereo_baseline {
                set = set.with_stereo_baseline(b);
            }
            set.validate(scene)
                .with_context(|| format!("capture set for camera {:?}", c.camera))?;
            sets.push(set);
        }
        Ok(sets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_example() {
        let doc = include_str!("config.rs")
            .lines()
            .skip_while(|l| !l.starts_with("//! ```json"))
            .skip(1)
            .take_while(|l| !l.starts_with("//! ```"))
            .map(|l| l.trim_start_matches("//!"))
            .collect::<Vec<_>>()
            .join("\n");
        let cfg: JobConfig = serde_json::from_str(&doc).unwrap();
        assert_eq!(cfg.frames, Some(60));
        assert_eq!(cfg.captures.len(), 2);
        assert_eq!(cfg.motions.len(), 3);
    }

    #[test]
    fn overrides_win() {
        let mut cfg = JobConfig {
            frames: Some(3),
            ..JobConfig::default()
        };
        cfg.apply(Overrides {
            frames: Some(9),
            format: Some(OutputFormat::Pfm),
            ..Overrides::default()
        });
        assert_eq!(cfg.frames, Some(9));
        assert_eq!(cfg.format, OutputFormat::Pfm);
    }
}
