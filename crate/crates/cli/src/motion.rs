//! Scripted motion generators: keyframe interpolation, camera turntables
//! and seeded random walks.

use anyhow::{bail, ensure, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use synthgt::math::{normalize_angle, sin_cos_deg, Vec3};
use synthgt::scene::{look_at_rotation, Pose6D, Rotator, SceneGraph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Keyframe {
    pub frame: u64,
    pub pose: Pose6D,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Motion {
    /// Piecewise-linear interpolation between keyed poses; held constant
    /// before the first and after the last key.
    Keyframes { target: String, keys: Vec<Keyframe> },
    /// Circular orbit of a camera around `center`, always looking at it.
    /// One revolution takes `period` frames (default: the whole job).
    Turntable {
        camera: String,
        center: [f64; 3],
        radius: f64,
        #[serde(default)]
        height: f64,
        #[serde(default)]
        start_yaw: f64,
        #[serde(default)]
        period: Option<u64>,
    },
    /// Uniform steps in `[-step, step]` per axis each frame, starting from
    /// the target's pose in the scene file.
    RandomWalk {
        target: String,
        step: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
}

impl Motion {
    pub fn target(&self) -> &str {
        match self {
            Motion::Keyframes { target, .. } | Motion::RandomWalk { target, .. } => target,
            Motion::Turntable { camera, .. } => camera,
        }
    }

    /// Frames this motion needs to play out in full.
    pub fn natural_length(&self) -> u64 {
        match self {
            Motion::Keyframes { keys, .. } => keys.last().map_or(1, |k| k.frame + 1),
            Motion::Turntable { period, .. } => period.unwrap_or(1),
            Motion::RandomWalk { .. } => 1,
        }
    }
}

/// Frame count for a job: the longest motion, at least 1.
pub fn job_length(motions: &[Motion]) -> u64 {
    motions.iter().map(Motion::natural_length).max().unwrap_or(1).max(1)
}

fn lerp_pose(a: &Pose6D, b: &Pose6D, t: f64) -> Result<Pose6D> {
    let lerp = |x: f64, y: f64| x + (y - x) * t;
    let angle = |x: f64, y: f64| normalize_angle(x + normalize_angle(y - x) * t);
    let (ra, rb) = (a.rotation(), b.rotation());
    let loc = a.location() + (b.location() - a.location()) * t;
    let scale = Vec3::new(
        lerp(a.scale().x, b.scale().x),
        lerp(a.scale().y, b.scale().y),
        lerp(a.scale().z, b.scale().z),
    );
    let rot = Rotator::new(angle(ra.pitch, rb.pitch), angle(ra.yaw, rb.yaw), angle(ra.roll, rb.roll));
    Ok(Pose6D::new(loc, rot, scale)?)
}

pub fn keyframe_pose(keys: &[Keyframe], frame: u64) -> Result<Pose6D> {
    let Some(first) = keys.first() else {
        bail!("keyframe motion has no keys");
    };
    if frame <= first.frame {
        return Ok(first.pose);
    }
    for w in keys.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if frame <= b.frame {
            let t = (frame - a.frame) as f64 / (b.frame - a.frame) as f64;
            return lerp_pose(&a.pose, &b.pose, t);
        }
    }
    Ok(keys[keys.len() - 1].pose)
}

/// Camera location and rotation of a turntable at `frame`.
pub fn turntable_pose(
    center: Vec3,
    radius: f64,
    height: f64,
    start_yaw: f64,
    period: u64,
    frame: u64,
    scale: Vec3,
) -> Result<Pose6D> {
    let angle = start_yaw + 360.0 * (frame % period) as f64 / period as f64;
    let (s, c) = sin_cos_deg(angle);
    let loc = center + Vec3::new(radius * c, radius * s, height);
    let rot = look_at_rotation(loc, center, 0.0).expect("radius > 0 keeps the camera off center");
    Ok(Pose6D::new(loc, rot, scale)?)
}

/// Plays a list of motions frame by frame. Frames must be visited in
/// increasing order starting at 0.
pub struct MotionPlayer {
    motions: Vec<Motion>,
    length: u64,
    walks: Vec<Option<(ChaCha8Rng, Pose6D)>>,
    next_frame: u64,
}

impl MotionPlayer {
    pub fn new(motions: Vec<Motion>, scene: &SceneGraph, length: u64, seed: u64) -> Result<Self> {
        let mut walks = Vec::with_capacity(motions.len());
        for (i, m) in motions.iter().enumerate() {
            let Some(pose) = scene.pose(m.target()) else {
                bail!("motion {i} targets {:?}, which is not in the scene", m.target());
            };
            if let Some(a) = scene.actor(m.target()) {
                ensure!(a.movable, "motion {i} targets static actor {:?}", m.target());
            }
            walks.push(None);
            match m {
                Motion::Keyframes { keys, .. } => {
                    ensure!(!keys.is_empty(), "motion {i}: keyframes need at least one key");
                    ensure!(
                        keys.windows(2).all(|w| w[0].frame < w[1].frame),
                        "motion {i}: key frames must strictly increase"
                    );
                }
                Motion::Turntable { camera, radius, period, .. } => {
                    ensure!(scene.camera(camera).is_some(), "motion {i}: {camera:?} is not a camera");
                    ensure!(radius.is_finite() && *radius > 0.0, "motion {i}: radius must be > 0");
                    ensure!(period.map_or(true, |p| p > 0), "motion {i}: period must be > 0");
                }
                Motion::RandomWalk { step, seed: own, .. } => {
                    ensure!(step.is_finite() && *step >= 0.0, "motion {i}: step must be >= 0");
                    let mut rng = ChaCha8Rng::seed_from_u64(own.unwrap_or(seed));
                    rng.set_stream(i as u64);
                    walks[i] = Some((rng, pose));
                }
            }
        }
        Ok(MotionPlayer {
            motions,
            length: length.max(1),
            walks,
            next_frame: 0,
        })
    }

    /// Sets every motion target to its pose at `frame`.
    pub fn apply(&mut self, scene: &mut SceneGraph, frame: u64) -> Result<()> {
        ensure!(frame == self.next_frame, "frames must be played in order");
        self.next_frame += 1;
        for (i, m) in self.motions.iter().enumerate() {
            let pose = match m {
                Motion::Keyframes { keys, .. } => keyframe_pose(keys, frame)?,
                Motion::Turntable {
                    camera,
                    center,
                    radius,
                    height,
                    start_yaw,
                    period,
                } => {
                    let scale = scene.pose(camera).map_or(Vec3::ONE, |p| p.scale());
                    turntable_pose(
                        Vec3::from(*center),
                        *radius,
                        *height,
                        *start_yaw,
                        period.unwrap_or(self.length),
                        frame,
                        scale,
                    )?
                }
                Motion::RandomWalk { step, .. } => {
                    let (rng, pose) = self.walks[i].as_mut().expect("walk state");
                    if frame > 0 {
                        let d = Vec3::new(
                            rng.gen_range(-*step..=*step),
                            rng.gen_range(-*step..=*step),
                            rng.gen_range(-*step..=*step),
                        );
                        *pose = pose.with_location(pose.location() + d)?;
                    }
                    *pose
                }
            };
            scene.set_pose(m.target(), pose)?;
        }
        Ok(())
    }
}
