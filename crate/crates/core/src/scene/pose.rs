use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::{normalize_angle, sin_cos_deg, Mat3, Vec3};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoseError {
    #[error("scale components must be > 0, got {0:?}")]
    InvalidScale([f64; 3]),
    #[error("pose contains a non-finite value")]
    NonFinite,
}

/// Euler angles in degrees. Applied yaw (about +Z), then pitch (about the
/// rotated lateral axis, positive lifts the forward axis towards +Z), then
/// roll (about the rotated forward axis).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Rotator {
    pub pitch: f64,
    pub yaw: f64,
    pub roll: f64,
}

impl Rotator {
    pub const ZERO: Rotator = Rotator {
        pitch: 0.0,
        yaw: 0.0,
        roll: 0.0,
    };

    pub fn new(pitch: f64, yaw: f64, roll: f64) -> Self {
        Rotator { pitch, yaw, roll }
    }

    pub fn normalized(self) -> Self {
        Rotator {
            pitch: normalize_angle(self.pitch),
            yaw: normalize_angle(self.yaw),
            roll: normalize_angle(self.roll),
        }
    }

    /// Rotation matrix `Rz(yaw) · Ry(-pitch) · Rx(roll)`.
    pub fn matrix(&self) -> Mat3 {
        let (sp, cp) = sin_cos_deg(self.pitch);
        let (sy, cy) = sin_cos_deg(self.yaw);
        let (sr, cr) = sin_cos_deg(self.roll);
        Mat3 {
            rows: [
                [cy * cp, -cy * sp * sr - sy * cr, -cy * sp * cr + sy * sr],
                [sy * cp, -sy * sp * sr + cy * cr, -sy * sp * cr - cy * sr],
                [sp, cp * sr, cp * cr],
            ],
        }
    }

    /// Recovers Euler angles from a proper rotation matrix. At pitch ±90°
    /// roll is folded into yaw and reported as zero.
    pub fn from_matrix(m: &Mat3) -> Self {
        let r = &m.rows;
        let sp = r[2][0].clamp(-1.0, 1.0);
        let pitch = sp.asin().to_degrees();
        let cp = (r[2][1] * r[2][1] + r[2][2] * r[2][2]).sqrt();
        let (yaw, roll) = if cp > 1e-9 {
            (
                r[1][0].atan2(r[0][0]).to_degrees(),
                r[2][1].atan2(r[2][2]).to_degrees(),
            )
        } else {
            ((-r[0][1]).atan2(r[1][1]).to_degrees(), 0.0)
        };
        Rotator { pitch, yaw, roll }.normalized()
    }

    pub fn forward(&self) -> Vec3 {
        self.matrix().col(0)
    }

    pub fn is_finite(&self) -> bool {
        self.pitch.is_finite() && self.yaw.is_finite() && self.roll.is_finite()
    }
}

impl From<[f64; 3]> for Rotator {
    fn from(a: [f64; 3]) -> Self {
        Rotator::new(a[0], a[1], a[2])
    }
}

impl From<Rotator> for [f64; 3] {
    fn from(r: Rotator) -> Self {
        [r.pitch, r.yaw, r.roll]
    }
}

/// Location, rotation and scale of an actor, joint or camera.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPose", into = "RawPose")]
pub struct Pose6D {
    location: Vec3,
    rotation: Rotator,
    scale: Vec3,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPose {
    #[serde(default)]
    loc: [f64; 3],
    #[serde(default)]
    rot: [f64; 3],
    #[serde(default = "unit_scale")]
    scale: [f64; 3],
}

fn unit_scale() -> [f64; 3] {
    [1.0; 3]
}

impl TryFrom<RawPose> for Pose6D {
    type Error = PoseError;
    fn try_from(raw: RawPose) -> Result<Self, PoseError> {
        Pose6D::new(raw.loc.into(), raw.rot.into(), raw.scale.into())
    }
}

impl From<Pose6D> for RawPose {
    fn from(p: Pose6D) -> Self {
        RawPose {
            loc: p.location.into(),
            rot: p.rotation.into(),
            scale: p.scale.into(),
        }
    }
}

impl Default for Pose6D {
    fn default() -> Self {
        Pose6D::IDENTITY
    }
}

impl Pose6D {
    pub const IDENTITY: Pose6D = Pose6D {
        location: Vec3::ZERO,
        rotation: Rotator::ZERO,
        scale: Vec3::ONE,
    };

    pub fn new(location: Vec3, rotation: Rotator, scale: Vec3) -> Result<Self, PoseError> {
        if !location.is_finite() || !rotation.is_finite() || !scale.is_finite() {
            return Err(PoseError::NonFinite);
        }
        if scale.x <= 0.0 || scale.y <= 0.0 || scale.z <= 0.0 {
            return Err(PoseError::InvalidScale(scale.to_array()));
        }
        Ok(Pose6D {
            location,
            rotation: rotation.normalized(),
            scale,
        })
    }

    pub fn from_location(location: Vec3) -> Self {
        Pose6D {
            location,
            ..Pose6D::IDENTITY
        }
    }

    pub fn location(&self) -> Vec3 {
        self.location
    }

    pub fn rotation(&self) -> Rotator {
        self.rotation
    }

    pub fn scale(&self) -> Vec3 {
        self.scale
    }

    pub fn with_location(mut self, location: Vec3) -> Result<Self, PoseError> {
        if !location.is_finite() {
            return Err(PoseError::NonFinite);
        }
        self.location = location;
        Ok(self)
    }

    pub fn with_rotation(self, rotation: Rotator) -> Result<Self, PoseError> {
        Pose6D::new(self.location, rotation, self.scale)
    }

    pub fn with_scale(self, scale: Vec3) -> Result<Self, PoseError> {
        Pose6D::new(self.location, self.rotation, scale)
    }

    pub fn rotation_matrix(&self) -> Mat3 {
        self.rotation.matrix()
    }

    /// Linear part `R · diag(scale)`.
    pub fn linear(&self) -> Mat3 {
        self.rotation.matrix().scale_cols(self.scale)
    }

    /// Scale, then rotate, then translate.
    pub fn transform_point(&self, p: Vec3) -> Vec3 {
        self.rotation.matrix().mul_vec(p.mul_elem(self.scale)) + self.location
    }

    pub fn transform_vector(&self, v: Vec3) -> Vec3 {
        self.rotation.matrix().mul_vec(v.mul_elem(self.scale))
    }

    pub fn inverse_transform_point(&self, p: Vec3) -> Vec3 {
        self.rotation
            .matrix()
            .transpose()
            .mul_vec(p - self.location)
            .div_elem(self.scale)
    }

    /// `self ∘ child`: the pose of `child` expressed in the frame that
    /// `self` is expressed in. Scales multiply componentwise, so shear from
    /// a non-uniform parent scale under a rotated child is dropped.
    pub fn compose(&self, child: &Pose6D) -> Pose6D {
        let rot = self
            .rotation
            .matrix()
            .mul_mat(&child.rotation.matrix());
        Pose6D {
            location: self.transform_point(child.location),
            rotation: Rotator::from_matrix(&rot),
            scale: self.scale.mul_elem(child.scale),
        }
    }
}

/// Applies `pose` to `point` (scale, rotation, translation).
pub fn world_transform(pose: &Pose6D, point: Vec3) -> Vec3 {
    pose.transform_point(point)
}

/// Rotation whose forward axis points from `from` to `to`, with zero roll.
/// Looking straight up or down keeps `current_yaw`. `None` when the points
/// coincide.
pub fn look_at_rotation(from: Vec3, to: Vec3, current_yaw: f64) -> Option<Rotator> {
    let d = to - from;
    if d.length() < 1e-12 {
        return None;
    }
    let horizontal = d.x.hypot(d.y);
    let yaw = if horizontal == 0.0 {
        current_yaw
    } else {
        d.y.atan2(d.x).to_degrees()
    };
    Some(Rotator::new(d.z.atan2(horizontal).to_degrees(), yaw, 0.0).normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
        (a - b).abs().to_array().iter().all(|c| *c <= tol)
    }

    #[test]
    fn identity_is_noop() {
        let p = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(world_transform(&Pose6D::IDENTITY, p), p);
    }

    #[test]
    fn yaw_quarter_turn() {
        let pose = Pose6D::new(Vec3::ZERO, Rotator::new(0.0, 90.0, 0.0), Vec3::ONE).unwrap();
        assert_eq!(world_transform(&pose, Vec3::X), Vec3::Y);
    }

    #[test]
    fn scale_then_translate() {
        let pose =
            Pose6D::new(Vec3::new(5.0, 0.0, 0.0), Rotator::ZERO, Vec3::splat(2.0)).unwrap();
        assert_eq!(world_transform(&pose, Vec3::X), Vec3::new(7.0, 0.0, 0.0));
    }

    #[test]
    fn positive_pitch_lifts_forward() {
        let r = Rotator::new(90.0, 0.0, 0.0);
        assert_eq!(r.forward(), Vec3::Z);
    }

    #[test]
    fn rejects_bad_scale() {
        assert!(matches!(
            Pose6D::new(Vec3::ZERO, Rotator::ZERO, Vec3::new(0.0, 1.0, 1.0)),
            Err(PoseError::InvalidScale(_))
        ));
        assert_eq!(
            Pose6D::new(Vec3::new(f64::NAN, 0.0, 0.0), Rotator::ZERO, Vec3::ONE),
            Err(PoseError::NonFinite)
        );
    }

    #[test]
    fn compose_with_identity_is_noop() {
        let p = Pose6D::new(
            Vec3::new(1.0, -2.0, 0.5),
            Rotator::new(10.0, 20.0, 30.0),
            Vec3::new(1.0, 2.0, 3.0),
        )
        .unwrap();
        let left = Pose6D::IDENTITY.compose(&p);
        let right = p.compose(&Pose6D::IDENTITY);
        for q in [left, right] {
            assert!(close(q.location(), p.location(), 1e-12));
            assert!((q.rotation().pitch - 10.0).abs() < 1e-9);
            assert!((q.rotation().yaw - 20.0).abs() < 1e-9);
            assert!((q.rotation().roll - 30.0).abs() < 1e-9);
            assert_eq!(q.scale(), p.scale());
        }
    }

    #[test]
    fn gimbal_lock_folds_roll_into_yaw() {
        let r = Rotator::new(90.0, 30.0, 20.0);
        let back = Rotator::from_matrix(&r.matrix());
        assert_eq!(back.roll, 0.0);
        let (a, b) = (r.matrix(), back.matrix());
        for i in 0..3 {
            for j in 0..3 {
                assert!((a.rows[i][j] - b.rows[i][j]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn serde_shape() {
        let p: Pose6D = serde_json::from_str(r#"{"loc":[1,2,3],"rot":[0,270,0]}"#).unwrap();
        assert_eq!(p.rotation().yaw, -90.0);
        assert_eq!(p.scale(), Vec3::ONE);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"loc":[1.0,2.0,3.0],"rot":[0.0,-90.0,0.0],"scale":[1.0,1.0,1.0]}"#);
        assert!(serde_json::from_str::<Pose6D>(r#"{"scale":[1,-1,1]}"#).is_err());
    }

    fn arb_pose() -> impl Strategy<Value = Pose6D> {
        (
            prop::array::uniform3(-50.0f64..50.0),
            prop::array::uniform3(-180.0f64..180.0),
            prop::array::uniform3(0.05f64..10.0),
        )
            .prop_map(|(l, r, s)| Pose6D::new(l.into(), r.into(), s.into()).unwrap())
    }

    proptest! {
        #[test]
        fn inverse_round_trip(pose in arb_pose(), p in prop::array::uniform3(-20.0f64..20.0)) {
            let p: Vec3 = p.into();
            let back = pose.inverse_transform_point(pose.transform_point(p));
            prop_assert!(close(back, p, 1e-6));
        }

        #[test]
        fn euler_matrix_round_trip(r in prop::array::uniform3(-180.0f64..180.0)) {
            let rot = Rotator::from(r);
            let back = Rotator::from_matrix(&rot.matrix());
            let (a, b) = (rot.matrix(), back.matrix());
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert!((a.rows[i][j] - b.rows[i][j]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn look_at_forward_hits_target() {
        let from = Vec3::new(1.0, -2.0, 0.5);
        let to = Vec3::new(-3.0, 4.0, 2.0);
        let r = look_at_rotation(from, to, 0.0).unwrap();
        assert!(close(r.forward(), (to - from).normalized(), 1e-12));
        assert_eq!(r.roll, 0.0);
        assert_eq!(look_at_rotation(from, from, 0.0), None);
        let up = look_at_rotation(Vec3::ZERO, Vec3::Z, 30.0).unwrap();
        assert_eq!((up.pitch, up.yaw, up.roll), (90.0, 30.0, 0.0));
    }
}
