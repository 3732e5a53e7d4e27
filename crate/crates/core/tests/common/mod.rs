//! Scene fixtures and independent oracles shared by the integration tests
//! and the acceptance suite.
#![allow(dead_code)]

pub mod wire;

use nalgebra::{Matrix4, Rotation3, Vector3};
use rand::Rng;
use synthgt::math::Vec3;
use synthgt::scene::{
    Actor, Albedo, CameraDef, Geometry, Joint, Light, LightKind, Material, Pose6D, Rotator,
    SceneGraph, SkeletalActor,
};

pub const BACKGROUND: [f64; 3] = [0.3, 0.4, 0.5];

pub fn pose(loc: [f64; 3], rot: [f64; 3], scale: [f64; 3]) -> Pose6D {
    Pose6D::new(loc.into(), Rotator::new(rot[0], rot[1], rot[2]), scale.into()).unwrap()
}

pub fn at(loc: [f64; 3]) -> Pose6D {
    Pose6D::from_location(loc.into())
}

pub fn camera(name: &str, w: u32, h: u32, hfov: f64, loc: [f64; 3], rot: [f64; 3]) -> CameraDef {
    CameraDef::new(name, w, h, hfov).with_pose(pose(loc, rot, [1.0; 3]))
}

pub fn sun(direction: [f64; 3], intensity: f64, shadows: bool) -> Light {
    Light {
        kind: LightKind::Directional {
            direction: direction.into(),
        },
        intensity,
        casts_shadows: shadows,
    }
}

pub fn lamp(position: [f64; 3], intensity: f64, attenuation: f64) -> Light {
    Light {
        kind: LightKind::Point {
            position: position.into(),
            attenuation,
        },
        intensity,
        casts_shadows: true,
    }
}

pub fn solid(rgb: [f64; 3]) -> Material {
    Material::constant(rgb, 0.15)
}

pub fn sphere(name: &str, r: f64, loc: [f64; 3], rgb: [f64; 3]) -> Actor {
    Actor::new(name, Geometry::Sphere { radius: r })
        .with_pose(at(loc))
        .with_material(solid(rgb))
}

pub fn cube(name: &str, half: [f64; 3], p: Pose6D, rgb: [f64; 3]) -> Actor {
    Actor::new(name, Geometry::Box { half_extents: half.into() })
        .with_pose(p)
        .with_material(solid(rgb))
}

pub fn floor(rgb: [f64; 3]) -> Actor {
    Actor::new("floor", Geometry::Plane { half_extents: [8.0, 8.0] })
        .with_material(solid(rgb))
        .with_class("floor")
        .with_movable(false)
}

fn base(w: u32, h: u32) -> SceneGraph {
    let mut s = SceneGraph::new();
    s.set_background(BACKGROUND);
    s.add_camera(camera("cam", w, h, 60.0, [-5.0, 0.0, 2.0], [-15.0, 0.0, 0.0]))
        .unwrap();
    s
}

pub fn sphere_on_plane(w: u32, h: u32) -> SceneGraph {
    let mut s = base(w, h);
    s.add_actor(floor([0.6, 0.6, 0.6])).unwrap();
    s.add_actor(sphere("ball", 1.0, [0.0, 0.0, 1.0], [0.8, 0.3, 0.2]).with_class("ball"))
        .unwrap();
    s.add_light(sun([0.4, 0.3, -1.0], 0.9, true)).unwrap();
    s
}

pub fn shadowed_box(w: u32, h: u32) -> SceneGraph {
    let mut s = base(w, h);
    s.add_actor(floor([0.7, 0.7, 0.6])).unwrap();
    s.add_actor(cube("crate", [0.6, 0.6, 0.6], pose([0.0, 0.0, 0.6], [0.0, 30.0, 0.0], [1.0; 3]), [0.3, 0.5, 0.8]))
        .unwrap();
    s.add_light(lamp([1.5, 2.5, 3.0], 6.0, 0.2)).unwrap();
    s.add_light(sun([0.2, -0.6, -1.0], 0.4, true)).unwrap();
    s
}

pub fn checker_floor(w: u32, h: u32) -> SceneGraph {
    let mut s = base(w, h);
    let checker = Material {
        albedo: Albedo::Checker {
            even: [0.9, 0.9, 0.85],
            odd: [0.2, 0.25, 0.2],
            cell: 0.5,
        },
        ambient: 0.2,
    };
    s.add_actor(floor([0.5; 3]).with_material(checker)).unwrap();
    s.add_light(sun([0.3, 0.1, -1.0], 0.8, true)).unwrap();
    s
}

/// Floor plus nine seeded spheres and boxes.
pub fn clutter(w: u32, h: u32, rng: &mut impl Rng) -> SceneGraph {
    let mut s = base(w, h);
    s.add_actor(floor([0.55, 0.6, 0.5])).unwrap();
    for i in 0..9 {
        let rgb = [rng.gen_range(0.15..0.95), rng.gen_range(0.15..0.95), rng.gen_range(0.15..0.95)];
        let (x, y) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.5..2.5));
        let a = if i % 2 == 0 {
            let r = rng.gen_range(0.2..0.6);
            sphere(&format!("obj{i}"), r, [x, y, r], rgb)
        } else {
            let half = [rng.gen_range(0.2..0.5), rng.gen_range(0.2..0.5), rng.gen_range(0.2..0.5)];
            let yaw = rng.gen_range(-180.0..180.0);
            cube(&format!("obj{i}"), half, pose([x, y, half[2]], [0.0, yaw, 0.0], [1.0; 3]), rgb)
        };
        s.add_actor(a.with_class(if i % 2 == 0 { "ball" } else { "box" })).unwrap();
    }
    s.add_light(sun([0.5, 0.4, -1.0], 0.7, true)).unwrap();
    s.add_light(lamp([-1.0, -2.0, 3.0], 3.0, 0.1)).unwrap();
    s
}

/// Floor plus a three-segment arm.
pub fn skeletal_chain(w: u32, h: u32) -> SceneGraph {
    let mut s = base(w, h);
    s.add_actor(floor([0.6, 0.6, 0.65])).unwrap();
    let limb = |name: &str, parent, p, rgb| {
        Joint::new(name, parent, p)
            .with_attachment(Geometry::Box { half_extents: Vec3::new(0.15, 0.15, 0.4) }, solid(rgb))
    };
    let joints = vec![
        limb("base", None, at([0.0, 0.0, 0.4]), [0.8, 0.6, 0.2]),
        limb("elbow", Some(0), pose([0.0, 0.0, 0.8], [30.0, 0.0, 0.0], [1.0; 3]), [0.3, 0.7, 0.7]),
        limb("wrist", Some(1), pose([0.0, 0.0, 0.8], [0.0, 45.0, 20.0], [1.0; 3]), [0.7, 0.3, 0.6]),
    ];
    s.add_skeleton(SkeletalActor::new("arm", at([0.0, 0.0, 0.0]), joints).with_class("robot"))
        .unwrap();
    s.add_light(sun([0.3, 0.5, -1.0], 0.85, true)).unwrap();
    s
}

/// The five decomposition scenes, by name.
pub fn decomposition_scenes(w: u32, h: u32, rng: &mut impl Rng) -> Vec<(&'static str, SceneGraph)> {
    vec![
        ("sphere_plane", sphere_on_plane(w, h)),
        ("shadowed_box", shadowed_box(w, h)),
        ("checker_floor", checker_floor(w, h)),
        ("clutter", clutter(w, h, rng)),
        ("skeletal_chain", skeletal_chain(w, h)),
    ]
}

/// `n` boxes placed at random in a 10 m cube, some rotated in yaw.
pub fn random_boxes(n: usize, rng: &mut impl Rng) -> SceneGraph {
    let mut s = SceneGraph::new();
    for i in 0..n {
        let half = [rng.gen_range(0.2..1.5), rng.gen_range(0.2..1.5), rng.gen_range(0.2..1.5)];
        let loc = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        let yaw = if rng.gen_bool(0.5) { rng.gen_range(-180.0..180.0) } else { 0.0 };
        s.add_actor(cube(&format!("box{i}"), half, pose(loc, [0.0, yaw, 0.0], [1.0; 3]), [0.5; 3]))
            .unwrap();
    }
    s
}

/// A random skeleton: each joint's parent is any earlier joint, scales are
/// uniform.
pub fn random_skeleton(rng: &mut impl Rng) -> SkeletalActor {
    let mut rot = || [rng.gen_range(-180.0..180.0), rng.gen_range(-180.0..180.0), rng.gen_range(-180.0..180.0)];
    let r0 = rot();
    let r: Vec<[f64; 3]> = (0..12).map(|_| rot()).collect();
    let n = rng.gen_range(2..=12);
    let root = pose(
        [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)],
        r0,
        [rng.gen_range(0.5..2.0); 3],
    );
    let joints = (0..n)
        .map(|k| {
            let parent = if k == 0 { None } else { Some(rng.gen_range(0..k)) };
            let loc = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let p = pose(loc, r[k], [rng.gen_range(0.7..1.4); 3]);
            Joint::new(format!("j{k}"), parent, p)
        })
        .collect();
    SkeletalActor::new("chain", root, joints)
}

/// 4×4 homogeneous matrix `T · R · S` built with nalgebra.
pub fn pose_matrix(p: &Pose6D) -> Matrix4<f64> {
    let r = p.rotation();
    let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), r.yaw.to_radians())
        * Rotation3::from_axis_angle(&Vector3::y_axis(), (-r.pitch).to_radians())
        * Rotation3::from_axis_angle(&Vector3::x_axis(), r.roll.to_radians());
    let l = p.location();
    let s = p.scale();
    Matrix4::new_translation(&Vector3::new(l.x, l.y, l.z))
        * rot.to_homogeneous()
        * Matrix4::new_nonuniform_scaling(&Vector3::new(s.x, s.y, s.z))
}

/// World matrices of every joint by explicit matrix products up the chain.
pub fn joint_matrices_oracle(sk: &SkeletalActor) -> Vec<Matrix4<f64>> {
    let root = pose_matrix(&sk.pose);
    let mut world: Vec<Matrix4<f64>> = Vec::new();
    for j in &sk.joints {
        let parent = j.parent.map_or(root, |p| world[p]);
        world.push(parent * pose_matrix(&j.local_pose));
    }
    world
}

/// Largest absolute entry difference.
pub fn max_abs_diff(a: &Matrix4<f64>, b: &Matrix4<f64>) -> f64 {
    (a - b).abs().max()
}

/// Pairwise overlaps by brute force: world AABBs from the eight transformed
/// box corners, then a closed-interval test on each axis.
pub fn overlap_oracle(scene: &SceneGraph) -> Vec<(String, Vec<String>)> {
    let boxes: Vec<(String, [f64; 3], [f64; 3])> = scene
        .actors()
        .iter()
        .map(|a| {
            let Geometry::Box { half_extents: h } = a.geometry else {
                panic!("oracle handles boxes only");
            };
            let m = pose_matrix(&a.pose);
            let mut lo = [f64::INFINITY; 3];
            let mut hi = [f64::NEG_INFINITY; 3];
            for i in 0..8 {
                let c = nalgebra::Vector4::new(
                    if i & 1 == 0 { -h.x } else { h.x },
                    if i & 2 == 0 { -h.y } else { h.y },
                    if i & 4 == 0 { -h.z } else { h.z },
                    1.0,
                );
                let w = m * c;
                for k in 0..3 {
                    lo[k] = lo[k].min(w[k]);
                    hi[k] = hi[k].max(w[k]);
                }
            }
            (a.name.clone(), lo, hi)
        })
        .collect();
    let mut out = Vec::new();
    for (i, a) in boxes.iter().enumerate() {
        let hits: Vec<String> = boxes
            .iter()
            .enumerate()
            .filter(|(j, b)| *j != i && (0..3).all(|k| a.1[k] <= b.2[k] && b.1[k] <= a.2[k]))
            .map(|(_, b)| b.0.clone())
            .collect();
        if !hits.is_empty() {
            out.push((a.0.clone(), hits));
        }
    }
    out.sort();
    out
}

/// Scene with `n` small spheres in a row, ids 1..=n.
pub fn many_instances(n: usize, w: u32, h: u32) -> SceneGraph {
    let mut s = SceneGraph::new();
    s.add_camera(camera("cam", w, h, 90.0, [-3.0, 0.0, 0.0], [0.0; 3])).unwrap();
    let side = (n as f64).sqrt().ceil() as usize;
    for i in 0..n {
        let (r, c) = (i / side, i % side);
        let y = (c as f64 - side as f64 / 2.0) * 0.2;
        let z = (side as f64 / 2.0 - r as f64) * 0.2;
        s.add_actor(sphere(&format!("s{i}"), 0.09, [0.0, y, z], [0.5; 3])).unwrap();
    }
    s
}

/// Frontal checkerboard wall at `distance` in front of a stereo camera with
/// focal length `width / 2` (90° field of view).
pub fn stereo_wall(width: u32, height: u32, distance: f64, baseline: f64, cell: f64) -> SceneGraph {
    let mut s = SceneGraph::new();
    s.set_background(BACKGROUND);
    s.add_camera(camera("stereo", width, height, 90.0, [0.0; 3], [0.0; 3]).with_stereo_baseline(baseline))
        .unwrap();
    let checker = Material {
        albedo: Albedo::Checker {
            even: [0.9, 0.9, 0.9],
            odd: [0.15, 0.15, 0.15],
            cell,
        },
        ambient: 1.0,
    };
    // Pitch 90 turns the plane normal from +Z to -X, facing the camera.
    s.add_actor(
        Actor::new("wall", Geometry::Plane { half_extents: [20.0, 20.0] })
            .with_pose(pose([distance, 0.0, 0.0], [90.0, 0.0, 0.0], [1.0; 3]))
            .with_material(checker),
    )
    .unwrap();
    s
}

/// Checker corners at pixel-boundary precision: `(x, y)` is the shared
/// corner of pixels `(x-1, y-1)`, `(x, y-1)`, `(x-1, y)`, `(x, y)` when
/// the diagonals agree and differ from each other. `sign` tells the two
/// corner types apart.
pub fn checker_corners(gray: &[f32], width: u32, height: u32) -> Vec<(u32, u32, bool)> {
    let at = |x: u32, y: u32| gray[(y * width + x) as usize];
    let mut out = Vec::new();
    for y in 1..height {
        for x in 1..width {
            let (a, b, c, d) = (at(x - 1, y - 1), at(x, y - 1), at(x - 1, y), at(x, y));
            if a == d && b == c && a != b {
                out.push((x, y, a > b));
            }
        }
    }
    out
}

/// Horizontal disparities `x_left - x_right` of matched corners: same row,
/// same type, right corner within `max_disp` pixels to the left.
pub fn corner_disparities(
    left: &[(u32, u32, bool)],
    right: &[(u32, u32, bool)],
    max_disp: u32,
) -> Vec<i64> {
    let mut out = Vec::new();
    for &(xl, yl, kl) in left {
        let m = right
            .iter()
            .filter(|&&(xr, yr, kr)| yr == yl && kr == kl && xr <= xl && xl - xr <= max_disp)
            .map(|&(xr, _, _)| xl as i64 - xr as i64)
            .min();
        if let Some(d) = m {
            out.push(d);
        }
    }
    out
}

pub fn median(mut v: Vec<i64>) -> Option<i64> {
    v.sort_unstable();
    v.get(v.len() / 2).copied()
}
