use std::path::Path;

use crate::capture::{encode_modality, Format};
use crate::math::Vec3;
use crate::render::{render_instance_by_override, render_modality, Modality, Snapshot};
use crate::scene::{
    look_at_rotation, oriented_bbox_3d, CameraDef, EntityKind, Rotator, SceneError, SceneGraph,
};
use crate::sequence::{record_frame, roster, SequenceLog};

use super::response::{fmt_num, Response};

/// Longest accepted request line, newline excluded.
pub const MAX_LINE_BYTES: usize = 64 * 1024;

/// Owns the scene and executes one request line at a time. The server runs
/// a single executor, so every command from every connection lands in one
/// total order.
#[derive(Debug)]
pub struct Executor {
    scene: SceneGraph,
    scene_ref: String,
    log: SequenceLog,
    float_output: bool,
    shutdown: bool,
}

const IMAGE_VERBS: [(&str, Modality); 5] = [
    ("get_rgb", Modality::Rgb),
    ("get_depth", Modality::Depth),
    ("get_normal", Modality::Normal),
    ("get_instance_mask", Modality::Instance),
    ("get_albedo", Modality::Albedo),
];

impl Executor {
    pub fn new(scene: SceneGraph, scene_ref: impl Into<String>) -> Self {
        let scene_ref = scene_ref.into();
        let log = SequenceLog::new(&scene, scene_ref.clone());
        Executor {
            scene,
            scene_ref,
            log,
            float_output: false,
            shutdown: false,
        }
    }

    pub fn scene(&self) -> &SceneGraph {
        &self.scene
    }

    pub fn log(&self) -> &SequenceLog {
        &self.log
    }

    pub fn shutdown_requested(&self) -> bool {
        self.shutdown
    }

    /// Executes one request line (without its trailing newline).
    pub fn execute(&mut self, line: &[u8]) -> Response {
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        if line.len() > MAX_LINE_BYTES {
            return Response::err("line_too_long", format!("request exceeds {MAX_LINE_BYTES} bytes"));
        }
        let Ok(text) = std::str::from_utf8(line) else {
            return Response::err("bad_encoding", "request is not valid UTF-8");
        };
        let mut words = text.split_ascii_whitespace();
        let Some(verb) = words.next() else {
            return Response::err("empty_command", "no verb given");
        };
        let args: Vec<&str> = words.collect();
        match self.dispatch(verb, &args) {
            Ok(r) => r,
            Err(r) => r,
        }
    }

    fn dispatch(&mut self, verb: &str, args: &[&str]) -> Result<Response, Response> {
        if let Some(&(_, modality)) = IMAGE_VERBS.iter().find(|(v, _)| *v == verb) {
            arity(verb, args, 1)?;
            return self.get_image(args[0], modality);
        }
        match verb {
            "ping" => {
                arity(verb, args, 0)?;
                Ok(Response::ok("pong"))
            }
            "actor_list" => self.list(verb, args, |_| true),
            "object_list" => self.list(verb, args, |k| k == EntityKind::Actor),
            "camera_list" => self.list(verb, args, |k| k == EntityKind::Camera),
            "skeletal_list" => self.list(verb, args, |k| k == EntityKind::Skeleton),
            "move" | "rotate" | "scale" => {
                arity(verb, args, 4)?;
                let v = parse_vec3(&args[1..])?;
                self.set_component(verb, args[0], v)
            }
            "get_location" | "get_rotation" | "get_scale" => {
                arity(verb, args, 1)?;
                let pose = self
                    .scene
                    .pose(args[0])
                    .ok_or_else(|| unknown_actor(args[0]))?;
                let v = match verb {
                    "get_location" => pose.location().to_array(),
                    "get_rotation" => pose.rotation().into(),
                    _ => pose.scale().to_array(),
                };
                Ok(Response::ok(join_nums(&v)))
            }
            "spawn_camera" => {
                arity(verb, args, 4)?;
                let w = parse_dim(args[1])?;
                let h = parse_dim(args[2])?;
                let hfov = parse_f64(args[3])?;
                self.scene
                    .add_camera(CameraDef::new(args[0], w, h, hfov))
                    .map_err(scene_err)?;
                Ok(Response::ok(args[0]))
            }
            "camera_look_at" => {
                arity(verb, args, 4)?;
                let target = Vec3::from(parse_vec3(&args[1..])?);
                self.look_at(args[0], target)
            }
            "get_3d_bounding_box" => {
                arity(verb, args, 1)?;
                let e = self.scene.lookup(args[0]).ok_or_else(|| unknown_actor(args[0]))?;
                if e.kind() == EntityKind::Camera {
                    return Err(Response::err("no_geometry", format!("{} is a camera", args[0])));
                }
                let bbox = oriented_bbox_3d(&self.scene, e).ok_or_else(|| {
                    Response::err("no_geometry", format!("{} has no attached geometry", args[0]))
                })?;
                let nums: Vec<f64> = std::iter::once(bbox.centroid)
                    .chain(bbox.corners)
                    .flat_map(|p| p.to_array())
                    .collect();
                Ok(Response::ok(join_nums(&nums)))
            }
            "set_format" => {
                arity(verb, args, 1)?;
                self.float_output = match args[0] {
                    "png" => false,
                    "pfm" => true,
                    other => {
                        return Err(Response::err(
                            "invalid_format",
                            format!("expected png or pfm, got {other}"),
                        ))
                    }
                };
                Ok(Response::ok(args[0]))
            }
            "record_frame" => {
                if args.len() > 1 {
                    return Err(bad_arity(verb, "0 or 1", args.len()));
                }
                self.record(args.first().copied())
            }
            "save_log" => {
                arity(verb, args, 1)?;
                self.log
                    .write(Path::new(args[0]))
                    .map_err(|e| Response::err("io_error", e.to_string()))?;
                Ok(Response::ok(self.log.len().to_string()))
            }
            "shutdown" => {
                arity(verb, args, 0)?;
                self.shutdown = true;
                Ok(Response::ok("bye"))
            }
            _ => Err(Response::err(
                "unknown_command",
                format!("unknown verb {}", printable(verb)),
            )),
        }
    }

    fn list(
        &self,
        verb: &str,
        args: &[&str],
        keep: impl Fn(EntityKind) -> bool,
    ) -> Result<Response, Response> {
        arity(verb, args, 0)?;
        let names: Vec<&str> = self
            .scene
            .entities()
            .iter()
            .filter(|e| keep(e.kind()))
            .map(|&e| self.scene.entity_name(e))
            .collect();
        let mut text = names.len().to_string();
        for n in names {
            text.push(' ');
            text.push_str(n);
        }
        Ok(Response::ok(text))
    }

    fn set_component(&mut self, verb: &str, name: &str, v: [f64; 3]) -> Result<Response, Response> {
        let pose = self.scene.pose(name).ok_or_else(|| unknown_actor(name))?;
        let updated = match verb {
            "move" => pose.with_location(v.into()),
            "rotate" => pose.with_rotation(Rotator::from(v)),
            _ => pose.with_scale(v.into()),
        }
        .map_err(|e| Response::err("invalid_scale", e.to_string()))?;
        self.scene.set_pose(name, updated).map_err(scene_err)?;
        Ok(Response::ok(""))
    }

    fn look_at(&mut self, name: &str, target: Vec3) -> Result<Response, Response> {
        let cam = self.camera(name)?;
        let rotation = look_at_rotation(cam.pose.location(), target, cam.pose.rotation().yaw)
            .ok_or_else(|| {
                Response::err("degenerate_target", "target coincides with the camera location")
            })?;
        let pose = cam
            .pose
            .with_rotation(rotation)
            .map_err(|e| Response::err("invalid_number", e.to_string()))?;
        self.scene.set_pose(name, pose).map_err(scene_err)?;
        let r: [f64; 3] = pose.rotation().into();
        Ok(Response::ok(join_nums(&r)))
    }

    fn camera(&self, name: &str) -> Result<&CameraDef, Response> {
        self.scene
            .camera(name)
            .ok_or_else(|| Response::err("unknown_camera", format!("no camera named {}", printable(name))))
    }

    fn get_image(&self, name: &str, modality: Modality) -> Result<Response, Response> {
        let cam = self.camera(name)?;
        let snapshot = Snapshot::new(&self.scene);
        let render_err = |e: &dyn std::fmt::Display| Response::err("render_error", e.to_string());
        let plane = match modality {
            Modality::Instance => render_instance_by_override(&snapshot, cam),
            m => render_modality(&snapshot, cam, m),
        }
        .map_err(|e| render_err(&e))?;
        let format = Format::preferred(modality, self.float_output);
        let img = encode_modality(&plane, format).map_err(|e| render_err(&e))?;
        Ok(Response::image(img))
    }

    fn record(&mut self, timestamp: Option<&str>) -> Result<Response, Response> {
        let current = roster(&self.scene);
        if current != self.log.header.roster {
            if !self.log.is_empty() {
                return Err(Response::err(
                    "roster_changed",
                    "entities were added since recording started; save_log and restart",
                ));
            }
            self.log = SequenceLog::new(&self.scene, self.scene_ref.clone());
        }
        let index = self.log.frames().last().map_or(0, |f| f.frame_index + 1);
        let timestamp = match timestamp {
            Some(t) => parse_f64(t)?,
            None => index as f64,
        };
        self.log
            .push(record_frame(&self.scene, index, timestamp))
            .map_err(|e| Response::err("record_error", e.to_string()))?;
        Ok(Response::ok(index.to_string()))
    }
}

fn arity(verb: &str, args: &[&str], n: usize) -> Result<(), Response> {
    if args.len() == n {
        Ok(())
    } else {
        Err(bad_arity(verb, &n.to_string(), args.len()))
    }
}

fn bad_arity(verb: &str, expected: &str, got: usize) -> Response {
    Response::err("bad_arity", format!("{verb} takes {expected} arguments, got {got}"))
}

fn unknown_actor(name: &str) -> Response {
    Response::err("unknown_actor", format!("no entity named {}", printable(name)))
}

fn scene_err(e: SceneError) -> Response {
    let code = match e {
        SceneError::UnknownEntity(_) => "unknown_actor",
        SceneError::NotMovable(_) => "not_movable",
        SceneError::DuplicateName(_) => "duplicate_name",
        SceneError::InvalidName(_) => "invalid_name",
        SceneError::InvalidCamera(_) => "invalid_camera",
        SceneError::InvalidScale { .. } => "invalid_scale",
        _ => "invalid_argument",
    };
    Response::err(code, e.to_string())
}

fn parse_f64(s: &str) -> Result<f64, Response> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Response::err(
            "invalid_number",
            format!("{} is not a finite number", printable(s)),
        )),
    }
}

fn parse_vec3(args: &[&str]) -> Result<[f64; 3], Response> {
    Ok([parse_f64(args[0])?, parse_f64(args[1])?, parse_f64(args[2])?])
}

fn parse_dim(s: &str) -> Result<u32, Response> {
    s.parse::<u32>().map_err(|_| {
        Response::err(
            "invalid_number",
            format!("{} is not a non-negative integer", printable(s)),
        )
    })
}

fn join_nums(v: &[f64]) -> String {
    v.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(" ")
}

/// Echoes client text into a single-line message, truncated and with
/// control characters escaped.
fn printable(s: &str) -> String {
    let mut out: String = s.chars().take(64).flat_map(char::escape_debug).collect();
    if s.chars().count() > 64 {
        out.push_str("...");
    }
    out
}
