//! Minimal protocol client, a scripted transcript and a malformed-line
//! generator.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpStream};
use std::thread::JoinHandle;

use rand::Rng;
use synthgt::protocol::{Executor, Server};
use synthgt::scene::SceneGraph;

pub struct Client {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

/// One response: the status line and any image payload.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reply {
    pub header: String,
    pub payload: Vec<u8>,
}

impl Reply {
    pub fn is_ok(&self) -> bool {
        self.header == "OK" || self.header.starts_with("OK ")
    }

    pub fn words(&self) -> Vec<&str> {
        self.header.split(' ').collect()
    }
}

impl Client {
    pub fn connect(addr: SocketAddr) -> Client {
        let stream = TcpStream::connect(addr).unwrap();
        stream.set_nodelay(true).unwrap();
        Client {
            reader: BufReader::new(stream.try_clone().unwrap()),
            writer: stream,
        }
    }

    pub fn send_raw(&mut self, bytes: &[u8]) -> Reply {
        let mut line = bytes.to_vec();
        line.push(b'\n');
        self.writer.write_all(&line).unwrap();
        self.read_reply()
    }

    pub fn send(&mut self, line: &str) -> Reply {
        self.send_raw(line.as_bytes())
    }

    pub fn read_reply(&mut self) -> Reply {
        let mut header = String::new();
        self.reader.read_line(&mut header).unwrap();
        assert!(header.ends_with('\n'), "truncated response {header:?}");
        header.pop();
        let w: Vec<&str> = header.split(' ').collect();
        let mut payload = Vec::new();
        if w.len() == 5 && w[0] == "OK" && ["png8", "png16", "pfm"].contains(&w[1]) {
            let n: usize = w[4].parse().unwrap();
            payload.resize(n, 0);
            self.reader.read_exact(&mut payload).unwrap();
        }
        Reply { header, payload }
    }
}

/// Starts a server on an ephemeral port.
pub fn start(scene: SceneGraph) -> (SocketAddr, JoinHandle<Executor>) {
    let server = Server::bind("127.0.0.1:0", Executor::new(scene, "test-scene")).unwrap();
    let addr = server.local_addr().unwrap();
    (addr, std::thread::spawn(move || server.run().unwrap()))
}

pub fn stop(addr: SocketAddr, handle: JoinHandle<Executor>) -> Executor {
    let mut c = Client::connect(addr);
    assert_eq!(c.send("shutdown").header, "OK bye");
    handle.join().unwrap()
}

/// Exercises every verb, including their common error paths.
/// `log_path` receives the `save_log` output.
pub fn transcript(log_path: &str) -> Vec<String> {
    [
        "ping",
        "actor_list",
        "object_list",
        "camera_list",
        "skeletal_list",
        "get_location cube",
        "get_rotation cube",
        "get_scale cube",
        "move cube 2 0 0.5",
        "rotate cube 0 30 0",
        "scale cube 1 1 2",
        "get_location cube",
        "get_rotation cube",
        "get_scale cube",
        "spawn_camera cam1 64 48 90",
        "move cam1 -3 0 1",
        "camera_look_at cam1 2 0 0.5",
        "get_rotation cam1",
        "camera_list",
        "get_rgb cam1",
        "get_depth cam1",
        "get_normal cam1",
        "get_instance_mask cam1",
        "get_albedo cam1",
        "set_format pfm",
        "get_depth cam1",
        "get_rgb cam1",
        "get_instance_mask cam1",
        "set_format png",
        "get_3d_bounding_box cube",
        "get_3d_bounding_box arm",
        "get_3d_bounding_box cam1",
        "record_frame",
        "move arm 0 1 0",
        "record_frame 0.5",
        &format!("save_log {log_path}"),
        "move floor 0 0 1",
        "move ghost 0 0 0",
        "scale cube 0 1 1",
        "move cube 1 nan 0",
        "spawn_camera cam1 64 48 90",
        "spawn_camera cam2 64 48 180",
        "camera_look_at cam1 -3 0 1",
        "get_rgb ghost",
        "set_format jpg",
        "record_frame x",
        "ping extra",
        "frobnicate",
        "",
        "shutdown now",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

/// Scene used by the protocol tests: a fixed floor, a movable cube, a
/// two-joint arm and one camera.
pub fn protocol_scene() -> SceneGraph {
    synthgt::scene::load_scene(
        r#"{
          "background": [0.2, 0.2, 0.25],
          "actors": [
            {"name": "floor", "movable": false, "class": "floor",
             "geometry": {"kind": "plane", "half_extents": [5, 5]}},
            {"name": "cube", "class": "box", "pose": {"loc": [0, 0, 0.5]},
             "geometry": {"kind": "box", "half_extents": [0.5, 0.5, 0.5]},
             "material": {"albedo": [0.8, 0.3, 0.2], "ambient": 0.1}}
          ],
          "skeletons": [{"name": "arm", "class": "robot", "pose": {"loc": [0, 2, 0]},
            "joints": [
              {"name": "base", "parent": -1, "pose": {"loc": [0, 0, 0.3]},
               "geometry": {"kind": "box", "half_extents": [0.1, 0.1, 0.3]}},
              {"name": "tip", "parent": 0, "pose": {"loc": [0, 0, 0.6], "rot": [30, 0, 0]},
               "geometry": {"kind": "sphere", "radius": 0.15}}]}],
          "cameras": [{"name": "cam0", "pose": {"loc": [-4, 0, 1.5], "rot": [-10, 0, 0]},
                       "hfov": 80, "width": 32, "height": 24}],
          "lights": [{"kind": "directional", "direction": [0.3, 0.2, -1], "intensity": 1, "shadows": true}]
        }"#,
    )
    .unwrap()
}

const VERBS: [&str; 24] = [
    "ping", "actor_list", "object_list", "camera_list", "skeletal_list", "move", "rotate",
    "scale", "get_location", "get_rotation", "get_scale", "spawn_camera", "camera_look_at",
    "get_rgb", "get_depth", "get_normal", "get_instance_mask", "get_albedo",
    "get_3d_bounding_box", "set_format", "record_frame", "save_log", "shutdown", "frob",
];

const BAD_NUMBERS: [&str; 8] = ["nan", "inf", "-inf", "1e999", "abc", "0x10", "1,5", "--1"];

/// A request line that must be rejected without touching the scene.
pub fn malformed_line(rng: &mut impl Rng) -> Vec<u8> {
    let mutating = ["move", "rotate", "scale"];
    match rng.gen_range(0..8) {
        // Random bytes with at least one invalid UTF-8 byte.
        0 => {
            let n = rng.gen_range(1..80);
            let mut v: Vec<u8> = (0..n).map(|_| rng.gen_range(0..=255u8)).filter(|b| *b != b'\n').collect();
            let at = rng.gen_range(0..=v.len());
            v.insert(at, 0xFF);
            v
        }
        // Whitespace only.
        1 => (0..rng.gen_range(0..10)).map(|_| [b' ', b'\t', b'\r'][rng.gen_range(0..3)]).collect(),
        // Unknown verb.
        2 => {
            let n = rng.gen_range(1..20);
            let s: String = (0..n).map(|_| rng.gen_range('a'..='z')).collect();
            format!("zz{s} 1 2 3").into_bytes()
        }
        // Known verb, wrong number of arguments.
        3 => {
            let verb = VERBS[rng.gen_range(0..VERBS.len() - 1)];
            let expected: &[usize] = match verb {
                "move" | "rotate" | "scale" | "spawn_camera" | "camera_look_at" => &[4],
                "ping" | "actor_list" | "object_list" | "camera_list" | "skeletal_list" | "shutdown" => &[0],
                "record_frame" => &[0, 1],
                _ => &[1],
            };
            let mut n = rng.gen_range(0..7);
            while expected.contains(&n) {
                n += 1;
            }
            let args: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
            format!("{verb} {}", args.join(" ")).trim_end().as_bytes().to_vec()
        }
        // Mutating verb with a bad number.
        4 => {
            let verb = mutating[rng.gen_range(0..3)];
            let mut nums = vec!["1".to_string(), "2".to_string(), "3".to_string()];
            nums[rng.gen_range(0..3)] = BAD_NUMBERS[rng.gen_range(0..BAD_NUMBERS.len())].to_string();
            format!("{verb} cube {}", nums.join(" ")).into_bytes()
        }
        // Mutating verb on an unknown or static target.
        5 => {
            let verb = mutating[rng.gen_range(0..3)];
            let target = ["floor", "nobody", "cube_", "CUBE"][rng.gen_range(0..4)];
            format!("{verb} {target} 1 1 1").into_bytes()
        }
        // Scale with a non-positive component.
        6 => {
            let bad = ["0", "-1", "-0.5", "0.0"][rng.gen_range(0..4)];
            format!("scale cube 1 {bad} 1").into_bytes()
        }
        // Image or camera verbs against a non-camera.
        _ => {
            let verb = ["get_rgb", "get_depth", "camera_look_at"][rng.gen_range(0..3)];
            if verb == "camera_look_at" {
                b"camera_look_at cube 0 0 0".to_vec()
            } else {
                format!("{verb} cube").into_bytes()
            }
        }
    }
}
