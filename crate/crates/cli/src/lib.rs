//! Batch generation, log replay and the scene server behind the `synthgt`
//! binary.

pub mod config;
pub mod motion;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use synthgt::capture::write_frame;
use synthgt::protocol::{Executor, Server, DEFAULT_PORT};
use synthgt::scene::{load_scene_file, SceneGraph};
use synthgt::sequence::{acquire_sequence, record_frame, SequenceLog};

use config::JobConfig;
use motion::{job_length, MotionPlayer};

/// File name of the sequence log written next to the frames.
pub const LOG_FILE: &str = "sequence.jsonl";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summary {
    pub frames: Vec<u64>,
    pub files: usize,
}

pub fn load_scene(path: &Path) -> Result<SceneGraph> {
    load_scene_file(path).with_context(|| format!("loading scene {}", path.display()))
}

/// Plays the configured motions, captures every frame and writes the
/// sequence log to `<out>/sequence.jsonl`.
pub fn cmd_generate(cfg: &JobConfig) -> Result<Summary> {
    let scene_path = cfg.scene_path()?;
    let out = cfg.out_dir()?;
    let mut scene = load_scene(scene_path)?;
    let sets = cfg.capture_sets(&scene)?;
    let frames = cfg.frames.unwrap_or_else(|| job_length(&cfg.motions));
    anyhow::ensure!(cfg.fps.is_finite() && cfg.fps > 0.0, "fps must be > 0");
    let mut player = MotionPlayer::new(cfg.motions.clone(), &scene, frames, cfg.seed.unwrap_or(0))?;

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut log = SequenceLog::new(&scene, scene_path.display().to_string());
    let mut summary = Summary {
        frames: Vec::new(),
        files: 0,
    };
    for k in 0..frames {
        player.apply(&mut scene, k)?;
        let record = record_frame(&scene, k, k as f64 / cfg.fps);
        let written = write_frame(&scene, &sets, &record.overlaps, k, out)
            .with_context(|| format!("writing frame {k}"))?;
        log::info!("frame {k}: {} files", written.files.len());
        summary.files += written.files.len();
        summary.frames.push(k);
        log.push(record)?;
    }
    log.write(&out.join(LOG_FILE))?;
    Ok(summary)
}

/// Scene used to replay `log`: the explicit one if given, else the path
/// recorded in the log header (tried as-is, then relative to the log).
pub fn replay_scene_path(explicit: Option<&Path>, log: &SequenceLog, log_path: &Path) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    let recorded = PathBuf::from(&log.header.scene);
    if recorded.is_absolute() || recorded.exists() {
        return recorded;
    }
    log_path.parent().unwrap_or(Path::new("")).join(recorded)
}

/// Re-renders every frame of a sequence log. Nothing is written if the
/// scene does not match the log's roster.
pub fn cmd_replay(cfg: &JobConfig, log_path: &Path) -> Result<Summary> {
    let log = SequenceLog::read(log_path)?;
    let scene_path = replay_scene_path(cfg.scene.as_deref(), &log, log_path);
    let out = cfg.out_dir()?;
    let mut scene = load_scene(&scene_path)?;
    log.check_roster(&scene)?;
    let sets = cfg.capture_sets(&scene)?;
    let Some(last) = log.frames().last() else {
        return Ok(Summary {
            frames: Vec::new(),
            files: 0,
        });
    };
    let range = log.frames()[0].frame_index..last.frame_index + 1;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let frames = acquire_sequence(&mut scene, &log, &sets, range, out)?;
    let mut per_frame = 1;
    for s in &sets {
        per_frame += s.modalities.len() * s.cameras(&scene)?.len();
    }
    Ok(Summary {
        files: frames.len() * per_frame,
        frames,
    })
}

/// Binds the server and serves until a client sends `shutdown`. `on_bound`
/// receives the actual listen address before the first connection is
/// accepted.
pub fn cmd_serve(
    scene_path: &Path,
    host: &str,
    port: Option<u16>,
    on_bound: impl FnOnce(std::net::SocketAddr),
) -> Result<Executor> {
    let scene = load_scene(scene_path)?;
    let executor = Executor::new(scene, scene_path.display().to_string());
    let server = Server::bind((host, port.unwrap_or(DEFAULT_PORT)), executor)
        .with_context(|| format!("binding {host}:{}", port.unwrap_or(DEFAULT_PORT)))?;
    on_bound(server.local_addr()?);
    Ok(server.run()?)
}
