//! Record → rebuild → acquire.
//!
//! A sequence is recorded by calling [`record_frame`] after each scene
//! update and appending to a [`SequenceLog`]. Later the log is replayed
//! frame by frame onto a freshly loaded scene with [`rebuild`], and
//! [`acquire_sequence`] renders every frame at whatever resolution and
//! modality set is wanted.

mod log;
mod record;
mod replay;

use std::path::Path;

use thiserror::Error;

use crate::capture::CaptureError;
use crate::scene::SceneError;

pub use log::{roster, LogHeader, RosterEntry, RosterKind, SequenceLog, FORMAT_VERSION};
pub use record::{compute_overlaps, record_frame, FrameRecord};
pub use replay::{acquire_sequence, apply_record, rebuild};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SequenceError {
    #[error("log line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported log format {0:?}")]
    Version(String),
    #[error("frame index {got} does not follow {previous:?}")]
    NonMonotonic { previous: Option<u64>, got: u64 },
    #[error("roster mismatch: {0}")]
    RosterMismatch(String),
    #[error("frame {0} is not in the log")]
    MissingFrame(u64),
    #[error("skeleton {skeleton:?} has {expected} joints, record has {got}")]
    JointCount {
        skeleton: String,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Capture(#[from] CaptureError),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

impl SequenceError {
    fn io(path: &Path, e: std::io::Error) -> Self {
        SequenceError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        }
    }
}
