//! JSON Lines sequence log.
//!
//! Line 0 is the header, every later line one [`FrameRecord`]:
//!
//! ```text
//! {"format":"urxp-seq/1","scene":"room.json","roster":[{"name":"cube1","kind":"actor","movable":true},...]}
//! {"frame_index":0,"timestamp":0.0,"actor_poses":{"cube1":{"loc":[..],"rot":[..],"scale":[..]}},"joint_poses":{},"overlaps":{}}
//! ```
//!
//! Floats are written in shortest round-trip form, so parsing a log gives
//! back bit-identical poses.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::scene::{EntityRef, SceneGraph};

use super::record::FrameRecord;
use super::SequenceError;

pub const FORMAT_VERSION: &str = "urxp-seq/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RosterKind {
    Actor,
    Skeleton,
    Camera,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RosterEntry {
    pub name: String,
    pub kind: RosterKind,
    #[serde(default, skip_serializing_if = "is_false")]
    pub movable: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub joints: Vec<String>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Every registered entity in registration order.
pub fn roster(scene: &SceneGraph) -> Vec<RosterEntry> {
    scene
        .entities()
        .iter()
        .map(|&e| match e {
            EntityRef::Actor(i) => {
                let a = &scene.actors()[i];
                RosterEntry {
                    name: a.name.clone(),
                    kind: RosterKind::Actor,
                    movable: a.movable,
                    joints: Vec::new(),
                }
            }
            EntityRef::Skeleton(i) => {
                let s = &scene.skeletons()[i];
                RosterEntry {
                    name: s.name.clone(),
                    kind: RosterKind::Skeleton,
                    movable: true,
                    joints: s.joints.iter().map(|j| j.name.clone()).collect(),
                }
            }
            EntityRef::Camera(i) => RosterEntry {
                name: scene.cameras()[i].name.clone(),
                kind: RosterKind::Camera,
                movable: true,
                joints: Vec::new(),
            },
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogHeader {
    pub format: String,
    /// Path or identifier of the scene file the log was recorded against.
    pub scene: String,
    pub roster: Vec<RosterEntry>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SequenceLog {
    pub header: LogHeader,
    frames: Vec<FrameRecord>,
}

impl SequenceLog {
    pub fn new(scene: &SceneGraph, scene_ref: impl Into<String>) -> Self {
        SequenceLog {
            header: LogHeader {
                format: FORMAT_VERSION.to_string(),
                scene: scene_ref.into(),
                roster: roster(scene),
            },
            frames: Vec::new(),
        }
    }

    pub fn frames(&self) -> &[FrameRecord] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Appends a record. Indices start at 0 and must strictly increase.
    pub fn push(&mut self, record: FrameRecord) -> Result<(), SequenceError> {
        let previous = self.frames.last().map(|f| f.frame_index);
        let ok = match previous {
            None => record.frame_index == 0,
            Some(p) => record.frame_index > p,
        };
        if !ok {
            return Err(SequenceError::NonMonotonic {
                previous,
                got: record.frame_index,
            });
        }
        self.frames.push(record);
        Ok(())
    }

    pub fn frame(&self, index: u64) -> Option<&FrameRecord> {
        self.frames
            .binary_search_by_key(&index, |f| f.frame_index)
            .ok()
            .map(|i| &self.frames[i])
    }

    pub fn check_roster(&self, scene: &SceneGraph) -> Result<(), SequenceError> {
        let expected = roster(scene);
        if self.header.roster == expected {
            return Ok(());
        }
        let logged: Vec<_> = self.header.roster.iter().map(|r| r.name.as_str()).collect();
        let live: Vec<_> = expected.iter().map(|r| r.name.as_str()).collect();
        let detail = match logged.iter().find(|n| !live.contains(n)) {
            Some(missing) => format!("log references {missing:?}, which the scene lacks"),
            None => match live.iter().find(|n| !logged.contains(n)) {
                Some(extra) => format!("scene has {extra:?}, which the log lacks"),
                None => "entity kinds, order or joints differ".to_string(),
            },
        };
        Err(SequenceError::RosterMismatch(detail))
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        out.push('\n');
        for f in &self.frames {
            out.push_str(&serde_json::to_string(f).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, SequenceError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or(SequenceError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let header: LogHeader = serde_json::from_str(first).map_err(|e| SequenceError::Parse {
            line: 1,
            msg: e.to_string(),
        })?;
        if header.format != FORMAT_VERSION {
            return Err(SequenceError::Version(header.format));
        }
        let mut log = SequenceLog {
            header,
            frames: Vec::new(),
        };
        for (i, line) in lines {
            let record: FrameRecord = serde_json::from_str(line).map_err(|e| SequenceError::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
            log.push(record)?;
        }
        Ok(log)
    }

    pub fn write(&self, path: &Path) -> Result<(), SequenceError> {
        fs::write(path, self.to_jsonl()).map_err(|e| SequenceError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self, SequenceError> {
        let text = fs::read_to_string(path).map_err(|e| SequenceError::io(path, e))?;
        Self::parse(&text)
    }
}
