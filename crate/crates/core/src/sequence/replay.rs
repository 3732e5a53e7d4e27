use std::ops::Range;
use std::path::Path;

use crate::capture::{write_frame, CaptureSet};
use crate::scene::{EntityRef, SceneGraph};

use super::log::SequenceLog;
use super::record::FrameRecord;
use super::SequenceError;

/// Applies one frame's poses to `scene`. Entities absent from the record
/// keep their current pose.
pub fn rebuild(scene: &mut SceneGraph, log: &SequenceLog, frame_index: u64) -> Result<(), SequenceError> {
    log.check_roster(scene)?;
    let record = log
        .frame(frame_index)
        .ok_or(SequenceError::MissingFrame(frame_index))?;
    apply_record(scene, record)
}

pub fn apply_record(scene: &mut SceneGraph, record: &FrameRecord) -> Result<(), SequenceError> {
    for (name, pose) in &record.actor_poses {
        scene.set_pose(name, *pose)?;
    }
    for (name, poses) in &record.joint_poses {
        let Some(EntityRef::Skeleton(i)) = scene.lookup(name) else {
            return Err(SequenceError::RosterMismatch(format!("{name:?} is not a skeleton")));
        };
        let expected = scene.skeletons()[i].joints.len();
        if poses.len() != expected {
            return Err(SequenceError::JointCount {
                skeleton: name.clone(),
                expected,
                got: poses.len(),
            });
        }
        for (k, pose) in poses.iter().enumerate() {
            scene.set_joint_local_pose(name, k, *pose)?;
        }
    }
    Ok(())
}

/// Rebuilds each frame in `range` and captures it with every set. All
/// frames and sets are checked before anything is written; each frame is
/// committed atomically. Returns the indices written.
pub fn acquire_sequence(
    scene: &mut SceneGraph,
    log: &SequenceLog,
    sets: &[CaptureSet],
    range: Range<u64>,
    root: &Path,
) -> Result<Vec<u64>, SequenceError> {
    log.check_roster(scene)?;
    for set in sets {
        set.validate(scene)?;
    }
    let records: Vec<&FrameRecord> = range
        .map(|i| log.frame(i).ok_or(SequenceError::MissingFrame(i)))
        .collect::<Result<_, _>>()?;
    let mut written = Vec::with_capacity(records.len());
    for record in records {
        apply_record(scene, record)?;
        write_frame(scene, sets, &record.overlaps, record.frame_index, root)?;
        written.push(record.frame_index);
    }
    Ok(written)
}
