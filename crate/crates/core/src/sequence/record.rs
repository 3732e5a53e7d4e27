use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::capture::OverlapMap;
use crate::scene::{world_aabb, Aabb, EntityRef, Pose6D, SceneGraph};

/// One frame of a sequence: every pose needed to rebuild it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameRecord {
    pub frame_index: u64,
    /// Seconds; stored for reference, replay is driven by index.
    pub timestamp: f64,
    /// Movable actors, skeleton roots and cameras.
    pub actor_poses: BTreeMap<String, Pose6D>,
    /// Local pose of every joint, in joint order.
    pub joint_poses: BTreeMap<String, Vec<Pose6D>>,
    /// Only entities with at least one overlap appear.
    pub overlaps: OverlapMap,
}

/// Reads the current state of `scene` into a record.
pub fn record_frame(scene: &SceneGraph, frame_index: u64, timestamp: f64) -> FrameRecord {
    let mut actor_poses = BTreeMap::new();
    for a in scene.actors().iter().filter(|a| a.movable) {
        actor_poses.insert(a.name.clone(), a.pose);
    }
    for s in scene.skeletons() {
        actor_poses.insert(s.name.clone(), s.pose);
    }
    for c in scene.cameras() {
        actor_poses.insert(c.name.clone(), c.pose);
    }
    let joint_poses = scene
        .skeletons()
        .iter()
        .map(|s| (s.name.clone(), s.joints.iter().map(|j| j.local_pose).collect()))
        .collect();
    FrameRecord {
        frame_index,
        timestamp,
        actor_poses,
        joint_poses,
        overlaps: compute_overlaps(scene),
    }
}

/// Pairwise world-AABB intersection over actors and skeletons, closed
/// intervals, so touching faces overlap. Symmetric and irreflexive; each
/// list follows registration order.
pub fn compute_overlaps(scene: &SceneGraph) -> OverlapMap {
    let boxes: Vec<(&str, Aabb)> = scene
        .entities()
        .iter()
        .filter(|e| !matches!(e, EntityRef::Camera(_)))
        .filter_map(|&e| Some((scene.entity_name(e), world_aabb(scene, e)?)))
        .collect();
    let mut hits: Vec<Vec<usize>> = vec![Vec::new(); boxes.len()];
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            if boxes[i].1.intersects(&boxes[j].1) {
                hits[i].push(j);
                hits[j].push(i);
            }
        }
    }
    hits.into_iter()
        .enumerate()
        .filter(|(_, h)| !h.is_empty())
        .map(|(i, mut h)| {
            h.sort_unstable();
            let names = h.into_iter().map(|j| boxes[j].0.to_string()).collect();
            (boxes[i].0.to_string(), names)
        })
        .collect()
}
