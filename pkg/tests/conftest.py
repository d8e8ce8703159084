"""Shared fixtures: synthetic corpora, pose factories, a desk-scale trained model."""

from __future__ import annotations

import json
import time

import numpy as np
import pytest

from posemap.ingest import build_corpus, parse_dataset
from posemap.skeleton import JOINT_COUNT
from posemap.vae import VAEConfig, train

# distinct whole-body posture offsets keep each referent's poses in a
# separate region of pose space, as real elicitation behaviors are
REFERENT_MOTIONS = {
    "wave": dict(joints=tuple(range(2, 10)), posture=(0.4, 2.0, 0.3),
                 freq=2.0, amp=0.6),
    "circle": dict(joints=tuple(range(3, 14)), posture=(2.2, 0.4, -0.6),
                   freq=1.0, amp=0.9),
    "jump": dict(joints=tuple(range(10, 20)), posture=(0.2, -1.8, 0.5),
                 freq=0.5, amp=0.8),
}


def base_skeleton() -> np.ndarray:
    """A plausible standing pose: hip at origin, shoulder center above it."""
    pose = np.zeros((JOINT_COUNT, 3))
    pose[1] = (0.0, 0.5, 0.0)             # shoulder center (torso length 0.5)
    pose[2] = (0.0, 0.65, 0.0)            # head
    for j in range(3, JOINT_COUNT):
        angle = 2 * np.pi * j / JOINT_COUNT
        pose[j] = (0.3 * np.cos(angle), 0.25 + 0.2 * np.sin(angle), 0.1 * np.sin(2 * angle))
    return pose


def motion_frames(referent: str, participant_index: int, trial: int, length: int,
                  rng: np.random.Generator) -> np.ndarray:
    spec = REFERENT_MOTIONS[referent]
    frames = []
    phase = 0.37 * participant_index + 0.11 * trial
    for t in range(length):
        pose = base_skeleton().copy()
        wobble = spec["amp"] * np.sin(spec["freq"] * t + phase)
        for j in spec["joints"]:
            pose[j] += spec["posture"]
            pose[j, 0] += wobble
            pose[j, 1] += 0.5 * wobble
        pose += rng.normal(0.0, 0.01, size=pose.shape)
        # keep the anchors clean so the torso never degenerates
        pose[0] = (0.0, 0.0, 0.0)
        pose[1] = (0.0, 0.5, 0.0)
        frames.append(pose)
    return np.stack(frames)


def make_dataset_doc(dataset_id: str, participants: int = 4, trials: int = 2,
                     referents=("wave", "circle", "jump"), seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    joints = [f"joint{i:02d}" for i in range(JOINT_COUNT)]
    joints[0], joints[1] = "hip_center", "shoulder_center"
    sequences = []
    for referent in referents:
        for p in range(participants):
            for trial in range(1, trials + 1):
                length = int(rng.integers(8, 14))
                frames = motion_frames(referent, p, trial, length, rng)
                sequences.append({
                    "participant": f"p{p:02d}",
                    "referent": referent,
                    "trial": trial,
                    "frames": frames.tolist(),
                })
    return {"id": dataset_id, "name": dataset_id, "frame_rate": 30.0,
            "joints": joints, "sequences": sequences}


@pytest.fixture(scope="session")
def demo_corpus():
    doc_a = make_dataset_doc("studyA", seed=1)
    doc_b = make_dataset_doc("studyB", participants=2, seed=2)
    fragments = [parse_dataset(json.dumps(doc_a)), parse_dataset(json.dumps(doc_b))]
    return build_corpus(fragments)


def three_cluster_poses(n_per_cluster: int = 200, seed: int = 7):
    """Synthetic pose matrix: three well-separated prototypes plus jitter."""
    rng = np.random.default_rng(seed)
    prototypes = rng.normal(0.0, 1.0, size=(3, 60)) * 2.0
    data, labels = [], []
    for c in range(3):
        data.append(prototypes[c] + rng.normal(0.0, 0.05, size=(n_per_cluster, 60)))
        labels.extend([c] * n_per_cluster)
    return np.concatenate(data), np.array(labels)


@pytest.fixture(scope="session")
def pose_clusters_600():
    return three_cluster_poses()


@pytest.fixture(scope="session")
def desk_model(pose_clusters_600):
    """Desk-scale reference training run, shared across test modules.

    Returns (model, data, labels, seconds).
    """
    data, labels = pose_clusters_600
    start = time.monotonic()
    model = train(data, VAEConfig())
    seconds = time.monotonic() - start
    return model, data, labels, seconds


def grouped_sequences(groups: int, per_group: int, seed: int,
                      center_scale: float = 60.0, noise: float = 0.2):
    """Variable-length 60-D sequences in well-separated groups.

    Group centers sit far apart relative to the within-group noise so that
    inter-group DTW dominates intra-group DTW by a wide margin. Returns
    (data: id -> (T, 60), labels: id -> group).
    """
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, 1.0, size=(groups, 60)) * center_scale
    data, labels = {}, {}
    for g in range(groups):
        for i in range(per_group):
            length = int(rng.integers(6, 12))
            drift = rng.normal(0.0, noise, size=(length, 60)).cumsum(axis=0) * 0.2
            sid = f"g{g}-s{i:02d}"
            data[sid] = centers[g] + drift + rng.normal(0.0, noise, size=(length, 60))
            labels[sid] = g
    return data, labels
