"""Synthetic elicitation data shared by the demo scripts.

Generates a small multi-referent study: a 20-joint skeleton performing
distinct motion patterns per referent, with per-participant phase jitter.
"""

from __future__ import annotations

import numpy as np

from posemap import Corpus, build_corpus, parse_dataset
from posemap.ingest import canonical_json

JOINTS = ["hip_center", "shoulder_center"] + [f"joint{i:02d}" for i in range(2, 20)]

# each referent adopts a distinct whole-body posture (reach up / arms out /
# crouched) plus an oscillation, so referents occupy separate regions of pose
# space the way real elicitation behaviors do
MOTIONS = {
    "wave": dict(joints=tuple(range(2, 10)), posture=(0.4, 2.0, 0.3),
                 freq=2.0, amp=0.6),
    "circle": dict(joints=tuple(range(3, 14)), posture=(2.2, 0.4, -0.6),
                   freq=1.0, amp=0.9),
    "jump": dict(joints=tuple(range(10, 20)), posture=(0.2, -1.8, 0.5),
                 freq=0.5, amp=0.8),
}


def standing_pose() -> np.ndarray:
    pose = np.zeros((20, 3))
    pose[1] = (0.0, 0.5, 0.0)
    pose[2] = (0.0, 0.65, 0.0)
    for j in range(3, 20):
        angle = 2 * np.pi * j / 20
        pose[j] = (0.3 * np.cos(angle), 0.25 + 0.2 * np.sin(angle), 0.1 * np.sin(2 * angle))
    return pose


def dataset_document(dataset_id: str = "demo-study", participants: int = 4,
                     trials: int = 2, seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    sequences = []
    for referent, spec in MOTIONS.items():
        for p in range(participants):
            for trial in range(1, trials + 1):
                length = int(rng.integers(9, 15))
                frames = []
                for t in range(length):
                    pose = standing_pose()
                    wobble = spec["amp"] * np.sin(spec["freq"] * t + 0.4 * p + 0.1 * trial)
                    for j in spec["joints"]:
                        pose[j] += spec["posture"]
                        pose[j, 0] += wobble
                        pose[j, 1] += 0.5 * wobble
                    pose += rng.normal(0, 0.01, size=(20, 3))
                    pose[0] = (0, 0, 0)
                    pose[1] = (0, 0.5, 0)
                    frames.append(pose.tolist())
                sequences.append({"participant": f"p{p:02d}", "referent": referent,
                                  "trial": trial, "frames": frames})
    return {"id": dataset_id, "name": "synthetic demo study", "frame_rate": 30.0,
            "joints": JOINTS, "sequences": sequences}


def demo_corpus(seed: int = 0) -> Corpus:
    return build_corpus([parse_dataset(canonical_json(dataset_document(seed=seed)))])
