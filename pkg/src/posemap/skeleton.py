"""Single-frame pose primitives: flattening, anchor joints, normalization.

A pose is a (20, 3) float array of joint coordinates. Flattened form is
joint-major: joint 0 x,y,z, joint 1 x,y,z, ... giving a 60-vector.
"""

from __future__ import annotations

import re
from typing import Sequence

import numpy as np

from .errors import DegenerateSkeletonError, DomainError, SchemaError

JOINT_COUNT = 20
POSE_DIM = JOINT_COUNT * 3

MIN_TORSO_LENGTH = 1e-6

# Accepted spellings for the two anchor joints, after stripping non-letters
# and lowercasing. Covers Kinect v1 and v2 naming.
_HIP_NAMES = {"hipcenter", "spinebase", "pelvis", "hips"}
_SHOULDER_NAMES = {"shouldercenter", "spineshoulder", "neck", "chest"}


def _canon(name: str) -> str:
    return re.sub(r"[^a-z]", "", name.lower())


def default_joint_names() -> list[str]:
    """Generic joint names used when a format carries none (frames-csv)."""
    names = [f"joint{i:02d}" for i in range(JOINT_COUNT)]
    names[0] = "hip_center"
    names[1] = "shoulder_center"
    return names


def find_anchor_joints(joint_names: Sequence[str]) -> tuple[int, int]:
    """Locate the hip-center and shoulder-center joints by name.

    Raises SchemaError if either anchor cannot be identified.
    """
    hip = shoulder = None
    for i, name in enumerate(joint_names):
        c = _canon(name)
        if hip is None and c in _HIP_NAMES:
            hip = i
        elif shoulder is None and c in _SHOULDER_NAMES:
            shoulder = i
    if hip is None or shoulder is None:
        raise SchemaError(
            f"cannot identify hip-center/shoulder-center among joints {list(joint_names)!r}"
        )
    return hip, shoulder


def as_pose(values) -> np.ndarray:
    """Coerce to a (20, 3) float64 pose array, validating arity."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape == (POSE_DIM,):
        arr = arr.reshape(JOINT_COUNT, 3)
    if arr.shape != (JOINT_COUNT, 3):
        raise SchemaError(f"pose must have {JOINT_COUNT} joints x 3 coordinates, got shape {arr.shape}")
    return arr


def flatten(pose: np.ndarray) -> np.ndarray:
    """Pose (20, 3) -> 60-vector in joint-major order."""
    pose = as_pose(pose)
    return pose.reshape(POSE_DIM).copy()


def unflatten(vector: np.ndarray) -> np.ndarray:
    """60-vector -> pose (20, 3); exact inverse of flatten."""
    vector = np.asarray(vector, dtype=np.float64)
    if vector.shape != (POSE_DIM,):
        raise DomainError(f"expected a {POSE_DIM}-vector, got shape {vector.shape}")
    return vector.reshape(JOINT_COUNT, 3).copy()


def normalize_pose(pose: np.ndarray, joint_names: Sequence[str] | None = None,
                   anchors: tuple[int, int] | None = None) -> np.ndarray:
    """Translate the hip-center to the origin and scale torso length to 1.

    The torso is the hip-center to shoulder-center segment. No rotation is
    applied and the time axis is untouched. Anchors may be passed directly
    (precomputed) or resolved from joint_names.
    """
    pose = as_pose(pose)
    if anchors is None:
        if joint_names is None:
            raise DomainError("normalize_pose needs joint_names or precomputed anchors")
        anchors = find_anchor_joints(joint_names)
    hip, shoulder = anchors
    centered = pose - pose[hip]
    torso = float(np.linalg.norm(centered[shoulder]))
    if torso < MIN_TORSO_LENGTH:
        raise DegenerateSkeletonError(
            f"torso length {torso:.3e} below {MIN_TORSO_LENGTH:.0e}; cannot normalize"
        )
    return centered / torso


def normalize_frames(frames: np.ndarray, anchors: tuple[int, int]) -> np.ndarray:
    """normalize_pose applied to every frame of a (T, 20, 3) array."""
    return np.stack([normalize_pose(f, anchors=anchors) for f in frames])
