"""Parsing, validation, normalization, and storage of skeleton gesture datasets.

Two input formats are supported:

* canonical-json: one document per dataset,
  ``{"id": ..., "name": ..., "frame_rate": ..., "joints": [20 names],
  "sequences": [{"participant", "referent", "trial", "frames": [[[x,y,z] x20] xT]}]}``
* frames-csv: one row per frame with header
  ``dataset,participant,referent,trial,frame,j0x,j0y,j0z,...,j19z``

Parsing yields raw (unnormalized) fragments; ``build_corpus`` normalizes
every pose (hip-center to origin, torso length to 1), drops frames with
non-finite joints, and freezes the result behind a content hash.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import NotFoundError, ParseError, SchemaError, ValidationError
from .skeleton import (
    JOINT_COUNT,
    POSE_DIM,
    as_pose,
    default_joint_names,
    find_anchor_joints,
    normalize_pose,
)

CSV_HEADER = ["dataset", "participant", "referent", "trial", "frame"] + [
    f"j{j}{axis}" for j in range(JOINT_COUNT) for axis in ("x", "y", "z")
]

DEFAULT_FRAME_RATE = 30.0


@dataclass
class DatasetDescriptor:
    id: str
    name: str
    joint_names: list[str]
    frame_rate: float = DEFAULT_FRAME_RATE

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "joints": list(self.joint_names),
            "frame_rate": self.frame_rate,
        }


@dataclass
class GestureSequence:
    """One recorded gesture proposal: ordered poses plus provenance."""

    id: str
    dataset_id: str
    participant: str
    referent: str
    trial: int
    frames: np.ndarray  # (T, 20, 3)
    dropped_frames: int = 0

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=np.float64)
        if self.frames.ndim != 3 or self.frames.shape[1:] != (JOINT_COUNT, 3):
            raise SchemaError(
                f"frames must be (T, {JOINT_COUNT}, 3), got {self.frames.shape}", self.id
            )
        if len(self.frames) < 1:
            raise SchemaError("sequence must keep at least one frame", self.id)
        if self.trial < 1:
            raise SchemaError(f"trial must be >= 1, got {self.trial}", self.id)

    @property
    def length(self) -> int:
        return len(self.frames)

    def flattened(self) -> np.ndarray:
        """Frames as a (T, 60) matrix in joint-major order."""
        return self.frames.reshape(len(self.frames), POSE_DIM)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "dataset": self.dataset_id,
            "participant": self.participant,
            "referent": self.referent,
            "trial": self.trial,
            "dropped_frames": self.dropped_frames,
            "frames": self.frames.tolist(),
        }


def sequence_key(dataset_id: str, participant: str, referent: str, trial: int) -> str:
    return f"{dataset_id}/{participant}/{referent}/{trial}"


@dataclass
class CorpusFragment:
    """Parse output for one dataset: descriptor plus raw sequences."""

    descriptor: DatasetDescriptor
    sequences: list[GestureSequence]

    @property
    def pose_count(self) -> int:
        return sum(s.length for s in self.sequences)


class Corpus:
    """An immutable collection of datasets and (normalized) gesture sequences.

    Safe for concurrent reads; mutation happens only through re-building.
    """

    def __init__(self, datasets: Sequence[DatasetDescriptor],
                 sequences: Sequence[GestureSequence], normalized: bool = True):
        self.datasets = list(datasets)
        self.sequences = list(sequences)
        self.normalized = normalized
        dataset_ids = {d.id for d in self.datasets}
        if len(dataset_ids) != len(self.datasets):
            raise ValidationError("duplicate dataset ids in corpus")
        self._by_id: dict[str, GestureSequence] = {}
        for seq in self.sequences:
            if seq.dataset_id not in dataset_ids:
                raise ValidationError(f"sequence {seq.id} references unknown dataset {seq.dataset_id}")
            if seq.id in self._by_id:
                raise ValidationError(f"duplicate sequence key {seq.id}")
            if not np.isfinite(seq.frames).all():
                raise ValidationError(f"sequence {seq.id} carries non-finite joints")
            self._by_id[seq.id] = seq
        self.content_hash = _content_hash(self.datasets, self.sequences)

    # -- lookups ------------------------------------------------------------

    def sequence(self, sequence_id: str) -> GestureSequence:
        try:
            return self._by_id[sequence_id]
        except KeyError:
            raise NotFoundError(f"unknown sequence id {sequence_id!r}") from None

    def has_sequence(self, sequence_id: str) -> bool:
        return sequence_id in self._by_id

    def referents(self) -> list[str]:
        return sorted({s.referent for s in self.sequences})

    def sequences_for_referent(self, referent: str) -> list[GestureSequence]:
        found = [s for s in self.sequences if s.referent == referent]
        if not found:
            raise NotFoundError(f"no gestures recorded for referent {referent!r}")
        return found

    def sequence_ids(self) -> list[str]:
        return sorted(self._by_id)

    def flattened_map(self, scope: Iterable[str] | None = None) -> dict[str, np.ndarray]:
        """Mapping id -> (T, 60) matrix, for the metric/averaging layers."""
        ids = self.sequence_ids() if scope is None else list(scope)
        return {i: self.sequence(i).flattened() for i in ids}

    def pose_matrix(self) -> np.ndarray:
        """Every pose of every sequence stacked into an (N, 60) matrix."""
        return np.concatenate([s.flattened() for s in self.sequences], axis=0)

    @property
    def pose_count(self) -> int:
        return sum(s.length for s in self.sequences)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format": "posemap-corpus",
            "version": 1,
            "normalized": self.normalized,
            "datasets": [d.to_dict() for d in self.datasets],
            "sequences": [s.to_dict() for s in self.sequences],
            "content_hash": self.content_hash,
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(canonical_json(self.to_dict()), encoding="utf-8")

    @classmethod
    def from_dict(cls, doc: dict) -> "Corpus":
        datasets = [
            DatasetDescriptor(d["id"], d.get("name", d["id"]), list(d["joints"]),
                              float(d.get("frame_rate", DEFAULT_FRAME_RATE)))
            for d in doc["datasets"]
        ]
        sequences = [
            GestureSequence(
                id=s["id"], dataset_id=s["dataset"], participant=s["participant"],
                referent=s["referent"], trial=int(s["trial"]),
                frames=np.asarray(s["frames"], dtype=np.float64),
                dropped_frames=int(s.get("dropped_frames", 0)),
            )
            for s in doc["sequences"]
        ]
        corpus = cls(datasets, sequences, normalized=bool(doc.get("normalized", True)))
        stored = doc.get("content_hash")
        if stored is not None and stored != corpus.content_hash:
            raise ParseError("corpus content hash mismatch; file was altered")
        return corpus

    @classmethod
    def load(cls, path: str | Path) -> "Corpus":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ParseError(f"not a valid corpus file: {e}", line=e.lineno) from None
        return cls.from_dict(doc)


def canonical_json(doc) -> str:
    """Deterministic serialization: sorted keys, no whitespace, repr floats."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def _content_hash(datasets: Sequence[DatasetDescriptor],
                  sequences: Sequence[GestureSequence]) -> str:
    body = canonical_json({
        "datasets": [d.to_dict() for d in datasets],
        "sequences": [s.to_dict() for s in sequences],
    })
    return hashlib.sha256(body.encode("utf-8")).hexdigest()


# -- parsing ----------------------------------------------------------------

def parse_dataset(source, format: str = "canonical-json") -> CorpusFragment:
    """Parse one dataset stream into a raw (unnormalized) fragment.

    ``source`` may be bytes, str, a file path, or a readable stream.
    """
    text = _read_source(source)
    if format == "canonical-json":
        return _parse_canonical_json(text)
    if format == "frames-csv":
        return _parse_frames_csv(text)
    raise ValidationError(f"unknown dataset format {format!r}")


def _read_source(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, Path):
        return source.read_text(encoding="utf-8")
    if isinstance(source, str):
        return source
    if hasattr(source, "read"):
        data = source.read()
        return data.decode("utf-8") if isinstance(data, bytes) else data
    raise ValidationError(f"unreadable source of type {type(source).__name__}")


def _parse_canonical_json(text: str) -> CorpusFragment:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON: {e.msg}", line=e.lineno) from None
    for key in ("id", "joints", "sequences"):
        if key not in doc:
            raise ParseError(f"dataset document missing {key!r}")
    joints = [str(j) for j in doc["joints"]]
    if len(joints) != JOINT_COUNT:
        raise SchemaError(f"expected {JOINT_COUNT} joint names, got {len(joints)}")
    descriptor = DatasetDescriptor(
        id=str(doc["id"]),
        name=str(doc.get("name", doc["id"])),
        joint_names=joints,
        frame_rate=float(doc.get("frame_rate", DEFAULT_FRAME_RATE)),
    )
    sequences = []
    for rec_index, rec in enumerate(doc["sequences"]):
        for key in ("participant", "referent", "trial", "frames"):
            if key not in rec:
                raise ParseError(f"sequence record missing {key!r}", record=rec_index)
        seq_id = sequence_key(descriptor.id, str(rec["participant"]), str(rec["referent"]),
                              int(rec["trial"]))
        frames = []
        for frame in rec["frames"]:
            frame = np.asarray(frame, dtype=np.float64)
            if frame.shape != (JOINT_COUNT, 3):
                raise SchemaError(
                    f"frame has shape {frame.shape}, expected ({JOINT_COUNT}, 3)", seq_id
                )
            frames.append(frame)
        if not frames:
            raise SchemaError("sequence has no frames", seq_id)
        sequences.append(GestureSequence(
            id=seq_id, dataset_id=descriptor.id, participant=str(rec["participant"]),
            referent=str(rec["referent"]), trial=int(rec["trial"]),
            frames=np.stack(frames),
        ))
    return CorpusFragment(descriptor, sequences)


def _parse_frames_csv(text: str) -> CorpusFragment:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty CSV stream") from None
    if [h.strip() for h in header] != CSV_HEADER:
        raise ParseError(f"unexpected CSV header; expected {','.join(CSV_HEADER[:6])},...", line=1)

    dataset_id = None
    # (participant, referent, trial) -> list of (frame_number, pose)
    groups: dict[tuple[str, str, int], list[tuple[int, np.ndarray]]] = {}
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            seq_id = "?"
            if len(row) >= 4:
                seq_id = sequence_key(row[0], row[1], row[2], _safe_int(row[3], line_no))
            raise SchemaError(
                f"row has {len(row) - 5} coordinate values, expected {POSE_DIM} (line {line_no})",
                seq_id,
            )
        ds, participant, referent = row[0], row[1], row[2]
        if dataset_id is None:
            dataset_id = ds
        elif ds != dataset_id:
            raise ParseError(f"multiple dataset ids in one stream ({dataset_id!r}, {ds!r})",
                             line=line_no)
        trial = _safe_int(row[3], line_no)
        frame_no = _safe_int(row[4], line_no)
        try:
            coords = np.array([float(v) for v in row[5:]], dtype=np.float64)
        except ValueError:
            raise ParseError("non-numeric coordinate value", line=line_no) from None
        groups.setdefault((participant, referent, trial), []).append(
            (frame_no, coords.reshape(JOINT_COUNT, 3))
        )
    if dataset_id is None:
        raise ParseError("CSV stream contains a header but no frames")

    descriptor = DatasetDescriptor(dataset_id, dataset_id, default_joint_names())
    sequences = []
    for (participant, referent, trial), rows in groups.items():
        rows.sort(key=lambda r: r[0])
        frames = np.stack([pose for _, pose in rows])
        sequences.append(GestureSequence(
            id=sequence_key(dataset_id, participant, referent, trial),
            dataset_id=dataset_id, participant=participant, referent=referent,
            trial=trial, frames=frames,
        ))
    sequences.sort(key=lambda s: s.id)
    return CorpusFragment(descriptor, sequences)


def _safe_int(value: str, line_no: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ParseError(f"expected an integer, got {value!r}", line=line_no) from None


def serialize_fragment(fragment: CorpusFragment) -> str:
    """Canonical-json document for a fragment (raw poses, round-trippable)."""
    return canonical_json({
        "id": fragment.descriptor.id,
        "name": fragment.descriptor.name,
        "frame_rate": fragment.descriptor.frame_rate,
        "joints": list(fragment.descriptor.joint_names),
        "sequences": [
            {
                "participant": s.participant,
                "referent": s.referent,
                "trial": s.trial,
                "frames": s.frames.tolist(),
            }
            for s in fragment.sequences
        ],
    })


# -- corpus assembly --------------------------------------------------------

def build_corpus(fragments: Iterable[CorpusFragment], normalize: bool = True) -> Corpus:
    """Merge fragments into one corpus, normalizing poses and dropping
    frames that contain non-finite joints (count recorded per sequence)."""
    datasets: list[DatasetDescriptor] = []
    sequences: list[GestureSequence] = []
    for fragment in fragments:
        datasets.append(fragment.descriptor)
        anchors = find_anchor_joints(fragment.descriptor.joint_names) if normalize else None
        for seq in fragment.sequences:
            finite = np.isfinite(seq.frames).all(axis=(1, 2))
            dropped = int((~finite).sum())
            frames = seq.frames[finite]
            if len(frames) == 0:
                raise SchemaError("all frames dropped (non-finite joints)", seq.id)
            if normalize:
                frames = np.stack([normalize_pose(f, anchors=anchors) for f in frames])
            sequences.append(GestureSequence(
                id=seq.id, dataset_id=seq.dataset_id, participant=seq.participant,
                referent=seq.referent, trial=seq.trial, frames=frames,
                dropped_frames=seq.dropped_frames + dropped,
            ))
    return Corpus(datasets, sequences, normalized=normalize)
