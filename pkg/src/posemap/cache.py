"""Content-addressed result cache: a directory of JSON envelopes.

Keys digest (corpus content hash, operation name, canonical parameters),
so a hit is only possible when recomputing would produce the same value.
Writes go through a temp file and os.replace, which is atomic on POSIX.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from pathlib import Path

from .ingest import canonical_json


class ResultCache:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(corpus_hash: str, operation: str, params: dict) -> str:
        body = canonical_json({"corpus": corpus_hash, "op": operation, "params": params})
        return hashlib.sha256(body.encode("utf-8")).hexdigest()

    def _path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def get(self, key: str) -> dict | None:
        path = self._path(key)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def put(self, key: str, payload: dict) -> dict:
        envelope = {"key": key, "created_at": time.time(), "payload": payload}
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(canonical_json(envelope))
            os.replace(tmp, self._path(key))
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)
        return envelope

    def get_or_compute(self, corpus_hash: str, operation: str, params: dict,
                       compute, bypass: bool = False):
        """Returns (payload, was_cached, key). ``bypass`` forces recomputation
        without touching the stored entry (used to spot-check cache soundness)."""
        key = self.key(corpus_hash, operation, params)
        if not bypass:
            hit = self.get(key)
            if hit is not None:
                return hit["payload"], True, key
        payload = compute()
        if not bypass:
            self.put(key, payload)
        return payload, False, key

    def payload_bytes(self, key: str) -> bytes | None:
        """The payload serialized canonically; byte-identical across reads."""
        envelope = self.get(key)
        if envelope is None:
            return None
        return canonical_json(envelope["payload"]).encode("utf-8")
