"""Self-contained analysis documents for sharing and re-import.

An export bundles everything a fresh instance needs to reproduce the
session's views against the same corpus: consensus reports, cluster
models (including pinned reassignments), and free-form annotations,
all keyed to the corpus content hash.
"""

from __future__ import annotations

from .clustering import ClusterModel
from .errors import ExportError, ValidationError
from .ingest import Corpus

EXPORT_FORMAT = "posemap-analysis"
TOOL_VERSION = "0.1.0"


def build_export(corpus: Corpus, consensus: dict[str, dict],
                 cluster_models: dict[str, ClusterModel],
                 annotations: dict[str, str]) -> dict:
    """Assemble the export document, refusing dangling references."""
    if not consensus and not cluster_models and not annotations:
        raise ValidationError("nothing to export: no computed artifacts in this session")

    dangling = []
    for referent in consensus:
        if referent not in corpus.referents():
            dangling.append(f"consensus referent {referent!r}")
    for model_id, model in cluster_models.items():
        for sid in model.scope:
            if not corpus.has_sequence(sid):
                dangling.append(f"cluster {model_id} sequence {sid!r}")
    if dangling:
        raise ExportError("export aborted, dangling references", dangling)

    return {
        "format": EXPORT_FORMAT,
        "version": 1,
        "tool_version": TOOL_VERSION,
        "corpus_hash": corpus.content_hash,
        "consensus": {r: dict(entry) for r, entry in consensus.items()},
        "cluster_models": {mid: m.to_dict() for mid, m in cluster_models.items()},
        "annotations": dict(annotations),
    }


def parse_import(doc: dict, corpus: Corpus):
    """Validate an export document against the loaded corpus and unpack it.

    Returns (consensus, cluster_models, annotations).
    """
    if doc.get("format") != EXPORT_FORMAT:
        raise ValidationError("not an analysis export document")
    if doc.get("corpus_hash") != corpus.content_hash:
        raise ValidationError(
            "export was produced for a different corpus "
            f"(hash {doc.get('corpus_hash', '?')[:12]}..., "
            f"loaded {corpus.content_hash[:12]}...)")
    consensus = {r: dict(entry) for r, entry in doc.get("consensus", {}).items()}
    cluster_models = {mid: ClusterModel.from_dict(m)
                      for mid, m in doc.get("cluster_models", {}).items()}
    annotations = {str(k): str(v) for k, v in doc.get("annotations", {}).items()}
    return consensus, cluster_models, annotations
