"""Batch CLI: the full ingest -> train -> analyze -> export pipeline on disk."""

from __future__ import annotations

import json

import numpy as np
import pytest

from posemap.cli import main
from posemap.ingest import CSV_HEADER, Corpus

from conftest import base_skeleton, make_dataset_doc


@pytest.fixture()
def workdir(tmp_path):
    doc_a = make_dataset_doc("studyA", participants=2, trials=1, seed=5)
    doc_b = make_dataset_doc("studyB", participants=1, trials=1, seed=6)
    (tmp_path / "a.json").write_text(json.dumps(doc_a))
    (tmp_path / "b.json").write_text(json.dumps(doc_b))
    return tmp_path


def run_cli(*args) -> int:
    return main([str(a) for a in args])


class TestIngest:
    def test_ingest_merges_datasets(self, workdir):
        out = workdir / "corpus.json"
        assert run_cli("ingest", "--input", workdir / "a.json",
                       "--input", workdir / "b.json", "--out", out) == 0
        corpus = Corpus.load(out)
        assert {d.id for d in corpus.datasets} == {"studyA", "studyB"}
        assert corpus.normalized

    def test_ingest_csv(self, workdir):
        pose = base_skeleton()
        lines = [",".join(CSV_HEADER)]
        for frame in range(3):
            lines.append(",".join(
                ["kin", "p0", "wave", "1", str(frame)]
                + [f"{v:.5f}" for v in (pose + 0.01 * frame).ravel()]))
        csv_path = workdir / "frames.csv"
        csv_path.write_text("\n".join(lines) + "\n")
        out = workdir / "csv-corpus.json"
        assert run_cli("ingest", "--input", csv_path, "--format", "frames-csv",
                       "--out", out) == 0
        assert Corpus.load(out).sequences[0].length == 3

    def test_parse_failure_exit_code(self, workdir, capsys):
        bad = workdir / "bad.json"
        bad.write_text("{не json")
        assert run_cli("ingest", "--input", bad, "--out", workdir / "x.json") == 2
        assert "error:" in capsys.readouterr().err


@pytest.fixture()
def pipeline(workdir):
    corpus_path = workdir / "corpus.json"
    run_cli("ingest", "--input", workdir / "a.json", "--input", workdir / "b.json",
            "--out", corpus_path)
    config_path = workdir / "config.json"
    config_path.write_text(json.dumps({"hidden_units": 8, "epochs": 3, "batch_size": 32}))
    model_path = workdir / "model.json"
    run_cli("train", "--corpus", corpus_path, "--config", config_path, "--out", model_path)
    return workdir, corpus_path, model_path


class TestPipeline:
    def test_metrics_dtw_and_matrix(self, pipeline):
        workdir, corpus_path, _ = pipeline
        corpus = Corpus.load(corpus_path)
        ids = [s.id for s in corpus.sequences_for_referent("wave")][:2]
        out = workdir / "dtw.json"
        assert run_cli("metrics", "dtw", "--corpus", corpus_path,
                       "--a", ids[0], "--b", ids[1], "--out", out) == 0
        doc = json.loads(out.read_text())
        assert doc["distance"] >= 0 and doc["path"][0] == [0, 0]

        out = workdir / "matrix.json"
        assert run_cli("metrics", "matrix", "--corpus", corpus_path,
                       "--referent", "wave", "--out", out) == 0
        doc = json.loads(out.read_text())
        values = np.asarray(doc["rows"])
        np.testing.assert_array_equal(values, values.T)

    def test_consensus_report(self, pipeline):
        workdir, corpus_path, _ = pipeline
        out = workdir / "report.json"
        assert run_cli("consensus", "--referent", "circle", "--corpus", corpus_path,
                       "--out", out) == 0
        doc = json.loads(out.read_text())
        assert doc["referent"] == "circle"
        assert doc["variance"] >= 0
        assert doc["barycenter"]["converged"] in (True, False)

    def test_cluster_model_written(self, pipeline):
        workdir, corpus_path, _ = pipeline
        out = workdir / "clusters.json"
        assert run_cli("cluster", "--corpus", corpus_path, "--scope", "referent:wave",
                       "--k", "2", "--seeds", "auto", "--out", out) == 0
        doc = json.loads(out.read_text())
        assert doc["k"] == 2
        assert doc["status"] in ("converged", "max_iter_reached")

    def test_embed_and_map_artifacts(self, pipeline):
        workdir, corpus_path, model_path = pipeline
        out = workdir / "paths.json"
        assert run_cli("embed", "--model", model_path, "--corpus", corpus_path,
                       "--out", out) == 0
        corpus = Corpus.load(corpus_path)
        assert len(json.loads(out.read_text())["paths"]) == len(corpus.sequences)

        grid_out = workdir / "grid.json"
        assert run_cli("map", "grid", "--model", model_path, "--corpus", corpus_path,
                       "--out", grid_out) == 0
        grid = json.loads(grid_out.read_text())
        assert grid["m"] == 11 and len(grid["points"]) == 11

        density_out = workdir / "density.json"
        assert run_cli("map", "density", "--model", model_path, "--corpus", corpus_path,
                       "--referent", "wave", "--resolution", "16",
                       "--out", density_out) == 0
        assert np.asarray(json.loads(density_out.read_text())["values"]).shape == (16, 16)

    def test_export_document(self, pipeline):
        workdir, corpus_path, _ = pipeline
        report = workdir / "report.json"
        run_cli("consensus", "--referent", "wave", "--corpus", corpus_path, "--out", report)
        clusters = workdir / "clusters.json"
        run_cli("cluster", "--corpus", corpus_path, "--scope", "referent:wave",
                "--k", "2", "--seeds", "auto", "--out", clusters)
        out = workdir / "analysis.json"
        assert run_cli("export", "--corpus", corpus_path, "--consensus", report,
                       "--clusters", clusters, "--annotate", "note=first pass",
                       "--out", out) == 0
        doc = json.loads(out.read_text())
        assert doc["format"] == "posemap-analysis"
        assert "wave" in doc["consensus"]
        assert doc["annotations"] == {"note": "first pass"}
