"""The full batch pipeline through the CLI, end to end in a temp directory.

Mirrors what `posemap serve` exposes over REST, but file-to-file:
ingest -> train -> embed -> consensus -> cluster -> export.
"""

import json
import tempfile
from pathlib import Path

from posemap.cli import main
from posemap.ingest import canonical_json
from demo_data import dataset_document

with tempfile.TemporaryDirectory() as tmp:
    work = Path(tmp)
    (work / "study.json").write_text(canonical_json(dataset_document(seed=6)))
    (work / "vae.json").write_text(json.dumps(
        {"hidden_units": 16, "epochs": 20, "batch_size": 64}))

    steps = [
        ["ingest", "--input", f"{work}/study.json", "--out", f"{work}/corpus.json"],
        ["train", "--corpus", f"{work}/corpus.json", "--config", f"{work}/vae.json",
         "--out", f"{work}/model.json"],
        ["embed", "--model", f"{work}/model.json", "--corpus", f"{work}/corpus.json",
         "--out", f"{work}/paths.json"],
        ["consensus", "--referent", "wave", "--corpus", f"{work}/corpus.json",
         "--out", f"{work}/wave.json"],
        ["cluster", "--corpus", f"{work}/corpus.json", "--scope", "referent:wave",
         "--k", "2", "--seeds", "auto", "--out", f"{work}/clusters.json"],
        ["map", "grid", "--model", f"{work}/model.json", "--corpus", f"{work}/corpus.json",
         "--out", f"{work}/grid.json"],
        ["export", "--corpus", f"{work}/corpus.json", "--consensus", f"{work}/wave.json",
         "--clusters", f"{work}/clusters.json", "--annotate", "note=demo run",
         "--out", f"{work}/analysis.json"],
    ]
    for argv in steps:
        print(f"$ posemap {' '.join(argv)}")
        code = main(argv)
        assert code == 0, f"step failed: {argv}"

    analysis = json.loads((work / "analysis.json").read_text())
    print(f"\nexport document: consensus for {sorted(analysis['consensus'])}, "
          f"{len(analysis['cluster_models'])} cluster model(s), "
          f"annotations {analysis['annotations']}")
    print("\nnext: `posemap serve --corpus corpus.json --model model.json` and open the frontend")
