from __future__ import annotations

import json
import random

import pytest

from biascorpus.cli import main
from biascorpus.dataset import (
    AnnotationLabel,
    AnnotationRecord,
    BinaryLabel,
    LabeledInstance,
    extract_candidates,
    write_candidates_jsonl,
    write_dataset_jsonl,
)
from biascorpus.io import read_jsonl, write_jsonl
from biascorpus.lexicon import TermClass
from tests.conftest import make_instances, random_filler_sentence, sentence


def run(*argv) -> int:
    return main([str(a) for a in argv])


@pytest.fixture()
def dataset_file(tmp_path, default_lexicon):
    rng = random.Random(10)
    rows = []
    for i in range(40):
        term = ("stroom", "migranten", "gehandicapten", "islam")[i % 4]
        rows.append((f"{random_filler_sentence(rng, 5)} {term}", int(i % 3 == 0)))
    instances = make_instances(default_lexicon, rows)
    path = tmp_path / "dataset.jsonl"
    write_dataset_jsonl(path, instances)
    return path


class TestPipeline:
    def test_ingest_extract_deterministic(self, tmp_path):
        out1 = tmp_path / "s1.jsonl"
        out2 = tmp_path / "s2.jsonl"
        assert run("ingest", "--fixture", "--out", out1, "--quiet") == 0
        assert run("ingest", "--fixture", "--out", out2, "--quiet") == 0
        assert out1.read_bytes() == out2.read_bytes()

        c1 = tmp_path / "c1.jsonl"
        c2 = tmp_path / "c2.jsonl"
        assert run("extract", "--sentences", out1, "--out", c1, "--quiet") == 0
        assert run("extract", "--sentences", out1, "--out", c2, "--quiet") == 0
        assert c1.read_bytes() == c2.read_bytes()

    def test_manifest_written_next_to_output(self, tmp_path):
        out = tmp_path / "sentences.jsonl"
        run("ingest", "--fixture", "--out", out, "--quiet")
        manifest = json.loads((tmp_path / "sentences.jsonl.manifest.json").read_text())
        assert manifest["command"] == "ingest"
        assert manifest["timestamp"] is None
        assert str(out) in manifest["outputs"]

    def test_stamp_adds_timestamp(self, tmp_path):
        out = tmp_path / "sentences.jsonl"
        run("ingest", "--fixture", "--out", out, "--quiet", "--stamp")
        manifest = json.loads((tmp_path / "sentences.jsonl.manifest.json").read_text())
        assert manifest["timestamp"] is not None

    def test_split_same_seed_identical_manifests(self, tmp_path, dataset_file):
        d1 = tmp_path / "sp1"
        d2 = tmp_path / "sp2"
        assert run("split", "--dataset", dataset_file, "--proportions", "0.6,0.2,0.2",
                   "--seed", 7, "--out", d1, "--quiet") == 0
        assert run("split", "--dataset", dataset_file, "--proportions", "0.6,0.2,0.2",
                   "--seed", 7, "--out", d2, "--quiet") == 0
        assert (d1 / "split_manifest.json").read_bytes() == (d2 / "split_manifest.json").read_bytes()
        assert (d1 / "train.jsonl").read_bytes() == (d2 / "train.jsonl").read_bytes()

    def test_split_writes_reconstructible_manifest(self, tmp_path, dataset_file):
        out = tmp_path / "sp"
        run("split", "--dataset", dataset_file, "--seed", 3, "--out", out, "--quiet")
        manifest = json.loads((out / "split_manifest.json").read_text())
        for name in ("train", "val", "test"):
            ids = [rec["item_id"] for rec in read_jsonl(out / f"{name}.jsonl")]
            assert manifest["item_ids"][name] == ids

    def test_holdout_lists_held_out_terms(self, tmp_path, dataset_file):
        out = tmp_path / "ho"
        assert run("holdout", "--dataset", dataset_file, "--threshold", 2,
                   "--out", out, "--quiet") == 0
        manifest = json.loads((out / "split_manifest.json").read_text())
        assert isinstance(manifest["held_out_terms"], list)

    def test_resample_preset(self, tmp_path, dataset_file, default_lexicon):
        rng = random.Random(2)
        rows = [(f"{random_filler_sentence(rng, 4)} stroom {i}", 1) for i in range(600)]
        rows += [(f"{random_filler_sentence(rng, 4)} islam {i}", 0) for i in range(1700)]
        train = tmp_path / "train.jsonl"
        write_dataset_jsonl(train, make_instances(default_lexicon, rows))
        out = tmp_path / "resampled.jsonl"
        assert run("resample", "--train", train, "--preset", "undersample",
                   "--out", out, "--quiet") == 0
        assert sum(1 for _ in read_jsonl(out)) == 1649

    def test_classify_eval_chain(self, tmp_path, dataset_file):
        preds = tmp_path / "preds.jsonl"
        report = tmp_path / "report.json"
        assert run("classify", "--items", dataset_file, "--adapter", "rule",
                   "--out", preds, "--quiet") == 0
        assert run("eval", "--preds", preds, "--gold", dataset_file,
                   "--out", report, "--quiet") == 0
        payload = json.loads(report.read_text())
        assert 0.0 <= payload["f1_positive"] <= 1.0
        assert payload["confusion"]["tp"] + payload["confusion"]["fp"] + \
            payload["confusion"]["fn"] + payload["confusion"]["tn"] == 40

    def test_eval_misaligned_exits_1(self, tmp_path, dataset_file):
        preds = tmp_path / "preds.jsonl"
        write_jsonl(preds, [{"item_id": "ghost", "label": 1, "score": 1.0, "model_id": "x"}])
        assert run("eval", "--preds", preds, "--gold", dataset_file, "--quiet",
                   "--out", tmp_path / "r.json") == 1

    def test_usage_error_exits_2(self):
        with pytest.raises(SystemExit) as excinfo:
            run("split")  # missing --dataset
        assert excinfo.value.code == 2

    def test_unknown_command_exits_2(self):
        with pytest.raises(SystemExit) as excinfo:
            run("frobnicate")
        assert excinfo.value.code == 2

    def test_verify_refuses_on_drift(self, tmp_path, dataset_file):
        out = tmp_path / "preds.jsonl"
        assert run("classify", "--items", dataset_file, "--adapter", "rule",
                   "--out", out, "--quiet") == 0
        dataset_file.write_text(dataset_file.read_text() + "\n")
        assert run("classify", "--items", dataset_file, "--adapter", "rule",
                   "--out", out, "--quiet", "--verify") == 1

    def test_explain_command(self, tmp_path, dataset_file):
        first_id = next(iter(read_jsonl(dataset_file)))["item_id"]
        out = tmp_path / "expl.json"
        html = tmp_path / "expl.html"
        assert run("explain", "--items", dataset_file, "--item-id", first_id,
                   "--adapter", "rule", "--samples", 150, "--out", out,
                   "--html", html, "--quiet") == 0
        payload = json.loads(out.read_text())
        assert payload["item_id"] == first_id
        assert html.read_text().startswith("<!doctype html>")

    def test_stats_command(self, tmp_path, dataset_file):
        out = tmp_path / "stats.json"
        assert run("stats", "--dataset", dataset_file, "--out", out, "--quiet") == 0
        payload = json.loads(out.read_text())
        assert payload["total"] == 40
        assert sum(payload["per_category"].values()) == sum(payload["per_term"].values())

    def test_report_command(self, tmp_path, dataset_file):
        preds = tmp_path / "preds.jsonl"
        run("classify", "--items", dataset_file, "--adapter", "rule", "--out", preds, "--quiet")
        r1 = tmp_path / "r1.json"
        r2 = tmp_path / "r2.json"
        run("eval", "--preds", preds, "--gold", dataset_file, "--out", r1,
            "--regime", "in_domain", "--quiet")
        run("eval", "--preds", preds, "--gold", dataset_file, "--out", r2,
            "--regime", "out_of_domain", "--quiet")
        out_dir = tmp_path / "tables"
        assert run("report", r1, r2, "--out", out_dir, "--quiet") == 0
        csv_text = (out_dir / "models_by_regime.csv").read_text()
        assert "in_domain" in csv_text and "out_of_domain" in csv_text


class TestDatasetBuild:
    def test_build_and_requeue(self, tmp_path, default_lexicon):
        sents = [sentence(f"zin {i} met stroom erin", index=i) for i in range(6)]
        candidates = extract_candidates(sents, default_lexicon)
        cand_path = tmp_path / "candidates.jsonl"
        write_candidates_jsonl(cand_path, candidates)

        records = []
        for i, cand in enumerate(candidates):
            label = [1, 0, 2, 3, 1, 0][i]
            records.append(
                AnnotationRecord(
                    item_id=cand.item_id, annotator_id="a1", session_id="s1",
                    label=AnnotationLabel(label), timestamp=f"2024-01-01T00:0{i}:00Z",
                ).to_record()
            )
        ann_path = tmp_path / "annotations.jsonl"
        write_jsonl(ann_path, records)

        out = tmp_path / "dataset.jsonl"
        requeue = tmp_path / "requeue.jsonl"
        assert run("dataset", "build", "--annotations", ann_path, "--candidates", cand_path,
                   "--out", out, "--requeue", requeue, "--quiet") == 0
        built = [LabeledInstance.from_record(r) for r in read_jsonl(out)]
        assert len(built) == 4  # one unsure requeued, one excluded dropped
        assert sum(1 for _ in read_jsonl(requeue)) == 1
        assert all(len(b.matches) >= 1 for b in built)

    def test_build_fails_on_pending_disagreement(self, tmp_path, default_lexicon):
        sents = [sentence("zin met stroom", index=0)]
        candidates = extract_candidates(sents, default_lexicon)
        cand_path = tmp_path / "candidates.jsonl"
        write_candidates_jsonl(cand_path, candidates)
        records = [
            {"item_id": candidates[0].item_id, "annotator_id": a, "session_id": "s1",
             "label": l, "timestamp": "2024-01-01T00:00:00Z"}
            for a, l in (("a1", 0), ("a2", 1))
        ]
        ann_path = tmp_path / "annotations.jsonl"
        write_jsonl(ann_path, records)
        assert run("dataset", "build", "--annotations", ann_path, "--candidates", cand_path,
                   "--out", tmp_path / "d.jsonl", "--quiet") == 1
