from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from biascorpus.annotation import AnnotationStore
from biascorpus.dataset import extract_candidates
from biascorpus.service import create_app
from tests.conftest import sentence


@pytest.fixture()
def client(tmp_path, tiny_lexicon):
    store = AnnotationStore(tmp_path)
    sents = [
        sentence("de gehandicapten hebben vaak extra kosten", index=0),
        sentence("een stroom aan aanvragen", index=1),
        sentence("migranten in de regio", index=2),
        sentence("de islam in het debat", index=3),
    ]
    batch = extract_candidates(sents, tiny_lexicon)
    store.open_session(batch, ["a1", "a2"], 1.0, seed=1, session_id="s1")
    return TestClient(create_app(store))


def drain(client, annotator, label=1):
    submitted = []
    while True:
        resp = client.get("/sessions/s1/next", params={"annotator": annotator})
        body = resp.json()
        if body["done"]:
            return submitted
        item = body["item"]
        post = client.post(
            "/sessions/s1/labels",
            json={"item_id": item["item_id"], "label": label, "guideline_ack": True},
            headers={"X-Annotator-Id": annotator},
        )
        assert post.status_code == 200
        submitted.append(item["item_id"])


class TestApi:
    def test_next_returns_item_with_matches_and_suggestion(self, client):
        resp = client.get("/sessions/s1/next", params={"annotator": "a1"})
        assert resp.status_code == 200
        item = resp.json()["item"]
        assert item["matches"]
        assert item["suggestion"] == 1  # prohibited match present
        assert item["context_before"] == ""

    def test_label_flow_and_progress(self, client):
        submitted = drain(client, "a1", label=1)
        assert len(submitted) == 4
        progress = client.get("/sessions/s1/progress").json()
        assert progress["annotators"]["a1"]["done"] == 4
        assert progress["label_tallies"]["1"] == 4
        assert progress["overlap_complete"] is False

    def test_duplicate_submit_conflict(self, client):
        resp = client.get("/sessions/s1/next", params={"annotator": "a1"})
        item_id = resp.json()["item"]["item_id"]
        first = client.post(
            "/sessions/s1/labels",
            json={"item_id": item_id, "label": 0},
            headers={"X-Annotator-Id": "a1"},
        )
        assert first.status_code == 200
        second = client.post(
            "/sessions/s1/labels",
            json={"item_id": item_id, "label": 1},
            headers={"X-Annotator-Id": "a1"},
        )
        assert second.status_code == 409
        assert second.json()["error"] == "AlreadyLabeled"

    def test_invalid_label_400(self, client):
        resp = client.get("/sessions/s1/next", params={"annotator": "a1"})
        item_id = resp.json()["item"]["item_id"]
        bad = client.post(
            "/sessions/s1/labels",
            json={"item_id": item_id, "label": 7},
            headers={"X-Annotator-Id": "a1"},
        )
        assert bad.status_code == 400
        assert bad.json()["error"] == "InvalidLabel"

    def test_unknown_session_404(self, client):
        resp = client.get("/sessions/ghost/next", params={"annotator": "a1"})
        assert resp.status_code == 404

    def test_iaa_after_overlap_completion(self, client):
        drain(client, "a1", label=1)
        # a2 disagrees on everything, giving a non-degenerate matrix
        drain(client, "a2", label=0)
        resp = client.get("/sessions/s1/iaa")
        assert resp.status_code == 200
        body = resp.json()
        assert body["n_items"] == 4
        assert body["kappa"] is not None
        progress = client.get("/sessions/s1/progress").json()
        assert progress["overlap_complete"] is True

    def test_item_lookup(self, client):
        resp = client.get("/sessions/s1/next", params={"annotator": "a1"})
        item_id = resp.json()["item"]["item_id"]
        item = client.get(f"/items/{item_id}")
        assert item.status_code == 200
        assert item.json()["item_id"] == item_id
        assert client.get("/items/nope").status_code == 404

    def test_create_session_endpoint(self, client, tiny_lexicon):
        sents = [sentence("nog een stroom zin", doc_id="d9", index=0)]
        batch = [c.to_record() for c in extract_candidates(sents, tiny_lexicon)]
        resp = client.post(
            "/sessions",
            json={"items": batch, "annotators": ["b1"], "overlap_fraction": 0, "seed": 3},
        )
        assert resp.status_code == 200
        sid = resp.json()["session_id"]
        nxt = client.get(f"/sessions/{sid}/next", params={"annotator": "b1"})
        assert nxt.json()["done"] is False
